#!/usr/bin/env python

"""Unit tests for allocation.py
"""


import math
import unittest

import numpy

from omniwpt.allocation import (PwmLut, apply_deactivation,
                                current_from_duty, duty_from_current,
                                grid_oracle, map_to_duties,
                                optimal_allocation)
from omniwpt.circuit import DriveConfig, pte, pte_upper_bound
from omniwpt.errors import noCouplingError, saturationError
from omniwpt.tests.testutils import random_state

# ----------------------------------------------------------------------------

class TestOptimalAllocation(unittest.TestCase):

    def test_equal_couplings(self):
        "check equal couplings share the budget equally"
        d = optimal_allocation([0.3, 0.3], 2.0)
        self.assertAlmostEqual(1.0, d.currents[0].amplitude, 12)
        self.assertAlmostEqual(1.0, d.currents[1].amplitude, 12)
        self.assertEqual((True, True), d.active_mask)
        return

    def test_single_channel(self):
        "check a lone coupling takes the whole budget"
        d = optimal_allocation([0.2, 0.0, 0.0], 4.0)
        self.assertEqual(2.0, d.currents[0].amplitude)
        self.assertEqual((True, False, False), d.active_mask)
        self.assertEqual(0.0, d.currents[2].amplitude)
        return

    def test_polarity(self):
        "check negative couplings give negative polarity"
        d = optimal_allocation([0.5, -0.25, 0.1], 1.0)
        self.assertEqual([0, 1, 0], d.polarity_bits())
        r = d.currents[1].amplitude / d.currents[0].amplitude
        self.assertAlmostEqual(0.5, r, 12)
        return

    def test_polarity_flip(self):
        "check flipping any polarity of the optimum lowers the efficiency"
        rng = numpy.random.default_rng(12)
        for i in range(50):
            state = random_state(rng)
            cur = optimal_allocation(state.tx_rx_mutuals, 1.0,
                                     state.tx_resistances).tx_currents()
            eta = pte(state, cur)
            for j in range(state.n):
                flipped = cur.copy()
                flipped[j] = -flipped[j]
                self.assertTrue(pte(state, flipped) < eta)
        return

    def test_budget(self):
        "check the squared currents sum to the budget"
        rng = numpy.random.default_rng(11)
        for k in rng.standard_normal((50, 3)):
            b = rng.uniform(0.1, 10)
            d = optimal_allocation(k, b, active_mask=apply_deactivation(k))
            total = sum(ph.amplitude**2 for ph in d.currents)
            self.assertTrue(abs(total - b) <= 1e-12 * b)
        return

    def test_resistances(self):
        "check currents follow coupling over resistance"
        d = optimal_allocation([1.0, 1.0], 1.0, resistances=[1.0, 2.0])
        r = d.currents[1].amplitude / d.currents[0].amplitude
        self.assertAlmostEqual(0.5, r, 12)
        return

    def test_no_coupling(self):
        "check noCouplingError for all-zero couplings"
        self.assertRaises(noCouplingError, optimal_allocation,
                          [0.0, 0.0, 0.0], 1.0)
        self.assertRaises(noCouplingError, optimal_allocation,
                          [0.0, 1.0], 1.0, active_mask=[True, False])
        self.assertRaises(ValueError, optimal_allocation, [1.0], 0.0)
        return

    def test_grid_oracle(self):
        "check optimal_allocation() matches the brute-force grid"
        rng = numpy.random.default_rng(5)
        for i in range(20):
            state = random_state(rng)
            drive = optimal_allocation(state.tx_rx_mutuals, 1.0,
                                       state.tx_resistances)
            eta = pte(state, drive.tx_currents())
            best, values = grid_oracle(state)
            self.assertTrue(best <= eta * (1 + 1e-9))
            self.assertTrue(eta * 0.999 <= best)
            self.assertAlmostEqual(1.0, numpy.sum(values**2), 12)
        return

    def test_grid_oracle_channels(self):
        "check grid_oracle() keeps unselected channels off"
        state = random_state(numpy.random.default_rng(8))
        best, values = grid_oracle(state, channels=[1, 2], steps=101)
        self.assertEqual(0.0, values[0])
        self.assertRaises(ValueError, grid_oracle, state, [])
        return

# End of class TestOptimalAllocation

# ----------------------------------------------------------------------------

class TestDeactivation(unittest.TestCase):

    def test_threshold(self):
        "check channels beyond the ratio are switched off"
        self.assertEqual([True, False], apply_deactivation([1.0, 0.1]))
        self.assertEqual([True, True], apply_deactivation([1.0, 0.125]))
        self.assertEqual([True, True, False],
                         apply_deactivation([-0.5, 0.4, 0.01]))
        return

    def test_infinite(self):
        "check an infinite threshold keeps coupled channels on"
        self.assertEqual([True, True, False],
                         apply_deactivation([1.0, 1e-9, 0.0], math.inf))
        return

    def test_cost_bound(self):
        "check masking one weak channel costs at most 1/(1+t**2)"
        rng = numpy.random.default_rng(13)
        t = 8.0
        checked = 0
        for i in range(300):
            state = random_state(rng)
            m = state.tx_rx_mutuals
            mask = apply_deactivation(m, t)
            full = pte_upper_bound(state)
            for j in numpy.flatnonzero(numpy.logical_not(mask)):
                keep = [k != j for k in range(state.n)]
                d = optimal_allocation(m, 1.0, state.tx_resistances, keep)
                loss = 1 - pte(state, d.tx_currents()) / full
                self.assertTrue(-1e-12 <= loss <= 1 / (1 + t**2))
                checked += 1
        self.assertTrue(checked > 0)
        return

    def test_bad_threshold(self):
        "check thresholds not above 1 are rejected"
        self.assertRaises(ValueError, apply_deactivation, [1.0], 1.0)
        self.assertRaises(ValueError, apply_deactivation, [1.0], 0.5)
        return

# End of class TestDeactivation

# ----------------------------------------------------------------------------

class TestPwmLut(unittest.TestCase):

    def setUp(self):
        self.lut = PwmLut.linear(1.2)
        return

    def test_validation(self):
        "check PwmLut rejects malformed tables"
        self.assertRaises(ValueError, PwmLut, (0, 0.2, 0.1), (0, 1, 2))
        self.assertRaises(ValueError, PwmLut, (0.1, 0.2), (0, 1))
        self.assertRaises(ValueError, PwmLut, (0, 0.2), (0, -1))
        self.assertRaises(ValueError, PwmLut, (0,), (0,))
        return

    def test_inverse(self):
        "check duty_from_current() inverts current_from_duty()"
        for target in (0.0, 0.05, 0.6, 1.0, 1.2):
            d = duty_from_current(self.lut, target)
            self.assertAlmostEqual(target, current_from_duty(self.lut, d), 12)
        self.assertAlmostEqual(0.25, duty_from_current(self.lut, 0.6), 12)
        self.assertRaises(ValueError, duty_from_current, self.lut, -0.1)
        self.assertRaises(ValueError, current_from_duty, self.lut, 0.7)
        return

    def test_nonlinear_mid_cell(self):
        "check inverse interpolation inside cells of a nonlinear table"
        lut = PwmLut((0, 0.1, 0.3, 0.5), (0, 0.4, 0.9, 1.0))
        self.assertAlmostEqual(0.2, duty_from_current(lut, 0.65), 12)
        self.assertAlmostEqual(0.4, duty_from_current(lut, 0.95), 12)
        self.assertAlmostEqual(0.05, duty_from_current(lut, 0.2), 12)
        self.assertAlmostEqual(0.65, current_from_duty(lut, 0.2), 12)
        return

    def test_flat_segment(self):
        "check the smallest duty is used on flat segments"
        lut = PwmLut((0, 0.1, 0.2, 0.3), (0, 0.5, 0.5, 1.0))
        self.assertEqual(0.1, duty_from_current(lut, 0.5))
        return

    def test_saturation(self):
        "check saturationError carries the clamped duty"
        with self.assertRaises(saturationError) as cm:
            duty_from_current(self.lut, 1.5)
        self.assertEqual(0.5, cm.exception.duty)
        self.assertEqual(1.5, cm.exception.current)
        return

    def test_map_to_duties(self):
        "check map_to_duties() with and without clamping"
        drive = DriveConfig.from_values([0.6, -1.5])
        self.assertRaises(saturationError, map_to_duties, drive, self.lut)
        with self.assertLogs('omniwpt.allocation', 'WARNING'):
            d = map_to_duties(drive, self.lut, clamp=True)
        self.assertAlmostEqual(0.25, d.duties[0], 12)
        self.assertEqual(0.5, d.duties[1])
        self.assertEqual(drive.currents, d.currents)
        return

# End of class TestPwmLut

if __name__ == '__main__':
    unittest.main()

# End of file
