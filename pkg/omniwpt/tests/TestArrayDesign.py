#!/usr/bin/env python

"""Unit tests for arraydesign.py
"""


import math
import unittest

import numpy

from omniwpt.arraydesign import (coplanar_mutual, default_bracket,
                                 find_cancellation_distance,
                                 layout_three_coils, validate_array)
from omniwpt.circuit import build_coupling_state, driver_voltage, tx_tx_matrix
from omniwpt.errors import noCancellationError
from omniwpt.magnetics import DEFAULT_ORDER, CoilSpec
from omniwpt.tests.testutils import shared_scenario

# ----------------------------------------------------------------------------

class TestCancellation(unittest.TestCase):

    @classmethod
    def setUpClass(cls):
        cls.coil = shared_scenario().coils[0]
        cls.distance = find_cancellation_distance(cls.coil)
        return

    def test_distance(self):
        "check the cancellation distance of the 42 mm coil"
        self.assertTrue(24 * 0.85 <= self.distance <= 24 * 1.15)
        lo, hi = default_bracket(self.coil)
        self.assertTrue(lo < self.distance < hi)
        return

    def test_residual(self):
        "check mutual inductance vanishes at the root"
        m = coplanar_mutual(self.coil, self.distance)
        self.assertTrue(abs(m) <= 1e-3 * self.coil.self_inductance)
        return

    def test_sign_change(self):
        "check M is positive inside and negative outside the root"
        self.assertTrue(coplanar_mutual(self.coil, self.distance - 2) > 0)
        self.assertTrue(coplanar_mutual(self.coil, self.distance + 2) < 0)
        return

    def test_no_overlap(self):
        "check noCancellationError without overlap"
        r = self.coil.loop_radius
        self.assertRaises(noCancellationError, find_cancellation_distance,
                          self.coil, (2.2 * r, 3.0 * r))
        m1 = coplanar_mutual(self.coil, 2.2 * r)
        m2 = coplanar_mutual(self.coil, 3.0 * r)
        self.assertTrue(m1 < m2 < 0)
        self.assertRaises(ValueError, find_cancellation_distance,
                          self.coil, (10.0, 5.0))
        return

    def test_single_filament(self):
        "check a thin ring cancels at three quarters of a diameter"
        ring = CoilSpec(10, 1)
        d = find_cancellation_distance(ring)
        self.assertTrue(14 < d < 17)
        self.assertTrue(abs(coplanar_mutual(ring, d)) < 1e-12)
        return

    def test_bracket_sweep(self):
        "check M is finite across the bracket with a single sign change"
        lo, hi = default_bracket(self.coil)
        values = [coplanar_mutual(self.coil, d)
                  for d in numpy.linspace(lo, hi, 15)]
        self.assertTrue(numpy.all(numpy.isfinite(values)))
        signs = numpy.sign(values)
        self.assertEqual(1, numpy.count_nonzero(signs[1:] != signs[:-1]))
        r = self.coil.loop_radius
        values = [coplanar_mutual(self.coil, d)
                  for d in numpy.linspace(0.5 * r, 1.5 * r, 12)]
        self.assertTrue(numpy.all(numpy.diff(values) < 0))
        return

    def test_order_independent(self):
        "check the root does not move when the order is doubled"
        d = find_cancellation_distance(self.coil, order=2 * DEFAULT_ORDER)
        self.assertTrue(abs(d - self.distance) < 0.1)
        return

    def test_bundled_array(self):
        "check the bundled array sits at the cancellation distance"
        sc = shared_scenario()
        mtt = tx_tx_matrix(sc.coils)
        self.assertTrue(numpy.all(numpy.isfinite(mtt)))
        c = numpy.array([x.center for x in sc.coils])
        for i, j in ((0, 1), (1, 2), (0, 2)):
            gap = numpy.linalg.norm(c[i] - c[j])
            self.assertTrue(abs(gap - self.distance) < 0.02)
        return

    def test_driver_perturbation(self):
        "check neighbors shift each driver voltage by less than 1%"
        sc = shared_scenario()
        coils = layout_three_coils(self.coil, self.distance)
        state = build_coupling_state(coils, sc.receiver, sc.omega)
        ones = numpy.ones(3)
        for i in range(3):
            z = state.tx_tank_impedances[i]
            v = driver_voltage(state, ones, i)
            self.assertTrue(abs(v - z) / abs(z) < 0.01)
        return

    def test_layout(self):
        "check the three coils sit on an equilateral triangle"
        coils = layout_three_coils(self.coil, self.distance)
        c = numpy.array([x.center for x in coils])
        for i, j in ((0, 1), (1, 2), (0, 2)):
            self.assertAlmostEqual(self.distance,
                                   numpy.linalg.norm(c[i] - c[j]), 9)
        numpy.testing.assert_allclose(0.0, c.mean(axis=0), atol=1e-12)
        self.assertTrue(c[0][1] < 0)
        self.assertTrue(c[1][0] < 0 < c[2][0])
        for x in coils:
            self.assertEqual((0.0, 0.0, 1.0), x.normal)
        return

    def test_validate_layout(self):
        "check the cancelled layout passes validation"
        coils = layout_three_coils(self.coil, self.distance)
        w = 2 * math.pi * 340e3
        report = validate_array(coils, w)
        self.assertEqual(3, len(report.pairs))
        self.assertTrue(report.max_abs_k <= 1e-3)
        self.assertEqual([], report.flagged)
        self.assertIn('max |k|', report.format())
        self.assertEqual(report.format(), str(report))
        return

    def test_validate_concentric(self):
        "check stacked coils are flagged"
        a = self.coil.moved(center=(0, 0, 0))
        b = self.coil.moved(center=(0, 0, 1))
        w = 2 * math.pi * 340e3
        report = validate_array([a, b], w)
        self.assertTrue(report.pairs[0].k > 0.1)
        self.assertEqual(1, len(report.flagged))
        self.assertTrue(report.pairs[0].perturbation > 0)
        self.assertRaises(ValueError, validate_array, [a], w)
        return

    def test_validate_separated(self):
        "check coils one diameter apart couple more than the cancelled pair"
        a = self.coil.moved(center=(0, 0, 0))
        b = self.coil.moved(center=(4 * self.coil.loop_radius, 0, 0))
        w = 2 * math.pi * 340e3
        far = validate_array([a, b], w).max_abs_k
        coils = layout_three_coils(self.coil, self.distance)
        self.assertTrue(far > validate_array(coils, w).max_abs_k)
        return

# End of class TestCancellation

if __name__ == '__main__':
    unittest.main()

# End of file
