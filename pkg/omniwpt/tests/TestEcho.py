#!/usr/bin/env python

"""Unit tests for echo.py
"""


import math
import unittest
import warnings

import numpy

from omniwpt.echo import (MAX_GAIN_MISMATCH_DB, EchoReading, RxChainConfig,
                          ae_cycle_duration, ae_forward, decode_amplitudes,
                          decode_couplings, sense)
from omniwpt.errors import SaturationWarning, allWeakError
from omniwpt.magnetics import Pose
from omniwpt.tests.testutils import shared_scenario

# ----------------------------------------------------------------------------

class TestRxChainConfig(unittest.TestCase):

    def test_defaults(self):
        "check default converter and noise figures"
        cfg = RxChainConfig()
        self.assertEqual(255, cfg.max_code)
        self.assertAlmostEqual(1.8 / 256, cfg.lsb, 15)
        self.assertAlmostEqual(63.0, 20 * math.log10(cfg.gains(1)[0]), 12)
        # -161 dBm/Hz over 1 MHz into 50 ohm
        self.assertAlmostEqual(1.99e-6, cfg.input_noise_rms(), 8)
        return

    def test_gain_mismatch(self):
        "check gain mismatch limits and per-channel gains"
        self.assertRaises(ValueError, RxChainConfig,
                          gain_mismatch_db=(0.1, -0.15, 0.05))
        self.assertRaises(ValueError, RxChainConfig,
                          gain_mismatch_db=(0.0, float('nan')))
        # a common offset is gain, not mismatch
        RxChainConfig(gain_mismatch_db=(0.3,))
        RxChainConfig(gain_mismatch_db=(0.35, 0.2, 0.25))
        mm = shared_scenario().rx_chain.gain_mismatch_db
        self.assertEqual(3, len(mm))
        self.assertTrue(max(mm) - min(mm) <= MAX_GAIN_MISMATCH_DB)
        cfg = RxChainConfig(channel_gain_db=(60.0, 61.0),
                            gain_mismatch_db=(0.1, -0.1))
        g = 20 * numpy.log10(cfg.gains(2, with_mismatch=True))
        numpy.testing.assert_allclose([60.1, 60.9], g, rtol=1e-12)
        self.assertRaises(ValueError, cfg.gains, 3, True)
        return

    def test_idealized(self):
        "check the idealized chain is noiseless and fine grained"
        cfg = RxChainConfig(gain_mismatch_db=(0.1, 0.0, -0.1)).idealized()
        self.assertFalse(cfg.add_noise)
        self.assertEqual(32, cfg.adc_bits)
        self.assertEqual((), cfg.gain_mismatch_db)
        self.assertEqual(43.0, cfg.with_gain_offset(-20).channel_gain_db)
        return

# End of class TestRxChainConfig

# ----------------------------------------------------------------------------

class TestAeForward(unittest.TestCase):

    def setUp(self):
        self.sc = shared_scenario()
        self.w = self.sc.rx_chain.omega_ae
        return

    def test_linear(self):
        "check induced voltages scale with the echo current"
        rx = self.sc.receiver
        v1 = ae_forward(rx, self.sc.coils, 0.01, self.w)
        v2 = ae_forward(rx, self.sc.coils, 0.02, self.w)
        numpy.testing.assert_allclose(2 * v1, v2, rtol=1e-14)
        numpy.testing.assert_allclose(0.0, v1.real, atol=0)
        return

    def test_perpendicular(self):
        "check a coil at the origin sees nothing from a sideways implant"
        coil = self.sc.coils[0].moved(center=(0.0, 0.0, 0.0))
        rx = self.sc.receiver
        side = rx.at(Pose((0, 0, 20), (1, 0, 0)))
        v0 = abs(ae_forward(rx, [coil], 0.01, self.w)[0])
        v1 = abs(ae_forward(side, [coil], 0.01, self.w)[0])
        self.assertTrue(v0 > 0)
        self.assertTrue(v1 < 1e-12 * v0)
        return

    def test_sideways_above_center(self):
        "check a sideways implant drives TX2 and TX3 in opposition"
        rx = self.sc.receiver.at(Pose((0, 0, 15), (1, 0, 0)))
        v = ae_forward(rx, self.sc.coils, 0.01, self.w).imag
        self.assertTrue(abs(v[0]) < 1e-9 * abs(v[1]))
        self.assertAlmostEqual(1.0, -v[1] / v[2], 9)
        return

# End of class TestAeForward

# ----------------------------------------------------------------------------

class TestSense(unittest.TestCase):

    def setUp(self):
        self.cfg = RxChainConfig(channel_gain_db=0.0, add_noise=False)
        return

    def test_full_scale(self):
        "check full-scale channels give code 0 and saturate"
        r = sense([1.8, 1.8, -1.8], self.cfg)
        self.assertEqual((0, 0, 0), r.amplitude_codes)
        self.assertEqual((0, 1, 2), r.completion_order)
        self.assertEqual(0, r.reference_channel)
        self.assertEqual((0, 0, 1), r.relative_polarities)
        self.assertEqual((True, True, True), r.saturated)
        return

    def test_half_scale(self):
        "check half scale gives the middle code"
        r = sense([0.9], self.cfg)
        self.assertEqual((128,), r.amplitude_codes)
        self.assertEqual((False,), r.saturated)
        return

    def test_order(self):
        "check larger amplitudes finish first with smaller codes"
        r = sense([0.2, 0.9, 0.5], self.cfg)
        self.assertEqual((1, 2, 0), r.completion_order)
        c = r.amplitude_codes
        self.assertTrue(c[1] < c[2] < c[0])
        t = r.completion_times
        self.assertTrue(t[1] < t[2] < t[0])
        return

    def test_polarity(self):
        "check polarity bits are relative to the reference"
        r = sense([0.5, 0.5], self.cfg)
        self.assertEqual((0, 0), r.relative_polarities)
        r = sense([0.5, -0.5], self.cfg)
        self.assertEqual((0, 1), r.relative_polarities)
        r = sense([0.3, -0.6], self.cfg)
        self.assertEqual(1, r.reference_channel)
        self.assertEqual((1, 0), r.relative_polarities)
        return

    def test_phase_reference(self):
        "check phasors are projected on the strongest channel's phase"
        v = numpy.array([0.5j, -0.25j, 0.1j])
        r = sense(v, self.cfg)
        self.assertEqual((0, 1, 0), r.relative_polarities)
        return

    def test_all_weak(self):
        "check allWeakError below one LSB"
        self.assertRaises(allWeakError, sense, [1e-4, -1e-4], self.cfg)
        return

    def test_seed(self):
        "check noisy readings are reproducible from the seed"
        cfg = RxChainConfig()
        v = [3e-4, 2e-4, -1e-4]
        r1 = sense(v, cfg, rng_seed=42)
        r2 = sense(v, cfg, rng_seed=42)
        self.assertEqual(r1, r2)
        return

    def test_reading_invariants(self):
        "check EchoReading rejects inconsistent readings"
        self.assertRaises(ValueError, EchoReading, (3, 1), (0, 1), 0, (0, 0))
        self.assertRaises(ValueError, EchoReading, (1, 3), (0, 1), 1, (0, 0))
        self.assertRaises(ValueError, EchoReading, (1, 3), (0, 1), 0, (1, 0))
        self.assertRaises(ValueError, EchoReading, (1, 3), (0, 0), 0, (0, 0))
        return

# End of class TestSense

# ----------------------------------------------------------------------------

class TestDecode(unittest.TestCase):

    def test_round_trip(self):
        "check ideal sensing recovers the mutual inductances"
        cfg = RxChainConfig().idealized()
        m = numpy.array([3e-9, -1.5e-9, 0.7e-9])
        v = 1j * cfg.omega_ae * m * 0.01
        r = sense(v, cfg)
        est = decode_couplings(r, cfg, ae_current=0.01)
        numpy.testing.assert_allclose(m, est, rtol=1e-6)
        return

    def test_global_sign(self):
        "check the reference channel decodes positive"
        cfg = RxChainConfig().idealized()
        m = numpy.array([-3e-9, 1.5e-9])
        r = sense(1j * cfg.omega_ae * m * 0.01, cfg)
        est = decode_couplings(r, cfg, ae_current=0.01)
        numpy.testing.assert_allclose(-m, est, rtol=1e-6)
        return

    def test_top_code(self):
        "check the top code decodes to zero"
        cfg = RxChainConfig(channel_gain_db=0.0, add_noise=False)
        r = sense([0.9, 1e-5], cfg)
        self.assertEqual(cfg.max_code, r.amplitude_codes[1])
        amp = decode_amplitudes(r, cfg)
        self.assertEqual(0.0, amp[1])
        self.assertAlmostEqual(0.9 - 0.5 * cfg.lsb, amp[0], 12)
        return

    def test_saturation_warning(self):
        "check saturated readings warn and decode to full scale"
        cfg = RxChainConfig(channel_gain_db=0.0, add_noise=False)
        r = sense([2.5, 1.0], cfg)
        with self.assertWarns(SaturationWarning):
            est = decode_couplings(r, cfg)
        self.assertAlmostEqual(1.8 / cfg.omega_ae, est[0], 18)
        with warnings.catch_warnings():
            warnings.simplefilter('error')
            decode_couplings(sense([1.0, 0.5], cfg), cfg)
        return

    def test_ratio_error(self):
        "check noisy 8-bit ratio estimates stay within 1 % RMS"
        cfg = RxChainConfig()
        a = 0.9 / cfg.gains(1)[0]
        v = numpy.array([a, 0.8 * a])
        err = []
        for seed in range(10000):
            est = decode_couplings(sense(v, cfg, seed), cfg)
            err.append(est[1] / est[0] / 0.8 - 1)
        rms = math.sqrt(numpy.mean(numpy.square(err)))
        self.assertTrue(rms < 0.01)
        return

# End of class TestDecode

# ----------------------------------------------------------------------------

class TestCycleDuration(unittest.TestCase):

    def test_default(self):
        "check one echo cycle takes less than 100 us"
        cfg = RxChainConfig()
        self.assertTrue(ae_cycle_duration(cfg, 50e-6) < 100e-6)
        return

    def test_parts(self):
        "check tone and conversion contributions"
        cfg = RxChainConfig(warmup_cycles=0)
        t = ae_cycle_duration(cfg)
        self.assertAlmostEqual(16 / 1.35e6 + 256 / 400e6, t, 15)
        cfg2 = RxChainConfig(warmup_cycles=0, ae_cycles=32)
        self.assertAlmostEqual(16 / 1.35e6, ae_cycle_duration(cfg2) - t, 15)
        self.assertRaises(ValueError, ae_cycle_duration, cfg, -1e-6)
        return

# End of class TestCycleDuration

if __name__ == '__main__':
    unittest.main()

# End of file
