#!/usr/bin/env python
##############################################################################
#
# omniwpt           omnidirectional magnetoelectric power transfer simulator
#
# See AUTHORS.txt for a list of people who contributed.
# See LICENSE.txt for license information.
#
##############################################################################

"""Fourier series of the three-level power amplifier waveform.

The waveform is +1 for a centered pulse of duty * period, -1 for an equal
pulse half a period later and 0 otherwise.  Duty is the positive-pulse
fraction of the full period, so duty 0.5 is the square wave and the third
harmonic vanishes at duty 1/3.  Amplitudes are normalized to the square
wave fundamental 4/pi.
"""

import math

import numpy

# suppression reported where the third harmonic vanishes
SUPPRESSION_CAP_DB = 300.0


def _sinpi(x):
    """sin(pi x) that is exactly 0 at integers and +-1 at half integers."""
    r = math.fmod(x, 2.0)
    if r == int(r):
        return 0.0
    if r in (0.5, -1.5):
        return 1.0
    if r in (1.5, -0.5):
        return -1.0
    return math.sin(math.pi * r)


def _check_duty(duty):
    if not 0 < duty <= 0.5:
        raise ValueError("duty must lie in (0, 0.5], got %r" % duty)
    return


def three_level_spectrum(duty, n_max):
    """three_level_spectrum(duty, n_max) --> normalized harmonic amplitudes.

    Element n-1 holds b_n / (4/pi) = sin(n pi duty) / n for odd n and 0
    for even n.

    Raises: ValueError for duty outside (0, 0.5] or n_max < 1.
    """
    _check_duty(duty)
    if n_max < 1:
        raise ValueError("n_max must be at least 1")
    b = numpy.zeros(n_max)
    for n in range(1, n_max + 1, 2):
        b[n - 1] = _sinpi(n * duty) / n
    return b


def waveform_power(duty):
    """Mean square of the unit three-level waveform, 2 * duty."""
    _check_duty(duty)
    return 2.0 * duty


def harmonic_power(duty, n_max):
    """Sum of b_n**2 / 2 over the first n_max harmonics.

    Approaches waveform_power(duty) as n_max grows.
    """
    b = three_level_spectrum(duty, n_max) * 4 / math.pi
    return float(numpy.sum(b**2) / 2)


def sampled_waveform(duty, samples=4096):
    """One period of the unit three-level waveform on a uniform grid.
    """
    _check_duty(duty)
    t = numpy.arange(samples) / float(samples)
    # distance from the positive pulse center on a unit period
    d = numpy.abs((t + 0.5) % 1.0 - 0.5)
    w = numpy.zeros(samples)
    w[d < duty / 2] = 1.0
    w[numpy.abs(d - 0.5) < duty / 2] = -1.0
    return w


def fft_spectrum(waveform, n_max):
    """Normalized cosine amplitudes of a sampled periodic waveform.
    """
    y = numpy.fft.rfft(waveform) * 2.0 / len(waveform)
    return numpy.real(y[1:n_max + 1]) * math.pi / 4


def harmonic_tradeoff(duty):
    """harmonic_tradeoff(duty) --> (fundamental_loss_db, suppression_db).

    Both relative to the square wave.  The loss is positive when the
    fundamental is smaller.  The suppression of the third harmonic is
    capped at SUPPRESSION_CAP_DB where the harmonic vanishes.
    """
    b = three_level_spectrum(duty, 3)
    loss = -20 * math.log10(abs(b[0]))
    third = abs(b[2]) * 3
    if third == 0:
        return loss, SUPPRESSION_CAP_DB
    suppression = min(-20 * math.log10(third), SUPPRESSION_CAP_DB)
    return loss, suppression


def conduction_ratio(duty):
    """Driver on-time relative to the square wave."""
    _check_duty(duty)
    return 2.0 * duty


def duty_sweep(lo=0.05, hi=0.5, steps=91):
    """Return rows (duty, loss_db, suppression_db) over a duty range.
    """
    rows = []
    for d in numpy.linspace(lo, hi, steps):
        loss, supp = harmonic_tradeoff(float(d))
        rows.append((float(d), loss, supp))
    return rows


def best_duty(lo=0.30, hi=0.36, steps=601, max_loss_db=2.5):
    """best_duty() --> (duty, loss_db, suppression_db).

    The duty within [lo, hi] with the largest third-harmonic suppression
    whose fundamental loss does not exceed max_loss_db.

    Raises: ValueError when no duty in the range meets the loss cap.
    """
    rows = [r for r in duty_sweep(lo, hi, steps) if r[1] <= max_loss_db]
    if not rows:
        raise ValueError("no duty in [%g, %g] with loss below %g dB" %
                         (lo, hi, max_loss_db))
    return max(rows, key=lambda r: r[2])

# End of file
