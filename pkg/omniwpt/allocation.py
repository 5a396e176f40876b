#!/usr/bin/env python
##############################################################################
#
# omniwpt           omnidirectional magnetoelectric power transfer simulator
#
# See AUTHORS.txt for a list of people who contributed.
# See LICENSE.txt for license information.
#
##############################################################################

"""Optimal current allocation from sensed couplings.

Currents proportional to M_Li / R_i attain the efficiency bound, so with
identical transmitters the current ratio follows the coupling ratio and
the polarity follows the coupling sign.  Weak channels are switched off
and target currents are mapped to PWM duty through a look-up table.
"""

import dataclasses
import itertools
import logging
import math

import numpy

from omniwpt.circuit import DriveConfig, Phasor, pte
from omniwpt.errors import noCouplingError, saturationError

logger = logging.getLogger(__name__)

# strongest-to-weakest coupling ratio above which a channel is switched off
DEFAULT_THRESHOLD = 8.0

# points per axis of the brute-force oracle grid
DEFAULT_GRID_STEPS = 201


@dataclasses.dataclass(frozen=True)
class PwmLut:
    """Measured map from driver duty cycle to coil current.

    duty        -- strictly increasing duty fractions starting at 0
    current     -- non-decreasing currents in A starting at 0
    synthetic   -- True when the table is not a measurement
    """

    duty: tuple
    current: tuple
    synthetic: bool = True

    def __post_init__(self):
        d = tuple(float(x) for x in self.duty)
        c = tuple(float(x) for x in self.current)
        object.__setattr__(self, 'duty', d)
        object.__setattr__(self, 'current', c)
        if len(d) != len(c) or len(d) < 2:
            raise ValueError("LUT needs at least two (duty, current) pairs")
        if d[0] != 0 or c[0] != 0:
            raise ValueError("LUT must start at duty 0 with current 0")
        if any(not 0 <= x <= 1 for x in d):
            raise ValueError("LUT duty cycles must lie in [0, 1]")
        if any(b <= a for a, b in zip(d, d[1:])):
            raise ValueError("LUT duty cycles must be strictly increasing")
        if any(b < a for a, b in zip(c, c[1:])):
            raise ValueError("LUT currents must be non-decreasing")
        return


    @property
    def max_current(self):
        "Largest current the table can deliver."
        return self.current[-1]


    @classmethod
    def linear(cls, max_current, max_duty=0.5, knots=11):
        """Ideal linear table from 0 to (max_duty, max_current)."""
        d = numpy.linspace(0, max_duty, knots)
        return cls(tuple(d), tuple(d * max_current / max_duty))

# End of class PwmLut


def duty_from_current(lut, target):
    """duty_from_current(lut, target) --> Duty cycle delivering target.

    Piecewise-linear inverse interpolation of the table.  On flat table
    segments the smallest duty reaching the target is returned.

    Raises:
        ValueError for a negative target
        saturationError when target exceeds the table maximum; the error
        carries the clamped duty
    """
    if target < 0:
        raise ValueError("target current cannot be negative")
    if target > lut.max_current:
        emsg = "target %g A exceeds LUT maximum %g A" % (
            target, lut.max_current)
        raise saturationError(emsg, duty=lut.duty[-1], current=target)
    cur = numpy.asarray(lut.current)
    j = int(numpy.searchsorted(cur, target, side='left'))
    if cur[j] == target:
        return lut.duty[j]
    c0, c1 = cur[j - 1], cur[j]
    d0, d1 = lut.duty[j - 1], lut.duty[j]
    return d0 + (d1 - d0) * (target - c0) / (c1 - c0)


def current_from_duty(lut, duty):
    """current_from_duty(lut, duty) --> Coil current for a duty cycle.

    Raises: ValueError when duty lies outside the table.
    """
    if not lut.duty[0] <= duty <= lut.duty[-1]:
        raise ValueError("duty %g outside LUT range" % duty)
    return float(numpy.interp(duty, lut.duty, lut.current))


def apply_deactivation(couplings, threshold=DEFAULT_THRESHOLD):
    """apply_deactivation(couplings, threshold=8) --> Active mask.

    Channel i is switched off when max_j |k_j| / |k_i| > threshold.  The
    strongest channel stays on.  A threshold of infinity keeps every
    channel active.

    Raises: ValueError when threshold is not above 1.
    """
    if not threshold > 1:
        raise ValueError("deactivation threshold must exceed 1")
    mags = numpy.abs(numpy.asarray(couplings, dtype=float))
    strongest = mags.max() if mags.size else 0.0
    mask = []
    for m in mags:
        if m == strongest:
            mask.append(True)
        elif m == 0:
            mask.append(False)
        else:
            mask.append(bool(strongest / m <= threshold))
    return mask


def optimal_allocation(couplings, budget, resistances=None,
                       active_mask=None):
    """optimal_allocation(couplings, budget) --> DriveConfig.

    couplings   -- signed coupling values, mutual inductances or k
    budget      -- sum of squared currents, A**2
    resistances -- optional tank resistances; currents follow
                   coupling / resistance when given
    active_mask -- optional mask, masked channels get zero current

    Raises:
        noCouplingError when no active channel has a nonzero coupling
        ValueError for a non-positive budget or mismatched lengths
    """
    k = numpy.asarray(couplings, dtype=float).ravel()
    if not budget > 0:
        raise ValueError("power budget must be positive")
    if active_mask is None:
        active_mask = [True] * len(k)
    mask = numpy.asarray(active_mask, dtype=bool)
    if mask.shape != k.shape:
        raise ValueError("active_mask and couplings differ in length")
    weights = k.copy()
    if resistances is not None:
        r = numpy.asarray(resistances, dtype=float).ravel()
        if r.shape != k.shape:
            raise ValueError("resistances and couplings differ in length")
        weights = k / r
    weights[~mask] = 0.0
    norm = math.sqrt(float(numpy.sum(weights**2)))
    if norm == 0:
        raise noCouplingError("no active channel has a nonzero coupling")
    values = weights * math.sqrt(budget) / norm
    mask = [bool(m and v != 0) for m, v in zip(mask, values)]
    currents = [Phasor(abs(v), -1 if v < 0 else 1) for v in values]
    total = sum(ph.amplitude**2 for ph in currents)
    # absorb rounding so the budget holds to machine precision
    fix = math.sqrt(budget / total)
    currents = [Phasor(ph.amplitude * fix, ph.polarity) for ph in currents]
    return DriveConfig(currents, mask, budget)


def map_to_duties(drive, lut, clamp=False):
    """Return a copy of drive with per-channel PWM duties from lut.

    clamp   -- use the table maximum for channels beyond its range
               instead of raising

    Raises: saturationError when a channel current exceeds the LUT and
    clamp is False.
    """
    duties = []
    for ph in drive.currents:
        try:
            duties.append(duty_from_current(lut, ph.amplitude))
        except saturationError as e:
            if not clamp:
                raise
            logger.warning("%s, duty clamped to %g", e, e.duty)
            duties.append(e.duty)
    return dataclasses.replace(drive, duties=tuple(duties))


def grid_oracle(state, channels=None, steps=DEFAULT_GRID_STEPS):
    """grid_oracle(state) --> (best_pte, best_values) by brute force.

    Sweep the current direction over a regular grid of spherical angles
    for the selected channels and every relative polarity, keeping the
    remaining channels off.  This replicates a manual current-ratio sweep
    and serves as an oracle for optimal_allocation.

    state       -- CouplingState
    channels    -- indices of swept channels, default all (at most 3)
    steps       -- grid points per angle axis
    """
    if channels is None:
        channels = list(range(state.n))
    channels = list(channels)
    if not 1 <= len(channels) <= 3:
        raise ValueError("grid oracle sweeps one to three channels")
    t = numpy.linspace(0, numpy.pi / 2, steps)
    if len(channels) == 1:
        dirs = numpy.ones((1, 1))
    elif len(channels) == 2:
        dirs = numpy.column_stack([numpy.cos(t), numpy.sin(t)])
    else:
        th, ph = numpy.meshgrid(t, t, indexing='ij')
        dirs = numpy.column_stack([numpy.cos(th).ravel(),
                                   (numpy.sin(th) * numpy.cos(ph)).ravel(),
                                   (numpy.sin(th) * numpy.sin(ph)).ravel()])
    best = (-1.0, None)
    rl = state.rx_impedance.real
    pref = rl * state.omega**2 / abs(state.rx_impedance)**2
    m = state.tx_rx_mutuals[channels]
    r = state.tx_resistances[channels]
    signs = [(1,) + s for s in
             itertools.product((1, -1), repeat=len(channels) - 1)]
    for sg in signs:
        amps = dirs * numpy.asarray(sg, dtype=float)
        recv = pref * (amps @ m)**2
        loss = (amps**2) @ r
        eta = recv / (recv + loss)
        j = int(numpy.argmax(eta))
        if eta[j] > best[0]:
            values = numpy.zeros(state.n)
            values[channels] = amps[j]
            best = (float(eta[j]), values)
    # cross-check against the full circuit evaluation
    logger.debug("grid oracle best %g, circuit %g", best[0],
                 pte(state, best[1]))
    return best

# End of file
