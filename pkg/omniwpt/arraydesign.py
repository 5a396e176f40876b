#!/usr/bin/env python
##############################################################################
#
# omniwpt           omnidirectional magnetoelectric power transfer simulator
#
# See AUTHORS.txt for a list of people who contributed.
# See LICENSE.txt for license information.
#
##############################################################################

"""Transmit array placement by mutual-inductance cancellation.

Overlapping coplanar coils share flux in opposite directions through the
overlap and the outer region.  At one center distance the two contributions
cancel and the pair is decoupled.  Three coils at that distance on an
equilateral triangle are decoupled pairwise.
"""

import dataclasses
import logging
import math

from scipy.optimize import brentq

from omniwpt.errors import noCancellationError
from omniwpt.magnetics import (DEFAULT_ORDER, coupling_coefficient,
                               mutual_inductance)

logger = logging.getLogger(__name__)

# root tolerance of the cancellation distance in mm
DISTANCE_TOLERANCE = 1e-6

# pairs with larger |k| are flagged by validate_array
DEFAULT_K_THRESHOLD = 1e-3


def coplanar_mutual(coil, distance, order=DEFAULT_ORDER):
    """Mutual inductance of coil and its copy offset by distance mm in x.
    """
    a = coil.moved(center=(0.0, 0.0, 0.0), normal=(0.0, 0.0, 1.0))
    b = a.moved(center=(distance, 0.0, 0.0))
    return mutual_inductance(a, b, order=order)


def default_bracket(coil):
    """Search range covering partial overlap of two equal coils in mm."""
    return (0.5 * coil.loop_radius, 1.95 * coil.loop_radius)


def find_cancellation_distance(coil, bracket=None, order=DEFAULT_ORDER,
                               xtol=DISTANCE_TOLERANCE):
    """find_cancellation_distance(coil, bracket) --> distance in mm.

    Root of d -> M(d) for two coplanar copies of coil.

    coil    -- CoilSpec of the transmitter
    bracket -- (d_min, d_max) in mm, defaults to default_bracket(coil)

    Raises: noCancellationError when M has the same sign at both ends.
    """
    lo, hi = bracket if bracket is not None else default_bracket(coil)
    if not 0 < lo < hi:
        raise ValueError("bracket must satisfy 0 < d_min < d_max")
    mlo = coplanar_mutual(coil, lo, order)
    mhi = coplanar_mutual(coil, hi, order)
    if mlo * mhi >= 0:
        emsg = ("mutual inductance does not change sign in [%g, %g] mm:"
                " M = %g, %g H" % (lo, hi, mlo, mhi))
        raise noCancellationError(emsg)
    d, info = brentq(lambda x: coplanar_mutual(coil, x, order), lo, hi,
                     xtol=xtol, full_output=True)
    logger.debug("cancellation distance %.6f mm after %i iterations",
                 d, info.iterations)
    return d


def layout_three_coils(coil, distance):
    """layout_three_coils(coil, distance) --> list of three CoilSpec.

    Centers sit on an equilateral triangle of side distance centered on
    the origin in the z = 0 plane, TX1 on the -y axis and TX2, TX3 above
    it at -x and +x.  All normals point along +z.
    """
    h = distance / math.sqrt(3)
    centers = [(0.0, -h, 0.0),
               (-distance / 2, h / 2, 0.0),
               (distance / 2, h / 2, 0.0)]
    return [coil.moved(center=c, normal=(0.0, 0.0, 1.0)) for c in centers]


@dataclasses.dataclass
class PairCoupling:
    """Coupling of one coil pair in an array.

    perturbation    -- |j omega M| / |Z_i| at unit currents, the fraction
                       by which the partner shifts the driver voltage
    """

    i: int
    j: int
    mutual: float
    k: float
    perturbation: float
    flagged: bool = False


@dataclasses.dataclass
class ArrayReport:
    """Pairwise couplings of a transmit array."""

    pairs: list
    k_threshold: float = DEFAULT_K_THRESHOLD

    @property
    def max_abs_k(self):
        return max(abs(p.k) for p in self.pairs)


    @property
    def flagged(self):
        "Pairs whose |k| exceeds the threshold."
        return [p for p in self.pairs if p.flagged]


    def format(self):
        """Return the report as a text table.
        """
        lines = ["pair       M (H)          k             dV/V",
                 "-" * 52]
        for p in self.pairs:
            mark = "  *" if p.flagged else ""
            lines.append("%i-%i  %13.5e  %13.5e  %11.3e%s" % (
                p.i + 1, p.j + 1, p.mutual, p.k, p.perturbation, mark))
        lines.append("max |k| = %.3e (threshold %.1e)" %
                     (self.max_abs_k, self.k_threshold))
        return "\n".join(lines)

    __str__ = format

# End of class ArrayReport


def validate_array(coils, omega, k_threshold=DEFAULT_K_THRESHOLD,
                   order=DEFAULT_ORDER):
    """validate_array(coils, omega) --> ArrayReport.

    Raises: ValueError for fewer than two coils.
    """
    if len(coils) < 2:
        raise ValueError("array validation needs at least two coils")
    pairs = []
    for i in range(len(coils)):
        for j in range(i + 1, len(coils)):
            a, b = coils[i], coils[j]
            m = mutual_inductance(a, b, order=order)
            k = coupling_coefficient(m, a.self_inductance, b.self_inductance)
            za = abs(complex(a.series_resistance, a.reactance(omega)))
            pert = abs(omega * m) / za
            pairs.append(PairCoupling(i, j, m, k, pert,
                                      abs(k) > k_threshold))
    report = ArrayReport(pairs, k_threshold)
    if report.flagged:
        logger.info("%i coil pairs exceed |k| = %g", len(report.flagged),
                    k_threshold)
    return report

# End of file
