#!/usr/bin/env python
##############################################################################
#
# omniwpt           omnidirectional magnetoelectric power transfer simulator
#
# See AUTHORS.txt for a list of people who contributed.
# See LICENSE.txt for license information.
#
##############################################################################

"""Quasi-static magnetics of circular multi-turn coils.

Coils are circular filaments with a turns multiplier.  A flat spiral
winding is represented by several concentric filaments sharing the turns.
Geometry is given in millimeters, results are in SI units (T/A, H).

Classes:
    CoilSpec, Pose, ReceiverModel
Routines:
    field_at, mutual_inductance, rx_mutual, ae_coil_mutual,
    coupling_coefficient, coaxial_mutual
"""

import dataclasses
import logging
import math

import numpy
from scipy.constants import mu_0
from scipy.integrate import quad
from scipy.special import ellipe, ellipk, ellipkm1

from omniwpt.errors import singularityError

logger = logging.getLogger(__name__)

# quadrature segments per filament loop
DEFAULT_ORDER = 256

# relative distance below which a point counts as lying on a filament
FILAMENT_TOLERANCE = 1e-9

# cosine above which two coil normals are treated as parallel
PARALLEL_TOLERANCE = 1e-12

MM = 1e-3

# smallest complementary modulus handed to ellipkm1
_TINY = numpy.finfo(float).tiny


def _unit(v, name):
    """Return v as a float array, checking it has unit length.
    """
    a = numpy.asarray(v, dtype=float).reshape(3)
    nrm = numpy.linalg.norm(a)
    if not abs(nrm - 1.0) <= 1e-9:
        emsg = "%s must be a unit vector, got |%s| = %g" % (name, name, nrm)
        raise ValueError(emsg)
    return a


def _vector(v):
    return tuple(float(x) for x in numpy.asarray(v, dtype=float).reshape(3))


def normalized(v):
    """Return v scaled to unit length as a tuple.
    """
    a = numpy.asarray(v, dtype=float).reshape(3)
    return _vector(a / numpy.linalg.norm(a))


def plane_basis(normal):
    """Return orthonormal (u, v, n) arrays with n along normal.

    The in-plane vector u is derived from the x axis unless the normal is
    close to it, so coils with a z normal use u = x and v = y.
    """
    n = numpy.asarray(normal, dtype=float)
    helper = numpy.array([1.0, 0.0, 0.0])
    if abs(n[0]) > 0.9:
        helper = numpy.array([0.0, 1.0, 0.0])
    u = helper - numpy.dot(helper, n) * n
    u /= numpy.linalg.norm(u)
    v = numpy.cross(n, u)
    return u, v, n


##############################################################################


@dataclasses.dataclass(frozen=True)
class CoilSpec:
    """Physical and electrical description of one circular coil.

    loop_radius     -- outer winding radius in mm
    turns           -- number of turns
    center          -- coil center in mm
    normal          -- unit normal, sets the positive current sense
    series_resistance        -- tank series resistance in ohms
    self_inductance          -- configured self-inductance in henries
    compensation_capacitance -- series capacitor in farads, 0 for none
    inner_radius    -- inner winding radius in mm, defaults to loop_radius
    filaments       -- number of concentric filaments between inner_radius
                       and loop_radius, each carrying turns/filaments
    """

    loop_radius: float
    turns: int
    center: tuple = (0.0, 0.0, 0.0)
    normal: tuple = (0.0, 0.0, 1.0)
    series_resistance: float = 0.5
    self_inductance: float = 6.8e-6
    compensation_capacitance: float = 0.0
    inner_radius: float = None
    filaments: int = 1

    def __post_init__(self):
        if not self.loop_radius > 0:
            raise ValueError("loop_radius must be positive")
        if int(self.turns) != self.turns or self.turns < 1:
            raise ValueError("turns must be a positive integer")
        if not self.series_resistance > 0:
            raise ValueError("series_resistance must be positive")
        if not self.self_inductance > 0:
            raise ValueError("self_inductance must be positive")
        if self.compensation_capacitance < 0:
            raise ValueError("compensation_capacitance cannot be negative")
        if int(self.filaments) != self.filaments or self.filaments < 1:
            raise ValueError("filaments must be a positive integer")
        inner = self.loop_radius if self.inner_radius is None \
            else self.inner_radius
        if not 0 < inner <= self.loop_radius:
            raise ValueError("inner_radius must be in (0, loop_radius]")
        object.__setattr__(self, 'inner_radius', float(inner))
        object.__setattr__(self, 'turns', int(self.turns))
        object.__setattr__(self, 'filaments', int(self.filaments))
        object.__setattr__(self, 'center', _vector(self.center))
        object.__setattr__(self, 'normal',
                           _vector(_unit(self.normal, 'normal')))
        return


    def filament_radii(self):
        """Radii of the filaments representing the winding in mm.
        """
        if self.filaments == 1:
            return numpy.array([self.loop_radius])
        return numpy.linspace(self.inner_radius, self.loop_radius,
                              self.filaments)


    def filament_turns(self):
        """Turns carried by each filament."""
        return self.turns / float(self.filaments)


    def area_turns(self):
        """Return the sum of turns times enclosed area in m**2.
        """
        r = self.filament_radii() * MM
        return float(self.filament_turns() * numpy.pi * numpy.sum(r**2))


    def reactance(self, omega):
        """reactance(omega) --> Tank reactance X = omega L - 1/(omega C).

        The capacitor term is omitted when compensation_capacitance is 0.
        """
        x = omega * self.self_inductance
        if self.compensation_capacitance > 0:
            x -= 1.0 / (omega * self.compensation_capacitance)
        return x


    def resonant_frequency(self):
        """Resonant frequency in Hz, infinite when there is no capacitor.
        """
        if self.compensation_capacitance == 0:
            return math.inf
        lc = self.self_inductance * self.compensation_capacitance
        return 1.0 / (2 * math.pi * math.sqrt(lc))


    def moved(self, center=None, normal=None):
        """Return a copy placed at a new center and/or normal.
        """
        kw = {}
        if center is not None:
            kw['center'] = center
        if normal is not None:
            kw['normal'] = normal
        return dataclasses.replace(self, **kw)


    def transformed(self, rotation, translation=(0, 0, 0)):
        """Return a copy moved by the rigid transform x -> R x + t.

        rotation    -- 3x3 rotation matrix
        translation -- translation vector in mm
        """
        rot = numpy.asarray(rotation, dtype=float)
        c = rot @ numpy.asarray(self.center) + numpy.asarray(translation)
        n = rot @ numpy.asarray(self.normal)
        return self.moved(center=c, normal=n / numpy.linalg.norm(n))

# End of class CoilSpec


@dataclasses.dataclass(frozen=True)
class Pose:
    """Implant position in mm and unit direction of the ME film long axis.
    """

    position: tuple
    axis: tuple = (0.0, 0.0, 1.0)

    def __post_init__(self):
        object.__setattr__(self, 'position', _vector(self.position))
        object.__setattr__(self, 'axis', _vector(_unit(self.axis, 'axis')))
        return


    @classmethod
    def from_angles(cls, position, theta, phi=0.0):
        """Pose with axis at polar angle theta from z and azimuth phi.
        """
        axis = (math.sin(theta) * math.cos(phi),
                math.sin(theta) * math.sin(phi),
                math.cos(theta))
        return cls(position, axis)


    def rotated_xz(self, angle):
        """Return the pose with its axis rotated by angle in the XZ plane.

        Positive angles turn {0,0,1} toward {1,0,0}.
        """
        c, s = math.cos(angle), math.sin(angle)
        ax, ay, az = self.axis
        axis = normalized((c * ax + s * az, ay, -s * ax + c * az))
        return Pose(self.position, axis)

# End of class Pose


@dataclasses.dataclass(frozen=True)
class ReceiverModel:
    """Lumped model of the implant: ME pickup plus the Active Echo coil.

    pose                  -- implant Pose
    effective_area_turns  -- ME pickup strength along the axis, m**2 turns
    load_resistance       -- R_L in ohms
    motional_inductance   -- series inductance of the ME equivalent circuit
    resonance_hz          -- ME acoustic resonance, X_L vanishes there
    ae_coil               -- CoilSpec of the echo coil, coaxial with the axis
    """

    pose: Pose
    effective_area_turns: float
    load_resistance: float
    motional_inductance: float = 1e-3
    resonance_hz: float = 340e3
    ae_coil: CoilSpec = None

    def __post_init__(self):
        if not self.load_resistance > 0:
            raise ValueError("load_resistance must be positive")
        if not self.effective_area_turns > 0:
            raise ValueError("effective_area_turns must be positive")
        if not self.motional_inductance > 0:
            raise ValueError("motional_inductance must be positive")
        if not self.resonance_hz > 0:
            raise ValueError("resonance_hz must be positive")
        ae = self.ae_coil
        if ae is None:
            ae = CoilSpec(loop_radius=1.5, turns=7,
                          series_resistance=0.2, self_inductance=250e-9)
        ae = ae.moved(center=self.pose.position, normal=self.pose.axis)
        object.__setattr__(self, 'ae_coil', ae)
        return


    @property
    def motional_capacitance(self):
        """Capacitance resonating with motional_inductance at resonance_hz.
        """
        w0 = 2 * math.pi * self.resonance_hz
        return 1.0 / (w0 * w0 * self.motional_inductance)


    def load_reactance_at(self, omega):
        """X_L at angular frequency omega, zero at the ME resonance.
        """
        w0 = 2 * math.pi * self.resonance_hz
        return self.motional_inductance * (omega - w0 * w0 / omega)


    def load_impedance(self, omega):
        """Complex R_L + j X_L."""
        return complex(self.load_resistance, self.load_reactance_at(omega))


    def at(self, pose):
        """Return a copy of the receiver moved to pose.
        """
        return dataclasses.replace(self, pose=pose)

# End of class ReceiverModel


##############################################################################
# Biot-Savart field


def _filament_loops(coil, order):
    """Yield (points, dl, turns) for each filament of coil in meters.

    The loop is sampled at equally spaced angles, which makes the
    trapezoidal rule spectrally accurate for smooth periodic integrands.
    """
    u, v, n = plane_basis(coil.normal)
    c = numpy.asarray(coil.center) * MM
    phi = 2 * numpy.pi * numpy.arange(order) / order
    cphi = numpy.cos(phi)[:, None]
    sphi = numpy.sin(phi)[:, None]
    dphi = 2 * numpy.pi / order
    for r in coil.filament_radii() * MM:
        pts = c + r * (cphi * u + sphi * v)
        dl = r * dphi * (-sphi * u + cphi * v)
        yield pts, dl, coil.filament_turns()
    return


def _distance_to_filaments(coil, point):
    """Smallest distance in mm from point to any filament of coil.
    """
    u, v, n = plane_basis(coil.normal)
    d = numpy.asarray(point, dtype=float) - numpy.asarray(coil.center)
    z = numpy.dot(d, n)
    rho = math.hypot(numpy.dot(d, u), numpy.dot(d, v))
    return min(math.hypot(rho - r, z) for r in coil.filament_radii())


def field_at(coil, current, point, order=DEFAULT_ORDER):
    """field_at(coil, current, point) --> Magnetic flux density in tesla.

    coil    -- CoilSpec
    current -- coil current in amperes, use 1 for T/A
    point   -- evaluation point in mm
    order   -- quadrature segments per filament

    Raises: singularityError when point lies on a filament.
    Returns: numpy array of the 3 field components.
    """
    gap = _distance_to_filaments(coil, point)
    if gap <= FILAMENT_TOLERANCE * coil.loop_radius:
        emsg = "field point %r lies on a filament of the coil" % (point,)
        raise singularityError(emsg)
    p = numpy.asarray(point, dtype=float) * MM
    b = numpy.zeros(3)
    for pts, dl, nturns in _filament_loops(coil, order):
        rr = p - pts
        dist3 = numpy.linalg.norm(rr, axis=1)**3
        b += nturns * numpy.sum(numpy.cross(dl, rr) / dist3[:, None], axis=0)
    return mu_0 * current / (4 * numpy.pi) * b


##############################################################################
# mutual inductance


def coaxial_mutual(ra, rb, dz):
    """coaxial_mutual(ra, rb, dz) --> Mutual inductance of coaxial loops.

    Maxwell's closed form for two single-turn coaxial circular loops.

    ra, rb  -- loop radii in mm
    dz      -- axial separation in mm

    Raises: singularityError for coincident loops.
    Returns: mutual inductance in henries.
    """
    a, b, d = ra * MM, rb * MM, dz * MM
    if a == b and d == 0:
        raise singularityError("coincident coaxial loops")
    m = 4 * a * b / ((a + b)**2 + d**2)
    k = math.sqrt(m)
    return mu_0 * math.sqrt(a * b) * ((2 / k - k) * ellipk(m) -
                                      2 / k * ellipe(m))


def _potential_series(m):
    """Return T(m) = [(1 - m/2) K(m) - E(m)] / (pi/2 m**2) from its series.

    Used for small m where the closed form cancels catastrophically.
    """
    total = 0.0
    c_prev = 1.0
    term_m = 1.0
    for n in range(1, 60):
        c_n = c_prev * ((2 * n - 1) / (2.0 * n))**2
        if n >= 2:
            total += (c_n * 2 * n / (2 * n - 1) - c_prev / 2) * term_m
            term_m *= m
        c_prev = c_n
    return total


def _loop_potential_ratio(a, rho, z):
    """A_phi / rho of a unit-current circular loop, SI units.

    a   -- loop radius in m
    rho -- cylindrical radius of the field point in m
    z   -- axial offset of the field point in m
    """
    q = (a + rho)**2 + z**2
    m = 4 * a * rho / q
    if m < 0.05:
        t = _potential_series(m)
    else:
        # complementary modulus stays accurate where the filaments cross
        m1 = max(((a - rho)**2 + z**2) / q, _TINY)
        m = 1.0 - m1
        t = ((1 + m1) / 2 * ellipkm1(m1) - ellipe(m)) / (numpy.pi / 2 * m * m)
    return 4 * mu_0 * a * a * t / q**1.5


def _parallel_filament_mutual(ra, rb, cx, cy, cz, sense):
    """Mutual inductance of two parallel circular filaments in H.

    Loop a has radius ra centered at the origin with normal z.  Loop b has
    radius rb, center (cx, cy, cz) and normal sense * z.  All lengths in m.
    The vector potential of a is integrated along b; crossings of the two
    filaments are passed to the integrator as break points.
    """
    dxy = math.hypot(cx, cy)
    scale = max(ra, rb)
    if (dxy <= FILAMENT_TOLERANCE * scale and
            abs(ra - rb) <= FILAMENT_TOLERANCE * scale and
            abs(cz) <= FILAMENT_TOLERANCE * scale):
        raise singularityError("coincident coil filaments")

    def integrand(theta):
        ct, st = math.cos(theta), math.sin(theta)
        px = cx + rb * ct
        py = cy + rb * st
        rho = math.hypot(px, py)
        g = _loop_potential_ratio(ra, rho, cz)
        return g * (cx * ct + cy * st + rb) * rb

    points = []
    if abs(cz) <= FILAMENT_TOLERANCE * scale and dxy > 0:
        c0 = (ra * ra - dxy * dxy - rb * rb) / (2 * rb * dxy)
        if -1.0 <= c0 <= 1.0:
            psi = math.atan2(cy, cx)
            delta = math.acos(c0)
            points = sorted(set((psi + s * delta) % (2 * math.pi)
                                for s in (-1, 1)))
            points = [p for p in points if 0 < p < 2 * math.pi]
    kw = dict(epsabs=0.0, epsrel=1e-11, limit=400)
    if points:
        kw['points'] = points
    value, err = quad(integrand, 0.0, 2 * math.pi, **kw)
    logger.debug("parallel filament quad value=%g err=%g breaks=%r",
                 value, err, points)
    return sense * value


def _parallel_mutual(a, b):
    u, v, n = plane_basis(a.normal)
    sense = 1.0 if numpy.dot(a.normal, b.normal) > 0 else -1.0
    d = (numpy.asarray(b.center) - numpy.asarray(a.center)) * MM
    cx, cy, cz = numpy.dot(d, u), numpy.dot(d, v), numpy.dot(d, n)
    total = 0.0
    for ra in a.filament_radii() * MM:
        for rb in b.filament_radii() * MM:
            total += _parallel_filament_mutual(ra, rb, cx, cy, cz, sense)
    return a.filament_turns() * b.filament_turns() * total


def _neumann_mutual(a, b, order):
    total = 0.0
    for pa, dla, na in _filament_loops(a, order):
        for pb, dlb, nb in _filament_loops(b, order):
            dist = numpy.linalg.norm(pa[:, None, :] - pb[None, :, :], axis=2)
            seg = max(numpy.linalg.norm(dla[0]), numpy.linalg.norm(dlb[0]))
            if dist.min() < 0.5 * seg:
                emsg = "coil filaments intersect or come closer than " \
                       "one quadrature segment"
                raise singularityError(emsg)
            total += na * nb * numpy.sum((dla @ dlb.T) / dist)
    return mu_0 / (4 * numpy.pi) * total


def mutual_inductance(a, b, order=DEFAULT_ORDER):
    """mutual_inductance(a, b) --> Mutual inductance of two coils in H.

    Non-parallel coils use the Neumann double line integral on the
    trapezoidal grid of `order` segments.  Parallel coils, including the
    coplanar overlapping pairs of a cancelled array, integrate the closed
    form vector potential of one loop along the other.

    a, b    -- CoilSpec instances
    order   -- quadrature segments per filament for the Neumann sum

    Raises: singularityError when filaments intersect (Neumann path) or
    coincide.
    """
    cosn = float(numpy.dot(a.normal, b.normal))
    if abs(cosn) > 1.0 - PARALLEL_TOLERANCE:
        return _parallel_mutual(a, b)
    return _neumann_mutual(a, b, order)


def rx_mutual(coil, rx, order=DEFAULT_ORDER):
    """rx_mutual(coil, rx) --> Mutual inductance between coil and ME pickup.

    Small-receiver dipole approximation: the field per ampere at the
    implant position projected on its axis times effective_area_turns.

    Raises: singularityError when the implant sits on a filament.
    """
    b = field_at(coil, 1.0, rx.pose.position, order=order)
    return float(numpy.dot(b, rx.pose.axis) * rx.effective_area_turns)


def ae_coil_mutual(coil, rx, order=DEFAULT_ORDER):
    """ae_coil_mutual(coil, rx) --> Mutual inductance to the echo coil.

    Same dipole approximation as rx_mutual with the area-turns of the AE
    coil, so the two differ only by a constant factor.
    """
    b = field_at(coil, 1.0, rx.pose.position, order=order)
    return float(numpy.dot(b, rx.pose.axis) * rx.ae_coil.area_turns())


def coupling_coefficient(m, la, lb):
    """coupling_coefficient(m, la, lb) --> k = m / sqrt(la lb).

    Raises: ValueError when an inductance is not positive.
    """
    if not (la > 0 and lb > 0):
        raise ValueError("inductances must be positive, got %g, %g" %
                         (la, lb))
    return m / math.sqrt(la * lb)

# End of file
