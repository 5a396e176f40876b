#!/usr/bin/env python
##############################################################################
#
# omniwpt           omnidirectional magnetoelectric power transfer simulator
#
# See AUTHORS.txt for a list of people who contributed.
# See LICENSE.txt for license information.
#
##############################################################################

"""Phasor solution of the n-transmitter plus one-receiver resonant network
and the efficiency quantities derived from it.

Classes:
    CouplingState, Phasor, DriveConfig
Routines:
    build_coupling_state, solve_network, receiver_current, pte,
    pte_upper_bound, driver_voltage
"""

import dataclasses
import functools
import logging

import numpy

from omniwpt.errors import calculationError, efficiencyError
from omniwpt.magnetics import DEFAULT_ORDER, mutual_inductance, rx_mutual

logger = logging.getLogger(__name__)

# relative residual accepted from the dense solve
RESIDUAL_TOLERANCE = 1e-10


@dataclasses.dataclass
class CouplingState:
    """Impedance and mutual-inductance picture at one pose and frequency.

    omega               -- angular frequency in rad/s
    tx_tank_impedances  -- complex R_i + j X_i of the n transmitter tanks
    tx_tx_mutuals       -- symmetric n x n matrix of M_ik, zero diagonal
    tx_rx_mutuals       -- M_iL for each transmitter
    rx_impedance        -- complex R_L + j X_L
    """

    omega: float
    tx_tank_impedances: numpy.ndarray
    tx_tx_mutuals: numpy.ndarray
    tx_rx_mutuals: numpy.ndarray
    rx_impedance: complex

    def __post_init__(self):
        self.tx_tank_impedances = numpy.asarray(self.tx_tank_impedances,
                                                dtype=complex).ravel()
        n = len(self.tx_tank_impedances)
        mtt = numpy.asarray(self.tx_tx_mutuals, dtype=float)
        if mtt.size == 0 and n == 0:
            mtt = mtt.reshape(0, 0)
        self.tx_tx_mutuals = mtt
        self.tx_rx_mutuals = numpy.asarray(self.tx_rx_mutuals,
                                           dtype=float).ravel()
        self.rx_impedance = complex(self.rx_impedance)
        if mtt.shape != (n, n) or self.tx_rx_mutuals.shape != (n,):
            raise ValueError("inconsistent channel count in CouplingState")
        finite = (numpy.isfinite(self.omega) and
                  numpy.all(numpy.isfinite(self.tx_tank_impedances)) and
                  numpy.all(numpy.isfinite(mtt)) and
                  numpy.all(numpy.isfinite(self.tx_rx_mutuals)) and
                  numpy.isfinite(self.rx_impedance))
        if not finite:
            raise ValueError("CouplingState values must be finite")
        scale = numpy.max(numpy.abs(mtt)) if n else 0.0
        if numpy.any(numpy.abs(mtt - mtt.T) > 1e-12 * scale):
            raise ValueError("tx_tx_mutuals must be symmetric")
        if numpy.any(numpy.diag(mtt) != 0):
            raise ValueError("tx_tx_mutuals must have a zero diagonal")
        if numpy.any(self.tx_tank_impedances.real <= 0):
            raise ValueError("tank resistances must be positive")
        if not self.rx_impedance.real > 0:
            raise ValueError("receiver resistance must be positive")
        return


    @property
    def n(self):
        "Number of transmitter channels."
        return len(self.tx_tank_impedances)


    @property
    def tx_resistances(self):
        "Series resistances R_i of the transmitter tanks."
        return self.tx_tank_impedances.real


    def network_matrix(self):
        """Return the (n+1) x (n+1) impedance matrix of the network.
        """
        n = self.n
        z = numpy.zeros((n + 1, n + 1), dtype=complex)
        z[:n, :n] = 1j * self.omega * self.tx_tx_mutuals
        z[numpy.arange(n), numpy.arange(n)] = self.tx_tank_impedances
        z[:n, n] = 1j * self.omega * self.tx_rx_mutuals
        z[n, :n] = 1j * self.omega * self.tx_rx_mutuals
        z[n, n] = self.rx_impedance
        return z

# End of class CouplingState


@dataclasses.dataclass(frozen=True)
class Phasor:
    """Current or voltage with non-negative amplitude and binary polarity.
    """

    amplitude: float
    polarity: int = 1

    def __post_init__(self):
        if self.amplitude < 0:
            raise ValueError("phasor amplitude cannot be negative")
        if self.polarity not in (1, -1):
            raise ValueError("phasor polarity must be +1 or -1")
        return


    @property
    def value(self):
        "Signed real value amplitude * polarity."
        return self.amplitude * self.polarity

# End of class Phasor


@dataclasses.dataclass(frozen=True)
class DriveConfig:
    """Per-channel drive under a fixed total power budget.

    currents     -- tuple of Phasor, amperes
    active_mask  -- tuple of bool, inactive channels carry no current
    power_budget -- the constant sum of squared active amplitudes, A**2
    duties       -- PWM duty per channel when mapped through a LUT
    """

    currents: tuple
    active_mask: tuple
    power_budget: float
    duties: tuple = None

    def __post_init__(self):
        object.__setattr__(self, 'currents', tuple(self.currents))
        object.__setattr__(self, 'active_mask',
                           tuple(bool(m) for m in self.active_mask))
        if self.duties is not None:
            object.__setattr__(self, 'duties', tuple(self.duties))
        if len(self.currents) != len(self.active_mask):
            raise ValueError("currents and active_mask differ in length")
        for ph, on in zip(self.currents, self.active_mask):
            if not on and ph.amplitude != 0:
                raise ValueError("inactive channels must carry zero current")
        total = sum(ph.amplitude**2 for ph in self.currents)
        if abs(total - self.power_budget) > 1e-9 * self.power_budget:
            emsg = "sum of squared currents %g differs from budget %g" % (
                total, self.power_budget)
            raise ValueError(emsg)
        return


    @classmethod
    def from_values(cls, values, power_budget=None, active_mask=None,
                    duties=None):
        """Build a DriveConfig from signed real current values.

        Channels with zero value get polarity +1.  The budget defaults to
        the sum of squares of values.
        """
        vals = [float(x) for x in values]
        currents = [Phasor(abs(x), -1 if x < 0 else 1) for x in vals]
        if active_mask is None:
            active_mask = [x != 0 for x in vals]
        if power_budget is None:
            power_budget = sum(x * x for x in vals)
        return cls(currents, active_mask, power_budget, duties)


    def tx_currents(self):
        """Complex current vector for the circuit solver."""
        return numpy.array([ph.value for ph in self.currents], dtype=complex)


    def polarity_bits(self):
        """0 for positive and 1 for negative polarity per channel."""
        return [0 if ph.polarity > 0 else 1 for ph in self.currents]

# End of class DriveConfig


##############################################################################


def tank_impedance(coil, omega):
    """Series R + jX of a transmitter tank at omega.
    """
    return complex(coil.series_resistance, coil.reactance(omega))


def tx_tx_matrix(coils, order=DEFAULT_ORDER):
    """Symmetric matrix of mutual inductances among transmitter coils.

    Results are cached per coil tuple, the array returned is a copy.
    """
    return _tx_tx_matrix(tuple(coils), order).copy()


@functools.lru_cache(maxsize=32)
def _tx_tx_matrix(coils, order):
    n = len(coils)
    mtt = numpy.zeros((n, n))
    for i in range(n):
        for k in range(i + 1, n):
            mtt[i, k] = mtt[k, i] = mutual_inductance(coils[i], coils[k],
                                                      order=order)
    return mtt


def build_coupling_state(coils, receiver, omega, order=DEFAULT_ORDER):
    """build_coupling_state(coils, receiver, omega) --> CouplingState.

    coils       -- list of transmitter CoilSpec
    receiver    -- ReceiverModel at the pose of interest
    omega       -- angular frequency in rad/s
    """
    mtt = tx_tx_matrix(coils, order)
    mrx = [rx_mutual(c, receiver, order=order) for c in coils]
    ztx = [tank_impedance(c, omega) for c in coils]
    return CouplingState(omega, ztx, mtt, mrx, receiver.load_impedance(omega))


def solve_network(state, drive_voltages):
    """solve_network(state, drive_voltages) --> (tx_currents, rx_current).

    Solve the coupled network for the driver voltage phasors.

    Raises:
        ValueError when the voltage count does not match the channels
        calculationError when the matrix is singular or the residual check
        fails, with diagnostics attached
    """
    v = numpy.asarray(drive_voltages, dtype=complex).ravel()
    if v.shape != (state.n,):
        raise ValueError("expected %i drive voltages, got %i" %
                         (state.n, v.size))
    z = state.network_matrix()
    rhs = numpy.append(v, 0.0)
    try:
        x = numpy.linalg.solve(z, rhs)
    except numpy.linalg.LinAlgError as e:
        diag = dict(size=z.shape[0], cond=numpy.linalg.cond(z))
        raise calculationError("singular network matrix: %s" % e, diag)
    residual = numpy.linalg.norm(z @ x - rhs)
    bound = RESIDUAL_TOLERANCE * numpy.linalg.norm(rhs)
    if not residual <= bound:
        diag = dict(size=z.shape[0], cond=numpy.linalg.cond(z),
                    residual=residual)
        raise calculationError("network solve residual %g exceeds %g" %
                               (residual, bound), diag)
    logger.debug("network solve residual %g", residual)
    return x[:-1], complex(x[-1])


def receiver_current(state, tx_currents):
    """receiver_current(state, tx_currents) --> I_L.

    I_L = -j omega sum(M_Li I_i) / (R_L + j X_L)
    """
    i = numpy.asarray(tx_currents, dtype=complex).ravel()
    if i.shape != (state.n,):
        raise ValueError("expected %i currents, got %i" % (state.n, i.size))
    emf = numpy.dot(state.tx_rx_mutuals, i)
    return complex(-1j * state.omega * emf / state.rx_impedance)


def received_power(state, tx_currents):
    """AC power R_L |I_L|**2 delivered to the receiver load in W.
    """
    il = receiver_current(state, tx_currents)
    return state.rx_impedance.real * abs(il)**2


def loss_power(state, tx_currents):
    """Power sum(R_i |I_i|**2) dissipated in the transmitter tanks.
    """
    i = numpy.asarray(tx_currents, dtype=complex).ravel()
    return float(numpy.sum(state.tx_resistances * numpy.abs(i)**2))


def pte(state, tx_currents):
    """pte(state, tx_currents) --> Power transfer efficiency in [0, 1].

    eta = P_recv / (P_loss + P_recv)

    Raises: efficiencyError when every current is zero.
    """
    i = numpy.asarray(tx_currents, dtype=complex).ravel()
    if not numpy.any(i):
        raise efficiencyError("efficiency is undefined for zero currents")
    precv = received_power(state, i)
    ploss = loss_power(state, i)
    return precv / (ploss + precv)


def pte_upper_bound(state):
    """pte_upper_bound(state) --> Largest efficiency any currents reach.

    The bound S / (1 + S) with
    S = R_L omega**2 / (R_L**2 + X_L**2) * sum(M_Li**2 / R_i)
    is attained only for I_i proportional to M_Li / R_i.
    """
    zl = state.rx_impedance
    pref = zl.real * state.omega**2 / abs(zl)**2
    s = pref * numpy.sum(state.tx_rx_mutuals**2 / state.tx_resistances)
    return float(s / (1.0 + s))


def driver_voltage(state, tx_currents, i, rx_current=None):
    """driver_voltage(state, tx_currents, i) --> Voltage of the i-th driver.

    V_i = Z_i I_i + sum_{k != i} j omega M_ik I_k

    rx_current  -- optional receiver current I_L; when given the term
                   j omega M_iL I_L reflected from the implant is added,
                   which makes the result the exact network row.

    Raises: IndexError when i is not a channel index.
    """
    if not 0 <= i < state.n:
        raise IndexError("channel index %i out of range" % i)
    cur = numpy.asarray(tx_currents, dtype=complex).ravel()
    v = state.tx_tank_impedances[i] * cur[i]
    coupled = numpy.dot(state.tx_tx_mutuals[i], cur)
    if rx_current is not None:
        coupled += state.tx_rx_mutuals[i] * rx_current
    return complex(v + 1j * state.omega * coupled)

# End of file
