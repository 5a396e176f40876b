#!/usr/bin/env python
##############################################################################
#
# omniwpt           omnidirectional magnetoelectric power transfer simulator
#
# See AUTHORS.txt for a list of people who contributed.
# See LICENSE.txt for license information.
#
##############################################################################

"""Closed-loop operation of the implant and tracking simulations.

The implant charges, receives a downlink command carrying its device ID and
a task, then either runs an Active Echo cycle or stimulates.  Echo cycles
recur at the activation frequency.  While an echo is sensed the drivers are
in high impedance and no power is delivered.

Classes:
    Phase, ControlConfig, StimulationParams, LoopState, Trajectory,
    TrackingSample and the loop events
Routines:
    step, ae_update, run_tracking, compare_baselines,
    interruption_fraction, stimulation_trace
"""

import dataclasses
import enum
import logging
import math

import numpy

from omniwpt.allocation import (apply_deactivation, map_to_duties,
                                optimal_allocation)
from omniwpt.circuit import (DriveConfig, build_coupling_state, pte,
                             received_power)
from omniwpt.echo import (ae_cycle_duration, ae_forward, decode_couplings,
                          sense)
from omniwpt.errors import allWeakError, efficiencyError, protocolError
from omniwpt.magnetics import Pose

logger = logging.getLogger(__name__)

# gain reduction per retry of a saturated echo
LOW_GAIN_STEP_DB = 20.0
MAX_GAIN_RETRIES = 3


class Phase(enum.Enum):
    CHARGING = 'Charging'
    DOWNLINK = 'Downlink'
    AE_SENSING = 'AeSensing'
    STIMULATING = 'Stimulating'
    IDLE = 'Idle'

    @property
    def delivers_power(self):
        return self in (Phase.CHARGING, Phase.STIMULATING)

# End of class Phase


@dataclasses.dataclass(frozen=True)
class ControlConfig:
    """Timing constants of the control loop.

    charge_time_s       -- storage charge time before the downlink
    downlink_latency_s  -- command transfer time
    ring_margin_s       -- tank ring-up and ring-down allowance per echo
    activation_hz       -- echo repetition rate
    device_id           -- ID the implant answers to
    """

    charge_time_s: float = 10e-3
    downlink_latency_s: float = 1e-3
    ring_margin_s: float = 50e-6
    activation_hz: float = 20.0
    device_id: str = '0x5a3c'

    def __post_init__(self):
        if self.charge_time_s < 0 or self.downlink_latency_s < 0:
            raise ValueError("loop times cannot be negative")
        if self.ring_margin_s < 0:
            raise ValueError("ring margin cannot be negative")
        if not self.activation_hz > 0:
            raise ValueError("activation_hz must be positive")
        return

# End of class ControlConfig


@dataclasses.dataclass(frozen=True)
class StimulationParams:
    """Programmed biphasic stimulation.

    amplitude_v     -- pulse amplitude
    pulse_width_s   -- width of each phase
    intervals_s     -- pulse-start intervals, used in rotation
    """

    amplitude_v: float = 3.0
    pulse_width_s: float = 0.4e-3
    intervals_s: tuple = (10e-3, 20e-3)

    def __post_init__(self):
        object.__setattr__(self, 'intervals_s',
                           tuple(float(x) for x in self.intervals_s))
        if not self.pulse_width_s > 0:
            raise ValueError("pulse width must be positive")
        if not self.intervals_s:
            raise ValueError("at least one pulse interval is needed")
        if any(x < 2 * self.pulse_width_s for x in self.intervals_s):
            raise ValueError("intervals must hold a full biphasic pulse")
        return

# End of class StimulationParams


def stimulation_trace(params, t0=0.0, n_pulses=4):
    """stimulation_trace(params, t0, n_pulses) --> list of phase rows.

    Each pulse gives two rows (t_start_s, t_end_s, amplitude_v), the
    cathodic phase followed by the anodic one.  Pulse starts are separated
    by the configured intervals in rotation.
    """
    rows = []
    t = t0
    w = params.pulse_width_s
    for i in range(n_pulses):
        rows.append((t, t + w, -params.amplitude_v))
        rows.append((t + w, t + 2 * w, params.amplitude_v))
        t += params.intervals_s[i % len(params.intervals_s)]
    return rows


##############################################################################
# loop events


@dataclasses.dataclass(frozen=True)
class ChargeComplete:
    t: float


@dataclasses.dataclass(frozen=True)
class DownlinkCommand:
    """Command decoded from the downlink, task is 'ae' or 'stimulate'."""
    t: float
    device_id: str
    task: str = 'ae'
    stimulation: StimulationParams = None


@dataclasses.dataclass(frozen=True)
class AeTrigger:
    t: float


@dataclasses.dataclass(frozen=True)
class AeComplete:
    t: float
    drive: DriveConfig = None
    reading: object = None


@dataclasses.dataclass(frozen=True)
class StimulationDone:
    t: float


@dataclasses.dataclass(frozen=True)
class Reset:
    t: float


@dataclasses.dataclass(frozen=True)
class LoopState:
    """Snapshot of the control loop.

    phase           -- current Phase
    current_drive   -- DriveConfig held by the transmitter, None before
                       the first echo
    last_reading    -- EchoReading of the last successful echo
    sim_time        -- simulation clock in seconds
    phase_started   -- time the current phase was entered
    resume_phase    -- phase resumed after an echo cycle
    stimulation     -- active StimulationParams
    retry           -- True when the last echo was too weak to use
    """

    phase: Phase = Phase.CHARGING
    current_drive: DriveConfig = None
    last_reading: object = None
    sim_time: float = 0.0
    phase_started: float = 0.0
    resume_phase: Phase = Phase.CHARGING
    stimulation: StimulationParams = None
    retry: bool = False

    @classmethod
    def initial(cls, t=0.0):
        """Fresh loop, charging from time t."""
        return cls(sim_time=t, phase_started=t)


    @property
    def delivering(self):
        "True when the held drive is delivering power."
        return self.phase.delivers_power and self.current_drive is not None

# End of class LoopState


def _enter(state, phase, t, **kw):
    return dataclasses.replace(state, phase=phase, sim_time=t,
                               phase_started=t, **kw)


def step(state, event, cfg=None):
    """step(state, event, cfg) --> LoopState after event.

    Charging -> Downlink once the charge time has elapsed.  Downlink
    dispatches the commanded task after the ID check and goes Idle on an
    ID mismatch.  Echo triggers suspend Charging or Stimulating and the
    completed echo resumes it with the new drive.  Reset returns any phase
    to Charging.

    Raises: protocolError for events illegal in the current phase or
    going back in time.
    """
    cfg = cfg or ControlConfig()
    name = type(event).__name__
    ph = state.phase
    if event.t < state.sim_time:
        raise protocolError(ph.value, name, "time %g precedes %g" %
                            (event.t, state.sim_time))
    if isinstance(event, Reset):
        return _enter(state, Phase.CHARGING, event.t)
    if ph is Phase.CHARGING and isinstance(event, ChargeComplete):
        if event.t - state.phase_started < cfg.charge_time_s * (1 - 1e-9):
            raise protocolError(ph.value, name, "charge time not elapsed")
        return _enter(state, Phase.DOWNLINK, event.t)
    if ph is Phase.DOWNLINK and isinstance(event, DownlinkCommand):
        if event.device_id != cfg.device_id:
            logger.info("downlink for device %s ignored", event.device_id)
            return _enter(state, Phase.IDLE, event.t)
        if event.task == 'ae':
            return _enter(state, Phase.AE_SENSING, event.t,
                          resume_phase=Phase.CHARGING)
        if event.task == 'stimulate':
            params = event.stimulation or StimulationParams()
            return _enter(state, Phase.STIMULATING, event.t,
                          stimulation=params)
        raise protocolError(ph.value, name, "unknown task %r" % event.task)
    if ph.delivers_power and isinstance(event, AeTrigger):
        return _enter(state, Phase.AE_SENSING, event.t, resume_phase=ph)
    if ph is Phase.AE_SENSING and isinstance(event, AeComplete):
        if event.reading is None:
            return _enter(state, state.resume_phase, event.t, retry=True)
        return _enter(state, state.resume_phase, event.t,
                      current_drive=event.drive, last_reading=event.reading,
                      retry=False)
    if ph is Phase.STIMULATING and isinstance(event, StimulationDone):
        return _enter(state, Phase.CHARGING, event.t, stimulation=None)
    raise protocolError(ph.value, name)


##############################################################################
# echo update


def _sense_with_gain_control(voltages, chain, seed):
    """Sense, lowering the gain while channels saturate."""
    for attempt in range(MAX_GAIN_RETRIES + 1):
        reading = sense(voltages, chain, seed)
        if not any(reading.saturated) or attempt == MAX_GAIN_RETRIES:
            return reading, chain
        logger.debug("echo saturated, gain lowered by %g dB",
                     LOW_GAIN_STEP_DB)
        chain = chain.with_gain_offset(-LOW_GAIN_STEP_DB)
    return reading, chain


def ae_update(scenario, state, seed=None, pose=None, ideal_sensing=False):
    """ae_update(scenario, state, seed, pose) --> (DriveConfig, EchoReading).

    Runs one echo: forward model, sensing, decoding, deactivation,
    allocation and duty mapping.  The reading is None when every channel
    was too weak; the previous drive is then returned unchanged.

    scenario    -- ScenarioConfig
    state       -- LoopState holding the previous drive
    pose        -- implant pose, defaults to the scenario receiver pose
    ideal_sensing -- use the noiseless 32-bit chain
    """
    rx = scenario.receiver if pose is None else scenario.receiver.at(pose)
    chain = scenario.rx_chain
    if ideal_sensing:
        chain = chain.idealized()
    v = ae_forward(rx, scenario.coils, scenario.ae_current, chain.omega_ae,
                   order=scenario.order)
    try:
        reading, chain = _sense_with_gain_control(v, chain, seed)
    except allWeakError as e:
        logger.debug("echo retry at t=%g: %s", state.sim_time, e)
        return state.current_drive, None
    couplings = decode_couplings(reading, chain, scenario.ae_current)
    mask = apply_deactivation(couplings, scenario.deactivation_threshold)
    resist = [c.series_resistance for c in scenario.coils]
    drive = optimal_allocation(couplings, scenario.budget, resist, mask)
    drive = map_to_duties(drive, scenario.pwm_lut, clamp=True)
    return drive, reading


##############################################################################
# tracking


@dataclasses.dataclass(frozen=True)
class Trajectory:
    """Time-ordered implant poses, samples are (t, Pose)."""

    samples: tuple

    def __post_init__(self):
        s = tuple((float(t), p) for t, p in self.samples)
        object.__setattr__(self, 'samples', s)
        if not s:
            raise ValueError("trajectory has no samples")
        if any(b[0] <= a[0] for a, b in zip(s, s[1:])):
            raise ValueError("trajectory times must be strictly increasing")
        if not all(isinstance(p, Pose) for t, p in s):
            raise ValueError("trajectory samples must hold Pose objects")
        return


    @property
    def times(self):
        return [t for t, p in self.samples]


    @classmethod
    def static(cls, pose, duration, dt):
        """Implant resting at pose."""
        n = int(round(duration / dt)) + 1
        return cls([(i * dt, pose) for i in range(n)])


    @classmethod
    def rocking(cls, position, amplitude, frequency, duration, dt):
        """Axis swinging sinusoidally in the XZ plane around {0,0,1}.

        amplitude   -- peak rotation angle in radians
        frequency   -- swing frequency in Hz
        """
        n = int(round(duration / dt)) + 1
        base = Pose(position, (0.0, 0.0, 1.0))
        samples = []
        for i in range(n):
            t = i * dt
            angle = amplitude * math.sin(2 * math.pi * frequency * t)
            samples.append((t, base.rotated_xz(angle)))
        return cls(samples)

# End of class Trajectory


@dataclasses.dataclass(frozen=True)
class TrackingSample:
    """One row of a tracking run."""

    t: float
    phase: Phase
    drive: DriveConfig
    pte: float
    delivered_j: float

    @property
    def currents(self):
        if self.drive is None or not self.phase.delivers_power:
            return ()
        return tuple(ph.value for ph in self.drive.currents)


    def as_row(self, n):
        """CSV values for n channels."""
        if self.drive is not None and self.phase.delivers_power:
            cur = [ph.value for ph in self.drive.currents]
            duty = list(self.drive.duties or [0.0] * n)
            pol = self.drive.polarity_bits()
        else:
            cur, duty, pol = [0.0] * n, [0.0] * n, [0] * n
        return ([self.t, self.phase.value] + cur + duty + pol +
                [self.pte, self.delivered_j])

# End of class TrackingSample


def tracking_header(n):
    """Column names of the tracking run log for n channels."""
    ch = range(1, n + 1)
    return (['t_s', 'phase'] +
            ['current_%i_A' % i for i in ch] +
            ['duty_%i' % i for i in ch] +
            ['polarity_%i' % i for i in ch] +
            ['pte', 'cumulative_delivered_J'])


def _delivery(scenario, pose, drive):
    state = scenario.coupling_state(pose)
    i = drive.tx_currents()
    try:
        eta = pte(state, i)
    except efficiencyError:
        return 0.0, 0.0
    return eta, received_power(state, i)


def run_tracking(scenario, trajectory, activation_hz=None, seed=None,
                 ideal_sensing=False):
    """run_tracking(scenario, trajectory) --> list of TrackingSample.

    Echo updates happen at multiples of 1/activation_hz from the first
    trajectory time, using the pose of the first sample at or after the
    boundary.  Each update yields an AeSensing row with power suspended
    followed by a row at the end of the echo cycle with the new drive.
    Between rows the held drive delivers the received power at the row
    pose; echo windows deliver nothing.
    """
    cfg = scenario.control
    hz = activation_hz or cfg.activation_hz
    period = 1.0 / hz
    window = ae_cycle_duration(scenario.rx_chain, cfg.ring_margin_s)
    seed = scenario.seed if seed is None else seed
    rng = numpy.random.default_rng(seed)
    t0 = trajectory.samples[0][0]
    # bring the loop up so the first echo starts at t0
    state = LoopState.initial(t0 - cfg.charge_time_s - cfg.downlink_latency_s)
    state = step(state, ChargeComplete(t0 - cfg.downlink_latency_s), cfg)
    state = step(state, DownlinkCommand(t0, cfg.device_id, 'ae'), cfg)
    rows = []
    energy = 0.0
    last = None
    next_update = t0
    for t, pose in trajectory.samples:
        if last is not None:
            lt, lpose, ldrive = last
            if ldrive is not None:
                p = _delivery(scenario, lpose, ldrive)[1]
                energy += p * (t - lt)
        if state.phase is not Phase.AE_SENSING and t >= next_update:
            state = step(state, AeTrigger(t), cfg)
        if state.phase is Phase.AE_SENSING:
            rows.append(TrackingSample(t, Phase.AE_SENSING, None, 0.0, energy))
            s = int(rng.integers(2**31))
            drive, reading = ae_update(scenario, state, s, pose,
                                       ideal_sensing)
            t = t + window
            state = step(state, AeComplete(t, drive, reading), cfg)
            while next_update <= t:
                next_update += period
        drive = state.current_drive if state.delivering else None
        eta = _delivery(scenario, pose, drive)[0] if drive is not None \
            else 0.0
        rows.append(TrackingSample(t, state.phase, drive, eta, energy))
        last = (t, pose, drive)
    logger.info("tracking run: %i rows, %.3g J delivered", len(rows), energy)
    return rows


def ideal_tracking_energy(scenario, trajectory):
    """Energy delivered by the per-sample optimal drive without echo breaks.
    """
    energy = 0.0
    samples = trajectory.samples
    for (t, pose), (tn, _) in zip(samples, samples[1:]):
        state = scenario.coupling_state(pose)
        drive = optimal_allocation(state.tx_rx_mutuals, scenario.budget,
                                   state.tx_resistances)
        energy += received_power(state, drive.tx_currents()) * (tn - t)
    return energy


def interruption_fraction(rx_chain, cfg, activation_hz=None):
    """Fraction of time power delivery is suspended for echo sensing."""
    hz = activation_hz or cfg.activation_hz
    return hz * ae_cycle_duration(rx_chain, cfg.ring_margin_s)


##############################################################################
# baselines


BASELINES = ('single_small_coil', 'single_large_coil', 'three_coil_fixed',
             'three_coil_ae')


def _single_coil_pte(scenario, coil, pose):
    rx = scenario.receiver.at(pose)
    state = build_coupling_state([coil], rx, scenario.omega,
                                 order=scenario.order)
    return pte(state, [math.sqrt(scenario.budget)])


def compare_baselines(scenario, poses, ideal_sensing=True, seed=None):
    """compare_baselines(scenario, poses) --> list of dicts keyed BASELINES.

    single_small_coil   -- one array coil moved to the origin
    single_large_coil   -- the scenario's large coil at the origin
    three_coil_fixed    -- equal currents of equal polarity on the array
    three_coil_ae       -- drive from one echo update at the pose

    Every configuration uses the same budget.
    """
    origin = dict(center=(0.0, 0.0, 0.0), normal=(0.0, 0.0, 1.0))
    small = scenario.coils[0].moved(**origin)
    large = scenario.large_coil.moved(**origin)
    n = len(scenario.coils)
    fixed = [math.sqrt(scenario.budget / n)] * n
    seed = scenario.seed if seed is None else seed
    result = []
    for pose in poses:
        state = scenario.coupling_state(pose)
        drive, reading = ae_update(scenario, LoopState.initial(), seed, pose,
                                   ideal_sensing)
        ae = pte(state, drive.tx_currents()) if drive is not None else 0.0
        result.append(dict(single_small_coil=_single_coil_pte(scenario,
                                                               small, pose),
                           single_large_coil=_single_coil_pte(scenario,
                                                               large, pose),
                           three_coil_fixed=pte(state, fixed),
                           three_coil_ae=ae))
    return result

# End of file
