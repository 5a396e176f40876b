#!/usr/bin/env python
##############################################################################
#
# omniwpt           omnidirectional magnetoelectric power transfer simulator
#
# See AUTHORS.txt for a list of people who contributed.
# See LICENSE.txt for license information.
#
##############################################################################

"""Behavioral model of the Active Echo sensing chain.

While the transmit drivers sit in high impedance the implant sends a short
tone from its echo coil.  By reciprocity the voltage induced on each
transmit coil is proportional to the coupling that coil has to the
implant.  The receiver amplifies every channel, peak-detects it and
digitizes it with a reverse-ramp single-slope converter, so larger
amplitudes finish first with smaller codes.  The first finisher is the
polarity reference and an XOR against its sign gives the relative
polarity of every other channel.
"""

import dataclasses
import logging
import math
import warnings

import numpy

from omniwpt.errors import allWeakError, SaturationWarning
from omniwpt.magnetics import DEFAULT_ORDER, ae_coil_mutual

logger = logging.getLogger(__name__)

# calibrated residual gain mismatch between channels in dB
MAX_GAIN_MISMATCH_DB = 0.2


@dataclasses.dataclass(frozen=True)
class RxChainConfig:
    """Receiver front end and converter settings.

    channel_gain_db     -- nominal channel gain, a scalar or one per channel
    gain_mismatch_db    -- residual per-channel calibration error applied in
                           the front end but unknown to the decoder
    input_noise_density_dbm_hz -- input-referred noise density
    noise_bandwidth_hz  -- bandwidth the noise is integrated over
    reference_impedance_ohm    -- impedance converting dBm to volts
    adc_bits            -- converter resolution
    ramp_full_scale_v   -- starting voltage of the falling ramp
    adc_clock_hz        -- counter clock of the converter
    ae_frequency_hz     -- echo tone frequency
    ae_cycles           -- tone cycles sensed per burst
    warmup_cycles       -- oscillator settling cycles before sensing
    add_noise           -- False gives the noiseless chain
    """

    channel_gain_db: object = 63.0
    gain_mismatch_db: tuple = ()
    input_noise_density_dbm_hz: float = -161.0
    noise_bandwidth_hz: float = 1e6
    reference_impedance_ohm: float = 50.0
    adc_bits: int = 8
    ramp_full_scale_v: float = 1.8
    adc_clock_hz: float = 400e6
    ae_frequency_hz: float = 1.35e6
    ae_cycles: int = 16
    warmup_cycles: int = 8
    add_noise: bool = True

    def __post_init__(self):
        g = self.channel_gain_db
        g = float(g) if numpy.isscalar(g) else tuple(float(x) for x in g)
        object.__setattr__(self, 'channel_gain_db', g)
        mm = tuple(float(x) for x in self.gain_mismatch_db)
        object.__setattr__(self, 'gain_mismatch_db', mm)
        if not numpy.all(numpy.isfinite(g)):
            raise ValueError("channel gains must be finite")
        if not numpy.all(numpy.isfinite(mm)):
            raise ValueError("gain mismatch must be finite")
        if mm and not max(mm) - min(mm) <= MAX_GAIN_MISMATCH_DB:
            raise ValueError("gain mismatch between channels is limited "
                             "to %g dB" % MAX_GAIN_MISMATCH_DB)
        if int(self.adc_bits) != self.adc_bits or self.adc_bits < 1:
            raise ValueError("adc_bits must be a positive integer")
        for name in ('noise_bandwidth_hz', 'reference_impedance_ohm',
                     'ramp_full_scale_v', 'adc_clock_hz', 'ae_frequency_hz'):
            if not getattr(self, name) > 0:
                raise ValueError("%s must be positive" % name)
        if self.ae_cycles < 1 or self.warmup_cycles < 0:
            raise ValueError("ae_cycles must be positive and "
                             "warmup_cycles non-negative")
        return


    def idealized(self):
        """Noiseless, perfectly calibrated copy with a 32-bit converter."""
        return dataclasses.replace(self, add_noise=False, adc_bits=32,
                                   gain_mismatch_db=())


    def with_gain_offset(self, db):
        """Copy with every channel gain shifted by db."""
        g = self.channel_gain_db
        g = g + db if numpy.isscalar(g) else tuple(x + db for x in g)
        return dataclasses.replace(self, channel_gain_db=g)


    @property
    def max_code(self):
        return 2**self.adc_bits - 1


    @property
    def lsb(self):
        "Voltage step of one converter code."
        return self.ramp_full_scale_v / 2.0**self.adc_bits


    @property
    def omega_ae(self):
        return 2 * math.pi * self.ae_frequency_hz


    def gains(self, n, with_mismatch=False):
        """Linear voltage gain of n channels.
        """
        g = numpy.broadcast_to(numpy.asarray(self.channel_gain_db), (n,))
        g = numpy.array(g, dtype=float)
        if with_mismatch and self.gain_mismatch_db:
            if len(self.gain_mismatch_db) != n:
                raise ValueError("gain_mismatch_db needs %i entries" % n)
            g += numpy.asarray(self.gain_mismatch_db)
        return 10.0**(g / 20.0)


    def input_noise_rms(self):
        """Input-referred noise voltage over the noise bandwidth.
        """
        watts = 10.0**((self.input_noise_density_dbm_hz - 30.0) / 10.0)
        return math.sqrt(watts * self.noise_bandwidth_hz *
                         self.reference_impedance_ohm)

# End of class RxChainConfig


@dataclasses.dataclass(frozen=True)
class EchoReading:
    """Digitized outcome of one echo burst.

    amplitude_codes     -- converter code per channel, smaller is larger
    completion_order    -- channel indices in order of conversion finish
    reference_channel   -- first finisher, the polarity reference
    relative_polarities -- 0 when a channel agrees with the reference
    saturated           -- channels whose amplitude reached full scale
    completion_times    -- conversion finish time per channel in seconds
    """

    amplitude_codes: tuple
    completion_order: tuple
    reference_channel: int
    relative_polarities: tuple
    saturated: tuple = ()
    completion_times: tuple = ()

    def __post_init__(self):
        for name in ('amplitude_codes', 'completion_order',
                     'relative_polarities', 'saturated', 'completion_times'):
            object.__setattr__(self, name, tuple(getattr(self, name)))
        n = len(self.amplitude_codes)
        if sorted(self.completion_order) != list(range(n)):
            raise ValueError("completion_order must permute the channels")
        if self.completion_order[0] != self.reference_channel:
            raise ValueError("reference must finish first")
        if self.relative_polarities[self.reference_channel] != 0:
            raise ValueError("reference polarity bit must be 0")
        codes = [self.amplitude_codes[i] for i in self.completion_order]
        if any(b < a for a, b in zip(codes, codes[1:])):
            raise ValueError("codes must not decrease along completion order")
        return


    @property
    def n(self):
        return len(self.amplitude_codes)

# End of class EchoReading


def ae_forward(rx, tx_coils, ae_current, omega_ae, order=DEFAULT_ORDER):
    """ae_forward(rx, tx_coils, ae_current, omega_ae) --> voltage phasors.

    V_i = j omega_ae M_iL I_ae with the signed mutual inductance between
    transmitter i and the echo coil.  The transmit tanks are treated as
    open so the echo is not loaded.
    """
    m = numpy.array([ae_coil_mutual(c, rx, order=order) for c in tx_coils])
    return 1j * omega_ae * m * ae_current


def _signed_amplitudes(voltages):
    """Project phasors on the carrier phase of the strongest channel."""
    v = numpy.asarray(voltages, dtype=complex).ravel()
    if not numpy.any(v):
        return numpy.zeros(len(v))
    phase = numpy.angle(v[numpy.argmax(numpy.abs(v))])
    return numpy.real(v * numpy.exp(-1j * phase))


def sense(voltages, cfg, rng_seed=None):
    """sense(voltages, cfg, rng_seed) --> EchoReading.

    voltages    -- per-channel induced voltage phasors
    cfg         -- RxChainConfig
    rng_seed    -- seed of the noise generator, same seed same reading

    Raises: allWeakError when every channel stays below one LSB.
    """
    signed = _signed_amplitudes(voltages)
    n = len(signed)
    out = signed * cfg.gains(n, with_mismatch=True)
    if cfg.add_noise:
        rng = numpy.random.default_rng(rng_seed)
        sigma = cfg.input_noise_rms() * cfg.gains(n, with_mismatch=True)
        out = out + sigma * rng.standard_normal(n)
    amp = numpy.abs(out)
    if numpy.all(amp < cfg.lsb):
        raise allWeakError("all %i echo channels below one LSB (%g V)" %
                           (n, cfg.lsb))
    fs = cfg.ramp_full_scale_v
    raw = numpy.floor((fs - amp) / cfg.lsb)
    codes = numpy.clip(raw, 0, cfg.max_code).astype(numpy.int64)
    saturated = amp >= fs
    # ties in code finish in order of amplitude
    order = numpy.lexsort((-amp, codes))
    ref = int(order[0])
    refsign = math.copysign(1.0, out[ref])
    pol = [0 if (x == 0 or math.copysign(1.0, x) == refsign) else 1
           for x in out]
    times = (codes + 1) / cfg.adc_clock_hz
    if numpy.any(saturated):
        logger.debug("echo saturated on channels %s",
                     numpy.flatnonzero(saturated).tolist())
    return EchoReading(amplitude_codes=[int(c) for c in codes],
                       completion_order=[int(i) for i in order],
                       reference_channel=ref,
                       relative_polarities=pol,
                       saturated=[bool(s) for s in saturated],
                       completion_times=[float(t) for t in times])


def decode_amplitudes(reading, cfg):
    """Converter output voltages recovered from codes.

    A = full_scale - (code + 1/2) LSB, the top code decodes to zero.
    """
    codes = numpy.asarray(reading.amplitude_codes, dtype=float)
    amp = cfg.ramp_full_scale_v - (codes + 0.5) * cfg.lsb
    amp[codes >= cfg.max_code] = 0.0
    sat = numpy.asarray(reading.saturated or [False] * reading.n, dtype=bool)
    amp[sat] = cfg.ramp_full_scale_v
    return amp


def decode_couplings(reading, cfg, ae_current=1.0):
    """decode_couplings(reading, cfg) --> signed coupling estimates.

    Codes are inverted to amplitudes, the nominal gain and the
    omega_ae * ae_current scale are divided out and the polarity bits
    applied.  The reference channel comes out positive since the echo
    fixes polarity only relative to it.  The result is a mutual inductance
    in henries when ae_current is the true echo current.

    Warns: SaturationWarning when a channel reached full scale; its
    estimate is then a lower bound.
    """
    if any(reading.saturated):
        chans = [i for i, s in enumerate(reading.saturated) if s]
        msg = ("echo saturated on channels %s, estimates are lower bounds;"
               " reduce the channel gain" % chans)
        warnings.warn(msg, SaturationWarning, stacklevel=2)
    amp = decode_amplitudes(reading, cfg)
    amp /= cfg.gains(reading.n)
    amp /= cfg.omega_ae * ae_current
    sign = 1.0 - 2.0 * numpy.asarray(reading.relative_polarities)
    return amp * sign


def ae_cycle_duration(cfg, ring_margin_s=0.0):
    """ae_cycle_duration(cfg, ring_margin_s) --> Length of one echo cycle.

    Tone cycles plus settling cycles, the ring-up and ring-down margin of
    the transmit tanks and one full converter ramp.
    """
    if ring_margin_s < 0:
        raise ValueError("ring margin cannot be negative")
    tone = (cfg.warmup_cycles + cfg.ae_cycles) / cfg.ae_frequency_hz
    conversion = 2.0**cfg.adc_bits / cfg.adc_clock_hz
    return tone + ring_margin_s + conversion

# End of file
