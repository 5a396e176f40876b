#!/usr/bin/env python
##############################################################################
#
# omniwpt           omnidirectional magnetoelectric power transfer simulator
#
# See AUTHORS.txt for a list of people who contributed.
# See LICENSE.txt for license information.
#
##############################################################################

"""Scenario files describing a complete simulation setup.

A scenario is an INI document with the sections

    [scenario]              budget, threshold, frequency, seed, echo current
    [coil.N]                transmitter coils, N = 1, 2, ...
    [receiver]              implant pose and ME pickup
    [receiver.ae_coil]      echo coil, follows the receiver pose
    [rx_chain]              echo receiver front end and converter
    [pwm_lut]               duty to current table
    [control]               loop timing and device ID
    [baseline.large_coil]   single large coil used for comparison

Lengths are in mm, everything else in SI units.  Vectors and lists are
comma separated.  parse_scenario collects every problem found and raises
a single scenarioError listing (path, expected, found) for each.
"""

import configparser
import dataclasses
import logging
import math
import re
from importlib import resources

from omniwpt.allocation import DEFAULT_THRESHOLD, PwmLut
from omniwpt.circuit import build_coupling_state
from omniwpt.controlloop import ControlConfig
from omniwpt.echo import RxChainConfig
from omniwpt.errors import scenarioError
from omniwpt.magnetics import DEFAULT_ORDER, CoilSpec, Pose, ReceiverModel

logger = logging.getLogger(__name__)

DEFAULT_SCENARIO = 'default.ini'


@dataclasses.dataclass(frozen=True)
class ScenarioConfig:
    """Validated simulation setup.

    coils               -- tuple of transmitter CoilSpec
    receiver            -- ReceiverModel at the nominal pose
    rx_chain            -- RxChainConfig of the echo receiver
    budget              -- sum of squared coil currents, A**2
    deactivation_threshold -- coupling ratio switching channels off
    pwm_lut             -- PwmLut of the drivers
    power_frequency_hz  -- power carrier, the ME resonance
    seed                -- base seed of the noise generators
    ae_current          -- echo coil current amplitude in A
    control             -- ControlConfig
    large_coil          -- CoilSpec of the single large coil baseline
    order               -- quadrature segments per filament
    """

    coils: tuple
    receiver: ReceiverModel
    rx_chain: RxChainConfig = RxChainConfig()
    budget: float = 1.0
    deactivation_threshold: float = DEFAULT_THRESHOLD
    pwm_lut: PwmLut = None
    power_frequency_hz: float = 340e3
    seed: int = 0
    ae_current: float = 0.01
    control: ControlConfig = ControlConfig()
    large_coil: CoilSpec = None
    order: int = DEFAULT_ORDER

    def __post_init__(self):
        object.__setattr__(self, 'coils', tuple(self.coils))
        if not self.coils:
            raise ValueError("at least one transmitter coil is needed")
        if self.pwm_lut is None:
            object.__setattr__(self, 'pwm_lut',
                               PwmLut.linear(1.2 * math.sqrt(self.budget)))
        if self.large_coil is None:
            object.__setattr__(self, 'large_coil', default_large_coil())
        return


    @property
    def omega(self):
        "Angular power frequency."
        return 2 * math.pi * self.power_frequency_hz


    def coupling_state(self, pose=None):
        """CouplingState of the array with the implant at pose.
        """
        rx = self.receiver if pose is None else self.receiver.at(pose)
        return build_coupling_state(self.coils, rx, self.omega,
                                    order=self.order)


    def replace(self, **kw):
        """Return a copy with some fields changed."""
        return dataclasses.replace(self, **kw)

# End of class ScenarioConfig


def default_large_coil():
    """Flat spiral of 6.8 cm outer diameter at the origin."""
    return CoilSpec(loop_radius=34.0, inner_radius=18.0, filaments=6,
                    turns=10, series_resistance=1.0, self_inductance=15e-6,
                    compensation_capacitance=1.4607e-8)


##############################################################################
# field converters


def _float(s):
    return float(s)


def _positive(s):
    v = float(s)
    if not v > 0:
        raise ValueError("not positive")
    return v


def _int(s):
    return int(s)


def _vector3(s):
    v = _floats(s)
    if len(v) != 3:
        raise ValueError("needs 3 components")
    return v


def _floats(s):
    s = s.strip()
    if not s:
        return ()
    return tuple(float(w) for w in s.split(','))


def _bool(s):
    w = s.strip().lower()
    if w in ('true', 'yes', 'on', '1'):
        return True
    if w in ('false', 'no', 'off', '0'):
        return False
    raise ValueError("not a boolean")


def _str(s):
    return s.strip()


def _gain(s):
    v = _floats(s)
    if not v:
        raise ValueError("empty")
    return v[0] if len(v) == 1 else v


# key -> (attribute, converter, description)
COIL_KEYS = {
    'loop_radius_mm': ('loop_radius', _positive, 'positive mm'),
    'inner_radius_mm': ('inner_radius', _positive, 'positive mm'),
    'filaments': ('filaments', _int, 'integer'),
    'turns': ('turns', _int, 'integer'),
    'center_mm': ('center', _vector3, '3 comma-separated mm'),
    'normal': ('normal', _vector3, '3 comma-separated floats'),
    'series_resistance_ohm': ('series_resistance', _float, 'ohms'),
    'self_inductance_h': ('self_inductance', _float, 'henries'),
    'compensation_capacitance_f': ('compensation_capacitance', _float,
                                   'farads'),
}
COIL_REQUIRED = ('loop_radius_mm', 'turns')

SECTION_KEYS = {
    'scenario': {
        'budget_a2': ('budget', _positive, 'positive A**2'),
        'deactivation_threshold': ('deactivation_threshold', _float,
                                   'ratio above 1'),
        'power_frequency_hz': ('power_frequency_hz', _positive,
                               'positive Hz'),
        'seed': ('seed', _int, 'integer'),
        'ae_current_a': ('ae_current', _positive, 'positive A'),
        'quadrature_order': ('order', _int, 'integer'),
    },
    'receiver': {
        'position_mm': ('position', _vector3, '3 comma-separated mm'),
        'axis': ('axis', _vector3, '3 comma-separated floats'),
        'effective_area_turns_m2': ('effective_area_turns', _float, 'm**2'),
        'load_resistance_ohm': ('load_resistance', _float, 'ohms'),
        'motional_inductance_h': ('motional_inductance', _float, 'henries'),
        'resonance_hz': ('resonance_hz', _float, 'Hz'),
    },
    'rx_chain': {
        'channel_gain_db': ('channel_gain_db', _gain, 'dB or list of dB'),
        'gain_mismatch_db': ('gain_mismatch_db', _floats, 'list of dB'),
        'input_noise_density_dbm_hz': ('input_noise_density_dbm_hz',
                                       _float, 'dBm/Hz'),
        'noise_bandwidth_hz': ('noise_bandwidth_hz', _float, 'Hz'),
        'reference_impedance_ohm': ('reference_impedance_ohm', _float,
                                    'ohms'),
        'adc_bits': ('adc_bits', _int, 'integer'),
        'ramp_full_scale_v': ('ramp_full_scale_v', _float, 'volts'),
        'adc_clock_hz': ('adc_clock_hz', _float, 'Hz'),
        'ae_frequency_hz': ('ae_frequency_hz', _float, 'Hz'),
        'ae_cycles': ('ae_cycles', _int, 'integer'),
        'warmup_cycles': ('warmup_cycles', _int, 'integer'),
        'add_noise': ('add_noise', _bool, 'boolean'),
    },
    'pwm_lut': {
        'duty': ('duty', _floats, 'list of duty fractions'),
        'current_a': ('current', _floats, 'list of amperes'),
        'synthetic': ('synthetic', _bool, 'boolean'),
    },
    'control': {
        'charge_time_s': ('charge_time_s', _float, 'seconds'),
        'downlink_latency_s': ('downlink_latency_s', _float, 'seconds'),
        'ring_margin_s': ('ring_margin_s', _float, 'seconds'),
        'activation_hz': ('activation_hz', _float, 'Hz'),
        'device_id': ('device_id', _str, 'string'),
    },
}
RECEIVER_REQUIRED = ('position_mm', 'effective_area_turns_m2',
                     'load_resistance_ohm')

_coil_section = re.compile(r'^coil\.(\d+)$')


class _Collector:
    """Accumulates problems while converting sections."""

    def __init__(self, strict):
        self.strict = strict
        self.problems = []


    def add(self, path, expected, found):
        self.problems.append((path, expected, found))


    def convert(self, sname, section, keys, required=()):
        """Return attribute values of section converted with keys."""
        values = {}
        for key in required:
            if key not in section:
                self.add('%s.%s' % (sname, key), keys[key][2], 'missing')
        for key, raw in section.items():
            path = '%s.%s' % (sname, key)
            if key not in keys:
                if self.strict:
                    self.add(path, 'a known key', 'unknown key')
                else:
                    logger.warning("ignoring unknown key %s", path)
                continue
            attr, conv, desc = keys[key]
            try:
                values[attr] = conv(raw)
            except ValueError:
                self.add(path, desc, repr(raw))
        return values


    def build(self, path, factory, **kw):
        """Call factory, recording a failed invariant as a problem.

        Sections with a key problem are not built.
        """
        if any(p[0].startswith(path + '.') for p in self.problems):
            return None
        try:
            return factory(**kw)
        except (TypeError, ValueError) as e:
            self.add(path, str(e), 'invalid')
            return None

# End of class _Collector


def _read(text):
    cp = configparser.ConfigParser(strict=True, interpolation=None,
                                   default_section='__defaults__')
    try:
        cp.read_string(text)
    except configparser.DuplicateSectionError as e:
        raise scenarioError([(e.section, 'unique section', 'duplicate')])
    except configparser.DuplicateOptionError as e:
        raise scenarioError([('%s.%s' % (e.section, e.option),
                              'unique key', 'duplicate')])
    except configparser.Error as e:
        raise scenarioError([('document', 'INI syntax', e.message)])
    return cp


def parse_scenario(text, strict=True):
    """parse_scenario(text, strict=True) --> ScenarioConfig.

    text    -- INI document
    strict  -- reject unknown sections and keys, otherwise log and skip

    Raises: scenarioError listing every problem found.
    """
    cp = _read(text)
    col = _Collector(strict)
    coil_sections = []
    for name in cp.sections():
        m = _coil_section.match(name)
        if m:
            coil_sections.append((int(m.group(1)), name))
        elif name not in SECTION_KEYS and name not in (
                'receiver.ae_coil', 'baseline.large_coil'):
            if strict:
                col.add(name, 'a known section', 'unknown section')
            else:
                logger.warning("ignoring unknown section [%s]", name)
    coils = []
    for idx, name in sorted(coil_sections):
        kw = col.convert(name, cp[name], COIL_KEYS, COIL_REQUIRED)
        coils.append(col.build(name, CoilSpec, **kw))
    if not coil_sections:
        col.add('coils', 'at least one [coil.N] section', 'none')

    def section(name, required=()):
        if name not in cp:
            for key in required:
                col.add('%s.%s' % (name, key), 'a value', 'missing')
            return {}
        return col.convert(name, cp[name], SECTION_KEYS[name], required)

    top = section('scenario')
    rkw = section('receiver', RECEIVER_REQUIRED)
    chain_kw = section('rx_chain')
    lut_kw = section('pwm_lut')
    ctl_kw = section('control')
    ae = None
    if 'receiver.ae_coil' in cp:
        kw = col.convert('receiver.ae_coil', cp['receiver.ae_coil'],
                         COIL_KEYS, COIL_REQUIRED)
        ae = col.build('receiver.ae_coil', CoilSpec, **kw)
    large = None
    if 'baseline.large_coil' in cp:
        kw = col.convert('baseline.large_coil', cp['baseline.large_coil'],
                         COIL_KEYS, COIL_REQUIRED)
        large = col.build('baseline.large_coil', CoilSpec, **kw)
    pose = None
    if 'position' in rkw:
        pose = col.build('receiver', Pose, position=rkw.pop('position'),
                         axis=rkw.pop('axis', (0.0, 0.0, 1.0)))
    receiver = None
    if pose is not None and not col.problems:
        receiver = col.build('receiver', ReceiverModel, pose=pose,
                             ae_coil=ae, **rkw)
    chain = col.build('rx_chain', RxChainConfig, **chain_kw)
    lut = col.build('pwm_lut', PwmLut, **lut_kw) if lut_kw else None
    control = col.build('control', ControlConfig, **ctl_kw)
    thr = top.get('deactivation_threshold', DEFAULT_THRESHOLD)
    if not thr > 1:
        col.add('scenario.deactivation_threshold', 'ratio above 1', thr)
    if col.problems:
        raise scenarioError(col.problems)
    cfg = col.build('scenario', ScenarioConfig, coils=coils,
                    receiver=receiver, rx_chain=chain, pwm_lut=lut,
                    control=control, large_coil=large, **top)
    if col.problems:
        raise scenarioError(col.problems)
    if lut is not None and lut.max_current < math.sqrt(cfg.budget):
        logger.warning("PWM table tops out at %g A below the budget "
                       "current %g A", lut.max_current,
                       math.sqrt(cfg.budget))
    return cfg


##############################################################################
# emission


def _fmt(v):
    if isinstance(v, bool):
        return 'true' if v else 'false'
    if isinstance(v, float):
        return repr(v)
    if isinstance(v, (tuple, list)):
        return ', '.join(_fmt(x) for x in v)
    return str(v)


def _coil_items(coil, placed=True):
    items = [('loop_radius_mm', coil.loop_radius),
             ('inner_radius_mm', coil.inner_radius),
             ('filaments', coil.filaments),
             ('turns', coil.turns)]
    if placed:
        items += [('center_mm', coil.center), ('normal', coil.normal)]
    items += [('series_resistance_ohm', coil.series_resistance),
              ('self_inductance_h', coil.self_inductance),
              ('compensation_capacitance_f', coil.compensation_capacitance)]
    return items


def _items(obj, keys):
    return [(key, getattr(obj, attr)) for key, (attr, c, d) in keys.items()]


def coil_section_text(coils, first=1):
    """INI text of [coil.N] sections for coils."""
    lines = []
    for i, coil in enumerate(coils, first):
        lines.append('[coil.%i]' % i)
        lines += ['%s = %s' % (k, _fmt(v)) for k, v in _coil_items(coil)]
        lines.append('')
    return '\n'.join(lines)


def emit_scenario(cfg):
    """emit_scenario(cfg) --> INI text that parses back to cfg.
    """
    rx = cfg.receiver
    sections = [('scenario', _items(cfg, SECTION_KEYS['scenario']))]
    text = ['# omniwpt scenario', '']
    for name, items in sections:
        text.append('[%s]' % name)
        text += ['%s = %s' % (k, _fmt(v)) for k, v in items]
        text.append('')
    text.append(coil_section_text(cfg.coils))
    rx_items = [('position_mm', rx.pose.position), ('axis', rx.pose.axis)]
    rx_items += [(k, getattr(rx, a)) for k, (a, c, d)
                 in SECTION_KEYS['receiver'].items()
                 if k not in ('position_mm', 'axis')]
    more = [('receiver', rx_items),
            ('receiver.ae_coil', _coil_items(rx.ae_coil, placed=False)),
            ('rx_chain', _items(cfg.rx_chain, SECTION_KEYS['rx_chain'])),
            ('pwm_lut', _items(cfg.pwm_lut, SECTION_KEYS['pwm_lut'])),
            ('control', _items(cfg.control, SECTION_KEYS['control'])),
            ('baseline.large_coil', _coil_items(cfg.large_coil))]
    for name, items in more:
        text.append('[%s]' % name)
        text += ['%s = %s' % (k, _fmt(v)) for k, v in items]
        text.append('')
    return '\n'.join(text)


def load_scenario(path, strict=True):
    """Read and parse the scenario file at path.
    """
    with open(path) as fp:
        text = fp.read()
    return parse_scenario(text, strict=strict)


def default_scenario():
    """Bundled scenario: three 42 mm coils at 23.98 mm, implant at (0,0,20).
    """
    text = resources.files('omniwpt').joinpath(
        'data', DEFAULT_SCENARIO).read_text()
    return parse_scenario(text)

# End of file
