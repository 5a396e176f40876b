#!/usr/bin/env python
##############################################################################
#
# omniwpt           omnidirectional magnetoelectric power transfer simulator
#
# See AUTHORS.txt for a list of people who contributed.
# See LICENSE.txt for license information.
#
##############################################################################

"""Command line front end of the omniwpt simulator.

    omniwpt design-array       cancellation distance and 3-coil layout
    omniwpt simulate           closed-loop tracking run log
    omniwpt sweep KIND         rotation, lateral or current-grid sweep
    omniwpt oracle-sweep       echo allocation against the grid oracle
    omniwpt pa-spectrum        harmonic tradeoff of the three-level PA
    omniwpt validate-scenario  check a scenario file

Errors are reported on stderr as one JSON object and exit status 1.
"""

import argparse
import json
import logging
import math
import os
import sys

from omniwpt import output
from omniwpt.controlloop import tracking_header
from omniwpt.errors import omniwptError
from omniwpt.magnetics import Pose, normalized
from omniwpt.paspectrum import duty_sweep
from omniwpt.scenario import coil_section_text, default_scenario, \
    load_scenario
from omniwpt.simulator import WptSimulator
from omniwpt.sweeps import SWEEPS, emit_results
from omniwpt.version import __version__

logger = logging.getLogger(__name__)


def _output_path(args, stem):
    os.makedirs(args.out, exist_ok=True)
    return os.path.join(args.out, '%s.%s' % (stem, args.format))


def _simulator(args):
    sc = load_scenario(args.scenario) if args.scenario else \
        default_scenario()
    sim = WptSimulator(sc)
    if getattr(args, 'threshold', None) is not None:
        sim.set_threshold(args.threshold)
    if getattr(args, 'activation_hz', None) is not None:
        sim.set_activation_hz(args.activation_hz)
    return sim


def cmd_design_array(args):
    sim = _simulator(args)
    d, coils, report = sim.design_array(k_threshold=args.k_threshold)
    output.report("cancellation distance %.4f mm" % d, report.format())
    os.makedirs(args.out, exist_ok=True)
    path = os.path.join(args.out, 'layout.ini')
    with open(path, 'w') as fp:
        fp.write("# coil layout at %.6f mm center spacing\n\n" % d)
        fp.write(coil_section_text(coils))
    return [path]


def cmd_simulate(args):
    sim = _simulator(args)
    rows = sim.track(duration=args.duration, amplitude=math.radians(
        args.amplitude_deg), frequency=args.motion_hz, seed=args.seed)
    n = len(sim.scenario.coils)
    table = [r.as_row(n) for r in rows]
    path = _output_path(args, 'tracking')
    emit_results(tracking_header(n), table, path, args.format)
    sim.summary()
    return [path]


def _grid_pose(args, sim):
    if args.pose is None and args.axis is None:
        return None
    if args.kind != 'current-grid':
        raise ValueError("--pose and --axis apply to the current-grid sweep")
    nominal = sim.scenario.receiver.pose
    position = nominal.position if args.pose is None else args.pose
    axis = nominal.axis
    if args.axis is not None:
        if not any(args.axis):
            raise ValueError("--axis must not be the zero vector")
        axis = normalized(args.axis)
    return Pose(position, axis)


def cmd_sweep(args):
    sim = _simulator(args)
    header, rows = sim.sweep(args.kind, steps=args.steps, range=args.range,
                             seed=args.seed, jobs=args.jobs,
                             pose=_grid_pose(args, sim))
    path = _output_path(args, args.kind)
    emit_results(header, rows, path, args.format)
    return [path]


def cmd_oracle_sweep(args):
    sim = _simulator(args)
    header, rows = sim.oracle(args.poses, steps=args.steps, seed=args.seed,
                              jobs=args.jobs)
    worst = min(r[header.index('pte_ae')] / r[header.index('pte_grid')]
                for r in rows)
    output.report("worst echo / grid efficiency ratio %.6f" % worst)
    path = _output_path(args, 'oracle')
    emit_results(header, rows, path, 'csv')
    return [path]


def cmd_pa_spectrum(args):
    rows = duty_sweep(args.lo, args.hi, args.steps)
    path = _output_path(args, 'pa_spectrum')
    emit_results(('duty', 'loss_db', 'suppression_db'), rows, path,
                 args.format)
    return [path]


def cmd_validate_scenario(args):
    sim = _simulator(args)
    output.report("scenario OK")
    sim.summary()
    return []


def build_parser():
    """Return the argparse parser of the omniwpt command."""
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument('--scenario', metavar='PATH',
                        help='scenario file, default the bundled scenario')
    common.add_argument('--seed', type=int, default=None,
                        help='noise seed, default the scenario seed')
    common.add_argument('--out', default='.', metavar='DIR',
                        help='output directory')
    common.add_argument('--format', choices=('csv', 'svg'), default='csv')
    common.add_argument('--threshold', type=float, default=None,
                        metavar='RATIO', help='channel deactivation ratio')
    common.add_argument('--activation-hz', type=float, default=None,
                        metavar='F', help='echo repetition rate')
    common.add_argument('--jobs', type=int, default=1,
                        help='worker processes for sweeps')
    common.add_argument('-v', '--verbose', action='store_true',
                        help='debug logging')
    parser = argparse.ArgumentParser(
        prog='omniwpt', description=__doc__.splitlines()[0])
    parser.add_argument('--version', action='version',
                        version='omniwpt ' + __version__)
    sub = parser.add_subparsers(dest='command', required=True)
    p = sub.add_parser('design-array', parents=[common])
    p.add_argument('--k-threshold', type=float, default=1e-3)
    p.set_defaults(func=cmd_design_array)
    p = sub.add_parser('simulate', parents=[common])
    p.add_argument('--duration', type=float, default=1.0)
    p.add_argument('--amplitude-deg', type=float, default=20.0)
    p.add_argument('--motion-hz', type=float, default=1.0)
    p.set_defaults(func=cmd_simulate)
    p = sub.add_parser('sweep', parents=[common])
    p.add_argument('kind', choices=SWEEPS)
    p.add_argument('--steps', type=int, default=19)
    p.add_argument('--range', type=float, nargs=2, default=None,
                   metavar=('START', 'STOP'))
    p.add_argument('--pose', type=float, nargs=3, default=None,
                   metavar=('X', 'Y', 'Z'),
                   help='implant position of the current grid in mm')
    p.add_argument('--axis', type=float, nargs=3, default=None,
                   metavar=('X', 'Y', 'Z'),
                   help='implant axis of the current grid')
    p.set_defaults(func=cmd_sweep)
    p = sub.add_parser('oracle-sweep', parents=[common])
    p.add_argument('--poses', type=int, default=50)
    p.add_argument('--steps', type=int, default=201)
    p.set_defaults(func=cmd_oracle_sweep)
    p = sub.add_parser('pa-spectrum', parents=[common])
    p.add_argument('--steps', type=int, default=91)
    p.add_argument('--lo', type=float, default=0.05)
    p.add_argument('--hi', type=float, default=0.5)
    p.set_defaults(func=cmd_pa_spectrum)
    p = sub.add_parser('validate-scenario', parents=[common])
    p.set_defaults(func=cmd_validate_scenario)
    return parser


def error_summary(exc):
    """Machine readable description of exc."""
    return dict(error=type(exc).__name__, message=str(exc),
                problems=[list(p) for p in getattr(exc, 'problems', [])])


def main(argv=None):
    """Run the omniwpt command and return the exit status."""
    args = build_parser().parse_args(argv)
    logging.basicConfig(
        level=logging.DEBUG if args.verbose else logging.WARNING,
        format='%(levelname)s %(name)s: %(message)s')
    try:
        paths = args.func(args)
    except (omniwptError, OSError, ValueError) as e:
        json.dump(error_summary(e), sys.stderr)
        sys.stderr.write('\n')
        return 1
    for p in paths:
        logger.info("wrote %s", p)
    return 0


if __name__ == '__main__':
    sys.exit(main())

# End of file
