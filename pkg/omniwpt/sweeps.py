#!/usr/bin/env python
##############################################################################
#
# omniwpt           omnidirectional magnetoelectric power transfer simulator
#
# See AUTHORS.txt for a list of people who contributed.
# See LICENSE.txt for license information.
#
##############################################################################

"""Pose and current sweeps and their CSV or SVG output.

Sweeps:
    rotation        implant at (0,0,20) turning from {0,0,1} to {1,0,0}
    lateral         implant moving from (-20,10,20) to (20,10,20), axis z
    current-grid    TX2 and TX3 currents on a grid with TX1 off
    oracle          random poses, echo allocation against the grid oracle
"""

import csv
import logging
import math
import multiprocessing
import os

import numpy

from omniwpt.allocation import grid_oracle, optimal_allocation
from omniwpt.circuit import pte
from omniwpt.controlloop import BASELINES, LoopState, ae_update, \
    compare_baselines
from omniwpt.errors import efficiencyError
from omniwpt.magnetics import Pose

logger = logging.getLogger(__name__)

SWEEPS = ('rotation', 'lateral', 'current-grid')

BASELINE_COLUMNS = ('pte_single_small', 'pte_single_large', 'pte_fixed3',
                    'pte_ae3')

HEADERS = {
    'rotation': ('angle_deg',) + BASELINE_COLUMNS,
    'lateral': ('x_mm',) + BASELINE_COLUMNS,
    'current-grid': ('i2_a', 'i3_a', 'pte'),
    'oracle': ('pose', 'x_mm', 'y_mm', 'z_mm', 'axis_x', 'axis_y',
               'axis_z', 'pte_grid', 'pte_ae', 'pte_bound'),
}

DEFAULT_RANGES = {
    'rotation': (0.0, 90.0),
    'lateral': (-20.0, 20.0),
    'current-grid': (-1.0, 1.0),
}

ROTATION_POSITION = (0.0, 0.0, 20.0)
LATERAL_Y, LATERAL_Z = 10.0, 20.0

# 12 significant digits round-trip every value written
CSV_FORMAT = '%.12g'


def sweep_poses(sweep, lo, hi, steps):
    """Return (x, Pose) pairs along a rotation or lateral sweep."""
    xs = numpy.linspace(lo, hi, steps)
    if sweep == 'rotation':
        base = Pose(ROTATION_POSITION, (0.0, 0.0, 1.0))
        return [(float(x), base.rotated_xz(math.radians(x))) for x in xs]
    if sweep == 'lateral':
        return [(float(x), Pose((x, LATERAL_Y, LATERAL_Z), (0.0, 0.0, 1.0)))
                for x in xs]
    raise ValueError("no pose sweep named %r" % sweep)


def _baseline_row(args):
    scenario, x, pose, ideal, seed = args
    r = compare_baselines(scenario, [pose], ideal_sensing=ideal,
                          seed=seed)[0]
    return (x,) + tuple(r[k] for k in BASELINES)


def _pool_map(func, items, jobs):
    if jobs and jobs > 1 and len(items) > 1:
        with multiprocessing.Pool(jobs) as pool:
            return pool.map(func, items)
    return [func(a) for a in items]


def current_grid(scenario, pose=None, lo=-1.0, hi=1.0, steps=201):
    """Rows (i2, i3, pte) over a square current grid with TX1 off.

    The all-zero point has no efficiency and is skipped.
    """
    state = scenario.coupling_state(pose)
    rows = []
    grid = numpy.linspace(lo, hi, steps)
    for i2 in grid:
        for i3 in grid:
            try:
                eta = pte(state, [0.0, i2, i3])
            except efficiencyError:
                continue
            rows.append((float(i2), float(i3), eta))
    return rows


def grid_peak(rows):
    """Row of a current grid with the highest efficiency."""
    return max(rows, key=lambda r: r[-1])


def run_sweep(scenario, sweep, range=None, steps=19, seed=None, jobs=1,
              ideal_sensing=True, pose=None):
    """run_sweep(scenario, sweep, range, steps) --> (header, rows).

    sweep   -- 'rotation', 'lateral' or 'current-grid'
    range   -- (start, stop) in degrees, mm or amperes
    jobs    -- worker processes for pose sweeps, rows keep axis order
    pose    -- implant pose of the current grid, default the scenario's
    """
    if sweep not in SWEEPS:
        raise ValueError("unknown sweep %r, use one of %s" %
                         (sweep, ', '.join(SWEEPS)))
    lo, hi = range if range is not None else DEFAULT_RANGES[sweep]
    seed = scenario.seed if seed is None else seed
    if sweep == 'current-grid':
        rows = current_grid(scenario, pose, lo, hi, steps)
    else:
        args = [(scenario, x, p, ideal_sensing, seed)
                for x, p in sweep_poses(sweep, lo, hi, steps)]
        rows = _pool_map(_baseline_row, args, jobs)
    logger.info("%s sweep: %i rows", sweep, len(rows))
    return HEADERS[sweep], rows


def random_poses(n, seed, xy=15.0, z=(15.0, 30.0)):
    """n poses with uniform position in a box and uniform axis direction.
    """
    rng = numpy.random.default_rng(seed)
    poses = []
    for i in range(n):
        pos = (rng.uniform(-xy, xy), rng.uniform(-xy, xy),
               rng.uniform(*z))
        v = rng.standard_normal(3)
        poses.append(Pose(pos, v / numpy.linalg.norm(v)))
    return poses


def _oracle_row(args):
    scenario, k, pose, steps, seed = args
    state = scenario.coupling_state(pose)
    best, values = grid_oracle(state, steps=steps)
    drive, reading = ae_update(scenario, LoopState.initial(), seed, pose,
                               ideal_sensing=True)
    eta = pte(state, drive.tx_currents()) if drive is not None else 0.0
    ideal = optimal_allocation(state.tx_rx_mutuals, scenario.budget,
                               state.tx_resistances)
    return ((k,) + pose.position + pose.axis +
            (best, eta, pte(state, ideal.tx_currents())))


def oracle_sweep(scenario, n_poses=50, seed=None, steps=201, jobs=1):
    """oracle_sweep(scenario, n_poses) --> (header, rows).

    For random poses compare the grid oracle, the noiseless echo
    allocation and the analytic optimum.  The grid spans every channel,
    so the echo allocation runs with channel deactivation switched off.
    """
    seed = scenario.seed if seed is None else seed
    scenario = scenario.replace(deactivation_threshold=math.inf)
    poses = random_poses(n_poses, seed)
    args = [(scenario, k, p, steps, seed + k) for k, p in enumerate(poses)]
    rows = _pool_map(_oracle_row, args, jobs)
    return HEADERS['oracle'], rows


##############################################################################
# output


def emit_results(header, rows, path, format='csv'):
    """emit_results(header, rows, path, format) --> path written.

    format  -- 'csv' for a table with the given header, 'svg' for a line
               plot of the numeric columns against the first

    Raises:
        ValueError for empty rows or an unknown format, nothing is written
        OSError when path cannot be written
    """
    if not rows:
        raise ValueError("no result rows to write")
    if format == 'csv':
        write_csv(header, rows, path)
    elif format == 'svg':
        plot_rows(header, rows, path)
    else:
        raise ValueError("unknown output format %r" % format)
    return path


def _cell(v):
    if isinstance(v, (float, numpy.floating)):
        return CSV_FORMAT % v
    return v


def write_csv(header, rows, path):
    """Write rows under header to the CSV file at path."""
    with open(path, 'w', newline='') as fp:
        w = csv.writer(fp)
        w.writerow(header)
        for r in rows:
            w.writerow([_cell(v) for v in r])
    return


def read_csv(path):
    """read_csv(path) --> (header, rows) with numeric cells as float."""
    with open(path, newline='') as fp:
        rd = csv.reader(fp)
        header = tuple(next(rd))
        rows = []
        for r in rd:
            row = []
            for v in r:
                try:
                    row.append(float(v))
                except ValueError:
                    row.append(v)
            rows.append(tuple(row))
    return header, rows


def _numeric_columns(header, rows):
    """Indices of the columns holding numbers in every row."""
    keep = []
    for j in range(len(header)):
        if all(isinstance(r[j], (int, float, numpy.number)) and
               not isinstance(r[j], bool) for r in rows):
            keep.append(j)
    return keep


def plot_rows(header, rows, path):
    """Render result columns against the first one as an SVG file.

    Text columns such as the control phase are left out.  The value axis
    is logarithmic when every plotted value is positive.
    """
    import matplotlib
    matplotlib.use('Agg')
    import matplotlib.pyplot as plt
    cols = _numeric_columns(header, rows)
    if len(cols) < 2 or cols[0] != 0:
        raise ValueError("nothing to plot against %r" % header[0])
    data = numpy.array([[r[j] for j in cols] for r in rows], dtype=float)
    names = [header[j] for j in cols]
    fig, ax = plt.subplots(figsize=(7, 4.5))
    if names[:2] == ['i2_a', 'i3_a']:
        sc = ax.scatter(data[:, 0], data[:, 1], c=data[:, 2], s=4,
                        cmap='viridis')
        fig.colorbar(sc, ax=ax, label=names[2])
        ax.set_ylabel(names[1])
    else:
        for j, name in enumerate(names[1:], 1):
            ax.plot(data[:, 0], data[:, j], marker='o', ms=3, label=name)
        if numpy.all(data[:, 1:] > 0):
            ax.set_yscale('log')
        ax.legend(fontsize='small')
    ax.set_xlabel(names[0])
    ax.grid(True, alpha=0.3)
    fig.tight_layout()
    fig.savefig(path, format='svg')
    plt.close(fig)
    logger.info("plot written to %s", os.path.abspath(path))
    return

# End of file
