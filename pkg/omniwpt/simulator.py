#!/usr/bin/env python
##############################################################################
#
# omniwpt           omnidirectional magnetoelectric power transfer simulator
#
# See AUTHORS.txt for a list of people who contributed.
# See LICENSE.txt for license information.
#
##############################################################################

"""WptSimulator class for running one scenario through every analysis.
"""

import dataclasses
import logging
import math

from omniwpt import output
from omniwpt.arraydesign import (find_cancellation_distance,
                                 layout_three_coils, validate_array)
from omniwpt.circuit import pte, pte_upper_bound
from omniwpt.controlloop import (LoopState, Trajectory, ae_update,
                                 compare_baselines, interruption_fraction,
                                 run_tracking)
from omniwpt.echo import ae_cycle_duration
from omniwpt.scenario import default_scenario, emit_scenario
from omniwpt.sweeps import oracle_sweep, run_sweep

logger = logging.getLogger(__name__)


class WptSimulator(object):
    """Facade over a ScenarioConfig.

    Data members:
        scenario    -- the ScenarioConfig simulated
    """

    def __init__(self, scenario=None):
        """Create simulator for scenario, the bundled default when None.
        """
        self.scenario = scenario if scenario is not None \
            else default_scenario()
        return


    def set_threshold(self, threshold):
        """Change the deactivation threshold."""
        if not threshold > 1:
            raise ValueError("deactivation threshold must exceed 1")
        self.scenario = self.scenario.replace(
            deactivation_threshold=threshold)
        return


    def set_activation_hz(self, hz):
        """Change the echo repetition rate."""
        ctl = dataclasses.replace(self.scenario.control, activation_hz=hz)
        self.scenario = self.scenario.replace(control=ctl)
        return


    def coupling_state(self, pose=None):
        return self.scenario.coupling_state(pose)


    def efficiency(self, pose=None, seed=None, ideal_sensing=False):
        """efficiency(pose) --> (pte of the echo drive, bound at pose)."""
        state = self.coupling_state(pose)
        drive, reading = ae_update(self.scenario, LoopState.initial(),
                                   self._seed(seed), pose, ideal_sensing)
        eta = pte(state, drive.tx_currents()) if drive is not None else 0.0
        return eta, pte_upper_bound(state)


    def baselines(self, poses, ideal_sensing=True):
        return compare_baselines(self.scenario, poses, ideal_sensing)


    def track(self, duration=1.0, dt=5e-3, amplitude=math.radians(20),
              frequency=1.0, seed=None, ideal_sensing=False):
        """Run a rocking trajectory around the scenario pose.

        Returns the TrackingSample rows.
        """
        pos = self.scenario.receiver.pose.position
        traj = Trajectory.rocking(pos, amplitude, frequency, duration, dt)
        return run_tracking(self.scenario, traj, seed=self._seed(seed),
                            ideal_sensing=ideal_sensing)


    def sweep(self, kind, steps=19, range=None, seed=None, jobs=1, pose=None):
        return run_sweep(self.scenario, kind, range, steps,
                         self._seed(seed), jobs, pose=pose)


    def oracle(self, n_poses=50, steps=201, seed=None, jobs=1):
        return oracle_sweep(self.scenario, n_poses, self._seed(seed),
                            steps, jobs)


    def design_array(self, bracket=None, k_threshold=1e-3):
        """design_array() --> (distance_mm, coils, ArrayReport).

        Cancellation layout for the first coil of the scenario.
        """
        coil = self.scenario.coils[0]
        d = find_cancellation_distance(coil, bracket, self.scenario.order)
        coils = layout_three_coils(coil, d)
        report = validate_array(coils, self.scenario.omega, k_threshold,
                                self.scenario.order)
        return d, coils, report


    def summary(self):
        """Print scenario timing and efficiency summary to omniwpt.output.
        """
        s = self.scenario
        cycle = ae_cycle_duration(s.rx_chain, s.control.ring_margin_s)
        frac = interruption_fraction(s.rx_chain, s.control)
        eta, bound = self.efficiency(ideal_sensing=True)
        output.report("coils                 %i" % len(s.coils),
                      "implant pose          %s axis %s" % (
                          _vec(s.receiver.pose.position),
                          _vec(s.receiver.pose.axis)),
                      "echo cycle            %.1f us" % (cycle * 1e6),
                      "power interruption    %.3f %%" % (frac * 100),
                      "pte (echo drive)      %.6g" % eta,
                      "pte bound             %.6g" % bound)
        return


    def save_scenario(self, path):
        with open(path, 'w') as fp:
            fp.write(emit_scenario(self.scenario))
        return


    def _seed(self, seed):
        return self.scenario.seed if seed is None else seed

# End of class WptSimulator


def _vec(v):
    return '(%s)' % ', '.join('%g' % x for x in v)

# End of file
