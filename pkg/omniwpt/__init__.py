#!/usr/bin/env python
##############################################################################
#
# omniwpt           omnidirectional magnetoelectric power transfer simulator
#
# See AUTHORS.txt for a list of people who contributed.
# See LICENSE.txt for license information.
#
##############################################################################

"""omniwpt - omnidirectional magnetoelectric wireless power transfer.
Classes:
    WptSimulator, ScenarioConfig, CoilSpec, Pose, ReceiverModel
Routines:
    load_scenario, parse_scenario, default_scenario, redirect_stdout
"""


from omniwpt.version import __version__, __date__
from omniwpt.magnetics import CoilSpec, Pose, ReceiverModel
from omniwpt.scenario import ScenarioConfig, default_scenario, \
    load_scenario, parse_scenario
from omniwpt.simulator import WptSimulator
from omniwpt.output import redirect_stdout

# silence pyflakes checker
assert __version__ or True
assert __date__ or True
assert all((CoilSpec, Pose, ReceiverModel, ScenarioConfig,
            default_scenario, load_scenario, parse_scenario, WptSimulator,
            redirect_stdout))

# End of file
