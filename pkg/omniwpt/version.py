#!/usr/bin/env python
##############################################################################
#
# omniwpt           omnidirectional magnetoelectric power transfer simulator
#
# See AUTHORS.txt for a list of people who contributed.
# See LICENSE.txt for license information.
#
##############################################################################

"""
Definition of __version__, __date__, __timestamp__, __git_commit__.

The values are read from the version.cfg file, which setup.py refreshes
from git metadata when it is available.
"""

__all__ = ['__date__', '__git_commit__', '__timestamp__', '__version__']

from importlib import resources


# obtain version information from the version.cfg file
cp = dict(version='', date='', commit='', timestamp='0')
fcfg = resources.files(__package__).joinpath('version.cfg')
if fcfg.is_file():
    lines = fcfg.read_text().splitlines()
else:   # pragma: no cover
    from warnings import warn
    warn('Package metadata not found, execute "./setup.py egg_info".')
    lines = []
kwords = [[w.strip() for w in line.split(' = ', 1)]
          for line in lines if line[:1].isalpha() and ' = ' in line]
assert all(w[0] in cp for w in kwords), "received unrecognized keyword"
cp.update(kwords)

__version__ = cp['version']
__date__ = cp['date']
__git_commit__ = cp['commit']
__timestamp__ = int(cp['timestamp'])

del cp, fcfg, lines, kwords

# End of file
