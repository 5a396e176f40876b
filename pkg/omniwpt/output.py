#!/usr/bin/env python
##############################################################################
#
# omniwpt           omnidirectional magnetoelectric power transfer simulator
#
# See AUTHORS.txt for a list of people who contributed.
# See LICENSE.txt for license information.
#
##############################################################################

"""Take care of sending simulator reports to given file-like object.
The output file is stored in local module variable stdout.
"""


from sys import stdout as stdout
# silence pyflakes checker
assert stdout


def redirect_stdout(dst):
    """Redirect omniwpt report output to a file-like object dst.
    The dst value is stored in module variable stdout.
    """
    global stdout
    stdout = dst
    return


def report(*lines):
    """Write lines of text to the current report stream.
    """
    for line in lines:
        print(line, file=stdout)
    return

#  End of file
