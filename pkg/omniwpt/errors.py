#!/usr/bin/env python
##############################################################################
#
# omniwpt           omnidirectional magnetoelectric power transfer simulator
#
# See AUTHORS.txt for a list of people who contributed.
# See LICENSE.txt for license information.
#
##############################################################################

"""Exceptions and warnings raised by the omniwpt simulator.

All library errors derive from omniwptError.  Most also derive from the
matching builtin class, so callers may catch ValueError or ArithmeticError
without knowing about this module.
"""


class omniwptError(Exception):
    """Base class for errors raised by omniwpt."""
    pass


class singularityError(omniwptError, ArithmeticError):
    """Field or mutual-inductance kernel evaluated on a coil filament."""
    pass


class calculationError(omniwptError, ArithmeticError):
    """Numerical failure of a network solve.

    diagnostics -- dictionary with condition number, residual and size.
    """

    def __init__(self, message, diagnostics=None):
        omniwptError.__init__(self, message)
        self.diagnostics = dict(diagnostics or {})
        return


class efficiencyError(omniwptError, ValueError):
    """Power transfer efficiency is undefined for all-zero currents."""
    pass


class noCouplingError(omniwptError, ValueError):
    """All couplings are zero so the field cannot be steered."""
    pass


class saturationError(omniwptError, ValueError):
    """PWM target current exceeds the look-up table range.

    duty    -- the clamped duty cycle at the table maximum
    current -- the requested current
    """

    def __init__(self, message, duty, current):
        omniwptError.__init__(self, message)
        self.duty = duty
        self.current = current
        return


class allWeakError(omniwptError):
    """Every Active Echo channel stayed below one ADC step."""
    pass


class protocolError(omniwptError):
    """Illegal control-loop transition.

    phase -- name of the phase the loop was in
    event -- name of the rejected event
    """

    def __init__(self, phase, event, reason=''):
        msg = "event %s is illegal in phase %s" % (event, phase)
        if reason:
            msg += ": " + reason
        omniwptError.__init__(self, msg)
        self.phase = phase
        self.event = event
        return


class noCancellationError(omniwptError, ValueError):
    """Mutual inductance does not change sign inside the bracket."""
    pass


class scenarioError(omniwptError, ValueError):
    """Scenario file failed validation.

    problems -- list of (path, expected, found) triples
    """

    def __init__(self, problems):
        self.problems = list(problems)
        lines = ["%s: expected %s, found %s" % p for p in self.problems]
        omniwptError.__init__(self, "invalid scenario:\n  " +
                              "\n  ".join(lines))
        return


class SaturationWarning(UserWarning):
    """Echo amplitude hit the top of the ADC range, estimate is a bound."""
    pass

# End of file
