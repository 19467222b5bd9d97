"""Exception hierarchy shared by all loopmass modules."""


class LoopmassError(Exception):
    """Base class for all errors raised by this package."""


class PoleError(LoopmassError, ArithmeticError):
    """Gamma function evaluated too close to a non-positive integer."""


class GammaPole(PoleError):
    """A gamma factor inside a coefficient formula sits on a pole."""


class CutError(LoopmassError, ValueError):
    """Argument lies on the branch cut [1, inf) of the principal branch."""


class DegenerateC(LoopmassError, ValueError):
    """Lower hypergeometric parameter too close to a non-positive integer."""


class DegenerateKappa(LoopmassError, ValueError):
    """kappa value at which a closed-form coefficient degenerates."""


class RangeError(LoopmassError, ValueError):
    """Model parameter outside its admissible interval."""


class CoincidentPoints(LoopmassError, ValueError):
    """Two marked points closer than the resolution tolerance."""


class BoundaryContact(LoopmassError, ValueError):
    """Half-plane point on or below the real-axis boundary."""


class ScaleError(LoopmassError, ValueError):
    """Separation not larger than the lattice-spacing scale."""


class EpsTooLarge(LoopmassError, ValueError):
    """Probe-circle radius too large relative to the point separations."""


class StepTooLarge(LoopmassError, ValueError):
    """Finite-difference step too large relative to the point separations."""


class MarkOnBoundary(LoopmassError, ValueError):
    """Marked face too close to the domain boundary for its mode."""


class InvalidPath(LoopmassError, ValueError):
    """Dual path is not a face-adjacent walk between the marked faces."""


class BudgetError(LoopmassError, RuntimeError):
    """Enumeration exceeded the configured backtracking-node budget."""


class InsufficientData(LoopmassError, ValueError):
    """Not enough samples to perform the requested fit."""


class BadStep(LoopmassError, ValueError):
    """Invalid time step or duration for the Loewner chain."""


class PointSwallowed(LoopmassError, RuntimeError):
    """An evolved point was absorbed by the growing hull."""


class TooManySwallowed(LoopmassError, RuntimeError):
    """Censored-run fraction exceeded the admissible cap."""
