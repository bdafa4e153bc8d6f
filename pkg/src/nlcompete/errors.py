"""Exception types shared across the package.

Each maps to a CLI exit code, see cli.EXIT_CODES.
"""


class ConfigError(ValueError):
    """Malformed configuration, bad field value, or inconsistent inputs."""


class HypothesisViolation(RuntimeError):
    """A scenario falls outside the hypotheses of the classification theory.

    Typical cause: one of the semi-trivial steady states does not exist
    because the corresponding growth spectral bound is not positive.
    """


class UnsupportedRegime(RuntimeError):
    """Parameter regime the classifier deliberately refuses.

    Strong competition (max b * max c > min b1 * min c1) and non-symmetric
    kernel matrices fall here.
    """


class NumericsError(RuntimeError):
    """Numerical failure: step-size collapse, divergence, non-convergence."""


class ConvergenceError(NumericsError):
    """Iterative eigensolver failed to converge.

    Carries the last Rayleigh quotient, a valid lower bound for symmetric
    operators.
    """

    def __init__(self, message, lower_bound=None):
        super().__init__(message)
        self.lower_bound = lower_bound


class MonotonicityError(NumericsError):
    """A trajectory started from an upper/lower solution failed to be
    monotone in the competitive order.  Signals a discretization pathology,
    never silently ignored."""
