"""Exception and warning types shared across the package."""


class ParameterError(ValueError):
    """A family or scene parameter violates its domain constraints."""


class DegenerateParameterError(ParameterError):
    """A closed form is undefined for these parameters (e.g. a1*a2*(c1+c2) = a1+a2)."""


class PoleInputError(ValueError):
    """Derivative requested at (or within 1e-13 of) a pole."""


class SolverConvergenceError(RuntimeError):
    """Simultaneous root iteration failed to converge within the sweep budget."""


class BranchJumpError(RuntimeError):
    """Square-root branch tracking along a curve lost continuity."""


class BranchAmbiguityError(RuntimeError):
    """Branch selection requested at a point where sheets coincide."""


class LiftStallError(RuntimeError):
    """Path lifting stalled: Newton corrector diverged below the minimum step."""


class ResolutionGuardError(ValueError):
    """Requested raster exceeds the pixel-count guard."""


class ConfigError(ValueError):
    """Bad CLI/job configuration (unknown key, malformed value)."""


class NearCriticalWarning(UserWarning):
    """A tracked lift passed close to a critical point (|B'| < 1e-6)."""


class MatchAmbiguityWarning(UserWarning):
    """Two fiber roots approached within tolerance across a matching step."""


class DegenerateParameterWarning(UserWarning):
    """Closed form degenerate; a general numeric path was used instead."""
