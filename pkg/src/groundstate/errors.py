"""Exception types shared across the toolkit."""


class ToolkitError(Exception):
    """Base class for toolkit-specific failures."""


class MeshError(ToolkitError):
    """Invalid mesh topology or geometry (open complex, degenerate face, ...)."""


class InadmissibleError(ToolkitError):
    """Potential does not meet the admissibility conditions an operation needs."""


class ConvergenceError(ToolkitError):
    """Eigensolver or root finder stopped before reaching its tolerance.

    Carries the best residuals seen so the caller can report them.
    """

    def __init__(self, message, residuals=None, iterations=None):
        super().__init__(message)
        self.residuals = residuals
        self.iterations = iterations


class BracketError(ToolkitError):
    """No sign-change bracket for the lowest eigenvalue could be established."""


class NonMonotoneError(ToolkitError):
    """Operation requires a strictly monotone coupling schedule."""


class ConfigError(ToolkitError):
    """Bad run configuration (CLI flags or config file)."""
