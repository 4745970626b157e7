class DeltaQEDError(Exception):
    """Base class for computational failures (CLI exit code 1)."""


class InfeasibleDriveError(DeltaQEDError, ValueError):
    """No real Rabi frequency satisfies the optimal-drive condition."""


class SingularSystemError(DeltaQEDError):
    """A linear system that should have a unique solution is numerically singular."""


class ConvergenceError(DeltaQEDError):
    """An eigensolver or iteration failed to reach its tolerance."""


class ZeroMatrixElementError(DeltaQEDError, ValueError):
    """The drive transition has a vanishing matrix element."""


class ConfigError(Exception):
    """Invalid configuration or usage (CLI exit code 2)."""
