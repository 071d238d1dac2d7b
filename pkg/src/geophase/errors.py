"""Exception types raised across the package."""


class GeophaseError(Exception):
    """Base class for all package errors."""


class UndefinedPhase(GeophaseError, ValueError):
    """The overlap whose argument defines a phase vanishes."""


class DegenerateClosure(GeophaseError, ValueError):
    """Open path endpoints are antipodal, so the closing geodesic is ambiguous."""


class OutOfDomain(GeophaseError, ValueError):
    """Fringe statistics are inconsistent with the stated purity."""


class PurityZero(GeophaseError, ValueError):
    pass


class FitFailure(GeophaseError, RuntimeError):
    """Fringe fit underdetermined or amplitude not significant."""


class NoRealization(GeophaseError, ValueError):
    """No SU(2) parameters realize the requested phase pair."""


class EmptyCounts(GeophaseError, ValueError):
    pass


class OptimizerStall(GeophaseError, RuntimeError):
    pass


class ConfigInvalid(GeophaseError, ValueError):
    def __init__(self, diagnostics):
        if isinstance(diagnostics, str):
            diagnostics = [diagnostics]
        self.diagnostics = list(diagnostics)
        super().__init__("; ".join(self.diagnostics))


class IoFailure(GeophaseError, OSError):
    pass
