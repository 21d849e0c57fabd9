from typing import Any, Dict


class GeolabError(Exception):
    """Base class; `context` is echoed by the CLI next to the message."""

    def __init__(self, message: str, **context: Any):
        super().__init__(message)
        self.context: Dict[str, Any] = context


class DomainError(GeolabError, ValueError):
    pass


class DegeneracyError(GeolabError, ValueError):
    """Point inside the guard band φ∈[0,φ_min)∪(π−φ_min,π] or where λ vanishes."""


class ConfigError(GeolabError, ValueError):
    pass


# integration
class BoundaryApproach(GeolabError):
    pass


class StepFailure(GeolabError):
    pass


class SlopeBlowup(GeolabError):
    """|dr/dφ| passed the chart switch threshold; continue with integrate_t."""


# shooting
class NoCrossing(GeolabError):
    pass


class SeriesInvalid(GeolabError):
    pass


class BracketExhausted(GeolabError):
    def __init__(self, message: str, found: int, wanted: int, **context: Any):
        super().__init__(message, found=found, wanted=wanted, **context)
        self.found = found
        self.wanted = wanted


class CurvatureEvaluationError(GeolabError):
    pass
