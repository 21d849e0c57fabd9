import math
from abc import ABC, abstractmethod
from typing import Literal, Optional, Tuple

from .models import ProfileSpec

Side = Literal["+", "-"]
Derivatives = Tuple[float, float, float]


class BaseProfile(ABC):
    """Warping function λ(r) of the quotient metric λ sin²φ (dr² + λ dφ²)."""

    kind: str
    is_product: bool = False
    saturates_barrier: bool = False

    @abstractmethod
    def derivatives(self, r: float, side: Side = "+") -> Derivatives:
        """(λ, λ′, λ″) at r; `side` picks the one-sided λ″ at a kink."""
        ...

    @abstractmethod
    def to_dict(self) -> ProfileSpec: ...

    @property
    def r_zero(self) -> Optional[float]:
        """Largest r where λ vanishes, None when λ>0 everywhere."""
        return None

    @property
    def r_min(self) -> float:
        return -math.inf

    def barrier_margin(self, r: float) -> float:
        """λ′(r) + sin 2r; strictly negative on a compliant working interval."""
        _, dlam, _ = self.derivatives(r)
        return dlam + math.sin(2.0 * r)

    def __repr__(self) -> str:
        return f"{type(self).__name__}({self.to_dict()})"
