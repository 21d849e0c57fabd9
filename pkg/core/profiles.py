"""λ-profiles: product, C¹ cosine, smooth compliant and reflected."""
import math
from typing import Any, Mapping, Optional

import numpy as np

import config
from .errors import ConfigError, DomainError
from .interfaces import BaseProfile, Derivatives, Side
from .models import ProfileSpec
from .registry import ProfileRegistry


class ProductProfile(BaseProfile):
    kind = "product"
    is_product = True

    def derivatives(self, r: float, side: Side = "+") -> Derivatives:
        return 1.0, 0.0, 0.0

    def to_dict(self) -> ProfileSpec:
        return {"kind": "product"}


class C1CosineProfile(BaseProfile):
    """λ = cos²r on [0, π/2], λ = 1 for r < 0. Only C¹ at r = 0."""

    kind = "c1cosine"
    saturates_barrier = True

    def derivatives(self, r: float, side: Side = "+") -> Derivatives:
        if r < 0.0 or (r == 0.0 and side == "-"):
            return 1.0, 0.0, 0.0
        if r > math.pi / 2:
            raise DomainError(f"c1cosine profile is defined up to r=π/2, got r={r}", r=r)
        c = math.cos(r)
        return c * c, -math.sin(2.0 * r), -2.0 * math.cos(2.0 * r)

    @property
    def r_zero(self) -> Optional[float]:
        return math.pi / 2

    def to_dict(self) -> ProfileSpec:
        return {"kind": "c1cosine"}


class SmoothCompliantProfile(BaseProfile):
    """λ = cos²r − η·exp(−a/r) on (0, r_flat], then a C² polynomial flattening
    λ0 (1 − u/w)² (1 + b u + d u²), u = r − r_flat, down to a double zero at r_flat + w.

    The bump exp(−a/r) is flat to all orders at 0, so λ′ + sin 2r = −η·s′(r) is
    strictly negative for η > 0 and strictly positive for η < 0.
    """

    kind = "smooth"

    def __init__(self,
                 eta: float = config.DEFAULT_ETA,
                 r_flat: float = config.DEFAULT_R_FLAT,
                 flat_scale: float = config.DEFAULT_FLAT_SCALE,
                 flat_width: float = config.DEFAULT_FLAT_WIDTH):
        if flat_scale <= 0 or flat_width <= 0:
            raise DomainError("flat_scale and flat_width must be positive",
                              flat_scale=flat_scale, flat_width=flat_width)
        if not 0.0 < r_flat < math.pi / 2:
            raise DomainError(f"r_flat must lie in (0, π/2), got {r_flat}", r_flat=r_flat)
        self.eta = float(eta)
        self.r_flat = float(r_flat)
        self.flat_scale = float(flat_scale)
        self.flat_width = float(flat_width)

        lam0, lam1, lam2 = self._cosine_part(self.r_flat)
        if lam0 <= 0.0:
            raise DomainError(f"λ(r_flat)={lam0:.6g} is not positive; eta too large", eta=eta)
        w = self.flat_width
        self._lam0 = lam0
        self._b = lam1 / lam0 + 2.0 / w
        self._d = lam2 / (2.0 * lam0) - 1.0 / w ** 2 + 2.0 * self._b / w
        self._check_shape()

    # s(r) = exp(−a/r) and its first two derivatives
    def _bump(self, r: float):
        if r <= 0.0:
            return 0.0, 0.0, 0.0
        a = self.flat_scale
        y = a / r
        s = math.exp(-y)
        return s, s * y * y / a, s * (y ** 4 - 2.0 * y ** 3) / (a * a)

    def _cosine_part(self, r: float) -> Derivatives:
        s, s1, s2 = self._bump(r)
        c = math.cos(r)
        return (c * c - self.eta * s,
                -math.sin(2.0 * r) - self.eta * s1,
                -2.0 * math.cos(2.0 * r) - self.eta * s2)

    def _flat_part(self, r: float) -> Derivatives:
        w = self.flat_width
        u = r - self.r_flat
        q = 1.0 - u / w
        a0, a1, a2 = q * q, -2.0 * q / w, 2.0 / w ** 2
        b0 = 1.0 + self._b * u + self._d * u * u
        b1 = self._b + 2.0 * self._d * u
        b2 = 2.0 * self._d
        lam0 = self._lam0
        return (lam0 * a0 * b0,
                lam0 * (a1 * b0 + a0 * b1),
                lam0 * (a2 * b0 + 2.0 * a1 * b1 + a0 * b2))

    def _check_shape(self) -> None:
        grid = np.linspace(0.0, self.r_zero, 4001)[1:-1]
        vals = np.array([self.derivatives(float(r)) for r in grid])
        if np.any(vals[:, 0] <= 0.0):
            raise DomainError("profile vanishes before its flattening end", **self.to_dict())
        if np.any(vals[:, 0] > 1.0 + 1e-12):
            raise DomainError("profile exceeds 1", **self.to_dict())
        if np.any(vals[:, 1] > 0.0):
            raise DomainError("profile is not non-increasing on r>0", **self.to_dict())

    @property
    def r_zero(self) -> Optional[float]:
        return self.r_flat + self.flat_width

    def derivatives(self, r: float, side: Side = "+") -> Derivatives:
        if r < 0.0 or (r == 0.0 and side == "-"):
            return 1.0, 0.0, 0.0
        if r <= self.r_flat:
            return self._cosine_part(r)
        if r <= self.r_zero:
            return self._flat_part(r)
        raise DomainError(f"λ<0 beyond r={self.r_zero}", r=r)

    def barrier_margin(self, r: float) -> float:
        if 0.0 < r <= self.r_flat:
            return -self.eta * self._bump(r)[1]
        return super().barrier_margin(r)

    def to_dict(self) -> ProfileSpec:
        return {"kind": "smooth", "eta": self.eta, "r_flat": self.r_flat,
                "flat_scale": self.flat_scale, "flat_width": self.flat_width}


class ReflectedProfile(BaseProfile):
    """inner(−ε−r) for r ≤ −ε, 1 on (−ε, 0), inner(r) for r ≥ 0."""

    kind = "reflected"

    def __init__(self, epsilon: float, inner: BaseProfile):
        if not epsilon > 0.0:
            raise DomainError(f"epsilon must be positive, got {epsilon}", epsilon=epsilon)
        self.epsilon = float(epsilon)
        self.inner = inner
        self.saturates_barrier = inner.saturates_barrier

    def derivatives(self, r: float, side: Side = "+") -> Derivatives:
        if r <= -self.epsilon:
            mirror: Side = "-" if side == "+" else "+"
            lam, dlam, ddlam = self.inner.derivatives(-self.epsilon - r, mirror)
            return lam, -dlam, ddlam
        if r < 0.0:
            return 1.0, 0.0, 0.0
        return self.inner.derivatives(r, side)

    @property
    def r_zero(self) -> Optional[float]:
        return self.inner.r_zero

    @property
    def r_min(self) -> float:
        z = self.inner.r_zero
        return -math.inf if z is None else -self.epsilon - z

    def barrier_margin(self, r: float) -> float:
        if r > 0.0:
            return self.inner.barrier_margin(r)
        return super().barrier_margin(r)

    def to_dict(self) -> ProfileSpec:
        return {"kind": "reflected", "epsilon": self.epsilon, "inner": self.inner.to_dict()}


def _float_param(params: Mapping[str, Any], key: str, default: float) -> float:
    value = params.get(key, default)
    try:
        return float(value)
    except (TypeError, ValueError):
        raise ConfigError(f"Profile parameter '{key}' must be a number, got {value!r}", key=key)


def default_registry() -> ProfileRegistry:
    reg = ProfileRegistry()
    reg.register("product", lambda params: ProductProfile())
    reg.register("c1cosine", lambda params: C1CosineProfile())
    reg.register("smooth", lambda params: SmoothCompliantProfile(
        eta=_float_param(params, "eta", config.DEFAULT_ETA),
        r_flat=_float_param(params, "r_flat", config.DEFAULT_R_FLAT),
        flat_scale=_float_param(params, "flat_scale", config.DEFAULT_FLAT_SCALE),
        flat_width=_float_param(params, "flat_width", config.DEFAULT_FLAT_WIDTH),
    ))

    def _reflected(params: Mapping[str, Any]) -> BaseProfile:
        if "epsilon" not in params:
            raise ConfigError("reflected profile needs 'epsilon'")
        inner = reg.from_dict(params.get("inner") or {"kind": "smooth"})
        return ReflectedProfile(_float_param(params, "epsilon", 0.0), inner)

    reg.register("reflected", _reflected)
    return reg


def profile_from_dict(data: Mapping[str, Any]) -> BaseProfile:
    return default_registry().from_dict(data)
