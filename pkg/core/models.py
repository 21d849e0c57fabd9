from __future__ import annotations
import math
from dataclasses import dataclass, asdict
from typing import TYPE_CHECKING, Any, Callable, Dict, List, Literal, Optional, Tuple, TypedDict

import numpy as np

if TYPE_CHECKING:
    from .interfaces import BaseProfile

EventKind = Literal[
    "equator_crossing", "turning_point", "midline_crossing", "phi_level", "boundary_contact",
]
Chart = Literal["t", "phi", "mixed"]
StopReason = Literal["t_end", "phi_end", "stop_r", "boundary", "slope"]
ProfileKind = Literal["product", "c1cosine", "smooth", "reflected"]


class ProfileSpec(TypedDict, total=False):
    kind: ProfileKind
    epsilon: float
    eta: float
    r_flat: float
    flat_scale: float
    flat_width: float
    inner: "ProfileSpec"


@dataclass(frozen=True)
class GeodesicState:
    r: float
    phi: float
    rdot: float
    phidot: float
    t: float = 0.0

    def as_array(self) -> np.ndarray:
        return np.array([self.r, self.phi, self.rdot, self.phidot], dtype=float)


@dataclass(frozen=True)
class PhiState:
    r: float
    drdphi: float
    phi: float


@dataclass(frozen=True)
class Event:
    kind: EventKind
    t: float
    state: GeodesicState
    level: Optional[float] = None
    direction: int = 0


@dataclass(frozen=True, eq=False)
class Trajectory:
    """Sampled geodesic. In the φ chart `t` is the accumulated ds arc length;
    a "mixed" trajectory keeps its per-chart pieces in `segments`."""

    profile: "BaseProfile"
    chart: Chart
    t: np.ndarray
    r: np.ndarray
    phi: np.ndarray
    rdot: np.ndarray
    phidot: np.ndarray
    events: Tuple[Event, ...] = ()
    clairaut_c: Optional[float] = None
    drdphi: Optional[np.ndarray] = None
    dense: Optional[Callable[[float], np.ndarray]] = None
    stop_reason: StopReason = "t_end"
    segments: Tuple["Trajectory", ...] = ()

    def __len__(self) -> int:
        return len(self.t)

    @property
    def samples(self) -> List[GeodesicState]:
        return [
            GeodesicState(float(r), float(p), float(rd), float(pd), float(t))
            for t, r, p, rd, pd in zip(self.t, self.r, self.phi, self.rdot, self.phidot)
        ]

    @property
    def t_start(self) -> float:
        return float(self.t[0])

    @property
    def t_end(self) -> float:
        return float(self.t[-1])

    @property
    def arc_length(self) -> float:
        return self.t_end - self.t_start

    def lambdas(self) -> np.ndarray:
        return np.array([self.profile.derivatives(float(r))[0] for r in self.r])

    @property
    def speed_drift(self) -> float:
        lam = self.lambdas()
        speed = (self.rdot ** 2 + lam * self.phidot ** 2) * lam * np.sin(self.phi) ** 2
        return float(np.max(np.abs(speed - 1.0)))

    @property
    def clairaut_values(self) -> Optional[np.ndarray]:
        if self.clairaut_c is None:
            return None
        return self.rdot * np.sin(self.phi) ** 2

    @property
    def clairaut_drift(self) -> Optional[float]:
        values = self.clairaut_values
        if values is None:
            return None
        return float(np.max(np.abs(values - self.clairaut_c)))

    @property
    def confinement_margin(self) -> Optional[float]:
        if self.clairaut_c is None:
            return None
        return float(np.min(np.sin(self.phi) - abs(self.clairaut_c)))

    def events_of(self, kind: EventKind, level: Optional[float] = None, direction: int = 0) -> List[Event]:
        out = []
        for ev in self.events:
            if ev.kind != kind:
                continue
            if level is not None and (ev.level is None or abs(ev.level - level) > 1e-15):
                continue
            if direction and ev.direction != direction:
                continue
            out.append(ev)
        return out

    def state_at(self, t: float) -> GeodesicState:
        if self.chart != "t" or self.dense is None:
            raise ValueError("state_at needs a t-chart trajectory with dense output")
        y = self.dense(t)
        return GeodesicState(float(y[0]), float(y[1]), float(y[2]), float(y[3]), float(t))

    def r_at_phi(self, phi: float) -> float:
        if self.chart != "phi" or self.dense is None:
            raise ValueError("r_at_phi needs a φ-chart trajectory with dense output")
        return float(self.dense(phi)[0])

    @property
    def final_state(self) -> GeodesicState:
        return GeodesicState(float(self.r[-1]), float(self.phi[-1]), float(self.rdot[-1]),
                             float(self.phidot[-1]), float(self.t[-1]))


@dataclass(frozen=True)
class ConstraintCheck:
    name: str
    holds: bool
    saturated: bool
    worst_margin: float
    worst_at: float
    violations: int


@dataclass(frozen=True)
class ValidationReport:
    profile_kind: str
    r_max: float
    grid_n: int
    checks: Tuple[ConstraintCheck, ...]

    def check(self, name: str) -> ConstraintCheck:
        for c in self.checks:
            if c.name == name:
                return c
        raise KeyError(name)

    @property
    def compliant(self) -> bool:
        return all(c.holds for c in self.checks)

    @property
    def weakly_compliant(self) -> bool:
        return all(c.holds or c.saturated for c in self.checks)

    def to_dict(self) -> Dict[str, Any]:
        return {
            "profile_kind": self.profile_kind,
            "r_max": self.r_max,
            "grid_n": self.grid_n,
            "compliant": self.compliant,
            "weakly_compliant": self.weakly_compliant,
            "checks": [asdict(c) for c in self.checks],
        }


@dataclass(frozen=True, eq=False)
class ConjugateReport:
    geodesic: Trajectory
    jacobi_zeros: Tuple[float, ...]
    index: int
    equator_crossings: int
    nullity_flag: bool
    min_curvature: float
    jacobi: Optional[Callable[[float], np.ndarray]] = None
    sub_arc_only: bool = False

    @property
    def t_end(self) -> float:
        return self.geodesic.t_end

    def index_at(self, t: float) -> int:
        """Index of the sub-geodesic on [t_start, t] (zeros strictly before t)."""
        return sum(1 for z in self.jacobi_zeros if z < t)

    def to_dict(self) -> Dict[str, Any]:
        return {
            "jacobi_zeros": list(self.jacobi_zeros),
            "index": self.index,
            "equator_crossings": self.equator_crossings,
            "nullity_flag": self.nullity_flag,
            "min_curvature": self.min_curvature,
            "t_end": self.t_end,
            "sub_arc_only": self.sub_arc_only,
        }


@dataclass(frozen=True)
class IndexBounds:
    index: int
    crossings: int
    half_bound_ok: bool
    full_bound_ok: bool


@dataclass(frozen=True)
class GapCheck:
    max_gap: float
    rauch_ok: bool
    period_lengths: Tuple[float, ...]
    lengths_ok: bool


@dataclass(frozen=True)
class Crossing:
    phi0: float
    alpha: float

    @property
    def metric_angle(self) -> float:
        # λ(0)=1 on the midline, so the metric is conformal there
        return math.atan(abs(self.alpha))


@dataclass(frozen=True)
class Certificates:
    barrier_ok: bool
    monotone_ok: bool
    second_deriv_ok: bool
    convex_near_boundary_ok: bool

    @property
    def all_ok(self) -> bool:
        return self.barrier_ok and self.monotone_ok and self.second_deriv_ok and self.convex_near_boundary_ok


@dataclass(frozen=True, eq=False)
class ShootResult:
    r0: float
    phi_start: float
    trajectory: Trajectory
    crossing: Crossing
    certificates: Certificates
    barrier_worst: float
    contact_second_derivative: float

    def to_dict(self) -> Dict[str, Any]:
        return {
            "r0": self.r0,
            "phi_start": self.phi_start,
            "crossing": {"phi0": self.crossing.phi0, "alpha": self.crossing.alpha,
                         "metric_angle": self.crossing.metric_angle},
            "certificates": asdict(self.certificates),
            "barrier_worst": self.barrier_worst,
            "contact_second_derivative": self.contact_second_derivative,
            "samples": len(self.trajectory),
        }


@dataclass(frozen=True)
class StripPhase:
    """Closed-form phase data of the product geodesic crossing the strip (−ε, 0)."""

    c: float
    period: float
    first_return: float
    phase: float
    branch: int
    fraction: float


@dataclass(frozen=True, eq=False)
class MiddleStripPhase:
    arrival_phi: float
    arrival_slope: float
    half_periods: int
    trajectory: Trajectory
    phase: StripPhase


@dataclass(frozen=True)
class DoubleContact:
    r0: float
    epsilon: float
    phi0: float
    alpha: float
    residual: float
    periods_in_strip: int
    index_estimate: int
    landing_r: Optional[float] = None

    def to_dict(self) -> Dict[str, Any]:
        return asdict(self)
