"""Profile evaluation and validation, metric coefficients, curvature."""
import logging
import math
from dataclasses import dataclass
from typing import NamedTuple, Optional, Tuple

import numpy as np

import config
from .errors import DegeneracyError, DomainError
from .interfaces import BaseProfile, Derivatives, Side
from .models import ConstraintCheck, ValidationReport

logger = logging.getLogger(__name__)


class Christoffel(NamedTuple):
    r_rr: float
    r_rphi: float
    r_phiphi: float
    phi_rr: float
    phi_rphi: float
    phi_phiphi: float


def eval_profile(p: BaseProfile, r: float, side: Side = "+") -> Derivatives:
    lam, dlam, ddlam = p.derivatives(float(r), side)
    if lam < 0.0:
        raise DomainError(f"λ({r})={lam} is negative", r=r, kind=p.kind)
    return lam, dlam, ddlam


def check_point(p: BaseProfile, r: float, phi: float, allow_boundary: bool = False) -> Derivatives:
    """Evaluate the profile at a strip point, rejecting the degenerate locus."""
    if not allow_boundary and not (config.PHI_MIN <= phi <= math.pi - config.PHI_MIN):
        raise DegeneracyError(f"φ={phi} is inside the guard band", r=r, phi=phi)
    derivs = eval_profile(p, r)
    if derivs[0] <= config.LAMBDA_MIN:
        raise DegeneracyError(f"λ({r})={derivs[0]} vanishes", r=r, phi=phi)
    return derivs


@dataclass(frozen=True)
class SurfaceMetric:
    """E dr² + G dφ² with E = λ sin²φ, G = λ² sin²φ."""

    profile: BaseProfile

    def coefficients(self, r: float, phi: float) -> Tuple[float, float]:
        lam = eval_profile(self.profile, r)[0]
        s2 = math.sin(phi) ** 2
        return lam * s2, lam * lam * s2

    def E(self, r: float, phi: float) -> float:
        return self.coefficients(r, phi)[0]

    def G(self, r: float, phi: float) -> float:
        return self.coefficients(r, phi)[1]

    def norm(self, r: float, phi: float, dr: float, dphi: float) -> float:
        E, G = self.coefficients(r, phi)
        return math.sqrt(E * dr * dr + G * dphi * dphi)


def christoffel(m: SurfaceMetric, r: float, phi: float) -> Christoffel:
    lam, dlam, _ = check_point(m.profile, r, phi)
    cot = math.cos(phi) / math.sin(phi)
    return Christoffel(
        r_rr=dlam / (2.0 * lam),
        r_rphi=cot,
        r_phiphi=-dlam,
        phi_rr=-cot / lam,
        phi_rphi=dlam / lam,
        phi_phiphi=cot,
    )


def gaussian_curvature(m: SurfaceMetric, r: float, phi: float) -> float:
    lam, dlam, ddlam = check_point(m.profile, r, phi)
    s2 = math.sin(phi) ** 2
    return (1.0 / (lam * lam * s2 * s2)
            - ddlam / (lam * lam * s2)
            + dlam * dlam / (2.0 * lam ** 3 * s2))


def curvature_fd(m: SurfaceMetric, r: float, phi: float, h: float = 1e-4) -> float:
    """K = −1/(2√EG) [(G_r/√EG)_r + (E_φ/√EG)_φ] by nested central differences."""
    check_point(m.profile, r, phi)

    def root(x, y):
        E, G = m.coefficients(x, y)
        return math.sqrt(E * G)

    def g_r_term(x, y):
        return (m.G(x + h, y) - m.G(x - h, y)) / (2 * h) / root(x, y)

    def e_phi_term(x, y):
        return (m.E(x, y + h) - m.E(x, y - h)) / (2 * h) / root(x, y)

    d_r = (g_r_term(r + h, phi) - g_r_term(r - h, phi)) / (2 * h)
    d_phi = (e_phi_term(r, phi + h) - e_phi_term(r, phi - h)) / (2 * h)
    return -(d_r + d_phi) / (2.0 * root(r, phi))


def barrier_discriminant(p: BaseProfile, r: float, phi: float) -> float:
    """Δ = (3/λ)(3λ′²/(4λ) − cot²φ); negative means the φ-chart RHS is monotone in dr/dφ."""
    lam, dlam, _ = check_point(p, r, phi)
    cot = math.cos(phi) / math.sin(phi)
    return (3.0 / lam) * (3.0 * dlam * dlam / (4.0 * lam) - cot * cot)


def ricci_diagonal(p: BaseProfile, r: float) -> Tuple[float, float, float]:
    lam, dlam, ddlam = eval_profile(p, r)
    if lam <= config.LAMBDA_MIN:
        raise DegeneracyError(f"Ricci diagonal has a pole at r={r} (λ={lam})", r=r)
    rr = 0.5 * dlam * dlam / (lam * lam) - ddlam / lam
    t = (1.0 - 0.5 * ddlam) / lam
    return rr, t, t


def _grid(r_max: float, grid_n: int) -> np.ndarray:
    return r_max * np.arange(1, grid_n + 1) / grid_n


def _summarize(name: str, grid: np.ndarray, margins: np.ndarray, holds_mask: np.ndarray,
               saturable: bool = False) -> ConstraintCheck:
    worst = int(np.argmax(margins))
    return ConstraintCheck(
        name=name,
        holds=bool(np.all(holds_mask)),
        saturated=saturable and bool(np.all(np.abs(margins) <= config.ZERO_LAMBDA_TOL)),
        worst_margin=float(margins[worst]),
        worst_at=float(grid[worst]),
        violations=int(np.count_nonzero(~holds_mask)),
    )


def _domain_split(p: BaseProfile, grid: np.ndarray) -> Tuple[np.ndarray, Optional[ConstraintCheck]]:
    """Grid points where the profile is defined, plus a failing "domain" check for the rest."""
    defined = []
    for r in grid:
        try:
            p.derivatives(float(r))
            defined.append(True)
        except DomainError:
            defined.append(False)
    defined = np.array(defined)
    if defined.all():
        return grid, None
    outside = grid[~defined]
    last_ok = float(grid[defined][-1]) if defined.any() else 0.0
    check = ConstraintCheck(name="domain", holds=False, saturated=False,
                            worst_margin=float(outside[-1]) - last_ok, worst_at=float(outside[0]),
                            violations=int(outside.size))
    logger.warning(f"validate_profile {p.kind}: λ is undefined on [{outside[0]:.6g}, {outside[-1]:.6g}]")
    return grid[defined], check


def validate_profile(p: BaseProfile, r_max: float, grid_n: int = config.GRID_N) -> ValidationReport:
    """Barrier, second-derivative and flat-zero checks on the grid r_max·k/grid_n.

    Grid points beyond the profile's domain make the report non-compliant through
    an extra "domain" check (worst_at is the first such point); the other checks
    cover the defined part of the grid.
    """
    if grid_n < 2:
        raise DomainError(f"grid_n must be at least 2, got {grid_n}", grid_n=grid_n)
    if r_max <= 0:
        raise DomainError(f"r_max must be positive, got {r_max}", r_max=r_max)

    grid, domain = _domain_split(p, _grid(r_max, grid_n))
    if not grid.size:
        return ValidationReport(profile_kind=p.kind, r_max=float(r_max), grid_n=int(grid_n), checks=(domain,))
    derivs = np.array([eval_profile(p, float(r)) for r in grid])
    lam, dlam, ddlam = derivs[:, 0], derivs[:, 1], derivs[:, 2]

    barrier = np.array([p.barrier_margin(float(r)) for r in grid])
    second = ddlam - 2.0 * np.sin(grid) ** 2
    flat = np.where(lam <= config.ZERO_LAMBDA_TOL, np.abs(dlam), 0.0)

    checks = (
        _summarize("barrier", grid, barrier, barrier < 0.0, saturable=True),
        _summarize("second_derivative", grid, second, second <= config.ZERO_LAMBDA_TOL),
        _summarize("flat_zero", grid, flat, flat <= config.FLAT_ZERO_TOL),
    ) + ((domain,) if domain else ())
    report = ValidationReport(profile_kind=p.kind, r_max=float(r_max), grid_n=int(grid_n), checks=checks)
    logger.debug(f"validate_profile {p.kind}: " + ", ".join(
        f"{c.name}={'ok' if c.holds else 'fail'}({c.worst_margin:.3g}@{c.worst_at:.4g})" for c in checks))
    return report
