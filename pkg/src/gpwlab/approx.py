"""Rank, best-approximation, and residual-order studies for wave families.

These routines generate the package's quantitative evidence: the rank of
Taylor-truncation matrices (the local approximation capacity of a
family), least-squares best-approximation errors against manufactured
solutions with their fitted convergence slopes, and the decay order of
the true operator residual on shrinking spheres.
"""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field
from typing import Callable, Mapping, Sequence

import numpy as np

from .basis import GpwFunction, unit_sphere_directions
from .operators import CoefficientJet
from .polycore import GradedPoly, monomials_up_to


# -- Taylor truncations and ranks -----------------------------------------


def taylor_truncation(phi: GpwFunction, bound: int | None = None) -> GradedPoly:
    """Degree-bound Taylor polynomial of exp(phase) at the center.

    Exact: with the constant term factored out, the phase has positive
    valuation, so powers beyond the bound cannot contribute below it.
    """
    if bound is None:
        bound = phi.degree
    phase = phi.phase
    constant = phase.coeffs.get((0,) * phase.dim, 0j)
    reduced = phase - GradedPoly.constant(phase.dim, constant)
    term = GradedPoly.constant(phase.dim, 1.0)
    total = term
    for m in range(1, bound + 1):
        term = term.mul_truncated(reduced, bound).scaled(1.0 / m)
        total = total + term
    return total.scaled(cmath.exp(constant))


def taylor_matrix(family: Sequence[GpwFunction], bound: int | None = None) -> np.ndarray:
    """Rows: family members; columns: graded-lex monomial coefficients of T_bound."""
    if not family:
        raise ValueError("family is empty")
    dim = family[0].phase.dim
    if bound is None:
        bound = max(phi.degree for phi in family)
    columns = monomials_up_to(dim, bound)
    matrix = np.zeros((len(family), len(columns)), dtype=complex)
    for row, phi in enumerate(family):
        truncated = taylor_truncation(phi, bound)
        for col, index in enumerate(columns):
            matrix[row, col] = truncated.coeffs.get(index, 0j)
    return matrix


def taylor_rank(
    family: Sequence[GpwFunction], bound: int | None = None, tol: float = 1e-10
) -> tuple[int, np.ndarray]:
    """Numerical rank of the Taylor-truncation matrix: singular values above tol * largest."""
    matrix = taylor_matrix(family, bound)
    singulars = np.linalg.svd(matrix, compute_uv=False)
    if singulars.size == 0 or singulars[0] == 0:
        return 0, singulars
    return int(np.sum(singulars > tol * singulars[0])), singulars


@dataclass(frozen=True)
class RankReport:
    degree: int
    direction_count: int
    plane_rank: int
    gpw_rank: int
    plane_singulars: tuple[float, ...]
    gpw_singulars: tuple[float, ...]

    @property
    def equal(self) -> bool:
        return self.plane_rank == self.gpw_rank

    def to_dict(self) -> dict:
        return {
            "degree": self.degree,
            "direction_count": self.direction_count,
            "plane_rank": self.plane_rank,
            "gpw_rank": self.gpw_rank,
            "equal": self.equal,
            "plane_singulars": list(self.plane_singulars),
            "gpw_singulars": list(self.gpw_singulars),
        }


def rank_comparison(
    gpw_family: Sequence[GpwFunction],
    plane_family: Sequence[GpwFunction],
    tol: float = 1e-10,
) -> RankReport:
    """Ranks of a generalized family and its plane-wave reference on one direction set."""
    if len(gpw_family) != len(plane_family):
        raise ValueError("families must share the direction set")
    bound = max(phi.degree for phi in gpw_family)
    gpw_rank, gpw_sv = taylor_rank(gpw_family, bound, tol)
    plane_rank, plane_sv = taylor_rank(plane_family, bound, tol)
    return RankReport(
        degree=bound,
        direction_count=len(gpw_family),
        plane_rank=plane_rank,
        gpw_rank=gpw_rank,
        plane_singulars=tuple(float(s) for s in plane_sv),
        gpw_singulars=tuple(float(s) for s in gpw_sv),
    )


# -- manufactured problems -------------------------------------------------


@dataclass(frozen=True)
class ManufacturedProblem:
    """Helmholtz problem with the exact solution exp(g(x - center)).

    The wavenumber square is forced to -(Lap g + |grad g|^2), so the
    solution satisfies the operator identically wherever it is smooth.
    """

    center: tuple[float, ...]
    phase: GradedPoly
    kappa_sq: GradedPoly  # centered coordinates

    def solution(self, point: Sequence[float]) -> complex:
        offset = tuple(float(a) - b for a, b in zip(point, self.center))
        return cmath.exp(self.phase.evaluate(offset))

    def kappa_sq_field(self, point: Sequence[float]) -> complex:
        offset = tuple(float(a) - b for a, b in zip(point, self.center))
        return self.kappa_sq.evaluate(offset)

    @property
    def jet(self) -> CoefficientJet:
        return CoefficientJet(self.kappa_sq, field=self.kappa_sq_field)


def manufactured_helmholtz(
    g: GradedPoly, center: Sequence[float] | None = None
) -> ManufacturedProblem:
    center = tuple(center) if center is not None else (0.0,) * g.dim
    grad_sq = GradedPoly.zero(g.dim)
    for comp in g.gradient():
        grad_sq = grad_sq + comp.mul_truncated(comp, None)
    return ManufacturedProblem(center, g, -(g.laplacian() + grad_sq))


# -- sampling ---------------------------------------------------------------


def ring_points(
    center: Sequence[float], radius: float, count: int, offset: float = 0.0
) -> list[tuple[float, ...]]:
    cx, cy = center
    return [
        (
            cx + radius * math.cos(2.0 * math.pi * (i + offset) / count),
            cy + radius * math.sin(2.0 * math.pi * (i + offset) / count),
        )
        for i in range(count)
    ]


def shell_points(
    center: Sequence[float], radius: float, count: int
) -> list[tuple[float, ...]]:
    return [
        tuple(c + radius * d for c, d in zip(center, direction))
        for direction in unit_sphere_directions(count)
    ]


def sphere_points(
    dim: int, center: Sequence[float], radius: float, count: int, offset: float = 0.0
) -> list[tuple[float, ...]]:
    if dim == 2:
        return ring_points(center, radius, count, offset)
    if dim == 3:
        return shell_points(center, radius, count)
    raise ValueError(f"no sampling rule for dimension {dim}")


def fit_points(
    dim: int, center: Sequence[float], radius: float, family_size: int
) -> list[tuple[float, ...]]:
    """Surface samples (4x the family size) plus two interior shells and the center."""
    surface = 4 * family_size
    pts = sphere_points(dim, center, radius, surface)
    pts += sphere_points(dim, center, 2.0 * radius / 3.0, 2 * family_size, offset=0.5)
    pts += sphere_points(dim, center, radius / 3.0, family_size, offset=0.25)
    pts.append(tuple(float(c) for c in center))
    return pts


def ball_points(
    dim: int, center: Sequence[float], radius: float, family_size: int, shells: int = 10
) -> list[tuple[float, ...]]:
    """Dense closed-ball sample, roughly ten times the fit grid."""
    per_shell = 7 * family_size + 3
    pts: list[tuple[float, ...]] = [tuple(float(c) for c in center)]
    for j in range(1, shells + 1):
        pts += sphere_points(dim, center, radius * j / shells, per_shell, offset=0.37)
    return pts


# -- least-squares fits ------------------------------------------------------


@dataclass(frozen=True)
class FitResult:
    error: float
    fit_rank: int
    family_size: int
    degenerate: bool


def family_fit_error(
    solution: Callable[[Sequence[float]], complex],
    family: Sequence[GpwFunction],
    radius: float,
    svd_cutoff: float = 1e-12,
) -> FitResult:
    """Max deviation on the closed ball of a least-squares fit of the family.

    The fit minimizes the discrete l2 misfit on the fit grid with
    truncated-SVD regularization; the reported error is the sup over a
    roughly ten-times denser ball sample, so it upper-bounds the best
    achievable sup-norm error of the family on that ball.
    """
    if not family:
        raise ValueError("family is empty")
    if radius <= 0:
        raise ValueError("radius must be positive")
    dim = family[0].phase.dim
    center = family[0].center
    grid = fit_points(dim, center, radius, len(family))
    matrix = np.array([[phi(x) for phi in family] for x in grid], dtype=complex)
    values = np.array([solution(x) for x in grid], dtype=complex)
    left, singulars, right_h = np.linalg.svd(matrix, full_matrices=False)
    if singulars.size == 0 or singulars[0] == 0:
        raise ValueError("degenerate sampling: zero fit matrix")
    keep = singulars > svd_cutoff * singulars[0]
    rank = int(np.sum(keep))
    if rank == 0:
        raise ValueError("degenerate sampling: fit matrix has numerical rank 0")
    coefficients = right_h[:rank].conj().T @ (
        (left[:, :rank].conj().T @ values) / singulars[:rank]
    )
    dense = ball_points(dim, center, radius, len(family))
    dense_matrix = np.array([[phi(x) for phi in family] for x in dense], dtype=complex)
    dense_values = np.array([solution(x) for x in dense], dtype=complex)
    error = float(np.max(np.abs(dense_values - dense_matrix @ coefficients)))
    degenerate = rank < min(len(family), len(grid))
    return FitResult(error, rank, len(family), degenerate)


# -- slope studies ------------------------------------------------------------


@dataclass(frozen=True)
class DecayReport:
    """Measured decay of an error quantity over shrinking radii."""

    label: str
    degree: int
    expected_order: float
    entries: tuple[tuple[float, float], ...]
    pair_slopes: tuple[float, ...]
    slope: float
    threshold: float
    exact: bool
    monotone: bool
    metadata: Mapping[str, object] = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return self.exact or self.slope >= self.threshold

    def to_dict(self) -> dict:
        return {
            "label": self.label,
            "degree": self.degree,
            "expected_order": self.expected_order,
            "entries": [[h, e] for h, e in self.entries],
            "pair_slopes": list(self.pair_slopes),
            "slope": None if math.isnan(self.slope) else self.slope,
            "threshold": self.threshold,
            "exact": self.exact,
            "monotone": self.monotone,
            "passed": self.passed,
            "metadata": dict(self.metadata),
        }

    def csv_rows(self) -> list[tuple[float, float, float | None]]:
        rows: list[tuple[float, float, float | None]] = []
        for i, (h, e) in enumerate(self.entries):
            slope = self.pair_slopes[i - 1] if 1 <= i <= len(self.pair_slopes) else None
            rows.append((h, e, slope))
        return rows


def _fit_slopes(
    radii: Sequence[float], errors: Sequence[float], floor: float
) -> tuple[tuple[float, ...], float, bool]:
    """Adjacent and global log-log slopes; exact flag when all errors sit at the floor."""
    if all(e <= floor for e in errors):
        return (), float("nan"), True
    usable = [(h, max(e, floor)) for h, e in zip(radii, errors)]
    pair = tuple(
        math.log(e0 / e1) / math.log(h0 / h1)
        for (h0, e0), (h1, e1) in zip(usable, usable[1:])
    )
    logs_h = [math.log(h) for h, _ in usable]
    logs_e = [math.log(e) for _, e in usable]
    mean_h = sum(logs_h) / len(logs_h)
    mean_e = sum(logs_e) / len(logs_e)
    denom = sum((x - mean_h) ** 2 for x in logs_h)
    slope = sum((x - mean_h) * (y - mean_e) for x, y in zip(logs_h, logs_e)) / denom
    return pair, slope, False


def _check_radii(radii: Sequence[float], minimum: int) -> tuple[float, ...]:
    radii = tuple(float(h) for h in radii)
    if len(radii) < minimum:
        raise ValueError(f"need at least {minimum} radii")
    if any(h <= 0 for h in radii) or any(a <= b for a, b in zip(radii, radii[1:])):
        raise ValueError("radii must be positive and strictly decreasing")
    return radii


def convergence_study(
    solution: Callable[[Sequence[float]], complex],
    family: Sequence[GpwFunction],
    radii: Sequence[float],
    expected_order: float | None = None,
    slack: float = 0.25,
    metadata: Mapping[str, object] | None = None,
) -> DecayReport:
    """Best-approximation errors on shrinking balls with fitted slopes.

    Passes when the global log-log slope reaches the expected order minus
    the slack, or when every error already sits at the rounding floor.
    """
    radii = _check_radii(radii, 4)
    degree = max(phi.degree for phi in family)
    if expected_order is None:
        expected_order = degree + 1
    errors = [family_fit_error(solution, family, h).error for h in radii]
    scale = max(
        1.0,
        max(abs(solution(x)) for x in ball_points(family[0].phase.dim, family[0].center, radii[0], 1)),
    )
    pair, slope, exact = _fit_slopes(radii, errors, 1e-12 * scale)
    monotone = all(a >= b for a, b in zip(errors, errors[1:]))
    return DecayReport(
        label="best-approximation",
        degree=degree,
        expected_order=float(expected_order),
        entries=tuple(zip(radii, errors)),
        pair_slopes=pair,
        slope=slope,
        threshold=float(expected_order) - slack,
        exact=exact,
        monotone=monotone,
        metadata=dict(metadata or {}),
    )


# -- residual order -----------------------------------------------------------


def helmholtz_residual_exact(
    phi: GpwFunction, kappa_sq: GradedPoly, offset: Sequence[float]
) -> complex:
    """Helmholtz operator applied to the function at center + offset, exactly.

    Valid when the wavenumber square is polynomial (centered coordinates):
    the image of the exponential is then an exact polynomial times the
    exponential, with no truncation anywhere.
    """
    phase = phi.phase
    grad_sq = GradedPoly.zero(phase.dim)
    for comp in phase.gradient():
        grad_sq = grad_sq + comp.mul_truncated(comp, None)
    symbol = phase.laplacian() + grad_sq + kappa_sq
    return symbol.evaluate(offset) * cmath.exp(phase.evaluate(offset))


def helmholtz_residual_fd(
    phi: GpwFunction,
    kappa_sq_field: Callable[[Sequence[float]], complex],
    point: Sequence[float],
    step: float,
) -> complex:
    """Second-order central-difference Laplacian plus the coefficient term."""
    if step < 1e-6:
        step = 1e-6  # below this the difference quotient is roundoff-dominated
    total = 0j
    center_value = phi(point)
    for axis in range(len(point)):
        plus = list(point)
        minus = list(point)
        plus[axis] += step
        minus[axis] -= step
        total += (phi(plus) - 2.0 * center_value + phi(minus)) / step**2
    return total + kappa_sq_field(point) * center_value


def residual_order_study(
    phi: GpwFunction,
    kappa_sq: GradedPoly | Callable[[Sequence[float]], complex],
    radii: Sequence[float],
    expected_order: float | None = None,
    slack: float = 0.25,
    samples: int = 48,
    method: str = "auto",
    metadata: Mapping[str, object] | None = None,
) -> DecayReport:
    """Decay of max |L phi| on spheres of shrinking radius around the center.

    ``kappa_sq`` is either the centered polynomial coefficient (exact
    differentiation) or a callable field on global coordinates
    (finite differences with step radius * 1e-3).
    """
    radii = _check_radii(radii, 2)
    if expected_order is None:
        expected_order = phi.degree - 1
    if method == "auto":
        method = "exact" if isinstance(kappa_sq, GradedPoly) else "fd"
    if method == "exact" and not isinstance(kappa_sq, GradedPoly):
        raise ValueError("exact method needs a polynomial coefficient")

    dim = phi.phase.dim
    errors = []
    for h in radii:
        worst = 0.0
        for point in sphere_points(dim, phi.center, h, samples):
            if method == "exact":
                offset = tuple(a - b for a, b in zip(point, phi.center))
                value = helmholtz_residual_exact(phi, kappa_sq, offset)
            else:
                value = helmholtz_residual_fd(phi, kappa_sq, point, h * 1e-3)
            worst = max(worst, abs(value))
        errors.append(worst)
    pair, slope, exact = _fit_slopes(radii, errors, 1e-11)
    monotone = all(a >= b for a, b in zip(errors, errors[1:]))
    return DecayReport(
        label="residual-order",
        degree=phi.degree,
        expected_order=float(expected_order),
        entries=tuple(zip(radii, errors)),
        pair_slopes=pair,
        slope=slope,
        threshold=float(expected_order) - slack,
        exact=exact,
        monotone=monotone,
        metadata=dict(metadata or {}),
    )
