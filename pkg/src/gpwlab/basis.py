"""Direction families and construction of generalized plane waves.

A generalized plane wave is exp(P(x - center)) with a polynomial phase P
whose linear part mimics a plane wave and whose higher layers are the
corrections produced by the layered construction.  Each built function
carries the certificate that its phase satisfies the truncated operator
equation.
"""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence

from .frame import FreeParameters, OperatorSplit, preimage
from .polycore import GradedPoly

UNIT_NORM_TOL = 1e-14

GOLDEN_ANGLE = math.pi * (3.0 - math.sqrt(5.0))


class CertificateError(RuntimeError):
    """Raised when a built phase fails its truncated-operator certificate."""


def unit_circle_directions(count: int) -> list[tuple[float, float]]:
    """Equispaced unit vectors at angles 2*pi*l/count."""
    if count < 1:
        raise ValueError("need at least one direction")
    return [
        (math.cos(2.0 * math.pi * step / count), math.sin(2.0 * math.pi * step / count))
        for step in range(count)
    ]


def unit_sphere_directions(count: int) -> list[tuple[float, float, float]]:
    """Deterministic quasi-uniform unit vectors (golden-angle spiral, poles included)."""
    if count < 1:
        raise ValueError("need at least one direction")
    if count == 1:
        return [(0.0, 0.0, 1.0)]
    points = []
    for step in range(count):
        z = 1.0 - 2.0 * step / (count - 1)
        radius = math.sqrt(max(0.0, 1.0 - z * z))
        azimuth = GOLDEN_ANGLE * step
        vec = (radius * math.cos(azimuth), radius * math.sin(azimuth), z)
        norm = math.sqrt(sum(c * c for c in vec))
        points.append(tuple(c / norm for c in vec))
    return points


def directions(dim: int, count: int) -> list[tuple[float, ...]]:
    if dim == 2:
        return unit_circle_directions(count)
    if dim == 3:
        return unit_sphere_directions(count)
    raise ValueError(f"no direction family for dimension {dim}")


def _check_unit(direction: Sequence[complex]) -> tuple[complex, ...]:
    """Validate a propagation direction; complex entries model evanescent waves.

    The unit constraint is the bilinear one, sum(d_i^2) = 1: it reduces to
    the Euclidean norm for real vectors and is what makes a linear phase
    close the lowest-layer equation.
    """
    direction = tuple(complex(c) for c in direction)
    if all(c.imag == 0.0 for c in direction):
        direction = tuple(c.real for c in direction)
    norm = cmath.sqrt(sum(c * c for c in direction))
    if abs(norm - 1.0) > UNIT_NORM_TOL:
        raise ValueError(f"direction norm {norm!r} is not 1")
    return direction


def linear_phase(dim: int, wavenumber: complex, direction: Sequence[complex]) -> GradedPoly:
    """i * wavenumber * (direction . X), the classical plane-wave phase."""
    coeffs = {}
    for axis, component in enumerate(direction):
        if component != 0.0:
            index = tuple(1 if i == axis else 0 for i in range(dim))
            coeffs[index] = 1j * complex(wavenumber) * component
    return GradedPoly(dim, coeffs)


@dataclass(frozen=True)
class GpwFunction:
    """x -> exp(phase(x - center)); phase(0) = 0 so the value at the center is 1."""

    center: tuple[float, ...]
    phase: GradedPoly
    degree: int
    direction: tuple[complex, ...]  # real for propagating, complex for evanescent
    operator: str
    residual_norm: float

    def __call__(self, point: Sequence[float]) -> complex:
        offset = tuple(float(a) - b for a, b in zip(point, self.center))
        if len(offset) != self.phase.dim:
            raise ValueError("dimension mismatch")
        return cmath.exp(self.phase.evaluate(offset))

    def at_offset(self, offset: Sequence[float]) -> complex:
        """Evaluate in centered coordinates X = x - center."""
        return cmath.exp(self.phase.evaluate(offset))


def certificate_norm(split: OperatorSplit, phase: GradedPoly) -> float:
    """Sup-norm of the truncated-operator residual, relative to the equation scale."""
    residual = split.residual(phase)
    scale = max(
        1.0,
        split.rhs.max_abs(),
        split.principal(phase).max_abs(),
        split.remainder(phase).max_abs(),
    )
    return residual.max_abs() / scale


def build_gpw(
    split: OperatorSplit,
    direction: Sequence[complex],
    center: Sequence[float] | None = None,
    tol: float = 1e-11,
) -> GpwFunction:
    """Build the generalized plane wave for one propagation direction.

    The linear phase coefficients are i*k*direction with k from the
    split's dispersion data, the constant term is zero so the function is
    1 at the center, and all remaining free components are zero.  The
    residual certificate is recomputed after the construction; a residual
    above ``tol`` aborts with a diagnostic.
    """
    direction = _check_unit(direction)
    if len(direction) != split.dim:
        raise ValueError("direction dimension mismatch")
    if split.dispersion_wavenumber is None:
        raise ValueError("split carries no dispersion data for basis initialization")
    center = tuple(float(c) for c in center) if center is not None else (0.0,) * split.dim
    wavenumber = split.dispersion_wavenumber(direction)
    params = FreeParameters(
        base=linear_phase(split.dim, wavenumber, direction),
        free=FreeParameters.zeros(split).free,
    )
    phase = preimage(split, split.rhs, params)
    residual = certificate_norm(split, phase)
    if residual > tol:
        raise CertificateError(
            f"{split.label} phase for direction {direction} has residual "
            f"{residual:.3e} > {tol:.1e}"
        )
    return GpwFunction(
        center=center,
        phase=phase,
        degree=split.source_degree,
        direction=direction,
        operator=split.label,
        residual_norm=residual,
    )


def build_family(
    split: OperatorSplit,
    direction_set: Iterable[Sequence[float]],
    center: Sequence[float] | None = None,
    tol: float = 1e-11,
) -> list[GpwFunction]:
    return [build_gpw(split, d, center=center, tol=tol) for d in direction_set]


def plane_wave(
    dim: int,
    wavenumber: complex,
    direction: Sequence[complex],
    degree: int,
    center: Sequence[float] | None = None,
) -> GpwFunction:
    """Classical plane wave exp(i*k*direction.(x - center)) tagged with a degree."""
    direction = _check_unit(direction)
    center = tuple(float(c) for c in center) if center is not None else (0.0,) * dim
    return GpwFunction(
        center=center,
        phase=linear_phase(dim, wavenumber, direction),
        degree=degree,
        direction=direction,
        operator="plane_wave",
        residual_norm=0.0,
    )


def plane_wave_family(
    split: OperatorSplit,
    direction_set: Iterable[Sequence[float]],
    center: Sequence[float] | None = None,
) -> list[GpwFunction]:
    """Reference plane waves at the split's center wavenumber, same direction set."""
    if split.dispersion_wavenumber is None:
        raise ValueError("split carries no dispersion data")
    return [
        plane_wave(
            split.dim,
            split.dispersion_wavenumber(_check_unit(d)),
            d,
            split.source_degree,
            center=center,
        )
        for d in direction_set
    ]


def _direction_payload(direction: Sequence[complex]) -> list:
    """Real components as plain numbers, complex ones as [re, im] pairs."""
    return [
        c.real if isinstance(c, complex) and c.imag == 0.0 else
        ([c.real, c.imag] if isinstance(c, complex) else float(c))
        for c in direction
    ]


def _direction_from_payload(payload: Sequence) -> tuple[complex, ...]:
    out = []
    for c in payload:
        if isinstance(c, (list, tuple)):
            out.append(complex(float(c[0]), float(c[1])))
        else:
            out.append(float(c))
    return tuple(out)


def family_to_records(family: Iterable[GpwFunction]) -> list[dict]:
    """Basis file payload: one record per function, graded-lex phase coefficients."""
    return [
        {
            "direction": _direction_payload(phi.direction),
            "x0": list(phi.center),
            "p": phi.degree,
            "phase": phi.phase.to_records(),
            "residual_norm": phi.residual_norm,
        }
        for phi in family
    ]


def family_from_records(records: Iterable[Mapping]) -> list[GpwFunction]:
    family = []
    for record in records:
        direction = _direction_from_payload(record["direction"])
        center = tuple(float(c) for c in record["x0"])
        phase = GradedPoly.from_records(len(center), record["phase"])
        family.append(
            GpwFunction(
                center=center,
                phase=phase,
                degree=int(record["p"]),
                direction=direction,
                operator=str(record.get("operator", "")),
                residual_norm=float(record["residual_norm"]),
            )
        )
    return family
