"""Sparse complex polynomial algebra in centered coordinates.

Polynomials live in coordinates X = x - center and are stored as sparse
mappings from exponent tuples to complex coefficients.  Every polynomial
decomposes uniquely into homogeneous layers by total degree; the rest of
the package manipulates those layers.  All operations allocate fresh
values and nothing is mutated after construction, so polynomials are safe
to share across concurrent tasks.
"""
from __future__ import annotations

import math
import operator
from dataclasses import dataclass
from typing import Iterable, Iterator, Mapping, Sequence

MultiIndex = tuple[int, ...]

Scalar = complex | float | int


def total_degree(index: MultiIndex) -> int:
    return sum(index)


def graded_lex_key(index: MultiIndex) -> tuple[int, MultiIndex]:
    """Deterministic total order: by total degree, then exponent tuple."""
    return (sum(index), index)


def monomials_of_degree(dim: int, degree: int) -> list[MultiIndex]:
    """All exponent tuples of one total degree, graded-lex ordered."""
    if degree < 0:
        return []
    if dim == 1:
        return [(degree,)]
    out: list[MultiIndex] = []
    for first in range(degree + 1):
        out.extend((first,) + rest for rest in monomials_of_degree(dim - 1, degree - first))
    return out


def monomials_up_to(dim: int, degree: int) -> list[MultiIndex]:
    out: list[MultiIndex] = []
    for n in range(degree + 1):
        out.extend(monomials_of_degree(dim, n))
    return out


def space_dimension(dim: int, degree: int) -> int:
    """Dimension of the polynomials of total degree <= degree."""
    if degree < 0:
        return 0
    return math.comb(degree + dim, dim)


def layer_dimension(dim: int, degree: int) -> int:
    """Dimension of the homogeneous polynomials of one total degree."""
    if degree < 0:
        return 0
    return math.comb(degree + dim - 1, dim - 1)


def _clean(dim: int, coeffs: Mapping[MultiIndex, Scalar]) -> dict[MultiIndex, complex]:
    clean: dict[MultiIndex, complex] = {}
    for index, value in coeffs.items():
        try:
            index = tuple(operator.index(e) for e in index)
        except TypeError as err:
            raise ValueError(f"bad exponent tuple {index!r}") from err
        if len(index) != dim or any(e < 0 for e in index):
            raise ValueError(f"bad exponent tuple {index!r} for dimension {dim}")
        value = complex(value)
        if value != 0:
            clean[index] = value
    return clean


@dataclass(frozen=True)
class HomogeneousPoly:
    """One graded layer: coefficients over exponents of a fixed total degree."""

    dim: int
    degree: int
    coeffs: Mapping[MultiIndex, complex]

    def __post_init__(self) -> None:
        if self.dim < 1:
            raise ValueError("dimension must be at least 1")
        if self.degree < 0:
            raise ValueError("degree must be non-negative")
        clean = _clean(self.dim, self.coeffs)
        for index in clean:
            if sum(index) != self.degree:
                raise ValueError(
                    f"exponent {index} has degree {sum(index)}, expected {self.degree}"
                )
        object.__setattr__(self, "coeffs", clean)

    @classmethod
    def zero(cls, dim: int, degree: int) -> "HomogeneousPoly":
        return cls(dim, degree, {})

    def __bool__(self) -> bool:
        return bool(self.coeffs)

    def __add__(self, other: "HomogeneousPoly") -> "HomogeneousPoly":
        if not isinstance(other, HomogeneousPoly):
            return NotImplemented
        if other.dim != self.dim or other.degree != self.degree:
            raise ValueError("layers must share dimension and degree")
        merged = dict(self.coeffs)
        for index, value in other.coeffs.items():
            merged[index] = merged.get(index, 0j) + value
        return HomogeneousPoly(self.dim, self.degree, merged)

    def __neg__(self) -> "HomogeneousPoly":
        return self.scaled(-1)

    def __sub__(self, other: "HomogeneousPoly") -> "HomogeneousPoly":
        return self + (-other)

    def scaled(self, factor: Scalar) -> "HomogeneousPoly":
        factor = complex(factor)
        return HomogeneousPoly(
            self.dim, self.degree, {j: factor * c for j, c in self.coeffs.items()}
        )

    def __mul__(self, factor: Scalar) -> "HomogeneousPoly":
        if isinstance(factor, (int, float, complex)):
            return self.scaled(factor)
        return NotImplemented

    __rmul__ = __mul__

    def max_abs(self) -> float:
        return max((abs(c) for c in self.coeffs.values()), default=0.0)

    def items_sorted(self) -> list[tuple[MultiIndex, complex]]:
        return sorted(self.coeffs.items(), key=lambda item: graded_lex_key(item[0]))

    def as_graded(self) -> "GradedPoly":
        return GradedPoly(self.dim, dict(self.coeffs))


@dataclass(frozen=True)
class GradedPoly:
    """Sparse polynomial, viewed as the direct sum of its homogeneous layers."""

    dim: int
    coeffs: Mapping[MultiIndex, complex]

    def __post_init__(self) -> None:
        if self.dim < 1:
            raise ValueError("dimension must be at least 1")
        object.__setattr__(self, "coeffs", _clean(self.dim, self.coeffs))

    # -- construction -------------------------------------------------

    @classmethod
    def zero(cls, dim: int) -> "GradedPoly":
        return cls(dim, {})

    @classmethod
    def constant(cls, dim: int, value: Scalar) -> "GradedPoly":
        return cls(dim, {(0,) * dim: complex(value)})

    @classmethod
    def variable(cls, dim: int, axis: int) -> "GradedPoly":
        if not 0 <= axis < dim:
            raise ValueError(f"axis {axis} out of range for dimension {dim}")
        index = tuple(1 if i == axis else 0 for i in range(dim))
        return cls(dim, {index: 1.0 + 0j})

    @classmethod
    def monomial(cls, dim: int, index: MultiIndex, value: Scalar = 1.0) -> "GradedPoly":
        return cls(dim, {tuple(index): complex(value)})

    @classmethod
    def from_layers(cls, layers: Iterable[HomogeneousPoly]) -> "GradedPoly":
        layers = list(layers)
        if not layers:
            raise ValueError("need at least one layer")
        dim = layers[0].dim
        merged: dict[MultiIndex, complex] = {}
        for layer in layers:
            if layer.dim != dim:
                raise ValueError("layers must share one dimension")
            for index, value in layer.coeffs.items():
                merged[index] = merged.get(index, 0j) + value
        return cls(dim, merged)

    # -- ring operations ----------------------------------------------

    def __bool__(self) -> bool:
        return bool(self.coeffs)

    def __add__(self, other: "GradedPoly") -> "GradedPoly":
        if not isinstance(other, GradedPoly):
            return NotImplemented
        if other.dim != self.dim:
            raise ValueError("dimension mismatch")
        merged = dict(self.coeffs)
        for index, value in other.coeffs.items():
            merged[index] = merged.get(index, 0j) + value
        return GradedPoly(self.dim, merged)

    def __neg__(self) -> "GradedPoly":
        return self.scaled(-1)

    def __sub__(self, other: "GradedPoly") -> "GradedPoly":
        if not isinstance(other, GradedPoly):
            return NotImplemented
        return self + (-other)

    def scaled(self, factor: Scalar) -> "GradedPoly":
        factor = complex(factor)
        return GradedPoly(self.dim, {j: factor * c for j, c in self.coeffs.items()})

    def __mul__(self, other: "GradedPoly | Scalar") -> "GradedPoly":
        if isinstance(other, (int, float, complex)):
            return self.scaled(other)
        if isinstance(other, GradedPoly):
            return self.mul_truncated(other, None)
        return NotImplemented

    def __rmul__(self, other: Scalar) -> "GradedPoly":
        if isinstance(other, (int, float, complex)):
            return self.scaled(other)
        return NotImplemented

    def mul_truncated(self, other: "GradedPoly", bound: int | None) -> "GradedPoly":
        """Product keeping only layers of total degree <= bound (None: exact)."""
        if other.dim != self.dim:
            raise ValueError("dimension mismatch")
        out: dict[MultiIndex, complex] = {}
        for ja, ca in self.coeffs.items():
            deg_a = sum(ja)
            if bound is not None and deg_a > bound:
                continue
            for jb, cb in other.coeffs.items():
                if bound is not None and deg_a + sum(jb) > bound:
                    continue
                key = tuple(a + b for a, b in zip(ja, jb))
                out[key] = out.get(key, 0j) + ca * cb
        return GradedPoly(self.dim, out)

    # -- grading ------------------------------------------------------

    @property
    def degree(self) -> int:
        """Total degree; -1 for the zero polynomial."""
        return max((sum(j) for j in self.coeffs), default=-1)

    def truncate(self, bound: int) -> "GradedPoly":
        """Keep layers 0..bound; negative bounds give the zero polynomial."""
        return GradedPoly(self.dim, {j: c for j, c in self.coeffs.items() if sum(j) <= bound})

    def layer(self, degree: int) -> HomogeneousPoly:
        return HomogeneousPoly(
            self.dim, degree, {j: c for j, c in self.coeffs.items() if sum(j) == degree}
        )

    def layers(self) -> Iterator[HomogeneousPoly]:
        for n in range(self.degree + 1):
            yield self.layer(n)

    # -- calculus -----------------------------------------------------

    def derive(self, index: MultiIndex) -> "GradedPoly":
        """Mixed partial derivative with multiplicities given by the exponent tuple."""
        index = tuple(index)
        if len(index) != self.dim:
            raise ValueError("dimension mismatch")
        out: dict[MultiIndex, complex] = {}
        for j, c in self.coeffs.items():
            if any(e < k for e, k in zip(j, index)):
                continue
            factor = 1
            for e, k in zip(j, index):
                for step in range(k):
                    factor *= e - step
            key = tuple(e - k for e, k in zip(j, index))
            out[key] = out.get(key, 0j) + factor * c
        return GradedPoly(self.dim, out)

    def partial(self, axis: int) -> "GradedPoly":
        return self.derive(tuple(1 if i == axis else 0 for i in range(self.dim)))

    def gradient(self) -> tuple["GradedPoly", ...]:
        return tuple(self.partial(i) for i in range(self.dim))

    def laplacian(self) -> "GradedPoly":
        out = GradedPoly.zero(self.dim)
        for i in range(self.dim):
            out = out + self.derive(tuple(2 if k == i else 0 for k in range(self.dim)))
        return out

    def hessian_entry(self, i: int, j: int) -> "GradedPoly":
        index = [0] * self.dim
        index[i] += 1
        index[j] += 1
        return self.derive(tuple(index))

    # -- evaluation and rebasing ---------------------------------------

    def evaluate(self, point: Sequence[Scalar]) -> complex:
        if len(point) != self.dim:
            raise ValueError("dimension mismatch")
        total = 0j
        for j, c in self.items_sorted():
            term = c
            for x, e in zip(point, j):
                if e:
                    term *= complex(x) ** e
            total += term
        return total

    def shifted(self, offset: Sequence[Scalar]) -> "GradedPoly":
        """Re-expand around a shifted origin: returns Q with Q(X) = P(X + offset)."""
        if len(offset) != self.dim:
            raise ValueError("dimension mismatch")
        out = GradedPoly.zero(self.dim)
        for j, c in self.items_sorted():
            term = GradedPoly.constant(self.dim, c)
            for axis, e in enumerate(j):
                if e == 0:
                    continue
                base = GradedPoly(
                    self.dim,
                    {
                        tuple(1 if i == axis else 0 for i in range(self.dim)): 1.0,
                        (0,) * self.dim: complex(offset[axis]),
                    },
                )
                for _ in range(e):
                    term = term.mul_truncated(base, None)
            out = out + term
        return out

    # -- inspection and serialization ----------------------------------

    def max_abs(self) -> float:
        return max((abs(c) for c in self.coeffs.values()), default=0.0)

    def items_sorted(self) -> list[tuple[MultiIndex, complex]]:
        return sorted(self.coeffs.items(), key=lambda item: graded_lex_key(item[0]))

    def to_records(self) -> list[dict]:
        """Graded-lex ordered list of {exponents, re, im} records."""
        return [
            {"exponents": list(j), "re": c.real, "im": c.imag}
            for j, c in self.items_sorted()
        ]

    @classmethod
    def from_records(cls, dim: int, records: Iterable[Mapping]) -> "GradedPoly":
        coeffs: dict[MultiIndex, complex] = {}
        for record in records:
            index = tuple(int(e) for e in record["exponents"])
            coeffs[index] = coeffs.get(index, 0j) + complex(
                float(record["re"]), float(record["im"])
            )
        return cls(dim, coeffs)


def coeff_distance(a: GradedPoly, b: GradedPoly) -> float:
    """Largest coefficient magnitude of a - b."""
    return (a - b).max_abs()
