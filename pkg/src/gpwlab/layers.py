"""Layer-by-layer inversion of order-two principal parts.

A principal part here is a constant-coefficient second-order operator
with at least one pure second derivative present.  The variable carrying
that derivative is the pivot: monomials of each homogeneous layer split
into a free block (pivot exponent 0 or 1) and a solvable block (pivot
exponent >= 2), and the operator restricted to the solvable block is
inverted by forward substitution in powers of the pivot variable.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping

import numpy as np

from .polycore import (
    GradedPoly,
    HomogeneousPoly,
    MultiIndex,
    monomials_of_degree,
    monomials_up_to,
)


def _pure_second(dim: int, axis: int) -> MultiIndex:
    return tuple(2 if i == axis else 0 for i in range(dim))


@dataclass(frozen=True)
class PrincipalPart2:
    """Constant-coefficient operator sum(c_j * D^j) over exponents of total degree 2."""

    dim: int
    coeffs: Mapping[MultiIndex, complex]
    pivot: int

    def __post_init__(self) -> None:
        clean: dict[MultiIndex, complex] = {}
        for index, value in self.coeffs.items():
            index = tuple(index)
            if len(index) != self.dim or sum(index) != 2 or any(e < 0 for e in index):
                raise ValueError(f"exponent {index!r} is not a second-order derivative")
            value = complex(value)
            if value != 0:
                clean[index] = value
        object.__setattr__(self, "coeffs", clean)
        if not 0 <= self.pivot < self.dim:
            raise ValueError("pivot out of range")
        if self.pivot_coefficient == 0:
            raise ValueError("pure second derivative in the pivot variable must be nonzero")

    @property
    def pivot_coefficient(self) -> complex:
        return self.coeffs.get(_pure_second(self.dim, self.pivot), 0j)

    @classmethod
    def build(cls, dim: int, coeffs: Mapping[MultiIndex, complex], pivot: int | None = None) -> "PrincipalPart2":
        """Validate coefficients and pick the pivot with the largest pure second derivative."""
        if pivot is None:
            magnitudes = [abs(complex(coeffs.get(_pure_second(dim, k), 0))) for k in range(dim)]
            best = max(range(dim), key=lambda k: magnitudes[k])
            if magnitudes[best] == 0:
                raise ValueError("no variable carries a nonzero pure second derivative")
            pivot = best
        return cls(dim, coeffs, pivot)

    @classmethod
    def laplace(cls, dim: int) -> "PrincipalPart2":
        return cls.build(dim, {_pure_second(dim, i): 1.0 for i in range(dim)})

    def apply(self, poly: GradedPoly) -> GradedPoly:
        out = GradedPoly.zero(self.dim)
        for index, value in sorted(self.coeffs.items()):
            out = out + poly.derive(index).scaled(value)
        return out


@dataclass(frozen=True)
class LayerSplit:
    """Disjoint monomial bases of one layer: free (pivot exponent 0/1) and solvable (>= 2)."""

    layer: int
    free: tuple[MultiIndex, ...]
    solvable: tuple[MultiIndex, ...]


def split_layer(part: PrincipalPart2, layer: int) -> LayerSplit:
    if layer < 0:
        raise ValueError("layer must be non-negative")
    monomials = monomials_of_degree(part.dim, layer + 2)
    free = tuple(j for j in monomials if j[part.pivot] <= 1)
    solvable = tuple(j for j in monomials if j[part.pivot] >= 2)
    return LayerSplit(layer, free, solvable)


def solve_layer(part: PrincipalPart2, rhs: HomogeneousPoly) -> HomogeneousPoly:
    """Invert the principal part on the solvable block of one layer.

    Returns the unique q of degree rhs.degree + 2, supported on monomials
    with pivot exponent >= 2, such that part.apply(q) == rhs.  Writing
    q = sum_i q_i * t^i with t the pivot variable and q_i free of t, the
    t^i slice of the image couples q_{i+2} with derivatives of q_{i+1}
    and q_i only, so slices are solved for increasing i from q_0 = q_1 = 0:

        lead * (i+2)(i+1) q_{i+2} = b_i
            - sum_{pivot exponent 1} c_j (i+1) D^{j'} q_{i+1}
            - sum_{pivot exponent 0} c_j D^{j'} q_i

    where j' is j with the pivot entry removed and lead is the pure
    second-derivative coefficient in the pivot variable.
    """
    if rhs.dim != part.dim:
        raise ValueError("dimension mismatch")
    n = rhs.degree
    k = part.pivot
    lead = part.pivot_coefficient

    def erase_pivot(index: MultiIndex) -> MultiIndex:
        return tuple(0 if i == k else e for i, e in enumerate(index))

    rhs_slices: dict[int, GradedPoly] = {}
    for index, value in rhs.coeffs.items():
        i = index[k]
        piece = rhs_slices.get(i, GradedPoly.zero(part.dim))
        rhs_slices[i] = piece + GradedPoly.monomial(part.dim, erase_pivot(index), value)

    zero = GradedPoly.zero(part.dim)
    slices: dict[int, GradedPoly] = {0: zero, 1: zero}
    for i in range(n + 1):
        acc = rhs_slices.get(i, zero)
        for index, value in sorted(part.coeffs.items()):
            if index[k] == 1:
                acc = acc - slices[i + 1].derive(erase_pivot(index)).scaled(value * (i + 1))
            elif index[k] == 0:
                acc = acc - slices[i].derive(erase_pivot(index)).scaled(value)
        slices[i + 2] = acc.scaled(1.0 / (lead * (i + 2) * (i + 1)))

    coeffs: dict[MultiIndex, complex] = {}
    for i in range(2, n + 3):
        for index, value in slices[i].coeffs.items():
            key = tuple(i if axis == k else e for axis, e in enumerate(index))
            coeffs[key] = value
    return HomogeneousPoly(part.dim, n + 2, coeffs)


def operator_matrix(part: PrincipalPart2, degree: int) -> np.ndarray:
    """Matrix of the principal part from degree <= degree to degree <= degree - 2,
    in graded-lex monomial bases."""
    columns = monomials_up_to(part.dim, degree)
    rows = monomials_up_to(part.dim, degree - 2)
    row_of = {index: i for i, index in enumerate(rows)}
    matrix = np.zeros((len(rows), len(columns)), dtype=complex)
    for c, index in enumerate(columns):
        image = part.apply(GradedPoly.monomial(part.dim, index))
        for out_index, value in image.coeffs.items():
            matrix[row_of[out_index], c] = value
    return matrix


def kernel_dimension(part: PrincipalPart2, degree: int, tol: float = 1e-10) -> int:
    """Numerical null-space dimension of the principal part on degree <= degree."""
    matrix = operator_matrix(part, degree)
    if matrix.shape[0] == 0:
        return matrix.shape[1]
    singulars = np.linalg.svd(matrix, compute_uv=False)
    rank = int(np.sum(singulars > tol * singulars[0])) if singulars.size else 0
    return matrix.shape[1] - rank
