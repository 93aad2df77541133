"""Graded operator splits and the layered construction of preimages.

An :class:`OperatorSplit` packages everything needed to solve T(x) = y for
a (possibly nonlinear) operator T acting between graded polynomial spaces:
a linear layer-respecting principal part, the nonlinear remainder, the
target polynomial, a per-layer solver that inverts the principal part on
the solvable block, and the free monomials of each layer.  Two independent
construction routes are provided: :func:`preimage` walks the layers from
the bottom, and :func:`right_inverse` sweeps the finite fixed-point form
of the same equations (finite because the remainder composed with the
solvers strictly raises the lowest occupied layer).  :func:`verify_split`
checks all structural hypotheses on random samples.
"""
from __future__ import annotations

from dataclasses import dataclass, replace
from typing import Callable, Sequence

import numpy as np

from .polycore import (
    GradedPoly,
    HomogeneousPoly,
    MultiIndex,
    monomials_of_degree,
    space_dimension,
)


class SplitContractError(ValueError):
    """Raised when inputs violate an operator split's structural contract."""


@dataclass(frozen=True)
class OperatorSplit:
    """Split T = principal + remainder over graded layers.

    ``layer_count`` is the number of target layers (degrees 0..layer_count-1
    of the image space); source layer n holds homogeneous polynomials of
    degree n + order.  Degrees below ``order`` form the pass-through block
    that the principal part annihilates.  ``solve_layer(n, b)`` must return
    a degree n + order polynomial, supported on the complement of
    ``free_monomials(n)``, whose principal image is b.
    """

    dim: int
    order: int
    layer_count: int
    principal: Callable[[GradedPoly], GradedPoly]
    remainder: Callable[[GradedPoly], GradedPoly]
    rhs: GradedPoly
    solve_layer: Callable[[int, HomogeneousPoly], HomogeneousPoly]
    free_monomials: Callable[[int], tuple[MultiIndex, ...]]
    dispersion_wavenumber: Callable[[Sequence[float]], complex] | None = None
    label: str = ""

    @property
    def last_layer(self) -> int:
        return self.layer_count - 1

    @property
    def source_degree(self) -> int:
        """Largest polynomial degree the construction produces."""
        return self.order + self.layer_count - 1

    def apply(self, poly: GradedPoly) -> GradedPoly:
        return self.principal(poly) + self.remainder(poly)

    def residual(self, poly: GradedPoly) -> GradedPoly:
        return self.apply(poly) - self.rhs

    def solve_all(self, target: GradedPoly) -> GradedPoly:
        """Apply the layer solvers to every layer of a target polynomial."""
        if target.degree > self.last_layer:
            raise SplitContractError(
                f"target degree {target.degree} exceeds top layer {self.last_layer}"
            )
        out = GradedPoly.zero(self.dim)
        for n in range(self.layer_count):
            piece = target.layer(n)
            if piece:
                out = out + self.solve_layer(n, piece).as_graded()
        return out

    def free_parameter_count(self) -> int:
        """Pass-through block dimension plus the free monomials of every layer."""
        count = space_dimension(self.dim, self.order - 1)
        for n in range(self.layer_count):
            count += len(self.free_monomials(n))
        return count


@dataclass(frozen=True)
class FreeParameters:
    """Free data of a preimage: the pass-through part and per-layer free components.

    ``base`` has degree < split.order and is reproduced verbatim on the low
    layers of the output; ``free[n]`` is supported on the free monomials of
    layer n and is reproduced verbatim on those coordinates.
    """

    base: GradedPoly
    free: tuple[HomogeneousPoly, ...]

    @classmethod
    def zeros(cls, split: OperatorSplit) -> "FreeParameters":
        return cls(
            GradedPoly.zero(split.dim),
            tuple(
                HomogeneousPoly.zero(split.dim, n + split.order)
                for n in range(split.layer_count)
            ),
        )

    def validate(self, split: OperatorSplit) -> None:
        if self.base.dim != split.dim:
            raise SplitContractError("base dimension mismatch")
        if self.base.degree > split.order - 1:
            raise SplitContractError(
                f"base degree {self.base.degree} exceeds {split.order - 1}"
            )
        if len(self.free) != split.layer_count:
            raise SplitContractError(
                f"expected {split.layer_count} free components, got {len(self.free)}"
            )
        for n, component in enumerate(self.free):
            if component.dim != split.dim or component.degree != n + split.order:
                raise SplitContractError(f"free component {n} has wrong degree")
            allowed = set(split.free_monomials(n))
            stray = set(component.coeffs) - allowed
            if stray:
                raise SplitContractError(
                    f"free component {n} uses non-free monomials {sorted(stray)}"
                )


def preimage(
    split: OperatorSplit,
    target: GradedPoly,
    params: FreeParameters | None = None,
) -> GradedPoly:
    """Construct x with split.apply(x) == target, layer by layer.

    The base passes through unchanged.  For each layer, the free component
    is injected and the layer solver supplies the solvable complement of
    whatever the target still requires once the remainder of the lower
    layers is accounted for.  The remainder only probes layers already
    fixed, which is exactly the prefix-locality hypothesis checked by
    :func:`verify_split`.
    """
    if params is None:
        params = FreeParameters.zeros(split)
    params.validate(split)
    if target.dim != split.dim:
        raise SplitContractError("target dimension mismatch")
    if target.degree > split.last_layer:
        raise SplitContractError(
            f"target degree {target.degree} exceeds top layer {split.last_layer}"
        )
    out = params.base
    for n in range(split.layer_count):
        component = params.free[n]
        need = target.layer(n) - split.remainder(out).layer(n)
        if component:
            need = need - split.principal(component.as_graded()).layer(n)
        piece = component + split.solve_layer(n, need)
        out = out + piece.as_graded()
    return out


def right_inverse(split: OperatorSplit, target: GradedPoly) -> GradedPoly:
    """Right inverse by the finite sweep x <- solve_all(target - remainder(x)).

    Starting from zero, each sweep pins one more layer of the fixed point:
    layer n of the remainder only sees layers below n, so layer_count
    sweeps reach the fixed point exactly and further sweeps change
    nothing.  When the remainder is linear, unrolling the sweeps gives
    the familiar finite alternating series of solve_all and -remainder
    (finite because remainder-after-solvers is nilpotent); for a
    nonlinear remainder the sweep form is the one that stays a right
    inverse, since expanding the series would drop the cross terms.
    """
    if target.dim != split.dim:
        raise SplitContractError("target dimension mismatch")
    if target.degree > split.last_layer:
        raise SplitContractError(
            f"target degree {target.degree} exceeds top layer {split.last_layer}"
        )
    out = GradedPoly.zero(split.dim)
    for _ in range(split.layer_count):
        out = split.solve_all(target - split.remainder(out))
    return out


# -- hypothesis verification -------------------------------------------


@dataclass(frozen=True)
class SplitCheck:
    check: str
    trials: int
    max_violation: float
    tolerance: float
    passed: bool

    def to_dict(self) -> dict:
        return {
            "check": self.check,
            "trials": self.trials,
            "max_violation": self.max_violation,
            "tolerance": self.tolerance,
            "passed": self.passed,
        }


@dataclass(frozen=True)
class SplitReport:
    label: str
    seed: int
    trials: int
    checks: tuple[SplitCheck, ...]

    @property
    def passed(self) -> bool:
        return all(check.passed for check in self.checks)

    def to_dict(self) -> dict:
        return {
            "label": self.label,
            "seed": self.seed,
            "trials": self.trials,
            "passed": self.passed,
            "checks": [check.to_dict() for check in self.checks],
        }


def random_poly(
    rng: np.random.Generator, dim: int, max_degree: int, min_degree: int = 0
) -> GradedPoly:
    """Dense random polynomial, coefficients uniform on the complex square [-1,1]^2."""
    coeffs: dict[MultiIndex, complex] = {}
    for n in range(min_degree, max_degree + 1):
        for index in monomials_of_degree(dim, n):
            re, im = rng.uniform(-1.0, 1.0, 2)
            coeffs[index] = complex(re, im)
    return GradedPoly(dim, coeffs)


def random_homogeneous(rng: np.random.Generator, dim: int, degree: int) -> HomogeneousPoly:
    coeffs: dict[MultiIndex, complex] = {}
    for index in monomials_of_degree(dim, degree):
        re, im = rng.uniform(-1.0, 1.0, 2)
        coeffs[index] = complex(re, im)
    return HomogeneousPoly(dim, degree, coeffs)


def _rel(deviation: float, scale: float) -> float:
    return deviation / max(scale, 1.0)


def verify_split(
    split: OperatorSplit,
    trials: int = 50,
    seed: int = 0,
    tolerance: float = 1e-12,
    nilpotency_tolerance: float = 1e-13,
) -> SplitReport:
    """Check the structural hypotheses of a split on seeded random samples.

    Covers: linearity and layer action of the principal part, the
    right-inverse identity of the layer solvers, annihilation of the
    low-degree pass-through block, the layer shift and top-layer
    annihilation of the remainder, nilpotency of remainder-after-solvers,
    and prefix locality of the remainder's layer projections.  Failures
    are recorded in the report, never raised.
    """
    if trials < 1:
        raise ValueError("need at least one trial")
    rng = np.random.default_rng(seed)
    s = split.last_layer
    top = split.source_degree
    violations = {
        "principal_linear": 0.0,
        "principal_layer_map": 0.0,
        "principal_right_inverse": 0.0,
        "principal_kills_low_degree": 0.0,
        "remainder_degree_shift": 0.0,
        "remainder_top_zero": 0.0,
        "remainder_nilpotent": 0.0,
        "remainder_prefix_local": 0.0,
    }

    for _ in range(trials):
        # linearity of the principal part
        p = random_poly(rng, split.dim, top)
        q = random_poly(rng, split.dim, top)
        alpha = complex(*rng.uniform(-1.0, 1.0, 2))
        lhs = split.principal(p + q.scaled(alpha))
        rhs = split.principal(p) + split.principal(q).scaled(alpha)
        violations["principal_linear"] = max(
            violations["principal_linear"],
            _rel((lhs - rhs).max_abs(), max(lhs.max_abs(), rhs.max_abs())),
        )

        # layer action, right-inverse identity
        for n in range(split.layer_count):
            h = random_homogeneous(rng, split.dim, n + split.order)
            image = split.principal(h.as_graded())
            off_layer = image - image.layer(n).as_graded()
            violations["principal_layer_map"] = max(
                violations["principal_layer_map"],
                _rel(off_layer.max_abs(), image.max_abs()),
            )
            b = random_homogeneous(rng, split.dim, n)
            solved = split.solve_layer(n, b)
            back = split.principal(solved.as_graded()).layer(n)
            violations["principal_right_inverse"] = max(
                violations["principal_right_inverse"],
                _rel((back - b).max_abs(), b.max_abs()),
            )

        # annihilation of the pass-through block
        low = random_poly(rng, split.dim, split.order - 1)
        violations["principal_kills_low_degree"] = max(
            violations["principal_kills_low_degree"],
            _rel(split.principal(low).max_abs(), low.max_abs()),
        )

        # remainder layer shift: input on source layers >= n maps to image layers > n
        for n in range(split.layer_count - 1):
            poly = random_poly(rng, split.dim, top, min_degree=n + split.order)
            image = split.remainder(poly)
            low_part = image.truncate(n)
            violations["remainder_degree_shift"] = max(
                violations["remainder_degree_shift"],
                _rel(low_part.max_abs(), max(image.max_abs(), poly.max_abs())),
            )
        if split.layer_count > 0:
            top_input = random_homogeneous(rng, split.dim, top).as_graded()
            violations["remainder_top_zero"] = max(
                violations["remainder_top_zero"],
                _rel(split.remainder(top_input).max_abs(), top_input.max_abs()),
            )

        # nilpotency of remainder-after-solvers, on unit-normalized input
        if split.layer_count > 0:
            y = random_poly(rng, split.dim, s)
            scale = y.max_abs()
            if scale > 0:
                y = y.scaled(1.0 / scale)
            for _ in range(split.layer_count):
                y = split.remainder(split.solve_all(y.truncate(s)))
            violations["remainder_nilpotent"] = max(
                violations["remainder_nilpotent"], y.max_abs()
            )

        # prefix locality of the remainder's layer projections
        base = random_poly(rng, split.dim, split.order - 1)
        pieces = [
            random_homogeneous(rng, split.dim, n + split.order).as_graded()
            for n in range(split.layer_count)
        ]
        full = base
        for piece in pieces:
            full = full + piece
        image_full = split.remainder(full)
        prefix = base
        for n in range(split.layer_count):
            image_prefix = split.remainder(prefix)
            gap = image_full.layer(n) - image_prefix.layer(n)
            violations["remainder_prefix_local"] = max(
                violations["remainder_prefix_local"],
                _rel(gap.max_abs(), max(image_full.max_abs(), full.max_abs())),
            )
            prefix = prefix + pieces[n]

    checks = []
    for name, worst in violations.items():
        tol = nilpotency_tolerance if name == "remainder_nilpotent" else tolerance
        checks.append(SplitCheck(name, trials, worst, tol, worst <= tol))
    return SplitReport(split.label, seed, trials, tuple(checks))


def corrupted(split: OperatorSplit) -> OperatorSplit:
    """Split with the remainder replaced by the principal part.

    Negative control for :func:`verify_split`: the replacement maps each
    source layer to the image layer of the same index instead of raising
    it, so the degree-shift check must fail.
    """
    return replace(split, remainder=split.principal)
