import cmath

import numpy as np
import pytest

from gpwlab.frame import random_poly, verify_split
from gpwlab.operators import (
    CoefficientJet,
    convected_principal_apply,
    convected_residual_at,
    helmholtz_image,
    make_convected_split,
    make_helmholtz_split,
    omode_kappa_sq,
    principal_sqrt,
)
from gpwlab.polycore import GradedPoly

X = GradedPoly.variable(2, 0)
Y = GradedPoly.variable(2, 1)


def plane_phase(dim, kappa, direction):
    coeffs = {
        tuple(1 if i == axis else 0 for i in range(dim)): 1j * kappa * c
        for axis, c in enumerate(direction)
        if c != 0
    }
    return GradedPoly(dim, coeffs)


class TestPrincipalSqrt:
    def test_positive(self):
        assert principal_sqrt(4.0) == 2.0

    def test_negative_goes_to_upper_imaginary(self):
        assert principal_sqrt(-4.0) == 2j

    def test_complex_keeps_nonnegative_real_part(self):
        for value in (3 + 4j, -3 + 4j, -3 - 4j, 3 - 4j, -1.0, 1.0):
            root = principal_sqrt(value)
            assert root.real >= 0
            assert abs(root * root - value) < 1e-14 * max(1.0, abs(value))


class TestHelmholtzImage:
    def test_dispersion_matched_plane_phase(self):
        phase = plane_phase(2, 5.0, (0.6, 0.8))
        image = helmholtz_image(phase, GradedPoly.constant(2, 25.0), 2)
        assert image.max_abs() <= 1e-13 * 25.0

    def test_pure_square_phase(self):
        image = helmholtz_image(X * X, GradedPoly.zero(2), 2)
        assert image.coeffs == {(0, 0): 2 + 0j, (2, 0): 4 + 0j}

    def test_zero_phase_returns_coefficient(self):
        kappa_sq = GradedPoly(2, {(0, 0): 9.0, (1, 0): 0.3})
        image = helmholtz_image(GradedPoly.zero(2), kappa_sq, 1)
        assert image == kappa_sq

    def test_degree_bound_enforced(self):
        with pytest.raises(ValueError):
            helmholtz_image(GradedPoly(2, {(5, 0): 1.0}), GradedPoly.zero(2), 2)


class TestHelmholtzSplit:
    def test_constant_wavenumber_target(self):
        split = make_helmholtz_split(GradedPoly.constant(2, 25.0), 2)
        assert split.layer_count == 1
        assert split.rhs == GradedPoly.constant(2, -25.0)

    def test_affine_wavenumber_target(self):
        kappa_sq = GradedPoly(2, {(0, 0): 9.0, (1, 0): 0.7})
        split = make_helmholtz_split(kappa_sq, 3)
        assert split.rhs == -kappa_sq

    def test_random_jet_hypotheses_pass(self):
        rng = np.random.default_rng(21)
        kappa_sq = random_poly(rng, 2, 3) + GradedPoly.constant(2, 4.0)
        split = make_helmholtz_split(kappa_sq, 5)
        assert verify_split(split, trials=10, seed=1).passed

    def test_truncated_jet_rejected_when_too_short(self):
        jet = CoefficientJet(GradedPoly.constant(2, 4.0), valid_degree=1)
        with pytest.raises(ValueError):
            make_helmholtz_split(jet, 5)
        make_helmholtz_split(jet, 3)  # degree 1 data suffices for bound 1

    def test_degenerate_degree_one_split(self):
        split = make_helmholtz_split(GradedPoly.constant(2, 4.0), 1)
        assert split.layer_count == 0
        assert not split.rhs
        assert not split.remainder(X * X + Y)

    def test_zero_phase_residual_is_minus_target(self):
        split = make_helmholtz_split(GradedPoly.constant(2, 25.0), 4)
        residual = split.residual(GradedPoly.zero(2))
        assert residual == GradedPoly.constant(2, 25.0)

    def test_split_residual_matches_image_oracle(self):
        # split route (principal + remainder - rhs) against the direct assembly
        rng = np.random.default_rng(12)
        kappa_sq = random_poly(rng, 2, 2) + GradedPoly.constant(2, 7.0)
        split = make_helmholtz_split(kappa_sq, 4)
        for _ in range(20):
            phase = random_poly(rng, 2, 4)
            via_split = split.residual(phase)
            via_image = helmholtz_image(phase, kappa_sq, 2)
            assert (via_split - via_image).max_abs() <= 1e-12 * max(
                1.0, via_image.max_abs()
            )


class TestHelmholtzRemainderStructure:
    def test_degree_shift_is_doubled(self):
        # input on phase layers >= n+2 puts the gradient square on layers >= 2n+2
        rng = np.random.default_rng(40)
        degree = 6
        split = make_helmholtz_split(GradedPoly.constant(2, 1.0), degree)
        for n in range(degree - 1):
            poly = random_poly(rng, 2, degree, min_degree=n + 2)
            image = split.remainder(poly)
            assert image.truncate(2 * n + 1).max_abs() <= 1e-14 * max(1.0, poly.max_abs())

    def test_projection_locality_prefix_depth(self):
        # image layer n only sees phase layers up to n+1
        rng = np.random.default_rng(41)
        degree = 6
        split = make_helmholtz_split(GradedPoly.constant(2, 1.0), degree)
        full = random_poly(rng, 2, degree)
        image = split.remainder(full)
        for n in range(degree - 1):
            prefix = full.truncate(n + 1)
            gap = image.layer(n) - split.remainder(prefix).layer(n)
            assert gap.max_abs() <= 1e-12 * max(1.0, image.max_abs())


class TestConvectedPrincipal:
    def test_zero_velocity_reduces_to_scaled_laplacian(self):
        rng = np.random.default_rng(2)
        poly = random_poly(rng, 2, 4)
        got = convected_principal_apply(poly, 1.7, (0.0, 0.0))
        assert (got - poly.laplacian().scaled(1.7)).max_abs() <= 1e-14

    def test_sonic_algebraic_identity(self):
        # with the flow aligned to the axis, the pure second derivative cancels
        got = convected_principal_apply(X * X, 1.0, (1.0, 0.0))
        assert not got

    def test_cross_term(self):
        got = convected_principal_apply(X.mul_truncated(Y, None), 1.0, (0.3, -0.5))
        assert got.coeffs == {(0, 0): pytest.approx(2 * 0.3 * 0.5)}


class TestConvectedSplit:
    def test_supersonic_rejected(self):
        rho = CoefficientJet.constant(2, 1.0)
        mach = [CoefficientJet.constant(2, 0.9), CoefficientJet.constant(2, 0.8)]
        with pytest.raises(ValueError):
            make_convected_split(rho, mach, 2.0, 3)

    def test_zero_density_rejected(self):
        rho = CoefficientJet.constant(2, 0.0)
        mach = [CoefficientJet.constant(2, 0.0)] * 2
        with pytest.raises(ValueError):
            make_convected_split(rho, mach, 2.0, 3)

    def test_dispersion_matched_phase_is_exact(self):
        rho0, mach0, kappa = 1.4, (0.35, -0.15), 3.0
        split = make_convected_split(
            CoefficientJet.constant(2, rho0),
            [CoefficientJet.constant(2, m) for m in mach0],
            kappa,
            4,
        )
        direction = (0.8, 0.6)
        wavenumber = split.dispersion_wavenumber(direction)
        along = sum(m * d for m, d in zip(mach0, direction))
        assert wavenumber == pytest.approx(kappa / (1 + along))
        phase = plane_phase(2, wavenumber, direction)
        assert split.residual(phase).max_abs() <= 1e-12 * kappa**2

    def test_full_operator_finite_difference_oracle(self):
        # independent check of the constant-coefficient operator on the exact
        # exponential: every term evaluated from function samples only
        rho0, mach0, kappa = 1.2, (0.3, -0.2), 4.0
        split = make_convected_split(
            CoefficientJet.constant(2, rho0),
            [CoefficientJet.constant(2, m) for m in mach0],
            kappa,
            3,
        )
        direction = (0.6, 0.8)
        wavenumber = split.dispersion_wavenumber(direction)

        def phi(point):
            return cmath.exp(1j * wavenumber * (direction[0] * point[0] + direction[1] * point[1]))

        def operator_fd(point, step=1e-4):
            x, y = point
            lap = (
                phi((x + step, y)) - 2 * phi((x, y)) + phi((x - step, y))
                + phi((x, y + step)) - 2 * phi((x, y)) + phi((x, y - step))
            ) / step**2
            along2 = (
                phi((x + step * mach0[0], y + step * mach0[1]))
                - 2 * phi((x, y))
                + phi((x - step * mach0[0], y - step * mach0[1]))
            ) / step**2
            along1 = (
                phi((x + step * mach0[0], y + step * mach0[1]))
                - phi((x - step * mach0[0], y - step * mach0[1]))
            ) / (2 * step)
            return rho0 * (lap - along2 + 2j * kappa * along1 + kappa**2 * phi((x, y)))

        rng = np.random.default_rng(6)
        for point in rng.uniform(-0.4, 0.4, (10, 2)):
            assert abs(operator_fd(tuple(point))) <= 1e-4

    def test_exact_residual_helper_agrees_with_split(self):
        rho0, mach0, kappa = 1.1, (0.25, 0.1), 2.5
        split = make_convected_split(
            CoefficientJet.constant(2, rho0),
            [CoefficientJet.constant(2, m) for m in mach0],
            kappa,
            4,
        )
        direction = (0.0, 1.0)
        phase = plane_phase(2, split.dispersion_wavenumber(direction), direction)
        for point in ((0.1, 0.2), (-0.3, 0.05)):
            assert abs(convected_residual_at(phase, rho0, mach0, kappa, point)) <= 1e-12

    def test_reduces_to_helmholtz_without_flow(self):
        rng = np.random.default_rng(14)
        kappa = 3.0
        convected = make_convected_split(
            CoefficientJet.constant(2, 1.0),
            [CoefficientJet.constant(2, 0.0)] * 2,
            kappa,
            4,
        )
        plain = make_helmholtz_split(GradedPoly.constant(2, kappa**2), 4)
        assert (convected.rhs - plain.rhs).max_abs() <= 1e-14 * kappa**2
        for _ in range(50):
            poly = random_poly(rng, 2, 4)
            assert (convected.principal(poly) - plain.principal(poly)).max_abs() <= 1e-13
            assert (convected.remainder(poly) - plain.remainder(poly)).max_abs() <= 1e-13

    def test_variable_coefficients_pass_hypotheses(self):
        rho = CoefficientJet(
            GradedPoly(2, {(0, 0): 1.0, (1, 0): 0.1, (0, 1): -0.05, (1, 1): 0.02})
        )
        mach = [
            CoefficientJet(GradedPoly(2, {(0, 0): 0.2, (0, 1): 0.06})),
            CoefficientJet(GradedPoly(2, {(0, 0): -0.1, (1, 0): 0.04})),
        ]
        split = make_convected_split(rho, mach, 3.0, 4)
        assert verify_split(split, trials=10, seed=4).passed

    def test_operator_maps_into_image_degrees(self):
        rng = np.random.default_rng(16)
        split = make_convected_split(
            CoefficientJet(GradedPoly(2, {(0, 0): 1.0, (1, 0): 0.2})),
            [CoefficientJet.constant(2, 0.3), CoefficientJet.constant(2, 0.0)],
            2.0,
            4,
        )
        for _ in range(10):
            poly = random_poly(rng, 2, 4)
            for image in (split.principal(poly), split.remainder(poly), split.apply(poly)):
                assert image.degree <= 2


class TestJets:
    def test_from_polynomial_recenters(self):
        field = GradedPoly(2, {(2, 0): 1.0, (0, 1): -2.0, (0, 0): 0.5})
        jet = CoefficientJet.from_polynomial(field, (0.3, -0.2))
        rng = np.random.default_rng(9)
        for point in rng.uniform(-1, 1, (20, 2)):
            offset = (point[0] - 0.3, point[1] + 0.2)
            assert abs(jet.poly.evaluate(offset) - field.evaluate(point)) < 1e-12

    def test_constant_jet(self):
        jet = CoefficientJet.constant(3, 2 - 1j)
        assert jet.value_at_center() == 2 - 1j
        assert jet.field((9.0, 9.0, 9.0)) == 2 - 1j

    def test_omode_profile(self):
        profile = omode_kappa_sq(2, 10.0, 2.0)
        assert profile.evaluate((0.0, 0.0)) == 10.0
        assert profile.evaluate((2.0, 1.0)) == 0.0  # cut-off position
        assert profile.evaluate((4.0, 0.0)) == -10.0  # evanescent side

    def test_omode_needs_finite_cutoff(self):
        with pytest.raises(ValueError):
            omode_kappa_sq(2, 10.0, 0.0)
