import hypothesis.strategies as st
import numpy as np
from hypothesis import settings

from gpwlab.polycore import GradedPoly, monomials_of_degree

settings.register_profile("default", deadline=None)
settings.load_profile("default")

finite_coeffs = st.complex_numbers(
    max_magnitude=2.0, allow_nan=False, allow_infinity=False
)


@st.composite
def graded_polys(draw, dim=2, max_degree=4, max_terms=6):
    coeffs = {}
    for _ in range(draw(st.integers(0, max_terms))):
        degree = draw(st.integers(0, max_degree))
        index = draw(st.sampled_from(monomials_of_degree(dim, degree)))
        coeffs[index] = draw(finite_coeffs)
    return GradedPoly(dim, coeffs)


def random_points(rng: np.random.Generator, dim: int, count: int, scale: float = 1.0):
    return [tuple(rng.uniform(-scale, scale, dim)) for _ in range(count)]
