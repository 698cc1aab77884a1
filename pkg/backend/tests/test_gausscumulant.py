from fractions import Fraction
from itertools import combinations_with_replacement, product
from math import prod

import numpy as np
import pytest
import sympy
from hypothesis import given, strategies as st

from app.core.errors import CapExceededError, SizeMismatchError
from app.models.forest import enumerate_forests, parse_forest
from app.models.partition import SetPartition
from app.models.polynomial import RationalPolynomial, parse_polynomial
from app.services.gausscumulant_service import (
    GaussCumulantService,
    random_polynomial,
    standard_covariance,
    wick_expectation,
)


@pytest.fixture(scope="module")
def service():
    return GaussCumulantService()


def test_wick_moments():
    """E Z^4 = 3, E Z1^2 Z2^2 = 1, odd moments vanish"""
    assert wick_expectation(parse_polynomial("x1^4"), standard_covariance) == 3
    assert wick_expectation(parse_polynomial("x1^2 x2^2"), standard_covariance) == 1
    assert wick_expectation(parse_polynomial("x1^3 + x1 x2"), standard_covariance) == 0
    assert wick_expectation(parse_polynomial("x1^6 - 2"), standard_covariance) == 13


def test_wick_keeps_parameters_symbolic():
    poly = parse_polynomial("x1^2 x2")
    result = wick_expectation(poly, standard_covariance, lambda var: var == ("x", 0))
    assert result == parse_polynomial("x2")


@pytest.mark.parametrize("k, expected", [(1, 1), (2, 2), (3, 8), (4, 48)])
def test_cumulants_of_chi_square(service, k, expected):
    """kappa_k(Z^2) = 2^(k-1) (k-1)!"""
    functions = [parse_polynomial("x1^2")] * k
    assert service.gaussian_joint_cumulant(functions, 1) == expected
    assert service.malliavin_check(functions, 1).passed


def test_covariances(service):
    assert service.gaussian_joint_cumulant([parse_polynomial("x1")] * 2, 1) == 1
    assert service.gaussian_joint_cumulant([parse_polynomial("x1"), parse_polynomial("x2")], 2) == 0
    assert service.gaussian_joint_cumulant([parse_polynomial("1")] * 2, 1) == 0


@pytest.mark.parametrize(
    "functions, n",
    [
        (["x1 x2", "x1^2", "x2^2"], 2),
        (["x1^3 - x1", "x1", "x1^2 + 1"], 1),
        (["x1 + x2", "x1 x2", "x2^2", "x1"], 2),
    ],
)
def test_tree_expansion_of_cumulants(service, functions, n):
    report = service.malliavin_check([parse_polynomial(f) for f in functions], n)
    assert report.passed, report


def test_tensor_product_dimension(service):
    with pytest.raises(SizeMismatchError):
        service.tensor_product([parse_polynomial("x2")], 1)


def test_forest_derivative_factor(service):
    """d/dQ(1,2) of q[1,2]^2 along the edge 1-2"""
    f = parse_polynomial("q[1,2]^2 q[2,3]")
    assert service.forest_derivative(parse_forest("1-2", 3), f) == parse_polynomial("2 q[1,2] q[2,3]")
    assert service.forest_derivative(parse_forest("1-2,2-3", 3), f) == parse_polynomial("2 q[1,2]")
    assert not service.forest_derivative(parse_forest("1-3", 3), f)


@pytest.mark.parametrize(
    "f, k",
    [("q[1,2]", 2), ("q[1,2]^2", 2), ("q[1,1] + 3 q[1,2]", 2), ("q[1,2]^2 q[2,3]", 3), ("q[1,3] q[2,3] - q[1,2]^3", 3)],
)
def test_forest_interpolation(service, f, k):
    report = service.bkar_check(parse_polynomial(f), k)
    assert report.passed, report
    assert service.connected_bkar_check(parse_polynomial(f), k).passed


def test_forest_interpolation_at_k2(service):
    report = service.bkar_check(parse_polynomial("q[1,2]"), 2)
    assert report.lhs == "1"
    assert report.rhs == "1"


def test_restricted_forest_interpolation(service):
    pi = SetPartition.from_blocks(3, [[0, 1], [2]])
    for f in ("q[1,2]", "q[1,2]^2 q[2,3]", "q[1,2] + q[3,3]"):
        assert service.generalized_bkar_check(parse_polynomial(f), 3, pi).passed


def test_connected_part(service):
    report = service.connected_bkar_check(parse_polynomial("q[1,2] q[2,3]"), 3)
    assert report.lhs == "1"
    assert report.passed


def test_forest_interpolation_caps(service):
    with pytest.raises(CapExceededError):
        service.bkar_check(parse_polynomial("q[1,2]"), 6)
    with pytest.raises(SizeMismatchError):
        service.bkar_check(parse_polynomial("q[1,3]"), 2)


def test_interpolation_integral(service):
    x1, sq = parse_polynomial("x1"), parse_polynomial("x1^2")
    assert service.interpolation_integral(x1, x1, 1) == 1
    assert service.interpolation_integral(sq, sq, 1) == 2
    assert service.interpolation_integral(x1, parse_polynomial("x2"), 2) == 0


@given(st.integers(0, 2 ** 32 - 1), st.integers(1, 2))
def test_three_covariance_pipelines_agree(seed, n):
    """Cumulant, tree sum and interpolation integral give the same covariance"""
    service = GaussCumulantService()
    rng = np.random.default_rng(seed)
    f = random_polynomial(rng, n, 3)
    g = random_polynomial(rng, n, 3)
    report = service.covariance_identity_check(f, g, n)
    assert report.passed, report
    assert Fraction(report.details["interpolation_integral"]) == Fraction(report.lhs)


def test_exhaustive_grid(service):
    reports = list(service.exhaustive_malliavin_grid(2, 1, 2))
    assert len(reports) == 9
    assert all(r.passed for r in reports)


@pytest.mark.parametrize("k", [1, 2, 3, 4])
def test_cumulants_match_log_moment_series(service, k):
    """kappa_k(Z^2) is k! times the t^k coefficient of log E exp(t Z^2) = -log(1 - 2t) / 2"""
    t = sympy.Symbol("t")
    series = sympy.series(-sympy.log(1 - 2 * t) / 2, t, 0, k + 1).removeO()
    expected = series.coeff(t, k) * sympy.factorial(k)
    functions = [parse_polynomial("x1^2")] * k
    assert service.gaussian_joint_cumulant(functions, 1) == Fraction(str(expected))


@pytest.mark.slow
@pytest.mark.parametrize("k_max, n_max, degree_max", [(4, 1, 4), (2, 3, 4), (3, 2, 4), (4, 3, 2)])
def test_exhaustive_grid_slices(service, k_max, n_max, degree_max):
    """Each slice of the monomial grid up to k = 4, n = 3, degree 4"""
    failures = [r for r in service.exhaustive_malliavin_grid(k_max, n_max, degree_max) if not r.passed]
    assert not failures, failures[:3]


def sym_coordinates(k):
    return [("Q", i, j) for i in range(k) for j in range(i, k)]


def sym_monomials(k, max_degree):
    coords = sym_coordinates(k)
    for degree in range(max_degree + 1):
        for combo in combinations_with_replacement(coords, degree):
            powers = {}
            for var in combo:
                powers[var] = powers.get(var, 0) + 1
            yield RationalPolynomial.monomial(powers)


@pytest.mark.parametrize("k", [2, pytest.param(3, marks=pytest.mark.slow), pytest.param(4, marks=pytest.mark.slow)])
def test_forest_interpolation_on_every_monomial(service, k):
    """Forest and tree interpolation for every monomial of degree <= 4 on Sym_k"""
    for f in sym_monomials(k, 4):
        assert service.bkar_check(f, k).passed, f
        assert service.connected_bkar_check(f, k).passed, f


def random_sym_polynomial(rng, k, max_degree=3, terms=4):
    coords = sym_coordinates(k)
    poly = RationalPolynomial.zero()
    for _ in range(terms):
        degree = int(rng.integers(0, max_degree + 1))
        mono = RationalPolynomial.constant(int(rng.integers(-3, 4)))
        for _ in range(degree):
            mono = mono * RationalPolynomial.variable(coords[int(rng.integers(len(coords)))])
        poly = poly + mono
    return poly


@given(st.integers(2, 3), st.integers(0, 2 ** 32 - 1))
def test_forest_derivative_matches_central_differences(k, seed):
    """Mixed central differences along e_ij + e_ji of the symmetric matrix agree with d_F f"""
    service = GaussCumulantService()
    rng = np.random.default_rng(seed)
    f = random_sym_polynomial(rng, k)
    forests = [forest for forest in enumerate_forests(k) if forest.edges]
    forest = forests[int(rng.integers(len(forests)))]
    M = [[Fraction(0)] * k for _ in range(k)]
    for i in range(k):
        for j in range(i, k):
            M[i][j] = M[j][i] = Fraction(int(rng.integers(-5, 6)), 3)

    def f_at(matrix):
        return f.evaluate({("Q", i, j): (matrix[i][j] + matrix[j][i]) / 2 for i in range(k) for j in range(i, k)})

    h = Fraction(1, 10 ** 4)
    difference = Fraction(0)
    for signs in product((1, -1), repeat=len(forest.edges)):
        shifted = [row[:] for row in M]
        for (a, b), s in zip(forest.edges, signs):
            shifted[a][b] += s * h
            shifted[b][a] += s * h
        difference += prod(signs) * f_at(shifted)
    difference /= (2 * h) ** len(forest.edges)
    exact = service.forest_derivative(forest, f).evaluate(
        {("Q", i, j): M[i][j] for i in range(k) for j in range(i, k)}
    )
    assert abs(float(difference - exact)) < 1e-5


@given(st.integers(1, 3), st.integers(0, 2 ** 32 - 1))
def test_wick_matches_sampled_gaussians(n, seed):
    """Isserlis expectation within 5 standard errors of a Monte-Carlo mean over standard normals"""
    rng = np.random.default_rng(seed)
    poly = random_polynomial(rng, n, 4)
    exact = wick_expectation(poly, standard_covariance).constant_term()
    Z = rng.standard_normal((20000, n))
    values = np.zeros(len(Z))
    for mono, coeff in poly.items():
        term = np.full(len(Z), float(coeff))
        for (_, j), exp in mono:
            term *= Z[:, j] ** exp
        values += term
    se = values.std(ddof=1) / np.sqrt(len(values))
    assert abs(values.mean() - float(exact)) <= 5 * se + 1e-9


@given(
    st.integers(2, 3),
    st.integers(1, 2),
    st.integers(0, 2 ** 32 - 1),
    st.integers(-3, 3),
    st.integers(-3, 3),
)
def test_cumulant_and_tree_sum_are_multilinear(k, n, seed, a, b):
    """kappa(..., a f + b g, ...) = a kappa(..., f, ...) + b kappa(..., g, ...), and the same for the tree sum"""
    service = GaussCumulantService()
    rng = np.random.default_rng(seed)
    others = [random_polynomial(rng, n, 2) for _ in range(k - 1)]
    f, g = random_polynomial(rng, n, 2), random_polynomial(rng, n, 2)
    slot = int(rng.integers(k))

    def at_slot(h):
        return others[:slot] + [h] + others[slot:]

    combined = f * a + g * b
    for functional in (service.gaussian_joint_cumulant, service.malliavin_rhs):
        assert functional(at_slot(combined), n) == a * functional(at_slot(f), n) + b * functional(at_slot(g), n)
