from fractions import Fraction

import pytest

from app.core.errors import CapExceededError, InvalidStructureError
from app.models.permutation import Coloring, parse_coloring, parse_cycles
from app.schemas.verification import VerifyRequest
from app.services.freewick_service import FreeWickService, arb_bound, semicircular_moment
from app.services.mapcount_service import instances_of_degree
from app.services.verify_service import VerifyService


@pytest.fixture(scope="module")
def service():
    return FreeWickService()


def test_semicircular_moments_are_catalan():
    cov = lambda a, b: 1
    assert semicircular_moment("aa", cov) == 1
    assert semicircular_moment("aaaa", cov) == 2
    assert semicircular_moment("aaaaaa", cov) == 5
    assert semicircular_moment("aaa", cov) == 0


def test_semicircular_moment_of_free_pair():
    """phi(a b a b) = 0 and phi(a a b b) = 1 for free standard semicirculars"""
    cov = lambda a, b: 1 if a == b else 0
    assert semicircular_moment("abab", cov) == 0
    assert semicircular_moment("aabb", cov) == 1
    assert semicircular_moment("abba", cov) == 1


def test_nc_matching_count(service):
    assert service.nc_matching_count(parse_cycles("(1 2 3 4)"), parse_coloring("constant", 4)) == 2
    assert service.nc_matching_count(parse_cycles("(1 2 3 4 5 6)"), parse_coloring("constant", 6)) == 5
    assert service.nc_matching_count(parse_cycles("(1 2 3 4)"), parse_coloring("1,2,2,1", 4)) == 1
    with pytest.raises(InvalidStructureError):
        service.nc_matching_count(parse_cycles("(1 2)(3 4)"), parse_coloring("constant", 4))


@pytest.mark.parametrize(
    "theta, gamma, expected",
    [
        ("(1 2)(3 4)", "constant", 2),
        ("(1 2 3 4)", "constant", 2),
        ("(1)(2)", "constant", 1),
        ("(1 2)(3 4)", "1,2,1,2", 1),
        ("(1 2 3)", "constant", 0),
        ("(1)(2)(3)(4)", "constant", 0),
    ],
)
def test_arb_evaluate_examples(service, theta, gamma, expected):
    perm = parse_cycles(theta)
    assert service.arb_evaluate(perm, parse_coloring(gamma, perm.n)).value == expected


def test_per_tree_breakdown(service):
    result = service.arb_evaluate(parse_cycles("(1 2)(3 4)"), parse_coloring("constant", 4))
    assert len(result.per_tree) == 1
    assert result.per_tree[0].tree == "1-2"
    assert result.per_tree[0].splicings == 4
    assert result.per_tree[0].value == "2"


@pytest.mark.parametrize(
    "theta, gamma",
    [
        ("(1 2)(3 4)", "constant"),
        ("(1 2 3 4)", "1,2,2,1"),
        ("(1 2 3)(4 5 6)", "constant"),
        ("(1 2)(3 4)(5 6)", "constant"),
        ("(1 2 3 4)(5 6)", "1,1,2,2,1,2"),
        ("(1)(2 3 4)", "constant"),
        ("(1 2)(3)(4)(5 6)", "constant"),
    ],
)
def test_main_identity(service, theta, gamma):
    """Planar map count equals the tree expansion of free semicircular moments"""
    perm = parse_cycles(theta)
    report = service.main_theorem_check(perm, parse_coloring(gamma, perm.n))
    assert report.equal, report
    assert Fraction(report.rhs_value) == report.lhs_count


def test_arb_bound():
    assert arb_bound(parse_cycles("(1 2)(3 4)")) == 16
    assert arb_bound(parse_cycles("(1 2 3 4)")) == 16
    assert arb_bound(parse_cycles("(1)(2)(3)(4)")) == 0


def test_arb_bound_check(service):
    perm = parse_cycles("(1 2 3)(4 5 6)")
    assert service.arb_bound_check(perm, parse_coloring("constant", 6)).passed


def test_value_is_independent_of_cycle_numbering(service):
    perm = parse_cycles("(1 2)(3 4 5 6)")
    report = service.arb_nu_independence_check(perm, parse_coloring("constant", 6))
    assert report.passed
    assert report.details["labelings"] == 2


def test_kept_word_cap(service):
    perm = parse_cycles("(" + " ".join(str(i) for i in range(1, 19)) + ")")
    with pytest.raises(CapExceededError, match="MAX_KEPT_WORD_LENGTH"):
        service.arb_evaluate(perm, parse_coloring("constant", 18))


@pytest.mark.slow
@pytest.mark.parametrize("n", [2, 4, 6, 8])
def test_main_identity_sweep(n):
    """Every cycle type of degree n, monochrome and under 100 random colorings"""
    summary = VerifyService().run("main", VerifyRequest(sweep_n=[n], colorings=100, seed=n))
    types = len(list(instances_of_degree(n)))
    assert len(summary.reports) == types * 101
    failures = [r for r in summary.reports if not r.passed]
    assert not failures, failures[:3]


@pytest.mark.slow
@pytest.mark.parametrize("n", [2, 4, 6, 8])
def test_bounds_sweep(n):
    summary = VerifyService().run("bounds", VerifyRequest(sweep_n=[n], colorings=100, seed=n))
    assert summary.passed, [r for r in summary.reports if not r.passed][:3]


@pytest.mark.slow
@pytest.mark.parametrize("n", range(1, 9))
def test_value_is_independent_of_every_cycle_numbering(service, n):
    """All k! numberings of the cycles give one value, for every cycle type up to degree 8"""
    two_colors = Coloring(tuple(x % 2 for x in range(n)))
    for theta in instances_of_degree(n):
        for gamma in (Coloring.constant(n), two_colors):
            report = service.arb_nu_independence_check(theta, gamma)
            assert report.passed, report
