import pytest

from app.core.errors import InvalidStructureError
from app.models.forest import parse_forest
from app.models.permutation import Coloring, compose, cycle_count, parse_coloring, parse_cycles
from app.models.splicing import VertexLabeling, parse_labeling
from app.services.splicing_service import SplicingService, fiber_compositions, splice_count_formula


@pytest.fixture
def service():
    return SplicingService()


def test_splice_count_examples():
    assert splice_count_formula([2, 2]) == 4
    assert splice_count_formula([2, 1, 1]) == 2
    assert splice_count_formula([1, 1]) == 1
    assert splice_count_formula([1, 1, 1]) == 0


def test_splice_set_for_two_fibers(service):
    nu = VertexLabeling.from_fiber_sizes([2, 2])
    taus = service.splice_set(parse_forest("1-2", 2), nu)
    assert len(taus) == 4
    assert all(cycle_count(t) == 3 for t in taus)


def test_splice_set_respects_colors(service):
    nu = VertexLabeling.from_fiber_sizes([2, 2])
    gamma = parse_coloring("1,2,1,2", 4)
    taus = service.splice_set_colored(parse_forest("1-2", 2), nu, gamma)
    assert sorted(t.to_cycle_notation() for t in taus) == ["(1 3)(2)(4)", "(1)(2 4)(3)"]


def test_per_tree_counts(service):
    """Only the star centred at the big fiber contributes for sizes (2,1,1)"""
    nu = VertexLabeling.from_fiber_sizes([2, 1, 1])
    assert service.splice_count_by_tree(parse_forest("1-2,1-3", 3), nu) == 2
    assert service.splice_count_by_tree(parse_forest("1-2,2-3", 3), nu) == 0


@pytest.mark.parametrize("n", range(1, 7))
def test_splice_count_identity(service, n):
    """Sum over trees of |Splice| equals the closed form"""
    for k in range(1, min(n, 4) + 1):
        for sizes in fiber_compositions(n, k):
            report = service.splice_count_check(VertexLabeling.from_fiber_sizes(sizes))
            assert report.passed, report.details


def test_fiber_compositions():
    assert list(fiber_compositions(4, 2)) == [[1, 3], [2, 2], [3, 1]]


@pytest.mark.parametrize(
    "theta, tree",
    [("(1 2)(3 4)", "1-2"), ("(1 2 3)(4 5)(6)", "1-2,2-3"), ("(1 2)(3 4)(5 6)", "1-3,2-3")],
)
def test_splicing_keeps_one_cycle(service, theta, tree):
    theta = parse_cycles(theta)
    nu = VertexLabeling.for_theta(theta)
    report = service.splicing_cyclicity_check(theta, nu, parse_forest(tree, nu.k))
    assert report.passed


def test_canonical_words(service):
    theta = parse_cycles("(1 2)(3 4)")
    nu = VertexLabeling.for_theta(theta)
    words = service.canonical_splicing_polynomial(theta, Coloring.constant(4), nu, parse_forest("1-2", 2))
    assert len(words) == 4
    assert all(w.degree() == 2 for w in words)
    for w in words:
        assert w.letters[0].index == 0
        assert sorted(l.index for l in w.letters) == [0, 1, 2, 3]
        assert {l.vertex for l in w.kept_letters()} == {0, 1}
        assert compose(theta, w.tau).n == 4


def test_labeling_validation():
    with pytest.raises(InvalidStructureError, match="onto"):
        VertexLabeling((0, 2))
    theta = parse_cycles("(1 2)(3 4)")
    with pytest.raises(InvalidStructureError, match="constant on the cycles"):
        parse_labeling("1,2,1,2", 4).require_theta_invariant(theta)
    assert parse_labeling("2,2,1,1", 4).is_invariant(theta)


def test_tree_must_span_labeling(service):
    nu = VertexLabeling.from_fiber_sizes([1, 1, 1])
    with pytest.raises(InvalidStructureError):
        service.splice_set(parse_forest("1-2", 3), nu)
