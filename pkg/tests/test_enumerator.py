import pytest

from certificates.separators import minimal_separator, weight
from logic.enumerator import (
    Enumerator,
    check_lemma3,
    corpus_sentences,
    enumerate_sentences,
    min_distinguishing_size,
    rank_types,
    structures_distinguished,
)
from logic.errors import GuardExceeded
from logic.evaluator import eval_fo
from logic.formula import (
    Signature,
    free_variables,
    quantifier_depth,
    size,
    variable_names,
)
from logic.guards import GuardConfig
from logic.structures import Interpretation, LinearOrder, d_type
from logic.syntax import parse
from tests.conftest import alpha0

FULL = Signature.order()


def test_closed_atoms_come_first():
    sentences = [str(f) for f in enumerate_sentences(FULL, 0, 1)]
    assert "(succ min max)" in sentences
    assert "(< min max)" in sentences
    assert "(= min max)" in sentences
    assert len(sentences) == len(set(sentences))


def test_stream_is_ordered_by_size_and_duplicate_free():
    enumerator = Enumerator(FULL, 2).run(5)
    sizes = [size(f) for f, _ in enumerator.sentences()]
    assert sizes == sorted(sizes)
    vectors = [v.tobytes() for _, v in enumerator.sentences()]
    assert len(vectors) == len(set(vectors))
    assert sorted(enumerator.classes_by_size()) == [1, 2, 3, 4, 5]


def test_vectors_match_evaluation():
    enumerator = Enumerator(FULL, 3, probes=(0, 1, 2, 3)).run(4)
    for level in enumerator.levels.values():
        for formula, vector in zip(level.formulas, level.vectors):
            for N in (0, 2, 3):
                i = Interpretation(LinearOrder(N), x=N, y=0, z=min(1, N))
                expected = eval_fo(formula, i.structure, i.assignment)
                assert vector[enumerator.column(i)] == expected


def test_enumeration_guard():
    with pytest.raises(GuardExceeded):
        list(enumerate_sentences(FULL, 3, 10))
    with pytest.raises(GuardExceeded):
        list(enumerate_sentences(FULL, 3, 5, guards=GuardConfig(enumerator_max_size=4)))


@pytest.mark.parametrize(
    "A, B, expected",
    [
        ([alpha0(1)], [alpha0(2)], 1),
        ([alpha0(0)], [alpha0(1)], 1),
        ([alpha0(2)], [alpha0(3)], 4),
    ],
)
def test_min_distinguishing_size(A, B, expected):
    result = min_distinguishing_size(FULL, 3, A, B, cap=5)
    assert result.size == expected
    assert all(eval_fo(result.formula, i.structure) for i in A)
    assert not any(eval_fo(result.formula, j.structure) for j in B)


def test_min_size_without_succ_or_constants():
    order_only = Signature.order(succ=False, constants=False)
    result = min_distinguishing_size(order_only, 2, [alpha0(0)], [alpha0(1)], cap=5)
    assert result.size == 3
    assert variable_names(result.formula) == {"x", "y"}
    assert min_distinguishing_size(order_only, 1, [alpha0(0)], [alpha0(1)], cap=4) is None


def test_not_found_within_cap():
    assert min_distinguishing_size(FULL, 0, [alpha0(5)], [alpha0(6)], cap=3) is None


@pytest.mark.parametrize("m, n", [(1, 2), (1, 3), (2, 3), (2, 4)])
def test_minimum_never_beats_certificate(m, n):
    result = min_distinguishing_size(FULL, 3, [alpha0(m)], [alpha0(n)], cap=5)
    w = weight(minimal_separator([alpha0(m)], [alpha0(n)]))
    assert result is not None
    assert 4 * result.size**2 >= w.squared


def test_shrinking_queries_never_increases_minimum():
    both = min_distinguishing_size(FULL, 2, [alpha0(0), alpha0(1)], [alpha0(2)], cap=6)
    one = min_distinguishing_size(FULL, 2, [alpha0(1)], [alpha0(2)], cap=6)
    assert one.size <= both.size


# ---------------------------------------------------------------- d-types


def test_rank_types_depth_zero_is_atomic_type():
    classes = rank_types(0, 3)
    i = Interpretation(LinearOrder(3), x=1, y=1, z=2)
    j = Interpretation(LinearOrder(3), x=1, y=1, z=2)
    k = Interpretation(LinearOrder(3), x=1, y=2, z=2)
    assert classes[i] == classes[j]
    assert classes[i] != classes[k]


def test_rank_types_refine_with_depth():
    shallow = rank_types(0, 4)
    deep = rank_types(1, 4)
    assert len(set(deep.values())) >= len(set(shallow.values()))
    assert deep[alpha0(1)] != deep[alpha0(2)]
    assert shallow[alpha0(1)] == shallow[alpha0(2)]


def test_equal_types_share_rank_class():
    classes = rank_types(1, 5)
    i = Interpretation(LinearOrder(5), x=0, y=5, z=5)
    j = Interpretation(LinearOrder(4), x=0, y=4, z=4)
    assert d_type(i, 1) == d_type(j, 1)
    assert classes[i] == classes[j]


@pytest.mark.parametrize("d, n_max", [(0, 4), (1, 4)])
def test_lemma3(d, n_max):
    report = check_lemma3(d, n_max, max_size=5)
    assert report.ok, report.rank_counterexamples[:3] + report.enumeration_counterexamples[:3]
    assert report.formulas_checked > 0


@pytest.mark.slow
def test_lemma3_depth_two():
    report = check_lemma3(2, 5, max_size=5)
    assert report.ok


def test_lemma3_guards():
    with pytest.raises(GuardExceeded):
        check_lemma3(3, 4)
    with pytest.raises(GuardExceeded):
        check_lemma3(1, 7)


# ---------------------------------------------------------------- corpus


def test_corpus_is_deterministic_and_well_formed():
    first = corpus_sentences(40, 10, seed=3, max_depth=3)
    second = corpus_sentences(40, 10, seed=3, max_depth=3)
    assert [str(f) for f in first] == [str(f) for f in second]
    assert len({str(f) for f in first}) == 40
    for f in first:
        assert not free_variables(f)
        assert quantifier_depth(f) <= 3
        assert size(f) <= 10
        assert variable_names(f) <= {"x", "y", "z"}


def test_structures_distinguished():
    assert structures_distinguished(parse("(succ min max)"), 1, 2) is True
    assert structures_distinguished(parse("(succ min max)"), 2, 1) is False
    assert structures_distinguished(parse("(< min max)"), 2, 3) is None
