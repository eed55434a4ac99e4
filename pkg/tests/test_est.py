import json

import pytest

from certificates.est import (
    build,
    certify_lower_bound,
    check_keyprop,
    dump_tree,
    tree_size_bound,
)
from certificates.separators import minimal_separator, weight
from families.linear import gen_chi
from logic.errors import PreconditionError, SignatureError
from logic.evaluator import eval_fo
from logic.formula import size
from logic.structures import Interpretation, LinearOrder
from logic.syntax import parse
from tests.conftest import alpha0


def test_tree_labels_follow_connectives():
    psi = parse("(or (succ min max) (= min max))")
    tree = build(psi, [alpha0(0), alpha0(1)], [alpha0(2)])
    left, right = tree.root.children
    assert left.A == (alpha0(1),)
    assert right.A == (alpha0(0),)
    assert left.B == right.B == (alpha0(2),)


def test_negation_swaps_labels():
    psi = parse("(not (= min max))")
    tree = build(psi, [alpha0(2)], [alpha0(0)])
    child = tree.root.children[0]
    assert (child.A, child.B) == ((alpha0(0),), (alpha0(2),))


def test_implication_children():
    psi = parse("(imp (= min max) (succ min max))")
    tree = build(psi, [alpha0(1), alpha0(3)], [alpha0(0)])
    antecedent, consequent = tree.root.children
    assert antecedent.A == (alpha0(0),)
    assert set(antecedent.B) == {alpha0(1), alpha0(3)}
    assert consequent.A == ()


def test_existential_uses_least_witness():
    psi = parse("(exists x (succ min x))")
    tree = build(psi, [alpha0(3)], [alpha0(0)])
    child = tree.root.children[0]
    assert child.A == (Interpretation(LinearOrder(3), x=1),)
    assert child.B == (alpha0(0),)


def test_node_count_equals_size(corpus):
    for psi in corpus[:20]:
        A = [alpha0(N) for N in range(6) if eval_fo(psi, LinearOrder(N))]
        B = [alpha0(N) for N in range(6) if not eval_fo(psi, LinearOrder(N))]
        assert build(psi, A, B).nodes == size(psi)


def test_build_checks_preconditions():
    with pytest.raises(PreconditionError):
        build(parse("(succ min max)"), [alpha0(2)], [])
    with pytest.raises(SignatureError):
        build(parse("(exists u (< u min))"), [], [])


@pytest.mark.slow
def test_keyprop_on_corpus(corpus):
    """Inégalités de poids et borne |T| >= ½·w sur au moins 50 arbres"""
    assert len(corpus) >= 50
    for psi in corpus:
        A = [alpha0(N) for N in range(7) if eval_fo(psi, LinearOrder(N))]
        B = [alpha0(N) for N in range(7) if not eval_fo(psi, LinearOrder(N))]
        tree = build(psi, A, B)
        report = check_keyprop(tree)
        assert report.ok, report.violations
        assert tree_size_bound(tree).bound_holds


@pytest.mark.slow
@pytest.mark.parametrize("m", range(1, 7))
def test_corpus_sentences_never_beat_certificate(corpus, m):
    for psi in corpus:
        on_m = eval_fo(psi, LinearOrder(m))
        if on_m == eval_fo(psi, LinearOrder(m + 1)):
            continue
        A, B = ([alpha0(m)], [alpha0(m + 1)]) if on_m else ([alpha0(m + 1)], [alpha0(m)])
        certificate = certify_lower_bound(psi, A, B)
        assert certificate.verdict
        assert certificate.weight.squared == m


def test_certificate_for_chi():
    certificate = certify_lower_bound(gen_chi(4), [alpha0(4)], [alpha0(5)])
    assert certificate.weight.squared == 4
    assert certificate.verdict
    assert certificate.as_dict()["size"] == 33


def test_dump_tree_is_json():
    psi = parse("(exists x (< min x))")
    tree = build(psi, [alpha0(1)], [alpha0(0)])
    data = json.loads(dump_tree(tree))
    assert data["sl"] == "∃x"
    assert data["il"]["A"] == ["A:1 x:0 y:0 z:0"]
    assert data["children"][0]["il"]["A"] == ["A:1 x:1 y:0 z:0"]


def test_root_weight_matches_minimal_separator():
    psi = gen_chi(3)
    tree = build(psi, [alpha0(3)], [alpha0(2), alpha0(4)])
    bound = tree_size_bound(tree)
    assert bound.root_weight == weight(minimal_separator([alpha0(3)], [alpha0(2), alpha0(4)]))
    assert bound.nodes == size(psi)
