import hypothesis.strategies as st
import pytest
from hypothesis import given, settings

from families.linear import gen_chi
from logic.errors import (
    GuardExceeded,
    SignatureError,
    UnassignedVariableError,
    WitnessArityError,
)
from logic.evaluator import (
    Evaluator,
    Verdict,
    eval_fo,
    eval_mso,
    eval_naive,
    split_set_prefix,
    stabilization_threshold,
    truth_profile,
)
from logic.formula import (
    Atom,
    Binary,
    Not,
    Quantified,
    Term,
    conj,
    exists,
    exists_set,
    forall,
    implies,
    letter,
    member,
    neg,
)
from logic.guards import GuardConfig
from logic.structures import LinearOrder, parse_string
from logic.syntax import parse


def test_closed_atoms():
    assert eval_fo(parse("(succ min max)"), LinearOrder(1))
    assert not eval_fo(parse("(succ min max)"), LinearOrder(2))
    assert eval_fo(parse("(= min max)"), LinearOrder(0))


def test_assignment_and_free_variables():
    f = parse("(exists z (and (< x z) (< z y)))")
    assert eval_fo(f, LinearOrder(5), {"x": 1, "y": 3})
    assert not eval_fo(f, LinearOrder(5), {"x": 1, "y": 2})
    with pytest.raises(UnassignedVariableError):
        eval_fo(f, LinearOrder(5), {"x": 1})


def test_letters_need_a_string():
    with pytest.raises(SignatureError):
        eval_fo(parse("(exists x (letter 0 x))"), LinearOrder(3))
    assert eval_fo(parse("(exists x (letter 0 x))"), parse_string("T2 0 E2"))


def test_mso_formula_rejected_by_eval_fo():
    with pytest.raises(SignatureError):
        eval_fo(exists_set("X", exists("x", member("x", "X"))), LinearOrder(2))


def test_assignment_outside_universe():
    with pytest.raises(UnassignedVariableError):
        eval_fo(parse("(< x y)"), LinearOrder(3), {"x": 9, "y": 0})
    with pytest.raises(UnassignedVariableError):
        eval_fo(parse("(< x max)"), LinearOrder(3), {"x": -1})


def test_witness_position_outside_universe():
    f = exists_set("X", exists("x", member("x", "X")))
    with pytest.raises(UnassignedVariableError):
        eval_mso(f, LinearOrder(3), mode="witness", witness={"X": [1, 99]})
    assert eval_mso(f, LinearOrder(3), mode="witness", witness={"X": [2]}) == Verdict.TRUE


def test_evaluator_caches_set_free_tables():
    evaluator = Evaluator(LinearOrder(4))
    f = parse("(exists y (< x y))")
    assert evaluator.table(f) is evaluator.table(f)
    assert list(evaluator.table(f).data) == [True, True, True, True, False]


# ---------------------------------------------------------------- oracle naïf

TERMS = ["x", "y", "z", "min", "max"]


def fo_formulas(depth: int = 3):
    terms = st.sampled_from(TERMS)
    atoms = st.builds(
        lambda r, a, b: Atom(r, (Term(a), Term(b))),
        st.sampled_from(["<", "=", "succ"]),
        terms,
        terms,
    )
    if depth == 0:
        return atoms
    sub = fo_formulas(depth - 1)
    return st.one_of(
        atoms,
        st.builds(Not, sub),
        st.builds(Binary, st.sampled_from(["and", "or", "imp"]), sub, sub),
        st.builds(Quantified, st.sampled_from(["exists", "forall"]), st.sampled_from(["x", "y", "z"]), sub),
    )


@settings(max_examples=500, deadline=None)
@given(fo_formulas(), st.data())
def test_evaluator_matches_naive_semantics(f, data):
    N = data.draw(st.integers(0, 8))
    assignment = {v: data.draw(st.integers(0, N)) for v in ("x", "y", "z")}
    order = LinearOrder(N)
    assert eval_fo(f, order, assignment) == eval_naive(f, order, assignment)


@settings(max_examples=50, deadline=None)
@given(st.lists(st.sampled_from(["0", "1", "dot"]), min_size=1, max_size=6), st.data())
def test_mso_matches_naive_semantics(letters, data):
    s = parse_string(" ".join(letters), h=1)
    body = data.draw(
        st.sampled_from(
            [
                forall("x", implies(member("x", "X"), letter("1", "x"))),
                conj(exists("x", member("x", "X")), forall("x", implies(member("x", "X"), letter("0", "x")))),
                forall("x", forall("y", implies(conj(member("x", "X"), parse("(succ x y)")), neg(member("y", "X"))))),
            ]
        )
    )
    f = exists_set("X", body)
    expected = eval_naive(f, s)
    assert eval_mso(f, s) == Verdict.of(expected)
    assert eval_mso(forall_set_of(body), s) == Verdict.of(eval_naive(forall_set_of(body), s))


def forall_set_of(body):
    return Quantified("forallSet", "X", body)


# ---------------------------------------------------------------- MSO


ONES_ONLY = exists_set(
    "X",
    conj(
        exists("x", member("x", "X")),
        forall("x", implies(member("x", "X"), letter("1", "x"))),
    ),
)


def test_mso_exhaustive():
    assert eval_mso(ONES_ONLY, parse_string("0 0 1", h=1)) == Verdict.TRUE
    assert eval_mso(ONES_ONLY, parse_string("0 0 0", h=1)) == Verdict.FALSE


def test_mso_restricted_to_a_letter():
    assert eval_mso(ONES_ONLY, parse_string("0 1 0", h=1), mode="restricted", letter="1") == Verdict.TRUE
    assert eval_mso(ONES_ONLY, parse_string("0 1 0", h=1), mode="restricted", letter="0") == Verdict.FALSE
    with pytest.raises(ValueError):
        eval_mso(ONES_ONLY, parse_string("0 1 0", h=1), mode="restricted")


def test_mso_witness_mode():
    s = parse_string("0 1 0", h=1)
    assert eval_mso(ONES_ONLY, s, mode="witness", witness={"X": [1]}) == Verdict.TRUE
    assert eval_mso(ONES_ONLY, s, mode="witness", witness={"X": [0]}) == Verdict.INCONCLUSIVE
    with pytest.raises(WitnessArityError):
        eval_mso(ONES_ONLY, s, mode="witness", witness={"Y": [1]})


def test_split_set_prefix():
    prefix, matrix = split_set_prefix(exists_set("X", exists_set("Y", ONES_ONLY.body)))
    assert prefix == ["X", "Y"]
    assert matrix == ONES_ONLY.body


def test_mso_set_domain_guard():
    s = parse_string(" ".join(["0"] * 30), h=1)
    with pytest.raises(GuardExceeded):
        eval_mso(ONES_ONLY, s)
    big = GuardConfig().with_scale(2)
    assert big.limit("mso_set_domain") == 48


# ---------------------------------------------------------------- stabilisation


def test_truth_profile_of_chi():
    assert truth_profile(gen_chi(3), 6) == (False, False, False, True, False, False, False)


def test_stabilization_threshold():
    stab = stabilization_threshold(gen_chi(3))
    assert stab.D == 4
    assert stab.tail is False
    assert len(stab.profile) == 2 ** (5 + 1) + 1
    at_least = stabilization_threshold(gen_chi(2, "at_least"))
    assert (at_least.D, at_least.tail) == (2, True)


def test_stabilization_guard():
    deep = parse("(= x x)")
    for k in range(12):
        deep = exists("xyz"[k % 3], deep)
    with pytest.raises(GuardExceeded):
        stabilization_threshold(deep)
