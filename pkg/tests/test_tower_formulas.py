import numpy as np
import pytest

from families.tower import DOT, alphabet, build_vh_wh, ell, mu, vh_plus_matcher
from families.tower_formulas import (
    WITNESS_SET,
    gen_equal,
    gen_inc,
    gen_max,
    gen_ok,
    gen_Phi,
    gen_Psi,
    gen_vh_plus,
    gen_xi,
    phi_witness,
    psi_witness,
    set_name,
)
from logic.errors import WitnessArityError
from logic.evaluator import Verdict, eval_fo, eval_mso
from logic.formula import (
    conj,
    exists,
    exists_set,
    forall,
    free_set_variables,
    implies,
    letter,
    member,
    is_sentence,
    quantifier_depth,
    size,
    uses_sets,
)
from logic.structures import LabeledString, LinearOrder


def string_of(letters, h):
    return LabeledString(tuple(letters), h)


def two_blocks(h, m, n):
    """T_{h+1} μ_h(m) μ_h(n) E_{h+1}: positions des deux blocs"""
    letters = ("T%d" % (h + 1),) + mu(h, m) + mu(h, n) + ("E%d" % (h + 1),)
    return string_of(letters, h), 1, 1 + len(mu(h, m))


@pytest.mark.parametrize("h", [1, 2])
def test_equal_and_inc_on_block_pairs(h):
    top = 2 if h == 1 else 4
    for m in range(top):
        for n in range(top):
            s, p, q = two_blocks(h, m, n)
            assert eval_fo(gen_equal(h), s, {"x": p, "y": q}) == (m == n)
            assert eval_fo(gen_inc(h), s, {"x": p, "y": q}) == (n == m + 1)


@pytest.mark.parametrize("h", [1, 2])
def test_max_recognizes_last_value(h):
    top = 2 if h == 1 else 4
    for n in range(top):
        s = string_of(mu(h, n), h)
        assert eval_fo(gen_max(h), s, {"x": 0}) == (n == top - 1)


def test_ok_accepts_canonical_blocks_only():
    good = string_of(("T3",) + mu(2, 3) + ("E3",), 2)
    assert eval_fo(gen_ok(1), good)
    assert eval_fo(gen_ok(2), good)
    # bit de poids fort nul: μ_2(1) suivi d'un sous-bloc de trop
    padded = string_of(("T3", "T2", "T1", "E1", "0", "T1", "0", "E1", "0", "E2", "E3"), 2)
    assert eval_fo(gen_ok(1), padded)
    assert not eval_fo(gen_ok(2), padded)
    assert not eval_fo(gen_ok(1), string_of(("T2", "T1", "1", "E1", "E2"), 1))


def mutate(letters, rng, h):
    letters = list(letters)
    sigma = alphabet(h)
    kind = rng.integers(5)
    pos = int(rng.integers(len(letters)))
    if kind == 0:
        letters[pos] = sigma[rng.integers(len(sigma))]
    elif kind == 1 and len(letters) > 1:
        del letters[pos]
    elif kind == 2:
        letters.insert(pos, sigma[rng.integers(len(sigma))])
    elif kind == 3:
        other = int(rng.integers(len(letters)))
        letters[pos], letters[other] = letters[other], letters[pos]
    return letters


@pytest.mark.slow
def test_vh_plus_matches_oracle_on_random_strings():
    rng = np.random.default_rng(2024)
    v = build_vh_wh(1).v
    formula = gen_vh_plus(1)
    positives = 0
    for _ in range(200):
        letters = list(v) * int(rng.integers(1, 5))
        for _ in range(int(rng.integers(0, 3))):
            letters = mutate(letters, rng, 1)
        expected = vh_plus_matcher(letters, 1)
        positives += expected
        assert eval_fo(formula, string_of(letters, 1)) == expected, " ".join(letters)
    assert 0 < positives < 200


@pytest.mark.slow
def test_vh_plus_level_two():
    v = build_vh_wh(2).v
    formula = gen_vh_plus(2)
    assert eval_fo(formula, string_of(v, 2))
    assert eval_fo(formula, string_of(v * 2, 2))
    swapped = list(v)
    swapped[7], swapped[13] = swapped[13], swapped[7]
    assert not vh_plus_matcher(swapped, 2)
    assert not eval_fo(formula, string_of(swapped, 2))


def test_formula_shapes():
    assert is_sentence(gen_vh_plus(1)) and not uses_sets(gen_vh_plus(1))
    assert gen_Phi(1).kind == "existsSet" and gen_Phi(1).var == WITNESS_SET
    assert is_sentence(gen_Psi(1))
    assert free_set_variables(gen_xi(1)) == {set_name(s) for s in alphabet(1)}
    assert size(gen_vh_plus(2)) > size(gen_vh_plus(1))
    assert quantifier_depth(gen_Psi(1)) == quantifier_depth(gen_Phi(1))


@pytest.mark.slow
def test_phi_1_counts_copies_exactly():
    v = build_vh_wh(1).v
    for k in range(1, 7):
        verdict = eval_mso(gen_Phi(1), string_of(v * k, 1), mode="restricted", letter=DOT)
        assert verdict == Verdict.of(k == 4), k


def test_phi_1_witness_on_w1():
    w = build_vh_wh(1).w
    assert eval_mso(gen_Phi(1), string_of(w, 1), mode="witness", witness=phi_witness(1)) == Verdict.TRUE
    wrong = {WITNESS_SET: set(phi_witness(1)[WITNESS_SET]) ^ {3}}
    assert eval_mso(gen_Phi(1), string_of(w, 1), mode="witness", witness=wrong) == Verdict.INCONCLUSIVE


def test_phi_1_rejects_broken_string():
    w = list(build_vh_wh(1).w)
    w[4] = "1"
    assert eval_mso(gen_Phi(1), string_of(w, 1), mode="restricted", letter=DOT) == Verdict.FALSE


@pytest.mark.slow
def test_phi_2_witness_on_w2():
    w = build_vh_wh(2).w
    verdict = eval_mso(gen_Phi(2), string_of(w, 2), mode="witness", witness=phi_witness(2))
    assert verdict == Verdict.TRUE


def test_psi_1_witness_on_its_order():
    verdict = eval_mso(gen_Psi(1), LinearOrder(ell(1)), mode="witness", witness=psi_witness(1))
    assert verdict == Verdict.TRUE
    with pytest.raises(WitnessArityError):
        eval_mso(gen_Psi(1), LinearOrder(ell(1)), mode="witness", witness=phi_witness(1))


@pytest.mark.slow
@pytest.mark.parametrize("N", range(13))
def test_psi_1_false_on_small_orders(N):
    assert eval_mso(gen_Psi(1), LinearOrder(N)) == Verdict.FALSE


def near_misses_of_v1():
    v = list(build_vh_wh(1).v)
    swapped = list(v)
    swapped[1], swapped[2] = swapped[2], swapped[1]
    return [v, swapped, v[:-1]]


@pytest.mark.slow
@pytest.mark.parametrize("letters", near_misses_of_v1())
def test_phi_1_exhaustive_and_restricted_agree(letters):
    s = string_of(letters, 1)
    exhaustive = eval_mso(gen_Phi(1), s, mode="exhaustive")
    restricted = eval_mso(gen_Phi(1), s, mode="restricted", letter=DOT)
    assert exhaustive == restricted == Verdict.FALSE


def test_dot_confined_set_agrees_across_modes():
    f = exists_set(
        "X",
        conj(
            forall("x", implies(member("x", "X"), letter(DOT, "x"))),
            exists("x", member("x", "X")),
        ),
    )
    s = string_of(build_vh_wh(1).v, 1)
    assert eval_mso(f, s, mode="exhaustive") == Verdict.TRUE
    assert eval_mso(f, s, mode="restricted", letter=DOT) == Verdict.TRUE
    no_dot = string_of(["T1", "0", "E1"], 1)
    assert eval_mso(f, no_dot, mode="exhaustive") == Verdict.FALSE
    assert eval_mso(f, no_dot, mode="restricted", letter=DOT) == Verdict.FALSE
