import pytest

from families.linear import chi_prime, eliminate_sugar, gen_chi, gen_phi_m
from logic.errors import SignatureError
from logic.evaluator import eval_fo, truth_profile
from logic.formula import quantifier_depth, size, variable_names, variable_width
from logic.structures import Interpretation, LinearOrder, interpretations_over
from logic.syntax import parse


@pytest.mark.slow
def test_chi_family_semantics():
    for l in range(31):
        exact, at_least = gen_chi(l), gen_chi(l, "at_least")
        for N in range(31):
            order = LinearOrder(N)
            assert eval_fo(exact, order) == (N == l)
            assert eval_fo(at_least, order) == (N >= l)


@pytest.mark.parametrize("l", [0, 1, 5, 12])
def test_chi_sizes_and_width(l):
    assert size(gen_chi(l, "at_least")) == 3 * l + 2
    assert size(gen_chi(l)) == 6 * l + 9
    assert quantifier_depth(gen_chi(l, "at_least")) == l + 1
    assert variable_width(gen_chi(l)) <= 2


def test_chi_prime_counts_elements_below():
    f = chi_prime(2, "y")
    order = LinearOrder(5)
    assert [eval_fo(f, order, {"y": a}) for a in range(6)] == [False, False, True, True, True, True]


def test_chi_rejects_unknown_mode():
    with pytest.raises(ValueError):
        gen_chi(2, "most")


@pytest.mark.parametrize("m", range(0, 6))
def test_phi_m_defines_power_of_two(m):
    top = 2**m + 8
    assert truth_profile(gen_phi_m(m), top) == tuple(N == 2**m for N in range(top + 1))


@pytest.mark.slow
@pytest.mark.parametrize("m", [6, 7, 8])
def test_phi_m_defines_power_of_two_large(m):
    top = 2**m + 8
    profile = truth_profile(gen_phi_m(m), top)
    assert [N for N, value in enumerate(profile) if value] == [2**m]


def test_phi_m_grows_linearly():
    sizes = [size(gen_phi_m(m)) for m in range(10)]
    assert sizes == [21 + 9 * m for m in range(10)]
    assert all(b - a == 9 for a, b in zip(sizes, sizes[1:]))
    assert variable_width(gen_phi_m(4)) == 4
    assert quantifier_depth(gen_phi_m(3)) == 9


SUGARED = [
    "(succ min max)",
    "(exists x (succ x max))",
    "(forall x (imp (= x min) (< x max)))",
    "(exists x (exists y (and (succ x y) (succ y max))))",
    "(= max min)",
]


@pytest.mark.parametrize("text", SUGARED)
def test_eliminate_sugar_preserves_truth(text):
    psi = parse(text)
    plain = eliminate_sugar(psi)
    printed = str(plain)
    assert "succ" not in printed and "min" not in printed and "max" not in printed
    assert variable_names(plain) <= {"x", "y", "z"}
    for N in range(6):
        assert eval_fo(plain, LinearOrder(N)) == eval_fo(psi, LinearOrder(N))


def test_eliminate_sugar_on_open_formula():
    psi = parse("(succ x y)")
    plain = eliminate_sugar(psi)
    for i in interpretations_over(3):
        assert eval_fo(plain, i.structure, i.assignment) == eval_fo(psi, i.structure, i.assignment)


def test_eliminate_sugar_rejects_non_order_input():
    with pytest.raises(SignatureError):
        eliminate_sugar(parse("(exists u (< u max))"))
    with pytest.raises(SignatureError):
        eliminate_sugar(parse("(exists x (letter 0 x))"))
