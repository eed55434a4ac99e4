import pytest

from logic.errors import FormulaSyntaxError, SignatureError, TypeMismatchError
from logic.structures import (
    Interpretation,
    LabeledString,
    LinearOrder,
    d_type,
    interpretations_over,
    parse_assignment,
    parse_interpretation,
    parse_string,
    parse_structure,
    types_equal,
)


def test_linear_order_literal():
    order = parse_structure("A:7")
    assert order == LinearOrder(7)
    assert order.universe_size == 8
    assert str(order) == "A:7"
    with pytest.raises(FormulaSyntaxError):
        parse_structure("B:7")


def test_linear_order_has_no_letters():
    with pytest.raises(SignatureError):
        LinearOrder(3).letter_mask("0")


def test_interpretation_values_and_printing():
    i = parse_interpretation("A:5 x:2 z:4")
    assert (i.value("min"), i.value("x"), i.value("y"), i.value("z"), i.value("max")) == (0, 2, 0, 4, 5)
    assert str(i) == "A:5 x:2 y:0 z:4"
    assert parse_interpretation(str(i)) == i
    assert i.with_value("y", 3).assignment == {"x": 2, "y": 3, "z": 4}


def test_interpretation_out_of_range():
    with pytest.raises(ValueError):
        Interpretation(LinearOrder(2), x=3)


def test_parse_assignment_defaults_to_zero():
    assert parse_assignment(None) == {"x": 0, "y": 0, "z": 0}
    assert parse_assignment("x=3,z=7") == {"x": 3, "y": 0, "z": 7}
    with pytest.raises(FormulaSyntaxError):
        parse_assignment("x:3")


def test_labeled_string():
    s = parse_string("T2 T1 E1 dot E2")
    assert s.h == 1
    assert len(s) == 5
    assert s.positions("dot") == [3]
    assert list(s.letter_mask("T1")) == [False, True, False, False, False]
    assert len(s * 3) == 15
    with pytest.raises(SignatureError):
        LabeledString(("T5",), 1)


def test_interpretations_over_counts():
    assert len(list(interpretations_over(3))) == 64


def test_d_type_caps_gaps():
    i = Interpretation(LinearOrder(10), x=3, y=3, z=9)
    t = d_type(i, 0)
    assert t.ord == ("min", "x", "y", "z", "max")
    assert t.dist == (2, 0, 2, 1)
    assert d_type(i, 2).dist == (3, 0, 6, 1)


def test_d_type_reference_values():
    t = d_type(Interpretation(LinearOrder(10), x=3, y=3, z=7), 1)
    assert t.ord == ("min", "x", "y", "z", "max")
    assert t.dist == (3, 0, 4, 3)
    # 9 - 4 = 5 est plafonné à 4: les deux types coïncident
    a = d_type(Interpretation(LinearOrder(8), x=0, y=4, z=8), 1)
    b = d_type(Interpretation(LinearOrder(9), x=0, y=4, z=9), 1)
    assert a.dist == b.dist == (0, 4, 4, 0)
    assert types_equal(a, b)


def test_types_equal():
    a = d_type(Interpretation(LinearOrder(20)), 1)
    b = d_type(Interpretation(LinearOrder(30)), 1)
    assert types_equal(a, b)
    assert not types_equal(a, d_type(Interpretation(LinearOrder(3)), 1))
    with pytest.raises(TypeMismatchError):
        types_equal(a, d_type(Interpretation(LinearOrder(20)), 2))
