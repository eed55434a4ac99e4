import pytest

from families.tower import (
    DOT,
    L,
    alphabet,
    bin_h,
    build_vh_wh,
    decode_block,
    dot_positions,
    ell,
    h_numbering,
    infer_h,
    mu,
    tower,
    vh_plus_matcher,
)
from logic.errors import GuardExceeded


def test_tower_values():
    assert [tower(h) for h in range(5)] == [1, 2, 4, 16, 65536]


def test_alphabet():
    assert alphabet(1) == ("0", "1", "T1", "T2", "E1", "E2", DOT)
    assert len(alphabet(2)) == 9


def test_binary_helpers():
    assert [L(n) for n in range(6)] == [0, 1, 1, 2, 2, 3]
    assert bin_h(6, 4) == (0, 1, 1, 0)


def test_mu_examples():
    assert mu(1, 0) == ("T1", "E1")
    assert mu(1, 1) == ("T1", "0", "E1")
    assert mu(2, 3) == ("T2", "T1", "E1", "0", "T1", "0", "E1", "1", "E2")


def test_string_lengths():
    # v_1 = T2 (T1 E1) • (T1 0 E1) • E2
    one = build_vh_wh(1)
    assert len(one.v) == 9
    assert len(one.w) == 36
    assert ell(1) == 35
    # |μ_2(0..3)| = 2 + 5 + 5 + 9, plus 4 • et T3 E3
    two = build_vh_wh(2)
    assert len(two.v) == 27
    assert len(two.w) == 432
    assert two.copies == 16


def test_tower_guard():
    with pytest.raises(GuardExceeded):
        build_vh_wh(3)


@pytest.mark.parametrize("h", [1, 2])
def test_mu_round_trip(h):
    for n in range(65):
        assert decode_block(mu(h, n), 0, h) == n


def test_decode_block_rejects_malformed():
    with pytest.raises(ValueError):
        decode_block(("T2", "T1", "E1", "E2"), 0, 2)
    with pytest.raises(ValueError):
        decode_block(("T1", "0"), 0, 1)


def test_decode_blocks_inside_v2():
    v = build_vh_wh(2).v
    starts = [i for i, a in enumerate(v) if a == "T2"]
    assert [decode_block(v, p, 2) for p in starts] == [0, 1, 2, 3]


def test_h_numbering_counts_copies():
    X = h_numbering(1)
    width = len(build_vh_wh(1).v)
    dots = dot_positions(build_vh_wh(1).v)
    for k in range(4):
        bits = tuple(int(k * width + p in X) for p in dots)
        assert bits == bin_h(k, 2)


def test_infer_h():
    assert infer_h(("T3", "E2")) == 2
    assert infer_h(("0", DOT)) == 1


def test_matcher():
    v = build_vh_wh(1).v
    assert vh_plus_matcher(v * 3, 1)
    assert not vh_plus_matcher(v[:-1], 1)
    assert not vh_plus_matcher((), 1)
