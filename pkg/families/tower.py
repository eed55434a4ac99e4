"""Codage tour d'exponentielles: μ_h(n), v_h, w_h et H-numérotation.

Les lettres sont sérialisées "0", "1", "T1".."T{h+1}" (balise ouvrante),
"E1".."E{h+1}" (balise fermante) et "dot" pour le séparateur •.
"""

import logging
from dataclasses import dataclass
from functools import lru_cache
from typing import List, Optional, Sequence, Set, Tuple

from logic.errors import GuardExceeded
from logic.guards import TOWER_MAX_H

logger = logging.getLogger(__name__)

DOT = "dot"
BITS = ("0", "1")


def open_tag(j: int) -> str:
    return f"T{j}"


def close_tag(j: int) -> str:
    return f"E{j}"


def tower(h: int) -> int:
    """Tower(0)=1, Tower(h+1)=2^Tower(h)"""
    value = 1
    for _ in range(h):
        value = 2**value
    return value


@lru_cache(maxsize=None)
def alphabet(h: int) -> Tuple[str, ...]:
    """Σ_h^• = Σ_{h+1} ∪ {•}"""
    if h < 1:
        raise ValueError(f"h doit être >= 1: {h}")
    tags = [open_tag(j) for j in range(1, h + 2)] + [close_tag(j) for j in range(1, h + 2)]
    return BITS + tuple(tags) + (DOT,)


def infer_h(letters: Sequence[str]) -> int:
    """Plus petit h dont l'alphabet contient toutes les balises du mot"""
    levels = [int(a[1:]) for a in letters if a[:1] in ("T", "E") and a[1:].isdigit()]
    return max(max(levels, default=2) - 1, 1)


def L(n: int) -> int:
    if n <= 1:
        return n
    return (n - 1).bit_length()


def bit(i: int, n: int) -> int:
    return (n >> i) & 1


def bin_h(n: int, width: int) -> Tuple[int, ...]:
    """Représentation binaire inversée (bit de poids faible en tête)"""
    return tuple(bit(i, n) for i in range(width))


@lru_cache(maxsize=None)
def mu(h: int, n: int) -> Tuple[str, ...]:
    if h < 1:
        raise ValueError(f"h doit être >= 1: {h}")
    letters: List[str] = [open_tag(h)]
    if n > 0:
        for i in range(L(n)):
            if h > 1:
                letters.extend(mu(h - 1, i))
            letters.append(BITS[bit(i, n - 1)])
    letters.append(close_tag(h))
    return tuple(letters)


@dataclass(frozen=True)
class TowerStrings:
    h: int
    H: int
    v: Tuple[str, ...]
    w: Tuple[str, ...]

    @property
    def copies(self) -> int:
        return 2**self.H


def _check_h(h: int):
    if h < 1:
        raise ValueError(f"h doit être >= 1: {h}")
    if h > TOWER_MAX_H:
        raise GuardExceeded("tower_h", h, TOWER_MAX_H)


@lru_cache(maxsize=None)
def build_vh_wh(h: int) -> TowerStrings:
    _check_h(h)
    H = tower(h)
    v: List[str] = [open_tag(h + 1)]
    for i in range(H):
        v.extend(mu(h, i))
        v.append(DOT)
    v.append(close_tag(h + 1))
    w = tuple(v) * (2**H)
    logger.info(f"Construction de v_{h} ({len(v)} lettres) et w_{h} ({len(w)} lettres)")
    return TowerStrings(h, H, tuple(v), w)


def ell(h: int) -> int:
    """ℓ(h) = |w_h| - 1, l'unique N tel que A_N ⊨ Ψ_h"""
    return len(build_vh_wh(h).w) - 1


def _parse_block(letters: Sequence[str], pos: int, h: int) -> Tuple[int, int]:
    """Décode le bloc μ_h commençant en pos; retourne (n, position de E_h)"""
    if pos >= len(letters) or letters[pos] != open_tag(h):
        raise ValueError(f"Bloc μ_{h} attendu en position {pos}")
    cursor = pos + 1
    bits: List[int] = []
    while cursor < len(letters) and letters[cursor] != close_tag(h):
        if h > 1:
            index, end = _parse_block(letters, cursor, h - 1)
            if index != len(bits):
                raise ValueError(f"Sous-bloc d'indice {index} en position {cursor}")
            cursor = end + 1
        if cursor >= len(letters) or letters[cursor] not in BITS:
            raise ValueError(f"Bit attendu en position {cursor}")
        bits.append(int(letters[cursor]))
        cursor += 1
    if cursor >= len(letters):
        raise ValueError(f"Bloc μ_{h} non fermé (début {pos})")
    if not bits:
        return 0, cursor
    return sum(b << i for i, b in enumerate(bits)) + 1, cursor


def decode_block(letters: Sequence[str], pos: int, h: int) -> int:
    return _parse_block(letters, pos, h)[0]


def block_starts(letters: Sequence[str], h: int) -> List[int]:
    return [i for i, a in enumerate(letters) if a == open_tag(h)]


def dot_positions(letters: Sequence[str]) -> List[int]:
    return [i for i, a in enumerate(letters) if a == DOT]


def h_numbering(h: int, copies: Optional[int] = None) -> Set[int]:
    """Ensemble X canonique: le i-ème • de la copie k porte bit(i, k)"""
    strings = build_vh_wh(h)
    copies = strings.copies if copies is None else copies
    dots = dot_positions(strings.v)
    width = len(strings.v)
    return {
        k * width + p
        for k in range(copies)
        for i, p in enumerate(dots)
        if bit(i, k)
    }


def vh_plus_matcher(letters: Sequence[str], h: int) -> bool:
    """Appartenance directe à (v_h)^+"""
    v = build_vh_wh(h).v
    letters = tuple(letters)
    if not letters or len(letters) % len(v):
        return False
    return all(
        letters[k : k + len(v)] == v for k in range(0, len(letters), len(v))
    )
