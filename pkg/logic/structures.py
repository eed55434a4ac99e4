"""Ordres linéaires A_N, mots étiquetés, interprétations et d-types."""

import logging
import re
from dataclasses import dataclass
from itertools import product
from typing import Dict, Iterator, List, Optional, Tuple, Union

import numpy as np

from logic.errors import FormulaSyntaxError, SignatureError, TypeMismatchError

logger = logging.getLogger(__name__)

# Précédence fixe pour départager les égalités dans ORD
PRECEDENCE = ("min", "x", "y", "z", "max")

STRUCTURE_RE = re.compile(r"A:(\d+)\Z")


@dataclass(frozen=True)
class LinearOrder:
    """A_N: univers {0..N} avec <, succ, min=0, max=N"""

    N: int

    def __post_init__(self):
        if self.N < 0:
            raise ValueError(f"N négatif: {self.N}")

    @property
    def universe_size(self) -> int:
        return self.N + 1

    @property
    def alphabet(self) -> Tuple[str, ...]:
        return ()

    def constant(self, name: str) -> int:
        return 0 if name == "min" else self.N

    def letter_mask(self, name: str) -> np.ndarray:
        raise SignatureError(f"Lettre '{name}' évaluée sur un ordre sans lettres")

    def __str__(self) -> str:
        return f"A:{self.N}"


@dataclass(frozen=True)
class LabeledString:
    """Mot non vide sur Σ_h^•, positions numérotées à partir de 0"""

    letters: Tuple[str, ...]
    h: int

    def __post_init__(self):
        from families.tower import alphabet

        if not self.letters:
            raise ValueError("Mot vide")
        allowed = set(alphabet(self.h))
        unknown = sorted(set(self.letters) - allowed)
        if unknown:
            raise SignatureError(f"Lettres hors de Σ_{self.h}^•: {unknown}")

    @property
    def universe_size(self) -> int:
        return len(self.letters)

    @property
    def N(self) -> int:
        return len(self.letters) - 1

    @property
    def alphabet(self) -> Tuple[str, ...]:
        from families.tower import alphabet

        return alphabet(self.h)

    def constant(self, name: str) -> int:
        return 0 if name == "min" else len(self.letters) - 1

    def letter_mask(self, name: str) -> np.ndarray:
        if name not in self.alphabet:
            raise SignatureError(f"Lettre inconnue: {name}")
        return np.array([a == name for a in self.letters], dtype=bool)

    def positions(self, name: str) -> List[int]:
        return [i for i, a in enumerate(self.letters) if a == name]

    def __add__(self, other: "LabeledString") -> "LabeledString":
        return LabeledString(self.letters + other.letters, max(self.h, other.h))

    def __mul__(self, k: int) -> "LabeledString":
        return LabeledString(self.letters * k, self.h)

    def __len__(self) -> int:
        return len(self.letters)

    def __str__(self) -> str:
        return " ".join(self.letters)


Structure = Union[LinearOrder, LabeledString]


@dataclass(frozen=True)
class Interpretation:
    """(A_N, α) avec α: {x,y,z} -> {0..N}, étendue à min et max"""

    structure: LinearOrder
    x: int = 0
    y: int = 0
    z: int = 0

    def __post_init__(self):
        for name in ("x", "y", "z"):
            value = getattr(self, name)
            if not 0 <= value <= self.structure.N:
                raise ValueError(
                    f"α({name})={value} hors de l'univers de {self.structure}"
                )

    @property
    def N(self) -> int:
        return self.structure.N

    def value(self, name: str) -> int:
        if name == "min":
            return 0
        if name == "max":
            return self.structure.N
        return getattr(self, name)

    @property
    def assignment(self) -> Dict[str, int]:
        return {"x": self.x, "y": self.y, "z": self.z}

    def with_value(self, var: str, value: int) -> "Interpretation":
        values = self.assignment
        values[var] = value
        return Interpretation(self.structure, **values)

    def __str__(self) -> str:
        return f"A:{self.N} x:{self.x} y:{self.y} z:{self.z}"


@dataclass(frozen=True)
class DType:
    ord: Tuple[str, ...]
    dist: Tuple[int, ...]
    d: int


def diff(m: int, n: int) -> int:
    return m - n


def lt_type(m: int, n: int) -> str:
    if m < n:
        return "<"
    if m == n:
        return "="
    return ">"


def d_type(i: Interpretation, d: int) -> DType:
    cap = 2 ** (d + 1)
    ordering = tuple(sorted(PRECEDENCE, key=lambda u: (i.value(u), PRECEDENCE.index(u))))
    dist = tuple(
        min(i.value(b) - i.value(a), cap) for a, b in zip(ordering, ordering[1:])
    )
    return DType(ordering, dist, d)


def types_equal(t1: DType, t2: DType) -> bool:
    if t1.d != t2.d:
        raise TypeMismatchError(f"d différents: {t1.d} et {t2.d}")
    return t1.ord == t2.ord and t1.dist == t2.dist


def interpretations_over(N: int) -> Iterator[Interpretation]:
    order = LinearOrder(N)
    for x, y, z in product(range(N + 1), repeat=3):
        yield Interpretation(order, x, y, z)


# ---------------------------------------------------------------- littéraux


def parse_structure(text: str) -> LinearOrder:
    match = STRUCTURE_RE.match(text.strip())
    if not match:
        raise FormulaSyntaxError(f"Structure invalide '{text}' (attendu A:N)", 0)
    return LinearOrder(int(match.group(1)))


def parse_string(text: str, h: Optional[int] = None) -> LabeledString:
    """Mot donné par ses lettres séparées par des espaces"""
    from families.tower import infer_h

    letters = tuple(text.split())
    if not letters:
        raise FormulaSyntaxError("Mot vide", 0)
    return LabeledString(letters, h if h is not None else infer_h(letters))


def parse_assignment(text: Optional[str]) -> Dict[str, int]:
    """'x=3,y=0,z=7'; les variables absentes valent 0"""
    values = {"x": 0, "y": 0, "z": 0}
    if not text:
        return values
    for part in text.split(","):
        name, sep, raw = part.partition("=")
        name = name.strip()
        if not sep or not raw.strip().isdigit():
            raise FormulaSyntaxError(f"Affectation invalide: '{part}'", text.find(part))
        values[name] = int(raw)
    return values


def parse_interpretation(text: str) -> Interpretation:
    """'A:N' ou 'A:N x:a y:b z:c' (variables absentes à 0)"""
    parts = text.split()
    if not parts:
        raise FormulaSyntaxError("Interprétation vide", 0)
    order = parse_structure(parts[0])
    values = {"x": 0, "y": 0, "z": 0}
    for part in parts[1:]:
        name, sep, raw = part.partition(":")
        if name not in values or not sep or not raw.isdigit():
            raise FormulaSyntaxError(
                f"Affectation invalide: '{part}'", text.find(part)
            )
        values[name] = int(raw)
    return Interpretation(order, **values)
