"""Séparateurs potentiels, poids et recherche de séparateur minimal.

Un séparateur potentiel associe un entier à chacune des 10 paires de
{min, max, x, y, z}. Pour un couple d'interprétations (I, J), la paire p est
activée dès que δ(p) atteint le seuil t_p(I, J): 1 si l'ordre diffère sur p,
max(1, min(|diff_I|, |diff_J|)) si seuls les écarts diffèrent, ∞ sinon.
"""

import logging
import math
import re
from dataclasses import dataclass
from itertools import product
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

import numpy as np

from logic.errors import FormulaSyntaxError
from logic.guards import DEFAULT_GUARDS, GuardConfig
from logic.structures import PRECEDENCE, Interpretation, lt_type

logger = logging.getLogger(__name__)

PAIRS: Tuple[Tuple[str, str], ...] = (
    ("min", "max"),
    ("x", "y"),
    ("x", "z"),
    ("y", "z"),
    ("min", "x"),
    ("min", "y"),
    ("min", "z"),
    ("x", "max"),
    ("y", "max"),
    ("z", "max"),
)
PAIR_INDEX: Dict[frozenset, int] = {frozenset(p): i for i, p in enumerate(PAIRS)}
VARIABLES = ("x", "y", "z")
CENTRE = (1, 2, 3)
LEFT = (4, 5, 6)
RIGHT = (7, 8, 9)

# seuil infini, assez petit pour rester exact en int64
INF = 2**40

PAIR_RE = re.compile(r"\{\s*(\w+)\s*,\s*(\w+)\s*\}\s*:\s*(\d+)")


@dataclass(frozen=True)
class PotentialSeparator:
    entries: Tuple[int, ...]

    def __post_init__(self):
        if len(self.entries) != len(PAIRS):
            raise ValueError(f"{len(PAIRS)} entrées attendues, {len(self.entries)} reçues")
        if any(e < 0 for e in self.entries):
            raise ValueError(f"Entrée négative: {self.entries}")

    @classmethod
    def from_mapping(cls, values: Dict[Tuple[str, str], int]) -> "PotentialSeparator":
        entries = [0] * len(PAIRS)
        for pair, value in values.items():
            entries[PAIR_INDEX[frozenset(pair)]] = int(value)
        return cls(tuple(entries))

    @classmethod
    def zero(cls) -> "PotentialSeparator":
        return cls((0,) * len(PAIRS))

    def __getitem__(self, pair: Iterable[str]) -> int:
        return self.entries[PAIR_INDEX[frozenset(pair)]]

    def as_dict(self) -> Dict[str, int]:
        return {f"{{{a},{b}}}": e for (a, b), e in zip(PAIRS, self.entries)}

    def __str__(self) -> str:
        return format_separator(self)


@dataclass(frozen=True)
class Weight:
    """w = sqrt(c² + b), comparé exactement via squared"""

    c: int
    b: int

    @property
    def squared(self) -> int:
        return self.c * self.c + self.b

    @property
    def value(self) -> float:
        return math.sqrt(self.squared)

    def __str__(self) -> str:
        return f"sqrt({self.squared}) ≈ {self.value:.4f}"


# ---------------------------------------------------------------- littéral


def format_separator(delta: PotentialSeparator) -> str:
    return " ".join(f"{{{a},{b}}}:{e}" for (a, b), e in zip(PAIRS, delta.entries))


def parse_separator(text: str) -> PotentialSeparator:
    values: Dict[Tuple[str, str], int] = {}
    cursor = 0
    for match in PAIR_RE.finditer(text):
        if text[cursor : match.start()].strip():
            raise FormulaSyntaxError("Entrée de séparateur invalide", cursor)
        pair = frozenset((match.group(1), match.group(2)))
        if pair not in PAIR_INDEX:
            raise FormulaSyntaxError(f"Paire inconnue: {match.group(0)}", match.start())
        values[(match.group(1), match.group(2))] = int(match.group(3))
        cursor = match.end()
    if text[cursor:].strip():
        raise FormulaSyntaxError("Entrée de séparateur invalide", cursor)
    if len({frozenset(p) for p in values}) != len(PAIRS):
        raise FormulaSyntaxError("Les 10 paires doivent être données", len(text))
    return PotentialSeparator.from_mapping(values)


# ---------------------------------------------------------------- seuils


def thresholds(I: Interpretation, J: Interpretation) -> Tuple[Optional[int], ...]:
    """Seuils t_p(I, J) dans l'ordre canonique des paires (None pour ∞)"""
    result: List[Optional[int]] = []
    for a, b in PAIRS:
        dI = I.value(b) - I.value(a)
        dJ = J.value(b) - J.value(a)
        if lt_type(I.value(a), I.value(b)) != lt_type(J.value(a), J.value(b)):
            result.append(1)
        elif dI != dJ:
            result.append(max(1, min(abs(dI), abs(dJ))))
        else:
            result.append(None)
    return tuple(result)


def _values(interpretations: Sequence[Interpretation]) -> np.ndarray:
    return np.array(
        [[i.value(u) for u in PRECEDENCE] for i in interpretations], dtype=np.int64
    ).reshape(len(interpretations), len(PRECEDENCE))


def threshold_matrix(
    A: Sequence[Interpretation], B: Sequence[Interpretation]
) -> np.ndarray:
    """Seuils de tous les couples (I, J), forme (|A|·|B|, 10), INF pour ∞"""
    va, vb = _values(A), _values(B)
    columns = []
    for a, b in PAIRS:
        ia, ib = PRECEDENCE.index(a), PRECEDENCE.index(b)
        dA = (va[:, ib] - va[:, ia])[:, None]
        dB = (vb[:, ib] - vb[:, ia])[None, :]
        gap = np.maximum(1, np.minimum(np.abs(dA), np.abs(dB)))
        column = np.where(dA != dB, gap, INF)
        column = np.where(np.sign(dA) != np.sign(dB), 1, column)
        columns.append(column.reshape(-1))
    return np.stack(columns, axis=1) if columns[0].size else np.zeros((0, len(PAIRS)), dtype=np.int64)


def _separates(entries: np.ndarray, table: np.ndarray) -> bool:
    return bool((entries[None, :] >= table).any(axis=1).all())


def is_separator(
    delta: PotentialSeparator, A: Sequence[Interpretation], B: Sequence[Interpretation]
) -> bool:
    if not A or not B:
        return True
    return _separates(np.array(delta.entries, dtype=np.int64), threshold_matrix(A, B))


# ---------------------------------------------------------------- poids


def border_distance(delta: PotentialSeparator) -> int:
    e = delta.entries
    return max(e[0], max(e[i] for i in LEFT) + max(e[i] for i in RIGHT))


def centre_distance(delta: PotentialSeparator) -> int:
    centre = sorted((delta.entries[i] for i in CENTRE), reverse=True)
    return centre[0] + centre[1]


def weight(delta: PotentialSeparator) -> Weight:
    return Weight(centre_distance(delta), border_distance(delta))


def weight_le_sum(w: Weight, w1: Weight, w2: Weight) -> bool:
    """w ≤ w1 + w2, en arithmétique entière"""
    D = w.squared - w1.squared - w2.squared
    return D <= 0 or D * D <= 4 * w1.squared * w2.squared


def weight_le_plus_two(w: Weight, w1: Weight) -> bool:
    """w ≤ w1 + 2"""
    D = w.squared - w1.squared - 4
    return D <= 0 or D * D <= 16 * w1.squared


def weight_le_one(w: Weight) -> bool:
    return w.squared <= 1


def half_weight_le(nodes: int, w: Weight) -> bool:
    """nodes ≥ ½·w"""
    return 4 * nodes * nodes >= w.squared


# ---------------------------------------------------------------- constructions


def separator_from_depth(d: int) -> PotentialSeparator:
    return PotentialSeparator((2 ** (d + 1),) * len(PAIRS))


def cor4_separator(m: int) -> PotentialSeparator:
    if m < 1:
        raise ValueError(f"m doit être >= 1: {m}")
    return PotentialSeparator.from_mapping({("min", "max"): m})


def combine_boolean(d1: PotentialSeparator, d2: PotentialSeparator) -> PotentialSeparator:
    return PotentialSeparator(tuple(a + b for a, b in zip(d1.entries, d2.entries)))


def lift_quantifier(d1: PotentialSeparator, u: str) -> PotentialSeparator:
    """Séparateur du noeud ∃u / ∀u à partir de celui de son fils"""
    if u not in VARIABLES:
        raise ValueError(f"Variable quantifiée inconnue: {u}")
    values: Dict[Tuple[str, str], int] = {}
    for a, b in PAIRS:
        if u in (a, b):
            values[(a, b)] = 0
        else:
            values[(a, b)] = max(d1[(a, b)], d1[(a, u)] + d1[(u, b)] + 1)
    return PotentialSeparator.from_mapping(values)


# ---------------------------------------------------------------- recherche


def _normal_form_rows(table: np.ndarray) -> np.ndarray:
    """(t_M, t_L, t_R, t_xy, t_xz, t_yz) par couple, lignes dominées retirées"""
    rows = np.stack(
        [
            table[:, 0],
            table[:, list(LEFT)].min(axis=1),
            table[:, list(RIGHT)].min(axis=1),
            table[:, 1],
            table[:, 2],
            table[:, 3],
        ],
        axis=1,
    )
    rows = np.unique(rows, axis=0)
    keep = np.ones(len(rows), dtype=bool)
    for i, row in enumerate(rows):
        above = (rows >= row).all(axis=1) & (rows != row).any(axis=1)
        keep[i] = not above.any()
    return rows[keep]


def _candidates(column: np.ndarray) -> np.ndarray:
    return np.unique(np.concatenate([[0], column[column < INF]]))


def minimal_separator(
    A: Sequence[Interpretation],
    B: Sequence[Interpretation],
    guards: GuardConfig = DEFAULT_GUARDS,
) -> Optional[PotentialSeparator]:
    """Séparateur de poids minimal pour ⟨A, B⟩, None s'il n'en existe pas"""
    A, B = list(A), list(B)
    if not A or not B:
        return PotentialSeparator.zero()
    guards.check("separator_pairs", len(A) * len(B))
    table = threshold_matrix(A, B)
    if (table >= INF).all(axis=1).any():
        logger.info("Aucun séparateur: un couple (I, J) est indiscernable")
        return None
    rows = _normal_form_rows(table)
    tM, tL, tR = rows[:, 0], rows[:, 1], rows[:, 2]
    centre_rows = rows[:, 3:]
    cand = [_candidates(rows[:, k]) for k in range(6)]
    triples = sorted(
        product(*cand[3:]),
        key=lambda t: (sum(sorted(t)[1:]), t),
    )
    logger.info(
        f"Recherche de séparateur minimal: {len(rows)} contraintes, "
        f"{len(triples)} centres x {len(cand[1])} x {len(cand[2])} bords"
    )
    Lc, Rc = cand[1], cand[2]
    best: Optional[Tuple[int, Tuple[int, ...]]] = None
    evaluated = 0
    for triple in triples:
        c = sum(sorted(triple)[1:])
        if best is not None and c * c > best[0]:
            break
        uncovered = ~(centre_rows <= np.array(triple)[None, :]).any(axis=1)
        evaluated += len(Lc) * len(Rc)
        guards.check("separator_candidates", evaluated)
        mask_L = tL[None, :] > Lc[:, None]
        mask_R = tR[None, :] > Rc[:, None]
        open_rows = mask_L[:, None, :] & mask_R[None, :, :] & uncovered[None, None, :]
        M = np.where(open_rows, tM[None, None, :], 0).max(axis=2, initial=0)
        b = np.maximum(M, Lc[:, None] + Rc[None, :])
        squared = np.where(M >= INF, INF, c * c + b)
        index = np.unravel_index(np.argmin(squared), squared.shape)
        value = int(squared[index])
        if value >= INF:
            continue
        if best is None or value < best[0]:
            L, R = int(Lc[index[0]]), int(Rc[index[1]])
            best = (value, (int(M[index]), L, R) + tuple(int(t) for t in triple))
    if best is None:
        return None
    M, L, R, cxy, cxz, cyz = best[1]
    entries = np.array([M, cxy, cxz, cyz, L, L, L, R, R, R], dtype=np.int64)
    # abaissement entrée par entrée, ordre canonique
    for k in range(len(PAIRS)):
        for value in _candidates(table[:, k]):
            if value >= entries[k]:
                break
            trial = entries.copy()
            trial[k] = value
            if _separates(trial, table):
                entries = trial
                break
    delta = PotentialSeparator(tuple(int(e) for e in entries))
    logger.info(f"Séparateur minimal trouvé: {delta} (poids {weight(delta)})")
    return delta
