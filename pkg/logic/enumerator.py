"""Énumération exhaustive de formules FO^k et oracles de taille minimale.

Chaque formule est représentée par son vecteur de vérité sur un ensemble de
sondes: toutes les affectations de (x, y, z) sur une liste d'ordres A_N. Deux
formules de même vecteur (et de mêmes variables libres) sont fusionnées, la
plus petite étant gardée. Les produits de niveaux sont calculés par lots numpy.
"""

import logging
from dataclasses import dataclass, field
from typing import Dict, Iterator, List, Optional, Sequence, Tuple

import numpy as np

from logic.errors import GuardExceeded, InvariantViolation
from logic.evaluator import eval_fo
from logic.formula import (
    FO3_VARIABLES,
    Atom,
    Binary,
    Formula,
    Not,
    Quantified,
    Signature,
    Term,
    free_variables,
    quantifier_depth,
)
from logic.guards import DEFAULT_GUARDS, GuardConfig
from logic.structures import (
    Interpretation,
    LinearOrder,
    d_type,
    interpretations_over,
)

logger = logging.getLogger(__name__)

DEFAULT_PROBES = tuple(range(6))
VAR_BITS = {"x": 1, "y": 2, "z": 4}
# lots de produits binaires: nombre de cellules booléennes par bloc
CHUNK_CELLS = 2**25


@dataclass
class _Classes:
    formulas: List[Formula]
    vectors: np.ndarray
    free: np.ndarray
    depth: np.ndarray


class Enumerator:
    """Classes sémantiques de formules, taille par taille"""

    def __init__(
        self,
        signature: Signature,
        width: int,
        probes: Sequence[int] = DEFAULT_PROBES,
        max_depth: Optional[int] = None,
        guards: GuardConfig = DEFAULT_GUARDS,
    ):
        if not 0 <= width <= len(FO3_VARIABLES):
            raise ValueError(f"Largeur hors de [0, 3]: {width}")
        self.signature = signature
        self.variables = FO3_VARIABLES[:width]
        self.probes = tuple(sorted(set(probes)))
        self.max_depth = max_depth
        self.guards = guards
        self.levels: Dict[int, _Classes] = {}
        self._seen: set = set()
        self._offsets: Dict[int, int] = {}
        coords = {"x": [], "y": [], "z": [], "min": [], "max": []}
        offset = 0
        for N in self.probes:
            self._offsets[N] = offset
            grid = np.indices((N + 1,) * 3).reshape(3, -1)
            for axis, name in enumerate(FO3_VARIABLES):
                coords[name].append(grid[axis])
            coords["min"].append(np.zeros(grid.shape[1], dtype=np.int64))
            coords["max"].append(np.full(grid.shape[1], N, dtype=np.int64))
            offset += grid.shape[1]
        self.universe = offset
        self._coords = {k: np.concatenate(v) for k, v in coords.items()}

    # ------------------------------------------------------------ sondes

    def column(self, i: Interpretation) -> int:
        if i.N not in self._offsets:
            raise ValueError(f"A_{i.N} absent des sondes")
        n = i.N + 1
        return self._offsets[i.N] + (i.x * n + i.y) * n + i.z

    def _quantify(self, vectors: np.ndarray, var: str, existential: bool) -> np.ndarray:
        axis = FO3_VARIABLES.index(var) + 1
        parts = []
        for N in self.probes:
            n = N + 1
            start = self._offsets[N]
            block = vectors[:, start : start + n**3].reshape(-1, n, n, n)
            reduced = block.any(axis=axis, keepdims=True) if existential else block.all(axis=axis, keepdims=True)
            parts.append(np.broadcast_to(reduced, block.shape).reshape(len(vectors), -1))
        return np.concatenate(parts, axis=1)

    # ------------------------------------------------------------ niveaux

    def _terms(self) -> List[str]:
        terms = list(self.variables)
        if self.signature.min:
            terms.append("min")
        if self.signature.max:
            terms.append("max")
        return terms

    def _keys(self, vectors: np.ndarray, free: np.ndarray, depth: np.ndarray) -> np.ndarray:
        extra = [free[:, None].astype(np.uint8)]
        if self.max_depth is not None:
            extra.append(depth[:, None].astype(np.uint8))
        packed = np.concatenate([np.packbits(vectors, axis=1)] + extra, axis=1)
        return np.ascontiguousarray(packed).view(np.dtype((np.void, packed.shape[1]))).ravel()

    def _admit(
        self,
        vectors: np.ndarray,
        free: np.ndarray,
        depth: np.ndarray,
        make,
        accepted: _Classes,
    ):
        """Ajoute les candidats nouveaux; make(i) construit la formule du candidat i"""
        if not len(vectors):
            return
        if self.max_depth is not None:
            keep = depth <= self.max_depth
            idx = np.flatnonzero(keep)
            vectors, free, depth = vectors[keep], free[keep], depth[keep]
        else:
            idx = np.arange(len(vectors))
        keys = self._keys(vectors, free, depth)
        _, first = np.unique(keys, return_index=True)
        for k in np.sort(first):
            key = keys[k].tobytes()
            if key in self._seen:
                continue
            self._seen.add(key)
            accepted.formulas.append(make(int(idx[k])))
            accepted.vectors.append(vectors[k])
            accepted.free.append(int(free[k]))
            accepted.depth.append(int(depth[k]))

    def _atoms(self) -> _Classes:
        relations = ["<", "="] + (["succ"] if self.signature.succ else [])
        terms = self._terms()
        candidates = [(r, a, b) for r in relations for a in terms for b in terms]
        ops = {"<": np.less, "=": np.equal, "succ": lambda a, b: a + 1 == b}
        vectors = np.array(
            [ops[r](self._coords[a], self._coords[b]) for r, a, b in candidates], dtype=bool
        ).reshape(len(candidates), self.universe)
        free = np.array([VAR_BITS.get(a, 0) | VAR_BITS.get(b, 0) for _, a, b in candidates], dtype=np.uint8)
        depth = np.zeros(len(candidates), dtype=np.uint8)
        accepted = _Classes([], [], [], [])
        self._admit(
            vectors,
            free,
            depth,
            lambda i: Atom(candidates[i][0], (Term(candidates[i][1]), Term(candidates[i][2]))),
            accepted,
        )
        return accepted

    def _next_level(self, s: int) -> _Classes:
        accepted = _Classes([], [], [], [])
        previous = self.levels.get(s - 1)
        if previous is not None and len(previous.formulas):
            self._admit(
                ~previous.vectors,
                previous.free,
                previous.depth,
                lambda i: Not(previous.formulas[i]),
                accepted,
            )
            for var in self.variables:
                bit = VAR_BITS[var]
                for kind in ("exists", "forall"):
                    self._admit(
                        self._quantify(previous.vectors, var, kind == "exists"),
                        previous.free & ~np.uint8(bit),
                        previous.depth + 1,
                        lambda i, var=var, kind=kind: Quantified(kind, var, previous.formulas[i]),
                        accepted,
                    )
        for l in range(1, s - 1):
            r = s - 1 - l
            left, right = self.levels.get(l), self.levels.get(r)
            if left is None or right is None or not len(left.formulas) or not len(right.formulas):
                continue
            for op in ("and", "or", "imp"):
                if op != "imp" and l > r:
                    continue
                self._binary(op, left, right, l == r and op != "imp", accepted)
        return accepted

    def _binary(self, op: str, left: _Classes, right: _Classes, triangle: bool, accepted: _Classes):
        kb = len(right.formulas)
        chunk = max(1, CHUNK_CELLS // max(1, kb * self.universe))
        for start in range(0, len(left.formulas), chunk):
            rows = np.arange(start, min(start + chunk, len(left.formulas)))
            a = left.vectors[rows][:, None, :]
            b = right.vectors[None, :, :]
            if op == "and":
                product = a & b
            elif op == "or":
                product = a | b
            else:
                product = ~a | b
            ii, jj = np.meshgrid(rows, np.arange(kb), indexing="ij")
            mask = (jj >= ii) if triangle else np.ones_like(ii, dtype=bool)
            ii, jj = ii[mask], jj[mask]
            vectors = product[mask]
            free = left.free[ii] | right.free[jj]
            depth = np.maximum(left.depth[ii], right.depth[jj])
            self._admit(
                vectors,
                free,
                depth,
                lambda k, ii=ii, jj=jj: Binary(op, left.formulas[ii[k]], right.formulas[jj[k]]),
                accepted,
            )

    @staticmethod
    def _freeze(classes: _Classes, universe: int) -> _Classes:
        return _Classes(
            classes.formulas,
            np.array(classes.vectors, dtype=bool).reshape(len(classes.formulas), universe),
            np.array(classes.free, dtype=np.uint8),
            np.array(classes.depth, dtype=np.uint8),
        )

    def run(self, max_size: int) -> "Enumerator":
        self.guards.check("enumerator_max_size", max_size)
        for s in range(len(self.levels) + 1, max_size + 1):
            level = self._atoms() if s == 1 else self._next_level(s)
            self.levels[s] = self._freeze(level, self.universe)
            logger.info(f"Énumération taille {s}: {len(level.formulas)} classes nouvelles")
        return self

    def classes_by_size(self) -> Dict[int, int]:
        return {s: len(c.formulas) for s, c in self.levels.items()}

    def sentences(self) -> Iterator[Tuple[Formula, np.ndarray]]:
        for s in sorted(self.levels):
            level = self.levels[s]
            ranked = sorted(np.flatnonzero(level.free == 0), key=lambda k: str(level.formulas[k]))
            for k in ranked:
                yield level.formulas[k], level.vectors[k]


def enumerate_sentences(
    signature: Signature,
    width: int,
    max_size: int,
    guards: GuardConfig = DEFAULT_GUARDS,
    probes: Sequence[int] = DEFAULT_PROBES,
) -> Iterator[Formula]:
    """Phrases jusqu'à max_size, une par classe sémantique, par taille croissante"""
    guards.check("enumerator_max_size", max_size)
    logger.info(
        f"Énumération: largeur {width}, taille <= {max_size}, {len(probes)} structures sondes"
    )
    enumerator = Enumerator(signature, width, probes, guards=guards).run(max_size)
    for formula, _ in enumerator.sentences():
        yield formula


@dataclass(frozen=True)
class MinimalSentence:
    size: int
    formula: Formula


def min_distinguishing_size(
    signature: Signature,
    width: int,
    A: Sequence[Interpretation],
    B: Sequence[Interpretation],
    cap: int,
    guards: GuardConfig = DEFAULT_GUARDS,
) -> Optional[MinimalSentence]:
    """Plus petite phrase vraie sur A et fausse sur B, None si aucune jusqu'à cap"""
    guards.check("enumerator_max_size", cap)
    probes = set(DEFAULT_PROBES) | {i.N for i in A} | {j.N for j in B}
    enumerator = Enumerator(signature, width, sorted(probes), guards=guards)
    cols_A = [enumerator.column(i) for i in A]
    cols_B = [enumerator.column(j) for j in B]
    for s in range(1, cap + 1):
        enumerator.run(s)
        level = enumerator.levels[s]
        for k in np.flatnonzero(level.free == 0):
            vector = level.vectors[k]
            if vector[cols_A].all() and not vector[cols_B].any():
                formula = level.formulas[k]
                exact = all(eval_fo(formula, i.structure, guards=guards) for i in A) and not any(
                    eval_fo(formula, j.structure, guards=guards) for j in B
                )
                if not exact:
                    raise InvariantViolation(
                        f"Vecteur de sonde incohérent pour {formula}", str(formula)
                    )
                logger.info(f"Taille minimale {s}: {formula}")
                return MinimalSentence(s, formula)
    logger.info(f"Aucune phrase distinguante jusqu'à la taille {cap}")
    return None


# ---------------------------------------------------------------- types de rang


def _atomic_key(i: Interpretation) -> Tuple[bool, ...]:
    terms = ("min", "max") + FO3_VARIABLES
    values = [i.value(t) for t in terms]
    return tuple(a < b for a in values for b in values) + tuple(a == b for a in values for b in values)


def rank_types(d: int, n_max: int) -> Dict[Interpretation, int]:
    """Classes d'équivalence FO³(<, min, max) de profondeur d par raffinement"""
    interpretations = [i for N in range(n_max + 1) for i in interpretations_over(N)]
    ids: Dict[tuple, int] = {}
    classes = {i: ids.setdefault(("atoms", _atomic_key(i)), len(ids)) for i in interpretations}
    for _ in range(d):
        ids = {}
        refined = {}
        for i in interpretations:
            moves = tuple(
                frozenset(classes[i.with_value(v, a)] for a in range(i.N + 1))
                for v in FO3_VARIABLES
            )
            refined[i] = ids.setdefault((classes[i], moves), len(ids))
        classes = refined
    return classes


@dataclass
class Lemma3Report:
    d: int
    n_max: int
    interpretations: int = 0
    type_groups: int = 0
    formulas_checked: int = 0
    rank_counterexamples: List[Tuple[str, str]] = field(default_factory=list)
    enumeration_counterexamples: List[Tuple[str, str, str]] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.rank_counterexamples and not self.enumeration_counterexamples


def check_lemma3(
    d: int,
    n_max: int,
    max_size: int = 6,
    guards: GuardConfig = DEFAULT_GUARDS,
) -> Lemma3Report:
    """Même d-type ⇒ indiscernables par les formules de profondeur ≤ d"""
    guards.check("lemma3_max_depth", d)
    guards.check("lemma3_max_n", n_max)
    report = Lemma3Report(d, n_max)
    groups: Dict[tuple, List[Interpretation]] = {}
    for N in range(n_max + 1):
        for i in interpretations_over(N):
            t = d_type(i, d)
            groups.setdefault((t.ord, t.dist), []).append(i)
    report.interpretations = sum(len(g) for g in groups.values())
    report.type_groups = len(groups)
    logger.info(
        f"Vérification des d-types: d={d}, N<={n_max}, {report.interpretations} interprétations, "
        f"{report.type_groups} types"
    )
    classes = rank_types(d, n_max)
    for members in groups.values():
        first = members[0]
        for other in members[1:]:
            if classes[other] != classes[first]:
                report.rank_counterexamples.append((str(first), str(other)))
    try:
        enumerator = Enumerator(
            Signature.order(succ=False), 3, range(n_max + 1), max_depth=d, guards=guards
        ).run(max_size)
    except GuardExceeded as e:
        logger.warning(f"Énumération de contrôle abandonnée: {e}")
        return report
    columns = [[enumerator.column(i) for i in members] for members in groups.values()]
    for level in enumerator.levels.values():
        report.formulas_checked += len(level.formulas)
        for members, cols in zip(groups.values(), columns):
            if len(cols) < 2:
                continue
            block = level.vectors[:, cols]
            bad = np.flatnonzero((block != block[:, :1]).any(axis=1))
            for k in bad:
                j = int(np.flatnonzero(block[k] != block[k, 0])[0])
                report.enumeration_counterexamples.append(
                    (str(level.formulas[k]), str(members[0]), str(members[j]))
                )
    if not report.ok:
        logger.error(f"Contre-exemples au lemme des d-types: {report}")
    return report


# ---------------------------------------------------------------- corpus


def _random_formula(rng: np.random.Generator, target: int, bound: Tuple[str, ...]) -> Formula:
    terms = list(bound) + ["min", "max"]
    if target == 1:
        relation = ("<", "=", "succ")[rng.integers(3)]
        a, b = (terms[k] for k in rng.integers(len(terms), size=2))
        return Atom(relation, (Term(a), Term(b)))
    choices = ["not", "quant"] + (["binary"] if target >= 3 else [])
    choice = choices[rng.integers(len(choices))]
    if choice == "not":
        return Not(_random_formula(rng, target - 1, bound))
    if choice == "quant":
        var = FO3_VARIABLES[rng.integers(3)]
        kind = ("exists", "forall")[rng.integers(2)]
        return Quantified(kind, var, _random_formula(rng, target - 1, tuple(sorted(set(bound) | {var}))))
    left = int(rng.integers(1, target - 1))
    op = ("and", "or", "imp")[rng.integers(3)]
    return Binary(
        op,
        _random_formula(rng, left, bound),
        _random_formula(rng, target - 1 - left, bound),
    )


def corpus_sentences(
    count: int,
    max_size: int,
    seed: int = 0,
    max_depth: Optional[int] = None,
) -> List[Formula]:
    """Phrases FO³(<, succ, min, max) aléatoires, déterministes pour une graine"""
    rng = np.random.default_rng(seed)
    corpus: List[Formula] = []
    seen = set()
    attempts = 0
    while len(corpus) < count:
        attempts += 1
        if attempts > 1000 * count:
            raise InvariantViolation(f"Corpus incomplet après {attempts} tirages")
        f = _random_formula(rng, int(rng.integers(1, max_size + 1)), ())
        if free_variables(f) or (max_depth is not None and quantifier_depth(f) > max_depth):
            continue
        text = str(f)
        if text in seen:
            continue
        seen.add(text)
        corpus.append(f)
    logger.info(f"Corpus de {count} phrases (taille <= {max_size}, graine {seed})")
    return corpus


def structures_distinguished(f: Formula, m: int, n: int, guards: GuardConfig = DEFAULT_GUARDS) -> Optional[bool]:
    """True si f vraie sur A_m et fausse sur A_n, False pour l'inverse, None sinon"""
    on_m = eval_fo(f, LinearOrder(m), guards=guards)
    on_n = eval_fo(f, LinearOrder(n), guards=guards)
    if on_m == on_n:
        return None
    return on_m
