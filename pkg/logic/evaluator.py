"""Model checking FO sur ordres linéaires et mots, MSO sur mots.

Chaque sous-formule est évaluée en une table booléenne numpy indexée par ses
seules variables libres. Un bloc de quantificateurs est traité en décomposant
son corps en disjonction de conjonctions de littéraux: les égalités sont
substituées, les autres facteurs sont contractés avec numpy.einsum.

Les ensembles (MSO) sont représentés par deux vecteurs (bas, haut). Tant
qu'une position n'est pas décidée, elle est absente du vecteur bas et présente
dans le vecteur haut; l'évaluation calcule alors une borne inférieure ou
supérieure de la valeur de vérité (logique de Kleene), la négation échangeant
les deux bornes.
"""

import logging
from dataclasses import dataclass
from enum import Enum
from itertools import product
from string import ascii_letters
from typing import Dict, Iterable, List, Optional, Tuple, Union

import numpy as np

from logic.errors import (
    GuardExceeded,
    InvariantViolation,
    SignatureError,
    UnassignedVariableError,
    WitnessArityError,
)
from logic.formula import (
    Atom,
    Binary,
    Formula,
    Not,
    Quantified,
    free_set_variables,
    free_variables,
    quantifier_depth,
    uses_sets,
)
from logic.guards import DEFAULT_GUARDS, GuardConfig
from logic.structures import LinearOrder, Structure

logger = logging.getLogger(__name__)

Literal = Tuple[Formula, bool]


class Verdict(str, Enum):
    TRUE = "true"
    FALSE = "false"
    INCONCLUSIVE = "inconclusive"

    @classmethod
    def of(cls, value: bool) -> "Verdict":
        return cls.TRUE if value else cls.FALSE


@dataclass
class Table:
    vars: Tuple[str, ...]
    data: np.ndarray

    def value(self, assignment: Dict[str, int]) -> bool:
        if not self.vars:
            return bool(self.data)
        try:
            index = tuple(assignment[v] for v in self.vars)
        except KeyError as e:
            raise UnassignedVariableError(f"Variable libre non affectée: {e}")
        return bool(self.data[index])


@dataclass(frozen=True)
class Stabilization:
    D: int
    tail: bool
    profile: Tuple[bool, ...]


class Evaluator:
    """Évaluateur par tables sur une structure fixée"""

    def __init__(
        self,
        structure: Structure,
        guards: GuardConfig = DEFAULT_GUARDS,
        restrict_to: Optional[str] = None,
    ):
        self.structure = structure
        self.n = structure.universe_size
        self.guards = guards
        self.restrict_to = restrict_to
        self.sets: Dict[str, Tuple[np.ndarray, np.ndarray]] = {}
        self.search_nodes = 0
        self._static: Dict[Formula, Table] = {}
        self._dynamic: Dict[Tuple[Formula, bool], Table] = {}
        self._arange = np.arange(self.n)

    # ------------------------------------------------------------ ensembles

    def bind_set(self, name: str, lower: np.ndarray, upper: Optional[np.ndarray] = None):
        upper = lower if upper is None else upper
        self.sets[name] = (np.asarray(lower, dtype=bool), np.asarray(upper, dtype=bool))
        self._dynamic.clear()

    def unbind_set(self, name: str):
        self.sets.pop(name, None)
        self._dynamic.clear()

    def set_domain(self) -> np.ndarray:
        if self.restrict_to is None:
            return np.ones(self.n, dtype=bool)
        return self.structure.letter_mask(self.restrict_to)

    def _count_nodes(self, count: int):
        self.search_nodes += count
        self.guards.check("mso_search_budget", self.search_nodes)

    # ------------------------------------------------------------ tables

    def table(self, f: Formula, lower: bool = True) -> Table:
        if not free_set_variables(f):
            cached = self._static.get(f)
            if cached is None:
                cached = self._compute(f, True)
                self._static[f] = cached
            return cached
        key = (f, lower)
        cached = self._dynamic.get(key)
        if cached is None:
            cached = self._compute(f, lower)
            self._dynamic[key] = cached
        return cached

    def _check_cells(self, arity: int):
        cells = self.n**arity
        if cells > self.guards.limit("dense_cell_limit"):
            raise GuardExceeded("dense_cell_limit", cells, self.guards.limit("dense_cell_limit"))

    def _compute(self, f: Formula, lower: bool) -> Table:
        if isinstance(f, Atom):
            return self._atom(f, lower)
        if isinstance(f, Not):
            inner = self.table(f.body, not lower)
            return Table(inner.vars, ~inner.data)
        if isinstance(f, Binary):
            if f.op == "imp":
                left = self.table(f.left, not lower)
                left = Table(left.vars, ~left.data)
                return self._combine(np.logical_or, left, self.table(f.right, lower))
            op = np.logical_and if f.op == "and" else np.logical_or
            return self._combine(op, self.table(f.left, lower), self.table(f.right, lower))
        if f.is_set:
            return self._set_quantifier(f, lower)
        return self._quantifier_block(f, lower)

    def _atom(self, f: Atom, lower: bool) -> Table:
        refs = []
        for t in f.terms:
            if t.is_constant:
                refs.append(self.structure.constant(t.name))
            else:
                refs.append(t.name)
        if f.relation in ("letter", "in"):
            if f.relation == "letter":
                mask = self.structure.letter_mask(f.label)
            else:
                if f.label not in self.sets:
                    raise UnassignedVariableError(f"Ensemble libre non affecté: {f.label}")
                mask = self.sets[f.label][0 if lower else 1]
            ref = refs[0]
            if isinstance(ref, str):
                return Table((ref,), mask.copy())
            return Table((), np.array(mask[ref]))
        relation = {
            "<": lambda a, b: a < b,
            "=": lambda a, b: a == b,
            "succ": lambda a, b: a + 1 == b,
        }[f.relation]
        a, b = refs
        if isinstance(a, str) and isinstance(b, str):
            if a == b:
                return Table((a,), relation(self._arange, self._arange))
            return Table((a, b), relation(self._arange[:, None], self._arange[None, :]))
        if isinstance(a, str):
            return Table((a,), relation(self._arange, b))
        if isinstance(b, str):
            return Table((b,), relation(a, self._arange))
        return Table((), np.array(relation(a, b)))

    def _expand(self, t: Table, target: Tuple[str, ...]) -> np.ndarray:
        present = [v for v in target if v in t.vars]
        perm = [t.vars.index(v) for v in present]
        data = np.transpose(t.data, perm) if perm != sorted(perm) else t.data
        shape = [self.n if v in t.vars else 1 for v in target]
        return data.reshape(shape)

    def _combine(self, op, a: Table, b: Table) -> Table:
        target = a.vars + tuple(v for v in b.vars if v not in a.vars)
        self._check_cells(len(target))
        return Table(target, op(self._expand(a, target), self._expand(b, target)))

    # ------------------------------------------------------------ quantificateurs

    def _quantifier_block(self, f: Quantified, lower: bool) -> Table:
        block: List[str] = []
        body: Formula = f
        while (
            isinstance(body, Quantified)
            and not body.is_set
            and body.kind == f.kind
            and body.var not in block
        ):
            block.append(body.var)
            body = body.body
        if f.is_existential:
            return self._exists(block, body, True, lower)
        # ∀V φ = ¬∃V ¬φ
        result = self._exists(block, body, False, not lower)
        return Table(result.vars, ~result.data)

    def _dnf(self, f: Formula, positive: bool) -> List[List[Literal]]:
        limit = self.guards.limit("dnf_term_limit")
        if isinstance(f, Not):
            return self._dnf(f.body, not positive)
        if not isinstance(f, Binary):
            return [[(f, positive)]]
        left_positive = positive if f.op != "imp" else not positive
        disjunctive = (f.op in ("or", "imp")) == positive
        left = self._dnf(f.left, left_positive)
        right = self._dnf(f.right, positive)
        if disjunctive:
            if len(left) + len(right) > limit:
                return [[(f, positive)]]
            return left + right
        if len(left) * len(right) > limit:
            # la disjonction la plus large reste un facteur dense
            if len(left) <= len(right):
                return [c + [(f.right, positive)] for c in left]
            return [[(f.left, left_positive)] + c for c in right]
        return [l + r for l in left for r in right]

    def _literal_table(self, literal: Literal, lower: bool) -> Table:
        g, positive = literal
        if positive:
            return self.table(g, lower)
        t = self.table(g, not lower)
        return Table(t.vars, ~t.data)

    def _exists(self, block: List[str], body: Formula, positive: bool, lower: bool) -> Table:
        qvars = set(block) & free_variables(body)
        result: Optional[Table] = None
        for conjunct in self._dnf(body, positive):
            table = self._exists_conjunct(conjunct, qvars, lower)
            result = table if result is None else self._combine(np.logical_or, result, table)
            if not result.vars and bool(result.data):
                break
        return result

    def _resolve_equalities(
        self, conjunct: List[Literal], qvars: set
    ) -> Tuple[Dict[str, str], List[Literal]]:
        mapping: Dict[str, str] = {}

        def resolve(name: str) -> str:
            while name in mapping:
                name = mapping[name]
            return name

        remaining = list(conjunct)
        changed = True
        while changed:
            changed = False
            for literal in list(remaining):
                g, positive = literal
                if not (positive and isinstance(g, Atom) and g.relation == "="):
                    continue
                a, b = (resolve(t.name) for t in g.terms)
                if a == b:
                    remaining.remove(literal)
                    changed = True
                elif a in qvars and a not in mapping:
                    mapping[a] = b
                    remaining.remove(literal)
                    changed = True
                elif b in qvars and b not in mapping:
                    mapping[b] = a
                    remaining.remove(literal)
                    changed = True
        return {v: resolve(v) for v in mapping}, remaining

    def _substitute(self, t: Table, var: str, target: str) -> Table:
        axis = t.vars.index(var)
        if target in ("min", "max"):
            index = self.structure.constant(target)
            data = np.take(t.data, index, axis=axis)
            return Table(t.vars[:axis] + t.vars[axis + 1 :], data)
        if target in t.vars:
            other = t.vars.index(target)
            data = np.diagonal(t.data, axis1=axis, axis2=other)
            rest = tuple(v for v in t.vars if v not in (var, target))
            return Table(rest + (target,), np.ascontiguousarray(data))
        return Table(tuple(target if v == var else v for v in t.vars), t.data)

    def _exists_conjunct(self, conjunct: List[Literal], qvars: set, lower: bool) -> Table:
        mapping, literals = self._resolve_equalities(conjunct, qvars)
        remaining = qvars - set(mapping)
        tables = []
        for literal in literals:
            t = self._literal_table(literal, lower)
            for var in [v for v in t.vars if v in mapping]:
                t = self._substitute(t, var, mapping[var])
            if not t.vars and not bool(t.data):
                return Table((), np.array(False))
            tables.append(t)
        inside = [t for t in tables if remaining & set(t.vars)]
        outside = [t for t in tables if not remaining & set(t.vars)]
        if inside:
            outside.append(self._contract(inside, remaining))
        result = Table((), np.array(True))
        for t in outside:
            result = self._combine(np.logical_and, result, t)
        return result

    def _contract(self, inside: List[Table], qvars: set) -> Table:
        all_vars: Tuple[str, ...] = ()
        for t in inside:
            all_vars += tuple(v for v in t.vars if v not in all_vars)
        out_vars = tuple(v for v in all_vars if v not in qvars)
        if len(all_vars) <= 2 or len(inside) == 1:
            self._check_cells(len(all_vars))
            data = np.ones((1,) * len(all_vars), dtype=bool)
            for t in inside:
                data = np.logical_and(data, self._expand(t, all_vars))
            axes = tuple(i for i, v in enumerate(all_vars) if v in qvars)
            return Table(out_vars, data.any(axis=axes))
        self._check_cells(len(out_vars))
        symbols = {v: ascii_letters[i] for i, v in enumerate(all_vars)}
        operands = [t.data.astype(np.float32) for t in inside]
        spec = ",".join("".join(symbols[v] for v in t.vars) for t in inside)
        spec += "->" + "".join(symbols[v] for v in out_vars)
        data = np.einsum(spec, *operands, optimize="greedy") > 0
        return Table(out_vars, data)

    def _set_quantifier(self, f: Quantified, lower: bool) -> Table:
        domain = np.flatnonzero(self.set_domain())
        self.guards.check("mso_set_domain", len(domain))
        self._count_nodes(2 ** len(domain))
        previous = self.sets.get(f.var)
        existential = f.is_existential
        result: Optional[Table] = None
        try:
            for bits in product((False, True), repeat=len(domain)):
                vector = np.zeros(self.n, dtype=bool)
                vector[domain[list(bits)]] = True
                self.bind_set(f.var, vector)
                t = self.table(f.body, lower)
                t = Table(t.vars, t.data.copy())
                if result is None:
                    result = t
                else:
                    op = np.logical_or if existential else np.logical_and
                    result = self._combine(op, result, t)
                if not result.vars and bool(result.data) == existential:
                    break
        finally:
            if previous is None:
                self.unbind_set(f.var)
            else:
                self.bind_set(f.var, *previous)
        return result

    # ------------------------------------------------------------ recherche MSO

    def search_prefix(self, prefix: List[str], matrix: Formula) -> bool:
        """Recherche complète d'ensembles pour un préfixe ∃X1..∃Xk"""
        domain = self.set_domain()
        self.guards.check("mso_set_domain", int(domain.sum()))
        for name in prefix:
            self.bind_set(name, np.zeros(self.n, dtype=bool), domain.copy())
        decisions = [(pos, name) for pos in range(self.n) if domain[pos] for name in prefix]
        logger.info(
            f"Recherche MSO: {len(prefix)} ensemble(s), {len(decisions)} décisions"
        )

        def bounds() -> Tuple[bool, bool]:
            self._dynamic.clear()
            low = self.table(matrix, True).value({})
            high = self.table(matrix, False).value({})
            return low, high

        def assign(pos: int, name: str, value: Optional[bool]):
            lo, hi = self.sets[name]
            lo, hi = lo.copy(), hi.copy()
            if value is None:
                lo[pos], hi[pos] = False, True
            else:
                lo[pos], hi[pos] = value, value
            self.sets[name] = (lo, hi)

        # pile de (profondeur, valeur à essayer)
        stack: List[Tuple[int, int]] = [(0, 0)]
        depth_value: Dict[int, int] = {}
        while stack:
            depth, value = stack.pop()
            for d in range(depth, len(decisions)):
                if d in depth_value:
                    pos, name = decisions[d]
                    assign(pos, name, None)
                    del depth_value[d]
            if depth > 0:
                pos, name = decisions[depth - 1]
                assign(pos, name, bool(value))
                depth_value[depth - 1] = value
            self._count_nodes(1)
            low, high = bounds()
            if not high:
                continue
            if low:
                return True
            if depth == len(decisions):
                raise InvariantViolation(
                    "Bornes de Kleene distinctes sur une affectation complète"
                )
            stack.append((depth + 1, 1))
            stack.append((depth + 1, 0))
        return False


# ---------------------------------------------------------------- API


def _check_first_order(f: Formula):
    if uses_sets(f):
        raise SignatureError("Formule MSO: utiliser eval_mso")


def _check_position(name: str, value: int, structure: Structure):
    if not 0 <= value < structure.universe_size:
        raise UnassignedVariableError(
            f"{name}={value} hors de l'univers {{0..{structure.universe_size - 1}}}"
        )


def eval_fo(
    f: Formula,
    structure: Structure,
    assignment: Optional[Dict[str, int]] = None,
    guards: GuardConfig = DEFAULT_GUARDS,
    evaluator: Optional[Evaluator] = None,
) -> bool:
    _check_first_order(f)
    for name, value in (assignment or {}).items():
        _check_position(name, value, structure)
    evaluator = evaluator or Evaluator(structure, guards)
    missing = free_variables(f) - set(assignment or {})
    if missing:
        raise UnassignedVariableError(f"Variables libres non affectées: {sorted(missing)}")
    return evaluator.table(f).value(assignment or {})


def split_set_prefix(f: Formula) -> Tuple[List[str], Formula]:
    prefix: List[str] = []
    while isinstance(f, Quantified) and f.kind == "existsSet":
        prefix.append(f.var)
        f = f.body
    return prefix, f


def eval_mso(
    f: Formula,
    structure: Structure,
    mode: str = "exhaustive",
    letter: Optional[str] = None,
    witness: Optional[Dict[str, Iterable[int]]] = None,
    guards: GuardConfig = DEFAULT_GUARDS,
) -> Verdict:
    """Évalue une phrase MSO: exhaustive, restricted (à une lettre) ou witness"""
    if free_variables(f):
        raise UnassignedVariableError(f"Phrase attendue, variables libres: {sorted(free_variables(f))}")
    if mode == "witness":
        prefix, matrix = split_set_prefix(f)
        witness = witness or {}
        if sorted(witness) != sorted(prefix):
            raise WitnessArityError(
                f"Ensembles fournis {sorted(witness)} pour le préfixe {prefix}"
            )
        evaluator = Evaluator(structure, guards)
        for name, positions in witness.items():
            positions = list(positions)
            for p in positions:
                _check_position(name, p, structure)
            vector = np.zeros(structure.universe_size, dtype=bool)
            vector[positions] = True
            evaluator.bind_set(name, vector)
        if free_set_variables(matrix) - set(prefix):
            raise UnassignedVariableError("Ensembles libres non affectés")
        ok = evaluator.table(matrix).value({})
        logger.info(f"Évaluation témoin: {'succès' if ok else 'échec (non concluant)'}")
        return Verdict.TRUE if ok else Verdict.INCONCLUSIVE
    if mode not in ("exhaustive", "restricted"):
        raise ValueError(f"Mode MSO inconnu: {mode}")
    if mode == "restricted" and letter is None:
        raise ValueError("Le mode restricted exige une lettre")
    if free_set_variables(f):
        raise UnassignedVariableError(f"Ensembles libres: {sorted(free_set_variables(f))}")
    evaluator = Evaluator(structure, guards, restrict_to=letter if mode == "restricted" else None)
    prefix, matrix = split_set_prefix(f)
    if prefix:
        value = evaluator.search_prefix(prefix, matrix)
    else:
        value = evaluator.table(f).value({})
    logger.info(
        f"Évaluation MSO ({mode}) terminée après {evaluator.search_nodes} noeuds: {value}"
    )
    return Verdict.of(value)


def truth_profile(
    f: Formula, n_max: int, guards: GuardConfig = DEFAULT_GUARDS
) -> Tuple[bool, ...]:
    return tuple(eval_fo(f, LinearOrder(N), guards=guards) for N in range(n_max + 1))


def stabilization_threshold(
    f: Formula, guards: GuardConfig = DEFAULT_GUARDS
) -> Stabilization:
    """Plus petit D tel que la vérité soit constante sur [D, 2^{d+1}]"""
    _check_first_order(f)
    if free_variables(f):
        raise UnassignedVariableError("Phrase attendue")
    top = 2 ** (quantifier_depth(f) + 1)
    guards.check("stabilization_limit", top)
    profile = truth_profile(f, top, guards)
    tail = profile[top]
    D = top
    while D > 0 and profile[D - 1] == tail:
        D -= 1
    return Stabilization(D, tail, profile)


def eval_naive(
    f: Formula,
    structure: Structure,
    assignment: Optional[Dict[str, int]] = None,
    sets: Optional[Dict[str, frozenset]] = None,
) -> bool:
    """Sémantique récursive directe, utilisée comme oracle de test"""
    env = dict(assignment or {})
    sets = dict(sets or {})
    n = structure.universe_size

    def value(t) -> int:
        if t.is_constant:
            return structure.constant(t.name)
        if t.name not in env:
            raise UnassignedVariableError(f"Variable libre non affectée: {t.name}")
        return env[t.name]

    def run(g: Formula) -> bool:
        if isinstance(g, Atom):
            if g.relation == "letter":
                return bool(structure.letter_mask(g.label)[value(g.terms[0])])
            if g.relation == "in":
                return value(g.terms[0]) in sets[g.label]
            a, b = value(g.terms[0]), value(g.terms[1])
            if g.relation == "<":
                return a < b
            if g.relation == "=":
                return a == b
            return a + 1 == b
        if isinstance(g, Not):
            return not run(g.body)
        if isinstance(g, Binary):
            if g.op == "and":
                return run(g.left) and run(g.right)
            if g.op == "or":
                return run(g.left) or run(g.right)
            return (not run(g.left)) or run(g.right)
        saved = sets.get(g.var) if g.is_set else env.get(g.var)
        outcomes = []
        if g.is_set:
            for bits in product((False, True), repeat=n):
                sets[g.var] = frozenset(i for i, b in enumerate(bits) if b)
                outcomes.append(run(g.body))
        else:
            for a in range(n):
                env[g.var] = a
                outcomes.append(run(g.body))
        store = sets if g.is_set else env
        if saved is None:
            store.pop(g.var, None)
        else:
            store[g.var] = saved
        return any(outcomes) if g.is_existential else all(outcomes)

    return run(f)
