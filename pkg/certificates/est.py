"""Arbres syntaxiques étendus et certificats de borne inférieure de taille.

Chaque noeud porte la sous-formule et un couple ⟨A, B⟩ d'ensembles
d'interprétations: A satisfait la sous-formule, B la falsifie. Les témoins des
quantificateurs sont choisis comme le plus petit élément convenable.
"""

import json
import logging
from dataclasses import dataclass, field
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

from certificates.separators import (
    PotentialSeparator,
    Weight,
    combine_boolean,
    format_separator,
    half_weight_le,
    is_separator,
    lift_quantifier,
    minimal_separator,
    weight,
    weight_le_one,
    weight_le_plus_two,
    weight_le_sum,
)
from logic.errors import GuardExceeded, PreconditionError, SignatureError
from logic.evaluator import Evaluator
from logic.formula import (
    FO3_VARIABLES,
    Atom,
    Binary,
    Formula,
    Not,
    Quantified,
    size,
    uses_sets,
    variable_names,
)
from logic.guards import DEFAULT_GUARDS, GuardConfig
from logic.structures import Interpretation, LinearOrder
from logic.syntax import print_formula

logger = logging.getLogger(__name__)

Label = Tuple[Interpretation, ...]


@dataclass
class TreeNode:
    formula: Formula
    A: Label
    B: Label
    children: List["TreeNode"] = field(default_factory=list)

    @property
    def syntax_label(self) -> str:
        f = self.formula
        if isinstance(f, Atom):
            return print_formula(f)
        if isinstance(f, Not):
            return "¬"
        if isinstance(f, Binary):
            return {"and": "∧", "or": "∨", "imp": "→"}[f.op]
        return ("∃" if f.is_existential else "∀") + f.var

    def walk(self, path: str = "0") -> Iterable[Tuple[str, "TreeNode"]]:
        yield path, self
        for i, child in enumerate(self.children):
            yield from child.walk(f"{path}.{i}")


@dataclass
class ExtSyntaxTree:
    formula: Formula
    root: TreeNode

    @property
    def nodes(self) -> int:
        return sum(1 for _ in self.root.walk())


class _Truth:
    """Vérité de sous-formules sur des interprétations, une table par A_N"""

    def __init__(self, guards: GuardConfig):
        self.guards = guards
        self._evaluators: Dict[int, Evaluator] = {}

    def holds(self, f: Formula, i: Interpretation) -> bool:
        evaluator = self._evaluators.get(i.N)
        if evaluator is None:
            evaluator = Evaluator(LinearOrder(i.N), self.guards)
            self._evaluators[i.N] = evaluator
        return evaluator.table(f).value(i.assignment)


def _dedupe(items: Iterable[Interpretation]) -> Label:
    return tuple(dict.fromkeys(items))


def _check_formula(psi: Formula):
    if uses_sets(psi):
        raise SignatureError("Arbre étendu défini pour FO seulement")
    extra = variable_names(psi) - set(FO3_VARIABLES)
    if extra:
        raise SignatureError(f"Variables hors de {{x,y,z}}: {sorted(extra)}")


def _check_labels(psi: Formula, A: Sequence[Interpretation], B: Sequence[Interpretation], truth: _Truth):
    for i in A:
        if not truth.holds(psi, i):
            raise PreconditionError(f"{i} ne satisfait pas la formule", i)
    for j in B:
        if truth.holds(psi, j):
            raise PreconditionError(f"{j} satisfait la formule", j)


def build(
    psi: Formula,
    A: Sequence[Interpretation],
    B: Sequence[Interpretation],
    guards: GuardConfig = DEFAULT_GUARDS,
) -> ExtSyntaxTree:
    _check_formula(psi)
    truth = _Truth(guards)
    A, B = _dedupe(A), _dedupe(B)
    _check_labels(psi, A, B, truth)

    def label(items: Iterable[Interpretation]) -> Label:
        result = _dedupe(items)
        guards.check("est_label_budget", len(result))
        return result

    def witness(f: Formula, i: Interpretation, var: str, wanted: bool) -> Interpretation:
        for a in range(i.N + 1):
            candidate = i.with_value(var, a)
            if truth.holds(f, candidate) == wanted:
                return candidate
        raise PreconditionError(f"Pas de témoin pour {var} dans {i}", i)

    def node(f: Formula, A: Label, B: Label) -> TreeNode:
        current = TreeNode(f, A, B)
        if isinstance(f, Not):
            current.children = [node(f.body, B, A)]
        elif isinstance(f, Binary):
            if f.op == "or":
                A1 = label(i for i in A if truth.holds(f.left, i))
                A2 = label(i for i in A if i not in A1)
                current.children = [node(f.left, A1, B), node(f.right, A2, B)]
            elif f.op == "and":
                B1 = label(j for j in B if not truth.holds(f.left, j))
                B2 = label(j for j in B if j not in B1)
                current.children = [node(f.left, A, B1), node(f.right, A, B2)]
            else:
                # a → b traité comme ¬a ∨ b
                A1 = label(i for i in A if not truth.holds(f.left, i))
                A2 = label(i for i in A if i not in A1)
                current.children = [node(f.left, B, A1), node(f.right, A2, B)]
        elif isinstance(f, Quantified):
            if f.is_existential:
                A1 = label(witness(f.body, i, f.var, True) for i in A)
                B1 = label(j.with_value(f.var, a) for j in B for a in range(j.N + 1))
            else:
                A1 = label(i.with_value(f.var, a) for i in A for a in range(i.N + 1))
                B1 = label(witness(f.body, j, f.var, False) for j in B)
            current.children = [node(f.body, A1, B1)]
        return current

    tree = ExtSyntaxTree(psi, node(psi, A, B))
    logger.info(f"Arbre étendu construit: {tree.nodes} noeuds pour |ψ|={size(psi)}")
    return tree


# ---------------------------------------------------------------- vérifications


@dataclass
class NodeCheck:
    path: str
    syntax_label: str
    weight: Optional[Weight]
    verdict: str


@dataclass
class KeypropReport:
    checks: List[NodeCheck] = field(default_factory=list)
    skipped: List[str] = field(default_factory=list)
    violations: List[str] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.violations


def _label_dump(node: TreeNode) -> str:
    return json.dumps(
        {
            "sl": node.syntax_label,
            "A": [str(i) for i in node.A],
            "B": [str(j) for j in node.B],
        },
        ensure_ascii=False,
    )


def check_keyprop(tree: ExtSyntaxTree, guards: GuardConfig = DEFAULT_GUARDS) -> KeypropReport:
    """Inégalités de poids noeud par noeud sur les séparateurs minimaux"""
    report = KeypropReport()
    separators: Dict[str, Optional[PotentialSeparator]] = {}
    nodes = list(tree.root.walk())
    for path, node in nodes:
        try:
            separators[path] = minimal_separator(node.A, node.B, guards)
        except GuardExceeded as e:
            logger.warning(f"Noeud {path} ignoré: {e}")
            report.skipped.append(path)
    for path, node in nodes:
        if path not in separators:
            continue
        delta = separators[path]
        if delta is None:
            report.violations.append(f"{path}: aucun séparateur {_label_dump(node)}")
            continue
        w = weight(delta)
        child_paths = [f"{path}.{i}" for i in range(len(node.children))]
        if any(p not in separators or separators[p] is None for p in child_paths):
            report.checks.append(NodeCheck(path, node.syntax_label, w, "skipped"))
            continue
        kids = [separators[p] for p in child_paths]
        problems = []
        if not kids:
            if not weight_le_one(w):
                problems.append("feuille de poids > 1")
        elif len(kids) == 2:
            if not weight_le_sum(w, weight(kids[0]), weight(kids[1])):
                problems.append("w > w1 + w2")
            if not is_separator(combine_boolean(kids[0], kids[1]), node.A, node.B):
                problems.append("la somme des séparateurs fils ne sépare pas")
        else:
            if not weight_le_plus_two(w, weight(kids[0])):
                problems.append("w > w1 + 2")
            f = node.formula
            if isinstance(f, Quantified):
                lifted = lift_quantifier(kids[0], f.var)
                if not is_separator(lifted, node.A, node.B):
                    problems.append(f"le relèvement par {f.var} ne sépare pas")
        if problems:
            message = f"{path} ({node.syntax_label}): {', '.join(problems)} {_label_dump(node)}"
            logger.error(f"Violation d'invariant: {message}")
            report.violations.append(message)
        report.checks.append(NodeCheck(path, node.syntax_label, w, "fail" if problems else "pass"))
    logger.info(
        f"Vérification des noeuds: {len(report.checks)} vérifiés, "
        f"{len(report.skipped)} ignorés, {len(report.violations)} violations"
    )
    return report


@dataclass(frozen=True)
class SizeBound:
    nodes: int
    root_weight: Weight
    bound_holds: bool


def tree_size_bound(tree: ExtSyntaxTree, guards: GuardConfig = DEFAULT_GUARDS) -> SizeBound:
    delta = minimal_separator(tree.root.A, tree.root.B, guards)
    if delta is None:
        raise PreconditionError("La racine n'admet aucun séparateur")
    w = weight(delta)
    return SizeBound(tree.nodes, w, half_weight_le(tree.nodes, w))


@dataclass(frozen=True)
class Certificate:
    formula: str
    size: int
    separator: PotentialSeparator
    weight: Weight
    verdict: bool

    def as_dict(self) -> Dict[str, object]:
        return {
            "formula": self.formula,
            "size": self.size,
            "separator": format_separator(self.separator),
            "weight_squared": self.weight.squared,
            "weight": round(self.weight.value, 6),
            "verdict": self.verdict,
        }


def certify_lower_bound(
    psi: Formula,
    A: Sequence[Interpretation],
    B: Sequence[Interpretation],
    guards: GuardConfig = DEFAULT_GUARDS,
) -> Certificate:
    """Certificat |ψ| ≥ ½·w(δ) avec δ séparateur minimal de ⟨A, B⟩"""
    _check_formula(psi)
    _check_labels(psi, A, B, _Truth(guards))
    delta = minimal_separator(A, B, guards)
    if delta is None:
        raise PreconditionError("A et B partagent une interprétation")
    w = weight(delta)
    certificate = Certificate(print_formula(psi), size(psi), delta, w, half_weight_le(size(psi), w))
    logger.info(f"Certificat: |ψ|={certificate.size}, w={w}, verdict={certificate.verdict}")
    return certificate


def dump_tree(tree: ExtSyntaxTree) -> str:
    def encode(node: TreeNode) -> Dict[str, object]:
        return {
            "sl": node.syntax_label,
            "il": {"A": [str(i) for i in node.A], "B": [str(j) for j in node.B]},
            "children": [encode(c) for c in node.children],
        }

    return json.dumps(encode(tree.root), ensure_ascii=False, indent=2)
