"""Représentation des formules FO/MSO, taille et analyse de fragment.

Les formules sont des arbres immuables. Chaque noeud compte pour 1 dans la
taille, un atome compte 1 quels que soient ses termes, et l'implication est
un noeud à part entière.
"""

import logging
from dataclasses import dataclass, field, fields
from typing import Dict, FrozenSet, Iterable, Optional, Tuple, Union

from logic.errors import SignatureError

logger = logging.getLogger(__name__)

CONSTANTS = ("min", "max")
FO3_VARIABLES = ("x", "y", "z")
RELATIONS = ("<", "=", "succ", "letter", "in")
BINARY_OPS = ("and", "or", "imp")
QUANTIFIERS = ("exists", "forall", "existsSet", "forallSet")


@dataclass(frozen=True)
class Term:
    name: str

    @property
    def is_constant(self) -> bool:
        return self.name in CONSTANTS

    def __str__(self) -> str:
        return self.name


TermLike = Union[str, Term]


def _term(t: TermLike) -> Term:
    return t if isinstance(t, Term) else Term(t)


class Formula:
    """Base commune: égalité structurelle et hash mis en cache"""

    def _key(self) -> tuple:
        return tuple(getattr(self, f.name) for f in fields(self))

    def __eq__(self, other) -> bool:
        if self is other:
            return True
        if type(self) is not type(other) or hash(self) != hash(other):
            return False
        return self._key() == other._key()

    def __hash__(self) -> int:
        cached = self.__dict__.get("_hash")
        if cached is None:
            cached = hash((type(self).__name__,) + self._key())
            object.__setattr__(self, "_hash", cached)
        return cached

    def _memo(self, name: str, compute):
        value = self.__dict__.get(name)
        if value is None:
            value = compute()
            object.__setattr__(self, name, value)
        return value

    def children(self) -> Tuple["Formula", ...]:
        return ()

    def __str__(self) -> str:
        from logic.syntax import print_formula

        return print_formula(self)


@dataclass(frozen=True, eq=False)
class Atom(Formula):
    relation: str
    terms: Tuple[Term, ...]
    label: Optional[str] = None

    def __post_init__(self):
        arity = 2 if self.relation in ("<", "=", "succ") else 1
        if self.relation not in RELATIONS:
            raise SignatureError(f"Relation inconnue: {self.relation}")
        if len(self.terms) != arity:
            raise SignatureError(
                f"Arité incorrecte pour {self.relation}: {len(self.terms)} termes"
            )
        if self.relation in ("letter", "in") and not self.label:
            raise SignatureError(f"L'atome {self.relation} exige un nom")


@dataclass(frozen=True, eq=False)
class Not(Formula):
    body: Formula

    def children(self):
        return (self.body,)


@dataclass(frozen=True, eq=False)
class Binary(Formula):
    op: str
    left: Formula
    right: Formula

    def __post_init__(self):
        if self.op not in BINARY_OPS:
            raise SignatureError(f"Connecteur inconnu: {self.op}")

    def children(self):
        return (self.left, self.right)


@dataclass(frozen=True, eq=False)
class Quantified(Formula):
    kind: str
    var: str
    body: Formula

    def __post_init__(self):
        if self.kind not in QUANTIFIERS:
            raise SignatureError(f"Quantificateur inconnu: {self.kind}")

    @property
    def is_set(self) -> bool:
        return self.kind.endswith("Set")

    @property
    def is_existential(self) -> bool:
        return self.kind.startswith("exists")

    def children(self):
        return (self.body,)


@dataclass(frozen=True)
class Signature:
    """Signature d'ordre {<,succ,min,max} ou signature de mots τ_h"""

    lt: bool = True
    succ: bool = True
    min: bool = True
    max: bool = True
    alphabet: Tuple[str, ...] = field(default_factory=tuple)
    mso: bool = False

    @classmethod
    def order(cls, succ: bool = True, constants: bool = True) -> "Signature":
        return cls(succ=succ, min=constants, max=constants)

    @classmethod
    def strings(cls, h: int, mso: bool = False) -> "Signature":
        from families.tower import alphabet

        return cls(succ=False, min=False, max=False, alphabet=alphabet(h), mso=mso)

    @property
    def is_string(self) -> bool:
        return bool(self.alphabet)


# ---------------------------------------------------------------- mesures


def size(f: Formula) -> int:
    """Nombre de noeuds de l'arbre syntaxique"""
    return f._memo("_size", lambda: 1 + sum(size(c) for c in f.children()))


def quantifier_depth(f: Formula) -> int:
    def compute():
        inner = max((quantifier_depth(c) for c in f.children()), default=0)
        if isinstance(f, Quantified) and not f.is_set:
            return inner + 1
        return inner

    return f._memo("_qdepth", compute)


def set_quantifier_depth(f: Formula) -> int:
    def compute():
        inner = max((set_quantifier_depth(c) for c in f.children()), default=0)
        if isinstance(f, Quantified) and f.is_set:
            return inner + 1
        return inner

    return f._memo("_sdepth", compute)


def variable_names(f: Formula) -> FrozenSet[str]:
    """Noms de variables du premier ordre, libres ou liées"""

    def compute():
        if isinstance(f, Atom):
            return frozenset(t.name for t in f.terms if not t.is_constant)
        names = frozenset().union(*(variable_names(c) for c in f.children()))
        if isinstance(f, Quantified) and not f.is_set:
            names = names | {f.var}
        return names

    return f._memo("_varnames", compute)


def variable_width(f: Formula) -> int:
    return len(variable_names(f))


def free_variables(f: Formula) -> FrozenSet[str]:
    def compute():
        if isinstance(f, Atom):
            return frozenset(t.name for t in f.terms if not t.is_constant)
        if isinstance(f, Quantified):
            inner = free_variables(f.body)
            return inner if f.is_set else inner - {f.var}
        return frozenset().union(*(free_variables(c) for c in f.children()))

    return f._memo("_free", compute)


def free_set_variables(f: Formula) -> FrozenSet[str]:
    def compute():
        if isinstance(f, Atom):
            return frozenset([f.label]) if f.relation == "in" else frozenset()
        if isinstance(f, Quantified):
            inner = free_set_variables(f.body)
            return inner - {f.var} if f.is_set else inner
        return frozenset().union(*(free_set_variables(c) for c in f.children()))

    return f._memo("_freesets", compute)


def is_sentence(f: Formula) -> bool:
    return not free_variables(f) and not free_set_variables(f)


def uses_sets(f: Formula) -> bool:
    def compute():
        if isinstance(f, Atom):
            return f.relation == "in"
        if isinstance(f, Quantified) and f.is_set:
            return True
        return any(uses_sets(c) for c in f.children())

    return f._memo("_usesets", compute)


def validate(
    f: Formula, signature: Signature, width: Optional[int] = None
) -> Formula:
    """Vérifie qu'une formule respecte une signature (et une largeur)"""
    for node in iter_nodes(f):
        if isinstance(node, Atom):
            if node.relation == "<" and not signature.lt:
                raise SignatureError("'<' absent de la signature")
            if node.relation == "succ" and not signature.succ:
                raise SignatureError("'succ' absent de la signature")
            if node.relation == "letter":
                if node.label not in signature.alphabet:
                    raise SignatureError(f"Lettre inconnue: {node.label}")
            if node.relation == "in" and not signature.mso:
                raise SignatureError("Appartenance à un ensemble hors MSO")
            for t in node.terms:
                if t.name == "min" and not signature.min:
                    raise SignatureError("Constante 'min' absente de la signature")
                if t.name == "max" and not signature.max:
                    raise SignatureError("Constante 'max' absente de la signature")
        elif isinstance(node, Quantified) and node.is_set and not signature.mso:
            raise SignatureError("Quantificateur d'ensemble hors MSO")
    if width is not None and variable_width(f) > width:
        raise SignatureError(
            f"Largeur {variable_width(f)} supérieure à la limite {width}"
        )
    return f


def iter_nodes(f: Formula) -> Iterable[Formula]:
    stack = [f]
    while stack:
        node = stack.pop()
        yield node
        stack.extend(reversed(node.children()))


# ---------------------------------------------------------------- constructeurs


def lt(a: TermLike, b: TermLike) -> Atom:
    return Atom("<", (_term(a), _term(b)))


def eq(a: TermLike, b: TermLike) -> Atom:
    return Atom("=", (_term(a), _term(b)))


def succ(a: TermLike, b: TermLike) -> Atom:
    return Atom("succ", (_term(a), _term(b)))


def letter(name: str, t: TermLike) -> Atom:
    return Atom("letter", (_term(t),), name)


def member(t: TermLike, set_var: str) -> Atom:
    return Atom("in", (_term(t),), set_var)


def neg(f: Formula) -> Not:
    return Not(f)


def implies(a: Formula, b: Formula) -> Binary:
    return Binary("imp", a, b)


def iff(a: Formula, b: Formula) -> Formula:
    return disj(conj(a, b), conj(neg(a), neg(b)))


def _balanced(op: str, parts: Tuple[Formula, ...]) -> Formula:
    if not parts:
        raise ValueError(f"'{op}' vide")
    if len(parts) == 1:
        return parts[0]
    mid = len(parts) // 2
    return Binary(op, _balanced(op, parts[:mid]), _balanced(op, parts[mid:]))


def conj(*parts: Formula) -> Formula:
    return _balanced("and", tuple(parts))


def disj(*parts: Formula) -> Formula:
    return _balanced("or", tuple(parts))


def exists(var: str, body: Formula) -> Quantified:
    return Quantified("exists", var, body)


def forall(var: str, body: Formula) -> Quantified:
    return Quantified("forall", var, body)


def exists_all(variables: Iterable[str], body: Formula) -> Formula:
    for v in reversed(tuple(variables)):
        body = exists(v, body)
    return body


def forall_all(variables: Iterable[str], body: Formula) -> Formula:
    for v in reversed(tuple(variables)):
        body = forall(v, body)
    return body


def exists_set(var: str, body: Formula) -> Quantified:
    return Quantified("existsSet", var, body)


def forall_set(var: str, body: Formula) -> Quantified:
    return Quantified("forallSet", var, body)


def between(a: TermLike, z: str, b: TermLike) -> Formula:
    return conj(lt(a, z), lt(z, b))


def succ_macro(a: TermLike, b: TermLike, via: str) -> Formula:
    """succ(a,b) exprimé avec < seulement, la variable `via` est liée"""
    return conj(lt(a, b), neg(exists(via, between(a, via, b))))


def substitute_letters(f: Formula, mapping: Dict[str, str]) -> Formula:
    """Remplace chaque atome letter(σ, t) par in(t, mapping[σ])"""
    if isinstance(f, Atom):
        if f.relation == "letter":
            return member(f.terms[0], mapping[f.label])
        return f
    if isinstance(f, Not):
        return Not(substitute_letters(f.body, mapping))
    if isinstance(f, Binary):
        return Binary(
            f.op,
            substitute_letters(f.left, mapping),
            substitute_letters(f.right, mapping),
        )
    return Quantified(f.kind, f.var, substitute_letters(f.body, mapping))
