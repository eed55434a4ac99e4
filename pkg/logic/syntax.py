"""Lecture et écriture des formules en S-expressions.

La tokenisation passe par pyparsing, la construction de l'arbre utilise une
pile explicite pour supporter les formules profondes générées par les familles.
"""

import logging
import re
from typing import Iterable, List, Optional, Tuple, Union

from pyparsing import Literal, Regex

from logic.errors import FormulaSyntaxError, SignatureError
from logic.formula import (
    CONSTANTS,
    Atom,
    Binary,
    Formula,
    Not,
    Quantified,
    Signature,
    Term,
    validate,
)

logger = logging.getLogger(__name__)

LPAR = Literal("(")
RPAR = Literal(")")
SYMBOL = Regex(r"[^\s()]+")
TOKEN = LPAR | RPAR | SYMBOL

VARIABLE_RE = re.compile(r"[a-z][a-z0-9_]*\Z")
SET_VARIABLE_RE = re.compile(r"[A-Z][A-Z0-9_]*\Z")
LETTER_RE = re.compile(r"[A-Za-z0-9]+\Z")

HEAD_ARITY = {
    "not": 1,
    "and": 2,
    "or": 2,
    "imp": 2,
    "exists": 2,
    "forall": 2,
    "existsSet": 2,
    "forallSet": 2,
    "<": 2,
    "=": 2,
    "succ": 2,
    "letter": 2,
    "in": 2,
}


class _Node:
    """S-expression lue: symbole ou liste, avec ses positions"""

    __slots__ = ("text", "items", "start", "end")

    def __init__(self, start: int, text: Optional[str] = None):
        self.start = start
        self.end = start
        self.text = text
        self.items: List["_Node"] = []

    @property
    def is_list(self) -> bool:
        return self.text is None


def tokenize(text: str) -> Iterable[Tuple[str, int]]:
    for tokens, start, _ in TOKEN.scan_string(text):
        yield tokens[0], start


def read_sexpr(text: str) -> _Node:
    stack: List[_Node] = []
    result: Optional[_Node] = None
    for token, offset in tokenize(text):
        if result is not None and not stack:
            raise FormulaSyntaxError("Texte en trop après la formule", offset)
        if token == "(":
            stack.append(_Node(offset))
        elif token == ")":
            if not stack:
                raise FormulaSyntaxError("Parenthèse fermante inattendue", offset)
            node = stack.pop()
            node.end = offset
            if stack:
                stack[-1].items.append(node)
            else:
                result = node
        else:
            node = _Node(offset, token)
            if stack:
                stack[-1].items.append(node)
            else:
                result = node
    if stack:
        raise FormulaSyntaxError("Parenthèse fermante attendue", len(text))
    if result is None:
        raise FormulaSyntaxError("Formule vide", len(text))
    return result


def _term(node: _Node, variables: Optional[Iterable[str]]) -> Term:
    if node.is_list:
        raise FormulaSyntaxError("Terme attendu", node.start)
    name = node.text
    if name in CONSTANTS:
        return Term(name)
    if not VARIABLE_RE.match(name):
        raise FormulaSyntaxError(f"Nom de variable invalide: {name}", node.start)
    if variables is not None and name not in variables:
        raise SignatureError(f"Variable inconnue '{name}' (offset {node.start})")
    return Term(name)


def _set_name(node: _Node) -> str:
    if node.is_list or not SET_VARIABLE_RE.match(node.text):
        raise FormulaSyntaxError("Variable d'ensemble attendue", node.start)
    return node.text


def _build(node: _Node, variables: Optional[Iterable[str]]) -> Formula:
    if not node.is_list:
        raise FormulaSyntaxError("Formule attendue", node.start)
    if not node.items:
        raise FormulaSyntaxError("Liste vide", node.start)
    head = node.items[0]
    if head.is_list or head.text not in HEAD_ARITY:
        raise FormulaSyntaxError("Opérateur inconnu", head.start)
    args = node.items[1:]
    expected = HEAD_ARITY[head.text]
    if len(args) < expected:
        raise FormulaSyntaxError(f"Argument manquant pour {head.text}", node.end)
    if len(args) > expected:
        raise FormulaSyntaxError(
            f"Argument en trop pour {head.text}", args[expected].start
        )
    op = head.text
    if op == "not":
        return Not(_build(args[0], variables))
    if op in ("and", "or", "imp"):
        return Binary(op, _build(args[0], variables), _build(args[1], variables))
    if op in ("exists", "forall"):
        var = _term(args[0], variables)
        if var.is_constant:
            raise FormulaSyntaxError("Quantification d'une constante", args[0].start)
        return Quantified(op, var.name, _build(args[1], variables))
    if op in ("existsSet", "forallSet"):
        return Quantified(op, _set_name(args[0]), _build(args[1], variables))
    if op == "letter":
        if args[0].is_list or not LETTER_RE.match(args[0].text):
            raise FormulaSyntaxError("Nom de lettre attendu", args[0].start)
        return Atom("letter", (_term(args[1], variables),), args[0].text)
    if op == "in":
        return Atom("in", (_term(args[0], variables),), _set_name(args[1]))
    return Atom(op, (_term(args[0], variables), _term(args[1], variables)))


def parse(
    text: Union[str, bytes],
    signature: Optional[Signature] = None,
    variables: Optional[Iterable[str]] = None,
) -> Formula:
    """Lit une formule; lève FormulaSyntaxError avec la position fautive"""
    if isinstance(text, bytes):
        text = text.decode("utf-8")
    formula = _build(read_sexpr(text), None if variables is None else set(variables))
    if signature is not None:
        validate(formula, signature)
    return formula


def print_formula(f: Formula) -> str:
    if isinstance(f, Atom):
        if f.relation == "letter":
            return f"(letter {f.label} {f.terms[0]})"
        if f.relation == "in":
            return f"(in {f.terms[0]} {f.label})"
        return f"({f.relation} {f.terms[0]} {f.terms[1]})"
    if isinstance(f, Not):
        return f"(not {print_formula(f.body)})"
    if isinstance(f, Binary):
        return f"({f.op} {print_formula(f.left)} {print_formula(f.right)})"
    return f"({f.kind} {f.var} {print_formula(f.body)})"
