"""Familles de phrases sur les ordres linéaires: χ_ℓ, χ_{≥ℓ}, φ_m.

Conventions de taille: chaque noeud compte 1, ce qui donne
|χ_{≥ℓ}| = 3ℓ+2, |χ_ℓ| = 6ℓ+9 et |φ_m| = 21+9m.
"""

import logging
from typing import Tuple

from logic.errors import SignatureError
from logic.formula import (
    FO3_VARIABLES,
    Atom,
    Binary,
    Formula,
    Not,
    Quantified,
    conj,
    disj,
    eq,
    exists,
    forall,
    implies,
    lt,
    neg,
    variable_names,
)

logger = logging.getLogger(__name__)

PHI_VARIABLES = ("x", "y", "z", "u")


def _other(var: str) -> str:
    return "y" if var == "x" else "x"


def chi_prime(l: int, var: str = "x") -> Formula:
    """χ'_{≥ℓ}(var): au moins ℓ éléments sous var"""
    if l < 0:
        raise ValueError(f"ℓ négatif: {l}")
    names = [var if k % 2 == 0 else _other(var) for k in range(l + 1)]
    body: Formula = eq(names[l], names[l])
    for k in range(l - 1, -1, -1):
        inner = names[k + 1]
        body = exists(inner, conj(lt(inner, names[k]), body))
    return body


def gen_chi(l: int, mode: str = "exact") -> Formula:
    """χ_ℓ (mode exact) ou χ_{≥ℓ} (mode at_least)"""
    at_least = exists("x", chi_prime(l, "x"))
    if mode == "at_least":
        return at_least
    if mode != "exact":
        raise ValueError(f"Mode inconnu: {mode}")
    return conj(at_least, neg(exists("x", chi_prime(l + 1, "x"))))


def _adjacent(a: str, b: str) -> Formula:
    """|diff(a, b)| = 1"""
    c = next(v for v in PHI_VARIABLES if v not in (a, b))
    apart = disj(conj(lt(a, c), lt(c, b)), conj(lt(b, c), lt(c, a)))
    return conj(disj(lt(a, b), lt(b, a)), neg(exists(c, apart)))


def phi_prime(m: int, a: str, b: str) -> Formula:
    """φ'_m(a, b): |diff(a, b)| = 2^m"""
    if m == 0:
        return _adjacent(a, b)
    c, d = [v for v in PHI_VARIABLES if v not in (a, b)]
    ends = disj(eq(d, a), eq(d, b))
    return conj(neg(eq(a, b)), exists(c, forall(d, implies(ends, phi_prime(m - 1, c, d)))))


def gen_phi_m(m: int) -> Formula:
    """φ_m: vrai sur A_N si et seulement si N = 2^m"""
    if m < 0:
        raise ValueError(f"m négatif: {m}")
    borders = neg(exists("z", disj(lt("z", "x"), lt("y", "z"))))
    return exists("x", exists("y", conj(phi_prime(m, "x", "y"), borders)))


# ---------------------------------------------------------------- succ, min, max


def _free_slot(taken: Tuple[str, ...]) -> str:
    for v in FO3_VARIABLES:
        if v not in taken:
            return v
    raise SignatureError("Plus de variable disponible dans {x,y,z}")


def _is_extremum(v: str, constant: str) -> Formula:
    w = _free_slot((v,))
    return neg(exists(w, lt(w, v) if constant == "min" else lt(v, w)))


def _plain_atom(relation: str, a: str, b: str) -> Formula:
    if relation == "<":
        return lt(a, b)
    if relation == "=":
        return eq(a, b)
    c = _free_slot((a, b))
    return conj(lt(a, b), neg(exists(c, conj(lt(a, c), lt(c, b)))))


def _rewrite_atom(f: Atom) -> Formula:
    names = [t.name for t in f.terms]
    if f.relation == "=" and sum(t.is_constant for t in f.terms) == 1:
        v, constant = (names[0], names[1]) if f.terms[1].is_constant else (names[1], names[0])
        return _is_extremum(v, constant)
    bindings = []
    for i, t in enumerate(f.terms):
        if t.is_constant:
            fresh = _free_slot(tuple(names))
            bindings.append((fresh, t.name))
            names[i] = fresh
    body = _plain_atom(f.relation, names[0], names[1])
    for fresh, constant in reversed(bindings):
        body = exists(fresh, conj(_is_extremum(fresh, constant), body))
    return body


def eliminate_sugar(psi: Formula) -> Formula:
    """Réécrit succ, min et max avec < seulement, en largeur 3"""
    extra = variable_names(psi) - set(FO3_VARIABLES)
    if extra:
        raise SignatureError(f"Largeur limitée à {{x,y,z}}: {sorted(extra)}")
    if isinstance(psi, Atom):
        if psi.relation in ("letter", "in"):
            raise SignatureError("Atome hors de la signature d'ordre")
        if psi.relation == "succ" or any(t.is_constant for t in psi.terms):
            return _rewrite_atom(psi)
        return psi
    if isinstance(psi, Not):
        return Not(eliminate_sugar(psi.body))
    if isinstance(psi, Binary):
        return Binary(psi.op, eliminate_sugar(psi.left), eliminate_sugar(psi.right))
    if isinstance(psi, Quantified) and not psi.is_set:
        return Quantified(psi.kind, psi.var, eliminate_sugar(psi.body))
    raise SignatureError("Quantificateur d'ensemble hors FO")
