"""Formules FO(τ_h) et MSO décrivant le mot w_h.

Un bloc de niveau j commence par T_j et se ferme au premier E_j qui suit; ses
sous-blocs sont les blocs de niveau j-1 qu'il contient, chacun suivi d'un bit.
Les formules d'un niveau j lient des variables suffixées par j (p2, q2, ...),
de sorte que les formules de niveaux différents s'emboîtent sans capture.

Toutes les formules supposent des blocs bien formés là où elles sont
appliquées; c'est vh_plus qui impose cette forme sur le mot entier.
"""

import logging
from functools import lru_cache
from typing import Dict, Set

from families.tower import DOT, alphabet, build_vh_wh, close_tag, h_numbering, open_tag
from logic.formula import (
    Formula,
    conj,
    disj,
    eq,
    exists,
    exists_set,
    forall,
    iff,
    implies,
    letter,
    lt,
    member,
    neg,
    substitute_letters,
    succ_macro,
)

logger = logging.getLogger(__name__)

WITNESS_SET = "X"


def set_name(sigma: str) -> str:
    """Nom de l'ensemble P_σ remplaçant la lettre σ dans Ψ_h"""
    return "P" + sigma.upper()


def T(k: int, t: str) -> Formula:
    return letter(open_tag(k), t)


def E(k: int, t: str) -> Formula:
    return letter(close_tag(k), t)


class _Level:
    """Noms de variables liées et macros d'un niveau j"""

    def __init__(self, j: int):
        self.j = j
        for name in ("x", "y", "p", "q", "z", "w", "o", "s", "a", "b", "c", "e", "r", "v"):
            setattr(self, name, f"{name}{j}")

    def succ(self, a: str, b: str) -> Formula:
        return succ_macro(a, b, self.v)

    def then(self, a: str, var: str, body: Formula) -> Formula:
        """∃var (var = a+1 ∧ body)"""
        return exists(var, conj(self.succ(a, var), body))

    def close(self, p: str, e: str, k: int) -> Formula:
        """e est le premier E_k après p"""
        r = self.r
        return conj(lt(p, e), E(k, e), neg(exists(r, conj(lt(p, r), lt(r, e), E(k, r)))))

    def sub(self, z: str, p: str) -> Formula:
        """p ouvre un sous-bloc du bloc de niveau j ouvert en z"""
        r = self.r
        inside = neg(exists(r, conj(lt(z, r), lt(r, p), E(self.j, r))))
        return conj(T(self.j - 1, p), lt(z, p), inside)

    def after_close(self, p: str, tail) -> Formula:
        """Condition sur les positions e+1 et e+2, e fermant le bloc ouvert en p"""
        e, b, c = self.e, self.b, self.c
        return exists(
            e,
            conj(
                self.close(p, e, self.j - 1),
                exists(b, conj(self.succ(e, b), tail(b, c))),
            ),
        )

    def bo(self, p: str) -> Formula:
        """le bit qui suit le sous-bloc ouvert en p vaut 1"""
        return self.after_close(p, lambda b, c: letter("1", b))

    def lastsub(self, p: str) -> Formula:
        j = self.j
        return self.after_close(p, lambda b, c: self.then(b, c, E(j, c)))

    def nextsub(self, p: str, q: str) -> Formula:
        """q ouvre le sous-bloc qui suit immédiatement celui ouvert en p"""
        return conj(
            T(self.j - 1, p),
            T(self.j - 1, q),
            self.after_close(p, lambda b, c: self.succ(b, q)),
        )

    def empty(self, x: str) -> Formula:
        return self.then(x, self.a, E(self.j, self.a))

    def allones(self, x: str) -> Formula:
        p = self.p
        return forall(p, implies(self.sub(x, p), self.bo(p)))

    def lower_all_ones(self, p: str) -> Formula:
        """tous les sous-blocs précédant p dans son bloc ont le bit 1"""
        o, s = self.o, self.s
        same_block = neg(exists(s, conj(lt(o, s), lt(s, p), E(self.j, s))))
        return forall(o, implies(conj(T(self.j - 1, o), lt(o, p), same_block), self.bo(o)))

    def one(self, y: str) -> Formula:
        """le bloc ouvert en y est μ_j(1)"""
        j, a, b, c, e = self.j, self.a, self.b, self.c, self.e
        return self.then(
            y,
            a,
            conj(
                T(j - 1, a),
                self.then(a, b, conj(E(j - 1, b), self.then(b, c, conj(letter("0", c), self.then(c, e, E(j, e)))))),
            ),
        )


# ---------------------------------------------------------------- equal / inc / max


@lru_cache(maxsize=None)
def gen_equal(h: int, x: str = "x", y: str = "y") -> Formula:
    """equal_h(x, y): les blocs de niveau h ouverts en x et y codent le même entier"""
    if h < 1:
        raise ValueError(f"h doit être >= 1: {h}")
    L = _Level(h)
    if h == 1:
        a, b = L.a, L.b
        same = disj(conj(E(1, a), E(1, b)), conj(letter("0", a), letter("0", b)))
        return exists(a, exists(b, conj(L.succ(x, a), L.succ(y, b), same)))
    p, q, z, w = L.p, L.q, L.z, L.w
    match = conj(gen_equal(h - 1, p, q), iff(L.bo(p), L.bo(q)))
    covered = forall(p, implies(L.sub(z, p), exists(q, conj(L.sub(w, q), match))))
    pairs = disj(conj(eq(z, x), eq(w, y)), conj(eq(z, y), eq(w, x)))
    return forall(z, forall(w, implies(pairs, covered)))


@lru_cache(maxsize=None)
def gen_inc(h: int, x: str = "x", y: str = "y") -> Formula:
    """inc_h(x, y): le bloc ouvert en y code le successeur de celui ouvert en x"""
    if h < 1:
        raise ValueError(f"h doit être >= 1: {h}")
    L = _Level(h)
    if h == 1:
        return conj(L.then(x, L.a, E(1, L.a)), L.then(y, L.b, letter("0", L.b)))
    p, q = L.p, L.q
    index = gen_equal(h - 1, p, q)
    same_bit = iff(L.bo(p), L.bo(q))
    carry = L.lower_all_ones(p)
    flipped = disj(conj(carry, neg(same_bit)), conj(neg(carry), same_bit))
    bits = forall(p, implies(L.sub(x, p), exists(q, conj(L.sub(y, q), index, flipped))))
    no_extra = forall(
        q,
        implies(
            L.sub(y, q),
            disj(
                exists(p, conj(L.sub(x, p), index)),
                conj(L.lastsub(q), L.bo(q), L.allones(x)),
            ),
        ),
    )
    overflow = implies(
        L.allones(x), exists(q, conj(L.sub(y, q), L.lastsub(q), L.bo(q)))
    )
    return disj(
        conj(L.empty(x), L.one(y)),
        conj(neg(L.empty(x)), bits, no_extra, overflow),
    )


@lru_cache(maxsize=None)
def gen_max(h: int, x: str = "x") -> Formula:
    """max_h(x): le bloc ouvert en x code Tower(h) - 1"""
    if h < 1:
        raise ValueError(f"h doit être >= 1: {h}")
    L = _Level(h)
    if h == 1:
        return L.then(x, L.a, letter("0", L.a))
    p = L.p
    first_zero = L.then(x, p, conj(T(h - 1, p), neg(L.bo(p))))
    others_one = forall(p, implies(conj(L.sub(x, p), neg(L.succ(x, p))), L.bo(p)))
    last_max = exists(p, conj(L.sub(x, p), L.lastsub(p), gen_max(h - 1, p)))
    return conj(first_zero, others_one, last_max)


# ---------------------------------------------------------------- (v_h)+


@lru_cache(maxsize=None)
def gen_ok(j: int) -> Formula:
    """Tout bloc de niveau j est un codage canonique μ_j(n)"""
    if j < 1:
        raise ValueError(f"j doit être >= 1: {j}")
    L = _Level(j)
    x, a, b = L.x, L.a, L.b
    if j == 1:
        body = disj(E(1, a), conj(letter("0", a), L.then(a, b, E(1, b))))
        return forall(x, implies(T(1, x), L.then(x, a, body)))
    p, q = L.p, L.q
    start = forall(
        x,
        implies(
            T(j, x),
            L.then(x, a, disj(E(j, a), conj(T(j - 1, a), L.then(a, b, E(j - 1, b))))),
        ),
    )
    bit_then_next = forall(
        p,
        implies(
            T(j - 1, p),
            L.after_close(
                p,
                lambda b, c: conj(
                    disj(letter("0", b), letter("1", b)),
                    L.then(b, c, disj(T(j - 1, c), E(j, c))),
                ),
            ),
        ),
    )
    chain = forall(p, forall(q, implies(L.nextsub(p, q), gen_inc(j - 1, p, q))))
    first_sub = exists(a, conj(L.succ(a, p), T(j, a)))
    canonical = forall(
        p,
        implies(conj(T(j - 1, p), L.lastsub(p), neg(first_sub)), L.bo(p)),
    )
    return conj(start, bit_then_next, chain, canonical)


@lru_cache(maxsize=None)
def gen_vh_plus(h: int) -> Formula:
    """Phrase FO(τ_h) définissant le langage (v_h)^+"""
    if h < 1:
        raise ValueError(f"h doit être >= 1: {h}")
    top = h + 1
    L = _Level(top)
    x, y, a, b, p, q = L.x, L.y, L.a, L.b, L.p, L.q
    dot = lambda t: letter(DOT, t)
    conditions = [gen_ok(j) for j in range(1, h + 1)]
    conditions += [
        forall(x, implies(neg(exists(y, lt(y, x))), T(top, x))),
        forall(x, implies(neg(exists(y, lt(x, y))), E(top, x))),
        forall(x, forall(y, implies(L.succ(x, y), iff(T(top, y), E(top, x))))),
        forall(
            x,
            implies(
                dot(x),
                conj(
                    exists(a, conj(L.succ(a, x), E(h, a))),
                    L.then(x, a, disj(T(h, a), E(top, a))),
                ),
            ),
        ),
        forall(x, implies(E(h, x), L.then(x, a, dot(a)))),
        forall(
            x,
            implies(T(top, x), L.then(x, a, conj(T(h, a), L.then(a, b, E(h, b))))),
        ),
        forall(x, implies(E(top, x), exists(a, conj(L.succ(a, x), dot(a))))),
        forall(p, forall(q, implies(L.nextsub(p, q), gen_inc(h, p, q)))),
        forall(p, implies(conj(T(h, p), L.lastsub(p)), gen_max(h, p))),
    ]
    return conj(*conditions)


# ---------------------------------------------------------------- Φ_h, Ψ_h


def _numbering_matrix(h: int) -> Formula:
    """Conditions sur X faisant des • une H-numérotation de 2^H copies"""
    top = h + 1
    L = _Level(top)
    x, y, p, q, o, s, e = L.x, L.y, L.p, L.q, L.o, L.s, L.e
    X = WITNESS_SET
    dot = lambda t: letter(DOT, t)
    inX = lambda t: member(t, X)

    def same_copy(left: str, right: str) -> Formula:
        return neg(exists(s, conj(lt(left, s), lt(s, right), E(top, s))))

    carry = forall(o, implies(conj(dot(o), lt(o, x), same_copy(o, x)), inX(o)))
    block_of = lambda t, blk: conj(
        T(h, blk), exists(e, conj(L.close(blk, e, h), L.succ(e, t)))
    )
    matched = exists(p, exists(q, conj(block_of(x, p), block_of(y, q), gen_equal(h, p, q))))
    next_copy = conj(
        lt(x, y),
        exists(s, conj(lt(x, s), lt(s, y), E(top, s))),
        neg(exists(s, exists(o, conj(lt(x, s), lt(s, o), lt(o, y), E(top, s), E(top, o))))),
    )
    flipped = disj(conj(inX(x), neg(carry)), conj(neg(inX(x)), carry))
    all_ones = forall(o, implies(conj(dot(o), lt(x, o), same_copy(x, o)), inX(o)))
    return conj(
        forall(x, implies(inX(x), dot(x))),
        forall(x, implies(conj(dot(x), neg(exists(s, conj(lt(s, x), E(top, s))))), neg(inX(x)))),
        forall(x, implies(conj(dot(x), neg(exists(s, conj(lt(x, s), T(top, s))))), inX(x))),
        forall(
            x,
            forall(
                y,
                implies(
                    conj(dot(x), dot(y), next_copy, matched),
                    iff(inX(y), flipped),
                ),
            ),
        ),
        forall(x, implies(conj(T(top, x), all_ones), neg(exists(s, conj(lt(x, s), T(top, s)))))),
    )


@lru_cache(maxsize=None)
def gen_Phi(h: int) -> Formula:
    """∃X FO(τ_h): vrai exactement sur w_h"""
    matrix = conj(gen_vh_plus(h), _numbering_matrix(h))
    return exists_set(WITNESS_SET, matrix)


@lru_cache(maxsize=None)
def gen_xi(h: int) -> Formula:
    """Chaque position appartient à exactement un P_σ"""
    names = [set_name(sigma) for sigma in alphabet(h)]
    x = _Level(h + 1).x
    some = disj(*(member(x, n) for n in names))
    at_most_one = [
        neg(conj(member(x, m), member(x, n)))
        for i, m in enumerate(names)
        for n in names[i + 1 :]
    ]
    return forall(x, conj(some, *at_most_one))


@lru_cache(maxsize=None)
def gen_Psi(h: int) -> Formula:
    """Phrase MonΣ¹₁(<) sur les ordres purs, vraie exactement sur A_ℓ(h)"""
    mapping = {sigma: set_name(sigma) for sigma in alphabet(h)}
    matrix = substitute_letters(gen_Phi(h).body, mapping)
    body = exists_set(WITNESS_SET, conj(gen_xi(h), matrix))
    for sigma in reversed(alphabet(h)):
        body = exists_set(mapping[sigma], body)
    return body


def phi_witness(h: int) -> Dict[str, Set[int]]:
    return {WITNESS_SET: h_numbering(h)}


def psi_witness(h: int) -> Dict[str, Set[int]]:
    """Ensembles P_σ (lettres de w_h) et X canonique sur A_ℓ(h)"""
    w = build_vh_wh(h).w
    sets = {set_name(sigma): {i for i, a in enumerate(w) if a == sigma} for sigma in alphabet(h)}
    sets[WITNESS_SET] = h_numbering(h)
    return sets
