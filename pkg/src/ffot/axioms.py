"""Equality, successor and ordered-field axiom sets, plus their standard finite models."""
from __future__ import annotations

from fractions import Fraction
from itertools import combinations

import numpy as np

from .logic import (
    And, App, Atom, Const, Eq, Exists, Forall, Iff, Implies, Not, Or, Var, Vocabulary,
    conj, forall,
)
from .structures import FiniteStructure

x, y, z = Var("x"), Var("y"), Var("z")
ZERO, ONE, E = Const("zero"), Const("one"), Const("e")
NEG_E, R, INV_R, NEG_R = Const("neg_e"), Const("r"), Const("inv_r"), Const("neg_r")

PSA_VOCAB = Vocabulary((), (("S", 1),), ("zero",))
PSA_F_VOCAB = Vocabulary((), (("S", 1),), ("zero", "e"))
DOF_VOCAB = Vocabulary((("lt", 2), ("le", 2)), (("plus", 2), ("times", 2)), ("zero", "one"))
# neg_r stands for the "-r" written in the first finite-field sentence
DOF_F_VOCAB = Vocabulary(
    (("lt", 2), ("le", 2), ("approx", 2)),
    (("plus", 2), ("times", 2)),
    ("zero", "one", "e", "neg_e", "r", "inv_r", "neg_r"),
)


def S(t):
    return App("S", (t,))


def plus(a, b):
    return App("plus", (a, b))


def times(a, b):
    return App("times", (a, b))


def lt(a, b):
    return Atom("lt", (a, b))


def le(a, b):
    return Atom("le", (a, b))


def approx(a, b):
    return Atom("approx", (a, b))


# ---------------------------------------------------------------- equality

def _congruence(symbol, arity, is_relation):
    xs = [Var(f"x{i}") for i in range(1, arity + 1)]
    ys = [Var(f"y{i}") for i in range(1, arity + 1)]
    hyp = conj(Eq(a, b) for a, b in zip(xs, ys))
    if is_relation:
        concl = Iff(Atom(symbol, xs), Atom(symbol, ys))
    else:
        concl = Eq(App(symbol, xs), App(symbol, ys))
    return forall([v.name for v in xs + ys], Implies(hyp, concl))


def equality_axioms(vocab: Vocabulary) -> list:
    """Reflexivity, symmetry, transitivity, then one congruence sentence per
    relation and per function.  Nullary relations need none."""
    out = [
        Forall("x", Eq(x, x)),
        Forall("x", Forall("y", Implies(Eq(x, y), Eq(y, x)))),
        forall("xyz", Implies(And(Eq(x, y), Eq(y, z)), Eq(x, z))),
    ]
    for name, arity in vocab.relations:
        if arity:
            out.append(_congruence(name, arity, True))
    for name, arity in vocab.functions:
        out.append(_congruence(name, arity, False))
    return out


# ---------------------------------------------------------------- successor

def peano_successor_axioms() -> list:
    return [
        Forall("x", Not(Eq(S(x), ZERO))),
        forall("xy", Implies(Eq(S(x), S(y)), Eq(x, y))),
        Forall("x", Not(Eq(S(x), x))),
    ]


def finite_peano_axioms() -> list:
    return [
        Forall("x", Not(Eq(S(x), ZERO))),
        forall("xy", Implies(Eq(S(x), S(y)), Or(Eq(x, y), Eq(S(x), E)))),
        Forall("x", Iff(Eq(S(x), x), Eq(x, E))),
    ]


# ---------------------------------------------------------------- ordered fields

def _dof_rows():
    """The field axioms as (left, right) pairs, in display order."""
    add_assoc = forall("xyz", Eq(plus(plus(x, y), z), plus(x, plus(y, z))))
    mul_assoc = forall("xyz", Eq(times(times(x, y), z), times(x, times(y, z))))
    distrib = forall("xyz", Eq(times(plus(x, y), z), plus(times(x, z), times(y, z))))
    return [
        (Forall("x", And(Eq(plus(x, ZERO), x), Eq(times(x, ZERO), ZERO))), lt(ZERO, ONE)),
        (add_assoc, forall("xy", Eq(plus(x, y), plus(y, x)))),
        (mul_assoc, forall("xy", Eq(times(x, y), times(y, x)))),
        (distrib, Forall("x", Exists("y", Eq(plus(x, y), ZERO)))),
        (forall("xy", Implies(le(ZERO, y), le(x, plus(x, y)))),
         Forall("x", Implies(Not(Eq(x, ZERO)), Exists("y", Eq(times(x, y), ONE))))),
        (forall("xyz", Implies(And(lt(x, y), lt(y, z)), lt(x, z))), Forall("x", Not(lt(x, x)))),
        (forall("xyz", Implies(le(x, y), le(plus(x, z), plus(y, z)))),
         forall("xy", Iff(le(x, y), Or(lt(x, y), Eq(x, y))))),
        (forall("xyz", Implies(And(lt(ZERO, z), le(x, y)), le(times(x, z), times(y, z)))),
         forall("xy", Or(Or(lt(x, y), Eq(x, y)), lt(y, x)))),
    ], (add_assoc, mul_assoc, distrib)


def dense_ordered_field_axioms() -> list:
    rows, _ = _dof_rows()
    return [s for pair in rows for s in pair]


def _bounded(lo, terms, hi, rel=lt):
    """lo < t1,...,tk < hi  as  (lo < t1) & (t1 < hi) & ... & (lo < tk) & (tk < hi)."""
    parts = []
    for t in terms:
        parts += [rel(lo, t), rel(t, hi)]
    return conj(parts)


def finite_field_core() -> list:
    """The eight sentences added for the finite approximation (first line kept whole)."""
    return [
        conj([le(ZERO, INV_R), Eq(times(R, INV_R), ONE), Eq(times(R, R), E),
              Eq(plus(NEG_E, E), ZERO), Eq(plus(NEG_R, R), ZERO)]),
        forall("xy", Iff(approx(x, y), And(le(x, plus(y, INV_R)), le(y, plus(x, INV_R))))),
        Forall("x", Implies(le(ZERO, x), Eq(plus(E, x), E))),
        Forall("x", Implies(le(ONE, x), Eq(times(E, x), E))),
        Forall("x", And(le(x, E), le(NEG_E, x))),
        forall("xyz", Implies(_bounded(NEG_E, [plus(x, y), plus(y, z)], E),
                              Eq(plus(plus(x, y), z), plus(x, plus(y, z))))),
        forall("xyz", Implies(_bounded(NEG_E, [times(x, y), times(y, z)], E),
                              approx(times(times(x, y), z), times(x, times(y, z))))),
        forall("xyz", Implies(_bounded(NEG_E, [plus(x, y), times(x, z), times(y, z)], E),
                              approx(times(plus(x, y), z), plus(times(x, z), times(y, z))))),
    ]


def finite_dof_axioms() -> list:
    _, removed = _dof_rows()
    rest = [s for s in dense_ordered_field_axioms() if s not in removed]
    return finite_field_core() + rest


# ---------------------------------------------------------------- distinctness

def distinct_constants_axioms(names) -> list:
    names = list(names)
    if len(names) < 2:
        raise ValueError("distinctness needs at least two constants")
    if len(set(names)) != len(names):
        raise ValueError("repeated constant in distinctness list")
    return [Not(Eq(Const(a), Const(b))) for a, b in combinations(names, 2)]


# ---------------------------------------------------------------- named sets

AXIOM_SETS = ("eq", "psa", "psa_f", "dof", "dof_f", "distinct")


def axiom_set(name: str, vocab: Vocabulary = None, constants=()):
    """(vocabulary, sentences) for a named set.  `eq` uses `vocab`; `distinct`
    uses `constants`."""
    name = name.lower()
    if name == "eq":
        vocab = vocab or Vocabulary()
        return vocab, equality_axioms(vocab)
    if name == "psa":
        return PSA_VOCAB, peano_successor_axioms()
    if name == "psa_f":
        return PSA_F_VOCAB, finite_peano_axioms()
    if name == "dof":
        return DOF_VOCAB, dense_ordered_field_axioms()
    if name == "dof_f":
        return DOF_F_VOCAB, finite_dof_axioms()
    if name == "distinct":
        return Vocabulary((), (), tuple(constants)), distinct_constants_axioms(constants)
    raise ValueError(f"unknown axiom set {name!r}; choose from {', '.join(AXIOM_SETS)}")


# ---------------------------------------------------------------- finite models

def build_psa_f_structure(n: int) -> FiniteStructure:
    """Successor chain 0 -> 1 -> ... -> n with n fixed; zero = 0, e = n."""
    if n < 0:
        raise ValueError("n must be non-negative")
    succ = np.minimum(np.arange(n + 1) + 1, n)
    return FiniteStructure(PSA_F_VOCAB, n + 1, {"zero": 0, "e": n}, {"S": succ}, {})


def _round_half_toward_zero(num: int, den: int) -> int:
    """Nearest integer to num/den (den > 0); halves go toward zero."""
    q = Fraction(num, den)
    lo = q.numerator // q.denominator
    frac = q - lo
    if frac > Fraction(1, 2):
        return lo + 1
    if frac < Fraction(1, 2):
        return lo
    return lo + 1 if q < 0 else lo


def build_dof_f_structure(m: int) -> FiniteStructure:
    """Grid {a/m : -m^3 <= a <= m^3}; element i stands for a = i - m^3.

    Sums and products saturate at +-e; a product goes to the grid point
    nearest a*b/m^2 with halves rounded toward zero.  approx holds when the
    two values are within 1/r of each other, computed with the saturating sum.
    """
    if m < 2:
        raise ValueError("m must be at least 2")
    top = m ** 3
    size = 2 * top + 1
    a = np.arange(size) - top          # numerator of each element over m

    def idx(num):
        return int(max(-top, min(top, num))) + top

    add = np.empty((size, size), dtype=np.int64)
    mul = np.empty((size, size), dtype=np.int64)
    for i in range(size):
        for j in range(size):
            add[i, j] = idx(a[i] + a[j])
            mul[i, j] = idx(_round_half_toward_zero(int(a[i]) * int(a[j]), m))
    less = a[:, None] < a[None, :]
    leq = a[:, None] <= a[None, :]
    inv = idx(1)
    # x approx y  iff  x <= y (+) 1/r  and  y <= x (+) 1/r
    shifted = a[add[:, inv]]
    near = (a[:, None] <= shifted[None, :]) & (a[None, :] <= shifted[:, None])
    consts = {"zero": idx(0), "one": idx(m), "e": idx(top), "neg_e": idx(-top),
              "r": idx(m * m), "inv_r": inv, "neg_r": idx(-m * m)}
    return FiniteStructure(DOF_F_VOCAB, size, consts, {"plus": add, "times": mul},
                           {"lt": less, "le": leq, "approx": near})


def grid_value(m: int, element: int) -> Fraction:
    """Rational number represented by an element of build_dof_f_structure(m)."""
    return Fraction(element - m ** 3, m)
