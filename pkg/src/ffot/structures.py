"""Finite structures over {0..n-1} and truth evaluation of sentences."""
from __future__ import annotations

import itertools
import re
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .logic import (
    And, App, Atom, Const, Eq, Exists, Forall, Iff, Implies, Not, Or, ParseError, Var,
    Vocabulary, VocabularyError, check_sentence, print_formula,
)

INTERPRETED = "interpreted"
AXIOMATIC = "axiomatic"


class EvaluationError(ValueError):
    pass


def _frozen(a):
    a = np.array(a, dtype=np.int64)
    a.setflags(write=False)
    return a


def _frozen_bool(a):
    a = np.array(a, dtype=bool)
    a.setflags(write=False)
    return a


class FiniteStructure:
    """An interpretation of a vocabulary over the domain {0, ..., size-1}.

    Function tables are dense arrays of shape (size,)*arity; relations and the
    optional equality table are boolean arrays of the same kind.
    """

    __slots__ = ("vocab", "size", "constants", "functions", "relations",
                 "equality_mode", "equality", "_key")

    def __init__(self, vocab: Vocabulary, size: int, constants: dict, functions: dict,
                 relations: dict, equality_mode: str = INTERPRETED, equality=None):
        if size < 1:
            raise ValueError("domain size must be positive")
        self.vocab = vocab
        self.size = int(size)
        n = self.size
        self.constants = {}
        for c in vocab.constants:
            if c not in constants:
                raise ValueError(f"constant {c} has no interpretation")
            v = int(constants[c])
            if not 0 <= v < n:
                raise ValueError(f"constant {c} = {v} lies outside the domain")
            self.constants[c] = v
        self.functions = {}
        for f, arity in vocab.functions:
            if f not in functions:
                raise ValueError(f"function {f} has no table")
            table = _frozen(functions[f])
            if table.shape != (n,) * arity:
                raise ValueError(f"function {f} table has shape {table.shape}, expected {(n,) * arity}")
            if table.size and (table.min() < 0 or table.max() >= n):
                raise ValueError(f"function {f} maps outside the domain")
            self.functions[f] = table
        self.relations = {}
        for r, arity in vocab.relations:
            if r not in relations:
                raise ValueError(f"relation {r} has no table")
            table = relations[r]
            if isinstance(table, (set, frozenset, list, tuple)):
                table = tuples_to_array(table, n, arity)
            table = _frozen_bool(table)
            if table.shape != (n,) * arity:
                raise ValueError(f"relation {r} table has shape {table.shape}")
            self.relations[r] = table
        extra = (set(constants) - set(vocab.constants)) | (set(functions) - {f for f, _ in vocab.functions}) \
            | (set(relations) - {r for r, _ in vocab.relations})
        if extra:
            raise ValueError("interpretations given for undeclared symbols: " + ", ".join(sorted(extra)))
        if equality_mode not in (INTERPRETED, AXIOMATIC):
            raise ValueError(f"unknown equality mode {equality_mode!r}")
        self.equality_mode = equality_mode
        if equality_mode == AXIOMATIC:
            if equality is None:
                raise ValueError("axiomatic equality needs an equality table")
            if isinstance(equality, (set, frozenset, list, tuple)):
                equality = tuples_to_array(equality, n, 2)
            self.equality = _frozen_bool(equality)
            if self.equality.shape != (n, n):
                raise ValueError("equality table must be size x size")
        else:
            if equality is not None:
                raise ValueError("an equality table is only allowed in axiomatic mode")
            self.equality = None
        self._key = None

    def key(self):
        if self._key is None:
            parts = [self.size, self.equality_mode, tuple(self.constants[c] for c in self.vocab.constants)]
            parts += [self.functions[f].tobytes() for f, _ in self.vocab.functions]
            parts += [self.relations[r].tobytes() for r, _ in self.vocab.relations]
            parts.append(None if self.equality is None else self.equality.tobytes())
            self._key = (self.vocab, tuple(parts))
        return self._key

    def __eq__(self, other):
        return isinstance(other, FiniteStructure) and self.key() == other.key()

    def __hash__(self):
        return hash(self.key())

    def __repr__(self):
        return f"FiniteStructure(size={self.size}, constants={self.constants})"

    def relation_tuples(self, name):
        return sorted(tuple(int(x) for x in t) for t in np.argwhere(self.relations[name]))

    def equality_pairs(self):
        if self.equality is None:
            return None
        return sorted(tuple(int(x) for x in t) for t in np.argwhere(self.equality))

    def replace(self, constants=None, functions=None, relations=None):
        """Copy with some interpretations overridden."""
        return FiniteStructure(
            self.vocab, self.size,
            {**self.constants, **(constants or {})},
            {**self.functions, **(functions or {})},
            {**self.relations, **(relations or {})},
            self.equality_mode, self.equality,
        )


def tuples_to_array(tuples, n, arity):
    a = np.zeros((n,) * arity, dtype=bool)
    for t in tuples:
        t = tuple(t)
        if len(t) != arity:
            raise ValueError(f"tuple {t} has wrong arity (expected {arity})")
        if any(not 0 <= x < n for x in t):
            raise ValueError(f"tuple {t} lies outside the domain")
        a[t] = True
    return a


# ---------------------------------------------------------------- scalar evaluation

def eval_term(A: FiniteStructure, t, env: Optional[dict] = None) -> int:
    env = env or {}
    if isinstance(t, Var):
        if t.name not in env:
            raise EvaluationError(f"unbound variable {t.name}")
        return env[t.name]
    if isinstance(t, Const):
        if t.name not in A.constants:
            raise EvaluationError(f"unknown constant {t.name}")
        return A.constants[t.name]
    if isinstance(t, App):
        table = A.functions.get(t.func)
        if table is None:
            raise EvaluationError(f"unknown function {t.func}")
        return int(table[tuple(eval_term(A, a, env) for a in t.args)])
    raise TypeError(f"not a term: {t!r}")


def eval_formula(A: FiniteStructure, f, env: Optional[dict] = None) -> bool:
    """Classical truth of f in A under env, quantifiers ranging over the domain."""
    env = env or {}
    if isinstance(f, Atom):
        table = A.relations.get(f.rel)
        if table is None:
            raise EvaluationError(f"unknown relation {f.rel}")
        return bool(table[tuple(eval_term(A, a, env) for a in f.args)])
    if isinstance(f, Eq):
        a, b = eval_term(A, f.left, env), eval_term(A, f.right, env)
        if A.equality is None:
            return a == b
        return bool(A.equality[a, b])
    if isinstance(f, Not):
        return not eval_formula(A, f.body, env)
    if isinstance(f, And):
        return eval_formula(A, f.left, env) and eval_formula(A, f.right, env)
    if isinstance(f, Or):
        return eval_formula(A, f.left, env) or eval_formula(A, f.right, env)
    if isinstance(f, Implies):
        return (not eval_formula(A, f.left, env)) or eval_formula(A, f.right, env)
    if isinstance(f, Iff):
        return eval_formula(A, f.left, env) == eval_formula(A, f.right, env)
    if isinstance(f, Forall):
        return all(eval_formula(A, f.body, {**env, f.var: a}) for a in range(A.size))
    if isinstance(f, Exists):
        return any(eval_formula(A, f.body, {**env, f.var: a}) for a in range(A.size))
    raise TypeError(f"not a formula: {f!r}")


# ---------------------------------------------------------------- vectorized evaluation
# Every bound variable gets its own array axis; a formula evaluates to a boolean
# array broadcastable over the axes of the variables in scope.

def _vterm(A, t, axes, depth):
    if isinstance(t, Var):
        shape = [1] * depth
        shape[axes[t.name]] = A.size
        return np.arange(A.size).reshape(shape)
    if isinstance(t, Const):
        return np.full((1,) * depth, A.constants[t.name], dtype=np.int64)
    table = A.functions[t.func]
    return table[tuple(_vterm(A, a, axes, depth) for a in t.args)]


def _vformula(A, f, axes, depth):
    if isinstance(f, Atom):
        table = A.relations[f.rel]
        if not f.args:
            return np.full((1,) * depth, bool(table))
        return table[tuple(_vterm(A, a, axes, depth) for a in f.args)]
    if isinstance(f, Eq):
        a = _vterm(A, f.left, axes, depth)
        b = _vterm(A, f.right, axes, depth)
        if A.equality is None:
            return a == b
        return A.equality[a, b]
    if isinstance(f, Not):
        return ~_vformula(A, f.body, axes, depth)
    if isinstance(f, And):
        return _vformula(A, f.left, axes, depth) & _vformula(A, f.right, axes, depth)
    if isinstance(f, Or):
        return _vformula(A, f.left, axes, depth) | _vformula(A, f.right, axes, depth)
    if isinstance(f, Implies):
        return ~_vformula(A, f.left, axes, depth) | _vformula(A, f.right, axes, depth)
    if isinstance(f, Iff):
        return _vformula(A, f.left, axes, depth) == _vformula(A, f.right, axes, depth)
    if isinstance(f, (Forall, Exists)):
        inner = _vformula(A, f.body, {**axes, f.var: depth}, depth + 1)
        inner = np.broadcast_to(inner, inner.shape[:depth] + (A.size,))
        return inner.all(axis=depth) if isinstance(f, Forall) else inner.any(axis=depth)
    raise TypeError(f"not a formula: {f!r}")


def holds(A: FiniteStructure, sentence) -> bool:
    """Truth of a sentence, evaluated with array operations."""
    return bool(_vformula(A, sentence, {}, 0))


def _universal_prefix(f):
    names = []
    while isinstance(f, Forall):
        names.append(f.var)
        f = f.body
    return names, f


def failing_assignment(A: FiniteStructure, sentence):
    """Lexicographically smallest assignment to the leading universal block that
    makes the matrix false, or None when the sentence holds or has no such block."""
    names, body = _universal_prefix(sentence)
    if not names:
        return None
    # a variable re-bound inside the block shadows the outer one
    axes = {}
    for i, v in enumerate(names):
        axes[v] = i
    values = _vformula(A, body, axes, len(names))
    values = np.broadcast_to(values, (A.size,) * len(names))
    bad = np.argwhere(~values)
    if len(bad) == 0:
        return None
    first = bad[0]
    out = {}
    for i, v in enumerate(names):
        out[v] = int(first[i])   # later duplicates win, matching scoping
    return out


@dataclass(frozen=True)
class SentenceResult:
    sentence: object
    holds: bool
    witness: Optional[dict] = None   # failing assignment for a false universal


@dataclass(frozen=True)
class ModelReport:
    results: tuple
    equality_mode: str

    @property
    def all_true(self):
        return all(r.holds for r in self.results)

    def failures(self):
        return [r for r in self.results if not r.holds]

    def to_dict(self):
        return {
            "equality_mode": self.equality_mode,
            "all_true": self.all_true,
            "sentences": [
                {"sentence": print_formula(r.sentence), "holds": r.holds,
                 "witness": r.witness}
                for r in self.results
            ],
        }


def check_model(A: FiniteStructure, sentences) -> ModelReport:
    """Evaluate every sentence in A; false universals come with a witness."""
    results = []
    for s in sentences:
        try:
            check_sentence(s, A.vocab)
        except VocabularyError as exc:
            raise EvaluationError(f"vocabulary mismatch: {exc}") from None
        ok = holds(A, s)
        results.append(SentenceResult(s, ok, None if ok else failing_assignment(A, s)))
    return ModelReport(tuple(results), A.equality_mode)


def is_model(A: FiniteStructure, sentences) -> bool:
    return all(holds(A, s) for s in sentences)


# ---------------------------------------------------------------- relabeling

def apply_isomorphism(A: FiniteStructure, perm) -> FiniteStructure:
    """Image of A under the bijection i -> perm[i]."""
    perm = np.asarray(perm, dtype=np.int64)
    n = A.size
    if perm.shape != (n,) or sorted(perm.tolist()) != list(range(n)):
        raise ValueError("perm must be a permutation of the domain")
    inv = np.argsort(perm)
    consts = {c: int(perm[v]) for c, v in A.constants.items()}
    funcs = {}
    for f, table in A.functions.items():
        # B.f(perm a) = perm(A.f(a))  <=>  B.f(b) = perm(A.f(inv b))
        idx = np.ix_(*([inv] * table.ndim))
        funcs[f] = perm[table[idx]]
    rels = {}
    for r, table in A.relations.items():
        rels[r] = table[np.ix_(*([inv] * table.ndim))] if table.ndim else table.copy()
    eq = None
    if A.equality is not None:
        eq = A.equality[np.ix_(inv, inv)]
    return FiniteStructure(A.vocab, n, consts, funcs, rels, A.equality_mode, eq)


# ---------------------------------------------------------------- random structures

def random_structure(vocab: Vocabulary, size: int, rng: np.random.Generator,
                     density: float = 0.5) -> FiniteStructure:
    consts = {c: int(rng.integers(size)) for c in vocab.constants}
    funcs = {f: rng.integers(size, size=(size,) * a) for f, a in vocab.functions}
    rels = {r: rng.random((size,) * a) < density for r, a in vocab.relations}
    return FiniteStructure(vocab, size, consts, funcs, rels)


def all_structures(vocab: Vocabulary, size: int):
    """Every interpretation of vocab over {0..size-1} with identity equality."""
    cells = []
    for c in vocab.constants:
        cells.append(size)
    for f, a in vocab.functions:
        cells.extend([size] * size ** a)
    for r, a in vocab.relations:
        cells.extend([2] * size ** a)
    for values in itertools.product(*[range(k) for k in cells]):
        it = iter(values)
        consts = {c: next(it) for c in vocab.constants}
        funcs = {f: np.array([next(it) for _ in range(size ** a)]).reshape((size,) * a)
                 for f, a in vocab.functions}
        rels = {r: np.array([bool(next(it)) for _ in range(size ** a)]).reshape((size,) * a)
                for r, a in vocab.relations}
        yield FiniteStructure(vocab, size, consts, funcs, rels)


# ---------------------------------------------------------------- file format

_NAME = r"[A-Za-z_][A-Za-z0-9_]*"


def _strip(line):
    return line.split("#", 1)[0].strip()


def _parse_tuple(text):
    text = text.strip()
    if text.startswith("(") and text.endswith(")"):
        text = text[1:-1]
    if not text.strip():
        return ()
    return tuple(int(x) for x in text.split(","))


def parse_structure(text: str) -> FiniteStructure:
    """Read the line-oriented structure format.

    ``relation R/1 = {...}`` and ``function f/2 : ...`` may carry an explicit
    arity; it is needed only for empty relations.
    """
    size = None
    consts, funcs, rels = {}, {}, {}
    rel_order, fun_order = [], []
    arities = {}
    mode, eq_pairs = INTERPRETED, None
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = _strip(raw)
        if not line:
            continue
        try:
            if line.startswith("domain"):
                size = int(line.split()[1])
            elif line.startswith("constant "):
                m = re.fullmatch(rf"constant\s+({_NAME})\s*=\s*(\d+)", line)
                if not m:
                    raise ValueError("expected 'constant <name> = <element>'")
                consts[m.group(1)] = int(m.group(2))
            elif line.startswith("function "):
                m = re.fullmatch(rf"function\s+({_NAME})(?:\s*/\s*(\d+))?\s*:\s*(.*)", line)
                if not m:
                    raise ValueError("expected 'function <name> : <tuple>-><element> ...'")
                name = m.group(1)
                entries = {}
                for item in m.group(3).split():
                    if "->" not in item:
                        raise ValueError(f"bad function entry {item!r}")
                    lhs, rhs = item.split("->")
                    entries[_parse_tuple(lhs)] = int(rhs)
                arity = int(m.group(2)) if m.group(2) else (len(next(iter(entries))) if entries else None)
                if arity is None:
                    raise ValueError(f"function {name} has no entries")
                fun_order.append((name, arity))
                funcs[name] = entries
            elif line.startswith("relation "):
                m = re.fullmatch(rf"relation\s+({_NAME})(?:\s*/\s*(\d+))?\s*=\s*\{{(.*)\}}", line)
                if not m:
                    raise ValueError("expected 'relation <name> = { <tuple> ; ... }'")
                name = m.group(1)
                body = m.group(3).strip()
                tuples = [_parse_tuple(t) for t in body.split(";")] if body else []
                if m.group(2):
                    arity = int(m.group(2))
                elif tuples:
                    arity = len(tuples[0])
                else:
                    raise ValueError(f"empty relation {name} needs an explicit arity (relation {name}/k = {{}})")
                rel_order.append((name, arity))
                rels[name] = tuples
                arities[name] = arity
            elif line.startswith("equality"):
                m = re.fullmatch(r"equality\s*=\s*(interpreted|axiomatic)\s*(?:\{(.*)\})?", line)
                if not m:
                    raise ValueError("expected 'equality = interpreted | axiomatic { pairs }'")
                mode = m.group(1)
                if mode == AXIOMATIC:
                    body = (m.group(2) or "").strip()
                    eq_pairs = [_parse_tuple(t) for t in body.split(";")] if body else []
            else:
                raise ValueError(f"unrecognized line {line!r}")
        except ValueError as exc:
            raise ParseError(f"{exc} (line {lineno})") from None
    if size is None:
        raise ParseError("missing 'domain <n>' line")
    vocab = Vocabulary(tuple(rel_order), tuple(fun_order), tuple(consts))
    tables = {}
    for name, arity in fun_order:
        table = np.full((size,) * arity, -1, dtype=np.int64)
        for args, val in funcs[name].items():
            if len(args) != arity:
                raise ParseError(f"function {name}: entry {args} has wrong arity")
            table[args] = val
        if (table < 0).any():
            missing = tuple(int(x) for x in np.argwhere(table < 0)[0])
            raise ParseError(f"function {name}: no entry for {missing}")
        tables[name] = table
    try:
        return FiniteStructure(vocab, size, consts, tables, rels, mode, eq_pairs)
    except ValueError as exc:
        raise ParseError(str(exc)) from None


def dump_structure(A: FiniteStructure) -> str:
    lines = [f"domain {A.size}"]
    for c in A.vocab.constants:
        lines.append(f"constant {c} = {A.constants[c]}")
    for f, arity in A.vocab.functions:
        table = A.functions[f]
        entries = []
        for args in itertools.product(range(A.size), repeat=arity):
            entries.append(",".join(map(str, args)) + "->" + str(int(table[args])))
        lines.append(f"function {f}/{arity} : " + " ".join(entries))
    for r, arity in A.vocab.relations:
        tuples = A.relation_tuples(r)
        body = " ; ".join(",".join(map(str, t)) for t in tuples) if arity else ("()" if tuples else "")
        lines.append(f"relation {r}/{arity} = {{{body}}}")
    if A.equality is None:
        lines.append("equality = interpreted")
    else:
        pairs = " ; ".join(f"{a},{b}" for a, b in A.equality_pairs())
        lines.append(f"equality = axiomatic {{{pairs}}}")
    return "\n".join(lines) + "\n"
