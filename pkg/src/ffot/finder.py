"""Bounded finite model search.

Sentences are grounded over {0..n-1} and the search backtracks over the
interpretation cells.  In interpreted-equality mode the partial assignment is
kept as a congruence of *nodes* (domain elements and function/constant cells)
with recorded disequalities, so an equation such as ``I(x) = q`` can be
propagated before either side has a concrete value.  Every ground instance is
evaluated three-valued against the partial state; an instance that is false
triggers a backtrack, and one whose remaining requirement is a conjunction of
literals propagates them.

Symmetry breaking is the least-number heuristic: when a cell is given a value,
all elements above the largest element mentioned so far are interchangeable,
so only the smallest of them is tried.

Each merge and disequality keeps the set of decisions it rests on, so a
conflict names the decision levels responsible.  The search backjumps past
levels not in that set and, when a subtree is exhausted, learns a short
clause forbidding the responsible decisions together.
"""
from __future__ import annotations

import functools
import itertools
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .logic import (
    And, Atom, Const, Eq, Exists, Forall, Iff, Implies, Not, Or, Var, Vocabulary,
    check_sentence, conj, infer_vocabulary,
)
from .structures import AXIOMATIC, INTERPRETED, FiniteStructure, is_model

# ground formula tags
G_EQ, G_REL, G_RELV, G_NOT, G_AND, G_OR, G_IMP, G_IFF = range(8)
# literal / blocker kinds
K_EQ, K_REL, K_VAL = range(3)
# trail entries
T_MERGE, T_DIS, T_REL, T_STAT, T_MDN = range(5)


class BudgetExhausted(RuntimeError):
    """The time budget ran out; `partial` holds whatever was found so far."""

    def __init__(self, message="time budget exhausted", partial=None):
        super().__init__(message)
        self.partial = list(partial or [])


@dataclass(frozen=True)
class SearchConfig:
    """Search options.  `sizes` is an inclusive (low, high) pair."""

    sizes: tuple = (1, 1)
    model_limit: int = 0             # 0 means all
    equality_mode: str = INTERPRETED
    symmetry_breaking: bool = True
    time_budget_ms: Optional[int] = None
    prune: bool = True               # False: plain generate-and-test
    jobs: int = 1

    def __post_init__(self):
        lo, hi = self.sizes
        if lo < 1 or hi < lo:
            raise ValueError(f"bad size range {self.sizes}")

    @classmethod
    def at(cls, size, **kw):
        return cls(sizes=(size, size), **kw)

    def size_list(self):
        return list(range(self.sizes[0], self.sizes[1] + 1))

    def deadline(self):
        if self.time_budget_ms is None:
            return None
        return time.monotonic() + self.time_budget_ms / 1000.0


@dataclass
class SearchStats:
    models: int = 0
    decisions: int = 0
    conflicts: int = 0
    learned: int = 0

    def add(self, other):
        self.models += other.models
        self.decisions += other.decisions
        self.conflicts += other.conflicts
        self.learned += other.learned


# ---------------------------------------------------------------- layout & grounding

class Layout:
    """Numbering of nodes (elements, constants, function cells) and relation variables."""

    def __init__(self, vocab: Vocabulary, n: int, mode: str):
        self.vocab, self.n, self.mode = vocab, n, mode
        node = n
        self.const_node = {}
        for c in vocab.constants:
            self.const_node[c] = node
            node += 1
        self.func_base, self.func_arity = {}, {}
        for f, a in vocab.functions:
            self.func_base[f] = node
            self.func_arity[f] = a
            node += n ** a
        self.num_nodes = node
        var = 0
        self.rel_base = {}
        for r, a in vocab.relations:
            self.rel_base[r] = var
            var += n ** a
        self.eq_base = None
        if mode == AXIOMATIC:
            self.eq_base = var
            var += n * n
        self.num_rel = var
        # largest element mentioned by each node / relation variable
        node_max = list(range(n)) + [-1] * (node - n)
        for f, a in vocab.functions:
            base = self.func_base[f]
            for k, args in enumerate(itertools.product(range(n), repeat=a)):
                node_max[base + k] = max(args)
        self.node_max = node_max
        rel_max = [-1] * var
        for r, a in vocab.relations:
            base = self.rel_base[r]
            for k, args in enumerate(itertools.product(range(n), repeat=a)):
                rel_max[base + k] = max(args) if args else -1
        if self.eq_base is not None:
            for k, args in enumerate(itertools.product(range(n), repeat=2)):
                rel_max[self.eq_base + k] = max(args)
        self.rel_max = rel_max


@functools.lru_cache(maxsize=64)
def layout_for(vocab, n, mode):
    return Layout(vocab, n, mode)


def _rank(args, n):
    k = 0
    for a in args:
        k = k * n + a
    return k


class _Grounder:
    def __init__(self, layout: Layout):
        self.L = layout
        self.n = layout.n

    def term(self, t, env):
        if isinstance(t, Var):
            return env[t.name]
        if isinstance(t, Const):
            return self.L.const_node[t.name]
        args = tuple(self.term(a, env) for a in t.args)
        base = self.L.func_base[t.func]
        n = self.n
        if all(type(a) is int and a < n for a in args):
            return base + _rank(args, n)
        return (base, args)

    def formula(self, f, env):
        n = self.n
        if isinstance(f, Eq):
            a, b = self.term(f.left, env), self.term(f.right, env)
            if self.L.mode == INTERPRETED:
                if a == b:
                    return True
                if type(a) is int and type(b) is int and a < n and b < n:
                    return False
                return (G_EQ, a, b)
            if type(a) is int and type(b) is int and a < n and b < n:
                return (G_RELV, self.L.eq_base + a * n + b)
            return (G_REL, self.L.eq_base, (a, b))
        if isinstance(f, Atom):
            args = tuple(self.term(a, env) for a in f.args)
            base = self.L.rel_base[f.rel]
            if all(type(a) is int and a < n for a in args):
                return (G_RELV, base + _rank(args, n))
            return (G_REL, base, args)
        if isinstance(f, Not):
            g = self.formula(f.body, env)
            return (not g) if type(g) is bool else (G_NOT, g)
        if isinstance(f, And):
            return self.junction(G_AND, [self.formula(f.left, env), self.formula(f.right, env)])
        if isinstance(f, Or):
            return self.junction(G_OR, [self.formula(f.left, env), self.formula(f.right, env)])
        if isinstance(f, Implies):
            a = self.formula(f.left, env)
            if a is False:
                return True
            b = self.formula(f.right, env)
            if a is True:
                return b
            if b is True:
                return True
            if b is False:
                return (G_NOT, a)
            return (G_IMP, a, b)
        if isinstance(f, Iff):
            a, b = self.formula(f.left, env), self.formula(f.right, env)
            if type(a) is bool:
                return b if a else self.negate(b)
            if type(b) is bool:
                return a if b else self.negate(a)
            return (G_IFF, a, b)
        if isinstance(f, (Forall, Exists)):
            parts = [self.formula(f.body, {**env, f.var: v}) for v in range(n)]
            return self.junction(G_AND if isinstance(f, Forall) else G_OR, parts)
        raise TypeError(f"not a formula: {f!r}")

    @staticmethod
    def negate(g):
        if type(g) is bool:
            return not g
        if g[0] == G_NOT:
            return g[1]
        return (G_NOT, g)

    @staticmethod
    def junction(tag, parts):
        absorbing = tag == G_OR     # True absorbs a disjunction
        out = []
        for p in parts:
            if type(p) is bool:
                if p == absorbing:
                    return absorbing
                continue
            if p[0] == tag:
                out.extend(p[1])
            else:
                out.append(p)
        if not out:
            return not absorbing
        if len(out) == 1:
            return out[0]
        return (tag, tuple(out))

    def instances(self, sentence):
        """Ground instances of the sentence after splitting leading ∀ and ∧.
        Returns None when some instance is false outright."""
        out = []
        stack = [(sentence, {})]
        while stack:
            f, env = stack.pop()
            if isinstance(f, Forall):
                for v in reversed(range(self.n)):
                    stack.append((f.body, {**env, f.var: v}))
            elif isinstance(f, And):
                stack.append((f.right, env))
                stack.append((f.left, env))
            else:
                g = self.formula(f, env)
                if g is False:
                    return None
                if g is not True:
                    out.append(g)
        return tuple(out)


@functools.lru_cache(maxsize=4096)
def ground_sentence(vocab, n, mode, sentence):
    return _Grounder(layout_for(vocab, n, mode)).instances(sentence)


# ---------------------------------------------------------------- search

class _Search:
    """Backtracking over node values with conflict-directed backjumping.

    Every merge is kept as an edge of a proof forest labelled with the bit
    mask of the decision levels it rests on; disequalities and relation
    values carry masks too.  When an instance fails or forces literals, the
    facts its evaluation read are explained through the forest, so each
    conflict comes with the set of decisions behind it and the search can
    jump back over decisions that played no part.  Skipping values by the
    least-number rule needs no mask: the facts behind any conflict mention
    only elements up to the current maximum, so the skipped values behave
    exactly like the one that was tried.
    """

    def __init__(self, layout, instances, symmetry_breaking=True, canonical_order=False,
                 deadline=None):
        L = layout
        self.L = L
        self.n = L.n
        self.nn = L.num_nodes
        self.sb = symmetry_breaking
        self.canonical = canonical_order
        self.deadline = deadline
        nn = self.nn
        self.parent = list(range(nn))
        self.csize = [1] * nn
        self.elem = list(range(L.n)) + [-1] * (nn - L.n)
        self.dis = [{} for _ in range(nn)]    # root -> {other node: (mask, own node)}
        self.adj = [[] for _ in range(nn)]    # proof forest: node -> [(node, mask)]
        self.members = [[i] for i in range(nn)]
        self.cmax = list(L.node_max)
        self.relval = [-1] * L.num_rel
        self.rdeps = [0] * L.num_rel
        self.inst = list(instances)
        self.status = [0] * len(self.inst)
        self.watch = [set() for _ in range(nn + L.num_rel)]
        self.queue = []
        self.inq = [False] * len(self.inst)
        self.trail = []
        self.mdn = -1
        self.depth = 0
        self.conflict = 0
        self.stats = SearchStats()
        self._w = []
        self._blk = None
        self._r = []
        self._ticks = 0
        self.declits = []       # decision literal of each level, as a ground formula
        self.pending = []       # learned instances not yet queued
        self.max_learned_len = 12

    # -- union-find
    def find(self, x):
        p = self.parent
        while p[x] != x:
            x = p[x]
        return x

    def explain(self, a, b):
        """Mask of the merges joining a and b (same class)."""
        if a == b:
            return 0
        adj = self.adj
        prev = {a: None}
        stack = [a]
        while stack:
            x = stack.pop()
            if x == b:
                break
            for y, m in adj[x]:
                if y not in prev:
                    prev[y] = (x, m)
                    stack.append(y)
        mask = 0
        x = b
        while x != a:
            x, m = prev[x]
            mask |= m
        return mask

    def _dis_edge(self, ra, rb):
        """(mask, node in ra, node in rb) for a recorded disequality, or None."""
        da, db = self.dis[ra], self.dis[rb]
        find = self.find
        if len(da) <= len(db):
            for d, (m, own) in da.items():
                if find(d) == rb:
                    return m, own, d
        else:
            for d, (m, own) in db.items():
                if find(d) == ra:
                    return m, d, own
        return None

    def apart(self, ra, rb):
        elem = self.elem
        if elem[ra] >= 0 and elem[rb] >= 0:
            return True
        return self._dis_edge(ra, rb) is not None

    def apart_mask(self, a, b):
        """Mask behind a != b for nodes whose classes are apart."""
        ra, rb = self.find(a), self.find(b)
        elem = self.elem
        if elem[ra] >= 0 and elem[rb] >= 0:
            return self.explain(a, elem[ra]) | self.explain(b, elem[rb])
        m, p, q = self._dis_edge(ra, rb)
        return m | self.explain(a, p) | self.explain(b, q)

    def facts_mask(self, facts):
        mask = 0
        elem, find = self.elem, self.find
        for f in facts:
            k = f[0]
            if k == 0:
                nd = f[1]
                mask |= self.explain(nd, elem[find(nd)])
            elif k == 1:
                mask |= self.explain(f[1], f[2])
            elif k == 2:
                mask |= self.apart_mask(f[1], f[2])
            else:
                mask |= self.rdeps[f[1]]
        return mask

    def _bump(self, m):
        if m > self.mdn:
            self.trail.append((T_MDN, self.mdn))
            self.mdn = m

    def _wake(self, root):
        status, inq, q, watch = self.status, self.inq, self.queue, self.watch
        for m in self.members[root]:
            for i in watch[m]:
                if not inq[i] and not status[i]:
                    inq[i] = True
                    q.append(i)

    def merge(self, a, b, deps):
        find = self.find
        ra, rb = find(a), find(b)
        if ra == rb:
            return True
        if self.apart(ra, rb):
            self.conflict = self.apart_mask(a, b) | deps
            return False
        if self.csize[ra] > self.csize[rb]:
            ra, rb = rb, ra
        elem, dis, members = self.elem, self.dis, self.members
        ea, eb = elem[ra], elem[rb]
        self.trail.append((T_MERGE, ra, rb, eb, dis[rb], len(members[rb]), self.cmax[rb], a, b))
        self.adj[a].append((b, deps))
        self.adj[b].append((a, deps))
        self.parent[ra] = rb
        self.csize[rb] += self.csize[ra]
        wake_parent = False
        if eb < 0 and ea >= 0:
            elem[rb] = ea
            wake_parent = True
        if dis[ra]:
            merged = dict(dis[rb])
            merged.update(dis[ra])
            dis[rb] = merged
            wake_parent = True
        self._wake(ra)
        if wake_parent:
            self._wake(rb)
        members[rb].extend(members[ra])
        cm = max(self.cmax[ra], self.cmax[rb])
        self.cmax[rb] = cm
        self._bump(cm)
        return True

    def add_dis(self, a, b, deps):
        find = self.find
        ra, rb = find(a), find(b)
        if ra == rb:
            self.conflict = self.explain(a, b) | deps
            return False
        if self.apart(ra, rb):
            return True
        dis = self.dis
        self.trail.append((T_DIS, ra, dis[ra], rb, dis[rb]))
        dis[ra] = {**dis[ra], b: (deps, a)}
        dis[rb] = {**dis[rb], a: (deps, b)}
        self._bump(max(self.cmax[ra], self.cmax[rb]))
        self._wake(ra)
        self._wake(rb)
        return True

    def set_rel(self, var, val, deps):
        cur = self.relval[var]
        if cur >= 0:
            if cur == val:
                return True
            self.conflict = self.rdeps[var] | deps
            return False
        self.relval[var] = val
        self.rdeps[var] = deps
        self.trail.append((T_REL, var))
        self._bump(self.L.rel_max[var])
        status, inq, q = self.status, self.inq, self.queue
        for i in self.watch[self.nn + var]:
            if not inq[i] and not status[i]:
                inq[i] = True
                q.append(i)
        return True

    def undo(self, mark):
        trail = self.trail
        parent, csize, elem, dis, members, cmax, adj = (
            self.parent, self.csize, self.elem, self.dis, self.members, self.cmax, self.adj)
        while len(trail) > mark:
            e = trail.pop()
            k = e[0]
            if k == T_STAT:
                self.status[e[1]] = 0
            elif k == T_MERGE:
                _, ra, rb, eb, disb, mlen, cmb, a, b = e
                parent[ra] = ra
                csize[rb] -= csize[ra]
                elem[rb] = eb
                dis[rb] = disb
                del members[rb][mlen:]
                cmax[rb] = cmb
                adj[a].pop()
                adj[b].pop()
            elif k == T_DIS:
                dis[e[1]] = e[2]
                dis[e[3]] = e[4]
            elif k == T_REL:
                self.relval[e[1]] = -1
            else:
                self.mdn = e[1]
        for i in self.queue:
            self.inq[i] = False
        self.queue.clear()

    # -- three-valued evaluation; self._r records the facts read
    def node(self, t):
        if type(t) is int:
            return t
        base, args = t
        n = self.n
        elem = self.elem
        find = self.find
        k = 0
        for a in args:
            nd = a if type(a) is int else self.node(a)
            if nd < 0:
                return -1
            v = elem[find(nd)]
            if v < 0:
                self._w.append(nd)
                if self._blk is None:
                    self._blk = (K_VAL, nd)
                return -1
            if nd >= n:
                self._r.append((0, nd))
            k = k * n + v
        return base + k

    def relvar(self, var, want):
        x = self.relval[var]
        if x >= 0:
            self._r.append((3, var))
            return (x == 1) == want, None
        self._w.append(self.nn + var)
        if self._blk is None:
            self._blk = (K_REL, var)
        return None, [(K_REL, var, 1 if want else 0)]

    def ev(self, g, want):
        """Value of g (negated when want is False): True, False or None.
        With None comes the list of literals the formula forces if it must hold."""
        tag = g[0]
        if tag == G_EQ:
            a = self.node(g[1])
            if a < 0:
                return None, None
            b = self.node(g[2])
            if b < 0:
                return None, None
            find = self.find
            ra, rb = find(a), find(b)
            if ra == rb:
                self._r.append((1, a, b))
                return want, None
            if self.apart(ra, rb):
                self._r.append((2, a, b))
                return not want, None
            self._w.append(a)
            self._w.append(b)
            if self._blk is None:
                self._blk = (K_EQ, a, b)
            return None, [(K_EQ, a, b, want)]
        if tag == G_RELV:
            return self.relvar(g[1], want)
        if tag == G_REL:
            n = self.n
            k = 0
            for a in g[2]:
                nd = self.node(a)
                if nd < 0:
                    return None, None
                v = self.elem[self.find(nd)]
                if v < 0:
                    self._w.append(nd)
                    if self._blk is None:
                        self._blk = (K_VAL, nd)
                    return None, None
                if nd >= n:
                    self._r.append((0, nd))
                k = k * n + v
            return self.relvar(g[1] + k, want)
        if tag == G_NOT:
            return self.ev(g[1], not want)
        if tag == G_AND or tag == G_OR:
            return self.junction([(c, want) for c in g[1]], (tag == G_AND) == want)
        if tag == G_IMP:
            if want:
                return self.junction([(g[1], False), (g[2], True)], False)
            return self.junction([(g[1], True), (g[2], False)], True)
        # G_IFF
        va, _ = self.ev(g[1], True)
        if va is not None:
            return self.ev(g[2], want if va else not want)
        vb, _ = self.ev(g[2], True)
        if vb is not None:
            return self.ev(g[1], want if vb else not want)
        return None, None

    def junction(self, items, conjunctive):
        ev = self.ev
        if conjunctive:
            lits = []
            unknown = False
            for c, w in items:
                v, l = ev(c, w)
                if v is False:
                    return False, None
                if v is None:
                    unknown = True
                    if l:
                        lits.extend(l)
            return (None, lits) if unknown else (True, None)
        count = 0
        keep = None
        for c, w in items:
            v, l = ev(c, w)
            if v is True:
                return True, None
            if v is None:
                count += 1
                keep = l
        if count == 0:
            return False, None
        return None, (keep if count == 1 else None)

    def apply(self, lit, deps):
        if lit[0] == K_EQ:
            if lit[3]:
                return self.merge(lit[1], lit[2], deps)
            return self.add_dis(lit[1], lit[2], deps)
        return self.set_rel(lit[1], lit[2], deps)

    def propagate(self):
        q = self.queue
        inq, status, inst, watch = self.inq, self.status, self.inst, self.watch
        if self.pending:
            for i in self.pending:
                if not inq[i]:
                    inq[i] = True
                    q.append(i)
            self.pending.clear()
        while q:
            i = q.pop()
            inq[i] = False
            if status[i]:
                continue
            self._w = []
            self._blk = None
            self._r = []
            v, lits = self.ev(inst[i], True)
            if v is True:
                status[i] = 1
                self.trail.append((T_STAT, i))
                continue
            if v is False:
                self.conflict = self.facts_mask(self._r)
                self.stats.conflicts += 1
                return False
            for nd in self._w:
                watch[nd].add(i)
            if lits:
                deps = self.facts_mask(self._r)
                for lit in lits:
                    if not self.apply(lit, deps):
                        self.stats.conflicts += 1
                        return False
        return True

    # -- decisions
    def choose(self):
        if not self.canonical:
            try:
                i = self.status.index(0)
            except ValueError:
                i = -1
            if i >= 0:
                self._w = []
                self._blk = None
                v, _ = self.ev(self.inst[i], True)
                if v is None and self._blk is not None:
                    return self._blk
                # stale status: settle it through propagation on the next round
                self.inq[i] = True
                self.queue.append(i)
                return ("recheck",)
        elem, find = self.elem, self.find
        for nd in range(self.n, self.nn):
            if elem[find(nd)] < 0:
                return (K_VAL, nd)
        relval = self.relval
        for var in range(self.L.num_rel):
            if relval[var] < 0:
                return (K_REL, var)
        return None

    def tick(self):
        self._ticks += 1
        if self.deadline is not None and self._ticks % 64 == 0 and time.monotonic() > self.deadline:
            raise BudgetExhausted()

    def start(self):
        for i in range(len(self.inst)):
            self.inq[i] = True
            self.queue.append(i)
        return self.propagate()

    def _branch(self, make, lit):
        """Try one branch; the mask behind its failure (-1 once it found a model)."""
        mark = len(self.trail)
        self.declits.append(lit)
        if make() and self.propagate():
            cs = yield from self.solve()
        else:
            cs = self.conflict
        self.declits.pop()
        self.undo(mark)
        return cs

    def learn(self, cs):
        """Record the nogood over the decisions in cs as a new instance."""
        parts = []
        for d in range(1, self.depth + 1):
            if cs >> d & 1:
                lit = self.declits[d - 1]
                parts.append(lit[1] if lit[0] == G_NOT else (G_NOT, lit))
        if not parts or len(parts) > self.max_learned_len:
            return
        g = parts[0] if len(parts) == 1 else (G_OR, tuple(parts))
        self.inst.append(g)
        self.status.append(0)
        self.inq.append(False)
        self.pending.append(len(self.inst) - 1)
        self.stats.learned += 1

    def solve(self):
        """Yield the models below the current state; return the conflict mask."""
        self.tick()
        blk = self.choose()
        if blk is None:
            self.stats.models += 1
            yield self.extract()
            return -1
        kind = blk[0]
        if kind == "recheck":
            mark = len(self.trail)
            if self.propagate():
                cs = yield from self.solve()
            else:
                cs = self.conflict
            self.undo(mark)
            return cs
        self.stats.decisions += 1
        d = self.depth + 1
        bit = 1 << d
        acc = 0
        self.depth = d
        try:
            if kind == K_VAL:
                root = self.find(blk[1])
                limit = self.n
                if self.sb:
                    limit = min(self.n, max(self.mdn, self.cmax[root]) + 2)
                for v in range(limit):
                    if self.apart(root, self.find(v)):
                        acc |= self.apart_mask(root, v)
                        continue
                    cs = yield from self._branch(lambda: self.merge(root, v, bit), (G_EQ, root, v))
                    if not cs & bit:
                        return cs
                    acc |= cs
            elif kind == K_EQ:
                a, b = blk[1], blk[2]
                eq = (G_EQ, a, b)
                cs = yield from self._branch(lambda: self.add_dis(a, b, bit), (G_NOT, eq))
                if not cs & bit:
                    return cs
                acc |= cs
                cs = yield from self._branch(lambda: self.merge(a, b, bit), eq)
                if not cs & bit:
                    return cs
                acc |= cs
            else:
                var = blk[1]
                rv = (G_RELV, var)
                for val in (0, 1):
                    lit = rv if val else (G_NOT, rv)
                    cs = yield from self._branch(lambda: self.set_rel(var, val, bit), lit)
                    if not cs & bit:
                        return cs
                    acc |= cs
        finally:
            self.depth = d - 1
        acc &= ~bit
        if acc > 0:
            self.learn(acc)
        return acc

    def extract(self):
        L, n = self.L, self.n
        val = [self.elem[self.find(nd)] for nd in range(self.nn)]
        consts = {c: val[nd] for c, nd in L.const_node.items()}
        funcs = {}
        for f, a in L.vocab.functions:
            base = L.func_base[f]
            funcs[f] = np.array(val[base:base + n ** a], dtype=np.int64).reshape((n,) * a)
        rels = {}
        for r, a in L.vocab.relations:
            base = L.rel_base[r]
            rels[r] = np.array([x == 1 for x in self.relval[base:base + n ** a]]).reshape((n,) * a)
        eq = None
        if L.eq_base is not None:
            eq = np.array([x == 1 for x in self.relval[L.eq_base:L.eq_base + n * n]]).reshape(n, n)
        return FiniteStructure(L.vocab, n, consts, funcs, rels, L.mode, eq)


def _plain_models(layout, sentences, symmetry_breaking, deadline, stats):
    """Generate every assignment of the cells and keep the models."""
    L, n = layout, layout.n
    cells = []   # (kind, name, index, max element mentioned)
    for c in L.vocab.constants:
        cells.append(("c", c, None, -1))
    for f, a in L.vocab.functions:
        for args in itertools.product(range(n), repeat=a):
            cells.append(("f", f, args, max(args)))
    for r, a in L.vocab.relations:
        for args in itertools.product(range(n), repeat=a):
            cells.append(("r", r, args, max(args) if args else -1))
    eqcells = []
    if L.mode == AXIOMATIC:
        eqcells = list(itertools.product(range(n), repeat=2))
    values = [0] * len(cells)
    ticks = 0

    def build(eqbits):
        consts, funcs, rels = {}, {}, {}
        for f, a in L.vocab.functions:
            funcs[f] = np.zeros((n,) * a, dtype=np.int64)
        for r, a in L.vocab.relations:
            rels[r] = np.zeros((n,) * a, dtype=bool)
        for (kind, name, args, _), v in zip(cells, values):
            if kind == "c":
                consts[name] = v
            elif kind == "f":
                funcs[name][args] = v
            else:
                rels[name][args] = bool(v)
        eq = None
        if eqbits is not None:
            eq = np.zeros((n, n), dtype=bool)
            for (a, b), bit in zip(eqcells, eqbits):
                eq[a, b] = bool(bit)
        return FiniteStructure(L.vocab, n, consts, funcs, rels, L.mode, eq)

    def rec(k, mdn):
        nonlocal ticks
        ticks += 1
        if deadline is not None and ticks % 256 == 0 and time.monotonic() > deadline:
            raise BudgetExhausted()
        if k == len(cells):
            eq_choices = [None] if not eqcells else itertools.product((0, 1), repeat=len(eqcells))
            for eqbits in eq_choices:
                A = build(eqbits)
                if is_model(A, sentences):
                    stats.models += 1
                    yield A
            return
        kind, _, _, cm = cells[k]
        if kind == "r":
            options = (0, 1)
            m = max(mdn, cm)
        else:
            m = max(mdn, cm)
            options = range(min(n, m + 2) if symmetry_breaking else n)
        for v in options:
            values[k] = v
            yield from rec(k + 1, max(m, v) if kind != "r" else m)

    yield from rec(0, -1)


def canonical_form(A: FiniteStructure) -> bytes:
    """Byte encoding of a labeled structure: a size header followed by one-hot
    element codes for constants and function entries, then relation bits.

    Element v is coded on `size` bits with only bit size-1-v set, so the byte
    order of two encodings of the same shape is the lexicographic order of
    their value sequences."""
    n = A.size
    eye = np.eye(n, dtype=np.uint8)[:, ::-1]    # row v has its 1 at column n-1-v
    chunks = []
    if A.vocab.constants:
        chunks.append(eye[[A.constants[c] for c in A.vocab.constants]].ravel())
    for f, _ in A.vocab.functions:
        chunks.append(eye[A.functions[f].ravel()].ravel())
    for r, _ in A.vocab.relations:
        chunks.append(A.relations[r].astype(np.uint8).ravel())
    if A.equality is not None:
        chunks.append(A.equality.astype(np.uint8).ravel())
    bits = np.concatenate(chunks) if chunks else np.zeros(0, dtype=np.uint8)
    header = b"FFOT" + n.to_bytes(4, "big") + (b"A" if A.equality is not None else b"I")
    return header + np.packbits(bits).tobytes()


def encoding_bits(A: FiniteStructure) -> int:
    """Number of payload bits in canonical_form(A) before byte padding."""
    n = A.size
    bits = n * len(A.vocab.constants)
    bits += sum(n * n ** a for _, a in A.vocab.functions)
    bits += sum(n ** a for _, a in A.vocab.relations)
    if A.equality is not None:
        bits += n * n
    return bits


# ---------------------------------------------------------------- public operations

def _vocab_for(sentences, vocab):
    if vocab is None:
        return infer_vocabulary(sentences)
    for s in sentences:
        check_sentence(s, vocab)
    return vocab


def search_size(vocab, sentences, n, *, equality_mode=INTERPRETED, symmetry_breaking=True,
                limit=0, canonical_order=False, prune=True, deadline=None):
    """Models of `sentences` of size n, in discovery order, plus search statistics."""
    stats = SearchStats()
    sentences = tuple(sentences)
    models = []
    layout = layout_for(vocab, n, equality_mode)
    if sys.getrecursionlimit() < 20000:
        sys.setrecursionlimit(20000)
    if not prune:
        for A in _plain_models(layout, sentences, symmetry_breaking, deadline, stats):
            models.append(A)
            if limit and len(models) >= limit:
                break
        return models, stats
    instances = []
    for s in sentences:
        got = ground_sentence(vocab, n, equality_mode, s)
        if got is None:
            return models, stats
        instances.extend(got)
    search = _Search(layout, instances, symmetry_breaking, canonical_order, deadline)
    search.stats = stats
    if not search.start():
        return models, stats
    try:
        for A in search.solve():
            models.append(A)
            if limit and len(models) >= limit:
                break
    except BudgetExhausted as exc:
        exc.partial = models
        raise
    return models, stats


def find_models(sentences, cfg: SearchConfig = SearchConfig(), vocab: Vocabulary = None, stats=None):
    """All models (up to cfg.model_limit) over the configured sizes, sorted by
    canonical form.  With a limit the search visits cells in canonical order
    so the returned models are the canonically first ones it meets."""
    sentences = tuple(sentences)
    vocab = _vocab_for(sentences, vocab)
    deadline = cfg.deadline()
    found = []
    total = stats if stats is not None else SearchStats()
    for n in cfg.size_list():
        want = cfg.model_limit - len(found) if cfg.model_limit else 0
        try:
            models, st = search_size(
                vocab, sentences, n, equality_mode=cfg.equality_mode,
                symmetry_breaking=cfg.symmetry_breaking, limit=want,
                canonical_order=bool(cfg.model_limit), prune=cfg.prune, deadline=deadline)
        except BudgetExhausted as exc:
            found.extend(exc.partial)
            raise BudgetExhausted(partial=sorted(found, key=canonical_form)) from None
        total.add(st)
        found.extend(models)
        if cfg.model_limit and len(found) >= cfg.model_limit:
            break
    for A in found:
        assert is_model(A, sentences), "search returned a non-model"
    unique = {canonical_form(A): A for A in found}
    return [unique[k] for k in sorted(unique)]


def satisfiable_at(sentences, size, vocab=None, equality_mode=INTERPRETED, time_budget_ms=None):
    """(True, witness) if some structure of the given size satisfies the sentences."""
    sentences = tuple(sentences)
    vocab = _vocab_for(sentences, vocab)
    deadline = None if time_budget_ms is None else time.monotonic() + time_budget_ms / 1000
    models, _ = search_size(vocab, sentences, size, equality_mode=equality_mode, limit=1,
                            deadline=deadline)
    return (True, models[0]) if models else (False, None)


@dataclass(frozen=True)
class BoundedVerdict:
    status: str                     # entailed_at_bound | refuted | no_models_at_bound
    sizes_checked: tuple
    models_examined: int
    witness: Optional[FiniteStructure] = None

    def to_dict(self):
        return {"status": self.status, "sizes_checked": list(self.sizes_checked),
                "models_examined": self.models_examined}


def _negation_of_all(theta):
    return Not(conj(theta))


def entails_at(T, Phi, Theta, cfg: SearchConfig = SearchConfig(), vocab=None) -> BoundedVerdict:
    """Bounded check that every model of T ∪ Φ in the size range satisfies Θ.
    Counter-models are searched without symmetry reduction in canonical cell
    order, so the witness is the canonically first counter-model at the
    smallest size that has one."""
    premises = tuple(T) + tuple(Phi)
    Theta = tuple(Theta)
    vocab = _vocab_for(premises + Theta, vocab)
    deadline = cfg.deadline()
    examined = 0
    any_model = False
    checked = []
    for n in cfg.size_list():
        checked.append(n)
        models, st = search_size(vocab, premises, n, equality_mode=cfg.equality_mode,
                                 symmetry_breaking=cfg.symmetry_breaking, limit=1, deadline=deadline)
        examined += st.models
        if not models:
            continue
        any_model = True
        if not Theta:
            continue
        counter, st = search_size(vocab, premises + (_negation_of_all(Theta),), n,
                                  equality_mode=cfg.equality_mode, symmetry_breaking=False,
                                  limit=1, canonical_order=True, deadline=deadline)
        examined += st.models
        if counter:
            return BoundedVerdict("refuted", tuple(checked), examined, counter[0])
    if not any_model:
        return BoundedVerdict("no_models_at_bound", tuple(checked), examined)
    return BoundedVerdict("entailed_at_bound", tuple(checked), examined)


def _sat_size(args):
    vocab, sentences, n, mode, budget = args
    deadline = None if budget is None else time.monotonic() + budget / 1000
    models, _ = search_size(vocab, sentences, n, equality_mode=mode, limit=1, deadline=deadline)
    return bool(models)


def find_min_model_size(sentences, max_size, vocab=None, equality_mode=INTERPRETED,
                        time_budget_ms=None, jobs=1, min_size=1) -> Optional[int]:
    """Smallest n <= max_size with a model, or None."""
    if max_size < 1:
        raise ValueError("max_size must be at least 1")
    sentences = tuple(sentences)
    vocab = _vocab_for(sentences, vocab)
    sizes = list(range(min_size, max_size + 1))
    if jobs > 1 and len(sizes) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            flags = list(pool.map(_sat_size, [(vocab, sentences, n, equality_mode, time_budget_ms)
                                              for n in sizes]))
        for n, ok in zip(sizes, flags):
            if ok:
                return n
        return None
    deadline = None if time_budget_ms is None else time.monotonic() + time_budget_ms / 1000
    for n in sizes:
        models, _ = search_size(vocab, sentences, n, equality_mode=equality_mode, limit=1,
                                deadline=deadline)
        if models:
            return n
    return None
