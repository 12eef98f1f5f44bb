"""FFOT machines: a theory, named input sets and named output sets.

A machine computes output Θ from input Φ when every model of T ∪ Φ satisfies
Θ.  Here that is checked over finite models in a size range only.
"""
from __future__ import annotations

import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, replace
from typing import Optional

from .axioms import axiom_set, distinct_constants_axioms
from .finder import BudgetExhausted, find_min_model_size, search_size
from .logic import (
    Const, Eq, Not, ParseError, Vocabulary, VocabularyError, check_sentence, conj,
    is_ground, parse_sentence, parse_term, print_formula, print_term,
    substitute_term, term_variables,
)
from .structures import INTERPRETED, FiniteStructure, holds

# ---------------------------------------------------------------- word encodings


@dataclass(frozen=True)
class SimpleSequence:
    """Ground terms chi_i = gamma(sigma^i(delta)) addressing word positions.
    gamma and sigma mention only the variable `var`."""

    gamma: object
    sigma: object
    delta: object
    var: str = "y"

    def __post_init__(self):
        for t, label in ((self.gamma, "gamma"), (self.sigma, "sigma")):
            extra = term_variables(t) - {self.var}
            if extra:
                raise ValueError(f"{label} may only mention {self.var}, found {sorted(extra)}")
            if self.var not in term_variables(t):
                raise ValueError(f"{label} must mention {self.var}")
        if not is_ground(self.delta):
            raise ValueError("delta must be ground")

    def term(self, i: int):
        t = self.delta
        for _ in range(i):
            t = substitute_term(self.sigma, self.var, t)
        return substitute_term(self.gamma, self.var, t)

    def terms(self, count: int) -> list:
        out = [self.term(i) for i in range(count)]
        if len(set(out)) != len(out):
            raise ValueError("simple sequence repeats a term")
        return out


@dataclass(frozen=True)
class WordEncodingConfig:
    """How a word becomes the input set {chi_i = w_i} ∪ {chi_(n+1) = blank}.

    `letters` maps word characters to alphabet constants; when empty, words
    must be given as sequences of constant names.  With `add_distinctness`
    the blank is asserted different from every alphabet constant."""

    sequence: SimpleSequence
    alphabet: tuple
    blank: str
    add_distinctness: bool = True
    letters: tuple = ()   # (char, constant) pairs

    def __post_init__(self):
        object.__setattr__(self, "alphabet", tuple(self.alphabet))
        object.__setattr__(self, "letters", tuple(tuple(p) for p in self.letters))
        if self.blank in self.alphabet:
            raise ValueError("the blank must not belong to the alphabet")
        for ch, c in self.letters:
            if c not in self.alphabet:
                raise ValueError(f"letter {ch!r} maps to {c!r}, which is not in the alphabet")

    def symbols(self, w) -> list:
        """Alphabet constants spelling w."""
        if isinstance(w, str):
            table = dict(self.letters)
            if table:
                out = []
                for ch in w:
                    if ch not in table:
                        raise ValueError(f"symbol {ch!r} is not in the input alphabet")
                    out.append(table[ch])
                return out
            w = list(w)
        out = list(w)
        for s in out:
            if s not in self.alphabet:
                raise ValueError(f"symbol {s!r} is not in the input alphabet")
        return out

    def spell(self, symbols) -> str:
        """Inverse of `symbols` for character words."""
        back = {c: ch for ch, c in self.letters}
        if back:
            return "".join(back[s] for s in symbols)
        return " ".join(symbols)


def word_axioms(cfg: WordEncodingConfig) -> list:
    if not cfg.add_distinctness:
        return []
    return [Not(Eq(Const(s), Const(cfg.blank))) for s in cfg.alphabet]


def encode_word(cfg: WordEncodingConfig, w) -> list:
    """The X-word set of w (plus the blank-distinctness sentences when enabled)."""
    syms = cfg.symbols(w)
    chis = cfg.sequence.terms(len(syms) + 1)
    out = [Eq(chi, Const(s)) for chi, s in zip(chis, syms)]
    out.append(Eq(chis[-1], Const(cfg.blank)))
    return out + word_axioms(cfg)


def decode_word(cfg: WordEncodingConfig, sentences) -> list:
    """Read chi_0, chi_1, ... assignments up to the blank; returns the symbols."""
    assigned = {}
    for s in sentences:
        if isinstance(s, Eq) and isinstance(s.right, Const):
            assigned[s.left] = s.right.name
    out = []
    i = 0
    while True:
        chi = cfg.sequence.term(i)
        if chi not in assigned:
            raise ValueError(f"no assignment for position {i}")
        sym = assigned[chi]
        if sym == cfg.blank:
            return out
        out.append(sym)
        i += 1


# ---------------------------------------------------------------- machines


@dataclass(frozen=True)
class FFOTMachine:
    vocab: Vocabulary
    theory: tuple
    inputs: tuple = ()        # (label, sentences)
    outputs: tuple = ()       # (label, sentences)
    word_encoding: Optional[WordEncodingConfig] = None
    name: str = "machine"
    sizes: tuple = (1, 3)     # documented size range for validation

    def __post_init__(self):
        object.__setattr__(self, "theory", tuple(self.theory))
        object.__setattr__(self, "inputs", tuple((l, tuple(s)) for l, s in self.inputs))
        object.__setattr__(self, "outputs", tuple((l, tuple(s)) for l, s in self.outputs))
        labels = [l for l, _ in self.outputs]
        if len(set(labels)) != len(labels):
            raise ValueError("output labels must be distinct")
        sets = [frozenset(s) for _, s in self.outputs]
        if len(set(sets)) != len(sets):
            raise ValueError("output sets must be pairwise distinct")
        if len({l for l, _ in self.inputs}) != len(self.inputs):
            raise ValueError("input labels must be distinct")
        for s in self.theory:
            check_sentence(s, self.vocab)
        for _, group in self.inputs + self.outputs:
            for s in group:
                check_sentence(s, self.vocab)

    def input(self, label):
        for l, s in self.inputs:
            if l == label:
                return s
        raise KeyError(f"no input labelled {label!r}")

    def output(self, label):
        for l, s in self.outputs:
            if l == label:
                return s
        raise KeyError(f"no output labelled {label!r}")

    def output_labels(self):
        return [l for l, _ in self.outputs]

    def word_input(self, w) -> tuple:
        if self.word_encoding is None:
            raise ValueError("machine has no word encoding")
        return tuple(encode_word(self.word_encoding, w))

    def satisfied_outputs(self, A: FiniteStructure) -> list:
        return [l for l, group in self.outputs if all(holds(A, s) for s in group)]


@dataclass(frozen=True)
class ComputeResult:
    status: str                   # output | undefined | no_output_at_bound | unknown
    sizes: tuple
    models_examined: int
    label: Optional[str] = None
    labels: tuple = ()            # the two clashing labels when undefined
    witnesses: tuple = ()         # structures backing the verdict
    note: str = ""
    model_sizes: tuple = ()       # sizes in range where T ∪ Φ has a model

    @property
    def min_model_size(self):
        return self.model_sizes[0] if self.model_sizes else None

    def to_dict(self):
        return {"status": self.status, "label": self.label, "labels": list(self.labels),
                "size_range": list(self.sizes), "model_sizes": list(self.model_sizes),
                "models_examined": self.models_examined,
                "witness_sizes": [A.size for A in self.witnesses], "note": self.note}


@dataclass(frozen=True)
class SizeOutcome:
    """What one domain size says about T ∪ Φ."""

    size: int
    has_model: bool
    label: Optional[str] = None          # output held by the first model found
    kind: str = "none"                   # none | output | undefined | no_output | unknown
    witnesses: tuple = ()
    labels: tuple = ()
    examined: int = 0


def _classify_size(args) -> SizeOutcome:
    """Find one model, read off its output, then look for a model that avoids
    that output.  Only satisfiability is asked, so symmetry reduction is safe."""
    vocab, premises, outputs, n, mode, budget_ms = args
    deadline = None if budget_ms is None else time.monotonic() + budget_ms / 1000
    try:
        found, st = search_size(vocab, premises, n, equality_mode=mode, limit=1, deadline=deadline)
        examined = st.models
        if not found:
            return SizeOutcome(n, False, examined=examined)
        A = found[0]
        held = [l for l, group in outputs if all(holds(A, s) for s in group)]
        if not held:
            return SizeOutcome(n, True, None, "no_output", (A,), examined=examined)
        if len(held) > 1:
            return SizeOutcome(n, True, held[0], "undefined", (A, A), tuple(held[:2]), examined)
        label = held[0]
        group = dict(outputs)[label]
        avoid = premises + (Not(conj(group)),)
        other, st = search_size(vocab, avoid, n, equality_mode=mode, limit=1, deadline=deadline)
        examined += st.models
        if not other:
            return SizeOutcome(n, True, label, "output", (A,), examined=examined)
        B = other[0]
        held_b = [l for l, g in outputs if all(holds(B, s) for s in g)]
        if held_b:
            return SizeOutcome(n, True, label, "undefined", (A, B), (label, held_b[0]), examined)
        return SizeOutcome(n, True, label, "no_output", (B,), examined=examined)
    except BudgetExhausted:
        return SizeOutcome(n, False, kind="unknown")


def _run_sizes(tasks, jobs):
    if jobs > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            return list(pool.map(_classify_size, tasks))
    return [_classify_size(t) for t in tasks]


def _premises(M: FFOTMachine, phi):
    if isinstance(phi, str):
        phi = M.input(phi)
    phi = tuple(phi)
    for s in phi:
        check_sentence(s, M.vocab)
    return M.theory + phi


def compute(M: FFOTMachine, phi, size_range, equality_mode=INTERPRETED, time_budget_ms=None,
            jobs=1) -> ComputeResult:
    """Bounded M(Φ).  Every size in the range is examined independently and the
    per-size outcomes are combined in size order, so the result does not depend
    on how the sizes were scheduled."""
    lo, hi = size_range
    premises = _premises(M, phi)
    tasks = [(M.vocab, premises, M.outputs, n, equality_mode, time_budget_ms) for n in range(lo, hi + 1)]
    return combine_outcomes(_run_sizes(tasks, jobs), (lo, hi))


def combine_outcomes(outcomes, sizes) -> ComputeResult:
    res = _combine(outcomes, sizes)
    if any(o.kind == "unknown" for o in outcomes):
        return res
    return replace(res, model_sizes=tuple(o.size for o in outcomes if o.has_model))


def _combine(outcomes, sizes) -> ComputeResult:
    examined = sum(o.examined for o in outcomes)
    for o in outcomes:
        if o.kind == "undefined":
            return ComputeResult("undefined", sizes, examined, labels=o.labels, witnesses=o.witnesses,
                                 note=f"two outputs hold in models of size {o.size}")
    for o in outcomes:
        if o.kind == "no_output":
            return ComputeResult("no_output_at_bound", sizes, examined, witnesses=o.witnesses,
                                 note=f"a model of size {o.size} satisfies no output set")
    if any(o.kind == "unknown" for o in outcomes):
        return ComputeResult("unknown", sizes, examined, note="time budget exhausted")
    with_models = [o for o in outcomes if o.has_model]
    if not with_models:
        return ComputeResult("no_output_at_bound", sizes, examined, note="no models in the size range")
    first = with_models[0]
    for o in with_models[1:]:
        if o.label != first.label:
            return ComputeResult("undefined", sizes, examined, labels=(first.label, o.label),
                                 witnesses=(first.witnesses[0], o.witnesses[0]),
                                 note=f"sizes {first.size} and {o.size} give different outputs")
    return ComputeResult("output", sizes, examined, label=first.label, witnesses=(first.witnesses[0],))


def decide_word(M: FFOTMachine, cfg: WordEncodingConfig, w, accept_label, reject_label, size_range,
                **kw) -> str:
    """'accept', 'reject' or 'unknown' for the word w."""
    labels = M.output_labels()
    for l in (accept_label, reject_label):
        if l not in labels:
            raise KeyError(f"no output labelled {l!r}")
    res = compute(M, encode_word(cfg, w), size_range, **kw)
    if res.status == "output" and res.label == accept_label:
        return "accept"
    if res.status == "output" and res.label == reject_label:
        return "reject"
    return "unknown"


def measure_resources(M: FFOTMachine, cfg: WordEncodingConfig, w, max_size, **kw) -> Optional[int]:
    """Smallest model size of T ∪ Φ_w up to max_size, or None."""
    return find_min_model_size(M.theory + tuple(encode_word(cfg, w)), max_size, vocab=M.vocab, **kw)


# ---------------------------------------------------------------- validation


@dataclass(frozen=True)
class InputCheck:
    input: str
    satisfiable: Optional[bool]   # None: budget ran out
    witness_size: Optional[int] = None
    violations: tuple = ()        # (label1, label2, structure)


@dataclass(frozen=True)
class ValidationReport:
    checks: tuple
    sizes: tuple

    @property
    def ok(self):
        return all(c.satisfiable and not c.violations for c in self.checks)

    def violations(self):
        return [v for c in self.checks for v in c.violations]

    def to_dict(self):
        return {"ok": self.ok, "size_range": list(self.sizes), "inputs": [
            {"input": c.input, "satisfiable": c.satisfiable, "witness_size": c.witness_size,
             "violations": [{"outputs": [a, b], "size": A.size} for a, b, A in c.violations]}
            for c in self.checks]}


def validate_machine(M: FFOTMachine, size_range=None, words=(), equality_mode=INTERPRETED,
                     time_budget_ms=None) -> ValidationReport:
    """For every input: is T ∪ Φ satisfiable in range, and is T ∪ Φ ∪ Θ ∪ Ψ
    unsatisfiable for every pair of distinct outputs?"""
    lo, hi = size_range or M.sizes
    named = [(label, phi) for label, phi in M.inputs]
    for w in words:
        named.append((f"word:{w}", M.word_input(w)))
    deadline = None if time_budget_ms is None else time.monotonic() + time_budget_ms / 1000
    checks = []
    for label, phi in named:
        premises = M.theory + tuple(phi)
        sat, size, violations = False, None, []
        try:
            for n in range(lo, hi + 1):
                found, _ = search_size(M.vocab, premises, n, equality_mode=equality_mode, limit=1,
                                       deadline=deadline)
                if found:
                    sat, size = True, n
                    break
            outs = M.outputs
            for i in range(len(outs)):
                for j in range(i + 1, len(outs)):
                    both = premises + outs[i][1] + outs[j][1]
                    for n in range(lo, hi + 1):
                        found, _ = search_size(M.vocab, both, n, equality_mode=equality_mode,
                                               limit=1, deadline=deadline)
                        if found:
                            violations.append((outs[i][0], outs[j][0], found[0]))
                            break
        except BudgetExhausted:
            sat = None
        checks.append(InputCheck(label, sat, size, tuple(violations)))
    return ValidationReport(tuple(checks), (lo, hi))


# ---------------------------------------------------------------- machine files


def _sections(text):
    """[(header, [(lineno, line)])] for a section-structured file."""
    out = []
    current = None
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if line.startswith("[") and line.endswith("]"):
            current = (line[1:-1].strip(), [])
            out.append(current)
            continue
        if current is None:
            raise ParseError(f"line {lineno}: content before the first [section]")
        current[1].append((lineno, line))
    return out


def parse_vocabulary_lines(lines) -> Vocabulary:
    rels, funs, consts = [], [], []
    for lineno, line in lines:
        parts = line.split()
        kind, names = parts[0], parts[1:]
        if not names:
            raise ParseError(f"line {lineno}: declaration without names")
        for item in names:
            if kind in ("relation", "function"):
                if "/" not in item:
                    raise ParseError(f"line {lineno}: {kind} {item} needs an arity (name/k)")
                name, arity = item.split("/")
                (rels if kind == "relation" else funs).append((name, int(arity)))
            elif kind == "constant":
                consts.append(item)
            else:
                raise ParseError(f"line {lineno}: expected relation, function or constant")
    try:
        return Vocabulary(tuple(rels), tuple(funs), tuple(consts))
    except VocabularyError as exc:
        raise ParseError(str(exc)) from None


def _parse_lines(lines, vocab):
    out = []
    for lineno, line in lines:
        try:
            out.append(parse_sentence(line, vocab))
        except ParseError as exc:
            raise ParseError(f"line {lineno}: {exc}") from None
    return out


def include_sentences(spec: str, vocab: Vocabulary):
    """Vocabulary additions and sentences for an [include] line such as
    ``psa_f`` or ``distinct a b c``.  ``eq`` is expanded last by the caller."""
    parts = spec.replace(",", " ").replace("(", " ").replace(")", " ").split()
    name, rest = parts[0].lower(), parts[1:]
    if name == "distinct":
        return Vocabulary((), (), tuple(c for c in rest if not vocab.has_constant(c))), \
            distinct_constants_axioms(rest)
    if rest:
        raise ParseError(f"include {name} takes no arguments")
    extra, sentences = axiom_set(name)
    return extra, sentences


def _vocab_lines_out(vocab):
    out = []
    for r, a in vocab.relations:
        out.append(f"relation {r}/{a}")
    for f, a in vocab.functions:
        out.append(f"function {f}/{a}")
    if vocab.constants:
        out.append("constant " + " ".join(vocab.constants))
    return out


def parse_theory_file(text: str, vocab: Vocabulary = None):
    """(vocabulary, sentences) from either a sectioned file or a bare list of
    sentences (which then needs `vocab`)."""
    if any(line.strip().startswith("[") for line in text.splitlines()):
        M = parse_machine(text)
        return M.vocab, list(M.theory)
    if vocab is None:
        raise ParseError("a bare sentence list needs a vocabulary")
    lines = [(i, l.split("#", 1)[0].strip()) for i, l in enumerate(text.splitlines(), 1)]
    return vocab, _parse_lines([(i, l) for i, l in lines if l], vocab)


def parse_machine(text: str) -> FFOTMachine:
    sections = _sections(text)
    vocab = Vocabulary()
    meta = {}
    for head, lines in sections:
        if head == "vocabulary":
            vocab = vocab.union(parse_vocabulary_lines(lines))
        elif head == "meta":
            for lineno, line in lines:
                if "=" not in line:
                    raise ParseError(f"line {lineno}: expected key = value")
                k, v = line.split("=", 1)
                meta[k.strip()] = v.strip()
    included = []
    want_eq = False
    for head, lines in sections:
        if head == "include":
            for lineno, line in lines:
                if line.split()[0].lower() == "eq":
                    want_eq = True
                    continue
                try:
                    extra, sentences = include_sentences(line, vocab)
                    vocab = vocab.union(extra)
                except (ValueError, VocabularyError) as exc:
                    raise ParseError(f"line {lineno}: {exc}") from None
                included.extend(sentences)
    theory, inputs, outputs = [], [], []
    encoding = {}
    for head, lines in sections:
        if head == "theory":
            theory.extend(_parse_lines(lines, vocab))
        elif head.startswith("input "):
            inputs.append((head.split(None, 1)[1].strip(), _parse_lines(lines, vocab)))
        elif head.startswith("output "):
            outputs.append((head.split(None, 1)[1].strip(), _parse_lines(lines, vocab)))
        elif head == "word-encoding":
            for lineno, line in lines:
                if "=" not in line:
                    raise ParseError(f"line {lineno}: expected key = value")
                k, v = line.split("=", 1)
                encoding[k.strip()] = v.strip()
        elif head not in ("vocabulary", "include", "meta"):
            raise ParseError(f"unknown section [{head}]")
    if want_eq:
        theory = theory + included + axiom_set("eq", vocab)[1]
    else:
        theory = theory + included
    word_cfg = None
    if encoding:
        word_cfg = _parse_encoding(encoding, vocab)
    sizes = (1, 3)
    if "sizes" in meta:
        lo, hi = meta["sizes"].split("..")
        sizes = (int(lo), int(hi))
    try:
        return FFOTMachine(vocab, tuple(theory), tuple(inputs), tuple(outputs), word_cfg,
                           meta.get("name", "machine"), sizes)
    except (ValueError, VocabularyError) as exc:
        raise ParseError(str(exc)) from None


def _parse_encoding(kv, vocab):
    try:
        var = kv.get("var", "y")
        seq = SimpleSequence(parse_term(kv["gamma"], vocab, [var]), parse_term(kv["sigma"], vocab, [var]),
                             parse_term(kv["delta"], vocab), var)
        letters = ()
        if kv.get("letters"):
            letters = tuple(tuple(p.split(":")) for p in kv["letters"].split())
        flag = kv.get("distinctness", "on").lower() in ("on", "yes", "true", "1")
        return WordEncodingConfig(seq, tuple(kv["alphabet"].split()), kv["blank"], flag, letters)
    except KeyError as exc:
        raise ParseError(f"[word-encoding] is missing {exc.args[0]}") from None
    except ValueError as exc:
        raise ParseError(f"[word-encoding]: {exc}") from None


def dump_machine(M: FFOTMachine) -> str:
    out = ["[meta]", f"name = {M.name}", f"sizes = {M.sizes[0]}..{M.sizes[1]}", "", "[vocabulary]"]
    out += _vocab_lines_out(M.vocab)
    out += ["", "[theory]"] + [print_formula(s) for s in M.theory]
    for label, group in M.inputs:
        out += ["", f"[input {label}]"] + [print_formula(s) for s in group]
    for label, group in M.outputs:
        out += ["", f"[output {label}]"] + [print_formula(s) for s in group]
    cfg = M.word_encoding
    if cfg is not None:
        seq = cfg.sequence
        out += ["", "[word-encoding]", f"var = {seq.var}", f"gamma = {print_term(seq.gamma)}",
                f"sigma = {print_term(seq.sigma)}", f"delta = {print_term(seq.delta)}",
                "alphabet = " + " ".join(cfg.alphabet), f"blank = {cfg.blank}",
                "distinctness = " + ("on" if cfg.add_distinctness else "off")]
        if cfg.letters:
            out.append("letters = " + " ".join(f"{a}:{b}" for a, b in cfg.letters))
    return "\n".join(out) + "\n"


def dump_theory(vocab: Vocabulary, sentences) -> str:
    out = ["[vocabulary]"] + _vocab_lines_out(vocab) + ["", "[theory]"]
    out += [print_formula(s) for s in sentences]
    return "\n".join(out) + "\n"
