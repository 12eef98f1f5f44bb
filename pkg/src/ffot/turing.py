"""Turing machines on a one-way tape, reference simulators, and their
translation into FFOT machines.

The tape is indexed by the successor chain 0, S(0), S(S(0)), ...; cell 0
holds the left marker and the input starts at cell 1, where the head starts.
Time is indexed by the same chain.  C(t, p) is the symbol at cell p at time t,
I(t) the internal state and H(t) the head position.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

from .axioms import distinct_constants_axioms, equality_axioms, finite_peano_axioms, \
    peano_successor_axioms
from .logic import (
    And, App, Const, Eq, Forall, Implies, Not, Or, ParseError, Var, Vocabulary, conj, disj,
    forall,
)
from .machine import FFOTMachine, SimpleSequence, WordEncodingConfig
from .structures import FiniteStructure

MOVES = ("LEFT", "PAUSE", "RIGHT")


@dataclass(frozen=True)
class Rule:
    state: str
    read: str
    new_state: str
    write: str
    move: str

    def __str__(self):
        return f"{self.state} {self.read} -> {self.new_state} {self.write} {self.move}"


@dataclass(frozen=True)
class TMSpec:
    states: tuple
    alphabet: tuple            # tape symbols, including left marker and blank
    input_alphabet: tuple
    rules: tuple
    initial: str
    accept: str
    reject: Optional[str] = None
    left: str = "L"
    blank: str = "b"
    deterministic: bool = True
    name: str = "tm"

    def __post_init__(self):
        for attr in ("states", "alphabet", "input_alphabet", "rules"):
            object.__setattr__(self, attr, tuple(getattr(self, attr)))

    def halting(self):
        return {s for s in (self.accept, self.reject) if s is not None}

    def working_states(self):
        return [s for s in self.states if s not in self.halting()]

    def rules_for(self, state, symbol):
        return [r for r in self.rules if r.state == state and r.read == symbol]


@dataclass(frozen=True)
class TMReport:
    errors: tuple
    warnings: tuple

    @property
    def ok(self):
        return not self.errors


def validate_tm(spec: TMSpec) -> TMReport:
    errors, warnings = [], []
    states, symbols = set(spec.states), set(spec.alphabet)
    if len(states) != len(spec.states):
        errors.append("repeated state name")
    if len(symbols) != len(spec.alphabet):
        errors.append("repeated tape symbol")
    for label, s in (("initial", spec.initial), ("accept", spec.accept), ("reject", spec.reject)):
        if s is not None and s not in states:
            errors.append(f"{label} state {s} is not declared")
    if spec.reject is not None and spec.reject == spec.accept:
        errors.append("accept and reject states coincide")
    for label, s in (("left marker", spec.left), ("blank", spec.blank)):
        if s not in symbols:
            errors.append(f"{label} {s} is not a tape symbol")
    for s in spec.input_alphabet:
        if s not in symbols:
            errors.append(f"input symbol {s} is not a tape symbol")
        if s in (spec.left, spec.blank):
            errors.append(f"input alphabet may not contain {s}")
    for r in spec.rules:
        if r.state not in states or r.new_state not in states:
            errors.append(f"rule {r} names an undeclared state")
        if r.read not in symbols or r.write not in symbols:
            errors.append(f"rule {r} names an undeclared symbol")
        if r.move not in MOVES:
            errors.append(f"rule {r} has move {r.move}; expected LEFT, PAUSE or RIGHT")
        if r.state in spec.halting():
            errors.append(f"rule {r} fires from halting state {r.state}")
        if r.read == spec.left and r.move == "LEFT":
            warnings.append(f"rule {r} moves left while reading the left marker")
    if len(set(spec.rules)) != len(spec.rules):
        errors.append("duplicate rule")
    for t in spec.working_states():
        for b in spec.alphabet:
            k = len(spec.rules_for(t, b))
            if k == 0:
                errors.append(f"no rule for ({t}, {b})")
            elif k > 1 and spec.deterministic:
                errors.append(f"{k} rules for ({t}, {b}) in a deterministic machine")
    return TMReport(tuple(errors), tuple(warnings))


# ---------------------------------------------------------------- simulation


@dataclass(frozen=True)
class SimResult:
    status: str                  # accepted | rejected | timeout | stuck
    steps: int
    trace: tuple = ()            # (state, head, tape) per time step

    @property
    def accepted(self):
        return self.status == "accepted"


def _word_symbols(spec, w):
    syms = list(w)
    for s in syms:
        if s not in spec.input_alphabet:
            raise ValueError(f"symbol {s!r} is not in the input alphabet")
    return syms


def _step(tape, head, rule, blank):
    tape = list(tape)
    tape[head] = rule.write
    if rule.move == "RIGHT":
        head += 1
        if head == len(tape):
            tape.append(blank)
    elif rule.move == "LEFT":
        head -= 1
    return tape, head


def simulate_tm(spec: TMSpec, w, max_steps: int = 10_000) -> SimResult:
    """Run a deterministic machine on w; steps counts executed rules."""
    if not spec.deterministic:
        raise ValueError("simulate_tm needs a deterministic machine; use simulate_ntm")
    tape = [spec.left] + _word_symbols(spec, w) + [spec.blank]
    state, head = spec.initial, 1
    table = {(r.state, r.read): r for r in spec.rules}
    trace = [(state, head, tuple(tape))]
    for steps in range(max_steps + 1):
        if state == spec.accept:
            return SimResult("accepted", steps, tuple(trace))
        if state == spec.reject:
            return SimResult("rejected", steps, tuple(trace))
        if steps == max_steps:
            break
        rule = table.get((state, tape[head]))
        if rule is None:
            return SimResult("stuck", steps, tuple(trace))
        if rule.move == "LEFT" and head == 0:
            return SimResult("stuck", steps, tuple(trace))
        tape, head = _step(tape, head, rule, spec.blank)
        state = rule.new_state
        trace.append((state, head, tuple(tape)))
    return SimResult("timeout", max_steps, tuple(trace))


@dataclass(frozen=True)
class NtmResult:
    status: str                  # accepted | no_accepting_path
    min_steps: Optional[int] = None

    @property
    def accepted(self):
        return self.status == "accepted"


def simulate_ntm(spec: TMSpec, w, max_steps: int = 1_000) -> NtmResult:
    """Breadth-first search over configurations for the shortest accepting run."""
    tape = tuple([spec.left] + _word_symbols(spec, w) + [spec.blank])
    start = (spec.initial, 1, tape)
    frontier = [start]
    seen = {start}
    for depth in range(max_steps + 1):
        nxt = []
        for state, head, tape in frontier:
            if state == spec.accept:
                return NtmResult("accepted", depth)
            if state in spec.halting():
                continue
            for rule in spec.rules_for(state, tape[head]):
                if rule.move == "LEFT" and head == 0:
                    continue
                t2, h2 = _step(tape, head, rule, spec.blank)
                while len(t2) > h2 + 1 and t2[-1] == spec.blank and t2[-2] == spec.blank:
                    t2.pop()
                conf = (rule.new_state, h2, tuple(t2))
                if conf not in seen:
                    seen.add(conf)
                    nxt.append(conf)
        if not nxt:
            break
        frontier = nxt
    return NtmResult("no_accepting_path")


# ---------------------------------------------------------------- compilation

x, y = Var("x"), Var("y")
ZERO, HALT, TOP = Const("zero"), Const("h"), Const("e")


def S(t):
    return App("S", (t,))


def I(t):
    return App("I", (t,))


def H(t):
    return App("H", (t,))


def C(t, p):
    return App("C", (t, p))


def state_const(name):
    return "st_" + name


def symbol_const(name):
    return "sym_" + name


def _st(name):
    return Const(state_const(name))


def _sym(name):
    return Const(symbol_const(name))


def mu(state, symbol, z1, z2):
    """In state `state` at time z1 with `symbol` at cell z2."""
    return And(Eq(I(z1), _st(state)), Eq(C(z1, z2), _sym(symbol)))


def pi(move, z1, z2):
    """Head position z2 follows z1 under the move."""
    if move == "RIGHT":
        return Eq(z2, S(z1))
    if move == "PAUSE":
        return Eq(z2, z1)
    return Eq(S(z2), z1)


def _rule_consequent(r):
    return And(mu(r.new_state, r.write, S(x), H(x)), pi(r.move, H(x), H(S(x))))


def rule_sentences(spec: TMSpec) -> list:
    """One sentence per (state, symbol) situation.

    Deterministic machines give one implication per rule.  Otherwise the
    consequent is the disjunction over the matching rules; a non-accepting
    situation with no rule gets the sentence that it never occurs."""
    report = validate_tm(spec)
    if not report.ok:
        raise ValueError("invalid machine: " + "; ".join(report.errors))
    out = []
    if spec.deterministic:
        for t in spec.working_states():
            for b in spec.alphabet:
                (r,) = spec.rules_for(t, b)
                out.append(Forall("x", Implies(mu(t, b, x, H(x)), _rule_consequent(r))))
        return out
    for t in spec.states:
        if t == spec.accept:
            continue
        for b in spec.alphabet:
            group = spec.rules_for(t, b)
            if group:
                out.append(Forall("x", Implies(mu(t, b, x, H(x)),
                                               disj(_rule_consequent(r) for r in group))))
            else:
                out.append(Forall("x", Not(mu(t, b, x, H(x)))))
    return out


def halting_sentences(a_state: str, r_state: str) -> list:
    """h is the first time either state is entered; both states persist."""
    out = []
    for s in (a_state, r_state):
        q = _st(s)
        out.append(Forall("x", Implies(And(Eq(I(S(x)), q), Not(Eq(I(x), q))), Eq(HALT, S(x)))))
        out.append(Forall("x", Implies(Eq(I(x), q), Eq(I(S(x)), q))))
    return out


def initial_sentence(spec: TMSpec = None, with_state=True):
    parts = [Eq(H(ZERO), S(ZERO)), Eq(C(ZERO, ZERO), _sym(spec.left))]
    if with_state:
        parts.append(Eq(I(ZERO), _st(spec.initial)))
    return conj(parts)


def blank_sentence(blank):
    return Forall("y", Implies(Eq(C(ZERO, y), _sym(blank)), Eq(C(ZERO, S(y)), _sym(blank))))


def frame_sentence():
    return forall("xy", Implies(Not(Eq(H(x), y)), Eq(C(S(x), y), C(x, y))))


def tm_vocabulary(specs, finite=True) -> Vocabulary:
    consts = ["zero"] + (["e"] if finite else []) + ["h"]
    for spec in specs:
        for s in spec.alphabet:
            if symbol_const(s) not in consts:
                consts.append(symbol_const(s))
    for spec in specs:
        for s in spec.states:
            consts.append(state_const(s))
    return Vocabulary((), (("S", 1), ("C", 2), ("I", 1), ("H", 1)), tuple(consts))


def tape_encoding(spec: TMSpec) -> WordEncodingConfig:
    seq = SimpleSequence(C(ZERO, S(Var("y"))), S(Var("y")), ZERO)
    letters = tuple((s, symbol_const(s)) for s in spec.input_alphabet if len(s) == 1)
    return WordEncodingConfig(seq, tuple(symbol_const(s) for s in spec.input_alphabet),
                              symbol_const(spec.blank), True, letters)


def _compile_deterministic(spec, finite):
    if not spec.deterministic:
        raise ValueError("expected a deterministic machine")
    if spec.reject is None:
        raise ValueError("a deterministic machine needs a reject state")
    vocab = tm_vocabulary([spec], finite)
    theory = [initial_sentence(spec), blank_sentence(spec.blank), frame_sentence()]
    theory += equality_axioms(vocab)
    theory += finite_peano_axioms() if finite else peano_successor_axioms()
    theory += rule_sentences(spec)
    theory += halting_sentences(spec.accept, spec.reject)
    theory += distinct_constants_axioms([state_const(spec.accept), state_const(spec.reject)])
    outputs = (("accept", (Eq(I(HALT), _st(spec.accept)),)),
               ("reject", (Eq(I(HALT), _st(spec.reject)),)))
    suffix = "finite" if finite else "infinite"
    return FFOTMachine(vocab, tuple(theory), (), outputs, tape_encoding(spec),
                       f"{spec.name}-{suffix}", (1, 4))


def tm_to_ffot_infinite(spec: TMSpec) -> FFOTMachine:
    """Translation over the successor axioms without a top element (no finite models)."""
    return _compile_deterministic(spec, False)


def tm_to_ffot_finite(spec: TMSpec) -> FFOTMachine:
    """Translation over the finite successor axioms, runnable by the model finder."""
    return _compile_deterministic(spec, True)


@dataclass(frozen=True)
class NTMPair:
    first: TMSpec
    second: TMSpec

    def __post_init__(self):
        overlap = set(self.first.states) & set(self.second.states)
        if overlap:
            raise ValueError("state sets overlap: " + ", ".join(sorted(overlap)))
        if set(self.first.input_alphabet) != set(self.second.input_alphabet):
            raise ValueError("the two machines need the same input alphabet")
        for a, b in ((self.first.left, self.second.left), (self.first.blank, self.second.blank)):
            if a != b:
                raise ValueError("the two machines need the same left marker and blank")


def ntm_pair_to_ffot(pair: NTMPair) -> FFOTMachine:
    """Theory whose models are accepting runs of one of the two machines."""
    n1, n2 = pair.first, pair.second
    for spec in (n1, n2):
        report = validate_tm(spec)
        if not report.ok:
            raise ValueError(f"invalid machine {spec.name}: " + "; ".join(report.errors))
    vocab = tm_vocabulary([n1, n2], True)
    theory = [
        initial_sentence(n1, with_state=False),
        Or(Eq(I(ZERO), _st(n1.initial)), Eq(I(ZERO), _st(n2.initial))),
        blank_sentence(n1.blank),
        frame_sentence(),
        Or(Eq(I(HALT), _st(n1.accept)), Eq(I(HALT), _st(n2.accept))),
    ]
    theory += equality_axioms(vocab)
    theory += finite_peano_axioms()
    theory += rule_sentences(_as_nondeterministic(n1))
    theory += rule_sentences(_as_nondeterministic(n2))
    theory += halting_sentences(n1.accept, n2.accept)
    # a start state sharing an element with an accepting state gives runs of length 0
    theory += distinct_constants_axioms([state_const(s) for s in (n1.initial, n2.initial, n1.accept, n2.accept)])
    outputs = (("accept1", (Eq(I(HALT), _st(n1.accept)),)),
               ("accept2", (Eq(I(HALT), _st(n2.accept)),)))
    return FFOTMachine(vocab, tuple(theory), (), outputs, tape_encoding(n1),
                       f"{n1.name}+{n2.name}", (1, 4))


def _as_nondeterministic(spec):
    if not spec.deterministic:
        return spec
    return TMSpec(spec.states, spec.alphabet, spec.input_alphabet, spec.rules, spec.initial,
                  spec.accept, spec.reject, spec.left, spec.blank, False, spec.name)


# ---------------------------------------------------------------- reading runs off models


@dataclass(frozen=True)
class Trace:
    times: tuple        # time elements t_0, t_1, ... up to h
    states: tuple       # I(t_k)
    heads: tuple        # H(t_k)
    scanned: tuple      # C(t_k, H(t_k))


def extract_trace(A: FiniteStructure) -> Trace:
    """Follow the successor chain from zero until h."""
    Sf, If, Hf, Cf = (A.functions[k] for k in ("S", "I", "H", "C"))
    t = A.constants["zero"]
    h = A.constants["h"]
    times = [t]
    while t != h:
        nxt = int(Sf[t])
        if nxt in times:
            raise ValueError("h is not reachable from zero along the successor chain")
        times.append(nxt)
        t = nxt
    return Trace(tuple(times), tuple(int(If[t]) for t in times), tuple(int(Hf[t]) for t in times),
                 tuple(int(Cf[t, Hf[t]]) for t in times))


def illegal_transitions(A: FiniteStructure, spec: TMSpec, trace: Trace = None) -> list:
    """Indices k where the step from t_k to t_(k+1) matches no rule of spec."""
    trace = trace or extract_trace(A)
    Sf, Cf = A.functions["S"], A.functions["C"]
    st = {s: A.constants[state_const(s)] for s in spec.states}
    sy = {s: A.constants[symbol_const(s)] for s in spec.alphabet}
    bad = []
    for k in range(len(trace.times) - 1):
        t1 = trace.times[k + 1]
        h0, h1 = trace.heads[k], trace.heads[k + 1]
        ok = False
        for r in spec.rules:
            if st[r.state] != trace.states[k] or sy[r.read] != trace.scanned[k]:
                continue
            if st[r.new_state] != trace.states[k + 1] or sy[r.write] != int(Cf[t1, h0]):
                continue
            if r.move == "RIGHT" and h1 != int(Sf[h0]):
                continue
            if r.move == "PAUSE" and h1 != h0:
                continue
            if r.move == "LEFT" and int(Sf[h1]) != h0:
                continue
            ok = True
            break
        if not ok:
            bad.append(k)
    return bad


def accepting_halves(A: FiniteStructure, pair: NTMPair) -> list:
    """Which of the two machines the model's run is a legal accepting path of."""
    trace = extract_trace(A)
    out = []
    for idx, spec in enumerate((pair.first, pair.second), 1):
        if trace.states[0] != A.constants[state_const(spec.initial)]:
            continue
        if trace.states[-1] != A.constants[state_const(spec.accept)]:
            continue
        if not illegal_transitions(A, spec, trace):
            out.append(idx)
    return out


# ---------------------------------------------------------------- .tm files


def parse_tm(text: str) -> TMSpec:
    """Sectioned text: [machine] key = value lines, [states], [alphabet], [input]
    and [rules] with one ``t read -> u write MOVE`` per line."""
    sections = {}
    current = None
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if line.startswith("[") and line.endswith("]"):
            current = line[1:-1].strip()
            if current in sections:
                raise ParseError(f"line {lineno}: section [{current}] repeated")
            sections[current] = []
            continue
        if current is None:
            raise ParseError(f"line {lineno}: content before the first [section]")
        sections[current].append((lineno, line))
    for need in ("machine", "states", "alphabet", "input", "rules"):
        if need not in sections:
            raise ParseError(f"missing section [{need}]")
    meta = {}
    for lineno, line in sections["machine"]:
        if "=" not in line:
            raise ParseError(f"line {lineno}: expected key = value")
        k, v = line.split("=", 1)
        meta[k.strip()] = v.strip()
    words = {k: [tok for _, l in sections[k] for tok in l.split()] for k in ("states", "alphabet", "input")}
    rules = []
    for lineno, line in sections["rules"]:
        parts = line.replace("->", " -> ").split()
        if len(parts) != 6 or parts[2] != "->":
            raise ParseError(f"line {lineno}: expected 't read -> u write MOVE'")
        rules.append(Rule(parts[0], parts[1], parts[3], parts[4], parts[5].upper()))
    try:
        return TMSpec(
            tuple(words["states"]), tuple(words["alphabet"]), tuple(words["input"]), tuple(rules),
            meta["initial"], meta["accept"], meta.get("reject") or None, meta.get("left", "L"),
            meta.get("blank", "b"), meta.get("deterministic", "yes").lower() in ("yes", "true", "1"),
            meta.get("name", "tm"))
    except KeyError as exc:
        raise ParseError(f"[machine] is missing {exc.args[0]}") from None


def dump_tm(spec: TMSpec) -> str:
    out = ["[machine]", f"name = {spec.name}", f"initial = {spec.initial}", f"accept = {spec.accept}"]
    if spec.reject is not None:
        out.append(f"reject = {spec.reject}")
    out += [f"left = {spec.left}", f"blank = {spec.blank}",
            "deterministic = " + ("yes" if spec.deterministic else "no"),
            "", "[states]", " ".join(spec.states), "", "[alphabet]", " ".join(spec.alphabet),
            "", "[input]", " ".join(spec.input_alphabet), "", "[rules]"]
    out += [str(r) for r in spec.rules]
    return "\n".join(out) + "\n"
