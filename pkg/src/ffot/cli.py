"""Command-line entry point: ``ffot <subcommand> ...``.

Exit codes: 0 success or an output was computed, 1 a sentence was falsified
or a validation check failed, 2 parse or I/O error, 3 undefined result,
4 no output, unknown (budget ran out) or nothing found.
"""
from __future__ import annotations

import argparse
import hashlib
import json
import os
import sys
import time

from . import __version__
from .axioms import AXIOM_SETS, axiom_set, build_dof_f_structure, build_psa_f_structure
from .finder import BudgetExhausted, SearchConfig, SearchStats, find_min_model_size, find_models
from .logic import ParseError, Vocabulary, VocabularyError, print_formula
from .machine import (
    ComputeResult, compute, dump_machine, dump_theory, parse_machine, parse_theory_file,
    parse_vocabulary_lines, validate_machine,
)
from .structures import AXIOMATIC, INTERPRETED, EvaluationError, check_model, dump_structure, parse_structure
from .turing import (
    NTMPair, ntm_pair_to_ffot, parse_tm, simulate_ntm, simulate_tm, tm_to_ffot_finite,
    tm_to_ffot_infinite, validate_tm,
)

EXIT_OK, EXIT_FALSE, EXIT_INPUT, EXIT_UNDEFINED, EXIT_NONE = 0, 1, 2, 3, 4
BUDGET_ENV = "FFOT_TIME_BUDGET_MS"


class UsageError(Exception):
    """Bad input file or argument; maps to exit code 2."""


class Run:
    """Collects what a subcommand reports, for the text and JSON outputs."""

    def __init__(self, args, argv):
        self.args = args
        self.argv = list(argv)
        self.inputs = []           # (name, bytes) folded into the digest
        self.payload = {}
        self.sizes = None
        self.examined = None
        self.start = time.monotonic()

    def read(self, path, binary=False):
        try:
            with open(path, "rb") as fh:
                data = fh.read()
        except OSError as exc:
            raise UsageError(f"{path}: {exc.strerror}") from None
        self.inputs.append((os.path.basename(path), data))
        return data if binary else data.decode("utf-8")

    def note_input(self, name, value):
        self.inputs.append((name, str(value).encode()))

    def digest(self):
        h = hashlib.sha256()
        for name, data in self.inputs:
            h.update(name.encode() + b"\0" + hashlib.sha256(data).digest())
        return h.hexdigest()

    def report(self, exit_code):
        return {
            "command": self.argv,
            "inputs_digest": self.digest(),
            "payload": self.payload,
            "exit_code": exit_code,
            "sizes": self.sizes,
            "models_examined": self.examined,
            "wall_time_s": round(time.monotonic() - self.start, 6),
            "version": __version__,
        }


def payload_bytes(report: dict) -> bytes:
    """Canonical serialisation of the timing-free part of a report."""
    return json.dumps(report["payload"], sort_keys=True, separators=(",", ":")).encode()


def _budget(args):
    if getattr(args, "time_budget_ms", None) is not None:
        return args.time_budget_ms
    raw = os.environ.get(BUDGET_ENV)
    if not raw:
        return None
    try:
        return int(raw)
    except ValueError:
        raise UsageError(f"{BUDGET_ENV} must be an integer, got {raw!r}") from None


def _parse(fn, text, path):
    try:
        return fn(text)
    except (ParseError, VocabularyError, ValueError) as exc:
        raise UsageError(f"{path}: {exc}") from None


def _theory(run, paths, axiom_names, vocab=None):
    """Vocabulary and sentences from theory files plus named axiom sets.  The
    eq set is expanded last so it covers every symbol collected."""
    sentences = []
    vocab = vocab or Vocabulary()
    want_eq = False
    for name in axiom_names:
        run.note_input("axioms", name)
        if name.lower() == "eq":
            want_eq = True
            continue
        try:
            extra, group = axiom_set(name)
        except ValueError as exc:
            raise UsageError(str(exc)) from None
        vocab = vocab.union(extra)
        sentences.extend(group)
    for path in paths:
        text = run.read(path)
        extra, group = _parse(lambda t: parse_theory_file(t, vocab), text, path)
        vocab = vocab.union(extra)
        sentences.extend(group)
    if want_eq:
        sentences.extend(axiom_set("eq", vocab)[1])
    return vocab, sentences


def _sizes(args, default):
    lo = args.min_size if args.min_size is not None else default[0]
    hi = args.max_size if args.max_size is not None else default[1]
    if lo < 1 or hi < lo:
        raise UsageError(f"bad size range {lo}..{hi}")
    return lo, hi


def _write(path, text):
    if path in (None, "-"):
        sys.stdout.write(text)
        return
    try:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(text)
    except OSError as exc:
        raise UsageError(f"{path}: {exc.strerror}") from None


# ---------------------------------------------------------------- subcommands


def cmd_check_model(run, args):
    A = _parse(parse_structure, run.read(args.structure), args.structure)
    _, sentences = _theory(run, args.sentences, args.axioms, A.vocab)
    if not sentences:
        raise UsageError("no sentences to check; give sentence files or --axioms")
    try:
        report = check_model(A, sentences)
    except EvaluationError as exc:
        raise UsageError(str(exc)) from None
    run.payload = report.to_dict()
    run.sizes = [A.size]
    for r in report.results:
        mark = "true " if r.holds else "FALSE"
        line = f"{mark} {print_formula(r.sentence)}"
        if r.witness:
            line += "   witness: " + ", ".join(f"{k}={v}" for k, v in r.witness.items())
        print(line)
    bad = len(report.failures())
    print(f"{len(report.results) - bad}/{len(report.results)} sentences hold")
    return EXIT_OK if bad == 0 else EXIT_FALSE


def _compute_exit(res: ComputeResult):
    if res.status == "output":
        return EXIT_OK
    if res.status == "undefined":
        return EXIT_UNDEFINED
    return EXIT_NONE


def cmd_compute(run, args):
    M = _parse(parse_machine, run.read(args.machine), args.machine)
    sizes = _sizes(args, M.sizes)
    if args.word is not None:
        run.note_input("word", args.word)
        try:
            phi = M.word_input(args.word)
        except (ValueError, KeyError) as exc:
            raise UsageError(str(exc)) from None
    else:
        run.note_input("input", args.input)
        try:
            phi = M.input(args.input)
        except KeyError as exc:
            raise UsageError(exc.args[0]) from None
    run.note_input("sizes", sizes)
    run.note_input("equality", args.equality)
    res = compute(M, phi, sizes, equality_mode=args.equality, time_budget_ms=_budget(args),
                  jobs=args.jobs)
    run.payload = res.to_dict()
    run.sizes = list(sizes)
    run.examined = res.models_examined
    if res.status == "output":
        print(f"output {res.label}")
    elif res.status == "undefined":
        print(f"undefined ({' vs '.join(res.labels)})")
    else:
        print(res.status)
    if res.note:
        print(f"  {res.note}")
    if res.model_sizes:
        print(f"  model sizes: {' '.join(map(str, res.model_sizes))}")
    return _compute_exit(res)


def cmd_find_models(run, args):
    vocab, sentences = _theory(run, args.theory, args.axioms)
    sizes = _sizes(args, (1, 3))
    cfg = SearchConfig(sizes=sizes, model_limit=args.limit, equality_mode=args.equality,
                       symmetry_breaking=not args.no_symmetry_breaking,
                       time_budget_ms=_budget(args))
    for key in ("sizes", "limit", "equality", "no_symmetry_breaking"):
        run.note_input(key, getattr(args, key, sizes))
    stats = SearchStats()
    status = "complete"
    try:
        models = find_models(sentences, cfg, vocab=vocab, stats=stats)
    except BudgetExhausted as exc:
        models, status = exc.partial, "budget_exhausted"
    run.sizes = list(sizes)
    run.examined = stats.models
    run.payload = {"status": status, "count": len(models),
                   "models": [dump_structure(A) for A in models]}
    for i, A in enumerate(models):
        print(f"# model {i + 1}")
        print(dump_structure(A))
    print(f"{len(models)} model(s) in sizes {sizes[0]}..{sizes[1]}"
          + ("" if status == "complete" else " (time budget exhausted)"))
    if status != "complete":
        return EXIT_NONE
    return EXIT_OK if models else EXIT_NONE


def cmd_min_size(run, args):
    vocab, sentences = _theory(run, args.theory, args.axioms)
    run.note_input("max", args.max)
    run.note_input("equality", args.equality)
    try:
        n = find_min_model_size(sentences, args.max, vocab=vocab, equality_mode=args.equality,
                                time_budget_ms=_budget(args), jobs=args.jobs)
        status = "found" if n is not None else "none"
    except BudgetExhausted:
        n, status = None, "unknown"
    run.sizes = [1, args.max]
    run.payload = {"status": status, "min_size": n, "max": args.max}
    print(n if n is not None else status)
    return EXIT_OK if n is not None else EXIT_NONE


def cmd_validate(run, args):
    M = _parse(parse_machine, run.read(args.machine), args.machine)
    sizes = _sizes(args, M.sizes)
    words = list(args.word or [])
    if args.words_up_to is not None:
        if M.word_encoding is None:
            raise UsageError("--words-up-to needs a machine with a word encoding")
        words += _all_words(M, args.words_up_to)
    run.note_input("sizes", sizes)
    run.note_input("words", words)
    report = validate_machine(M, sizes, words, equality_mode=args.equality,
                              time_budget_ms=_budget(args))
    run.payload = report.to_dict()
    run.sizes = list(sizes)
    for c in report.checks:
        state = {True: "satisfiable", False: "UNSATISFIABLE", None: "unknown"}[c.satisfiable]
        line = f"{c.input}: {state}"
        if c.witness_size:
            line += f" (size {c.witness_size})"
        for a, b, A in c.violations:
            line += f"; VIOLATION {a} and {b} both hold at size {A.size}"
        print(line)
    if report.violations() or any(c.satisfiable is False for c in report.checks):
        print("validation failed")
        return EXIT_FALSE
    if any(c.satisfiable is None for c in report.checks):
        print("validation incomplete")
        return EXIT_NONE
    print("ok")
    return EXIT_OK


def _all_words(M, k):
    letters = [ch for ch, _ in M.word_encoding.letters] or list(M.word_encoding.alphabet)
    out = [""]
    layer = [""]
    for _ in range(k):
        layer = [w + ch for w in layer for ch in letters]
        out += layer
    return out


def cmd_axioms(run, args):
    vocab = None
    if args.vocabulary:
        lines = [(i, s.strip()) for i, s in enumerate(args.vocabulary.split(";"), 1) if s.strip()]
        vocab = _parse(lambda _: parse_vocabulary_lines(lines), args.vocabulary, "--vocabulary")
    elif args.name.lower() == "eq" and args.machine:
        vocab = _parse(parse_machine, run.read(args.machine), args.machine).vocab
    try:
        vocab, sentences = axiom_set(args.name, vocab, constants=args.constants)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    run.note_input("name", args.name)
    run.payload = {"name": args.name, "count": len(sentences),
                   "sentences": [print_formula(s) for s in sentences]}
    if args.output:
        _write(args.output, dump_theory(vocab, sentences))
    else:
        for s in sentences:
            print(print_formula(s))
    return EXIT_OK


def cmd_build(run, args):
    if args.size < 0:
        raise UsageError("the parameter must be non-negative")
    if args.name == "dof_f" and args.size < 1:
        raise UsageError("dof_f needs m >= 1")
    A = build_psa_f_structure(args.size) if args.name == "psa_f" else build_dof_f_structure(args.size)
    run.note_input(args.name, args.size)
    text = dump_structure(A)
    run.payload = {"name": args.name, "parameter": args.size, "domain": A.size,
                   "sha256": hashlib.sha256(text.encode()).hexdigest()}
    run.sizes = [A.size]
    _write(args.output, text)
    return EXIT_OK


def _load_tm(run, path):
    spec = _parse(parse_tm, run.read(path), path)
    report = validate_tm(spec)
    for w in report.warnings:
        print(f"warning: {spec.name}: {w}", file=sys.stderr)
    if not report.ok:
        raise UsageError(f"{path}: " + "; ".join(report.errors))
    return spec


def cmd_compile_tm(run, args):
    spec = _load_tm(run, args.spec)
    if not spec.deterministic:
        raise UsageError(f"{args.spec}: compile-tm needs a deterministic machine")
    M = tm_to_ffot_infinite(spec) if args.infinite else tm_to_ffot_finite(spec)
    text = dump_machine(M)
    run.note_input("mode", "infinite" if args.infinite else "finite")
    run.payload = {"machine": M.name, "sentences": len(M.theory),
                   "outputs": M.output_labels(),
                   "sha256": hashlib.sha256(text.encode()).hexdigest()}
    _write(args.output, text)
    return EXIT_OK


def cmd_compile_ntm_pair(run, args):
    first, second = _load_tm(run, args.spec1), _load_tm(run, args.spec2)
    try:
        M = ntm_pair_to_ffot(NTMPair(first, second))
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    text = dump_machine(M)
    run.payload = {"machine": M.name, "sentences": len(M.theory),
                   "outputs": M.output_labels(),
                   "sha256": hashlib.sha256(text.encode()).hexdigest()}
    _write(args.output, text)
    return EXIT_OK


def cmd_simulate(run, args):
    spec = _load_tm(run, args.spec)
    run.note_input("word", args.word)
    run.note_input("max_steps", args.max_steps)
    try:
        if spec.deterministic:
            res = simulate_tm(spec, args.word, args.max_steps)
            status, steps = res.status, res.steps
        else:
            res = simulate_ntm(spec, args.word, args.max_steps)
            status, steps = res.status, res.min_steps
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    run.payload = {"machine": spec.name, "word": args.word, "status": status, "steps": steps}
    print(f"{status}" + ("" if steps is None else f" after {steps} step(s)"))
    return EXIT_OK if status in ("accepted", "rejected") else EXIT_NONE


# ---------------------------------------------------------------- argument parsing


def _add_sizes(p, what="size range"):
    p.add_argument("--min-size", type=int, help=f"low end of the {what}")
    p.add_argument("--max-size", type=int, help=f"high end of the {what}")


def _add_equality(p):
    p.add_argument("--equality", choices=(INTERPRETED, AXIOMATIC), default=INTERPRETED,
                   help="read = as identity (interpreted) or as a binary relation (axiomatic)")


def _add_theory(p):
    p.add_argument("theory", nargs="*", help="theory files (sectioned, or bare sentence lists)")
    p.add_argument("--axioms", action="append", default=[], metavar="NAME",
                   help=f"add a built-in axiom set ({', '.join(AXIOM_SETS)}); repeatable")


def build_parser():
    parser = argparse.ArgumentParser(prog="ffot", description="Bounded finite-model FFOT machines.")
    parser.add_argument("--version", action="version", version=f"ffot {__version__}")
    parser.add_argument("--report", metavar="PATH", help="append a JSON line report to PATH")
    parser.add_argument("--time-budget-ms", type=int,
                        help=f"cap on each search (default: ${BUDGET_ENV}, else none)")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("check-model", help="evaluate sentences in a finite structure")
    p.add_argument("structure")
    p.add_argument("sentences", nargs="*", help="sentence files over the structure's vocabulary")
    p.add_argument("--axioms", action="append", default=[], metavar="NAME")
    p.set_defaults(fn=cmd_check_model)

    p = sub.add_parser("compute", help="bounded M(input)")
    p.add_argument("machine")
    g = p.add_mutually_exclusive_group(required=True)
    g.add_argument("--input", help="label of an input set in the machine file")
    g.add_argument("--word", help="word to encode with the machine's word encoding")
    _add_sizes(p)
    _add_equality(p)
    p.add_argument("--jobs", type=int, default=1, help="worker processes across sizes")
    p.set_defaults(fn=cmd_compute)

    p = sub.add_parser("find-models", help="enumerate models up to isomorphism")
    _add_theory(p)
    _add_sizes(p)
    _add_equality(p)
    p.add_argument("--limit", type=int, default=0, help="stop after this many models (0: all)")
    p.add_argument("--no-symmetry-breaking", action="store_true",
                   help="list every labelled model rather than one per symmetry class")
    p.set_defaults(fn=cmd_find_models)

    p = sub.add_parser("min-size", help="smallest model size up to a bound")
    _add_theory(p)
    p.add_argument("--max", "--max-size", dest="max", type=int, required=True)
    _add_equality(p)
    p.add_argument("--jobs", type=int, default=1)
    p.set_defaults(fn=cmd_min_size)

    p = sub.add_parser("validate", help="check input satisfiability and output exclusivity")
    p.add_argument("machine")
    _add_sizes(p)
    _add_equality(p)
    p.add_argument("--word", action="append", help="also check this word input; repeatable")
    p.add_argument("--words-up-to", type=int, metavar="K", help="also check every word of length <= K")
    p.set_defaults(fn=cmd_validate)

    p = sub.add_parser("axioms", help="print a built-in axiom set")
    p.add_argument("name", choices=AXIOM_SETS)
    p.add_argument("--vocabulary", help='for eq: declarations such as "relation R/1; function f/1; constant c"')
    p.add_argument("--machine", help="for eq: take the vocabulary from this machine file")
    p.add_argument("--constants", nargs="*", default=(), help="for distinct: constant names")
    p.add_argument("-o", "--output", help="write a theory file instead of printing")
    p.set_defaults(fn=cmd_axioms)

    p = sub.add_parser("build", help="emit a finite model of psa_f or dof_f")
    p.add_argument("name", choices=("psa_f", "dof_f"))
    p.add_argument("size", type=int, help="n for psa_f, m for dof_f")
    p.add_argument("-o", "--output")
    p.set_defaults(fn=cmd_build)

    p = sub.add_parser("compile-tm", help="compile a deterministic machine to an FFOT machine file")
    p.add_argument("spec")
    g = p.add_mutually_exclusive_group()
    g.add_argument("--finite", action="store_true", help="over the finite successor axioms (default)")
    g.add_argument("--infinite", action="store_true", help="over the successor axioms")
    p.add_argument("-o", "--output")
    p.set_defaults(fn=cmd_compile_tm)

    p = sub.add_parser("compile-ntm-pair", help="compile two machines deciding complementary languages")
    p.add_argument("spec1")
    p.add_argument("spec2")
    p.add_argument("-o", "--output")
    p.set_defaults(fn=cmd_compile_ntm_pair)

    p = sub.add_parser("simulate", help="run a machine directly")
    p.add_argument("spec")
    p.add_argument("word")
    p.add_argument("--max-steps", type=int, default=10_000)
    p.set_defaults(fn=cmd_simulate)
    return parser


def main(argv=None) -> int:
    argv = sys.argv[1:] if argv is None else list(argv)
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_INPUT if exc.code else EXIT_OK
    run = Run(args, argv)
    try:
        if getattr(args, "jobs", 1) < 1:
            raise UsageError("--jobs must be at least 1")
        code = args.fn(run, args)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        code = EXIT_INPUT
        run.payload = {"error": str(exc)}
    if args.report:
        try:
            with open(args.report, "a", encoding="utf-8") as fh:
                fh.write(json.dumps(run.report(code), sort_keys=True) + "\n")
        except OSError as exc:
            print(f"error: {args.report}: {exc.strerror}", file=sys.stderr)
            return EXIT_INPUT
    return code


if __name__ == "__main__":
    sys.exit(main())
