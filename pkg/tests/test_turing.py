import itertools
from pathlib import Path

import pytest

from ffot import data_path
from ffot.finder import search_size
from ffot.logic import ParseError
from ffot.machine import compute, decide_word, dump_machine, measure_resources, parse_machine
from ffot.turing import (
    NTMPair, Rule, TMSpec, accepting_halves, dump_tm, extract_trace, illegal_transitions,
    ntm_pair_to_ffot, parse_tm, rule_sentences, simulate_ntm, simulate_tm, state_const,
    tm_to_ffot_finite, tm_to_ffot_infinite, validate_tm,
)


def load(name):
    return parse_tm(Path(data_path(name)).read_text())


def words(k, alphabet="01"):
    for n in range(k + 1):
        for letters in itertools.product(alphabet, repeat=n):
            yield "".join(letters)


PARITY = load("parity.tm")
PAIR = NTMPair(load("contains_one.tm"), load("no_one.tm"))


def test_fixtures_are_valid():
    for spec in (PARITY, PAIR.first, PAIR.second):
        report = validate_tm(spec)
        assert report.ok and not report.warnings


def test_simulate_parity():
    for w in words(5):
        res = simulate_tm(PARITY, w)
        assert res.accepted == (w.count("1") % 2 == 0)
        assert res.steps == len(w) + 1


def test_simulate_trace_shape():
    res = simulate_tm(PARITY, "11")
    assert res.trace[0] == ("q0", 1, ("L", "1", "1", "b"))
    assert res.trace[-1][0] == "qa" and len(res.trace) == res.steps + 1


def test_simulate_timeout_and_stuck():
    loop = TMSpec(("s", "a", "r"), ("L", "b", "0"), ("0",),
                  [Rule("s", "L", "s", "L", "RIGHT"), Rule("s", "0", "s", "0", "PAUSE"),
                   Rule("s", "b", "s", "b", "LEFT")], "s", "a", "r")
    assert simulate_tm(loop, "0", max_steps=20).status == "timeout"
    fall = TMSpec(("s", "a", "r"), ("L", "b", "0"), ("0",),
                  [Rule("s", "L", "s", "L", "LEFT"), Rule("s", "0", "s", "0", "LEFT"),
                   Rule("s", "b", "s", "b", "LEFT")], "s", "a", "r")
    assert validate_tm(fall).warnings
    assert simulate_tm(fall, "0").status == "stuck"


def test_simulate_ntm():
    for w in words(5):
        first, second = simulate_ntm(PAIR.first, w), simulate_ntm(PAIR.second, w)
        assert first.accepted == ("1" in w)
        assert second.accepted == ("1" not in w)
    assert simulate_ntm(PAIR.first, "001").min_steps == 3


def test_validate_tm_errors():
    broken = TMSpec(("s", "a"), ("L", "b", "0"), ("0", "b"), [Rule("s", "0", "z", "0", "JUMP")], "s", "a")
    errors = " | ".join(validate_tm(broken).errors)
    for needle in ("input alphabet may not contain b", "undeclared state", "move JUMP", "no rule for (s, L)"):
        assert needle in errors
    with pytest.raises(ValueError):
        rule_sentences(broken)


def test_tm_file_round_trip():
    for spec in (PARITY, PAIR.first, PAIR.second):
        assert parse_tm(dump_tm(spec)) == spec


def test_tm_file_errors():
    with pytest.raises(ParseError):
        parse_tm("[machine]\ninitial = s\n")
    text = dump_tm(PARITY).replace("q0 0 -> q0 0 RIGHT", "q0 0 q0 0 RIGHT")
    with pytest.raises(ParseError):
        parse_tm(text)


def test_pair_checks():
    with pytest.raises(ValueError):
        NTMPair(PARITY, PARITY)


def test_compiled_parity_shape():
    M = tm_to_ffot_finite(PARITY)
    # two working states, four tape symbols
    assert len(rule_sentences(PARITY)) == 8
    assert M.output_labels() == ["accept", "reject"]
    assert M.vocab.has_constant("e") and not tm_to_ffot_infinite(PARITY).vocab.has_constant("e")


def test_shipped_machine_files_match_a_fresh_compile():
    parity = Path(data_path("parity.machine")).read_text()
    pair = Path(data_path("contains_one_pair.machine")).read_text()
    assert parity == dump_machine(tm_to_ffot_finite(PARITY))
    assert pair == dump_machine(ntm_pair_to_ffot(PAIR))
    assert parse_machine(parity) == tm_to_ffot_finite(PARITY)


@pytest.mark.parametrize("w", list(words(2)))
def test_parity_decide_matches_simulator(w):
    M = tm_to_ffot_finite(PARITY)
    res = simulate_tm(PARITY, w)
    got = decide_word(M, M.word_encoding, w, "accept", "reject", (1, len(w) + 2))
    assert got == ("accept" if res.accepted else "reject")


@pytest.mark.parametrize("w", list(words(2)))
def test_minimal_size_is_steps_plus_one(w):
    M = tm_to_ffot_finite(PARITY)
    steps = simulate_tm(PARITY, w).steps
    assert measure_resources(M, M.word_encoding, w, steps + 1) == steps + 1


def test_infinite_compilation_has_no_small_models():
    M = tm_to_ffot_infinite(PARITY)
    res = compute(M, M.word_input(""), (1, 3))
    assert res.status == "no_output_at_bound" and res.model_sizes == ()


def test_word_too_long_for_the_bound_gives_no_models():
    M = tm_to_ffot_finite(PARITY)
    res = compute(M, M.word_input("11"), (1, 2))
    assert res.status == "no_output_at_bound" and not res.model_sizes


@pytest.mark.parametrize("w", list(words(1)))
def test_ntm_pair_selects_the_accepting_half(w):
    M = ntm_pair_to_ffot(PAIR)
    res = compute(M, M.word_input(w), (1, max(4, len(w) + 2)))
    assert res.status == "output"
    assert res.label == ("accept1" if "1" in w else "accept2")
    for A in res.witnesses:
        assert accepting_halves(A, PAIR) == ([1] if "1" in w else [2])


@pytest.mark.parametrize("w", ["0", "1"])
def test_ntm_pair_models_are_legal_accepting_paths(w):
    # up to 30 models at the minimal size
    M = ntm_pair_to_ffot(PAIR)
    n = 4
    models, _ = search_size(M.vocab, M.theory + M.word_input(w), n, limit=30)
    assert models
    for A in models:
        trace = extract_trace(A)
        active = PAIR.first if "1" in w else PAIR.second
        assert not illegal_transitions(A, active, trace)
        assert trace.states[0] == A.constants[state_const(active.initial)]
        assert trace.states[-1] == A.constants[state_const(active.accept)]
        # the rejecting state of either half never shows up
        rejects = {A.constants[state_const(s)] for s in ("r1", "r2")}
        assert not rejects & set(trace.states)
        assert len(accepting_halves(A, PAIR)) == 1


def test_forced_acceptance_excludes_rejecting_runs():
    # on "0" the first half can only reject; no model follows it
    M = ntm_pair_to_ffot(PAIR)
    premises = M.theory + M.word_input("0")
    first_start = parse_sentence_for(M, "I(zero) = st_g")
    found, _ = search_size(M.vocab, premises + (first_start,), 4, limit=1)
    assert found == []


def parse_sentence_for(M, text):
    from ffot.logic import parse_sentence
    return parse_sentence(text, M.vocab)


def test_frame_sentence_as_printed_has_a_free_x():
    from ffot.logic import parse_sentence
    from ffot.turing import frame_sentence, tm_vocabulary
    vocab = tm_vocabulary([PARITY])
    with pytest.raises(ParseError, match="free"):
        parse_sentence("forall y. (~(H(x) = y) -> (C(S(x),y) = C(x,y)))", vocab)
    fixed = parse_sentence("forall x. forall y. (~(H(x) = y) -> (C(S(x),y) = C(x,y)))", vocab)
    assert fixed == frame_sentence()
