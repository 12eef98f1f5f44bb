import itertools
import random
from pathlib import Path

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ffot import data_path
from ffot.logic import App, Const, ParseError, Var, Vocabulary, parse_sentence, parse_term
from ffot.machine import (
    FFOTMachine, SimpleSequence, WordEncodingConfig, _classify_size, combine_outcomes, compute,
    decide_word, decode_word, dump_machine, encode_word, measure_resources, parse_machine,
    validate_machine,
)
from ffot.structures import INTERPRETED

FIXTURES = Path(__file__).parent / "fixtures"


def example1():
    return parse_machine(Path(data_path("example1.machine")).read_text())


def test_example1_outputs():
    M = example1()
    pos = compute(M, "I_pos", (1, 3))
    neg = compute(M, "I_neg", (1, 3))
    assert (pos.status, pos.label) == ("output", "O_pos")
    assert (neg.status, neg.label) == ("output", "O_neg")
    assert pos.model_sizes == (1, 2, 3) and pos.min_model_size == 1


def test_example1_round_trips_through_the_file_format():
    M = example1()
    again = parse_machine(dump_machine(M))
    assert again == M


def test_undefined_when_two_outputs_can_hold():
    M = example1()
    # with no input both outputs are possible
    res = compute(M, (), (1, 2))
    assert res.status == "undefined" and set(res.labels) == {"O_pos", "O_neg"}
    both = FFOTMachine(M.vocab, M.theory, M.inputs,
                       (("A", (parse_sentence("R(c)", M.vocab),)),
                        ("B", (parse_sentence("R(f(c))", M.vocab),))))
    res = compute(both, "I_pos", (1, 2))
    assert res.status == "undefined" and set(res.labels) == {"A", "B"}


def test_no_models_in_range():
    M = example1()
    contradiction = (parse_sentence("R(c)", M.vocab), parse_sentence("~R(f(c))", M.vocab))
    res = compute(M, contradiction, (1, 3))
    assert res.status == "no_output_at_bound" and res.model_sizes == ()


def test_jobs_do_not_change_results():
    M = example1()
    a = compute(M, "I_pos", (1, 3), jobs=1)
    b = compute(M, "I_pos", (1, 3), jobs=3)
    assert a.to_dict() == b.to_dict()


def test_outcome_order_does_not_matter():
    M = example1()
    premises = M.theory + M.input("I_neg")
    tasks = [(M.vocab, premises, M.outputs, n, INTERPRETED, None) for n in (1, 2, 3)]
    ordered = [_classify_size(t) for t in tasks]
    shuffled = [_classify_size(t) for t in random.Random(1).sample(tasks, 3)]
    shuffled.sort(key=lambda o: o.size)
    assert combine_outcomes(ordered, (1, 3)).to_dict() == combine_outcomes(shuffled, (1, 3)).to_dict()


def test_mutated_machine_is_caught():
    bad = parse_machine((FIXTURES / "example1_mutated.machine").read_text())
    report = validate_machine(bad)
    assert not report.ok
    assert any(set(v[:2]) == {"O_pos", "O_neg"} for v in report.violations())


def test_example1_validates():
    report = validate_machine(example1())
    assert report.ok and not report.violations()


def test_machine_rejects_duplicate_outputs():
    M = example1()
    s = parse_sentence("R(c)", M.vocab)
    with pytest.raises(ValueError):
        FFOTMachine(M.vocab, M.theory, (), (("A", (s,)), ("B", (s,))))
    with pytest.raises(ValueError):
        FFOTMachine(M.vocab, M.theory, (), (("A", (s,)), ("A", (parse_sentence("~R(c)", M.vocab),))))


def test_machine_file_errors():
    with pytest.raises(ParseError):
        parse_machine("[vocabulary]\nrelation R/1\n[theory]\nR(d)\n")
    with pytest.raises(ParseError):
        parse_machine("[nonsense]\nfoo\n")
    with pytest.raises(ParseError):
        parse_machine("R(c)\n")


def test_include_expands_axiom_sets():
    M = parse_machine("[include]\npsa_f\neq\n[output done]\nS(zero) = zero\n[output more]\n~(S(zero) = zero)\n")
    assert len(M.theory) == 3 + 3 + 1
    assert M.vocab.function_arity("S") == 1


# ---------------------------------------------------------------- words

FIRST_VOCAB = Vocabulary((), (("C", 1), ("f", 1)), ("z", "a", "b", "blank"))


def first_letter_machine():
    """Accepts words whose first letter is a."""
    seq = SimpleSequence(parse_term("C(y)", FIRST_VOCAB, ["y"]), parse_term("f(y)", FIRST_VOCAB, ["y"]),
                         Const("z"))
    cfg = WordEncodingConfig(seq, ("a", "b"), "blank", True, (("a", "a"), ("b", "b")))
    theory = (parse_sentence("~(a = b)", FIRST_VOCAB),)
    outputs = (("yes", (parse_sentence("C(z) = a", FIRST_VOCAB),)),
               ("no", (parse_sentence("C(z) = b", FIRST_VOCAB),)))
    return FFOTMachine(FIRST_VOCAB, theory, (), outputs, cfg, "first", (1, 3)), cfg


def test_simple_sequence_terms():
    M, cfg = first_letter_machine()
    y = Var("y")
    assert cfg.sequence.term(0) == App("C", (Const("z"),))
    assert cfg.sequence.term(2) == App("C", (App("f", (App("f", (Const("z"),)),)),))
    with pytest.raises(ValueError):
        SimpleSequence(Const("z"), App("f", (y,)), Const("z"))
    with pytest.raises(ValueError):
        SimpleSequence(App("C", (y,)), App("f", (y,)), y)


def test_encoding_adds_blank_distinctness_only():
    M, cfg = first_letter_machine()
    out = encode_word(cfg, "ab")
    assert len(out) == 3 + 2
    texts = {str(s) for s in out}
    assert len(texts) == 5


@pytest.mark.parametrize("w", ["a", "b", "aa", "ab", "ba", "bb", "aba"])
def test_decide_word_first_letter(w):
    M, cfg = first_letter_machine()
    want = "accept" if w[0] == "a" else "reject"
    assert decide_word(M, cfg, w, "yes", "no", (1, 4)) == want


def test_decide_word_empty_is_unknown():
    M, cfg = first_letter_machine()
    assert decide_word(M, cfg, "", "yes", "no", (1, 3)) == "unknown"


def test_measure_resources():
    M, cfg = first_letter_machine()
    # a, b and the blank are pairwise distinct, which already needs three
    # elements; "aba" needs a fourth position z, f(z), f(f(z)), f(f(f(z)))
    assert measure_resources(M, cfg, "a", 5) == 3
    assert measure_resources(M, cfg, "ab", 5) == 3
    assert measure_resources(M, cfg, "aba", 5) == 4


def test_unknown_letter():
    M, cfg = first_letter_machine()
    with pytest.raises(ValueError):
        encode_word(cfg, "ac")


@settings(max_examples=200, deadline=None)
@given(st.text(alphabet="ab", max_size=6))
def test_decode_inverts_encode(w):
    _, cfg = first_letter_machine()
    assert cfg.spell(decode_word(cfg, encode_word(cfg, w))) == w


def test_decode_every_short_word():
    _, cfg = first_letter_machine()
    for k in range(7):
        for letters in itertools.product("ab", repeat=k):
            w = "".join(letters)
            assert cfg.spell(decode_word(cfg, encode_word(cfg, w))) == w
