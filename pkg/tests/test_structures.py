import random

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ffot.axioms import equality_axioms
from ffot.logic import Const, Forall, Exists, ParseError, Vocabulary, parse_sentence, substitute
from ffot.structures import (
    AXIOMATIC, EvaluationError, FiniteStructure, all_structures, apply_isomorphism, check_model,
    dump_structure, eval_formula, failing_assignment, holds, parse_structure, random_structure,
)

from formulas import BINARY, SMALL, random_sentence, sentences
from naive import naive_holds


def chain(n):
    vocab = Vocabulary((("R", 1),), (("f", 1),), ("c",))
    return FiniteStructure(vocab, n, {"c": 0}, {"f": [min(i + 1, n - 1) for i in range(n)]},
                           {"R": {(i,) for i in range(n) if i % 2 == 0}})


def test_eval_simple_sentences():
    A = chain(3)
    assert eval_formula(A, parse_sentence("R(c)", A.vocab))
    assert not eval_formula(A, parse_sentence("R(f(c))", A.vocab))
    assert eval_formula(A, parse_sentence("exists x. f(x) = x", A.vocab))
    assert not eval_formula(A, parse_sentence("forall x. R(x)", A.vocab))


def test_scalar_and_vector_paths_agree_on_fixed_cases():
    A = chain(4)
    for text in ("forall x. (R(x) <-> ~R(f(x)))", "exists x. exists y. (~(x = y) & f(x) = f(y))",
                 "forall x. (f(x) = x -> R(x))"):
        s = parse_sentence(text, A.vocab)
        assert eval_formula(A, s) == holds(A, s)


def test_check_model_reports_witness():
    A = chain(3)
    s = parse_sentence("forall x. forall y. (f(x) = f(y) -> x = y)", A.vocab)
    report = check_model(A, [s])
    assert not report.all_true
    assert report.results[0].witness == {"x": 1, "y": 2}
    assert failing_assignment(A, s) == {"x": 1, "y": 2}


def test_check_model_vocabulary_mismatch():
    A = chain(2)
    other = Vocabulary((), (("g", 1),), ("c",))
    with pytest.raises(EvaluationError):
        check_model(A, [parse_sentence("g(c) = c", other)])


def test_structure_validation():
    vocab = Vocabulary((), (("f", 1),), ("c",))
    with pytest.raises(ValueError):
        FiniteStructure(vocab, 2, {"c": 2}, {"f": [0, 1]}, {})
    with pytest.raises(ValueError):
        FiniteStructure(vocab, 2, {"c": 0}, {"f": [0, 5]}, {})
    with pytest.raises(ValueError):
        FiniteStructure(vocab, 2, {"c": 0}, {}, {})


def test_axiomatic_equality_is_a_relation():
    vocab = Vocabulary((), (), ("a", "b"))
    A = FiniteStructure(vocab, 2, {"a": 0, "b": 1}, {}, {}, AXIOMATIC, {(0, 0), (1, 1), (0, 1), (1, 0)})
    assert holds(A, parse_sentence("a = b", vocab))
    B = FiniteStructure(vocab, 2, {"a": 0, "b": 1}, {}, {}, AXIOMATIC, set())
    assert not holds(B, parse_sentence("forall x. x = x", vocab))


def test_structure_file_roundtrip():
    rng = np.random.default_rng(3)
    for size in (1, 2, 3):
        A = random_structure(BINARY, size, rng)
        B = parse_structure(dump_structure(A))
        assert B == A


def test_structure_file_errors():
    with pytest.raises(ParseError):
        parse_structure("constant c = 0\n")
    with pytest.raises(ParseError) as exc:
        parse_structure("domain 2\nconstant c = 0\nfunction f/1 : 0->1\n")
    assert "no entry" in str(exc.value)
    with pytest.raises(ParseError) as exc:
        parse_structure("domain 2\nwhatever\n")
    assert "line 2" in str(exc.value)


def test_empty_relation_needs_arity():
    A = parse_structure("domain 2\nrelation R/2 = {}\n")
    assert A.relations["R"].shape == (2, 2)
    with pytest.raises(ParseError):
        parse_structure("domain 2\nrelation R = {}\n")


def test_all_structures_count():
    assert sum(1 for _ in all_structures(SMALL, 2)) == 2 * 4 * 4


def test_interpreted_equality_axioms_always_hold():
    rng = np.random.default_rng(11)
    eq = equality_axioms(BINARY)
    for _ in range(30):
        A = random_structure(BINARY, int(rng.integers(1, 4)), rng)
        assert all(holds(A, s) for s in eq)


@settings(max_examples=150, deadline=None)
@given(sentences(SMALL, 4), st.integers(1, 3), st.integers(0, 2 ** 32 - 1))
def test_eval_matches_naive(s, size, seed):
    A = random_structure(SMALL, size, np.random.default_rng(seed))
    expected = naive_holds(A, s)
    assert eval_formula(A, s) == expected
    assert holds(A, s) == expected


@settings(max_examples=150, deadline=None)
@given(sentences(BINARY, 3), st.integers(1, 3), st.integers(0, 2 ** 32 - 1))
def test_isomorphism_invariance(s, size, seed):
    rng = np.random.default_rng(seed)
    A = random_structure(BINARY, size, rng)
    perm = rng.permutation(size)
    assert holds(apply_isomorphism(A, perm), s) == holds(A, s)


@settings(max_examples=150, deadline=None)
@given(sentences(SMALL, 3), st.integers(1, 3), st.integers(0, 2 ** 32 - 1))
def test_quantifier_expansion(s, size, seed):
    # a quantifier over x is the conjunction / disjunction of its instances,
    # each instance naming the element through a fresh constant
    if not isinstance(s, (Forall, Exists)):
        return
    A = random_structure(SMALL, size, np.random.default_rng(seed))
    vocab = Vocabulary(SMALL.relations, SMALL.functions, SMALL.constants + ("k",))
    parts = []
    for a in range(size):
        B = FiniteStructure(vocab, size, {**A.constants, "k": a}, A.functions, A.relations)
        parts.append(eval_formula(B, substitute(s.body, s.var, Const("k"))))
    expected = all(parts) if isinstance(s, Forall) else any(parts)
    assert eval_formula(A, s) == expected


def test_random_sentence_is_closed():
    rng = random.Random(5)
    for _ in range(50):
        s = random_sentence(rng, BINARY, 4)
        holds(random_structure(BINARY, 2, np.random.default_rng(0)), s)
