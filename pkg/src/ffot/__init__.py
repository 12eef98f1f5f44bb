"""Finite-model FFOT machines: first-order theories used as computing devices."""

__version__ = "0.1.0"

from .logic import (  # noqa: E402
    And, App, Atom, Const, Eq, Exists, Forall, Iff, Implies, Not, Or, ParseError, Var,
    Vocabulary, VocabularyError, parse_formula, parse_sentence, parse_term, print_formula,
)
from .structures import (  # noqa: E402
    AXIOMATIC, INTERPRETED, FiniteStructure, apply_isomorphism, check_model, eval_formula,
    holds, parse_structure, dump_structure,
)
from .finder import (  # noqa: E402
    BudgetExhausted, SearchConfig, entails_at, find_min_model_size, find_models, satisfiable_at,
)
from .axioms import axiom_set, build_dof_f_structure, build_psa_f_structure  # noqa: E402
from .machine import (  # noqa: E402
    ComputeResult, FFOTMachine, SimpleSequence, WordEncodingConfig, compute, decide_word,
    decode_word, encode_word, measure_resources, parse_machine, dump_machine, validate_machine,
)
from .turing import (  # noqa: E402
    NTMPair, Rule, TMSpec, ntm_pair_to_ffot, parse_tm, simulate_ntm, simulate_tm,
    tm_to_ffot_finite, tm_to_ffot_infinite, validate_tm,
)


def data_path(name: str) -> str:
    """Path of a file shipped in the package data directory."""
    import os
    return os.path.join(os.path.dirname(__file__), "data", name)


__all__ = [
    "__version__",
    "data_path",
    "And",
    "App",
    "Atom",
    "Const",
    "Eq",
    "Exists",
    "Forall",
    "Iff",
    "Implies",
    "Not",
    "Or",
    "ParseError",
    "Var",
    "Vocabulary",
    "VocabularyError",
    "parse_formula",
    "parse_sentence",
    "parse_term",
    "print_formula",
    "AXIOMATIC",
    "INTERPRETED",
    "FiniteStructure",
    "apply_isomorphism",
    "check_model",
    "eval_formula",
    "holds",
    "parse_structure",
    "dump_structure",
    "BudgetExhausted",
    "SearchConfig",
    "entails_at",
    "find_min_model_size",
    "find_models",
    "satisfiable_at",
    "ComputeResult",
    "FFOTMachine",
    "SimpleSequence",
    "WordEncodingConfig",
    "compute",
    "decide_word",
    "decode_word",
    "encode_word",
    "measure_resources",
    "parse_machine",
    "dump_machine",
    "validate_machine",
    "NTMPair",
    "Rule",
    "TMSpec",
    "ntm_pair_to_ffot",
    "parse_tm",
    "simulate_ntm",
    "simulate_tm",
    "tm_to_ffot_finite",
    "tm_to_ffot_infinite",
    "validate_tm",
    "axiom_set",
    "build_dof_f_structure",
    "build_psa_f_structure",
]
