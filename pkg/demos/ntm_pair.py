"""Two nondeterministic machines, one theory.

contains_one guesses where a 1 is; no_one scans for the blank and gives up on
any 1.  The pair's theory forces the halting state to be one of the two
accepting states, so its models only contain accepting runs, and which half
runs is decided by the word.  The model's S, I, H and C tables spell out the
run; extract_trace reads it back.
"""
from pathlib import Path

from ffot import NTMPair, compute, data_path, ntm_pair_to_ffot, parse_tm
from ffot.finder import search_size
from ffot.turing import accepting_halves, extract_trace

pair = NTMPair(parse_tm(Path(data_path("contains_one.tm")).read_text()),
               parse_tm(Path(data_path("no_one.tm")).read_text()))
M = ntm_pair_to_ffot(pair)

for w in ["", "0", "1", "00", "10"]:
    res = compute(M, M.word_input(w), (1, max(4, len(w) + 2)))
    A = res.witnesses[0]
    print(f"{w!r:>5}: {res.label}  (half {accepting_halves(A, pair)[0]}, min size {res.min_model_size})")

# Models of size 4 for "01".  Start and accept states never share an element,
# so every run begins in a start state; other state constants may coincide.
A_models, _ = search_size(M.vocab, M.theory + M.word_input("01"), 4, limit=5)
for A in A_models:
    tr = extract_trace(A)
    names = {}
    for k, v in sorted(A.constants.items()):
        if k.startswith("st_"):
            names.setdefault(v, []).append(k[3:])
    steps = " -> ".join(f"{'='.join(names[s])}@{h}" for s, h in zip(tr.states, tr.heads))
    print(f"run of length {len(tr.times) - 1}: {steps}")
