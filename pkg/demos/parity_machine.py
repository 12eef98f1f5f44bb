"""Compiling a Turing machine into a theory over the finite successor axioms.

The parity machine accepts words with an even number of 1s.  Its compiled
theory has a model exactly when the run fits in the domain: the domain must
hold every time step, so the smallest model has one element per step plus one.
"""
from pathlib import Path

from ffot import compute, data_path, parse_tm, simulate_tm, tm_to_ffot_finite

spec = parse_tm(Path(data_path("parity.tm")).read_text())
M = tm_to_ffot_finite(spec)
print(f"{spec.name}: {len(spec.rules)} rules -> {len(M.theory)} sentences")

print(f"{'word':>5} {'simulator':>10} {'steps':>5} {'theory':>8} {'min size':>8}")
for w in ["", "0", "1", "01", "11", "011"]:
    sim = simulate_tm(spec, w)
    res = compute(M, M.word_input(w), (1, len(w) + 2))
    print(f"{w!r:>5} {sim.status:>10} {sim.steps:>5} {str(res.label):>8} {str(res.min_model_size):>8}")

# Too small a bound gives no models at all, which is reported, not guessed.
res = compute(M, M.word_input("011"), (1, 3))
print("word '011' with sizes 1..3:", res.status, "-", res.note)
