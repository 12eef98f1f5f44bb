"""A theory as a computer: the R/f/c machine.

The theory says R is constant along f-orbits.  Feed it R(c) and every model
also has R(f(c)); feed it ~R(c) and every model has ~R(f(f(c))).  The bounded
compute below checks that claim over all models of size 1 to 3.
"""
from pathlib import Path

from ffot import SearchConfig, compute, data_path, dump_structure, entails_at, find_models, parse_machine
from ffot.logic import print_formula

M = parse_machine(Path(data_path("example1.machine")).read_text())
print("theory:", *(print_formula(s) for s in M.theory))

for label in ("I_pos", "I_neg"):
    res = compute(M, label, (1, 3))
    phi = ", ".join(print_formula(s) for s in M.input(label))
    print(f"M({phi}) -> {res.status} {res.label}   model sizes {list(res.model_sizes)}")

# The same question asked as bounded entailment, with a counter-model when it fails.
pos = M.input("I_pos")
v = entails_at(M.theory, pos, M.output("O_pos"), SearchConfig(sizes=(1, 3)), vocab=M.vocab)
print("T + R(c) entails R(f(c)) up to size 3:", v.status)
v = entails_at(M.theory, (), M.output("O_pos"), SearchConfig(sizes=(1, 3)), vocab=M.vocab)
print("T alone entails R(f(c))?", v.status, "- counter-model:")
print(dump_structure(v.witness))

# How many models does T + R(c) have, up to isomorphism?
for n in (1, 2, 3):
    models = find_models(M.theory + pos, SearchConfig.at(n), vocab=M.vocab)
    print(f"size {n}: {len(models)} models up to isomorphism")
