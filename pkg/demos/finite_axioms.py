"""Successor and field axioms, and their finite stand-ins.

EQ + PSA has no finite models at all; PSA_f adds a top element e with
S(e) = e and then has one for every size of at least two.  The finite field
axioms are tried on the rational grid of step 1/m; two of them fail there, and
the failing assignments are printed.
"""
from ffot import axiom_set, build_dof_f_structure, build_psa_f_structure, check_model, find_min_model_size
from ffot.axioms import equality_axioms, grid_value
from ffot.logic import print_formula

for name in ("psa", "psa_f"):
    vocab, sentences = axiom_set(name)
    n = find_min_model_size(sentences + equality_axioms(vocab), 6, vocab=vocab)
    print(f"{name}: smallest model up to size 6 = {n}")

for n in (0, 1, 3):
    ok = check_model(build_psa_f_structure(n), axiom_set("psa_f")[1]).all_true
    print(f"chain 0..{n} models PSA_f: {ok}")

m = 2
A = build_dof_f_structure(m)
report = check_model(A, axiom_set("dof_f")[1])
print(f"DOF_f grid m={m}: {A.size} elements, {len(report.failures())} false sentences")
for r in report.failures():
    values = {k: str(grid_value(m, v)) for k, v in r.witness.items()}
    print("  ", print_formula(r.sentence)[:70], "...", "at", values)
