import json
import subprocess
import sys

from ffot import data_path
from ffot.cli import main, payload_bytes


def run(args, capsys):
    code = main(args)
    out = capsys.readouterr()
    return code, out.out, out.err


def test_compute_example1(capsys, tmp_path):
    report = tmp_path / "r.jsonl"
    code, out, _ = run(["--report", str(report), "compute", data_path("example1.machine"),
                        "--input", "I_pos"], capsys)
    assert code == 0 and out.startswith("output O_pos")
    line = json.loads(report.read_text().splitlines()[0])
    assert line["payload"]["label"] == "O_pos"
    for key in ("command", "inputs_digest", "payload", "sizes", "models_examined", "wall_time_s", "version"):
        assert key in line


def test_compute_unknown_label_is_an_input_error(capsys):
    code, _, err = run(["compute", data_path("example1.machine"), "--input", "nope"], capsys)
    assert code == 2 and "nope" in err


def test_compute_range_too_small(capsys):
    code, out, _ = run(["compute", data_path("parity.machine"), "--word", "11", "--max-size", "2"], capsys)
    assert code == 4 and "no_output_at_bound" in out


def test_compute_word(capsys):
    code, out, _ = run(["compute", data_path("parity.machine"), "--word", "0", "--max-size", "3"], capsys)
    assert code == 0 and out.startswith("output accept")


def test_compute_undefined_exit_code(capsys, tmp_path):
    text = open(data_path("example1.machine")).read().replace("[input I_neg]\n~R(c)", "[input none]\nc = c")
    path = tmp_path / "m.machine"
    path.write_text(text)
    code, out, _ = run(["compute", str(path), "--input", "none", "--max-size", "2"], capsys)
    assert code == 3 and out.startswith("undefined")


def test_check_model(capsys, tmp_path):
    structure = tmp_path / "p.txt"
    assert main(["build", "psa_f", "3", "-o", str(structure)]) == 0
    code, out, _ = run(["check-model", str(structure), "--axioms", "psa_f", "--axioms", "eq"], capsys)
    assert code == 0 and "7/7" in out
    code, out, _ = run(["check-model", str(structure), "--axioms", "psa"], capsys)
    assert code == 1 and "witness: x=3" in out


def test_check_model_with_sentence_file(capsys, tmp_path):
    structure = tmp_path / "p.txt"
    main(["build", "psa_f", "2", "-o", str(structure)])
    sentences = tmp_path / "s.txt"
    sentences.write_text("# comment\nS(S(zero)) = e\nS(zero) = e\n")
    code, out, _ = run(["check-model", str(structure), str(sentences)], capsys)
    assert code == 1 and "1/2" in out


def test_malformed_inputs_exit_2(capsys, tmp_path):
    bad = tmp_path / "bad.txt"
    bad.write_text("domain 2\nconstant c = x\n")
    code, _, err = run(["check-model", str(bad), "--axioms", "psa"], capsys)
    assert code == 2 and "line 2" in err
    code, _, err = run(["compute", str(tmp_path / "missing.machine"), "--input", "a"], capsys)
    assert code == 2
    bad.write_text("[vocabulary]\nrelation R/1\n[theory]\nforall x. (R(x) &)\n")
    code, _, err = run(["find-models", str(bad)], capsys)
    assert code == 2 and "line 4" in err and "column" in err


def test_bad_arguments_exit_2(capsys):
    assert main(["compute"]) == 2
    assert main(["no-such-command"]) == 2
    capsys.readouterr()


def test_min_size(capsys):
    code, out, _ = run(["min-size", "--axioms", "psa", "--axioms", "eq", "--max", "5"], capsys)
    assert code == 4 and out.strip() == "none"
    code, out, _ = run(["min-size", "--axioms", "psa_f", "--max", "5"], capsys)
    assert code == 0 and out.strip() == "2"


def test_find_models(capsys):
    code, out, _ = run(["find-models", data_path("example1.machine"), "--max-size", "2"], capsys)
    assert code == 0 and "model(s) in sizes 1..2" in out
    code, out, _ = run(["find-models", "--axioms", "psa", "--max-size", "3"], capsys)
    assert code == 4


def test_axioms(capsys, tmp_path):
    code, out, _ = run(["axioms", "dof"], capsys)
    assert code == 0 and len(out.splitlines()) == 16
    code, out, _ = run(["axioms", "eq", "--vocabulary", "relation R/1; function f/1; constant c"], capsys)
    assert len(out.splitlines()) == 5
    code, out, _ = run(["axioms", "distinct", "--constants", "a", "b", "c"], capsys)
    assert len(out.splitlines()) == 3
    target = tmp_path / "psa.theory"
    main(["axioms", "psa", "-o", str(target)])
    assert "[theory]" in target.read_text()


def test_validate(capsys, tmp_path):
    code, out, _ = run(["validate", data_path("example1.machine")], capsys)
    assert code == 0 and out.strip().endswith("ok")
    from pathlib import Path
    mutated = Path(__file__).parent / "fixtures" / "example1_mutated.machine"
    code, out, _ = run(["validate", str(mutated)], capsys)
    assert code == 1 and "VIOLATION" in out


def test_compile_and_compute(capsys, tmp_path):
    target = tmp_path / "parity.machine"
    assert main(["compile-tm", data_path("parity.tm"), "--finite", "-o", str(target)]) == 0
    capsys.readouterr()
    code, out, _ = run(["compute", str(target), "--word", "0"], capsys)
    assert code == 0 and out.startswith("output accept")
    pair = tmp_path / "pair.machine"
    assert main(["compile-ntm-pair", data_path("contains_one.tm"), data_path("no_one.tm"),
                 "-o", str(pair)]) == 0
    assert pair.read_text() == open(data_path("contains_one_pair.machine")).read()


def test_compile_tm_rejects_nondeterministic(capsys):
    code, _, err = run(["compile-tm", data_path("contains_one.tm")], capsys)
    assert code == 2 and "deterministic" in err


def test_simulate(capsys):
    code, out, _ = run(["simulate", data_path("parity.tm"), "011"], capsys)
    assert code == 0 and out.strip() == "accepted after 4 step(s)"
    code, out, _ = run(["simulate", data_path("parity.tm"), "011", "--max-steps", "2"], capsys)
    assert code == 4 and out.startswith("timeout")
    code, out, _ = run(["simulate", data_path("no_one.tm"), "010"], capsys)
    assert code == 4 and out.startswith("no_accepting_path")


def test_time_budget_from_environment(capsys, monkeypatch):
    monkeypatch.setenv("FFOT_TIME_BUDGET_MS", "1")
    code, out, _ = run(["min-size", "--axioms", "psa", "--max", "30"], capsys)
    assert code == 4 and out.strip() == "unknown"
    monkeypatch.setenv("FFOT_TIME_BUDGET_MS", "soon")
    code, _, err = run(["min-size", "--axioms", "psa", "--max", "3"], capsys)
    assert code == 2


def test_report_payload_ignores_jobs(capsys, tmp_path):
    reports = []
    for jobs in ("1", "3"):
        path = tmp_path / f"r{jobs}.jsonl"
        main(["--report", str(path), "compute", data_path("example1.machine"), "--input", "I_neg",
              "--jobs", jobs])
        reports.append(json.loads(path.read_text()))
    capsys.readouterr()
    assert payload_bytes(reports[0]) == payload_bytes(reports[1])
    assert reports[0]["inputs_digest"] == reports[1]["inputs_digest"]


def test_console_script_runs():
    proc = subprocess.run([sys.executable, "-m", "ffot.cli", "compute", data_path("example1.machine"),
                           "--input", "I_neg"], capture_output=True, text=True)
    assert proc.returncode == 0 and proc.stdout.startswith("output O_neg")
