import csv
import io
import subprocess
import sys

import numpy as np
import pytest

from sparseq import cli


def run(argv, capsys):
    code = cli.main([str(a) for a in argv])
    out, err = capsys.readouterr()
    return code, out, err


def write(tmp_path, name, text):
    p = tmp_path / name
    p.write_text(text)
    return p


def parse_csv(text):
    return list(csv.DictReader(io.StringIO(text)))


def test_estimate_all_zeros(tmp_path, capsys):
    path = write(tmp_path, "z.txt", "0\n" * 200)
    code, out, err = run(["estimate", path], capsys)
    assert code == 0
    rows = parse_csv(out)
    assert len(rows) == 200
    assert max(abs(float(r["theta_hat"])) for r in rows) < 0.05
    assert "atoms=" in err and "converged=" in err and "zero_weight=" in err


def test_estimate_bad_token_names_line(tmp_path, capsys):
    path = write(tmp_path, "bad.txt", "1.0\n\n2.0\nabc\n")
    code, _, err = run(["estimate", path], capsys)
    assert code == 2
    assert "line 4" in err and "abc" in err


def test_estimate_header_and_blank_lines(tmp_path, capsys):
    a = write(tmp_path, "a.csv", "x\n1.5\n\n-2\n6\n")
    b = write(tmp_path, "b.txt", "1.5\n-2\n6\n")
    _, out_a, _ = run(["estimate", a], capsys)
    _, out_b, _ = run(["estimate", b], capsys)
    assert out_a == out_b
    assert [r["x"] for r in parse_csv(out_a)] == ["1.5", "-2.0", "6.0"]


def test_estimate_multi_column_rejected(tmp_path, capsys):
    code, _, err = run(["estimate", write(tmp_path, "m.csv", "1,2\n")], capsys)
    assert code == 2 and "line 1" in err


def test_estimate_nonfinite_rejected(tmp_path, capsys):
    code, _, err = run(["estimate", write(tmp_path, "n.txt", "1\nnan\n")], capsys)
    assert code == 2 and "line 2" in err


@pytest.mark.parametrize("text", ["", "\n\n", "x\n"])
def test_estimate_empty_exit_3(tmp_path, capsys, text):
    code, _, _ = run(["estimate", write(tmp_path, "e.txt", text)], capsys)
    assert code == 3


def test_estimate_missing_file(tmp_path, capsys):
    code, _, _ = run(["estimate", tmp_path / "nope.txt"], capsys)
    assert code == 2


def test_estimate_output_and_json(tmp_path, capsys):
    import json

    src = write(tmp_path, "d.txt", "0.1\n-0.3\n7\n7.4\n")
    out, js = tmp_path / "o.csv", tmp_path / "o.json"
    code, stdout, _ = run(["estimate", src, "-o", out, "--json", js], capsys)
    assert code == 0 and stdout == ""
    rows = parse_csv(out.read_text())
    doc = json.loads(js.read_text())
    assert len(rows) == 4 and len(doc["posteriors"]) == 4
    assert doc["kappa"] == pytest.approx(0.99)


def test_estimate_default_flags_explicit(tmp_path, capsys):
    src = write(tmp_path, "d.txt", "\n".join(str(v) for v in np.random.default_rng(0).normal(size=50)))
    _, a, _ = run(["estimate", src], capsys)
    _, b, _ = run(["estimate", src, "--kappa", "0.99", "--T", "10", "--sigma0", "4",
                   "--w0", "0.01", "--alpha0", "1"], capsys)
    assert a == b


def test_estimate_sigma0_is_squared(monkeypatch, tmp_path, capsys):
    seen = {}
    real = cli.estimate

    def spy(x, h, **kw):
        seen["h"] = h
        return real(x, h, **kw)

    monkeypatch.setattr(cli, "estimate", spy)
    run(["estimate", write(tmp_path, "d.txt", "1\n2\n"), "--sigma0", "6"], capsys)
    assert seen["h"].sigma0_sq == 36.0


def test_estimate_invalid_hyper_exit_2(tmp_path, capsys):
    code, _, _ = run(["estimate", write(tmp_path, "d.txt", "1\n"), "--kappa", "1.5"], capsys)
    assert code == 2


def test_seed_env_fallback_and_flag_precedence(monkeypatch):
    monkeypatch.setenv("SPARSEQ_SEED", "17")
    assert cli._resolve_seed(None) == 17
    assert cli._resolve_seed(3) == 3
    monkeypatch.setenv("SPARSEQ_SEED", "abc")
    with pytest.raises(cli.UsageError):
        cli._resolve_seed(None)
    monkeypatch.delenv("SPARSEQ_SEED")
    assert cli._resolve_seed(None) == 0


def test_seed_env_changes_simulation(monkeypatch, tmp_path, capsys):
    argv = ["simulate", "exp1", "--cell", "s_n=10,mu0=3", "--reps", "2", "--methods", "soft"]
    monkeypatch.setenv("SPARSEQ_SEED", "5")
    _, env5, _ = run(argv, capsys)
    _, flag5, _ = run(argv + ["--seed", "5"], capsys)
    _, flag6, _ = run(argv + ["--seed", "6"], capsys)
    assert env5 == flag5 != flag6


def test_simulate_reps_zero(capsys):
    code, _, _ = run(["simulate", "exp4", "--reps", "0"], capsys)
    assert code == 2


@pytest.mark.parametrize("cell", ["s_n=5", "A=7", "s_n=10,mu0=x", "s_n=999,mu0=1", "s_n=2.5,mu0=1", "junk"])
def test_simulate_bad_cell(capsys, cell):
    code, _, err = run(["simulate", "exp1", "--cell", cell, "--reps", "1"], capsys)
    assert code == 2 and "cell" in err


def test_simulate_bad_method_and_experiment(capsys):
    assert run(["simulate", "exp1", "--methods", "nope", "--reps", "1"], capsys)[0] == 2
    assert run(["simulate", "exp9"], capsys)[0] == 2


def test_simulate_csv_and_table(tmp_path, capsys):
    out = tmp_path / "r.csv"
    code, stdout, _ = run(["simulate", "exp1", "--cell", "s_n=10,mu0=7", "--reps", "3", "--seed", "1",
                           "--methods", "dp,soft", "-o", out], capsys)
    assert code == 0
    rows = parse_csv(out.read_text())
    assert [r["method"] for r in rows] == ["dp", "soft"]
    assert all(float(r["mse"]) >= 0 for r in rows)
    assert "(3)" in stdout and "(116)" in stdout  # published values alongside


def test_simulate_config_file(tmp_path, capsys):
    conf = write(tmp_path, "c.conf", "# desk run\nreps = 2\nmethods = hard\ncells = s_n=10,mu0=1; s_n=20,mu0=3\nseed = 4\n")
    code, out, _ = run(["simulate", "exp1", "--config", conf], capsys)
    rows = parse_csv(out)
    assert code == 0 and len(rows) == 2 and {r["reps"] for r in rows} == {"2"}
    _, out2, _ = run(["simulate", "exp1", "--config", conf, "--reps", "3"], capsys)
    assert {r["reps"] for r in parse_csv(out2)} == {"3"}


def test_simulate_bad_config_line(tmp_path, capsys):
    conf = write(tmp_path, "c.conf", "reps = 2\nnot a pair\n")
    code, _, err = run(["simulate", "exp1", "--config", conf], capsys)
    assert code == 2 and "line 2" in err


def test_simulate_byte_identical_reruns(tmp_path, capsys):
    argv = ["simulate", "exp4", "--cell", "A=3", "--reps", "2", "--seed", "9", "--methods", "dp,sure"]
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    run(argv + ["-o", a], capsys)
    run(argv + ["-o", b, "--jobs", "2"], capsys)
    assert a.read_bytes() == b.read_bytes()


def test_rate_check_from_csv(tmp_path, capsys):
    src = write(tmp_path, "r.csv", "experiment,n,s_n,mu0_or_A,method,mse\nexp1,200,10,5,dp,6.0\nexp1,200,10,5,soft,50\n")
    code, out, err = run(["rate-check", "--from-csv", src], capsys)
    rows = parse_csv(out)
    assert code == 0 and len(rows) == 1
    assert float(rows[0]["ratio"]) == pytest.approx(6.0 / (10 * np.log(20)), abs=1e-4)
    assert "max ratio" in err


def test_rate_check_from_csv_no_rows(tmp_path, capsys):
    src = write(tmp_path, "r.csv", "experiment,n,s_n,mu0_or_A,method,mse\n")
    assert run(["rate-check", "--from-csv", src], capsys)[0] == 3


def test_rate_rows_uses_matching_experiment():
    assert cli._rate_experiment(200) == "exp1"
    assert cli._rate_experiment(500) == "exp2"
    assert cli._rate_experiment(1000) == "exp2"


def test_selftest_passes(capsys):
    code, out, _ = run(["selftest"], capsys)
    assert code == 0 and "FAIL" not in out


def test_selftest_detects_corrupted_digamma(capsys):
    from sparseq.numerics import digamma

    code = cli.cmd_selftest(None, digamma=lambda x: digamma(x) + 1e-6)
    out = capsys.readouterr().out
    assert code == 1 and "FAIL  digamma" in out


def test_usage_error_exit_2(capsys):
    assert run([], capsys)[0] == 2
    assert run(["estimate"], capsys)[0] == 2


def test_module_entry_point(tmp_path):
    src = write(tmp_path, "d.txt", "0\n1\n")
    proc = subprocess.run([sys.executable, "-m", "sparseq", "estimate", str(src)],
                          capture_output=True, text=True, check=False)
    assert proc.returncode == 0
    assert proc.stdout.startswith("index,x,theta_hat\n")
