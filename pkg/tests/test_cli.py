import json
import re
import subprocess
import sys

import pytest

from zetabound.cli import EXIT_CHECK, EXIT_OK, EXIT_USAGE, main, read_config


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def strip_ts(text: str) -> str:
    return re.sub(r'("timestamp": |timestamp: )"?[^"\n]*"?', r"\1TS", text)


def test_unknown_command(capsys):
    with pytest.raises(SystemExit) as exc:
        main(["frobnicate"])
    assert exc.value.code == EXIT_USAGE
    with pytest.raises(SystemExit) as exc:
        main([])
    assert exc.value.code == EXIT_USAGE


def test_optimize_report(capsys, tmp_path):
    out = tmp_path / "opt.json"
    code, text, _ = run(capsys, "optimize", "--variant", "V2", "--step", "0.01", "--output", str(out))
    assert code == EXIT_OK
    doc = json.loads(out.read_text())
    assert set(doc) == {"command", "config", "results", "warnings", "timestamp"}
    ref = doc["results"]["reference"]
    assert (ref["c1"], ref["c3"]) == (1.38, 0.56) and ref["on_grid"]
    assert ref["b"] == pytest.approx(9.315, abs=1e-3)
    assert "reference.b: 9.31" in text


def test_constants(capsys):
    code, text, _ = run(capsys, "constants", "--k", "2", "--check")
    assert code == EXIT_OK
    val = float(re.search(r"^c_k: (.*)$", text, re.M).group(1))
    assert val == pytest.approx(0.0506606, abs=1e-6)


def test_precondition_exit(capsys):
    code, _, err = run(capsys, "moments", "--k", "1", "--T", "10", "--n", "2000")
    assert code == EXIT_USAGE and "error" in err
    code, _, _ = run(capsys, "optimize", "--step", "0")
    assert code == EXIT_USAGE


def test_check_failure_exit(capsys):
    code, _, err = run(capsys, "bounds", "--check")
    assert code == EXIT_CHECK
    assert "geometric_sum_le_1" in err
    code, _, _ = run(capsys, "bounds")
    assert code == EXIT_OK


def test_determinism_across_jobs(capsys, tmp_path):
    docs = []
    for jobs in ("1", "3"):
        p = tmp_path / f"m{jobs}.json"
        code, text, _ = run(capsys, "moments", "--k", "1", "--T", "1e4", "--n", "20000",
                            "--seed", "0", "--jobs", jobs, "--output", str(p))
        assert code == EXIT_OK
        docs.append((strip_ts(p.read_text()), strip_ts(text)))
    assert docs[0] == docs[1]


@pytest.mark.parametrize("argv", [
    ["large-values", "--T", "1e4", "--n", "4000", "--V", "0", "1"],
    ["partition", "--n", "200", "--threshold-scale", "0.1", "--betas", "0.15", "0.3", "0.45"],
    ["verify-majorant", "--T", "1e5", "--n", "2000"],
    ["coscheck", "--primes", "2", "3"],
    ["d3", "--chain"],
])
def test_rerun_identical(capsys, tmp_path, argv):
    texts = []
    for jobs in ("1", "2"):
        p = tmp_path / f"r{jobs}.json"
        code, text, _ = run(capsys, *argv, "--jobs", jobs, "--output", str(p))
        assert code == EXIT_OK
        texts.append(strip_ts(p.read_text()))
    assert texts[0] == texts[1]


def test_config_file_and_precedence(capsys, tmp_cfg, tmp_path):
    cfg = tmp_cfg("# run settings\nk = 1\nT = 1e4\nn = 5000\nseed = 4\n")
    p1, p2 = tmp_path / "a.json", tmp_path / "b.json"
    assert main(["moments", "--config", str(cfg), "--output", str(p1)]) == EXIT_OK
    assert main(["moments", "--k", "1", "--T", "1e4", "--n", "5000", "--seed", "4",
                 "--output", str(p2)]) == EXIT_OK
    a, b = json.loads(p1.read_text()), json.loads(p2.read_text())
    assert a["results"] == b["results"]
    assert main(["moments", "--config", str(cfg), "--n", "6000", "--output", str(p1)]) == EXIT_OK
    assert json.loads(p1.read_text())["config"]["n"] == 6000
    capsys.readouterr()


def test_config_lists_and_bools(capsys, tmp_cfg, tmp_path):
    cfg = tmp_cfg("variant = V2\nstep = 0.05\ncheck = true\nk = 1 2\n")
    p = tmp_path / "o.json"
    assert main(["optimize", "--config", str(cfg), "--output", str(p)]) == EXIT_OK
    doc = json.loads(p.read_text())
    assert doc["config"]["variant"] == ["V2"] and doc["config"]["k"] == [1.0, 2.0]
    capsys.readouterr()


def test_config_errors(capsys, tmp_cfg):
    assert main(["moments", "--config", str(tmp_cfg("bogus = 3\n"))]) == EXIT_USAGE
    assert main(["moments", "--config", str(tmp_cfg("no equals sign\n"))]) == EXIT_USAGE
    assert main(["moments", "--config", str(tmp_cfg("method = simpson\n"))]) == EXIT_USAGE


def test_read_config(tmp_path):
    p = tmp_path / "c.cfg"
    p.write_text("prime-cutoff = 1000  # small\n\nk=3\n")
    assert read_config(p) == {"prime_cutoff": "1000", "k": "3"}


def test_constant_overrides(capsys, tmp_path):
    p = tmp_path / "d3.json"
    assert main(["d3", "--b1", "0", "--b2", "0", "--b3", "0", "--output", str(p)]) == EXIT_OK
    assert json.loads(p.read_text())["results"]["coefficient"] == 2.0
    capsys.readouterr()


def test_warnings_recorded(capsys, tmp_path):
    p = tmp_path / "b.json"
    main(["bounds", "--output", str(p)])
    doc = json.loads(p.read_text())
    assert "hypothesis failed: geometric_sum_le_1" in doc["warnings"]
    capsys.readouterr()


def test_module_entry_point():
    res = subprocess.run([sys.executable, "-m", "zetabound", "d3"], capture_output=True, text=True)
    assert res.returncode == 0
    assert "coefficient: 916.04" in res.stdout
