import json
import subprocess
import sys

import pytest

from cfs.cli import main


def write(tmp_path, text, name="run.ini"):
    path = tmp_path / name
    path.write_text(text)
    return str(path)


SMALL = "[scenario]\nn_aircraft = 150\n"


def test_run_default_writes_trace_and_report(tmp_path, capsys):
    cfg = write(tmp_path, SMALL)
    out = tmp_path / "out"
    assert main(["run", "--config", cfg, "--output-dir", str(out)]) == 0
    assert sorted(p.name for p in out.iterdir()) == ["report.json", "report.txt", "trace.csv"]
    report = (out / "report.txt").read_text()
    assert "# spec_hash: " in report and "# generator: " in report and "# version: " in report
    assert "max_offset: 7.07106781" in report
    assert json.loads((out / "report.json").read_text())["safety_violations"] == 0
    assert "status: ok" in capsys.readouterr().out


def test_run_histograms(tmp_path):
    cfg = write(tmp_path, "[scenario]\nkind = pseudo_random\nL0 = 10\nn_aircraft = 150\n")
    out = tmp_path / "h"
    assert main(["run", "--config", cfg, "--emit", "histogram", "--output-dir", str(out)]) == 0
    names = sorted(p.name for p in out.iterdir())
    assert names == ["histogram_A_exit.csv", "histogram_A_start.csv",
                     "histogram_B_exit.csv", "histogram_B_start.csv"]
    text = (out / "histogram_A_exit.csv").read_text()
    assert "# seed: 0" in text and "bin_center,count" in text
    counts = [int(l.split(",")[1]) for l in text.splitlines() if l[0] not in "#b"]
    assert sum(counts) == 150


def test_output_dir_env(tmp_path, monkeypatch):
    cfg = write(tmp_path, SMALL + "[run]\nemit = report\n")
    monkeypatch.setenv("CFS_OUTPUT_DIR", str(tmp_path / "env"))
    assert main(["run", "--config", cfg]) == 0
    assert (tmp_path / "env" / "report.txt").exists()


def test_oracle_check(tmp_path, capsys):
    cfg = write(tmp_path, SMALL + "[run]\noracle_samples = 5\nemit = report\n")
    assert main(["run", "--config", cfg, "--oracle-check", "--horizon", "unbounded",
                 "--output-dir", str(tmp_path / "o")]) == 0
    assert "oracle check: 5/5 agree" in capsys.readouterr().out


@pytest.mark.parametrize("text,needle", [
    ("[scenario]\nsep = -1\n", "sep"),
    ("[run]\nemit =\n", "emit"),
    ("[scenario]\nfoo = 1\n", "foo"),
])
def test_config_errors_exit_2(tmp_path, capsys, text, needle):
    assert main(["run", "--config", write(tmp_path, text)]) == 2
    err = capsys.readouterr().err
    assert needle in err and "run.ini:2" in err


def test_missing_config(tmp_path, capsys):
    assert main(["run", "--config", str(tmp_path / "absent.ini")]) == 2


def test_infeasible_exit_3(tmp_path, capsys):
    cfg = write(tmp_path, "[scenario]\nkind = angle\ntheta = 150\narrival_period = 1.25\n"
                          "n_aircraft = 400\nmax_offset = 20\n")
    out = tmp_path / "inf"
    assert main(["run", "--config", cfg, "--output-dir", str(out)]) == 3
    assert "aircraft 91" in capsys.readouterr().err
    assert (out / "trace.partial.csv").exists()


def test_sweep_theta(tmp_path, capsys):
    cfg = write(tmp_path, "[scenario]\nn_aircraft = 100\narrival_period = 5\n[run]\nemit = report\n")
    out = tmp_path / "sw"
    assert main(["sweep", "--config", cfg, "--param", "theta", "--values", "150,30,90",
                 "--output-dir", str(out)]) == 0
    rows = [l.split(",") for l in (out / "sweep_theta.csv").read_text().splitlines()
            if not l.startswith("#")]
    assert rows[0][:4] == ["value", "status", "max_offset", "eq1"]
    assert [r[0] for r in rows[1:]] == ["150", "30", "90"]
    for r in rows[1:]:
        assert float(r[2]) <= float(r[3]) + 1e-6
    assert sorted(p.name for p in out.iterdir() if p.is_dir()) == [
        "theta_150", "theta_30", "theta_90"]


def test_sweep_parallel_matches_serial(tmp_path):
    cfg = write(tmp_path, "[scenario]\nkind = pseudo_random\nL0 = 10\nn_aircraft = 100\n"
                          "[run]\nemit = report\n")
    for workers, name in ((1, "a"), (2, "b")):
        assert main(["sweep", "--config", cfg, "--param", "seed", "--values", "0,1,2",
                     "--workers", str(workers), "--output-dir", str(tmp_path / name)]) == 0
    body = [(tmp_path / n / "sweep_seed.csv").read_text().split("\nvalue")[1] for n in "ab"]
    assert body[0] == body[1]


def test_sweep_reports_first_failure_and_continues(tmp_path, capsys):
    # at 10 degrees a single encounter already needs 57 nm, beyond the 20 nm cap
    cfg = write(tmp_path, "[scenario]\nkind = angle\nn_aircraft = 100\nmax_offset = 20\n"
                          "[run]\nemit = report\n")
    out = tmp_path / "sw"
    code = main(["sweep", "--config", cfg, "--param", "theta", "--values", "90,10,120",
                 "--output-dir", str(out)])
    assert code == 3
    assert "first failure: theta=10" in capsys.readouterr().err
    rows = (out / "sweep_theta.csv").read_text().splitlines()
    assert [r.split(",")[1] for r in rows if r[0].isdigit()] == ["0", "3", "0"]
    assert (out / "theta_120" / "report.txt").exists()


def test_sweep_empty_values(tmp_path, capsys):
    assert main(["sweep", "--config", write(tmp_path, SMALL), "--param", "seed",
                 "--values", ","]) == 2
    assert "values" in capsys.readouterr().err


def test_verify(tmp_path, capsys):
    cfg = write(tmp_path, SMALL)
    out = tmp_path / "v"
    assert main(["run", "--config", cfg, "--output-dir", str(out)]) == 0
    trace = out / "trace.csv"
    assert main(["verify", "--trace", str(trace)]) == 0
    saved = (out / "report.txt").read_text()
    printed = capsys.readouterr().out
    assert printed.split("kind:")[-1] in saved

    lines = trace.read_text().splitlines()
    k = next(i for i, l in enumerate(lines) if l.startswith("1,B,"))
    f = lines[k].split(",")
    f[4] = "0"
    f[5] = "0"
    lines[k] = ",".join(f)
    bad = tmp_path / "bad.csv"
    bad.write_text("\n".join(lines) + "\n")
    assert main(["verify", "--trace", str(bad)]) == 1
    assert "violation: aircraft 1" in capsys.readouterr().err

    bad.write_text("\n".join(lines[:-3]) + "\n")
    assert main(["verify", "--trace", str(bad)]) == 2
    assert "line" in capsys.readouterr().err


def test_defaults_round_trip(tmp_path, capsys):
    assert main(["defaults"]) == 0
    text = capsys.readouterr().out
    assert "[scenario]" in text and "arrival_period = 2.5" in text
    cfg = write(tmp_path, text)
    from cfs.config import RunConfig, load_config
    assert load_config(cfg) == RunConfig()


def test_bounds(capsys):
    assert main(["bounds", "--L0", "10"]) == 0
    out = capsys.readouterr().out
    assert "eq2_R_max: 17.0710678" in out and "eq4_L_max: 37.0710678" in out


def test_module_entry_point():
    res = subprocess.run([sys.executable, "-m", "cfs", "--help"], capture_output=True, text=True)
    assert res.returncode == 0
    assert "exit status" in res.stdout and "CFS_OUTPUT_DIR" in res.stdout
