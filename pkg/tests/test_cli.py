import io

import numpy as np
import pytest

from galileo_laws.cli import main
from galileo_laws.output import read_snapshot
from galileo_laws.solver import Grid1D, initial_field, sod
from galileo_laws.systems import make_system


def run(argv):
    out, err = io.StringIO(), io.StringIO()
    code = main(argv, out, err)
    return code, out.getvalue(), err.getvalue()


def speeds(out):
    rows = out.split("index  speed\n")[1].splitlines()[:3]
    return [float(r.split()[1]) for r in rows]


@pytest.fixture(autouse=True)
def no_env(monkeypatch):
    monkeypatch.delenv("GALILEO_LAWS_OUT", raising=False)


def test_check_all(tmp_path):
    code, out, _ = run(["check", "--all", "--seed", "42", "--samples", "100",
                        "--hessian-samples", "300", "--out", str(tmp_path)])
    assert code == 0
    assert "checks=77" in out and out.rstrip().endswith("ALL PASS")
    rows = (tmp_path / "report.csv").read_text().splitlines()
    assert rows[0] == "check,name,samples,max_residual,tolerance,pass"
    assert len(rows) - 1 >= 35


def test_check_deterministic_across_runs_and_workers(tmp_path):
    texts = []
    for k, workers in enumerate(["1", "1", "4"]):
        d = tmp_path / str(k)
        code, _, _ = run(["check", "--system", "cemracs", "--seed", "7", "--samples", "100",
                          "--hessian-samples", "300", "--workers", workers, "--out", str(d)])
        assert code == 0
        texts.append((d / "report.txt").read_bytes() + (d / "report.csv").read_bytes())
    assert texts[0] == texts[1] == texts[2]


def test_check_corrupted_fails(tmp_path):
    code, out, _ = run(["check", "--system", "corrupted-fixture", "--seed", "1", "--samples", "100",
                        "--hessian-samples", "300", "--out", str(tmp_path)])
    assert code == 1
    assert "corrupted-fixture:compatibility" in out


def test_check_needs_seed(tmp_path):
    code, _, err = run(["check", "--system", "hyp2", "--out", str(tmp_path)])
    assert code == 2 and "seed" in err


def test_eigen_examples():
    code, out, _ = run(["eigen", "--system", "cemracs", "--state", "1,0,2.5"])
    assert code == 0
    assert np.allclose(speeds(out), [-0.451754, 0.0, 0.451754], atol=1e-6)
    resid = float(out.split("residual")[1].split()[0])
    assert resid < 1e-6
    code, out, _ = run(["eigen", "--system", "eulergas", "--state", "1,0,2.5"])
    assert code == 0
    assert np.allclose(speeds(out), [-1.183216, 0.0, 1.183216], atol=1e-6)


def test_eigen_out_of_cone():
    code, _, err = run(["eigen", "--system", "hyp2", "--state", "1,1.5"])
    assert code == 2 and "|zeta| < sqrt(alpha/beta) theta" in err
    code, _, err = run(["eigen", "--system", "cemracs", "--state", "1,0,-1"])
    assert code == 2 and "psi > 0" in err


def test_unknown_system_lists_available():
    code, _, err = run(["eigen", "--system", "parabolic", "--state", "1,0"])
    assert code == 2 and "available" in err and "cemracs" in err


def test_usage_errors():
    assert run([])[0] == 2
    assert run(["evolve", "--cells", "many"])[0] == 2


def test_evolve_snapshots(tmp_path):
    code, out, _ = run(["evolve", "--system", "eulergas", "--ic", "sod", "--cells", "400",
                        "--tend", "0.2", "--out", str(tmp_path)])
    assert code == 0
    assert (tmp_path / "snapshot_0000.csv").exists() and (tmp_path / "snapshot_0001.csv").exists()
    script = (tmp_path / "profiles.gp").read_text()
    assert "snapshot_0001.csv" in script
    header, data = read_snapshot(tmp_path / "snapshot_0001.csv")
    assert header == ["t", "x", "rho", "q", "eps", "u", "eta", "Pi"]
    assert data.shape == (400, 8) and np.all(data[:, 0] == 0.2)


def test_evolve_tend_zero_round_trip(tmp_path):
    code, _, _ = run(["evolve", "--system", "eulergas", "--ic", "sod", "--cells", "50",
                      "--tend", "0", "--out", str(tmp_path)])
    assert code == 0
    assert sorted(p.name for p in tmp_path.glob("snapshot_*.csv")) == ["snapshot_0000.csv"]
    _, data = read_snapshot(tmp_path / "snapshot_0000.csv")
    gas = make_system("eulergas")
    f = initial_field(gas, sod(gas), Grid1D(50))
    assert np.array_equal(data[:, 2:5].T, f.states)
    assert np.array_equal(data[:, 1], Grid1D(50).centers)


def test_evolve_bytes_independent_of_workers(tmp_path):
    files = []
    for workers in ("1", "3"):
        d = tmp_path / workers
        run(["evolve", "--system", "cemracs", "--cells", "120", "--tend", "0.05",
             "--workers", workers, "--out", str(d)])
        files.append((d / "snapshot_0001.csv").read_bytes())
    assert files[0] == files[1]


def test_frameshift(tmp_path):
    code, out, _ = run(["frameshift", "--v", "0.5", "--grids", "50,100,200", "--tend", "0.1",
                        "--out", str(tmp_path)])
    assert code == 0
    rows = (tmp_path / "convergence.csv").read_text().splitlines()
    assert rows[0] == "n_cells,dx,l1,order" and len(rows) == 4
    l1 = [float(r.split(",")[2]) for r in rows[1:]]
    assert l1[0] > l1[1] > l1[2]
    assert (tmp_path / "convergence.gp").exists()


def test_conjugate_command():
    code, out, _ = run(["conjugate", "--closure", "half-square", "--point", "3"])
    assert code == 0 and "value  4.5" in out
    code, out, _ = run(["conjugate", "--closure", "inverse", "--slopes", "1"])
    assert code == 3
    assert run(["conjugate", "--closure", "gas"])[0] == 2


def test_config_file_and_precedence(tmp_path, monkeypatch):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("# demo\nsystem = cemracs\nstate = 1, 0, 2.5\n")
    code, out, _ = run(["eigen", "--config", str(cfg)])
    assert code == 0 and "cemracs" in out
    code, out, _ = run(["eigen", "--config", str(cfg), "--system", "eulergas"])
    assert "eulergas" in out
    bad = tmp_path / "bad.cfg"
    bad.write_text("system = hyp2\ncolour = blue\n")
    code, _, err = run(["eigen", "--config", str(bad)])
    assert code == 2 and ":2:" in err


def test_output_env_override(tmp_path, monkeypatch):
    cfg = tmp_path / "run.cfg"
    cfg.write_text(f"out = {tmp_path / 'from_config'}\n")
    monkeypatch.setenv("GALILEO_LAWS_OUT", str(tmp_path / "from_env"))
    run(["evolve", "--config", str(cfg), "--cells", "20", "--tend", "0"])
    assert (tmp_path / "from_env" / "snapshot_0000.csv").exists()
    assert not (tmp_path / "from_config").exists()
    run(["evolve", "--cells", "20", "--tend", "0", "--out", str(tmp_path / "from_flag")])
    assert (tmp_path / "from_flag" / "snapshot_0000.csv").exists()


def test_module_entry_point(tmp_path):
    import subprocess
    import sys
    r = subprocess.run([sys.executable, "-m", "galileo_laws", "eigen", "--system", "eulergas",
                        "--state", "2,4,10"], capture_output=True, text=True, cwd=tmp_path)
    assert r.returncode == 0 and "2.0" in r.stdout
