import json

import numpy as np
import pytest

from ncmoments.cli import main
from ncmoments.matrixio import write_matrix_file

from conftest import random_matrix, random_unitary


@pytest.fixture
def family_file(tmp_path, rng):
    path = tmp_path / "family.json"
    write_matrix_file(path, [random_matrix(rng, 2) for _ in range(2)])
    return str(path)


def test_gadgets_verify(capsys):
    assert main(["gadgets", "verify", "--n", "4", "--kind", "full"]) == 0
    payload = json.loads(capsys.readouterr().out)
    assert payload["pass"] is True and payload["dim"] == 4


def test_gadgets_verify_sampled(capsys):
    code = main(
        ["gadgets", "verify", "--n", "10", "--kind", "compact", "--sample", "300"]
    )
    assert code == 0
    payload = json.loads(capsys.readouterr().out)
    assert payload["mode"] == "sampled"


def test_coeff_table(capsys):
    assert main(["coeff", "table", "--p", "3", "--max-n", "3"]) == 0
    lines = capsys.readouterr().out.strip().splitlines()
    assert lines[0] == "p,N,alpha,coefficient"
    # rows: (1,0), (2,0), (2,1), (3,0), (3,1)
    assert len(lines) == 6
    row = dict(zip(("p", "N", "alpha", "c"), lines[3].split(",")))
    assert float(row["c"]) == 2.25  # p^2/4 at p=3


def test_reconstruct(family_file, capsys):
    code = main(
        ["reconstruct", "--file", family_file, "--word", "1*,2", "--p", "1.5"]
    )
    assert code == 0
    payload = json.loads(capsys.readouterr().out)
    assert payload["abs_error"] <= 1e-4
    assert {"estimate_re", "estimate_im", "direct_trace_re", "direct_trace_im",
            "abs_error", "residual"} <= payload.keys()


def test_reconstruct_custom_radii(family_file, capsys):
    code = main(
        [
            "reconstruct", "--file", family_file, "--word", "1,2",
            "--p", "3", "--q", "7", "--radii", "0.004,0.002,0.001",
        ]
    )
    assert code == 0
    assert json.loads(capsys.readouterr().out)["abs_error"] <= 1e-4


def test_dist_table_and_compare(tmp_path, rng, capsys):
    x = random_matrix(rng, 2)
    u = random_unitary(rng, 2)
    file_a = tmp_path / "a.json"
    file_b = tmp_path / "b.json"
    write_matrix_file(file_a, [x])
    write_matrix_file(file_b, [u @ x @ u.conj().T])
    assert main(["dist", "table", "--file", str(file_a), "--maxdeg", "2"]) == 0
    payload = json.loads(capsys.readouterr().out)
    assert payload["entries"][""] == [1.0, 0.0]
    code = main(
        ["dist", "compare", "--file-a", str(file_a), "--file-b", str(file_b),
         "--maxdeg", "3", "--tol", "1e-8"]
    )
    assert code == 0
    file_c = tmp_path / "c.json"
    write_matrix_file(file_c, [2 * x])
    code = main(
        ["dist", "compare", "--file-a", str(file_a), "--file-b", str(file_c),
         "--maxdeg", "2", "--tol", "1e-8"]
    )
    assert code == 1


def test_probe_isometry(tmp_path, rng, capsys):
    from ncmoments.algebra import matrix_unit

    units = [matrix_unit(2, i, j) for i in range(2) for j in range(2)]
    basis = tmp_path / "basis.json"
    images = tmp_path / "images.json"
    write_matrix_file(basis, units)
    write_matrix_file(images, [u.T.copy() for u in units])
    code = main(
        ["probe", "isometry", "--file", str(basis), "--images", str(images),
         "--level", "2", "--p", "3", "--trials", "20", "--seed", "5"]
    )
    assert code == 0
    payload = json.loads(capsys.readouterr().out)
    assert payload["max_gap"] > 1e-3
    assert payload["seed"] == 5


def test_defect_commands(tmp_path, rng, capsys):
    from ncmoments.algebra import matrix_unit

    units = [matrix_unit(2, i, j) for i in range(2) for j in range(2)]
    basis = tmp_path / "basis.json"
    images = tmp_path / "images.json"
    write_matrix_file(basis, units)
    stretched = list(units)
    stretched[1] = 2 * units[1]
    write_matrix_file(images, stretched)
    code = main(
        ["defect", "mult", "--file", str(basis), "--images", str(images),
         "--a", "1", "--b", "2", "--p", "3"]
    )
    assert code == 0
    assert abs(json.loads(capsys.readouterr().out)["defect"] - 0.5) < 1e-10
    code = main(
        ["defect", "adjoint", "--file", str(basis), "--images", str(images),
         "--x", "1"]
    )
    assert code == 0
    payload = json.loads(capsys.readouterr().out)
    assert payload["kind"] == "adjoint" and payload["defect"] > 0.1


def test_psi_check(capsys):
    assert main(["psi", "check", "--p", "1.5"]) == 0
    payload = json.loads(capsys.readouterr().out)
    assert payload["pass"] is True


def test_fourterm(capsys):
    code = main(["fourterm", "--p", "1.7", "--dim", "2", "--trials", "25"])
    assert code == 0
    payload = json.loads(capsys.readouterr().out)
    assert payload["min_eigenvalue_defect"] >= -1e-10


def test_evennorm(tmp_path, rng, capsys):
    path = tmp_path / "x.json"
    write_matrix_file(path, [random_matrix(rng, 2)])
    code = main(["evennorm", "--file", str(path), "--N", "1", "--p", "3"])
    assert code == 0
    assert json.loads(capsys.readouterr().out)["abs_error"] <= 1e-6


def test_evenp_check(tmp_path, rng, capsys):
    path = tmp_path / "x.json"
    write_matrix_file(path, [random_matrix(rng, 2)])
    code = main(
        ["evenp", "check", "--file", str(path), "--m", "2",
         "--levels", "1,2", "--trials", "2", "--seed", "3"]
    )
    assert code == 0
    assert json.loads(capsys.readouterr().out)["pass"] is True
    from ncmoments.algebra import matrix_unit

    units = [matrix_unit(2, i, j) for i in range(2) for j in range(2)]
    ufile = tmp_path / "units.json"
    tfile = tmp_path / "tunits.json"
    write_matrix_file(ufile, units)
    write_matrix_file(tfile, [u.T.copy() for u in units])
    code = main(
        ["evenp", "check", "--file", str(ufile), "--file-b", str(tfile),
         "--m", "2", "--levels", "1", "--trials", "1", "--seed", "3"]
    )
    assert code == 1
    payload = json.loads(capsys.readouterr().out)
    assert payload["precondition_failed"] is True


def test_suite_run_selected_module(tmp_path, capsys):
    config = tmp_path / "config.json"
    config.write_text(json.dumps({"seed": 1, "modules": ["gadget-matrices"]}))
    code = main(["suite", "run", "--config", str(config)])
    assert code == 0
    payload = json.loads(capsys.readouterr().out)
    assert all(r["module"] == "gadget-matrices" for r in payload["records"])


def test_suite_forced_failure(tmp_path, capsys):
    config = tmp_path / "config.json"
    config.write_text(
        json.dumps(
            {
                "seed": 1,
                "modules": ["moment-reconstruction"],
                "tolerances": {"recon.moment_recovery": 0.0},
            }
        )
    )
    code = main(["suite", "run", "--config", str(config)])
    assert code == 1
    payload = json.loads(capsys.readouterr().out)
    failing = [r for r in payload["records"] if not r["pass"]]
    assert [r["name"] for r in failing] == ["recon.moment_recovery"]


def test_suite_bad_config(tmp_path):
    config = tmp_path / "config.json"
    config.write_text(json.dumps({"seed": 1, "unknown_field": True}))
    assert main(["suite", "run", "--config", str(config)]) == 2


def test_suite_csv_output(tmp_path):
    config = tmp_path / "config.json"
    config.write_text(json.dumps({"modules": ["binomial-combinatorics"]}))
    out = tmp_path / "report.csv"
    code = main(
        ["suite", "run", "--config", str(config), "--format", "csv",
         "--output", str(out)]
    )
    assert code == 0
    lines = out.read_text().strip().splitlines()
    assert lines[0].startswith("name,module,anchor")
    assert len(lines) > 1


def test_usage_error_exit_code():
    assert main(["no-such-command"]) == 2
