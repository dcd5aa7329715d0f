import json
import subprocess
import sys

import pytest

from ballunion.cli import main, parse_range
from ballunion.construction import ConstructionParams, build_family
from ballunion.export import boundary_mesh, mesh_obj


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_generate_to_file(tmp_path, capsys):
    path = tmp_path / "fam.json"
    code, _, _ = run(capsys, "generate", "--k", "2", "--m", "2", "--out", str(path))
    assert code == 0
    data = json.loads(path.read_text())
    assert [c["center"] for c in data["chain"]] == [["0", "0", "0"], ["0", "0", "1/256"]]


def test_generate_rejects_zero_k(capsys):
    code, out, err = run(capsys, "generate", "--k", "0", "--m", "2")
    assert code == 2 and "k must be ≥ 1" in err and out == ""


def test_generate_to_stdout(capsys):
    code, out, _ = run(capsys, "generate", "--k", "3", "--m", "3", "--out", "-")
    assert code == 0 and json.loads(out)["k"] == 3


def test_verify_single(capsys):
    code, out, _ = run(capsys, "verify", "--k", "2", "--m", "2")
    assert code == 0
    reps = [json.loads(line) for line in out.splitlines()]
    assert [r["verdict"] for r in reps] == ["holds", "holds"]
    assert reps[0]["witnesses"]["pk_h"] == "13553/14336"


def test_verify_not_applicable_exits_one(capsys):
    code, out, _ = run(capsys, "verify", "--k", "2", "--m", "1")
    assert code == 1
    assert json.loads(out.splitlines()[1])["verdict"] == "not-applicable"


def test_verify_range(capsys):
    code, out, _ = run(capsys, "verify", "--range", "4:40:2")
    assert code == 0 and len(out.splitlines()) == 2 * 19


def test_verify_range_odd_is_usage_error(capsys):
    code, _, err = run(capsys, "verify", "--range", "5:9:2")
    assert code == 2 and "even" in err


def test_parse_range_inclusive():
    assert parse_range("4:10:2") == [4, 6, 8, 10]


def test_count_k_m(capsys):
    code, out, _ = run(capsys, "count", "--k", "2", "--m", "2", "--mode", "exact-sector")
    rep = json.loads(out)
    assert code == 0 and rep["V"] >= 4 and rep["authoritative"]


def test_count_file_one_ball(tmp_path, capsys):
    path = tmp_path / "one_ball.json"
    path.write_text('{"balls":[{"center":["0","0","0"],"r":"1"}]}')
    code, out, _ = run(capsys, "count", "--file", str(path))
    rep = json.loads(out)
    assert code == 0 and (rep["V"], rep["E"], rep["F"]) == (0, 0, 1)


def test_count_modes_agree(capsys):
    _, a, _ = run(capsys, "count", "--k", "4", "--m", "4", "--mode", "certified-full")
    _, b, _ = run(capsys, "count", "--k", "4", "--m", "4", "--mode", "exact-sector")
    a, b = json.loads(a), json.loads(b)
    assert (a["V"], a["E"], a["F"]) == (b["V"], b["E"], b["F"])


def test_count_tangent_input_exits_three(tmp_path, capsys):
    path = tmp_path / "tangent.json"
    path.write_text('{"balls":[{"center":["0","0","0"]},{"center":["2","0","0"]}]}')
    code, out, _ = run(capsys, "count", "--file", str(path))
    assert code == 3 and json.loads(out)["authoritative"] is False


def test_count_missing_file(capsys):
    code, _, err = run(capsys, "count", "--file", "/nonexistent/balls.json")
    assert code == 2 and "/nonexistent/balls.json" in err


def test_count_ball_list_in_sector_mode_is_usage_error(tmp_path, capsys):
    path = tmp_path / "b.json"
    path.write_text('{"balls":[{"center":["0","0","0"]}]}')
    code, _, _ = run(capsys, "count", "--file", str(path), "--mode", "exact-sector")
    assert code == 2


def test_sweep_single_value_is_usage_error(capsys):
    code, _, _ = run(capsys, "sweep", "--n", "8")
    assert code == 2


def test_sweep_to_stdout(capsys):
    code, out, err = run(capsys, "sweep", "--n", "8,16", "--out", "-")
    lines = out.splitlines()
    assert lines[0] == "n,k,m,V,E,F,seconds" and len(lines) == 3
    assert lines[1].startswith("8,4,4,29,44,17,") and lines[2].startswith("16,8,8,121,184,65,")
    assert "slope=" in err
    assert code == 0


def test_sweep_to_file_prints_slope(tmp_path, capsys):
    path = tmp_path / "s.csv"
    code, out, _ = run(capsys, "sweep", "--n", "4,6", "--out", str(path))
    assert out.startswith("slope=")
    assert path.read_text().startswith("n,k,m,V,E,F,seconds\n")
    # V grows faster than n^2 at this tiny scale, so the slope check fails
    assert code == 1


def test_export_family_matches_generate(tmp_path, capsys):
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    run(capsys, "generate", "--k", "2", "--m", "2", "--out", str(a))
    run(capsys, "export", "family", "--k", "2", "--m", "2", "--out", str(b))
    assert a.read_bytes() == b.read_bytes()


def test_export_trace(tmp_path, capsys):
    path = tmp_path / "gamma.obj"
    code, _, _ = run(capsys, "export", "trace", "--k", "4", "--m", "4", "--j", "1", "--out", str(path))
    assert code == 0
    text = path.read_text()
    assert text.startswith("# curve on ring sphere 1")
    assert text.rstrip().splitlines()[-1].startswith("l ")


def test_export_trace_bad_j(capsys):
    code, _, _ = run(capsys, "export", "trace", "--k", "2", "--m", "2", "--j", "5")
    assert code == 2


def test_export_boundary_deterministic(tmp_path, capsys):
    a, b = tmp_path / "a.obj", tmp_path / "b.obj"
    for p in (a, b):
        code, _, _ = run(capsys, "export", "boundary", "--k", "4", "--m", "4", "--rings", "16", "--out", str(p))
        assert code == 0
    assert a.read_bytes() == b.read_bytes()
    faces = [ln for ln in a.read_text().splitlines() if ln.startswith("f ")]
    assert faces


def test_identical_runs_are_byte_identical(capsys):
    _, a, _ = run(capsys, "count", "--k", "3", "--m", "3")
    _, b, _ = run(capsys, "count", "--k", "3", "--m", "3")
    assert a == b


def test_precision_ceiling_env_is_validated(monkeypatch, capsys):
    monkeypatch.setenv("BALLS_PRECISION_CEILING", "32")
    code, _, _ = run(capsys, "count", "--k", "2", "--m", "2")
    assert code == 2


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "ballunion", "generate", "--k", "0", "--m", "2"],
                          capture_output=True, text=True)
    assert proc.returncode == 2 and "k must be ≥ 1" in proc.stderr


def test_argparse_usage_error_exit_code(capsys):
    with pytest.raises(SystemExit) as exc:
        main(["count", "--mode", "fast"])
    assert exc.value.code == 2


def test_mesh_keeps_only_exposed_patches():
    fam = build_family(ConstructionParams(1, 1))
    verts, tris = boundary_mesh(fam.balls(), 12, 24)
    per_sphere = 2 * 24 + 2 * (12 - 2) * 24
    full = 2 * per_sphere
    assert 0 < len(tris) < full
    text = mesh_obj(verts, tris)
    assert text.count("\nv ") == len(verts) and text.count("\nf ") == len(tris)
