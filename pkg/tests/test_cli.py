import json
import subprocess
import sys

import pytest

from rggthresh import cli
from rggthresh.graph import GraphConfig, generate, load_graph
from rggthresh.properties import Property


def run(argv, capsys):
    code = cli.main(argv)
    out, err = capsys.readouterr()
    return code, out, err


def test_generate_header_and_reproducible(tmp_path, capsys):
    code, out, _ = run(["generate", "--n", "10", "--r", "0.1", "--metric", "torus", "--seed", "7"], capsys)
    assert code == 0
    assert out.splitlines()[0] == "rggpts 1 10 0.1 torus"
    assert len(out.splitlines()) == 11
    a, b = tmp_path / "a.rggpts", tmp_path / "b.rggpts"
    for path in (a, b):
        assert cli.main(["generate", "--n", "50", "--r", "0.1", "--seed", "3", "--out", str(path)]) == 0
    assert a.read_bytes() == b.read_bytes()
    g = load_graph(a)
    h = generate(GraphConfig(50, 0.1, "square", 3))
    assert (g.points == h.points).all()


def test_exit_codes(tmp_path, capsys):
    code, _, err = run(["generate", "--n", "10", "--r", "0.3", "--metric", "torus", "--seed", "1"], capsys)
    assert code == 2 and "TorusRadiusTooLarge" in err
    code, _, _ = run(["generate", "--n", "10", "--r", "0.1", "--seed", "1", "--out", str(tmp_path / "no/such/dir.txt")], capsys)
    assert code == 3
    code, _, _ = run(["detect", "--property", "plane", "--in", str(tmp_path / "missing.rggpts")], capsys)
    assert code == 3
    bad = tmp_path / "bad.rggpts"
    bad.write_text("rggpts 1 2 0.1 square\n0.5 0.5\n")
    code, _, _ = run(["detect", "--property", "plane", "--in", str(bad)], capsys)
    assert code == 3
    code, _, _ = run(["detect", "--property", "plane", "--n", "10"], capsys)
    assert code == 2
    code, _, _ = run(["detect", "--property", "clique-k", "--n", "10", "--r", "0.1", "--seed", "1"], capsys)
    assert code == 2
    with pytest.raises(SystemExit) as exc:
        cli.main(["detect", "--property", "nonsense"])
    assert exc.value.code == 2


def _detect(capsys, *argv):
    code, out, _ = run(["detect", *argv], capsys)
    assert code == 0
    return json.loads(out)


def test_detect_no_free_edge_fixture(data_dir, capsys):
    d = _detect(capsys, "--property", "all-free", "--in", str(data_dir / "no_free_edge_15.rggpts"))
    assert d["result"] == "false" and d["free_edge_count"] == 0
    assert d["self_checks"]["crossings_checked"] == d["crossing_count"] > 0
    assert all(d["self_checks"][k] for k in ("adjacent_sides", "within_2r", "crown"))
    d = _detect(capsys, "--property", "has-free-edge", "--in", str(data_dir / "no_free_edge_15.rggpts"))
    assert d["result"] == "false"


def test_detect_k5_planar(data_dir, capsys):
    d = _detect(capsys, "--property", "planar", "--in", str(data_dir / "k5.rggpts"))
    assert d["result"] == "false"
    assert len(d["witness"]["kuratowski_vertices"]) == 5
    assert len(d["witness"]["kuratowski_edges"]) == 10


def test_detect_plane_with_anchor(data_dir, capsys):
    d = _detect(capsys, "--property", "plane", "--in", str(data_dir / "anchor.rggpts"))
    assert d["result"] == "false" and d["crossing_count"] == 1
    assert d["witness"]["anchor"] == {"crown": 0, "triangle": [1, 2], "apex": 3}
    d = _detect(capsys, "--property", "plane", "--n", "20", "--r", "0.0", "--seed", "1")
    assert d["result"] == "true" and d["m"] == 0 and d["crossing_count"] == 0


def test_detect_independent_and_clique(capsys):
    d = _detect(capsys, "--property", "independent-k", "--k", "3", "--n", "30", "--r", "0.05", "--seed", "2")
    assert d["result"] == "yes" and len(d["witness"]) == 3
    d = _detect(capsys, "--property", "clique-k", "--k", "3", "--n", "400", "--r", "0.1", "--seed", "2")
    assert d["result"] == "true" and len(d["witness"]) == 3


def test_generate_then_detect_matches_in_memory(tmp_path, capsys):
    path = tmp_path / "g.rggpts"
    assert cli.main(["generate", "--n", "300", "--r", "0.08", "--metric", "torus", "--seed", "11", "--out", str(path)]) == 0
    g = generate(GraphConfig(300, 0.08, "torus", 11))
    for name, k in (("plane", None), ("has-free-edge", None), ("clique-k", 4), ("connected-k", 5)):
        argv = ["--property", name, "--in", str(path)] + (["--k", str(k)] if k else [])
        d = _detect(capsys, *argv)
        d.pop("meta")
        assert d == json.loads(json.dumps(cli.detect_verdict(g, Property.parse(name, k))))


def test_sweep_csv(capsys):
    code, out, _ = run(
        ["sweep", "--n", "100", "--property", "clique-k", "--k", "3", "--r-grid", "0.05,0.1", "--trials", "10"],
        capsys,
    )
    assert code == 0
    lines = out.splitlines()
    meta = json.loads(lines[0][2:])
    assert lines[0].startswith("# ") and meta["command"] == "sweep" and meta["seed"] == 0
    assert lines[1].startswith("n,r,property,k,trials,successes,p_hat,ci_lo,ci_hi,unknown,seed")
    assert len(lines) == 4


def test_fit_from_threshold_files(tmp_path, capsys):
    paths = []
    for n in (1000, 2000, 4000, 8000):
        p = tmp_path / f"t{n}.json"
        p.write_text(json.dumps({"n": n, "r_star": 2.0 * n**-0.75}))
        paths.append(str(p))
    code, out, _ = run(["fit", *paths], capsys)
    assert code == 0
    assert json.loads(out)["slope"] == pytest.approx(-0.75, abs=1e-12)
    code, _, _ = run(["fit", paths[0], paths[1]], capsys)
    assert code == 2


def test_threshold_plane_regression(data_dir, capsys):
    # recorded once from this implementation; guards against silent drift
    code, out, _ = run(["threshold", "--property", "plane", "--n", "4096"], capsys)
    assert code == 0
    got = json.loads(out)
    want = json.loads((data_dir / "threshold_plane_4096.json").read_text())
    got.pop("meta")
    want.pop("meta")
    assert got == want


def test_crossings_command(capsys):
    code, out, _ = run(["crossings", "--n", "500", "--r", "0.03", "--trials", "5"], capsys)
    assert code == 0
    d = json.loads(out)
    assert d["mean"] > 0 and d["trials"] == 5 and d["meta"]["flags"]["n"] == 500


def test_module_entry_point():
    res = subprocess.run([sys.executable, "-m", "rggthresh", "--version"], capture_output=True, text=True)
    assert res.returncode == 0 and "rggthresh" in res.stdout
