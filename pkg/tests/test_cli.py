import json
import os
import pathlib
import re
import subprocess
import sys

import pytest

from nesscycles.cli import main

GOLDEN = pathlib.Path(__file__).parent / "golden"
REGEN = os.environ.get("NESSCYCLES_REGEN_GOLDEN") == "1"


def run(argv, capsys):
    code = main([str(a) for a in argv])
    out, err = capsys.readouterr()
    return code, out, err


NUMBER = re.compile(r"-?\d+(?:\.\d+)?(?:e[-+]?\d+)?")


def check_golden(name, text):
    """Text must match exactly; numbers to 1e-9 relative (1e-12 absolute) for BLAS noise."""
    path = GOLDEN / name
    if REGEN:
        path.write_text(text)
    expected = path.read_text()
    assert NUMBER.sub("#", text) == NUMBER.sub("#", expected)
    got = [float(v) for v in NUMBER.findall(text)]
    want = [float(v) for v in NUMBER.findall(expected)]
    assert got == pytest.approx(want, rel=1e-9, abs=1e-12)


@pytest.fixture
def tasep_model():
    return GOLDEN / "tasep_x2.json"


@pytest.fixture
def ring_model():
    return GOLDEN / "ring_fwd2_bwd1.json"


def test_tasep_model_file_is_current(tmp_path, capsys):
    code, _, _ = run(["tasep-model", "--x", "2", "--out", tmp_path / "m.json"], capsys)
    assert code == 0
    assert json.loads((tmp_path / "m.json").read_text()) == json.loads((GOLDEN / "tasep_x2.json").read_text())


def test_steady_golden(tasep_model, capsys):
    code, out, _ = run(["steady", tasep_model], capsys)
    assert code == 0
    check_golden("steady_tasep_x2.txt", out)
    assert "0.1875" in out and "detailed balance: no" in out


def test_steady_json_report(tasep_model, capsys):
    code, out, _ = run(["steady", tasep_model, "--json"], capsys)
    report = json.loads(out)
    assert code == 0
    assert report["version"] and len(report["input_sha256"]) == 64
    assert report["results"]["p"][3] == pytest.approx(0.25)


def test_decompose_default_golden(tasep_model, tmp_path, capsys):
    code, out, _ = run(["decompose", tasep_model, "--out", tmp_path / "d.json"], capsys)
    assert code == 0
    check_golden("decompose_tasep_x2.txt", out)
    data = json.loads((tmp_path / "d.json").read_text())
    weights = {tuple(e["cycle"]): e["weight"] for e in data["cycles"]}
    assert weights == pytest.approx({(1, 2, 6, 4): 3 / 16, (1, 2, 6, 5): 0.0,
                                     (1, 3, 6, 4): 1 / 16, (1, 3, 6, 5): 2 / 16})


def test_decompose_all(tasep_model, capsys):
    code, out, _ = run(["decompose", tasep_model, "--ordering", "all"], capsys)
    assert code == 0
    assert "2 distinct decompositions" in out
    check_golden("decompose_all_tasep_x2.txt", out)


def test_decompose_all_threads_same_output(tasep_model, capsys):
    _, one, _ = run(["decompose", tasep_model, "--ordering", "all"], capsys)
    _, four, _ = run(["decompose", tasep_model, "--ordering", "all", "--threads", "4"], capsys)
    assert one == four


def test_decompose_ordering_file(tasep_model, tmp_path, capsys):
    order = tmp_path / "order.json"
    order.write_text("[[1, 3, 6, 4]]")
    code, out, _ = run(["decompose", tasep_model, "--ordering", order, "--json"], capsys)
    assert code == 0
    d = json.loads(out)["results"]["decomposition"]
    assert d["ordering"][0] == [1, 3, 6, 4]
    weights = {tuple(e["cycle"]): e["weight"] for e in d["cycles"]}
    assert weights[(1, 3, 6, 4)] == pytest.approx(3 / 16)


def test_decompose_ordering_file_unknown_cycle(tasep_model, tmp_path, capsys):
    order = tmp_path / "order.json"
    order.write_text("[[1, 4, 6, 3]]")
    code, _, err = run(["decompose", tasep_model, "--ordering", order], capsys)
    assert code == 2 and "not in the catalog" in err


def test_decompose_cap(tasep_model, capsys):
    code, _, err = run(["decompose", tasep_model, "--ordering", "all", "--max-orderings", "10"], capsys)
    assert code == 4
    assert "sample" in err


def test_decompose_sampling_reports_lower_bound(tasep_model, capsys):
    code, out, _ = run(["decompose", tasep_model, "--ordering", "all", "--sample", "50",
                        "--seed", "1"], capsys)
    assert code == 0 and "lower bound" in out


def test_split_two_cycles(ring_model, capsys):
    code, out, _ = run(["decompose", ring_model, "--split-2cycles", "--json"], capsys)
    assert code == 0
    res = json.loads(out)["results"]
    two = [e["weight"] for e in res["two_cycle_part"]["cycles"]]
    assert two == pytest.approx([1 / 3] * 3)
    cur = {tuple(e["cycle"]): e["weight"] for e in res["current_part"]["cycles"]}
    assert cur == pytest.approx({(1, 2, 3): 1 / 3, (1, 3, 2): 0.0})
    _, text, _ = run(["decompose", ring_model, "--split-2cycles"], capsys)
    check_golden("split_ring.txt", text)


def test_transform_golden(tasep_model, tmp_path, capsys):
    code, out, _ = run(["transform", tasep_model, "--out", tmp_path / "h.json"], capsys)
    assert code == 0
    check_golden("transform_tasep_x2.txt", out)
    h = json.loads((tmp_path / "h.json").read_text())
    assert h["sum_m_tau"] == pytest.approx(1.0, abs=1e-12)
    for e in h["edges"]:
        assert e["b_ab"] * next(n["m"] for n in h["nodes"] if n["cycle"] == e["a"]) == \
            pytest.approx(e["psi"], rel=1e-12)


def test_thermo_ring(ring_model, tmp_path, capsys):
    code, out, _ = run(["thermo", ring_model, "--out", tmp_path / "t.csv"], capsys)
    assert code == 0
    check_golden("thermo_ring.txt", out)
    assert "P_tot = 0.69314718056" in out
    assert (tmp_path / "t.csv").read_text().startswith("edge,I,A,U,E,R\n")


def test_thermo_tasep_refuses_entropy(tasep_model, capsys):
    code, out, err = run(["thermo", tasep_model], capsys)
    assert code == 3
    assert "NA" in out
    assert "entropy production refused" in err and "diverge" in err


def test_simulate_seeded(tasep_model, tmp_path, capsys):
    argv = ["simulate", tasep_model, "--seed", "7", "--events", "2000", "--decompose",
            "--out", tmp_path / "a.csv", "--flux-out", tmp_path / "f.json"]
    code, first, _ = run(argv, capsys)
    assert code == 0
    check_golden("simulate_tasep_x2_seed7.txt", first)
    traj = (tmp_path / "a.csv").read_bytes()
    _, second, _ = run(argv, capsys)
    assert first == second and traj == (tmp_path / "a.csv").read_bytes()
    assert json.loads((tmp_path / "f.json").read_text())["n"] == 6


def test_simulate_requires_seed(tasep_model, capsys):
    with pytest.raises(SystemExit) as exc:
        main(["simulate", str(tasep_model), "--events", "10"])
    assert exc.value.code == 2


def test_tasep_sweep_golden(capsys):
    code, out, _ = run(["tasep-sweep", "--x-min", "0.1", "--x-max", "10", "--points", "12", "--log"], capsys)
    assert code == 0
    check_golden("tasep_sweep.txt", out)
    assert "kink at x=1: left slope 2," in out


def test_tasep_sweep_rows_follow_table(capsys):
    code, out, _ = run(["tasep-sweep", "--x-min", "0.1", "--x-max", "10", "--points", "7", "--json"], capsys)
    rows = json.loads(out)["results"]["csv"].splitlines()
    header = rows[0].split(",")
    for line in rows[1:]:
        r = dict(zip(header, line.split(",")))
        x = float(r["x"])
        if x > 1:
            assert float(r["m_alpha"]) == pytest.approx(x + 1)
            assert float(r["m_delta"]) == pytest.approx(x - 1)
        elif x < 1:
            assert float(r["m_alpha"]) == pytest.approx(2 * x)
            assert float(r["m_gamma"]) == pytest.approx(1 - x)


def test_malformed_json(tmp_path, capsys):
    bad = tmp_path / "bad.json"
    bad.write_text('{"n": 2,\n "edges": [[1, 2, 1.0],]}')
    code, _, err = run(["steady", bad], capsys)
    assert code == 2
    assert "line 2" in err


def test_reducible_chain(tmp_path, capsys):
    model = tmp_path / "red.json"
    model.write_text(json.dumps({"n": 2, "edges": [[1, 2, 1.0]]}))
    code, _, err = run(["steady", model], capsys)
    assert code == 3
    assert "not strongly connected" in err


def test_missing_file(tmp_path, capsys):
    code, _, _ = run(["steady", tmp_path / "nope.json"], capsys)
    assert code == 2


def test_console_script_entry_point(tasep_model):
    out = subprocess.run([sys.executable, "-m", "nesscycles.cli", "steady", str(tasep_model)],
                         capture_output=True, text=True, check=True)
    assert out.stdout.startswith(" state")
