import json

import pytest

from coarse_decomp.cli import COMMANDS, HANDLERS, run
from coarse_decomp.errors import Inconclusive, SamplingFailure


@pytest.fixture
def files(tmp_path):
    made = {}
    for name, argv in {
        "grid": ["--grid", "3", "3"],
        "grid4": ["--grid", "4", "4"],
        "corridor": ["--corridor", "2", "6"],
        "long": ["--corridor", "2", "20"],
        "cycle": ["--cycle", "6"],
    }.items():
        out = tmp_path / f"{name}.txt"
        assert run(["gen", *argv, "--out", str(out)]) == 0
        made[name] = str(out)
    return made


ROUND_TRIPS = [
    ("partition", "grid", ["--ktt", "1", "--edges"]),
    ("family", "grid", []),
    ("lp-ab", "corridor", ["--mode", "exact"]),
    ("round-ab", "corridor", []),
    ("lp-balanced", "cycle", ["--X", "0,2,4", "--mode", "exact"]),
    ("round-balanced", "cycle", ["--X", "0,2,4"]),
    ("sample-paths", "corridor", ["--ell", "3", "--seed", "2"]),
    ("sample-subgraph", "cycle", ["--X", "0,3"]),
    ("treedecomp", "grid", []),
    ("pipeline-tw", "grid4", []),
    ("menger", "corridor", ["--k", "2"]),
    ("pipeline-menger", "long", ["--k", "2", "--seed", "7"]),
]


@pytest.mark.parametrize("command,graph,extra", ROUND_TRIPS, ids=[c for c, _, _ in ROUND_TRIPS])
def test_artifact_round_trip(files, tmp_path, capsys, command, graph, extra):
    art = tmp_path / "art.json"
    assert run([command, "--graph", files[graph], "--out", str(art), *extra]) == 0
    obj = json.loads(art.read_text())
    assert "kind" in obj
    capsys.readouterr()
    assert run(["verify", "--graph", files[graph], "--cert", str(art)]) == 0
    report = json.loads(capsys.readouterr().out)
    assert report["ok"]


def test_json_to_stdout_summary_to_stderr(files, capsys):
    assert run(["family", "--graph", files["grid"]]) == 0
    cap = capsys.readouterr()
    assert json.loads(cap.out)["kind"] == "family"
    assert cap.err.strip()


def test_tampered_decomposition_rejected(files, tmp_path, capsys):
    art = tmp_path / "td.json"
    assert run(["treedecomp", "--graph", files["grid"], "--out", str(art)]) == 0
    obj = json.loads(art.read_text())
    obj.pop("family", None)
    victim = max(obj["nodes"], key=lambda t: len(t["bag"]))
    victim["bag"] = victim["bag"][1:]
    art.write_text(json.dumps(obj))
    capsys.readouterr()
    assert run(["verify", "--graph", files["grid"], "--cert", str(art)]) == 1
    assert "rejected" in capsys.readouterr().err


def test_tampered_separator_rejected(files, tmp_path):
    art = tmp_path / "sep.json"
    assert run(["round-ab", "--graph", files["corridor"], "--out", str(art)]) == 0
    obj = json.loads(art.read_text())
    obj["separator"] = []
    art.write_text(json.dumps(obj))
    assert run(["verify", "--graph", files["corridor"], "--cert", str(art)]) == 1


def test_unknown_kind_rejected(files, tmp_path):
    art = tmp_path / "odd.json"
    art.write_text(json.dumps({"kind": "mystery"}))
    assert run(["verify", "--graph", files["grid"], "--cert", str(art)]) == 1
    art.write_text("not json")
    assert run(["verify", "--graph", files["grid"], "--cert", str(art)]) == 1


def test_usage_errors(files, capsys):
    assert run([]) == 64
    assert run(["frobnicate"]) == 64
    assert run(["family"]) == 64
    assert run(["family", "--graph", files["grid"], "--mode", "slow"]) == 64
    assert run(["--help"]) == 0


def test_invalid_inputs(files, tmp_path):
    bad = tmp_path / "bad.txt"
    bad.write_text("0 1\n1 1\n")
    assert run(["family", "--graph", str(bad)]) == 1
    assert run(["family", "--graph", str(tmp_path / "missing.txt")]) == 1
    assert run(["lp-ab", "--graph", files["grid"]]) == 1
    assert run(["menger", "--graph", files["corridor"], "--k", "-1"]) == 1
    assert run(["treedecomp", "--graph", files["grid"], "--pad-cap", "0"]) == 1


def test_short_ell_is_invalid(files):
    assert run(["sample-paths", "--graph", files["corridor"], "--ell", "0.01"]) == 1


@pytest.mark.parametrize("exc", [Inconclusive("budget spent"), SamplingFailure("no luck")])
def test_inconclusive_exit_code(files, monkeypatch, capsys, exc):
    def boom(*_):
        raise exc

    monkeypatch.setitem(HANDLERS, "menger", boom)
    assert run(["menger", "--graph", files["corridor"]]) == 2
    assert "inconclusive" in capsys.readouterr().err


def test_pipeline_survives_tiny_budget(files, capsys):
    # the packing route gives up, the separator route still answers
    assert run(["pipeline-menger", "--graph", files["long"], "--k", "2", "--budget", "1"]) == 0
    assert json.loads(capsys.readouterr().out)["kind"] == "separator"


def test_gen_to_stdout(capsys):
    assert run(["gen", "--theta", "2", "3"]) == 0
    out = capsys.readouterr().out
    assert out.startswith("# n=5\n") and "# A=0" in out


def test_gen_rejects_bad_parameters():
    assert run(["gen", "--grid", "0", "3"]) == 1
    assert run(["gen", "--grid", "3"]) == 64


def test_treedecomp_sampling_branch(files, capsys):
    assert run(["treedecomp", "--graph", files["cycle"], "--branch", "sampling"]) == 0
    obj = json.loads(capsys.readouterr().out)
    assert obj.get("diagnostic")


def test_every_command_has_a_handler():
    assert len(COMMANDS) == 14
    assert set(HANDLERS) | {"gen"} == set(COMMANDS)
