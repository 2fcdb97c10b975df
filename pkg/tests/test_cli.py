import json

import pytest

from distlab import cli

BUNDLED = ["--families0", "bundled:example21_h0", "--families1", "bundled:example21_h1"]


def run(args, out):
    return cli.main(args + ["--out", str(out)])


def data_files(path):
    return {p.name: p.read_bytes() for p in sorted(path.iterdir()) if p.name != "summary.json"}


def test_kraft_on_bundled_fixtures_is_byte_identical(tmp_path):
    assert run(["kraft", *BUNDLED, "--seed", "3"], tmp_path / "a") == 0
    assert run(["kraft", *BUNDLED, "--seed", "3"], tmp_path / "b") == 0
    assert data_files(tmp_path / "a") == data_files(tmp_path / "b")
    verdict = json.loads((tmp_path / "a" / "verdict.json").read_text())
    assert verdict["kind"] == "IndistinguishableCertificate"


def test_summary_contents(tmp_path):
    assert run(["kraft", *BUNDLED, "--seed", "3"], tmp_path) == 0
    summary = json.loads((tmp_path / "summary.json").read_text())
    assert summary["seed"] == 3
    assert summary["version"]
    assert summary["wall_clock_seconds"] >= 0
    assert summary["config"]["families0"] == "bundled:example21_h0"
    assert all(summary["invariants"].values())


def test_zero_replicas_is_usage_error(tmp_path, capsys):
    with pytest.raises(SystemExit) as exc:
        run(["partition", *BUNDLED, "--replicas", "0"], tmp_path)
    assert exc.value.code == 2


def test_missing_file_is_usage_error(tmp_path):
    assert run(["kraft", "--families0", str(tmp_path / "nope.json"), "--families1", "x.json"], tmp_path) == 2


def test_malformed_config_reports_line(tmp_path, capsys):
    cfg = tmp_path / "cfg.json"
    cfg.write_text('{\n  "n": "10,20",\n  "replicas" 5\n}\n')
    assert run(["partition", *BUNDLED, "--config", str(cfg)], tmp_path / "o") == 2
    assert f"{cfg}:3:" in capsys.readouterr().err


def test_config_file_supplies_defaults(tmp_path):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"n": "10,20,40", "max_k": 2}))
    assert run(["partition", *BUNDLED, "--config", str(cfg), "--replicas", "500"], tmp_path / "o") == 0
    rows = (tmp_path / "o" / "errors.csv").read_text().splitlines()
    assert [r.split(",")[0] for r in rows[1:]] == ["10", "20", "40"]


def test_unknown_config_key(tmp_path):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"bogus": 1}))
    assert run(["kraft", *BUNDLED, "--config", str(cfg)], tmp_path / "o") == 2


def test_seed_from_environment(tmp_path, monkeypatch):
    monkeypatch.setenv("DISTLAB_SEED", "17")
    assert run(["poisson", "tailbound", "--n", "2", "--replicas", "100"], tmp_path) == 0
    assert json.loads((tmp_path / "summary.json").read_text())["seed"] == 17


def test_thread_count_does_not_change_output(tmp_path):
    base = ["partition", *BUNDLED, "--n", "10,20,40", "--replicas", "9000", "--seed", "1"]
    assert run(base + ["--threads", "1"], tmp_path / "a") == 0
    assert run(base + ["--threads", "3"], tmp_path / "b") == 0
    assert data_files(tmp_path / "a") == data_files(tmp_path / "b")


def test_invariant_failure_exit_code(tmp_path, monkeypatch):
    from distlab import poisson

    monkeypatch.setattr(poisson, "poisson_tail_bound", lambda mu, d, n: 0.0)
    assert run(["poisson", "tailbound", "--n", "2", "--replicas", "1000"], tmp_path) == 3


@pytest.mark.parametrize("args, name", [
    (["poisson", "identity", "--replicas", "1000", "--n-cells", "64"], "identity.csv"),
    (["poisson", "collapse", "--n", "2", "--m-values", "5,10", "--n-cells", "64", "--replicas", "2000"],
     "collapse.csv"),
    (["deconv", *BUNDLED, "--kernel", "gauss:0.02"], "decision.json"),
    (["discern", *BUNDLED, "--truth", "F1:0", "--nmax", "200", "--replicas", "300"], "tail.csv"),
    (["gaussian", "--model", "hetero", "--scales", "0.5,1,2", "--epsilon-grid", "1,0.3"], "errors.csv"),
    (["example21", "--n-cells", "1024", "--max-i", "8", "--m", "8"], "dichotomy.csv"),
])
def test_subcommands_write_outputs(tmp_path, args, name):
    assert run(args + ["--replicas", "1000"] if "--replicas" not in args else args, tmp_path) == 0
    assert (tmp_path / name).exists() and (tmp_path / "summary.json").exists()


def test_acceptance_subcommand_subset(tmp_path, capsys):
    assert run(["acceptance", "--only", "5,9"], tmp_path) == 0
    out = capsys.readouterr().out
    assert "criterion  5 [PASS]" in out and "criterion  9 [PASS]" in out
