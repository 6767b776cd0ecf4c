import json

import pytest

from triagelab.cli import dispatch
from triagelab.minicorpus import MiniCorpusSpec, generate, write_jsonl
from triagelab.solver import AssignmentInstance, InstanceBug

SMALL = MiniCorpusSpec(
    seed=3,
    boundary_day=120,
    end_day=240,
    train_start=1,
    train_stop=115,
    test_start=121,
    test_stop=200,
    expert_own_fixes=10,
    generalist_fixes_per_topic=4,
    inactive_fixes=3,
    test_rate_per_topic=0.1,
    blocked_fraction=0.15,
)


@pytest.fixture(scope="module")
def workdir(tmp_path_factory):
    root = tmp_path_factory.mktemp("cli")
    data = root / "bugs.jsonl"
    write_jsonl(generate(SMALL), data)
    out = root / "out"
    args = ["--data", str(data), "--boundary", "120", "--out", str(out)]
    assert dispatch(["prepare"] + args) == 0
    assert dispatch(["train"] + args + ["--topics", "4", "--lda-iters", "60"]) == 0
    return root, data, out, args


def test_validate_ok(workdir, capsys):
    _, data, _, _ = workdir
    assert dispatch(["validate", str(data)]) == 0
    assert "ok:" in capsys.readouterr().out


def test_prepare_wrote_artifacts(workdir):
    _, _, out, _ = workdir
    summary = json.loads((out / "summary.json").read_text())
    assert summary["counts_by_step"][0] >= summary["counts_by_step"][-1]
    assert (out / "cleaning_log.csv").read_text().startswith("step,kept_count")
    assert (out / "dev_profiles.json").exists()


def test_train_wrote_model_artifacts(workdir):
    _, _, out, _ = workdir
    for name in ("vocabulary.json", "classifier.json", "topic_model.json",
                 "cost_matrix.json"):
        assert (out / name).exists(), name


def test_simulate_and_report(workdir, capsys):
    _, _, out, args = workdir
    for policy in ("dabt", "cbr"):
        code = dispatch(
            ["simulate"] + args + ["--policy", policy, "--end", "240"]
        )
        assert code == 0
    capsys.readouterr()
    code = dispatch(
        ["report"] + args
        + [str(out / "result_dabt_a0.5.json"), str(out / "result_cbr_a0.5.json")]
    )
    assert code == 0
    assert "% overdue bugs" in capsys.readouterr().out
    assert (out / "comparison.csv").exists()


def test_simulate_reruns_identically(workdir):
    _, _, out, args = workdir
    dispatch(["simulate"] + args + ["--policy", "dabt", "--end", "240"])
    first = (out / "result_dabt_a0.5.json").read_bytes()
    dispatch(["simulate"] + args + ["--policy", "dabt", "--end", "240"])
    assert (out / "result_dabt_a0.5.json").read_bytes() == first


def test_sweep(workdir):
    _, _, out, args = workdir
    assert dispatch(["sweep"] + args + ["--alphas", "0,1", "--end", "240"]) == 0
    lines = (out / "sweep.csv").read_text().strip().splitlines()
    assert lines[0] == "alpha,accuracy_pct,pct_overdue"
    assert len(lines) == 3


def test_env_var_override(workdir, monkeypatch, capsys):
    _, _, out, args = workdir
    monkeypatch.setenv("TRIAGELAB_POLICY", "rabt")
    assert dispatch(["simulate"] + args + ["--end", "240"]) == 0
    assert "rabt:" in capsys.readouterr().out


def test_solve_subcommand(tmp_path, capsys):
    inst = AssignmentInstance(
        bugs=[InstanceBug(1, (1.0,), (2.0,))], developers=[(7, 5.0)], alpha=1.0
    )
    path = tmp_path / "instance.json"
    path.write_text(inst.to_json())
    assert dispatch(["solve", str(path)]) == 0
    obj = json.loads(capsys.readouterr().out)
    assert obj["assignments"] == [[1, 7]]
    assert dispatch(["solve", str(path), "--variant", "oracle"]) == 0


def test_unknown_subcommand_exits_2(capsys):
    assert dispatch(["frobnicate"]) == 2
    assert dispatch(["simulate", "--no-such-flag"]) == 2


def test_missing_data_is_clean_error(tmp_path, capsys):
    code = dispatch(["simulate", "--data", str(tmp_path / "nope.jsonl"),
                     "--boundary", "10", "--out", str(tmp_path / "out")])
    assert code == 1
    assert "error:" in capsys.readouterr().err


def test_missing_artifacts_suggest_train(workdir, tmp_path, capsys):
    _, data, _, _ = workdir
    code = dispatch(["simulate", "--data", str(data), "--boundary", "120",
                     "--out", str(tmp_path / "empty")])
    assert code == 1
    assert "train" in capsys.readouterr().err
