import pytest

from pandering.cli import EXIT_CONFIG, EXIT_DIVERGED, EXIT_OK, main


def write(tmp_path, name, text):
    path = tmp_path / name
    path.write_text(text)
    return str(path)


def run_twice(tmp_path, argv):
    outs = []
    for i in range(2):
        out = tmp_path / f"run{i}.csv"
        assert main([*argv, "--out", str(out)]) == EXIT_OK
        outs.append(out.read_bytes())
    return outs


SMALL = """
system:
  rounds: 5
  strategic_count: 1
train:
  total_training_rounds: 40
  eval_interval: 20
  eval_episodes: 2
  learning_starts: 8
  batch_size: 8
"""


@pytest.mark.parametrize(
    "argv",
    [
        ["eval", "--policy", "greedy", "--seeds", "0-2"],
        ["sweep", "--policy", "random_solver", "--seeds", "0,1"],
        ["train", "--seeds", "0-1"],
    ],
)
def test_byte_identical_reruns(tmp_path, argv):
    cfg = write(tmp_path, "c.yaml", SMALL + "sweep:\n  grid: {beta1: [0.9], strategic_count: [1, 2]}\n")
    a, b = run_twice(tmp_path, [*argv, "--config", cfg])
    assert a == b and a


def test_fig1_rerun(tmp_path):
    cfg = write(tmp_path, "f.yaml", "system: {r: 45, rounds: 1, strategic_count: 1, strategic_kind: malicious}\nfig1: {beta1_grid: [0.9, 1.0]}\n")
    a, b = run_twice(tmp_path, ["fig1", "--config", cfg, "--seeds", "0-2"])
    assert a == b
    # 2 systems x 2 betas x 3 seeds, plus one aggregate per (system, beta)
    assert len(a.decode().splitlines()) == 1 + 12 + 4


def test_train_writes_checkpoint(tmp_path):
    cfg = write(tmp_path, "c.yaml", SMALL)
    ckpt = tmp_path / "model.json"
    assert main(["train", "--config", cfg, "--out", str(tmp_path / "curve.csv"), "--checkpoint", str(ckpt)]) == EXIT_OK
    assert ckpt.exists()
    ev = tmp_path / "eval.csv"
    assert main(["eval", "--config", cfg, "--policy", str(ckpt), "--seeds", "0", "--out", str(ev)]) == EXIT_OK


@pytest.mark.parametrize(
    "text",
    [
        "system: {k: 0}\n",
        "system: {bogus: 1}\n",
        "nonsense: {}\n",
        "train: {batch_size: 0}\n",
        "system: [1, 2\n",
    ],
)
def test_invalid_config_exit_code(tmp_path, text):
    cfg = write(tmp_path, "bad.yaml", text)
    assert main(["eval", "--config", cfg, "--out", str(tmp_path / "o.csv")]) == EXIT_CONFIG


def test_missing_inputs_exit_code(tmp_path):
    out = str(tmp_path / "o.csv")
    assert main(["eval", "--config", str(tmp_path / "none.yaml"), "--out", out]) == EXIT_CONFIG
    assert main(["eval", "--seeds", "x-y", "--out", out]) == EXIT_CONFIG
    assert main(["sweep", "--checkpoints", str(tmp_path), "--seeds", "0", "--out", out]) == EXIT_CONFIG


def test_divergence_exit_code(tmp_path):
    cfg = write(
        tmp_path,
        "div.yaml",
        SMALL.replace("batch_size: 8", "batch_size: 8\n  learning_rate: 1.0e+308\n  max_grad_norm: 0.0"),
    )
    assert main(["train", "--config", cfg, "--out", str(tmp_path / "c.csv")]) == EXIT_DIVERGED
