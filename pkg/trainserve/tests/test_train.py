import csv
from pathlib import Path

import pytest

from trainserve.train import TrainConfig, TrainResult, finetune, load_model

FIXTURES = Path(__file__).parent / "fixtures"
TOY = str(FIXTURES / "toy50.txt")


def read_log(path):
    with open(path) as fh:
        rows = list(csv.DictReader(fh))
    return [(float(r["epoch_fraction"]), float(r["loss"])) for r in rows]


def train(tmp_path, **kwargs) -> TrainResult:
    kwargs.setdefault("train_file", TOY)
    kwargs.setdefault("output_dir", str(tmp_path / "model"))
    kwargs.setdefault("epochs", 1)
    kwargs.setdefault("seed", 1)
    return finetune(TrainConfig(**kwargs))


def test_loss_log_written(tmp_path):
    result = train(tmp_path)
    rows = read_log(result.loss_log)
    assert rows, "loss log is empty"
    assert result.steps == len(rows)
    assert rows[-1][0] == 1.0


def test_loss_decreases_within_first_epoch(tmp_path):
    result = train(tmp_path)
    assert result.final_loss < result.first_loss


def test_epoch_boundaries(tmp_path):
    result = train(tmp_path, epochs=3)
    rows = read_log(result.loss_log)
    boundaries = [f for f, _ in rows if f == int(f)]
    assert boundaries == [1.0, 2.0, 3.0]


def test_truncation_counted_and_logged(tmp_path, caplog):
    import logging

    with caplog.at_level(logging.WARNING, logger="trainserve.train"):
        result = train(tmp_path, max_seq_len=10)
    assert result.truncated_examples > 0
    assert any("truncated" in r.message for r in caplog.records)


def test_mask_prompt_loss_variant(tmp_path):
    result = train(tmp_path, mask_prompt_loss=True)
    assert result.final_loss < result.first_loss


def test_saved_model_reloads(tmp_path):
    result = train(tmp_path)
    model, tokenizer, meta = load_model(result.output_dir)
    assert meta["examples"] == 50
    assert model.config.vocab_size == len(tokenizer)


def test_continue_from_saved_model(tmp_path):
    first = train(tmp_path)
    second = finetune(TrainConfig(
        train_file=TOY,
        output_dir=str(tmp_path / "model2"),
        base_model=first.output_dir,
        epochs=1,
        seed=2,
    ))
    assert second.first_loss < 4.0  # warm start, not random init


def test_deterministic_under_seed(tmp_path):
    a = train(tmp_path, output_dir=str(tmp_path / "a"), seed=7)
    b = train(tmp_path, output_dir=str(tmp_path / "b"), seed=7)
    assert read_log(a.loss_log) == read_log(b.loss_log)


def test_bad_epochs_rejected(tmp_path):
    with pytest.raises(ValueError):
        TrainConfig(train_file=TOY, output_dir=str(tmp_path), epochs=0)


def test_missing_base_model(tmp_path):
    with pytest.raises(FileNotFoundError):
        train(tmp_path, base_model=str(tmp_path / "nope"))
