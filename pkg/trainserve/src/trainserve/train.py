"""Causal-LM fine-tuning over two-line training examples.

Each (sentence, analysis) pair becomes one sequence
``<s> sentence </s> <s> analysis </s>`` and the model is trained with the
standard next-token objective.  ``mask_prompt_loss`` restricts the loss to
the analysis half, since it is unclear which variant works better for a
given model; both are supported.  Per-step losses go to a CSV log
(epoch_fraction, loss) whose integral fractions mark epoch boundaries.
"""

from __future__ import annotations

import json
import logging
import random
from dataclasses import dataclass
from pathlib import Path

import torch
import transformers
from transformers import GPT2Config, GPT2LMHeadModel

from trainserve.data import read_training_file
from trainserve.vocab import WordTokenizer

__all__ = ["TrainConfig", "TrainResult", "finetune", "load_model"]

log = logging.getLogger(__name__)

transformers.logging.set_verbosity_error()
transformers.logging.disable_progress_bar()

META_FILE = "trainserve.json"
LOSS_LOG = "loss_log.csv"

TINY = "tiny"
_TINY_DIMS = dict(n_embd=64, n_layer=2, n_head=2)


@dataclass(frozen=True)
class TrainConfig:
    train_file: str
    output_dir: str
    base_model: str = TINY  # "tiny" or a directory saved by this shim
    epochs: int = 5
    max_seq_len: int = 256
    learning_rate: float = 5e-4
    batch_size: int = 8
    seed: int = 0
    mask_prompt_loss: bool = False

    def __post_init__(self):
        if self.epochs < 1:
            raise ValueError("epochs must be >= 1")
        if self.max_seq_len < 8:
            raise ValueError("max_seq_len too small")


@dataclass(frozen=True)
class TrainResult:
    output_dir: str
    loss_log: str
    steps: int
    first_loss: float
    final_loss: float
    truncated_examples: int


def load_model(model_dir: str) -> tuple[GPT2LMHeadModel, WordTokenizer, dict]:
    path = Path(model_dir)
    if not (path / META_FILE).exists():
        raise FileNotFoundError(f"{model_dir} is not a saved trainserve model")
    meta = json.loads((path / META_FILE).read_text("utf-8"))
    tokenizer = WordTokenizer.load(model_dir)
    model = GPT2LMHeadModel.from_pretrained(model_dir)
    model.eval()
    return model, tokenizer, meta


def _encode_pairs(pairs, tokenizer, max_seq_len):
    sequences, prompt_lens, truncated = [], [], 0
    for sentence, analysis in pairs:
        ids = (
            [tokenizer.bos_id]
            + tokenizer.encode(sentence)
            + [tokenizer.eos_id, tokenizer.bos_id]
            + tokenizer.encode(analysis)
            + [tokenizer.eos_id]
        )
        prompt_len = 3 + len(tokenizer.encode(sentence))  # through 2nd <s>
        if len(ids) > max_seq_len:
            ids = ids[:max_seq_len]
            truncated += 1
        sequences.append(ids)
        prompt_lens.append(min(prompt_len, len(ids)))
    return sequences, prompt_lens, truncated


def finetune(cfg: TrainConfig) -> TrainResult:
    """Train, write the loss log, and save the model directory."""
    pairs = read_training_file(cfg.train_file)
    torch.manual_seed(cfg.seed)
    rng = random.Random(cfg.seed)

    if cfg.base_model == TINY:
        tokenizer = WordTokenizer.build(
            text for pair in pairs for text in pair
        )
        config = GPT2Config(
            vocab_size=len(tokenizer),
            n_positions=cfg.max_seq_len,
            bos_token_id=tokenizer.bos_id,
            eos_token_id=tokenizer.eos_id,
            pad_token_id=tokenizer.pad_id,
            **_TINY_DIMS,
        )
        model = GPT2LMHeadModel(config)
    else:
        model, tokenizer, _ = load_model(cfg.base_model)
        model.train()

    sequences, prompt_lens, truncated = _encode_pairs(
        pairs, tokenizer, cfg.max_seq_len
    )
    if truncated:
        log.warning(
            "%d of %d examples exceed max_seq_len=%d and were truncated",
            truncated, len(sequences), cfg.max_seq_len,
        )

    out_dir = Path(cfg.output_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    optimizer = torch.optim.AdamW(model.parameters(), lr=cfg.learning_rate)
    model.train()

    losses: list[tuple[float, float]] = []
    order = list(range(len(sequences)))
    for epoch in range(cfg.epochs):
        rng.shuffle(order)
        batches = [
            order[i : i + cfg.batch_size]
            for i in range(0, len(order), cfg.batch_size)
        ]
        for b, batch in enumerate(batches):
            width = max(len(sequences[i]) for i in batch)
            input_ids = torch.full(
                (len(batch), width), tokenizer.pad_id, dtype=torch.long
            )
            attention = torch.zeros((len(batch), width), dtype=torch.long)
            labels = torch.full((len(batch), width), -100, dtype=torch.long)
            for row, i in enumerate(batch):
                seq = torch.tensor(sequences[i], dtype=torch.long)
                input_ids[row, : len(seq)] = seq
                attention[row, : len(seq)] = 1
                labels[row, : len(seq)] = seq
                if cfg.mask_prompt_loss:
                    labels[row, : prompt_lens[i]] = -100
            out = model(
                input_ids=input_ids, attention_mask=attention, labels=labels
            )
            optimizer.zero_grad()
            out.loss.backward()
            optimizer.step()
            fraction = epoch + (b + 1) / len(batches)
            losses.append((fraction, out.loss.item()))

    log_path = out_dir / LOSS_LOG
    with open(log_path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("epoch_fraction,loss\n")
        for fraction, loss in losses:
            fh.write(f"{fraction!r},{loss!r}\n")

    model.eval()
    model.save_pretrained(out_dir)
    tokenizer.save(str(out_dir))
    meta = {
        "base_model": cfg.base_model,
        "epochs": cfg.epochs,
        "seed": cfg.seed,
        "max_seq_len": cfg.max_seq_len,
        "mask_prompt_loss": cfg.mask_prompt_loss,
        "examples": len(sequences),
        "truncated_examples": truncated,
        "final_loss": losses[-1][1],
    }
    (out_dir / META_FILE).write_text(json.dumps(meta, indent=2) + "\n", "utf-8")
    return TrainResult(
        output_dir=str(out_dir),
        loss_log=str(log_path),
        steps=len(losses),
        first_loss=losses[0][1],
        final_loss=losses[-1][1],
        truncated_examples=truncated,
    )
