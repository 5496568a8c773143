"""Word-level tokenizer for the bracket-analysis task.

The training text is whitespace-tokenizable by construction (bracket trees
serialize with single spaces), so a word-level vocabulary is enough and
keeps the tiny models genuinely tiny.  The ``<s>``/``</s>`` markers are
split off even when glued to adjacent text.
"""

from __future__ import annotations

import json
from pathlib import Path
from typing import Iterable

__all__ = ["WordTokenizer"]

PAD, UNK, BOS, EOS = "<pad>", "<unk>", "<s>", "</s>"
SPECIALS = [PAD, UNK, BOS, EOS]
VOCAB_FILE = "vocab.json"


def words_of(text: str) -> list[str]:
    spaced = text.replace("<s>", " <s> ").replace("</s>", " </s> ")
    return spaced.split()


class WordTokenizer:
    def __init__(self, vocab: dict[str, int]):
        self.vocab = dict(vocab)
        self.inverse = {i: t for t, i in self.vocab.items()}
        for i, special in enumerate(SPECIALS):
            if self.vocab.get(special) != i:
                raise ValueError(f"vocabulary must map {special!r} to {i}")
        self.pad_id, self.unk_id, self.bos_id, self.eos_id = range(4)

    @classmethod
    def build(cls, texts: Iterable[str]) -> "WordTokenizer":
        seen = set()
        for text in texts:
            seen.update(words_of(text))
        vocab = {special: i for i, special in enumerate(SPECIALS)}
        for word in sorted(seen - set(SPECIALS)):
            vocab[word] = len(vocab)
        return cls(vocab)

    def __len__(self) -> int:
        return len(self.vocab)

    def encode(self, text: str) -> list[int]:
        return [self.vocab.get(w, self.unk_id) for w in words_of(text)]

    def decode_continuation(self, ids: Iterable[int]) -> str:
        """Text for generated ids: stops at the first end marker and skips
        padding/begin markers."""
        out = []
        for i in ids:
            if i == self.eos_id:
                break
            if i in (self.pad_id, self.bos_id):
                continue
            out.append(self.inverse.get(i, UNK))
        return " ".join(out)

    def save(self, model_dir: str) -> None:
        path = Path(model_dir) / VOCAB_FILE
        path.write_text(
            json.dumps(self.vocab, ensure_ascii=False, indent=0) + "\n", "utf-8"
        )

    @classmethod
    def load(cls, model_dir: str) -> "WordTokenizer":
        path = Path(model_dir) / VOCAB_FILE
        return cls(json.loads(path.read_text("utf-8")))
