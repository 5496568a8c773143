"""Reading the two-line training format: ``<s>sentence</s>`` then
``<s>analysis</s>``, one pair per example."""

from __future__ import annotations

__all__ = ["MalformedTrainingFile", "read_training_file"]


class MalformedTrainingFile(ValueError):
    pass


def _unwrap(line: str, lineno: int) -> str:
    if not (line.startswith("<s>") and line.endswith("</s>")):
        raise MalformedTrainingFile(
            f"line {lineno} is not wrapped in <s>...</s>: {line[:60]!r}"
        )
    return line[len("<s>"):-len("</s>")].strip()


def read_training_file(path: str) -> list[tuple[str, str]]:
    """(sentence, analysis) pairs; raises MalformedTrainingFile on empty
    input, odd line counts, or missing markers."""
    with open(path, encoding="utf-8") as fh:
        lines = [(i, line.strip()) for i, line in enumerate(fh, 1) if line.strip()]
    if not lines:
        raise MalformedTrainingFile(f"{path} contains no training lines")
    if len(lines) % 2:
        raise MalformedTrainingFile(
            f"{path} has {len(lines)} non-empty lines; pairs expected"
        )
    pairs = []
    for (i, sent_line), (j, gold_line) in zip(lines[::2], lines[1::2]):
        pairs.append((_unwrap(sent_line, i), _unwrap(gold_line, j)))
    return pairs
