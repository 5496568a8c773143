"""Labeled-bracket precision/recall/F1 between gold and predicted trees.

Scoring follows the EVALB convention by default: constituents are compared
as (label, start, end) multisets, preterminals are excluded and ``Punct``
spans are ignored.  Both knobs are configurable and echoed into the report,
since published figures rarely state them.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

from corchetes.tree import Tree, extract_spans, yield_tokens

__all__ = ["EvalConfig", "SentenceScore", "EvalReport", "score_pair", "score_corpus"]


class EmptyInput(ValueError):
    pass


@dataclass(frozen=True)
class EvalConfig:
    include_preterminals: bool = False
    ignore_labels: frozenset = frozenset({"Punct"})
    aggregate: str = "micro"  # or "macro"

    def __post_init__(self):
        if self.aggregate not in ("micro", "macro"):
            raise ValueError(f"unknown aggregation {self.aggregate!r}")
        object.__setattr__(self, "ignore_labels", frozenset(self.ignore_labels))


@dataclass(frozen=True)
class SentenceScore:
    matched: int
    gold_count: int
    pred_count: int
    failed: bool = False
    yield_mismatch: bool = False

    @property
    def precision(self) -> float:
        return self.matched / self.pred_count if self.pred_count else 0.0

    @property
    def recall(self) -> float:
        return self.matched / self.gold_count if self.gold_count else 0.0

    @property
    def f1(self) -> float:
        p, r = self.precision, self.recall
        return 2 * p * r / (p + r) if p + r else 0.0


def score_pair(gold: Tree, pred: Tree | None, config: EvalConfig | None = None) -> SentenceScore:
    """Score one prediction against its gold tree.

    ``pred`` is None when the prediction was unparseable; it then scores
    (0, gold_count, 0).  A parseable prediction whose yield length differs
    from the gold's is still scored over each tree's own token offsets, but
    flagged with ``yield_mismatch``.
    """
    config = config or EvalConfig()
    gold_spans = extract_spans(gold, config.include_preterminals, config.ignore_labels)
    gold_count = sum(gold_spans.values())
    if pred is None:
        return SentenceScore(0, gold_count, 0, failed=True)
    pred_spans = extract_spans(pred, config.include_preterminals, config.ignore_labels)
    matched = sum((gold_spans & pred_spans).values())
    mismatch = len(yield_tokens(pred)) != len(yield_tokens(gold))
    return SentenceScore(
        matched, gold_count, sum(pred_spans.values()), yield_mismatch=mismatch
    )


@dataclass
class EvalReport:
    precision: float
    recall: float
    f1: float
    sentences: list = field(default_factory=list)
    failures: int = 0
    config: EvalConfig = field(default_factory=EvalConfig)

    def to_dict(self) -> dict:
        return {
            "precision": self.precision,
            "recall": self.recall,
            "f1": self.f1,
            "sentence_count": len(self.sentences),
            "failures": self.failures,
            "yield_mismatches": sum(1 for s in self.sentences if s.yield_mismatch),
            "config": {
                "include_preterminals": self.config.include_preterminals,
                "ignore_labels": sorted(self.config.ignore_labels),
                "aggregate": self.config.aggregate,
            },
            "sentences": [
                {
                    "matched": s.matched,
                    "gold_count": s.gold_count,
                    "pred_count": s.pred_count,
                    "failed": s.failed,
                    "yield_mismatch": s.yield_mismatch,
                }
                for s in self.sentences
            ],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2)

    def to_table(self, model_name: str = "model") -> str:
        """Aligned plain-text table: model, P, R, F1 (4 decimals), failures."""
        header = f"{'Model':<20} {'Precision':>9} {'Recall':>9} {'F1':>9} {'Fail':>5}"
        row = (
            f"{model_name:<20} {self.precision:>9.4f} {self.recall:>9.4f} "
            f"{self.f1:>9.4f} {self.failures:>5d}"
        )
        return "\n".join([header, "-" * len(header), row])


def _f1(p: float, r: float) -> float:
    return 2 * p * r / (p + r) if p + r else 0.0


def score_corpus(
    pairs: list[tuple[Tree, Tree | None]], config: EvalConfig | None = None
) -> EvalReport:
    """Aggregate sentence scores into a corpus-level report.

    Micro aggregation (default) sums matched/gold/pred counts over the
    corpus; macro averages per-sentence P and R instead.
    """
    config = config or EvalConfig()
    if not pairs:
        raise EmptyInput("no (gold, prediction) pairs to score")
    scores = [score_pair(g, p, config) for g, p in pairs]
    if config.aggregate == "micro":
        matched = sum(s.matched for s in scores)
        gold = sum(s.gold_count for s in scores)
        pred = sum(s.pred_count for s in scores)
        precision = matched / pred if pred else 0.0
        recall = matched / gold if gold else 0.0
    else:
        precision = sum(s.precision for s in scores) / len(scores)
        recall = sum(s.recall for s in scores) / len(scores)
    return EvalReport(
        precision=precision,
        recall=recall,
        f1=_f1(precision, recall),
        sentences=scores,
        failures=sum(1 for s in scores if s.failed),
        config=config,
    )
