"""Normalization of raw model generations into parseable bracket strings.

Free generation goes wrong in predictable ways: sentence markers leak into
the output, the model keeps writing after the tree is complete, or it stops
before closing all brackets.  ``repair`` applies a fixed sequence of
conservative fixes and reports which ones fired; failure is a value, never
an exception.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field

from corchetes.tree import BracketParseError, Tree, parse_bracketed, yield_tokens

__all__ = ["RepairOutcome", "AlignmentDiagnostics", "repair", "check_alignment"]

MARKER_STRIP = "marker-strip"
TRUNCATE = "truncate"
BRACKET_CLOSURE = "bracket-closure"
EMPTY_PRUNE = "empty-prune"

_MARKER_RE = re.compile(r"</?s>")
# a constituent with no content: "[]", "[ ]", "[label]", "[ label ]"
_EMPTY_RE = re.compile(r"\[\s*(?:[^\[\]\s]+)?\s*\]")


@dataclass(frozen=True)
class RepairOutcome:
    repaired: str | None
    actions: tuple[str, ...] = ()
    fatal: bool = False


def _parses(text: str) -> bool:
    try:
        parse_bracketed(text)
        return True
    except BracketParseError:
        return False


def repair(raw: str) -> RepairOutcome:
    """Normalize one raw generation into a parseable bracket string.

    Fixes are applied in order: strip ``<s>``/``</s>`` markers and anything
    before the first ``[``; truncate where the bracket depth first returns
    to zero; append closing brackets if the text ran out early; delete empty
    constituents.  If no ``[`` exists or the result still fails to parse,
    the outcome is fatal.  Input that already parses is returned untouched.
    """
    text = raw.strip()
    if _parses(text):
        return RepairOutcome(text)

    actions: list[str] = []
    without_markers = _MARKER_RE.sub(" ", text)
    first = without_markers.find("[")
    if first < 0:
        if _MARKER_RE.search(text):
            actions.append(MARKER_STRIP)
        return RepairOutcome(None, tuple(actions), fatal=True)
    if _MARKER_RE.search(text) or without_markers[:first].strip():
        actions.append(MARKER_STRIP)
    body = without_markers[first:]

    # scan for the point where the top-level bracket closes
    depth = 0
    balanced_end = None
    for i, c in enumerate(body):
        if c == "[":
            depth += 1
        elif c == "]":
            depth -= 1
            if depth == 0:
                balanced_end = i + 1
                break
    if balanced_end is not None:
        if body[balanced_end:].strip():
            actions.append(TRUNCATE)
        body = body[:balanced_end]
    elif depth > 0:
        body = body + "]" * depth
        actions.append(BRACKET_CLOSURE)

    if not _parses(body):
        pruned = body
        while True:
            replaced = _EMPTY_RE.sub(" ", pruned)
            if replaced == pruned:
                break
            pruned = replaced
        if pruned != body:
            actions.append(EMPTY_PRUNE)
            body = pruned.strip()

    if not body or not _parses(body):
        return RepairOutcome(None, tuple(actions), fatal=True)
    return RepairOutcome(body, tuple(actions))


@dataclass(frozen=True)
class AlignmentDiagnostics:
    missing: tuple[str, ...] = ()  # in the sentence but not the tree
    extra: tuple[str, ...] = ()  # in the tree but not the sentence
    reordered: bool = False

    def ok(self) -> bool:
        return not (self.missing or self.extra or self.reordered)


def check_alignment(tree: Tree, sentence: str, tok_rule=None) -> AlignmentDiagnostics:
    """Compare the tree's yield against the sentence's own segmentation.

    Purely advisory: scoring proceeds regardless of what this reports.
    ``tok_rule`` maps a sentence to its token list (default: whitespace).
    """
    tok_rule = tok_rule or str.split
    want = tok_rule(sentence)
    got = yield_tokens(tree)
    from collections import Counter

    want_counts, got_counts = Counter(want), Counter(got)
    missing = sorted((want_counts - got_counts).elements())
    extra = sorted((got_counts - want_counts).elements())
    return AlignmentDiagnostics(
        missing=tuple(missing),
        extra=tuple(extra),
        reordered=not missing and not extra and want != got,
    )
