"""Square-bracket constituency trees.

A tree is written as ``[Label element ...]`` where each element is either a
nested ``[...]`` constituent or a bare surface token.  Labels and tokens may
not contain whitespace or bracket characters.  A constituent may freely mix
token children and constituent children, so ``[N England and Germany]`` is a
single node with three leaf tokens.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass
from typing import Iterable, Iterator, Union

__all__ = [
    "Tree",
    "Child",
    "LabeledSpan",
    "BracketParseError",
    "UnbalancedBrackets",
    "EmptyConstituent",
    "MissingLabel",
    "StrayToken",
    "parse_bracketed",
    "serialize",
    "yield_tokens",
    "extract_spans",
]

_FORBIDDEN = set("[]")


class BracketParseError(ValueError):
    """Malformed bracket notation; ``position`` is a character offset."""

    def __init__(self, message: str, position: int):
        super().__init__(f"{message} (at char {position})")
        self.position = position


class UnbalancedBrackets(BracketParseError):
    pass


class EmptyConstituent(BracketParseError):
    pass


class MissingLabel(BracketParseError):
    pass


class StrayToken(BracketParseError):
    pass


def _check_symbol(text: str, kind: str) -> None:
    if not text:
        raise ValueError(f"empty {kind}")
    if any(c in _FORBIDDEN or c.isspace() for c in text):
        raise ValueError(f"{kind} {text!r} contains whitespace or brackets")


class Tree:
    """An immutable labeled constituent; children are sub-trees or tokens."""

    __slots__ = ("_label", "_children")

    def __init__(self, label: str, children: Iterable[Union["Tree", str]]):
        _check_symbol(label, "label")
        kids = tuple(children)
        if not kids:
            raise ValueError(f"constituent {label!r} has no children")
        for child in kids:
            if isinstance(child, str):
                _check_symbol(child, "token")
            elif not isinstance(child, Tree):
                raise TypeError(f"bad child {child!r}")
        self._label = label
        self._children = kids

    @property
    def label(self) -> str:
        return self._label

    @property
    def children(self) -> tuple[Union["Tree", str], ...]:
        return self._children

    def is_preterminal(self) -> bool:
        """True when every child is a surface token."""
        return all(isinstance(c, str) for c in self._children)

    def subtrees(self) -> Iterator["Tree"]:
        """Pre-order iteration over all constituent nodes."""
        yield self
        for child in self._children:
            if isinstance(child, Tree):
                yield from child.subtrees()

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Tree):
            return NotImplemented
        return self._label == other._label and self._children == other._children

    def __hash__(self) -> int:
        return hash((self._label, self._children))

    def __repr__(self) -> str:
        return f"Tree.from_str({serialize(self)!r})"

    @staticmethod
    def from_str(text: str) -> "Tree":
        return parse_bracketed(text)

    def __str__(self) -> str:
        return serialize(self)


Child = Union[Tree, str]


@dataclass(frozen=True, order=True)
class LabeledSpan:
    """A constituent identity: label over the token range [start, end)."""

    label: str
    start: int
    end: int

    def __post_init__(self):
        if not (0 <= self.start < self.end):
            raise ValueError(f"bad span {self.label} [{self.start}, {self.end})")


def _lex(text: str) -> Iterator[tuple[str, int]]:
    i, n = 0, len(text)
    while i < n:
        c = text[i]
        if c.isspace():
            i += 1
        elif c in "[]":
            yield c, i
            i += 1
        else:
            j = i
            while j < n and text[j] not in "[]" and not text[j].isspace():
                j += 1
            yield text[i:j], i
            i = j


def parse_bracketed(text: str) -> Tree:
    """Read one complete bracketed expression into a Tree.

    Raises UnbalancedBrackets, EmptyConstituent, MissingLabel or StrayToken
    on malformed input; surrounding whitespace is ignored.
    """
    # stack frames: [label or None, children list, position of the '[' ]
    stack: list[list] = []
    root: Tree | None = None
    for tok, pos in _lex(text):
        if root is not None:
            if tok == "]":
                raise UnbalancedBrackets("closing bracket after complete tree", pos)
            raise StrayToken(f"content {tok!r} outside brackets", pos)
        if tok == "[":
            stack.append([None, [], pos])
        elif tok == "]":
            if not stack:
                raise UnbalancedBrackets("unmatched closing bracket", pos)
            label, children, open_pos = stack.pop()
            if label is None and not children:
                raise EmptyConstituent("constituent has no label or content", open_pos)
            if label is None:
                raise MissingLabel("constituent has no label", open_pos)
            if not children:
                raise EmptyConstituent(f"constituent {label!r} is empty", open_pos)
            node = Tree(label, children)
            if stack:
                stack[-1][1].append(node)
            else:
                root = node
        else:
            if not stack:
                raise StrayToken(f"token {tok!r} outside brackets", pos)
            frame = stack[-1]
            if frame[0] is None:
                frame[0] = tok
            else:
                frame[1].append(tok)
    if stack:
        raise UnbalancedBrackets("unclosed bracket", stack[-1][2])
    if root is None:
        raise UnbalancedBrackets("no bracketed expression found", 0)
    return root


def serialize(tree: Tree) -> str:
    """Render a Tree in canonical form: single spaces, no extra padding."""
    parts = [
        serialize(child) if isinstance(child, Tree) else child
        for child in tree.children
    ]
    return f"[{tree.label} {' '.join(parts)}]"


def yield_tokens(tree: Tree) -> list[str]:
    """The left-to-right sequence of surface tokens (the sentence)."""
    out: list[str] = []
    for child in tree.children:
        if isinstance(child, str):
            out.append(child)
        else:
            out.extend(yield_tokens(child))
    return out


def extract_spans(
    tree: Tree,
    include_preterminals: bool = True,
    ignore_labels: Iterable[str] = (),
) -> Counter:
    """Multiset of LabeledSpans, one per constituent node.

    Preterminals (nodes whose children are all tokens) are kept only when
    ``include_preterminals`` is set; nodes whose label is in
    ``ignore_labels`` are dropped.  Token offsets are not affected by either
    filter.  Duplicate (label, start, end) triples keep their multiplicity.
    """
    ignored = frozenset(ignore_labels)
    spans: Counter = Counter()

    def walk(node: Tree, start: int) -> int:
        i = start
        for child in node.children:
            if isinstance(child, str):
                i += 1
            else:
                i = walk(child, i)
        if node.label not in ignored and (
            include_preterminals or not node.is_preterminal()
        ):
            spans[LabeledSpan(node.label, start, i)] += 1
        return i

    walk(tree, 0)
    return spans
