"""PCFG induction from a bracketed treebank, with CNF binarization.

Binarization is right-factored with horizontal Markovization: a node with
children B C D (order 1) becomes ``[A B [A|<C> C D]]``.  Unary chains are
collapsed into composite labels (``A+B``), and token children of non-unary
nodes are wrapped in artificial single-leaf preterminals (``A|T``) so every
node ends up with exactly two constituent children or one leaf.  The three
markers ``|<...>``, ``|T`` and ``+`` make the transform exactly invertible,
which is why input labels may not contain ``|`` or ``+``.
"""

from __future__ import annotations

import math
import re
from collections import Counter
from dataclasses import dataclass, field
from typing import Iterable, Mapping

from corchetes.tree import Tree

__all__ = [
    "Pcfg",
    "EmptyTreebank",
    "MalformedIntermediateLabel",
    "binarize",
    "debinarize",
    "induce_grammar",
    "unk_signature",
    "save_grammar",
    "load_grammar",
]

_INTERMEDIATE_RE = re.compile(r"^(?P<parent>[^|]+)\|<[^<>]*>$")
_WRAPPER_SUFFIX = "|T"
_SIGNATURE_RE = re.compile(r"^<unk(-[a-z0-9]+)*>$")

PROB_TOLERANCE = 1e-9


class EmptyTreebank(ValueError):
    pass


class MalformedIntermediateLabel(ValueError):
    pass


def _is_intermediate(label: str) -> bool:
    return _INTERMEDIATE_RE.match(label) is not None


def _is_wrapper(label: str) -> bool:
    return label.endswith(_WRAPPER_SUFFIX)


def _check_plain_label(label: str) -> None:
    if "|" in label or "+" in label:
        raise ValueError(
            f"label {label!r} contains a reserved binarization character (| or +)"
        )


def binarize(tree: Tree, order: int = 2) -> Tree:
    """Transform a tree into CNF shape.

    Every node of the result has exactly two constituent children or is a
    preterminal with a single leaf.  ``order`` bounds how many upcoming
    sibling labels an intermediate node remembers.
    """
    if order < 0:
        raise ValueError("markovization order must be >= 0")

    def convert(node: Tree) -> Tree:
        _check_plain_label(node.label)
        # collapse unary constituent chains into one composite label
        label = node.label
        while len(node.children) == 1 and isinstance(node.children[0], Tree):
            node = node.children[0]
            _check_plain_label(node.label)
            label = f"{label}+{node.label}"

        kids = node.children
        if len(kids) == 1:  # a single token: already a CNF preterminal
            return Tree(label, kids)

        converted: list[Tree] = []
        for child in kids:
            if isinstance(child, str):
                converted.append(Tree(f"{label}{_WRAPPER_SUFFIX}", [child]))
            else:
                converted.append(convert(child))

        # right factorization: peel children off the front, naming each
        # intermediate after the next `order` labels still to generate
        def build(items: list[Tree]) -> list[Tree]:
            if len(items) <= 2:
                return items
            rest = build(items[1:])
            tag = _sibling_tag(items[1:], order)
            return [items[0], Tree(f"{label}|<{tag}>", rest)]

        return Tree(label, build(converted))

    return convert(tree)


def _sibling_tag(upcoming: list[Tree], order: int) -> str:
    return "-".join(t.label for t in upcoming[:order])


def debinarize(tree: Tree) -> Tree:
    """Exact inverse of binarize on its image; flat trees pass through."""
    if _is_intermediate(tree.label) or _is_wrapper(tree.label):
        raise MalformedIntermediateLabel(
            f"artificial label {tree.label!r} cannot be a root"
        )

    def gather(node: Tree) -> list:
        out: list = []
        for child in node.children:
            if isinstance(child, Tree) and _is_intermediate(child.label):
                out.extend(gather(child))
            else:
                out.append(child)
        return out

    def restore(node: Tree) -> Tree:
        children: list = []
        for child in gather(node):
            if isinstance(child, str):
                children.append(child)
            elif _is_wrapper(child.label):
                if len(child.children) != 1 or not isinstance(child.children[0], str):
                    raise MalformedIntermediateLabel(
                        f"token wrapper {child.label!r} must hold one token"
                    )
                children.append(child.children[0])
            elif _is_intermediate(child.label):  # only reachable via bad nesting
                raise MalformedIntermediateLabel(child.label)
            else:
                children.append(restore(child))
        parts = node.label.split("+")
        if any(not p for p in parts) or any("|" in p for p in parts):
            raise MalformedIntermediateLabel(f"cannot expand label {node.label!r}")
        result = Tree(parts[-1], children)
        for part in reversed(parts[:-1]):
            result = Tree(part, [result])
        return result

    return restore(tree)


def unk_signature(token: str) -> str:
    """Word-shape class for rare tokens: capitalization, digits, suffix."""
    feats = []
    if token[:1].isupper():
        feats.append("cap")
    if any(c.isdigit() for c in token):
        feats.append("num")
    suffix = ""
    for c in reversed(token):
        if not c.isalpha() or len(suffix) == 2:
            break
        suffix = c.lower() + suffix
    if suffix:
        feats.append(suffix)
    inner = "".join(f"-{f}" for f in feats)
    return f"<unk{inner}>"


@dataclass(frozen=True)
class Pcfg:
    """A CNF probabilistic grammar: binary rules A -> B C and lexical rules
    A -> token, with log-probabilities normalized per left-hand side."""

    start: str
    binary: Mapping[tuple[str, str, str], float]  # (A, B, C) -> logprob
    lexical: Mapping[tuple[str, str], float]  # (A, token) -> logprob
    unk_threshold: int = 0
    validate: bool = True

    def __post_init__(self):
        object.__setattr__(self, "binary", dict(self.binary))
        object.__setattr__(self, "lexical", dict(self.lexical))
        if self.validate:
            for rule, logp in list(self.binary.items()) + list(self.lexical.items()):
                if logp > 1e-12:
                    raise ValueError(f"rule {rule} has log-probability {logp} > 0")
            sums = self.lhs_probability_sums()
            for lhs, total in sums.items():
                if abs(total - 1.0) > PROB_TOLERANCE:
                    raise ValueError(
                        f"probabilities for {lhs!r} sum to {total}, not 1"
                    )
        by_rhs: dict[tuple[str, str], list[tuple[str, float]]] = {}
        for (a, b, c), logp in sorted(self.binary.items()):
            by_rhs.setdefault((b, c), []).append((a, logp))
        lex_index: dict[str, list[tuple[str, float]]] = {}
        for (a, tok), logp in sorted(self.lexical.items()):
            lex_index.setdefault(tok, []).append((a, logp))
        object.__setattr__(self, "_by_rhs", by_rhs)
        object.__setattr__(self, "_lex_index", lex_index)
        object.__setattr__(
            self,
            "_has_signatures",
            any(_SIGNATURE_RE.match(tok) for tok in lex_index),
        )

    @classmethod
    def from_probs(
        cls,
        start: str,
        binary: Mapping[tuple[str, str, str], float],
        lexical: Mapping[tuple[str, str], float],
        unk_threshold: int = 0,
        validate: bool = True,
    ) -> "Pcfg":
        """Build from plain probabilities instead of log-probabilities."""
        return cls(
            start=start,
            binary={r: math.log(p) for r, p in binary.items()},
            lexical={r: math.log(p) for r, p in lexical.items()},
            unk_threshold=unk_threshold,
            validate=validate,
        )

    def lhs_probability_sums(self) -> dict[str, float]:
        sums: dict[str, float] = {}
        for (a, *_), logp in list(self.binary.items()) + list(self.lexical.items()):
            sums[a] = sums.get(a, 0.0) + math.exp(logp)
        return sums

    def nonterminals(self) -> set[str]:
        nts = {a for a, _, _ in self.binary} | {a for a, _ in self.lexical}
        for _, b, c in self.binary:
            nts.add(b)
            nts.add(c)
        return nts

    def rules_for_rhs(self, b: str, c: str) -> list[tuple[str, float]]:
        return self._by_rhs.get((b, c), [])

    def lexical_for(self, token: str) -> list[tuple[str, float]]:
        """Lexical entries for a token, falling back to its UNK signature
        when the token is unseen and the grammar was induced with one."""
        direct = self._lex_index.get(token)
        if direct:
            return direct
        if self._has_signatures:
            return self._lex_index.get(unk_signature(token), [])
        return []


def induce_grammar(
    trees: Iterable[Tree], order: int = 2, unk_threshold: int = 2
) -> Pcfg:
    """Maximum-likelihood PCFG from a treebank.

    Trees are binarized first; rule probability is count(A -> rhs) divided
    by count(A).  Tokens seen fewer than ``unk_threshold`` times contribute
    their word-shape signature to the lexicon instead of themselves.
    """
    trees = list(trees)
    if not trees:
        raise EmptyTreebank("cannot induce a grammar from zero trees")

    token_freq: Counter = Counter()
    for tree in trees:
        for node in tree.subtrees():
            for child in node.children:
                if isinstance(child, str):
                    token_freq[child] += 1

    def terminal(tok: str) -> str:
        return unk_signature(tok) if token_freq[tok] < unk_threshold else tok

    binary_counts: Counter = Counter()
    lexical_counts: Counter = Counter()
    root_counts: Counter = Counter()
    for tree in trees:
        bin_tree = binarize(tree, order)
        root_counts[bin_tree.label] += 1
        for node in bin_tree.subtrees():
            kids = node.children
            if len(kids) == 1 and isinstance(kids[0], str):
                lexical_counts[(node.label, terminal(kids[0]))] += 1
            elif len(kids) == 2 and all(isinstance(k, Tree) for k in kids):
                binary_counts[(node.label, kids[0].label, kids[1].label)] += 1
            else:  # binarize guarantees this never happens
                raise AssertionError(f"non-CNF node {node!r} after binarization")

    lhs_totals: Counter = Counter()
    for (a, *_), n in binary_counts.items():
        lhs_totals[a] += n
    for (a, _), n in lexical_counts.items():
        lhs_totals[a] += n

    start = max(root_counts, key=lambda lbl: (root_counts[lbl], lbl))
    return Pcfg(
        start=start,
        binary={r: math.log(n / lhs_totals[r[0]]) for r, n in binary_counts.items()},
        lexical={r: math.log(n / lhs_totals[r[0]]) for r, n in lexical_counts.items()},
        unk_threshold=unk_threshold,
    )


def save_grammar(grammar: Pcfg, path: str) -> None:
    """Line-oriented text format: ``A -> B C # logprob`` and
    ``A -> 'token' # logprob``, with metadata in leading comments."""
    lines = [
        "# corchetes pcfg v1",
        f"# start: {grammar.start}",
        f"# unk_threshold: {grammar.unk_threshold}",
    ]
    for (a, b, c), logp in sorted(grammar.binary.items()):
        lines.append(f"{a} -> {b} {c} # {logp!r}")
    for (a, tok), logp in sorted(grammar.lexical.items()):
        lines.append(f"{a} -> '{tok}' # {logp!r}")
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("\n".join(lines) + "\n")


def load_grammar(path: str) -> Pcfg:
    start = None
    unk_threshold = 0
    binary: dict[tuple[str, str, str], float] = {}
    lexical: dict[tuple[str, str], float] = {}
    with open(path, encoding="utf-8") as fh:
        for raw in fh:
            line = raw.strip()
            if not line:
                continue
            if line.startswith("#"):
                meta = line.lstrip("# ").split(":", 1)
                if len(meta) == 2 and meta[0].strip() == "start":
                    start = meta[1].strip()
                elif len(meta) == 2 and meta[0].strip() == "unk_threshold":
                    unk_threshold = int(meta[1].strip())
                continue
            head, tail = line.split("->", 1)
            rhs_text, logp_text = tail.rsplit("#", 1)
            lhs = head.strip()
            logp = float(logp_text.strip())
            rhs = rhs_text.strip()
            if rhs.startswith("'") and rhs.endswith("'"):
                lexical[(lhs, rhs[1:-1])] = logp
            else:
                parts = rhs.split()
                if len(parts) != 2:
                    raise ValueError(f"cannot parse grammar line: {raw!r}")
                binary[(lhs, parts[0], parts[1])] = logp
    if start is None:
        raise ValueError(f"grammar file {path} lacks a '# start:' line")
    return Pcfg(
        start=start, binary=binary, lexical=lexical, unk_threshold=unk_threshold
    )
