"""Viterbi CYK decoding over a CNF grammar.

The chart stores, for every span (i, j) and nonterminal, the best
log-probability and a backpointer.  Cell scores are part of the public
surface so external rescoring can be layered on top without touching the
decoder.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from corchetes.grammar import Pcfg, debinarize
from corchetes.tree import Tree

__all__ = ["Chart", "build_chart", "cyk_parse"]

# backpointers: ("lex",) for width-1 cells, (k, B, C) for binary steps
_LEX = ("lex",)


@dataclass
class Chart:
    """Dense-span Viterbi chart for one sentence."""

    tokens: tuple[str, ...]
    cells: dict = field(default_factory=dict)  # (i, j) -> {A: (logp, back)}

    @property
    def n(self) -> int:
        return len(self.tokens)

    def cell(self, i: int, j: int) -> dict:
        if not (0 <= i < j <= self.n):
            raise IndexError(f"span ({i}, {j}) outside 0..{self.n}")
        return self.cells.get((i, j), {})

    def score(self, i: int, j: int, symbol: str) -> float | None:
        """Best log-probability of `symbol` over span (i, j), if derivable."""
        entry = self.cell(i, j).get(symbol)
        return entry[0] if entry else None


def build_chart(tokens: list[str], grammar: Pcfg) -> Chart:
    """Fill the Viterbi chart bottom-up.

    Deterministic tie-breaking: candidates are scanned by ascending split
    point, then lexicographic rule order, and only strict improvements
    replace an entry, so the first optimum found wins.
    """
    if not tokens:
        raise ValueError("cannot parse an empty token list")
    chart = Chart(tuple(tokens))
    n = len(tokens)
    for i, token in enumerate(tokens):
        cell: dict = {}
        for symbol, logp in grammar.lexical_for(token):
            if symbol not in cell or logp > cell[symbol][0]:
                cell[symbol] = (logp, _LEX)
        if cell:
            chart.cells[(i, i + 1)] = cell
    for width in range(2, n + 1):
        for i in range(0, n - width + 1):
            j = i + width
            cell = {}
            for k in range(i + 1, j):
                left = chart.cells.get((i, k))
                right = chart.cells.get((k, j))
                if not left or not right:
                    continue
                for b in sorted(left):
                    lp_b = left[b][0]
                    for c in sorted(right):
                        lp_c = right[c][0]
                        for a, rule_lp in grammar.rules_for_rhs(b, c):
                            cand = rule_lp + lp_b + lp_c
                            if a not in cell or cand > cell[a][0]:
                                cell[a] = (cand, (k, b, c))
            if cell:
                chart.cells[(i, j)] = cell
    return chart


def _backtrace(chart: Chart, i: int, j: int, symbol: str) -> Tree:
    _, back = chart.cells[(i, j)][symbol]
    if back == _LEX:
        return Tree(symbol, [chart.tokens[i]])
    k, b, c = back
    return Tree(symbol, [_backtrace(chart, i, k, b), _backtrace(chart, k, j, c)])


def cyk_parse(tokens: list[str], grammar: Pcfg) -> Tree | None:
    """Highest-log-probability tree for the tokens, or None when the start
    symbol cannot span the sentence.  The result is debinarized back to the
    original treebank shape."""
    chart = build_chart(tokens, grammar)
    if grammar.start not in chart.cell(0, chart.n):
        return None
    return debinarize(_backtrace(chart, 0, chart.n, grammar.start))
