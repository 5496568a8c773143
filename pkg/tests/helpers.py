"""Shared test utilities: random tree generation and independent oracles.

The oracles here deliberately recompute things their own way (left-sibling
sums, naive enumeration) so they stay independent of the library code they
check.
"""

from __future__ import annotations

import random
from collections import Counter

from corchetes.tree import Tree

LABELS = ["S", "NP", "VP", "PP", "Det", "N", "V", "Adj", "AdvP", "NP/S", "VP/PV"]
TOKENS = [
    "el", "la", "un", "gato", "casa", "perro", "come", "duerme", "ve",
    "grande", "rojo", "hoy", "bien", "pan", "agua",
]

# One full analysis in the bracket notation, used as a fidelity fixture.
COMPOUND_SENTENCE_ANALYSIS = (
    "[Compound.Sentence [NP/S [Det The] [N final] [PP/CN [P of] [NP/T [N cup]]] "
    "[PP/CN [P between] [NP/T [N England and Germany]]]] [VP/PV [NP had] "
    "[NP/CD [Det a] [N effect] [AdjP/CN [Adj positive]]] "
    "[AdvP/AP [Punct ,] [conj although] [Subj it] "
    "[VP/PV [NP went] [AdjP/PVO [AdvP [Adv almost]] [Adj unnoticed]]]]] [Punct .]]"
)


def random_tree(
    rng: random.Random,
    max_depth: int = 8,
    max_fanout: int = 5,
    labels: list[str] | None = None,
    tokens: list[str] | None = None,
) -> Tree:
    """A random valid tree with depth <= max_depth and fanout <= max_fanout."""
    labels = labels or LABELS
    tokens = tokens or TOKENS

    def node(depth: int) -> Tree:
        fanout = rng.randint(1, max_fanout)
        children = []
        for _ in range(fanout):
            if depth >= max_depth or rng.random() < 0.45:
                children.append(rng.choice(tokens))
            else:
                children.append(node(depth + 1))
        return Tree(rng.choice(labels), children)

    return node(1)


def count_leaves(node: Tree) -> int:
    return sum(
        1 if isinstance(c, str) else count_leaves(c) for c in node.children
    )


def brute_force_spans(
    tree: Tree,
    include_preterminals: bool = True,
    ignore_labels: frozenset[str] = frozenset(),
) -> Counter:
    """Naive span enumeration: each node's start is the sum of the leaf
    counts of everything to its left along the path from the root."""
    result: Counter = Counter()

    def visit(node: Tree, leaves_before: int) -> None:
        width = count_leaves(node)
        is_preterminal = not any(isinstance(c, Tree) for c in node.children)
        if node.label not in ignore_labels and (
            include_preterminals or not is_preterminal
        ):
            result[(node.label, leaves_before, leaves_before + width)] += 1
        offset = leaves_before
        for c in node.children:
            if isinstance(c, str):
                offset += 1
            else:
                visit(c, offset)
                offset += count_leaves(c)

    visit(tree, 0)
    return result


def spans_to_tuples(spans: Counter) -> Counter:
    """corchetes extract_spans output -> plain (label, start, end) Counter."""
    return Counter({(s.label, s.start, s.end): n for s, n in spans.items()})


def enumerate_derivations(tokens, grammar):
    """Oracle: every derivation of the full span from the start symbol,
    found by naive recursion instead of dynamic programming."""
    from functools import lru_cache

    tokens = tuple(tokens)

    @lru_cache(maxsize=None)
    def derivs(i, j, a):
        out = []
        if j - i == 1:
            for sym, lp in grammar.lexical_for(tokens[i]):
                if sym == a:
                    out.append((lp, Tree(a, [tokens[i]])))
        for k in range(i + 1, j):
            for (aa, b, c), rule_lp in grammar.binary.items():
                if aa != a:
                    continue
                for lp_b, tb in derivs(i, k, b):
                    for lp_c, tc in derivs(k, j, c):
                        out.append((rule_lp + lp_b + lp_c, Tree(a, [tb, tc])))
        return tuple(out)

    return list(derivs(0, len(tokens), grammar.start))


def tree_logprob(tree, grammar):
    """Oracle: sum rule log-probs of a strictly binary derivation tree."""
    if len(tree.children) == 1 and isinstance(tree.children[0], str):
        return grammar.lexical[(tree.label, tree.children[0])]
    b, c = tree.children
    return (
        grammar.binary[(tree.label, b.label, c.label)]
        + tree_logprob(b, grammar)
        + tree_logprob(c, grammar)
    )


def generable_sentences(grammar, max_len):
    """Oracle: every token sequence of length <= max_len the grammar can
    derive from its start symbol."""
    from functools import lru_cache

    @lru_cache(maxsize=None)
    def gen(a, n):
        res = set()
        if n == 1:
            for (aa, tok) in grammar.lexical:
                if aa == a:
                    res.add((tok,))
        for (aa, b, c) in grammar.binary:
            if aa != a:
                continue
            for m in range(1, n):
                for left in gen(b, m):
                    for right in gen(c, n - m):
                        res.add(left + right)
        return frozenset(res)

    out = set()
    for n in range(1, max_len + 1):
        out |= gen(grammar.start, n)
    return sorted(out)
