"""Induce a PCFG from a toy treebank and decode with Viterbi CYK."""

from corchetes.cyk import build_chart, cyk_parse
from corchetes.grammar import binarize, induce_grammar
from corchetes.render import render_ascii
from corchetes.tree import parse_bracketed

TREEBANK = [
    "[S [NP [Det el] [N gato]] [VP [V duerme]]]",
    "[S [NP [Det la] [N casa]] [VP [V cae]]]",
    "[S [NP [Det el] [N perro]] [VP [V ve] [NP [Det la] [N casa]]]]",
    "[S [NP [Det la] [N mujer]] [VP [V ve] [NP [Det el] [N gato]]]]",
    "[S [NP [Det el] [N gato]] [VP [V ve] [NP [Det el] [N perro]]]]",
]
trees = [parse_bracketed(t) for t in TREEBANK]

print("binarized shape of the third tree:")
print(render_ascii(binarize(trees[2], order=1)))
print()

grammar = induce_grammar(trees, order=1, unk_threshold=0)
print(f"start symbol: {grammar.start}")
print(f"rules: {len(grammar.binary)} binary, {len(grammar.lexical)} lexical")
for lhs, total in sorted(grammar.lhs_probability_sums().items()):
    print(f"  P(rules | {lhs}) sums to {total:.12f}")

sentence = "la mujer ve el perro".split()
tree = cyk_parse(sentence, grammar)
print("\nViterbi parse of:", " ".join(sentence))
print(render_ascii(tree))

chart = build_chart(sentence, grammar)
print("\nroot cell log-probability:", chart.score(0, len(sentence), grammar.start))
print("NP over [3, 5):", chart.score(3, 5, "NP"))

print("\nno-parse is a value, not an error:", cyk_parse(["palabras", "nuevas"], grammar))
