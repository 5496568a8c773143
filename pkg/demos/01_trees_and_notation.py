"""Walk through the square-bracket tree notation and the core operations."""

from corchetes import parse_bracketed, serialize, yield_tokens, extract_spans
from corchetes.render import render_ascii

# A constituent is [Label children...]; children mix sub-constituents and
# surface tokens freely.
analysis = "[S [NP/S [Det El] [N gato]] [VP [V duerme]] [Punct .]]"
tree = parse_bracketed(analysis)

print("canonical form:", serialize(tree))
print("sentence:", " ".join(yield_tokens(tree)))
print()
print(render_ascii(tree))
print()

# Labeled spans are what the evaluator compares.  Preterminals (nodes whose
# children are all tokens) can be excluded, EVALB-style.
print("all spans:")
for span, count in sorted(extract_spans(tree, True, ()).items()):
    print(f"  {span.label:8s} [{span.start}, {span.end})  x{count}")
print("phrase spans only (no preterminals, Punct ignored):")
for span, count in sorted(extract_spans(tree, False, {"Punct"}).items()):
    print(f"  {span.label:8s} [{span.start}, {span.end})  x{count}")

# Sloppy whitespace normalizes away; structure is what matters.
messy = "[S   [NP/S [Det El]   [N gato]]\n  [VP [V duerme]] [Punct .]  ]"
assert parse_bracketed(messy) == tree
print("\nwhitespace-normalized round-trip holds")
