"""Repair raw model generations, then score them against gold trees."""

from corchetes.evaluate import EvalConfig, score_corpus
from corchetes.repair import check_alignment, repair
from corchetes.tree import parse_bracketed

GOLD = [
    "[S [NP [Det el] [N gato]] [VP [V duerme]]]",
    "[S [NP [Det la] [N casa]] [VP [V cae]]]",
    "[S [NP [Det el] [N perro]] [VP [V corre]]]",
]

# what a fine-tuned model might actually emit: marker leakage, runaway
# generation, early cutoff
RAW = [
    "<s>[S [NP [Det el] [N gato]] [VP [V duerme]]]</s><s>el gato",
    "[S [NP [Det la] [N casa]] [VP [V cae",
    "la frase no tiene corchetes",
]

preds = []
for raw in RAW:
    outcome = repair(raw)
    print(f"raw:      {raw!r}")
    print(f"actions:  {list(outcome.actions)}  fatal={outcome.fatal}")
    print(f"repaired: {outcome.repaired!r}\n")
    preds.append(None if outcome.fatal else parse_bracketed(outcome.repaired))

diag = check_alignment(preds[1], "la casa cae")
print("alignment of second repair:", diag)

pairs = [(parse_bracketed(g), p) for g, p in zip(GOLD, preds)]
report = score_corpus(pairs, EvalConfig(include_preterminals=True, ignore_labels=frozenset()))
print()
print(report.to_table("demo-model"))
print(f"\nfailures counted against the score: {report.failures}")
