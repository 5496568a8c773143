"""Convert an AnCora-style XML fragment into records, then split and emit
the two-line training format."""

import tempfile
from pathlib import Path

from corchetes.ingest import (
    LabelMap,
    convert_document,
    corpus_stats,
    emit_training_file,
    split,
)

XML = """
<article>
  <sentence id="d1">
    <sn func="suj"><espec>La</espec><grup.nom><n>casa</n></grup.nom></sn>
    <grup.verb><v>cae</v></grup.verb>
    <f>.</f>
  </sentence>
  <sentence id="d2">
    <sn func="suj"><espec>El</espec><grup.nom><n>perro</n></grup.nom></sn>
    <grup.verb><v>ve</v></grup.verb>
    <sn func="cd"><espec>la</espec><grup.nom><n>casa</n></grup.nom></sn>
    <f>.</f>
  </sentence>
  <sentence id="d3">
    <sn func="suj"><espec>Un</espec><grup.nom><n>gato</n></grup.nom></sn>
    <grup.verb><v>duerme</v></grup.verb>
    <f>.</f>
  </sentence>
</article>
"""

records = convert_document(XML, LabelMap.default(), doc_id="demo")
for r in records:
    print(f"{r.id}: {r.sentence}")
    print(f"     {r.gold}")
    print(f"     tokens={r.token_count} words={r.word_count}")

stats = corpus_stats(records)
print("\nlabel inventory:", stats.labels)

train, test = split(records, train_fraction=0.67, seed=42)
print(f"\nsplit: {len(train)} train / {len(test)} test (seeded, reproducible)")

with tempfile.TemporaryDirectory() as tmp:
    path = Path(tmp) / "train.txt"
    emit_training_file(train, str(path))
    print("\ntraining file contents:")
    print(path.read_text("utf-8"))
