"""Conversion of XML treebanks into bracket-notation corpus records.

The tag-to-label mapping is deliberately external configuration: which
corpus tag becomes which school-grammar label is linguistic policy, not
code.  A documented default for AnCora-style tags ships with the package
(``corchetes/data/ancora_school.labelmap``).

Label map file format, one rule per line (first match wins)::

    sn:func=suj -> NP/S    # tag rule restricted to an attribute value
    sn -> NP               # plain tag rule
    grup.nom -> SPLICE     # drop the node, promote its children
    @func=suj -> S         # suffix rule: NP + func=suj  =>  NP/S

Suffix rules only fire when the matching tag rule had no attribute
condition of its own.  Elements with neither text nor element content are
dropped (elided constituents).
"""

from __future__ import annotations

import random
import xml.etree.ElementTree as ET
from collections import Counter
from dataclasses import dataclass
from importlib import resources
from typing import Callable, Iterable

from corchetes.tree import Tree, parse_bracketed, serialize, yield_tokens

__all__ = [
    "CorpusRecord",
    "LabelMap",
    "TokenizerHandle",
    "ConversionError",
    "MalformedXml",
    "UnmappedTag",
    "EmptySentence",
    "resolve_tokenizer",
    "convert_document",
    "filter_by_token_limit",
    "split",
    "emit_training_file",
    "corpus_stats",
    "CorpusStats",
    "training_example_text",
    "write_brackets",
    "read_brackets",
]

SPLICE = "SPLICE"


class ConversionError(ValueError):
    pass


class MalformedXml(ConversionError):
    pass


class UnmappedTag(ConversionError):
    def __init__(self, tag: str, location: str):
        super().__init__(f"no rule for tag {tag!r} at {location}")
        self.tag = tag
        self.location = location


class EmptySentence(ConversionError):
    pass


@dataclass(frozen=True)
class TokenizerHandle:
    """A named, deterministic token-counting function."""

    name: str
    count: Callable[[str], int]


def _hf_counter(model_name: str) -> Callable[[str], int]:
    from transformers import AutoTokenizer  # optional dependency

    tok = AutoTokenizer.from_pretrained(model_name)
    return lambda text: len(tok.encode(text))


def resolve_tokenizer(name: str) -> TokenizerHandle:
    """Resolve a tokenizer name to a counting function.

    ``whitespace`` counts whitespace-separated chunks, ``chars`` counts
    characters, and ``hf:<model>`` defers to a Hugging Face tokenizer
    (needs transformers installed and the vocabulary available locally).
    """
    if name == "whitespace":
        return TokenizerHandle(name, lambda text: len(text.split()))
    if name == "chars":
        return TokenizerHandle(name, len)
    if name.startswith("hf:"):
        return TokenizerHandle(name, _hf_counter(name[3:]))
    raise ValueError(f"unknown tokenizer {name!r}")


WHITESPACE_TOKENIZER = resolve_tokenizer("whitespace")


@dataclass(frozen=True)
class CorpusRecord:
    """One converted sentence: surface text, gold analysis, and counts."""

    id: str
    sentence: str
    gold: str
    token_count: int
    word_count: int


def training_example_text(record: CorpusRecord) -> str:
    """The two-line training example a record turns into."""
    return f"<s>{record.sentence}</s>\n<s>{record.gold}</s>"


@dataclass(frozen=True)
class _TagRule:
    tag: str
    attr: str | None
    value: str | None
    target: str  # label or SPLICE


def _split_attr(text: str, lineno: int) -> tuple[str, str]:
    attr, sep, value = text.partition("=")
    if not sep or not attr or not value:
        raise ValueError(f"expected attr=value on line {lineno}: {text!r}")
    return attr, value


class LabelMap:
    """Ordered rewrite rules from corpus tags to constituent labels."""

    def __init__(
        self,
        tag_rules: Iterable[_TagRule],
        suffix_rules: Iterable[tuple[str, str, str]] = (),
    ):
        self.tag_rules = list(tag_rules)
        self.suffix_rules = list(suffix_rules)  # (attr, value, suffix)
        for rule in self.tag_rules:
            if rule.target != SPLICE and (
                not rule.target
                or any(c.isspace() or c in "[]" for c in rule.target)
            ):
                raise ValueError(f"bad target label {rule.target!r}")

    @classmethod
    def parse(cls, text: str) -> "LabelMap":
        tag_rules, suffix_rules = [], []
        for lineno, raw in enumerate(text.splitlines(), 1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            lhs, arrow, rhs = line.partition("->")
            lhs, target = lhs.strip(), rhs.strip()
            if not arrow or not lhs or not target or " " in target:
                raise ValueError(f"bad label-map rule on line {lineno}: {raw!r}")
            if lhs.startswith("@"):
                attr, value = _split_attr(lhs[1:], lineno)
                suffix_rules.append((attr, value, target))
            elif ":" in lhs:
                tag, _, cond = lhs.partition(":")
                attr, value = _split_attr(cond, lineno)
                tag_rules.append(_TagRule(tag, attr, value, target))
            else:
                tag_rules.append(_TagRule(lhs, None, None, target))
        return cls(tag_rules, suffix_rules)

    @classmethod
    def load(cls, path: str) -> "LabelMap":
        with open(path, encoding="utf-8") as fh:
            return cls.parse(fh.read())

    @classmethod
    def default(cls) -> "LabelMap":
        text = (
            resources.files("corchetes")
            .joinpath("data/ancora_school.labelmap")
            .read_text("utf-8")
        )
        return cls.parse(text)

    def resolve(self, tag: str, attrib: dict, location: str) -> str:
        """Target label for an element (or SPLICE); raises UnmappedTag."""
        for rule in self.tag_rules:
            if rule.tag != tag:
                continue
            if rule.attr is not None:
                if attrib.get(rule.attr) != rule.value:
                    continue
                return rule.target
            if rule.target == SPLICE:
                return rule.target
            label = rule.target
            for attr, value, suffix in self.suffix_rules:
                if attrib.get(attr) == value:
                    label = f"{label}/{suffix}"
                    break
            return label
        raise UnmappedTag(tag, location)


def _clean_token(token: str) -> str:
    return token.replace("[", "-LSB-").replace("]", "-RSB-")


def _element_parts(elem: ET.Element, label_map: LabelMap, location: str) -> list:
    """Convert one element to its tree contribution (a list of children)."""
    target = label_map.resolve(elem.tag, elem.attrib, location)
    parts: list = []
    if elem.text:
        parts.extend(_clean_token(t) for t in elem.text.split())
    for child in elem:
        parts.extend(_element_parts(child, label_map, f"{location}/{child.tag}"))
        if child.tail:
            parts.extend(_clean_token(t) for t in child.tail.split())
    if not parts:  # elided constituent: contributes nothing
        return []
    if target == SPLICE:
        return parts
    return [Tree(target, parts)]


def convert_document(
    xml_text: str,
    label_map: LabelMap,
    tokenizer: TokenizerHandle = WHITESPACE_TOKENIZER,
    sentence_tag: str = "sentence",
    doc_id: str = "doc",
) -> list[CorpusRecord]:
    """Convert one XML treebank document into corpus records.

    Every ``sentence_tag`` element becomes one record; element nesting
    becomes constituent nesting through the label map.  Bracket characters
    in tokens are replaced with ``-LSB-``/``-RSB-`` placeholders.
    """
    try:
        root = ET.fromstring(xml_text)
    except ET.ParseError as exc:
        raise MalformedXml(f"{doc_id}: {exc}") from exc
    if root.tag == sentence_tag:
        sentences = [root]
    else:
        sentences = list(root.iter(sentence_tag))
        if not sentences:  # bare fragment: the root is the one sentence
            sentences = [root]
    records = []
    for index, sent in enumerate(sentences, 1):
        sent_id = sent.get("id") or f"{doc_id}#{index}"
        target = label_map.resolve(sent.tag, sent.attrib, sent_id)
        parts = []
        if sent.text:
            parts.extend(_clean_token(t) for t in sent.text.split())
        for child in sent:
            parts.extend(
                _element_parts(child, label_map, f"{sent_id}/{child.tag}")
            )
            if child.tail:
                parts.extend(_clean_token(t) for t in child.tail.split())
        if not parts:
            raise EmptySentence(f"sentence {sent_id} has no content")
        if target == SPLICE:
            if len(parts) == 1 and isinstance(parts[0], Tree):
                tree = parts[0]
            else:
                raise ConversionError(
                    f"sentence {sent_id}: cannot splice the sentence element "
                    f"around {len(parts)} top-level parts"
                )
        else:
            tree = Tree(target, parts)
        records.append(_record_from_tree(sent_id, tree, tokenizer))
    return records


def _record_from_tree(
    rec_id: str, tree: Tree, tokenizer: TokenizerHandle
) -> CorpusRecord:
    tokens = yield_tokens(tree)
    sentence = " ".join(tokens)
    gold = serialize(tree)
    count = tokenizer.count(f"<s>{sentence}</s>\n<s>{gold}</s>")
    return CorpusRecord(rec_id, sentence, gold, count, len(tokens))


def filter_by_token_limit(
    records: Iterable[CorpusRecord],
    limit: int,
    tokenizer: TokenizerHandle = WHITESPACE_TOKENIZER,
) -> tuple[list[CorpusRecord], list[CorpusRecord]]:
    """Partition records into (kept, rejected) by training-example length
    under the given tokenizer, preserving order."""
    if limit < 1:
        raise ValueError("token limit must be >= 1")
    kept, rejected = [], []
    for record in records:
        count = tokenizer.count(training_example_text(record))
        (kept if count <= limit else rejected).append(record)
    return kept, rejected


def split(
    records: list[CorpusRecord], train_fraction: float, seed: int
) -> tuple[list[CorpusRecord], list[CorpusRecord]]:
    """Deterministic seeded shuffle, then cut at round(fraction * N)."""
    if not 0.0 < train_fraction < 1.0:
        raise ValueError("train_fraction must be strictly between 0 and 1")
    indices = list(range(len(records)))
    random.Random(seed).shuffle(indices)
    n_train = int(train_fraction * len(records) + 0.5)  # round half up
    train = [records[i] for i in indices[:n_train]]
    test = [records[i] for i in indices[n_train:]]
    return train, test


def emit_training_file(records: Iterable[CorpusRecord], path: str) -> None:
    """Write the two-line-per-record training format:
    ``<s>sentence</s>`` then ``<s>analysis</s>``."""
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        for record in records:
            fh.write(training_example_text(record) + "\n")


@dataclass(frozen=True)
class CorpusStats:
    sentences: int
    words: int
    token_histogram: dict
    max_token_count: int
    labels: dict

    def to_dict(self) -> dict:
        return {
            "sentences": self.sentences,
            "words": self.words,
            "token_histogram": {str(k): v for k, v in sorted(self.token_histogram.items())},
            "max_token_count": self.max_token_count,
            "labels": dict(sorted(self.labels.items())),
        }


def corpus_stats(records: Iterable[CorpusRecord]) -> CorpusStats:
    """Exact counts over records: sizes, token-count histogram, and the
    inventory of constituent labels used."""
    records = list(records)
    histogram: Counter = Counter(r.token_count for r in records)
    labels: Counter = Counter()
    for record in records:
        for node in parse_bracketed(record.gold).subtrees():
            labels[node.label] += 1
    return CorpusStats(
        sentences=len(records),
        words=sum(r.word_count for r in records),
        token_histogram=dict(histogram),
        max_token_count=max((r.token_count for r in records), default=0),
        labels=dict(labels),
    )


def write_brackets(records: Iterable[CorpusRecord], path: str) -> None:
    """One gold bracket string per line, UTF-8, LF endings."""
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        for record in records:
            fh.write(record.gold + "\n")


def read_brackets(
    path: str, tokenizer: TokenizerHandle = WHITESPACE_TOKENIZER
) -> list[CorpusRecord]:
    """Rebuild records from a brackets file; sentences are the tree yields."""
    records = []
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, 1):
            text = line.strip()
            if not text:
                continue
            tree = parse_bracketed(text)  # BracketParseError carries position
            records.append(
                _record_from_tree(f"{path}:{lineno}", tree, tokenizer)
            )
    return records
