"""Toolkit for Spanish school-grammar constituency analysis in square-bracket
notation: treebank conversion, labeled-bracket F1 scoring, repair of generated
analyses, a PCFG/CYK baseline parser, and a client for text-generation
endpoints."""

from corchetes.tree import (
    Tree,
    LabeledSpan,
    parse_bracketed,
    serialize,
    yield_tokens,
    extract_spans,
)

__version__ = "0.1.0"
