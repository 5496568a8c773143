"""Command-line entry point wiring the pipeline stages together.

Every subcommand that writes an artifact also writes a ``*.manifest.json``
next to it echoing the full configuration, so any published number can be
traced back to the exact settings that produced it.

Exit codes: 0 success, 2 usage, 3 data error, 4 network error.
"""

from __future__ import annotations

import argparse
import datetime
import json
import os
import sys
from pathlib import Path

import corchetes
from corchetes.client import EndpointConfig, predict_corpus
from corchetes.evaluate import EvalConfig, score_corpus
from corchetes.grammar import induce_grammar, load_grammar, save_grammar
from corchetes.cyk import cyk_parse
from corchetes.ingest import (
    ConversionError,
    LabelMap,
    convert_document,
    corpus_stats,
    emit_training_file,
    filter_by_token_limit,
    read_brackets,
    resolve_tokenizer,
    split,
    write_brackets,
)
from corchetes.render import render_ascii, render_svg
from corchetes.repair import repair
from corchetes.tree import BracketParseError, parse_bracketed, yield_tokens

USAGE_EXIT, DATA_EXIT, NETWORK_EXIT = 2, 3, 4


class CliError(Exception):
    def __init__(self, category: str, message: str, code: int):
        super().__init__(message)
        self.category = category
        self.code = code


def _data_error(message: str) -> CliError:
    return CliError("data", message, DATA_EXIT)


def write_manifest(out_path: str, subcommand: str, config: dict) -> None:
    manifest = {
        "subcommand": subcommand,
        "config": {k: v for k, v in config.items() if k != "func"},
        "toolkit_version": corchetes.__version__,
        "timestamp": datetime.datetime.now(datetime.timezone.utc).isoformat(),
    }
    path = Path(str(out_path) + ".manifest.json")
    path.write_text(json.dumps(manifest, indent=2, default=str) + "\n", "utf-8")


def _load_sentences(path: str) -> list[tuple[str, str]]:
    """Sentences from a plain-text file (one per line) or a brackets file
    (sentences are then the tree yields)."""
    pairs = []
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, 1):
            text = line.strip()
            if not text:
                continue
            if text.startswith("["):
                text = " ".join(yield_tokens(parse_bracketed(text)))
            pairs.append((str(lineno), text))
    return pairs


def _load_trees(path: str) -> list:
    """Trees from a brackets file or from `<s>` training-file analysis
    lines (every second line of each pair)."""
    trees = []
    with open(path, encoding="utf-8") as fh:
        lines = [line.rstrip("\n") for line in fh if line.strip()]
    if lines and lines[0].startswith("<s>"):
        for text in lines:
            inner = text.removeprefix("<s>").removesuffix("</s>").strip()
            if inner.startswith("["):
                trees.append(parse_bracketed(inner))
    else:
        trees.extend(parse_bracketed(line) for line in lines)
    return trees


def cmd_convert(args) -> int:
    label_map = LabelMap.load(args.label_map) if args.label_map else LabelMap.default()
    tokenizer = resolve_tokenizer(args.tokenizer)
    xml_dir = Path(args.xml_dir)
    files = sorted(xml_dir.glob("*.xml"))
    if not files:
        raise _data_error(f"no .xml files in {xml_dir}")
    records = []
    for path in files:
        records.extend(
            convert_document(
                path.read_text("utf-8"),
                label_map,
                tokenizer=tokenizer,
                sentence_tag=args.sentence_tag,
                doc_id=path.stem,
            )
        )
    write_brackets(records, args.out)
    write_manifest(args.out, "convert", vars(args))
    print(f"converted {len(records)} sentences from {len(files)} files -> {args.out}")
    return 0


def cmd_stats(args) -> int:
    records = read_brackets(args.corpus, resolve_tokenizer(args.tokenizer))
    print(json.dumps(corpus_stats(records).to_dict(), indent=2))
    return 0


def cmd_filter(args) -> int:
    tokenizer = resolve_tokenizer(args.tokenizer)
    records = read_brackets(args.corpus, tokenizer)
    kept, rejected = filter_by_token_limit(records, args.limit, tokenizer)
    write_brackets(kept, args.out)
    write_manifest(args.out, "filter", vars(args))
    print(f"kept {len(kept)} of {len(records)} sentences (limit {args.limit})")
    return 0


def cmd_split(args) -> int:
    records = read_brackets(args.corpus)
    train, test = split(records, args.train_frac, args.seed)
    emit_training_file(train, args.out_train)
    write_brackets(test, args.out_test)
    write_manifest(args.out_train, "split", vars(args))
    write_manifest(args.out_test, "split", vars(args))
    print(f"split {len(records)} sentences into {len(train)} train / {len(test)} test")
    return 0


def cmd_induce(args) -> int:
    trees = _load_trees(args.treebank)
    if not trees:
        raise _data_error(f"no trees found in {args.treebank}")
    grammar = induce_grammar(trees, order=args.order, unk_threshold=args.unk)
    save_grammar(grammar, args.out)
    write_manifest(args.out, "induce", vars(args))
    n_rules = len(grammar.binary) + len(grammar.lexical)
    print(f"induced {n_rules} rules over {len(trees)} trees -> {args.out}")
    return 0


def cmd_parse_cyk(args) -> int:
    grammar = load_grammar(args.grammar)
    pairs = _load_sentences(args.sentences)
    if not pairs:
        raise _data_error(f"no sentences in {args.sentences}")
    parsed = 0
    with open(args.out, "w", encoding="utf-8", newline="\n") as fh:
        for _, sentence in pairs:
            tree = cyk_parse(sentence.split(), grammar)
            if tree is None:
                fh.write("\n")
            else:
                parsed += 1
                fh.write(f"{tree}\n")
    write_manifest(args.out, "parse-cyk", vars(args))
    print(f"parsed {parsed} of {len(pairs)} sentences -> {args.out}")
    return 0


def cmd_predict(args) -> int:
    endpoint = os.environ.get("CORCHETES_ENDPOINT", args.endpoint)
    if not endpoint:
        raise CliError("usage", "no endpoint given (flag or CORCHETES_ENDPOINT)", USAGE_EXIT)
    timeout = float(os.environ.get("CORCHETES_TIMEOUT", args.timeout))
    cfg = EndpointConfig(
        base_url=endpoint,
        timeout=timeout,
        max_in_flight=args.max_in_flight,
        max_new_tokens=args.max_new_tokens,
        stop=args.stop,
        temperature=args.temperature,
        prompt_template=args.template,
    )
    pairs = _load_sentences(args.sentences)
    if not pairs:
        raise _data_error(f"no sentences in {args.sentences}")
    records, summary = predict_corpus(pairs, cfg)
    with open(args.out, "w", encoding="utf-8", newline="\n") as fh:
        for r in records:
            fh.write(json.dumps(
                {"id": r.id, "raw": r.raw, "latency": r.latency, "error": r.error},
                ensure_ascii=False,
            ) + "\n")
    write_manifest(args.out, "predict", vars(args))
    print(json.dumps({
        "count": summary.count,
        "failures": summary.failures,
        "latency_mean": summary.mean,
        "latency_p50": summary.p50,
        "latency_p95": summary.p95,
    }, indent=2))
    if summary.failures == summary.count:
        raise CliError("network", "every request failed", NETWORK_EXIT)
    return 0


def cmd_repair(args) -> int:
    lines = Path(args.raw).read_text("utf-8").splitlines()
    raws = []
    for line in lines:
        text = line.strip()
        if not text:
            continue
        if text.startswith("{"):
            raws.append(json.loads(text).get("raw") or "")
        else:
            raws.append(text)
    outcomes = [repair(raw) for raw in raws]
    with open(args.out, "w", encoding="utf-8", newline="\n") as fh:
        for outcome in outcomes:
            fh.write((outcome.repaired or "") + "\n")
    write_manifest(args.out, "repair", vars(args))
    actions = {}
    for outcome in outcomes:
        for action in outcome.actions:
            actions[action] = actions.get(action, 0) + 1
    print(json.dumps({
        "total": len(outcomes),
        "fatal": sum(1 for o in outcomes if o.fatal),
        "actions": actions,
    }, indent=2))
    return 0


def _load_predictions(path: str) -> list:
    preds = []
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            text = line.strip()
            if not text:
                preds.append(None)
                continue
            try:
                preds.append(parse_bracketed(text))
            except BracketParseError:
                preds.append(None)
    return preds


def cmd_eval(args) -> int:
    golds = [parse_bracketed(r.gold) for r in read_brackets(args.gold)]
    preds = _load_predictions(args.pred)
    if len(golds) != len(preds):
        raise _data_error(
            f"gold has {len(golds)} trees but pred has {len(preds)} lines"
        )
    ignore = args.ignore if args.ignore is not None else ["Punct"]
    config = EvalConfig(
        include_preterminals=args.include_preterminals,
        ignore_labels=frozenset(ignore),
        aggregate=args.aggregate,
    )
    report = score_corpus(list(zip(golds, preds)), config)
    print(report.to_table(args.model_name))
    json_out = args.json_out or (args.pred + ".eval.json")
    Path(json_out).write_text(report.to_json() + "\n", "utf-8")
    write_manifest(json_out, "eval", vars(args))
    return 0


def cmd_render(args) -> int:
    trees = _load_trees(args.tree_file)
    if not trees:
        raise _data_error(f"no trees in {args.tree_file}")
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    suffix = "txt" if args.format == "ascii" else "svg"
    for i, tree in enumerate(trees, 1):
        content = render_ascii(tree) + "\n" if args.format == "ascii" else render_svg(tree)
        (out_dir / f"tree_{i:04d}.{suffix}").write_text(content, "utf-8")
    write_manifest(str(out_dir / "render"), "render", vars(args))
    print(f"rendered {len(trees)} trees -> {out_dir}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="corchetes",
        description="Square-bracket constituency toolkit: corpus conversion, "
        "filtering, splitting, PCFG/CYK parsing, model inference, repair, "
        "evaluation, and tree rendering.",
    )
    sub = parser.add_subparsers(dest="subcommand", required=True)

    p = sub.add_parser("convert", help="XML treebank -> brackets corpus")
    p.add_argument("--xml-dir", required=True)
    p.add_argument("--label-map", help="rule file; omit for the built-in default")
    p.add_argument("--out", required=True)
    p.add_argument("--tokenizer", default="whitespace")
    p.add_argument("--sentence-tag", default="sentence")
    p.set_defaults(func=cmd_convert)

    p = sub.add_parser("stats", help="corpus summary as JSON")
    p.add_argument("--corpus", required=True)
    p.add_argument("--tokenizer", default="whitespace")
    p.set_defaults(func=cmd_stats)

    p = sub.add_parser("filter", help="drop over-long training examples")
    p.add_argument("--corpus", required=True)
    p.add_argument("--limit", type=int, required=True)
    p.add_argument("--tokenizer", default="whitespace")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_filter)

    p = sub.add_parser("split", help="seeded train/test split")
    p.add_argument("--corpus", required=True)
    p.add_argument("--train-frac", type=float, default=0.8)
    p.add_argument("--seed", type=int, default=13)
    p.add_argument("--out-train", required=True, help="training file (<s> format)")
    p.add_argument("--out-test", required=True, help="held-out brackets file")
    p.set_defaults(func=cmd_split)

    p = sub.add_parser("induce", help="maximum-likelihood PCFG from trees")
    p.add_argument("--treebank", required=True)
    p.add_argument("--order", type=int, default=2)
    p.add_argument("--unk", type=int, default=2)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_induce)

    p = sub.add_parser("parse-cyk", help="Viterbi-parse sentences with a PCFG")
    p.add_argument("--grammar", required=True)
    p.add_argument("--sentences", required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_parse_cyk)

    p = sub.add_parser("predict", help="batch inference against /generate")
    p.add_argument("--endpoint", default="")
    p.add_argument("--sentences", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--timeout", type=float, default=60.0)
    p.add_argument("--max-in-flight", type=int, default=4)
    p.add_argument("--max-new-tokens", type=int, default=512)
    p.add_argument("--stop", default="</s>")
    p.add_argument("--temperature", type=float, default=0.0)
    p.add_argument("--template", default="<s>{sentence}</s>\n<s>")
    p.set_defaults(func=cmd_predict)

    p = sub.add_parser("repair", help="normalize raw generations")
    p.add_argument("--raw", required=True, help="JSONL from predict, or plain lines")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_repair)

    p = sub.add_parser("eval", help="labeled-bracket P/R/F1")
    p.add_argument("--gold", required=True)
    p.add_argument("--pred", required=True)
    p.add_argument("--include-preterminals", action="store_true")
    p.add_argument("--ignore", action="append", default=None,
                   help="label to ignore (repeatable; replaces the default Punct)")
    p.add_argument("--aggregate", choices=["micro", "macro"], default="micro")
    p.add_argument("--model-name", default="model")
    p.add_argument("--json-out")
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("render", help="draw trees as ascii or svg files")
    p.add_argument("--tree-file", required=True)
    p.add_argument("--format", choices=["ascii", "svg"], default="ascii")
    p.add_argument("--out", required=True, help="output directory")
    p.set_defaults(func=cmd_render)

    return parser


def run(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except CliError as exc:
        print(f"error: {exc.category}: {exc}", file=sys.stderr)
        return exc.code
    except (ConversionError, BracketParseError) as exc:
        print(f"error: data: {type(exc).__name__}: {exc}", file=sys.stderr)
        return DATA_EXIT
    except OSError as exc:
        print(f"error: data: {exc}", file=sys.stderr)
        return DATA_EXIT
    except ValueError as exc:
        print(f"error: usage: {exc}", file=sys.stderr)
        return USAGE_EXIT


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
