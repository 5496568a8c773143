"""trainserve command line: ``train`` and ``serve``."""

from __future__ import annotations

import argparse
import sys

from trainserve.data import MalformedTrainingFile
from trainserve.serve import serve
from trainserve.train import TrainConfig, finetune


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="trainserve",
        description="Fine-tune a causal LM on <s>-format training files and "
        "serve the /generate protocol.",
    )
    sub = parser.add_subparsers(dest="subcommand", required=True)

    p = sub.add_parser("train", help="fine-tune and save a model")
    p.add_argument("--train-file", required=True)
    p.add_argument("--output-dir", required=True)
    p.add_argument("--base-model", default="tiny",
                   help="'tiny' builds a small fresh model; a directory "
                   "continues from a previous save")
    p.add_argument("--epochs", type=int, default=5)
    p.add_argument("--max-seq-len", type=int, default=256)
    p.add_argument("--learning-rate", type=float, default=5e-4)
    p.add_argument("--batch-size", type=int, default=8)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--mask-prompt-loss", action="store_true",
                   help="loss over the analysis tokens only")

    p = sub.add_parser("serve", help="serve a saved model")
    p.add_argument("--model-dir", required=True)
    p.add_argument("--port", type=int, default=8080)
    p.add_argument("--host", default="127.0.0.1")

    return parser


def run(argv=None) -> int:
    args = build_parser().parse_args(argv)
    if args.subcommand == "train":
        cfg = TrainConfig(
            train_file=args.train_file,
            output_dir=args.output_dir,
            base_model=args.base_model,
            epochs=args.epochs,
            max_seq_len=args.max_seq_len,
            learning_rate=args.learning_rate,
            batch_size=args.batch_size,
            seed=args.seed,
            mask_prompt_loss=args.mask_prompt_loss,
        )
        try:
            result = finetune(cfg)
        except (MalformedTrainingFile, FileNotFoundError) as exc:
            print(f"error: {exc}", file=sys.stderr)
            return 3
        print(
            f"trained {result.steps} steps; loss {result.first_loss:.4f} -> "
            f"{result.final_loss:.4f}; saved to {result.output_dir}"
        )
        return 0
    serve(args.model_dir, args.port, args.host)
    return 0


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
