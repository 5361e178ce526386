"""CLI: train a fingerprint classifier, evaluate a saved model.

`train` consumes a renderer manifest (labels + image paths), splits it
deterministically by seed, fits the chosen architecture and saves the
model, the split membership and the training history. `eval` loads a
saved model plus the recorded split and emits metrics JSON and a
confusion-matrix CSV.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path


def cmd_train(args: argparse.Namespace) -> int:
    import keras  # deferred: slow import

    from .data import load_labeled_images, split_dataset, split_to_dict
    from .models import build_model
    from .training import evaluate, train

    items = load_labeled_images(args.manifest)
    split = split_dataset(items, seed=args.seed, test_size=args.test_size)
    model = build_model(args.arch, args.size, dropout=args.dropout)

    history = train(
        model, split, epochs=args.epochs, batch_size=args.batch, seed=args.seed,
        val_accuracy_target=args.val_accuracy_target, verbose=args.verbose,
    )

    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    model.save(out / "model.keras")
    (out / "split.json").write_text(json.dumps(split_to_dict(split), indent=2), encoding="utf-8")
    (out / "history.json").write_text(
        json.dumps({k: [float(v) for v in vs] for k, vs in history.history.items()}, indent=2),
        encoding="utf-8",
    )
    report = evaluate(model, split.test, batch_size=args.batch)
    (out / "metrics.json").write_text(json.dumps(report.to_dict(), indent=2), encoding="utf-8")
    (out / "confusion.csv").write_text(report.confusion_csv(), encoding="utf-8")
    print(json.dumps({"epochs_run": len(history.history["accuracy"]), **report.to_dict()}, indent=2))
    return 0


def cmd_eval(args: argparse.Namespace) -> int:
    import keras

    from .data import split_from_dict
    from .training import evaluate

    model = keras.models.load_model(args.model)
    split_path = Path(args.split) if args.split else Path(args.model).parent / "split.json"
    split = split_from_dict(json.loads(Path(split_path).read_text(encoding="utf-8")))
    report = evaluate(model, split.test, batch_size=args.batch)
    if args.out:
        out = Path(args.out)
        out.mkdir(parents=True, exist_ok=True)
        (out / "metrics.json").write_text(json.dumps(report.to_dict(), indent=2), encoding="utf-8")
        (out / "confusion.csv").write_text(report.confusion_csv(), encoding="utf-8")
    print(json.dumps(report.to_dict(), indent=2))
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="fractal-classifier", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("train", help="train on a rendered fingerprint corpus")
    p.add_argument("--manifest", required=True, help="renderer manifest.jsonl")
    p.add_argument("--arch", choices=["table2", "table3"], default="table3")
    p.add_argument("--size", type=int, default=512, help="input resolution")
    p.add_argument("--epochs", type=int, default=5)
    p.add_argument("--batch", type=int, default=16)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--dropout", type=float, default=0.5)
    p.add_argument("--test-size", dest="test_size", type=int, default=None)
    p.add_argument("--val-accuracy-target", dest="val_accuracy_target", type=float, default=None,
                   help="stop early once validation accuracy reaches this value")
    p.add_argument("--verbose", type=int, default=0)
    p.add_argument("--out", required=True, help="directory for model + reports")
    p.set_defaults(func=cmd_train)

    p = sub.add_parser("eval", help="evaluate a saved model on its recorded test split")
    p.add_argument("--model", required=True, help="path to model.keras")
    p.add_argument("--split", default=None, help="split.json (default: next to the model)")
    p.add_argument("--batch", type=int, default=32)
    p.add_argument("--out", default=None, help="directory for metrics.json + confusion.csv")
    p.set_defaults(func=cmd_eval)

    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except MemoryError as err:
        print(f"fractal-classifier: {err}", file=sys.stderr)
        return 2
    except (OSError, ValueError) as err:
        print(f"fractal-classifier: {err}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    raise SystemExit(main())
