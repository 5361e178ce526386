"""Command-line interface.

Subcommands: ingest, render, batch, sweep, dedupe, export-formulas,
graph-dot. Settings resolve with precedence CLI flag > config file
(flat key=value lines) > built-in default. Exit codes: 0 success,
1 usage error, 2 I/O or format error, 3 empty result where output was
required.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .callgraph import build_graph, export_dot
from .centrality import centrality_profile
from .compose import compose, composite_filename, quadrant_filename
from .formulas import QUADRANTS, canonical_text, formula_hash, synthesize_all
from .pipeline import (
    SWEEP_RESOLUTIONS,
    EmptySweepError,
    dedupe_scan,
    formulas_tsv,
    ingest_traces,
    read_manifest,
    resolution_sweep,
    run_batch,
)
from .render import IterMode, RenderConfig, render_image, save_png
from .traces import EmptyInputError, FormatError, preprocess, validate_trace_file

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_IO = 2
EXIT_EMPTY = 3

DEFAULTS: dict[str, object] = {
    "format": None,
    "min_len": 2,
    "size": 512,
    "iters": 64,
    "iter_mode": "set1",
    "escape_radius": 2.0,
    "range": "-2,2,-2,2",
    "workers": 1,
    "keep_quadrants": False,
    "adaptive_scale": 8,
    "sizes": ",".join(str(r) for r in SWEEP_RESOLUTIONS),
    "seed": None,
}

_INT_KEYS = {"min_len", "size", "iters", "workers", "adaptive_scale", "seed"}
_FLOAT_KEYS = {"escape_radius"}
_BOOL_KEYS = {"keep_quadrants"}


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _read_config_file(path: str) -> dict[str, object]:
    values: dict[str, object] = {}
    for line_no, raw in enumerate(Path(path).read_text(encoding="utf-8").splitlines(), 1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise ValueError(f"{path}:{line_no}: expected key=value, got {line!r}")
        key, _, value = line.partition("=")
        key = key.strip()
        value = value.strip()
        if key not in DEFAULTS:
            raise ValueError(f"{path}:{line_no}: unknown setting {key!r}")
        if key in _INT_KEYS:
            values[key] = int(value)
        elif key in _FLOAT_KEYS:
            values[key] = float(value)
        elif key in _BOOL_KEYS:
            values[key] = value.lower() in ("1", "true", "yes", "on")
        else:
            values[key] = value
    return values


def _resolve_settings(args: argparse.Namespace) -> dict[str, object]:
    settings = dict(DEFAULTS)
    if getattr(args, "config", None):
        settings.update(_read_config_file(args.config))
    for key in DEFAULTS:
        cli_value = getattr(args, key, None)
        if cli_value is not None:
            settings[key] = cli_value
    return settings


def _parse_plane_range(text: str) -> tuple[tuple[float, float], tuple[float, float]]:
    parts = [float(p) for p in str(text).split(",")]
    if len(parts) != 4:
        raise ValueError(f"--range expects re_min,re_max,im_min,im_max, got {text!r}")
    return (parts[0], parts[1]), (parts[2], parts[3])


def _render_config(settings: dict[str, object]) -> RenderConfig:
    re_range, im_range = _parse_plane_range(str(settings["range"]))
    return RenderConfig(
        width=int(settings["size"]),
        height=int(settings["size"]),
        re_range=re_range,
        im_range=im_range,
        escape_radius=float(settings["escape_radius"]),
        max_iter=int(settings["iters"]),
        iter_mode=IterMode(str(settings["iter_mode"])),
        adaptive_scale=int(settings["adaptive_scale"]),
    )


def _parse_sizes(text: str) -> list[int]:
    text = text.strip()
    if not text:
        return []
    return [int(p) for p in text.split(",") if p.strip()]


def cmd_ingest(args: argparse.Namespace) -> int:
    settings = _resolve_settings(args)
    fmt = settings["format"]
    traces = []
    for path in args.input:
        file_traces, problems = validate_trace_file(path, fmt)
        print(f"{path}: {len(file_traces)} valid, {len(problems)} malformed")
        for problem in problems:
            print(f"  {problem}")
        traces.extend(file_traces)
    if not traces:
        print("no valid records", file=sys.stderr)
        return EXIT_EMPTY
    _, report = preprocess(traces, min_len=int(settings["min_len"]))
    print(
        f"preprocess: input={report.input} duplicates_removed={report.duplicates_removed} "
        f"too_short_removed={report.too_short_removed} kept={report.kept}"
    )
    return EXIT_OK


def cmd_render(args: argparse.Namespace) -> int:
    settings = _resolve_settings(args)
    config = _render_config(settings)
    traces = ingest_traces(args.input, settings["format"])
    if args.id is not None:
        matching = [t for t in traces if t.sample_id == args.id]
        if not matching:
            print(f"sample id {args.id!r} not found", file=sys.stderr)
            return EXIT_EMPTY
        trace = matching[0]
    else:
        trace = traces[0]

    profile = centrality_profile(build_graph(trace))
    formulas = synthesize_all(profile, source_id=trace.sample_id)
    for quadrant in QUADRANTS:
        formula = formulas[quadrant]
        if formula is None:
            print(f"{trace.sample_id}\t{quadrant.value}\tdegenerate")
        else:
            print(
                f"{trace.sample_id}\t{quadrant.value}\t{canonical_text(formula)}"
                f"\t{formula_hash(formula)}"
            )

    if args.out is not None:
        out_dir = Path(args.out)
        out_dir.mkdir(parents=True, exist_ok=True)
        workers = int(settings["workers"])
        images = {
            q: render_image(f, config, workers=workers) if f is not None else None
            for q, f in formulas.items()
        }
        if all(image is None for image in images.values()):
            print("all quadrants degenerate; no image written", file=sys.stderr)
            return EXIT_EMPTY
        composite = compose(images, config.width, config.height)
        name = composite_filename(trace.sample_id, config.width, config.height)
        save_png(composite.image, out_dir / name)
        print(f"wrote {out_dir / name}")
        if settings["keep_quadrants"]:
            for quadrant, image in images.items():
                if image is None:
                    continue
                qname = quadrant_filename(trace.sample_id, quadrant, config.width, config.height)
                save_png(image, out_dir / qname)
                print(f"wrote {out_dir / qname}")
    return EXIT_OK


def cmd_batch(args: argparse.Namespace) -> int:
    settings = _resolve_settings(args)
    config = _render_config(settings)
    summary = run_batch(
        args.input,
        args.out,
        config,
        min_len=int(settings["min_len"]),
        workers=int(settings["workers"]),
        keep_quadrants=bool(settings["keep_quadrants"]),
        fmt=settings["format"],
    )
    print(json.dumps(summary.to_dict(), indent=2))
    return EXIT_OK


def cmd_sweep(args: argparse.Namespace) -> int:
    settings = _resolve_settings(args)
    config = _render_config(settings)
    resolutions = _parse_sizes(str(settings["sizes"]))
    index = resolution_sweep(
        args.input,
        args.out,
        resolutions,
        config,
        min_len=int(settings["min_len"]),
        workers=int(settings["workers"]),
        keep_quadrants=bool(settings["keep_quadrants"]),
        fmt=settings["format"],
    )
    print(json.dumps({str(k): v for k, v in sorted(index.items())}, indent=2))
    return EXIT_OK


def cmd_dedupe(args: argparse.Namespace) -> int:
    report = dedupe_scan(read_manifest(args.input))
    text = json.dumps(report.to_dict(), indent=2, sort_keys=True)
    if args.out:
        Path(args.out).write_text(text + "\n", encoding="utf-8")
        print(f"wrote {args.out}")
    else:
        print(text)
    return EXIT_OK


def cmd_export_formulas(args: argparse.Namespace) -> int:
    text = formulas_tsv(read_manifest(args.input))
    if args.out:
        Path(args.out).write_text(text, encoding="utf-8")
        print(f"wrote {args.out}")
    else:
        sys.stdout.write(text)
    return EXIT_OK


def cmd_graph_dot(args: argparse.Namespace) -> int:
    settings = _resolve_settings(args)
    traces = ingest_traces(args.input, settings["format"])
    if args.id is not None:
        traces = [t for t in traces if t.sample_id == args.id]
        if not traces:
            print(f"sample id {args.id!r} not found", file=sys.stderr)
            return EXIT_EMPTY
    if args.out:
        out_dir = Path(args.out)
        out_dir.mkdir(parents=True, exist_ok=True)
        for trace in traces:
            path = out_dir / f"{trace.sample_id}.dot"
            path.write_text(export_dot(build_graph(trace)), encoding="utf-8")
            print(f"wrote {path}")
    else:
        for trace in traces:
            sys.stdout.write(export_dot(build_graph(trace)))
    return EXIT_OK


def _add_common(parser: argparse.ArgumentParser, *, inputs: bool = True) -> None:
    if inputs:
        parser.add_argument("--input", nargs="+", required=True, help="trace file(s)")
        parser.add_argument("--format", choices=["jsonl", "csv"], default=None)
    parser.add_argument("--config", default=None, help="key=value settings file")
    parser.add_argument("--seed", type=int, default=None, help="reserved; the core is deterministic")


def _add_render_options(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--size", type=int, default=None, help="per-quadrant pixels (default 512)")
    parser.add_argument("--iters", type=int, default=None, help="fixed iteration budget (default 64)")
    parser.add_argument("--iter-mode", dest="iter_mode", choices=["set1", "set2"], default=None)
    parser.add_argument("--escape-radius", dest="escape_radius", type=float, default=None)
    parser.add_argument("--range", default=None, help="re_min,re_max,im_min,im_max (default -2,2,-2,2)")
    parser.add_argument("--workers", type=int, default=None)
    parser.add_argument(
        "--keep-quadrants", dest="keep_quadrants", action="store_true", default=None,
        help="also write the four per-quadrant images",
    )
    parser.add_argument("--min-len", dest="min_len", type=int, default=None)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="fractalizer", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("ingest", help="validate trace files and report preprocessing counts")
    _add_common(p)
    p.add_argument("--min-len", dest="min_len", type=int, default=None)
    p.set_defaults(func=cmd_ingest)

    p = sub.add_parser("render", help="render one sample and print its formulas")
    _add_common(p)
    _add_render_options(p)
    p.add_argument("--id", default=None, help="sample id (default: first trace)")
    p.add_argument("--out", default=None, help="directory for the composite image")
    p.set_defaults(func=cmd_render)

    p = sub.add_parser("batch", help="render a corpus into an output tree")
    _add_common(p)
    _add_render_options(p)
    p.add_argument("--out", required=True, help="output directory")
    p.set_defaults(func=cmd_batch)

    p = sub.add_parser("sweep", help="run the batch at several resolutions")
    _add_common(p)
    _add_render_options(p)
    p.add_argument("--out", required=True, help="sweep root directory")
    p.add_argument("--sizes", default=None, help="comma-separated per-quadrant sizes")
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("dedupe", help="group samples with identical quadrant hashes")
    p.add_argument("--input", required=True, help="path to manifest.jsonl")
    p.add_argument("--out", default=None, help="write the report here instead of stdout")
    p.set_defaults(func=cmd_dedupe)

    p = sub.add_parser("export-formulas", help="emit the formula TSV from a manifest")
    p.add_argument("--input", required=True, help="path to manifest.jsonl")
    p.add_argument("--out", default=None, help="write the TSV here instead of stdout")
    p.set_defaults(func=cmd_export_formulas)

    p = sub.add_parser("graph-dot", help="export call graphs as DOT text")
    _add_common(p)
    p.add_argument("--id", default=None, help="sample id (default: all)")
    p.add_argument("--out", default=None, help="directory for .dot files")
    p.set_defaults(func=cmd_graph_dot)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        return args.func(args)
    except FormatError as err:
        print(f"fractalizer: format error: {err}", file=sys.stderr)
        return EXIT_IO
    except EmptyInputError as err:
        print(f"fractalizer: {err}", file=sys.stderr)
        return EXIT_EMPTY
    except EmptySweepError as err:
        print(f"fractalizer: {err}", file=sys.stderr)
        return EXIT_USAGE
    except OSError as err:
        print(f"fractalizer: {err}", file=sys.stderr)
        return EXIT_IO
    except ValueError as err:
        print(f"fractalizer: {err}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    raise SystemExit(main())
