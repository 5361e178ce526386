"""Batch orchestration: trace files in, manifests/formulas/images/reports out.

Output tree of one batch run (all paths inside the manifest are relative
to the output directory, so equal inputs and config produce byte-identical
trees wherever they are written):

    manifest.jsonl    one JSON object per kept trace, in input order
    formulas.tsv      sample_id <TAB> quadrant <TAB> canonical text <TAB> hash
    duplicates.json   groups of samples sharing all four quadrant hashes
    images/           composite fingerprints (+ per-quadrant files on request)

Per-sample failures (degenerate quadrants) are recorded in the manifest
and never abort the batch. Timings live only in the returned summary,
never in the tree.
"""

from __future__ import annotations

import json
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, replace
from pathlib import Path
from typing import Iterable, Sequence

from .callgraph import build_graph
from .centrality import centrality_profile
from .compose import compose, composite_filename, quadrant_filename
from .formulas import (
    QUADRANTS,
    IterativeFormula,
    canonical_text,
    formula_hash,
    synthesize_all,
)
from .render import RenderConfig, config_digest, effective_max_iter, render_image, save_png
from .traces import ApiTrace, FormatError, parse_trace_file, preprocess

DEGENERATE_MARK = "degenerate"

SWEEP_RESOLUTIONS = (32, 64, 128, 192, 256, 384, 512, 768, 1024)


class EmptySweepError(Exception):
    """resolution_sweep was asked for zero resolutions."""


@dataclass
class BatchSummary:
    counts: dict[str, int]
    timings: dict[str, float]

    def to_dict(self) -> dict:
        return {"counts": self.counts, "timings": self.timings}


@dataclass(frozen=True)
class DuplicateGroup:
    hashes: tuple[str, str, str, str]
    members: tuple[str, ...]
    labels: dict[str, int]
    families: dict[str, int]


@dataclass(frozen=True)
class DuplicateReport:
    groups: tuple[DuplicateGroup, ...]

    def to_dict(self) -> dict:
        return {
            "groups": [
                {
                    "hashes": dict(zip([q.value for q in QUADRANTS], g.hashes)),
                    "members": list(g.members),
                    "labels": g.labels,
                    "families": g.families,
                }
                for g in self.groups
            ]
        }


def ingest_traces(inputs: Sequence[str | Path], fmt: str | None = None) -> list[ApiTrace]:
    """Parse all input files in order; sample ids must be unique run-wide."""
    traces: list[ApiTrace] = []
    seen: set[str] = set()
    for path in inputs:
        for trace in parse_trace_file(path, fmt):
            if trace.sample_id in seen:
                raise FormatError(0, f"duplicate sample id {trace.sample_id!r} across inputs")
            seen.add(trace.sample_id)
            traces.append(trace)
    return traces


def _quadrant_record(
    formula: IterativeFormula | None, config: RenderConfig
) -> dict[str, object]:
    if formula is None:
        return {"degenerate": True}
    return {
        "degenerate": False,
        "formula": canonical_text(formula),
        "hash": formula_hash(formula),
        "effective_max_iter": effective_max_iter(formula, config),
    }


def process_sample(
    trace: ApiTrace,
    config: RenderConfig,
    images_dir: Path,
    keep_quadrants: bool = False,
) -> dict[str, object]:
    """Run one trace end-to-end and write its images; returns the manifest entry."""
    graph = build_graph(trace)
    profile = centrality_profile(graph)
    formulas = synthesize_all(profile, source_id=trace.sample_id)

    quadrant_images = {
        q: render_image(f, config) if f is not None else None for q, f in formulas.items()
    }
    entry: dict[str, object] = {
        "sample_id": trace.sample_id,
        "label": trace.label.value,
        "family": trace.family,
        "n_calls": len(trace.calls),
        "n_vertices": len(graph.vertices),
        "n_edges": graph.weight_sum,
        "quadrants": {q.value: _quadrant_record(formulas[q], config) for q in QUADRANTS},
        "image": None,
        "config_digest": config_digest(config),
    }
    if all(image is None for image in quadrant_images.values()):
        return entry

    composite = compose(quadrant_images, config.width, config.height)
    name = composite_filename(trace.sample_id, config.width, config.height)
    save_png(composite.image, images_dir / name)
    entry["image"] = f"images/{name}"
    if keep_quadrants:
        kept: dict[str, str] = {}
        for quadrant, image in quadrant_images.items():
            if image is None:
                continue
            qname = quadrant_filename(trace.sample_id, quadrant, config.width, config.height)
            save_png(image, images_dir / qname)
            kept[quadrant.value] = f"images/{qname}"
        entry["quadrant_images"] = kept
    return entry


def dedupe_scan(entries: Iterable[dict]) -> DuplicateReport:
    """Group samples whose four quadrant hashes all coincide.

    Identical formulas plus a deterministic renderer imply identical
    images, so hashing formulas stands in for comparing rasters. Samples
    with no image at all (every quadrant degenerate) are skipped: there is
    no fingerprint to duplicate.
    """
    buckets: dict[tuple[str, str, str, str], list[dict]] = {}
    for entry in entries:
        if entry.get("image") is None:
            continue
        quadrants = entry["quadrants"]
        key = tuple(
            quadrants[q.value]["hash"] if not quadrants[q.value]["degenerate"] else DEGENERATE_MARK
            for q in QUADRANTS
        )
        buckets.setdefault(key, []).append(entry)

    groups = []
    for key, members in buckets.items():
        if len(members) < 2:
            continue
        ids = tuple(sorted(e["sample_id"] for e in members))
        labels: dict[str, int] = {}
        families: dict[str, int] = {}
        for e in members:
            labels[e["label"]] = labels.get(e["label"], 0) + 1
            family = e["family"] or ""
            families[family] = families.get(family, 0) + 1
        groups.append(DuplicateGroup(hashes=key, members=ids, labels=labels, families=families))
    groups.sort(key=lambda g: (-len(g.members), g.members[0]))
    return DuplicateReport(groups=tuple(groups))


def formulas_tsv(entries: Iterable[dict]) -> str:
    """Formula export: one line per non-degenerate quadrant of each sample."""
    lines = []
    for entry in entries:
        for quadrant in QUADRANTS:
            record = entry["quadrants"][quadrant.value]
            if record["degenerate"]:
                continue
            lines.append(
                f"{entry['sample_id']}\t{quadrant.value}\t{record['formula']}\t{record['hash']}"
            )
    return "".join(line + "\n" for line in lines)


def write_manifest(entries: Iterable[dict], path: Path) -> None:
    with open(path, "w", encoding="utf-8") as handle:
        for entry in entries:
            handle.write(json.dumps(entry, sort_keys=True) + "\n")


def read_manifest(path: str | Path) -> list[dict]:
    entries = []
    with open(path, encoding="utf-8") as handle:
        for line in handle:
            line = line.strip()
            if line:
                entries.append(json.loads(line))
    return entries


def run_batch(
    inputs: Sequence[str | Path],
    out_dir: str | Path,
    config: RenderConfig,
    min_len: int = 2,
    workers: int = 1,
    keep_quadrants: bool = False,
    fmt: str | None = None,
    preparsed: Sequence[ApiTrace] | None = None,
) -> BatchSummary:
    """Render every kept trace and write the full output tree.

    Sample-level work runs on a bounded worker pool; the manifest is
    written by a single writer in input order, so the tree is
    byte-identical for any worker count. Zero input files is a legal
    empty run.
    """
    started = time.perf_counter()
    out_dir = Path(out_dir)
    images_dir = out_dir / "images"
    images_dir.mkdir(parents=True, exist_ok=True)

    traces = list(preparsed) if preparsed is not None else ingest_traces(inputs, fmt)
    kept, report = preprocess(traces, min_len=min_len)
    ingest_done = time.perf_counter()

    def job(trace: ApiTrace) -> dict:
        return process_sample(trace, config, images_dir, keep_quadrants=keep_quadrants)

    if workers <= 1 or len(kept) <= 1:
        entries = [job(trace) for trace in kept]
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            entries = list(pool.map(job, kept))
    render_done = time.perf_counter()

    write_manifest(entries, out_dir / "manifest.jsonl")
    (out_dir / "formulas.tsv").write_text(formulas_tsv(entries), encoding="utf-8")
    duplicates = dedupe_scan(entries)
    (out_dir / "duplicates.json").write_text(
        json.dumps(duplicates.to_dict(), indent=2, sort_keys=True) + "\n", encoding="utf-8"
    )
    finished = time.perf_counter()

    composites = sum(1 for e in entries if e["image"] is not None)
    degenerate_quadrants = sum(
        1
        for e in entries
        for q in QUADRANTS
        if e["quadrants"][q.value]["degenerate"]
    )
    counts = {
        "input": report.input,
        "duplicates_removed": report.duplicates_removed,
        "too_short_removed": report.too_short_removed,
        "kept": report.kept,
        "composites_written": composites,
        "degenerate_quadrants": degenerate_quadrants,
        "duplicate_groups": len(duplicates.groups),
    }
    timings = {
        "ingest_s": round(ingest_done - started, 6),
        "render_s": round(render_done - ingest_done, 6),
        "total_s": round(finished - started, 6),
    }
    return BatchSummary(counts=counts, timings=timings)


def resolution_sweep(
    inputs: Sequence[str | Path],
    out_root: str | Path,
    resolutions: Sequence[int],
    config: RenderConfig,
    min_len: int = 2,
    workers: int = 1,
    keep_quadrants: bool = False,
    fmt: str | None = None,
) -> dict[int, str]:
    """One full batch tree per requested per-quadrant resolution.

    Writes sweep_index.json mapping resolution to its subdirectory.
    Re-running over the same inputs reproduces identical trees.
    """
    if not resolutions:
        raise EmptySweepError("no resolutions requested")
    out_root = Path(out_root)
    out_root.mkdir(parents=True, exist_ok=True)
    traces = ingest_traces(inputs, fmt)
    index: dict[int, str] = {}
    for size in resolutions:
        sized = replace(config, width=size, height=size)
        subdir = f"res_{size}x{size}"
        run_batch(
            [],
            out_root / subdir,
            sized,
            min_len=min_len,
            workers=workers,
            keep_quadrants=keep_quadrants,
            preparsed=traces,
        )
        index[size] = subdir
    (out_root / "sweep_index.json").write_text(
        json.dumps({str(k): v for k, v in sorted(index.items())}, indent=2) + "\n",
        encoding="utf-8",
    )
    return index
