"""Shared fixtures: fingerprint corpora generated through the renderer CLI.

The classifier consumes the renderer only through its external
interfaces: trace JSONL in, manifest.jsonl + PNGs out, driven here via
`python -m fractalizer batch` in a subprocess.
"""

from __future__ import annotations

import json
import os
import random
import subprocess
import sys

import pytest

os.environ.setdefault("TF_CPP_MIN_LOG_LEVEL", "2")


def chain_calls(rng: random.Random) -> list[str]:
    return [f"L{rng.randint(1, 40)}" for _ in range(rng.randint(20, 60))]


def loop_calls(rng: random.Random) -> list[str]:
    tokens = rng.sample([f"L{i}" for i in range(100, 112)], 3)
    calls: list[str] = []
    length = rng.randint(20, 60)
    while len(calls) < length:
        calls.extend([rng.choice(tokens)] * rng.randint(2, 6))
    return calls[:length]


def write_two_family_corpus(path, n: int, seed: int) -> None:
    """n traces: malware drawn from the chain generator, goodware from loops.

    Sequences are regenerated on collision and forced to touch at least two
    distinct tokens, so every trace yields a renderable, unique fingerprint.
    """
    rng = random.Random(seed)
    seen: set[tuple[str, ...]] = set()
    with open(path, "w", encoding="utf-8") as handle:
        for i in range(n):
            malware = i % 2 == 0
            while True:
                calls = chain_calls(rng) if malware else loop_calls(rng)
                if len(set(calls)) >= 2 and tuple(calls) not in seen:
                    seen.add(tuple(calls))
                    break
            record = {
                "id": f"s{i:05d}",
                "label": "malware" if malware else "goodware",
                "family": "Chain.Fam" if malware else None,
                "calls": calls,
            }
            handle.write(json.dumps(record) + "\n")


def render_corpus(tmp_dir, n: int, quadrant_px: int, seed: int):
    """Run the renderer CLI; returns the manifest path."""
    traces = tmp_dir / "traces.jsonl"
    write_two_family_corpus(traces, n, seed)
    out = tmp_dir / "rendered"
    subprocess.run(
        [
            sys.executable, "-m", "fractalizer", "batch",
            "--input", str(traces), "--out", str(out),
            "--size", str(quadrant_px), "--iters", "64", "--workers", "1",
        ],
        check=True,
        capture_output=True,
    )
    return out / "manifest.jsonl"


@pytest.fixture(scope="session")
def small_fingerprint_manifest(tmp_path_factory):
    """120 fingerprints at 32px quadrants (64x64 composites) for fast tests."""
    tmp_dir = tmp_path_factory.mktemp("fingerprints-small")
    return render_corpus(tmp_dir, 120, 32, seed=77)
