"""Shared test helpers: corpus generators, directory hashing, strategies."""

from __future__ import annotations

import hashlib
import json
import random
from pathlib import Path

from hypothesis import strategies as st

from fractalizer.traces import ApiTrace, Label

api_tokens = st.from_regex(r"L[0-9]{1,3}", fullmatch=True)
call_sequences = st.lists(api_tokens, min_size=1, max_size=25).map(tuple)


def trace_strategy(min_calls: int = 1, max_calls: int = 25):
    return st.builds(
        ApiTrace,
        sample_id=st.uuids().map(str),
        label=st.sampled_from(list(Label)),
        family=st.one_of(st.none(), st.text(alphabet="abcXYZ.", min_size=1, max_size=8)),
        calls=st.lists(api_tokens, min_size=min_calls, max_size=max_calls).map(tuple),
    )


def tree_hash(root: Path) -> str:
    """Content hash over relative paths and bytes of every file under root."""
    digest = hashlib.sha256()
    for path in sorted(root.rglob("*")):
        if path.is_file():
            digest.update(path.relative_to(root).as_posix().encode())
            digest.update(b"\0")
            digest.update(path.read_bytes())
            digest.update(b"\0")
    return digest.hexdigest()


def chain_calls(rng: random.Random, vocab: int = 40, length: int | None = None) -> list[str]:
    """Walk-style sequence over a wide vocabulary: few repeats, many vertices."""
    length = length or rng.randint(20, 60)
    return [f"L{rng.randint(1, vocab)}" for _ in range(length)]


def loop_calls(rng: random.Random, vocab: int = 5, length: int | None = None) -> list[str]:
    """Tight-loop sequence: few tokens repeated in runs, heavy self-loops."""
    length = length or rng.randint(20, 60)
    tokens = [f"L{rng.randint(100, 100 + vocab)}" for _ in range(3)]
    calls: list[str] = []
    while len(calls) < length:
        token = rng.choice(tokens)
        calls.extend([token] * rng.randint(2, 6))
    return calls[:length]


def synthetic_corpus(path: Path, n: int, seed: int = 0) -> Path:
    """Write a deterministic mixed corpus of n traces as JSONL."""
    rng = random.Random(seed)
    with open(path, "w", encoding="utf-8") as handle:
        for i in range(n):
            maker = chain_calls if i % 2 == 0 else loop_calls
            record = {
                "id": f"s{i:04d}",
                "label": "malware" if i % 2 == 0 else "goodware",
                "family": None,
                "calls": maker(rng),
            }
            handle.write(json.dumps(record) + "\n")
    return path
