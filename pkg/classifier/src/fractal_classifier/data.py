"""Dataset assembly from fingerprint batch manifests.

Input is the renderer's manifest.jsonl; each entry with an image and a
malware/goodware label becomes one sample (malware = 1, goodware = 0).
Splitting is stratified per class and a pure function of (manifest order,
seed), so a fixed seed always reproduces the same membership.
"""

from __future__ import annotations

import json
import random
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

LABEL_TO_INT = {"goodware": 0, "malware": 1}

# reference split ratios: ~88.6% train, ~9.8% validation, remainder test
DEFAULT_TRAIN_FRAC = 0.886
DEFAULT_VAL_FRAC = 0.098


class DatasetError(Exception):
    pass


@dataclass(frozen=True)
class LabeledImage:
    path: Path
    label: int


@dataclass(frozen=True)
class DatasetSplit:
    train: tuple[LabeledImage, ...]
    val: tuple[LabeledImage, ...]
    test: tuple[LabeledImage, ...]

    def __post_init__(self):
        paths = [item.path for part in (self.train, self.val, self.test) for item in part]
        if len(paths) != len(set(paths)):
            raise DatasetError("splits overlap")
        for name, part in (("train", self.train), ("val", self.val), ("test", self.test)):
            if {item.label for item in part} != {0, 1}:
                raise DatasetError(f"{name} split must contain both classes")


def load_labeled_images(manifest_path: str | Path) -> list[LabeledImage]:
    """Labeled image list from a manifest; unlabeled or imageless entries skipped."""
    manifest_path = Path(manifest_path)
    base = manifest_path.parent
    items: list[LabeledImage] = []
    with open(manifest_path, encoding="utf-8") as handle:
        for line in handle:
            line = line.strip()
            if not line:
                continue
            entry = json.loads(line)
            label = LABEL_TO_INT.get(entry.get("label"))
            image = entry.get("image")
            if label is None or not image:
                continue
            items.append(LabeledImage(path=base / image, label=label))
    if not items:
        raise DatasetError(f"{manifest_path}: no labeled images")
    return items


def split_dataset(
    items: Sequence[LabeledImage],
    seed: int,
    train_frac: float = DEFAULT_TRAIN_FRAC,
    val_frac: float = DEFAULT_VAL_FRAC,
    test_size: int | None = None,
) -> DatasetSplit:
    """Stratified train/val/test split, deterministic in (items, seed).

    With test_size=None the test set is the remainder after the train and
    validation fractions; otherwise test_size items are reserved for test
    (stratified) and the fractions divide the rest.
    """
    if not 0 < train_frac < 1 or not 0 < val_frac < 1 or train_frac + val_frac >= 1:
        raise ValueError("fractions must be in (0, 1) and sum below 1")
    rng = random.Random(seed)
    by_class: dict[int, list[LabeledImage]] = {0: [], 1: []}
    for item in items:
        by_class.setdefault(item.label, []).append(item)
    if not by_class[0] or not by_class[1]:
        raise DatasetError("need samples of both classes")

    total = len(items)
    train: list[LabeledImage] = []
    val: list[LabeledImage] = []
    test: list[LabeledImage] = []
    for label in sorted(by_class):
        pool = by_class[label][:]
        rng.shuffle(pool)
        if test_size is None:
            n_train = round(train_frac * len(pool))
            n_val = round(val_frac * len(pool))
            n_test = len(pool) - n_train - n_val
        else:
            n_test = round(test_size * len(pool) / total)
            rest = len(pool) - n_test
            n_train = round(rest * train_frac / (train_frac + val_frac))
            n_val = rest - n_train
        if min(n_train, n_val, n_test) < 1:
            raise DatasetError(
                f"class {label}: {len(pool)} samples cannot fill all three splits"
            )
        test.extend(pool[:n_test])
        val.extend(pool[n_test : n_test + n_val])
        train.extend(pool[n_test + n_val :])
    for part in (train, val, test):
        rng.shuffle(part)
    return DatasetSplit(train=tuple(train), val=tuple(val), test=tuple(test))


def split_to_dict(split: DatasetSplit) -> dict:
    return {
        name: [{"path": str(item.path), "label": item.label} for item in part]
        for name, part in (("train", split.train), ("val", split.val), ("test", split.test))
    }


def split_from_dict(payload: dict) -> DatasetSplit:
    def part(name: str) -> tuple[LabeledImage, ...]:
        return tuple(LabeledImage(path=Path(i["path"]), label=int(i["label"])) for i in payload[name])

    return DatasetSplit(train=part("train"), val=part("val"), test=part("test"))
