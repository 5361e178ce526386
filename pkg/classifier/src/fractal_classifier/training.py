"""Training and evaluation on fingerprint PNGs via tf.data pipelines."""

from __future__ import annotations

from typing import Sequence

import keras
import numpy as np
import tensorflow as tf

from .data import DatasetSplit, LabeledImage
from .metrics import EmptyTestSetError, MetricsReport, confusion_from_scores

OOM_GUIDANCE = (
    "out of memory during training; lower the input resolution or the batch size "
    "(e.g. 768px at batch 16 needs tens of GB of RAM)"
)


def model_input_size(model: keras.Model) -> int:
    return int(model.input_shape[1])


def make_dataset(
    items: Sequence[LabeledImage],
    size: int,
    batch_size: int,
    shuffle: bool = False,
    seed: int = 0,
) -> tf.data.Dataset:
    paths = [str(item.path) for item in items]
    labels = [item.label for item in items]

    def load(path, label):
        data = tf.io.read_file(path)
        image = tf.image.decode_png(data, channels=3)
        image = tf.image.resize(image, (size, size))
        return image, tf.cast(label, tf.int32)

    dataset = tf.data.Dataset.from_tensor_slices((paths, labels))
    if shuffle:
        dataset = dataset.shuffle(min(len(paths), 4096), seed=seed, reshuffle_each_iteration=True)
    return dataset.map(load, num_parallel_calls=tf.data.AUTOTUNE).batch(batch_size).prefetch(
        tf.data.AUTOTUNE
    )


class _StopAtValAccuracy(keras.callbacks.Callback):
    """Stop early once validation accuracy saturates; epochs never exceed budget."""

    def __init__(self, target: float):
        super().__init__()
        self.target = target

    def on_epoch_end(self, epoch, logs=None):
        if logs and logs.get("val_accuracy", 0.0) >= self.target:
            self.model.stop_training = True


def train(
    model: keras.Model,
    split: DatasetSplit,
    epochs: int,
    batch_size: int,
    seed: int,
    val_accuracy_target: float | None = None,
    verbose: int = 0,
) -> keras.callbacks.History:
    """Fit on the train split with validation tracking; history holds
    per-epoch accuracy/val_accuracy. Out-of-memory failures resurface as
    MemoryError with sizing guidance."""
    if not split.train or not split.val:
        raise ValueError("train and validation splits must be non-empty")
    keras.utils.set_random_seed(seed)
    size = model_input_size(model)
    train_ds = make_dataset(split.train, size, batch_size, shuffle=True, seed=seed)
    val_ds = make_dataset(split.val, size, batch_size)
    callbacks = []
    if val_accuracy_target is not None:
        callbacks.append(_StopAtValAccuracy(val_accuracy_target))
    try:
        return model.fit(
            train_ds, validation_data=val_ds, epochs=epochs, callbacks=callbacks, verbose=verbose
        )
    except (tf.errors.ResourceExhaustedError, MemoryError) as err:
        raise MemoryError(OOM_GUIDANCE) from err


def malware_probabilities(model: keras.Model, items: Sequence[LabeledImage], batch_size: int = 32) -> np.ndarray:
    """Per-sample malware probability for either architecture's output head."""
    size = model_input_size(model)
    dataset = make_dataset(items, size, batch_size)
    predictions = model.predict(dataset, verbose=0)
    if predictions.ndim == 2 and predictions.shape[1] == 2:  # softmax pair
        return predictions[:, 1]
    return predictions.reshape(-1)


def evaluate(
    model: keras.Model,
    test_items: Sequence[LabeledImage],
    batch_size: int = 32,
    threshold: float = 0.5,
) -> MetricsReport:
    if not test_items:
        raise EmptyTestSetError("test split is empty")
    probabilities = malware_probabilities(model, test_items, batch_size)
    labels = [item.label for item in test_items]
    return confusion_from_scores(labels, probabilities, threshold=threshold)
