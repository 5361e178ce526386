"""The two CNN architectures and their analytic parameter counts.

Both stacks use stride-1 3x3 convolutions with 'same' padding, ReLU
activations and 2x2 max-pooling; that combination is what reproduces the
reference output shapes and parameter totals exactly.

* table3_model: rescale -> conv8 -> conv16 -> pool -> conv32 -> pool ->
  conv64 -> pool -> conv128 -> pool -> dropout -> flatten ->
  dense 512/256/128/64 -> dense 1 (sigmoid). 67,380,305 params at 512x512.
* table2_model: rescale -> conv32 -> pool -> conv64 -> pool -> conv128 ->
  pool -> dropout -> flatten -> dense 64/32 -> dense 2 (softmax).
  33,649,890 params at 512x512.
"""

from __future__ import annotations

from dataclasses import dataclass

import keras
from keras import layers

ARCHITECTURES = ("table2", "table3")

MIN_RESOLUTION = 32

_TABLE3_CONVS = (8, 16, 32, 64, 128)  # pooling after every conv except the first
_TABLE2_CONVS = (32, 64, 128)  # pooling after every conv


class UnsupportedResolutionError(Exception):
    pass


def _check_resolution(size: int) -> None:
    if size < MIN_RESOLUTION:
        raise UnsupportedResolutionError(f"input resolution {size} below minimum {MIN_RESOLUTION}")


@dataclass(frozen=True)
class ModelSpec:
    architecture: str
    resolution: int

    def __post_init__(self):
        if self.architecture not in ARCHITECTURES:
            raise ValueError(f"unknown architecture {self.architecture!r}")
        _check_resolution(self.resolution)

    @property
    def expected_params(self) -> int:
        return expected_param_count(self.architecture, self.resolution)

    def build(self, dropout: float = 0.5) -> keras.Model:
        return build_model(self.architecture, self.resolution, dropout=dropout)


def build_model(arch: str, size: int, dropout: float = 0.5) -> keras.Model:
    """Compiled model for `arch` at a square RGB input resolution.

    Uses the adaptive-moment optimizer; table3 trains against binary
    cross-entropy on its sigmoid unit, table2 against 2-way softmax
    cross-entropy. The built parameter count is checked against the
    analytic expectation.
    """
    _check_resolution(size)
    if arch == "table3":
        model = _build_table3(size, dropout)
        loss = keras.losses.BinaryCrossentropy()
    elif arch == "table2":
        model = _build_table2(size, dropout)
        loss = keras.losses.SparseCategoricalCrossentropy()
    else:
        raise ValueError(f"unknown architecture {arch!r}")
    model.compile(optimizer=keras.optimizers.Adam(), loss=loss, metrics=["accuracy"])
    expected = expected_param_count(arch, size)
    actual = model.count_params()
    if actual != expected:
        raise AssertionError(f"{arch}@{size}: built {actual} params, expected {expected}")
    return model


def _build_table3(size: int, dropout: float) -> keras.Model:
    inputs = keras.Input(shape=(size, size, 3))
    x = layers.Rescaling(1.0 / 255)(inputs)
    x = layers.Conv2D(8, 3, padding="same", activation="relu")(x)
    x = layers.Conv2D(16, 3, padding="same", activation="relu")(x)
    x = layers.MaxPooling2D()(x)
    for filters in (32, 64, 128):
        x = layers.Conv2D(filters, 3, padding="same", activation="relu")(x)
        x = layers.MaxPooling2D()(x)
    x = layers.Dropout(dropout)(x)
    x = layers.Flatten()(x)
    for units in (512, 256, 128, 64):
        x = layers.Dense(units, activation="relu")(x)
    outputs = layers.Dense(1, activation="sigmoid")(x)
    return keras.Model(inputs, outputs, name="table3_model")


def _build_table2(size: int, dropout: float) -> keras.Model:
    inputs = keras.Input(shape=(size, size, 3))
    x = layers.Rescaling(1.0 / 255)(inputs)
    for filters in _TABLE2_CONVS:
        x = layers.Conv2D(filters, 3, padding="same", activation="relu")(x)
        x = layers.MaxPooling2D()(x)
    x = layers.Dropout(dropout)(x)
    x = layers.Flatten()(x)
    x = layers.Dense(64, activation="relu")(x)
    x = layers.Dense(32, activation="relu")(x)
    outputs = layers.Dense(2, activation="softmax")(x)
    return keras.Model(inputs, outputs, name="table2_model")


def _conv_params(channels_in: int, filters: int) -> int:
    return 3 * 3 * channels_in * filters + filters


def expected_param_count(arch: str, size: int) -> int:
    """Analytic trainable-parameter count; convolutions are
    resolution-invariant, only the flatten/dense interface scales."""
    _check_resolution(size)
    if arch == "table3":
        convs = _TABLE3_CONVS
        pools = 4
        dense_stack = (512, 256, 128, 64, 1)
    elif arch == "table2":
        convs = _TABLE2_CONVS
        pools = 3
        dense_stack = (64, 32, 2)
    else:
        raise ValueError(f"unknown architecture {arch!r}")

    total = 0
    channels = 3
    for filters in convs:
        total += _conv_params(channels, filters)
        channels = filters
    side = size
    for _ in range(pools):
        side //= 2
    width = side * side * channels
    for units in dense_stack:
        total += width * units + units
        width = units
    return total
