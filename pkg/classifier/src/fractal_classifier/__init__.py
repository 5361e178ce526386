"""Desk-scale CNN harness for behaviour-fingerprint images.

Model building and training live in `fractal_classifier.models` and
`fractal_classifier.training`; importing them pulls in TensorFlow, so the
package root only re-exports the light data/metrics layer.
"""

from .data import (
    DatasetError,
    DatasetSplit,
    LabeledImage,
    load_labeled_images,
    split_dataset,
    split_from_dict,
    split_to_dict,
)
from .metrics import EmptyTestSetError, MetricsReport, confusion_from_scores

__all__ = [
    "DatasetError",
    "DatasetSplit",
    "EmptyTestSetError",
    "LabeledImage",
    "MetricsReport",
    "confusion_from_scores",
    "load_labeled_images",
    "split_dataset",
    "split_from_dict",
    "split_to_dict",
]

__version__ = "0.1.0"
