"""Assembly of four quadrant renders into the 2x2 composite fingerprint.

Placement is fixed: Q1_in top-left, Q2_all top-right, Q3_out bottom-left,
Q4_diff bottom-right. A degenerate quadrant (no synthesizable polynomial)
is filled with mid-gray so it stays distinguishable from interior black
and from palette colors.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping

import numpy as np

from .formulas import QUADRANTS, Quadrant
from .render import FractalImage

DEGENERATE_FILL = (128, 128, 128)

# quadrant -> (row block, column block)
LAYOUT = {
    Quadrant.Q1_IN: (0, 0),
    Quadrant.Q2_ALL: (0, 1),
    Quadrant.Q3_OUT: (1, 0),
    Quadrant.Q4_DIFF: (1, 1),
}


class DimensionMismatchError(Exception):
    """A quadrant image does not match the declared quadrant size."""


@dataclass(frozen=True, eq=False)
class QuadrantComposite:
    image: FractalImage  # (2h, 2w, 3)
    degenerate: frozenset[Quadrant]


def compose(
    quadrants: Mapping[Quadrant, FractalImage | None], width: int, height: int
) -> QuadrantComposite:
    """Place the four w x h quadrants into a 2w x 2h composite.

    A missing (None) quadrant is treated as degenerate and gray-filled.
    The provenance chunk maps each quadrant to its formula hash or
    "degenerate", plus the shared render-config digest.
    """
    pixels = np.empty((2 * height, 2 * width, 3), dtype=np.uint8)
    degenerate: set[Quadrant] = set()
    provenance: dict[str, str] = {}
    for quadrant in QUADRANTS:
        image = quadrants.get(quadrant)
        row, col = LAYOUT[quadrant]
        block = pixels[row * height : (row + 1) * height, col * width : (col + 1) * width]
        if image is None:
            block[:] = DEGENERATE_FILL
            degenerate.add(quadrant)
            provenance[quadrant.value] = "degenerate"
        else:
            if image.pixels.shape != (height, width, 3):
                raise DimensionMismatchError(
                    f"{quadrant.value}: expected {width}x{height}, "
                    f"got {image.pixels.shape[1]}x{image.pixels.shape[0]}"
                )
            block[:] = image.pixels
            provenance[quadrant.value] = image.provenance.get("formula", "")
            provenance.setdefault("config", image.provenance.get("config", ""))
    composite = FractalImage(pixels=pixels, provenance=provenance)
    return QuadrantComposite(image=composite, degenerate=frozenset(degenerate))


def composite_filename(sample_id: str, width: int, height: int) -> str:
    """`<sample_id>_<WxH>.png` named by composite (2w x 2h) dimensions."""
    return f"{sample_id}_{2 * width}x{2 * height}.png"


def quadrant_filename(sample_id: str, quadrant: Quadrant, width: int, height: int) -> str:
    return f"{sample_id}_{quadrant.value}_{width}x{height}.png"
