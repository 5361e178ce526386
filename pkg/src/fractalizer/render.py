"""Deterministic escape-time rendering of iterative polynomial formulas.

The iteration contract, shared by the scalar reference implementation and
the vectorized kernel:

* pixel (col, row) samples the plane at its center, with row 0 at the top
  (+Im): x = re_min + (col+0.5)*dre, y = im_max - (row+0.5)*dim;
* the starting point is tested before iterating, so |z0| > radius reports
  escape index 0; escape right after the first iteration also reports 0;
* per iteration z <- sum(c_i * z^e_i) (+ julia constant when configured),
  then z escapes when |z| > radius, evaluated in squared-magnitude form
  (re^2 + im^2 > radius^2) so |z| == radius continues iterating;
* overflow to inf or NaN counts as escape at that iteration;
* cells that never escape within the iteration budget are interior.

All arithmetic runs on explicit re/im float64 pairs. Single IEEE ops are
exactly specified, which makes the field bit-identical across the scalar
path, any row-band partitioning and any worker count, and makes the field
of a real-coefficient formula exactly conjugation-symmetric when im_range
is symmetric (the pixel grid is computed in an integer-numerator form
that is exactly antisymmetric for symmetric ranges).
"""

from __future__ import annotations

import hashlib
import json
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from enum import Enum
from pathlib import Path

import numpy as np
from PIL import Image
from PIL.PngImagePlugin import PngInfo

from .formulas import IterativeFormula, formula_hash

PROVENANCE_KEY = "fractalizer:provenance"

ADAPTIVE_MIN_ITER = 16
ADAPTIVE_MAX_ITER = 256

_BAND_ROWS = 64


class IterMode(str, Enum):
    FIXED_SET1 = "set1"
    ADAPTIVE_SET2 = "set2"


@dataclass(frozen=True)
class RenderConfig:
    width: int
    height: int
    re_range: tuple[float, float] = (-2.0, 2.0)
    im_range: tuple[float, float] = (-2.0, 2.0)
    escape_radius: float = 2.0
    max_iter: int = 64
    iter_mode: IterMode = IterMode.FIXED_SET1
    adaptive_scale: int = 8
    julia_constant: complex | None = None
    palette_id: str = "classic"

    def __post_init__(self):
        if self.width < 1 or self.height < 1:
            raise ValueError("image dimensions must be positive")
        if not self.re_range[0] < self.re_range[1]:
            raise ValueError("re_range must have positive length")
        if not self.im_range[0] < self.im_range[1]:
            raise ValueError("im_range must have positive length")
        if self.escape_radius <= 0:
            raise ValueError("escape_radius must be positive")
        if self.max_iter < 1:
            raise ValueError("max_iter must be >= 1")
        if self.adaptive_scale < 1:
            raise ValueError("adaptive_scale must be >= 1")
        if self.palette_id != "classic":
            raise ValueError(f"unknown palette {self.palette_id!r}")


def config_digest(config: RenderConfig) -> str:
    """Stable hex digest of every field that affects rendered bytes."""
    parts = [
        f"width={config.width}",
        f"height={config.height}",
        f"re_range={config.re_range[0]!r},{config.re_range[1]!r}",
        f"im_range={config.im_range[0]!r},{config.im_range[1]!r}",
        f"escape_radius={config.escape_radius!r}",
        f"max_iter={config.max_iter}",
        f"iter_mode={config.iter_mode.value}",
        f"adaptive_scale={config.adaptive_scale}",
        f"julia_constant={config.julia_constant!r}",
        f"palette={config.palette_id}",
    ]
    return hashlib.sha256(";".join(parts).encode("ascii")).hexdigest()


@dataclass(frozen=True, eq=False)
class EscapeField:
    """Per-cell escape indices; -1 marks interior cells."""

    iterations: np.ndarray  # int32, shape (height, width)
    budget: int

    @property
    def height(self) -> int:
        return self.iterations.shape[0]

    @property
    def width(self) -> int:
        return self.iterations.shape[1]

    def interior_fraction(self) -> float:
        return float((self.iterations < 0).mean())


@dataclass(frozen=True, eq=False)
class FractalImage:
    pixels: np.ndarray  # uint8, shape (height, width, 3)
    provenance: dict[str, str]


def effective_max_iter(formula: IterativeFormula, config: RenderConfig) -> int:
    """Iteration budget: fixed, or scaled by the formula's top exponent."""
    if config.iter_mode is IterMode.FIXED_SET1:
        return config.max_iter
    scaled = config.adaptive_scale * formula.max_exponent
    return max(ADAPTIVE_MIN_ITER, min(ADAPTIVE_MAX_ITER, scaled))


def pixel_grid(config: RenderConfig) -> tuple[np.ndarray, np.ndarray]:
    """Center-sampled axis values: xs ascending, ys descending from im_max.

    Computed as (vmin*(2n-k) + vmax*k) / (2n) with k = 2i+1, which equals
    vmin + (i+0.5)*(vmax-vmin)/n and is exactly antisymmetric when the
    range is symmetric about zero.
    """
    xs = _axis_values(config.re_range[0], config.re_range[1], config.width)
    ys = _axis_values(config.im_range[1], config.im_range[0], config.height)
    return xs, ys


def _axis_values(start: float, stop: float, n: int) -> np.ndarray:
    k = 2.0 * np.arange(n, dtype=np.float64) + 1.0
    return (start * (2.0 * n - k) + stop * k) / (2.0 * n)


def pixel_point(config: RenderConfig, col: int, row: int) -> complex:
    """Plane point sampled by one pixel (same arithmetic as pixel_grid)."""
    w, h = config.width, config.height
    kx = 2.0 * col + 1.0
    ky = 2.0 * row + 1.0
    x = (config.re_range[0] * (2.0 * w - kx) + config.re_range[1] * kx) / (2.0 * w)
    y = (config.im_range[1] * (2.0 * h - ky) + config.im_range[0] * ky) / (2.0 * h)
    return complex(x, y)


# --- scalar reference path ---------------------------------------------------


def _cpow_scalar(x: float, y: float, e: int) -> tuple[float, float]:
    rx = ry = None
    bx, by = x, y
    while e:
        if e & 1:
            if rx is None:
                rx, ry = bx, by
            else:
                rx, ry = rx * bx - ry * by, rx * by + ry * bx
        e >>= 1
        if e:
            bx, by = bx * bx - by * by, bx * by + by * bx
    return rx, ry


def escape_iterations(
    formula: IterativeFormula, z0: complex, config: RenderConfig
) -> int | None:
    """Zero-based escape index of the trajectory from z0, None if interior.

    This is the readable per-point reference; render_field computes the
    same recurrence vectorized and agrees bit-for-bit.
    """
    r2 = config.escape_radius * config.escape_radius
    budget = effective_max_iter(formula, config)
    julia = config.julia_constant
    zx, zy = z0.real, z0.imag
    if not zx * zx + zy * zy <= r2:
        return 0
    for step in range(1, budget + 1):
        ax = ay = 0.0
        first = True
        for c, e in formula.terms:
            px, py = _cpow_scalar(zx, zy, e)
            if first:
                ax, ay = c * px, c * py
                first = False
            else:
                ax, ay = ax + c * px, ay + c * py
        if julia is not None:
            ax, ay = ax + julia.real, ay + julia.imag
        zx, zy = ax, ay
        if not zx * zx + zy * zy <= r2:
            return step - 1
    return None


# --- vectorized kernel --------------------------------------------------------


def _cpow_arrays(x: np.ndarray, y: np.ndarray, e: int) -> tuple[np.ndarray, np.ndarray]:
    rx = ry = None
    bx, by = x, y
    while e:
        if e & 1:
            if rx is None:
                rx, ry = bx, by
            else:
                rx, ry = rx * bx - ry * by, rx * by + ry * bx
        e >>= 1
        if e:
            bx, by = bx * bx - by * by, bx * by + by * bx
    return rx, ry


def _iterate_flat(
    zx: np.ndarray,
    zy: np.ndarray,
    terms: tuple[tuple[float, int], ...],
    r2: float,
    budget: int,
    julia: complex | None = None,
    cx: np.ndarray | None = None,
    cy: np.ndarray | None = None,
) -> np.ndarray:
    """Escape indices for flat starting points; cx/cy add a per-cell constant."""
    n = zx.size
    iters = np.full(n, -1, dtype=np.int32)
    with np.errstate(over="ignore", invalid="ignore", under="ignore"):
        alive = zx * zx + zy * zy <= r2
        iters[~alive] = 0
        idx = np.nonzero(alive)[0]
        zx, zy = zx[idx], zy[idx]
        if cx is not None:
            cx, cy = cx[idx], cy[idx]
        for step in range(1, budget + 1):
            if idx.size == 0:
                break
            ax = ay = None
            for c, e in terms:
                px, py = _cpow_arrays(zx, zy, e)
                if ax is None:
                    ax, ay = c * px, c * py
                else:
                    ax, ay = ax + c * px, ay + c * py
            if julia is not None:
                ax, ay = ax + julia.real, ay + julia.imag
            if cx is not None:
                ax, ay = ax + cx, ay + cy
            zx, zy = ax, ay
            still = zx * zx + zy * zy <= r2
            if not still.all():
                escaped = ~still
                iters[idx[escaped]] = step - 1
                idx = idx[still]
                zx, zy = zx[still], zy[still]
                if cx is not None:
                    cx, cy = cx[still], cy[still]
    return iters


def _render_banded(
    band_fn,
    config: RenderConfig,
    budget: int,
    workers: int,
) -> EscapeField:
    height, width = config.height, config.width
    out = np.empty((height, width), dtype=np.int32)
    bands = [(r0, min(r0 + _BAND_ROWS, height)) for r0 in range(0, height, _BAND_ROWS)]

    def run(band: tuple[int, int]) -> None:
        r0, r1 = band
        out[r0:r1] = band_fn(r0, r1).reshape(r1 - r0, width)

    if workers <= 1 or len(bands) == 1:
        for band in bands:
            run(band)
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            list(pool.map(run, bands))
    return EscapeField(iterations=out, budget=budget)


def render_field(
    formula: IterativeFormula, config: RenderConfig, workers: int = 1
) -> EscapeField:
    """Escape field over the configured plane window; z0 = pixel point."""
    xs, ys = pixel_grid(config)
    r2 = config.escape_radius * config.escape_radius
    budget = effective_max_iter(formula, config)
    julia = config.julia_constant

    def band(r0: int, r1: int) -> np.ndarray:
        rows = r1 - r0
        zx = np.tile(xs, rows)
        zy = np.repeat(ys[r0:r1], config.width)
        return _iterate_flat(zx, zy, formula.terms, r2, budget, julia=julia)

    return _render_banded(band, config, budget, workers)


_MANDELBROT_TERMS = ((1.0, 2),)


def mandelbrot_field(config: RenderConfig, workers: int = 1) -> EscapeField:
    """Validation-mode render: z <- z^2 + c with c = pixel point, z0 = 0.

    Used to cross-check the kernel against the known Mandelbrot-set area;
    not part of the fingerprint pipeline. Uses config.max_iter directly.
    """
    xs, ys = pixel_grid(config)
    r2 = config.escape_radius * config.escape_radius
    budget = config.max_iter

    def band(r0: int, r1: int) -> np.ndarray:
        rows = r1 - r0
        cx = np.tile(xs, rows)
        cy = np.repeat(ys[r0:r1], config.width)
        zx = np.zeros(cx.size, dtype=np.float64)
        zy = np.zeros(cy.size, dtype=np.float64)
        return _iterate_flat(zx, zy, _MANDELBROT_TERMS, r2, budget, cx=cx, cy=cy)

    return _render_banded(band, config, budget, workers)


# --- colorization and image output -------------------------------------------


def colorize(
    field: EscapeField, config: RenderConfig, formula_digest: str | None = None
) -> FractalImage:
    """Map escape indices to RGB: interior black, escaped on an HSV ramp.

    Escaped(n) gets hue n/budget * 300 degrees at full saturation and
    value; channels round half away from zero. Bit-exact for a given
    (field, config).
    """
    iters = field.iterations
    rgb = np.zeros(iters.shape + (3,), dtype=np.uint8)
    escaped = iters >= 0
    if escaped.any():
        hue6 = iters[escaped].astype(np.float64) * (300.0 / field.budget) / 60.0
        sector = np.floor(hue6).astype(np.int64)
        f = hue6 - sector
        ones = np.ones_like(f)
        zeros = np.zeros_like(f)
        q = 1.0 - f
        r = np.choose(sector, [ones, q, zeros, zeros, f, ones])
        g = np.choose(sector, [f, ones, ones, q, zeros, zeros])
        b = np.choose(sector, [zeros, zeros, f, ones, ones, q])
        for channel, values in enumerate((r, g, b)):
            rgb[..., channel][escaped] = np.floor(values * 255.0 + 0.5).astype(np.uint8)
    provenance = {
        "formula": formula_digest if formula_digest is not None else "",
        "config": config_digest(config),
    }
    return FractalImage(pixels=rgb, provenance=provenance)


def render_image(
    formula: IterativeFormula, config: RenderConfig, workers: int = 1
) -> FractalImage:
    field = render_field(formula, config, workers=workers)
    return colorize(field, config, formula_digest=formula_hash(formula))


def save_png(image: FractalImage, path: str | Path) -> None:
    """Write 8-bit RGB PNG with the provenance text chunk, atomically."""
    path = Path(path)
    info = PngInfo()
    info.add_text(PROVENANCE_KEY, json.dumps(image.provenance, sort_keys=True))
    tmp = path.with_name(path.name + ".tmp")
    Image.fromarray(image.pixels, "RGB").save(tmp, format="PNG", pnginfo=info)
    os.replace(tmp, path)


def load_png(path: str | Path) -> FractalImage:
    with Image.open(path) as img:
        pixels = np.asarray(img.convert("RGB"), dtype=np.uint8)
        raw = img.info.get(PROVENANCE_KEY, "{}")
    return FractalImage(pixels=pixels, provenance=json.loads(raw))
