"""Quadrant polynomial synthesis, canonical serialization and hashing.

Each quadrant of a fingerprint is driven by one degree variant: vertex
degrees become the exponents of an iterative complex polynomial
z_{n+1} = sum(c_i * z^e_i) and the vertices' closeness values become the
coefficients. Synthesis drops non-positive exponents, merges terms that
share an exponent by summing their coefficients, normalizes coefficients
to sum 1, and sorts by exponent.

The canonical text rendering (coefficients at 12 decimal places,
ascending exponents) defines formula identity: two formulas are "equal"
for duplicate detection exactly when their canonical texts match, and the
formula hash is the SHA-256 of that text.
"""

from __future__ import annotations

import hashlib
import re
from dataclasses import dataclass, field
from enum import Enum

from .centrality import CentralityProfile

COEFFICIENT_SUM_TOL = 1e-9

Term = tuple[float, int]


class Quadrant(str, Enum):
    Q1_IN = "Q1_in"
    Q2_ALL = "Q2_all"
    Q3_OUT = "Q3_out"
    Q4_DIFF = "Q4_diff"


QUADRANTS = (Quadrant.Q1_IN, Quadrant.Q2_ALL, Quadrant.Q3_OUT, Quadrant.Q4_DIFF)

_EXPONENT_FIELD = {
    Quadrant.Q1_IN: "d_in",
    Quadrant.Q2_ALL: "d_all",
    Quadrant.Q3_OUT: "d_out",
    Quadrant.Q4_DIFF: "d_diff",
}


class DegenerateFormulaError(Exception):
    """No renderable polynomial could be synthesized for a quadrant."""


@dataclass(frozen=True)
class IterativeFormula:
    """z_{n+1} = sum(c * z^e) over `terms`, coefficients normalized to 1.

    `raw_terms` preserves the merged, exponent-sorted terms before
    normalization (for synthesized formulas these are summed closeness
    values; for hand-built formulas they default to `terms`).
    """

    terms: tuple[Term, ...]
    quadrant: Quadrant | None = None
    source_id: str = ""
    raw_terms: tuple[Term, ...] = field(default=(), repr=False)

    def __post_init__(self):
        if not self.terms:
            raise DegenerateFormulaError("formula has no terms")
        exponents = [e for _, e in self.terms]
        if any(e < 1 or not isinstance(e, int) for e in exponents):
            raise ValueError("exponents must be integers >= 1")
        if any(b <= a for a, b in zip(exponents, exponents[1:])):
            raise ValueError("exponents must be strictly increasing")
        if any(c <= 0 for c, _ in self.terms):
            raise ValueError("coefficients must be positive")
        if abs(sum(c for c, _ in self.terms) - 1.0) > COEFFICIENT_SUM_TOL:
            raise ValueError("coefficients must sum to 1")
        if not self.raw_terms:
            object.__setattr__(self, "raw_terms", self.terms)

    @property
    def max_exponent(self) -> int:
        return self.terms[-1][1]


def _merge_terms(pairs: list[tuple[int, float]]) -> tuple[Term, ...]:
    """Drop e <= 0, merge equal exponents, drop zero mass, sort ascending."""
    merged: dict[int, float] = {}
    for exponent, coefficient in pairs:
        if exponent <= 0:
            continue
        merged[exponent] = merged.get(exponent, 0.0) + coefficient
    return tuple(
        (coefficient, exponent)
        for exponent, coefficient in sorted(merged.items())
        if coefficient != 0.0
    )


def synthesize(profile: CentralityProfile, quadrant: Quadrant) -> IterativeFormula:
    """Build the quadrant polynomial for *profile*.

    Raises DegenerateFormulaError when every vertex is dropped (all
    exponents <= 0) or the surviving coefficient mass is zero, which for
    trace-built graphs only happens on single-vertex graphs.
    """
    if not len(profile):
        raise ValueError("empty centrality profile")
    attr = _EXPONENT_FIELD[quadrant]
    pairs = [(getattr(entry, attr), entry.closeness) for entry in profile]
    raw = _merge_terms(pairs)
    if not raw:
        raise DegenerateFormulaError(f"{quadrant.value}: no positive-exponent terms with mass")
    total = sum(c for c, _ in raw)
    terms = tuple((c / total, e) for c, e in raw)
    return IterativeFormula(terms=terms, quadrant=quadrant, raw_terms=raw)


def synthesize_all(
    profile: CentralityProfile, source_id: str = ""
) -> dict[Quadrant, IterativeFormula | None]:
    """All four quadrant polynomials; a degenerate quadrant maps to None."""
    result: dict[Quadrant, IterativeFormula | None] = {}
    for quadrant in QUADRANTS:
        try:
            formula = synthesize(profile, quadrant)
            if source_id:
                formula = IterativeFormula(
                    terms=formula.terms,
                    quadrant=quadrant,
                    source_id=source_id,
                    raw_terms=formula.raw_terms,
                )
            result[quadrant] = formula
        except DegenerateFormulaError:
            result[quadrant] = None
    return result


def terms_text(terms: tuple[Term, ...]) -> str:
    """`c*z^e + ...` with coefficients at exactly 12 decimal places."""
    return " + ".join(f"{c:.12f}*z^{e}" for c, e in terms)


def canonical_text(formula: IterativeFormula) -> str:
    return terms_text(formula.terms)


_TERM_RE = re.compile(r"^(\d+\.\d{12})\*z\^(\d+)$")


def parse_formula(
    text: str, quadrant: Quadrant | None = None, source_id: str = ""
) -> IterativeFormula:
    """Inverse of canonical_text, up to the 12-decimal canonical rounding."""
    terms: list[Term] = []
    for part in text.split(" + "):
        match = _TERM_RE.match(part.strip())
        if not match:
            raise ValueError(f"unparseable formula term {part!r}")
        terms.append((float(match.group(1)), int(match.group(2))))
    return IterativeFormula(terms=tuple(terms), quadrant=quadrant, source_id=source_id)


def formula_hash(formula: IterativeFormula) -> str:
    """SHA-256 hex digest of the canonical text; equal formulas hash equal."""
    return hashlib.sha256(canonical_text(formula).encode("utf-8")).hexdigest()
