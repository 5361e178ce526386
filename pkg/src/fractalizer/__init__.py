"""fractalizer: behaviour fingerprints from API-call traces.

A trace becomes a weighted call graph; vertex centralities become the
exponents and coefficients of four quadrant polynomials; escape-time
iteration of those polynomials paints the four quadrants of a composite
fingerprint image.
"""

from .callgraph import CallGraph, build_graph, export_dot
from .centrality import (
    CentralityEntry,
    CentralityProfile,
    centrality_profile,
    closeness_profile,
    degree_profile,
)
from .compose import DimensionMismatchError, QuadrantComposite, compose
from .formulas import (
    QUADRANTS,
    DegenerateFormulaError,
    IterativeFormula,
    Quadrant,
    canonical_text,
    formula_hash,
    parse_formula,
    synthesize,
    synthesize_all,
    terms_text,
)
from .pipeline import (
    BatchSummary,
    DuplicateGroup,
    DuplicateReport,
    EmptySweepError,
    dedupe_scan,
    read_manifest,
    resolution_sweep,
    run_batch,
)
from .render import (
    EscapeField,
    FractalImage,
    IterMode,
    RenderConfig,
    colorize,
    config_digest,
    effective_max_iter,
    escape_iterations,
    load_png,
    mandelbrot_field,
    render_field,
    render_image,
    save_png,
)
from .traces import (
    ApiTrace,
    EmptyInputError,
    FormatError,
    Label,
    PreprocessReport,
    parse_trace_file,
    preprocess,
    validate_trace_file,
    write_trace_file,
)

__version__ = "0.1.0"
