"""Hyperbolicity of Coxeter groups via almost negative matrices and their nerves."""

from .anm import (
    AlmostNegativeMatrix,
    LemmaBConclusion,
    LemmaBReport,
    MatrixClass,
    check_lemma_b,
    classify,
    link,
    link_single,
    normalize,
    principal_submatrix,
    reducibility,
    scan_zero_row_links,
)
from .coxmat import INF, CoxeterSystem, cosine_matrix, irreducible_components, is_affine, is_finite, parse_coxeter_system
from .hyperbolicity import AffineWitness, CommutingWitness, HyperbolicityVerdict, decide
from .moussong import chamber, enumerate_davis_cells
from .nerve import (
    GeodesicResult,
    NerveComplex,
    NervePoint,
    build_nerve,
    intrinsic_distance,
    link_complex,
    max_inner_product_over_nerve,
    simplex_distance,
    suspension_distance,
    verify_counterexamples,
)

__version__ = "0.1.0"
