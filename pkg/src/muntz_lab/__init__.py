"""Numerical tools for Müntz polynomial spaces.

Certified sup-norms, bounded Bernstein constant estimates, the sampling
embedding into convergent sequences, and probes of local almost-squareness.
"""

from .bernstein import (
    BernsteinConfig,
    BernsteinError,
    BernsteinEstimate,
    LPUnbounded,
    bernstein_constant,
    bernstein_lp_step,
    k_sequence,
    trivial_derivative_bound,
)
from .core import (
    CertificationError,
    ConvergenceReport,
    MuntzError,
    MuntzPolynomial,
    MuntzSequence,
    NormCertificate,
    check_muntz_condition,
    continuity_modulus,
    derivative,
    evaluate,
    random_unit_polynomial,
    split_head_tail,
    sup_norm_certified,
    validate_sequence,
)
from .embedding import (
    EmbeddingReport,
    SamplingGrid,
    apply_embedding,
    build_grid,
    default_anchors,
    verify_sandwich,
)
from .geometry import (
    DefectReport,
    asq_tail_defect,
    half_ball_check,
    lasq_empirical_defect,
    lasq_threshold,
    oh_defect_probe,
    small_ball_radius,
)

__version__ = "0.1.0"
