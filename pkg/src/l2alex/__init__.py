"""Knot group presentations, Fox calculus, the classical Alexander
polynomial, and exact and numerical L2-Alexander invariants."""

from .alexander import (
    LaurentPolynomial,
    alexander_matrix,
    alexander_polynomial,
    mahler_measure,
    parse_laurent,
)
from .constructions import (
    CableSpec,
    cable_presentation,
    pattern_presentation_q3,
    satellite_presentation,
    sum_presentation,
    torus_pattern_presentation,
    whitehead_pattern_presentation,
)
from .diagram import (
    Diagram,
    longitude_word,
    mirror_presentation,
    parse_pd,
    wirtinger,
)
from .fk import (
    FkEstimate,
    SpectralHistogram,
    fk_det_ball,
    fk_det_series,
    op_norm_bound,
    property_i_probe,
    spectral_density,
)
from .fox import (
    FoxMatrix,
    FreeRingElement,
    delete_row,
    fox_derivative,
    fox_matrix,
    fundamental_formula_residual,
    twist,
    twist_matrix,
)
from .groupalg import (
    FreeAbelianOracle,
    FreeGroupOracle,
    GroupRingElement,
    GroupRingMatrix,
    RewritingSystemOracle,
    ShortlexOrder,
    TorusAmalgamOracle,
    ball,
    gr_mul,
    gr_star,
    kb_complete,
    trace,
)
from .invariant import (
    Cable,
    Inverse,
    L2Value,
    Mirror,
    Sum,
    Torus,
    Unknot,
    detect_unknot,
    exact_exponent,
    exact_value,
    l2_from_presentation,
    mirror_inverse_laws,
    parse_knot_expr,
)
from .words import (
    AbelianizationMap,
    Presentation,
    TietzeMove,
    abelianization,
    format_word,
    free_reduce,
    parse_word,
    presentation_from_text,
    presentation_to_text,
    tietze_apply,
    validate_wirtinger,
)

__version__ = "0.1.0"
