"""Core layer: scalar arithmetic, grid geometry, the function catalog, and
the function-spec document format."""

from .scalars import (
    Approx,
    RationalFormatError,
    Scalar,
    format_rational,
    parse_rational,
    reduce_mod1,
    scalar_to_json,
)
from .points import (
    RadixPoint,
    Triplet,
    enumerate_triplets,
    is_radix_rational,
    radix_depth,
    radix_x_samples,
    radix_y_set,
    triplet_count,
    validate_radix,
)
from .funcs import (
    AbsSin,
    Dilate,
    Distance,
    DistancePower,
    FuncExpr,
    PolySplinePeriodic,
    Scale,
    Sin2Pi,
    Sum,
    Takagi,
    ThetaSplice,
    USeries,
    as_piecewise_poly,
    clear_caches,
    default_series_terms,
    eval_approx,
    eval_exact,
    psi_zero,
    series_tail_bound,
    sin_cancellation,
    sup_abs_bound,
    supports_exact,
    theta_upper_poly,
)
from .parse import build_func, func_spec_json, parse_func_spec, to_spec_dict

__all__ = [
    "Approx",
    "RationalFormatError",
    "Scalar",
    "format_rational",
    "parse_rational",
    "reduce_mod1",
    "scalar_to_json",
    "RadixPoint",
    "Triplet",
    "enumerate_triplets",
    "is_radix_rational",
    "radix_depth",
    "radix_x_samples",
    "radix_y_set",
    "triplet_count",
    "validate_radix",
    "AbsSin",
    "Dilate",
    "Distance",
    "DistancePower",
    "FuncExpr",
    "PolySplinePeriodic",
    "Scale",
    "Sin2Pi",
    "Sum",
    "Takagi",
    "ThetaSplice",
    "USeries",
    "as_piecewise_poly",
    "clear_caches",
    "default_series_terms",
    "eval_approx",
    "eval_exact",
    "psi_zero",
    "series_tail_bound",
    "sin_cancellation",
    "sup_abs_bound",
    "supports_exact",
    "theta_upper_poly",
    "build_func",
    "func_spec_json",
    "parse_func_spec",
    "to_spec_dict",
]
