"""Unit-root regression prediction experiments (C++ core)."""

import json

from ._urlab import (
    ConfigError,
    DegeneratePath,
    Family,
    FiniteFilter,
    GeometricFilter,
    InnovationSpec,
    PolynomialFilter,
    derived_correlation,
    estimate_constants,
    generate_path,
    ito_integral,
    ks_distance,
    materialize_filter,
    mse_limit_formula,
    parse_config,
    rls_fit,
    run_config,
    run_path,
    time_integral_sq,
    validation_errors,
)
from ._urlab import dispatch as _dispatch


def dispatch(subcommand, config_text, out_dir, seed=None, workers=None, strict=False):
    """Run a subcommand; returns (exit_code, checks, manifest dict)."""
    code, checks, manifest = _dispatch(subcommand, config_text, str(out_dir), seed, workers, strict)
    return code, checks, json.loads(manifest)


__all__ = [
    "ConfigError",
    "DegeneratePath",
    "Family",
    "FiniteFilter",
    "GeometricFilter",
    "InnovationSpec",
    "PolynomialFilter",
    "derived_correlation",
    "dispatch",
    "estimate_constants",
    "generate_path",
    "ito_integral",
    "ks_distance",
    "materialize_filter",
    "mse_limit_formula",
    "parse_config",
    "rls_fit",
    "run_config",
    "run_path",
    "time_integral_sq",
    "validation_errors",
]
