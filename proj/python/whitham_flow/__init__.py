"""Spectral solver and non-uniform dependence experiments for Whitham-type equations."""

from ._core import (
    ConfigError,
    GridMismatchError,
    InsufficientDataError,
    OutOfRangeError,
    Symbol,
    UnsupportedFamilyError,
    apply_multiplier,
    bump,
    bump_l2_norm,
    bump_tilde,
    bump_tilde_l2_norm,
    cli,
    conserved_quantities,
    dealiased_product,
    derivative,
    evolve,
    grid_points,
    periodic_approx,
    periodic_residual,
    run_periodic_nonuniform,
    shift,
    sobolev_norm,
    verify_error_decay,
    verify_symbol_conditions,
)

__all__ = [
    "ConfigError",
    "GridMismatchError",
    "InsufficientDataError",
    "OutOfRangeError",
    "Symbol",
    "UnsupportedFamilyError",
    "apply_multiplier",
    "bump",
    "bump_l2_norm",
    "bump_tilde",
    "bump_tilde_l2_norm",
    "cli",
    "conserved_quantities",
    "dealiased_product",
    "derivative",
    "evolve",
    "grid_points",
    "periodic_approx",
    "periodic_residual",
    "run_periodic_nonuniform",
    "shift",
    "sobolev_norm",
    "verify_error_decay",
    "verify_symbol_conditions",
]
