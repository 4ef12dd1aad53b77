//! Principal symbols of the linearized gauged boundary value problem.

mod boundary;
mod homotopy;
mod interior;
mod reduce;
mod verify;

pub use boundary::{
    build_boundary_symbol, derived_boundary_rows, printed_boundary_display, BoundarySymbol, ROW_ORDER, UNKNOWN_ORDER,
};
pub use homotopy::{
    build_homotopy_symbol, flat_row_scaling, homotopy_det_factored, homotopy_root_certificate, homotopy_root_value,
    HomotopySymbol,
};
pub use interior::{build_interior_symbol, interior_scalar, InteriorSymbol};
pub use reduce::{
    det_bhat_closed_form, det_bhat_expected, det_btilde_expected, printed_bhat_stage, reduce_to_bhat,
    tangential_certificate, tangential_root_divisor, Reduction, ReplayMismatch,
};
pub use verify::{
    compute_artifacts, render_golden, run_symbols_suite, write_golden, GoldenSource, SymbolArtifacts, SymbolsOutcome,
    GOLDEN_FILES,
};

use crate::symring::{Poly, RationalExpr, Var};

pub(crate) fn xi(i: usize) -> RationalExpr {
    RationalExpr::var(Var::xi(i))
}

pub(crate) fn shift(i: usize) -> RationalExpr {
    RationalExpr::var(Var::shift(i))
}

pub(crate) fn lapse() -> RationalExpr {
    RationalExpr::var(Var::N)
}

pub(crate) fn int(c: i64) -> RationalExpr {
    RationalExpr::int(c)
}

/// S = ξ₁X¹ + ξ₂X² + ξ₃X³.
pub(crate) fn xi_dot_shift() -> RationalExpr {
    (1..=3).fold(RationalExpr::zero(), |acc, i| &acc + &(&xi(i) * &shift(i)))
}

/// |η|² = ξ₂² + ξ₃².
pub fn tangential_norm_sq() -> Poly {
    &Poly::var(Var::Xi2).pow(2) + &Poly::var(Var::Xi3).pow(2)
}
