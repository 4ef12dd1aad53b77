//! Exact multivariate polynomial and rational-function arithmetic.

mod matrix;
mod parse;
mod poly;
mod rational;

pub use matrix::{FactoredDet, SymMatrix};
pub use parse::{parse_expr, parse_matrix, ParseError};
pub use poly::{rat, rat_to_f64, Monomial, Poly, Var, NVARS};
pub use rational::RationalExpr;

use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum SymError {
    #[error("denominator vanishes identically")]
    ZeroDenominator,
    #[error("shape error: {0}")]
    Shape(String),
    #[error("divisor is constant in {0}")]
    ConstantDivisor(&'static str),
    #[error("denominator depends on {0}; remainder is not defined")]
    DenominatorDependsOn(&'static str),
    #[error("inexact division during fraction-free elimination")]
    InexactDivision,
}

/// Binding table with every slot empty.
pub fn no_bindings() -> [Option<RationalExpr>; NVARS] {
    Default::default()
}

/// Binding table from a list of (variable, value) pairs.
pub fn bindings(pairs: &[(Var, RationalExpr)]) -> [Option<RationalExpr>; NVARS] {
    let mut b = no_bindings();
    for (v, e) in pairs {
        b[v.index()] = Some(e.clone());
    }
    b
}

/// Pseudo-remainder of `f` by `p` in the variable `v`: returns `(r, k)` with
/// `lc(p)^k * f = q * p + r` and `deg_v r < deg_v p`.
pub fn pseudo_rem(f: &Poly, p: &Poly, v: Var) -> Result<(Poly, u32), SymError> {
    let d = p.degree_in(v);
    if d == 0 {
        return Err(SymError::ConstantDivisor(v.name()));
    }
    let pc = p.coeffs_in(v);
    let lc = pc[d as usize].clone();
    let mut r = f.clone();
    let mut k = 0u32;
    loop {
        let dr = r.degree_in(v);
        if r.is_zero() || dr < d {
            break;
        }
        let rc = r.coeffs_in(v);
        let lead = &rc[dr as usize] * &Poly::term(rat(1, 1), Monomial::var(v, dr - d));
        r = &(&r * &lc) - &(&lead * p);
        k += 1;
    }
    Ok((r, k))
}

/// Remainder of `f` modulo `p` as polynomials in `z`, over the field of rational
/// functions in the other indeterminates.
pub fn rem_in_z(f: &RationalExpr, p: &Poly) -> Result<RationalExpr, SymError> {
    if p.degree_in(Var::Z) == 0 {
        return Err(SymError::ConstantDivisor(Var::Z.name()));
    }
    if f.den().depends_on(Var::Z) {
        return Err(SymError::DenominatorDependsOn(Var::Z.name()));
    }
    let (r, k) = pseudo_rem(f.num(), p, Var::Z)?;
    let lc = p.coeffs_in(Var::Z).pop().expect("positive degree");
    RationalExpr::new(r, f.den() * &lc.pow(k))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pz() -> Poly {
        let z = Poly::var(Var::Z);
        &(&z.pow(2) + &Poly::var(Var::Xi2).pow(2)) + &Poly::var(Var::Xi3).pow(2)
    }

    #[test]
    fn one_division_step() {
        let r = rem_in_z(&RationalExpr::var(Var::Z).pow(2), &pz()).unwrap();
        let want = -(&RationalExpr::var(Var::Xi2).pow(2) + &RationalExpr::var(Var::Xi3).pow(2));
        assert_eq!(r, want);
    }

    #[test]
    fn power_of_divisor_leaves_nothing() {
        let f = RationalExpr::from_poly(pz().pow(11));
        assert!(rem_in_z(&f, &pz()).unwrap().is_zero());
    }

    #[test]
    fn constant_divisor_rejected() {
        let f = RationalExpr::var(Var::Z);
        assert_eq!(rem_in_z(&f, &Poly::var(Var::N)), Err(SymError::ConstantDivisor("z")));
    }

    #[test]
    fn z_dependent_denominator_rejected() {
        let f = &RationalExpr::one() / &RationalExpr::var(Var::Z);
        assert!(matches!(rem_in_z(&f, &pz()), Err(SymError::DenominatorDependsOn(_))));
    }

    #[test]
    fn non_monic_divisor() {
        // z^3 mod (2 z^2 + 1) = -z/2
        let p = &Poly::var(Var::Z).pow(2).scale(&rat(2, 1)) + &Poly::one();
        let r = rem_in_z(&RationalExpr::var(Var::Z).pow(3), &p).unwrap();
        assert_eq!(r, RationalExpr::var(Var::Z).scale(&rat(-1, 2)));
    }
}
