use crate::symring::{RationalExpr, SymMatrix};

use super::{lapse, xi, xi_dot_shift};

/// Interior principal symbol `a(ξ)·I₁₁`.
#[derive(Clone, Debug)]
pub struct InteriorSymbol {
    pub matrix: SymMatrix,
    pub scalar_a: RationalExpr,
}

/// a(ξ) = |ξ|² − (X·ξ)²/N².
pub fn interior_scalar() -> RationalExpr {
    let sq = (1..=3).fold(RationalExpr::zero(), |acc, i| &acc + &xi(i).pow(2));
    &sq - &(&xi_dot_shift().pow(2) / &lapse().pow(2))
}

pub fn build_interior_symbol() -> InteriorSymbol {
    let a = interior_scalar();
    InteriorSymbol {
        matrix: SymMatrix::identity(11).scale(&a),
        scalar_a: a,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::symring::{bindings, rat, Var};

    #[test]
    fn flat_background_is_euclidean_norm() {
        let a = interior_scalar();
        let b = bindings(&[
            (Var::N, RationalExpr::one()),
            (Var::X1, RationalExpr::zero()),
            (Var::X2, RationalExpr::zero()),
            (Var::X3, RationalExpr::zero()),
        ]);
        let want = &(&xi(1).pow(2) + &xi(2).pow(2)) + &xi(3).pow(2);
        assert_eq!(a.substitute(&b).unwrap(), want);
    }

    #[test]
    fn sample_value() {
        // N=2, X=(1,0,0), ξ=(1,1,0): 1 + 1 - 1/4
        let a = interior_scalar();
        let mut vals: [num_rational::BigRational; 9] = std::array::from_fn(|_| rat(0, 1));
        vals[Var::N.index()] = rat(2, 1);
        vals[Var::X1.index()] = rat(1, 1);
        vals[Var::Xi1.index()] = rat(1, 1);
        vals[Var::Xi2.index()] = rat(1, 1);
        assert_eq!(a.eval_rational(&vals).unwrap(), rat(7, 4));
    }

    #[test]
    fn matrix_is_scalar_times_identity() {
        let s = build_interior_symbol();
        for i in 0..11 {
            for j in 0..11 {
                let want = if i == j {
                    s.scalar_a.clone()
                } else {
                    RationalExpr::zero()
                };
                assert_eq!(s.matrix.get(i, j), &want);
            }
        }
    }

    #[test]
    fn determinant_is_eleventh_power() {
        let s = build_interior_symbol();
        let d = s.matrix.det_factored().unwrap();
        assert!(d.is_power_of(&s.scalar_a, 11));
        assert!(!d.is_power_of(&s.scalar_a, 10));
    }
}
