use num_rational::BigRational;

use crate::symring::{bindings, rat, rem_in_z, Poly, RationalExpr, SymError, SymMatrix, Var};

use super::{int, tangential_norm_sq, xi};

/// Flat homotopy family B_t. The determinant of the family is `prefactor · det(matrix)`.
#[derive(Clone, Debug)]
pub struct HomotopySymbol {
    pub matrix: SymMatrix,
    pub prefactor: BigRational,
}

pub fn build_homotopy_symbol() -> HomotopySymbol {
    let t = RationalExpr::var(Var::T);
    let s = &int(1) - &t;
    let (x1, x2, x3) = (xi(1), xi(2), xi(3));
    let z = RationalExpr::zero;
    let two = int(2);
    let sx2 = &s * &x2;
    let sx3 = &s * &x3;
    let rows = vec![
        vec![z(), z(), z(), z(), z(), &t * &x1, -sx2.clone(), -sx3.clone()],
        vec![-(&t * &x1), z(), z(), sx2.clone(), sx3.clone(), z(), z(), z()],
        vec![-(&two * &sx2), z(), sx2.clone(), x1.clone(), z(), z(), z(), z()],
        vec![-(&two * &sx3), z(), sx3.clone(), z(), x1.clone(), z(), z(), z()],
        vec![z(), x1.clone(), z(), z(), z(), &s * &x1, &two * &sx2, &two * &sx3],
        vec![z(), sx2.clone(), z(), z(), z(), -sx2.clone(), &two * &x1, z()],
        vec![z(), sx3.clone(), z(), z(), z(), -sx3.clone(), z(), &two * &x1],
        vec![z(), z(), x1.clone(), sx2, sx3, z(), z(), z()],
    ];
    HomotopySymbol {
        matrix: SymMatrix::from_rows(rows).expect("8x8"),
        prefactor: rat(-1, 32),
    }
}

/// Row scaling D with flat B̃ = D · B_t|_{t=0}; det D equals the family prefactor.
pub fn flat_row_scaling() -> [BigRational; 8] {
    let h = rat(-1, 2);
    [
        rat(1, 1),
        rat(-1, 1),
        h.clone(),
        h.clone(),
        h.clone(),
        h.clone(),
        h,
        rat(-1, 1),
    ]
}

/// prefactor · 2ξ₁⁴ (t³|η|² − 2tξ₁² − 3t|η|² + 2|η|²)(t³|η|² − tξ₁² − 3t|η|² + 2|η|²)
pub fn homotopy_det_factored() -> RationalExpr {
    let t = RationalExpr::var(Var::T);
    let e = RationalExpr::from_poly(tangential_norm_sq());
    let x = xi(1).pow(2);
    let base = &(&(&t.pow(3) * &e) - &(&int(3) * &(&t * &e))) + &(&int(2) * &e);
    let f1 = &base - &(&int(2) * &(&t * &x));
    let f2 = &base - &(&t * &x);
    let core = &(&(&int(2) * &x.pow(2)) * &f1) * &f2;
    core.scale(&rat(-1, 32))
}

/// Value of the family determinant at ξ₁ = i|η|, |η| = 1:
/// −(1/32)[t + (2+t)(1−t)²][2(2+t)(1−t)² + 4t].
pub fn homotopy_root_value(t: &BigRational) -> BigRational {
    let one = rat(1, 1);
    let two = rat(2, 1);
    let w = (&two + t) * (&one - t) * (&one - t);
    let a = t + &w;
    let b = &two * &w + rat(4, 1) * t;
    rat(-1, 32) * a * b
}

/// Remainder of prefactor · det B_t(η + zμ) modulo z² + |η|².
pub fn homotopy_root_certificate(det_matrix: &RationalExpr, prefactor: &BigRational) -> Result<RationalExpr, SymError> {
    let b = bindings(&[(Var::Xi1, RationalExpr::var(Var::Z))]);
    let f = det_matrix.substitute(&b)?.scale(prefactor);
    let p = &Poly::var(Var::Z).pow(2) + &tangential_norm_sq();
    rem_in_z(&f, &p)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::symbols::build_boundary_symbol;

    fn flat() -> [Option<RationalExpr>; 9] {
        bindings(&[
            (Var::N, RationalExpr::one()),
            (Var::X1, RationalExpr::zero()),
            (Var::X2, RationalExpr::zero()),
            (Var::X3, RationalExpr::zero()),
        ])
    }

    #[test]
    fn start_of_family_is_flat_boundary_symbol_up_to_row_scaling() {
        let h = build_homotopy_symbol();
        let mut at0 = h
            .matrix
            .substitute(&bindings(&[(Var::T, RationalExpr::zero())]))
            .unwrap();
        let d = flat_row_scaling();
        for (i, c) in d.iter().enumerate() {
            at0.scale_row(i, &RationalExpr::constant(c.clone()));
        }
        let tilde = build_boundary_symbol().tilde.substitute(&flat()).unwrap();
        assert_eq!(at0.first_mismatch(&tilde), None);
        let det_d = d.iter().fold(rat(1, 1), |acc, c| acc * c);
        assert_eq!(det_d, h.prefactor);
    }

    #[test]
    fn end_of_family_is_normal_derivatives() {
        // each row is a multiple of ξ₁ on one unknown: ∇ₙh₁₁, n(G), ∇ₙh₀₂, ∇ₙh₀₃, ∇ₙh₀₀, ∇ₙh₁₂, ∇ₙh₁₃, ∇ₙh₀₁
        let h = build_homotopy_symbol();
        let at1 = h
            .matrix
            .substitute(&bindings(&[(Var::T, RationalExpr::one())]))
            .unwrap();
        let cols = [5, 0, 3, 4, 1, 6, 7, 2];
        for (r, &c) in cols.iter().enumerate() {
            for j in 0..8 {
                let e = at1.get(r, j);
                if j == c {
                    let q = e / &xi(1);
                    assert!(q.as_poly().and_then(|p| p.as_constant()).is_some(), "row {r}");
                    assert!(!e.is_zero());
                } else {
                    assert!(e.is_zero(), "row {r} col {j}");
                }
            }
        }
    }

    #[test]
    fn root_value_keeps_sign_on_unit_interval() {
        for k in 0..=20 {
            let t = rat(k, 20);
            assert!(homotopy_root_value(&t) < rat(0, 1));
        }
        assert_eq!(homotopy_root_value(&rat(0, 1)), rat(-1, 4));
    }
}
