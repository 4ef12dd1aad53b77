use crate::symring::{RationalExpr, SymMatrix};

use super::{int, lapse, shift, xi, xi_dot_shift};

/// Column order of the unknowns.
pub const UNKNOWN_ORDER: [&str; 11] = [
    "G", "h00", "h01", "h02", "h03", "h11", "h12", "h13", "h22", "h23", "h33",
];

/// Row order of the 8×8 block.
pub const ROW_ORDER: [&str; 8] = ["H'", "(trK)'", "w2'", "w3'", "beta1", "beta2", "beta3", "beta0"];

/// Boundary principal symbol: identity rows for the induced metric on top of `[B̃ | *]`.
#[derive(Clone, Debug)]
pub struct BoundarySymbol {
    pub full: SymMatrix,
    pub tilde: SymMatrix,
    pub unknown_order: [&'static str; 11],
    pub row_order: [&'static str; 8],
}

/// Column index of h_ab in [`UNKNOWN_ORDER`].
fn hcol(a: usize, b: usize) -> usize {
    let (a, b) = (a.min(b), a.max(b));
    match (a, b) {
        (0, 0) => 1,
        (0, b) => 1 + b,
        (1, b) => 4 + b,
        (2, 2) => 8,
        (2, 3) => 9,
        (3, 3) => 10,
        _ => unreachable!("bad index pair"),
    }
}

/// The 8×8 boundary display as printed, before the overall factor −1/(2N²).
pub fn printed_boundary_display() -> SymMatrix {
    let (x1, x2, x3) = (xi(1), xi(2), xi(3));
    let (s1, s2, s3) = (shift(1), shift(2), shift(3));
    let n = lapse();
    let n2 = n.pow(2);
    let n3 = n.pow(3);
    let s = xi_dot_shift();
    let z = RationalExpr::zero;
    let two = int(2);
    let m = |a: &RationalExpr, b: &RationalExpr| a * b;
    let rows = vec![
        vec![z(), z(), z(), z(), z(), z(), &two * &m(&n2, &x2), &two * &m(&n2, &x3)],
        vec![
            z(),
            z(),
            z(),
            &two * &m(&n, &x2),
            &two * &m(&n, &x3),
            z(),
            -(&two * &(&n * &m(&x2, &s1))),
            -(&two * &(&n * &m(&x3, &s1))),
        ],
        vec![
            -(&two * &m(&n3, &x2)),
            z(),
            m(&n, &x2),
            m(&n, &x1),
            z(),
            -(&n * &m(&x2, &s1)),
            &n * &m(&x3, &s3),
            -(&n * &m(&x2, &s3)),
        ],
        vec![
            -(&two * &m(&n3, &x3)),
            z(),
            m(&n, &x3),
            z(),
            m(&n, &x1),
            -(&n * &m(&x3, &s1)),
            -(&n * &m(&x3, &s2)),
            &n * &m(&x2, &s2),
        ],
        vec![
            z(),
            x1.clone(),
            &(&two * &s) - &(&two * &m(&x1, &s1)),
            -(&two * &m(&x1, &s2)),
            -(&two * &m(&x1, &s3)),
            &(&(&x1 * &m(&s1, &s1)) + &m(&n2, &x1)) - &(&two * &m(&s, &s1)),
            &(&(&x1 * &m(&s1, &s2)) - &(&two * &m(&s, &s2))) + &(&two * &m(&n2, &x2)),
            &(&(&x1 * &m(&s1, &s3)) - &(&two * &m(&s, &s3))) + &(&two * &m(&n2, &x3)),
        ],
        vec![
            z(),
            x2.clone(),
            -(&two * &m(&x2, &s1)),
            &(&two * &s) - &(&two * &m(&x2, &s2)),
            -(&two * &m(&x2, &s3)),
            &(&x2 * &m(&s1, &s1)) - &m(&n2, &x2),
            &(&(&x2 * &m(&s1, &s2)) - &(&two * &m(&s, &s1))) + &(&two * &m(&n2, &x1)),
            &x2 * &m(&s1, &s3),
        ],
        vec![
            z(),
            x3.clone(),
            -(&two * &m(&x3, &s1)),
            -(&two * &m(&x3, &s2)),
            &(&two * &s) - &(&two * &m(&x3, &s3)),
            &(&x3 * &m(&s1, &s1)) - &m(&n2, &x3),
            &x3 * &m(&s1, &s2),
            &(&(&x3 * &m(&s1, &s3)) - &(&two * &m(&s, &s1))) + &(&two * &m(&n2, &x1)),
        ],
        vec![
            z(),
            &two * &s,
            &two * &(&m(&n2, &x1) - &m(&s, &s1)),
            &two * &(&m(&n2, &x2) - &m(&s, &s2)),
            &two * &(&m(&n2, &x3) - &m(&s, &s3)),
            z(),
            z(),
            z(),
        ],
    ];
    SymMatrix::from_rows(rows).expect("8x8")
}

/// Symbols of (H′, (trK)′, ω′₂, ω′₃, β₁, β₂, β₃, β₀) computed from the linearized
/// operators directly (derivatives replaced by ξ, lower order dropped), as an 8×11 matrix.
pub fn derived_boundary_rows() -> SymMatrix {
    let n = lapse();
    let n2 = n.pow(2);
    let s = xi_dot_shift();
    let half = &int(1) / &int(2);
    let mut out = SymMatrix::zeros(8, 11);
    let add = |m: &mut SymMatrix, r: usize, c: usize, v: RationalExpr| {
        let cur = m.get(r, c) + &v;
        m.set(r, c, cur);
    };

    // 2H' = -2∂₂h₁₂ - 2∂₃h₁₃ + ∂₁(h₂₂ + h₃₃)
    add(&mut out, 0, hcol(1, 2), -xi(2));
    add(&mut out, 0, hcol(1, 3), -xi(3));
    add(&mut out, 0, hcol(2, 2), &half * &xi(1));
    add(&mut out, 0, hcol(3, 3), &half * &xi(1));

    // (trK)' = -(1/2N)[2ξ₂h₀₂ + 2ξ₃h₀₃ + S(h₂₂+h₃₃) - Σ_l X^l(2ξ₂h₂ₗ + 2ξ₃h₃ₗ)]
    let c = -(&half / &n);
    add(&mut out, 1, hcol(0, 2), &c * &(&int(2) * &xi(2)));
    add(&mut out, 1, hcol(0, 3), &c * &(&int(2) * &xi(3)));
    add(&mut out, 1, hcol(2, 2), &c * &s);
    add(&mut out, 1, hcol(3, 3), &c * &s);
    for l in 1..=3 {
        add(&mut out, 1, hcol(2, l), -(&c * &(&shift(l) * &(&int(2) * &xi(2)))));
        add(&mut out, 1, hcol(3, l), -(&c * &(&shift(l) * &(&int(2) * &xi(3)))));
    }

    // ω'_i = -(1/2N)[ξ₁h₀ᵢ + ξᵢh₀₁ + S h₁ᵢ - Σ_l X^l(ξ₁hᵢₗ + ξᵢh₁ₗ)] + N ξᵢ G
    for (r, i) in [(2usize, 2usize), (3, 3)] {
        add(&mut out, r, hcol(0, i), &c * &xi(1));
        add(&mut out, r, hcol(0, 1), &c * &xi(i));
        add(&mut out, r, hcol(1, i), &c * &s);
        for l in 1..=3 {
            add(&mut out, r, hcol(i, l), -(&c * &(&shift(l) * &xi(1))));
            add(&mut out, r, hcol(1, l), -(&c * &(&shift(l) * &xi(i))));
        }
        add(&mut out, r, 0, &n * &xi(i));
    }

    // β_i: gauge rows, full sums over symmetric index pairs
    for i in 1..=3 {
        let r = 3 + i;
        let cc = -(&half / &n2);
        add(&mut out, r, hcol(0, 0), &cc * &xi(i));
        for k in 1..=3 {
            for j in 1..=3 {
                add(&mut out, r, hcol(k, j), &cc * &(&(&shift(k) * &shift(j)) * &xi(i)));
            }
        }
        for l in 1..=3 {
            add(&mut out, r, hcol(0, l), -(&cc * &(&int(2) * &(&shift(l) * &xi(i)))));
        }
        for k in 1..=3 {
            add(&mut out, r, hcol(k, k), &half * &xi(i));
        }
        let d = -(&int(1) / &n2);
        add(&mut out, r, hcol(0, i), &d * &s);
        for k in 1..=3 {
            add(&mut out, r, hcol(k, i), -(&d * &(&shift(k) * &s)));
        }
        for k in 1..=3 {
            add(&mut out, r, hcol(k, i), -xi(k));
        }
    }

    // β₀
    let d = -(&int(1) / &n2);
    add(&mut out, 7, hcol(0, 0), &d * &s);
    for k in 1..=3 {
        add(&mut out, 7, hcol(k, 0), -(&d * &(&shift(k) * &s)));
        add(&mut out, 7, hcol(k, 0), -xi(k));
    }
    out
}

pub fn build_boundary_symbol() -> BoundarySymbol {
    let n = lapse();
    let factor = -(&int(1) / &(&int(2) * &n.pow(2)));
    let tilde = printed_boundary_display().scale(&factor);
    let derived = derived_boundary_rows();
    let mut full = SymMatrix::zeros(11, 11);
    for k in 0..3 {
        full.set(k, 8 + k, RationalExpr::one());
    }
    for r in 0..8 {
        for c in 0..8 {
            full.set(3 + r, c, tilde.get(r, c).clone());
        }
        for c in 8..11 {
            full.set(3 + r, c, derived.get(r, c).clone());
        }
    }
    BoundarySymbol {
        full,
        tilde,
        unknown_order: UNKNOWN_ORDER,
        row_order: ROW_ORDER,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::symring::parse_expr;

    #[test]
    fn mean_curvature_row() {
        let b = build_boundary_symbol();
        assert_eq!(b.tilde.get(0, 6), &-xi(2));
        assert_eq!(b.tilde.get(0, 7), &-xi(3));
    }

    #[test]
    fn beta0_lapse_column() {
        let b = build_boundary_symbol();
        assert_eq!(
            b.tilde.get(7, 1),
            &parse_expr("-(xi1*X1 + xi2*X2 + xi3*X3)/N^2").unwrap()
        );
    }

    #[test]
    fn full_symbol_block_shape() {
        let b = build_boundary_symbol();
        for k in 0..3 {
            for c in 0..11 {
                let want = if c == 8 + k {
                    RationalExpr::one()
                } else {
                    RationalExpr::zero()
                };
                assert_eq!(b.full.get(k, c), &want);
            }
        }
    }

    #[test]
    fn derived_rows_agree_except_double_counted_shift_terms() {
        let b = build_boundary_symbol();
        let d = derived_boundary_rows();
        let mut differing = Vec::new();
        for r in 0..8 {
            for c in 0..8 {
                if d.get(r, c) != b.tilde.get(r, c) {
                    differing.push((r, c));
                }
            }
        }
        assert_eq!(differing, vec![(4, 6), (4, 7), (5, 6), (5, 7), (6, 6), (6, 7)]);
        // the printed entries carry X¹Xʲξᵢ once; the full symmetric sum carries it twice
        for (r, c) in differing {
            let i = r - 3;
            let j = c - 4;
            let gap = d.get(r, c) - b.tilde.get(r, c);
            let want = -(&(&(&shift(1) * &shift(j)) * &xi(i)) / &(&int(2) * &lapse().pow(2)));
            assert_eq!(gap, want, "entry ({r},{c})");
        }
    }

    #[test]
    fn star_block_mean_curvature() {
        let d = derived_boundary_rows();
        let half_xi1 = &xi(1) / &int(2);
        assert_eq!(d.get(0, 8), &half_xi1);
        assert!(d.get(0, 9).is_zero());
        assert_eq!(d.get(0, 10), &half_xi1);
        for c in 8..11 {
            assert!(d.get(7, c).is_zero());
        }
    }
}
