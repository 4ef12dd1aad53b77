use std::fmt;

use crate::symring::{bindings, rem_in_z, Poly, RationalExpr, SymError, SymMatrix, Var};

use super::interior::interior_scalar;
use super::{int, lapse, shift, tangential_norm_sq, xi, xi_dot_shift, BoundarySymbol};

/// Row divisors turning B̃·(−2N²) back into unit-scaled rows.
fn row_divisors() -> [RationalExpr; 8] {
    let n = lapse();
    [
        -(&int(2) * &n.pow(2)),
        &int(2) * &n,
        n.clone(),
        n,
        int(1),
        int(1),
        int(1),
        int(2),
    ]
}

/// All intermediate matrices of the replay, B̂₀ through B̂₅.
#[derive(Clone, Debug)]
pub struct Reduction {
    pub stages: Vec<SymMatrix>,
}

impl Reduction {
    pub fn bhat(&self) -> &SymMatrix {
        self.stages.last().expect("replay has stages")
    }
}

/// First entry where the replay departs from a printed intermediate matrix.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ReplayMismatch {
    pub stage: usize,
    pub row: usize,
    pub col: usize,
    pub computed: String,
    pub printed: String,
}

impl fmt::Display for ReplayMismatch {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "stage {} entry [{}][{}]: computed {} but printed {}",
            self.stage,
            self.row + 1,
            self.col + 1,
            self.computed,
            self.printed
        )
    }
}

impl std::error::Error for ReplayMismatch {}

fn checkpoint(stage: usize, got: &SymMatrix) -> Result<(), ReplayMismatch> {
    let want = printed_bhat_stage(stage);
    match got.first_mismatch(&want) {
        None => Ok(()),
        Some((i, j)) => Err(ReplayMismatch {
            stage,
            row: i,
            col: j,
            computed: got.get(i, j).to_string(),
            printed: want.get(i, j).to_string(),
        }),
    }
}

/// Replays the row and column operations from B̃ to B̂, comparing each stage
/// with the printed intermediate matrix. Indices below are 1-based in comments.
pub fn reduce_to_bhat(b: &BoundarySymbol) -> Result<Reduction, ReplayMismatch> {
    let n2 = lapse().pow(2);
    let x1 = shift(1);
    let mut m = b.tilde.scale(&-(&int(2) * &n2));
    for (i, d) in row_divisors().iter().enumerate() {
        m.scale_row(i, &(&int(1) / d));
    }
    let mut stages = vec![m.clone()];

    // stage 1: r2 -= X¹ r1, r5 += 2N² r1
    m.add_row_multiple(1, 0, &-x1.clone());
    m.add_row_multiple(4, 0, &(&int(2) * &n2));
    checkpoint(1, &m)?;
    stages.push(m.clone());

    // stage 2: r8 -= N² r2
    m.add_row_multiple(7, 1, &-n2.clone());
    checkpoint(2, &m)?;
    stages.push(m.clone());

    // stage 3: c6 += N² c2, then c(2+i) += Xⁱ c2
    m.add_col_multiple(5, 1, &n2);
    for i in 1..=3 {
        m.add_col_multiple(1 + i, 1, &shift(i));
    }
    checkpoint(3, &m)?;
    stages.push(m.clone());

    // stage 4: c(i+3) += X¹ c(i) for i = 3, 4, 5
    for i in 3..=5 {
        m.add_col_multiple(i + 2, i - 1, &x1);
    }
    checkpoint(4, &m)?;
    stages.push(m.clone());

    // stage 5: c(2+i) += Xⁱ c2, c3 += c1/(2N²), r2 += X¹ r1
    for i in 1..=3 {
        m.add_col_multiple(1 + i, 1, &shift(i));
    }
    m.add_col_multiple(2, 0, &(&int(1) / &(&int(2) * &n2)));
    m.add_row_multiple(1, 0, &x1);
    checkpoint(5, &m)?;
    stages.push(m);

    Ok(Reduction { stages })
}

/// Printed intermediate matrices B̂₁ … B̂₅ (stage 5 is the final B̂).
pub fn printed_bhat_stage(stage: usize) -> SymMatrix {
    let (x1, x2, x3) = (xi(1), xi(2), xi(3));
    let (s1, s2, s3) = (shift(1), shift(2), shift(3));
    let n2 = lapse().pow(2);
    let s = xi_dot_shift();
    let z = RationalExpr::zero;
    let two = int(2);
    let m = |a: &RationalExpr, b: &RationalExpr| a * b;
    let tw = |a: RationalExpr| &two * &a;
    let top = |r2: Vec<RationalExpr>| vec![vec![z(), z(), z(), z(), z(), z(), -x2.clone(), -x3.clone()], r2];
    let rows: Vec<Vec<RationalExpr>> = match stage {
        1 | 2 => {
            let mut r = top(vec![z(), z(), z(), x2.clone(), x3.clone(), z(), z(), z()]);
            r.extend(vec![
                vec![
                    -tw(m(&n2, &x2)),
                    z(),
                    x2.clone(),
                    x1.clone(),
                    z(),
                    -m(&x2, &s1),
                    m(&x3, &s3),
                    -m(&x2, &s3),
                ],
                vec![
                    -tw(m(&n2, &x3)),
                    z(),
                    x3.clone(),
                    z(),
                    x1.clone(),
                    -m(&x3, &s1),
                    -m(&x3, &s2),
                    m(&x2, &s2),
                ],
                vec![
                    z(),
                    x1.clone(),
                    &tw(s.clone()) - &tw(m(&x1, &s1)),
                    -tw(m(&x1, &s2)),
                    -tw(m(&x1, &s3)),
                    &(&(&x1 * &m(&s1, &s1)) + &m(&n2, &x1)) - &tw(m(&s, &s1)),
                    &(&x1 * &m(&s1, &s2)) - &tw(m(&s, &s2)),
                    &(&x1 * &m(&s1, &s3)) - &tw(m(&s, &s3)),
                ],
                vec![
                    z(),
                    x2.clone(),
                    -tw(m(&x2, &s1)),
                    &tw(s.clone()) - &tw(m(&x2, &s2)),
                    -tw(m(&x2, &s3)),
                    &(&x2 * &m(&s1, &s1)) - &m(&n2, &x2),
                    &(&(&x2 * &m(&s1, &s2)) - &tw(m(&s, &s1))) + &tw(m(&n2, &x1)),
                    &x2 * &m(&s1, &s3),
                ],
                vec![
                    z(),
                    x3.clone(),
                    -tw(m(&x3, &s1)),
                    -tw(m(&x3, &s2)),
                    &tw(s.clone()) - &tw(m(&x3, &s3)),
                    &(&x3 * &m(&s1, &s1)) - &m(&n2, &x3),
                    &x3 * &m(&s1, &s2),
                    &(&(&x3 * &m(&s1, &s3)) - &tw(m(&s, &s1))) + &tw(m(&n2, &x1)),
                ],
            ]);
            if stage == 1 {
                r.push(vec![
                    z(),
                    s.clone(),
                    &m(&n2, &x1) - &m(&s, &s1),
                    &m(&n2, &x2) - &m(&s, &s2),
                    &m(&n2, &x3) - &m(&s, &s3),
                    z(),
                    z(),
                    z(),
                ]);
            } else {
                r.push(vec![
                    z(),
                    s.clone(),
                    &m(&n2, &x1) - &m(&s, &s1),
                    -m(&s, &s2),
                    -m(&s, &s3),
                    z(),
                    z(),
                    z(),
                ]);
            }
            r
        }
        3 => {
            let mut r = top(vec![z(), z(), z(), x2.clone(), x3.clone(), z(), z(), z()]);
            r.extend(vec![
                vec![
                    -tw(m(&n2, &x2)),
                    z(),
                    x2.clone(),
                    x1.clone(),
                    z(),
                    -m(&x2, &s1),
                    m(&x3, &s3),
                    -m(&x2, &s3),
                ],
                vec![
                    -tw(m(&n2, &x3)),
                    z(),
                    x3.clone(),
                    z(),
                    x1.clone(),
                    -m(&x3, &s1),
                    -m(&x3, &s2),
                    m(&x2, &s2),
                ],
                vec![
                    z(),
                    x1.clone(),
                    &tw(s.clone()) - &m(&x1, &s1),
                    -m(&x1, &s2),
                    -m(&x1, &s3),
                    &(&(&x1 * &m(&s1, &s1)) + &tw(m(&n2, &x1))) - &tw(m(&s, &s1)),
                    &(&x1 * &m(&s1, &s2)) - &tw(m(&s, &s2)),
                    &(&x1 * &m(&s1, &s3)) - &tw(m(&s, &s3)),
                ],
                vec![
                    z(),
                    x2.clone(),
                    -m(&x2, &s1),
                    &tw(s.clone()) - &m(&x2, &s2),
                    -m(&x2, &s3),
                    &x2 * &m(&s1, &s1),
                    &(&(&x2 * &m(&s1, &s2)) - &tw(m(&s, &s1))) + &tw(m(&n2, &x1)),
                    &x2 * &m(&s1, &s3),
                ],
                vec![
                    z(),
                    x3.clone(),
                    -m(&x3, &s1),
                    -m(&x3, &s2),
                    &tw(s.clone()) - &m(&x3, &s3),
                    &x3 * &m(&s1, &s1),
                    &x3 * &m(&s1, &s2),
                    &(&(&x3 * &m(&s1, &s3)) - &tw(m(&s, &s1))) + &tw(m(&n2, &x1)),
                ],
                vec![z(), s.clone(), m(&n2, &x1), z(), z(), m(&n2, &s), z(), z()],
            ]);
            r
        }
        4 => {
            let mut r = top(vec![
                z(),
                z(),
                z(),
                x2.clone(),
                x3.clone(),
                z(),
                m(&x2, &s1),
                m(&x3, &s1),
            ]);
            r.extend(vec![
                vec![
                    -tw(m(&n2, &x2)),
                    z(),
                    x2.clone(),
                    x1.clone(),
                    z(),
                    z(),
                    &m(&x3, &s3) + &m(&x1, &s1),
                    -m(&x2, &s3),
                ],
                vec![
                    -tw(m(&n2, &x3)),
                    z(),
                    x3.clone(),
                    z(),
                    x1.clone(),
                    z(),
                    -m(&x3, &s2),
                    &m(&x2, &s2) + &m(&x1, &s1),
                ],
                vec![
                    z(),
                    x1.clone(),
                    &tw(s.clone()) - &m(&x1, &s1),
                    -m(&x1, &s2),
                    -m(&x1, &s3),
                    tw(m(&n2, &x1)),
                    -tw(m(&s, &s2)),
                    -tw(m(&s, &s3)),
                ],
                vec![
                    z(),
                    x2.clone(),
                    -m(&x2, &s1),
                    &tw(s.clone()) - &m(&x2, &s2),
                    -m(&x2, &s3),
                    z(),
                    tw(m(&n2, &x1)),
                    z(),
                ],
                vec![
                    z(),
                    x3.clone(),
                    -m(&x3, &s1),
                    -m(&x3, &s2),
                    &tw(s.clone()) - &m(&x3, &s3),
                    z(),
                    z(),
                    tw(m(&n2, &x1)),
                ],
                vec![
                    z(),
                    s.clone(),
                    m(&n2, &x1),
                    z(),
                    z(),
                    &m(&n2, &s) + &(&n2 * &m(&x1, &s1)),
                    z(),
                    z(),
                ],
            ]);
            r
        }
        5 => {
            let mut r = top(vec![z(), z(), z(), x2.clone(), x3.clone(), z(), z(), z()]);
            r.extend(vec![
                vec![
                    -tw(m(&n2, &x2)),
                    z(),
                    z(),
                    x1.clone(),
                    z(),
                    z(),
                    &m(&x1, &s1) + &m(&x3, &s3),
                    -m(&x2, &s3),
                ],
                vec![
                    -tw(m(&n2, &x3)),
                    z(),
                    z(),
                    z(),
                    x1.clone(),
                    z(),
                    -m(&x3, &s2),
                    &m(&x1, &s1) + &m(&x2, &s2),
                ],
                vec![
                    z(),
                    x1.clone(),
                    tw(s.clone()),
                    z(),
                    z(),
                    tw(m(&n2, &x1)),
                    -tw(m(&s, &s2)),
                    -tw(m(&s, &s3)),
                ],
                vec![z(), x2.clone(), z(), tw(s.clone()), z(), z(), tw(m(&n2, &x1)), z()],
                vec![z(), x3.clone(), z(), z(), tw(s.clone()), z(), z(), tw(m(&n2, &x1))],
                vec![
                    z(),
                    s.clone(),
                    &m(&n2, &x1) + &m(&s, &s1),
                    m(&s, &s2),
                    m(&s, &s3),
                    &m(&n2, &s) + &(&n2 * &m(&x1, &s1)),
                    z(),
                    z(),
                ],
            ]);
            r
        }
        _ => panic!("no printed matrix for stage {stage}"),
    };
    SymMatrix::from_rows(rows).expect("8x8")
}

/// det B̂ = 8N⁴(ξ₂²+ξ₃²)²(N²ξ₁² − S²)².
pub fn det_bhat_expected() -> RationalExpr {
    let eta = RationalExpr::from_poly(tangential_norm_sq());
    let q = &(&lapse().pow(2) * &xi(1).pow(2)) - &xi_dot_shift().pow(2);
    &(&int(8) * &lapse().pow(4)) * &(&eta.pow(2) * &q.pow(2))
}

/// det B̃ = −(ξ₂²+ξ₃²)²(N²ξ₁² − S²)²/(4N⁷).
pub fn det_btilde_expected() -> RationalExpr {
    let eta = RationalExpr::from_poly(tangential_norm_sq());
    let q = &(&lapse().pow(2) * &xi(1).pow(2)) - &xi_dot_shift().pow(2);
    -(&(&eta.pow(2) * &q.pow(2)) / &(&int(4) * &lapse().pow(7)))
}

/// Determinant of B̂ as computed by fraction-free elimination.
pub fn det_bhat_closed_form(r: &Reduction) -> Result<RationalExpr, SymError> {
    r.bhat().det_bareiss()
}

/// N²·a(η + zμ) as a polynomial in z (μ along index 1).
pub fn tangential_root_divisor() -> Poly {
    let a = interior_scalar();
    let b = bindings(&[(Var::Xi1, RationalExpr::var(Var::Z))]);
    let scaled = &a.substitute(&b).expect("substitution") * &lapse().pow(2);
    scaled.as_poly().expect("polynomial after clearing N²").clone()
}

/// Remainder of det B̂(η + zμ) modulo a(η + zμ).
pub fn tangential_certificate(det_bhat: &RationalExpr) -> Result<RationalExpr, SymError> {
    let b = bindings(&[(Var::Xi1, RationalExpr::var(Var::Z))]);
    let f = det_bhat.substitute(&b)?;
    rem_in_z(&f, &tangential_root_divisor())
}
