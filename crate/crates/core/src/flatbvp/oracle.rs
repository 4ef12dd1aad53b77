//! Independent check of the spherically symmetric solve: collocation least squares over radial
//! decaying powers, with all derivatives by finite differences and the boundary rows from the
//! geometry module's flat linearization.

use nalgebra::{DMatrix, DVector, Matrix3, Vector3};

use super::conditions::{gauge_terms, FieldJets};
use super::data::BoundaryData;
use super::harmonics::{sh_index, ScalarJet};
use super::solve::{solve, ResidualPoints, Solution};
use super::FlatError;
use crate::geometry::bartnik::BoundaryPoint;
use crate::geometry::linearized::{linearized_data, FlatPerturbation};
use crate::geometry::{field, FdConfig};

/// Radial profiles: h = p(r)δ + q(r) n⊗n, Y = s(r) n, v(r), G(r), each Σₖ cₖ r⁻ᵏ.
const PROFILES: usize = 5;
const POWERS: usize = 6;

type Fields = (Matrix3<f64>, Vector3<f64>, f64, f64);

fn radial_fields(unknown: usize, x: &Vector3<f64>) -> Fields {
    let r = x.norm();
    let n = x / r;
    let w = r.powi(-((unknown % POWERS) as i32 + 1));
    let mut out = (Matrix3::zeros(), Vector3::zeros(), 0.0, 0.0);
    match unknown / POWERS {
        0 => out.0 = Matrix3::identity() * w,
        1 => out.0 = n * n.transpose() * w,
        2 => out.1 = n * w,
        3 => out.2 = w,
        _ => out.3 = w,
    }
    out
}

fn jets_by_fd(unknown: usize, x: &Vector3<f64>, fd: &FdConfig) -> (FieldJets, [f64; 11]) {
    let h = move |p: &Vector3<f64>| radial_fields(unknown, p).0;
    let y = move |p: &Vector3<f64>| radial_fields(unknown, p).1;
    let v = move |p: &Vector3<f64>| radial_fields(unknown, p).2;
    let g = move |p: &Vector3<f64>| radial_fields(unknown, p).3;
    let (h0, y0, v0, g0) = radial_fields(unknown, x);
    let dy = fd.gradient(&y, x);
    let jets = FieldJets {
        h: h0,
        dh: fd.gradient(&h, x),
        y: y0,
        dy: Matrix3::from_fn(|i, j| dy[i][j]),
        v: v0,
        dv: Vector3::from(fd.gradient(&v, x)),
        g: g0,
        dg: Vector3::from(fd.gradient(&g, x)),
    };
    let trace = |f: &dyn Fn(&Vector3<f64>) -> f64| (0..3).map(|i| fd.second(f, x, i, i)).sum::<f64>();
    let mut lap = [0.0; 11];
    for (k, (a, b)) in super::conditions::H_PAIRS.iter().enumerate() {
        lap[k] = trace(&|p| h(p)[(*a, *b)]);
    }
    for a in 0..3 {
        lap[6 + a] = trace(&|p| y(p)[a]);
    }
    lap[9] = trace(&v);
    lap[10] = trace(&g);
    (jets, lap)
}

/// Coefficients of the radial profiles.
#[derive(Clone, Debug)]
pub struct RadialSolution {
    pub coefficients: DVector<f64>,
    pub fit_residual: f64,
}

impl RadialSolution {
    /// (h, v, G − x·Y) at x: quantities unchanged by the spherically symmetric time-shift mode.
    pub fn invariants(&self, x: &Vector3<f64>) -> [f64; 8] {
        let mut acc = (Matrix3::zeros(), Vector3::zeros(), 0.0, 0.0);
        for (u, c) in self.coefficients.iter().enumerate() {
            let (h, y, v, g) = radial_fields(u, x);
            acc.0 += h * *c;
            acc.1 += y * *c;
            acc.2 += v * c;
            acc.3 += g * c;
        }
        invariants_of(&acc.0, &acc.1, acc.2, acc.3, x)
    }
}

fn invariants_of(h: &Matrix3<f64>, y: &Vector3<f64>, v: f64, g: f64, x: &Vector3<f64>) -> [f64; 8] {
    [
        h[(0, 0)],
        h[(0, 1)],
        h[(0, 2)],
        h[(1, 1)],
        h[(1, 2)],
        h[(2, 2)],
        v,
        g - x.dot(y),
    ]
}

/// Solve the radial problem for H′ = `eps` (all other data zero).
pub fn radial_solve(eps: f64) -> RadialSolution {
    let fd = FdConfig::default();
    let dir = Vector3::new(0.36, -0.48, 0.8);
    let radii = [1.25, 1.6, 2.0, 2.7, 3.5, 5.0];
    let nu = PROFILES * POWERS;
    let mut rows: Vec<Vec<f64>> = Vec::new();
    let mut rhs: Vec<f64> = Vec::new();
    let mut push = |vals: Vec<f64>, target: f64| {
        rows.push(vals);
        rhs.push(target);
    };
    // interior and gauge rows
    for r in radii.iter().chain(&[1.0]) {
        let x = dir * *r;
        let per: Vec<(FieldJets, [f64; 11])> = (0..nu).map(|u| jets_by_fd(u, &x, &fd)).collect();
        if *r > 1.0 {
            for k in 0..11 {
                push(per.iter().map(|p| p.1[k]).collect(), 0.0);
            }
        }
        let gauge: Vec<(Vector3<f64>, f64)> = per.iter().map(|p| gauge_terms(&p.0)).collect();
        for k in 0..3 {
            push(gauge.iter().map(|g| g.0[k]).collect(), 0.0);
        }
        push(gauge.iter().map(|g| g.1).collect(), 0.0);
    }
    // boundary rows at three points
    for p in [
        BoundaryPoint::new(1.0, 0.9, 0.4),
        BoundaryPoint::new(1.0, 2.0, 2.5),
        BoundaryPoint::new(1.0, 1.3, -1.7),
    ] {
        let x = p.position();
        let e = p.tangents();
        let per: Vec<[f64; 8]> = (0..nu)
            .map(|u| {
                let pert = FlatPerturbation {
                    h: field(move |q| radial_fields(u, q).0),
                    y: field(move |q| radial_fields(u, q).1),
                    v: field(move |q| radial_fields(u, q).2),
                };
                let lin = linearized_data(&pert, &p, &fd);
                let g = move |q: &Vector3<f64>| radial_fields(u, q).3;
                let dg = Vector3::from(fd.gradient(&g, &x));
                [
                    lin.gamma[(0, 0)],
                    lin.gamma[(0, 1)],
                    lin.gamma[(1, 1)],
                    lin.mean_curvature,
                    lin.trace_k + 2.0 * g(&x),
                    lin.tau[0] + e[0].dot(&dg),
                    lin.tau[1] + e[1].dot(&dg),
                    0.0,
                ]
            })
            .collect();
        for k in 0..7 {
            push(per.iter().map(|v| v[k]).collect(), if k == 3 { eps } else { 0.0 });
        }
    }
    let a = DMatrix::from_fn(rows.len(), nu, |i, j| rows[i][j]);
    let b = DVector::from_vec(rhs);
    let svd = a.clone().svd(true, true);
    let c = svd
        .solve(&b, 1e-9 * svd.singular_values.max())
        .unwrap_or_else(|_| DVector::zeros(nu));
    let fit_residual = (&a * &c - &b).amax();
    RadialSolution {
        coefficients: c,
        fit_residual,
    }
}

/// Largest difference of the time-shift-invariant quantities between the spectral and radial
/// solutions of H′ = `eps`, over a few radii, with the spectral solve at truncation `lmax`.
pub fn radial_comparison(eps: f64, lmax: usize) -> Result<(f64, Solution, RadialSolution), FlatError> {
    let mut data = BoundaryData::zero(0);
    data.h_prime[sh_index(0, 0)] = eps * (4.0 * std::f64::consts::PI).sqrt();
    let (sol, _) = solve(&data, lmax, ResidualPoints::default())?;
    let radial = radial_solve(eps);
    let mut worst: f64 = 0.0;
    for r in [1.0, 1.5, 2.0, 3.0, 5.0] {
        for dir in [Vector3::new(0.0, 0.6, 0.8), Vector3::new(-0.48, 0.36, -0.8)] {
            let x = dir * r;
            let j: [ScalarJet; 11] = sol.component_jets(&x)?;
            let v = j.map(|s| s.value);
            let mut h = Matrix3::zeros();
            for (k, (a, b)) in super::conditions::H_PAIRS.iter().enumerate() {
                h[(*a, *b)] = v[k];
                h[(*b, *a)] = v[k];
            }
            let spectral = invariants_of(&h, &Vector3::new(v[6], v[7], v[8]), v[9], v[10], &x);
            let oracle = radial.invariants(&x);
            for (s, o) in spectral.iter().zip(&oracle) {
                worst = worst.max((s - o).abs());
            }
        }
    }
    Ok((worst, sol, radial))
}
