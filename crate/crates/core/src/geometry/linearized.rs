//! Bartnik data linearized at the flat background, for perturbations (h, Y, v) of
//! g⁽⁴⁾ = −dt² + δ: h₀₀ = −2v, h₀ᵢ = Yᵢ, hᵢⱼ = hᵢⱼ.

use nalgebra::{Matrix2, Matrix3, Matrix4, Vector2, Vector3};

use super::bartnik::{BartnikData, BoundaryPoint};
use super::fd::{FdConfig, Point};
use super::metric::{field, Field, Metric4};

#[derive(Clone)]
pub struct FlatPerturbation {
    pub h: Field<Matrix3<f64>>,
    pub y: Field<Vector3<f64>>,
    pub v: Field<f64>,
}

impl FlatPerturbation {
    /// Components of −dt² + δ + ε·(perturbation).
    pub fn metric(&self, eps: f64) -> Metric4 {
        let p = self.clone();
        Metric4::new(field(move |x: &Point| {
            let (h, y, v) = ((p.h)(x), (p.y)(x), (p.v)(x));
            let mut m = Matrix4::identity();
            m[(0, 0)] = -1.0 - 2.0 * eps * v;
            for i in 0..3 {
                m[(0, i + 1)] = eps * y[i];
                m[(i + 1, 0)] = eps * y[i];
                for j in 0..3 {
                    m[(i + 1, j + 1)] += eps * h[(i, j)];
                }
            }
            m
        }))
    }
}

/// Derivative of (γ, H, tr_{∂M}K, τ) at ε = 0 on the coordinate sphere through `p`.
pub fn linearized_data(f: &FlatPerturbation, p: &BoundaryPoint, fd: &FdConfig) -> BartnikData {
    let x = p.position();
    let r = p.radius;
    let n = x / r;
    let e = p.tangents();
    let h = (f.h)(&x);
    let dh = fd.gradient(&*f.h, &x);
    let dy = fd.gradient(&*f.y, &x);
    let div_h = Vector3::from_fn(|j, _| (0..3).map(|i| dh[i][(i, j)]).sum::<f64>());
    let dn_h: Matrix3<f64> = (0..3).map(|k| dh[k] * n[k]).sum();
    let h_nn = n.dot(&(h * n));
    let mean_curvature = 0.5 * n.dot(&(dn_h * n)) + 2.0 * h_nn / r - div_h.dot(&n) - h.trace() / r + 0.5 * dn_h.trace();
    // K′ = −δ*Y
    let k = -Matrix3::from_fn(|i, j| 0.5 * (dy[i][j] + dy[j][i]));
    let gamma0 = Matrix2::from_fn(|a, b| e[a].dot(&e[b]));
    let gamma0_inv = gamma0.try_inverse().unwrap_or_else(|| Matrix2::from_element(f64::NAN));
    let k_tan = Matrix2::from_fn(|a, b| e[a].dot(&(k * e[b])));
    BartnikData {
        gamma: Matrix2::from_fn(|a, b| e[a].dot(&(h * e[b]))),
        mean_curvature,
        trace_k: gamma0_inv.component_mul(&k_tan).sum(),
        tau: Vector2::new(n.dot(&(k * e[0])), n.dot(&(k * e[1]))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::bartnik::bartnik_data;

    fn sample() -> FlatPerturbation {
        FlatPerturbation {
            h: field(|x: &Point| {
                let r = x.norm();
                let a = Matrix3::new(0.3, 0.1, -0.2, 0.1, -0.4, 0.05, -0.2, 0.05, 0.7);
                let b = x * x.transpose() * (0.2 / (r * r));
                (a + b + Matrix3::identity() * (x[2] * 0.3)) / r
            }),
            y: field(|x: &Point| {
                let r = x.norm();
                Vector3::new(0.2 + x[1] * 0.3, -0.5 * x[0] * x[2] / r, 0.4) / (r * r)
            }),
            v: field(|x: &Point| 0.3 * x[0] / x.norm().powi(3)),
        }
    }

    #[test]
    fn matches_derivative_of_nonlinear_data() {
        let f = sample();
        let fd = FdConfig::default();
        let eps = 1e-4;
        for p in [BoundaryPoint::new(1.0, 0.7, 0.3), BoundaryPoint::new(1.4, 2.1, -1.9)] {
            let lin = linearized_data(&f, &p, &fd);
            let plus = bartnik_data(&f.metric(eps), &p).unwrap();
            let minus = bartnik_data(&f.metric(-eps), &p).unwrap();
            let d = |a: f64, b: f64| (a - b) / (2.0 * eps);
            let g = (plus.gamma - minus.gamma) / (2.0 * eps);
            assert!((g - lin.gamma).norm() < 1e-6);
            assert!((d(plus.mean_curvature, minus.mean_curvature) - lin.mean_curvature).abs() < 1e-6);
            assert!((d(plus.trace_k, minus.trace_k) - lin.trace_k).abs() < 1e-6);
            let t = (plus.tau - minus.tau) / (2.0 * eps);
            assert!((t - lin.tau).norm() < 1e-6);
        }
    }
}
