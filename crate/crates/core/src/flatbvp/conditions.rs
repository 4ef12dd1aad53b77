//! Pointwise boundary and gauge conditions of the linearized flat problem on the unit sphere.

use nalgebra::{Matrix3, Vector3};

use super::harmonics::ScalarJet;

/// Unknown components in column order: Cartesian hᵢⱼ (upper triangle), Y, v, G.
pub const COMPONENTS: [&str; 11] = ["h11", "h12", "h13", "h22", "h23", "h33", "Y1", "Y2", "Y3", "v", "G"];

/// Symmetric index pairs of the six h components.
pub const H_PAIRS: [(usize, usize); 6] = [(0, 0), (0, 1), (0, 2), (1, 1), (1, 2), (2, 2)];

/// Condition rows per harmonic mode, in row-block order.
pub const CONDITIONS: [&str; 11] = [
    "gamma_trace",
    "gamma_even",
    "gamma_odd",
    "mean_curvature",
    "trace_k",
    "tau_even",
    "tau_odd",
    "div_y",
    "gauge_1",
    "gauge_2",
    "gauge_3",
];

/// Smallest degree at which a condition row carries information.
pub fn condition_min_degree(c: usize) -> usize {
    match c {
        1 | 2 => 2,
        5 | 6 => 1,
        _ => 0,
    }
}

/// First derivatives of all unknowns at one point.
#[derive(Clone, Copy, Debug)]
pub struct FieldJets {
    pub h: Matrix3<f64>,
    /// dh[k] = ∂ₖh
    pub dh: [Matrix3<f64>; 3],
    pub y: Vector3<f64>,
    /// dy[(i, j)] = ∂ᵢYⱼ
    pub dy: Matrix3<f64>,
    pub v: f64,
    pub dv: Vector3<f64>,
    pub g: f64,
    pub dg: Vector3<f64>,
}

impl FieldJets {
    pub fn zero() -> Self {
        FieldJets {
            h: Matrix3::zeros(),
            dh: [Matrix3::zeros(); 3],
            y: Vector3::zeros(),
            dy: Matrix3::zeros(),
            v: 0.0,
            dv: Vector3::zeros(),
            g: 0.0,
            dg: Vector3::zeros(),
        }
    }

    /// Accumulate `s` times a scalar jet placed in component `c`.
    pub fn add_component(&mut self, c: usize, j: &ScalarJet, s: f64) {
        match c {
            0..=5 => {
                let (a, b) = H_PAIRS[c];
                self.h[(a, b)] += s * j.value;
                for k in 0..3 {
                    self.dh[k][(a, b)] += s * j.grad[k];
                }
                if a != b {
                    self.h[(b, a)] += s * j.value;
                    for k in 0..3 {
                        self.dh[k][(b, a)] += s * j.grad[k];
                    }
                }
            }
            6..=8 => {
                self.y[c - 6] += s * j.value;
                for i in 0..3 {
                    self.dy[(i, c - 6)] += s * j.grad[i];
                }
            }
            9 => {
                self.v += s * j.value;
                self.dv += j.grad * s;
            }
            _ => {
                self.g += s * j.value;
                self.dg += j.grad * s;
            }
        }
    }
}

/// Orthonormal tangent frame (∂_polar, ∂_azimuth normalized) at a unit vector off the poles.
pub fn tangent_frame(n: &Vector3<f64>) -> [Vector3<f64>; 2] {
    let rho = (n[0] * n[0] + n[1] * n[1]).sqrt();
    let (cp, sp) = (n[0] / rho, n[1] / rho);
    [Vector3::new(n[2] * cp, n[2] * sp, -rho), Vector3::new(-sp, cp, 0.0)]
}

/// Boundary and gauge quantities at a point of the unit sphere, tangential parts in a frame.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct ConditionValues {
    /// γ′ in the frame: (11, 12, 22)
    pub gamma: [f64; 3],
    pub mean_curvature: f64,
    /// (tr K)′ + 2G
    pub trace_k: f64,
    /// ω′ + ∇G in the frame
    pub tau: [f64; 2],
    /// δY = −div Y
    pub div_y: f64,
    /// δh + ½d(tr h + 2v)
    pub gauge: [f64; 3],
}

impl ConditionValues {
    pub fn max_abs(&self) -> f64 {
        self.gamma
            .iter()
            .chain(&self.tau)
            .chain(&self.gauge)
            .chain([&self.mean_curvature, &self.trace_k, &self.div_y])
            .fold(0.0f64, |m, v| m.max(v.abs()))
    }

    pub fn minus(&self, o: &ConditionValues) -> ConditionValues {
        let sub = |a: &[f64], b: &[f64]| -> Vec<f64> { a.iter().zip(b).map(|(x, y)| x - y).collect() };
        let g = sub(&self.gamma, &o.gamma);
        let t = sub(&self.tau, &o.tau);
        let q = sub(&self.gauge, &o.gauge);
        ConditionValues {
            gamma: [g[0], g[1], g[2]],
            mean_curvature: self.mean_curvature - o.mean_curvature,
            trace_k: self.trace_k - o.trace_k,
            tau: [t[0], t[1]],
            div_y: self.div_y - o.div_y,
            gauge: [q[0], q[1], q[2]],
        }
    }
}

/// Divergence (div h)ⱼ = ∂ᵢhᵢⱼ.
pub fn divergence(dh: &[Matrix3<f64>; 3]) -> Vector3<f64> {
    Vector3::from_fn(|j, _| (0..3).map(|i| dh[i][(i, j)]).sum::<f64>())
}

/// δh + ½d(tr h + 2v) and δY at any point.
pub fn gauge_terms(f: &FieldJets) -> (Vector3<f64>, f64) {
    let d_tr = Vector3::from_fn(|k, _| f.dh[k].trace());
    (-divergence(&f.dh) + d_tr * 0.5 + f.dv, -f.dy.trace())
}

/// All conditions at the unit-sphere point `n`.
pub fn evaluate(n: &Vector3<f64>, frame: &[Vector3<f64>; 2], f: &FieldJets) -> ConditionValues {
    let [e1, e2] = frame;
    let dn_h: Matrix3<f64> = (0..3).map(|k| f.dh[k] * n[k]).sum();
    let h_nn = n.dot(&(f.h * n));
    let mean_curvature =
        0.5 * n.dot(&(dn_h * n)) + 2.0 * h_nn - divergence(&f.dh).dot(n) - f.h.trace() + 0.5 * dn_h.trace();
    let sym_dy = (f.dy + f.dy.transpose()) * 0.5;
    let trace_k = -(e1.dot(&(sym_dy * e1)) + e2.dot(&(sym_dy * e2))) + 2.0 * f.g;
    let omega = -(sym_dy * n);
    let (gauge, div_y) = gauge_terms(f);
    ConditionValues {
        gamma: [e1.dot(&(f.h * e1)), e1.dot(&(f.h * e2)), e2.dot(&(f.h * e2))],
        mean_curvature,
        trace_k,
        tau: [e1.dot(&(omega + f.dg)), e2.dot(&(omega + f.dg))],
        div_y,
        gauge: [gauge[0], gauge[1], gauge[2]],
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn frame_is_orthonormal_and_oriented() {
        let n = Vector3::new(0.3, -0.5, 0.7).normalize();
        let [a, b] = tangent_frame(&n);
        assert!((a.norm() - 1.0).abs() < 1e-15 && (b.norm() - 1.0).abs() < 1e-15);
        assert!(a.dot(&b).abs() < 1e-15 && a.dot(&n).abs() < 1e-15);
        assert!((n.cross(&a) - b).norm() < 1e-15);
    }

    #[test]
    fn pure_trace_metric_change() {
        // h = 2φδ with φ = 1/r: conformal change of the round sphere
        let mut f = FieldJets::zero();
        let n = Vector3::new(0.0, 0.6, 0.8);
        let j = ScalarJet {
            value: 2.0,
            grad: -n * 2.0,
            hess: Matrix3::zeros(),
        };
        for c in [0, 3, 5] {
            f.add_component(c, &j, 1.0);
        }
        let v = evaluate(&n, &tangent_frame(&n), &f);
        assert_eq!(v.gamma[1], 0.0);
        assert!((v.gamma[0] - 2.0).abs() < 1e-15);
        // H of e^{2φ}δ at r=1: 2e^{−φ}(1 + ∂_rφ) → linear change −2φ + 2∂_rφ = −4
        assert!((v.mean_curvature + 4.0).abs() < 1e-14);
    }
}
