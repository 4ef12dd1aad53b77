//! Linearized boundary data as real spherical-harmonic coefficients of scalar potentials.
//!
//! On the unit sphere with round metric P and rotation J v = n × v:
//! - γ′ = A·P + Σ B_lm tf(Hess Y_lm) + Σ C_lm J·tf(Hess Y_lm)
//! - H′ = Σ H_lm Y_lm, k′ = Σ k_lm Y_lm
//! - τ′ = Σ E_lm ∇Y_lm + Σ F_lm J∇Y_lm
//!
//! where tf is the trace-free part. Arrays are indexed by l² + l + m; the even/odd tensor
//! potentials are ignored for l < 2 and the vector potentials for l = 0.

use nalgebra::{Matrix3, Rotation3, Vector3};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::harmonics::{sh_count, sh_table, solid_harmonics, SolidHarmonic, SphereGrid};
use super::FlatError;

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct MetricPotentials {
    #[serde(default)]
    pub trace: Vec<f64>,
    #[serde(default)]
    pub even: Vec<f64>,
    #[serde(default)]
    pub odd: Vec<f64>,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct VectorPotentials {
    #[serde(default)]
    pub even: Vec<f64>,
    #[serde(default)]
    pub odd: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoundaryData {
    pub lmax: usize,
    #[serde(default)]
    pub gamma_prime: MetricPotentials,
    #[serde(rename = "H_prime", default)]
    pub h_prime: Vec<f64>,
    #[serde(default)]
    pub k_prime: Vec<f64>,
    #[serde(default)]
    pub tau_prime: VectorPotentials,
}

/// Cartesian values of the data at a point of the unit sphere.
#[derive(Clone, Copy, Debug)]
pub struct DataValues {
    pub gamma: Matrix3<f64>,
    pub mean_curvature: f64,
    pub trace_k: f64,
    pub tau: Vector3<f64>,
}

fn cross_matrix(n: &Vector3<f64>) -> Matrix3<f64> {
    Matrix3::new(0.0, -n[2], n[1], n[2], 0.0, -n[0], -n[1], n[0], 0.0)
}

impl BoundaryData {
    pub fn zero(lmax: usize) -> Self {
        let z = vec![0.0; sh_count(lmax)];
        BoundaryData {
            lmax,
            gamma_prime: MetricPotentials {
                trace: z.clone(),
                even: z.clone(),
                odd: z.clone(),
            },
            h_prime: z.clone(),
            k_prime: z.clone(),
            tau_prime: VectorPotentials {
                even: z.clone(),
                odd: z,
            },
        }
    }

    pub fn from_json(text: &str) -> Result<Self, FlatError> {
        let d: BoundaryData = serde_json::from_str(text).map_err(|e| FlatError::InvalidData(e.to_string()))?;
        d.normalized()
    }

    fn arrays_mut(&mut self) -> [(&'static str, &mut Vec<f64>); 7] {
        [
            ("gamma_prime.trace", &mut self.gamma_prime.trace),
            ("gamma_prime.even", &mut self.gamma_prime.even),
            ("gamma_prime.odd", &mut self.gamma_prime.odd),
            ("H_prime", &mut self.h_prime),
            ("k_prime", &mut self.k_prime),
            ("tau_prime.even", &mut self.tau_prime.even),
            ("tau_prime.odd", &mut self.tau_prime.odd),
        ]
    }

    /// Pad every array to (lmax + 1)² entries; reject longer arrays and non-finite values.
    pub fn normalized(mut self) -> Result<Self, FlatError> {
        let n = sh_count(self.lmax);
        for (name, a) in self.arrays_mut() {
            if a.len() > n {
                return Err(FlatError::InvalidData(format!(
                    "{name} has {} entries, lmax allows {n}",
                    a.len()
                )));
            }
            if a.iter().any(|v| !v.is_finite()) {
                return Err(FlatError::InvalidData(format!("{name} contains a non-finite value")));
            }
            a.resize(n, 0.0);
        }
        Ok(self)
    }

    /// Seeded data with every coefficient uniform in [−amplitude, amplitude].
    pub fn random(lmax: usize, amplitude: f64, seed: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut d = BoundaryData::zero(lmax);
        for (_, a) in d.arrays_mut() {
            a.iter_mut().for_each(|v| *v = rng.gen_range(-amplitude..=amplitude));
        }
        d
    }

    /// The seven coefficient arrays in condition-row order.
    pub fn arrays(&self) -> [&[f64]; 7] {
        [
            &self.gamma_prime.trace,
            &self.gamma_prime.even,
            &self.gamma_prime.odd,
            &self.h_prime,
            &self.k_prime,
            &self.tau_prime.even,
            &self.tau_prime.odd,
        ]
    }

    /// Data coefficient paired with a condition row; gauge rows have zero data.
    pub fn coefficient(&self, condition: usize, index: usize) -> f64 {
        match self.arrays().get(condition) {
            Some(a) => a.get(index).copied().unwrap_or(0.0),
            None => 0.0,
        }
    }

    pub fn is_zero(&self) -> bool {
        self.arrays().iter().all(|a| a.iter().all(|v| *v == 0.0))
    }

    /// Data evaluated at a point of the unit sphere.
    pub fn values(&self, basis: &[SolidHarmonic], n: &Vector3<f64>) -> DataValues {
        let p = Matrix3::identity() - n * n.transpose();
        let j = cross_matrix(n);
        let mut out = DataValues {
            gamma: Matrix3::zeros(),
            mean_curvature: 0.0,
            trace_k: 0.0,
            tau: Vector3::zeros(),
        };
        for (i, b) in basis.iter().enumerate().take(sh_count(self.lmax)) {
            let y = b.on_sphere(n);
            let grad = p * Vector3::from_fn(|a, _| b.grad[a].eval(n));
            let hess = p * Matrix3::from_fn(|a, c| b.hess[a][c].eval(n)) * p - p * (b.l as f64 * y);
            let tf = hess - p * (0.5 * hess.trace());
            let [a, be, c, h, k, e, f] = self.arrays().map(|arr| arr[i]);
            out.gamma += p * (a * y) + tf * be + j * tf * c;
            out.mean_curvature += h * y;
            out.trace_k += k * y;
            out.tau += grad * e + j * grad * f;
        }
        out
    }

    /// ∫(ω′ − k′n) dA over the unit sphere. The conditions carry G only through ∇G and 2G, whose
    /// contributions cancel in this integral, and the gauge forces Y = O(r⁻²); so this flux (the
    /// linearized ADM momentum) must vanish for the data to be attainable.
    pub fn momentum_flux(&self) -> Vector3<f64> {
        let basis = solid_harmonics(self.lmax);
        let grid = SphereGrid::exact_to(self.lmax + 2);
        grid.points
            .iter()
            .zip(&grid.weights)
            .map(|(n, w)| {
                let v = self.values(&basis, n);
                (v.tau - n * v.trace_k) * *w
            })
            .sum()
    }

    /// Copy with the l = 1 part of k′ adjusted so that the momentum flux vanishes.
    pub fn momentum_free(&self) -> Self {
        let mut d = self.clone();
        if d.lmax >= 1 {
            for i in 1..4 {
                d.k_prime[i] = 2.0 * d.tau_prime.even[i];
            }
        }
        d
    }

    /// Data of the rotated configuration: every potential φ becomes φ∘R⁻¹.
    pub fn rotated(&self, rot: &Rotation3<f64>) -> Self {
        let basis = solid_harmonics(self.lmax);
        let grid = SphereGrid::exact_to(2 * self.lmax + 2);
        let table = sh_table(&basis, &grid);
        let inv = rot.inverse();
        let back: Vec<Vec<f64>> = grid
            .points
            .iter()
            .map(|p| basis.iter().map(|b| b.on_sphere(&(inv * p))).collect())
            .collect();
        let mut out = self.clone();
        let turn = |a: &[f64]| -> Vec<f64> {
            (0..basis.len())
                .map(|j| {
                    (0..grid.len())
                        .map(|q| {
                            let v: f64 = a.iter().zip(&back[q]).map(|(c, y)| c * y).sum();
                            grid.weights[q] * v * table[q][j]
                        })
                        .sum()
                })
                .collect()
        };
        out.gamma_prime.trace = turn(&self.gamma_prime.trace);
        out.gamma_prime.even = turn(&self.gamma_prime.even);
        out.gamma_prime.odd = turn(&self.gamma_prime.odd);
        out.h_prime = turn(&self.h_prime);
        out.k_prime = turn(&self.k_prime);
        out.tau_prime.even = turn(&self.tau_prime.even);
        out.tau_prime.odd = turn(&self.tau_prime.odd);
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn json_round_trip_and_padding() {
        let text = r#"{"lmax": 1, "H_prime": [0.5], "gamma_prime": {"trace": [0.1, 0.0, 0.2]}}"#;
        let d = BoundaryData::from_json(text).unwrap();
        assert_eq!(d.h_prime, vec![0.5, 0.0, 0.0, 0.0]);
        assert_eq!(d.gamma_prime.trace.len(), 4);
        assert_eq!(d.tau_prime.odd, vec![0.0; 4]);
        let back = BoundaryData::from_json(&serde_json::to_string(&d).unwrap()).unwrap();
        assert_eq!(back, d);
    }

    #[test]
    fn oversized_arrays_rejected() {
        let text = r#"{"lmax": 0, "k_prime": [1.0, 2.0]}"#;
        assert!(BoundaryData::from_json(text).is_err());
        assert!(BoundaryData::from_json(r#"{"H_prime": []}"#).is_err());
    }

    #[test]
    fn values_are_tangential_and_trace_carries_the_trace_potential() {
        let d = BoundaryData::random(3, 1.0, 7);
        let basis = solid_harmonics(3);
        let n = Vector3::new(0.2, -0.4, 0.7).normalize();
        let v = d.values(&basis, &n);
        assert!((v.gamma * n).norm() < 1e-13);
        assert!(v.tau.dot(&n).abs() < 1e-13);
        let a: f64 = (0..16).map(|i| d.gamma_prime.trace[i] * basis[i].on_sphere(&n)).sum();
        assert!((0.5 * v.gamma.trace() - a).abs() < 1e-13);
        assert!((v.gamma - v.gamma.transpose()).norm() < 1e-13);
    }

    #[test]
    fn momentum_flux_closed_form() {
        let d = BoundaryData::random(3, 1.0, 5);
        // ∫∇Y₁ₘ = 2∫Y₁ₘn and ∫Y₁ₘn = √(4π/3) eₘ with e₋₁ = y, e₀ = z, e₁ = x
        let c = (4.0 * std::f64::consts::PI / 3.0).sqrt();
        let g = |i: usize| (2.0 * d.tau_prime.even[i] - d.k_prime[i]) * c;
        let want = Vector3::new(g(3), g(1), g(2));
        assert!((d.momentum_flux() - want).norm() < 1e-13);
        assert!(d.momentum_free().momentum_flux().norm() < 1e-13);
    }

    #[test]
    fn rotation_composes() {
        let d = BoundaryData::random(2, 1.0, 3);
        let r1 = Rotation3::from_euler_angles(0.3, -0.2, 1.1);
        let r2 = Rotation3::from_euler_angles(-0.7, 0.4, 0.2);
        let a = d.rotated(&r1).rotated(&r2);
        let b = d.rotated(&(r2 * r1));
        for (x, y) in a.arrays().iter().zip(b.arrays()) {
            for (u, v) in x.iter().zip(y) {
                assert!((u - v).abs() < 1e-12);
            }
        }
    }
}
