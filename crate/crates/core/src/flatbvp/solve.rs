//! Kernel analysis and least-squares solves of the projected system, with pointwise residuals.

use std::collections::BTreeMap;
use std::sync::Arc;

use nalgebra::{DVector, Matrix3, Rotation3, Vector3};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::conditions::{gauge_terms, FieldJets, COMPONENTS, H_PAIRS};
use super::data::BoundaryData;
use super::harmonics::{sh_count, sh_index, solid_harmonics, ScalarJet, SolidHarmonic};
use super::system::{assemble, coefficients_of, identify_kernel, KernelIdentification, ModeSystem, Spectrum};
use super::FlatError;
use crate::geometry::bartnik::BoundaryPoint;
use crate::geometry::linearized::{linearized_data, FlatPerturbation};
use crate::geometry::{field, FdConfig};

/// Coefficients of all eleven components in decaying harmonics up to `lmax`.
#[derive(Clone, Debug)]
pub struct Solution {
    pub lmax: usize,
    pub coefficients: DVector<f64>,
    basis: Arc<Vec<SolidHarmonic>>,
}

impl Solution {
    pub fn new(lmax: usize, coefficients: DVector<f64>) -> Self {
        Solution {
            lmax,
            coefficients,
            basis: Arc::new(solid_harmonics(lmax)),
        }
    }

    pub fn coefficient(&self, component: usize, l: usize, m: i64) -> f64 {
        if l > self.lmax {
            return 0.0;
        }
        self.coefficients[component * sh_count(self.lmax) + sh_index(l, m)]
    }

    pub fn component_jets(&self, x: &Vector3<f64>) -> Result<[ScalarJet; 11], FlatError> {
        if x.norm_squared() < 1.0 - 1e-12 {
            return Err(FlatError::InsideBoundary(x.norm()));
        }
        let nb = self.basis.len();
        let mut out = [ScalarJet::zero(); 11];
        for (i, b) in self.basis.iter().enumerate() {
            let mut jet = None;
            for (c, o) in out.iter_mut().enumerate() {
                let a = self.coefficients[c * nb + i];
                if a != 0.0 {
                    let j = match jet {
                        Some(j) => j,
                        None => *jet.insert(b.decaying(x)?),
                    };
                    *o = o.add(&j.scaled(a));
                }
            }
        }
        Ok(out)
    }

    pub fn field_jets(&self, x: &Vector3<f64>) -> Result<FieldJets, FlatError> {
        let jets = self.component_jets(x)?;
        let mut f = FieldJets::zero();
        for (c, j) in jets.iter().enumerate() {
            f.add_component(c, j, 1.0);
        }
        Ok(f)
    }

    pub fn values(&self, x: &Vector3<f64>) -> Result<[f64; 11], FlatError> {
        Ok(self.component_jets(x)?.map(|j| j.value))
    }

    /// Perturbation (h, Y, v) as fields for the geometry module; NaN inside the unit sphere.
    pub fn perturbation(&self) -> FlatPerturbation {
        let s = self.clone();
        let vals = move |x: &Vector3<f64>| s.values(x).unwrap_or([f64::NAN; 11]);
        let (a, b, c) = (vals.clone(), vals.clone(), vals);
        FlatPerturbation {
            h: field(move |x| {
                let v = a(x);
                let mut h = Matrix3::zeros();
                for (k, (i, j)) in H_PAIRS.iter().enumerate() {
                    h[(*i, *j)] = v[k];
                    h[(*j, *i)] = v[k];
                }
                h
            }),
            y: field(move |x| {
                let v = b(x);
                Vector3::new(v[6], v[7], v[8])
            }),
            v: field(move |x| c(x)[9]),
        }
    }

    /// Solution of the rotated configuration: x ↦ R·F(R⁻¹x) with h ↦ RhRᵀ, Y ↦ RY.
    pub fn rotated(&self, rot: &Rotation3<f64>) -> Result<Solution, FlatError> {
        let inv = rot.inverse();
        let r = *rot.matrix();
        // the sphere values are needed at every quadrature point, so probe for errors once here
        self.values(&Vector3::new(0.0, 0.0, 1.0))?;
        let f = |x: &Vector3<f64>| {
            let v = self.values(&(inv * x)).unwrap_or([f64::NAN; 11]);
            let mut h = Matrix3::zeros();
            for (k, (i, j)) in H_PAIRS.iter().enumerate() {
                h[(*i, *j)] = v[k];
                h[(*j, *i)] = v[k];
            }
            let h = r * h * r.transpose();
            let y = r * Vector3::new(v[6], v[7], v[8]);
            [
                h[(0, 0)],
                h[(0, 1)],
                h[(0, 2)],
                h[(1, 1)],
                h[(1, 2)],
                h[(2, 2)],
                y[0],
                y[1],
                y[2],
                v[9],
                v[10],
            ]
        };
        Ok(Solution::new(self.lmax, coefficients_of(&f, self.lmax)))
    }

    /// Per component, the decay exponent −(l+1) of its lowest nonzero degree.
    pub fn decay_exponents(&self) -> BTreeMap<String, Option<i64>> {
        let nb = sh_count(self.lmax);
        let scale = self.coefficients.amax();
        COMPONENTS
            .iter()
            .enumerate()
            .map(|(c, name)| {
                let lmin = (0..nb)
                    .filter(|i| self.coefficients[c * nb + i].abs() > 1e-12 * scale)
                    .map(|i| self.basis[i].l)
                    .min();
                (name.to_string(), lmin.map(|l| -(l as i64 + 1)))
            })
            .collect()
    }

    /// Largest coefficient difference after embedding both solutions at the larger truncation.
    pub fn distance(&self, other: &Solution) -> f64 {
        let lmax = self.lmax.max(other.lmax);
        let mut worst: f64 = 0.0;
        for c in 0..COMPONENTS.len() {
            for l in 0..=lmax {
                for m in -(l as i64)..=(l as i64) {
                    worst = worst.max((self.coefficient(c, l, m) - other.coefficient(c, l, m)).abs());
                }
            }
        }
        worst
    }

    /// Coefficients per component, each indexed by l² + l + m, multiplying r^-(l+1) Y_lm.
    pub fn to_json(&self) -> serde_json::Value {
        let nb = sh_count(self.lmax);
        let comps: serde_json::Map<String, serde_json::Value> = COMPONENTS
            .iter()
            .enumerate()
            .map(|(c, name)| {
                (
                    name.to_string(),
                    self.coefficients
                        .rows(c * nb, nb)
                        .iter()
                        .copied()
                        .collect::<Vec<_>>()
                        .into(),
                )
            })
            .collect();
        serde_json::json!({"lmax": self.lmax, "components": comps})
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct SolveReport {
    pub lmax: usize,
    pub rows: usize,
    pub columns: usize,
    pub sigma_max: f64,
    pub sigma_min: f64,
    pub sigma_min_above_threshold: f64,
    pub threshold: f64,
    pub kernel_dim: usize,
    pub bottom_singular_values: Vec<f64>,
    pub kernel: KernelIdentification,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub least_squares_residual: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub interior_residual: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub gauge_residual: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub boundary_residual: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub decay_exponents: Option<BTreeMap<String, Option<i64>>>,
}

/// Assembled system, its spectrum and the spectral part of the report.
pub struct KernelRun {
    pub system: ModeSystem,
    pub spectrum: Spectrum,
    pub report: SolveReport,
}

pub fn kernel_check(lmax: usize) -> Result<KernelRun, FlatError> {
    let system = assemble(lmax)?;
    let spectrum = Spectrum::of(&system)?;
    let kernel = identify_kernel(&system, &spectrum);
    let report = SolveReport {
        lmax,
        rows: system.rows.len(),
        columns: system.cols.len(),
        sigma_max: spectrum.sigma_max(),
        sigma_min: spectrum.sigma_min(),
        sigma_min_above_threshold: spectrum.sigma_min_nonzero(),
        threshold: spectrum.threshold(),
        kernel_dim: spectrum.kernel_dim(),
        bottom_singular_values: spectrum.bottom(10),
        kernel,
        least_squares_residual: None,
        interior_residual: None,
        gauge_residual: None,
        boundary_residual: None,
        decay_exponents: None,
    };
    Ok(KernelRun {
        system,
        spectrum,
        report,
    })
}

/// Right-hand side of the scaled system for the given data.
pub fn rhs(system: &ModeSystem, data: &BoundaryData) -> DVector<f64> {
    use super::conditions::CONDITIONS;
    DVector::from_fn(system.rows.len(), |i, _| {
        let r = &system.rows[i];
        if r.l > data.lmax {
            return 0.0;
        }
        let c = CONDITIONS.iter().position(|n| *n == r.condition).unwrap_or(usize::MAX);
        data.coefficient(c, sh_index(r.l, r.m)) * system.row_scale[i]
    })
}

/// Seeded points in the shell 1.1 ≤ r ≤ 5.
pub fn exterior_points(seed: u64, count: usize) -> Vec<Vector3<f64>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| {
            let cos: f64 = rng.gen_range(-1.0..=1.0);
            let phi = rng.gen_range(0.0..std::f64::consts::TAU);
            let r = rng.gen_range(1.1..=5.0);
            let s = (1.0 - cos * cos).sqrt();
            Vector3::new(s * phi.cos(), s * phi.sin(), cos) * r
        })
        .collect()
}

/// Seeded points of the unit sphere away from the poles, off any quadrature grid.
pub fn sphere_points(seed: u64, count: usize) -> Vec<BoundaryPoint> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0xb0b);
    (0..count)
        .map(|_| {
            let cos: f64 = rng.gen_range(-0.95..=0.95);
            BoundaryPoint::new(1.0, cos.acos(), rng.gen_range(0.0..std::f64::consts::TAU))
        })
        .collect()
}

/// max over points and components of |Δ(component)| (componentwise flat Laplacian).
pub fn interior_residual(sol: &Solution, points: &[Vector3<f64>]) -> Result<f64, FlatError> {
    let mut worst: f64 = 0.0;
    for p in points {
        for j in sol.component_jets(p)? {
            worst = worst.max(j.hess.trace().abs());
        }
    }
    Ok(worst)
}

/// max over points of |δY| and |δh + ½d(tr h + 2v)|.
pub fn gauge_residual(sol: &Solution, points: &[Vector3<f64>]) -> Result<f64, FlatError> {
    let mut worst: f64 = 0.0;
    for p in points {
        let (g, d) = gauge_terms(&sol.field_jets(p)?);
        worst = worst.max(g.amax()).max(d.abs());
    }
    Ok(worst)
}

/// Boundary conditions at off-grid points, with (γ′, H′, (tr K)′, ω′) from the geometry module's
/// flat linearization and the G terms added: max deviation from the prescribed data.
pub fn boundary_residual(sol: &Solution, data: &BoundaryData, points: &[BoundaryPoint]) -> Result<f64, FlatError> {
    let pert = sol.perturbation();
    let fd = FdConfig::default();
    let basis = solid_harmonics(data.lmax);
    let mut worst: f64 = 0.0;
    for p in points {
        let x = p.position();
        let lin = linearized_data(&pert, p, &fd);
        let jets = sol.component_jets(&x)?;
        let g = jets[10];
        let e = p.tangents();
        let want = data.values(&basis, &x);
        let mut dev = vec![
            lin.mean_curvature - want.mean_curvature,
            lin.trace_k + 2.0 * g.value - want.trace_k,
        ];
        for a in 0..2 {
            dev.push(lin.tau[a] + e[a].dot(&g.grad) - e[a].dot(&want.tau));
            for b in 0..2 {
                dev.push(lin.gamma[(a, b)] - e[a].dot(&(want.gamma * e[b])));
            }
        }
        let m = dev
            .iter()
            .fold(0.0f64, |m, v| if v.is_nan() { f64::NAN } else { m.max(v.abs()) });
        worst = if m.is_nan() { f64::NAN } else { worst.max(m) };
    }
    Ok(worst)
}

/// Options for the residual evaluation of a solve.
#[derive(Clone, Copy, Debug)]
pub struct ResidualPoints {
    pub seed: u64,
    pub exterior: usize,
    pub boundary: usize,
}

impl Default for ResidualPoints {
    fn default() -> Self {
        ResidualPoints {
            seed: 2024,
            exterior: 20,
            boundary: 50,
        }
    }
}

/// Minimum-norm least-squares solve. The homogeneous problem has the ten-dimensional kernel of
/// asymptotic Poincaré modes; the returned solution is orthogonal to it. Any kernel not spanned
/// by those modes makes the truncation ill-posed and aborts.
pub fn solve(data: &BoundaryData, lmax: usize, pts: ResidualPoints) -> Result<(Solution, SolveReport), FlatError> {
    if data.lmax + 2 > lmax {
        return Err(FlatError::InvalidData(format!(
            "data degree {} exceeds truncation L − 2 = {}",
            data.lmax,
            lmax as i64 - 2
        )));
    }
    let run = kernel_check(lmax)?;
    if !run.report.kernel.spans_kernel {
        return Err(FlatError::IllPosed {
            kernel_dim: run.report.kernel_dim,
            sigma_min: run.report.sigma_min,
        });
    }
    let b = rhs(&run.system, data);
    let x = run.spectrum.solve(&b);
    let ls = (&run.system.matrix * &x - &b).amax();
    let sol = Solution::new(lmax, x);
    let ext = exterior_points(pts.seed, pts.exterior);
    let mut gauge_pts = ext.clone();
    gauge_pts.extend(sphere_points(pts.seed, pts.exterior).iter().map(|p| p.position()));
    let mut report = run.report;
    report.least_squares_residual = Some(ls);
    report.interior_residual = Some(interior_residual(&sol, &ext)?);
    report.gauge_residual = Some(gauge_residual(&sol, &gauge_pts)?);
    report.boundary_residual = Some(boundary_residual(&sol, data, &sphere_points(pts.seed, pts.boundary))?);
    report.decay_exponents = Some(sol.decay_exponents());
    Ok((sol, report))
}

/// CSV rows "r,component,value" along the ray through `direction`.
pub fn radial_profiles(sol: &Solution, direction: &Vector3<f64>, radii: &[f64]) -> Result<String, FlatError> {
    let n = direction.normalize();
    let mut out = String::from("r,component,value\n");
    for r in radii {
        let v = sol.values(&(n * *r))?;
        for (c, name) in COMPONENTS.iter().enumerate() {
            out.push_str(&format!("{r},{name},{:.17e}\n", v[c]));
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_data_gives_zero_solution() {
        let (sol, rep) = solve(&BoundaryData::zero(0), 2, ResidualPoints::default()).unwrap();
        assert_eq!(sol.coefficients.amax(), 0.0);
        assert_eq!(rep.boundary_residual, Some(0.0));
    }

    #[test]
    fn data_degree_must_leave_headroom() {
        assert!(solve(&BoundaryData::zero(3), 4, ResidualPoints::default()).is_err());
    }

    #[test]
    fn csv_has_header_and_all_components() {
        let sol = Solution::new(2, DVector::from_element(99, 0.01));
        let csv = radial_profiles(&sol, &Vector3::z(), &[1.0, 2.0]).unwrap();
        assert!(csv.starts_with("r,component,value\n"));
        assert_eq!(csv.lines().count(), 1 + 2 * 11);
    }

    #[test]
    fn inside_points_are_rejected() {
        let sol = Solution::new(2, DVector::from_element(99, 0.01));
        assert!(sol.values(&Vector3::new(0.1, 0.0, 0.0)).is_err());
        let zero = Solution::new(2, DVector::zeros(99));
        assert!(zero.values(&Vector3::new(0.5, 0.0, 0.0)).is_err());
        assert_eq!(zero.values(&Vector3::new(0.0, 1.0, 0.0)).unwrap(), [0.0; 11]);
    }
}
