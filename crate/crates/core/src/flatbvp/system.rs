//! Assembly of the projected boundary/gauge system and its singular-value analysis.

use nalgebra::{DMatrix, DVector, Rotation3, Vector3};
use rayon::prelude::*;
use serde::Serialize;

use super::conditions::{condition_min_degree, evaluate, tangent_frame, FieldJets, COMPONENTS, CONDITIONS};
use super::harmonics::{sh_count, sh_degree_order, sh_table, solid_harmonics, ScalarJet, SolidHarmonic, SphereGrid};
use super::FlatError;

/// Rows are projected up to this many degrees above the truncation; the conditions of a degree-l
/// column are spherical polynomials of degree ≤ l + 4, so the projection is exact.
pub const ROW_HEADROOM: usize = 4;

/// Singular values below this fraction of σ_max count as kernel.
pub const KERNEL_RTOL: f64 = 1e-10;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct RowLabel {
    pub condition: &'static str,
    pub l: usize,
    pub m: i64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct ColLabel {
    pub component: &'static str,
    pub l: usize,
    pub m: i64,
}

#[derive(Clone, Debug)]
pub struct ModeSystem {
    pub lmax: usize,
    pub row_lmax: usize,
    pub matrix: DMatrix<f64>,
    pub rows: Vec<RowLabel>,
    pub cols: Vec<ColLabel>,
    /// Factor applied to each row after projection; a data coefficient d enters the rhs as d·scale.
    pub row_scale: DVector<f64>,
    pub rhs: DVector<f64>,
}

/// Row normalization: projections are expressed in L² units of the condition field on the
/// sphere, and first-order conditions are divided by (l + 1) so that all rows carry the same
/// Sobolev weight. This makes the spectrum independent of the truncation.
pub fn row_scale(label: &RowLabel) -> f64 {
    let l = label.l as f64;
    match label.condition {
        "gamma_trace" => 1.0,
        "gamma_even" | "gamma_odd" => even_tensor_norm_sq(label.l).sqrt(),
        "tau_even" | "tau_odd" => (l * (l + 1.0)).sqrt() / (l + 1.0),
        _ => 1.0 / (l + 1.0),
    }
}

/// Weight of each column in the coefficient norm: off-diagonal h entries count twice in |h|².
pub fn column_weight(component: usize) -> f64 {
    match component {
        1 | 2 | 4 => std::f64::consts::SQRT_2,
        _ => 1.0,
    }
}

/// L² norm² of the trace-free surface Hessian of Y_lm on the unit sphere.
pub fn even_tensor_norm_sq(l: usize) -> f64 {
    let lam = (l * (l + 1)) as f64;
    0.5 * lam * (lam - 2.0)
}

/// Decaying-harmonic jets of every basis element at every grid point.
pub fn basis_jets(basis: &[SolidHarmonic], grid: &SphereGrid) -> Result<Vec<Vec<ScalarJet>>, FlatError> {
    grid.points
        .par_iter()
        .map(|p| basis.iter().map(|b| b.decaying(p)).collect())
        .collect()
}

/// Number of per-point channels carried from condition values into the projection.
const CHANNELS: usize = 11;

fn channels(n: &Vector3<f64>, f: &FieldJets) -> [f64; CHANNELS] {
    let c = evaluate(n, &tangent_frame(n), f);
    [
        c.gamma[0] - c.gamma[2],
        c.gamma[0] + c.gamma[2],
        c.gamma[1],
        c.mean_curvature,
        c.trace_k,
        c.tau[0],
        c.tau[1],
        c.div_y,
        c.gauge[0],
        c.gauge[1],
        c.gauge[2],
    ]
}

/// Weighted test functions of the row modes at the grid points (rows: modes, columns: points).
struct TestTables {
    y: DMatrix<f64>,
    even_a: DMatrix<f64>,
    even_b: DMatrix<f64>,
    grad1: DMatrix<f64>,
    grad2: DMatrix<f64>,
}

fn test_tables(basis: &[SolidHarmonic], grid: &SphereGrid) -> TestTables {
    let nm = basis.len();
    let np = grid.len();
    let mut t = TestTables {
        y: DMatrix::zeros(nm, np),
        even_a: DMatrix::zeros(nm, np),
        even_b: DMatrix::zeros(nm, np),
        grad1: DMatrix::zeros(nm, np),
        grad2: DMatrix::zeros(nm, np),
    };
    for (q, n) in grid.points.iter().enumerate() {
        let w = grid.weights[q];
        let [e1, e2] = tangent_frame(n);
        for (j, b) in basis.iter().enumerate() {
            let y = b.on_sphere(n);
            let g = Vector3::from_fn(|i, _| b.grad[i].eval(n));
            let h = nalgebra::Matrix3::from_fn(|i, k| b.hess[i][k].eval(n));
            let (h11, h12, h22) = (e1.dot(&(h * e1)), e1.dot(&(h * e2)), e2.dot(&(h * e2)));
            let lam = (b.l * (b.l + 1)) as f64;
            let ne = even_tensor_norm_sq(b.l);
            t.y[(j, q)] = w * y;
            if b.l >= 2 {
                t.even_a[(j, q)] = w * 0.5 * (h11 - h22) / ne;
                t.even_b[(j, q)] = w * h12 / ne;
            }
            if b.l >= 1 {
                t.grad1[(j, q)] = w * e1.dot(&g) / lam;
                t.grad2[(j, q)] = w * e2.dot(&g) / lam;
            }
        }
    }
    t
}

/// Project the 11 channels (each a points × columns matrix) onto the row modes.
fn project(t: &TestTables, ch: &[DMatrix<f64>], basis: &[SolidHarmonic]) -> (DMatrix<f64>, Vec<RowLabel>) {
    let blocks: Vec<DMatrix<f64>> = vec![
        &t.y * &ch[1] * 0.5,
        &t.even_a * &ch[0] + &t.even_b * &ch[2] * 2.0,
        -(&t.even_b * &ch[0]) + &t.even_a * &ch[2] * 2.0,
        &t.y * &ch[3],
        &t.y * &ch[4],
        &t.grad1 * &ch[5] + &t.grad2 * &ch[6],
        -(&t.grad2 * &ch[5]) + &t.grad1 * &ch[6],
        &t.y * &ch[7],
        &t.y * &ch[8],
        &t.y * &ch[9],
        &t.y * &ch[10],
    ];
    let ncols = ch[0].ncols();
    let mut rows = Vec::new();
    let mut data: Vec<f64> = Vec::new();
    for (c, block) in blocks.iter().enumerate() {
        for (j, b) in basis.iter().enumerate() {
            if b.l >= condition_min_degree(c) {
                rows.push(RowLabel {
                    condition: CONDITIONS[c],
                    l: b.l,
                    m: b.m,
                });
                data.extend(block.row(j).iter());
            }
        }
    }
    (DMatrix::from_row_slice(rows.len(), ncols, &data), rows)
}

pub fn column_labels(lmax: usize) -> Vec<ColLabel> {
    let nb = sh_count(lmax);
    (0..COMPONENTS.len() * nb)
        .map(|k| {
            let (l, m) = sh_degree_order(k % nb);
            ColLabel {
                component: COMPONENTS[k / nb],
                l,
                m,
            }
        })
        .collect()
}

/// Homogeneous system at truncation `lmax`; `rotation` turns the quadrature grid.
pub fn assemble_rotated(lmax: usize, rotation: &Rotation3<f64>) -> Result<ModeSystem, FlatError> {
    if lmax < 2 {
        return Err(FlatError::Truncation(lmax));
    }
    let row_lmax = lmax + ROW_HEADROOM;
    let test_basis = solid_harmonics(row_lmax);
    let nb = sh_count(lmax);
    let grid = SphereGrid::exact_to(2 * row_lmax + 4).rotated(rotation);
    let jets = basis_jets(&test_basis[..nb], &grid)?;
    let ncols = COMPONENTS.len() * nb;
    let np = grid.len();
    let columns: Vec<Vec<[f64; CHANNELS]>> = (0..ncols)
        .into_par_iter()
        .map(|k| {
            let (c, i) = (k / nb, k % nb);
            grid.points
                .iter()
                .enumerate()
                .map(|(q, n)| {
                    let mut f = FieldJets::zero();
                    f.add_component(c, &jets[q][i], 1.0);
                    channels(n, &f)
                })
                .collect()
        })
        .collect();
    let ch: Vec<DMatrix<f64>> = (0..CHANNELS)
        .map(|s| DMatrix::from_fn(np, ncols, |q, k| columns[k][q][s]))
        .collect();
    let tables = test_tables(&test_basis, &grid);
    let (mut matrix, rows) = project(&tables, &ch, &test_basis);
    let row_scale = DVector::from_iterator(rows.len(), rows.iter().map(row_scale));
    for (i, mut r) in matrix.row_iter_mut().enumerate() {
        r *= row_scale[i];
    }
    let rhs = DVector::zeros(rows.len());
    Ok(ModeSystem {
        lmax,
        row_lmax,
        matrix,
        rows,
        cols: column_labels(lmax),
        row_scale,
        rhs,
    })
}

pub fn assemble(lmax: usize) -> Result<ModeSystem, FlatError> {
    assemble_rotated(lmax, &Rotation3::identity())
}

impl ModeSystem {
    /// Largest |l_row − l_col| over entries of the given condition block above `tol`·max|A|.
    pub fn coupling_bandwidth(&self, condition: &str, tol: f64) -> usize {
        let scale = self.matrix.amax();
        let mut bw = 0;
        for (i, r) in self.rows.iter().enumerate() {
            if r.condition != condition {
                continue;
            }
            for (j, c) in self.cols.iter().enumerate() {
                if self.matrix[(i, j)].abs() > tol * scale {
                    bw = bw.max(r.l.abs_diff(c.l));
                }
            }
        }
        bw
    }

    /// Column weights of the coefficient norm.
    pub fn weights(&self) -> DVector<f64> {
        let nb = sh_count(self.lmax);
        DVector::from_fn(self.cols.len(), |k, _| column_weight(k / nb))
    }

    /// Copy with all rows of one condition zeroed.
    pub fn without_condition(&self, condition: &str) -> ModeSystem {
        let mut s = self.clone();
        for (i, r) in self.rows.iter().enumerate() {
            if r.condition == condition {
                s.matrix.row_mut(i).fill(0.0);
            }
        }
        s
    }
}

/// Singular-value decomposition of a tall system A·W⁻¹ through its R factor.
#[derive(Clone, Debug)]
pub struct Spectrum {
    /// Descending.
    pub singular_values: Vec<f64>,
    /// Right singular vectors as columns, in weighted coordinates, same order.
    pub v: DMatrix<f64>,
    /// Left singular vectors of R.
    pub u: DMatrix<f64>,
    /// Thin Q of A·W⁻¹.
    pub q: DMatrix<f64>,
    pub weights: DVector<f64>,
}

impl Spectrum {
    pub fn of(sys: &ModeSystem) -> Result<Spectrum, FlatError> {
        let w = sys.weights();
        let mut a = sys.matrix.clone();
        for (j, mut col) in a.column_iter_mut().enumerate() {
            col /= w[j];
        }
        let qr = a.qr();
        let svd = qr.r().svd(true, true);
        let u = svd.u.ok_or(FlatError::Numerical("SVD did not return U".into()))?;
        let vt = svd.v_t.ok_or(FlatError::Numerical("SVD did not return Vᵀ".into()))?;
        let mut order: Vec<usize> = (0..svd.singular_values.len()).collect();
        order.sort_by(|&i, &j| svd.singular_values[j].total_cmp(&svd.singular_values[i]));
        let singular_values = order.iter().map(|&i| svd.singular_values[i]).collect();
        let v = DMatrix::from_fn(vt.ncols(), order.len(), |r, k| vt[(order[k], r)]);
        let u = DMatrix::from_fn(u.nrows(), order.len(), |r, k| u[(r, order[k])]);
        Ok(Spectrum {
            singular_values,
            v,
            u,
            q: qr.q(),
            weights: w,
        })
    }

    pub fn sigma_max(&self) -> f64 {
        self.singular_values[0]
    }

    pub fn threshold(&self) -> f64 {
        KERNEL_RTOL * self.sigma_max()
    }

    pub fn kernel_dim(&self) -> usize {
        let t = self.threshold();
        self.singular_values.iter().filter(|s| **s < t).count()
    }

    pub fn sigma_min(&self) -> f64 {
        *self.singular_values.last().unwrap_or(&0.0)
    }

    /// Smallest singular value above the kernel threshold.
    pub fn sigma_min_nonzero(&self) -> f64 {
        let t = self.threshold();
        self.singular_values
            .iter()
            .copied()
            .filter(|s| *s >= t)
            .fold(f64::INFINITY, f64::min)
    }

    pub fn bottom(&self, k: usize) -> Vec<f64> {
        let n = self.singular_values.len();
        self.singular_values[n.saturating_sub(k)..]
            .iter()
            .rev()
            .copied()
            .collect()
    }

    /// Orthonormal kernel basis in unweighted coefficient coordinates (columns not normalized).
    pub fn kernel(&self) -> DMatrix<f64> {
        let n = self.singular_values.len();
        let kd = self.kernel_dim();
        let mut k = self.v.columns(n - kd, kd).into_owned();
        for (i, mut row) in k.row_iter_mut().enumerate() {
            row /= self.weights[i];
        }
        k
    }

    /// Minimum-norm least-squares solution of A x = b, dropping singular values below threshold.
    pub fn solve(&self, b: &DVector<f64>) -> DVector<f64> {
        let qb = self.q.transpose() * b;
        let ub = self.u.transpose() * qb;
        let t = self.threshold();
        let mut y = DVector::zeros(self.v.nrows());
        for (k, s) in self.singular_values.iter().enumerate() {
            if *s >= t {
                y += self.v.column(k) * (ub[k] / s);
            }
        }
        y.component_div(&self.weights)
    }
}

/// Named closed-form homogeneous solution: component values at a point.
pub type NamedMode = (&'static str, Box<dyn Fn(&Vector3<f64>) -> [f64; 11] + Send + Sync>);

/// Homogeneous solutions generated by asymptotic Poincaré motions: the time shift c(1 − 1/r)
/// compensated by G, three translations a(1 − 1/r), three rotations Ω×x(1 − r⁻³) and three boosts
/// of the boundary sphere (time shift f = xₖ/r³ compensated by G = 3xₖ/r³).
pub fn poincare_modes() -> Vec<NamedMode> {
    let mut out: Vec<NamedMode> = Vec::new();
    out.push((
        "time_shift",
        Box::new(|x: &Vector3<f64>| {
            let r = x.norm();
            let y = -x / r.powi(3);
            [0.0, 0.0, 0.0, 0.0, 0.0, 0.0, y[0], y[1], y[2], 0.0, -1.0 / r]
        }),
    ));
    let pack = |h: nalgebra::Matrix3<f64>| -> [f64; 11] {
        [
            h[(0, 0)],
            h[(0, 1)],
            h[(0, 2)],
            h[(1, 1)],
            h[(1, 2)],
            h[(2, 2)],
            0.0,
            0.0,
            0.0,
            0.0,
            0.0,
        ]
    };
    for (k, name) in ["translation_x", "translation_y", "translation_z"]
        .into_iter()
        .enumerate()
    {
        out.push((
            name,
            Box::new(move |x: &Vector3<f64>| {
                let a = Vector3::ith(k, 1.0);
                pack((a * x.transpose() + x * a.transpose()) / x.norm().powi(3))
            }),
        ));
    }
    for (k, name) in ["rotation_x", "rotation_y", "rotation_z"].into_iter().enumerate() {
        out.push((
            name,
            Box::new(move |x: &Vector3<f64>| {
                let w = Vector3::ith(k, 1.0).cross(x);
                pack((w * x.transpose() + x * w.transpose()) * (3.0 / x.norm().powi(5)))
            }),
        ));
    }
    for (k, name) in ["boost_x", "boost_y", "boost_z"].into_iter().enumerate() {
        out.push((
            name,
            Box::new(move |x: &Vector3<f64>| {
                let r = x.norm();
                // Y = −∇(xₖ/r³)
                let y = x * (3.0 * x[k] / r.powi(5)) - Vector3::ith(k, 1.0 / r.powi(3));
                [
                    0.0,
                    0.0,
                    0.0,
                    0.0,
                    0.0,
                    0.0,
                    y[0],
                    y[1],
                    y[2],
                    0.0,
                    3.0 * x[k] / r.powi(3),
                ]
            }),
        ));
    }
    out
}

/// Coefficients of a field whose 11 components are decaying harmonics, from its values on r = 1.
pub fn coefficients_of(f: &dyn Fn(&Vector3<f64>) -> [f64; 11], lmax: usize) -> DVector<f64> {
    let basis = solid_harmonics(lmax);
    let grid = SphereGrid::exact_to(2 * lmax + 8);
    let table = sh_table(&basis, &grid);
    let nb = basis.len();
    let mut c = DVector::zeros(COMPONENTS.len() * nb);
    for (q, p) in grid.points.iter().enumerate() {
        let v = f(p);
        for (comp, val) in v.iter().enumerate() {
            for i in 0..nb {
                c[comp * nb + i] += grid.weights[q] * val * table[q][i];
            }
        }
    }
    c
}

/// Distance of the numerical kernel from the span of the Poincaré modes.
#[derive(Clone, Debug, Serialize)]
pub struct KernelIdentification {
    pub modes: Vec<&'static str>,
    /// max over modes of |A m| / |m|
    pub mode_residual: f64,
    /// max over kernel vectors of the distance to the mode span (unit vectors, weighted norm)
    pub kernel_outside_span: f64,
    pub spans_kernel: bool,
}

pub fn identify_kernel(sys: &ModeSystem, spectrum: &Spectrum) -> KernelIdentification {
    let fields = poincare_modes();
    let w = &spectrum.weights;
    let cols: Vec<DVector<f64>> = fields
        .iter()
        .map(|(_, f)| coefficients_of(f.as_ref(), sys.lmax))
        .collect();
    let mode_residual = cols
        .iter()
        .map(|c| (&sys.matrix * c).norm() / c.component_mul(w).norm())
        .fold(0.0, f64::max);
    let m = DMatrix::from_columns(&cols.iter().map(|c| c.component_mul(w)).collect::<Vec<_>>());
    let qm = m.qr().q();
    let kernel = {
        let mut k = spectrum.kernel();
        for (i, mut row) in k.row_iter_mut().enumerate() {
            row *= w[i];
        }
        k
    };
    let outside = (&kernel - &qm * (qm.transpose() * &kernel))
        .column_iter()
        .map(|c| c.norm())
        .fold(0.0, f64::max);
    KernelIdentification {
        modes: fields.iter().map(|(n, _)| *n).collect(),
        mode_residual,
        kernel_outside_span: outside,
        spans_kernel: kernel.ncols() == cols.len() && outside < 1e-6,
    }
}

/// Dirichlet (`neumann = false`) or Neumann problem for four componentwise-harmonic functions on
/// the exterior of the unit sphere, projected onto Y_lm up to `lmax`.
pub fn vector_harmonic_system(lmax: usize, neumann: bool) -> Result<DMatrix<f64>, FlatError> {
    let basis = solid_harmonics(lmax);
    let grid = SphereGrid::exact_to(2 * lmax + 2);
    let jets = basis_jets(&basis, &grid)?;
    let table = sh_table(&basis, &grid);
    let nb = basis.len();
    let mut block = DMatrix::zeros(nb, nb);
    for (q, p) in grid.points.iter().enumerate() {
        for i in 0..nb {
            let val = if neumann {
                jets[q][i].grad.dot(p)
            } else {
                jets[q][i].value
            };
            for j in 0..nb {
                block[(j, i)] += grid.weights[q] * val * table[q][j];
            }
        }
    }
    let mut a = DMatrix::zeros(4 * nb, 4 * nb);
    for c in 0..4 {
        a.view_mut((c * nb, c * nb), (nb, nb)).copy_from(&block);
    }
    Ok(a)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sizes_and_labels() {
        let s = assemble(2).unwrap();
        assert_eq!(s.cols.len(), 11 * 9);
        assert_eq!(s.matrix.ncols(), 11 * 9);
        assert_eq!(s.rows.len(), s.matrix.nrows());
        // per degree up to L+4: 11 rows, minus the two γ trace-free rows at l < 2 and τ rows at l = 0
        assert_eq!(s.rows.len(), 11 * 49 - 2 * 4 - 2);
        assert_eq!(
            s.cols[9],
            ColLabel {
                component: "h12",
                l: 0,
                m: 0
            }
        );
    }

    #[test]
    fn even_tensor_norm_matches_quadrature() {
        let basis = solid_harmonics(5);
        let grid = SphereGrid::exact_to(14);
        for b in basis.iter().filter(|b| b.l >= 2) {
            let mut s = 0.0;
            for (q, n) in grid.points.iter().enumerate() {
                let [e1, e2] = tangent_frame(n);
                let h = nalgebra::Matrix3::from_fn(|i, k| b.hess[i][k].eval(n));
                let a = 0.5 * (e1.dot(&(h * e1)) - e2.dot(&(h * e2)));
                let c = e1.dot(&(h * e2));
                s += grid.weights[q] * 2.0 * (a * a + c * c);
            }
            assert!((s - even_tensor_norm_sq(b.l)).abs() < 1e-9 * s, "l={}", b.l);
        }
    }

    #[test]
    fn gamma_rows_couple_neighbouring_degrees_only() {
        let s = assemble(4).unwrap();
        for c in ["gamma_trace", "gamma_even", "gamma_odd"] {
            assert!(s.coupling_bandwidth(c, 1e-12) <= 2, "{c}");
        }
    }

    #[test]
    fn poincare_modes_are_homogeneous_solutions() {
        let s = assemble(3).unwrap();
        let spectrum = Spectrum::of(&s).unwrap();
        let id = identify_kernel(&s, &spectrum);
        assert!(id.mode_residual < 1e-12, "{}", id.mode_residual);
    }

    #[test]
    fn dirichlet_and_neumann_blocks() {
        let d = vector_harmonic_system(3, false).unwrap();
        assert!((d - DMatrix::identity(64, 64)).amax() < 1e-12);
        let n = vector_harmonic_system(3, true).unwrap();
        for k in 0..64 {
            let (l, _) = sh_degree_order(k % 16);
            assert!((n[(k, k)] + (l + 1) as f64).abs() < 1e-12);
        }
    }
}
