//! Check suites for the flat problem: kernel, harmonic-vector Dirichlet/Neumann problems, solves.

use nalgebra::{DMatrix, Rotation3};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::data::BoundaryData;
use super::harmonics::{sh_count, sh_degree_order};
use super::oracle::radial_comparison;
use super::solve::{kernel_check, radial_profiles, solve, ResidualPoints, Solution, SolveReport};
use super::system::{assemble_rotated, vector_harmonic_system, Spectrum};
use super::FlatError;
use crate::report::Check;

pub struct KernelOutcome {
    pub checks: Vec<Check>,
    pub reports: Vec<SolveReport>,
}

fn ratio(values: &[f64]) -> f64 {
    let max = values.iter().copied().fold(0.0, f64::max);
    let min = values.iter().copied().fold(f64::INFINITY, f64::min);
    if min > 0.0 {
        max / min
    } else {
        f64::INFINITY
    }
}

fn list(values: &[f64]) -> String {
    let items: Vec<String> = values.iter().map(|v| format!("{v:.4e}")).collect();
    format!("[{}]", items.join(", "))
}

fn random_rotation(seed: u64) -> Rotation3<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x707);
    Rotation3::from_euler_angles(
        rng.gen_range(-3.0..3.0),
        rng.gen_range(-1.5..1.5),
        rng.gen_range(-3.0..3.0),
    )
}

/// Homogeneous problem at each truncation, with fault injection, grid rotation and bandwidth.
pub fn kernel_suite(lmaxes: &[usize], seed: u64) -> Result<KernelOutcome, FlatError> {
    let mut checks = Vec::new();
    let mut reports = Vec::new();
    let mut first = None;
    for &l in lmaxes {
        let run = kernel_check(l)?;
        let r = run.report.clone();
        checks.push(
            Check::exact(
                &format!("homogeneous kernel trivial (L = {l})"),
                "kernel_dim = 0",
                r.kernel_dim == 0,
            )
            .with_detail(format!(
                "kernel_dim = {}{}, bottom singular values {}; threshold {:.3e}",
                r.kernel_dim,
                if r.kernel.spans_kernel && r.kernel_dim > 0 {
                    " (exactly the asymptotic Poincare modes)"
                } else {
                    ""
                },
                list(&r.bottom_singular_values),
                r.threshold
            )),
        );
        checks.push(
            Check::exact(
                &format!("kernel spanned by asymptotic Poincare modes (L = {l})"),
                "time shift, translations, rotations, boosts",
                r.kernel.spans_kernel && r.kernel.mode_residual < 1e-10,
            )
            .with_detail(format!(
                "{} modes, |A m|/|m| <= {:.2e}, kernel distance from mode span {:.2e}",
                r.kernel.modes.len(),
                r.kernel.mode_residual,
                r.kernel.kernel_outside_span
            )),
        );
        if first.is_none() {
            first = Some(run);
        }
        reports.push(r);
    }
    let smin: Vec<f64> = reports.iter().map(|r| r.sigma_min).collect();
    checks.push(
        Check::within(
            "sigma_min stable across truncations",
            "max/min sigma_min < 2",
            ratio(&smin),
            2.0,
        )
        .with_detail(format!("sigma_min per L: {}", list(&smin))),
    );
    let above: Vec<f64> = reports.iter().map(|r| r.sigma_min_above_threshold).collect();
    checks.push(
        Check::within(
            "smallest nonzero singular value stable across truncations",
            "max/min < 2",
            ratio(&above),
            2.0,
        )
        .with_detail(format!("per L: {}", list(&above))),
    );
    if let Some(run) = first {
        let faulty = Spectrum::of(&run.system.without_condition("mean_curvature"))?;
        checks.push(
            Check::exact(
                "fault injection: dropping the mean-curvature rows is detected",
                "kernel_dim grows",
                faulty.kernel_dim() > run.report.kernel_dim,
            )
            .with_detail(format!(
                "kernel_dim {} -> {}",
                run.report.kernel_dim,
                faulty.kernel_dim()
            )),
        );
        let turned = Spectrum::of(&assemble_rotated(run.system.lmax, &random_rotation(seed))?)?;
        let drift = run
            .spectrum
            .singular_values
            .iter()
            .zip(&turned.singular_values)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max);
        checks.push(Check::within(
            "singular values invariant under grid rotation",
            "sigma equivariance",
            drift,
            1e-8,
        ));
        let bw = ["gamma_trace", "gamma_even", "gamma_odd"]
            .iter()
            .map(|c| run.system.coupling_bandwidth(c, 1e-12))
            .max()
            .unwrap_or(0);
        checks.push(
            Check::exact(
                "metric rows couple degrees l and l' with |l - l'| <= 2",
                "coupling bandwidth",
                bw <= 2,
            )
            .with_detail(format!("observed bandwidth {bw}")),
        );
    }
    Ok(KernelOutcome { checks, reports })
}

/// Dirichlet and Neumann problems for four componentwise-harmonic functions at truncation `lmax`.
pub fn harmonic_vector_suite(lmax: usize) -> Result<Vec<Check>, FlatError> {
    let mut checks = Vec::new();
    let nb = sh_count(lmax);
    for neumann in [false, true] {
        let a = vector_harmonic_system(lmax, neumann)?;
        let expected = DMatrix::from_fn(4 * nb, 4 * nb, |i, j| {
            if i != j {
                0.0
            } else if neumann {
                -((sh_degree_order(i % nb).0 + 1) as f64)
            } else {
                1.0
            }
        });
        let sv = a.clone().svd(false, false).singular_values;
        let smax = sv.max();
        let kd = sv.iter().filter(|s| **s < 1e-10 * smax).count();
        let kind = if neumann { "Neumann" } else { "Dirichlet" };
        checks.push(
            Check::exact(
                &format!("{kind} problem for harmonic vectors has trivial kernel (L = {lmax})"),
                "zero boundary values force zero",
                kd == 0,
            )
            .with_detail(format!("kernel_dim = {kd}, sigma_min = {:.3e}", sv.min())),
        );
        checks.push(Check::within(
            &format!("{kind} matrix is diagonal in harmonic modes"),
            if neumann {
                "d_r r^-(l+1) = -(l+1)"
            } else {
                "value on r = 1 is Y_lm"
            },
            (a - expected).amax(),
            1e-10,
        ));
    }
    Ok(checks)
}

pub struct SolveOutcome {
    pub checks: Vec<Check>,
    pub solution: Solution,
    pub report: SolveReport,
    pub profiles: String,
}

/// Radii of the CSV profiles.
pub const PROFILE_RADII: [f64; 10] = [1.0, 1.25, 1.5, 2.0, 2.5, 3.0, 4.0, 5.0, 7.5, 10.0];

/// Solve at `lmax` with every pointwise residual, plus truncation stability against
/// `lmax_check`, rotation equivariance, the zero-data solve and the radial oracle.
pub fn solve_suite(data: &BoundaryData, lmax: usize, lmax_check: usize, seed: u64) -> Result<SolveOutcome, FlatError> {
    let pts = ResidualPoints {
        seed,
        ..ResidualPoints::default()
    };
    let (solution, report) = solve(data, lmax, pts)?;
    let mut checks = vec![
        Check::within(
            "data has vanishing momentum flux",
            "integral of (omega' - k' n) over the boundary",
            data.momentum_flux().norm(),
            1e-12,
        ),
        Check::within(
            "least-squares residual",
            "projected boundary and gauge rows",
            report.least_squares_residual.unwrap_or(f64::NAN),
            1e-10,
        ),
        Check::within(
            "boundary residual at off-grid points",
            "linearized Bartnik data with G terms",
            report.boundary_residual.unwrap_or(f64::NAN),
            1e-8,
        )
        .with_detail(format!("{} points, geometry-module flat linearization", pts.boundary)),
        Check::within(
            "interior residual",
            "componentwise flat Laplacian",
            report.interior_residual.unwrap_or(f64::NAN),
            1e-10,
        ),
        Check::within(
            "gauge residual",
            "delta Y and delta h + d(tr h + 2v)/2",
            report.gauge_residual.unwrap_or(f64::NAN),
            1e-8,
        ),
    ];
    let (fine, _) = solve(data, lmax_check, pts)?;
    checks.push(Check::within(
        &format!("truncation stability L = {lmax} -> {lmax_check}"),
        "coefficient change",
        solution.distance(&fine),
        1e-8,
    ));
    let rot = random_rotation(seed);
    let (turned, _) = solve(&data.rotated(&rot), lmax, pts)?;
    checks.push(Check::within(
        "rotation equivariance",
        "solve(R data) = R solve(data)",
        turned.distance(&solution.rotated(&rot)?),
        1e-8,
    ));
    let (zero, _) = solve(&BoundaryData::zero(0), 2, pts)?;
    checks.push(Check::exact(
        "zero data gives zero solution",
        "trivial",
        zero.coefficients.amax() == 0.0,
    ));
    let (radial, _, fit) = radial_comparison(1e-3, 4)?;
    checks.push(
        Check::within(
            "spherically symmetric solve matches radial oracle",
            "H' = 1e-3: h, v and G - x.Y",
            radial,
            1e-8,
        )
        .with_detail(format!("radial collocation fit residual {:.2e}", fit.fit_residual)),
    );
    let profiles = radial_profiles(&solution, &nalgebra::Vector3::new(0.0, 0.6, 0.8), &PROFILE_RADII)?;
    Ok(SolveOutcome {
        checks,
        solution,
        report,
        profiles,
    })
}
