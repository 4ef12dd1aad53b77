//! Pointwise identity battery on a fixture.

use nalgebra::{Matrix3, Matrix4, Vector3, Vector4};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use super::bartnik::{bartnik_data, data_change, transformation_residuals, BoundaryPoint, TimeFunction};
use super::fd::{FdConfig, Jet, Point};
use super::fixtures::{fixture, Fixture, FixtureName};
use super::metric::{assemble_adm, assemble_projection, field, Field, Metric4};
use super::quotient::{contract, lie_derivative3, quotient_bianchi_rhs, vacuum_projection_residuals, QuotientPoint};
use super::tensor::{
    alpha_squared, bianchi, connection_from_jet, curvature, delta_star, horizontal_blocks, lie_alpha_squared,
    recompose_vector, rough_laplacian, split_vector,
};
use super::GeoError;
use crate::report::Check;

#[derive(Clone, Debug, Serialize)]
pub struct GeometryConfig {
    pub fixture: String,
    pub seed: u64,
    pub probes: usize,
    pub boundary_samples: usize,
    pub fd: FdConfig,
}

impl GeometryConfig {
    pub fn new(fixture: FixtureName, seed: u64) -> Self {
        GeometryConfig {
            fixture: fixture.to_string(),
            seed,
            probes: 20,
            boundary_samples: 12,
            fd: FdConfig::default(),
        }
    }
}

/// Seeded t-independent vector field (a + b·x̂ + x̂ᵀCx̂)/r per component, decaying like 1/r.
pub fn decaying_vector_field(seed: u64) -> Field<Vector4<f64>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut draw = || rng.gen_range(-1.0..1.0);
    let a: [f64; 4] = std::array::from_fn(|_| draw());
    let b: [Vector3<f64>; 4] = std::array::from_fn(|_| Vector3::new(draw(), draw(), draw()));
    let c: [Matrix3<f64>; 4] = std::array::from_fn(|_| Matrix3::from_fn(|_, _| draw()));
    field(move |x: &Point| {
        let r = x.norm();
        let xh = x / r;
        Vector4::from_fn(|m, _| (a[m] + b[m].dot(&xh) + xh.dot(&(c[m] * xh))) / r)
    })
}

/// Seeded boundary samples with |cos polar| ≤ 0.8.
pub fn boundary_samples(radius: f64, seed: u64, count: usize) -> Vec<BoundaryPoint> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5eed);
    (0..count)
        .map(|_| {
            let cos: f64 = rng.gen_range(-0.8..=0.8);
            BoundaryPoint::new(radius, cos.acos(), rng.gen_range(0.0..std::f64::consts::TAU))
        })
        .collect()
}

fn max_of(v: impl IntoIterator<Item = f64>) -> f64 {
    v.into_iter()
        .fold(0.0, |m, x| if x.is_nan() || m.is_nan() { f64::NAN } else { m.max(x) })
}

fn checked_probes(f: &Fixture, seed: u64, count: usize) -> Result<Vec<Point>, GeoError> {
    let probes = f.probe_points(seed, count);
    for p in &probes {
        f.check_point(p)?;
        f.metric.check_lorentzian(p)?;
        f.stationary.check(p)?;
        f.projection.check(p)?;
    }
    Ok(probes)
}

/// max |Ric| over the probe points.
pub fn vacuum_oracle(metric: &Metric4, probes: &[Point]) -> f64 {
    max_of(
        probes
            .par_iter()
            .map(|x| curvature(metric, x).ricci.abs().max())
            .collect::<Vec<_>>(),
    )
}

/// Both assembly routes reproduce the fixture's components.
pub fn assembly_round_trip(f: &Fixture, probes: &[Point]) -> Result<f64, GeoError> {
    let adm = assemble_adm(&f.stationary, probes, f.metric.fd)?;
    let proj = assemble_projection(&f.projection, probes, f.metric.fd)?;
    Ok(max_of(probes.iter().map(|x| {
        let g = f.metric.at(x);
        let s = g.abs().max().max(1.0);
        ((adm.at(x) - g).abs().max() / s).max((proj.at(x) - g).abs().max() / s)
    })))
}

/// Per-point residuals of the orbit-space identities.
#[derive(Clone, Copy, Debug, Default)]
struct PointResiduals {
    bianchi_alpha: f64,
    lie_alpha_tt: f64,
    lie_alpha_horizontal: f64,
    lie_alpha_mixed: f64,
    delta_star_tt: f64,
    delta_star_mixed: f64,
    delta_star_horizontal: f64,
    rough_laplacian_oracle: f64,
    quotient_horizontal: f64,
    quotient_perp: f64,
    quotient_extra: f64,
    split_round_trip: f64,
    ricci_s: f64,
    laplace_u: f64,
    twist_divergence: f64,
    twist_closed: f64,
    dtheta_codifferential: f64,
    laplace_u_dtheta: f64,
    killing_acceleration: f64,
}

fn point_residuals(f: &Fixture, y: &Field<Vector4<f64>>, x: &Point, fd: &FdConfig) -> PointResiduals {
    let p = &f.projection;
    let g = &f.metric;
    let yv = |z: &Point| y(z);

    let bianchi_alpha = bianchi(g, &|z: &Point| alpha_squared(p, z), x).abs().max();

    let la = lie_alpha_squared(p, &yv, x, fd);
    let q = QuotientPoint::new(p, x, fd);
    let u = q.u.value;
    let (yt, perp) = split_vector(p, &y(x), x);
    let ratio = |z: &Point| split_vector(p, &y(z), z).1 / (p.u)(z);
    let d_ratio = Vector3::from(fd.gradient(&ratio, x));
    let f_yt = contract(&yt, &q.dtheta);
    let lie_alpha_mixed = (la.mixed - (f_yt - d_ratio)).abs().max();

    let ds = horizontal_blocks(p, &delta_star(g, &yv, x), x);
    let yt_field = |z: &Point| split_vector(p, &y(z), z).0;
    let ds_s = lie_derivative3(&*p.g_s, &yt_field, x, fd) * 0.5;
    let yt_u = yt.dot(&Vector3::from(q.u.d));
    let ds_mixed = (f_yt * (-0.5) + d_ratio * 0.5) * (u * u);

    let conn = connection_from_jet(&g.jet(x));
    let lap = rough_laplacian(&conn, &Jet::of(&yv, x, fd));
    let two_beta = conn.ginv * bianchi(g, &|z: &Point| delta_star(g, &yv, z), x) * 2.0;
    let (lap_t, lap_perp) = split_vector(p, &lap, x);
    let rhs = quotient_bianchi_rhs(p, &yv, x, fd);
    let scale = lap.abs().max().max(1e-3);

    let recomposed = recompose_vector(p, &yt, perp, x);
    let gamma_tt = Vector4::from_fn(|m, _| conn.gamma[m][(0, 0)]);
    let vac = vacuum_projection_residuals(p, &gamma_tt, x, fd);

    PointResiduals {
        bianchi_alpha,
        lie_alpha_tt: la.tt.abs(),
        lie_alpha_horizontal: la.horizontal.abs().max(),
        lie_alpha_mixed,
        delta_star_tt: (ds.tt + u * yt_u).abs(),
        delta_star_mixed: (ds.mixed - ds_mixed).abs().max(),
        delta_star_horizontal: (ds.horizontal - ds_s).abs().max(),
        rough_laplacian_oracle: (two_beta - lap).abs().max() / scale,
        quotient_horizontal: (rhs.horizontal - lap_t).abs().max() / scale,
        quotient_perp: (rhs.perp_line + lap_perp).abs() / scale,
        quotient_extra: rhs.extra_terms.abs() / scale,
        split_round_trip: (recomposed - y(x)).abs().max(),
        ricci_s: vac.ricci,
        laplace_u: vac.laplace_u,
        twist_divergence: vac.twist_divergence,
        twist_closed: vac.twist_closed,
        dtheta_codifferential: vac.dtheta_codifferential,
        laplace_u_dtheta: vac.laplace_u_dtheta,
        killing_acceleration: vac.killing_acceleration,
    }
}

/// Orbit-space identity battery at the probe points with one seeded vector field.
pub fn identity_battery(f: &Fixture, probes: &[Point], seed: u64, fd: &FdConfig) -> Vec<Check> {
    let y = decaying_vector_field(seed);
    let rows: Vec<PointResiduals> = probes.par_iter().map(|x| point_residuals(f, &y, x, fd)).collect();
    let worst = |sel: fn(&PointResiduals) -> f64| max_of(rows.iter().map(sel));
    let n = rows.len();
    let c = |name: &str, label: &str, sel: fn(&PointResiduals) -> f64, tol: f64| {
        Check::within(name, label, worst(sel), tol).with_detail(format!("{n} probe points"))
    };
    vec![
        c("bianchi of alpha squared", "beta((dt + theta)^2) = 0", |r| r.bianchi_alpha, 1e-6),
        c("lie alpha squared: tt block", "L_Y alpha^2 (dt, dt) = 0", |r| r.lie_alpha_tt, 1e-8),
        c("lie alpha squared: horizontal block", "[L_Y alpha^2]^T = 0", |r| r.lie_alpha_horizontal, 1e-8),
        c(
            "lie alpha squared: mixed block",
            "{L_Y alpha^2 (dt)}^T = dtheta(Y^T) - d(Y^perp/u)",
            |r| r.lie_alpha_mixed,
            1e-6,
        ),
        c("delta star: tt", "delta* Y (dt, dt) = -u Y^T(u)", |r| r.delta_star_tt, 1e-6),
        c(
            "delta star: mixed",
            "[delta* Y (dt)]^T = -u^2 dtheta(Y^T)/2 + u^2 d(Y^perp/u)/2",
            |r| r.delta_star_mixed,
            1e-6,
        ),
        c("delta star: horizontal", "(delta* Y)^T = delta*_{g_S} Y^T", |r| r.delta_star_horizontal, 1e-6),
        c("split recomposition", "Y = Y^T - (Y^perp/u) dt", |r| r.split_round_trip, 1e-12),
        c("4D oracle consistency", "2 beta delta* Y = rough laplacian Y (vacuum)", |r| r.rough_laplacian_oracle, 1e-5),
        c("quotient decomposition: horizontal line", "[rough laplacian Y]^T on S", |r| r.quotient_horizontal, 1e-5),
        c("quotient decomposition: scalar line", "-[rough laplacian Y]^perp on S", |r| r.quotient_perp, 1e-5)
            .with_detail(format!(
                "{n} probe points; relative size of the omitted zeroth-order terms -u^2 Y^perp |dtheta|^2/4 - dtheta(grad u, Y^T): {:.3e}",
                worst(|r| r.quotient_extra)
            )),
        c("projected vacuum: ricci", "Ric_S = u^-1 D^2 u + 2u^-4 (w w - |w|^2 g_S)", |r| r.ricci_s, 1e-5),
        c("projected vacuum: laplacian of u", "Delta u = 2 u^-3 |w|^2", |r| r.laplace_u, 1e-5),
        c("projected vacuum: twist divergence", "delta w + 3 u^-1 <du, w> = 0", |r| r.twist_divergence, 1e-5),
        c("projected vacuum: twist closed", "dw = 0", |r| r.twist_closed, 1e-5),
        c("twist codifferential", "u delta dtheta = 3 dtheta(grad u)", |r| r.dtheta_codifferential, 1e-5),
        c("laplacian of u from dtheta", "Delta u = u^3 |dtheta|^2 / 2", |r| r.laplace_u_dtheta, 1e-5),
        c("killing acceleration", "nabla_dt dt = u grad u", |r| r.killing_acceleration, 1e-5),
    ]
}

/// Transformation laws of the boundary data under a tilt with nonzero normal derivative,
/// and invariance under one with vanishing normal derivative.
pub fn transformation_checks(f: &Fixture, seed: u64, count: usize) -> Result<Vec<Check>, GeoError> {
    let r = f.boundary_radius();
    let samples = boundary_samples(r, seed, count);
    let tilt = TimeFunction::linear_tilt(0.05 * (3.0 / (4.0 * std::f64::consts::PI)).sqrt(), r);
    let flat_tilt = TimeFunction::quadratic_tilt(0.05, r);
    let rows = samples
        .par_iter()
        .map(|p| -> Result<_, GeoError> {
            let t = transformation_residuals(&f.metric, &tilt, p)?;
            let d = data_change(&f.metric, &flat_tilt, p)?;
            let data = bartnik_data(&f.metric, p)?;
            Ok((t, d, data))
        })
        .collect::<Result<Vec<_>, _>>()?;
    let n = rows.len();
    let c = |name: &str, label: &str, err: f64, tol: f64| {
        Check::within(name, label, err, tol).with_detail(format!("{n} boundary points at r = {r}"))
    };
    let finite = rows.iter().all(|(_, _, d)| {
        d.gamma.determinant() > 0.0
            && d.mean_curvature.is_finite()
            && d.trace_k.is_finite()
            && d.tau.iter().all(|v| v.is_finite())
    });
    Ok(vec![
        Check::exact("boundary data well defined", "gamma > 0, all data finite", finite),
        c(
            "boost identity",
            "a^2 - b^2 = 1",
            max_of(rows.iter().map(|r| r.0.boost_identity)),
            1e-12,
        ),
        c(
            "translated slice metric",
            "g^ = g + X o df - u^2 df^2",
            max_of(rows.iter().map(|r| r.0.slice_metric)),
            1e-8,
        ),
        c(
            "translated induced metric",
            "gamma^ = gamma",
            max_of(rows.iter().map(|r| r.0.gamma)),
            1e-5,
        ),
        c(
            "translated mean curvature",
            "H^ = b k + a H",
            max_of(rows.iter().map(|r| r.0.mean_curvature)),
            1e-5,
        ),
        c(
            "translated trace of K",
            "k^ = a k + b H",
            max_of(rows.iter().map(|r| r.0.trace_k)),
            1e-5,
        ),
        c(
            "translated connection form",
            "tau^ = a^2 d(b/a) + tau",
            max_of(rows.iter().map(|r| r.0.tau)),
            1e-5,
        ),
        c(
            "invariance under boundary-fixing translations",
            "n(f) = 0 leaves (gamma, H, k, tau) unchanged",
            max_of(rows.iter().map(|r| r.1)),
            1e-6,
        ),
    ])
}

/// Flat-background split of the gauge operator: for h with Y = h₀ᵢ and v = −h₀₀/2,
/// β h = (δY, δh + ½ d(tr h + 2v)). Returns the max mismatch over `count` random quadratic h.
pub fn flat_gauge_split(seed: u64, count: usize) -> f64 {
    let flat = fixture(FixtureName::Minkowski).expect("minkowski");
    let fd = FdConfig::default();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let cases: Vec<(Vec<[f64; 10]>, Point)> = (0..count)
        .map(|_| {
            let coeffs = (0..10)
                .map(|_| std::array::from_fn(|_| rng.gen_range(-1.0..1.0)))
                .collect();
            let cos: f64 = rng.gen_range(-1.0..1.0);
            let phi: f64 = rng.gen_range(0.0..std::f64::consts::TAU);
            let r: f64 = rng.gen_range(1.1..5.0);
            let s = (1.0 - cos * cos).sqrt();
            (coeffs, Point::new(r * s * phi.cos(), r * s * phi.sin(), r * cos))
        })
        .collect();
    max_of(
        cases
            .par_iter()
            .map(|(coeffs, x)| {
                // one quadratic polynomial per independent component
                let quad = |c: &[f64; 10], z: &Point| {
                    c[0] + c[1] * z[0]
                        + c[2] * z[1]
                        + c[3] * z[2]
                        + c[4] * z[0] * z[0]
                        + c[5] * z[1] * z[1]
                        + c[6] * z[2] * z[2]
                        + c[7] * z[0] * z[1]
                        + c[8] * z[1] * z[2]
                        + c[9] * z[0] * z[2]
                };
                let h = |z: &Point| {
                    let mut m = Matrix4::zeros();
                    let mut k = 0;
                    for a in 0..4 {
                        for b in a..4 {
                            m[(a, b)] = quad(&coeffs[k], z);
                            m[(b, a)] = m[(a, b)];
                            k += 1;
                        }
                    }
                    m
                };
                let direct = bianchi(&flat.metric, &h, x);
                let dh = fd.gradient(&h, x);
                let div_y = -(0..3).map(|i| dh[i][(0, i + 1)]).sum::<f64>();
                let trace_plus = |z: &Point| {
                    let m = h(z);
                    m[(1, 1)] + m[(2, 2)] + m[(3, 3)] - m[(0, 0)]
                };
                let dtr = fd.gradient(&trace_plus, x);
                let mut split = Vector4::new(div_y, 0.0, 0.0, 0.0);
                for j in 0..3 {
                    split[j + 1] = -(0..3).map(|i| dh[i][(i + 1, j + 1)]).sum::<f64>() + 0.5 * dtr[j];
                }
                (direct - split).abs().max()
            })
            .collect::<Vec<_>>(),
    )
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct ConvergenceRow {
    pub rel_step: f64,
    pub max_ricci: f64,
}

/// max |Ric| as the base step is halved, with the configured Richardson levels.
pub fn richardson_table(metric: &Metric4, probes: &[Point], start: f64, rows: usize) -> Vec<ConvergenceRow> {
    (0..rows)
        .map(|k| {
            let step = start / 2f64.powi(k as i32);
            let m = metric.clone().with_fd(metric.fd.with_step(step));
            ConvergenceRow {
                rel_step: step,
                max_ricci: vacuum_oracle(&m, probes),
            }
        })
        .collect()
}

/// Each halving gains a factor of 10 until the residual is below the floor.
pub fn richardson_converges(table: &[ConvergenceRow], floor: f64) -> bool {
    table
        .windows(2)
        .all(|w| w[0].max_ricci < floor || w[1].max_ricci < floor || w[1].max_ricci * 10.0 <= w[0].max_ricci)
}

pub struct GeometryOutcome {
    pub checks: Vec<Check>,
    pub convergence: Vec<ConvergenceRow>,
}

impl GeometryOutcome {
    /// CSV rows (r, component, value) of the step-convergence table.
    pub fn convergence_csv(&self) -> String {
        let mut s = String::from("r,component,value\n");
        for row in &self.convergence {
            s.push_str(&format!("{},max_ricci,{:e}\n", row.rel_step, row.max_ricci));
        }
        s
    }
}

pub fn run_geometry(cfg: &GeometryConfig) -> Result<GeometryOutcome, GeoError> {
    let name: FixtureName = cfg.fixture.parse()?;
    let mut f = fixture(name)?;
    f.metric = f.metric.with_fd(cfg.fd);
    let probes = checked_probes(&f, cfg.seed, cfg.probes)?;
    let mut checks = vec![
        Check::within(
            "assembly round trip",
            "ADM and projection forms agree",
            assembly_round_trip(&f, &probes)?,
            1e-12,
        ),
        Check::within("vacuum", "Ric = 0", vacuum_oracle(&f.metric, &probes), 1e-6).with_detail(format!(
            "{} probe points, seed {}",
            probes.len(),
            cfg.seed
        )),
    ];
    checks.extend(identity_battery(&f, &probes, cfg.seed, &cfg.fd));
    checks.extend(transformation_checks(&f, cfg.seed, cfg.boundary_samples)?);
    if name == FixtureName::Minkowski {
        let d = bartnik_data(&f.metric, &BoundaryPoint::new(1.0, 1.0, 0.5))?;
        let round = nalgebra::Matrix2::new(1.0, 0.0, 0.0, 1.0f64.sin().powi(2));
        let err = (d.gamma - round)
            .abs()
            .max()
            .max((d.mean_curvature - 2.0).abs())
            .max(d.trace_k.abs())
            .max(d.tau.abs().max());
        checks.push(Check::within("flat boundary data", "(round, 2, 0, 0)", err, 1e-8));
    }
    checks.push(Check::within(
        "flat gauge split",
        "beta h = (delta Y, delta h + d(tr h + 2v)/2)",
        flat_gauge_split(cfg.seed, 20),
        1e-8,
    ));
    let convergence = richardson_table(&f.metric, &probes[..probes.len().min(5)], 0.16, 5);
    checks.push(
        Check::exact(
            "richardson convergence",
            "halving h gains 10x down to 1e-9",
            richardson_converges(&convergence, 1e-9),
        )
        .with_detail(
            convergence
                .iter()
                .map(|r| format!("h={}: {:.2e}", r.rel_step, r.max_ricci))
                .collect::<Vec<_>>()
                .join(", "),
        ),
    );
    Ok(GeometryOutcome { checks, convergence })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn decaying_field_is_seeded() {
        let x = Point::new(2.0, 1.0, -1.0);
        assert_eq!(decaying_vector_field(3)(&x), decaying_vector_field(3)(&x));
        assert_ne!(decaying_vector_field(3)(&x), decaying_vector_field(4)(&x));
        let far = decaying_vector_field(3)(&(x * 100.0)).norm();
        assert!(far < decaying_vector_field(3)(&x).norm());
    }

    #[test]
    fn gauge_split_on_flat_background() {
        assert!(flat_gauge_split(1, 5) < 1e-8);
    }

    #[test]
    fn minkowski_battery_passes() {
        let out = run_geometry(&GeometryConfig::new(FixtureName::Minkowski, 2)).unwrap();
        for c in &out.checks {
            assert!(c.passed(), "{c:?}");
        }
    }

    #[test]
    fn time_translation_has_vanishing_lie_blocks() {
        let f = fixture(FixtureName::Kerr { mass: 1.0, spin: 0.5 }).unwrap();
        let dt = |_: &Point| Vector4::new(1.0, 0.0, 0.0, 0.0);
        let x = Point::new(4.0, 1.0, 1.0);
        let b = lie_alpha_squared(&f.projection, &dt, &x, &FdConfig::default());
        assert!(b.tt.abs() + b.mixed.norm() + b.horizontal.norm() < 1e-14);
    }
}
