//! Bartnik boundary data on a coordinate sphere and its behaviour under boundary time translations.

use nalgebra::{Matrix2, Matrix3, Matrix4, Vector2, Vector3};
use serde::Serialize;

use super::fd::{FdConfig, Point};
use super::metric::{field, Field, Metric4, StationaryTriple};
use super::GeoError;

/// A point on the coordinate sphere |x| = radius, in polar angles.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct BoundaryPoint {
    pub radius: f64,
    pub polar: f64,
    pub azimuth: f64,
}

impl BoundaryPoint {
    pub fn new(radius: f64, polar: f64, azimuth: f64) -> Self {
        BoundaryPoint { radius, polar, azimuth }
    }

    pub fn position(&self) -> Point {
        let (st, ct) = self.polar.sin_cos();
        let (sp, cp) = self.azimuth.sin_cos();
        Point::new(st * cp, st * sp, ct) * self.radius
    }

    /// Coordinate tangents ∂_polar, ∂_azimuth.
    pub fn tangents(&self) -> [Vector3<f64>; 2] {
        let (st, ct) = self.polar.sin_cos();
        let (sp, cp) = self.azimuth.sin_cos();
        let r = self.radius;
        [
            Vector3::new(ct * cp, ct * sp, -st) * r,
            Vector3::new(-st * sp, st * cp, 0.0) * r,
        ]
    }

    pub fn shifted(&self, d_polar: f64, d_azimuth: f64) -> Self {
        BoundaryPoint::new(self.radius, self.polar + d_polar, self.azimuth + d_azimuth)
    }
}

/// (γ, H, tr_{∂M}K, τ) with γ and τ in the angle basis.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct BartnikData {
    pub gamma: Matrix2<f64>,
    pub mean_curvature: f64,
    pub trace_k: f64,
    pub tau: Vector2<f64>,
}

/// K = −(1/2N) L_X g on the slice t = const.
pub fn second_fundamental_form(s: &StationaryTriple, x: &Point, fd: &FdConfig) -> Matrix3<f64> {
    let g = (s.metric)(x);
    let shift = (s.shift)(x);
    let dg = fd.gradient(&*s.metric, x);
    let dx = fd.gradient(&*s.shift, x);
    let lie = Matrix3::from_fn(|i, j| {
        (0..3)
            .map(|k| shift[k] * dg[k][(i, j)] + g[(k, j)] * dx[i][k] + g[(i, k)] * dx[j][k])
            .sum::<f64>()
    });
    lie * (-0.5 / (s.lapse)(x))
}

/// Outward unit normal field to the coordinate spheres: normalized g-gradient of r.
pub fn radial_normal(metric: Field<Matrix3<f64>>) -> Field<Vector3<f64>> {
    field(move |x: &Point| {
        let ginv = metric(x)
            .try_inverse()
            .unwrap_or_else(|| Matrix3::from_element(f64::NAN));
        let v = ginv * (x / x.norm());
        v / (v.dot(&(metric(x) * v))).sqrt()
    })
}

pub fn bartnik_data(g: &Metric4, p: &BoundaryPoint) -> Result<BartnikData, GeoError> {
    bartnik_data_of(&g.stationary(), p, &g.fd)
}

pub fn bartnik_data_of(s: &StationaryTriple, p: &BoundaryPoint, fd: &FdConfig) -> Result<BartnikData, GeoError> {
    let x = p.position();
    let g = (s.metric)(&x);
    if g.cholesky().is_none() {
        return Err(GeoError::NotRiemannian { point: x });
    }
    let e = p.tangents();
    let gamma = Matrix2::from_fn(|a, b| e[a].dot(&(g * e[b])));
    let gamma_inv = gamma
        .try_inverse()
        .filter(|_| gamma.determinant() > 0.0)
        .ok_or_else(|| GeoError::DegenerateBoundary(format!("det γ = {:e}", gamma.determinant())))?;
    let normal = radial_normal(s.metric.clone());
    let n = normal(&x);
    // H = div n, since ⟨∇_n n, n⟩ = 0 for a unit field
    let dn = fd.gradient(&*normal, &x);
    let log_vol = |y: &Point| 0.5 * (s.metric)(y).determinant().ln();
    let dvol = fd.gradient(&log_vol, &x);
    let mean_curvature = (0..3).map(|i| dn[i][i] + n[i] * dvol[i]).sum();
    let k = second_fundamental_form(s, &x, fd);
    let k_tan = Matrix2::from_fn(|a, b| e[a].dot(&(k * e[b])));
    Ok(BartnikData {
        gamma,
        mean_curvature,
        trace_k: gamma_inv.component_mul(&k_tan).sum(),
        tau: Vector2::new(n.dot(&(k * e[0])), n.dot(&(k * e[1]))),
    })
}

/// A t-independent function with its gradient, used as the time shift Φ_f(t, x) = (t + f(x), x).
#[derive(Clone)]
pub struct TimeFunction {
    pub value: Field<f64>,
    pub gradient: Field<Vector3<f64>>,
}

impl TimeFunction {
    pub fn zero() -> Self {
        TimeFunction {
            value: field(|_| 0.0),
            gradient: field(|_| Vector3::zeros()),
        }
    }

    /// f = c (r − R) (z/r), vanishing on |x| = R with normal derivative c·cos(polar) there.
    pub fn linear_tilt(c: f64, radius: f64) -> Self {
        TimeFunction {
            value: field(move |x: &Point| {
                let r = x.norm();
                c * (r - radius) * x[2] / r
            }),
            gradient: field(move |x: &Point| {
                let r = x.norm();
                let rhat = x / r;
                let dz_over_r = (Vector3::z() - rhat * (x[2] / r)) / r;
                (rhat * (x[2] / r) + dz_over_r * (r - radius)) * c
            }),
        }
    }

    /// f = c (r − R)² (z/r), vanishing on |x| = R together with its normal derivative.
    pub fn quadratic_tilt(c: f64, radius: f64) -> Self {
        TimeFunction {
            value: field(move |x: &Point| {
                let r = x.norm();
                c * (r - radius).powi(2) * x[2] / r
            }),
            gradient: field(move |x: &Point| {
                let r = x.norm();
                let rhat = x / r;
                let dz_over_r = (Vector3::z() - rhat * (x[2] / r)) / r;
                (rhat * (2.0 * (r - radius) * x[2] / r) + dz_over_r * (r - radius).powi(2)) * c
            }),
        }
    }
}

/// Components of Φ_f* g: dt ↦ dt + df.
pub fn pulled_components(g: &Matrix4<f64>, df: &Vector3<f64>) -> Matrix4<f64> {
    let mut j = Matrix4::identity();
    for i in 0..3 {
        j[(0, i + 1)] = df[i];
    }
    j.transpose() * g * j
}

pub fn time_translate(g: &Metric4, f: &TimeFunction) -> Metric4 {
    let comp = g.components.clone();
    let grad = f.gradient.clone();
    Metric4::new(field(move |x| pulled_components(&comp(x), &grad(x)))).with_fd(g.fd)
}

/// Normal and tangential boost parameters (a, b) at a boundary point, a² − b² = 1.
pub fn boost_parameters(s: &StationaryTriple, f: &TimeFunction, p: &BoundaryPoint) -> Result<(f64, f64), GeoError> {
    let x = p.position();
    let g = (s.metric)(&x);
    let n = radial_normal(s.metric.clone())(&x);
    let nf = (f.gradient)(&x).dot(&n);
    let xn = (g * (s.shift)(&x)).dot(&n);
    let lapse = (s.lapse)(&x);
    let top = 1.0 + xn * nf;
    let disc = top * top - lapse * lapse * nf * nf;
    if !(disc > 0.0) {
        return Err(GeoError::TranslationTooLarge(format!("discriminant {disc:e} at {x:?}")));
    }
    Ok((top / disc.sqrt(), lapse * nf / disc.sqrt()))
}

/// Induced metric of Φ_f* g on the slice: g + X♭ ⊙ df − u² df².
pub fn translated_slice_metric(g4: &Matrix4<f64>, df: &Vector3<f64>) -> Matrix3<f64> {
    let x_low = Vector3::new(g4[(0, 1)], g4[(0, 2)], g4[(0, 3)]);
    let g = g4.fixed_view::<3, 3>(1, 1).into_owned();
    g + x_low * df.transpose() + df * x_low.transpose() + df * df.transpose() * g4[(0, 0)]
}

/// Residuals of the transformation laws at one boundary point.
#[derive(Clone, Copy, Debug, Default, Serialize)]
pub struct TransformationResiduals {
    pub gamma: f64,
    pub mean_curvature: f64,
    pub trace_k: f64,
    pub tau: f64,
    pub boost_identity: f64,
    pub slice_metric: f64,
}

pub fn transformation_residuals(
    g: &Metric4,
    f: &TimeFunction,
    p: &BoundaryPoint,
) -> Result<TransformationResiduals, GeoError> {
    let s = g.stationary();
    let pulled = time_translate(g, f);
    let before = bartnik_data_of(&s, p, &g.fd)?;
    let after = bartnik_data(&pulled, p)?;
    let (a, b) = boost_parameters(&s, f, p)?;
    let ratio = |q: &BoundaryPoint| boost_parameters(&s, f, q).map(|(a, b)| b / a);
    let h = g.fd.rel_step;
    let d_ratio = Vector2::new(
        (ratio(&p.shifted(h, 0.0))? - ratio(&p.shifted(-h, 0.0))?) / (2.0 * h),
        (ratio(&p.shifted(0.0, h))? - ratio(&p.shifted(0.0, -h))?) / (2.0 * h),
    );
    let x = p.position();
    let slice = translated_slice_metric(&g.at(&x), &(f.gradient)(&x));
    let slice_direct = pulled.at(&x).fixed_view::<3, 3>(1, 1).into_owned();
    Ok(TransformationResiduals {
        gamma: (after.gamma - before.gamma).abs().max(),
        mean_curvature: (after.mean_curvature - (b * before.trace_k + a * before.mean_curvature)).abs(),
        trace_k: (after.trace_k - (a * before.trace_k + b * before.mean_curvature)).abs(),
        tau: (after.tau - (d_ratio * (a * a) + before.tau)).abs().max(),
        boost_identity: (a * a - b * b - 1.0).abs(),
        slice_metric: (slice - slice_direct).abs().max(),
    })
}

/// Largest change of any of the four data under Φ_f.
pub fn data_change(g: &Metric4, f: &TimeFunction, p: &BoundaryPoint) -> Result<f64, GeoError> {
    let before = bartnik_data(g, p)?;
    let after = bartnik_data(&time_translate(g, f), p)?;
    Ok([
        (after.gamma - before.gamma).abs().max(),
        (after.mean_curvature - before.mean_curvature).abs(),
        (after.trace_k - before.trace_k).abs(),
        (after.tau - before.tau).abs().max(),
    ]
    .into_iter()
    .fold(0.0, f64::max))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::fixtures::{fixture, FixtureName};

    #[test]
    fn flat_unit_sphere_data() {
        let f = fixture(FixtureName::Minkowski).unwrap();
        let p = BoundaryPoint::new(1.0, 1.1, 0.4);
        let d = bartnik_data(&f.metric, &p).unwrap();
        let round = Matrix2::new(1.0, 0.0, 0.0, 1.1f64.sin().powi(2));
        assert!((d.gamma - round).abs().max() < 1e-14);
        assert!((d.mean_curvature - 2.0).abs() < 1e-9);
        assert_eq!(d.trace_k, 0.0);
        assert_eq!(d.tau, Vector2::zeros());
    }

    #[test]
    fn static_metric_has_no_extrinsic_data() {
        let f = fixture(FixtureName::Schwarzschild { mass: 1.0 }).unwrap();
        let d = bartnik_data(&f.metric, &BoundaryPoint::new(3.0, 0.9, 2.0)).unwrap();
        assert!(d.trace_k.abs() < 1e-14 && d.tau.norm() < 1e-14);
        // H = 2√(1 − 2m/r)/r
        assert!((d.mean_curvature - 2.0 * (1.0f64 / 3.0).sqrt() / 3.0).abs() < 1e-9);
    }

    #[test]
    fn tilt_gradients_match_finite_differences() {
        let fd = FdConfig::default();
        for t in [
            TimeFunction::linear_tilt(0.05, 3.0),
            TimeFunction::quadratic_tilt(0.05, 3.0),
        ] {
            let x = Point::new(2.0, -1.0, 2.5);
            let num = fd.gradient(&*t.value, &x);
            assert!(((t.gradient)(&x) - Vector3::from(num)).norm() < 1e-11);
        }
    }

    #[test]
    fn zero_shift_is_identity() {
        let f = fixture(FixtureName::Kerr { mass: 1.0, spin: 0.3 }).unwrap();
        let p = BoundaryPoint::new(3.0, 1.0, 0.3);
        let (a, b) = boost_parameters(&f.stationary, &TimeFunction::zero(), &p).unwrap();
        assert_eq!((a, b), (1.0, 0.0));
        let pulled = time_translate(&f.metric, &TimeFunction::zero());
        assert_eq!(pulled.at(&p.position()), f.metric.at(&p.position()));
    }

    #[test]
    fn large_translation_rejected() {
        let f = fixture(FixtureName::Minkowski).unwrap();
        let p = BoundaryPoint::new(1.0, 0.3, 0.0);
        let r = boost_parameters(&f.stationary, &TimeFunction::linear_tilt(5.0, 1.0), &p);
        assert!(matches!(r, Err(GeoError::TranslationTooLarge(_))));
    }
}
