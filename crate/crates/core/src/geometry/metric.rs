//! Stationary 4-metrics and their 3+1 and projection forms. Index 0 is t.

use std::sync::Arc;

use nalgebra::{Matrix3, Matrix4, Vector3, Vector4};

use super::fd::{FdConfig, Jet, Point};
use super::GeoError;

pub type Field<T> = Arc<dyn Fn(&Point) -> T + Send + Sync>;

pub fn field<T, F: Fn(&Point) -> T + Send + Sync + 'static>(f: F) -> Field<T> {
    Arc::new(f)
}

/// (g, X, N): g⁽⁴⁾ = −N²dt² + gᵢⱼ(dxⁱ + Xⁱdt)(dxʲ + Xʲdt). The shift is stored with an upper index.
#[derive(Clone)]
pub struct StationaryTriple {
    pub metric: Field<Matrix3<f64>>,
    pub shift: Field<Vector3<f64>>,
    pub lapse: Field<f64>,
}

/// (u, θ, g_S): g⁽⁴⁾ = −u²(dt + θ)² + g_S.
#[derive(Clone)]
pub struct ProjectionTriple {
    pub u: Field<f64>,
    pub theta: Field<Vector3<f64>>,
    pub g_s: Field<Matrix3<f64>>,
}

#[derive(Clone)]
pub struct Metric4 {
    pub components: Field<Matrix4<f64>>,
    pub fd: FdConfig,
}

pub fn spatial(m: &Matrix4<f64>) -> Matrix3<f64> {
    m.fixed_view::<3, 3>(1, 1).into_owned()
}

pub fn mixed(m: &Matrix4<f64>) -> Vector3<f64> {
    Vector3::new(m[(0, 1)], m[(0, 2)], m[(0, 3)])
}

fn inverse3(m: &Matrix3<f64>) -> Matrix3<f64> {
    m.try_inverse().unwrap_or_else(|| Matrix3::from_element(f64::NAN))
}

impl Metric4 {
    pub fn new(components: Field<Matrix4<f64>>) -> Self {
        Metric4 {
            components,
            fd: FdConfig::default(),
        }
    }

    pub fn with_fd(mut self, fd: FdConfig) -> Self {
        self.fd = fd;
        self
    }

    pub fn at(&self, x: &Point) -> Matrix4<f64> {
        (self.components)(x)
    }

    pub fn jet(&self, x: &Point) -> Jet<Matrix4<f64>> {
        Jet::of(&*self.components, x, &self.fd)
    }

    /// Signature (−,+,+,+).
    pub fn check_lorentzian(&self, x: &Point) -> Result<(), GeoError> {
        let ev = self.at(x).symmetric_eigen().eigenvalues;
        let neg = ev.iter().filter(|v| **v < 0.0).count();
        let pos = ev.iter().filter(|v| **v > 0.0).count();
        if neg == 1 && pos == 3 {
            Ok(())
        } else {
            Err(GeoError::NotLorentzian { point: *x })
        }
    }

    /// 3+1 data of the slice t = const.
    pub fn stationary(&self) -> StationaryTriple {
        let c1 = self.components.clone();
        let c2 = self.components.clone();
        let c3 = self.components.clone();
        StationaryTriple {
            metric: field(move |x| spatial(&c1(x))),
            shift: field(move |x| {
                let m = c2(x);
                inverse3(&spatial(&m)) * mixed(&m)
            }),
            lapse: field(move |x| {
                let m = c3(x);
                let low = mixed(&m);
                let up = inverse3(&spatial(&m)) * low;
                (-m[(0, 0)] + low.dot(&up)).sqrt()
            }),
        }
    }

    /// Orbit-space data with respect to ∂_t.
    pub fn projection(&self) -> ProjectionTriple {
        let c1 = self.components.clone();
        let c2 = self.components.clone();
        let c3 = self.components.clone();
        ProjectionTriple {
            u: field(move |x| (-c1(x)[(0, 0)]).sqrt()),
            theta: field(move |x| {
                let m = c2(x);
                mixed(&m) / m[(0, 0)]
            }),
            g_s: field(move |x| {
                let m = c3(x);
                let th = mixed(&m) / m[(0, 0)];
                spatial(&m) - th * th.transpose() * m[(0, 0)]
            }),
        }
    }
}

impl StationaryTriple {
    pub fn check(&self, x: &Point) -> Result<(), GeoError> {
        let g = (self.metric)(x);
        let sx = (self.shift)(x);
        let n = (self.lapse)(x);
        let norm2 = (g * sx).dot(&sx);
        if !(n * n > norm2) {
            return Err(GeoError::Causality {
                point: *x,
                lapse_sq: n * n,
                shift_sq: norm2,
            });
        }
        if g.cholesky().is_none() {
            return Err(GeoError::NotRiemannian { point: *x });
        }
        Ok(())
    }

    pub fn components_at(&self, x: &Point) -> Matrix4<f64> {
        let g = (self.metric)(x);
        let low = g * (self.shift)(x);
        let n = (self.lapse)(x);
        let mut m = Matrix4::zeros();
        m[(0, 0)] = -n * n + low.dot(&(self.shift)(x));
        for i in 0..3 {
            m[(0, i + 1)] = low[i];
            m[(i + 1, 0)] = low[i];
            for j in 0..3 {
                m[(i + 1, j + 1)] = g[(i, j)];
            }
        }
        m
    }
}

impl ProjectionTriple {
    pub fn check(&self, x: &Point) -> Result<(), GeoError> {
        let u = (self.u)(x);
        if !(u > 0.0) {
            return Err(GeoError::NonPositiveNorm { point: *x, u });
        }
        Ok(())
    }

    pub fn components_at(&self, x: &Point) -> Matrix4<f64> {
        let u2 = (self.u)(x).powi(2);
        let th = (self.theta)(x);
        let gs = (self.g_s)(x);
        let mut m = Matrix4::zeros();
        m[(0, 0)] = -u2;
        for i in 0..3 {
            m[(0, i + 1)] = -u2 * th[i];
            m[(i + 1, 0)] = -u2 * th[i];
            for j in 0..3 {
                m[(i + 1, j + 1)] = gs[(i, j)] - u2 * th[i] * th[j];
            }
        }
        m
    }

    /// Horizontal lift of a vector on S: v − θ(v)∂_t.
    pub fn lift(&self, x: &Point, v: &Vector3<f64>) -> Vector4<f64> {
        let th = (self.theta)(x);
        Vector4::new(-th.dot(v), v[0], v[1], v[2])
    }
}

/// g₀₀ = −N² + |X|², g₀ᵢ = Xᵢ, gᵢⱼ as given. Fails on a causality violation at a probe point.
pub fn assemble_adm(s: &StationaryTriple, probes: &[Point], fd: FdConfig) -> Result<Metric4, GeoError> {
    for p in probes {
        s.check(p)?;
    }
    let s = s.clone();
    Ok(Metric4::new(field(move |x| s.components_at(x))).with_fd(fd))
}

/// Quadratic expansion of −u²(dt + θ)² + g_S. Fails when u ≤ 0 at a probe point.
pub fn assemble_projection(p: &ProjectionTriple, probes: &[Point], fd: FdConfig) -> Result<Metric4, GeoError> {
    for x in probes {
        p.check(x)?;
    }
    let p = p.clone();
    Ok(Metric4::new(field(move |x| p.components_at(x))).with_fd(fd))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn euclid() -> Field<Matrix3<f64>> {
        field(|_| Matrix3::identity())
    }

    #[test]
    fn flat_triple_gives_minkowski() {
        let s = StationaryTriple {
            metric: euclid(),
            shift: field(|_| Vector3::zeros()),
            lapse: field(|_| 1.0),
        };
        let g = assemble_adm(&s, &[Point::new(2.0, 0.0, 0.0)], FdConfig::default()).unwrap();
        assert_eq!(
            g.at(&Point::new(1.0, 2.0, 3.0)),
            Matrix4::from_diagonal(&Vector4::new(-1.0, 1.0, 1.0, 1.0))
        );
        let p = ProjectionTriple {
            u: field(|_| 1.0),
            theta: field(|_| Vector3::zeros()),
            g_s: euclid(),
        };
        let g2 = assemble_projection(&p, &[], FdConfig::default()).unwrap();
        assert_eq!(g2.at(&Point::new(0.5, 0.0, 0.0)), g.at(&Point::new(0.5, 0.0, 0.0)));
    }

    #[test]
    fn readback_and_round_trip() {
        let s = StationaryTriple {
            metric: field(|x| Matrix3::identity() * (1.0 + 0.1 * x[0]) + Matrix3::from_element(0.05)),
            shift: field(|x| Vector3::new(0.2, -0.1 * x[1], 0.3)),
            lapse: field(|x| 1.2 + 0.1 * x[2]),
        };
        let x = Point::new(0.3, 0.7, -0.4);
        let g = assemble_adm(&s, &[x], FdConfig::default()).unwrap();
        let m = g.at(&x);
        let gs = (s.metric)(&x);
        let sx = (s.shift)(&x);
        let n = (s.lapse)(&x);
        assert!((m[(0, 0)] - (-n * n + (gs * sx).dot(&sx))).abs() < 1e-14);
        let back = g.stationary();
        assert!(((back.lapse)(&x) - n).abs() < 1e-12);
        assert!(((back.shift)(&x) - sx).norm() < 1e-12);
        let proj = g.projection();
        let again = assemble_projection(&proj, &[x], FdConfig::default()).unwrap();
        assert!((again.at(&x) - m).norm() < 1e-12);
        // g₀ᵢ = −u²θᵢ
        let u2 = (proj.u)(&x).powi(2);
        let th = (proj.theta)(&x);
        assert!((m[(0, 1)] + u2 * th[0]).abs() < 1e-14);
    }

    #[test]
    fn causality_violation_rejected() {
        let s = StationaryTriple {
            metric: euclid(),
            shift: field(|_| Vector3::new(1.5, 0.0, 0.0)),
            lapse: field(|_| 1.0),
        };
        assert!(matches!(
            assemble_adm(&s, &[Point::zeros()], FdConfig::default()),
            Err(GeoError::Causality { .. })
        ));
        let p = ProjectionTriple {
            u: field(|_| 0.0),
            theta: field(|_| Vector3::zeros()),
            g_s: euclid(),
        };
        assert!(assemble_projection(&p, &[Point::zeros()], FdConfig::default()).is_err());
    }
}
