//! Exact stationary vacuum fixtures in Cartesian-type coordinates.

use std::fmt;
use std::str::FromStr;

use nalgebra::{Matrix4, Vector3};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::fd::Point;
use super::metric::{field, Metric4, ProjectionTriple, StationaryTriple};
use super::GeoError;

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum FixtureName {
    Minkowski,
    Schwarzschild { mass: f64 },
    Kerr { mass: f64, spin: f64 },
}

impl fmt::Display for FixtureName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FixtureName::Minkowski => write!(f, "minkowski_exterior"),
            FixtureName::Schwarzschild { mass } => write!(f, "schwarzschild:{mass}"),
            FixtureName::Kerr { mass, spin } => write!(f, "kerr:{mass},{spin}"),
        }
    }
}

impl FromStr for FixtureName {
    type Err = GeoError;

    /// `minkowski`, `schwarzschild[:m]`, `kerr[:m,a]`; defaults m = 1, a = 0.5.
    fn from_str(s: &str) -> Result<Self, GeoError> {
        let bad = || GeoError::UnknownFixture(s.to_string());
        let (head, args) = s.split_once(':').unwrap_or((s, ""));
        let nums: Vec<f64> = if args.is_empty() {
            Vec::new()
        } else {
            args.split(',')
                .map(|t| t.trim().parse().map_err(|_| bad()))
                .collect::<Result<_, _>>()?
        };
        let name = match (head, nums.as_slice()) {
            ("minkowski" | "minkowski_exterior", []) => FixtureName::Minkowski,
            ("schwarzschild", []) => FixtureName::Schwarzschild { mass: 1.0 },
            ("schwarzschild", [m]) => FixtureName::Schwarzschild { mass: *m },
            ("kerr", []) => FixtureName::Kerr { mass: 1.0, spin: 0.5 },
            ("kerr", [m, a]) => FixtureName::Kerr { mass: *m, spin: *a },
            _ => return Err(bad()),
        };
        name.validate()?;
        Ok(name)
    }
}

impl FixtureName {
    pub fn validate(&self) -> Result<(), GeoError> {
        match *self {
            FixtureName::Minkowski => Ok(()),
            FixtureName::Schwarzschild { mass } if mass > 0.0 => Ok(()),
            FixtureName::Kerr { mass, spin } if mass > 0.0 && spin.abs() < mass => Ok(()),
            _ => Err(GeoError::UnknownFixture(self.to_string())),
        }
    }
}

pub struct Fixture {
    pub name: FixtureName,
    pub metric: Metric4,
    pub projection: ProjectionTriple,
    pub stationary: StationaryTriple,
    /// Radius of the region that must be avoided (unit ball, or the ergosphere bound 2m).
    pub excluded_radius: f64,
    /// Length scale: 1 for flat space, 1.5 times the excluded radius otherwise.
    pub scale: f64,
}

/// Schwarzschild in Schwarzschild coordinates with x = r·(angles):
/// g₀₀ = −(1 − 2m/r), gᵢⱼ = δᵢⱼ + 2m/(r − 2m)·xᵢxⱼ/r².
pub fn schwarzschild_components(mass: f64, x: &Point) -> Matrix4<f64> {
    let r = x.norm();
    let mut g = Matrix4::identity();
    g[(0, 0)] = -(1.0 - 2.0 * mass / r);
    let c = 2.0 * mass / (r - 2.0 * mass) / (r * r);
    for i in 0..3 {
        for j in 0..3 {
            g[(i + 1, j + 1)] += c * x[i] * x[j];
        }
    }
    g
}

/// Kerr in Boyer–Lindquist coordinates, written in x = r sinθ cosφ, y = r sinθ sinφ, z = r cosθ.
/// Singular on the polar axis; probe points stay away from it.
pub fn kerr_components(mass: f64, spin: f64, x: &Point) -> Matrix4<f64> {
    let r = x.norm();
    let rho = (x[0] * x[0] + x[1] * x[1]).sqrt();
    let cos = x[2] / r;
    let sin2 = (rho / r).powi(2);
    let a = spin;
    let sigma = r * r + a * a * cos * cos;
    let delta = r * r - 2.0 * mass * r + a * a;
    let g_tt = -(1.0 - 2.0 * mass * r / sigma);
    let g_tphi = -2.0 * mass * a * r * sin2 / sigma;
    let g_rr = sigma / delta;
    let g_thth = sigma;
    let g_phph = (r * r + a * a + 2.0 * mass * a * a * r * sin2 / sigma) * sin2;
    let dr = x / r;
    let dth = Vector3::new(
        x[2] * x[0] / (r * r),
        x[2] * x[1] / (r * r),
        x[2] * x[2] / (r * r) - 1.0,
    ) / rho;
    let dph = Vector3::new(-x[1], x[0], 0.0) / (rho * rho);
    let mut g = Matrix4::zeros();
    g[(0, 0)] = g_tt;
    for i in 0..3 {
        g[(0, i + 1)] = g_tphi * dph[i];
        g[(i + 1, 0)] = g_tphi * dph[i];
        for j in 0..3 {
            g[(i + 1, j + 1)] = g_rr * dr[i] * dr[j] + g_thth * dth[i] * dth[j] + g_phph * dph[i] * dph[j];
        }
    }
    g
}

pub fn fixture(name: FixtureName) -> Result<Fixture, GeoError> {
    name.validate()?;
    let (metric, excluded) = match name {
        FixtureName::Minkowski => (
            Metric4::new(field(|_| {
                Matrix4::from_diagonal(&nalgebra::Vector4::new(-1.0, 1.0, 1.0, 1.0))
            })),
            1.0,
        ),
        FixtureName::Schwarzschild { mass } => (
            Metric4::new(field(move |x| schwarzschild_components(mass, x))),
            2.0 * mass,
        ),
        FixtureName::Kerr { mass, spin } => (Metric4::new(field(move |x| kerr_components(mass, spin, x))), 2.0 * mass),
    };
    let scale = match name {
        FixtureName::Minkowski => 1.0,
        _ => 1.5 * excluded,
    };
    Ok(Fixture {
        name,
        projection: metric.projection(),
        stationary: metric.stationary(),
        metric,
        excluded_radius: excluded,
        scale,
    })
}

impl Fixture {
    pub fn probe_annulus(&self) -> (f64, f64) {
        (1.1 * self.scale, 5.0 * self.scale)
    }

    /// Radius of the coordinate sphere used as ∂M.
    pub fn boundary_radius(&self) -> f64 {
        self.scale
    }

    pub fn check_point(&self, x: &Point) -> Result<(), GeoError> {
        let r = x.norm();
        let needed = match self.name {
            FixtureName::Minkowski => self.excluded_radius,
            _ => 1.5 * self.excluded_radius,
        };
        if r < needed {
            return Err(GeoError::InsideExcluded {
                radius: r,
                required: needed,
            });
        }
        Ok(())
    }

    /// Seeded probe points in the annulus, away from the polar axis (|cos θ| ≤ 0.8).
    pub fn probe_points(&self, seed: u64, count: usize) -> Vec<Point> {
        let (lo, hi) = self.probe_annulus();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut out = Vec::with_capacity(count);
        while out.len() < count {
            let cos: f64 = rng.gen_range(-0.8..=0.8);
            let phi: f64 = rng.gen_range(0.0..std::f64::consts::TAU);
            let r: f64 = rng.gen_range(lo..=hi);
            let s = (1.0 - cos * cos).sqrt();
            out.push(Point::new(r * s * phi.cos(), r * s * phi.sin(), r * cos));
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_names() {
        assert_eq!(
            "kerr".parse::<FixtureName>().unwrap(),
            FixtureName::Kerr { mass: 1.0, spin: 0.5 }
        );
        assert_eq!(
            "kerr:2,0.3".parse::<FixtureName>().unwrap(),
            FixtureName::Kerr { mass: 2.0, spin: 0.3 }
        );
        assert!("kerr:1,1.5".parse::<FixtureName>().is_err());
        assert!("sitter".parse::<FixtureName>().is_err());
    }

    #[test]
    fn minkowski_projection_data() {
        let f = fixture(FixtureName::Minkowski).unwrap();
        let x = Point::new(1.2, -0.5, 0.9);
        assert_eq!((f.projection.u)(&x), 1.0);
        assert_eq!((f.projection.theta)(&x), Vector3::zeros());
        assert_eq!((f.projection.g_s)(&x), nalgebra::Matrix3::identity());
    }

    #[test]
    fn kerr_without_spin_is_schwarzschild() {
        let k = fixture(FixtureName::Kerr { mass: 1.0, spin: 0.0 }).unwrap();
        let s = fixture(FixtureName::Schwarzschild { mass: 1.0 }).unwrap();
        for p in k.probe_points(3, 20) {
            assert!((k.metric.at(&p) - s.metric.at(&p)).norm() < 1e-12);
        }
    }

    #[test]
    fn kerr_twists_and_schwarzschild_does_not() {
        let k = fixture(FixtureName::Kerr { mass: 1.0, spin: 0.5 }).unwrap();
        let s = fixture(FixtureName::Schwarzschild { mass: 1.0 }).unwrap();
        let p = Point::new(4.0, 1.0, 2.0);
        assert!((s.projection.theta)(&p).norm() == 0.0);
        assert!((k.projection.theta)(&p).norm() > 1e-3);
    }

    #[test]
    fn probes_in_annulus_off_axis() {
        let k = fixture(FixtureName::Kerr { mass: 1.0, spin: 0.5 }).unwrap();
        for p in k.probe_points(11, 50) {
            let r = p.norm();
            assert!((3.3..=15.0).contains(&r));
            assert!((p[2] / r).abs() <= 0.8 + 1e-12);
            k.check_point(&p).unwrap();
            k.metric.check_lorentzian(&p).unwrap();
        }
        assert!(k.check_point(&Point::new(2.5, 0.0, 0.0)).is_err());
    }
}
