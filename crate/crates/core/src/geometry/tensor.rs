//! Connection, curvature and first-order operators of a stationary 4-metric.

use nalgebra::{Matrix3, Matrix4, Vector3, Vector4};

use super::fd::{FdConfig, Jet, Point};
use super::metric::{Metric4, ProjectionTriple};

/// Γ[a][(b, c)] = Γᵃ_bc.
pub type Gamma4 = [Matrix4<f64>; 4];

/// Levi-Civita connection at a point together with its first derivatives.
pub struct Connection4 {
    pub g: Matrix4<f64>,
    pub ginv: Matrix4<f64>,
    pub gamma: Gamma4,
    /// dgamma[k][a] = ∂ₖΓᵃ (∂₀ = 0).
    pub dgamma: [Gamma4; 4],
}

fn lift_derivs(jet: &Jet<Matrix4<f64>>) -> ([Matrix4<f64>; 4], [[Matrix4<f64>; 4]; 4]) {
    let z = Matrix4::zeros();
    let mut d = [z; 4];
    let mut dd = [[z; 4]; 4];
    for i in 0..3 {
        d[i + 1] = jet.d[i];
        for j in 0..3 {
            dd[i + 1][j + 1] = jet.dd[i][j];
        }
    }
    (d, dd)
}

pub fn connection(g: &Metric4, x: &Point) -> Connection4 {
    connection_from_jet(&g.jet(x))
}

pub fn connection_from_jet(jet: &Jet<Matrix4<f64>>) -> Connection4 {
    let g = jet.value;
    let ginv = g.try_inverse().unwrap_or_else(|| Matrix4::from_element(f64::NAN));
    let (d, dd) = lift_derivs(jet);
    // lowered symbols [d; b c] and their derivatives
    let low = |d: &[Matrix4<f64>; 4], dd: &[Matrix4<f64>; 4], e: usize, b: usize, c: usize| {
        0.5 * (d[b][(e, c)] + d[c][(e, b)] - dd[e][(b, c)])
    };
    let mut gamma = [Matrix4::zeros(); 4];
    for a in 0..4 {
        for b in 0..4 {
            for c in 0..4 {
                gamma[a][(b, c)] = (0..4).map(|e| ginv[(a, e)] * low(&d, &d, e, b, c)).sum();
            }
        }
    }
    let mut dgamma = [[Matrix4::zeros(); 4]; 4];
    for k in 1..4 {
        let dginv = -ginv * d[k] * ginv;
        for a in 0..4 {
            for b in 0..4 {
                for c in 0..4 {
                    dgamma[k][a][(b, c)] = (0..4)
                        .map(|e| dginv[(a, e)] * low(&d, &d, e, b, c) + ginv[(a, e)] * low(&dd[k], &dd[k], e, b, c))
                        .sum();
                }
            }
        }
    }
    Connection4 { g, ginv, gamma, dgamma }
}

pub struct Curvature {
    pub gamma: Gamma4,
    pub ricci: Matrix4<f64>,
}

/// Rᵦ꜀ = ∂ₐΓᵃ_bc − ∂꜀Γᵃ_ab + Γᵃ_ad Γᵈ_bc − Γᵃ_cd Γᵈ_ab
pub fn ricci_of(c: &Connection4) -> Matrix4<f64> {
    let mut ric = Matrix4::zeros();
    for b in 0..4 {
        for cc in 0..4 {
            let mut s = 0.0;
            for a in 0..4 {
                s += c.dgamma[a][a][(b, cc)] - c.dgamma[cc][a][(a, b)];
                for d in 0..4 {
                    s += c.gamma[a][(a, d)] * c.gamma[d][(b, cc)] - c.gamma[a][(cc, d)] * c.gamma[d][(a, b)];
                }
            }
            ric[(b, cc)] = s;
        }
    }
    ric
}

pub fn curvature(g: &Metric4, x: &Point) -> Curvature {
    let c = connection(g, x);
    Curvature {
        ricci: ricci_of(&c),
        gamma: c.gamma,
    }
}

/// Spatial derivatives of a t-independent field, padded with ∂₀ = 0.
fn pad<T: Copy>(zero: T, d: [T; 3]) -> [T; 4] {
    [zero, d[0], d[1], d[2]]
}

/// (L_Y h)_μν = Yᵅ∂ₐh_μν + h_αν ∂_μYᵅ + h_μα ∂_νYᵅ for t-independent h and Y.
pub fn lie_derivative(
    h: &dyn Fn(&Point) -> Matrix4<f64>,
    y: &dyn Fn(&Point) -> Vector4<f64>,
    x: &Point,
    fd: &FdConfig,
) -> Matrix4<f64> {
    let hv = h(x);
    let yv = y(x);
    let dh = pad(Matrix4::zeros(), fd.gradient(h, x));
    let dy = pad(Vector4::zeros(), fd.gradient(y, x));
    let mut out = Matrix4::zeros();
    for m in 0..4 {
        for n in 0..4 {
            let mut s = 0.0;
            for a in 0..4 {
                s += yv[a] * dh[a][(m, n)] + hv[(a, n)] * dy[m][a] + hv[(m, a)] * dy[n][a];
            }
            out[(m, n)] = s;
        }
    }
    out
}

/// δ*Y = ½ L_Y g.
pub fn delta_star(g: &Metric4, y: &dyn Fn(&Point) -> Vector4<f64>, x: &Point) -> Matrix4<f64> {
    lie_derivative(&*g.components, y, x, &g.fd) * 0.5
}

/// β_g h = δ_g h + ½ d tr_g h with δ = −tr∇. Returned as a covector.
pub fn bianchi(g: &Metric4, h: &dyn Fn(&Point) -> Matrix4<f64>, x: &Point) -> Vector4<f64> {
    let c = connection(g, x);
    let hv = h(x);
    let dh = pad(Matrix4::zeros(), g.fd.gradient(h, x));
    let ginv_at = |p: &Point| g.at(p).try_inverse().unwrap_or_else(|| Matrix4::from_element(f64::NAN));
    let tr = |p: &Point| (ginv_at(p) * h(p)).trace();
    let dtr = pad(0.0, g.fd.gradient(&tr, x));
    let mut out = Vector4::zeros();
    for n in 0..4 {
        let mut div = 0.0;
        for m in 0..4 {
            for a in 0..4 {
                let mut cov = dh[m][(a, n)];
                for b in 0..4 {
                    cov -= c.gamma[b][(m, a)] * hv[(b, n)] + c.gamma[b][(m, n)] * hv[(a, b)];
                }
                div += c.ginv[(m, a)] * cov;
            }
        }
        out[n] = -div + 0.5 * dtr[n];
    }
    out
}

/// (∇_μY)ᵛ as a matrix indexed (μ, ν).
pub fn covariant_derivative(c: &Connection4, y: &Jet<Vector4<f64>>) -> Matrix4<f64> {
    let dy = pad(Vector4::zeros(), y.d);
    let mut out = Matrix4::zeros();
    for m in 0..4 {
        for n in 0..4 {
            out[(m, n)] = dy[m][n] + (0..4).map(|b| c.gamma[n][(m, b)] * y.value[b]).sum::<f64>();
        }
    }
    out
}

/// ∇*∇Y = −g^{μν}(∇²Y)_{μν}.
pub fn rough_laplacian(c: &Connection4, y: &Jet<Vector4<f64>>) -> Vector4<f64> {
    let dy = pad(Vector4::zeros(), y.d);
    let mut ddy = [[Vector4::zeros(); 4]; 4];
    for i in 0..3 {
        for j in 0..3 {
            ddy[i + 1][j + 1] = y.dd[i][j];
        }
    }
    let nabla = covariant_derivative(c, y);
    let mut out = Vector4::zeros();
    for a in 0..4 {
        let mut s = 0.0;
        for m in 0..4 {
            for n in 0..4 {
                if c.ginv[(m, n)] == 0.0 {
                    continue;
                }
                // ∂_μ(∇_νY)ᵅ
                let mut v = ddy[m][n][a];
                for b in 0..4 {
                    v += c.dgamma[m][a][(n, b)] * y.value[b] + c.gamma[a][(n, b)] * dy[m][b];
                }
                for b in 0..4 {
                    v += c.gamma[a][(m, b)] * nabla[(n, b)] - c.gamma[b][(m, n)] * nabla[(b, a)];
                }
                s += c.ginv[(m, n)] * v;
            }
        }
        out[a] = -s;
    }
    out
}

/// Y = Yᵀ − (Y^⊥/u)∂_t with ⟨Yᵀ, ∂_t⟩ = 0. Returns (Yᵀ on S, Y^⊥).
pub fn split_vector(p: &ProjectionTriple, y: &Vector4<f64>, x: &Point) -> (Vector3<f64>, f64) {
    let g = p.components_at(x);
    let u = (p.u)(x);
    let perp = (g * y)[0] / u;
    (Vector3::new(y[1], y[2], y[3]), perp)
}

pub fn recompose_vector(p: &ProjectionTriple, yt: &Vector3<f64>, perp: f64, x: &Point) -> Vector4<f64> {
    let u = (p.u)(x);
    let mut y = p.lift(x, yt);
    y[0] -= perp / u;
    y
}

/// Blocks of L_Y(dt + θ)²: the (∂_t, ∂_t) value, the mixed part paired with horizontal lifts
/// of ∂ᵢ, and the horizontal block.
#[derive(Clone, Copy, Debug)]
pub struct LieAlphaBlocks {
    pub tt: f64,
    pub mixed: Vector3<f64>,
    pub horizontal: Matrix3<f64>,
}

pub fn horizontal_blocks(p: &ProjectionTriple, t: &Matrix4<f64>, x: &Point) -> LieAlphaBlocks {
    let lifts: [Vector4<f64>; 3] = std::array::from_fn(|i| p.lift(x, &Vector3::ith(i, 1.0)));
    let e0 = Vector4::new(1.0, 0.0, 0.0, 0.0);
    LieAlphaBlocks {
        tt: (e0.transpose() * t * e0)[0],
        mixed: Vector3::from_fn(|i, _| (e0.transpose() * t * lifts[i])[0]),
        horizontal: Matrix3::from_fn(|i, j| (lifts[i].transpose() * t * lifts[j])[0]),
    }
}

pub fn alpha_squared(p: &ProjectionTriple, x: &Point) -> Matrix4<f64> {
    let th = (p.theta)(x);
    let a = Vector4::new(1.0, th[0], th[1], th[2]);
    a * a.transpose()
}

pub fn lie_alpha_squared(
    p: &ProjectionTriple,
    y: &dyn Fn(&Point) -> Vector4<f64>,
    x: &Point,
    fd: &FdConfig,
) -> LieAlphaBlocks {
    let l = lie_derivative(&|q: &Point| alpha_squared(p, q), y, x, fd);
    horizontal_blocks(p, &l, x)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::fixtures::{fixture, FixtureName};
    use crate::geometry::metric::field;

    #[test]
    fn minkowski_is_flat() {
        let f = fixture(FixtureName::Minkowski).unwrap();
        let c = curvature(&f.metric, &Point::new(1.5, 0.3, -0.2));
        assert!(c.gamma.iter().all(|m| m.norm() < 1e-14));
        assert!(c.ricci.norm() < 1e-14);
    }

    #[test]
    fn schwarzschild_radial_acceleration() {
        let m = 1.0;
        let f = fixture(FixtureName::Schwarzschild { mass: m }).unwrap();
        let x = Point::new(3.0, 2.0, 1.5);
        let r = x.norm();
        let c = curvature(&f.metric, &x);
        let radial: f64 = (0..3).map(|i| c.gamma[i + 1][(0, 0)] * x[i] / r).sum();
        let want = m * (1.0 - 2.0 * m / r) / (r * r);
        assert!((radial - want).abs() < 1e-8, "{radial} {want}");
        assert!(c.ricci.abs().max() < 1e-6);
    }

    #[test]
    fn bianchi_of_metric_itself_vanishes() {
        let f = fixture(FixtureName::Kerr { mass: 1.0, spin: 0.5 }).unwrap();
        let x = Point::new(4.0, -1.0, 2.0);
        let b = bianchi(&f.metric, &*f.metric.components, &x);
        assert!(b.norm() < 1e-8);
    }

    #[test]
    fn rotation_is_killing_on_minkowski() {
        let f = fixture(FixtureName::Minkowski).unwrap();
        let rot = |x: &Point| Vector4::new(0.0, -x[1], x[0], 0.0);
        let d = delta_star(&f.metric, &rot, &Point::new(1.0, 2.0, 0.5));
        assert!(d.norm() < 1e-10);
    }

    #[test]
    fn split_of_time_translation() {
        let f = fixture(FixtureName::Kerr { mass: 1.0, spin: 0.5 }).unwrap();
        let x = Point::new(4.0, 1.0, 1.0);
        let u = (f.projection.u)(&x);
        let (yt, perp) = split_vector(&f.projection, &Vector4::new(1.0, 0.0, 0.0, 0.0), &x);
        assert!(yt.norm() < 1e-15);
        assert!((perp + u).abs() < 1e-12);
        let y = Vector4::new(0.3, -0.2, 0.5, 0.1);
        let (yt, perp) = split_vector(&f.projection, &y, &x);
        assert!((recompose_vector(&f.projection, &yt, perp, &x) - y).norm() < 1e-12);
        let h = f.projection.lift(&x, &Vector3::new(1.0, 2.0, 3.0));
        let (ht, hp) = split_vector(&f.projection, &h, &x);
        assert!(hp.abs() < 1e-12 && (ht - Vector3::new(1.0, 2.0, 3.0)).norm() < 1e-15);
    }

    #[test]
    fn time_translation_leaves_alpha_squared() {
        let f = fixture(FixtureName::Kerr { mass: 1.0, spin: 0.5 }).unwrap();
        let dt = field(|_| Vector4::new(1.0, 0.0, 0.0, 0.0));
        let b = lie_alpha_squared(&f.projection, &*dt, &Point::new(4.0, 1.0, 1.0), &f.metric.fd);
        assert!(b.tt.abs() < 1e-14 && b.mixed.norm() < 1e-14 && b.horizontal.norm() < 1e-14);
    }
}
