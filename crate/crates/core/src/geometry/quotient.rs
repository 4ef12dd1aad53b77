//! Calculus on the orbit space (S, g_S) of a stationary metric.

use nalgebra::{Matrix3, Vector3, Vector4};

use super::fd::{FdConfig, Jet, Point};
use super::metric::{Field, ProjectionTriple};
use super::tensor::split_vector;

/// Γ[k][(i, j)] = Γᵏ_ij for a Riemannian 3-metric, with first derivatives.
pub struct Connection3 {
    pub g: Matrix3<f64>,
    pub ginv: Matrix3<f64>,
    pub gamma: [Matrix3<f64>; 3],
    /// dgamma[l][k] = ∂ₗΓᵏ
    pub dgamma: [[Matrix3<f64>; 3]; 3],
}

pub fn connection3(jet: &Jet<Matrix3<f64>>) -> Connection3 {
    let g = jet.value;
    let ginv = g.try_inverse().unwrap_or_else(|| Matrix3::from_element(f64::NAN));
    let low = |d: &[Matrix3<f64>; 3], e: usize, a: usize, b: usize| 0.5 * (d[a][(e, b)] + d[b][(e, a)] - d[e][(a, b)]);
    let mut gamma = [Matrix3::zeros(); 3];
    for k in 0..3 {
        for a in 0..3 {
            for b in 0..3 {
                gamma[k][(a, b)] = (0..3).map(|e| ginv[(k, e)] * low(&jet.d, e, a, b)).sum();
            }
        }
    }
    let mut dgamma = [[Matrix3::zeros(); 3]; 3];
    for l in 0..3 {
        let dginv = -ginv * jet.d[l] * ginv;
        for k in 0..3 {
            for a in 0..3 {
                for b in 0..3 {
                    dgamma[l][k][(a, b)] = (0..3)
                        .map(|e| dginv[(k, e)] * low(&jet.d, e, a, b) + ginv[(k, e)] * low(&jet.dd[l], e, a, b))
                        .sum();
                }
            }
        }
    }
    Connection3 { g, ginv, gamma, dgamma }
}

impl Connection3 {
    pub fn ricci(&self) -> Matrix3<f64> {
        let mut ric = Matrix3::zeros();
        for b in 0..3 {
            for c in 0..3 {
                let mut s = 0.0;
                for a in 0..3 {
                    s += self.dgamma[a][a][(b, c)] - self.dgamma[c][a][(a, b)];
                    for d in 0..3 {
                        s += self.gamma[a][(a, d)] * self.gamma[d][(b, c)]
                            - self.gamma[a][(c, d)] * self.gamma[d][(a, b)];
                    }
                }
                ric[(b, c)] = s;
            }
        }
        ric
    }

    /// Hessian D²f.
    pub fn hessian(&self, f: &Jet<f64>) -> Matrix3<f64> {
        Matrix3::from_fn(|i, j| f.dd[i][j] - (0..3).map(|k| self.gamma[k][(i, j)] * f.d[k]).sum::<f64>())
    }

    /// Δf = −tr D²f.
    pub fn laplacian(&self, f: &Jet<f64>) -> f64 {
        -(self.ginv.component_mul(&self.hessian(f))).sum()
    }

    pub fn raise(&self, w: &Vector3<f64>) -> Vector3<f64> {
        self.ginv * w
    }

    pub fn gradient(&self, f: &Jet<f64>) -> Vector3<f64> {
        self.ginv * Vector3::from(f.d)
    }

    /// (∇ᵢY)ʲ indexed (i, j).
    pub fn nabla_vector(&self, y: &Jet<Vector3<f64>>) -> Matrix3<f64> {
        Matrix3::from_fn(|i, j| y.d[i][j] + (0..3).map(|k| self.gamma[j][(i, k)] * y.value[k]).sum::<f64>())
    }

    /// ∇*∇Y = −g^{ij}(∇²Y)_ij.
    pub fn rough_laplacian(&self, y: &Jet<Vector3<f64>>) -> Vector3<f64> {
        let nabla = self.nabla_vector(y);
        Vector3::from_fn(|a, _| {
            let mut s = 0.0;
            for m in 0..3 {
                for n in 0..3 {
                    let mut v = y.dd[m][n][a];
                    for b in 0..3 {
                        v += self.dgamma[m][a][(n, b)] * y.value[b] + self.gamma[a][(n, b)] * y.d[m][b];
                        v += self.gamma[a][(m, b)] * nabla[(n, b)] - self.gamma[b][(m, n)] * nabla[(b, a)];
                    }
                    s += self.ginv[(m, n)] * v;
                }
            }
            -s
        })
    }

    pub fn sqrt_det(&self) -> f64 {
        self.g.determinant().sqrt()
    }

    /// Inner product of 2-forms, ½ F_ij G^ij.
    pub fn form_inner(&self, f: &Matrix3<f64>, h: &Matrix3<f64>) -> f64 {
        0.5 * (self.ginv * f * self.ginv).component_mul(h).sum()
    }

    /// (⋆F)ₖ = ½ √det g ε_ijk F^ij
    pub fn hodge(&self, f: &Matrix3<f64>) -> Vector3<f64> {
        let up = self.ginv * f * self.ginv;
        let s = self.sqrt_det();
        Vector3::new(up[(1, 2)], up[(2, 0)], up[(0, 1)]) * s
    }

    /// (δF)ⱼ = −∇ⁱF_ij, given F and its partial derivatives dF[k] = ∂ₖF.
    pub fn codifferential2(&self, f: &Matrix3<f64>, df: &[Matrix3<f64>; 3]) -> Vector3<f64> {
        Vector3::from_fn(|j, _| {
            let mut s = 0.0;
            for i in 0..3 {
                for k in 0..3 {
                    let mut cov = df[k][(i, j)];
                    for l in 0..3 {
                        cov -= self.gamma[l][(k, i)] * f[(l, j)] + self.gamma[l][(k, j)] * f[(i, l)];
                    }
                    s += self.ginv[(i, k)] * cov;
                }
            }
            -s
        })
    }

    /// δw = −∇ⁱwᵢ for a 1-form with partials dw[k] = ∂ₖw.
    pub fn codifferential1(&self, w: &Vector3<f64>, dw: &[Vector3<f64>; 3]) -> f64 {
        let mut s = 0.0;
        for i in 0..3 {
            for k in 0..3 {
                let cov = dw[k][i] - (0..3).map(|l| self.gamma[l][(k, i)] * w[l]).sum::<f64>();
                s += self.ginv[(i, k)] * cov;
            }
        }
        -s
    }
}

/// F = dθ from the jet of θ, with ∂ₖF.
pub fn exterior_derivative(theta: &Jet<Vector3<f64>>) -> (Matrix3<f64>, [Matrix3<f64>; 3]) {
    let f = Matrix3::from_fn(|i, j| theta.d[i][j] - theta.d[j][i]);
    let df = std::array::from_fn(|k| Matrix3::from_fn(|i, j| theta.dd[k][i][j] - theta.dd[k][j][i]));
    (f, df)
}

/// ι_v F as a 1-form: vⁱ F_ij.
pub fn contract(v: &Vector3<f64>, f: &Matrix3<f64>) -> Vector3<f64> {
    f.transpose() * v
}

/// Jets of the projection data at a point.
pub struct QuotientPoint {
    pub conn: Connection3,
    pub u: Jet<f64>,
    pub theta: Jet<Vector3<f64>>,
    pub dtheta: Matrix3<f64>,
    pub d_dtheta: [Matrix3<f64>; 3],
}

impl QuotientPoint {
    pub fn new(p: &ProjectionTriple, x: &Point, fd: &FdConfig) -> Self {
        let gs = Jet::of(&*p.g_s, x, fd);
        let u = Jet::of(&*p.u, x, fd);
        let theta = Jet::of(&*p.theta, x, fd);
        let (dtheta, d_dtheta) = exterior_derivative(&theta);
        QuotientPoint {
            conn: connection3(&gs),
            u,
            theta,
            dtheta,
            d_dtheta,
        }
    }

    pub fn grad_u(&self) -> Vector3<f64> {
        self.conn.gradient(&self.u)
    }

    /// ω = −½u³⋆dθ
    pub fn twist(&self) -> Vector3<f64> {
        self.conn.hodge(&self.dtheta) * (-0.5 * self.u.value.powi(3))
    }

    /// |dθ|² as a 2-form norm.
    pub fn dtheta_norm_sq(&self) -> f64 {
        self.conn.form_inner(&self.dtheta, &self.dtheta)
    }
}

/// Twist 1-form as a field, for differentiating.
pub fn twist_field(p: &ProjectionTriple, fd: FdConfig) -> Field<Vector3<f64>> {
    let p = p.clone();
    std::sync::Arc::new(move |x: &Point| {
        let theta = Jet::first_order(&*p.theta, x, &fd);
        let f = Matrix3::from_fn(|i, j| theta.d[i][j] - theta.d[j][i]);
        let g = (p.g_s)(x);
        let ginv = g.try_inverse().unwrap_or_else(|| Matrix3::from_element(f64::NAN));
        let up = ginv * f * ginv;
        let star = Vector3::new(up[(1, 2)], up[(2, 0)], up[(0, 1)]) * g.determinant().sqrt();
        star * (-0.5 * (p.u)(x).powi(3))
    })
}

/// Right-hand sides of the orbit-space decomposition of ∇*∇Y (= 2βδ*Y in vacuum): the
/// horizontal part and the scalar line, which equals −(∇*∇Y)^⊥.
///
/// The scalar line is −uΔ(Y^⊥/u) + 3⟨∇(Y^⊥/u), ∇u⟩ + u⟨dθ, ∇Yᵀ⟩. `extra_terms` holds
/// −¼u²Y^⊥|dθ|² − dθ(∇u, Yᵀ), which a competing form of the scalar line adds.
#[derive(Clone, Copy, Debug)]
pub struct QuotientRhs {
    pub horizontal: Vector3<f64>,
    pub perp_line: f64,
    pub extra_terms: f64,
}

pub fn quotient_bianchi_rhs(
    p: &ProjectionTriple,
    y: &dyn Fn(&Point) -> Vector4<f64>,
    x: &Point,
    fd: &FdConfig,
) -> QuotientRhs {
    let q = QuotientPoint::new(p, x, fd);
    let c = &q.conn;
    let yt_field = |z: &Point| split_vector(p, &y(z), z).0;
    let ratio_field = |z: &Point| {
        let (_, perp) = split_vector(p, &y(z), z);
        perp / (p.u)(z)
    };
    let yt = Jet::of(&yt_field, x, fd);
    let ratio = Jet::of(&ratio_field, x, fd);
    let u = q.u.value;
    let du = Vector3::from(q.u.d);
    let grad_u = q.grad_u();
    let f = &q.dtheta;
    let nabla_yt = c.nabla_vector(&yt);
    let along_grad_u = nabla_yt.transpose() * grad_u;
    let iy = c.raise(&contract(&yt.value, f));
    let iiy = c.raise(&contract(&iy, f));
    let grad_ratio = c.gradient(&ratio);
    let i_ratio = c.raise(&contract(&grad_ratio, f));
    let horizontal = c.rough_laplacian(&yt) + grad_u * (yt.value.dot(&du) / (u * u)) - along_grad_u / u
        + iiy * (0.5 * u * u)
        - i_ratio * (u * u);

    // ⟨dθ, ∇Yᵀ⟩ = F^{ij} ∇ᵢYⱼ
    let nabla_low = nabla_yt * c.g;
    let f_up = c.ginv * f * c.ginv;
    let pairing = f_up.component_mul(&nabla_low).sum();
    let perp_line = -u * c.laplacian(&ratio) + 3.0 * grad_ratio.dot(&du) + u * pairing;
    let extra_terms = -0.25 * u.powi(3) * ratio.value * q.dtheta_norm_sq() - grad_u.dot(&(f * yt.value));
    QuotientRhs {
        horizontal,
        perp_line,
        extra_terms,
    }
}

/// Residuals of the projected vacuum equations at one point.
#[derive(Clone, Copy, Debug, Default)]
pub struct VacuumProjectionResiduals {
    pub ricci: f64,
    pub laplace_u: f64,
    pub twist_divergence: f64,
    pub twist_closed: f64,
    pub dtheta_codifferential: f64,
    pub laplace_u_dtheta: f64,
    pub killing_acceleration: f64,
}

impl VacuumProjectionResiduals {
    pub fn max(&self) -> f64 {
        [
            self.ricci,
            self.laplace_u,
            self.twist_divergence,
            self.twist_closed,
            self.dtheta_codifferential,
            self.laplace_u_dtheta,
            self.killing_acceleration,
        ]
        .into_iter()
        .fold(0.0, f64::max)
    }
}

pub fn vacuum_projection_residuals(
    p: &ProjectionTriple,
    gamma4_tt: &Vector4<f64>,
    x: &Point,
    fd: &FdConfig,
) -> VacuumProjectionResiduals {
    let q = QuotientPoint::new(p, x, fd);
    let c = &q.conn;
    let u = q.u.value;
    let omega_field = twist_field(p, *fd);
    let omega = omega_field(x);
    let domega: [Vector3<f64>; 3] = fd.gradient(&*omega_field, x);
    let omega_sq = omega.dot(&c.raise(&omega));
    let hess_u = c.hessian(&q.u);
    let lap_u = c.laplacian(&q.u);

    let ric = c.ricci() - hess_u / u - (omega * omega.transpose() - c.g * omega_sq) * (2.0 / u.powi(4));
    let lap = lap_u - 2.0 * omega_sq / u.powi(3);
    let du = Vector3::from(q.u.d);
    let div = c.codifferential1(&omega, &domega) + 3.0 / u * du.dot(&c.raise(&omega));
    let curl = Matrix3::from_fn(|i, j| domega[i][j] - domega[j][i]);
    let grad_u = q.grad_u();
    let codiff = c.codifferential2(&q.dtheta, &q.d_dtheta) * u - contract(&grad_u, &q.dtheta) * 3.0;
    let lap2 = lap_u - 0.5 * u.powi(3) * q.dtheta_norm_sq();
    let lifted = p.lift(x, &grad_u) * u;
    let accel = gamma4_tt - lifted;
    VacuumProjectionResiduals {
        ricci: ric.abs().max(),
        laplace_u: lap.abs(),
        twist_divergence: div.abs(),
        twist_closed: curl.abs().max(),
        dtheta_codifferential: codiff.abs().max(),
        laplace_u_dtheta: lap2.abs(),
        killing_acceleration: accel.abs().max(),
    }
}

/// (L_Y h)ᵢⱼ on S for a symmetric 2-tensor field h.
pub fn lie_derivative3(
    h: &dyn Fn(&Point) -> Matrix3<f64>,
    y: &dyn Fn(&Point) -> Vector3<f64>,
    x: &Point,
    fd: &FdConfig,
) -> Matrix3<f64> {
    let hv = h(x);
    let yv = y(x);
    let dh = fd.gradient(h, x);
    let dy = fd.gradient(y, x);
    Matrix3::from_fn(|i, j| {
        (0..3)
            .map(|k| yv[k] * dh[k][(i, j)] + hv[(k, j)] * dy[i][k] + hv[(i, k)] * dy[j][k])
            .sum::<f64>()
    })
}
