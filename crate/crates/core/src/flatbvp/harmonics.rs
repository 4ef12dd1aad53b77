//! Real spherical harmonics, decaying solid harmonics r^{−(l+1)}Y_lm and sphere quadrature.

use std::collections::BTreeMap;
use std::f64::consts::PI;

use nalgebra::{DMatrix, Matrix3, Rotation3, Vector3};

use super::FlatError;

/// Position of (l, m) in a coefficient array.
pub fn sh_index(l: usize, m: i64) -> usize {
    l * l + (l as i64 + m) as usize
}

/// (l, m) at a coefficient index.
pub fn sh_degree_order(i: usize) -> (usize, i64) {
    let l = (i as f64).sqrt().floor() as usize;
    let l = if (l + 1) * (l + 1) <= i { l + 1 } else { l };
    (l, i as i64 - (l * l + l) as i64)
}

pub fn sh_count(lmax: usize) -> usize {
    (lmax + 1) * (lmax + 1)
}

/// Homogeneous polynomial in (x, y, z) with real coefficients.
#[derive(Clone, Debug, Default)]
pub struct Poly3 {
    terms: BTreeMap<[u32; 3], f64>,
}

impl Poly3 {
    pub fn one() -> Self {
        let mut terms = BTreeMap::new();
        terms.insert([0, 0, 0], 1.0);
        Poly3 { terms }
    }

    fn zero() -> Self {
        Poly3::default()
    }

    fn add_scaled(&mut self, other: &Poly3, s: f64) {
        for (k, v) in &other.terms {
            *self.terms.entry(*k).or_insert(0.0) += v * s;
        }
    }

    fn times_var(&self, var: usize) -> Poly3 {
        let mut out = Poly3::zero();
        for (k, v) in &self.terms {
            let mut e = *k;
            e[var] += 1;
            out.terms.insert(e, *v);
        }
        out
    }

    fn times_r2(&self) -> Poly3 {
        let mut out = self.times_var(0).times_var(0);
        out.add_scaled(&self.times_var(1).times_var(1), 1.0);
        out.add_scaled(&self.times_var(2).times_var(2), 1.0);
        out
    }

    fn scaled(mut self, s: f64) -> Poly3 {
        self.terms.values_mut().for_each(|v| *v *= s);
        self
    }

    pub fn derivative(&self, var: usize) -> Poly3 {
        let mut out = Poly3::zero();
        for (k, v) in &self.terms {
            if k[var] > 0 {
                let mut e = *k;
                e[var] -= 1;
                *out.terms.entry(e).or_insert(0.0) += v * k[var] as f64;
            }
        }
        out
    }

    pub fn eval(&self, x: &Vector3<f64>) -> f64 {
        self.terms
            .iter()
            .map(|(k, v)| v * x[0].powi(k[0] as i32) * x[1].powi(k[1] as i32) * x[2].powi(k[2] as i32))
            .sum()
    }
}

fn factorial_ratio(l: usize, m: usize) -> f64 {
    // (l − m)! / (l + m)!
    ((l - m + 1)..=(l + m)).fold(1.0, |acc, k| acc / k as f64)
}

/// Regular solid harmonic rˡY_lm (orthonormal real Y_lm on the unit sphere) with its first and
/// second partial derivatives as polynomials.
#[derive(Clone, Debug)]
pub struct SolidHarmonic {
    pub l: usize,
    pub m: i64,
    pub value: Poly3,
    pub grad: [Poly3; 3],
    pub hess: [[Poly3; 3]; 3],
}

/// All regular solid harmonics up to degree `lmax`, indexed by `sh_index`.
pub fn solid_harmonics(lmax: usize) -> Vec<SolidHarmonic> {
    // c[l][m], s[l][m]: unnormalized rˡ P_l^m(cos θ) cos(mφ), sin(mφ)
    let mut c = vec![vec![Poly3::zero(); lmax + 1]; lmax + 1];
    let mut s = vec![vec![Poly3::zero(); lmax + 1]; lmax + 1];
    c[0][0] = Poly3::one();
    for m in 0..lmax {
        let f = (2 * m + 1) as f64;
        let mut cn = c[m][m].times_var(0);
        cn.add_scaled(&s[m][m].times_var(1), -1.0);
        let mut sn = c[m][m].times_var(1);
        sn.add_scaled(&s[m][m].times_var(0), 1.0);
        c[m + 1][m + 1] = cn.scaled(f);
        s[m + 1][m + 1] = sn.scaled(f);
    }
    for m in 0..=lmax {
        for l in m..lmax {
            let mut cn = c[l][m].times_var(2).scaled((2 * l + 1) as f64);
            let mut sn = s[l][m].times_var(2).scaled((2 * l + 1) as f64);
            if l > m {
                cn.add_scaled(&c[l - 1][m].times_r2(), -((l + m) as f64));
                sn.add_scaled(&s[l - 1][m].times_r2(), -((l + m) as f64));
            }
            let d = (l - m + 1) as f64;
            c[l + 1][m] = cn.scaled(1.0 / d);
            s[l + 1][m] = sn.scaled(1.0 / d);
        }
    }
    let mut out = Vec::with_capacity(sh_count(lmax));
    for l in 0..=lmax {
        for m in -(l as i64)..=(l as i64) {
            let am = m.unsigned_abs() as usize;
            let mut norm = ((2 * l + 1) as f64 / (4.0 * PI) * factorial_ratio(l, am)).sqrt();
            if m != 0 {
                norm *= 2f64.sqrt();
            }
            let value = if m >= 0 { c[l][am].clone() } else { s[l][am].clone() }.scaled(norm);
            let grad: [Poly3; 3] = std::array::from_fn(|i| value.derivative(i));
            let hess = std::array::from_fn(|i| std::array::from_fn(|j| grad[i].derivative(j)));
            out.push(SolidHarmonic {
                l,
                m,
                value,
                grad,
                hess,
            });
        }
    }
    out
}

/// Value, gradient and Hessian of a scalar field at a point.
#[derive(Clone, Copy, Debug)]
pub struct ScalarJet {
    pub value: f64,
    pub grad: Vector3<f64>,
    pub hess: Matrix3<f64>,
}

impl ScalarJet {
    pub fn zero() -> Self {
        ScalarJet {
            value: 0.0,
            grad: Vector3::zeros(),
            hess: Matrix3::zeros(),
        }
    }

    pub fn scaled(&self, s: f64) -> Self {
        ScalarJet {
            value: self.value * s,
            grad: self.grad * s,
            hess: self.hess * s,
        }
    }

    pub fn add(&self, o: &ScalarJet) -> Self {
        ScalarJet {
            value: self.value + o.value,
            grad: self.grad + o.grad,
            hess: self.hess + o.hess,
        }
    }
}

impl SolidHarmonic {
    /// Y_lm at a unit vector.
    pub fn on_sphere(&self, n: &Vector3<f64>) -> f64 {
        self.value.eval(n)
    }

    /// Jet of the decaying harmonic r^{−(l+1)}Y_lm = R/r^{2l+1} at |x| ≥ 1.
    pub fn decaying(&self, x: &Vector3<f64>) -> Result<ScalarJet, FlatError> {
        let r2 = x.norm_squared();
        if r2 < 1.0 - 1e-12 {
            return Err(FlatError::InsideBoundary(r2.sqrt()));
        }
        let k = (2 * self.l + 1) as f64;
        let r = r2.sqrt();
        let p = r.powi(-(2 * self.l as i32 + 1));
        let rv = self.value.eval(x);
        let g = Vector3::from_fn(|i, _| self.grad[i].eval(x));
        let h = Matrix3::from_fn(|i, j| self.hess[i][j].eval(x));
        let grad = (g - x * (k * rv / r2)) * p;
        let hess = (h - (g * x.transpose() + x * g.transpose()) * (k / r2) - Matrix3::identity() * (k * rv / r2)
            + x * x.transpose() * (k * (k + 2.0) * rv / (r2 * r2)))
            * p;
        Ok(ScalarJet {
            value: rv * p,
            grad,
            hess,
        })
    }
}

/// Gauss–Legendre nodes and weights on [−1, 1] (Golub–Welsch).
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut j = DMatrix::zeros(n, n);
    for k in 1..n {
        let b = k as f64 / ((4 * k * k - 1) as f64).sqrt();
        j[(k, k - 1)] = b;
        j[(k - 1, k)] = b;
    }
    let eig = j.symmetric_eigen();
    let mut pairs: Vec<(f64, f64)> = (0..n)
        .map(|i| (eig.eigenvalues[i], 2.0 * eig.eigenvectors[(0, i)].powi(2)))
        .collect();
    pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
    pairs.into_iter().unzip()
}

/// Product grid on the unit sphere exact for spherical polynomials of degree ≤ `degree`.
#[derive(Clone, Debug)]
pub struct SphereGrid {
    pub points: Vec<Vector3<f64>>,
    pub weights: Vec<f64>,
    pub degree: usize,
}

impl SphereGrid {
    pub fn exact_to(degree: usize) -> Self {
        let nt = degree / 2 + 1;
        let np = degree + 1;
        let (nodes, w) = gauss_legendre(nt);
        let mut points = Vec::with_capacity(nt * np);
        let mut weights = Vec::with_capacity(nt * np);
        for (ct, wt) in nodes.iter().zip(&w) {
            let st = (1.0 - ct * ct).sqrt();
            for k in 0..np {
                let phi = 2.0 * PI * (k as f64 + 0.5) / np as f64;
                points.push(Vector3::new(st * phi.cos(), st * phi.sin(), *ct));
                weights.push(wt * 2.0 * PI / np as f64);
            }
        }
        SphereGrid {
            points,
            weights,
            degree,
        }
    }

    pub fn rotated(&self, rot: &Rotation3<f64>) -> Self {
        SphereGrid {
            points: self.points.iter().map(|p| rot * p).collect(),
            weights: self.weights.clone(),
            degree: self.degree,
        }
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }
}

/// Spherical-harmonic values at grid points: table[q][i] = Y_i(x_q).
pub fn sh_table(basis: &[SolidHarmonic], grid: &SphereGrid) -> Vec<Vec<f64>> {
    grid.points
        .iter()
        .map(|p| basis.iter().map(|b| b.on_sphere(p)).collect())
        .collect()
}

/// Scalar function on the sphere from its coefficients, extended as a decaying harmonic.
pub fn decaying_extension(basis: &[SolidHarmonic], coeffs: &[f64], x: &Vector3<f64>) -> Result<ScalarJet, FlatError> {
    let mut j = ScalarJet::zero();
    for (b, c) in basis.iter().zip(coeffs) {
        if *c != 0.0 {
            j = j.add(&b.decaying(x)?.scaled(*c));
        }
    }
    Ok(j)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::FdConfig;

    #[test]
    fn index_round_trip() {
        for i in 0..100 {
            let (l, m) = sh_degree_order(i);
            assert_eq!(sh_index(l, m), i);
            assert!(m.unsigned_abs() as usize <= l);
        }
    }

    #[test]
    fn orthonormal_under_quadrature() {
        let lmax = 8;
        let basis = solid_harmonics(lmax);
        let grid = SphereGrid::exact_to(2 * lmax);
        let t = sh_table(&basis, &grid);
        let mut worst: f64 = 0.0;
        for i in 0..basis.len() {
            for j in 0..basis.len() {
                let g: f64 = (0..grid.len()).map(|q| grid.weights[q] * t[q][i] * t[q][j]).sum();
                worst = worst.max((g - if i == j { 1.0 } else { 0.0 }).abs());
            }
        }
        assert!(worst < 1e-10, "{worst}");
    }

    #[test]
    fn low_degree_closed_forms() {
        let basis = solid_harmonics(2);
        let x = Vector3::new(0.3, -1.2, 0.8);
        let r = x.norm();
        let y00 = basis[0].decaying(&x).unwrap();
        let c0 = 1.0 / (4.0 * PI).sqrt();
        assert!((y00.value - c0 / r).abs() < 1e-15);
        assert!((y00.grad + x * (c0 / r.powi(3))).norm() < 1e-15);
        // Y_10 = √(3/4π) cos θ
        let n = x / r;
        assert!((basis[sh_index(1, 0)].on_sphere(&n) - (3.0 / (4.0 * PI)).sqrt() * n[2]).abs() < 1e-14);
    }

    #[test]
    fn decaying_harmonics_are_harmonic() {
        let basis = solid_harmonics(6);
        let fd = FdConfig::default();
        let x = Vector3::new(1.1, 0.7, -0.9);
        for b in &basis {
            let j = b.decaying(&x).unwrap();
            assert!(j.hess.trace().abs() < 1e-10, "l={} m={}", b.l, b.m);
            let f = |p: &Vector3<f64>| b.decaying(p).unwrap().value;
            let g = Vector3::from(fd.gradient(&f, &x));
            assert!((g - j.grad).norm() < 1e-9);
            let h = fd.hessian(&f, &x);
            assert!((Matrix3::from_fn(|i, k| h[i][k]) - j.hess).norm() < 1e-7);
        }
    }

    #[test]
    fn inside_the_sphere_is_rejected() {
        let basis = solid_harmonics(1);
        assert!(basis[0].decaying(&Vector3::new(0.5, 0.0, 0.0)).is_err());
    }
}
