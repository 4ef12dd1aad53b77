//! Proper ellipticity and the complementing condition, exact and sampled.

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::report::Check;
use crate::symbols::{build_boundary_symbol, compute_artifacts, tangential_norm_sq};
use crate::symring::{bindings, rat, rem_in_z, Poly, RationalExpr, SymMatrix, Var, NVARS};

#[derive(Debug, Error, PartialEq)]
pub enum AdnError {
    #[error("inadmissible sample: |X| = {shift_norm} is not below N = {lapse}")]
    Inadmissible { shift_norm: f64, lapse: f64 },
    #[error("tangential covector is zero")]
    ZeroTangential,
    #[error("root residual {0:e} above tolerance")]
    RootTolerance(f64),
    #[error("quadratic has a real root")]
    RealRoot,
}

const ROOT_TOL: f64 = 1e-12;

/// Lapse, shift and tangential covector at one boundary point.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct CoefficientSample {
    pub lapse: f64,
    pub shift: [f64; 3],
    pub eta: [f64; 2],
}

impl CoefficientSample {
    pub fn new(lapse: f64, shift: [f64; 3], eta: [f64; 2]) -> Result<Self, AdnError> {
        let s = CoefficientSample { lapse, shift, eta };
        s.validate()?;
        Ok(s)
    }

    pub fn validate(&self) -> Result<(), AdnError> {
        let shift_norm = self.shift.iter().map(|x| x * x).sum::<f64>().sqrt();
        if !(self.lapse > 0.0) || shift_norm >= self.lapse {
            return Err(AdnError::Inadmissible {
                shift_norm,
                lapse: self.lapse,
            });
        }
        if self.eta_norm_sq() == 0.0 {
            return Err(AdnError::ZeroTangential);
        }
        Ok(())
    }

    pub fn eta_norm_sq(&self) -> f64 {
        self.eta[0] * self.eta[0] + self.eta[1] * self.eta[1]
    }

    /// Coefficients (c2, c1, c0) of a(η + zμ) as a quadratic in z.
    pub fn quadratic(&self) -> (f64, f64, f64) {
        let n2 = self.lapse * self.lapse;
        let [x1, x2, x3] = self.shift;
        let ex = self.eta[0] * x2 + self.eta[1] * x3;
        (
            1.0 - x1 * x1 / n2,
            -2.0 * x1 * ex / n2,
            self.eta_norm_sq() - ex * ex / n2,
        )
    }

    pub fn interior_scalar_at(&self, z: Complex64) -> Complex64 {
        let (c2, c1, c0) = self.quadratic();
        z * z * c2 + z * c1 + c0
    }

    /// Values of all indeterminates with ξ₁ = z, for evaluating symbolic expressions.
    pub fn values(&self, z: Complex64) -> [Complex64; NVARS] {
        let mut v = [Complex64::new(0.0, 0.0); NVARS];
        v[Var::Xi1.index()] = z;
        v[Var::Xi2.index()] = self.eta[0].into();
        v[Var::Xi3.index()] = self.eta[1].into();
        v[Var::N.index()] = self.lapse.into();
        for i in 0..3 {
            v[Var::shift(i + 1).index()] = self.shift[i].into();
        }
        v
    }

    /// −|η|⁸ / (4N³)
    pub fn closed_form_det(&self) -> f64 {
        -self.eta_norm_sq().powi(4) / (4.0 * self.lapse.powi(3))
    }
}

/// Roots of a(η + zμ) = 0 in the upper and lower half-planes.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct RootPair {
    pub z_plus: Complex64,
    pub z_minus: Complex64,
}

/// Roots of c2 z² + c1 z + c0 without cancellation.
pub fn quadratic_roots(c2: f64, c1: f64, c0: f64) -> (Complex64, Complex64) {
    let disc = Complex64::new(c1 * c1 - 4.0 * c2 * c0, 0.0).sqrt();
    let b = Complex64::new(c1, 0.0);
    let s = if (b.conj() * disc).re >= 0.0 { disc } else { -disc };
    let q = -(b + s) * 0.5;
    (q / c2, Complex64::new(c0, 0.0) / q)
}

pub fn proper_ellipticity_check(s: &CoefficientSample) -> Result<RootPair, AdnError> {
    s.validate()?;
    let (c2, c1, c0) = s.quadratic();
    let (r1, r2) = quadratic_roots(c2, c1, c0);
    if r1.im == 0.0 || r2.im == 0.0 || r1.im.signum() == r2.im.signum() {
        return Err(AdnError::RealRoot);
    }
    let (z_plus, z_minus) = if r1.im > 0.0 { (r1, r2) } else { (r2, r1) };
    let scale = c0.abs().max(c2.abs());
    let res = s
        .interior_scalar_at(z_plus)
        .norm()
        .max(s.interior_scalar_at(z_minus).norm())
        / scale;
    if res > ROOT_TOL {
        return Err(AdnError::RootTolerance(res));
    }
    Ok(RootPair { z_plus, z_minus })
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct NumericComplementing {
    pub det_value: Complex64,
    pub closed_form_value: f64,
    pub relative_error: f64,
    pub pass: bool,
}

fn numeric_det(m: DMatrix<Complex64>) -> Complex64 {
    m.lu().determinant()
}

/// det B̃(η + z₊μ) against −|η|⁸/(4N³). `tilde` is the symbolic 8×8 boundary block.
pub fn complementing_check_numeric_with(
    tilde: &SymMatrix,
    s: &CoefficientSample,
) -> Result<NumericComplementing, AdnError> {
    let roots = proper_ellipticity_check(s)?;
    let det_value = numeric_det(tilde.eval_complex(&s.values(roots.z_plus)));
    let closed = s.closed_form_det();
    let relative_error = (det_value - closed).norm() / closed.abs();
    Ok(NumericComplementing {
        det_value,
        closed_form_value: closed,
        relative_error,
        pass: relative_error < 1e-8 && det_value.norm() > 0.0,
    })
}

pub fn complementing_check_numeric(s: &CoefficientSample) -> Result<NumericComplementing, AdnError> {
    complementing_check_numeric_with(&build_boundary_symbol().tilde, s)
}

/// N ~ U[0.5, 2], X uniform in the ball of radius 0.95 N, η on the unit circle
/// scaled log-uniformly in [0.1, 10].
pub fn sample_coefficients(seed: u64, count: usize) -> Vec<CoefficientSample> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| {
            let lapse = rng.gen_range(0.5..=2.0);
            let shift = loop {
                let p: [f64; 3] = std::array::from_fn(|_| rng.gen_range(-1.0..=1.0));
                if p.iter().map(|x| x * x).sum::<f64>() < 1.0 {
                    break p.map(|x| 0.95 * lapse * x);
                }
            };
            let angle = rng.gen_range(0.0..std::f64::consts::TAU);
            let scale = 10f64.powf(rng.gen_range(-1.0..=1.0));
            CoefficientSample {
                lapse,
                shift,
                eta: [scale * angle.cos(), scale * angle.sin()],
            }
        })
        .collect()
}

/// Summary of one sampled check.
#[derive(Clone, Debug, Serialize)]
pub struct SweepSummary {
    pub check_name: String,
    pub samples: usize,
    pub worst_relative_error: f64,
    pub failures: usize,
    pub pass: bool,
}

impl SweepSummary {
    pub fn to_check(&self, label: &str, tol: f64) -> Check {
        let c = Check::within(&self.check_name, label, self.worst_relative_error, tol)
            .with_detail(format!("{} samples, {} failures", self.samples, self.failures));
        if self.pass {
            c
        } else {
            Check::exact(&self.check_name, label, false).with_detail(format!(
                "{} samples, {} failures, worst relative error {:e}",
                self.samples, self.failures, self.worst_relative_error
            ))
        }
    }
}

pub fn ellipticity_sweep(samples: &[CoefficientSample]) -> SweepSummary {
    let results: Vec<_> = samples.par_iter().map(proper_ellipticity_check).collect();
    let mut worst: f64 = 0.0;
    let mut failures = 0;
    for (s, r) in samples.iter().zip(&results) {
        match r {
            Ok(rp) => {
                let sym = (rp.z_minus - rp.z_plus.conj()).norm() / rp.z_plus.norm();
                let res = s.interior_scalar_at(rp.z_plus).norm() / s.eta_norm_sq();
                worst = worst.max(sym).max(res);
            }
            Err(_) => failures += 1,
        }
    }
    SweepSummary {
        check_name: "proper ellipticity sweep".into(),
        samples: samples.len(),
        worst_relative_error: worst,
        failures,
        pass: failures == 0,
    }
}

pub fn complementing_sweep(samples: &[CoefficientSample]) -> SweepSummary {
    let tilde = build_boundary_symbol().tilde;
    let results: Vec<_> = samples
        .par_iter()
        .map(|s| complementing_check_numeric_with(&tilde, s))
        .collect();
    let mut worst: f64 = 0.0;
    let mut failures = 0;
    for r in &results {
        match r {
            Ok(c) => {
                worst = worst.max(c.relative_error);
                if !c.pass {
                    failures += 1;
                }
            }
            Err(_) => {
                failures += 1;
                worst = f64::INFINITY;
            }
        }
    }
    SweepSummary {
        check_name: "numeric complementing sweep".into(),
        samples: samples.len(),
        worst_relative_error: worst,
        failures,
        pass: failures == 0,
    }
}

/// Exact complementing certificates for the variable-coefficient symbol and the flat family.
#[derive(Clone, Debug)]
pub struct SymbolicCertificate {
    pub certificate: Option<RationalExpr>,
    pub homotopy_certificate: Option<RationalExpr>,
    pub pass: bool,
    pub detail: String,
}

/// The adjugate of a·I₁₁ is a¹⁰·I₁₁, so the condition holds iff the remainder of
/// det B̂(η + zμ) modulo a(η + zμ) is nonzero and free of z.
pub fn complementing_check_symbolic() -> SymbolicCertificate {
    let a = compute_artifacts();
    let Some(cert) = a.certificate.clone() else {
        return SymbolicCertificate {
            certificate: None,
            homotopy_certificate: None,
            pass: false,
            detail: "reduced matrix unavailable or remainder undefined".into(),
        };
    };
    let hom = {
        let det = a.homotopy.matrix.det_bareiss().expect("square");
        crate::symbols::homotopy_root_certificate(&det, &a.homotopy.prefactor).ok()
    };
    let z_free = !cert.depends_on(Var::Z);
    let x_free = (1..=3).all(|i| !cert.depends_on(Var::shift(i)));
    let nonzero = !cert.is_zero();
    SymbolicCertificate {
        pass: z_free && x_free && nonzero && hom.as_ref().is_some_and(|h| !h.depends_on(Var::Z)),
        detail: format!("certificate = {cert}"),
        certificate: Some(cert),
        homotopy_certificate: hom,
    }
}

/// Remainder of a z-polynomial modulo z² + |η|², used for the certificate degenerate checks.
pub fn tangential_remainder(f: &RationalExpr) -> Option<RationalExpr> {
    let p = &Poly::var(Var::Z).pow(2) + &tangential_norm_sq();
    rem_in_z(f, &p).ok()
}

/// Certificate value at a sample, scaled to det B̃.
pub fn certificate_det_value(cert: &RationalExpr, s: &CoefficientSample) -> f64 {
    let v = cert.eval_complex(&s.values(Complex64::new(0.0, 0.0)));
    v.re * (-1.0 / (32.0 * s.lapse.powi(11)))
}

pub fn symbolic_numeric_agreement(cert: &RationalExpr, samples: &[CoefficientSample]) -> SweepSummary {
    let tilde = build_boundary_symbol().tilde;
    let errs: Vec<f64> = samples
        .par_iter()
        .map(|s| match complementing_check_numeric_with(&tilde, s) {
            Ok(c) => {
                let want = certificate_det_value(cert, s);
                (c.det_value - want).norm() / want.abs()
            }
            Err(_) => f64::INFINITY,
        })
        .collect();
    let failures = errs.iter().filter(|e| !(**e < 1e-8)).count();
    SweepSummary {
        check_name: "symbolic and numeric certificate agreement".into(),
        samples: samples.len(),
        worst_relative_error: errs.iter().cloned().fold(0.0, f64::max),
        failures,
        pass: failures == 0,
    }
}

/// Homogeneity of det B̃ in ξ, degree 8, checked exactly.
pub fn det_homogeneity_degree_eight(det_btilde: &RationalExpr) -> bool {
    let lam = RationalExpr::var(Var::T);
    let b = bindings(&[
        (Var::Xi1, &lam * &RationalExpr::var(Var::Xi1)),
        (Var::Xi2, &lam * &RationalExpr::var(Var::Xi2)),
        (Var::Xi3, &lam * &RationalExpr::var(Var::Xi3)),
    ]);
    det_btilde.substitute(&b).is_ok_and(|d| d == &lam.pow(8) * det_btilde)
}

/// Full adn run: sweeps plus the exact certificates.
pub struct AdnOutcome {
    pub checks: Vec<Check>,
    pub summaries: Vec<SweepSummary>,
    pub certificate: SymbolicCertificate,
}

pub fn run_adn(seed: u64, samples: usize) -> AdnOutcome {
    let sweep = sample_coefficients(seed, samples);
    let ell = ellipticity_sweep(&sweep);
    let comp = complementing_sweep(&sweep);
    let cert = complementing_check_symbolic();
    let mut checks = vec![
        ell.to_check("one root of a(eta + z mu) per half-plane", ROOT_TOL),
        comp.to_check("det tilde at upper root = -|eta|^8 / (4 N^3)", 1e-8),
        Check::exact(
            "symbolic complementing certificate",
            "remainder of det bhat modulo a is z-free, X-free, nonzero",
            cert.pass,
        )
        .with_detail(cert.detail.clone()),
    ];
    let mut summaries = vec![ell, comp];
    if let Some(c) = &cert.certificate {
        let agree = symbolic_numeric_agreement(c, &sweep[..sweep.len().min(50)]);
        checks.push(agree.to_check("certificate matches numeric determinant", 1e-8));
        summaries.push(agree);
    }
    let det = build_boundary_symbol().tilde.det_bareiss().expect("square");
    checks.push(Check::exact(
        "determinant homogeneity",
        "det tilde(lambda xi) = lambda^8 det tilde(xi)",
        det_homogeneity_degree_eight(&det),
    ));
    AdnOutcome {
        checks,
        summaries,
        certificate: cert,
    }
}

/// Flat homotopy certificate at |η| = 1, as an exact rational in t.
pub fn homotopy_certificate_at(
    cert: &RationalExpr,
    t: &num_rational::BigRational,
) -> Option<num_rational::BigRational> {
    let mut vals: [num_rational::BigRational; NVARS] = std::array::from_fn(|_| rat(0, 1));
    vals[Var::T.index()] = t.clone();
    vals[Var::Xi2.index()] = rat(1, 1);
    cert.eval_rational(&vals).ok()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::symbols::homotopy_root_value;

    fn flat(eta: [f64; 2]) -> CoefficientSample {
        CoefficientSample::new(1.0, [0.0; 3], eta).unwrap()
    }

    #[test]
    fn flat_roots_are_plus_minus_i() {
        let r = proper_ellipticity_check(&flat([1.0, 0.0])).unwrap();
        assert!((r.z_plus - Complex64::i()).norm() < 1e-15);
        assert!((r.z_minus + Complex64::i()).norm() < 1e-15);
    }

    #[test]
    fn shifted_quadratic_has_conjugate_roots() {
        let s = CoefficientSample::new(1.0, [0.5, 0.0, 0.0], [1.0, 0.0]).unwrap();
        let (c2, _, _) = s.quadratic();
        assert!((c2 - 0.75).abs() < 1e-15);
        let r = proper_ellipticity_check(&s).unwrap();
        assert!((r.z_minus - r.z_plus.conj()).norm() < 1e-14);
        assert!(r.z_plus.im > 0.0);
    }

    #[test]
    fn inadmissible_and_degenerate_samples_rejected() {
        assert!(matches!(
            CoefficientSample::new(1.0, [1.0, 0.0, 0.0], [1.0, 0.0]),
            Err(AdnError::Inadmissible { .. })
        ));
        assert_eq!(
            CoefficientSample::new(1.0, [0.0; 3], [0.0, 0.0]).unwrap_err(),
            AdnError::ZeroTangential
        );
    }

    #[test]
    fn stable_roots_for_large_linear_term() {
        // z² + 1e8 z + 1: naive formula loses the small root entirely
        let (a, b) = quadratic_roots(1.0, 1e8, 1.0);
        let small = if a.norm() < b.norm() { a } else { b };
        assert!((small.re + 1e-8).abs() < 1e-20);
    }

    #[test]
    fn flat_determinant_is_minus_quarter() {
        let c = complementing_check_numeric(&flat([1.0, 0.0])).unwrap();
        assert!((c.det_value - Complex64::new(-0.25, 0.0)).norm() < 1e-12);
        assert!(c.pass);
    }

    #[test]
    fn determinant_scales_with_eighth_power() {
        let a = complementing_check_numeric(&flat([0.6, 0.8])).unwrap();
        let b = complementing_check_numeric(&flat([1.2, 1.6])).unwrap();
        assert!((b.det_value / a.det_value - 256.0).norm() < 1e-9);
    }

    #[test]
    fn sampler_respects_distribution_bounds() {
        for s in sample_coefficients(7, 500) {
            assert!((0.5..=2.0).contains(&s.lapse));
            let x = s.shift.iter().map(|v| v * v).sum::<f64>().sqrt();
            assert!(x < 0.95 * s.lapse);
            let e = s.eta_norm_sq().sqrt();
            assert!((0.1 - 1e-12..=10.0 + 1e-12).contains(&e));
        }
    }

    #[test]
    fn sweeps_pass() {
        let samples = sample_coefficients(1, 200);
        assert!(ellipticity_sweep(&samples).pass);
        let c = complementing_sweep(&samples);
        assert!(c.pass, "{c:?}");
    }

    #[test]
    fn symbolic_certificate() {
        let c = complementing_check_symbolic();
        assert!(c.pass, "{}", c.detail);
        let cert = c.certificate.unwrap();
        let eta = RationalExpr::from_poly(tangential_norm_sq());
        assert_eq!(
            cert,
            &(&RationalExpr::int(8) * &RationalExpr::var(Var::N).pow(8)) * &eta.pow(4)
        );
        // η = 0 kills it
        let zero = bindings(&[(Var::Xi2, RationalExpr::zero()), (Var::Xi3, RationalExpr::zero())]);
        assert!(cert.substitute(&zero).unwrap().is_zero());
        let h = c.homotopy_certificate.unwrap();
        for k in 0..=20 {
            let t = rat(k, 20);
            assert_eq!(homotopy_certificate_at(&h, &t).unwrap(), homotopy_root_value(&t));
        }
        let samples = sample_coefficients(3, 50);
        assert!(symbolic_numeric_agreement(&cert, &samples).pass);
    }

    #[test]
    fn remainder_helper() {
        let z2 = RationalExpr::var(Var::Z).pow(2);
        let r = tangential_remainder(&z2).unwrap();
        assert_eq!(r, -RationalExpr::from_poly(tangential_norm_sq()));
    }
}
