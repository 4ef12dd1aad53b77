use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, Zero};

use super::poly::{forward_owned, Poly, Var, NVARS};
use super::SymError;

/// Quotient of two polynomials. Equality is decided by cross-multiplication.
#[derive(Clone)]
pub struct RationalExpr {
    num: Poly,
    den: Poly,
}

impl RationalExpr {
    /// Build `num / den`, with `den` scaled to a monic leading term.
    pub fn new(num: Poly, den: Poly) -> Result<Self, SymError> {
        if den.is_zero() {
            return Err(SymError::ZeroDenominator);
        }
        Ok(Self::normalized(num, den))
    }

    fn normalized(num: Poly, den: Poly) -> Self {
        if num.is_zero() {
            return RationalExpr::zero();
        }
        if let Some(c) = den.as_constant() {
            return RationalExpr {
                num: num.scale(&c.recip()),
                den: Poly::one(),
            };
        }
        if let Some(q) = num.div_exact(&den) {
            return RationalExpr::from_poly(q);
        }
        // cheap reduction only: common monomial factor and a monic denominator
        let common = num.monomial_content().gcd(&den.monomial_content());
        let (num, den) = (num.div_monomial(&common), den.div_monomial(&common));
        let lc = den.leading().map(|(_, c)| c.clone()).unwrap_or_else(BigRational::one);
        let inv = lc.recip();
        RationalExpr {
            num: num.scale(&inv),
            den: den.scale(&inv),
        }
    }

    pub fn from_poly(p: Poly) -> Self {
        RationalExpr {
            num: p,
            den: Poly::one(),
        }
    }

    pub fn zero() -> Self {
        RationalExpr::from_poly(Poly::zero())
    }

    pub fn one() -> Self {
        RationalExpr::from_poly(Poly::one())
    }

    pub fn int(c: i64) -> Self {
        RationalExpr::from_poly(Poly::int(c))
    }

    pub fn constant(c: BigRational) -> Self {
        RationalExpr::from_poly(Poly::constant(c))
    }

    pub fn var(v: Var) -> Self {
        RationalExpr::from_poly(Poly::var(v))
    }

    pub fn num(&self) -> &Poly {
        &self.num
    }

    pub fn den(&self) -> &Poly {
        &self.den
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn as_poly(&self) -> Option<&Poly> {
        if self.den.is_one() {
            Some(&self.num)
        } else {
            None
        }
    }

    /// Dependence of the stored representation on `v`.
    pub fn depends_on(&self, v: Var) -> bool {
        self.num.depends_on(v) || self.den.depends_on(v)
    }

    pub fn recip(&self) -> Result<Self, SymError> {
        RationalExpr::new(self.den.clone(), self.num.clone())
    }

    pub fn pow(&self, e: u32) -> Self {
        RationalExpr {
            num: self.num.pow(e),
            den: self.den.pow(e),
        }
    }

    pub fn scale(&self, c: &BigRational) -> Self {
        RationalExpr::normalized(self.num.scale(c), self.den.clone())
    }

    /// Substitute rational expressions for indeterminates.
    pub fn substitute(&self, bind: &[Option<RationalExpr>; NVARS]) -> Result<Self, SymError> {
        let n = substitute_poly(&self.num, bind);
        let d = substitute_poly(&self.den, bind);
        if d.is_zero() {
            return Err(SymError::ZeroDenominator);
        }
        Ok(&n / &d)
    }

    pub fn eval_complex(&self, vals: &[Complex64; NVARS]) -> Complex64 {
        self.num.eval_complex(vals) / self.den.eval_complex(vals)
    }

    pub fn eval_rational(&self, vals: &[BigRational; NVARS]) -> Result<BigRational, SymError> {
        let d = self.den.eval_rational(vals);
        if d.is_zero() {
            return Err(SymError::ZeroDenominator);
        }
        Ok(self.num.eval_rational(vals) / d)
    }
}

/// Substitution into a polynomial; denominators are collected by a common product.
fn substitute_poly(p: &Poly, bind: &[Option<RationalExpr>; NVARS]) -> RationalExpr {
    if bind.iter().flatten().all(|r| r.den.is_one()) {
        let pb: [Option<Poly>; NVARS] = std::array::from_fn(|i| bind[i].as_ref().map(|r| r.num.clone()));
        return RationalExpr::from_poly(p.substitute_poly(&pb));
    }
    // x_v -> n_v / d_v : multiply through by d_v^{deg_v p}
    let mut num_bind: [Option<Poly>; NVARS] = Default::default();
    let mut den = Poly::one();
    let mut homog: Vec<(Var, Poly, u16)> = Vec::new();
    for v in Var::ALL {
        if let Some(r) = &bind[v.index()] {
            num_bind[v.index()] = Some(r.num.clone());
            let deg = p.degree_in(v);
            if !r.den.is_one() && deg > 0 {
                den = &den * &r.den.pow(deg as u32);
                homog.push((v, r.den.clone(), deg));
            }
        }
    }
    let mut num = Poly::zero();
    for (m, c) in p.terms() {
        let single = Poly::term(c.clone(), *m);
        let mut t = single.substitute_poly(&num_bind);
        for (v, d, deg) in &homog {
            let missing = deg - m.exp(*v);
            if missing > 0 {
                t = &t * &d.pow(missing as u32);
            }
        }
        num = &num + &t;
    }
    RationalExpr::normalized(num, den)
}

impl PartialEq for RationalExpr {
    fn eq(&self, other: &Self) -> bool {
        if self.den == other.den {
            return self.num == other.num;
        }
        &self.num * &other.den == &other.num * &self.den
    }
}

impl Eq for RationalExpr {}

impl From<Poly> for RationalExpr {
    fn from(p: Poly) -> Self {
        RationalExpr::from_poly(p)
    }
}

impl Add for &RationalExpr {
    type Output = RationalExpr;
    fn add(self, rhs: &RationalExpr) -> RationalExpr {
        if self.den == rhs.den {
            return RationalExpr::normalized(&self.num + &rhs.num, self.den.clone());
        }
        RationalExpr::normalized(&(&self.num * &rhs.den) + &(&rhs.num * &self.den), &self.den * &rhs.den)
    }
}

impl Sub for &RationalExpr {
    type Output = RationalExpr;
    fn sub(self, rhs: &RationalExpr) -> RationalExpr {
        self + &(-rhs)
    }
}

impl Mul for &RationalExpr {
    type Output = RationalExpr;
    fn mul(self, rhs: &RationalExpr) -> RationalExpr {
        if self.is_zero() || rhs.is_zero() {
            return RationalExpr::zero();
        }
        RationalExpr::normalized(&self.num * &rhs.num, &self.den * &rhs.den)
    }
}

/// Panics on division by the zero expression; use [`RationalExpr::recip`] for a checked form.
impl Div for &RationalExpr {
    type Output = RationalExpr;
    fn div(self, rhs: &RationalExpr) -> RationalExpr {
        assert!(!rhs.is_zero(), "division by zero rational expression");
        RationalExpr::normalized(&self.num * &rhs.den, &self.den * &rhs.num)
    }
}

impl Neg for &RationalExpr {
    type Output = RationalExpr;
    fn neg(self) -> RationalExpr {
        RationalExpr {
            num: -&self.num,
            den: self.den.clone(),
        }
    }
}

impl Neg for RationalExpr {
    type Output = RationalExpr;
    fn neg(self) -> RationalExpr {
        -&self
    }
}

forward_owned!(Add, add, RationalExpr);
forward_owned!(Sub, sub, RationalExpr);
forward_owned!(Mul, mul, RationalExpr);
forward_owned!(Div, div, RationalExpr);

impl fmt::Display for RationalExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.den.is_one() {
            write!(f, "{}", self.num)
        } else {
            write!(f, "({})/({})", self.num, self.den)
        }
    }
}

impl fmt::Debug for RationalExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "RationalExpr({})", self)
    }
}

impl Zero for RationalExpr {
    fn zero() -> Self {
        RationalExpr::zero()
    }
    fn is_zero(&self) -> bool {
        self.num.is_zero()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn v(x: Var) -> RationalExpr {
        RationalExpr::var(x)
    }

    #[test]
    fn equality_ignores_representation() {
        let n = v(Var::N);
        let a = &(&v(Var::Xi1) * &n) / &(&n * &n);
        let b = &v(Var::Xi1) / &n;
        assert_eq!(a, b);
    }

    #[test]
    fn denominator_is_monic() {
        let r = RationalExpr::new(
            Poly::var(Var::Xi1),
            Poly::var(Var::N).scale(&super::super::poly::rat(-2, 1)),
        )
        .unwrap();
        assert_eq!(r.den().leading().unwrap().1, &BigRational::one());
        assert_eq!(r.to_string(), "(-1/2*xi1)/(N)");
    }

    #[test]
    fn zero_denominator_rejected() {
        assert!(RationalExpr::new(Poly::one(), Poly::zero()).is_err());
    }

    #[test]
    fn substitute_with_fractions() {
        // (xi1^2 + N) at xi1 = 1/N, N = N  ->  (1 + N^3) / N^2
        let f = &v(Var::Xi1).pow(2) + &v(Var::N);
        let mut b: [Option<RationalExpr>; NVARS] = Default::default();
        b[Var::Xi1.index()] = Some(&RationalExpr::one() / &v(Var::N));
        let got = f.substitute(&b).unwrap();
        let want = &(&RationalExpr::one() + &v(Var::N).pow(3)) / &v(Var::N).pow(2);
        assert_eq!(got, want);
    }

    #[test]
    fn empty_bindings_are_identity() {
        let f = &(&v(Var::Xi2) + &v(Var::X1)) / &v(Var::N);
        let b: [Option<RationalExpr>; NVARS] = Default::default();
        assert_eq!(f.substitute(&b).unwrap(), f);
    }
}
