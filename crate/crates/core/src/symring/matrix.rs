use std::fmt;

use nalgebra::DMatrix;
use num_complex::Complex64;

use super::poly::{Poly, NVARS};
use super::rational::RationalExpr;
use super::SymError;

/// Dense matrix of rational expressions, row-major.
#[derive(Clone, PartialEq, Eq)]
pub struct SymMatrix {
    rows: usize,
    cols: usize,
    entries: Vec<RationalExpr>,
}

impl SymMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        SymMatrix {
            rows,
            cols,
            entries: vec![RationalExpr::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = SymMatrix::zeros(n, n);
        for i in 0..n {
            m.set(i, i, RationalExpr::one());
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<RationalExpr>>) -> Result<Self, SymError> {
        let r = rows.len();
        let c = rows.first().map_or(0, |row| row.len());
        if rows.iter().any(|row| row.len() != c) {
            return Err(SymError::Shape("ragged rows".into()));
        }
        Ok(SymMatrix {
            rows: r,
            cols: c,
            entries: rows.into_iter().flatten().collect(),
        })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &RationalExpr {
        assert!(i < self.rows && j < self.cols, "index ({i},{j}) out of bounds");
        &self.entries[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: RationalExpr) {
        assert!(i < self.rows && j < self.cols, "index ({i},{j}) out of bounds");
        self.entries[i * self.cols + j] = v;
    }

    pub fn map<F: Fn(&RationalExpr) -> RationalExpr>(&self, f: F) -> SymMatrix {
        SymMatrix {
            rows: self.rows,
            cols: self.cols,
            entries: self.entries.iter().map(f).collect(),
        }
    }

    pub fn try_map<F: Fn(&RationalExpr) -> Result<RationalExpr, SymError>>(&self, f: F) -> Result<SymMatrix, SymError> {
        Ok(SymMatrix {
            rows: self.rows,
            cols: self.cols,
            entries: self.entries.iter().map(f).collect::<Result<_, _>>()?,
        })
    }

    pub fn scale(&self, c: &RationalExpr) -> SymMatrix {
        self.map(|e| e * c)
    }

    pub fn scale_row(&mut self, i: usize, c: &RationalExpr) {
        for j in 0..self.cols {
            let v = self.get(i, j) * c;
            self.set(i, j, v);
        }
    }

    pub fn scale_col(&mut self, j: usize, c: &RationalExpr) {
        for i in 0..self.rows {
            let v = self.get(i, j) * c;
            self.set(i, j, v);
        }
    }

    /// row[target] += factor * row[source]
    pub fn add_row_multiple(&mut self, target: usize, source: usize, factor: &RationalExpr) {
        for j in 0..self.cols {
            let v = self.get(target, j) + &(self.get(source, j) * factor);
            self.set(target, j, v);
        }
    }

    /// col[target] += factor * col[source]
    pub fn add_col_multiple(&mut self, target: usize, source: usize, factor: &RationalExpr) {
        for i in 0..self.rows {
            let v = self.get(i, target) + &(self.get(i, source) * factor);
            self.set(i, target, v);
        }
    }

    pub fn swap_rows(&mut self, a: usize, b: usize) {
        for j in 0..self.cols {
            self.entries.swap(a * self.cols + j, b * self.cols + j);
        }
    }

    pub fn submatrix(&self, rows: &[usize], cols: &[usize]) -> SymMatrix {
        let mut m = SymMatrix::zeros(rows.len(), cols.len());
        for (a, &i) in rows.iter().enumerate() {
            for (b, &j) in cols.iter().enumerate() {
                m.set(a, b, self.get(i, j).clone());
            }
        }
        m
    }

    pub fn mul(&self, other: &SymMatrix) -> Result<SymMatrix, SymError> {
        if self.cols != other.rows {
            return Err(SymError::Shape(format!(
                "{}x{} times {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let mut out = SymMatrix::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for j in 0..other.cols {
                let mut acc = RationalExpr::zero();
                for k in 0..self.cols {
                    if !self.get(i, k).is_zero() && !other.get(k, j).is_zero() {
                        acc = &acc + &(self.get(i, k) * other.get(k, j));
                    }
                }
                out.set(i, j, acc);
            }
        }
        Ok(out)
    }

    /// Entrywise substitution.
    pub fn substitute(&self, bind: &[Option<RationalExpr>; NVARS]) -> Result<SymMatrix, SymError> {
        self.try_map(|e| e.substitute(bind))
    }

    pub fn eval_complex(&self, vals: &[Complex64; NVARS]) -> DMatrix<Complex64> {
        DMatrix::from_fn(self.rows, self.cols, |i, j| self.get(i, j).eval_complex(vals))
    }

    /// First entry where two equally shaped matrices differ.
    pub fn first_mismatch(&self, other: &SymMatrix) -> Option<(usize, usize)> {
        if self.rows != other.rows || self.cols != other.cols {
            return Some((usize::MAX, usize::MAX));
        }
        for i in 0..self.rows {
            for j in 0..self.cols {
                if self.get(i, j) != other.get(i, j) {
                    return Some((i, j));
                }
            }
        }
        None
    }

    /// Fraction-free determinant. Rows are cleared of denominators first, then Bareiss
    /// elimination runs over polynomials with exact divisions.
    pub fn det_bareiss(&self) -> Result<RationalExpr, SymError> {
        if !self.is_square() {
            return Err(SymError::Shape(format!(
                "determinant of {}x{} matrix",
                self.rows, self.cols
            )));
        }
        let n = self.rows;
        if n == 0 {
            return Ok(RationalExpr::one());
        }
        let mut scale = Poly::one();
        let mut a: Vec<Vec<Poly>> = Vec::with_capacity(n);
        for i in 0..n {
            let mut dens: Vec<&Poly> = Vec::new();
            for j in 0..n {
                let d = self.get(i, j).den();
                if !d.is_one() && !dens.contains(&d) {
                    dens.push(d);
                }
            }
            let row_factor = dens.iter().fold(Poly::one(), |acc, d| &acc * *d);
            let row: Vec<Poly> = (0..n)
                .map(|j| {
                    let e = self.get(i, j);
                    if e.den().is_one() {
                        e.num() * &row_factor
                    } else {
                        let rest = row_factor.div_exact(e.den()).expect("row factor contains denominator");
                        e.num() * &rest
                    }
                })
                .collect();
            scale = &scale * &row_factor;
            a.push(row);
        }
        let mut sign = 1i64;
        let mut prev = Poly::one();
        for k in 0..n - 1 {
            if a[k][k].is_zero() {
                match (k + 1..n).find(|&i| !a[i][k].is_zero()) {
                    Some(p) => {
                        a.swap(k, p);
                        sign = -sign;
                    }
                    None => return Ok(RationalExpr::zero()),
                }
            }
            for i in k + 1..n {
                for j in k + 1..n {
                    let t = &(&a[i][j] * &a[k][k]) - &(&a[i][k] * &a[k][j]);
                    a[i][j] = t.div_exact(&prev).ok_or(SymError::InexactDivision)?;
                }
                a[i][k] = Poly::zero();
            }
            prev = a[k][k].clone();
        }
        let det = a[n - 1][n - 1].scale(&num_rational::BigRational::from_integer(sign.into()));
        RationalExpr::new(det, scale)
    }

    /// Determinant with common row factors kept symbolic. A row whose nonzero entries
    /// are all constant multiples of one expression contributes that expression as a factor.
    pub fn det_factored(&self) -> Result<FactoredDet, SymError> {
        if !self.is_square() {
            return Err(SymError::Shape(format!(
                "determinant of {}x{} matrix",
                self.rows, self.cols
            )));
        }
        let mut reduced = self.clone();
        let mut factors: Vec<(RationalExpr, u32)> = Vec::new();
        for i in 0..self.rows {
            let Some(c) = (0..self.cols).map(|j| self.get(i, j)).find(|e| !e.is_zero()).cloned() else {
                return Ok(FactoredDet {
                    factors: Vec::new(),
                    rest: RationalExpr::zero(),
                });
            };
            if c.as_poly().is_some_and(Poly::is_constant) {
                continue;
            }
            let ratios: Vec<RationalExpr> = (0..self.cols).map(|j| self.get(i, j) / &c).collect();
            if ratios.iter().all(|r| r.as_poly().is_some_and(Poly::is_constant)) {
                for (j, r) in ratios.into_iter().enumerate() {
                    reduced.set(i, j, r);
                }
                match factors.iter_mut().find(|(f, _)| f == &c) {
                    Some((_, k)) => *k += 1,
                    None => factors.push((c, 1)),
                }
            }
        }
        Ok(FactoredDet {
            factors,
            rest: reduced.det_bareiss()?,
        })
    }

    /// Laplace expansion along the first row. Exponential cost; meant as a test oracle.
    pub fn det_cofactor(&self) -> Result<RationalExpr, SymError> {
        if !self.is_square() {
            return Err(SymError::Shape(format!(
                "determinant of {}x{} matrix",
                self.rows, self.cols
            )));
        }
        let idx: Vec<usize> = (0..self.cols).collect();
        Ok(self.cofactor_rec(0, &idx))
    }

    fn cofactor_rec(&self, row: usize, cols: &[usize]) -> RationalExpr {
        if cols.is_empty() {
            return RationalExpr::one();
        }
        let mut acc = RationalExpr::zero();
        for (k, &c) in cols.iter().enumerate() {
            let e = self.get(row, c);
            if e.is_zero() {
                continue;
            }
            let rest: Vec<usize> = cols.iter().copied().filter(|&x| x != c).collect();
            let term = e * &self.cofactor_rec(row + 1, &rest);
            acc = if k % 2 == 0 { &acc + &term } else { &acc - &term };
        }
        acc
    }
}

impl fmt::Display for SymMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.rows {
            for j in 0..self.cols {
                writeln!(f, "[{}][{}] = {}", i + 1, j + 1, self.get(i, j))?;
            }
        }
        Ok(())
    }
}

impl fmt::Debug for SymMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "SymMatrix {}x{}\n{}", self.rows, self.cols, self)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::symring::{rat, Var};

    fn v(x: Var) -> RationalExpr {
        RationalExpr::var(x)
    }

    #[test]
    fn two_by_two() {
        let (a, b, c, d) = (v(Var::Xi1), v(Var::Xi2), v(Var::Xi3), v(Var::N));
        let m = SymMatrix::from_rows(vec![vec![a.clone(), b.clone()], vec![c.clone(), d.clone()]]).unwrap();
        assert_eq!(m.det_bareiss().unwrap(), &(&a * &d) - &(&b * &c));
    }

    #[test]
    fn non_square_rejected() {
        let m = SymMatrix::zeros(2, 3);
        assert!(m.det_bareiss().is_err());
        assert!(m.det_cofactor().is_err());
    }

    #[test]
    fn pivot_swap_and_denominators() {
        // [[0, 1/N], [xi1, X1]] -> -xi1/N
        let m = SymMatrix::from_rows(vec![
            vec![RationalExpr::zero(), &RationalExpr::one() / &v(Var::N)],
            vec![v(Var::Xi1), v(Var::X1)],
        ])
        .unwrap();
        let want = -(&v(Var::Xi1) / &v(Var::N));
        assert_eq!(m.det_bareiss().unwrap(), want);
        assert_eq!(m.det_cofactor().unwrap(), want);
    }

    #[test]
    fn singular_matrix_gives_zero() {
        let a = v(Var::Xi1);
        let m = SymMatrix::from_rows(vec![
            vec![a.clone(), RationalExpr::int(2), RationalExpr::zero()],
            vec![&a * &RationalExpr::int(2), RationalExpr::int(4), RationalExpr::zero()],
            vec![v(Var::N), v(Var::X1), v(Var::X2)],
        ])
        .unwrap();
        assert!(m.det_bareiss().unwrap().is_zero());
    }

    #[test]
    fn factored_det_agrees_with_expanded() {
        let x = RationalExpr::var(Var::Xi1);
        let y = RationalExpr::var(Var::N);
        let m = SymMatrix::from_rows(vec![
            vec![x.clone(), x.scale(&rat(2, 1)), RationalExpr::zero()],
            vec![y.clone(), &x + &y, RationalExpr::one()],
            vec![RationalExpr::zero(), x.clone(), x.clone()],
        ])
        .unwrap();
        let f = m.det_factored().unwrap();
        assert_eq!(f.factors.len(), 1);
        assert_eq!(f.factors[0].1, 2);
        assert_eq!(f.expand(), m.det_bareiss().unwrap());
    }
}

/// det = rest · Π factorᵏ
#[derive(Clone, Debug)]
pub struct FactoredDet {
    pub factors: Vec<(RationalExpr, u32)>,
    pub rest: RationalExpr,
}

impl FactoredDet {
    pub fn expand(&self) -> RationalExpr {
        self.factors
            .iter()
            .fold(self.rest.clone(), |acc, (f, k)| &acc * &f.pow(*k))
    }

    /// Exact test of det = base^k without expanding the power.
    pub fn is_power_of(&self, base: &RationalExpr, k: u32) -> bool {
        let mut rest = self.rest.clone();
        let mut total = 0;
        for (f, e) in &self.factors {
            let q = f / base;
            match q.as_poly().and_then(Poly::as_constant) {
                Some(c) => {
                    rest = rest.scale(&num_traits::pow(c, *e as usize));
                    total += e;
                }
                None => return false,
            }
        }
        if total == k {
            rest == RationalExpr::one()
        } else {
            false
        }
    }
}
