//! Central finite differences with Richardson extrapolation.

use std::ops::{Add, Mul, Sub};

use nalgebra::Vector3;
use serde::Serialize;

pub type Point = Vector3<f64>;

/// Anything that can be differenced: closed under addition and real scaling.
pub trait Linear: Copy + Add<Output = Self> + Sub<Output = Self> + Mul<f64, Output = Self> {}
impl<T: Copy + Add<Output = T> + Sub<Output = T> + Mul<f64, Output = T>> Linear for T {}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct FdConfig {
    /// Base step is `rel_step * (1 + |x|)`.
    pub rel_step: f64,
    /// Number of Richardson levels on top of the plain central difference.
    pub levels: usize,
}

impl Default for FdConfig {
    fn default() -> Self {
        FdConfig {
            rel_step: 1e-3,
            levels: 2,
        }
    }
}

impl FdConfig {
    pub fn step(&self, x: &Point) -> f64 {
        self.rel_step * (1.0 + x.norm())
    }

    pub fn with_step(self, rel_step: f64) -> Self {
        FdConfig { rel_step, ..self }
    }

    fn extrapolate<T: Linear>(&self, mut d: Vec<T>) -> T {
        // d[k] uses step h / 2^k; every level removes the next even power of h
        for j in 1..=self.levels {
            let f = 1.0 / (4f64.powi(j as i32) - 1.0);
            for k in 0..d.len() - j {
                d[k] = d[k + 1] + (d[k + 1] - d[k]) * f;
            }
        }
        d[0]
    }

    /// ∂f/∂xⁱ at x.
    pub fn partial<T: Linear>(&self, f: &dyn Fn(&Point) -> T, x: &Point, i: usize) -> T {
        let h0 = self.step(x);
        let d = (0..=self.levels)
            .map(|k| {
                let h = h0 / 2f64.powi(k as i32);
                let mut e = Point::zeros();
                e[i] = h;
                (f(&(x + e)) - f(&(x - e))) * (0.5 / h)
            })
            .collect();
        self.extrapolate(d)
    }

    /// ∂²f/∂xⁱ∂xʲ at x.
    pub fn second<T: Linear>(&self, f: &dyn Fn(&Point) -> T, x: &Point, i: usize, j: usize) -> T {
        let h0 = self.step(x);
        let d = (0..=self.levels)
            .map(|k| {
                let h = h0 / 2f64.powi(k as i32);
                if i == j {
                    let mut e = Point::zeros();
                    e[i] = h;
                    (f(&(x + e)) + f(&(x - e)) - f(x) * 2.0) * (1.0 / (h * h))
                } else {
                    let mut a = Point::zeros();
                    let mut b = Point::zeros();
                    a[i] = h;
                    b[j] = h;
                    (f(&(x + a + b)) - f(&(x + a - b)) - f(&(x - a + b)) + f(&(x - a - b))) * (0.25 / (h * h))
                }
            })
            .collect();
        self.extrapolate(d)
    }

    pub fn gradient<T: Linear>(&self, f: &dyn Fn(&Point) -> T, x: &Point) -> [T; 3] {
        std::array::from_fn(|i| self.partial(f, x, i))
    }

    pub fn hessian<T: Linear>(&self, f: &dyn Fn(&Point) -> T, x: &Point) -> [[T; 3]; 3] {
        let mut out = [[f(x); 3]; 3];
        for i in 0..3 {
            for j in i..3 {
                let v = self.second(f, x, i, j);
                out[i][j] = v;
                out[j][i] = v;
            }
        }
        out
    }
}

/// Value, first and second derivatives of a field at one point.
#[derive(Clone, Copy, Debug)]
pub struct Jet<T> {
    pub value: T,
    pub d: [T; 3],
    pub dd: [[T; 3]; 3],
}

impl<T: Linear> Jet<T> {
    pub fn of(f: &dyn Fn(&Point) -> T, x: &Point, fd: &FdConfig) -> Jet<T> {
        Jet {
            value: f(x),
            d: fd.gradient(f, x),
            dd: fd.hessian(f, x),
        }
    }

    pub fn first_order(f: &dyn Fn(&Point) -> T, x: &Point, fd: &FdConfig) -> Jet<T> {
        let v = f(x);
        Jet {
            value: v,
            d: fd.gradient(f, x),
            dd: [[v * 0.0; 3]; 3],
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn derivatives_of_smooth_function() {
        let f = |x: &Point| (x[0] * 1.3).sin() * (x[1] * 0.7).exp() + x[2].powi(3);
        let x = Point::new(0.4, -0.2, 1.1);
        let fd = FdConfig::default();
        let dx = 1.3 * (0.52f64).cos() * (-0.14f64).exp();
        assert!((fd.partial(&f, &x, 0) - dx).abs() < 1e-11);
        let dxy = 1.3 * 0.7 * (0.52f64).cos() * (-0.14f64).exp();
        assert!((fd.second(&f, &x, 0, 1) - dxy).abs() < 1e-8);
        assert!((fd.second(&f, &x, 2, 2) - 6.0 * 1.1).abs() < 1e-8);
    }

    #[test]
    fn richardson_improves_on_plain_difference() {
        let f = |x: &Point| (2.0 * x[0]).exp();
        let x = Point::new(0.3, 0.0, 0.0);
        let exact = 2.0 * (0.6f64).exp();
        let plain = FdConfig {
            rel_step: 1e-2,
            levels: 0,
        };
        let rich = FdConfig {
            rel_step: 1e-2,
            levels: 2,
        };
        let e0 = (plain.partial(&f, &x, 0) - exact).abs();
        let e2 = (rich.partial(&f, &x, 0) - exact).abs();
        assert!(e2 < e0 * 1e-4, "{e0} {e2}");
    }
}
