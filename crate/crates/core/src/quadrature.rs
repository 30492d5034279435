//! Adaptive Simpson quadrature with an absolute error target.

use crate::error::{Error, Result};

pub const DEFAULT_TOL: f64 = 1e-10;
pub const DEFAULT_MAX_DEPTH: u32 = 40;

#[derive(Debug, Clone, Copy)]
pub struct Simpson {
    pub tol: f64,
    pub max_depth: u32,
}

impl Default for Simpson {
    fn default() -> Self {
        Self {
            tol: DEFAULT_TOL,
            max_depth: DEFAULT_MAX_DEPTH,
        }
    }
}

impl Simpson {
    pub fn new(tol: f64, max_depth: u32) -> Self {
        Self { tol, max_depth }
    }

    /// Integrates `f` over `[a, b]`. An empty interval integrates to zero and
    /// `b < a` flips the sign.
    pub fn integrate<F: Fn(f64) -> f64>(&self, f: F, a: f64, b: f64) -> Result<f64> {
        if a == b {
            return Ok(0.0);
        }
        if b < a {
            return self.integrate(f, b, a).map(|v| -v);
        }
        let fa = f(a);
        let fb = f(b);
        let m = 0.5 * (a + b);
        let fm = f(m);
        // Start from two panels so a symmetric or periodic integrand cannot
        // fool the first error estimate.
        let left = Panel { a, b: m, fa, fm: f(0.5 * (a + m)), fb: fm };
        let right = Panel { a: m, b, fa: fm, fm: f(0.5 * (m + b)), fb };
        Ok(self.refine(&f, left, 0.5 * self.tol, 1)? + self.refine(&f, right, 0.5 * self.tol, 1)?)
    }

    fn refine<F: Fn(f64) -> f64>(&self, f: &F, p: Panel, tol: f64, depth: u32) -> Result<f64> {
        let whole = p.estimate();
        let m = 0.5 * (p.a + p.b);
        let left = Panel {
            a: p.a,
            b: m,
            fa: p.fa,
            fm: f(0.5 * (p.a + m)),
            fb: p.fm,
        };
        let right = Panel {
            a: m,
            b: p.b,
            fa: p.fm,
            fm: f(0.5 * (m + p.b)),
            fb: p.fb,
        };
        let (l, r) = (left.estimate(), right.estimate());
        let delta = l + r - whole;
        if !delta.is_finite() {
            return Err(self.failure(p.a, p.b));
        }
        if delta.abs() <= 15.0 * tol {
            return Ok(l + r + delta / 15.0);
        }
        if depth >= self.max_depth || m <= p.a || m >= p.b {
            return Err(self.failure(p.a, p.b));
        }
        Ok(self.refine(f, left, 0.5 * tol, depth + 1)? + self.refine(f, right, 0.5 * tol, depth + 1)?)
    }

    fn failure(&self, a: f64, b: f64) -> Error {
        Error::Quadrature {
            a,
            b,
            tol: self.tol,
            max_depth: self.max_depth,
        }
    }
}

#[derive(Debug, Clone, Copy)]
struct Panel {
    a: f64,
    b: f64,
    fa: f64,
    fm: f64,
    fb: f64,
}

impl Panel {
    fn estimate(&self) -> f64 {
        (self.b - self.a) / 6.0 * (self.fa + 4.0 * self.fm + self.fb)
    }
}

/// [`Simpson::integrate`] with the default tolerance and depth.
pub fn integrate<F: Fn(f64) -> f64>(f: F, a: f64, b: f64) -> Result<f64> {
    Simpson::default().integrate(f, a, b)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exponential_integral() {
        let v = integrate(|x| (-0.3 * x).exp(), 0.0, 10.0).unwrap();
        let exact = (1.0 - (-3.0f64).exp()) / 0.3;
        assert!((v - exact).abs() < 1e-10);
    }

    #[test]
    fn polynomial_is_exact() {
        let v = integrate(|x| x * x * x - 2.0 * x, -1.0, 3.0).unwrap();
        assert!((v - 12.0).abs() < 1e-12);
    }

    #[test]
    fn reversed_and_empty_intervals() {
        assert_eq!(integrate(|x| x, 2.0, 2.0).unwrap(), 0.0);
        let v = integrate(|x| x, 1.0, 0.0).unwrap();
        assert!((v + 0.5).abs() < 1e-14);
    }

    #[test]
    fn oscillatory_integrand() {
        let v = integrate(|x| (10.0 * x).sin(), 0.0, std::f64::consts::PI).unwrap();
        assert!(v.abs() < 1e-10);
    }

    #[test]
    fn singular_integrand_reports_failure() {
        let err = Simpson::new(1e-12, 12).integrate(|x| 1.0 / x.sqrt().max(1e-300), 0.0, 1.0);
        assert!(matches!(err, Err(Error::Quadrature { .. })));
        let nan = integrate(|_| f64::NAN, 0.0, 1.0);
        assert!(matches!(nan, Err(Error::Quadrature { .. })));
    }
}
