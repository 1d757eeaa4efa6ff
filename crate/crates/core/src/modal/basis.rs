//! Clamped-clamped Euler–Bernoulli eigenfunctions.

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::numerics::bisect;

/// `n`-th positive root of `cos(x)·cosh(x) = 1`, found on `[nπ, (n+1)π]`
/// from the equivalent form `cos(x) = sech(x)`.
pub fn clamped_root(n: usize) -> Result<f64> {
    if n == 0 {
        return Err(Error::domain("mode index", "must be ≥ 1"));
    }
    let lo = n as f64 * PI;
    bisect(|x| x.cos() - 1.0 / x.cosh(), lo, lo + PI, 0.0)
        .ok_or_else(|| Error::Singular(format!("no clamped root bracketed for n = {n}")))
}

pub fn clamped_roots(count: usize) -> Result<Vec<f64>> {
    (1..=count).map(clamped_root).collect()
}

/// `φ(x) = cosh βx − cos βx − σ (sinh βx − sin βx)` on `[0, L]`, evaluated
/// without the cancellation between the growing hyperbolic terms.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClampedMode {
    pub beta: f64,
    pub length: f64,
    sigma: f64,
    /// Coefficient of `e^{β(x−L)}` in `cosh βx − σ sinh βx`.
    tail: f64,
}

impl ClampedMode {
    pub fn new(n: usize, length: f64) -> Result<Self> {
        let bl = clamped_root(n)?;
        let e = (-bl).exp();
        let (s, c) = bl.sin_cos();
        // σ = (cosh βL − cos βL)/(sinh βL − sin βL), in terms of e^{−βL}
        let sigma = (1.0 + e * e - 2.0 * c * e) / (1.0 - e * e - 2.0 * s * e);
        let tail = (c - s - e) / (1.0 - e * e - 2.0 * s * e);
        Ok(Self {
            beta: bl / length,
            length,
            sigma,
            tail,
        })
    }

    /// `cosh βx − σ sinh βx`.
    fn hyperbolic(&self, x: f64) -> f64 {
        let b = self.beta;
        0.5 * (1.0 + self.sigma) * (-b * x).exp() + self.tail * (b * (x - self.length)).exp()
    }

    pub fn value(&self, x: f64) -> f64 {
        let (s, c) = (self.beta * x).sin_cos();
        self.hyperbolic(x) - c + self.sigma * s
    }

    pub fn curvature(&self, x: f64) -> f64 {
        let (s, c) = (self.beta * x).sin_cos();
        self.beta * self.beta * (self.hyperbolic(x) + c - self.sigma * s)
    }
}
