use serde::{Deserialize, Serialize};

use super::{DriftDiffusion, Mat4};
use crate::error::{Error, Result};
use crate::model::OptomechSystem;
use crate::numerics::bisect;

/// Relative size below which an eigenvalue counts as zero.
const ZERO_EIG_REL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Stability {
    pub stable: bool,
    /// Largest real part of the drift eigenvalues (rad/s). Negative when stable.
    pub margin: f64,
    /// Verdict of the Routh–Hurwitz test on the characteristic polynomial.
    pub routh_hurwitz: bool,
}

/// Coefficients `[c1, c2, c3, c4]` of `det(sI − A) = s⁴ + c1 s³ + c2 s² + c3 s + c4`
/// by the Faddeev–LeVerrier recursion.
pub fn characteristic_polynomial(a: &Mat4) -> [f64; 4] {
    let mut c = [0.0; 4];
    let mut m = Mat4::zeros();
    let mut prev = 1.0;
    for k in 1..=4 {
        m = a * m + Mat4::identity() * prev;
        let ck = -(a * m).trace() / k as f64;
        c[k - 1] = ck;
        prev = ck;
    }
    c
}

/// Hurwitz criterion for a monic quartic.
pub fn routh_hurwitz_quartic(c: [f64; 4]) -> bool {
    let [a1, a2, a3, a4] = c;
    a1 > 0.0
        && a2 > 0.0
        && a3 > 0.0
        && a4 > 0.0
        && a1 * a2 - a3 > 0.0
        && a1 * a2 * a3 - a3 * a3 - a1 * a1 * a4 > 0.0
}

pub fn is_stable(dd: &DriftDiffusion) -> Stability {
    let a = &dd.drift;
    let scale = a.norm().max(f64::MIN_POSITIVE);
    let eig = a.complex_eigenvalues();
    let zeros = eig
        .iter()
        .filter(|l| l.norm() <= ZERO_EIG_REL * scale)
        .count();
    let routh_hurwitz = routh_hurwitz_quartic(characteristic_polynomial(a));
    let max_re = eig.iter().map(|l| l.re).fold(f64::NEG_INFINITY, f64::max);
    if zeros > 0 || max_re.abs() <= ZERO_EIG_REL * scale {
        return Stability {
            stable: false,
            margin: max_re.max(0.0),
            routh_hurwitz,
        };
    }
    Stability {
        stable: max_re < 0.0,
        margin: max_re,
        routh_hurwitz,
    }
}

/// Smallest input power in `(0, p_max]` at which the system loses stability,
/// located by bisection. `None` when it stays stable up to `p_max`.
pub fn instability_threshold_power(sys: &OptomechSystem, p_max: f64) -> Result<Option<f64>> {
    if !(p_max > 0.0) {
        return Err(Error::domain("p_max", "must be positive"));
    }
    let margin = |p: f64| -> f64 {
        DriftDiffusion::from_system(&sys.with_drive(p, sys.drive.detuning))
            .map(|dd| is_stable(&dd))
            .map(|s| if s.stable { -1.0 } else { 1.0 })
            .unwrap_or(1.0)
    };
    if margin(p_max) < 0.0 {
        return Ok(None);
    }
    let lo = 1e-15 * p_max;
    if margin(lo) > 0.0 {
        return Ok(Some(0.0));
    }
    Ok(bisect(margin, lo, p_max, 1e-9 * p_max))
}
