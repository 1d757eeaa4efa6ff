//! Damped least-squares fit of a Lorentzian on a constant floor.

use std::f64::consts::PI;

use nalgebra::{Matrix4, Vector4};
use serde::{Deserialize, Serialize};

use super::Spectrum;
use crate::error::{Error, Result};

const MAX_ITER: usize = 200;
const STEP_TOL: f64 = 1e-10;
const RESIDUAL_TOL: f64 = 1e-12;
const MIN_POINTS: usize = 8;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FitResult {
    pub center_hz: f64,
    pub fwhm_hz: f64,
    /// Area under the Lorentzian (spectrum units × Hz).
    pub area: f64,
    pub floor: f64,
    pub center_sigma: f64,
    pub fwhm_sigma: f64,
    pub area_sigma: f64,
    pub floor_sigma: f64,
    pub converged: bool,
    pub iterations: usize,
    /// Euclidean norm of the (weighted) residual vector.
    pub residual_norm: f64,
    /// Window actually fitted.
    pub window_hz: (f64, f64),
    pub warnings: Vec<String>,
}

/// `area · (w/2)/π / ((f − f0)² + (w/2)²) + floor`.
pub fn lorentzian(f: f64, center: f64, fwhm: f64, area: f64, floor: f64) -> f64 {
    let hw = 0.5 * fwhm;
    area * hw / PI / ((f - center).powi(2) + hw * hw) + floor
}

struct Problem<'a> {
    f: &'a [f64],
    y: &'a [f64],
    /// Inverse weights per point.
    s: Vec<f64>,
    /// Physical parameters are `offset + scale·u`.
    offset: [f64; 4],
    scale: [f64; 4],
}

impl Problem<'_> {
    fn params(&self, u: &Vector4<f64>) -> [f64; 4] {
        std::array::from_fn(|k| self.offset[k] + self.scale[k] * u[k])
    }

    fn admissible(&self, u: &Vector4<f64>) -> bool {
        let p = self.params(u);
        p[1] > 0.0 && p[2] >= 0.0 && p.iter().all(|x| x.is_finite())
    }

    fn residuals(&self, u: &Vector4<f64>) -> Vec<f64> {
        let [c, w, a, b] = self.params(u);
        self.f
            .iter()
            .zip(self.y)
            .zip(&self.s)
            .map(|((&f, &y), &s)| (y - lorentzian(f, c, w, a, b)) / s)
            .collect()
    }

    fn cost(r: &[f64]) -> f64 {
        r.iter().map(|x| x * x).sum()
    }

    /// Central-difference Jacobian of the residuals.
    fn jacobian(&self, u: &Vector4<f64>) -> Vec<[f64; 4]> {
        let mut jac = vec![[0.0; 4]; self.f.len()];
        for k in 0..4 {
            let h = 1e-6 * u[k].abs().max(1.0);
            let mut up = *u;
            let mut dn = *u;
            up[k] += h;
            dn[k] -= h;
            // keep the width positive while differencing
            if k == 1 && !self.admissible(&dn) {
                dn[k] = u[k];
            }
            let rp = self.residuals(&up);
            let rm = self.residuals(&dn);
            let span = up[k] - dn[k];
            for (row, (p, m)) in jac.iter_mut().zip(rp.iter().zip(&rm)) {
                row[k] = (p - m) / span;
            }
        }
        jac
    }

    fn normal_equations(&self, u: &Vector4<f64>, r: &[f64]) -> (Matrix4<f64>, Vector4<f64>) {
        let jac = self.jacobian(u);
        let mut jtj = Matrix4::zeros();
        let mut jtr = Vector4::zeros();
        for (row, &ri) in jac.iter().zip(r) {
            for a in 0..4 {
                jtr[a] += row[a] * ri;
                for b in 0..4 {
                    jtj[(a, b)] += row[a] * row[b];
                }
            }
        }
        (jtj, jtr)
    }
}

/// Boxcar half-width is the window length divided by this.
const SMOOTH_DIVISOR: usize = 400;

/// Centered moving average of half-width `h`, truncated at the ends.
fn boxcar(y: &[f64], h: usize) -> Vec<f64> {
    if h == 0 {
        return y.to_vec();
    }
    let mut prefix = Vec::with_capacity(y.len() + 1);
    prefix.push(0.0);
    for v in y {
        prefix.push(prefix[prefix.len() - 1] + v);
    }
    (0..y.len())
        .map(|i| {
            let (a, b) = (i.saturating_sub(h), (i + h + 1).min(y.len()));
            (prefix[b] - prefix[a]) / (b - a) as f64
        })
        .collect()
}

struct Guess {
    center: f64,
    fwhm: f64,
    area: f64,
    floor: f64,
    height: f64,
}

fn initial_guess(f: &[f64], y: &[f64]) -> Guess {
    let (k, &peak) = y
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.total_cmp(b.1))
        .expect("non-empty window");
    let floor = y.iter().copied().fold(f64::INFINITY, f64::min);
    let height = (peak - floor).max(f64::MIN_POSITIVE);
    let half = floor + 0.5 * height;
    let cross = |i: usize, j: usize| -> f64 {
        // linear interpolation of the half-maximum crossing between bins i and j
        let t = (y[i] - half) / (y[i] - y[j]);
        f[i] + t * (f[j] - f[i])
    };
    let left = (0..k).rev().find(|&i| y[i] < half).map(|i| cross(i + 1, i));
    let right = (k + 1..y.len())
        .find(|&i| y[i] < half)
        .map(|i| cross(i - 1, i));
    let span = f[f.len() - 1] - f[0];
    let fwhm = match (left, right) {
        (Some(l), Some(r)) => r - l,
        (Some(l), None) => 2.0 * (f[k] - l),
        (None, Some(r)) => 2.0 * (r - f[k]),
        (None, None) => 0.25 * span,
    }
    .max(span / (4.0 * f.len() as f64));
    Guess {
        center: f[k],
        fwhm,
        area: 0.5 * PI * height * fwhm,
        floor,
        height,
    }
}

/// Returns a narrower window around the largest peak when a second,
/// separated peak is present.
fn isolate_largest(f: &[f64], y: &[f64], g: &Guess) -> Option<(f64, f64)> {
    let k = f.iter().position(|&x| x == g.center)?;
    let half = g.floor + 0.5 * g.height;
    let mut lo = k;
    while lo > 0 && y[lo - 1] >= half {
        lo -= 1;
    }
    let mut hi = k;
    while hi + 1 < y.len() && y[hi + 1] >= half {
        hi += 1;
    }
    let (j, &m2) = y
        .iter()
        .enumerate()
        .filter(|(i, _)| *i < lo || *i > hi)
        .max_by(|a, b| a.1.total_cmp(b.1))?;
    let prominence = m2 - g.floor;
    if prominence < 0.25 * g.height {
        return None;
    }
    let between = if j < lo { j..lo } else { hi + 1..j + 1 };
    let (valley_idx, &valley) = between
        .clone()
        .map(|i| (i, &y[i]))
        .min_by(|a, b| a.1.total_cmp(b.1))?;
    if valley > g.floor + 0.5 * prominence {
        return None;
    }
    let reach = (f[valley_idx] - f[k]).abs();
    Some((f[k] - reach, f[k] + reach))
}

/// Fits one Lorentzian plus floor to the bins of `spec` within `window`.
///
/// Non-convergence is reported through [`FitResult::converged`], not as an
/// error. If the window holds more than one peak the largest is fitted on a
/// narrower window and a warning is recorded.
pub fn fit_peak(spec: &Spectrum, window: (f64, f64)) -> Result<FitResult> {
    let (lo, hi) = window;
    let start = spec.freqs().partition_point(|&f| f < lo);
    let end = spec.freqs().partition_point(|&f| f <= hi);
    if !(lo < hi) || end < start + MIN_POINTS {
        return Err(Error::EmptyBand { lo, hi });
    }
    let f = &spec.freqs()[start..end];
    let y = &spec.psd()[start..end];
    // starting values and peak isolation work on a lightly smoothed copy so
    // that single noisy bins are not mistaken for the peak
    let smooth = boxcar(y, y.len() / SMOOTH_DIVISOR);
    let guess = initial_guess(f, &smooth);

    if let Some(sub) = isolate_largest(f, &smooth, &guess) {
        let narrowed = (sub.0.max(lo), sub.1.min(hi));
        let count = f
            .iter()
            .filter(|&&x| x >= narrowed.0 && x <= narrowed.1)
            .count();
        if count >= MIN_POINTS && count < f.len() {
            let mut result = fit_peak(spec, narrowed)?;
            result.warnings.insert(
                0,
                format!(
                    "multiple peaks in [{lo}, {hi}] Hz; fitted the largest on [{}, {}] Hz",
                    narrowed.0, narrowed.1
                ),
            );
            return Ok(result);
        }
    }

    let sigma = spec.sigma().map(|s| &s[start..end]);
    let weights_usable = sigma.is_some_and(|s| s.iter().all(|&v| v > 0.0));
    let s = match sigma {
        Some(s) if weights_usable => s.to_vec(),
        _ => vec![guess.height; f.len()],
    };
    let mut warnings = Vec::new();
    if sigma.is_some() && !weights_usable {
        warnings.push("zero per-bin sigma present; fitted unweighted".to_string());
    }
    let problem = Problem {
        f,
        y,
        s,
        offset: [guess.center, 0.0, 0.0, guess.floor],
        scale: [guess.fwhm, guess.fwhm, guess.area, guess.height],
    };

    let mut u = Vector4::new(0.0, 1.0, 1.0, 0.0);
    let mut r = problem.residuals(&u);
    let mut cost = Problem::cost(&r);
    let mut lambda = 1e-3;
    let mut converged = false;
    let mut iterations = 0;
    let (mut jtj, mut jtr) = problem.normal_equations(&u, &r);

    while iterations < MAX_ITER {
        iterations += 1;
        let mut damped = jtj;
        for d in 0..4 {
            damped[(d, d)] += lambda * jtj[(d, d)].max(1e-30);
        }
        // J is the Jacobian of the residuals, so the step solves (JᵀJ + λD) δ = −Jᵀr
        let Some(step) = damped.cholesky().map(|c| c.solve(&(-jtr))) else {
            lambda *= 10.0;
            if lambda > 1e20 {
                break;
            }
            continue;
        };
        let trial = u + step;
        let accepted = if problem.admissible(&trial) {
            let r_new = problem.residuals(&trial);
            let c_new = Problem::cost(&r_new);
            if c_new.is_finite() && c_new <= cost {
                let drop = cost - c_new;
                u = trial;
                r = r_new;
                let small_drop = drop <= RESIDUAL_TOL * cost;
                cost = c_new;
                let small_step = step.norm() <= STEP_TOL * (u.norm() + STEP_TOL);
                if small_step || small_drop || cost == 0.0 {
                    converged = true;
                    break;
                }
                (jtj, jtr) = problem.normal_equations(&u, &r);
                lambda = (lambda / 10.0).max(1e-15);
                true
            } else {
                false
            }
        } else {
            false
        };
        if !accepted {
            if step.norm() <= STEP_TOL * (u.norm() + STEP_TOL) {
                converged = true;
                break;
            }
            lambda *= 10.0;
            if lambda > 1e20 {
                break;
            }
        }
    }
    if !converged {
        warnings.push(format!(
            "fit did not converge within {iterations} iterations"
        ));
    }

    let (jtj, _) = problem.normal_equations(&u, &r);
    let dof = (f.len() as f64 - 4.0).max(1.0);
    let s2 = cost / dof;
    let cov = jtj.try_inverse().map(|m| m * s2);
    if cov.is_none() {
        warnings.push("normal matrix is singular; uncertainties unavailable".to_string());
    }
    let sd = |k: usize| -> f64 {
        cov.map(|c| c[(k, k)].max(0.0).sqrt() * problem.scale[k].abs())
            .unwrap_or(f64::NAN)
    };
    let p = problem.params(&u);
    Ok(FitResult {
        center_hz: p[0],
        fwhm_hz: p[1],
        area: p[2],
        floor: p[3],
        center_sigma: sd(0),
        fwhm_sigma: sd(1),
        area_sigma: sd(2),
        floor_sigma: sd(3),
        converged,
        iterations,
        residual_norm: cost.sqrt(),
        window_hz: (f[0], f[f.len() - 1]),
        warnings,
    })
}
