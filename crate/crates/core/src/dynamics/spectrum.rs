use nalgebra::{Complex, Vector4};

use super::{is_stable, DriftDiffusion};
use crate::error::{Error, Result};
use crate::model::OptomechSystem;
use crate::numerics::quadrature::{adaptive, adaptive_to_infinity, Estimate};
use crate::spectral::{Spectrum, SpectrumUnit};

/// Symmetrised position spectrum `S_qq(ω)`, the (q, q) entry of
/// `(A + iωI)⁻¹ D (Aᵀ − iωI)⁻¹`.
pub fn qq_density(dd: &DriftDiffusion, omega: f64) -> f64 {
    let mut m = dd.drift.map(|x| Complex::new(x, 0.0));
    for i in 0..4 {
        m[(i, i)] += Complex::new(0.0, omega);
    }
    // row 0 of the resolvent
    let Some(r) = m.transpose().lu().solve(&Vector4::x()) else {
        return f64::INFINITY;
    };
    let d = &dd.diffusion;
    let mut s = Complex::new(0.0, 0.0);
    for k in 0..4 {
        for l in 0..4 {
            if d[(k, l)] != 0.0 {
                s += r[k] * d[(k, l)] * r[l].conj();
            }
        }
    }
    s.re.max(0.0)
}

/// One-sided displacement noise power spectral density (m²/Hz) at the given
/// frequencies, normalised so that its integral over `[0, ∞)` is `⟨x²⟩`.
pub fn displacement_nps(sys: &OptomechSystem, freqs_hz: &[f64]) -> Result<Spectrum> {
    let dd = DriftDiffusion::from_system(sys)?;
    let stability = is_stable(&dd);
    if !stability.stable {
        return Err(Error::Unstable {
            margin: stability.margin,
        });
    }
    let x_zpf = sys.mechanics.rates()?.x_zpf;
    let scale = 4.0 * x_zpf * x_zpf;
    let psd = freqs_hz
        .iter()
        .map(|&f| scale * qq_density(&dd, std::f64::consts::TAU * f))
        .collect();
    Spectrum::new(freqs_hz.to_vec(), psd, None, SpectrumUnit::DisplacementPsd)
}

/// `V_qq = (1/π) ∫₀^∞ S_qq(ω) dω` by adaptive quadrature, split at the
/// resonances of the drift matrix.
pub fn spectral_variance(dd: &DriftDiffusion) -> Result<Estimate> {
    let stability = is_stable(dd);
    if !stability.stable {
        return Err(Error::Unstable {
            margin: stability.margin,
        });
    }
    let eig = dd.drift.complex_eigenvalues();
    let mut breaks = Vec::new();
    let mut top: f64 = 0.0;
    for l in eig.iter() {
        let centre = l.im.abs();
        let width = l.re.abs();
        top = top.max(centre + 64.0 * width);
        breaks.push(centre);
        for k in [1.0, 4.0, 16.0, 64.0] {
            breaks.push(centre - k * width);
            breaks.push(centre + k * width);
        }
    }
    breaks.retain(|&x| x > 0.0);
    breaks.sort_by(f64::total_cmp);
    let top = top.max(1.0);
    let f = |w: f64| qq_density(dd, w);
    let body = adaptive(f, 0.0, top, &breaks, 1e-11, 0.0, 20_000);
    let tail = adaptive_to_infinity(f, top, 1e-11, 1e-14 * body.value.abs(), 5_000);
    Ok(Estimate {
        value: (body.value + tail.value) / std::f64::consts::PI,
        error: (body.error + tail.error) / std::f64::consts::PI,
        converged: body.converged && tail.converged,
    })
}
