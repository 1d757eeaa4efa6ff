use std::f64::consts::TAU;

use nalgebra::Complex;
use serde::{Deserialize, Serialize};

use super::{is_stable, qq_density, DriftDiffusion};
use crate::error::{Error, Result};
use crate::model::{LinearizedRates, OptomechSystem};
use crate::spectral::{fit_peak, Spectrum, SpectrumUnit};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum EffectiveMethod {
    ClosedForm,
    SpectrumFit,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EffectiveParams {
    pub omega_eff: f64,
    pub gamma_eff: f64,
    /// Frequency at which the response was evaluated (rad/s).
    pub evaluation_frequency: f64,
    pub method: EffectiveMethod,
}

/// Radiation-pressure shifts `(δ(ω²), δγ)` of the mechanical response at `omega`:
/// `δγ = 2κ ω_m G² Δ / d` and `δ(ω²) = −ω_m G² Δ (κ² + Δ² − ω²) / d`,
/// with `d = [κ² + (ω−Δ)²][κ² + (ω+Δ)²]`. Both are exactly odd in Δ.
pub fn optical_shifts(r: &LinearizedRates, omega: f64) -> Result<(f64, f64)> {
    let (k, d) = (r.kappa, r.detuning);
    let denom = (k * k + (omega - d).powi(2)) * (k * k + (omega + d).powi(2));
    if denom == 0.0 {
        return Err(Error::Singular("κ = 0 with ω = ±Δ".into()));
    }
    let g2 = r.coupling * r.coupling;
    let d_gamma = 2.0 * k * r.omega_m * g2 * d / denom;
    let d_omega_sq = -(r.omega_m * g2 * d * (k * k + d * d - omega * omega)) / denom;
    Ok((d_omega_sq, d_gamma))
}

/// Optical-spring frequency and damping evaluated at `omega`; see
/// [`optical_shifts`].
pub fn closed_form_effective(r: &LinearizedRates, omega: f64) -> Result<EffectiveParams> {
    let (d_omega_sq, d_gamma) = optical_shifts(r, omega)?;
    let omega_sq = r.omega_m * r.omega_m + d_omega_sq;
    if !(omega_sq > 0.0) {
        return Err(Error::domain(
            "omega_eff",
            format!("optical spring drives ω_eff² to {omega_sq:e}"),
        ));
    }
    Ok(EffectiveParams {
        omega_eff: omega_sq.sqrt(),
        gamma_eff: r.gamma_m + d_gamma,
        evaluation_frequency: omega,
        method: EffectiveMethod::ClosedForm,
    })
}

/// Closed-form effective parameters at detuning `detuning` (rad/s),
/// evaluated at the bare resonance.
pub fn effective_params(sys: &OptomechSystem, detuning: f64) -> Result<EffectiveParams> {
    let sys = sys.with_drive(sys.drive.power, detuning);
    let rates = sys.linearized_rates()?;
    let stability = is_stable(&DriftDiffusion::from_rates(&rates));
    if !stability.stable {
        return Err(Error::Unstable {
            margin: stability.margin,
        });
    }
    closed_form_effective(&rates, rates.omega_m)
}

/// Spectrum-fit counterpart of [`effective_params`].
pub fn effective_params_fit(sys: &OptomechSystem, detuning: f64) -> Result<EffectiveParams> {
    let sys = sys.with_drive(sys.drive.power, detuning);
    fit_effective_from_rates(&sys.linearized_rates()?)
}

/// Synthesises `S_qq` on a 401-point grid around the mechanical-like pole and
/// fits a Lorentzian plus floor to it.
///
/// The grid spans ±8 linewidths of the pole of `A` nearest `iω_m` in the
/// complex plane, so the window does not depend on the closed forms it is
/// compared against.
pub fn fit_effective_from_rates(r: &LinearizedRates) -> Result<EffectiveParams> {
    const POINTS: usize = 401;
    let dd = DriftDiffusion::from_rates(r);
    let stability = is_stable(&dd);
    if !stability.stable {
        return Err(Error::Unstable {
            margin: stability.margin,
        });
    }
    let pole = dd
        .drift
        .complex_eigenvalues()
        .iter()
        .copied()
        .filter(|l| l.im >= 0.0)
        .min_by(|a, b| {
            let d = |l: &Complex<f64>| (l.im - r.omega_m).hypot(l.re);
            d(a).total_cmp(&d(b))
        })
        .ok_or_else(|| Error::Singular("no oscillatory pole".into()))?;
    let (centre, width) = (pole.im, -2.0 * pole.re);
    let lo = (centre - 8.0 * width).max(0.01 * centre);
    let hi = centre + 8.0 * width;
    let freqs: Vec<f64> = (0..POINTS)
        .map(|i| (lo + (hi - lo) * i as f64 / (POINTS - 1) as f64) / TAU)
        .collect();
    let psd = freqs
        .iter()
        .map(|&f| 4.0 * qq_density(&dd, TAU * f))
        .collect();
    let spec = Spectrum::new(freqs, psd, None, SpectrumUnit::DisplacementPsd)?;
    let fit = fit_peak(&spec, (lo / TAU, hi / TAU))?;
    Ok(EffectiveParams {
        omega_eff: TAU * fit.center_hz,
        gamma_eff: TAU * fit.fwhm_hz,
        evaluation_frequency: TAU * fit.center_hz,
        method: EffectiveMethod::SpectrumFit,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::fixtures::{device_system, OMEGA_M};

    fn weak(detuning: f64) -> LinearizedRates {
        LinearizedRates {
            omega_m: 1.0,
            gamma_m: 1e-4,
            kappa: 0.8,
            detuning,
            coupling: 0.03,
            n_th: 100.0,
        }
    }

    #[test]
    fn zero_coupling_is_bare() {
        let mut r = weak(1.0);
        r.coupling = 0.0;
        let e = closed_form_effective(&r, r.omega_m).unwrap();
        assert_eq!(e.omega_eff, r.omega_m);
        assert_eq!(e.gamma_eff, r.gamma_m);
    }

    #[test]
    fn shifts_are_odd_in_detuning() {
        for d in [0.2, 0.9, 1.0, 1.7] {
            let (w_p, g_p) = optical_shifts(&weak(d), 1.0).unwrap();
            let (w_m, g_m) = optical_shifts(&weak(-d), 1.0).unwrap();
            assert_eq!(g_p, -g_m);
            assert_eq!(w_p, -w_m);
            assert!(g_p > 0.0);
        }
    }

    #[test]
    fn resolved_sideband_damping_at_upper_detuning() {
        // at Δ = ω = ω_m: γ_eff − γ_m = 2κω_m²G²/(κ²(κ² + 4ω_m²))
        let sys = device_system(0.5);
        let r = sys.linearized_rates().unwrap();
        let e = effective_params(&sys, OMEGA_M).unwrap();
        let k = r.kappa;
        let want = 2.0 * k * OMEGA_M.powi(2) * r.coupling.powi(2)
            / (k * k * (k * k + 4.0 * OMEGA_M.powi(2)));
        assert!(((e.gamma_eff - r.gamma_m) / want - 1.0).abs() < 1e-12);
        // scipy-evaluated value at the bundled operating point
        assert!(
            (e.gamma_eff / 635_632.086 - 1.0).abs() < 1e-7,
            "{}",
            e.gamma_eff
        );
    }

    #[test]
    fn fit_matches_closed_form_in_weak_coupling() {
        for d in [0.5, 1.0, 1.5] {
            let r = weak(d);
            let c = closed_form_effective(&r, r.omega_m).unwrap();
            let f = fit_effective_from_rates(&r).unwrap();
            assert_eq!(f.method, EffectiveMethod::SpectrumFit);
            assert!(
                (f.omega_eff / c.omega_eff - 1.0).abs() < 1e-3,
                "{f:?} {c:?}"
            );
            assert!(
                (f.gamma_eff / c.gamma_eff - 1.0).abs() < 1e-2,
                "{f:?} {c:?}"
            );
        }
    }

    #[test]
    fn unstable_request_carries_margin() {
        let sys = device_system(1.0);
        match effective_params(&sys, -OMEGA_M) {
            Err(Error::Unstable { margin }) => assert!(margin > 0.0),
            other => panic!("{other:?}"),
        }
    }
}
