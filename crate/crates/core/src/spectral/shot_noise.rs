use serde::{Deserialize, Serialize};

use crate::constants::{C, H};
use crate::error::{ensure_non_negative, ensure_positive, Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ShotNoiseInputs {
    pub wavelength: f64,
    pub finesse: f64,
    /// Readout power (W).
    pub power: f64,
    pub omega_m: f64,
    pub kappa: f64,
    pub input_transmission: f64,
    pub loss: f64,
    /// Mode-matched part of the readout power (W).
    pub mode_matched_power: f64,
}

/// Displacement-equivalent shot-noise floor (m/√Hz):
///
/// `δx = λ / (16 F √(P λ / h c)) · √(1 + (ω_m/κ)²) · √((T + l)/T) · P / P_MM`
pub fn shot_noise_floor(p: &ShotNoiseInputs) -> Result<f64> {
    ensure_positive("wavelength", p.wavelength)?;
    ensure_positive("finesse", p.finesse)?;
    ensure_positive("power", p.power)?;
    ensure_non_negative("omega_m", p.omega_m)?;
    ensure_positive("kappa", p.kappa)?;
    ensure_positive("input_transmission", p.input_transmission)?;
    ensure_non_negative("loss", p.loss)?;
    ensure_positive("mode_matched_power", p.mode_matched_power)?;
    if p.mode_matched_power > p.power {
        return Err(Error::domain(
            "mode_matched_power",
            "exceeds the readout power",
        ));
    }
    let photon_rate = p.power * p.wavelength / (H * C);
    let base = p.wavelength / (16.0 * p.finesse * photon_rate.sqrt());
    let sideband = (1.0 + (p.omega_m / p.kappa).powi(2)).sqrt();
    let coupling = ((p.input_transmission + p.loss) / p.input_transmission).sqrt();
    Ok(base * sideband * coupling * (p.power / p.mode_matched_power))
}
