use serde::{Deserialize, Serialize};

use super::{Spectrum, SpectrumUnit};
use crate::error::{ensure_positive, Error, Result};

/// Minimum tone signal-to-noise ratio accepted for calibration.
pub const MIN_TONE_SNR: f64 = 5.0;
/// Bins on each side of the tone bin counted as tone.
const TONE_HALF_WIDTH: usize = 3;
/// Bins on each side, beyond the tone, used for the local background.
const SIDE_BINS: usize = 20;

/// A laser frequency modulation of rms depth `fm_depth_hz` at `f_cal_hz`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CalibrationTone {
    pub f_cal_hz: f64,
    pub fm_depth_hz: f64,
    pub cavity_length: f64,
    pub optical_frequency_hz: f64,
}

impl CalibrationTone {
    pub fn validate(&self) -> Result<()> {
        ensure_positive("f_cal_hz", self.f_cal_hz)?;
        ensure_positive("fm_depth_hz", self.fm_depth_hz)?;
        ensure_positive("cavity_length", self.cavity_length)?;
        ensure_positive("optical_frequency_hz", self.optical_frequency_hz)
    }

    /// Cavity-length equivalent of the modulation, `L δν / ν` (m rms).
    pub fn equivalent_displacement(&self) -> f64 {
        self.cavity_length * self.fm_depth_hz / self.optical_frequency_hz
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ToneMeasurement {
    /// Background-subtracted tone area (raw units).
    pub area: f64,
    pub background: f64,
    pub snr: f64,
    /// Squared equivalent displacement over tone area (m² per raw unit).
    pub scale: f64,
}

fn bin_width(f: &[f64], i: usize) -> f64 {
    if i + 1 < f.len() {
        f[i + 1] - f[i]
    } else {
        f[i] - f[i - 1]
    }
}

/// Locates the tone peak near `f_cal` and integrates it above the local
/// background taken from the neighbouring bins.
pub fn measure_tone(raw: &Spectrum, tone: &CalibrationTone) -> Result<ToneMeasurement> {
    tone.validate()?;
    let f = raw.freqs();
    let y = raw.psd();
    if f.len() < 2 * (TONE_HALF_WIDTH + 2) + 1 {
        return Err(Error::Calibration(
            "spectrum too short to isolate the tone".into(),
        ));
    }
    if tone.f_cal_hz < f[0] || tone.f_cal_hz > f[f.len() - 1] {
        return Err(Error::Calibration(format!(
            "tone at {} Hz lies outside the grid [{}, {}] Hz",
            tone.f_cal_hz,
            f[0],
            f[f.len() - 1]
        )));
    }
    let nearest = f
        .iter()
        .enumerate()
        .min_by(|a, b| {
            (a.1 - tone.f_cal_hz)
                .abs()
                .total_cmp(&(b.1 - tone.f_cal_hz).abs())
        })
        .map(|(i, _)| i)
        .expect("non-empty grid");
    let lo = nearest.saturating_sub(TONE_HALF_WIDTH);
    let hi = (nearest + TONE_HALF_WIDTH).min(f.len() - 1);
    let side: Vec<f64> = (lo.saturating_sub(SIDE_BINS)..lo)
        .chain(hi + 1..(hi + 1 + SIDE_BINS).min(f.len()))
        .map(|i| y[i])
        .collect();
    if side.len() < 4 {
        return Err(Error::Calibration(
            "no background bins around the tone".into(),
        ));
    }
    let n = side.len() as f64;
    let background = side.iter().sum::<f64>() / n;
    let spread = (side.iter().map(|v| (v - background).powi(2)).sum::<f64>() / (n - 1.0)).sqrt();
    let peak = y[lo..=hi].iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let excess = peak - background;
    let noise = if spread > 0.0 {
        spread
    } else {
        raw.sigma()
            .map(|s| (lo..=hi).map(|i| s[i]).sum::<f64>() / (hi - lo + 1) as f64)
            .unwrap_or(0.0)
    };
    let snr = if noise > 0.0 {
        excess / noise
    } else if excess > 0.0 {
        f64::INFINITY
    } else {
        0.0
    };
    if !(snr >= MIN_TONE_SNR) {
        return Err(Error::Calibration(format!(
            "tone SNR {snr:.3} below {MIN_TONE_SNR}"
        )));
    }
    let area: f64 = (lo..=hi)
        .map(|i| bin_width(f, i) * (y[i] - background))
        .sum();
    if !(area > 0.0) {
        return Err(Error::Calibration("tone area is not positive".into()));
    }
    let x_eq = tone.equivalent_displacement();
    Ok(ToneMeasurement {
        area,
        background,
        snr,
        scale: x_eq * x_eq / area,
    })
}

/// Converts a raw spectrum to displacement PSD (m²/Hz) using the tone.
pub fn calibrate(raw: &Spectrum, tone: &CalibrationTone) -> Result<Spectrum> {
    if raw.unit() != SpectrumUnit::Raw {
        return Err(Error::Unit {
            expected: SpectrumUnit::Raw.as_str(),
            found: raw.unit().as_str(),
        });
    }
    let m = measure_tone(raw, tone)?;
    Ok(raw
        .scaled(m.scale)?
        .with_unit(SpectrumUnit::DisplacementPsd))
}
