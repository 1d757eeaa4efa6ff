//! The inverse pipeline: calibrated spectra, band integration with error
//! propagation, peak fitting and equipartition thermometry.

mod calibrate;
mod fit;
mod integrate;
mod io;
mod shot_noise;
mod thermometry;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use calibrate::{calibrate, measure_tone, CalibrationTone, ToneMeasurement};
pub use fit::{fit_peak, lorentzian, FitResult};
pub use integrate::{floor_integral, integrate_band, thermal_variance, Measured};
pub use shot_noise::{shot_noise_floor, ShotNoiseInputs};
pub use thermometry::{
    mode_thermometry, AnalysisReport, BudgetItems, CombinationRule, UncertaintyBudget,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum SpectrumUnit {
    #[serde(rename = "raw")]
    Raw,
    #[serde(rename = "m2_per_hz")]
    DisplacementPsd,
}

impl SpectrumUnit {
    pub fn as_str(self) -> &'static str {
        match self {
            SpectrumUnit::Raw => "raw",
            SpectrumUnit::DisplacementPsd => "m2_per_hz",
        }
    }
}

impl fmt::Display for SpectrumUnit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for SpectrumUnit {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "raw" => Ok(SpectrumUnit::Raw),
            "m2_per_hz" => Ok(SpectrumUnit::DisplacementPsd),
            other => Err(Error::domain("unit", format!("unknown unit tag {other:?}"))),
        }
    }
}

/// One-sided power spectral density on a strictly increasing grid (Hz).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Spectrum {
    freqs: Vec<f64>,
    psd: Vec<f64>,
    sigma: Option<Vec<f64>>,
    unit: SpectrumUnit,
}

impl Spectrum {
    pub fn new(
        freqs: Vec<f64>,
        psd: Vec<f64>,
        sigma: Option<Vec<f64>>,
        unit: SpectrumUnit,
    ) -> Result<Self> {
        if freqs.is_empty() {
            return Err(Error::domain("spectrum", "empty grid"));
        }
        if psd.len() != freqs.len() || sigma.as_ref().is_some_and(|s| s.len() != freqs.len()) {
            return Err(Error::domain("spectrum", "column lengths differ"));
        }
        if freqs.iter().any(|f| !f.is_finite()) {
            return Err(Error::domain("freq_hz", "non-finite frequency"));
        }
        if let Some(i) = freqs.windows(2).position(|w| w[1] <= w[0]) {
            return Err(Error::domain(
                "freq_hz",
                format!("grid not strictly increasing at index {}", i + 1),
            ));
        }
        if let Some(i) = psd.iter().position(|y| !(y.is_finite() && *y >= 0.0)) {
            return Err(Error::domain(
                "psd",
                format!("negative or non-finite value at index {i}"),
            ));
        }
        if let Some(s) = &sigma {
            if let Some(i) = s.iter().position(|y| !(y.is_finite() && *y >= 0.0)) {
                return Err(Error::domain(
                    "psd_sigma",
                    format!("negative or non-finite value at index {i}"),
                ));
            }
        }
        Ok(Self {
            freqs,
            psd,
            sigma,
            unit,
        })
    }

    pub fn freqs(&self) -> &[f64] {
        &self.freqs
    }

    pub fn psd(&self) -> &[f64] {
        &self.psd
    }

    pub fn sigma(&self) -> Option<&[f64]> {
        self.sigma.as_deref()
    }

    pub fn unit(&self) -> SpectrumUnit {
        self.unit
    }

    pub fn len(&self) -> usize {
        self.freqs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.freqs.is_empty()
    }

    /// Multiplies values and uncertainties by `factor ≥ 0`.
    pub fn scaled(&self, factor: f64) -> Result<Self> {
        if !(factor.is_finite() && factor >= 0.0) {
            return Err(Error::domain("factor", "must be finite and non-negative"));
        }
        Ok(Self {
            freqs: self.freqs.clone(),
            psd: self.psd.iter().map(|y| y * factor).collect(),
            sigma: self
                .sigma
                .as_ref()
                .map(|s| s.iter().map(|y| y * factor).collect()),
            unit: self.unit,
        })
    }

    pub(crate) fn with_unit(mut self, unit: SpectrumUnit) -> Self {
        self.unit = unit;
        self
    }

    /// Indices of bins whose whole interval `[f_i, f_{i+1}]` lies in `[lo, hi]`.
    pub(crate) fn interval_range(&self, lo: f64, hi: f64) -> std::ops::Range<usize> {
        let start = self.freqs.partition_point(|&f| f < lo);
        let end = self.freqs.partition_point(|&f| f <= hi);
        // bins start..end-1 have both edges inside
        start..end.saturating_sub(1).max(start)
    }
}
