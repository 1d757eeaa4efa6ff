use serde::{Deserialize, Serialize};

use super::{Spectrum, SpectrumUnit};
use crate::error::{Error, Result};

/// A value with its 1σ uncertainty.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Measured {
    pub value: f64,
    pub sigma: f64,
}

impl Measured {
    pub fn relative(&self) -> f64 {
        if self.value == 0.0 {
            if self.sigma == 0.0 {
                0.0
            } else {
                f64::INFINITY
            }
        } else {
            self.sigma / self.value.abs()
        }
    }
}

fn require_calibrated(spec: &Spectrum) -> Result<()> {
    if spec.unit() != SpectrumUnit::DisplacementPsd {
        return Err(Error::Unit {
            expected: SpectrumUnit::DisplacementPsd.as_str(),
            found: spec.unit().as_str(),
        });
    }
    Ok(())
}

/// Left Riemann sum `A = Σ (f_{i+1} − f_i) y_i` over the intervals lying in
/// `[lo, hi]`, with `δA = sqrt(Σ (f_{i+1} − f_i)² δy_i²)`.
pub fn integrate_band(spec: &Spectrum, band: (f64, f64)) -> Result<Measured> {
    require_calibrated(spec)?;
    riemann(spec, band, |_, y| y)
}

/// Integral of a constant floor `level` over the same intervals as
/// [`integrate_band`], carrying the spectrum's own per-bin uncertainties.
pub fn floor_integral(spec: &Spectrum, band: (f64, f64), level: f64) -> Result<Measured> {
    require_calibrated(spec)?;
    riemann(spec, band, |_, _| level)
}

pub(crate) fn riemann(
    spec: &Spectrum,
    (lo, hi): (f64, f64),
    value: impl Fn(usize, f64) -> f64,
) -> Result<Measured> {
    let range = spec.interval_range(lo, hi);
    if !(lo < hi) || range.is_empty() {
        return Err(Error::EmptyBand { lo, hi });
    }
    let f = spec.freqs();
    let y = spec.psd();
    let (mut area, mut var) = (0.0, 0.0);
    for i in range {
        let df = f[i + 1] - f[i];
        area += df * value(i, y[i]);
        if let Some(s) = spec.sigma() {
            var += (df * s[i]).powi(2);
        }
    }
    Ok(Measured {
        value: area,
        sigma: var.sqrt(),
    })
}

/// `⟨x²⟩ = A_total − A_floor` with uncertainties added in quadrature.
///
/// A negative difference within 2σ is clamped to zero; beyond 2σ the floor
/// model is rejected.
pub fn thermal_variance(total: Measured, floor: Measured) -> Result<Measured> {
    let value = total.value - floor.value;
    let sigma = total.sigma.hypot(floor.sigma);
    if value < 0.0 {
        if -value > 2.0 * sigma {
            return Err(Error::FloorModel(format!(
                "floor area {:e} exceeds total {:e} by more than 2σ ({sigma:e})",
                floor.value, total.value
            )));
        }
        return Ok(Measured { value: 0.0, sigma });
    }
    Ok(Measured { value, sigma })
}
