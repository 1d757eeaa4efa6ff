use serde::{Deserialize, Serialize};

use super::ModeShape;
use crate::error::{ensure_positive, Error, Result};

/// Gaussian readout spot on the beam axis.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Probe {
    /// 1/e² intensity radius (m).
    pub waist: f64,
    /// Axial position of the spot centre (m).
    pub center: f64,
}

/// `⟨u⟩_I = ∫ I u dx / ∫ I dx` over the beam with `I ∝ exp(−2(x−x₀)²/w²)`.
///
/// Spots narrower than two grid spacings read `u(x₀)` directly.
pub fn intensity_weighted_displacement(shape: &ModeShape, probe: &Probe) -> Result<f64> {
    ensure_positive("waist", probe.waist)?;
    let (x0, w) = (probe.center, probe.waist);
    let xs = &shape.x;
    let (lo, hi) = (xs[0], xs[xs.len() - 1]);
    if x0 + 4.0 * w < lo || x0 - 4.0 * w > hi {
        return Err(Error::ProbeOffBeam);
    }
    if !(lo..=hi).contains(&x0) {
        return Err(Error::domain("probe center", "must lie on the beam"));
    }
    let dx = (hi - lo) / (xs.len() - 1) as f64;
    if w < 2.0 * dx {
        return Ok(shape.interpolate(x0));
    }
    let intensity = |x: f64| (-2.0 * ((x - x0) / w).powi(2)).exp();
    let (mut num, mut den) = (0.0, 0.0);
    for i in 0..xs.len() - 1 {
        let h = xs[i + 1] - xs[i];
        let (ia, ib) = (intensity(xs[i]), intensity(xs[i + 1]));
        num += 0.5 * h * (ia * shape.u[i] + ib * shape.u[i + 1]);
        den += 0.5 * h * (ia + ib);
    }
    if den <= 0.0 {
        return Err(Error::ProbeOffBeam);
    }
    Ok(num / den)
}

/// `m_eff = m_mode / ⟨u⟩_I²`.
pub fn effective_mass(shape: &ModeShape, m_mode: f64, probe: &Probe) -> Result<f64> {
    ensure_positive("m_mode", m_mode)?;
    let avg = intensity_weighted_displacement(shape, probe)?;
    if avg == 0.0 {
        return Err(Error::domain("probe", "spot sits on a node"));
    }
    Ok(m_mode / (avg * avg))
}
