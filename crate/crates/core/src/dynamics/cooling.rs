use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{closed_form_effective, is_stable, DriftDiffusion, SteadyState};
use crate::constants::{HBAR, K_B};
use crate::error::{Error, Result};
use crate::model::{thermal_numbers, OptomechSystem};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CoolingPrediction {
    /// Sideband cooling rate G²/(2κ) (rad/s).
    pub gamma_sb: f64,
    /// Sideband-resolution limit κ²/(4ω_m²).
    pub n_min: f64,
    /// First-order estimate γ_th/Γ_sb.
    pub n_f: f64,
    /// Occupancy from the stationary covariance.
    pub n_full: f64,
    /// ħ ω_eff n_full / k_B (K).
    pub t_eff_pred: f64,
}

pub fn cooling_predictions(sys: &OptomechSystem) -> Result<CoolingPrediction> {
    let rates = sys.linearized_rates()?;
    let thermal = thermal_numbers(&sys.environment, &sys.mechanics)?;
    let gamma_sb = rates.coupling * rates.coupling / (2.0 * rates.kappa);
    let n_f = if gamma_sb > 0.0 {
        thermal.gamma_th / gamma_sb
    } else {
        thermal.n_th
    };
    let n_full = SteadyState::solve(&DriftDiffusion::from_rates(&rates))?.n_full;
    let omega_eff = closed_form_effective(&rates, rates.omega_m)?.omega_eff;
    Ok(CoolingPrediction {
        gamma_sb,
        n_min: rates.kappa * rates.kappa / (4.0 * rates.omega_m * rates.omega_m),
        n_f,
        n_full,
        t_eff_pred: HBAR * omega_eff * n_full / K_B,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NmsWarning {
    /// Set when G ≥ κ and normal-mode splitting can distort the spectrum.
    pub flag: bool,
    pub ratio: f64,
}

pub fn nms_warning(sys: &OptomechSystem) -> Result<NmsWarning> {
    let rates = sys.linearized_rates()?;
    let ratio = rates.coupling / rates.kappa;
    Ok(NmsWarning {
        flag: ratio >= 1.0,
        ratio,
    })
}

/// One cell of a detuning/power sweep. Unstable cells carry only the margin.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub detuning: f64,
    pub power: f64,
    pub stable: bool,
    pub margin: f64,
    pub omega_eff: Option<f64>,
    pub gamma_eff: Option<f64>,
    pub t_eff_pred: Option<f64>,
    pub n: Option<f64>,
}

fn sweep_cell(sys: &OptomechSystem, detuning: f64, power: f64) -> Result<SweepRow> {
    let cell = sys.with_drive(power, detuning);
    let rates = cell.linearized_rates()?;
    let dd = DriftDiffusion::from_rates(&rates);
    let stability = is_stable(&dd);
    let mut row = SweepRow {
        detuning,
        power,
        stable: stability.stable,
        margin: stability.margin,
        omega_eff: None,
        gamma_eff: None,
        t_eff_pred: None,
        n: None,
    };
    if !stability.stable {
        return Ok(row);
    }
    let n = SteadyState::solve(&dd)?.n_full;
    row.n = Some(n);
    match closed_form_effective(&rates, rates.omega_m) {
        Ok(e) => {
            row.omega_eff = Some(e.omega_eff);
            row.gamma_eff = Some(e.gamma_eff);
            row.t_eff_pred = Some(HBAR * e.omega_eff * n / K_B);
        }
        Err(Error::Domain { .. }) => {}
        Err(e) => return Err(e),
    }
    Ok(row)
}

/// Evaluates every (Δ, P) cell in parallel. Rows are ordered power-major,
/// detuning-minor, following the input order.
pub fn detuning_sweep(
    sys: &OptomechSystem,
    detunings: &[f64],
    powers: &[f64],
) -> Result<Vec<SweepRow>> {
    if detunings.is_empty() || powers.is_empty() {
        return Err(Error::domain(
            "sweep",
            "detuning and power lists must be non-empty",
        ));
    }
    sys.validate()?;
    let cells: Vec<(f64, f64)> = powers
        .iter()
        .flat_map(|&p| detunings.iter().map(move |&d| (d, p)))
        .collect();
    cells
        .par_iter()
        .map(|&(d, p)| sweep_cell(sys, d, p))
        .collect()
}
