use serde::{Deserialize, Serialize};

use super::Measured;
use crate::constants::{HBAR, K_B};
use crate::error::{ensure_non_negative, ensure_positive, Result};
use crate::model::MechanicalMode;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CombinationRule {
    #[default]
    Quadrature,
    Linear,
}

/// Relative systematic uncertainties, as fractions.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct UncertaintyBudget {
    pub calibration: f64,
    pub frequency: f64,
    pub power: f64,
    pub rule: CombinationRule,
}

impl Default for UncertaintyBudget {
    fn default() -> Self {
        Self {
            calibration: 0.12,
            frequency: 0.05,
            power: 0.10,
            rule: CombinationRule::Quadrature,
        }
    }
}

/// Itemised relative uncertainties on ⟨n⟩.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BudgetItems {
    pub area: f64,
    pub calibration: f64,
    pub frequency: f64,
    pub power: f64,
}

impl BudgetItems {
    fn as_array(&self) -> [f64; 4] {
        [self.area, self.calibration, self.frequency, self.power]
    }

    pub fn quadrature(&self) -> f64 {
        self.as_array().iter().map(|x| x * x).sum::<f64>().sqrt()
    }

    pub fn linear(&self) -> f64 {
        self.as_array().iter().sum()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AnalysisReport {
    pub variance: Measured,
    pub t_eff: f64,
    pub n: f64,
    pub budget: BudgetItems,
    pub rule: CombinationRule,
    /// Combined relative uncertainty under `rule`.
    pub combined_relative: f64,
    pub combined_quadrature: f64,
    pub combined_linear: f64,
    /// Absolute 1σ uncertainty on ⟨n⟩ under `rule`.
    pub n_sigma: f64,
}

/// Equipartition thermometry: `T_eff = m ω² ⟨x²⟩ / k_B`, `⟨n⟩ = k_B T_eff / (ħ ω)`.
pub fn mode_thermometry(
    variance: Measured,
    mech: &MechanicalMode,
    omega_eff: f64,
    budget: &UncertaintyBudget,
) -> Result<AnalysisReport> {
    ensure_positive("omega_eff", omega_eff)?;
    ensure_positive("effective_mass", mech.effective_mass)?;
    ensure_non_negative("variance", variance.value)?;
    ensure_non_negative("variance sigma", variance.sigma)?;
    for (name, v) in [
        ("calibration", budget.calibration),
        ("frequency", budget.frequency),
        ("power", budget.power),
    ] {
        ensure_non_negative(name, v)?;
    }
    let t_eff = mech.effective_mass * omega_eff * omega_eff * variance.value / K_B;
    let n = K_B * t_eff / (HBAR * omega_eff);
    let items = BudgetItems {
        area: if variance.value > 0.0 {
            variance.relative()
        } else {
            0.0
        },
        calibration: budget.calibration,
        frequency: budget.frequency,
        power: budget.power,
    };
    let (q, l) = (items.quadrature(), items.linear());
    let combined = match budget.rule {
        CombinationRule::Quadrature => q,
        CombinationRule::Linear => l,
    };
    Ok(AnalysisReport {
        variance,
        t_eff,
        n,
        budget: items,
        rule: budget.rule,
        combined_relative: combined,
        combined_quadrature: q,
        combined_linear: l,
        n_sigma: combined * n,
    })
}
