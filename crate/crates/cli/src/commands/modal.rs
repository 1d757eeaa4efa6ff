use optomech_core::modal::{
    beam_mode_with, clamped_root, intensity_weighted_displacement, modal_mass, PadModel,
};
use optomech_core::{effective_mass, mass_budget, spring_mass, stack_mass, ModeShape};
use serde::{Deserialize, Serialize};

use crate::config::{ModalConfig, RunConfig};
use crate::error::CliError;

/// Mode-mass fraction quoted for the ideal beam.
pub const MODE_MASS_FRACTION_REFERENCE: f64 = 0.74;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StackSummary {
    pub mass_kg: f64,
    /// Pad mass at the ends of the configured high-index density range.
    pub mass_range_kg: Option<[f64; 2]>,
    pub thickness_m: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ShapeSummary {
    pub frequency_hz: f64,
    pub modal_mass_kg: f64,
    pub mass_fraction: f64,
    pub probe_average: f64,
    pub effective_mass_kg: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpringSummary {
    pub spring_constant_n_per_m: f64,
    /// `k/ω_m²` at the configured mechanical frequency.
    pub mode_mass_kg: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModalReport {
    pub beta_l: f64,
    pub stack: StackSummary,
    pub beam_mass_kg: f64,
    pub total_mass_kg: f64,
    /// Bare clamped-clamped shape; the fraction is relative to the bare beam.
    pub bare: ShapeSummary,
    /// Bare shape carrying the pad mass.
    pub ideal_loaded: ShapeSummary,
    /// Rayleigh–Ritz shape of the pad-loaded beam.
    pub pad_model: PadModel,
    pub loaded: ShapeSummary,
    /// Relative change of the probe-overlap mass from the ideal to the loaded shape.
    pub shape_correction: f64,
    pub mode_mass_fraction_reference: f64,
    pub spring: Option<SpringSummary>,
}

fn summary(
    shape: &ModeShape,
    m_mode: f64,
    fraction: f64,
    m: &ModalConfig,
) -> Result<ShapeSummary, CliError> {
    let probe = m.probe();
    Ok(ShapeSummary {
        frequency_hz: shape.omega / (2.0 * std::f64::consts::PI),
        modal_mass_kg: m_mode,
        mass_fraction: fraction,
        probe_average: intensity_weighted_displacement(shape, &probe)?,
        effective_mass_kg: effective_mass(shape, m_mode, &probe)?,
    })
}

/// Returns the report and the loaded mode shape.
pub fn run_modal(cfg: &RunConfig) -> Result<(ModalReport, ModeShape), CliError> {
    let m = cfg
        .modal
        .as_ref()
        .ok_or_else(|| CliError::Input("config has no [modal] section".into()))?;
    let stack = m.stack();
    let bare = m.bare_beam();
    let loaded_geom = m.loaded_beam(m.stack.pad_model)?;
    let ideal_geom = m.loaded_beam(PadModel::MassOnly)?;
    let budget = mass_budget(&loaded_geom, &stack)?;

    let mass_range_kg = match m.stack.high_density_range_kg_m3 {
        Some([lo, hi]) => {
            let at = |rho: f64| {
                let mut s = stack.clone();
                for l in s
                    .layers
                    .iter_mut()
                    .filter(|l| l.material == m.stack.high.material)
                {
                    l.density = rho;
                }
                stack_mass(&s)
            };
            Some([at(lo)?, at(hi)?])
        }
        None => None,
    };

    let bare_shape = beam_mode_with(&bare, m.mode_index, m.basis_size, m.samples)?;
    let ideal = beam_mode_with(&bare, m.mode_index, m.mode_index, m.samples)?;
    let ideal_mass = modal_mass(&ideal_geom, &ideal)?;
    let loaded = beam_mode_with(&loaded_geom, m.mode_index, m.basis_size, m.samples)?;

    let bare_sum = summary(
        &bare_shape,
        bare_shape.modal_mass,
        bare_shape.mass_fraction,
        m,
    )?;
    let ideal_sum = summary(&ideal, ideal_mass, ideal_mass / budget.total, m)?;
    let loaded_sum = summary(&loaded, loaded.modal_mass, loaded.mass_fraction, m)?;
    let spring = match m.spring_constant_n_per_m {
        Some(k) => Some(SpringSummary {
            spring_constant_n_per_m: k,
            mode_mass_kg: spring_mass(k, cfg.system()?.mechanics.omega_m)?,
        }),
        None => None,
    };

    let report = ModalReport {
        beta_l: clamped_root(m.mode_index)?,
        stack: StackSummary {
            mass_kg: budget.pad,
            mass_range_kg,
            thickness_m: stack.thickness(),
        },
        beam_mass_kg: budget.beam,
        total_mass_kg: budget.total,
        shape_correction: loaded_sum.effective_mass_kg / ideal_sum.effective_mass_kg - 1.0,
        bare: bare_sum,
        ideal_loaded: ideal_sum,
        pad_model: m.stack.pad_model,
        loaded: loaded_sum,
        mode_mass_fraction_reference: MODE_MASS_FRACTION_REFERENCE,
        spring,
    };
    Ok((report, loaded))
}
