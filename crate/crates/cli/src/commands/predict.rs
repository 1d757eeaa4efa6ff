use std::f64::consts::PI;

use optomech_core::dynamics::{closed_form_effective, fit_effective_from_rates};
use optomech_core::model::HeatLoad;
use optomech_core::spectral::ShotNoiseInputs;
use optomech_core::{
    cooling_predictions, is_stable, nms_warning, shot_noise_floor, thermal_numbers,
    CoolingPrediction, DriftDiffusion, OptomechSystem,
};
use serde::{Deserialize, Serialize};

use crate::config::RunConfig;
use crate::error::CliError;

/// Thermal decoherence rate quoted alongside the device parameters (s⁻¹).
pub const GAMMA_TH_REFERENCE: f64 = 1.4e7;
/// Shot-noise floor quoted alongside the readout parameters (m/√Hz).
pub const SHOT_NOISE_QUOTED: f64 = 6e-18;

fn hz(omega: f64) -> f64 {
    omega / (2.0 * PI)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CavitySummary {
    pub kappa_hz: f64,
    pub kappa_in_hz: f64,
    pub fsr_hz: f64,
    pub fwhm_hz: f64,
    pub photon_number: f64,
    pub circulating_power_w: f64,
    /// Same drive with the laser on resonance.
    pub resonant_photon_number: f64,
    pub resonant_circulating_power_w: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MechanicsSummary {
    pub frequency_hz: f64,
    pub gamma_m_hz: f64,
    pub x_zpf_m: f64,
    pub n_th: f64,
    pub gamma_th_per_s: f64,
    pub gamma_th_reference_per_s: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CouplingSummary {
    pub g0_hz: f64,
    pub coupling_hz: f64,
    pub coupling_over_kappa: f64,
    pub nms_flag: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StabilitySummary {
    pub stable: bool,
    /// Largest eigenvalue real part of the drift matrix (rad/s).
    pub margin_rad_s: f64,
    pub routh_hurwitz: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EffectiveSummary {
    pub omega_eff_hz: f64,
    pub gamma_eff_hz: f64,
    pub fit_omega_eff_hz: Option<f64>,
    pub fit_gamma_eff_hz: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoolingSummary {
    pub gamma_sb_hz: f64,
    pub n_min: f64,
    pub n_f: f64,
    pub n_full: f64,
    pub t_eff_pred_k: f64,
}

impl From<CoolingPrediction> for CoolingSummary {
    fn from(c: CoolingPrediction) -> Self {
        Self {
            gamma_sb_hz: hz(c.gamma_sb),
            n_min: c.n_min,
            n_f: c.n_f,
            n_full: c.n_full,
            t_eff_pred_k: c.t_eff_pred,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HeatSummary {
    pub mirror_w: f64,
    pub substrate_w: f64,
    pub resonant_mirror_w: f64,
    pub resonant_substrate_w: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ShotNoiseSummary {
    pub computed_m_per_rthz: f64,
    pub quoted_m_per_rthz: f64,
    pub computed_over_quoted: f64,
    pub note: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PredictReport {
    pub cavity: CavitySummary,
    pub mechanics: MechanicsSummary,
    pub coupling: CouplingSummary,
    pub stability: StabilitySummary,
    pub effective: Option<EffectiveSummary>,
    pub cooling: Option<CoolingSummary>,
    pub heat: HeatSummary,
    pub shot_noise: Option<ShotNoiseSummary>,
    pub warnings: Vec<String>,
}

pub fn shot_noise_summary(cfg: &RunConfig) -> Result<Option<ShotNoiseSummary>, CliError> {
    let Some(readout) = cfg.readout.as_ref() else {
        return Ok(None);
    };
    let sys = cfg.system()?;
    let inputs = ShotNoiseInputs {
        wavelength: sys.cavity.wavelength,
        finesse: sys.cavity.finesse,
        power: readout.power_w,
        omega_m: sys.mechanics.omega_m,
        kappa: sys.cavity.rates()?.kappa,
        input_transmission: sys.cavity.input_transmission,
        loss: sys.cavity.intracavity_loss,
        mode_matched_power: readout.mode_matched_power_w,
    };
    let computed = shot_noise_floor(&inputs)?;
    let ratio = computed / SHOT_NOISE_QUOTED;
    Ok(Some(ShotNoiseSummary {
        computed_m_per_rthz: computed,
        quoted_m_per_rthz: SHOT_NOISE_QUOTED,
        computed_over_quoted: ratio,
        note: format!(
            "formula evaluated in SI gives {computed:.3e} m/rtHz, {ratio:.3}x the quoted \
             {SHOT_NOISE_QUOTED:.0e} m/rtHz; the quoted figure is not reproduced"
        ),
    }))
}

fn heat(sys: &OptomechSystem, cfg: &RunConfig) -> Result<HeatLoad, CliError> {
    Ok(sys.heat_load(
        cfg.heat.mirror_absorption,
        cfg.heat.substrate_absorption,
        cfg.heat.end_mirror_transmission_ppm * 1e-6,
    )?)
}

/// Builds the report. The second element is set when the operating point is
/// unstable; the report is still complete up to the stability section.
pub fn run_predict(cfg: &RunConfig) -> Result<(PredictReport, Option<CliError>), CliError> {
    let sys = cfg.system()?;
    let mut warnings = sys.validate()?;
    let cav = sys.cavity.rates()?;
    let mech = sys.mechanics.rates()?;
    let thermal = thermal_numbers(&sys.environment, &sys.mechanics)?;
    let field = sys.intracavity_state()?;
    let resonant = sys.with_drive(sys.drive.power, -sys.cavity.detuning_offset);
    let field_res = resonant.intracavity_state()?;
    let coupling = sys.coupling_rates()?;
    let nms = nms_warning(&sys)?;
    let rates = sys.linearized_rates()?;
    let stability = is_stable(&DriftDiffusion::from_rates(&rates));
    let (h, h_res) = (heat(&sys, cfg)?, heat(&resonant, cfg)?);

    if nms.flag {
        warnings.push(format!(
            "G/kappa = {:.3} >= 1: normal-mode splitting, single-Lorentzian thermometry is unreliable",
            nms.ratio
        ));
    }

    let mut report = PredictReport {
        cavity: CavitySummary {
            kappa_hz: hz(cav.kappa),
            kappa_in_hz: hz(cav.kappa_in),
            fsr_hz: cav.fsr_hz,
            fwhm_hz: cav.fwhm_hz,
            photon_number: field.photon_number,
            circulating_power_w: field.circulating_power,
            resonant_photon_number: field_res.photon_number,
            resonant_circulating_power_w: field_res.circulating_power,
        },
        mechanics: MechanicsSummary {
            frequency_hz: hz(sys.mechanics.omega_m),
            gamma_m_hz: hz(mech.gamma_m),
            x_zpf_m: mech.x_zpf,
            n_th: thermal.n_th,
            gamma_th_per_s: thermal.gamma_th,
            gamma_th_reference_per_s: GAMMA_TH_REFERENCE,
        },
        coupling: CouplingSummary {
            g0_hz: hz(coupling.g0),
            coupling_hz: hz(coupling.coupling),
            coupling_over_kappa: nms.ratio,
            nms_flag: nms.flag,
        },
        stability: StabilitySummary {
            stable: stability.stable,
            margin_rad_s: stability.margin,
            routh_hurwitz: stability.routh_hurwitz,
        },
        effective: None,
        cooling: None,
        heat: HeatSummary {
            mirror_w: h.mirror,
            substrate_w: h.substrate,
            resonant_mirror_w: h_res.mirror,
            resonant_substrate_w: h_res.substrate,
        },
        shot_noise: shot_noise_summary(cfg)?,
        warnings,
    };

    if !stability.stable {
        let err = CliError::Unstable {
            margin: stability.margin,
            detail: format!(
                "drive {:.4e} W at detuning {:.6e} Hz",
                cfg.drive.power_w, cfg.drive.detuning_hz
            ),
        };
        return Ok((report, Some(err)));
    }

    match closed_form_effective(&rates, rates.omega_m) {
        Ok(e) => {
            let fit = fit_effective_from_rates(&rates);
            if let Err(err) = &fit {
                report
                    .warnings
                    .push(format!("spectrum fit of effective parameters: {err}"));
            }
            let fit = fit.ok();
            report.effective = Some(EffectiveSummary {
                omega_eff_hz: hz(e.omega_eff),
                gamma_eff_hz: hz(e.gamma_eff),
                fit_omega_eff_hz: fit.map(|f| hz(f.omega_eff)),
                fit_gamma_eff_hz: fit.map(|f| hz(f.gamma_eff)),
            });
        }
        Err(err) => report.warnings.push(format!("effective parameters: {err}")),
    }
    report.cooling = Some(cooling_predictions(&sys)?.into());
    Ok((report, None))
}
