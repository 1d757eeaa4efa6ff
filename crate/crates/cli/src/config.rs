//! Run configuration: one TOML file, every physical key carries its unit.
//!
//! Frequencies are plain Hz at this boundary (`_hz`) and become rad/s when
//! converted into core types.

use std::f64::consts::PI;
use std::path::Path;

use optomech_core::modal::{Layer, Pad, PadModel};
use optomech_core::spectral::CombinationRule;
use optomech_core::{
    BeamGeometry, CalibrationTone, DriveField, Environment, LayerStack, MechanicalMode,
    OccupancyModel, OpticalCavity, OptomechSystem, Probe, UncertaintyBudget,
};
use serde::{Deserialize, Serialize};

use crate::error::CliError;

/// The bundled configuration with the device parameters used throughout.
pub const DEVICE_TOML: &str = include_str!("../configs/device.toml");

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub cavity: CavityConfig,
    pub mechanics: MechanicsConfig,
    pub environment: EnvironmentConfig,
    pub drive: DriveConfig,
    #[serde(default)]
    pub readout: Option<ReadoutConfig>,
    #[serde(default)]
    pub heat: HeatConfig,
    #[serde(default)]
    pub analysis: AnalysisConfig,
    #[serde(default)]
    pub synthesis: SynthesisConfig,
    #[serde(default)]
    pub sweep: Option<SweepConfig>,
    #[serde(default)]
    pub modal: Option<ModalConfig>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CavityConfig {
    pub length_m: f64,
    pub wavelength_m: f64,
    pub finesse: f64,
    pub input_transmission_ppm: f64,
    pub intracavity_loss_ppm: f64,
    #[serde(default)]
    pub detuning_offset_hz: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MechanicsConfig {
    pub frequency_hz: f64,
    pub quality_factor: f64,
    pub effective_mass_kg: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EnvironmentConfig {
    pub temperature_k: f64,
    #[serde(default)]
    pub occupancy: OccupancyModel,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DriveConfig {
    pub power_w: f64,
    pub detuning_hz: f64,
    pub mode_matching: f64,
}

/// Readout beam used for the shot-noise estimate.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ReadoutConfig {
    pub power_w: f64,
    pub mode_matched_power_w: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct HeatConfig {
    pub mirror_absorption: f64,
    pub substrate_absorption: f64,
    pub end_mirror_transmission_ppm: f64,
}

impl Default for HeatConfig {
    fn default() -> Self {
        Self {
            mirror_absorption: 0.0,
            substrate_absorption: 0.0,
            end_mirror_transmission_ppm: 90.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ToneConfig {
    pub f_cal_hz: f64,
    pub fm_depth_hz: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct AnalysisConfig {
    /// Integration band; the whole grid when absent.
    pub band_hz: Option<[f64; 2]>,
    /// Explicit fit window; otherwise derived from a coarse first fit.
    pub fit_window_hz: Option<[f64; 2]>,
    /// Half-width of the refined fit window in units of the coarse FWHM.
    pub fit_window_fwhm: f64,
    pub calibration_pct: f64,
    pub frequency_pct: f64,
    pub power_pct: f64,
    pub rule: CombinationRule,
    pub tone: Option<ToneConfig>,
}

impl Default for AnalysisConfig {
    fn default() -> Self {
        let b = UncertaintyBudget::default();
        Self {
            band_hz: None,
            fit_window_hz: None,
            fit_window_fwhm: 5.0,
            calibration_pct: 100.0 * b.calibration,
            frequency_pct: 100.0 * b.frequency,
            power_pct: 100.0 * b.power,
            rule: b.rule,
            tone: None,
        }
    }
}

impl AnalysisConfig {
    pub fn budget(&self) -> UncertaintyBudget {
        UncertaintyBudget {
            calibration: self.calibration_pct / 100.0,
            frequency: self.frequency_pct / 100.0,
            power: self.power_pct / 100.0,
            rule: self.rule,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SynthesisConfig {
    pub f_min_hz: f64,
    pub f_max_hz: f64,
    pub points: usize,
    /// Number of averaged periodograms; per-bin sigma is `(model + floor)/√averages`.
    pub averages: f64,
    pub floor_m2_per_hz: f64,
    /// When set, the output is a raw spectrum in detector units with the
    /// analysis tone injected.
    pub raw_gain: Option<f64>,
    pub seed: u64,
}

impl Default for SynthesisConfig {
    fn default() -> Self {
        Self {
            f_min_hz: 100e3,
            f_max_hz: 1.9e6,
            points: 7201,
            averages: 1000.0,
            floor_m2_per_hz: 7.3e-34,
            raw_gain: None,
            seed: 0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Spacing {
    Linear,
    Log,
}

/// Either an explicit list or an evenly spaced range.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Grid {
    List(Vec<f64>),
    Range {
        start: f64,
        stop: f64,
        points: usize,
        #[serde(default = "linear")]
        spacing: Spacing,
    },
}

fn linear() -> Spacing {
    Spacing::Linear
}

impl Grid {
    pub fn values(&self) -> Result<Vec<f64>, CliError> {
        match self {
            Grid::List(v) => Ok(v.clone()),
            Grid::Range {
                start,
                stop,
                points,
                spacing,
            } => {
                let n = *points;
                if n == 0 {
                    return Err(CliError::Input("grid needs at least one point".into()));
                }
                if n == 1 {
                    return Ok(vec![*start]);
                }
                let t = |i: usize| i as f64 / (n - 1) as f64;
                let mut v: Vec<f64> = match spacing {
                    Spacing::Linear => (0..n).map(|i| start + (stop - start) * t(i)).collect(),
                    Spacing::Log => {
                        if !(*start > 0.0 && *stop > 0.0) {
                            return Err(CliError::Input("log grid bounds must be positive".into()));
                        }
                        let (a, b) = (start.ln(), stop.ln());
                        (0..n).map(|i| (a + (b - a) * t(i)).exp()).collect()
                    }
                };
                v[0] = *start;
                v[n - 1] = *stop;
                Ok(v)
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepConfig {
    pub detuning_hz: Grid,
    pub power_w: Grid,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BeamConfig {
    pub length_m: f64,
    pub width_m: f64,
    pub thickness_m: f64,
    pub density_kg_m3: f64,
    #[serde(default = "default_youngs")]
    pub youngs_modulus_pa: f64,
    #[serde(default = "one")]
    pub volume_factor: f64,
}

fn default_youngs() -> f64 {
    250e9
}

fn one() -> f64 {
    1.0
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LayerConfig {
    pub material: String,
    pub thickness_m: f64,
    pub density_kg_m3: f64,
}

impl LayerConfig {
    fn layer(&self) -> Layer {
        Layer {
            material: self.material.clone(),
            thickness: self.thickness_m,
            density: self.density_kg_m3,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StackConfig {
    pub pairs: usize,
    pub high: LayerConfig,
    pub low: LayerConfig,
    pub pad_radius_m: f64,
    /// Axial pad position; beam centre when absent.
    #[serde(default)]
    pub pad_center_m: Option<f64>,
    #[serde(default)]
    pub pad_model: PadModel,
    /// Plausible density span of the high-index layer, for a mass range.
    #[serde(default)]
    pub high_density_range_kg_m3: Option<[f64; 2]>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProbeConfig {
    pub waist_m: f64,
    #[serde(default)]
    pub center_m: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModalConfig {
    pub beam: BeamConfig,
    pub stack: StackConfig,
    pub probe: ProbeConfig,
    #[serde(default = "first_mode")]
    pub mode_index: usize,
    #[serde(default = "basis_size")]
    pub basis_size: usize,
    #[serde(default = "samples")]
    pub samples: usize,
    #[serde(default)]
    pub spring_constant_n_per_m: Option<f64>,
}

fn first_mode() -> usize {
    1
}

fn basis_size() -> usize {
    optomech_core::modal::DEFAULT_BASIS_SIZE
}

fn samples() -> usize {
    optomech_core::modal::DEFAULT_SAMPLES
}

impl ModalConfig {
    pub fn stack(&self) -> LayerStack {
        LayerStack::bragg(
            self.stack.pairs,
            self.stack.high.layer(),
            self.stack.low.layer(),
            self.stack.pad_radius_m,
        )
    }

    pub fn bare_beam(&self) -> BeamGeometry {
        let b = &self.beam;
        BeamGeometry {
            length: b.length_m,
            width: b.width_m,
            thickness: b.thickness_m,
            density: b.density_kg_m3,
            youngs_modulus: b.youngs_modulus_pa,
            volume_factor: b.volume_factor,
            pad: None,
        }
    }

    pub fn loaded_beam(&self, model: PadModel) -> Result<BeamGeometry, CliError> {
        let stack = self.stack();
        let mut g = self.bare_beam();
        g.pad = Some(Pad {
            mass: optomech_core::stack_mass(&stack)?,
            radius: stack.pad_radius,
            center: self.stack.pad_center_m.unwrap_or(0.5 * g.length),
            thickness: stack.thickness(),
            model,
        });
        Ok(g)
    }

    pub fn probe(&self) -> Probe {
        Probe {
            waist: self.probe.waist_m,
            center: self.probe.center_m.unwrap_or(0.5 * self.beam.length_m),
        }
    }
}

impl RunConfig {
    pub fn device() -> Self {
        Self::from_toml_str(DEVICE_TOML).expect("bundled config parses")
    }

    /// Parses and validates; errors name the offending key path.
    pub fn from_toml_str(text: &str) -> Result<Self, CliError> {
        let de = toml::de::Deserializer::parse(text)
            .map_err(|e| CliError::Input(format!("config: {e}")))?;
        let cfg: RunConfig = serde_path_to_error::deserialize(de).map_err(|e| {
            CliError::Input(format!(
                "config key `{}`: {}",
                e.path(),
                e.inner().message()
            ))
        })?;
        cfg.system()?.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?;
        Self::from_toml_str(&text)
    }

    pub fn system(&self) -> Result<OptomechSystem, CliError> {
        let c = &self.cavity;
        let sys = OptomechSystem {
            cavity: OpticalCavity {
                length: c.length_m,
                wavelength: c.wavelength_m,
                finesse: c.finesse,
                input_transmission: c.input_transmission_ppm * 1e-6,
                intracavity_loss: c.intracavity_loss_ppm * 1e-6,
                detuning_offset: 2.0 * PI * c.detuning_offset_hz,
            },
            mechanics: MechanicalMode {
                omega_m: 2.0 * PI * self.mechanics.frequency_hz,
                quality_factor: self.mechanics.quality_factor,
                effective_mass: self.mechanics.effective_mass_kg,
            },
            environment: Environment {
                temperature: self.environment.temperature_k,
                occupancy: self.environment.occupancy,
            },
            drive: DriveField {
                power: self.drive.power_w,
                detuning: 2.0 * PI * self.drive.detuning_hz,
                mode_matching: self.drive.mode_matching,
            },
        };
        Ok(sys)
    }

    pub fn tone(&self) -> Option<CalibrationTone> {
        self.analysis.tone.as_ref().map(|t| CalibrationTone {
            f_cal_hz: t.f_cal_hz,
            fm_depth_hz: t.fm_depth_hz,
            cavity_length: self.cavity.length_m,
            optical_frequency_hz: optomech_core::constants::C / self.cavity.wavelength_m,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bundled_config_is_valid() {
        let cfg = RunConfig::device();
        let sys = cfg.system().unwrap();
        assert_eq!(sys.cavity.input_transmission, 900e-6);
        assert_eq!(sys.drive.mode_matching, 0.5);
        assert!(cfg.modal.is_some() && cfg.sweep.is_some());
    }

    #[test]
    fn unknown_key_names_its_path() {
        let text = DEVICE_TOML.replace("finesse = 3900.0", "finesse = 3900.0\nfinesse_hz = 1.0");
        let err = RunConfig::from_toml_str(&text).unwrap_err();
        assert!(err.to_string().contains("cavity"), "{err}");
        assert_eq!(err.exit_code(), 1);
    }

    #[test]
    fn log_grid_hits_both_ends() {
        let g = Grid::Range {
            start: 1e-6,
            stop: 1e-3,
            points: 4,
            spacing: Spacing::Log,
        };
        let v = g.values().unwrap();
        assert_eq!(v[0], 1e-6);
        assert!((v[1] / 1e-5 - 1.0).abs() < 1e-12);
        assert!((v[3] / 1e-3 - 1.0).abs() < 1e-12);
    }
}
