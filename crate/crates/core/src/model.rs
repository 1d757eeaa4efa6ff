//! Parameter types for the cavity, the mechanical mode, the bath and the
//! drive, plus the closed-form quantities derived from them.
//!
//! Everything here is strict SI with angular frequencies in rad/s. The
//! detuning convention is `Δ > 0` for a laser below the cavity resonance,
//! i.e. the cooling side.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::constants::{C, HBAR, K_B};
use crate::error::{ensure_non_negative, ensure_positive, Error, Result};

/// Relative slack allowed on the loss-limited finesse `2π/(T_in + l)` before
/// a consistency warning is raised.
pub const FINESSE_SLACK: f64 = 0.15;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OpticalCavity {
    /// Cavity length (m).
    pub length: f64,
    /// Laser wavelength (m).
    pub wavelength: f64,
    pub finesse: f64,
    /// Input coupler power transmission (fraction, not ppm).
    pub input_transmission: f64,
    /// Round-trip loss excluding the input coupler (fraction).
    pub intracavity_loss: f64,
    /// Constant offset added to every drive detuning (rad/s). Models the
    /// birefringent splitting between the two polarisation modes.
    pub detuning_offset: f64,
}

/// Rates derived from an [`OpticalCavity`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CavityRates {
    /// Amplitude decay rate κ (rad/s), half the intensity linewidth.
    pub kappa: f64,
    /// Input-coupler contribution to κ (rad/s).
    pub kappa_in: f64,
    pub fsr_hz: f64,
    /// Intensity linewidth (FWHM) in Hz.
    pub fwhm_hz: f64,
}

impl OpticalCavity {
    /// Checks hard invariants and returns soft consistency warnings.
    pub fn validate(&self) -> Result<Vec<String>> {
        ensure_positive("cavity.length", self.length)?;
        ensure_positive("cavity.wavelength", self.wavelength)?;
        ensure_positive("cavity.finesse", self.finesse)?;
        if !(self.input_transmission > 0.0 && self.input_transmission < 1.0) {
            return Err(Error::domain(
                "cavity.input_transmission",
                format!("must lie in (0, 1), got {}", self.input_transmission),
            ));
        }
        if !(self.intracavity_loss >= 0.0 && self.intracavity_loss < 1.0) {
            return Err(Error::domain(
                "cavity.intracavity_loss",
                format!("must lie in [0, 1), got {}", self.intracavity_loss),
            ));
        }
        if !self.detuning_offset.is_finite() {
            return Err(Error::domain("cavity.detuning_offset", "must be finite"));
        }

        let mut warnings = Vec::new();
        let loss_limited = 2.0 * PI / (self.input_transmission + self.intracavity_loss);
        if self.finesse > (1.0 + FINESSE_SLACK) * loss_limited {
            warnings.push(format!(
                "finesse {:.1} exceeds the loss-limited value {:.1} by more than {:.0}%",
                self.finesse,
                loss_limited,
                FINESSE_SLACK * 100.0
            ));
        }
        Ok(warnings)
    }

    pub fn rates(&self) -> Result<CavityRates> {
        self.validate()?;
        let fsr_hz = C / (2.0 * self.length);
        Ok(CavityRates {
            kappa: PI * C / (2.0 * self.length * self.finesse),
            kappa_in: C * self.input_transmission / (4.0 * self.length),
            fsr_hz,
            fwhm_hz: fsr_hz / self.finesse,
        })
    }

    /// Optical angular frequency ω_L = 2πc/λ (rad/s).
    pub fn optical_angular_frequency(&self) -> f64 {
        2.0 * PI * C / self.wavelength
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MechanicalMode {
    /// Angular resonance frequency ω_m (rad/s).
    pub omega_m: f64,
    pub quality_factor: f64,
    /// Effective mass (kg).
    pub effective_mass: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MechanicalRates {
    /// Intrinsic energy damping γ_m = ω_m/Q (rad/s).
    pub gamma_m: f64,
    /// Zero-point amplitude sqrt(ħ/(2 m ω_m)) (m).
    pub x_zpf: f64,
}

impl MechanicalMode {
    pub fn validate(&self) -> Result<()> {
        ensure_positive("mechanics.omega_m", self.omega_m)?;
        // Q = ∞ is allowed and simply means no intrinsic damping.
        if !(self.quality_factor > 0.0) {
            return Err(Error::domain(
                "mechanics.quality_factor",
                format!("must be > 0, got {}", self.quality_factor),
            ));
        }
        ensure_positive("mechanics.effective_mass", self.effective_mass)
    }

    pub fn rates(&self) -> Result<MechanicalRates> {
        self.validate()?;
        Ok(MechanicalRates {
            gamma_m: self.omega_m / self.quality_factor,
            x_zpf: (HBAR / (2.0 * self.effective_mass * self.omega_m)).sqrt(),
        })
    }
}

/// How the bath occupancy is computed from the temperature.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OccupancyModel {
    /// `k_B T / ħω`, the high-occupancy limit.
    #[default]
    Classical,
    /// `1 / (exp(ħω/k_B T) − 1)`.
    BoseEinstein,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Environment {
    /// Bath temperature (K).
    pub temperature: f64,
    #[serde(default)]
    pub occupancy: OccupancyModel,
}

impl Environment {
    pub fn new(temperature: f64) -> Self {
        Self {
            temperature,
            occupancy: OccupancyModel::Classical,
        }
    }

    pub fn validate(&self) -> Result<()> {
        ensure_non_negative("environment.temperature", self.temperature)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ThermalNumbers {
    /// Mean bath occupancy at ω_m.
    pub n_th: f64,
    /// Thermal decoherence rate k_B T/(ħ Q) in s⁻¹.
    pub gamma_th: f64,
}

pub fn thermal_numbers(env: &Environment, mode: &MechanicalMode) -> Result<ThermalNumbers> {
    env.validate()?;
    mode.validate()?;
    let t = env.temperature;
    let n_th = match env.occupancy {
        OccupancyModel::Classical => K_B * t / (HBAR * mode.omega_m),
        OccupancyModel::BoseEinstein if t == 0.0 => 0.0,
        OccupancyModel::BoseEinstein => 1.0 / (HBAR * mode.omega_m / (K_B * t)).exp_m1(),
    };
    Ok(ThermalNumbers {
        n_th,
        gamma_th: K_B * t / (HBAR * mode.quality_factor),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DriveField {
    /// Input power (W).
    pub power: f64,
    /// Laser detuning (rad/s), positive on the cooling (red) side.
    pub detuning: f64,
    /// Spatial mode-matching efficiency in (0, 1].
    pub mode_matching: f64,
}

impl DriveField {
    pub fn validate(&self) -> Result<()> {
        ensure_non_negative("drive.power", self.power)?;
        if !self.detuning.is_finite() {
            return Err(Error::domain("drive.detuning", "must be finite"));
        }
        if !(self.mode_matching > 0.0 && self.mode_matching <= 1.0) {
            return Err(Error::domain(
                "drive.mode_matching",
                format!("must lie in (0, 1], got {}", self.mode_matching),
            ));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OptomechSystem {
    pub cavity: OpticalCavity,
    pub mechanics: MechanicalMode,
    pub environment: Environment,
    pub drive: DriveField,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IntracavityState {
    /// Mean intracavity photon number |α_s|².
    pub photon_number: f64,
    /// Circulating power (W).
    pub circulating_power: f64,
    /// |α_s| in sqrt(photons).
    pub amplitude: f64,
    /// arg α_s = arctan(Δ/κ) (rad).
    pub phase: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CouplingRates {
    /// Single-photon coupling g0 = (ω_c/L)·x_zpf (rad/s).
    pub g0: f64,
    /// Linearised coupling G = 2·g0·|α_s| (rad/s).
    pub coupling: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HeatLoad {
    /// Power absorbed in the mirror coating (W).
    pub mirror: f64,
    /// Power absorbed in the substrate from light leaking through the end mirror (W).
    pub substrate: f64,
}

/// The rate set that fully determines the linearised dynamics.
///
/// Kept separate from [`OptomechSystem`] so that the dynamics can be driven
/// directly from dimensionless or randomly drawn rates.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LinearizedRates {
    pub omega_m: f64,
    pub gamma_m: f64,
    pub kappa: f64,
    pub detuning: f64,
    pub coupling: f64,
    pub n_th: f64,
}

impl OptomechSystem {
    /// Validates all parts and returns any soft warnings.
    pub fn validate(&self) -> Result<Vec<String>> {
        let warnings = self.cavity.validate()?;
        self.mechanics.validate()?;
        self.environment.validate()?;
        self.drive.validate()?;
        Ok(warnings)
    }

    /// Detuning seen by the cavity mode: drive detuning plus the fixed offset.
    pub fn effective_detuning(&self) -> f64 {
        self.drive.detuning + self.cavity.detuning_offset
    }

    pub fn with_drive(&self, power: f64, detuning: f64) -> Self {
        let mut s = *self;
        s.drive.power = power;
        s.drive.detuning = detuning;
        s
    }

    pub fn intracavity_state(&self) -> Result<IntracavityState> {
        self.validate()?;
        let rates = self.cavity.rates()?;
        let delta = self.effective_detuning();
        let denom = rates.kappa * rates.kappa + delta * delta;
        if denom == 0.0 {
            return Err(Error::Singular("κ = 0 at zero detuning".into()));
        }
        let omega_l = self.cavity.optical_angular_frequency();
        let photon_flux = self.drive.mode_matching * self.drive.power / (HBAR * omega_l);
        let photon_number = 2.0 * rates.kappa_in * photon_flux / denom;
        Ok(IntracavityState {
            photon_number,
            circulating_power: photon_number * HBAR * omega_l * rates.fsr_hz,
            amplitude: photon_number.sqrt(),
            phase: (delta / rates.kappa).atan(),
        })
    }

    pub fn coupling_rates(&self) -> Result<CouplingRates> {
        let field = self.intracavity_state()?;
        let mech = self.mechanics.rates()?;
        let g0 = self.cavity.optical_angular_frequency() / self.cavity.length * mech.x_zpf;
        Ok(CouplingRates {
            g0,
            coupling: 2.0 * g0 * field.amplitude,
        })
    }

    /// Absorbed powers for given absorption fractions. `end_mirror_transmission`
    /// is the power transmission of the mechanical mirror.
    pub fn heat_load(
        &self,
        mirror_absorption: f64,
        substrate_absorption: f64,
        end_mirror_transmission: f64,
    ) -> Result<HeatLoad> {
        for (name, v) in [
            ("mirror_absorption", mirror_absorption),
            ("substrate_absorption", substrate_absorption),
            ("end_mirror_transmission", end_mirror_transmission),
        ] {
            if !(0.0..1.0).contains(&v) {
                return Err(Error::domain(name, format!("must lie in [0, 1), got {v}")));
            }
        }
        let p_circ = self.intracavity_state()?.circulating_power;
        Ok(HeatLoad {
            mirror: mirror_absorption * p_circ,
            substrate: substrate_absorption * p_circ * end_mirror_transmission,
        })
    }

    pub fn linearized_rates(&self) -> Result<LinearizedRates> {
        let cavity = self.cavity.rates()?;
        let mech = self.mechanics.rates()?;
        let thermal = thermal_numbers(&self.environment, &self.mechanics)?;
        Ok(LinearizedRates {
            omega_m: self.mechanics.omega_m,
            gamma_m: mech.gamma_m,
            kappa: cavity.kappa,
            detuning: self.effective_detuning(),
            coupling: self.coupling_rates()?.coupling,
            n_th: thermal.n_th,
        })
    }
}


#[cfg(test)]
mod tests {
    use super::fixtures::*;
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn cavity_rates_match_reference_linewidth() {
        let r = device_system(1.0).cavity.rates().unwrap();
        let kappa_hz = r.kappa / (2.0 * PI);
        assert!((kappa_hz / 770e3 - 1.0).abs() < 5e-3, "κ/2π = {kappa_hz}");
        assert_relative_eq!(r.fsr_hz, 5.995_849_16e9, max_relative = 1e-9);
        assert_relative_eq!(r.kappa, PI * r.fwhm_hz, max_relative = 1e-12);
        assert_relative_eq!(r.kappa_in, 2_698_132.122, max_relative = 1e-9);
    }

    #[test]
    fn kappa_is_inverse_in_finesse() {
        let mut c = device_system(1.0).cavity;
        let k1 = c.rates().unwrap().kappa;
        c.finesse *= 2.0;
        let k2 = c.rates().unwrap().kappa;
        assert_eq!(k1 / 2.0, k2);
    }

    #[test]
    fn finesse_above_loss_limit_warns() {
        let mut c = device_system(1.0).cavity;
        assert!(c.validate().unwrap().is_empty());
        c.finesse = 6000.0;
        assert_eq!(c.validate().unwrap().len(), 1);
    }

    #[test]
    fn bad_cavity_parameters_are_rejected() {
        let mut c = device_system(1.0).cavity;
        c.length = f64::NAN;
        assert!(matches!(
            c.rates(),
            Err(Error::Domain {
                name: "cavity.length",
                ..
            })
        ));
        let mut c = device_system(1.0).cavity;
        c.input_transmission = 1.0;
        assert!(c.rates().is_err());
    }

    #[test]
    fn mechanical_rates() {
        let m = device_system(1.0).mechanics;
        let r = m.rates().unwrap();
        assert_relative_eq!(r.gamma_m / (2.0 * PI), 31.5, max_relative = 1e-12);
        assert_relative_eq!(r.x_zpf, 4.544_467_651e-16, max_relative = 1e-9);

        let inf_q = MechanicalMode {
            quality_factor: f64::INFINITY,
            ..m
        };
        assert_eq!(inf_q.rates().unwrap().gamma_m, 0.0);

        let heavy = MechanicalMode {
            effective_mass: 4.0 * m.effective_mass,
            ..m
        };
        assert_relative_eq!(
            heavy.rates().unwrap().x_zpf,
            r.x_zpf / 2.0,
            max_relative = 1e-14
        );
    }

    #[test]
    fn thermal_occupancy_and_decoherence() {
        let m = device_system(1.0).mechanics;
        let hot = thermal_numbers(&Environment::new(2.3), &m).unwrap();
        assert_relative_eq!(hot.n_th, 50_713.464_56, max_relative = 1e-8);

        let cryo = thermal_numbers(&Environment::new(5.3), &m).unwrap();
        assert_relative_eq!(cryo.gamma_th, 2.312_925_99e7, max_relative = 1e-8);

        let cold = thermal_numbers(&Environment::new(0.0), &m).unwrap();
        assert_eq!((cold.n_th, cold.gamma_th), (0.0, 0.0));

        let be = Environment {
            temperature: 2.3,
            occupancy: OccupancyModel::BoseEinstein,
        };
        let n_be = thermal_numbers(&be, &m).unwrap().n_th;
        // n_BE ≈ n_cl − 1/2 at high occupancy
        assert!((hot.n_th - n_be - 0.5).abs() < 1e-3);
    }

    #[test]
    fn intracavity_field() {
        let sys = device_system(1.0);
        let on_res = sys.with_drive(7e-3, 0.0).intracavity_state().unwrap();
        assert_relative_eq!(on_res.photon_number, 8.673_296_944e9, max_relative = 1e-8);
        assert_relative_eq!(on_res.circulating_power, 9.708_899_780, max_relative = 1e-8);
        assert_eq!(on_res.phase, 0.0);

        let detuned = sys.intracavity_state().unwrap();
        assert_relative_eq!(
            detuned.circulating_power,
            3.866_081_227,
            max_relative = 1e-8
        );

        let dark = sys.with_drive(0.0, OMEGA_M).intracavity_state().unwrap();
        assert_eq!(dark.photon_number, 0.0);
    }

    #[test]
    fn coupling_rates_reference_values() {
        let c = device_system(0.5).coupling_rates().unwrap();
        assert_relative_eq!(c.g0 / (2.0 * PI), 5.121_793_712, max_relative = 1e-8);
        assert_relative_eq!(c.coupling, 2_674_604.277, max_relative = 1e-8);
        let dark = device_system(0.5)
            .with_drive(0.0, OMEGA_M)
            .coupling_rates()
            .unwrap();
        assert_eq!(dark.coupling, 0.0);
    }

    #[test]
    fn heat_load_scales_with_absorption() {
        let sys = device_system(1.0);
        let h = sys.heat_load(1e-6, 0.01, 90e-6).unwrap();
        assert_relative_eq!(h.mirror, 3.866_081_227e-6, max_relative = 1e-8);
        assert_relative_eq!(
            h.substrate,
            0.01 * 3.866_081_227 * 90e-6,
            max_relative = 1e-8
        );
        assert_eq!(sys.heat_load(0.0, 0.0, 90e-6).unwrap().mirror, 0.0);
        assert!(sys.heat_load(1.0, 0.0, 0.0).is_err());
    }

    #[test]
    fn detuning_offset_shifts_the_cavity_detuning() {
        let mut sys = device_system(1.0);
        sys.cavity.detuning_offset = -OMEGA_M;
        let a = sys.intracavity_state().unwrap();
        let b = device_system(1.0)
            .with_drive(7e-3, 0.0)
            .intracavity_state()
            .unwrap();
        assert_relative_eq!(a.photon_number, b.photon_number, max_relative = 1e-14);
    }
}
