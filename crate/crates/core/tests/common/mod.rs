#![allow(dead_code)]

use std::f64::consts::TAU;

use optomech_core::model::{
    DriveField, Environment, LinearizedRates, MechanicalMode, OpticalCavity, OptomechSystem,
};
use proptest::prelude::*;

pub const OMEGA_M: f64 = TAU * 945e3;

pub fn device_system(mode_matching: f64) -> OptomechSystem {
    OptomechSystem {
        cavity: OpticalCavity {
            length: 25e-3,
            wavelength: 1064e-9,
            finesse: 3900.0,
            input_transmission: 900e-6,
            intracavity_loss: 620e-6,
            detuning_offset: 0.0,
        },
        mechanics: MechanicalMode {
            omega_m: OMEGA_M,
            quality_factor: 30_000.0,
            effective_mass: 43e-12,
        },
        environment: Environment::new(5.3),
        drive: DriveField {
            power: 7e-3,
            detuning: OMEGA_M,
            mode_matching,
        },
    }
}

fn log_uniform(lo: f64, hi: f64) -> impl Strategy<Value = f64> {
    (lo.log10()..hi.log10()).prop_map(|e| 10f64.powf(e))
}

/// Dimensionless rate sets with ω_m = 1 spanning weak to strong coupling
/// and both detuning signs.
pub fn any_rates() -> impl Strategy<Value = LinearizedRates> {
    (
        log_uniform(1e-5, 1e-1),
        log_uniform(0.05, 5.0),
        -2.5f64..2.5,
        log_uniform(1e-4, 1.5),
        log_uniform(1e-2, 1e5),
    )
        .prop_map(
            |(gamma_m, kappa, detuning, g_over_kappa, n_th)| LinearizedRates {
                omega_m: 1.0,
                gamma_m,
                kappa,
                detuning,
                coupling: g_over_kappa * kappa,
                n_th,
            },
        )
}

/// Physically valid systems around the experimental operating point.
pub fn any_system() -> impl Strategy<Value = OptomechSystem> {
    (
        log_uniform(1e-3, 1e-1),
        log_uniform(1e-7, 1e-5),
        log_uniform(500.0, 5e4),
        log_uniform(1e-5, 1e-2),
        log_uniform(1e-5, 1e-3),
        log_uniform(1e5, 1e7),
        log_uniform(1e2, 1e7),
        log_uniform(1e-13, 1e-9),
        0.0f64..300.0,
        0.0f64..0.1,
        -2.0f64..2.0,
        0.05f64..=1.0,
    )
        .prop_map(
            |(length, wavelength, finesse, t_in, loss, f_m, q, mass, temp, power, det, eta)| {
                let omega_m = TAU * f_m;
                OptomechSystem {
                    cavity: OpticalCavity {
                        length,
                        wavelength,
                        finesse,
                        input_transmission: t_in,
                        intracavity_loss: loss,
                        detuning_offset: 0.0,
                    },
                    mechanics: MechanicalMode {
                        omega_m,
                        quality_factor: q,
                        effective_mass: mass,
                    },
                    environment: Environment::new(temp),
                    drive: DriveField {
                        power,
                        detuning: det * omega_m,
                        mode_matching: eta,
                    },
                }
            },
        )
}
