//! Physical constants (CODATA 2018, exact SI definitions where available).

use std::f64::consts::PI;

/// Planck constant (J·s), exact.
pub const H: f64 = 6.626_070_15e-34;
/// Reduced Planck constant (J·s), stored as `H / 2π`.
pub const HBAR: f64 = H / (2.0 * PI);
/// Boltzmann constant (J/K), exact.
pub const K_B: f64 = 1.380_649e-23;
/// Speed of light in vacuum (m/s), exact.
pub const C: f64 = 299_792_458.0;

/// The constant set as a value, for code that wants to carry it around.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhysicalConstants {
    pub hbar: f64,
    pub k_b: f64,
    pub c: f64,
    pub h: f64,
}

impl PhysicalConstants {
    pub const CODATA: PhysicalConstants = PhysicalConstants {
        hbar: HBAR,
        k_b: K_B,
        c: C,
        h: H,
    };
}

impl Default for PhysicalConstants {
    fn default() -> Self {
        Self::CODATA
    }
}
