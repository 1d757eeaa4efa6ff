//! Linearised radiation-pressure dynamics of the coupled mechanical and
//! optical quadratures.
//!
//! The state is `(q, p, X, Y)`: dimensionless mechanical position and
//! momentum (`x = √2·x_zpf·q`) and the amplitude/phase quadratures of the
//! cavity fluctuation. The equations of motion are
//!
//! ```text
//! q̇ = ω_m p
//! ṗ = −ω_m q − γ_m p + G X + ξ
//! Ẋ = −κ X + Δ Y + √(2κ) X_in
//! Ẏ = −κ Y − Δ X + G q + √(2κ) Y_in
//! ```
//!
//! with white noise normalised so that at `G = 0` the stationary state has
//! `V_qq = V_pp = n_th + ½` and `V_XX = V_YY = ½`.

mod cooling;
mod effective;
mod lyapunov;
mod spectrum;
mod stability;

use nalgebra::Matrix4;
use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::model::{LinearizedRates, OptomechSystem};

pub use cooling::{
    cooling_predictions, detuning_sweep, nms_warning, CoolingPrediction, NmsWarning, SweepRow,
};
pub use effective::{
    closed_form_effective, effective_params, effective_params_fit, fit_effective_from_rates,
    optical_shifts, EffectiveMethod, EffectiveParams,
};
pub use lyapunov::{solve_continuous_lyapunov, steady_covariance, SteadyState};
pub use spectrum::{displacement_nps, qq_density, spectral_variance};
pub use stability::{
    characteristic_polynomial, instability_threshold_power, is_stable, routh_hurwitz_quartic,
    Stability,
};

pub type Mat4 = Matrix4<f64>;

/// Labels of the state vector components, in matrix order.
pub const BASIS: [&str; 4] = ["q", "p", "X", "Y"];

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DriftDiffusion {
    pub drift: Mat4,
    pub diffusion: Mat4,
}

pub fn drift_matrix(r: &LinearizedRates) -> Mat4 {
    #[rustfmt::skip]
    let a = Mat4::new(
        0.0,          r.omega_m,   0.0,         0.0,
        -r.omega_m,   -r.gamma_m,  r.coupling,  0.0,
        0.0,          0.0,         -r.kappa,    r.detuning,
        r.coupling,   0.0,         -r.detuning, -r.kappa,
    );
    a
}

pub fn diffusion_matrix(r: &LinearizedRates) -> Mat4 {
    Mat4::from_diagonal(&nalgebra::Vector4::new(
        0.0,
        2.0 * r.gamma_m * (r.n_th + 0.5),
        r.kappa,
        r.kappa,
    ))
}

impl DriftDiffusion {
    pub fn from_rates(r: &LinearizedRates) -> Self {
        Self {
            drift: drift_matrix(r),
            diffusion: diffusion_matrix(r),
        }
    }

    pub fn from_system(sys: &OptomechSystem) -> Result<Self> {
        Ok(Self::from_rates(&sys.linearized_rates()?))
    }
}
