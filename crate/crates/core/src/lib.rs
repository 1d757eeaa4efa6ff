//! Radiation-pressure cooling of a micromechanical mirror: forward model of
//! the linearised optomechanical dynamics, the spectral analysis chain used
//! to turn measured noise spectra into mode temperatures, and the modal
//! mechanics behind the effective mass.

#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::excessive_precision)]

pub mod constants;
pub mod dynamics;
pub mod error;
pub mod modal;
pub mod model;
pub mod numerics;
pub mod spectral;

pub use constants::PhysicalConstants;
pub use dynamics::{
    cooling_predictions, detuning_sweep, displacement_nps, effective_params, effective_params_fit,
    is_stable, nms_warning, steady_covariance, CoolingPrediction, DriftDiffusion, EffectiveParams,
    Stability, SteadyState, SweepRow,
};
pub use error::{Error, Result};
pub use modal::{
    beam_mode, effective_mass, mass_budget, spring_mass, stack_mass, BeamGeometry, LayerStack,
    ModeShape, Probe,
};
pub use model::{
    thermal_numbers, DriveField, Environment, LinearizedRates, MechanicalMode, OccupancyModel,
    OpticalCavity, OptomechSystem,
};
pub use spectral::{
    calibrate, fit_peak, integrate_band, mode_thermometry, shot_noise_floor, thermal_variance,
    AnalysisReport, CalibrationTone, FitResult, Measured, Spectrum, SpectrumUnit,
    UncertaintyBudget,
};
