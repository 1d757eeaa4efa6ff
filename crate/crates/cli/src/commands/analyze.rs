use std::f64::consts::PI;

use optomech_core::spectral::{floor_integral, measure_tone, ToneMeasurement};
use optomech_core::{
    calibrate, fit_peak, integrate_band, mode_thermometry, thermal_variance, AnalysisReport, Error,
    FitResult, Measured, Spectrum, SpectrumUnit,
};
use serde::{Deserialize, Serialize};

use crate::config::RunConfig;
use crate::error::CliError;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnalyzeReport {
    pub input_unit: String,
    pub calibration: Option<ToneMeasurement>,
    pub band_hz: [f64; 2],
    pub coarse_fit: FitResult,
    pub fit: FitResult,
    pub total: Measured,
    pub floor: Measured,
    pub thermometry: AnalysisReport,
    pub omega_eff_hz: f64,
    pub t_eff_k: f64,
    pub n: f64,
    pub n_sigma: f64,
    pub warnings: Vec<String>,
}

/// Runs calibrate → fit → integrate → floor subtraction → thermometry.
/// Every intermediate is pushed to `log` as it is produced.
pub fn run_analyze(
    spec: &Spectrum,
    cfg: &RunConfig,
    log: &mut Vec<String>,
) -> Result<AnalyzeReport, CliError> {
    let mut warnings = Vec::new();
    log.push(format!(
        "input: {} points, unit {}, [{:e}, {:e}] Hz",
        spec.len(),
        spec.unit(),
        spec.freqs()[0],
        spec.freqs()[spec.len() - 1]
    ));

    let (spec, calibration) = match spec.unit() {
        SpectrumUnit::DisplacementPsd => (spec.clone(), None),
        SpectrumUnit::Raw => {
            let tone = cfg.tone().ok_or_else(|| {
                CliError::Input("raw spectrum needs an [analysis.tone] section".into())
            })?;
            let m = measure_tone(spec, &tone)?;
            log.push(format!(
                "calibration: tone area {:e}, background {:e}, snr {:.3}, scale {:e} m^2/unit",
                m.area, m.background, m.snr, m.scale
            ));
            (calibrate(spec, &tone)?, Some(m))
        }
    };

    let f = spec.freqs();
    let band = cfg
        .analysis
        .band_hz
        .map_or((f[0], f[f.len() - 1]), |[lo, hi]| (lo, hi));
    if let Some(t) = cfg.analysis.tone.as_ref() {
        if calibration.is_some() && band.0 <= t.f_cal_hz && t.f_cal_hz <= band.1 {
            warnings.push("calibration tone lies inside the integration band".to_string());
        }
    }
    log.push(format!("band: [{:e}, {:e}] Hz", band.0, band.1));

    let total = integrate_band(&spec, band)?;
    log.push(format!(
        "total area: {:e} ± {:e} m^2",
        total.value, total.sigma
    ));
    if !(total.value > 0.0) {
        return Err(Error::FloorModel("no power in the integration band".into()).into());
    }

    let coarse = fit_peak(&spec, band)?;
    log.push(format!(
        "coarse fit: centre {:e} Hz, fwhm {:e} Hz, area {:e}, floor {:e}",
        coarse.center_hz, coarse.fwhm_hz, coarse.area, coarse.floor
    ));
    let window = match cfg.analysis.fit_window_hz {
        Some([lo, hi]) => (lo, hi),
        None => {
            let half = cfg.analysis.fit_window_fwhm * coarse.fwhm_hz;
            (
                (coarse.center_hz - half).max(band.0),
                (coarse.center_hz + half).min(band.1),
            )
        }
    };
    let fit = fit_peak(&spec, window)?;
    log.push(format!(
        "fit [{:e}, {:e}] Hz: centre {:e} ± {:e} Hz, fwhm {:e} ± {:e} Hz, floor {:e} ± {:e}, {} iterations",
        window.0,
        window.1,
        fit.center_hz,
        fit.center_sigma,
        fit.fwhm_hz,
        fit.fwhm_sigma,
        fit.floor,
        fit.floor_sigma,
        fit.iterations
    ));
    if !fit.converged {
        warnings.push("peak fit did not converge".to_string());
    }
    warnings.extend(coarse.warnings.iter().map(|w| format!("coarse fit: {w}")));
    warnings.extend(fit.warnings.iter().cloned());

    let floor = floor_integral(&spec, band, fit.floor)?;
    log.push(format!(
        "floor area: {:e} ± {:e} m^2",
        floor.value, floor.sigma
    ));
    let variance = thermal_variance(total, floor)?;
    log.push(format!(
        "thermal variance: {:e} ± {:e} m^2",
        variance.value, variance.sigma
    ));

    let omega_eff = 2.0 * PI * fit.center_hz;
    let thermometry = mode_thermometry(
        variance,
        &cfg.system()?.mechanics,
        omega_eff,
        &cfg.analysis.budget(),
    )?;
    log.push(format!(
        "thermometry: T_eff {:e} K, n {:.6} ± {:.6} ({:?}, {:.4} relative)",
        thermometry.t_eff,
        thermometry.n,
        thermometry.n_sigma,
        thermometry.rule,
        thermometry.combined_relative
    ));

    Ok(AnalyzeReport {
        input_unit: calibration
            .map_or(SpectrumUnit::DisplacementPsd, |_| SpectrumUnit::Raw)
            .to_string(),
        calibration,
        band_hz: [band.0, band.1],
        omega_eff_hz: fit.center_hz,
        t_eff_k: thermometry.t_eff,
        n: thermometry.n,
        n_sigma: thermometry.n_sigma,
        coarse_fit: coarse,
        fit,
        total,
        floor,
        thermometry,
        warnings,
    })
}
