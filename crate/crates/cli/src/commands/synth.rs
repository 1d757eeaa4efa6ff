use optomech_core::dynamics::steady_covariance;
use optomech_core::{displacement_nps, Spectrum, SpectrumUnit};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::config::RunConfig;
use crate::error::CliError;

/// Synthetic averaged-periodogram spectrum for the configured system.
///
/// Each bin is `model + floor` plus Gaussian noise of standard deviation
/// `(model + floor)/√averages`, clamped at zero. With `raw_gain` set, the
/// calibration tone is added to the nearest bin and everything is scaled
/// into detector units.
pub fn run_synth(cfg: &RunConfig, seed: u64) -> Result<Spectrum, CliError> {
    let s = &cfg.synthesis;
    if !(s.f_min_hz > 0.0 && s.f_max_hz > s.f_min_hz && s.points >= 2) {
        return Err(CliError::Input(
            "synthesis grid needs 0 < f_min_hz < f_max_hz and points >= 2".into(),
        ));
    }
    if !(s.averages >= 1.0 && s.floor_m2_per_hz >= 0.0) {
        return Err(CliError::Input(
            "synthesis needs averages >= 1 and floor_m2_per_hz >= 0".into(),
        ));
    }
    let sys = cfg.system()?;
    // fails with Unstable before any spectrum is produced
    steady_covariance(&sys)?;

    let n = s.points;
    let df = (s.f_max_hz - s.f_min_hz) / (n - 1) as f64;
    let freqs: Vec<f64> = (0..n)
        .map(|i| {
            if i == n - 1 {
                s.f_max_hz
            } else {
                s.f_min_hz + df * i as f64
            }
        })
        .collect();
    let model = displacement_nps(&sys, &freqs)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let rel = 1.0 / s.averages.sqrt();
    let mut psd = Vec::with_capacity(n);
    let mut sigma = Vec::with_capacity(n);
    for &m in model.psd() {
        let mean = m + s.floor_m2_per_hz;
        let sd = mean * rel;
        let z: f64 = StandardNormal.sample(&mut rng);
        psd.push((mean + sd * z).max(0.0));
        sigma.push(sd);
    }

    let Some(gain) = s.raw_gain else {
        return Ok(Spectrum::new(
            freqs,
            psd,
            Some(sigma),
            SpectrumUnit::DisplacementPsd,
        )?);
    };
    if !(gain > 0.0 && gain.is_finite()) {
        return Err(CliError::Input("synthesis.raw_gain must be > 0".into()));
    }
    let tone = cfg.tone().ok_or_else(|| {
        CliError::Input("synthesis.raw_gain needs an [analysis.tone] section".into())
    })?;
    let k = freqs
        .iter()
        .enumerate()
        .min_by(|a, b| {
            (a.1 - tone.f_cal_hz)
                .abs()
                .total_cmp(&(b.1 - tone.f_cal_hz).abs())
        })
        .map(|(i, _)| i)
        .expect("grid has points");
    psd[k] += tone.equivalent_displacement().powi(2) / df;
    for (y, sd) in psd.iter_mut().zip(sigma.iter_mut()) {
        *y *= gain;
        *sd *= gain;
    }
    Ok(Spectrum::new(freqs, psd, Some(sigma), SpectrumUnit::Raw)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small() -> RunConfig {
        let mut cfg = RunConfig::device();
        cfg.synthesis.points = 801;
        cfg
    }

    #[test]
    fn identical_seed_gives_identical_bytes() {
        let cfg = small();
        let (mut a, mut b) = (Vec::new(), Vec::new());
        run_synth(&cfg, 7).unwrap().write_csv(&mut a).unwrap();
        run_synth(&cfg, 7).unwrap().write_csv(&mut b).unwrap();
        assert_eq!(a, b);
        let mut c = Vec::new();
        run_synth(&cfg, 8).unwrap().write_csv(&mut c).unwrap();
        assert_ne!(a, c);
    }

    #[test]
    fn unstable_config_is_refused() {
        let mut cfg = small();
        cfg.drive.detuning_hz = -945e3;
        assert_eq!(run_synth(&cfg, 0).unwrap_err().exit_code(), 2);
    }

    #[test]
    fn calibrated_output_without_gain() {
        let mut cfg = small();
        cfg.synthesis.raw_gain = None;
        let s = run_synth(&cfg, 1).unwrap();
        assert_eq!(s.unit(), SpectrumUnit::DisplacementPsd);
        assert!(s.psd().iter().all(|&y| y >= 0.0));
    }
}
