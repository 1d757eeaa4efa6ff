//! Tabular reproductions of the detuning and power dependences.

use optomech_core::OptomechSystem;

use super::sweep::{sweep_table, SweepRecord, SweepTable};
use crate::config::RunConfig;
use crate::error::CliError;

/// Drive powers of the detuning scan (W).
pub const POWER_LADDER: [f64; 5] = [140e-6, 700e-6, 1.4e-3, 3.5e-3, 7e-3];
/// Lowest power of the power scan (W).
pub const POWER_SCAN_MIN: f64 = 7e-6;
/// Highest power considered for the power scan (W).
pub const POWER_SCAN_CAP: f64 = 7e-3;
/// Largest G/κ admitted in the power scan.
pub const WEAK_COUPLING: f64 = 0.3;
pub const POWER_SCAN_POINTS: usize = 100;
/// Detunings of the power scan in units of ω_m.
pub const POWER_SCAN_DETUNINGS: [f64; 3] = [0.5, 1.0, 1.5];

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Target {
    DetuningScan,
    PowerScan,
}

fn meta(k: &str, v: impl ToString) -> (String, String) {
    (k.to_string(), v.to_string())
}

/// Least-squares slope of `ln y` against `ln x`.
pub fn log_log_slope(points: &[(f64, f64)]) -> Option<f64> {
    if points.len() < 2 {
        return None;
    }
    let n = points.len() as f64;
    let (lx, ly): (Vec<f64>, Vec<f64>) = points.iter().map(|(x, y)| (x.ln(), y.ln())).unzip();
    let mx = lx.iter().sum::<f64>() / n;
    let my = ly.iter().sum::<f64>() / n;
    let sxy: f64 = lx.iter().zip(&ly).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = lx.iter().map(|x| (x - mx).powi(2)).sum();
    (sxx > 0.0).then(|| sxy / sxx)
}

/// `(γ_eff, T_eff)` pairs of the stable rows at one detuning.
pub fn gamma_temperature_pairs(rows: &[SweepRecord], detuning_hz: f64) -> Vec<(f64, f64)> {
    rows.iter()
        .filter(|r| (r.detuning_hz - detuning_hz).abs() <= 1e-9 * detuning_hz.abs())
        .filter_map(|r| Some((r.gamma_eff_hz?, r.t_eff_k?)))
        .collect()
}

/// Power at which `G/κ` reaches `ratio` for detuning `delta` (rad/s).
pub fn weak_coupling_power(sys: &OptomechSystem, delta: f64, ratio: f64) -> Result<f64, CliError> {
    let probe = sys.with_drive(1e-3, delta);
    let g = probe.coupling_rates()?.coupling;
    let kappa = sys.cavity.rates()?.kappa;
    Ok(1e-3 * (ratio * kappa / g).powi(2))
}

pub fn run_repro(cfg: &RunConfig, target: Target) -> Result<SweepTable, CliError> {
    match target {
        Target::DetuningScan => detuning_scan(cfg),
        Target::PowerScan => power_scan(cfg),
    }
}

fn detuning_scan(cfg: &RunConfig) -> Result<SweepTable, CliError> {
    let f_m = cfg.mechanics.frequency_hz;
    let n = 81;
    let detunings: Vec<f64> = (0..n)
        .map(|i| f_m * (-2.0 + 4.0 * i as f64 / (n - 1) as f64))
        .collect();
    let rows = sweep_table(cfg, &detunings, &POWER_LADDER)?;
    let gamma_m_hz = cfg.mechanics.frequency_hz / cfg.mechanics.quality_factor;
    let top = POWER_LADDER[POWER_LADDER.len() - 1];
    let near_resonance = |r: &&SweepRecord| r.power_w == top && r.detuning_hz.abs() <= f_m;
    let zero_gamma = rows
        .iter()
        .filter(|r| r.detuning_hz == 0.0)
        .filter_map(|r| r.gamma_eff_hz)
        .map(|g| (g / gamma_m_hz - 1.0).abs())
        .fold(0.0, f64::max);
    let mut meta_rows = vec![
        meta("target", "detuning-scan"),
        meta("powers_w", format!("{POWER_LADDER:?}")),
        meta("gamma_m_hz", format!("{gamma_m_hz:e}")),
        meta("zero_detuning_gamma_rel_dev", format!("{zero_gamma:e}")),
        meta(
            "top_power_unstable_near_resonance",
            rows.iter()
                .filter(near_resonance)
                .filter(|r| !r.stable)
                .count(),
        ),
    ];
    for p in POWER_LADDER {
        let unstable = rows.iter().filter(|r| r.power_w == p && !r.stable).count();
        meta_rows.push(meta(&format!("unstable_rows_at_{p:e}_w"), unstable));
    }
    Ok(SweepTable {
        meta: meta_rows,
        rows,
    })
}

fn power_scan(cfg: &RunConfig) -> Result<SweepTable, CliError> {
    let sys = cfg.system()?;
    let f_m = cfg.mechanics.frequency_hz;
    let detunings: Vec<f64> = POWER_SCAN_DETUNINGS.iter().map(|k| k * f_m).collect();
    let nearest = POWER_SCAN_DETUNINGS[0] * sys.mechanics.omega_m;
    let p_max = weak_coupling_power(&sys, nearest, WEAK_COUPLING)?.min(POWER_SCAN_CAP);
    if p_max <= POWER_SCAN_MIN {
        return Err(CliError::Input(format!(
            "weak-coupling power limit {p_max:e} W lies below {POWER_SCAN_MIN:e} W"
        )));
    }
    let (a, b) = (POWER_SCAN_MIN.ln(), p_max.ln());
    let powers: Vec<f64> = (0..POWER_SCAN_POINTS)
        .map(|i| (a + (b - a) * i as f64 / (POWER_SCAN_POINTS - 1) as f64).exp())
        .collect();
    let rows = sweep_table(cfg, &detunings, &powers)?;
    let mut meta_rows = vec![
        meta("target", "power-scan"),
        meta("power_min_w", format!("{:e}", powers[0])),
        meta(
            "power_max_w",
            format!("{:e}", powers[POWER_SCAN_POINTS - 1]),
        ),
        meta("max_coupling_over_kappa", format!("{WEAK_COUPLING:e}")),
    ];
    for (k, d) in POWER_SCAN_DETUNINGS.iter().zip(&detunings) {
        let pairs = gamma_temperature_pairs(&rows, *d);
        let slope = log_log_slope(&pairs);
        let key = format!("slope_at_{k}_omega_m");
        meta_rows.push(meta(&key, slope.map_or("nan".into(), |s| format!("{s:e}"))));
        if *k == 1.0 {
            meta_rows.push(meta(
                "slope",
                slope.map_or("nan".into(), |s| format!("{s:e}")),
            ));
            meta_rows.push(meta(
                "slope_deviation_from_minus_one",
                slope.map_or("nan".into(), |s| format!("{:e}", s + 1.0)),
            ));
        }
    }
    Ok(SweepTable {
        meta: meta_rows,
        rows,
    })
}

/// Reads a metadata value back as a number.
pub fn meta_f64(table: &SweepTable, key: &str) -> Option<f64> {
    table
        .meta
        .iter()
        .find(|(k, _)| k == key)
        .and_then(|(_, v)| v.parse().ok())
}
