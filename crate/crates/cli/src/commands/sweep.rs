use std::f64::consts::PI;
use std::fmt::Write as _;

use optomech_core::{detuning_sweep, SweepRow};
use serde::{Deserialize, Serialize};

use crate::config::RunConfig;
use crate::error::CliError;

const COLUMNS: [&str; 8] = [
    "detuning_hz",
    "power_w",
    "stable",
    "margin_hz",
    "omega_eff_hz",
    "gamma_eff_hz",
    "t_eff_k",
    "n",
];

/// One sweep cell in interface units. Unstable cells leave the physics
/// fields empty.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SweepRecord {
    pub detuning_hz: f64,
    pub power_w: f64,
    pub stable: bool,
    /// Largest drift eigenvalue real part divided by 2π.
    pub margin_hz: f64,
    pub omega_eff_hz: Option<f64>,
    pub gamma_eff_hz: Option<f64>,
    pub t_eff_k: Option<f64>,
    pub n: Option<f64>,
}

impl SweepRecord {
    pub fn from_row(r: &SweepRow) -> Self {
        let hz = |w: f64| w / (2.0 * PI);
        Self {
            detuning_hz: hz(r.detuning),
            power_w: r.power,
            stable: r.stable,
            margin_hz: hz(r.margin),
            omega_eff_hz: r.omega_eff.map(hz),
            gamma_eff_hz: r.gamma_eff.map(hz),
            t_eff_k: r.t_eff_pred,
            n: r.n,
        }
    }
}

/// Sweep rows plus `# key: value` metadata lines.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepTable {
    pub meta: Vec<(String, String)>,
    pub rows: Vec<SweepRecord>,
}

fn opt(v: Option<f64>) -> String {
    v.map_or(String::new(), |x| format!("{x:e}"))
}

impl SweepTable {
    pub fn to_csv(&self) -> String {
        let mut s = String::new();
        for (k, v) in &self.meta {
            let _ = writeln!(s, "# {k}: {v}");
        }
        s.push_str(&COLUMNS.join(","));
        s.push('\n');
        for r in &self.rows {
            let _ = writeln!(
                s,
                "{:e},{:e},{},{:e},{},{},{},{}",
                r.detuning_hz,
                r.power_w,
                r.stable,
                r.margin_hz,
                opt(r.omega_eff_hz),
                opt(r.gamma_eff_hz),
                opt(r.t_eff_k),
                opt(r.n)
            );
        }
        s
    }

    pub fn from_csv(text: &str) -> Result<Self, CliError> {
        let mut meta = Vec::new();
        let mut rows = Vec::new();
        let mut header_seen = false;
        for (i, line) in text.lines().enumerate() {
            let lineno = i + 1;
            let bad = |m: String| CliError::Input(format!("line {lineno}: {m}"));
            if let Some(rest) = line.strip_prefix("# ") {
                if header_seen {
                    return Err(bad("metadata after the header".into()));
                }
                let (k, v) = rest
                    .split_once(": ")
                    .ok_or_else(|| bad("metadata needs `# key: value`".into()))?;
                meta.push((k.to_string(), v.to_string()));
                continue;
            }
            if !header_seen {
                if line != COLUMNS.join(",") {
                    return Err(bad(format!("expected header `{}`", COLUMNS.join(","))));
                }
                header_seen = true;
                continue;
            }
            let fields: Vec<&str> = line.split(',').collect();
            if fields.len() != COLUMNS.len() {
                return Err(bad(format!("expected {} fields", COLUMNS.len())));
            }
            let num = |j: usize| -> Result<f64, CliError> {
                fields[j]
                    .parse::<f64>()
                    .map_err(|e| bad(format!("{}: {e}", COLUMNS[j])))
            };
            let opt_num = |j: usize| -> Result<Option<f64>, CliError> {
                if fields[j].is_empty() {
                    Ok(None)
                } else {
                    num(j).map(Some)
                }
            };
            rows.push(SweepRecord {
                detuning_hz: num(0)?,
                power_w: num(1)?,
                stable: fields[2].parse().map_err(|e| bad(format!("stable: {e}")))?,
                margin_hz: num(3)?,
                omega_eff_hz: opt_num(4)?,
                gamma_eff_hz: opt_num(5)?,
                t_eff_k: opt_num(6)?,
                n: opt_num(7)?,
            });
        }
        if !header_seen {
            return Err(CliError::Input("sweep table has no header".into()));
        }
        Ok(Self { meta, rows })
    }
}

/// Grid sweep over the configured detunings and powers.
pub fn sweep_table(
    cfg: &RunConfig,
    detunings_hz: &[f64],
    powers_w: &[f64],
) -> Result<Vec<SweepRecord>, CliError> {
    let sys = cfg.system()?;
    let detunings: Vec<f64> = detunings_hz.iter().map(|d| 2.0 * PI * d).collect();
    let rows = detuning_sweep(&sys, &detunings, powers_w)?;
    Ok(rows.iter().map(SweepRecord::from_row).collect())
}

pub fn run_sweep(cfg: &RunConfig) -> Result<SweepTable, CliError> {
    let sweep = cfg
        .sweep
        .as_ref()
        .ok_or_else(|| CliError::Input("config has no [sweep] section".into()))?;
    let (d, p) = (sweep.detuning_hz.values()?, sweep.power_w.values()?);
    let rows = sweep_table(cfg, &d, &p)?;
    let unstable = rows.iter().filter(|r| !r.stable).count();
    Ok(SweepTable {
        meta: vec![
            ("detunings".into(), d.len().to_string()),
            ("powers".into(), p.len().to_string()),
            ("unstable_rows".into(), unstable.to_string()),
        ],
        rows,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn table_round_trips_bit_exactly() {
        let cfg = RunConfig::device();
        let t = run_sweep(&cfg).unwrap();
        assert_eq!(t.rows.len(), 81 * 5);
        let text = t.to_csv();
        let back = SweepTable::from_csv(&text).unwrap();
        assert_eq!(back, t);
        assert_eq!(back.to_csv(), text);
    }

    #[test]
    fn unstable_rows_carry_no_physics() {
        let t = run_sweep(&RunConfig::device()).unwrap();
        let bad: Vec<_> = t.rows.iter().filter(|r| !r.stable).collect();
        assert!(!bad.is_empty());
        assert!(bad
            .iter()
            .all(|r| r.n.is_none() && r.gamma_eff_hz.is_none() && r.t_eff_k.is_none()));
    }

    #[test]
    fn malformed_row_names_its_line() {
        let mut text = run_sweep(&RunConfig::device()).unwrap().to_csv();
        text.push_str("1,2,maybe,0,,,,\n");
        let err = SweepTable::from_csv(&text).unwrap_err().to_string();
        let expected = text.lines().count();
        assert!(err.contains(&format!("line {expected}")), "{err}");
    }
}
