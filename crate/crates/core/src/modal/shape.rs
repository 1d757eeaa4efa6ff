use std::fs::File;
use std::io::{BufRead, BufReader, Read, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Normalization {
    /// Largest |u| equals one.
    AntinodeMax,
}

impl Normalization {
    pub fn as_str(self) -> &'static str {
        match self {
            Normalization::AntinodeMax => "antinode_max",
        }
    }
}

/// Sampled transverse mode profile on a uniform axial grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModeShape {
    pub x: Vec<f64>,
    pub u: Vec<f64>,
    pub normalization: Normalization,
    pub mode_index: usize,
    /// Rayleigh-quotient frequency estimate (rad/s).
    pub omega: f64,
    /// `∫(ρA + λ_pad) u² dx` (kg).
    pub modal_mass: f64,
    /// Modal mass over total mass.
    pub mass_fraction: f64,
}

impl ModeShape {
    pub fn length(&self) -> f64 {
        self.x[self.x.len() - 1] - self.x[0]
    }

    /// Linear interpolation of `u`; zero outside the beam.
    pub fn interpolate(&self, x: f64) -> f64 {
        let xs = &self.x;
        if x < xs[0] || x > xs[xs.len() - 1] {
            return 0.0;
        }
        let i = xs.partition_point(|&v| v <= x).clamp(1, xs.len() - 1);
        let (a, b) = (xs[i - 1], xs[i]);
        let t = (x - a) / (b - a);
        self.u[i - 1] + t * (self.u[i] - self.u[i - 1])
    }

    pub fn write_csv<W: Write>(&self, mut out: W) -> Result<()> {
        writeln!(out, "# normalization: {}", self.normalization.as_str())?;
        writeln!(out, "# mode_index: {}", self.mode_index)?;
        writeln!(out, "# omega_rad_s: {:e}", self.omega)?;
        writeln!(out, "# modal_mass_kg: {:e}", self.modal_mass)?;
        writeln!(out, "# mass_fraction: {:e}", self.mass_fraction)?;
        writeln!(out, "x_m,u")?;
        for (x, u) in self.x.iter().zip(&self.u) {
            writeln!(out, "{x:e},{u:e}")?;
        }
        Ok(())
    }

    pub fn read_csv<R: Read>(input: R) -> Result<Self> {
        let mut meta = std::collections::BTreeMap::new();
        let (mut x, mut u) = (Vec::new(), Vec::new());
        let mut header_seen = false;
        for (i, line) in BufReader::new(input).lines().enumerate() {
            let line = line?;
            let lineno = i as u64 + 1;
            let err = |message: String| Error::Parse {
                line: lineno,
                message,
            };
            let t = line.trim();
            if t.is_empty() {
                continue;
            }
            if let Some(rest) = t.strip_prefix('#') {
                let (k, v) = rest
                    .split_once(':')
                    .ok_or_else(|| err("expected `# key: value`".into()))?;
                meta.insert(k.trim().to_string(), (lineno, v.trim().to_string()));
                continue;
            }
            if !header_seen {
                if t != "x_m,u" {
                    return Err(err("expected header `x_m,u`".into()));
                }
                header_seen = true;
                continue;
            }
            let (a, b) = t
                .split_once(',')
                .ok_or_else(|| err("expected two columns".into()))?;
            x.push(
                a.trim()
                    .parse::<f64>()
                    .map_err(|e| err(format!("x_m: {e}")))?,
            );
            u.push(
                b.trim()
                    .parse::<f64>()
                    .map_err(|e| err(format!("u: {e}")))?,
            );
        }
        let get = |key: &str| -> Result<(u64, String)> {
            meta.get(key).cloned().ok_or_else(|| Error::Parse {
                line: 1,
                message: format!("missing `# {key}:` line"),
            })
        };
        let num = |key: &str| -> Result<f64> {
            let (line, v) = get(key)?;
            v.parse().map_err(|e| Error::Parse {
                line,
                message: format!("{key}: {e}"),
            })
        };
        let (line, norm) = get("normalization")?;
        if norm != Normalization::AntinodeMax.as_str() {
            return Err(Error::Parse {
                line,
                message: format!("unknown normalization {norm:?}"),
            });
        }
        let (line, idx) = get("mode_index")?;
        let mode_index = idx.parse().map_err(|e| Error::Parse {
            line,
            message: format!("mode_index: {e}"),
        })?;
        if x.len() < 2 || x.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::domain(
                "x_m",
                "need at least two strictly increasing samples",
            ));
        }
        Ok(Self {
            x,
            u,
            normalization: Normalization::AntinodeMax,
            mode_index,
            omega: num("omega_rad_s")?,
            modal_mass: num("modal_mass_kg")?,
            mass_fraction: num("mass_fraction")?,
        })
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        let mut f = std::io::BufWriter::new(File::create(path)?);
        self.write_csv(&mut f)?;
        f.flush()?;
        Ok(())
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        Self::read_csv(File::open(path)?)
    }
}
