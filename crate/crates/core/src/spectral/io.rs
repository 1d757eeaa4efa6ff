//! Spectrum CSV: a `# unit: <tag>` line, then `freq_hz,psd,psd_sigma`.
//! An empty `psd_sigma` column means no per-bin uncertainty.

use std::fs::File;
use std::io::{BufRead, BufReader, Read, Write};
use std::path::Path;

use super::{Spectrum, SpectrumUnit};
use crate::error::{Error, Result};

const HEADER: [&str; 3] = ["freq_hz", "psd", "psd_sigma"];

impl Spectrum {
    pub fn write_csv<W: Write>(&self, mut out: W) -> Result<()> {
        writeln!(out, "# unit: {}", self.unit)?;
        let mut w = csv::Writer::from_writer(out);
        let csv_err = |e: csv::Error| Error::Io(e.to_string());
        w.write_record(HEADER).map_err(csv_err)?;
        for i in 0..self.len() {
            let sigma = self
                .sigma
                .as_ref()
                .map(|s| format!("{:e}", s[i]))
                .unwrap_or_default();
            w.write_record([
                format!("{:e}", self.freqs[i]),
                format!("{:e}", self.psd[i]),
                sigma,
            ])
            .map_err(csv_err)?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn read_csv<R: Read>(input: R) -> Result<Self> {
        let mut reader = BufReader::new(input);
        let mut first = String::new();
        reader.read_line(&mut first)?;
        let unit = first
            .trim()
            .strip_prefix('#')
            .and_then(|s| s.trim().strip_prefix("unit:"))
            .ok_or_else(|| Error::Parse {
                line: 1,
                message: "expected `# unit: raw|m2_per_hz`".into(),
            })?
            .parse::<SpectrumUnit>()
            .map_err(|e| Error::Parse {
                line: 1,
                message: e.to_string(),
            })?;

        let mut rdr = csv::ReaderBuilder::new()
            .has_headers(true)
            .trim(csv::Trim::All)
            .from_reader(reader);
        let headers = rdr.headers().map_err(|e| Error::Parse {
            line: 2,
            message: e.to_string(),
        })?;
        if headers.iter().collect::<Vec<_>>() != HEADER {
            return Err(Error::Parse {
                line: 2,
                message: format!("expected header `{}`", HEADER.join(",")),
            });
        }

        let (mut freqs, mut psd, mut sigma) = (Vec::new(), Vec::new(), Vec::new());
        let mut with_sigma = None;
        for rec in rdr.records() {
            let rec = rec.map_err(|e| Error::Parse {
                line: e.position().map_or(0, |p| p.line() + 1),
                message: e.to_string(),
            })?;
            let line = rec.position().map_or(0, |p| p.line() + 1);
            let field = |i: usize| -> Result<f64> {
                rec.get(i)
                    .ok_or_else(|| Error::Parse {
                        line,
                        message: format!("missing column {}", HEADER[i]),
                    })?
                    .parse::<f64>()
                    .map_err(|e| Error::Parse {
                        line,
                        message: format!("{}: {e}", HEADER[i]),
                    })
            };
            freqs.push(field(0)?);
            psd.push(field(1)?);
            let has = rec.get(2).is_some_and(|s| !s.is_empty());
            if *with_sigma.get_or_insert(has) != has {
                return Err(Error::Parse {
                    line,
                    message: "psd_sigma must be given for all rows or none".into(),
                });
            }
            if has {
                sigma.push(field(2)?);
            }
        }
        let sigma = with_sigma.unwrap_or(false).then_some(sigma);
        Spectrum::new(freqs, psd, sigma, unit)
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

#[cfg(test)]
mod tests {
    use super::*;

    fn sample(sigma: bool) -> Spectrum {
        let f: Vec<f64> = (1..=5).map(|i| 9.45e5 + 0.1 * f64::from(i)).collect();
        let y = vec![1e-30, 3.0e-29 / 7.0, 0.0, 1.0 / 3.0, 5e-300];
        let s = sigma.then(|| y.iter().map(|v| v * 0.1).collect());
        Spectrum::new(f, y, s, SpectrumUnit::DisplacementPsd).unwrap()
    }

    #[test]
    fn round_trip_is_bit_exact() {
        for with_sigma in [true, false] {
            let s = sample(with_sigma);
            let mut buf = Vec::new();
            s.write_csv(&mut buf).unwrap();
            let back = Spectrum::read_csv(buf.as_slice()).unwrap();
            assert_eq!(back, s);
            let mut again = Vec::new();
            back.write_csv(&mut again).unwrap();
            assert_eq!(again, buf);
        }
    }

    #[test]
    fn parse_errors_name_the_line() {
        let text = "# unit: raw\nfreq_hz,psd,psd_sigma\n1,2,\n2,oops,\n";
        match Spectrum::read_csv(text.as_bytes()) {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 4),
            other => panic!("{other:?}"),
        }
        let mixed = "# unit: raw\nfreq_hz,psd,psd_sigma\n1,2,0.1\n2,3,\n";
        assert!(matches!(
            Spectrum::read_csv(mixed.as_bytes()),
            Err(Error::Parse { line: 4, .. })
        ));
        assert!(matches!(
            Spectrum::read_csv("freq_hz,psd\n".as_bytes()),
            Err(Error::Parse { line: 1, .. })
        ));
    }
}
