use std::fmt::Write as _;
use std::io::Write;
use std::path::Path;

use crate::error::{Error, Result};

/// One emitted CSV row.
#[derive(Debug, Clone, PartialEq)]
pub struct TrialRecord {
    pub experiment: String,
    pub variant: String,
    pub m: usize,
    pub n: usize,
    pub k: usize,
    pub trial_index: usize,
    pub seed: u64,
    pub angular_error: f64,
    pub hamming_error: f64,
    pub snr_db: f64,
    pub iterations: usize,
    pub consistent: bool,
    pub flips_applied: usize,
    pub sigma: f64,
}

pub const CSV_HEADER: &str = "experiment,variant,M,N,K,trial_index,seed,angular_error,\
hamming_error,snr_db,iterations,consistent,flips_applied,sigma";

impl TrialRecord {
    pub fn validate(&self) -> Result<()> {
        let unit = 0.0..=1.0;
        if !unit.contains(&self.angular_error) || !unit.contains(&self.hamming_error) {
            return Err(Error::Precondition(format!(
                "{} trial {}: errors out of [0, 1] (angular {}, hamming {})",
                self.experiment, self.trial_index, self.angular_error, self.hamming_error
            )));
        }
        if self.consistent && self.hamming_error != 0.0 {
            return Err(Error::Precondition(format!(
                "{} trial {}: consistent with hamming error {}",
                self.experiment, self.trial_index, self.hamming_error
            )));
        }
        if !self.snr_db.is_finite() || !self.sigma.is_finite() {
            return Err(Error::Precondition(format!(
                "{} trial {}: non-finite field",
                self.experiment, self.trial_index
            )));
        }
        Ok(())
    }

    fn write_row(&self, out: &mut String) {
        // reals carry 9 significant digits
        writeln!(
            out,
            "{},{},{},{},{},{},{},{:.8e},{:.8e},{:.8e},{},{},{},{:.8e}",
            self.experiment,
            self.variant,
            self.m,
            self.n,
            self.k,
            self.trial_index,
            self.seed,
            self.angular_error,
            self.hamming_error,
            self.snr_db,
            self.iterations,
            u8::from(self.consistent),
            self.flips_applied,
            self.sigma
        )
        .unwrap();
    }

    fn parse_row(line: &str, lineno: usize) -> Result<Self> {
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != 14 {
            return Err(Error::Parse(format!(
                "line {lineno}: expected 14 fields, got {}",
                fields.len()
            )));
        }
        fn num<T: std::str::FromStr>(s: &str, col: &str, lineno: usize) -> Result<T> {
            s.parse()
                .map_err(|_| Error::Parse(format!("line {lineno}: bad {col} {s:?}")))
        }
        Ok(TrialRecord {
            experiment: fields[0].to_string(),
            variant: fields[1].to_string(),
            m: num(fields[2], "M", lineno)?,
            n: num(fields[3], "N", lineno)?,
            k: num(fields[4], "K", lineno)?,
            trial_index: num(fields[5], "trial_index", lineno)?,
            seed: num(fields[6], "seed", lineno)?,
            angular_error: num(fields[7], "angular_error", lineno)?,
            hamming_error: num(fields[8], "hamming_error", lineno)?,
            snr_db: num(fields[9], "snr_db", lineno)?,
            iterations: num(fields[10], "iterations", lineno)?,
            consistent: match fields[11] {
                "0" => false,
                "1" => true,
                other => {
                    return Err(Error::Parse(format!(
                        "line {lineno}: bad consistent {other:?}"
                    )))
                }
            },
            flips_applied: num(fields[12], "flips_applied", lineno)?,
            sigma: num(fields[13], "sigma", lineno)?,
        })
    }
}

/// Header plus one line per record, in table order.
pub fn to_csv_string(table: &[TrialRecord]) -> Result<String> {
    let mut out = String::with_capacity(64 * (table.len() + 1));
    out.push_str(CSV_HEADER);
    out.push('\n');
    for r in table {
        r.validate()?;
        r.write_row(&mut out);
    }
    Ok(out)
}

pub fn emit_csv(table: &[TrialRecord], path: &Path) -> Result<()> {
    let text = to_csv_string(table)?;
    let mut f = std::fs::File::create(path).map_err(|e| Error::io(path, e))?;
    f.write_all(text.as_bytes())
        .map_err(|e| Error::io(path, e))?;
    Ok(())
}

pub fn parse_csv(text: &str) -> Result<Vec<TrialRecord>> {
    let mut lines = text.lines();
    match lines.next() {
        Some(h) if h == CSV_HEADER => {}
        _ => return Err(Error::Parse("missing or unexpected CSV header".into())),
    }
    lines
        .enumerate()
        .filter(|(_, l)| !l.is_empty())
        .map(|(i, l)| TrialRecord::parse_row(l, i + 2))
        .collect()
}
