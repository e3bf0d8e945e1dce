//! Plot-ready artifacts: float formatting for CSV files and the JSON run
//! manifest written next to them.

use std::fs;
use std::io::{BufWriter, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::Result;

/// Round-trip float formatting with 17 significant digits.
pub fn fmt_f64(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.16e}")
    } else if x.is_nan() {
        "nan".to_string()
    } else if x > 0.0 {
        "inf".to_string()
    } else {
        "-inf".to_string()
    }
}

pub const CODE_VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct RowTiming {
    pub label: String,
    pub wall_time: f64,
}

/// Description of one CLI invocation. Wall times live here and never in the
/// CSV files, so identical configurations reproduce identical CSV bytes.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct Manifest {
    pub command: String,
    pub code_version: String,
    pub config: serde_json::Value,
    pub files: Vec<String>,
    pub rows: Vec<RowTiming>,
    pub total_wall_time: f64,
}

impl Manifest {
    pub fn new(command: &str, config: serde_json::Value) -> Self {
        Self {
            command: command.to_string(),
            code_version: CODE_VERSION.to_string(),
            config,
            files: Vec::new(),
            rows: Vec::new(),
            total_wall_time: 0.0,
        }
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        let mut f = BufWriter::new(fs::File::create(path)?);
        serde_json::to_writer_pretty(&mut f, self)?;
        writeln!(f)?;
        f.flush()?;
        Ok(())
    }
}

/// Writes a CSV file from a header and pre-formatted rows.
pub fn write_csv(path: &Path, header: &str, rows: &[Vec<String>]) -> Result<()> {
    let mut f = BufWriter::new(fs::File::create(path)?);
    writeln!(f, "{header}")?;
    for row in rows {
        writeln!(f, "{}", row.join(","))?;
    }
    f.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn seventeen_significant_digits_round_trip() {
        for &x in &[0.1, 1.0 / 3.0, -2.5e-300, 6.02214076e23, 0.0] {
            let s = fmt_f64(x);
            assert_eq!(s.parse::<f64>().unwrap(), x);
            let mantissa = s.split('e').next().unwrap().trim_start_matches('-');
            assert_eq!(mantissa.replace('.', "").len(), 17);
        }
        assert_eq!(fmt_f64(f64::NAN), "nan");
        assert_eq!(fmt_f64(f64::NEG_INFINITY), "-inf");
    }
}
