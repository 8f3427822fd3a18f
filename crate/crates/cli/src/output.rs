use sha2::{Digest, Sha256};

use crate::error::CliError;

/// A CSV table with a fixed column order.
pub struct Table {
    pub header: Vec<&'static str>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(header: Vec<&'static str>) -> Self {
        Self { header, rows: vec![] }
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }

    /// Renders the provenance comment line followed by the CSV body.
    pub fn render(&self, command: &str, config_bytes: &[u8], seed: u64) -> Result<Vec<u8>, CliError> {
        let hash: String = Sha256::digest(config_bytes).iter().map(|b| format!("{b:02x}")).collect();
        let mut out = format!("# command={command} config_sha256={hash} seed={seed}\n").into_bytes();
        {
            let mut w = csv::Writer::from_writer(&mut out);
            let io = |e: csv::Error| CliError::Io(std::io::Error::other(e));
            w.write_record(&self.header).map_err(io)?;
            for row in &self.rows {
                w.write_record(row).map_err(io)?;
            }
            w.flush()?;
        }
        Ok(out)
    }
}

/// Shortest round-trip decimal, in exponent form outside `[1e-4, 1e15)`;
/// empty for NaN.
pub fn num(v: f64) -> String {
    if v == 0.0 || (v.is_finite() && (1e-4..1e15).contains(&v.abs())) {
        format!("{v}")
    } else if v.is_finite() {
        format!("{v:e}")
    } else if v == f64::NEG_INFINITY {
        "-inf".into()
    } else {
        String::new()
    }
}

pub fn log10_of_ln(ln_value: f64) -> String {
    num(ln_value / std::f64::consts::LN_10)
}
