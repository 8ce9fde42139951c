//! Deterministic CSV/JSON artifacts.

use std::fs;
use std::io::{self, Write};
use std::path::Path;

use serde::Serialize;

/// 17 significant digits in lowercase scientific notation; round-trips
/// every `f64` exactly. Non-finite values are written `nan`, `inf`, `-inf`.
pub fn num(x: f64) -> String {
    if x.is_nan() {
        "nan".into()
    } else if x.is_infinite() {
        if x > 0.0 { "inf".into() } else { "-inf".into() }
    } else {
        format!("{x:.16e}")
    }
}

/// A CSV file held in memory until the single writer flushes it.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub name: String,
    pub header: &'static str,
    pub rows: Vec<String>,
}

impl Table {
    pub fn new(name: &str, header: &'static str) -> Self {
        Self { name: name.into(), header, rows: Vec::new() }
    }

    pub fn push(&mut self, fields: &[f64]) {
        let row: Vec<String> = fields.iter().map(|&x| num(x)).collect();
        self.rows.push(row.join(","));
    }

    pub fn push_raw(&mut self, row: String) {
        self.rows.push(row);
    }

    pub fn write_to(&self, dir: &Path) -> io::Result<()> {
        let mut out = io::BufWriter::new(fs::File::create(dir.join(&self.name))?);
        writeln!(out, "{}", self.header)?;
        for r in &self.rows {
            writeln!(out, "{r}")?;
        }
        out.flush()
    }
}

pub const TRAJECTORY_HEADER: &str = "t,qx,dgamma,re_c_plus,im_c_plus,re_c_minus,im_c_minus,re_expE,im_expE,\
band_index,spin,re_E_plus,im_E_plus,re_E_minus,im_E_minus,log_norm";
pub const BANDS_HEADER: &str = "qx,dgamma,re_E_plus,im_E_plus,re_E_minus,im_E_minus,spin_plus,spin_minus,ep_flag";
pub const POINTSOURCE_HEADER: &str = "angle,arclen,qx,dgamma,band_index";
pub const NATFRONT_HEADER: &str = "angle,radius_measured,radius_predicted";
pub const SPEEDSWEEP_HEADER: &str = "speed,band_index_final";
pub const PHASEDIAGRAM_HEADER: &str = "x_m,h,band_index_final";
pub const BOUNDARY_HEADER: &str = "x_m,h_star";

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OutputFile {
    pub file: String,
    pub rows: usize,
}

/// Record of one run, written as `manifest.json` next to its outputs.
#[derive(Debug, Clone, Serialize)]
pub struct RunManifest {
    pub tool: &'static str,
    pub version: &'static str,
    pub experiment: &'static str,
    pub config: serde_json::Value,
    pub wall_clock_seconds: f64,
    pub outputs: Vec<OutputFile>,
    /// Conditions worth knowing that did not fail the run, e.g. grid points
    /// on the exceptional point or columns without a predicted boundary.
    pub notes: Vec<String>,
}

impl RunManifest {
    pub fn write_to(&self, dir: &Path) -> io::Result<()> {
        let text = serde_json::to_string_pretty(self).map_err(io::Error::other)?;
        fs::write(dir.join("manifest.json"), text + "\n")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn numbers_round_trip() {
        for &x in &[0.0, -0.0, 1.0, -2.5e-300, std::f64::consts::PI, 1e300, f64::MIN_POSITIVE, 0.1 + 0.2] {
            let s = num(x);
            assert_eq!(s.parse::<f64>().unwrap().to_bits(), x.to_bits(), "{s}");
            assert_eq!(s, s.to_lowercase());
        }
        assert_eq!(num(1.0), "1.0000000000000000e0");
        assert_eq!(num(f64::NAN), "nan");
        assert_eq!(num(f64::NEG_INFINITY), "-inf");
    }

    #[test]
    fn mantissa_has_seventeen_digits() {
        let s = num(-123.456);
        let mantissa = s.split('e').next().unwrap();
        assert_eq!(mantissa.chars().filter(|c| c.is_ascii_digit()).count(), 17);
    }

    #[test]
    fn table_writes_header_and_rows() {
        let dir = tempfile::tempdir().unwrap();
        let mut t = Table::new("x.csv", SPEEDSWEEP_HEADER);
        t.push(&[0.5, -1.0]);
        t.write_to(dir.path()).unwrap();
        let text = fs::read_to_string(dir.path().join("x.csv")).unwrap();
        assert_eq!(text, "speed,band_index_final\n5.0000000000000000e-1,-1.0000000000000000e0\n");
    }
}
