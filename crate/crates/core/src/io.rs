//! CSV and JSON serialization.
//!
//! Fields are CSV with header `x,re,im`, one row per node, numbers printed
//! with 17 significant digits. An enlarged state is a directory holding one
//! `<bitstring>_<internal>.csv` per component and a `manifest.json`.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::encoding::{EnlargedState, SymmetryAxis};
use crate::grid::{ComplexField, Grid1D};
use crate::{Error, Result};

pub const ORDERING_CONVENTION: &str = "axis bits big-endian in axis order, bit 0 = even, bit 1 = odd; \
flat index = bits * internal_dim + internal; two parity axes give ee, eo, oe, oo";

/// `{:.16e}` prints 17 significant digits, enough to round-trip an `f64`.
pub fn fmt_f64(v: f64) -> String {
    format!("{v:.16e}")
}

pub fn field_to_csv(field: &ComplexField) -> String {
    let mut out = String::from("x,re,im\n");
    for (j, z) in field.amplitudes().iter().enumerate() {
        let _ = writeln!(out, "{},{},{}", fmt_f64(field.grid().x(j)), fmt_f64(z.re), fmt_f64(z.im));
    }
    out
}

fn parse_num(s: &str, line: usize) -> Result<f64> {
    s.trim()
        .parse()
        .map_err(|_| Error::Config(format!("line {line}: cannot parse {s:?} as a number")))
}

/// Parse a field CSV; the grid is recovered from the node positions.
pub fn field_from_csv(text: &str) -> Result<ComplexField> {
    let mut lines = text.lines();
    match lines.next() {
        Some(h) if h.trim() == "x,re,im" => {}
        other => return Err(Error::Config(format!("expected header x,re,im, got {other:?}"))),
    }
    let mut xs = Vec::new();
    let mut amps = Vec::new();
    for (i, line) in lines.enumerate().filter(|(_, l)| !l.trim().is_empty()) {
        let cols: Vec<&str> = line.split(',').collect();
        if cols.len() != 3 {
            return Err(Error::Config(format!("line {}: expected 3 columns", i + 2)));
        }
        xs.push(parse_num(cols[0], i + 2)?);
        amps.push(Complex64::new(parse_num(cols[1], i + 2)?, parse_num(cols[2], i + 2)?));
    }
    if xs.len() < 2 {
        return Err(Error::Config("field CSV needs at least two rows".into()));
    }
    let n = xs.len();
    let length = (xs[1] - xs[0]) * n as f64;
    let grid = Grid1D::new(n, length)?;
    if (grid.x(0) - xs[0]).abs() > 1e-12 * length {
        return Err(Error::Config(format!("first node {} is not at -L/2 = {}", xs[0], grid.x(0))));
    }
    ComplexField::new(grid, amps)
}

pub fn write_field(path: &Path, field: &ComplexField) -> Result<()> {
    fs::write(path, field_to_csv(field))?;
    Ok(())
}

pub fn read_field(path: &Path) -> Result<ComplexField> {
    field_from_csv(&fs::read_to_string(path)?)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridManifest {
    pub n: usize,
    pub length: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StateManifest {
    pub axes: Vec<SymmetryAxis>,
    pub labels: Vec<String>,
    pub internal_dim: usize,
    pub grid: GridManifest,
    pub ordering: String,
    pub components: Vec<String>,
}

pub fn write_state(dir: &Path, state: &EnlargedState) -> Result<StateManifest> {
    fs::create_dir_all(dir)?;
    let grid = *state.components()[0].grid();
    let mut names = Vec::new();
    for (i, comp) in state.components().iter().enumerate() {
        let name = format!("{}.csv", state.component_name(i));
        write_field(&dir.join(&name), comp)?;
        names.push(name);
    }
    let manifest = StateManifest {
        axes: state.axes().to_vec(),
        labels: state.axes().iter().map(|a| a.label.clone()).collect(),
        internal_dim: state.internal_dim(),
        grid: GridManifest {
            n: grid.n_points(),
            length: grid.length(),
        },
        ordering: ORDERING_CONVENTION.to_string(),
        components: names,
    };
    fs::write(dir.join("manifest.json"), serde_json::to_string_pretty(&manifest)?)?;
    Ok(manifest)
}

pub fn read_state(dir: &Path) -> Result<EnlargedState> {
    let manifest: StateManifest = serde_json::from_str(&fs::read_to_string(dir.join("manifest.json"))?)?;
    let comps = manifest
        .components
        .iter()
        .map(|name| read_field(&dir.join(name)))
        .collect::<Result<Vec<_>>>()?;
    EnlargedState::new(manifest.axes, manifest.internal_dim, comps)
}

/// Complex observable series written as `t,<name>_re,<name>_im,...`.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct TimeSeries {
    pub names: Vec<String>,
    pub rows: Vec<(f64, Vec<Complex64>)>,
}

impl TimeSeries {
    pub fn new(names: Vec<String>) -> Self {
        Self {
            names,
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, t: f64, values: Vec<Complex64>) -> Result<()> {
        if values.len() != self.names.len() {
            return Err(Error::Usage(format!(
                "{} values for {} series",
                values.len(),
                self.names.len()
            )));
        }
        self.rows.push((t, values));
        Ok(())
    }

    pub fn column(&self, name: &str) -> Option<Vec<(f64, Complex64)>> {
        let i = self.names.iter().position(|n| n == name)?;
        Some(self.rows.iter().map(|(t, v)| (*t, v[i])).collect())
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("t");
        for n in &self.names {
            let _ = write!(out, ",{n}_re,{n}_im");
        }
        out.push('\n');
        for (t, values) in &self.rows {
            out.push_str(&fmt_f64(*t));
            for v in values {
                let _ = write!(out, ",{},{}", fmt_f64(v.re), fmt_f64(v.im));
            }
            out.push('\n');
        }
        out
    }
}

/// One JSON object per line.
pub fn to_json_lines<T: Serialize>(records: &[T]) -> Result<String> {
    let mut out = String::new();
    for r in records {
        out.push_str(&serde_json::to_string(r)?);
        out.push('\n');
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::encoding::{even_odd_split, InitialState};
    use crate::grid::{make_grid, sample_packet, PacketParams};

    fn packet() -> ComplexField {
        let g = make_grid(64, 16.0).unwrap();
        sample_packet(&g, &PacketParams::new(1.25, 1.0, 0.7).unwrap()).unwrap()
    }

    #[test]
    fn field_csv_round_trip_is_exact() {
        let f = packet();
        let text = field_to_csv(&f);
        assert!(text.starts_with("x,re,im\n"));
        assert_eq!(text.lines().count(), 65);
        let back = field_from_csv(&text).unwrap();
        assert_eq!(back, f);
    }

    #[test]
    fn seventeen_significant_digits() {
        assert_eq!(fmt_f64(0.1), "1.0000000000000001e-1");
        assert_eq!(fmt_f64(-2.5), "-2.5000000000000000e0");
    }

    #[test]
    fn bad_csv_rejected() {
        assert!(field_from_csv("a,b,c\n").is_err());
        assert!(field_from_csv("x,re,im\n1,2\n").is_err());
        assert!(field_from_csv("x,re,im\n0,0,0\n1,0,0\n0.5,0,0\n").is_err());
    }

    #[test]
    fn state_directory_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let s = even_odd_split(&InitialState::Sampled(packet()), SymmetryAxis::x_parity())
            .unwrap()
            .with_internal_spinor(&[Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.5)])
            .unwrap();
        let m = write_state(dir.path(), &s).unwrap();
        assert_eq!(m.components, ["0_0.csv", "0_1.csv", "1_0.csv", "1_1.csv"]);
        assert_eq!(m.labels, ["x-parity"]);
        assert_eq!(read_state(dir.path()).unwrap(), s);
    }

    #[test]
    fn timeseries_layout() {
        let mut ts = TimeSeries::new(vec!["x1_orig".into()]);
        ts.push(0.0, vec![Complex64::new(1.0, -0.5)]).unwrap();
        assert!(ts.push(1.0, vec![]).is_err());
        let csv = ts.to_csv();
        assert_eq!(csv.lines().next().unwrap(), "t,x1_orig_re,x1_orig_im");
        assert_eq!(ts.column("x1_orig").unwrap()[0].1, Complex64::new(1.0, -0.5));
        let jl = to_json_lines(&[serde_json::json!({"t": 0.0}), serde_json::json!({"t": 1.0})]).unwrap();
        assert_eq!(jl.lines().count(), 2);
    }
}
