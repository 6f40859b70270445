//! Curve file I/O and the run report.
//!
//! Curve files are UTF-8 JSON with the schema
//! `{degree: int, dimension: int, points: number[][]}`. All floating-point
//! output (curve files and reports) uses 17 significant digits so that a
//! round trip reproduces every coordinate bit-exactly.

use crate::bernstein::BezierCurve;
use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};
use std::io::Write;
use std::path::Path;

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CurveFile {
    pub degree: usize,
    pub dimension: usize,
    pub points: Vec<Vec<f64>>,
}

impl CurveFile {
    pub fn from_curve(c: &BezierCurve) -> Self {
        CurveFile {
            degree: c.degree(),
            dimension: c.dimension(),
            points: c.points().to_vec(),
        }
    }

    pub fn into_curve(self) -> Result<BezierCurve> {
        if self.points.len() != self.degree + 1 {
            return Err(Error::Parse(format!(
                "field 'points': expected {} entries for degree {}, found {}",
                self.degree + 1,
                self.degree,
                self.points.len()
            )));
        }
        if let Some(bad) = self.points.iter().position(|p| p.len() != self.dimension) {
            return Err(Error::Parse(format!(
                "field 'points[{bad}]': expected {} coordinates, found {}",
                self.dimension,
                self.points[bad].len()
            )));
        }
        BezierCurve::new(self.points)
    }
}

pub fn load_curve(path: &Path) -> Result<BezierCurve> {
    let text = std::fs::read_to_string(path)?;
    let file: CurveFile = serde_json::from_str(&text)
        .map_err(|e| Error::Parse(format!("{}: {e}", path.display())))?;
    file.into_curve()
}

pub fn save_curve(curve: &BezierCurve, path: &Path) -> Result<()> {
    let file = CurveFile::from_curve(curve);
    let mut buf = to_json_17(&file)?;
    buf.push(b'\n');
    std::fs::write(path, buf)?;
    Ok(())
}

/// Serialize any value to pretty JSON with every float at 17 significant
/// digits.
pub fn to_json_17<T: Serialize>(value: &T) -> Result<Vec<u8>> {
    let mut out = Vec::new();
    let fmt = SigDigitFormatter { pretty: serde_json::ser::PrettyFormatter::new() };
    let mut ser = serde_json::Serializer::with_formatter(&mut out, fmt);
    value
        .serialize(&mut ser)
        .map_err(|e| Error::Parse(format!("serialization failed: {e}")))?;
    Ok(out)
}

/// Pretty formatter that writes f64 values in scientific notation with
/// 16 digits after the point (17 significant digits).
struct SigDigitFormatter {
    pretty: serde_json::ser::PrettyFormatter<'static>,
}

impl serde_json::ser::Formatter for SigDigitFormatter {
    fn write_f64<W>(&mut self, writer: &mut W, value: f64) -> std::io::Result<()>
    where
        W: ?Sized + Write,
    {
        write!(writer, "{value:.16e}")
    }

    fn begin_array<W>(&mut self, w: &mut W) -> std::io::Result<()>
    where
        W: ?Sized + Write,
    {
        self.pretty.begin_array(w)
    }

    fn end_array<W>(&mut self, w: &mut W) -> std::io::Result<()>
    where
        W: ?Sized + Write,
    {
        self.pretty.end_array(w)
    }

    fn begin_array_value<W>(&mut self, w: &mut W, first: bool) -> std::io::Result<()>
    where
        W: ?Sized + Write,
    {
        self.pretty.begin_array_value(w, first)
    }

    fn end_array_value<W>(&mut self, w: &mut W) -> std::io::Result<()>
    where
        W: ?Sized + Write,
    {
        self.pretty.end_array_value(w)
    }

    fn begin_object<W>(&mut self, w: &mut W) -> std::io::Result<()>
    where
        W: ?Sized + Write,
    {
        self.pretty.begin_object(w)
    }

    fn end_object<W>(&mut self, w: &mut W) -> std::io::Result<()>
    where
        W: ?Sized + Write,
    {
        self.pretty.end_object(w)
    }

    fn begin_object_key<W>(&mut self, w: &mut W, first: bool) -> std::io::Result<()>
    where
        W: ?Sized + Write,
    {
        self.pretty.begin_object_key(w, first)
    }

    fn end_object_key<W>(&mut self, w: &mut W) -> std::io::Result<()>
    where
        W: ?Sized + Write,
    {
        self.pretty.end_object_key(w)
    }

    fn begin_object_value<W>(&mut self, w: &mut W) -> std::io::Result<()>
    where
        W: ?Sized + Write,
    {
        self.pretty.begin_object_value(w)
    }

    fn end_object_value<W>(&mut self, w: &mut W) -> std::io::Result<()>
    where
        W: ?Sized + Write,
    {
        self.pretty.end_object_value(w)
    }
}

/// Run report printed to standard output as JSON.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Report {
    pub mode: String,
    pub k: i32,
    pub l: i32,
    pub p_fixed: bool,
    pub q_fixed: bool,
    pub alpha: f64,
    pub beta: f64,
    pub d0: f64,
    pub d1: f64,
    pub m: usize,
    pub grid: usize,
    pub e2: f64,
    pub einf: f64,
    pub lambda: Vec<f64>,
    pub mu: Vec<f64>,
    pub solver_iterations: usize,
    pub active_bounds: Vec<String>,
    pub gram_condition: f64,
    pub solver_converged: bool,
    pub warnings: Vec<String>,
    pub timings: Timings,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Timings {
    pub phase_a_seconds: f64,
    pub phase_b_seconds: f64,
    pub metrics_seconds: f64,
}
