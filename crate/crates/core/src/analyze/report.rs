//! Text serialization: JSON and CSV with every float at 17 significant digits.

use std::collections::BTreeMap;
use std::io;

use serde::Serialize;
use serde_json::ser::Formatter;

use super::classify::ClassificationReport;
use crate::diffgeo::TolerancePolicy;
use crate::error::{Error, Result};

/// Round-trip safe rendering of a float; non-finite values print as `NaN`, `inf`, `-inf`.
pub fn fmt_f64(v: f64) -> String {
    if v.is_finite() {
        format!("{v:.16e}")
    } else if v.is_nan() {
        "NaN".to_string()
    } else if v > 0.0 {
        "inf".to_string()
    } else {
        "-inf".to_string()
    }
}

/// Compact JSON formatter printing floats with 17 significant digits.
/// Non-finite floats are written as `null` by the serializer itself.
struct Fixed17;

impl Formatter for Fixed17 {
    fn write_f64<W: ?Sized + io::Write>(&mut self, writer: &mut W, value: f64) -> io::Result<()> {
        writer.write_all(format!("{value:.16e}").as_bytes())
    }

    fn write_f32<W: ?Sized + io::Write>(&mut self, writer: &mut W, value: f32) -> io::Result<()> {
        self.write_f64(writer, f64::from(value))
    }
}

pub fn to_json<T: Serialize + ?Sized>(value: &T) -> Result<String> {
    let mut buf = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut buf, Fixed17);
    value
        .serialize(&mut ser)
        .map_err(|e| Error::Internal(format!("json: {e}")))?;
    String::from_utf8(buf).map_err(|e| Error::Internal(format!("json: {e}")))
}

#[derive(Clone, Debug, PartialEq)]
pub enum Cell {
    Num(f64),
    Int(i64),
    Text(String),
    Bool(bool),
    Empty,
}

impl Cell {
    fn render(&self) -> String {
        match self {
            Cell::Num(v) => fmt_f64(*v),
            Cell::Int(v) => v.to_string(),
            Cell::Text(s) => s.clone(),
            Cell::Bool(b) => b.to_string(),
            Cell::Empty => String::new(),
        }
    }
}

impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        Cell::Num(v)
    }
}

impl From<Option<f64>> for Cell {
    fn from(v: Option<f64>) -> Self {
        v.map_or(Cell::Empty, Cell::Num)
    }
}

impl From<bool> for Cell {
    fn from(v: bool) -> Self {
        Cell::Bool(v)
    }
}

impl From<&str> for Cell {
    fn from(v: &str) -> Self {
        Cell::Text(v.to_string())
    }
}

impl From<String> for Cell {
    fn from(v: String) -> Self {
        Cell::Text(v)
    }
}

impl From<usize> for Cell {
    fn from(v: usize) -> Self {
        Cell::Int(v as i64)
    }
}

/// Rows of cells under named columns.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Table {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new<S: Into<String>>(columns: impl IntoIterator<Item = S>) -> Self {
        Table {
            columns: columns.into_iter().map(Into::into).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn to_csv(&self) -> Result<String> {
        let mut w = csv::Writer::from_writer(Vec::new());
        let err = |e: csv::Error| Error::Internal(format!("csv: {e}"));
        w.write_record(&self.columns).map_err(err)?;
        for row in &self.rows {
            w.write_record(row.iter().map(Cell::render)).map_err(err)?;
        }
        let bytes = w.into_inner().map_err(|e| Error::Internal(format!("csv: {e}")))?;
        String::from_utf8(bytes).map_err(|e| Error::Internal(format!("csv: {e}")))
    }
}

#[derive(Serialize)]
struct PointJson<'a> {
    x: &'a crate::linalg::Vec3,
    alpha: f64,
    #[serde(rename = "S")]
    s: f64,
    dz_kappa: f64,
    kappa: f64,
    verdict: &'static str,
}

#[derive(Serialize)]
struct ClassificationJson<'a> {
    field: &'a str,
    #[serde(rename = "box")]
    bounds: [[f64; 2]; 3],
    resolution: [usize; 3],
    tolerances: &'a TolerancePolicy,
    points: Vec<PointJson<'a>>,
    summary: BTreeMap<&'static str, usize>,
}

pub fn classification_json(rep: &ClassificationReport) -> Result<String> {
    let g = &rep.grid;
    let doc = ClassificationJson {
        field: &rep.field,
        bounds: [0, 1, 2].map(|k| [g.lo[k], g.hi[k]]),
        resolution: g.resolution,
        tolerances: &rep.tolerances,
        points: rep
            .points
            .iter()
            .map(|p| PointJson {
                x: &p.x,
                alpha: p.alpha,
                s: p.criterion_residual,
                dz_kappa: p.dz_kappa,
                kappa: p.kappa,
                verdict: p.verdict.as_str(),
            })
            .collect(),
        summary: rep.summary.iter().map(|(v, n)| (v.as_str(), *n)).collect(),
    };
    to_json(&doc)
}

pub fn classification_table(rep: &ClassificationReport) -> Table {
    let mut t = Table::new(["x", "y", "z", "alpha", "S", "dz_kappa", "kappa", "verdict"]);
    for p in &rep.points {
        t.push(vec![
            p.x[0].into(),
            p.x[1].into(),
            p.x[2].into(),
            p.alpha.into(),
            p.criterion_residual.into(),
            p.dz_kappa.into(),
            p.kappa.into(),
            p.verdict.as_str().into(),
        ]);
    }
    t
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn floats_round_trip() {
        for v in [0.1, -0.48, 1.0 / 3.0, 6.02e23, 5e-324, 0.0] {
            let s = fmt_f64(v);
            assert_eq!(s.parse::<f64>().unwrap(), v);
        }
        assert_eq!(fmt_f64(-0.48), "-4.7999999999999998e-1");
        assert_eq!(fmt_f64(f64::NAN), "NaN");
    }

    #[test]
    fn json_uses_fixed_digits_and_null() {
        let s = to_json(&serde_json::json!({"a": 0.5, "b": [1, 2]})).unwrap();
        assert_eq!(s, r#"{"a":5.0000000000000000e-1,"b":[1,2]}"#);
        let s = to_json(&[f64::NAN, 2.0]).unwrap();
        assert_eq!(s, "[null,2.0000000000000000e0]");
        let v: serde_json::Value = serde_json::from_str(&to_json(&[-0.48]).unwrap()).unwrap();
        assert_eq!(v[0].as_f64(), Some(-0.48));
    }

    #[test]
    fn csv_table() {
        let mut t = Table::new(["a", "b", "c"]);
        t.push(vec![1.5.into(), "x,y".into(), Cell::Empty]);
        assert_eq!(t.to_csv().unwrap(), "a,b,c\n1.5000000000000000e0,\"x,y\",\n");
    }
}
