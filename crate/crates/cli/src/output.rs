//! Tables rendered as CSV (decimals, 12 digits) or JSON (exact values).

use std::any::Any;
use std::io::Write;

use milnor_core::{CycloNumber, Scalar};
use serde_json::{json, Map, Value};

use crate::CliError;

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

/// A point on the unit circle, with its `N/k` spec when one is known.
#[derive(Clone, Debug)]
pub struct Point<S> {
    pub spec: Option<String>,
    pub value: S,
}

impl<S: Scalar> Point<S> {
    pub fn new(value: S) -> Self {
        Point {
            spec: root_spec(&value),
            value,
        }
    }
}

/// `N/k` in lowest terms with `0 <= k < N`, if `x` is a root of unity of
/// small order.
pub fn root_spec<S: Scalar>(x: &S) -> Option<String> {
    let c = x.to_c64();
    if (c.norm() - 1.0).abs() > 1e-6 {
        return None;
    }
    let turns = c.arg().rem_euclid(std::f64::consts::TAU) / std::f64::consts::TAU;
    let orders: Vec<u64> = match x.ambient_order() {
        // roots of unity in ℚ(ζ_m) are ±ζ_m^k
        Some(m) => vec![num_integer::lcm(m, 2)],
        None => (1..=720).collect(),
    };
    for n in orders {
        let k = (turns * n as f64).round() as i64 % n as i64;
        if ((turns * n as f64) - (turns * n as f64).round()).abs() > 1e-6 {
            continue;
        }
        let exact = S::root_of_unity(n, k).ok()?.with_backend(&backend_of(x));
        if exact.approx_eq(x) {
            let g = num_integer::gcd(k as u64, n).max(1);
            return Some(format!("{}/{}", n / g, k as u64 / g));
        }
    }
    None
}

fn backend_of<S: Scalar>(x: &S) -> milnor_core::Backend {
    match x.ambient_order() {
        Some(order) => milnor_core::Backend::ExactCyclotomic { order },
        None => milnor_core::Backend::FloatComplex {
            tolerance: milnor_core::field::DEFAULT_FLOAT_TOLERANCE,
        },
    }
}

/// Exact JSON for cyclotomic values, `{"re", "im"}` for floats.
pub fn scalar_json<S: Scalar>(x: &S) -> Value {
    match (x as &dyn Any).downcast_ref::<CycloNumber>() {
        Some(z) => serde_json::to_value(z).unwrap_or(Value::Null),
        None => {
            let c = x.to_c64();
            json!({"re": c.re, "im": c.im})
        }
    }
}

fn decimal(x: f64) -> String {
    // avoid "-0.000000000000"
    let s = format!("{x:.12}");
    if s.trim_start_matches('-').chars().all(|c| c == '0' || c == '.') {
        s.trim_start_matches('-').to_string()
    } else {
        s
    }
}

#[derive(Clone, Debug)]
pub enum Cell {
    Int(i64),
    OptInt(Option<i64>),
    Bool(bool),
    Text(String),
    /// Expands to `name`, `name_re`, `name_im` in CSV and to `name` (the
    /// spec) plus `name_exact` in JSON.
    Point { spec: Option<String>, re: f64, im: f64, exact: Value },
    /// A field element: a decimal pair in CSV, exact in JSON.
    Scalar { re: f64, im: f64, exact: Value },
}

impl Cell {
    pub fn point<S: Scalar>(p: &Point<S>) -> Cell {
        let c = p.value.to_c64();
        Cell::Point {
            spec: p.spec.clone(),
            re: c.re,
            im: c.im,
            exact: scalar_json(&p.value),
        }
    }

    pub fn scalar<S: Scalar>(x: &S) -> Cell {
        let c = x.to_c64();
        Cell::Scalar {
            re: c.re,
            im: c.im,
            exact: scalar_json(x),
        }
    }
}

pub struct Table {
    columns: Vec<&'static str>,
    rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new(columns: Vec<&'static str>) -> Self {
        Table {
            columns,
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    fn csv_header(&self) -> Vec<String> {
        let mut out = Vec::new();
        let sample = self.rows.first();
        for (i, name) in self.columns.iter().enumerate() {
            match sample.map(|r| &r[i]) {
                Some(Cell::Point { .. }) => {
                    out.push(name.to_string());
                    out.push(format!("{name}_re"));
                    out.push(format!("{name}_im"));
                }
                Some(Cell::Scalar { .. }) => {
                    out.push(format!("{name}_re"));
                    out.push(format!("{name}_im"));
                }
                _ => out.push(name.to_string()),
            }
        }
        out
    }

    fn csv_record(row: &[Cell]) -> Vec<String> {
        let mut out = Vec::new();
        for cell in row {
            match cell {
                Cell::Int(v) => out.push(v.to_string()),
                Cell::OptInt(v) => out.push(v.map(|x| x.to_string()).unwrap_or_default()),
                Cell::Bool(b) => out.push(b.to_string()),
                Cell::Text(s) => out.push(s.clone()),
                Cell::Point { spec, re, im, .. } => {
                    out.push(spec.clone().unwrap_or_default());
                    out.push(decimal(*re));
                    out.push(decimal(*im));
                }
                Cell::Scalar { re, im, .. } => {
                    out.push(decimal(*re));
                    out.push(decimal(*im));
                }
            }
        }
        out
    }

    fn json_row(&self, row: &[Cell]) -> Value {
        let mut obj = Map::new();
        for (name, cell) in self.columns.iter().zip(row) {
            match cell {
                Cell::Int(v) => {
                    obj.insert(name.to_string(), json!(v));
                }
                Cell::OptInt(v) => {
                    obj.insert(name.to_string(), json!(v));
                }
                Cell::Bool(b) => {
                    obj.insert(name.to_string(), json!(b));
                }
                Cell::Text(s) => {
                    obj.insert(name.to_string(), json!(s));
                }
                Cell::Point { spec, exact, .. } => {
                    obj.insert(name.to_string(), json!(spec));
                    obj.insert(format!("{name}_exact"), exact.clone());
                }
                Cell::Scalar { exact, .. } => {
                    obj.insert(name.to_string(), exact.clone());
                }
            }
        }
        Value::Object(obj)
    }

    pub fn to_json(&self) -> Value {
        Value::Array(self.rows.iter().map(|r| self.json_row(r)).collect())
    }

    pub fn write(&self, format: Format, out: &mut dyn Write) -> Result<(), CliError> {
        match format {
            Format::Csv => {
                let mut w = csv::Writer::from_writer(out);
                if self.rows.is_empty() {
                    w.write_record(&self.columns)?;
                } else {
                    w.write_record(self.csv_header())?;
                }
                for row in &self.rows {
                    w.write_record(Self::csv_record(row))?;
                }
                w.flush()?;
            }
            Format::Json => {
                serde_json::to_writer_pretty(&mut *out, &self.to_json())?;
                writeln!(out)?;
            }
        }
        Ok(())
    }
}
