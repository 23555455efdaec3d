//! CSV and JSON emission. Numbers in CSV use `{:.16e}` (17 significant
//! digits, `.` decimal), so output round-trips and is byte-stable.

use std::fs::File;
use std::io::{self, BufWriter, Write};

use pmy::{CheckReport, ExtReal, ProxMethod};
use serde::Serialize;

#[derive(Serialize)]
pub struct SweepOutput<R> {
    pub function: String,
    pub p: f64,
    pub eps: f64,
    pub rows: Vec<R>,
}

#[derive(Serialize)]
pub struct EnvelopeRow {
    pub x: Vec<f64>,
    pub f: ExtReal,
    pub f_eps: f64,
    pub gradient: Vec<f64>,
}

#[derive(Serialize)]
pub struct ProxRow {
    pub x: Vec<f64>,
    pub prox: Vec<f64>,
    pub f_eps: f64,
    pub residual: f64,
    pub method: ProxMethod,
    pub inner_iters: usize,
}

#[derive(Serialize)]
pub struct VerifyOutput {
    pub seed: u64,
    pub passed: bool,
    pub reports: Vec<CheckReport>,
}

#[derive(Serialize)]
pub struct FigureCurveRow {
    pub x: f64,
    pub f: ExtReal,
    pub f_eps: f64,
    pub parabolas: Vec<f64>,
}

#[derive(Serialize)]
pub struct FigureIterateRow {
    pub index: usize,
    pub x: f64,
    pub f: ExtReal,
    pub f_eps: f64,
}

#[derive(Serialize)]
pub struct FigureData {
    pub function: String,
    pub p: f64,
    pub eps: f64,
    pub curve: Vec<FigureCurveRow>,
    pub iterates: Vec<FigureIterateRow>,
}

fn num(v: f64) -> String {
    format!("{v:.16e}")
}

/// Column names for a vector quantity: `x` in one dimension, else `x_1..x_n`.
fn vector_columns(prefix: &str, dim: usize) -> Vec<String> {
    if dim == 1 {
        vec![prefix.to_string()]
    } else {
        (1..=dim).map(|i| format!("{prefix}_{i}")).collect()
    }
}

fn dim_of<R>(rows: &[R], x: impl Fn(&R) -> &[f64]) -> usize {
    rows.first().map_or(1, |r| x(r).len())
}

/// Buffered stdout or file output.
pub struct Sink {
    inner: Box<dyn Write>,
}

impl Sink {
    pub fn open(path: &str) -> io::Result<Self> {
        let inner: Box<dyn Write> = if path == "-" {
            Box::new(BufWriter::new(io::stdout().lock()))
        } else {
            Box::new(BufWriter::new(File::create(path)?))
        };
        Ok(Self { inner })
    }

    pub fn finish(&mut self) -> io::Result<()> {
        self.inner.flush()
    }

    pub fn json<T: Serialize>(&mut self, value: &T) -> io::Result<()> {
        serde_json::to_writer_pretty(&mut self.inner, value)?;
        writeln!(self.inner)
    }

    fn csv(&mut self) -> csv::Writer<&mut dyn Write> {
        csv::Writer::from_writer(&mut *self.inner)
    }

    pub fn envelope_csv(&mut self, out: &SweepOutput<EnvelopeRow>) -> io::Result<()> {
        let dim = dim_of(&out.rows, |r| &r.x);
        let mut w = self.csv();
        let mut header = vector_columns("x", dim);
        header.extend(["f".to_string(), "f_eps".to_string()]);
        header.extend(vector_columns("grad", dim));
        w.write_record(&header)?;
        for r in &out.rows {
            let mut rec: Vec<String> = r.x.iter().copied().map(num).collect();
            rec.push(r.f.to_string_exact());
            rec.push(num(r.f_eps));
            rec.extend(r.gradient.iter().copied().map(num));
            w.write_record(&rec)?;
        }
        w.flush()
    }

    pub fn prox_csv(&mut self, out: &SweepOutput<ProxRow>) -> io::Result<()> {
        let dim = dim_of(&out.rows, |r| &r.x);
        let mut w = self.csv();
        let mut header = vector_columns("x", dim);
        header.extend(vector_columns("prox", dim));
        header.extend(["f_eps", "residual", "method", "inner_iters"].map(String::from));
        w.write_record(&header)?;
        for r in &out.rows {
            let mut rec: Vec<String> = r.x.iter().chain(&r.prox).copied().map(num).collect();
            rec.extend([
                num(r.f_eps),
                num(r.residual),
                r.method.as_str().to_string(),
                r.inner_iters.to_string(),
            ]);
            w.write_record(&rec)?;
        }
        w.flush()
    }

    pub fn verify_csv(&mut self, out: &VerifyOutput) -> io::Result<()> {
        let mut w = self.csv();
        w.write_record(["check", "status", "passed", "tolerance", "seed"])?;
        for r in &out.reports {
            let status = serde_json::to_value(r.status)?;
            w.write_record([
                r.name.clone(),
                status.as_str().unwrap_or_default().to_string(),
                r.passed.to_string(),
                num(r.tolerance),
                r.seed.to_string(),
            ])?;
        }
        w.flush()
    }

    /// One table: `curve` rows carry the parabolas, `iterate` rows leave them empty.
    pub fn figure_csv(&mut self, data: &FigureData) -> io::Result<()> {
        let parabolas = data.curve.first().map_or(0, |r| r.parabolas.len());
        let mut w = self.csv();
        let mut header: Vec<String> = ["kind", "index", "x", "f", "f_eps"].map(String::from).to_vec();
        header.extend((1..=parabolas).map(|i| format!("parabola_{i}")));
        w.write_record(&header)?;
        for (i, r) in data.curve.iter().enumerate() {
            let mut rec = vec![
                "curve".to_string(),
                i.to_string(),
                num(r.x),
                r.f.to_string_exact(),
                num(r.f_eps),
            ];
            rec.extend(r.parabolas.iter().copied().map(num));
            w.write_record(&rec)?;
        }
        for r in &data.iterates {
            let mut rec = vec![
                "iterate".to_string(),
                r.index.to_string(),
                num(r.x),
                r.f.to_string_exact(),
                num(r.f_eps),
            ];
            rec.extend(std::iter::repeat_n(String::new(), parabolas));
            w.write_record(&rec)?;
        }
        w.flush()
    }
}
