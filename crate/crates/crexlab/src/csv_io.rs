//! CSV reading and writing for simulation rows and samples.
//!
//! Simulation rows use the header
//! `distribution,params,estimator,m,l,w,reps,seed,true_value,bias,rmse,mc_se`,
//! with an empty `w` for estimators that take none. Lines starting with `#`
//! are comments. MinRSSU samples use `cycle,set_size,value` (both indices
//! 1-based) and simple random samples a single `value` column.

use std::io::{Read, Write};

use crexlab_core::{Error, MinRssuSample};

use crate::simulation::SimulationRow;

pub const ROW_HEADER: [&str; 12] = [
    "distribution", "params", "estimator", "m", "l", "w", "reps", "seed", "true_value", "bias", "rmse", "mc_se",
];

pub const MINRSSU_HEADER: [&str; 3] = ["cycle", "set_size", "value"];

/// How floating-point fields are written.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NumberFormat {
    /// `%g`-style with this many significant digits.
    Significant(usize),
    /// Shortest representation that parses back to the same value.
    Raw,
}

impl Default for NumberFormat {
    fn default() -> Self {
        NumberFormat::Significant(6)
    }
}

fn trim_fraction(s: &str) -> String {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    } else {
        s.to_string()
    }
}

impl NumberFormat {
    pub fn format(&self, x: f64) -> String {
        match *self {
            NumberFormat::Raw => x.to_string(),
            NumberFormat::Significant(_) if !x.is_finite() => x.to_string(),
            NumberFormat::Significant(_) if x == 0.0 => "0".to_string(),
            NumberFormat::Significant(digits) => {
                let digits = digits.max(1);
                let sci = format!("{:.*e}", digits - 1, x);
                let (mantissa, exp) = sci.split_once('e').expect("exponent form");
                let exp: i32 = exp.parse().expect("integer exponent");
                if exp < -5 || exp >= digits as i32 {
                    format!("{}e{exp}", trim_fraction(mantissa))
                } else {
                    let decimals = (digits as i32 - 1 - exp).max(0) as usize;
                    trim_fraction(&format!("{x:.decimals$}"))
                }
            }
        }
    }
}

fn csv_error(e: csv::Error) -> Error {
    Error::Parse(format!("csv: {e}"))
}

fn io_error(e: std::io::Error) -> Error {
    Error::Parse(format!("io: {e}"))
}

/// Writes rows after optional `# ` comment lines.
pub fn write_rows<W: Write>(
    mut out: W,
    rows: &[SimulationRow],
    fmt: NumberFormat,
    comments: &[String],
) -> Result<(), Error> {
    for c in comments {
        writeln!(out, "# {c}").map_err(io_error)?;
    }
    let mut w = csv::Writer::from_writer(out);
    w.write_record(ROW_HEADER).map_err(csv_error)?;
    for r in rows {
        w.write_record([
            r.distribution.clone(),
            r.params.clone(),
            r.estimator.clone(),
            r.m.to_string(),
            r.l.to_string(),
            r.w.map(|w| w.to_string()).unwrap_or_default(),
            r.reps.to_string(),
            r.seed.to_string(),
            fmt.format(r.true_value),
            fmt.format(r.bias),
            fmt.format(r.rmse),
            fmt.format(r.mc_se),
        ])
        .map_err(csv_error)?;
    }
    w.flush().map_err(io_error)
}

pub fn read_rows<R: Read>(input: R) -> Result<Vec<SimulationRow>, Error> {
    let mut reader = csv::ReaderBuilder::new().comment(Some(b'#')).from_reader(input);
    let header = reader.headers().map_err(csv_error)?.clone();
    if header.iter().ne(ROW_HEADER.iter().copied()) {
        return Err(Error::Parse(format!(
            "unexpected header `{}` (expected `{}`)",
            header.iter().collect::<Vec<_>>().join(","),
            ROW_HEADER.join(",")
        )));
    }
    reader.deserialize().map(|r| r.map_err(csv_error)).collect()
}

/// A sample read from CSV.
#[derive(Debug, Clone, PartialEq)]
pub enum Sample {
    MinRssu(MinRssuSample),
    Srs(Vec<f64>),
}

pub fn write_minrssu_sample<W: Write>(out: W, s: &MinRssuSample, fmt: NumberFormat) -> Result<(), Error> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(MINRSSU_HEADER).map_err(csv_error)?;
    for (cycle, set_size, value) in s.entries() {
        w.write_record([cycle.to_string(), set_size.to_string(), fmt.format(value)])
            .map_err(csv_error)?;
    }
    w.flush().map_err(io_error)
}

pub fn write_srs_sample<W: Write>(out: W, values: &[f64], fmt: NumberFormat) -> Result<(), Error> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["value"]).map_err(csv_error)?;
    for &v in values {
        w.write_record([fmt.format(v)]).map_err(csv_error)?;
    }
    w.flush().map_err(io_error)
}

fn field<T: std::str::FromStr>(record: &csv::StringRecord, i: usize, line: u64) -> Result<T, Error> {
    let raw = record.get(i).unwrap_or("").trim();
    raw.parse()
        .map_err(|_| Error::Parse(format!("line {line}: cannot parse `{raw}`")))
}

/// Reads either sample layout, chosen by the header.
pub fn read_sample<R: Read>(input: R) -> Result<Sample, Error> {
    let mut reader = csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .trim(csv::Trim::All)
        .from_reader(input);
    let header: Vec<String> = reader
        .headers()
        .map_err(csv_error)?
        .iter()
        .map(str::to_string)
        .collect();
    let records = reader.records().collect::<Result<Vec<_>, _>>().map_err(csv_error)?;
    if header == ["value"] {
        return records
            .iter()
            .enumerate()
            .map(|(i, r)| field(r, 0, i as u64 + 2))
            .collect::<Result<_, _>>()
            .map(Sample::Srs);
    }
    if header != MINRSSU_HEADER {
        return Err(Error::Parse(format!(
            "unexpected sample header `{}` (expected `value` or `{}`)",
            header.join(","),
            MINRSSU_HEADER.join(",")
        )));
    }
    let mut entries = Vec::with_capacity(records.len());
    for (i, r) in records.iter().enumerate() {
        let line = i as u64 + 2;
        let cycle: usize = field(r, 0, line)?;
        let set_size: usize = field(r, 1, line)?;
        let value: f64 = field(r, 2, line)?;
        if cycle == 0 || set_size == 0 {
            return Err(Error::Parse(format!("line {line}: cycle and set_size are 1-based")));
        }
        entries.push((cycle, set_size, value));
    }
    let l = entries.iter().map(|e| e.0).max().unwrap_or(0);
    let m = entries.iter().map(|e| e.1).max().unwrap_or(0);
    if m * l != entries.len() {
        return Err(Error::Parse(format!(
            "{} entries do not fill a {l}-cycle design with {m} sets",
            entries.len()
        )));
    }
    let mut values = vec![None; m * l];
    for (cycle, set_size, value) in entries {
        let slot = &mut values[(cycle - 1) * m + set_size - 1];
        if slot.replace(value).is_some() {
            return Err(Error::Parse(format!(
                "duplicate entry for cycle {cycle}, set_size {set_size}"
            )));
        }
    }
    let values = values.into_iter().map(|v| v.expect("filled")).collect();
    MinRssuSample::from_values(m, l, values).map(Sample::MinRssu)
}
