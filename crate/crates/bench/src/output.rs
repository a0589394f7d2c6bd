//! Figure rows and their CSV/JSON encodings.

use serde::Serialize;

use crate::error::BenchResult;

/// Version tag written in the first column of every CSV row.
pub const SCHEMA_ID: &str = "dqfi-v1";

pub const CSV_COLUMNS: [&str; 14] = [
    "schema",
    "probe",
    "hamiltonian",
    "N",
    "noise",
    "p",
    "axis_theta",
    "axis_phi",
    "fq",
    "dtheta",
    "ref_snl",
    "ref_hl",
    "ref_nlsnl",
    "ref_nlhl",
];

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

impl Format {
    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "csv" => Some(Format::Csv),
            "json" => Some(Format::Json),
            _ => None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ResultRow {
    pub probe: String,
    pub hamiltonian: String,
    #[serde(rename = "N")]
    pub n_qubits: usize,
    pub noise: String,
    pub p: f64,
    pub axis_theta: f64,
    pub axis_phi: f64,
    pub fq: f64,
    /// `None` when the QFI vanishes.
    pub dtheta: Option<f64>,
    pub ref_snl: f64,
    pub ref_hl: f64,
    pub ref_nlsnl: Option<f64>,
    pub ref_nlhl: Option<f64>,
}

fn cell(v: f64) -> String {
    // Shortest round-trip representation; identical bits give identical text.
    format!("{v}")
}

fn opt_cell(v: Option<f64>) -> String {
    v.filter(|x| x.is_finite()).map(cell).unwrap_or_default()
}

pub fn write_csv<W: std::io::Write>(rows: &[ResultRow], out: W) -> BenchResult<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(CSV_COLUMNS)?;
    for r in rows {
        w.write_record([
            SCHEMA_ID.to_string(),
            r.probe.clone(),
            r.hamiltonian.clone(),
            r.n_qubits.to_string(),
            r.noise.clone(),
            cell(r.p),
            cell(r.axis_theta),
            cell(r.axis_phi),
            cell(r.fq),
            opt_cell(r.dtheta),
            cell(r.ref_snl),
            cell(r.ref_hl),
            opt_cell(r.ref_nlsnl),
            opt_cell(r.ref_nlhl),
        ])?;
    }
    w.flush()?;
    Ok(())
}

#[derive(Serialize)]
struct JsonDocument<'a> {
    schema: &'static str,
    rows: &'a [ResultRow],
}

pub fn write_json<W: std::io::Write>(rows: &[ResultRow], mut out: W) -> BenchResult<()> {
    let doc = JsonDocument {
        schema: SCHEMA_ID,
        rows,
    };
    serde_json::to_writer_pretty(&mut out, &doc)?;
    writeln!(out)?;
    Ok(())
}

pub fn encode(rows: &[ResultRow], format: Format) -> BenchResult<Vec<u8>> {
    let mut buf = Vec::new();
    match format {
        Format::Csv => write_csv(rows, &mut buf)?,
        Format::Json => write_json(rows, &mut buf)?,
    }
    Ok(buf)
}
