use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::Path;

use anyhow::{Context, Result};
use infocov::CoverageEstimate;
use serde::Serialize;

use crate::commands::Evaluation;

#[derive(Serialize, Clone, Copy, Debug)]
pub struct Estimate {
    pub mean: f64,
    pub std_error: f64,
}

impl Estimate {
    pub fn exact(mean: f64) -> Self {
        Estimate {
            mean,
            std_error: 0.0,
        }
    }
}

impl From<CoverageEstimate> for Estimate {
    fn from(e: CoverageEstimate) -> Self {
        Estimate {
            mean: e.mean,
            std_error: e.std_error,
        }
    }
}

#[derive(Serialize, Clone, Debug)]
pub struct Row {
    pub algorithm: &'static str,
    pub k: usize,
    pub lambda: f64,
    pub seeds: Vec<String>,
    pub objective: f64,
    pub std_error: f64,
    pub active: f64,
    pub active_std_error: f64,
    pub informed: f64,
    pub informed_std_error: f64,
    pub evaluations: usize,
    pub beta: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub wall_ms: Option<f64>,
}

#[derive(Clone, Copy, PartialEq, Eq)]
pub enum Column {
    Algorithm,
    K,
    Lambda,
    Seeds,
    Objective,
    StdError,
    Active,
    ActiveStdError,
    Informed,
    InformedStdError,
    Evaluations,
    Beta,
}

pub const SELECT_COLUMNS: &[Column] = &[
    Column::Algorithm,
    Column::K,
    Column::Lambda,
    Column::Seeds,
    Column::Objective,
    Column::StdError,
    Column::Evaluations,
    Column::Beta,
];

pub const BENCHMARK_COLUMNS: &[Column] = &[
    Column::Algorithm,
    Column::K,
    Column::Lambda,
    Column::Seeds,
    Column::Objective,
    Column::StdError,
    Column::Active,
    Column::ActiveStdError,
    Column::Informed,
    Column::InformedStdError,
    Column::Evaluations,
    Column::Beta,
];

impl Column {
    fn header(self) -> &'static str {
        match self {
            Column::Algorithm => "algorithm",
            Column::K => "k",
            Column::Lambda => "lambda",
            Column::Seeds => "seeds",
            Column::Objective => "objective",
            Column::StdError => "std_error",
            Column::Active => "active",
            Column::ActiveStdError => "active_std_error",
            Column::Informed => "informed",
            Column::InformedStdError => "informed_std_error",
            Column::Evaluations => "evaluations",
            Column::Beta => "beta",
        }
    }

    fn value(self, row: &Row) -> String {
        match self {
            Column::Algorithm => row.algorithm.to_string(),
            Column::K => row.k.to_string(),
            Column::Lambda => row.lambda.to_string(),
            Column::Seeds => row.seeds.join(";"),
            Column::Objective => row.objective.to_string(),
            Column::StdError => row.std_error.to_string(),
            Column::Active => row.active.to_string(),
            Column::ActiveStdError => row.active_std_error.to_string(),
            Column::Informed => row.informed.to_string(),
            Column::InformedStdError => row.informed_std_error.to_string(),
            Column::Evaluations => row.evaluations.to_string(),
            Column::Beta => row.beta.to_string(),
        }
    }
}

/// Runs `f` against the file at `path`, or standard output.
pub fn write_with(path: Option<&Path>, f: impl FnOnce(&mut dyn Write) -> Result<()>) -> Result<()> {
    match path {
        Some(p) => {
            let file =
                File::create(p).with_context(|| format!("--out: cannot create {}", p.display()))?;
            let mut w = BufWriter::new(file);
            f(&mut w)?;
            w.flush()?;
        }
        None => {
            let stdout = io::stdout();
            let mut w = stdout.lock();
            f(&mut w)?;
            w.flush()?;
        }
    }
    Ok(())
}

pub fn write_csv(
    path: Option<&Path>,
    rows: &[Row],
    columns: &[Column],
    timings: bool,
) -> Result<()> {
    write_with(path, |w| {
        let mut csv = csv::Writer::from_writer(w);
        let mut header: Vec<&str> = columns.iter().map(|c| c.header()).collect();
        if timings {
            header.push("wall_ms");
        }
        csv.write_record(&header)?;
        for row in rows {
            let mut record: Vec<String> = columns.iter().map(|c| c.value(row)).collect();
            if timings {
                record.push(row.wall_ms.map(|t| format!("{t:.3}")).unwrap_or_default());
            }
            csv.write_record(&record)?;
        }
        csv.flush()?;
        Ok(())
    })
}

pub fn write_evaluation_csv(path: Option<&Path>, eval: &Evaluation) -> Result<()> {
    write_with(path, |w| {
        let mut csv = csv::Writer::from_writer(w);
        csv.write_record([
            "objective",
            "std_error",
            "active",
            "active_std_error",
            "informed",
            "informed_std_error",
            "replications",
        ])?;
        csv.write_record([
            eval.objective.mean.to_string(),
            eval.objective.std_error.to_string(),
            eval.active.mean.to_string(),
            eval.active.std_error.to_string(),
            eval.informed.mean.to_string(),
            eval.informed.std_error.to_string(),
            eval.replications.to_string(),
        ])?;
        csv.flush()?;
        Ok(())
    })
}

pub fn write_json<T: Serialize>(path: Option<&Path>, value: &T) -> Result<()> {
    write_with(path, |w| {
        serde_json::to_writer_pretty(&mut *w, value)?;
        writeln!(w)?;
        Ok(())
    })
}
