//! Row sinks: JSON-lines or CSV, with a summary footer.
//!
//! In JSON mode the summary is the last line of the stream, wrapped as
//! `{"summary": ...}`. CSV has no room for it, so it goes to stderr.

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::Path;

use anyhow::Result;
use serde::Serialize;

use crate::format::F15;

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

enum Inner {
    Json(Box<dyn Write + Send>),
    Csv(csv::Writer<Box<dyn Write + Send>>),
}

pub struct Sink {
    inner: Inner,
}

impl Sink {
    pub fn new(path: Option<&Path>, format: Format) -> Result<Self> {
        let out: Box<dyn Write + Send> = match path {
            Some(p) => Box::new(BufWriter::new(File::create(p)?)),
            None => Box::new(BufWriter::new(io::stdout())),
        };
        Ok(Self::from_writer(out, format))
    }

    pub fn from_writer(out: Box<dyn Write + Send>, format: Format) -> Self {
        let inner = match format {
            Format::Json => Inner::Json(out),
            Format::Csv => Inner::Csv(csv::Writer::from_writer(out)),
        };
        Self { inner }
    }

    pub fn row<T: Serialize>(&mut self, row: &T) -> Result<()> {
        match &mut self.inner {
            Inner::Json(w) => {
                serde_json::to_writer(&mut *w, row)?;
                w.write_all(b"\n")?;
            }
            Inner::Csv(w) => w.serialize(row)?,
        }
        Ok(())
    }

    pub fn finish(self, summary: &Summary) -> Result<()> {
        match self.inner {
            Inner::Json(mut w) => {
                serde_json::to_writer(&mut w, &Footer { summary })?;
                w.write_all(b"\n")?;
                w.flush()?;
            }
            Inner::Csv(mut w) => {
                w.flush()?;
                eprintln!("{}", serde_json::to_string(&Footer { summary })?);
            }
        }
        Ok(())
    }
}

#[derive(Serialize)]
struct Footer<'a> {
    summary: &'a Summary,
}

#[derive(Clone, Debug, Default, Serialize)]
pub struct Summary {
    pub command: String,
    pub seed: Option<u64>,
    pub rows: usize,
    pub passed: usize,
    pub failed: usize,
    /// Rows whose check ran out of budget without a verdict.
    pub warnings: usize,
    /// Largest `-margin` over rows with a negative margin, else 0.
    pub max_negative_margin: F15,
    pub tolerance: F15,
    /// Height cap asserted on every row, when the command has one.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub cap: Option<F15>,
}

impl Summary {
    pub fn new(command: impl Into<String>, seed: Option<u64>, tolerance: f64) -> Self {
        Self {
            command: command.into(),
            seed,
            tolerance: F15(tolerance),
            ..Self::default()
        }
    }

    pub fn record(&mut self, outcome: Outcome, margins: &[f64]) {
        self.rows += 1;
        match outcome {
            Outcome::Pass => self.passed += 1,
            Outcome::Fail => self.failed += 1,
            Outcome::Warn => {
                self.passed += 1;
                self.warnings += 1;
            }
        }
        for &m in margins {
            if m < 0.0 && -m > self.max_negative_margin.0 {
                self.max_negative_margin = F15(-m);
            }
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Outcome {
    Pass,
    /// Passed, but some check was cut short by a budget.
    Warn,
    Fail,
}

impl Outcome {
    pub fn worst(self, other: Self) -> Self {
        use Outcome::*;
        match (self, other) {
            (Fail, _) | (_, Fail) => Fail,
            (Warn, _) | (_, Warn) => Warn,
            _ => Pass,
        }
    }
}
