//! Census of quadratic maps with a finite critical orbit.
//!
//! Numerators `|p|` are processed in increasing blocks; inside a block the
//! pairs `(q, sign)` run in parallel and are re-sorted before emission.
//! A resource failure stops at a block boundary and reports the block to
//! resume from.

use std::fmt;

use critheight_core::perlambda::GUARD;
use critheight_core::polydyn::OrbitBudget;
use critheight_core::quadratic::{census_candidate, root_of_unity_cap, CensusEntry, CritOrbit};
use critheight_core::{Error, Rational};
use num_bigint::BigInt;
use num_integer::Integer;
use rayon::prelude::*;
use serde::Serialize;

use crate::format::{rat_str, F15};
use crate::report::{Outcome, Sink, Summary};

#[derive(Clone, Debug)]
pub struct CensusConfig {
    pub lambda0: Rational,
    pub height_cap: f64,
    pub den_cap: u64,
    pub budget: OrbitBudget,
    /// First numerator to process.
    pub resume_from: u64,
}

impl Default for CensusConfig {
    fn default() -> Self {
        Self {
            lambda0: Rational::from_integer(1.into()),
            height_cap: 8.0,
            den_cap: 50,
            budget: OrbitBudget {
                steps: 24,
                size_bits: 1 << 14,
            },
            resume_from: 1,
        }
    }
}

#[derive(Serialize)]
pub struct CensusRow {
    pub lambda0: String,
    pub w: String,
    pub lambda_inf: String,
    pub h_lambda_inf: F15,
    pub finite_orbit_critical_point: String,
    pub tail_len: usize,
    pub cycle_len: usize,
    pub truncated_flag: bool,
}

/// One row per finite critical orbit.
pub fn rows(e: &CensusEntry) -> Vec<CensusRow> {
    let truncated = e.truncated();
    e.orbits
        .iter()
        .zip(e.map.critical_points())
        .filter_map(|(o, z)| match o {
            CritOrbit::Finite { tail, cycle } => Some(CensusRow {
                lambda0: rat_str(e.map.lambda0()),
                w: rat_str(e.map.w()),
                lambda_inf: rat_str(e.map.lambda_inf()),
                h_lambda_inf: F15(e.h_lambda_inf),
                finite_orbit_critical_point: rat_str(z),
                tail_len: *tail,
                cycle_len: *cycle,
                truncated_flag: truncated,
            }),
            _ => None,
        })
        .collect()
}

#[derive(Debug)]
pub struct CensusStop {
    pub resume_from: u64,
    pub error: Error,
}

impl fmt::Display for CensusStop {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} (resume with --resume-from {})", self.error, self.resume_from)
    }
}

impl std::error::Error for CensusStop {}

fn block(cfg: &CensusConfig, p: u64) -> Result<Vec<CensusEntry>, Error> {
    let params: Vec<Rational> = (1..=cfg.den_cap)
        .filter(|q| p.gcd(q) == 1)
        .flat_map(|q| [1i64, -1].map(|s| Rational::new(BigInt::from(p) * s, q.into())))
        .collect();
    let found: Vec<Option<CensusEntry>> = params
        .par_iter()
        .map(|w| census_candidate(&cfg.lambda0, w, cfg.height_cap, cfg.budget))
        .collect::<Result<_, Error>>()?;
    let mut out: Vec<CensusEntry> = found.into_iter().flatten().collect();
    out.sort_by_key(CensusEntry::sort_key);
    Ok(out)
}

/// Streams census rows into `sink`.
///
/// Violations of the height cap surface as `Error::Violation`; budget and
/// numeric failures as [`CensusStop`] carrying the resume point.
pub fn run_census(cfg: &CensusConfig, sink: &mut Sink) -> anyhow::Result<Summary> {
    let mut summary = Summary::new("census", None, GUARD);
    summary.cap = Some(F15(root_of_unity_cap()));
    for p in cfg.resume_from.max(1)..=cfg.den_cap {
        let entries = match block(cfg, p) {
            Ok(e) => e,
            Err(e @ Error::Violation(_)) => return Err(e.into()),
            Err(error) => return Err(CensusStop { resume_from: p, error }.into()),
        };
        for e in &entries {
            let outcome = if e.truncated() { Outcome::Warn } else { Outcome::Pass };
            for r in rows(e) {
                summary.record(outcome, &[root_of_unity_cap() - e.h_lambda_inf]);
                sink.row(&r)?;
            }
        }
    }
    Ok(summary)
}
