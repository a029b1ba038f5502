//! Command-line frontend.
//!
//! Exit codes: 0 pass, 1 inequality violation, 2 usage or parse error,
//! 3 resource or numeric failure.

use std::io::Write;
use std::path::PathBuf;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use critheight_core::ffdyn::{
    cink_check, ff_canonical_height_partial, isotriviality_check, CinkVerdict, FFOptions,
};
use critheight_core::places::ff_height_affine;
use critheight_core::polydyn::{canonical_height_green, green_arch, green_nonarch, GreenOptions, OrbitBudget};
use critheight_core::quadratic::{canonical_height_p1, P1};
use critheight_core::{Error, PlaceQ};
use serde::Serialize;

use crate::census::{run_census, CensusConfig, CensusStop};
use crate::format::{parse_place, parse_point, FFHeightRecord, FFMapSpec, GreenRecord, HeightRecord, Map, MapSpec};
use crate::report::{Format, Sink, Summary};
use crate::suites::{run_suite, Suite, VerifyConfig};

#[derive(Parser, Debug)]
#[command(name = "critheight", version, about = "Canonical and critical height verifiers")]
pub struct Cli {
    #[command(flatten)]
    pub global: Global,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Args, Debug, Clone)]
pub struct Global {
    /// Seed for the sample stream.
    #[arg(long, global = true, default_value_t = 42)]
    pub seed: u64,
    /// Number of random samples per suite.
    #[arg(long, global = true, default_value_t = 500)]
    pub samples: usize,
    /// Report file; stdout when absent.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
    /// Exact non-archimedean iteration steps for escape rates.
    #[arg(long, global = true, default_value_t = 10_000)]
    pub max_iter: usize,
    /// Iteration depth: extrapolation steps for quadratic heights, largest
    /// n for the cheb suite, orbit steps for the census.
    #[arg(long, global = true)]
    pub depth: Option<usize>,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Canonical height of a point under a map.
    Height {
        /// `{"d":3,"c":["1","2"]}` or `{"lambda0":"1","w":"1/10"}`.
        #[arg(long)]
        map: String,
        #[arg(long)]
        point: String,
    },
    /// Local escape rate of a point at one place.
    Green {
        #[arg(long)]
        map: String,
        #[arg(long)]
        point: String,
        /// `inf` or a prime.
        #[arg(long)]
        place: String,
    },
    /// Randomized verification of one suite.
    Verify {
        #[arg(value_enum)]
        suite: Suite,
        /// Degrees to cycle through, e.g. `3,4`.
        #[arg(long, value_delimiter = ',', default_value = "3,4")]
        degrees: Vec<usize>,
    },
    /// Quadratic maps with a finite critical orbit.
    Census {
        #[arg(long, default_value = "1", allow_hyphen_values = true)]
        lambda0: String,
        #[arg(long, default_value_t = 8.0)]
        height_cap: f64,
        #[arg(long, default_value_t = 50)]
        den_cap: u64,
        /// First numerator to process, from a previous checkpoint.
        #[arg(long, default_value_t = 1)]
        resume_from: u64,
    },
    /// Function-field checks for one critical vector over `Q(t)`.
    FfCheck {
        /// `{"c":[{"num":[0,1]},{"num":[1],"den":[0,1]}]}`.
        #[arg(long)]
        map: String,
    },
}

/// Marker error for a violated inequality that is not a core error.
#[derive(Debug)]
pub struct ViolationFound(pub String);

impl std::fmt::Display for ViolationFound {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "violation: {}", self.0)
    }
}

impl std::error::Error for ViolationFound {}

/// Marker for malformed input caught outside the core library.
#[derive(Debug)]
pub struct UsageError(pub String);

impl std::fmt::Display for UsageError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for UsageError {}

pub fn exit_code(e: &anyhow::Error) -> i32 {
    for cause in e.chain() {
        if cause.is::<ViolationFound>() {
            return 1;
        }
        if cause.is::<UsageError>() || cause.is::<serde_json::Error>() {
            return 2;
        }
        if cause.is::<CensusStop>() {
            return 3;
        }
        if let Some(err) = cause.downcast_ref::<Error>() {
            return match err {
                Error::Violation(_) => 1,
                Error::Domain(_) | Error::Parse(_) => 2,
                Error::Budget(_) | Error::Numeric { .. } => 3,
            };
        }
    }
    3
}

fn threads() -> Result<rayon::ThreadPool> {
    let mut b = rayon::ThreadPoolBuilder::new();
    if let Ok(v) = std::env::var("CRITHEIGHT_THREADS") {
        let n: usize = v
            .parse()
            .ok()
            .filter(|&n| n > 0)
            .ok_or_else(|| UsageError(format!("CRITHEIGHT_THREADS must be a positive integer, got {v:?}")))?;
        b = b.num_threads(n);
    }
    Ok(b.build()?)
}

fn green_options(g: &Global) -> Result<GreenOptions> {
    if g.max_iter == 0 {
        bail!(UsageError("--max-iter must be positive".into()));
    }
    Ok(GreenOptions {
        nonarch_steps: g.max_iter,
        ..GreenOptions::default()
    })
}

fn print_json<T: Serialize>(g: &Global, value: &T) -> Result<()> {
    let text = serde_json::to_string(value)?;
    match &g.out {
        Some(p) => std::fs::write(p, text + "\n").with_context(|| format!("writing {}", p.display()))?,
        None => {
            let mut out = std::io::stdout().lock();
            writeln!(out, "{text}")?;
        }
    }
    Ok(())
}

fn parse_map(src: &str) -> Result<Map> {
    let spec = MapSpec::parse(src).map_err(|e| UsageError(format!("{e:#}")))?;
    spec.build().map_err(|e| match e.downcast::<Error>() {
        Ok(core) => anyhow::Error::new(core),
        Err(other) => UsageError(format!("{other:#}")).into(),
    })
}

/// Runs the parsed command; returns the process exit code for completed
/// runs (0 or 1).
pub fn run(cli: Cli) -> Result<i32> {
    let g = &cli.global;
    match &cli.command {
        Command::Height { map, point } => {
            let z = parse_point(point)?;
            let record = match parse_map(map)? {
                Map::Poly(cv) => {
                    let P1::Finite(z) = z else {
                        bail!(UsageError("polynomial maps fix infinity; give a finite point".into()))
                    };
                    HeightRecord::from(&canonical_height_green(&cv.poly(), &z, &green_options(g)?)?)
                }
                Map::Quad(q) => {
                    let budget = OrbitBudget {
                        steps: g.depth.unwrap_or(12),
                        size_bits: 1 << 20,
                    };
                    HeightRecord::from(&canonical_height_p1(&q, &z, budget)?)
                }
            };
            print_json(g, &record)?;
            Ok(0)
        }
        Command::Green { map, point, place } => {
            let Map::Poly(cv) = parse_map(map)? else {
                bail!(UsageError("green is defined for polynomial maps".into()))
            };
            let P1::Finite(z) = parse_point(point)? else {
                bail!(UsageError("give a finite point".into()))
            };
            let v = parse_place(place)?;
            let opts = green_options(g)?;
            let f = cv.poly();
            let value = match &v {
                PlaceQ::Arch => green_arch(&f, &z, &opts)?,
                PlaceQ::Prime(p) => green_nonarch(&f, &z, p, &opts),
            };
            print_json(g, &GreenRecord::new(&v, &value))?;
            Ok(0)
        }
        Command::Verify { suite, degrees } => {
            if degrees.is_empty() || degrees.iter().any(|&d| d < 3 || d > 8) {
                bail!(UsageError("--degrees takes values between 3 and 8".into()));
            }
            if g.samples == 0 {
                bail!(UsageError("--samples must be positive".into()));
            }
            let mut cfg = VerifyConfig::new(g.seed);
            cfg.samples = g.samples;
            cfg.degrees = degrees.clone();
            cfg.green = green_options(g)?;
            cfg.depth = g.depth.unwrap_or(match suite {
                Suite::Cheb => 6,
                _ => 10,
            });
            let mut sink = Sink::new(g.out.as_deref(), g.format.unwrap_or(Format::Json))?;
            let summary = threads()?.install(|| run_suite(*suite, &cfg, &mut sink))?;
            finish(sink, &summary)
        }
        Command::Census {
            lambda0,
            height_cap,
            den_cap,
            resume_from,
        } => {
            let lambda0 = critheight_core::arith::parse_rational(lambda0)?;
            if !(height_cap.is_finite() && *height_cap > 0.0) || *den_cap == 0 {
                bail!(UsageError("caps must be positive".into()));
            }
            let mut cfg = CensusConfig {
                lambda0,
                height_cap: *height_cap,
                den_cap: *den_cap,
                resume_from: *resume_from,
                ..CensusConfig::default()
            };
            if let Some(d) = g.depth {
                cfg.budget.steps = d;
            }
            let mut sink = Sink::new(g.out.as_deref(), g.format.unwrap_or(Format::Csv))?;
            let summary = threads()?.install(|| run_census(&cfg, &mut sink))?;
            finish(sink, &summary)
        }
        Command::FfCheck { map } => {
            let spec = FFMapSpec::parse(map).map_err(|e| UsageError(format!("{e:#}")))?;
            let cv = spec.build()?;
            let opts = FFOptions::default();
            let heights = cv
                .c()
                .iter()
                .map(|c| Ok(FFHeightRecord::new(c, &ff_canonical_height_partial(&cv, c, &opts)?)))
                .collect::<Result<Vec<_>>>()?;
            let dep = OrbitBudget {
                steps: g.depth.unwrap_or(4),
                size_bits: 256,
            };
            let verdict = cink_check(&cv, &opts, dep)?;
            let constant = cv.c().iter().all(|c| c.is_constant());
            let violated = match verdict {
                CinkVerdict::ConstantC => !constant,
                CinkVerdict::TwoEscapers { .. } => constant,
                CinkVerdict::Inconclusive(_) => false,
            };
            let report = FFCheckReport {
                h_c: ff_height_affine(cv.c()),
                isotrivial: isotriviality_check(&cv),
                verdict: verdict_string(&verdict),
                critical_heights: heights,
            };
            print_json(g, &report)?;
            if violated {
                return Err(ViolationFound(report.verdict).into());
            }
            Ok(0)
        }
    }
}

#[derive(Serialize)]
struct FFCheckReport {
    h_c: i64,
    isotrivial: bool,
    verdict: String,
    critical_heights: Vec<FFHeightRecord>,
}

fn verdict_string(v: &CinkVerdict) -> String {
    match v {
        CinkVerdict::ConstantC => "constant".into(),
        CinkVerdict::TwoEscapers { i, j, sites_i, sites_j } => {
            let sites = |s: &[(critheight_core::ffdyn::FFSite, critheight_core::Rational)]| {
                s.iter().map(|(site, _)| site.to_string()).collect::<Vec<_>>().join("|")
            };
            format!("escapers {i} [{}] and {j} [{}]", sites(sites_i), sites(sites_j))
        }
        CinkVerdict::Inconclusive(n) => format!("inconclusive after {n} steps"),
    }
}

fn finish(sink: Sink, summary: &Summary) -> Result<i32> {
    sink.finish(summary)?;
    Ok(if summary.failed > 0 { 1 } else { 0 })
}
