//! Randomized verifier suites behind `verify <suite>`.
//!
//! Samples are drawn up front in index order, evaluated in parallel, and
//! emitted in index order, so reports do not depend on the thread count.

use anyhow::Result;
use critheight_core::ffdyn::{
    cink_check, ff_canonical_height_partial, isotriviality_check, CinkVerdict, FFCritVector,
    FFOptions,
};
use critheight_core::perlambda::{
    sample_per1, sweight_check, theorem_margin, DichotomyBranch, DichotomyContext, MarginClass,
    GUARD,
};
use critheight_core::places::ff_height_affine;
use critheight_core::polydyn::{GreenOptions, OrbitBudget};
use critheight_core::quadratic::{
    cheb_fixed_multiplier, cheb_iterate, halfheight_check, quad2_check,
    s_places_quad, QuadMap, P1,
};
use critheight_core::{Rational, RationalFunction};
use num_traits::{One, Zero};
use rayon::prelude::*;
use serde::Serialize;

use crate::format::{join_rats, rat_str, F15};
use crate::report::{Outcome, Sink, Summary};
use crate::sampling::Sampler;

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum Suite {
    Per1,
    Ff,
    Quad,
    Cheb,
}

#[derive(Clone, Debug)]
pub struct VerifyConfig {
    pub seed: u64,
    pub samples: usize,
    pub degrees: Vec<usize>,
    pub green: GreenOptions,
    pub orbit: OrbitBudget,
    /// Extrapolation depth for `quad`, largest `n` for `cheb`.
    pub depth: usize,
    pub prime_bound: u64,
}

impl VerifyConfig {
    pub fn new(seed: u64) -> Self {
        Self {
            seed,
            samples: 500,
            degrees: vec![3, 4],
            green: GreenOptions::default(),
            orbit: OrbitBudget {
                steps: 6,
                size_bits: 1 << 10,
            },
            depth: 10,
            prime_bound: 97,
        }
    }
}

/// A single checked row with its outcome and signed margins.
struct Checked<R> {
    row: R,
    outcome: Outcome,
    margins: Vec<f64>,
}

fn emit<R: Serialize>(sink: &mut Sink, summary: &mut Summary, rows: Vec<Checked<R>>) -> Result<()> {
    for r in rows {
        summary.record(r.outcome, &r.margins);
        if r.outcome == Outcome::Fail {
            eprintln!("violation: {}", serde_json::to_string(&r.row)?);
        }
        sink.row(&r.row)?;
    }
    Ok(())
}

pub fn run_suite(suite: Suite, cfg: &VerifyConfig, sink: &mut Sink) -> Result<Summary> {
    let name = match suite {
        Suite::Per1 => "verify per1",
        Suite::Ff => "verify ff",
        Suite::Quad => "verify quad",
        Suite::Cheb => "verify cheb",
    };
    let mut summary = Summary::new(name, Some(cfg.seed), GUARD);
    match suite {
        Suite::Per1 => emit(sink, &mut summary, per1(cfg))?,
        Suite::Ff => emit(sink, &mut summary, ff(cfg))?,
        Suite::Quad => emit(sink, &mut summary, quad(cfg))?,
        Suite::Cheb => emit(sink, &mut summary, cheb(cfg))?,
    }
    Ok(summary)
}

fn degree_for(cfg: &VerifyConfig, i: usize) -> usize {
    cfg.degrees[i % cfg.degrees.len()]
}

// ---------------------------------------------------------------------------

#[derive(Serialize)]
pub struct Per1Row {
    pub index: usize,
    pub d: usize,
    pub lambda: String,
    pub c: String,
    pub h_c: F15,
    pub h_lambda: F15,
    pub sweight_lhs: F15,
    pub sweight_rhs: F15,
    pub sweight_margin: F15,
    /// `place:branch` for each prime `d < p <= bound` in `S`.
    pub dichotomy: String,
    pub min_pair: F15,
    pub eps_hc: F15,
    pub class: String,
    pub tolerance: F15,
    pub outcome: Outcome,
    pub note: String,
}

fn per1(cfg: &VerifyConfig) -> Vec<Checked<Per1Row>> {
    let mut s = Sampler::new(cfg.seed);
    let inputs: Vec<(usize, Rational, Vec<Rational>)> = (0..cfg.samples)
        .map(|i| {
            let d = degree_for(cfg, i);
            let lambda = s.nonzero_rational(100);
            let free = (0..d.saturating_sub(2)).map(|_| s.nonzero_rational(100)).collect();
            (d, lambda, free)
        })
        .collect();
    inputs
        .par_iter()
        .enumerate()
        .map(|(i, (d, lambda, free))| per1_row(cfg, i, *d, lambda, free))
        .collect()
}

fn per1_row(cfg: &VerifyConfig, index: usize, d: usize, lambda: &Rational, free: &[Rational]) -> Checked<Per1Row> {
    let mut row = Per1Row {
        index,
        d,
        lambda: rat_str(lambda),
        c: String::new(),
        h_c: F15(f64::NAN),
        h_lambda: F15(f64::NAN),
        sweight_lhs: F15(f64::NAN),
        sweight_rhs: F15(f64::NAN),
        sweight_margin: F15(f64::NAN),
        dichotomy: String::new(),
        min_pair: F15(f64::NAN),
        eps_hc: F15(f64::NAN),
        class: String::new(),
        tolerance: F15(GUARD),
        outcome: Outcome::Pass,
        note: String::new(),
    };
    let mut margins = Vec::new();
    let result = (|| -> Result<Outcome> {
        let sample = sample_per1(d, lambda, free)?;
        row.c = join_rats(sample.c());
        row.h_c = F15(sample.h_c.to_f64());
        row.h_lambda = F15(sample.h_lambda.to_f64());
        let sw = sweight_check(&sample)?;
        row.sweight_lhs = F15(sw.lhs.to_f64());
        row.sweight_rhs = F15(sw.rhs.to_f64());
        row.sweight_margin = F15(sw.margin.to_f64());
        margins.push(sw.margin.to_f64());
        let mut outcome = if sw.holds() { Outcome::Pass } else { Outcome::Fail };
        let ctx = DichotomyContext::new(&sample, &cfg.green, cfg.orbit)?;
        let mut parts = Vec::new();
        for p in ctx.good_primes(cfg.prime_bound) {
            let r = ctx.check(&p)?;
            let tag = match &r.branch {
                DichotomyBranch::CBounded => "bounded".to_string(),
                DichotomyBranch::IndependentEscaper { index, .. } => format!("escaper{index}"),
                DichotomyBranch::Undecided => {
                    outcome = outcome.worst(Outcome::Warn);
                    "undecided".to_string()
                }
                DichotomyBranch::Violation => {
                    outcome = Outcome::Fail;
                    "violation".to_string()
                }
            };
            parts.push(format!("{p}:{tag}"));
        }
        row.dichotomy = parts.join(";");
        let tm = theorem_margin(&sample, &cfg.green, cfg.orbit)?;
        row.min_pair = F15(tm.min_pair);
        row.eps_hc = F15(tm.eps_hc);
        row.class = match tm.class {
            MarginClass::MarginHolds => "margin_holds",
            MarginClass::BoundedHeightRegime => "bounded_height",
        }
        .into();
        Ok(outcome)
    })();
    let outcome = result.unwrap_or_else(|e| {
        row.note = e.to_string();
        Outcome::Warn
    });
    row.outcome = outcome;
    Checked { row, outcome, margins }
}

// ---------------------------------------------------------------------------

#[derive(Serialize)]
pub struct FfRow {
    pub index: usize,
    pub d: usize,
    pub c: String,
    pub h_c: i64,
    pub isotrivial: bool,
    pub verdict: String,
    /// Height of `c_1` and of `f(c_1)`; the second is `d` times the first.
    pub h_c1: String,
    pub h_f_c1: String,
    pub functional_equation: String,
    pub outcome: Outcome,
    pub note: String,
}

/// `c_i = r_i t^(e_i)` with exponents summing to zero.
pub fn ff_sample(s: &mut Sampler, d: usize) -> FFCritVector {
    let k = d - 1;
    let mut total = 0;
    let c = (0..k)
        .map(|i| {
            let r = s.nonzero_rational(9);
            let e = if i + 1 < k { s.range(-3, 3) as i32 } else { -total };
            total += e;
            RationalFunction::monomial(r, e)
        })
        .collect();
    FFCritVector::new(c).expect("exponents balance, so lambda is constant")
}

fn ff(cfg: &VerifyConfig) -> Vec<Checked<FfRow>> {
    let mut s = Sampler::new(cfg.seed);
    let inputs: Vec<FFCritVector> = (0..cfg.samples).map(|i| ff_sample(&mut s, degree_for(cfg, i))).collect();
    inputs
        .par_iter()
        .enumerate()
        .map(|(i, cv)| ff_row(cfg, i, cv))
        .collect()
}

fn ff_row(cfg: &VerifyConfig, index: usize, cv: &FFCritVector) -> Checked<FfRow> {
    let h_c = ff_height_affine(cv.c());
    let isotrivial = isotriviality_check(cv);
    let constant = cv.c().iter().all(RationalFunction::is_constant);
    let mut row = FfRow {
        index,
        d: cv.d(),
        c: cv.c().iter().map(|x| x.to_string_in("t")).collect::<Vec<_>>().join(";"),
        h_c,
        isotrivial,
        verdict: String::new(),
        h_c1: String::new(),
        h_f_c1: String::new(),
        functional_equation: "skipped".into(),
        outcome: Outcome::Pass,
        note: String::new(),
    };
    let mut outcome = if (h_c == 0) == isotrivial { Outcome::Pass } else { Outcome::Fail };
    let opts = FFOptions::default();
    let dep = OrbitBudget {
        steps: cfg.orbit.steps.min(4),
        size_bits: 256,
    };
    match cink_check(cv, &opts, dep) {
        Ok(CinkVerdict::ConstantC) => {
            row.verdict = "constant".into();
            if !constant {
                outcome = Outcome::Fail;
            }
        }
        Ok(CinkVerdict::TwoEscapers { i, j, .. }) => {
            row.verdict = format!("escapers {i},{j}");
            if constant {
                outcome = Outcome::Fail;
            }
        }
        Ok(CinkVerdict::Inconclusive(n)) => {
            row.verdict = format!("inconclusive@{n}");
            outcome = outcome.worst(Outcome::Warn);
        }
        Err(e) => {
            row.note = e.to_string();
            outcome = outcome.worst(Outcome::Warn);
        }
    }
    let c1 = &cv.c()[0];
    let f = cv.poly();
    if let (Ok(h0), Ok(h1)) = (
        ff_canonical_height_partial(cv, c1, &opts),
        ff_canonical_height_partial(cv, &f.eval(c1), &opts),
    ) {
        row.h_c1 = rat_str(&h0.value);
        row.h_f_c1 = rat_str(&h1.value);
        if h0.is_exact() && h1.is_exact() {
            let d = Rational::from_integer((cv.d() as i64).into());
            if h1.value == d * h0.value {
                row.functional_equation = "ok".into();
            } else {
                row.functional_equation = "fail".into();
                outcome = Outcome::Fail;
            }
        }
    }
    row.outcome = outcome;
    Checked {
        row,
        outcome,
        margins: Vec::new(),
    }
}

// ---------------------------------------------------------------------------

#[derive(Serialize)]
pub struct QuadRow {
    pub index: usize,
    pub lambda0: String,
    pub w: String,
    pub lambda_inf: String,
    pub s_places: String,
    pub halfheight_lhs: F15,
    pub halfheight_rhs: F15,
    pub halfheight_margin: F15,
    pub min_crit_height: F15,
    pub extrapolation_error: F15,
    pub quad2_bound: F15,
    pub quad2_margin: F15,
    pub tolerance: F15,
    pub outcome: Outcome,
    pub note: String,
}

fn quad(cfg: &VerifyConfig) -> Vec<Checked<QuadRow>> {
    let mut s = Sampler::new(cfg.seed);
    let bad = [Rational::new((-1).into(), 2.into()), -Rational::one()];
    let inputs: Vec<(Rational, Rational)> = (0..cfg.samples)
        .map(|_| {
            let l0 = s.nonzero_rational(12);
            let mut w = s.nonzero_rational(100);
            while bad.contains(&w) {
                w = s.nonzero_rational(100);
            }
            (l0, w)
        })
        .collect();
    let budget = OrbitBudget {
        steps: cfg.depth,
        size_bits: 1 << 18,
    };
    inputs
        .par_iter()
        .enumerate()
        .map(|(i, (l0, w))| quad_row(i, l0, w, budget))
        .collect()
}

fn quad_row(index: usize, l0: &Rational, w: &Rational, budget: OrbitBudget) -> Checked<QuadRow> {
    let nan = F15(f64::NAN);
    let mut row = QuadRow {
        index,
        lambda0: rat_str(l0),
        w: rat_str(w),
        lambda_inf: String::new(),
        s_places: String::new(),
        halfheight_lhs: nan,
        halfheight_rhs: nan,
        halfheight_margin: nan,
        min_crit_height: nan,
        extrapolation_error: nan,
        quad2_bound: nan,
        quad2_margin: nan,
        tolerance: F15(GUARD),
        outcome: Outcome::Pass,
        note: String::new(),
    };
    let mut margins = Vec::new();
    let result = (|| -> Result<Outcome> {
        let q = QuadMap::from_lambda_w(l0.clone(), w.clone())?;
        row.lambda_inf = rat_str(q.lambda_inf());
        row.s_places = s_places_quad(&q)?
            .iter()
            .map(|v| v.to_string())
            .collect::<Vec<_>>()
            .join(";");
        let hh = halfheight_check(&q)?;
        row.halfheight_lhs = F15(hh.lhs.to_f64());
        row.halfheight_rhs = F15(hh.rhs.to_f64());
        row.halfheight_margin = F15(hh.margin.to_f64());
        margins.push(hh.margin.to_f64());
        let q2 = quad2_check(&q, budget)?;
        row.min_crit_height = F15(q2.min_height);
        row.extrapolation_error = F15(q2.error);
        row.quad2_bound = F15(q2.bound);
        row.quad2_margin = F15(q2.margin);
        margins.push(q2.margin);
        Ok(if hh.holds() && q2.holds() { Outcome::Pass } else { Outcome::Fail })
    })();
    let outcome = result.unwrap_or_else(|e| {
        row.note = e.to_string();
        Outcome::Warn
    });
    row.outcome = outcome;
    Checked { row, outcome, margins }
}

// ---------------------------------------------------------------------------

#[derive(Serialize)]
pub struct ChebRow {
    pub kind: &'static str,
    pub n: Option<usize>,
    pub start: Option<i64>,
    pub degree: Option<usize>,
    pub expected_degree: Option<usize>,
    pub a: Option<String>,
    pub fixed_point: Option<String>,
    pub multiplier: Option<String>,
    pub outcome: Outcome,
}

fn cheb(cfg: &VerifyConfig) -> Vec<Checked<ChebRow>> {
    let mut out = Vec::new();
    for n in 1..=cfg.depth.clamp(1, 8) {
        for start in [1i64, -1] {
            let deg = cheb_iterate(&Rational::from_integer(start.into()), n).map(|z| z.degree());
            let want = 1usize << (n - 1);
            let ok = deg.as_ref().is_ok_and(|d| *d == want);
            let outcome = if ok { Outcome::Pass } else { Outcome::Fail };
            out.push(Checked {
                row: ChebRow {
                    kind: "degree",
                    n: Some(n),
                    start: Some(start),
                    degree: deg.ok(),
                    expected_degree: Some(want),
                    a: None,
                    fixed_point: None,
                    multiplier: None,
                    outcome,
                },
                outcome,
                margins: Vec::new(),
            });
        }
    }
    let mut s = Sampler::new(cfg.seed);
    let mut params = vec![Rational::zero()];
    params.extend((0..cfg.samples).map(|_| s.nonzero_rational(100)));
    for a in params {
        for (z, m) in cheb_fixed_multiplier(&a) {
            // direct checks: f(z) = z and f'(z) = 1 - 1/z^2
            let ok = match &z {
                P1::Finite(z) => {
                    !z.is_zero() && z + &a + z.recip() == *z && Rational::one() - (z * z).recip() == m
                }
                P1::Infinity => m.is_one(),
            };
            let outcome = if ok { Outcome::Pass } else { Outcome::Fail };
            out.push(Checked {
                row: ChebRow {
                    kind: "fixed",
                    n: None,
                    start: None,
                    degree: None,
                    expected_degree: None,
                    a: Some(rat_str(&a)),
                    fixed_point: Some(z.to_string()),
                    multiplier: Some(rat_str(&m)),
                    outcome,
                },
                outcome,
                margins: Vec::new(),
            });
        }
    }
    out
}
