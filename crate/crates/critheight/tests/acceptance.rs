//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! nonzero if any criterion fails. Oracles here are computed independently
//! of the code under test wherever one is available.

use std::io::Write;
use std::sync::{Arc, Mutex};
use std::time::Instant;

use anyhow::{bail, ensure, Result};
use critheight::census::{run_census, CensusConfig};
use critheight::report::{Format, Sink};
use critheight::sampling::Sampler;
use critheight::suites::ff_sample;
use critheight_core::arith::{Poly, RationalFunction};
use critheight_core::ffdyn::{cink_check, CinkVerdict, FFCritVector, FFOptions};
use critheight_core::perlambda::{
    epsilon, sample_per1, sweight_check, theorem_margin, DichotomyBranch, DichotomyContext,
    MarginClass, PerSample,
};
use critheight_core::places::{ff_product_formula_sum, log_abs, log_abs_f64, support};
use critheight_core::polydyn::{
    canonical_height_green, canonical_height_iter, is_preperiodic, one_step_bound, CritVector,
    GreenOptions, OrbitBudget, PreperiodicBounds, PreperiodicVerdict,
};
use critheight_core::quadratic::{
    canonical_height_p1, cheb_canonical_height, cheb_iterate, halfheight_check, quad2_check,
    root_of_unity_cap, ChebMap, QuadMap, P1,
};
use critheight_core::{LogCombination, PlaceQ, Rational};
use num_bigint::BigInt;
use num_traits::{One, Zero};

const SEED: u64 = 20240607;
const TOL: f64 = 1e-9;

fn int(n: i64) -> Rational {
    Rational::from_integer(n.into())
}

fn frac(n: i64, d: i64) -> Rational {
    Rational::new(n.into(), d.into())
}

fn random_poly(s: &mut Sampler, max_deg: u64) -> Poly {
    loop {
        let deg = s.uniform(max_deg + 1) - 1;
        let cs: Vec<i64> = (0..=deg).map(|_| s.range(-9, 9)).collect();
        let p = Poly::from_ints(&cs);
        if !p.is_zero() {
            return p;
        }
    }
}

// ---------------------------------------------------------------------------

fn product_formula() -> Result<String> {
    let mut s = Sampler::new(SEED);
    let mut worst = 0.0_f64;
    for _ in 0..1000 {
        let x = s.nonzero_rational(1_000_000);
        let mut places = support(&x)?;
        places.insert(PlaceQ::Arch);
        let exact: LogCombination = places.iter().map(|v| log_abs(&x, v)).sum::<Result<_, _>>()?;
        ensure!(exact.is_zero(), "exact sum {} for {x}", exact.to_display_string());
        let float: f64 = places.iter().map(|v| log_abs_f64(&x, v)).sum::<Result<f64, _>>()?;
        worst = worst.max(float.abs());
        ensure!(float.abs() <= 1e-12, "float sum {float:e} for {x}");
    }
    for _ in 0..200 {
        let x = RationalFunction::new(random_poly(&mut s, 5), random_poly(&mut s, 5))?;
        let total = ff_product_formula_sum(&x)?;
        ensure!(total == 0, "sum {total} for {}", x.to_string_in("t"));
    }
    Ok(format!("1000 rationals, 200 rational functions; worst float residue {worst:.1e}"))
}

struct PolySample {
    cv: CritVector,
    z: Rational,
}

fn poly_samples() -> Vec<PolySample> {
    let mut s = Sampler::new(SEED ^ 2);
    (0..100)
        .map(|i| {
            let d = 2 + i % 3;
            let c = (0..d - 1).map(|_| s.nonzero_rational(9)).collect();
            let z = if s.uniform(8) == 1 { Rational::zero() } else { s.nonzero_rational(9) };
            PolySample { cv: CritVector::new(c).expect("nonzero entries"), z }
        })
        .collect()
}

fn green_vs_iterate() -> Result<String> {
    let opts = GreenOptions::default();
    let mut worst = f64::NEG_INFINITY;
    for ps in poly_samples() {
        let f = ps.cv.poly();
        let g = canonical_height_green(&f, &ps.z, &opts)?;
        let it = canonical_height_iter(&f, &ps.z, 6, 1 << 22)?;
        let tail = one_step_bound(&f)? / (ps.cv.d() as f64).powi(6);
        let gap = (g.value - it).abs() - (g.error + tail);
        worst = worst.max(gap);
        ensure!(
            gap <= TOL,
            "d={} c={:?} z={}: green {} iterate {} allowed {}",
            ps.cv.d(),
            ps.cv.c(),
            ps.z,
            g.value,
            it,
            g.error + tail
        );
    }
    Ok(format!("100 samples, d in {{2,3,4}}; largest gap minus allowance {worst:.2e}"))
}

fn functional_equation() -> Result<String> {
    let opts = GreenOptions::default();
    let mut worst = f64::NEG_INFINITY;
    for ps in poly_samples() {
        let f = ps.cv.poly();
        let h0 = canonical_height_green(&f, &ps.z, &opts)?;
        let h1 = canonical_height_green(&f, &f.eval(&ps.z), &opts)?;
        let d = ps.cv.d() as f64;
        let gap = (h1.value - d * h0.value).abs() - (h1.error + d * h0.error);
        worst = worst.max(gap);
        ensure!(gap <= TOL, "c={:?} z={}: {} vs {}", ps.cv.c(), ps.z, h1.value, d * h0.value);
    }
    Ok(format!("100 samples; largest gap minus allowance {worst:.2e}"))
}

fn pcf_zero() -> Result<String> {
    let cv = CritVector::new(vec![int(2)])?;
    let f = cv.poly();
    // (1/2) z^2 - 2z, evaluated by hand
    let direct = |z: &Rational| frac(1, 2) * z * z - int(2) * z;
    let orbit = [int(2), int(-2), int(6), int(6)];
    for w in orbit.windows(2) {
        ensure!(f.eval(&w[0]) == w[1] && direct(&w[0]) == w[1], "orbit step {} -> {}", w[0], w[1]);
    }
    let v = is_preperiodic(&f, &int(2), &PreperiodicBounds::default())?;
    ensure!(v == PreperiodicVerdict::Preperiodic { tail: 2, cycle: 1 }, "verdict {v:?}");
    let h = canonical_height_green(&f, &int(2), &GreenOptions::default())?;
    for (place, g) in &h.breakdown {
        match place {
            PlaceQ::Arch => ensure!(g.value.abs() <= TOL && g.error <= TOL, "arch {g:?}"),
            PlaceQ::Prime(p) => ensure!(g.value == 0.0 && g.error == 0.0, "p={p}: {g:?}"),
        }
    }
    ensure!(h.nonarch_is_exact() && h.nonarch_exact().is_zero(), "nonarch part not exactly zero");
    ensure!(h.value.abs() <= TOL, "height {}", h.value);
    Ok(format!("orbit 2 -> -2 -> 6 -> 6, tail 2 cycle 1; height {:.1e} +- {:.1e}", h.value, h.error))
}

fn per1_samples() -> Vec<PerSample> {
    let mut s = Sampler::new(SEED ^ 5);
    let mut out = Vec::new();
    let mut i = 0;
    while out.len() < 500 {
        let d = 3 + i % 2;
        i += 1;
        let lambda = s.nonzero_rational(100);
        let free: Vec<Rational> = (0..d - 2).map(|_| s.nonzero_rational(100)).collect();
        if let Ok(sample) = sample_per1(d, &lambda, &free) {
            out.push(sample);
        }
    }
    out
}

fn sweight(samples: &[PerSample]) -> Result<String> {
    let mut worst = f64::INFINITY;
    for sample in samples {
        let r = sweight_check(sample)?;
        worst = worst.min(r.margin.to_f64());
        ensure!(r.margin.to_f64() >= -TOL, "c={:?}: margin {}", sample.c(), r.margin.to_display_string());
    }
    let ex = PerSample::from_crit(vec![frac(1, 7), int(7)])?;
    ensure!(ex.lambda.is_one(), "lambda {}", ex.lambda);
    let r = sweight_check(&ex)?;
    let log7 = LogCombination::log_int(7);
    ensure!(r.lhs == log7, "lhs {}", r.lhs.to_display_string());
    ensure!(r.rhs == log7.scale(&frac(1, 3)), "rhs {}", r.rhs.to_display_string());
    Ok(format!(
        "{} samples, smallest margin {worst:.3}; c=(1/7,7): lhs {}, rhs {}",
        samples.len(),
        r.lhs.to_display_string(),
        r.rhs.to_display_string()
    ))
}

fn dichotomy(samples: &[PerSample]) -> Result<String> {
    let opts = GreenOptions::default();
    let budget = OrbitBudget { steps: 6, size_bits: 1 << 10 };
    let (mut checked, mut undecided) = (0, 0);
    for sample in samples {
        let ctx = DichotomyContext::new(sample, &opts, budget)?;
        for p in ctx.good_primes(97) {
            let r = ctx.check(&p)?;
            checked += 1;
            match r.branch {
                DichotomyBranch::Violation => bail!("c={:?} p={p}: violation", sample.c()),
                DichotomyBranch::Undecided => undecided += 1,
                _ => {}
            }
        }
    }
    Ok(format!("{checked} (sample, prime) pairs, 0 violations, {undecided} undecided"))
}

fn theorem_constant(samples: &[PerSample]) -> Result<String> {
    ensure!(epsilon(3)? == frac(1, 12), "epsilon(3) = {}", epsilon(3)?);
    ensure!(epsilon(4)? == frac(1, 44), "epsilon(4) = {}", epsilon(4)?);
    // independent oracle for the formula over a wider range
    for d in 3..=12i64 {
        ensure!(epsilon(d as usize)? == frac(1, 2 * (d - 2) * (5 * d - 9)));
    }
    let opts = GreenOptions::default();
    let budget = OrbitBudget { steps: 6, size_bits: 1 << 10 };
    let (mut holds, mut bounded) = (0, 0);
    let mut frontier = 0.0_f64;
    for sample in samples {
        let r = theorem_margin(sample, &opts, budget)?;
        match r.class {
            MarginClass::MarginHolds => holds += 1,
            MarginClass::BoundedHeightRegime => {
                bounded += 1;
                frontier = frontier.max(r.h_c);
            }
        }
    }
    Ok(format!(
        "eps(3)=1/12, eps(4)=1/44; {holds} margin_holds, {bounded} bounded_height (largest h(c) there {frontier:.3})"
    ))
}

fn function_field() -> Result<String> {
    let mut s = Sampler::new(SEED ^ 8);
    let opts = FFOptions::default();
    let big = FFOptions { max_steps: 2 * opts.max_steps, degree_budget: 2 * opts.degree_budget };
    let dep = OrbitBudget { steps: 4, size_bits: 256 };
    let mut nonconstant = 0;
    let mut i = 0;
    while nonconstant < 100 {
        let cv = ff_sample(&mut s, 3 + i % 2);
        i += 1;
        if cv.c().iter().all(RationalFunction::is_constant) {
            continue;
        }
        nonconstant += 1;
        let CinkVerdict::TwoEscapers { sites_i, sites_j, .. } = cink_check(&cv, &opts, dep)? else {
            bail!("no escaping pair for {:?}", cv.c());
        };
        let CinkVerdict::TwoEscapers { sites_i: bi, sites_j: bj, .. } = cink_check(&cv, &big, dep)? else {
            bail!("verdict changed under a larger budget for {:?}", cv.c());
        };
        ensure!(sites_i == bi && sites_j == bj, "escape rates moved under a larger budget");
        ensure!(!sites_i.is_empty() && !sites_j.is_empty());
    }
    for _ in 0..20 {
        let c = (0..3).map(|_| RationalFunction::monomial(s.nonzero_rational(9), 0)).collect();
        let cv = FFCritVector::new(c)?;
        let v = cink_check(&cv, &opts, dep)?;
        ensure!(v == CinkVerdict::ConstantC, "constant vector gave {v:?}");
    }
    Ok("100 nonconstant vectors: two escapers, stable rates; 20 constant: constant".into())
}

fn quad_samples(n: usize, salt: u64) -> Vec<QuadMap> {
    let mut s = Sampler::new(SEED ^ salt);
    let bad = [frac(-1, 2), int(-1)];
    let mut out = Vec::new();
    while out.len() < n {
        let l0 = s.nonzero_rational(12);
        let w = s.nonzero_rational(100);
        if !bad.contains(&w) {
            out.push(QuadMap::from_lambda_w(l0, w).expect("w avoids the excluded values"));
        }
    }
    out
}

fn quad_identities() -> Result<String> {
    for q in quad_samples(200, 9) {
        let (l0, w) = (q.lambda0(), q.w());
        // oracle: closed forms for the remaining parameters
        let two = int(2);
        let linf = -(&two * w + int(1)) / (l0 * w * w);
        ensure!(*q.lambda_inf() == linf, "lambda_inf for l0={l0} w={w}");
        let z1 = l0 * w;
        let z2 = -(l0 * w) / (&two * w + int(1));
        ensure!(q.critical_points() == &[z1.clone(), z2.clone()], "critical points for w={w}");
        let other = QuadMap::from_lambda_w(l0.clone(), QuadMap::involution(w))?;
        ensure!(other.lambda_inf() == q.lambda_inf(), "involution moves lambda_inf");
        ensure!(other.critical_points() == &[z2.clone(), z1.clone()], "involution does not swap");
        for z in [&z1, &z2] {
            ensure!((&linf * z * z + &two * z + l0).is_zero(), "critical equation at {z}");
            ensure!(q.eval(&P1::Finite(z.clone())) == P1::Finite(-(z * z)), "f(z) != -z^2 at {z}");
        }
        ensure!(l0 * w / (&two + w.recip()) == -linf.recip(), "parameter relation at w={w}");
    }
    Ok("200 parameter pairs".into())
}

fn quad_bounds() -> Result<String> {
    let cap = root_of_unity_cap();
    let oracle = 47.0 * 2f64.ln() + 6.0 * 3f64.ln();
    ensure!((cap - oracle).abs() < 1e-12, "cap {cap} vs {oracle}");
    ensure!((cap - 39.17).abs() <= 0.01, "cap {cap}");
    let budget = OrbitBudget { steps: 10, size_bits: 1 << 18 };
    let (mut half, mut quad2) = (f64::INFINITY, f64::INFINITY);
    for q in quad_samples(500, 10) {
        let r = halfheight_check(&q)?;
        half = half.min(r.margin.to_f64());
        ensure!(r.margin.to_f64() >= -TOL, "halfheight at l0={} w={}", q.lambda0(), q.w());
        let r = quad2_check(&q, budget)?;
        quad2 = quad2.min(r.margin);
        ensure!(r.holds(), "quad2 at l0={} w={}: {r:?}", q.lambda0(), q.w());
    }
    Ok(format!("500 samples; smallest margins {half:.3} and {quad2:.3}; cap {cap:.4}"))
}

fn cheb() -> Result<String> {
    for n in 1..=6 {
        for z0 in [int(1), int(-1)] {
            let deg = cheb_iterate(&z0, n)?.degree();
            ensure!(deg == 1 << (n - 1), "n={n} start {z0}: degree {deg}");
        }
    }
    let budget = OrbitBudget { steps: 14, size_bits: 1 << 20 };
    let mut slopes = Vec::new();
    for k in 3..=6 {
        let a = Rational::from_integer(num_traits::pow(BigInt::from(10), k));
        let f = ChebMap::new(a.clone());
        for z0 in [int(1), int(-1)] {
            let h = cheb_canonical_height(&f, &P1::Finite(z0.clone()), budget)?;
            let slope = h.value / (k as f64 * 10f64.ln());
            ensure!((0.4..=0.6).contains(&slope), "a=10^{k} start {z0}: slope {slope}");
            slopes.push(slope);
        }
    }
    let (lo, hi) = slopes.iter().fold((f64::INFINITY, 0.0_f64), |(l, h), &s| (l.min(s), h.max(s)));
    Ok(format!("degrees 2^(n-1) for n=1..6; slopes in [{lo:.4}, {hi:.4}]"))
}

#[derive(Clone, Default)]
struct Shared(Arc<Mutex<Vec<u8>>>);

impl Write for Shared {
    fn write(&mut self, buf: &[u8]) -> std::io::Result<usize> {
        self.0.lock().unwrap().extend_from_slice(buf);
        Ok(buf.len())
    }

    fn flush(&mut self) -> std::io::Result<()> {
        Ok(())
    }
}

fn census_bytes(threads: usize) -> Result<Vec<u8>> {
    let buf = Shared::default();
    let mut sink = Sink::from_writer(Box::new(buf.clone()), Format::Json);
    let pool = rayon::ThreadPoolBuilder::new().num_threads(threads).build()?;
    let cfg = CensusConfig::default();
    let summary = pool.install(|| run_census(&cfg, &mut sink))?;
    sink.finish(&summary)?;
    let bytes = buf.0.lock().unwrap().clone();
    Ok(bytes)
}

fn census() -> Result<String> {
    let first = census_bytes(1)?;
    let second = census_bytes(2)?;
    ensure!(first == second, "reruns differ");
    let cap = 47.0 * 2f64.ln() + 6.0 * 3f64.ln();
    let text = String::from_utf8(first)?;
    let mut rows = 0;
    for line in text.lines() {
        let v: serde_json::Value = serde_json::from_str(line)?;
        if v.get("summary").is_some() {
            continue;
        }
        rows += 1;
        let h = v["h_lambda_inf"].as_f64().unwrap_or(f64::NAN);
        ensure!(h <= cap, "row above the cap: {line}");
        // recompute the orbit claim from scratch with a fresh map
        let l0 = critheight_core::arith::parse_rational(v["lambda0"].as_str().unwrap_or(""))?;
        let w = critheight_core::arith::parse_rational(v["w"].as_str().unwrap_or(""))?;
        let q = QuadMap::from_lambda_w(l0, w)?;
        let z = critheight_core::arith::parse_rational(v["finite_orbit_critical_point"].as_str().unwrap_or(""))?;
        let h = canonical_height_p1(&q, &P1::Finite(z), OrbitBudget { steps: 12, size_bits: 1 << 16 })?;
        ensure!(h.value == 0.0, "critical point with positive height: {line}");
    }
    ensure!(rows > 0, "empty census");
    Ok(format!("{rows} rows, byte-identical with 1 and 2 threads, all within cap"))
}

// ---------------------------------------------------------------------------

fn main() {
    let per1 = std::cell::OnceCell::new();
    let per1 = || per1.get_or_init(per1_samples);
    let criteria: Vec<(&str, Option<f64>, Box<dyn Fn() -> Result<String> + '_>)> = vec![
        ("product formula", Some(5.0), Box::new(product_formula)),
        ("green sum vs iterate", Some(60.0), Box::new(green_vs_iterate)),
        ("functional equation", None, Box::new(functional_equation)),
        ("pcf zero height", None, Box::new(pcf_zero)),
        ("sweight margin", Some(120.0), Box::new(move || sweight(per1()))),
        ("local dichotomy at good primes", None, Box::new(move || dichotomy(per1()))),
        ("theorem constant", None, Box::new(move || theorem_constant(per1()))),
        ("function field escapers", Some(120.0), Box::new(function_field)),
        ("quadratic identities", None, Box::new(quad_identities)),
        ("halfheight and quad2 bounds", None, Box::new(quad_bounds)),
        ("z + a + 1/z growth", Some(30.0), Box::new(cheb)),
        ("census", None, Box::new(census)),
    ];
    let mut failed = 0;
    for (i, (name, limit, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let result = run();
        let secs = start.elapsed().as_secs_f64();
        let result = match (result, limit) {
            (Ok(_), Some(l)) if secs > *l => Err(anyhow::anyhow!("took {secs:.1}s, limit {l}s")),
            (r, _) => r,
        };
        match result {
            Ok(detail) => println!("PASS {:>2} {name} ({secs:.1}s): {detail}", i + 1),
            Err(e) => {
                failed += 1;
                println!("FAIL {:>2} {name} ({secs:.1}s): {e:#}", i + 1);
            }
        }
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
