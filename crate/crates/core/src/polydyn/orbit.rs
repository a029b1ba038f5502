use alloc::collections::BTreeMap;
use alloc::vec::Vec;

use num_bigint::BigInt;

use crate::arith::{Field, Rational};
use crate::error::{domain, Result};
use crate::places::{height, PlaceQ};

use super::{canonical_height_green, one_step_bound, GreenOptions, NormalFormPoly};

/// Limits for exact orbit computations.
#[derive(Clone, Copy, Debug)]
pub struct OrbitBudget {
    pub steps: usize,
    /// Per-iterate size cap in bits.
    pub size_bits: u64,
}

impl Default for OrbitBudget {
    fn default() -> Self {
        Self {
            steps: 64,
            size_bits: 1 << 12,
        }
    }
}

/// An exact forward orbit, cut at the first repeat or at the budget.
#[derive(Clone, Debug)]
pub(crate) struct Orbit<F> {
    pub points: Vec<F>,
    /// `(tail, cycle)` when a repeat was seen.
    pub cycle: Option<(usize, usize)>,
}

pub(crate) fn orbit<F: Field>(f: &NormalFormPoly<F>, z: &F, budget: OrbitBudget) -> Orbit<F> {
    let mut index = BTreeMap::new();
    let mut points = Vec::new();
    let mut w = z.clone();
    loop {
        if let Some(&i) = index.get(&w) {
            let n = points.len();
            return Orbit {
                points,
                cycle: Some((i, n - i)),
            };
        }
        index.insert(w.clone(), points.len());
        points.push(w.clone());
        if points.len() > budget.steps {
            return Orbit {
                points,
                cycle: None,
            };
        }
        w = f.eval(&w);
        if w.size_hint() > budget.size_bits {
            return Orbit {
                points,
                cycle: None,
            };
        }
    }
}

#[derive(Clone, Debug)]
pub struct PreperiodicBounds {
    pub orbit: OrbitBudget,
    /// Declare escape once `h(f^n z)` exceeds this; defaults to `B/(d-1)`.
    pub height_cutoff: Option<f64>,
}

impl Default for PreperiodicBounds {
    fn default() -> Self {
        Self {
            orbit: OrbitBudget {
                steps: 200,
                size_bits: 1 << 16,
            },
            height_cutoff: None,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum PreperiodicVerdict {
    Preperiodic { tail: usize, cycle: usize },
    /// `h(f^step z) > cutoff`, impossible on a preperiodic orbit.
    HeightExceeded { step: usize, height: f64, cutoff: f64 },
    /// A local escape rate is certified positive.
    PositiveGreen { place: PlaceQ, lower: f64 },
    Undecided(usize),
}

impl PreperiodicVerdict {
    pub fn is_preperiodic(&self) -> Option<bool> {
        match self {
            Self::Preperiodic { .. } => Some(true),
            Self::HeightExceeded { .. } | Self::PositiveGreen { .. } => Some(false),
            Self::Undecided(_) => None,
        }
    }
}

/// Preperiodicity test over `Q`.
///
/// Every point of a preperiodic orbit has `h <= B/(d-1)` (see
/// [`one_step_bound`]), so exceeding that height is a certificate of
/// infinite orbit.
pub fn is_preperiodic(
    f: &NormalFormPoly<Rational>,
    z: &Rational,
    bounds: &PreperiodicBounds,
) -> Result<PreperiodicVerdict> {
    let d = f.degree() as f64;
    let cutoff = match bounds.height_cutoff {
        Some(h) => h,
        None => one_step_bound(f)? / (d - 1.0),
    };
    let orb = orbit(f, z, bounds.orbit);
    if let Some((tail, cycle)) = orb.cycle {
        return Ok(PreperiodicVerdict::Preperiodic { tail, cycle });
    }
    for (step, w) in orb.points.iter().enumerate() {
        let h = height(w);
        if h > cutoff * (1.0 + 1e-12) + 1e-9 {
            return Ok(PreperiodicVerdict::HeightExceeded {
                step,
                height: h,
                cutoff,
            });
        }
    }
    let reached = orb.points.len().saturating_sub(1);
    let last = orb.points.last().expect("orbit holds its start");
    let hf = canonical_height_green(f, last, &GreenOptions::default())?;
    for (place, g) in &hf.breakdown {
        if g.lower() > 0.0 {
            return Ok(PreperiodicVerdict::PositiveGreen {
                place: place.clone(),
                lower: g.lower(),
            });
        }
    }
    Ok(PreperiodicVerdict::Undecided(reached))
}

/// Rational roots of unity `zeta` with `f(zeta z) = zeta f(z)`.
///
/// Over `Q` only `1` and `-1` are available; `-1` qualifies exactly when
/// every even-degree coefficient vanishes (which forces `d` odd).
pub fn detect_linear_symmetry<F: Field>(f: &NormalFormPoly<F>) -> Vec<F> {
    let mut out = alloc::vec![F::one()];
    let odd = f
        .coeffs()
        .iter()
        .enumerate()
        .skip(1)
        .all(|(j, a)| j % 2 == 1 || a.is_zero());
    if odd {
        out.push(-F::one());
    }
    out
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum DependenceKind<F> {
    MergedOrbit { n: usize, m: usize },
    BothPreperiodic,
    LinearSymmetryMerge { zeta: F, n: usize, m: usize },
    NoRelationFound(usize),
}

/// `ratio` is `rho(a, b)` with `h_f(a) = rho h_f(b)`, recorded when an
/// explicit relation was found.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DependenceVerdict<F> {
    pub kind: DependenceKind<F>,
    pub ratio: Option<Rational>,
}

impl<F> DependenceVerdict<F> {
    pub fn found(&self) -> bool {
        !matches!(self.kind, DependenceKind::NoRelationFound(_))
    }
}

/// Looks for `f^n(a) = zeta f^m(b)` with `zeta` a linear symmetry, and
/// for both orbits being finite. Sound but incomplete: commuting maps of
/// higher degree are not searched.
///
/// Both orbits grow in lockstep and the search stops at the first match.
/// Off finite orbits `n - m` is the same for every match, so the ratio
/// does not depend on which one is found.
pub fn detect_dependence<F: Field>(
    f: &NormalFormPoly<F>,
    a: &F,
    b: &F,
    budget: OrbitBudget,
) -> DependenceVerdict<F> {
    let d = f.degree();
    let one = || Rational::from_integer(1.into());
    if a == b {
        return DependenceVerdict {
            kind: DependenceKind::MergedOrbit { n: 0, m: 0 },
            ratio: Some(one()),
        };
    }
    let zetas = detect_linear_symmetry(f);
    let mut sa = OrbitState::new(a.clone());
    let mut sb = OrbitState::new(b.clone());
    let mut step = 0;
    loop {
        // new points are the last of each list; compare them with everything
        for zeta in &zetas {
            let hit = sa.last_hit(&sb, zeta).or_else(|| {
                sb.last_hit(&sa, &zeta.inv().expect("roots of unity are units"))
                    .map(|(m, n)| (n, m))
            });
            if let Some((n, m)) = hit {
                let finite = sa.cycle.is_some() || sb.cycle.is_some();
                let ratio = if finite {
                    one()
                } else if m >= n {
                    Rational::from_integer(num_traits::pow(BigInt::from(d), m - n))
                } else {
                    Rational::new(1.into(), num_traits::pow(BigInt::from(d), n - m))
                };
                let kind = if *zeta == F::one() {
                    DependenceKind::MergedOrbit { n, m }
                } else {
                    DependenceKind::LinearSymmetryMerge { zeta: zeta.clone(), n, m }
                };
                return DependenceVerdict { kind, ratio: Some(ratio) };
            }
        }
        if sa.cycle.is_some() && sb.cycle.is_some() {
            return DependenceVerdict {
                kind: DependenceKind::BothPreperiodic,
                ratio: Some(one()),
            };
        }
        if step >= budget.steps {
            break;
        }
        let grew_a = sa.advance(f, budget.size_bits);
        let grew_b = sb.advance(f, budget.size_bits);
        if !grew_a && !grew_b {
            break;
        }
        step += 1;
    }
    DependenceVerdict {
        kind: DependenceKind::NoRelationFound(step),
        ratio: None,
    }
}

/// A growing exact orbit with a value index.
struct OrbitState<F> {
    points: Vec<F>,
    index: BTreeMap<F, usize>,
    cycle: Option<(usize, usize)>,
    truncated: bool,
    /// Whether the newest point has not been compared yet.
    fresh: bool,
}

impl<F: Field> OrbitState<F> {
    fn new(z: F) -> Self {
        let mut index = BTreeMap::new();
        index.insert(z.clone(), 0);
        Self {
            points: alloc::vec![z],
            index,
            cycle: None,
            truncated: false,
            fresh: true,
        }
    }

    /// Appends the next point; `false` once the orbit is complete or
    /// too large.
    fn advance(&mut self, f: &NormalFormPoly<F>, size_bits: u64) -> bool {
        self.fresh = false;
        if self.cycle.is_some() || self.truncated {
            return false;
        }
        let w = f.eval(self.points.last().expect("nonempty"));
        if let Some(&i) = self.index.get(&w) {
            self.cycle = Some((i, self.points.len() - i));
            return false;
        }
        if w.size_hint() > size_bits {
            self.truncated = true;
            return false;
        }
        self.index.insert(w.clone(), self.points.len());
        self.points.push(w);
        self.fresh = true;
        true
    }

    /// `(n, m)` with `self[n] = zeta * other[m]`, where `self[n]` is the
    /// newest point of `self`.
    fn last_hit(&self, other: &Self, zeta: &F) -> Option<(usize, usize)> {
        if !self.fresh {
            return None;
        }
        let n = self.points.len() - 1;
        let target = zeta.inv()? * self.points[n].clone();
        other.index.get(&target).map(|&m| (n, m))
    }
}

/// The multiplier `prod_j f'(f^j P)` of a point with `f^n(P) = P`.
pub fn multiplier_of_cycle<F: Field>(f: &NormalFormPoly<F>, p: &F, n: usize) -> Result<F> {
    if n == 0 {
        return Err(domain("period must be at least 1"));
    }
    let mut w = p.clone();
    let mut mult = F::one();
    for _ in 0..n {
        mult = mult * f.eval_derivative(&w);
        w = f.eval(&w);
    }
    if &w != p {
        return Err(domain(alloc::format!("{p:?} is not periodic with period dividing {n}")));
    }
    Ok(mult)
}
