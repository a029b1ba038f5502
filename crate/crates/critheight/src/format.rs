//! Input specs and output records.

use std::fmt;

use anyhow::{anyhow, bail, Context, Result};
use critheight_core::arith::{format_rational, parse_rational, Poly};
use critheight_core::ffdyn::{FFCritVector, FFHeight};
use critheight_core::polydyn::{CanonicalHeight, CritVector, GreenStatus, GreenValue};
use critheight_core::quadratic::{QuadMap, P1};
use critheight_core::{PlaceQ, Rational, RationalFunction};
use serde::{Deserialize, Serialize, Serializer};

/// A float written with 15 significant digits; non-finite values become
/// `null`.
#[derive(Clone, Copy, Debug, Default, PartialEq, PartialOrd)]
pub struct F15(pub f64);

impl F15 {
    pub fn rounded(self) -> Option<f64> {
        if !self.0.is_finite() {
            return None;
        }
        if self.0 == 0.0 {
            return Some(0.0);
        }
        format!("{:.14e}", self.0).parse().ok()
    }
}

impl Serialize for F15 {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match self.rounded() {
            Some(x) => s.serialize_f64(x),
            None => s.serialize_none(),
        }
    }
}

impl fmt::Display for F15 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.rounded() {
            Some(x) => write!(f, "{x}"),
            None => f.write_str("nan"),
        }
    }
}

/// A rational given as a JSON string (`"3/4"`) or integer.
#[derive(Clone, Debug, Deserialize)]
#[serde(untagged)]
pub enum RatInput {
    Int(i64),
    Text(String),
}

impl RatInput {
    pub fn value(&self) -> Result<Rational> {
        match self {
            Self::Int(n) => Ok(Rational::from_integer((*n).into())),
            Self::Text(s) => Ok(parse_rational(s)?),
        }
    }
}

/// `{"d":3,"c":["1","2"]}` or `{"lambda0":"1","w":"1/10"}`.
#[derive(Clone, Debug, Deserialize)]
#[serde(untagged, deny_unknown_fields)]
pub enum MapSpec {
    Poly { d: usize, c: Vec<RatInput> },
    Quad { lambda0: RatInput, w: RatInput },
}

pub enum Map {
    Poly(CritVector),
    Quad(QuadMap),
}

impl MapSpec {
    pub fn parse(src: &str) -> Result<Self> {
        serde_json::from_str(src).with_context(|| format!("bad map spec {src:?}"))
    }

    pub fn build(&self) -> Result<Map> {
        match self {
            Self::Poly { d, c } => {
                let c: Vec<Rational> = c.iter().map(RatInput::value).collect::<Result<_>>()?;
                if c.len() + 1 != *d {
                    bail!("degree {d} needs {} critical points, got {}", d - 1, c.len());
                }
                Ok(Map::Poly(CritVector::new(c)?))
            }
            Self::Quad { lambda0, w } => Ok(Map::Quad(QuadMap::from_lambda_w(lambda0.value()?, w.value()?)?)),
        }
    }
}

/// `{"num":[0,1],"den":[1]}`, coefficients lowest degree first.
#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RatFuncSpec {
    pub num: Vec<RatInput>,
    #[serde(default)]
    pub den: Option<Vec<RatInput>>,
}

impl RatFuncSpec {
    pub fn value(&self) -> Result<RationalFunction> {
        let poly = |cs: &[RatInput]| -> Result<Poly> {
            Ok(Poly::from_coeffs(cs.iter().map(RatInput::value).collect::<Result<_>>()?))
        };
        let den = match &self.den {
            Some(d) => poly(d)?,
            None => Poly::one(),
        };
        Ok(RationalFunction::new(poly(&self.num)?, den)?)
    }
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FFMapSpec {
    pub c: Vec<RatFuncSpec>,
}

impl FFMapSpec {
    pub fn parse(src: &str) -> Result<Self> {
        serde_json::from_str(src).with_context(|| format!("bad function-field map spec {src:?}"))
    }

    pub fn build(&self) -> Result<FFCritVector> {
        let c = self.c.iter().map(RatFuncSpec::value).collect::<Result<_>>()?;
        Ok(FFCritVector::new(c)?)
    }
}

pub fn parse_point(s: &str) -> Result<P1> {
    match s.trim() {
        "inf" | "infinity" => Ok(P1::Infinity),
        t => Ok(P1::Finite(parse_rational(t)?)),
    }
}

pub fn parse_place(s: &str) -> Result<PlaceQ> {
    match s.trim() {
        "inf" | "arch" => Ok(PlaceQ::Arch),
        t => {
            let p: u64 = t.parse().map_err(|_| anyhow!("bad place {t:?}"))?;
            Ok(PlaceQ::prime(p)?)
        }
    }
}

pub fn rat_str(x: &Rational) -> String {
    format_rational(x)
}

pub fn join_rats(xs: &[Rational]) -> String {
    xs.iter().map(format_rational).collect::<Vec<_>>().join(";")
}

pub fn status_str(s: &GreenStatus) -> String {
    match s {
        GreenStatus::EscapedAtStep(n) => format!("escaped@{n}"),
        GreenStatus::BoundedUpTo(n) => format!("bounded<={n}"),
        GreenStatus::ExactZero => "zero".into(),
    }
}

#[derive(Serialize)]
pub struct GreenRecord {
    pub place: String,
    pub value: F15,
    pub error: F15,
    pub status: String,
    /// Exact value as a combination of prime logs, when known.
    pub exact: Option<String>,
}

impl GreenRecord {
    pub fn new(place: &PlaceQ, g: &GreenValue) -> Self {
        Self {
            place: place.to_string(),
            value: F15(g.value),
            error: F15(g.error),
            status: status_str(&g.status),
            exact: g.exact.as_ref().map(|e| e.to_string()),
        }
    }
}

#[derive(Serialize)]
pub struct HeightRecord {
    pub value: F15,
    pub error: F15,
    pub breakdown: Vec<GreenRecord>,
}

impl From<&CanonicalHeight> for HeightRecord {
    fn from(h: &CanonicalHeight) -> Self {
        Self {
            value: F15(h.value),
            error: F15(h.error),
            breakdown: h.breakdown.iter().map(|(v, g)| GreenRecord::new(v, g)).collect(),
        }
    }
}

#[derive(Serialize)]
pub struct FFHeightRecord {
    pub point: String,
    pub value: String,
    pub exact: bool,
    pub breakdown: Vec<FFLocalRecord>,
    pub truncated_sites: Vec<String>,
}

#[derive(Serialize)]
pub struct FFLocalRecord {
    pub site: String,
    pub value: String,
    pub status: String,
}

impl FFHeightRecord {
    pub fn new(point: &RationalFunction, h: &FFHeight) -> Self {
        Self {
            point: point.to_string_in("t"),
            value: rat_str(&h.value),
            exact: h.is_exact(),
            breakdown: h
                .breakdown
                .iter()
                .map(|l| FFLocalRecord {
                    site: l.site.to_string(),
                    value: rat_str(&l.value),
                    status: status_str(&l.status),
                })
                .collect(),
            truncated_sites: h.truncated.iter().map(|s| s.to_string()).collect(),
        }
    }
}
