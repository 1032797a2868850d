//! Novikov-graded, `H`-valued Laurent series in `z`.
//!
//! A [`ZSeries`] stores slices `d = 0..=D`, each a finite Laurent polynomial
//! in `z` ([`ZPoly`]). In the reduced convention the prefactor
//! `z·e^{(t₀+Pt)/z}` is stripped and `q = Q·e^t`.

use std::collections::BTreeMap;
use std::fmt;

use num_traits::One;
use serde::{Deserialize, Serialize};
use serde_json::{json, Map, Value};
use thiserror::Error;

use crate::rational::{format_rational, int, parse_rational, Rational};
use crate::ring::{
    exp_nilpotent, integrate, twisted_pairing, BundleSpec, CohElement, LambdaScalar, RingDescriptor, RingError,
    TruncatedAlgebra,
};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SeriesError {
    #[error("convention mismatch: {0:?} vs {1:?}")]
    ConventionMismatch(Convention, Convention),
    #[error("operation needs the {expected:?} convention, got {got:?}")]
    WrongConvention { expected: Convention, got: Convention },
    #[error("Novikov truncation mismatch: {0} vs {1}")]
    DegreeMismatch(usize, usize),
    #[error(transparent)]
    Ring(#[from] RingError),
    #[error("malformed series JSON: {0}")]
    Json(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Convention {
    Reduced,
    Raw,
}

impl Convention {
    pub fn as_str(&self) -> &'static str {
        match self {
            Convention::Reduced => "reduced",
            Convention::Raw => "raw",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Half {
    Plus,
    Minus,
}

/// A finite Laurent polynomial `Σ_e c_e z^e` with coefficients in `H`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ZPoly {
    ring: RingDescriptor,
    terms: BTreeMap<i64, CohElement>,
}

impl ZPoly {
    pub fn zero(ring: RingDescriptor) -> Self {
        Self { ring, terms: BTreeMap::new() }
    }

    pub fn one(ring: RingDescriptor) -> Self {
        Self::constant(CohElement::one(ring))
    }

    pub fn constant(c: CohElement) -> Self {
        Self::monomial(0, c)
    }

    pub fn monomial(z_exp: i64, c: CohElement) -> Self {
        let mut out = Self::zero(c.ring());
        out.add_term(z_exp, c);
        out
    }

    /// `a + b·z` for classes `a`, `b`.
    pub fn linear(a: CohElement, b: CohElement) -> Self {
        let mut out = Self::constant(a);
        out.add_term(1, b);
        out
    }

    pub fn ring(&self) -> RingDescriptor {
        self.ring
    }

    pub fn terms(&self) -> impl Iterator<Item = (&i64, &CohElement)> {
        self.terms.iter()
    }

    pub fn coeff(&self, z_exp: i64) -> CohElement {
        self.terms.get(&z_exp).cloned().unwrap_or_else(|| CohElement::zero(self.ring))
    }

    pub fn min_z(&self) -> Option<i64> {
        self.terms.keys().next().copied()
    }

    pub fn max_z(&self) -> Option<i64> {
        self.terms.keys().next_back().copied()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.values().all(CohElement::is_zero)
    }

    pub fn is_truncated(&self) -> bool {
        self.terms.values().any(CohElement::is_truncated)
    }

    pub fn add_term(&mut self, z_exp: i64, c: CohElement) {
        assert_eq!(c.ring(), self.ring, "coefficient over a different ring");
        let sum = match self.terms.remove(&z_exp) {
            Some(old) => &old + &c,
            None => c,
        };
        if !(sum.is_zero() && !sum.is_truncated()) {
            self.terms.insert(z_exp, sum);
        }
    }

    pub fn mul_coh(&self, c: &CohElement) -> Self {
        let mut out = Self::zero(self.ring);
        for (e, a) in &self.terms {
            out.add_term(*e, a * c);
        }
        out
    }

    pub fn scale(&self, s: &LambdaScalar) -> Self {
        let mut out = Self::zero(self.ring);
        for (e, a) in &self.terms {
            out.add_term(*e, a.scale(s));
        }
        out
    }

    pub fn scale_rational(&self, c: &Rational) -> Self {
        let mut out = Self::zero(self.ring);
        for (e, a) in &self.terms {
            out.add_term(*e, a.scale_rational(c));
        }
        out
    }

    /// Multiplication by `z^k`.
    pub fn shift_z(&self, k: i64) -> Self {
        Self { ring: self.ring, terms: self.terms.iter().map(|(e, c)| (e + k, c.clone())).collect() }
    }

    /// `z ↦ −z`.
    pub fn flip_z(&self) -> Self {
        let terms = self
            .terms
            .iter()
            .map(|(e, c)| (*e, if e.rem_euclid(2) == 1 { -c } else { c.clone() }))
            .collect();
        Self { ring: self.ring, terms }
    }

    /// Keeps the `z`-exponents satisfying `keep`.
    pub fn filter_z(&self, keep: impl Fn(i64) -> bool) -> Self {
        Self {
            ring: self.ring,
            terms: self.terms.iter().filter(|(e, _)| keep(**e)).map(|(e, c)| (*e, c.clone())).collect(),
        }
    }

    pub fn map_coeffs(&self, f: impl Fn(&CohElement) -> CohElement) -> Self {
        let mut out = Self::zero(self.ring);
        for (e, c) in &self.terms {
            out.add_term(*e, f(c));
        }
        out
    }

    pub fn lambda_limit(&self) -> Self {
        self.map_coeffs(CohElement::lambda_limit)
    }

    pub fn raise_floor(&self, floor: i64) -> Self {
        Self { ring: self.ring, terms: self.terms.iter().map(|(e, c)| (*e, c.raise_floor(floor))).collect() }
    }

    pub fn with_ring(&self, ring: RingDescriptor) -> Self {
        let mut out = Self::zero(ring);
        for (e, c) in &self.terms {
            out.add_term(*e, c.with_ring(ring));
        }
        out
    }

    pub fn agrees_with(&self, other: &Self) -> bool {
        let keys: Vec<i64> = self.terms.keys().chain(other.terms.keys()).copied().collect();
        keys.into_iter().all(|e| self.coeff(e).agrees_with(&other.coeff(e)))
    }

    pub fn max_log_exp(&self) -> u32 {
        self.terms.values().map(CohElement::max_log_exp).max().unwrap_or(0)
    }
}

impl std::ops::Add for &ZPoly {
    type Output = ZPoly;
    fn add(self, rhs: &ZPoly) -> ZPoly {
        let mut out = self.clone();
        for (e, c) in &rhs.terms {
            out.add_term(*e, c.clone());
        }
        out
    }
}

impl std::ops::Sub for &ZPoly {
    type Output = ZPoly;
    fn sub(self, rhs: &ZPoly) -> ZPoly {
        self + &(-rhs)
    }
}

impl std::ops::Neg for &ZPoly {
    type Output = ZPoly;
    fn neg(self) -> ZPoly {
        ZPoly { ring: self.ring, terms: self.terms.iter().map(|(e, c)| (*e, -c)).collect() }
    }
}

impl std::ops::Mul for &ZPoly {
    type Output = ZPoly;
    fn mul(self, rhs: &ZPoly) -> ZPoly {
        let mut out = ZPoly::zero(self.ring);
        for (ea, a) in &self.terms {
            for (eb, b) in &rhs.terms {
                out.add_term(ea + eb, a * b);
            }
        }
        out
    }
}

impl TruncatedAlgebra for ZPoly {
    fn unit_like(&self) -> Self {
        Self::one(self.ring)
    }
    fn times(&self, other: &Self) -> Self {
        self * other
    }
    fn plus(&self, other: &Self) -> Self {
        self + other
    }
    fn scaled(&self, c: &Rational) -> Self {
        self.scale_rational(c)
    }
    fn vanishes(&self) -> bool {
        self.is_zero()
    }
}

impl fmt::Display for ZPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (i, (e, c)) in self.terms.iter().rev().enumerate() {
            if i > 0 {
                write!(f, " + ")?;
            }
            write!(f, "[{c}]·z^{e}")?;
        }
        Ok(())
    }
}

/// `exp(x)` for a `z`-Laurent polynomial that is topologically nilpotent
/// (every term either raises the `P`-degree or lowers the `λ`-degree).
pub fn exp_zpoly(x: &ZPoly) -> Result<ZPoly, RingError> {
    let ring = x.ring();
    let bound = ring.n() + ring.lambda_floor() as usize + 2;
    exp_nilpotent(x, bound)
}

/// Novikov-graded series `Σ_{d ≤ D} q^d · slice_d(z)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ZSeries {
    ring: RingDescriptor,
    convention: Convention,
    slices: Vec<ZPoly>,
}

impl ZSeries {
    pub fn zero(ring: RingDescriptor, max_degree: usize, convention: Convention) -> Self {
        Self { ring, convention, slices: vec![ZPoly::zero(ring); max_degree + 1] }
    }

    pub fn one(ring: RingDescriptor, max_degree: usize, convention: Convention) -> Self {
        let mut out = Self::zero(ring, max_degree, convention);
        out.slices[0] = ZPoly::one(ring);
        out
    }

    pub fn from_slices(ring: RingDescriptor, convention: Convention, slices: Vec<ZPoly>) -> Self {
        assert!(!slices.is_empty(), "a series has at least the degree-0 slice");
        assert!(slices.iter().all(|s| s.ring() == ring), "slice over a different ring");
        Self { ring, convention, slices }
    }

    /// `c · q^d` (zero if `d > D`).
    pub fn monomial(ring: RingDescriptor, max_degree: usize, convention: Convention, d: usize, c: ZPoly) -> Self {
        let mut out = Self::zero(ring, max_degree, convention);
        if d <= max_degree {
            out.slices[d] = c;
        }
        out
    }

    pub fn ring(&self) -> RingDescriptor {
        self.ring
    }

    pub fn convention(&self) -> Convention {
        self.convention
    }

    pub fn max_degree(&self) -> usize {
        self.slices.len() - 1
    }

    pub fn slice(&self, d: usize) -> &ZPoly {
        &self.slices[d]
    }

    pub fn slices(&self) -> &[ZPoly] {
        &self.slices
    }

    pub fn set_slice(&mut self, d: usize, value: ZPoly) {
        assert_eq!(value.ring(), self.ring);
        self.slices[d] = value;
    }

    pub fn with_convention(mut self, convention: Convention) -> Self {
        self.convention = convention;
        self
    }

    pub fn is_zero(&self) -> bool {
        self.slices.iter().all(ZPoly::is_zero)
    }

    pub fn is_truncated(&self) -> bool {
        self.slices.iter().any(ZPoly::is_truncated)
    }

    /// Lower Novikov truncation.
    pub fn truncate_degree(&self, max_degree: usize) -> Self {
        let keep = max_degree.min(self.max_degree());
        let mut slices = self.slices[..=keep].to_vec();
        slices.resize(max_degree + 1, ZPoly::zero(self.ring));
        Self { ring: self.ring, convention: self.convention, slices }
    }

    pub fn map_slices(&self, f: impl Fn(usize, &ZPoly) -> ZPoly) -> Self {
        Self {
            ring: self.ring,
            convention: self.convention,
            slices: self.slices.iter().enumerate().map(|(d, s)| f(d, s)).collect(),
        }
    }

    pub fn mul_zpoly(&self, m: &ZPoly) -> Self {
        self.map_slices(|_, s| s * m)
    }

    pub fn scale_rational(&self, c: &Rational) -> Self {
        self.map_slices(|_, s| s.scale_rational(c))
    }

    pub fn flip_z(&self) -> Self {
        self.map_slices(|_, s| s.flip_z())
    }

    pub fn lambda_limit(&self) -> Self {
        self.map_slices(|_, s| s.lambda_limit())
    }

    pub fn with_ring(&self, ring: RingDescriptor) -> Self {
        Self {
            ring,
            convention: self.convention,
            slices: self.slices.iter().map(|s| s.with_ring(ring)).collect(),
        }
    }

    pub fn try_add(&self, other: &Self) -> Result<Self, SeriesError> {
        self.compatible(other)?;
        Ok(Self {
            ring: self.ring,
            convention: self.convention,
            slices: self.slices.iter().zip(&other.slices).map(|(a, b)| a + b).collect(),
        })
    }

    pub fn try_sub(&self, other: &Self) -> Result<Self, SeriesError> {
        self.try_add(&other.scale_rational(&int(-1)))
    }

    /// Equality on every `λ`-range where both sides are known.
    pub fn agrees_with(&self, other: &Self) -> bool {
        self.max_degree() == other.max_degree()
            && self.convention == other.convention
            && self.slices.iter().zip(&other.slices).all(|(a, b)| a.agrees_with(b))
    }

    /// `q^{-valuation}` of the lowest nonzero slice.
    pub fn q_valuation(&self) -> Option<usize> {
        self.slices.iter().position(|s| !s.is_zero())
    }

    fn compatible(&self, other: &Self) -> Result<(), SeriesError> {
        if self.convention != other.convention {
            return Err(SeriesError::ConventionMismatch(self.convention, other.convention));
        }
        if self.max_degree() != other.max_degree() {
            return Err(SeriesError::DegreeMismatch(self.max_degree(), other.max_degree()));
        }
        if self.ring != other.ring {
            return Err(RingError::DescriptorMismatch { left: self.ring, right: other.ring }.into());
        }
        Ok(())
    }

    pub fn to_json(&self) -> Value {
        let mut slices = Map::new();
        let mut truncation = Map::new();
        for (d, slice) in self.slices.iter().enumerate() {
            let mut zmap = Map::new();
            let mut zflags = Map::new();
            for (e, c) in slice.terms() {
                let mut pmap = Map::new();
                let mut pflags = Map::new();
                for (k, s) in c.components().iter().enumerate() {
                    if let Some(floor) = s.known_from() {
                        pflags.insert(k.to_string(), json!(floor));
                    }
                    if s.is_zero() {
                        continue;
                    }
                    pmap.insert(k.to_string(), scalar_to_json(s));
                }
                if !pflags.is_empty() {
                    zflags.insert(e.to_string(), Value::Object(pflags));
                }
                if !pmap.is_empty() || c.is_truncated() {
                    zmap.insert(e.to_string(), Value::Object(pmap));
                }
            }
            if !zflags.is_empty() {
                truncation.insert(d.to_string(), Value::Object(zflags));
            }
            slices.insert(d.to_string(), Value::Object(zmap));
        }
        let mut out = Map::new();
        out.insert("convention".into(), json!(self.convention.as_str()));
        out.insert("n".into(), json!(self.ring.n()));
        out.insert("lambda_floor".into(), json!(self.ring.lambda_floor()));
        out.insert("max_degree".into(), json!(self.max_degree()));
        out.insert("slices".into(), Value::Object(slices));
        if !truncation.is_empty() {
            out.insert("known_from".into(), Value::Object(truncation));
        }
        Value::Object(out)
    }

    pub fn from_json(value: &Value) -> Result<Self, SeriesError> {
        let err = |m: &str| SeriesError::Json(m.to_string());
        let obj = value.as_object().ok_or_else(|| err("expected an object"))?;
        let convention: Convention = serde_json::from_value(obj.get("convention").cloned().unwrap_or(Value::Null))
            .map_err(|e| SeriesError::Json(e.to_string()))?;
        let n = obj.get("n").and_then(Value::as_u64).ok_or_else(|| err("missing n"))? as usize;
        let floor = obj.get("lambda_floor").and_then(Value::as_i64).ok_or_else(|| err("missing lambda_floor"))?;
        let ring = RingDescriptor::new(n, floor)?;
        let slices_obj = obj.get("slices").and_then(Value::as_object).ok_or_else(|| err("missing slices"))?;
        let max_degree = match obj.get("max_degree") {
            Some(v) => v.as_u64().ok_or_else(|| err("bad max_degree"))? as usize,
            None => slices_obj.len().saturating_sub(1),
        };
        let flags = obj.get("known_from").and_then(Value::as_object);
        let mut out = Self::zero(ring, max_degree, convention);
        for (dkey, zmap) in slices_obj {
            let d: usize = dkey.parse().map_err(|_| err("bad degree key"))?;
            if d > max_degree {
                return Err(err("slice beyond max_degree"));
            }
            let zmap = zmap.as_object().ok_or_else(|| err("slice must be an object"))?;
            let mut slice = ZPoly::zero(ring);
            for (zkey, pmap) in zmap {
                let e: i64 = zkey.parse().map_err(|_| err("bad z exponent"))?;
                let pmap = pmap.as_object().ok_or_else(|| err("z term must be an object"))?;
                let mut comps = vec![LambdaScalar::zero(); n];
                for (pkey, lmap) in pmap {
                    let k: usize = pkey.parse().map_err(|_| err("bad P exponent"))?;
                    if k >= n {
                        return Err(err("P exponent out of range"));
                    }
                    comps[k] = scalar_from_json(lmap)?;
                }
                let z_flags = flags.and_then(|f| f.get(dkey)).and_then(|z| z.get(zkey)).and_then(Value::as_object);
                if let Some(pf) = z_flags {
                    for (pkey, floor) in pf {
                        let k: usize = pkey.parse().map_err(|_| err("bad P exponent"))?;
                        let floor = floor.as_i64().ok_or_else(|| err("bad truncation floor"))?;
                        if k >= n {
                            return Err(err("P exponent out of range"));
                        }
                        comps[k] = comps[k].clone().with_known_from(Some(floor));
                    }
                }
                slice.add_term(e, CohElement::from_components(ring, comps)?);
            }
            out.slices[d] = slice;
        }
        Ok(out)
    }
}

/// `{"e": "p/q"}`, with `"e*log^k"` keys for `log λ` powers.
pub fn scalar_to_json(s: &LambdaScalar) -> Value {
    let mut m = Map::new();
    for ((e, l), c) in s.terms() {
        let key = if *l == 0 { e.to_string() } else { format!("{e}*log^{l}") };
        m.insert(key, json!(format_rational(c)));
    }
    Value::Object(m)
}

pub fn scalar_from_json(v: &Value) -> Result<LambdaScalar, SeriesError> {
    let err = |m: String| SeriesError::Json(m);
    let obj = v.as_object().ok_or_else(|| err("scalar must be an object".into()))?;
    let mut terms = Vec::new();
    for (key, val) in obj {
        let (e, l) = match key.split_once("*log^") {
            Some((e, l)) => (e, l.parse::<u32>().map_err(|_| err(format!("bad log exponent {key}")))?),
            None => (key.as_str(), 0),
        };
        let e: i64 = e.parse().map_err(|_| err(format!("bad λ exponent {key}")))?;
        let c = val
            .as_str()
            .and_then(parse_rational)
            .ok_or_else(|| err(format!("bad rational {val}")))?;
        terms.push(((e, l), c));
    }
    Ok(LambdaScalar::from_terms(terms))
}

/// Graded Cauchy product, truncated at `D`.
pub fn series_mul(f: &ZSeries, g: &ZSeries) -> Result<ZSeries, SeriesError> {
    f.compatible(g)?;
    let dmax = f.max_degree();
    let mut out = ZSeries::zero(f.ring, dmax, f.convention);
    for a in 0..=dmax {
        if f.slices[a].is_zero() && !f.slices[a].is_truncated() {
            continue;
        }
        for b in 0..=dmax - a {
            let prod = &f.slices[a] * &g.slices[b];
            out.slices[a + b] = &out.slices[a + b] + &prod;
        }
    }
    Ok(out)
}

fn pairing_series(
    f: &ZSeries,
    g: &ZSeries,
    pair: impl Fn(&CohElement, &CohElement) -> Result<LambdaScalar, RingError>,
) -> Result<Vec<LambdaScalar>, SeriesError> {
    for s in [f, g] {
        if s.convention != Convention::Raw {
            return Err(SeriesError::WrongConvention { expected: Convention::Raw, got: s.convention });
        }
    }
    f.compatible(g)?;
    let dmax = f.max_degree();
    let mut out = vec![LambdaScalar::zero(); dmax + 1];
    for a in 0..=dmax {
        for b in 0..=dmax - a {
            for (i, u) in f.slices[a].terms() {
                let v = g.slices[b].coeff(-1 - i);
                if v.is_zero() && !v.is_truncated() {
                    continue;
                }
                let mut val = pair(u, &v)?;
                if i.rem_euclid(2) == 1 {
                    val = -&val;
                }
                out[a + b] = &out[a + b] + &val;
            }
        }
    }
    Ok(out)
}

/// `Ω(f, g) = Res_{z=0} (f(−z), g(z)) dz` with the Poincaré pairing, one value per Novikov degree.
pub fn symplectic_form(f: &ZSeries, g: &ZSeries) -> Result<Vec<LambdaScalar>, SeriesError> {
    pairing_series(f, g, |a, b| Ok(integrate(&a.try_mul(b)?)))
}

/// The same residue with the `e(E)`-twisted pairing.
pub fn symplectic_form_twisted(f: &ZSeries, g: &ZSeries, bundle: &BundleSpec) -> Result<Vec<LambdaScalar>, SeriesError> {
    pairing_series(f, g, |a, b| twisted_pairing(a, b, bundle))
}

/// `ℋ₊ = H[z]` or `ℋ₋ = z^{-1}H[z^{-1}]` part.
pub fn project(f: &ZSeries, half: Half) -> Result<ZSeries, SeriesError> {
    if f.convention != Convention::Raw {
        return Err(SeriesError::WrongConvention { expected: Convention::Raw, got: f.convention });
    }
    Ok(match half {
        Half::Plus => f.map_slices(|_, s| s.filter_z(|e| e >= 0)),
        Half::Minus => f.map_slices(|_, s| s.filter_z(|e| e < 0)),
    })
}

/// The operator `zD_P` on a reduced series: slice `d` is multiplied by `P + d·z`.
pub fn directional_derivative(f: &ZSeries) -> Result<ZSeries, SeriesError> {
    if f.convention != Convention::Reduced {
        return Err(SeriesError::WrongConvention { expected: Convention::Reduced, got: f.convention });
    }
    let ring = f.ring;
    Ok(f.map_slices(|d, s| {
        let factor = ZPoly::linear(CohElement::p_power(ring, 1), CohElement::constant(ring, int(d as i64)));
        s * &factor
    }))
}

/// `exp(x)` for a series with vanishing degree-0 slice.
pub fn exp_series(x: &ZSeries) -> Result<ZSeries, SeriesError> {
    if !x.slices[0].is_zero() {
        return Err(RingError::NotExponentiable("degree-0 slice must vanish".into()).into());
    }
    let mut acc = ZSeries::one(x.ring, x.max_degree(), x.convention);
    let mut term = acc.clone();
    for j in 1..=x.max_degree() {
        term = series_mul(&term, x)?.scale_rational(&Rational::new(One::one(), (j as i64).into()));
        acc = acc.try_add(&term)?;
    }
    Ok(acc)
}

/// Constant-in-`q` series with the given slice 0.
pub fn constant_series(c: ZPoly, max_degree: usize, convention: Convention) -> ZSeries {
    let ring = c.ring();
    ZSeries::monomial(ring, max_degree, convention, 0, c)
}
