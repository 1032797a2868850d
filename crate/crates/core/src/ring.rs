//! The graded ring `H = Q[P]/(P^n)` of `CP^{n-1}` with scalars that are
//! truncated Laurent polynomials in the equivariant parameter `λ` (plus a
//! formal, commuting `log λ` generator).
//!
//! Truncation is explicit: a [`LambdaScalar`] remembers the lowest
//! `λ`-exponent from which its coefficients are exact (`known_from`). Exact
//! values carry `None`. Multiplying a truncated value by something with
//! positive `λ`-powers raises the floor accordingly, so a residual is only
//! ever compared where both sides are actually known.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_traits::{One, ToPrimitive, Zero};
use thiserror::Error;

use crate::rational::{binomial, factorial, int, Rational};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum RingError {
    #[error("ring descriptor mismatch: {left} vs {right}")]
    DescriptorMismatch {
        left: RingDescriptor,
        right: RingDescriptor,
    },
    #[error("invalid ring descriptor: {0}")]
    InvalidDescriptor(String),
    #[error("invalid bundle: {0}")]
    InvalidBundle(String),
    #[error("λ-floor {got} is too shallow, need at least {needed}")]
    InsufficientTruncation { needed: i64, got: i64 },
    #[error("exponential is not defined: {0}")]
    NotExponentiable(String),
    #[error("log λ degree {degree} exceeds the cap {cap}")]
    LogDegreeOverflow { degree: u32, cap: u32 },
}

/// `H*(CP^{n-1})` together with the `λ`-truncation policy.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct RingDescriptor {
    n: usize,
    lambda_floor: i64,
    log_degree_cap: u32,
}

impl RingDescriptor {
    /// `n ≥ 2` is the rank of `H` (so `X = P^{n-1}`); `λ`-expansions are kept
    /// down to `λ^{-lambda_floor}`.
    pub fn new(n: usize, lambda_floor: i64) -> Result<Self, RingError> {
        Self::with_log_cap(n, lambda_floor, n as u32)
    }

    pub fn with_log_cap(n: usize, lambda_floor: i64, log_degree_cap: u32) -> Result<Self, RingError> {
        if n < 2 {
            return Err(RingError::InvalidDescriptor(format!("n = {n}, need n >= 2")));
        }
        if lambda_floor < 0 {
            return Err(RingError::InvalidDescriptor(format!(
                "lambda floor = {lambda_floor}, need L >= 0"
            )));
        }
        Ok(Self { n, lambda_floor, log_degree_cap })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn lambda_floor(&self) -> i64 {
        self.lambda_floor
    }

    pub fn log_degree_cap(&self) -> u32 {
        self.log_degree_cap
    }

    /// Lowest kept `λ`-exponent, i.e. `-L`.
    pub fn min_lambda_exp(&self) -> i64 {
        -self.lambda_floor
    }

    pub fn with_floor(&self, lambda_floor: i64) -> Self {
        Self { lambda_floor: lambda_floor.max(0), ..*self }
    }
}

impl fmt::Display for RingDescriptor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Q[P]/(P^{}) [λ-floor {}, log cap {}]", self.n, self.lambda_floor, self.log_degree_cap)
    }
}

/// Key of a scalar monomial `λ^e (log λ)^k`.
pub type LambdaKey = (i64, u32);

/// A finite sum `Σ c · λ^e (log λ)^k` with exact rational coefficients.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct LambdaScalar {
    terms: BTreeMap<LambdaKey, Rational>,
    known_from: Option<i64>,
}

impl LambdaScalar {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn one() -> Self {
        Self::constant(Rational::one())
    }

    pub fn constant(c: Rational) -> Self {
        Self::monomial(c, 0, 0)
    }

    pub fn integer(c: i64) -> Self {
        Self::constant(int(c))
    }

    pub fn lambda() -> Self {
        Self::monomial(Rational::one(), 1, 0)
    }

    pub fn lambda_pow(e: i64) -> Self {
        Self::monomial(Rational::one(), e, 0)
    }

    pub fn log_lambda() -> Self {
        Self::monomial(Rational::one(), 0, 1)
    }

    pub fn monomial(c: Rational, lambda_exp: i64, log_exp: u32) -> Self {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert((lambda_exp, log_exp), c);
        }
        Self { terms, known_from: None }
    }

    pub fn from_terms(terms: impl IntoIterator<Item = (LambdaKey, Rational)>) -> Self {
        let mut s = Self::zero();
        for (k, c) in terms {
            s.add_term(k, c);
        }
        s
    }

    /// Marks everything below `λ^floor` as unknown.
    pub fn with_known_from(mut self, floor: Option<i64>) -> Self {
        self.known_from = floor;
        self.drop_unknown();
        self
    }

    /// Declares everything below `λ^floor` unknown (keeps an existing higher floor).
    pub fn raise_floor(&self, floor: i64) -> Self {
        let known = Some(self.known_from.map_or(floor, |k| k.max(floor)));
        self.clone().with_known_from(known)
    }

    pub fn terms(&self) -> impl Iterator<Item = (&LambdaKey, &Rational)> {
        self.terms.iter()
    }

    pub fn coeff(&self, lambda_exp: i64, log_exp: u32) -> Rational {
        self.terms.get(&(lambda_exp, log_exp)).cloned().unwrap_or_else(Rational::zero)
    }

    /// `Some(e)` when coefficients below `λ^e` were lost to truncation.
    pub fn known_from(&self) -> Option<i64> {
        self.known_from
    }

    pub fn is_truncated(&self) -> bool {
        self.known_from.is_some()
    }

    /// No stored terms (the value may still be truncated).
    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_exact_zero(&self) -> bool {
        self.terms.is_empty() && self.known_from.is_none()
    }

    pub fn max_lambda_exp(&self) -> Option<i64> {
        self.terms.keys().map(|k| k.0).max()
    }

    pub fn min_lambda_exp(&self) -> Option<i64> {
        self.terms.keys().map(|k| k.0).min()
    }

    pub fn max_log_exp(&self) -> u32 {
        self.terms.keys().map(|k| k.1).max().unwrap_or(0)
    }

    /// The value as a plain rational, if it is one.
    pub fn as_rational(&self) -> Option<Rational> {
        match self.terms.len() {
            0 => Some(Rational::zero()),
            1 => self.terms.get(&(0, 0)).cloned(),
            _ => None,
        }
    }

    /// Coefficient-wise `λ⁰` part (the non-equivariant limit of a polynomial in `λ`).
    pub fn lambda_limit(&self) -> Self {
        Self::constant(self.coeff(0, 0))
    }

    fn add_term(&mut self, key: LambdaKey, c: Rational) {
        if c.is_zero() {
            return;
        }
        let entry = self.terms.entry(key).or_insert_with(Rational::zero);
        *entry += c;
        if entry.is_zero() {
            self.terms.remove(&key);
        }
    }

    fn drop_unknown(&mut self) {
        if let Some(k) = self.known_from {
            self.terms.retain(|key, _| key.0 >= k);
        }
    }

    /// Largest `λ`-exponent the value (including its unknown tail) may reach.
    fn reach(&self) -> Option<i64> {
        let top = self.max_lambda_exp();
        match (top, self.known_from) {
            (Some(t), Some(k)) => Some(t.max(k - 1)),
            (Some(t), None) => Some(t),
            (None, Some(k)) => Some(k - 1),
            (None, None) => None,
        }
    }

    pub fn scale(&self, c: &Rational) -> Self {
        if c.is_zero() {
            return Self { terms: BTreeMap::new(), known_from: self.known_from };
        }
        Self {
            terms: self.terms.iter().map(|(k, v)| (*k, v * c)).collect(),
            known_from: self.known_from,
        }
    }

    /// Multiplication by `λ^e`.
    pub fn shift_lambda(&self, e: i64) -> Self {
        Self {
            terms: self.terms.iter().map(|(k, v)| ((k.0 + e, k.1), v.clone())).collect(),
            known_from: self.known_from.map(|k| k + e),
        }
    }

    /// Exact product with no floor applied.
    pub fn mul_exact(&self, other: &Self) -> Self {
        if self.is_exact_zero() || other.is_exact_zero() {
            return Self::zero();
        }
        let mut dropped = false;
        self.mul_exact_filtered(other, i64::MIN, &mut dropped)
    }

    /// Drops every term below `λ^min_exp`; flags truncation if anything was dropped.
    pub fn truncate(&self, min_exp: i64) -> Self {
        let mut out = self.clone();
        let before = out.terms.len();
        out.terms.retain(|k, _| k.0 >= min_exp);
        if out.terms.len() != before {
            out.known_from = Some(out.known_from.map_or(min_exp, |k| k.max(min_exp)));
        }
        out
    }

    pub fn mul_truncated(&self, other: &Self, min_exp: i64) -> Self {
        if self.is_exact_zero() || other.is_exact_zero() {
            return Self::zero();
        }
        // Pre-filter pairs that land below the floor instead of building them.
        let mut dropped = false;
        let mut out = self.mul_exact_filtered(other, min_exp, &mut dropped);
        if dropped {
            out.known_from = Some(out.known_from.map_or(min_exp, |k| k.max(min_exp)));
            out.drop_unknown();
        }
        out
    }

    fn mul_exact_filtered(&self, other: &Self, min_exp: i64, dropped: &mut bool) -> Self {
        let mut known: Option<i64> = None;
        if let (Some(ka), Some(rb)) = (self.known_from, other.reach()) {
            known = Some(ka + rb);
        }
        if let (Some(kb), Some(ra)) = (other.known_from, self.reach()) {
            known = Some(known.map_or(kb + ra, |k| k.max(kb + ra)));
        }
        let mut out = Self { terms: BTreeMap::new(), known_from: known };
        for ((ea, la), ca) in &self.terms {
            for ((eb, lb), cb) in &other.terms {
                let e = ea + eb;
                if e < min_exp {
                    *dropped = true;
                    continue;
                }
                if let Some(k) = known {
                    if e < k {
                        continue;
                    }
                }
                out.add_term((e, la + lb), ca * cb);
            }
        }
        out
    }

    /// Equality on the `λ`-range where both values are known.
    pub fn agrees_with(&self, other: &Self) -> bool {
        let floor = match (self.known_from, other.known_from) {
            (Some(a), Some(b)) => Some(a.max(b)),
            (a, b) => a.or(b),
        };
        let keys = self.terms.keys().chain(other.terms.keys());
        for key in keys {
            if floor.is_some_and(|f| key.0 < f) {
                continue;
            }
            if self.coeff(key.0, key.1) != other.coeff(key.0, key.1) {
                return false;
            }
        }
        true
    }
}

impl Add for &LambdaScalar {
    type Output = LambdaScalar;
    fn add(self, rhs: &LambdaScalar) -> LambdaScalar {
        let known_from = match (self.known_from, rhs.known_from) {
            (Some(a), Some(b)) => Some(a.max(b)),
            (a, b) => a.or(b),
        };
        let mut out = LambdaScalar { terms: self.terms.clone(), known_from };
        for (k, c) in &rhs.terms {
            out.add_term(*k, c.clone());
        }
        out.drop_unknown();
        out
    }
}

impl Sub for &LambdaScalar {
    type Output = LambdaScalar;
    fn sub(self, rhs: &LambdaScalar) -> LambdaScalar {
        self + &(-rhs)
    }
}

impl Neg for &LambdaScalar {
    type Output = LambdaScalar;
    fn neg(self) -> LambdaScalar {
        LambdaScalar {
            terms: self.terms.iter().map(|(k, v)| (*k, -v)).collect(),
            known_from: self.known_from,
        }
    }
}

impl Mul for &LambdaScalar {
    type Output = LambdaScalar;
    fn mul(self, rhs: &LambdaScalar) -> LambdaScalar {
        self.mul_exact(rhs)
    }
}

impl fmt::Display for LambdaScalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            write!(f, "0")?;
        }
        for (i, ((e, l), c)) in self.terms.iter().rev().enumerate() {
            if i > 0 {
                write!(f, " + ")?;
            }
            write!(f, "{c}")?;
            if *e != 0 {
                write!(f, "·λ^{e}")?;
            }
            if *l != 0 {
                write!(f, "·log(λ)^{l}")?;
            }
        }
        if let Some(k) = self.known_from {
            write!(f, " + O(λ^{})", k - 1)?;
        }
        Ok(())
    }
}

/// An element `Σ_k c_k P^k` of `H`, coordinates in the basis `1, P, …, P^{n-1}`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CohElement {
    ring: RingDescriptor,
    comps: Vec<LambdaScalar>,
}

impl CohElement {
    pub fn zero(ring: RingDescriptor) -> Self {
        Self { ring, comps: vec![LambdaScalar::zero(); ring.n()] }
    }

    pub fn one(ring: RingDescriptor) -> Self {
        Self::from_scalar(ring, LambdaScalar::one())
    }

    pub fn from_scalar(ring: RingDescriptor, s: LambdaScalar) -> Self {
        let mut out = Self::zero(ring);
        out.comps[0] = s;
        out
    }

    pub fn constant(ring: RingDescriptor, c: Rational) -> Self {
        Self::from_scalar(ring, LambdaScalar::constant(c))
    }

    /// `c · P^k`; zero when `k ≥ n`.
    pub fn p_monomial(ring: RingDescriptor, k: usize, c: LambdaScalar) -> Self {
        let mut out = Self::zero(ring);
        if k < ring.n() {
            out.comps[k] = c;
        }
        out
    }

    pub fn p_power(ring: RingDescriptor, k: usize) -> Self {
        Self::p_monomial(ring, k, LambdaScalar::one())
    }

    /// `a + b·P`.
    pub fn linear(ring: RingDescriptor, a: LambdaScalar, b: LambdaScalar) -> Self {
        let mut out = Self::from_scalar(ring, a);
        out.comps[1] = b;
        out
    }

    pub fn from_components(ring: RingDescriptor, comps: Vec<LambdaScalar>) -> Result<Self, RingError> {
        if comps.len() != ring.n() {
            return Err(RingError::InvalidDescriptor(format!(
                "{} components for rank {}",
                comps.len(),
                ring.n()
            )));
        }
        Ok(Self { ring, comps })
    }

    pub fn ring(&self) -> RingDescriptor {
        self.ring
    }

    pub fn component(&self, k: usize) -> &LambdaScalar {
        &self.comps[k]
    }

    pub fn components(&self) -> &[LambdaScalar] {
        &self.comps
    }

    pub fn is_zero(&self) -> bool {
        self.comps.iter().all(LambdaScalar::is_zero)
    }

    pub fn is_truncated(&self) -> bool {
        self.comps.iter().any(LambdaScalar::is_truncated)
    }

    pub fn is_one(&self) -> bool {
        *self == Self::one(self.ring)
    }

    pub fn with_ring(&self, ring: RingDescriptor) -> Self {
        assert_eq!(ring.n(), self.ring.n(), "rank change is not a ring map");
        let min = ring.min_lambda_exp();
        Self { ring, comps: self.comps.iter().map(|c| c.truncate(min)).collect() }
    }

    pub fn raise_floor(&self, floor: i64) -> Self {
        Self { ring: self.ring, comps: self.comps.iter().map(|c| c.raise_floor(floor)).collect() }
    }

    pub fn scale(&self, s: &LambdaScalar) -> Self {
        let min = self.ring.min_lambda_exp();
        Self { ring: self.ring, comps: self.comps.iter().map(|c| c.mul_truncated(s, min)).collect() }
    }

    pub fn scale_rational(&self, c: &Rational) -> Self {
        Self { ring: self.ring, comps: self.comps.iter().map(|x| x.scale(c)).collect() }
    }

    pub fn try_add(&self, other: &Self) -> Result<Self, RingError> {
        self.check(other)?;
        Ok(Self {
            ring: self.ring,
            comps: self.comps.iter().zip(&other.comps).map(|(a, b)| a + b).collect(),
        })
    }

    /// Product modulo `P^n`, truncated at the ring's `λ`-floor.
    pub fn try_mul(&self, other: &Self) -> Result<Self, RingError> {
        self.check(other)?;
        let n = self.ring.n();
        let min = self.ring.min_lambda_exp();
        let mut comps = vec![LambdaScalar::zero(); n];
        for (i, a) in self.comps.iter().enumerate() {
            if a.is_exact_zero() {
                continue;
            }
            for (j, b) in other.comps.iter().enumerate().take(n - i) {
                if b.is_exact_zero() {
                    continue;
                }
                comps[i + j] = &comps[i + j] + &a.mul_truncated(b, min);
            }
        }
        Ok(Self { ring: self.ring, comps })
    }

    pub fn pow(&self, k: u32) -> Self {
        let mut acc = Self::one(self.ring);
        for _ in 0..k {
            acc = &acc * self;
        }
        acc
    }

    /// Smallest `k` with a nonzero `P^k` coefficient.
    pub fn p_valuation(&self) -> Option<usize> {
        self.comps.iter().position(|c| !c.is_zero())
    }

    pub fn lambda_limit(&self) -> Self {
        Self { ring: self.ring, comps: self.comps.iter().map(LambdaScalar::lambda_limit).collect() }
    }

    pub fn agrees_with(&self, other: &Self) -> bool {
        self.ring.n() == other.ring.n() && self.comps.iter().zip(&other.comps).all(|(a, b)| a.agrees_with(b))
    }

    pub fn max_log_exp(&self) -> u32 {
        self.comps.iter().map(LambdaScalar::max_log_exp).max().unwrap_or(0)
    }

    fn check(&self, other: &Self) -> Result<(), RingError> {
        if self.ring != other.ring {
            return Err(RingError::DescriptorMismatch { left: self.ring, right: other.ring });
        }
        Ok(())
    }
}

impl Add for &CohElement {
    type Output = CohElement;
    fn add(self, rhs: &CohElement) -> CohElement {
        self.try_add(rhs).expect("cohomology elements over different rings")
    }
}

impl Sub for &CohElement {
    type Output = CohElement;
    fn sub(self, rhs: &CohElement) -> CohElement {
        self + &(-rhs)
    }
}

impl Neg for &CohElement {
    type Output = CohElement;
    fn neg(self) -> CohElement {
        CohElement { ring: self.ring, comps: self.comps.iter().map(|c| -c).collect() }
    }
}

impl Mul for &CohElement {
    type Output = CohElement;
    fn mul(self, rhs: &CohElement) -> CohElement {
        self.try_mul(rhs).expect("cohomology elements over different rings")
    }
}

impl fmt::Display for CohElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (k, c) in self.comps.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            write!(f, "({c})·P^{k}")?;
        }
        if first {
            write!(f, "0")?;
        }
        Ok(())
    }
}

pub fn coh_mul(a: &CohElement, b: &CohElement) -> Result<CohElement, RingError> {
    a.try_mul(b)
}

/// `∫_{P^{n-1}}`: the coefficient of `P^{n-1}`.
pub fn integrate(a: &CohElement) -> LambdaScalar {
    a.component(a.ring().n() - 1).clone()
}

/// Split bundle `⊕ O(l_i)` on `P^{n-1}`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct BundleSpec {
    degrees: Vec<u32>,
    equivariant: bool,
}

impl BundleSpec {
    /// A convex split bundle: at least one summand, every `l_i ≥ 1`.
    pub fn new(degrees: Vec<u32>, equivariant: bool) -> Result<Self, RingError> {
        if degrees.is_empty() {
            return Err(RingError::InvalidBundle("no summands".into()));
        }
        if let Some(l) = degrees.iter().find(|&&l| l == 0) {
            return Err(RingError::InvalidBundle(format!("degree {l} is not positive")));
        }
        Ok(Self { degrees, equivariant })
    }

    /// The rank-zero bundle; twisting by it is the identity.
    pub fn zero(equivariant: bool) -> Self {
        Self { degrees: Vec::new(), equivariant }
    }

    pub fn degrees(&self) -> &[u32] {
        &self.degrees
    }

    pub fn rank(&self) -> usize {
        self.degrees.len()
    }

    pub fn is_equivariant(&self) -> bool {
        self.equivariant
    }

    pub fn total_degree(&self) -> u64 {
        self.degrees.iter().map(|&l| l as u64).sum()
    }

    /// `E ⊕ F`; the equivariant flags must agree.
    pub fn direct_sum(&self, other: &Self) -> Result<Self, RingError> {
        if self.equivariant != other.equivariant {
            return Err(RingError::InvalidBundle("mixed equivariant flags".into()));
        }
        let mut degrees = self.degrees.clone();
        degrees.extend_from_slice(&other.degrees);
        Ok(Self { degrees, equivariant: self.equivariant })
    }

    pub fn non_equivariant(&self) -> Self {
        Self { equivariant: false, ..self.clone() }
    }

    /// `λ` when equivariant, `0` otherwise.
    pub fn lambda(&self) -> LambdaScalar {
        if self.equivariant {
            LambdaScalar::lambda()
        } else {
            LambdaScalar::zero()
        }
    }

    /// First Chern root `ρ_i = l_i P`.
    pub fn root(&self, ring: RingDescriptor, i: usize) -> CohElement {
        CohElement::p_monomial(ring, 1, LambdaScalar::integer(self.degrees[i] as i64))
    }

    /// `e(E) = Π (λ + ρ_i)`.
    pub fn euler_class(&self, ring: RingDescriptor) -> CohElement {
        let lambda = CohElement::from_scalar(ring, self.lambda());
        (0..self.rank()).fold(CohElement::one(ring), |acc, i| &acc * &(&lambda + &self.root(ring, i)))
    }

    /// `ch_k(E) = Σ ρ_i^k / k!`.
    pub fn chern_character(&self, ring: RingDescriptor, k: u32) -> CohElement {
        let inv = Rational::new(1.into(), factorial(k as u64));
        (0..self.rank())
            .fold(CohElement::zero(ring), |acc, i| &acc + &self.root(ring, i).pow(k))
            .scale_rational(&inv)
    }
}

/// `(a, b)_{e(E)} = ∫ e(E)·a·b`.
pub fn twisted_pairing(a: &CohElement, b: &CohElement, bundle: &BundleSpec) -> Result<LambdaScalar, RingError> {
    let ab = a.try_mul(b)?;
    Ok(integrate(&(&bundle.euler_class(a.ring()) * &ab)))
}

pub fn poincare_pairing(a: &CohElement, b: &CohElement) -> Result<LambdaScalar, RingError> {
    Ok(integrate(&a.try_mul(b)?))
}

/// Gram matrix of the twisted pairing in the basis `P^a`.
pub fn twisted_gram(ring: RingDescriptor, bundle: &BundleSpec) -> Vec<Vec<LambdaScalar>> {
    let n = ring.n();
    (0..n)
        .map(|a| {
            (0..n)
                .map(|b| {
                    twisted_pairing(&CohElement::p_power(ring, a), &CohElement::p_power(ring, b), bundle)
                        .expect("same ring")
                })
                .collect()
        })
        .collect()
}

/// `(λ + x)^exponent` expanded binomially around `λ`, for `x` without `λ^{>0}` terms.
pub fn lambda_plus_power(x: &CohElement, exponent: i64) -> CohElement {
    let ring = x.ring();
    if exponent >= 0 {
        let base = &CohElement::from_scalar(ring, LambdaScalar::lambda()) + x;
        return base.pow(exponent as u32);
    }
    // λ^a Σ_j binom(a, j) (x/λ)^j; the sum ends once (x/λ)^j vanishes.
    let ratio = x.scale(&LambdaScalar::lambda_pow(-1));
    let mut acc = CohElement::zero(ring);
    let mut power = CohElement::one(ring);
    let mut j = 0u64;
    while !power.is_zero() {
        acc = &acc + &power.scale_rational(&binomial(exponent, j));
        power = &power * &ratio;
        j += 1;
    }
    acc.scale(&LambdaScalar::lambda_pow(exponent))
}

/// The `z⁰ P⁰ λ⁰` parts of an exponent: `(constant, coefficient of log λ)`.
/// Any other `log`-power at `λ⁰ P⁰` cannot be exponentiated in this ring.
pub(crate) fn split_log_part(s: &LambdaScalar) -> Result<(LambdaScalar, i64, LambdaScalar), RingError> {
    let mut rest = LambdaScalar::zero().with_known_from(s.known_from());
    let mut constant = LambdaScalar::zero();
    let mut log_mult = 0i64;
    for (&(e, l), c) in s.terms() {
        match (e, l) {
            (0, 0) => constant = LambdaScalar::constant(c.clone()),
            (0, 1) => {
                if !c.is_integer() {
                    return Err(RingError::NotExponentiable(format!("exp({c}·log λ) is not a power of λ")));
                }
                log_mult = c.to_integer().to_i64().ok_or_else(|| {
                    RingError::NotExponentiable("log λ multiplicity out of range".into())
                })?;
            }
            (0, _) => {
                return Err(RingError::NotExponentiable(format!("exp of log(λ)^{l} at λ⁰")));
            }
            (e, _) if e > 0 => {
                return Err(RingError::NotExponentiable(format!("exp of a λ^{e} term")));
            }
            _ => rest = &rest + &LambdaScalar::monomial(c.clone(), e, l),
        }
    }
    Ok((constant, log_mult, rest))
}

/// Minimal algebra interface for the truncated exponential.
pub(crate) trait TruncatedAlgebra: Clone {
    fn unit_like(&self) -> Self;
    fn times(&self, other: &Self) -> Self;
    fn plus(&self, other: &Self) -> Self;
    fn scaled(&self, c: &Rational) -> Self;
    fn vanishes(&self) -> bool;
}

impl TruncatedAlgebra for CohElement {
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

/// `exp(x) = Σ x^j/j!` for a topologically nilpotent `x` (the sum must end
/// within `max_terms` terms, otherwise the input was not nilpotent).
pub(crate) fn exp_nilpotent<T: TruncatedAlgebra>(x: &T, max_terms: usize) -> Result<T, RingError> {
    let mut acc = x.unit_like();
    let mut term = x.unit_like();
    for j in 1..=max_terms {
        term = term.times(x).scaled(&Rational::new(1.into(), (j as i64).into()));
        if term.vanishes() {
            return Ok(acc);
        }
        acc = acc.plus(&term);
    }
    Err(RingError::NotExponentiable(format!("series did not terminate after {max_terms} terms")))
}

/// `exp` of a class whose `P⁰` part is `c·log λ + (λ^{<0} terms)`: the log part
/// becomes `λ^c`, the rest is nilpotent.
pub fn exp_formal(x: &CohElement) -> Result<CohElement, RingError> {
    let ring = x.ring();
    let (constant, log_mult, rest0) = split_log_part(x.component(0))?;
    if !constant.is_zero() {
        return Err(RingError::NotExponentiable("nonzero rational constant term".into()));
    }
    let mut comps = x.components().to_vec();
    comps[0] = rest0;
    let nilpotent = CohElement::from_components(ring, comps)?;
    let bound = ring.n() + ring.lambda_floor() as usize + 2;
    let e = exp_nilpotent(&nilpotent, bound)?;
    Ok(e.scale(&LambdaScalar::lambda_pow(log_mult)))
}

/// Checks `Π(λ+ρ_i) = exp(ch₀ ln λ + Σ_{k>0} ch_k (−1)^{k−1}(k−1)!/λ^k)` in `H`.
/// Returns whether the identity holds and the residual `lhs − rhs`.
pub fn euler_expansion_check(bundle: &BundleSpec, ring: RingDescriptor) -> Result<(bool, CohElement), RingError> {
    let n = ring.n() as i64;
    if ring.lambda_floor() < n {
        return Err(RingError::InsufficientTruncation { needed: n, got: ring.lambda_floor() });
    }
    if !bundle.is_equivariant() {
        return Err(RingError::InvalidBundle("the λ-expansion needs an equivariant bundle".into()));
    }
    let rank = bundle.rank() as i64;
    let mut exponent = CohElement::from_scalar(ring, LambdaScalar::log_lambda().scale(&int(rank)));
    for k in 1..ring.n() as u32 {
        let sign = if k % 2 == 1 { 1 } else { -1 };
        let coeff = LambdaScalar::monomial(
            Rational::from_integer(factorial(k as u64 - 1)) * int(sign),
            -(k as i64),
            0,
        );
        exponent = &exponent + &bundle.chern_character(ring, k).scale(&coeff);
    }
    let rhs = exp_formal(&exponent)?;
    let lhs = bundle.euler_class(ring);
    let residual = &lhs - &rhs;
    Ok((residual.is_zero() && !residual.is_truncated(), residual))
}

/// Rational value of an exact integer scalar, for callers that need machine integers.
pub fn scalar_to_i64(s: &LambdaScalar) -> Option<i64> {
    let r = s.as_rational()?;
    if r.is_integer() {
        r.to_integer().to_i64()
    } else {
        None
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ring(n: usize) -> RingDescriptor {
        RingDescriptor::new(n, n as i64).unwrap()
    }

    fn p(r: RingDescriptor, k: usize) -> CohElement {
        CohElement::p_power(r, k)
    }

    #[test]
    fn descriptor_validation() {
        assert!(RingDescriptor::new(1, 0).is_err());
        assert!(RingDescriptor::new(3, -1).is_err());
        assert_eq!(RingDescriptor::new(5, 2).unwrap().min_lambda_exp(), -2);
    }

    #[test]
    fn multiplication_respects_nilpotency() {
        let r = ring(5);
        assert!(coh_mul(&p(r, 2), &p(r, 3)).unwrap().is_zero());
        assert_eq!(coh_mul(&p(r, 1), &p(r, 1)).unwrap(), p(r, 2));
        let a = CohElement::linear(r, LambdaScalar::lambda(), LambdaScalar::integer(5));
        let expected = &p(r, 3).scale(&LambdaScalar::lambda()) + &p(r, 4).scale_rational(&int(5));
        assert_eq!(coh_mul(&a, &p(r, 3)).unwrap(), expected);
    }

    #[test]
    fn mismatched_descriptors_are_rejected() {
        let a = CohElement::one(ring(5));
        let b = CohElement::one(ring(4));
        assert!(matches!(coh_mul(&a, &b), Err(RingError::DescriptorMismatch { .. })));
    }

    #[test]
    fn integration_reads_top_coefficient() {
        let r = ring(5);
        assert_eq!(integrate(&p(r, 4)), LambdaScalar::one());
        assert!(integrate(&p(r, 2)).is_zero());
        let a = &p(r, 4).scale(&LambdaScalar::lambda()) + &p(r, 2).scale_rational(&int(3));
        assert_eq!(integrate(&a), LambdaScalar::lambda());
    }

    #[test]
    fn quintic_twisted_pairing_values() {
        let r = ring(5);
        let e = BundleSpec::new(vec![5], true).unwrap();
        assert_eq!(twisted_pairing(&p(r, 0), &p(r, 3), &e).unwrap(), LambdaScalar::integer(5));
        assert_eq!(twisted_pairing(&p(r, 1), &p(r, 3), &e).unwrap(), LambdaScalar::lambda());
        assert!(twisted_pairing(&p(r, 0), &p(r, 2), &e).unwrap().is_zero());
        // zero bundle gives the Poincaré pairing
        let zero = BundleSpec::zero(true);
        for a in 0..5 {
            for b in 0..5 {
                let v = twisted_pairing(&p(r, a), &p(r, b), &zero).unwrap();
                let expected = if a + b == 4 { LambdaScalar::one() } else { LambdaScalar::zero() };
                assert_eq!(v, expected);
            }
        }
    }

    #[test]
    fn twisted_gram_is_anti_triangular_with_unit_band() {
        let r = ring(5);
        let e = BundleSpec::new(vec![2, 3], true).unwrap();
        let g = twisted_gram(r, &e);
        for a in 0..5 {
            for b in 0..5 {
                if a + b == 4 {
                    assert_eq!(g[a][b], LambdaScalar::lambda_pow(2));
                } else if a + b > 4 {
                    assert!(g[a][b].is_zero());
                }
            }
        }
        assert_eq!(g[0][3], LambdaScalar::monomial(int(5), 1, 0));
    }

    #[test]
    fn euler_expansion_examples() {
        let cases = [(2usize, vec![1u32]), (5, vec![5]), (5, vec![2, 3])];
        for (n, degrees) in cases {
            let e = BundleSpec::new(degrees, true).unwrap();
            let (ok, residual) = euler_expansion_check(&e, ring(n)).unwrap();
            assert!(ok, "n={n}: residual {residual}");
        }
    }

    #[test]
    fn euler_expansion_needs_deep_enough_floor() {
        let e = BundleSpec::new(vec![5], true).unwrap();
        let r = RingDescriptor::new(5, 4).unwrap();
        assert!(matches!(euler_expansion_check(&e, r), Err(RingError::InsufficientTruncation { .. })));
    }

    #[test]
    fn truncation_is_flagged_and_propagates() {
        let floor = -2;
        let a = LambdaScalar::lambda_pow(-2);
        let b = LambdaScalar::lambda_pow(-1);
        let prod = a.mul_truncated(&b, floor);
        assert!(prod.is_zero());
        assert_eq!(prod.known_from(), Some(-2));
        // multiplying by λ^3 lifts the unknown region
        let lifted = prod.mul_exact(&LambdaScalar::lambda_pow(3));
        assert_eq!(lifted.known_from(), Some(1));
        let exact = LambdaScalar::lambda().mul_truncated(&LambdaScalar::lambda_pow(-1), floor);
        assert_eq!(exact, LambdaScalar::one());
    }

    #[test]
    fn agreement_ignores_unknown_region() {
        let a = LambdaScalar::from_terms([((1, 0), int(2)), ((-3, 0), int(7))]).with_known_from(Some(-1));
        let b = LambdaScalar::from_terms([((1, 0), int(2)), ((-2, 0), int(9))]);
        assert!(a.agrees_with(&b));
        let c = LambdaScalar::from_terms([((1, 0), int(3))]);
        assert!(!a.agrees_with(&c));
    }

    #[test]
    fn lambda_plus_inverse_power() {
        let r = RingDescriptor::new(3, 6).unwrap();
        let x = CohElement::p_monomial(r, 1, LambdaScalar::integer(2));
        let inv = lambda_plus_power(&x, -1);
        let prod = &inv * &(&CohElement::from_scalar(r, LambdaScalar::lambda()) + &x);
        assert_eq!(prod, CohElement::one(r));
        assert_eq!(inv.component(2), &LambdaScalar::monomial(int(4), -3, 0));
        assert_eq!(lambda_plus_power(&x, 0), CohElement::one(r));
    }
}
