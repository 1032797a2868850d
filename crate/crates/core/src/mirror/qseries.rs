use std::fmt;

use num_traits::{One, Zero};

use crate::rational::{int, Rational};
use crate::ring::LambdaScalar;
use crate::series::{scalar_to_json, ZPoly, ZSeries};

use super::MirrorError;

/// Truncated scalar power series `Σ_{d ≤ D} a_d q^d`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QSeries {
    coeffs: Vec<LambdaScalar>,
}

impl QSeries {
    pub fn zero(max_degree: usize) -> Self {
        Self { coeffs: vec![LambdaScalar::zero(); max_degree + 1] }
    }

    pub fn one(max_degree: usize) -> Self {
        Self::constant(max_degree, LambdaScalar::one())
    }

    pub fn constant(max_degree: usize, c: LambdaScalar) -> Self {
        let mut out = Self::zero(max_degree);
        out.coeffs[0] = c;
        out
    }

    /// `c·q^d`.
    pub fn monomial(max_degree: usize, d: usize, c: LambdaScalar) -> Self {
        let mut out = Self::zero(max_degree);
        if d <= max_degree {
            out.coeffs[d] = c;
        }
        out
    }

    pub fn from_coeffs(coeffs: Vec<LambdaScalar>) -> Self {
        assert!(!coeffs.is_empty());
        Self { coeffs }
    }

    pub fn from_rationals(coeffs: impl IntoIterator<Item = Rational>) -> Self {
        Self::from_coeffs(coeffs.into_iter().map(LambdaScalar::constant).collect())
    }

    pub fn max_degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeff(&self, d: usize) -> &LambdaScalar {
        &self.coeffs[d]
    }

    pub fn coeffs(&self) -> &[LambdaScalar] {
        &self.coeffs
    }

    pub fn set_coeff(&mut self, d: usize, c: LambdaScalar) {
        self.coeffs[d] = c;
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(LambdaScalar::is_zero)
    }

    /// The coefficient as a plain rational, if it is one.
    pub fn rational_coeff(&self, d: usize) -> Option<Rational> {
        self.coeffs[d].as_rational()
    }

    pub fn add(&self, other: &Self) -> Self {
        self.check(other);
        Self { coeffs: self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| a + b).collect() }
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.check(other);
        Self { coeffs: self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| a - b).collect() }
    }

    pub fn mul(&self, other: &Self) -> Self {
        self.check(other);
        let dmax = self.max_degree();
        let mut out = Self::zero(dmax);
        for (a, x) in self.coeffs.iter().enumerate() {
            if x.is_exact_zero() {
                continue;
            }
            for (b, y) in other.coeffs.iter().enumerate().take(dmax + 1 - a) {
                out.coeffs[a + b] = &out.coeffs[a + b] + &(x * y);
            }
        }
        out
    }

    pub fn scale(&self, c: &LambdaScalar) -> Self {
        Self { coeffs: self.coeffs.iter().map(|x| x * c).collect() }
    }

    pub fn scale_rational(&self, c: &Rational) -> Self {
        Self { coeffs: self.coeffs.iter().map(|x| x.scale(c)).collect() }
    }

    /// `1/f` for `f(0)` a nonzero rational.
    pub fn inverse(&self) -> Result<Self, MirrorError> {
        let c0 = self.coeffs[0]
            .as_rational()
            .filter(|c| !c.is_zero())
            .ok_or(MirrorError::NotAUnit)?;
        let inv0 = LambdaScalar::constant(Rational::one() / c0);
        let dmax = self.max_degree();
        let mut out = Self::zero(dmax);
        out.coeffs[0] = inv0.clone();
        for d in 1..=dmax {
            let mut s = LambdaScalar::zero();
            for e in 1..=d {
                s = &s + &(&self.coeffs[e] * &out.coeffs[d - e]);
            }
            out.coeffs[d] = -&(&s * &inv0);
        }
        Ok(out)
    }

    /// `exp(f)` for `f(0) = 0`.
    pub fn exp(&self) -> Result<Self, MirrorError> {
        if !self.coeffs[0].is_zero() {
            return Err(MirrorError::NotNilpotent);
        }
        let dmax = self.max_degree();
        let mut acc = Self::one(dmax);
        let mut term = Self::one(dmax);
        for j in 1..=dmax {
            term = term.mul(self).scale_rational(&(Rational::one() / int(j as i64)));
            acc = acc.add(&term);
        }
        Ok(acc)
    }

    /// `f(φ(q))` for `φ(0) = 0`.
    pub fn compose(&self, phi: &Self) -> Result<Self, MirrorError> {
        self.check(phi);
        if !phi.coeffs[0].is_zero() {
            return Err(MirrorError::NotNilpotent);
        }
        let dmax = self.max_degree();
        let mut out = Self::zero(dmax);
        let mut power = Self::one(dmax);
        for d in 0..=dmax {
            out = out.add(&power.scale(&self.coeffs[d]));
            power = power.mul(phi);
        }
        Ok(out)
    }

    /// `q·f(q)`, truncated.
    pub fn times_q(&self) -> Self {
        let mut coeffs = vec![LambdaScalar::zero()];
        coeffs.extend(self.coeffs[..self.max_degree()].iter().cloned());
        Self { coeffs }
    }

    pub fn identity(max_degree: usize) -> Self {
        Self::monomial(max_degree, 1, LambdaScalar::one())
    }

    pub fn lambda_limit(&self) -> Self {
        Self { coeffs: self.coeffs.iter().map(LambdaScalar::lambda_limit).collect() }
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::Value::Array(self.coeffs.iter().map(scalar_to_json).collect())
    }

    fn check(&self, other: &Self) {
        assert_eq!(self.max_degree(), other.max_degree(), "q-series truncation mismatch");
    }
}

impl fmt::Display for QSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (d, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            write!(f, "({c})·q^{d}")?;
        }
        if first {
            write!(f, "0")?;
        }
        Ok(())
    }
}

/// Solves `q' = q·e^{h(q)}` for `q = φ(q')`, by the fixed point `φ = q'·e^{−h(φ)}`.
pub fn invert_series(h: &QSeries) -> Result<QSeries, MirrorError> {
    if !h.coeff(0).is_zero() {
        return Err(MirrorError::NotNilpotent);
    }
    let dmax = h.max_degree();
    let id = QSeries::identity(dmax);
    let mut phi = id.clone();
    // each pass fixes one more coefficient
    for _ in 0..dmax {
        let e = h.compose(&phi)?.scale_rational(&int(-1)).exp()?;
        phi = id.mul(&e);
    }
    Ok(phi)
}

/// `φ(q)·e^{h(φ(q))} − q`; zero when `φ` inverts `q ↦ q·e^{h(q)}`.
pub fn inversion_residual(h: &QSeries, phi: &QSeries) -> Result<QSeries, MirrorError> {
    let back = phi.mul(&h.compose(phi)?.exp()?);
    Ok(back.sub(&QSeries::identity(h.max_degree())))
}

/// `Σ_d φ(q)^d · slice_d`.
pub fn substitute(series: &ZSeries, phi: &QSeries) -> Result<ZSeries, MirrorError> {
    let dmax = series.max_degree();
    if phi.max_degree() != dmax {
        return Err(MirrorError::DegreeMismatch(phi.max_degree(), dmax));
    }
    if !phi.coeff(0).is_zero() {
        return Err(MirrorError::NotNilpotent);
    }
    let ring = series.ring();
    let mut slices = vec![ZPoly::zero(ring); dmax + 1];
    let mut power = QSeries::one(dmax);
    for d in 0..=dmax {
        for (e, c) in power.coeffs.iter().enumerate() {
            if !c.is_zero() {
                slices[e] = &slices[e] + &series.slice(d).scale(c);
            }
        }
        power = power.mul(phi);
    }
    Ok(ZSeries::from_slices(ring, series.convention(), slices))
}

/// Multiplies slice `d` of a series by the scalar series `f`.
pub fn scale_by_qseries(series: &ZSeries, f: &QSeries) -> ZSeries {
    let dmax = series.max_degree();
    let ring = series.ring();
    let mut slices = vec![ZPoly::zero(ring); dmax + 1];
    for a in 0..=dmax {
        for b in 0..=dmax - a {
            if !f.coeff(a).is_zero() {
                slices[a + b] = &slices[a + b] + &series.slice(b).scale(f.coeff(a));
            }
        }
    }
    ZSeries::from_slices(ring, series.convention(), slices)
}
