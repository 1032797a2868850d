//! Genus-0 data of `CP^{n-1}` in closed form: the reduced J-function, the
//! quantum differential equation `(zD_P)^n J = qJ`, and the fundamental
//! solution built from the frame `(zD_P)^a J`.

use serde_json::{json, Value};
use thiserror::Error;

use crate::rational::{int, ratio};
use crate::ring::{CohElement, LambdaScalar, RingDescriptor};
use crate::series::{directional_derivative, scalar_to_json, series_mul, Convention, SeriesError, ZPoly, ZSeries};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GwError {
    #[error(transparent)]
    Series(#[from] SeriesError),
    #[error("frame is degenerate: its q⁰ z⁰ block is not the identity")]
    FrameDegeneracy,
    #[error("series rank {got} does not match n = {expected}")]
    RankMismatch { expected: usize, got: usize },
}

/// `(P + kz)^{-1} = Σ_{j<n} (−P)^j k^{−1−j} z^{−1−j}` mod `P^n`.
pub fn inverse_linear_factor(ring: RingDescriptor, k: i64) -> ZPoly {
    assert!(k != 0, "(P + 0·z) is not invertible");
    let mut out = ZPoly::zero(ring);
    for j in 0..ring.n() {
        let sign = if j % 2 == 0 { 1 } else { -1 };
        let kj = (0..=j).fold(int(1), |acc, _| acc * int(k));
        let c = CohElement::p_monomial(ring, j, LambdaScalar::constant(int(sign) / kj));
        out.add_term(-1 - j as i64, c);
    }
    out
}

/// `Σ_d q^d / Π_{k=1}^{d}(P + kz)^n`.
pub fn j_reduced(ring: RingDescriptor, max_degree: usize) -> ZSeries {
    let n = ring.n() as i64;
    let mut slices = vec![ZPoly::one(ring)];
    for d in 1..=max_degree {
        let inv = inverse_linear_factor(ring, d as i64);
        let mut slice = slices[d - 1].clone();
        for _ in 0..n {
            slice = &slice * &inv;
        }
        let (lo, hi) = (slice.min_z().unwrap(), slice.max_z().unwrap());
        // homogeneous of degree −nd in (P, z), with P^{<n}
        let d = d as i64;
        assert!(lo >= -n * d - (n - 1) && hi <= -n * d, "slice {d} has z-range [{lo}, {hi}]");
        slices.push(slice);
    }
    ZSeries::from_slices(ring, Convention::Reduced, slices)
}

/// Position of a nonzero coefficient: `(degree, z-exponent, P-exponent)`.
pub type SeriesPosition = (usize, i64, usize);

#[derive(Debug, Clone)]
pub struct QdeReport {
    pub residual: ZSeries,
    pub first_failure: Option<SeriesPosition>,
}

impl QdeReport {
    pub fn passed(&self) -> bool {
        self.first_failure.is_none()
    }
}

pub(crate) fn first_nonzero(s: &ZSeries) -> Option<SeriesPosition> {
    for (d, slice) in s.slices().iter().enumerate() {
        for (e, c) in slice.terms() {
            if let Some(k) = c.components().iter().position(|x| !x.is_zero()) {
                return Some((d, *e, k));
            }
        }
    }
    None
}

/// `(zD_P)^n J − q·J`.
pub fn qde_residual(j: &ZSeries) -> Result<ZSeries, GwError> {
    let ring = j.ring();
    let mut lhs = j.clone();
    for _ in 0..ring.n() {
        lhs = directional_derivative(&lhs)?;
    }
    let q = ZSeries::monomial(ring, j.max_degree(), j.convention(), 1, ZPoly::one(ring));
    Ok(lhs.try_sub(&series_mul(&q, j)?)?)
}

pub fn qde_verify(j: &ZSeries, n: usize) -> Result<QdeReport, GwError> {
    if j.ring().n() != n {
        return Err(GwError::RankMismatch { expected: n, got: j.ring().n() });
    }
    let residual = qde_residual(j)?;
    let first_failure = first_nonzero(&residual);
    Ok(QdeReport { residual, first_failure })
}

/// Fundamental solution: column `a` is `(zD_P)^a J`, entry `(b, a)` its `P^b` coordinate.
#[derive(Debug, Clone)]
pub struct SMatrix {
    columns: Vec<ZSeries>,
}

impl SMatrix {
    pub fn n(&self) -> usize {
        self.columns.len()
    }

    pub fn column(&self, a: usize) -> &ZSeries {
        &self.columns[a]
    }

    /// Entry `(b, a)` at Novikov degree `d` and `z`-exponent `e`.
    pub fn entry(&self, b: usize, a: usize, d: usize, e: i64) -> LambdaScalar {
        self.columns[a].slice(d).coeff(e).component(b).clone()
    }

    /// Largest `z`-exponent carried by any `q^{>0}` entry.
    pub fn max_z_beyond_q0(&self) -> Option<i64> {
        self.columns
            .iter()
            .flat_map(|c| c.slices()[1..].iter().filter_map(ZPoly::max_z))
            .max()
    }

    pub fn to_json(&self) -> Value {
        let n = self.n();
        let dmax = self.columns[0].max_degree();
        let mut rows = Vec::new();
        for b in 0..n {
            let mut row = Vec::new();
            for a in 0..n {
                let mut slices = serde_json::Map::new();
                for d in 0..=dmax {
                    let mut zmap = serde_json::Map::new();
                    for (e, c) in self.columns[a].slice(d).terms() {
                        let s = c.component(b);
                        if !s.is_zero() {
                            zmap.insert(e.to_string(), scalar_to_json(s));
                        }
                    }
                    slices.insert(d.to_string(), Value::Object(zmap));
                }
                row.push(Value::Object(slices));
            }
            rows.push(Value::Array(row));
        }
        json!({ "n": n, "max_degree": dmax, "entries": rows })
    }
}

#[derive(Debug, Clone)]
pub struct UnitarityReport {
    /// `residual[a][a']` as a degree-indexed `z`-Laurent series of scalars.
    pub residual: Vec<Vec<ZSeries>>,
    pub first_failure: Option<(usize, usize, SeriesPosition)>,
}

impl UnitarityReport {
    pub fn passed(&self) -> bool {
        self.first_failure.is_none()
    }
}

/// Builds the frame and checks `T^t(−z)·g·T(z) = g` for the anti-diagonal Poincaré Gram
/// matrix `g` (which is its own inverse), through Novikov degree `max_degree`.
pub fn s_matrix(j: &ZSeries, n: usize, max_degree: usize) -> Result<(SMatrix, UnitarityReport), GwError> {
    if j.ring().n() != n {
        return Err(GwError::RankMismatch { expected: n, got: j.ring().n() });
    }
    let ring = j.ring();
    let j = j.truncate_degree(max_degree);
    let mut columns = vec![j.clone()];
    for a in 1..n {
        columns.push(directional_derivative(&columns[a - 1])?);
    }
    for (a, col) in columns.iter().enumerate() {
        let base = col.slice(0);
        if base != &ZPoly::constant(CohElement::p_power(ring, a)) {
            return Err(GwError::FrameDegeneracy);
        }
    }
    let flipped: Vec<ZSeries> = columns.iter().map(ZSeries::flip_z).collect();
    let mut residual = Vec::with_capacity(n);
    let mut first_failure = None;
    for a in 0..n {
        let mut row = Vec::with_capacity(n);
        for b in 0..n {
            // Σ_{c+c'=n−1} T_{c,a}(−z)·T_{c',b}(z) is the Poincaré pairing of the two columns.
            let prod = series_mul(&flipped[a], &columns[b])?;
            let paired = prod.map_slices(|_, s| {
                let mut out = ZPoly::zero(ring);
                for (e, c) in s.terms() {
                    out.add_term(*e, CohElement::from_scalar(ring, c.component(n - 1).clone()));
                }
                out
            });
            let target = if a + b == n - 1 { int(1) } else { int(0) };
            let gram = ZSeries::one(ring, max_degree, Convention::Reduced).scale_rational(&target);
            let r = paired.try_sub(&gram)?;
            if first_failure.is_none() {
                if let Some(pos) = first_nonzero(&r) {
                    first_failure = Some((a, b, pos));
                }
            }
            row.push(r);
        }
        residual.push(row);
    }
    Ok((SMatrix { columns }, UnitarityReport { residual, first_failure }))
}

/// Hand expansion used by tests: `(P + z)^{-2}` mod `P²`.
pub fn cp1_degree_one_slice(ring: RingDescriptor) -> ZPoly {
    &ZPoly::monomial(-2, CohElement::one(ring))
        + &ZPoly::monomial(-3, CohElement::p_monomial(ring, 1, LambdaScalar::constant(ratio(-2, 1))))
}
