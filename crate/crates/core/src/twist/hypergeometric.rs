use crate::gw::first_nonzero;
use crate::rational::int;
use crate::ring::{BundleSpec, CohElement, RingDescriptor};
use crate::series::{Convention, SeriesError, ZPoly, ZSeries};

use super::TwistError;

/// `s·(λ + ρ) + k·z` with `s = ±1` in front of `λ + ρ`.
fn linear_factor(ring: RingDescriptor, bundle: &BundleSpec, i: usize, sign: i64, k: i64) -> ZPoly {
    let base = &CohElement::from_scalar(ring, bundle.lambda()) + &bundle.root(ring, i);
    ZPoly::linear(base.scale_rational(&int(sign)), CohElement::constant(ring, int(k)))
}

fn product(ring: RingDescriptor, bundle: &BundleSpec, i: usize, sign: i64, ks: impl Iterator<Item = i64>) -> ZPoly {
    ks.fold(ZPoly::one(ring), |acc, k| &acc * &linear_factor(ring, bundle, i, sign, k))
}

/// `Π_{k=1}^{m} (λ + ρ_i + kz)`.
pub(crate) fn hypergeometric_factor(ring: RingDescriptor, bundle: &BundleSpec, i: usize, m: i64) -> ZPoly {
    product(ring, bundle, i, 1, 1..=m)
}

fn check_reduced(j: &ZSeries) -> Result<(), TwistError> {
    if j.convention() != Convention::Reduced {
        return Err(SeriesError::WrongConvention { expected: Convention::Reduced, got: j.convention() }.into());
    }
    Ok(())
}

/// Multiplies slice `d` by `Π_i Π_{k=1}^{l_i d} (λ + l_i P + kz)`.
pub fn i_function(j: &ZSeries, bundle: &BundleSpec) -> Result<ZSeries, TwistError> {
    check_reduced(j)?;
    let ring = j.ring();
    Ok(j.map_slices(|d, s| {
        (0..bundle.rank()).fold(s.clone(), |acc, i| {
            let m = bundle.degrees()[i] as i64 * d as i64;
            &acc * &hypergeometric_factor(ring, bundle, i, m)
        })
    }))
}

#[derive(Debug, Clone)]
pub struct SerreReport {
    /// `(summand i, degree d, residual)`.
    pub residuals: Vec<(usize, usize, ZPoly)>,
    pub first_failure: Option<(usize, usize)>,
}

impl SerreReport {
    pub fn passed(&self) -> bool {
        self.first_failure.is_none()
    }
}

/// The dual modification: slice `d` times `(−1)^{Σ l_i d} Π_i Π_{k=−l_i d+1}^{0} (−λ − ρ_i + kz)`.
/// The report holds, per summand and degree, the residual of
/// `Π_{k=−m+1}^{0}(−λ−ρ+kz) = (−1)^m Π_{k=0}^{m−1}(λ+ρ+kz)`.
pub fn serre_dual_i(j: &ZSeries, bundle: &BundleSpec) -> Result<(ZSeries, SerreReport), TwistError> {
    check_reduced(j)?;
    let ring = j.ring();
    let mut residuals = Vec::new();
    let mut first_failure = None;
    let mut slices = Vec::with_capacity(j.max_degree() + 1);
    for (d, s) in j.slices().iter().enumerate() {
        let mut slice = s.clone();
        let mut novikov_sign = 1i64;
        for i in 0..bundle.rank() {
            let m = bundle.degrees()[i] as i64 * d as i64;
            let dual = product(ring, bundle, i, -1, -m + 1..=0);
            let direct = product(ring, bundle, i, 1, 0..m);
            let sign = if m % 2 == 0 { 1 } else { -1 };
            let residual = &dual - &direct.scale_rational(&int(sign));
            if !residual.is_zero() && first_failure.is_none() {
                first_failure = Some((i, d));
            }
            residuals.push((i, d, residual));
            slice = &slice * &dual;
            novikov_sign *= sign;
        }
        slices.push(slice.scale_rational(&int(novikov_sign)));
    }
    Ok((ZSeries::from_slices(ring, Convention::Reduced, slices), SerreReport { residuals, first_failure }))
}

/// `(λ ↦ 0)` applied coefficient-wise; compares an equivariant series with a
/// non-equivariant one. Returns the first differing position.
pub fn lambda_limit_mismatch(equivariant: &ZSeries, plain: &ZSeries) -> Result<Option<(usize, i64, usize)>, TwistError> {
    let diff = equivariant.lambda_limit().try_sub(plain)?;
    Ok(first_nonzero(&diff))
}
