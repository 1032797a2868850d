//! The `b`-series as a multiplier on `H((z))`, and its compatibility with the
//! hypergeometric factors: with `B(y) = exp([y ln y − y]/z + ½ ln y + Σ_s c_s z^{2s−1} y^{1−2s})`,
//! `B(y + mz) = B(y)·Π_{k=1}^{m}(y + kz)`, so for `y_i = λ + ρ_i`, `m_i = l_i d`,
//!
//! `I_d · Π_i √(1+ρ_i/λ)·b_{ρ_i}(z) = J_d · Π_i λ^{m_i}·exp(Ẽ(ρ_i + m_i z))`,
//!
//! where `Ẽ(x) = [x ln λ + Σ_k (−1)^{k−1} x^{k+1}/(k(k+1)λ^k)]/z + ½ ln(1+x/λ) + Σ_s c_s z^{2s−1}(λ+x)^{1−2s}`.

use crate::gw::SeriesPosition;
use crate::rational::{binomial, int, Rational};
use crate::ring::{BundleSpec, CohElement, LambdaScalar, RingDescriptor};
use crate::series::{exp_zpoly, ZPoly, ZSeries};

use super::bernoulli::stirling_weight;
use super::bseries::b_series;
use super::hypergeometric::hypergeometric_factor;
use super::TwistError;

fn require_equivariant(bundle: &BundleSpec) -> Result<(), TwistError> {
    if bundle.rank() > 0 && !bundle.is_equivariant() {
        return Err(TwistError::NotEquivariant);
    }
    Ok(())
}

fn odd_at_least(k: i64) -> i64 {
    if k % 2 == 0 {
        k + 1
    } else {
        k.max(1)
    }
}

/// `Π_i b_{ρ_i}(sign·z)` as a single exponential.
pub fn cone_multiplier(ring: RingDescriptor, bundle: &BundleSpec, sign: i64, z_cap: i64) -> Result<ZPoly, TwistError> {
    require_equivariant(bundle)?;
    let mut exponent = ZPoly::zero(ring);
    let mut floor = i64::MIN;
    for &l in bundle.degrees() {
        let b = b_series(l, ring, z_cap)?;
        exponent = &exponent + &b.exponent(sign);
        floor = floor.max(b.exact_floor());
    }
    if bundle.rank() == 0 {
        return Ok(ZPoly::one(ring));
    }
    Ok(exp_zpoly(&exponent)?.raise_floor(floor))
}

/// Multiplies `f` by `Π_i b_{ρ_i}(sign·z)`; `z_cap` defaults to `2D + 1`.
pub fn cone_transform(f: &ZSeries, bundle: &BundleSpec, sign: i64, z_cap: Option<i64>) -> Result<ZSeries, TwistError> {
    if sign != 1 && sign != -1 {
        return Err(TwistError::InvalidSign(sign));
    }
    if bundle.rank() == 0 {
        return Ok(f.clone());
    }
    let z_cap = z_cap.unwrap_or(2 * f.max_degree() as i64 + 1);
    let m = cone_multiplier(f.ring(), bundle, sign, z_cap)?;
    Ok(f.mul_zpoly(&m))
}

/// `(1 + ρ/λ)^{1/2}`.
fn sqrt_factor(ring: RingDescriptor, rho: &CohElement) -> CohElement {
    let ratio = rho.scale(&LambdaScalar::lambda_pow(-1));
    let mut acc = CohElement::zero(ring);
    let mut power = CohElement::one(ring);
    let mut c = int(1);
    let mut j = 0i64;
    while !power.is_zero() {
        acc = &acc + &power.scale_rational(&c);
        c = c * (Rational::new(1.into(), 2.into()) - int(j)) / int(j + 1);
        power = &power * &ratio;
        j += 1;
    }
    acc
}

/// `Ẽ(ρ + m z)` without its `m ln λ` part, kept down to `λ^{-floor}`.
fn shifted_exponent(ring: RingDescriptor, rho: &CohElement, m: i64, z_cap: i64) -> ZPoly {
    let floor = ring.lambda_floor();
    let x = ZPoly::linear(rho.clone(), CohElement::constant(ring, int(m)));
    let inv_lambda = |k: i64| LambdaScalar::lambda_pow(-k);
    let mut out = ZPoly::monomial(-1, rho.scale(&LambdaScalar::log_lambda()));
    let mut powers = vec![ZPoly::one(ring), x.clone()];
    for k in 2..=floor + 1 {
        let next = &powers[k as usize - 1] * &x;
        powers.push(next);
    }
    for k in 1..=floor {
        let sign = if k % 2 == 1 { 1 } else { -1 };
        let c = int(sign) / int(k * (k + 1));
        out = &out + &powers[k as usize + 1].scale(&inv_lambda(k)).scale_rational(&c).shift_z(-1);
    }
    for j in 1..=floor {
        let sign = if j % 2 == 1 { 1 } else { -1 };
        let c = int(sign) / int(2 * j);
        out = &out + &powers[j as usize].scale(&inv_lambda(j)).scale_rational(&c);
    }
    let mut s = 1i64;
    while 2 * s - 1 <= z_cap && 2 * s - 1 <= floor {
        let a = 1 - 2 * s;
        let w = stirling_weight(s as u32);
        let mut i = 0i64;
        while a - i >= -floor {
            let c = binomial(a, i as u64) * &w;
            let term = powers[i as usize].scale(&inv_lambda(i - a)).scale_rational(&c).shift_z(2 * s - 1);
            out = &out + &term;
            i += 1;
        }
        s += 1;
    }
    out.raise_floor(-floor)
}

#[derive(Debug, Clone)]
pub struct GammaDegreeReport {
    pub degree: usize,
    pub working_floor: i64,
    /// Lowest `λ`-exponent at which both sides are known.
    pub certified_from: i64,
    pub passed: bool,
}

#[derive(Debug, Clone)]
pub struct GammaReport {
    pub degrees: Vec<GammaDegreeReport>,
    pub first_failure: Option<SeriesPosition>,
}

impl GammaReport {
    pub fn passed(&self) -> bool {
        self.first_failure.is_none() && self.degrees.iter().all(|d| d.passed)
    }
}

/// Checks the identity in the module docs slice by slice, certified down to `λ^{-lambda_floor}`.
pub fn gamma_identity_check(j: &ZSeries, bundle: &BundleSpec, lambda_floor: i64) -> Result<GammaReport, TwistError> {
    require_equivariant(bundle)?;
    let mut degrees = Vec::new();
    let mut first_failure = None;
    for d in 0..=j.max_degree() {
        let ms: Vec<i64> = bundle.degrees().iter().map(|&l| l as i64 * d as i64).collect();
        let (report, bad) = slice_check(j, d, bundle, &ms, &ms, lambda_floor)?;
        if !report.passed && first_failure.is_none() {
            first_failure = Some(bad.unwrap_or((d, 0, 0)));
        }
        degrees.push(report);
    }
    Ok(GammaReport { degrees, first_failure })
}

/// One slice: hypergeometric factors of length `factor_ms`, shifts `shift_ms` on the other side.
fn slice_check(
    j: &ZSeries,
    d: usize,
    bundle: &BundleSpec,
    factor_ms: &[i64],
    shift_ms: &[i64],
    lambda_floor: i64,
) -> Result<(GammaDegreeReport, Option<SeriesPosition>), TwistError> {
    let n = j.ring().n() as i64;
    let reach = factor_ms.iter().sum::<i64>().max(shift_ms.iter().sum::<i64>());
    let working = (lambda_floor + reach).max(n);
    let ring = RingDescriptor::with_log_cap(j.ring().n(), working, j.ring().log_degree_cap())?;
    let z_cap = odd_at_least(working);
    let jd = j.slice(d).with_ring(ring);
    let mut lhs = jd.clone();
    let mut rhs = jd;
    let mut multiplier = ZPoly::one(ring);
    for i in 0..bundle.rank() {
        let rho = bundle.root(ring, i);
        lhs = &lhs * &hypergeometric_factor(ring, bundle, i, factor_ms[i]);
        let b = b_series(bundle.degrees()[i], ring, z_cap)?.multiplier(1)?;
        multiplier = &multiplier * &b.mul_coh(&sqrt_factor(ring, &rho));
        let e = exp_zpoly(&shifted_exponent(ring, &rho, shift_ms[i], z_cap))?;
        rhs = &rhs * &e.scale(&LambdaScalar::lambda_pow(shift_ms[i]));
    }
    lhs = &lhs * &multiplier;
    let diff = &lhs - &rhs;
    let certified = [&lhs, &rhs, &diff]
        .iter()
        .flat_map(|side| side.terms().flat_map(|(_, c)| c.components().iter().filter_map(LambdaScalar::known_from)))
        .max()
        .unwrap_or(i64::MIN);
    let bad = diff.terms().find_map(|(e, c)| c.components().iter().position(|s| !s.is_zero()).map(|k| (d, *e, k)));
    let passed = bad.is_none() && certified <= -lambda_floor;
    let report = GammaDegreeReport { degree: d, working_floor: working, certified_from: certified, passed };
    Ok((report, bad))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gw::j_reduced;

    #[test]
    fn empty_bundle_is_identity() {
        let r = RingDescriptor::new(3, 3).unwrap();
        let j = j_reduced(r, 2);
        assert_eq!(cone_transform(&j, &BundleSpec::zero(true), 1, None).unwrap(), j);
    }

    #[test]
    fn transform_and_inverse() {
        let r = RingDescriptor::new(3, 4).unwrap();
        let j = j_reduced(r, 2);
        let e = BundleSpec::new(vec![2], true).unwrap();
        let there = cone_transform(&j, &e, 1, None).unwrap();
        let back = cone_transform(&there, &e, -1, None).unwrap();
        assert!(back.agrees_with(&j));
        assert!(!there.agrees_with(&j));
    }

    #[test]
    fn non_equivariant_bundle_rejected() {
        let r = RingDescriptor::new(3, 3).unwrap();
        let j = j_reduced(r, 1);
        let e = BundleSpec::new(vec![2], false).unwrap();
        assert!(matches!(cone_transform(&j, &e, 1, None), Err(TwistError::NotEquivariant)));
    }

    #[test]
    fn gamma_identity_small() {
        let r = RingDescriptor::new(3, 0).unwrap();
        let j = j_reduced(r, 2);
        let e = BundleSpec::new(vec![1], true).unwrap();
        let report = gamma_identity_check(&j, &e, 2).unwrap();
        assert!(report.passed(), "{report:?}");
    }

    #[test]
    fn gamma_identity_detects_wrong_shift() {
        let r = RingDescriptor::new(2, 0).unwrap();
        let e = BundleSpec::new(vec![1], true).unwrap();
        let j = j_reduced(r, 1);
        let (ok, _) = slice_check(&j, 1, &e, &[1], &[1], 1).unwrap();
        assert!(ok.passed);
        let (bad, at) = slice_check(&j, 1, &e, &[1], &[2], 1).unwrap();
        assert!(!bad.passed);
        assert!(at.is_some());
    }
}
