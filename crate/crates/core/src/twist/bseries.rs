use crate::rational::{int, Rational};
use crate::ring::{lambda_plus_power, CohElement, LambdaScalar, RingDescriptor};
use crate::series::{exp_zpoly, ZPoly};

use super::bernoulli::stirling_weight;
use super::TwistError;

/// Exponent of `b_ρ(z)` for `ρ = l·P`:
/// `(1/z)·[ρ ln λ + Σ_{k≥1} (−1)^{k−1} ρ^{k+1}/(k(k+1)λ^k)] + Σ_m B_{2m}/(2m(2m−1))·(λ+ρ)^{1−2m} z^{2m−1}`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BSeriesExponent {
    ring: RingDescriptor,
    l: u32,
    z_cap: i64,
    one_over_z: CohElement,
    positive: Vec<(i64, CohElement)>,
}

impl BSeriesExponent {
    pub fn ring(&self) -> RingDescriptor {
        self.ring
    }

    pub fn degree(&self) -> u32 {
        self.l
    }

    pub fn z_cap(&self) -> i64 {
        self.z_cap
    }

    /// Coefficient of `z^{-1}`.
    pub fn one_over_z_part(&self) -> &CohElement {
        &self.one_over_z
    }

    /// `(2m−1, coefficient)` pairs for the positive powers of `z`.
    pub fn positive_part(&self) -> &[(i64, CohElement)] {
        &self.positive
    }

    /// The coefficient of `z^{2m−1}`.
    pub fn positive_coeff(&self, z_exp: i64) -> Option<&CohElement> {
        self.positive.iter().find(|(e, _)| *e == z_exp).map(|(_, c)| c)
    }

    /// Lowest `λ`-exponent that is exact in the exponentiated multiplier.
    pub fn exact_floor(&self) -> i64 {
        self.ring.min_lambda_exp().max(-(self.z_cap + 1))
    }

    /// The exponent of `b_ρ(sign·z)` as a Laurent polynomial in `z`.
    pub fn exponent(&self, sign: i64) -> ZPoly {
        assert!(sign == 1 || sign == -1, "sign must be ±1");
        // every power of z in the exponent is odd, so z ↦ −z negates it
        let mut out = ZPoly::monomial(-1, self.one_over_z.clone());
        for (e, c) in &self.positive {
            out.add_term(*e, c.clone());
        }
        out.scale_rational(&int(sign))
    }

    /// `b_ρ(sign·z)` itself.
    pub fn multiplier(&self, sign: i64) -> Result<ZPoly, TwistError> {
        let m = exp_zpoly(&self.exponent(sign))?;
        Ok(m.raise_floor(self.exact_floor()))
    }
}

/// Builds the `b`-series exponent for `ρ = l·P`, keeping `z`-powers up to `z_cap`.
pub fn b_series(l: u32, ring: RingDescriptor, z_cap: i64) -> Result<BSeriesExponent, TwistError> {
    let n = ring.n() as i64;
    if ring.lambda_floor() < n {
        return Err(TwistError::InsufficientTruncation { needed: n, got: ring.lambda_floor() });
    }
    if z_cap < 1 || z_cap % 2 == 0 {
        return Err(TwistError::InvalidZCap(z_cap));
    }
    let rho = CohElement::p_monomial(ring, 1, LambdaScalar::integer(l as i64));
    let mut one_over_z = rho.scale(&LambdaScalar::log_lambda());
    let mut power = &rho * &rho;
    let mut k = 1i64;
    while !power.is_zero() {
        let sign = if k % 2 == 1 { 1 } else { -1 };
        let coeff = LambdaScalar::monomial(int(sign) / int(k * (k + 1)), -k, 0);
        one_over_z = &one_over_z + &power.scale(&coeff);
        power = &power * &rho;
        k += 1;
    }
    let mut positive = Vec::new();
    let mut m = 1u32;
    while 2 * m as i64 - 1 <= z_cap {
        let w: Rational = stirling_weight(m);
        let c = lambda_plus_power(&rho, 1 - 2 * m as i64).scale_rational(&w);
        positive.push((2 * m as i64 - 1, c));
        m += 1;
    }
    Ok(BSeriesExponent { ring, l, z_cap, one_over_z, positive })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::ratio;

    #[test]
    fn first_coefficients() {
        let r = RingDescriptor::new(5, 5).unwrap();
        let b = b_series(5, r, 3).unwrap();
        let z1 = b.positive_coeff(1).unwrap();
        assert_eq!(z1.component(0), &LambdaScalar::monomial(ratio(1, 12), -1, 0));
        // (λ+5P)^{-1}/12 has P-coefficient −5/(12λ²)
        assert_eq!(z1.component(1), &LambdaScalar::monomial(ratio(-5, 12), -2, 0));
        let z3 = b.positive_coeff(3).unwrap();
        assert_eq!(z3.component(0), &LambdaScalar::monomial(ratio(-1, 360), -3, 0));
        assert!(b.positive_coeff(5).is_none());
    }

    #[test]
    fn string_constant_is_absent() {
        let r = RingDescriptor::new(3, 3).unwrap();
        let b = b_series(0, r, 1).unwrap();
        assert!(b.one_over_z_part().is_zero());
    }

    #[test]
    fn floor_checks() {
        let r = RingDescriptor::new(5, 4).unwrap();
        assert!(matches!(b_series(1, r, 3), Err(TwistError::InsufficientTruncation { .. })));
        let r = RingDescriptor::new(5, 5).unwrap();
        assert!(matches!(b_series(1, r, 2), Err(TwistError::InvalidZCap(2))));
    }

    #[test]
    fn multiplier_is_odd() {
        let r = RingDescriptor::new(3, 4).unwrap();
        let b = b_series(2, r, 3).unwrap();
        let prod = &b.multiplier(1).unwrap() * &b.multiplier(-1).unwrap();
        assert!(prod.agrees_with(&ZPoly::one(r)), "{prod}");
    }
}
