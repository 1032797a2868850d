//! Stirling-series oracle derived from the difference equation of `ln Γ`,
//! without Bernoulli numbers.

use num_traits::Zero;

use crate::rational::{binomial, int, Rational};
use crate::ring::{LambdaScalar, RingDescriptor};

use super::bseries::b_series;
use super::TwistError;

/// `r_1, …, r_kmax` with `ln Γ(x) − [(x−½)ln x − x + ½ ln 2π] ∼ Σ_k r_k x^{−k}`.
///
/// Writing `u = 1/x`, the remainder `R` satisfies
/// `R(x+1) − R(x) = 1 − (x+½) ln(1+u) = −Σ_j (−1)^j u^j (1/(j+1) − 1/(2j))`,
/// which is triangular in the `r_k`.
pub fn stirling_remainder(kmax: usize) -> Vec<Rational> {
    let rhs = |s: i64| -> Rational {
        let sign = if s % 2 == 0 { int(-1) } else { int(1) };
        sign * (Rational::new(1.into(), (s + 1).into()) - Rational::new(1.into(), (2 * s).into()))
    };
    let mut r: Vec<Rational> = Vec::with_capacity(kmax);
    for k in 1..=kmax as i64 {
        // coefficient of u^{k+1}: −k r_k + Σ_{k'<k} r_{k'} binom(−k', k+1−k') = rhs_{k+1}
        let known = (1..k).fold(Rational::zero(), |acc, kp| {
            acc + &r[kp as usize - 1] * binomial(-kp, (k + 1 - kp) as u64)
        });
        r.push((known - rhs(k + 1)) / int(k));
    }
    r
}

#[derive(Debug, Clone)]
pub struct StirlingReport {
    /// `(m, b-series coefficient, oracle coefficient)`.
    pub compared: Vec<(u32, Rational, Rational)>,
    pub first_mismatch: Option<u32>,
}

impl StirlingReport {
    pub fn passed(&self) -> bool {
        self.first_mismatch.is_none() && !self.compared.is_empty()
    }
}

/// Compares the scalar (`ρ = 0`) positive-`z` coefficients of the `b`-series with
/// the oracle, for every `z^{2m−1}` up to `z_cap`.
pub fn stirling_check(z_cap: i64) -> Result<StirlingReport, TwistError> {
    if z_cap < 1 || z_cap % 2 == 0 {
        return Err(TwistError::InvalidZCap(z_cap));
    }
    let ring = RingDescriptor::new(2, z_cap.max(2))?;
    let b = b_series(0, ring, z_cap)?;
    let oracle = stirling_remainder(z_cap as usize);
    let mut compared = Vec::new();
    let mut first_mismatch = None;
    for (e, c) in b.positive_part() {
        let m = ((e + 1) / 2) as u32;
        let scalar: &LambdaScalar = c.component(0);
        let ours = scalar.coeff(-e, 0);
        let theirs = oracle[*e as usize - 1].clone();
        // (λ+ρ)^{1−2m} at ρ = 0 is the single monomial λ^{1−2m}
        let clean = scalar.terms().count() <= 1;
        if (ours != theirs || !clean) && first_mismatch.is_none() {
            first_mismatch = Some(m);
        }
        compared.push((m, ours, theirs));
    }
    Ok(StirlingReport { compared, first_mismatch })
}
