use num_bigint::BigInt;
use num_traits::Zero;

use crate::rational::{int, ratio, Rational};

use super::birkhoff::MirrorResult;
use super::MirrorError;

#[derive(Clone, Debug)]
pub struct InstantonReport {
    /// `n_1, …, n_{d_max}`.
    pub numbers: Vec<BigInt>,
    /// Per degree, the `P³` slot minus its prediction from the `P²` slot.
    pub p3_residuals: Vec<Rational>,
}

impl InstantonReport {
    pub fn consistent(&self) -> bool {
        self.p3_residuals.iter().all(Zero::is_zero)
    }
}

/// Reads `n_d` off the factored quintic series: modulo `P⁴`,
/// `Y_m = (P²/5) Σ_{d|m} n_d d³ · m^{-2}(z^{-2} − 2P m^{-1} z^{-3})`.
pub fn extract_instantons(result: &MirrorResult, d_max: usize) -> Result<InstantonReport, MirrorError> {
    let y = result.j_out.as_ref().ok_or(MirrorError::MissingChart)?;
    if y.ring().n() != 5 {
        return Err(MirrorError::NotQuintic);
    }
    if d_max > y.max_degree() {
        return Err(MirrorError::DegreeMismatch(d_max, y.max_degree()));
    }
    let read = |m: usize, e: i64, k: usize| -> Result<Rational, MirrorError> {
        y.slice(m)
            .coeff(e)
            .component(k)
            .as_rational()
            .ok_or(MirrorError::NotNonEquivariant)
    };
    let mut numbers: Vec<BigInt> = Vec::with_capacity(d_max);
    let mut p3_residuals = Vec::with_capacity(d_max);
    for m in 1..=d_max {
        let mi = m as i64;
        let total = read(m, -2, 2)? * int(5 * mi * mi);
        let mut rest = total.clone();
        for d in (1..m).filter(|d| m % d == 0) {
            rest -= Rational::from_integer(&numbers[d - 1] * BigInt::from(d * d * d));
        }
        let nd = rest / int(mi * mi * mi);
        if !nd.is_integer() {
            return Err(MirrorError::NonIntegral { degree: m, value: nd.to_string() });
        }
        let predicted = ratio(-2, 5) * &total / int(mi * mi * mi);
        p3_residuals.push(read(m, -3, 3)? - predicted);
        numbers.push(nd.to_integer());
    }
    let report = InstantonReport { numbers, p3_residuals };
    if !report.consistent() {
        let degree = report.p3_residuals.iter().position(|r| !r.is_zero()).unwrap() + 1;
        return Err(MirrorError::Consistency { degree });
    }
    Ok(report)
}
