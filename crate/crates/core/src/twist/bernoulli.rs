use num_traits::Zero;

use crate::rational::{binomial, factorial, int, Rational};

/// Bernoulli numbers with `B_1 = −1/2`, i.e. `x/(e^x − 1) = Σ B_k x^k/k!`.
pub fn bernoulli(k: u32) -> Rational {
    bernoulli_table(k).pop().expect("table is never empty")
}

/// `B_0, …, B_k`.
pub fn bernoulli_table(k: u32) -> Vec<Rational> {
    let mut b: Vec<Rational> = Vec::with_capacity(k as usize + 1);
    for m in 0..=k {
        if m == 0 {
            b.push(int(1));
            continue;
        }
        if m > 1 && m % 2 == 1 {
            b.push(Rational::zero());
            continue;
        }
        let s = (0..m).fold(Rational::zero(), |acc, j| acc + binomial(m as i64 + 1, j as u64) * &b[j as usize]);
        b.push(-s / int(m as i64 + 1));
    }
    b
}

/// Coefficients of `ψ/(e^ψ − 1) = Σ_r B_r ψ^r / r!` up to `ψ^order`.
pub fn todd_series(order: u32) -> Vec<Rational> {
    bernoulli_table(order)
        .into_iter()
        .enumerate()
        .map(|(r, b)| b / Rational::from_integer(factorial(r as u64)))
        .collect()
}

/// `B_{2m} / (2m(2m − 1))`, the Stirling-series weights.
pub fn stirling_weight(m: u32) -> Rational {
    assert!(m >= 1);
    let k = 2 * m as i64;
    bernoulli(2 * m) / int(k * (k - 1))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::ratio;

    #[test]
    fn small_values() {
        assert_eq!(bernoulli(0), int(1));
        assert_eq!(bernoulli(1), ratio(-1, 2));
        assert_eq!(bernoulli(2), ratio(1, 6));
        assert_eq!(bernoulli(4), ratio(-1, 30));
        assert_eq!(bernoulli(12), ratio(-691, 2730));
        assert!(bernoulli(7).is_zero());
    }

    #[test]
    fn todd_coefficients() {
        let t = todd_series(4);
        assert_eq!(t[0], int(1));
        assert_eq!(t[1], ratio(-1, 2));
        assert_eq!(t[2], ratio(1, 12));
        assert!(t[3].is_zero());
        assert_eq!(t[4], ratio(-1, 720));
    }

    #[test]
    fn todd_series_inverts_exponential_quotient() {
        // (e^ψ − 1)/ψ = Σ ψ^j/(j+1)!; its product with the Todd series is 1.
        let order = 10;
        let t = todd_series(order);
        let e: Vec<Rational> =
            (0..=order).map(|j| Rational::new(1.into(), factorial(j as u64 + 1))).collect();
        for k in 0..=order as usize {
            let c = (0..=k).fold(Rational::zero(), |acc, i| acc + &t[i] * &e[k - i]);
            assert_eq!(c, if k == 0 { int(1) } else { Rational::zero() });
        }
    }

    #[test]
    fn stirling_weights() {
        assert_eq!(stirling_weight(1), ratio(1, 12));
        assert_eq!(stirling_weight(2), ratio(-1, 360));
        assert_eq!(stirling_weight(3), ratio(1, 1260));
    }
}
