#![allow(dead_code)]

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_traits::{One, Zero};

/// Polynomial in the two Chern roots `x1, x2` of the dual tautological bundle on `G(2, N)`.
#[derive(Clone, Debug, Default)]
pub struct Poly2(BTreeMap<(u32, u32), BigInt>);

impl Poly2 {
    pub fn one() -> Self {
        let mut p = Self::default();
        p.0.insert((0, 0), BigInt::one());
        p
    }

    /// `a·x1 + b·x2`.
    pub fn linear(a: i64, b: i64) -> Self {
        let mut p = Self::default();
        p.0.insert((1, 0), a.into());
        p.0.insert((0, 1), b.into());
        p
    }

    pub fn mul(&self, other: &Self) -> Self {
        let mut out: BTreeMap<(u32, u32), BigInt> = BTreeMap::new();
        for ((i, j), a) in &self.0 {
            for ((k, l), b) in &other.0 {
                *out.entry((i + k, j + l)).or_insert_with(BigInt::zero) += a * b;
            }
        }
        out.retain(|_, v| !v.is_zero());
        Self(out)
    }

    pub fn pow(&self, e: u32) -> Self {
        (0..e).fold(Self::one(), |acc, _| acc.mul(self))
    }

    pub fn coeff(&self, i: u32, j: u32) -> BigInt {
        self.0.get(&(i, j)).cloned().unwrap_or_default()
    }
}

/// `∫_{G(2,N)} φ = ½·[x1^{N−1} x2^{N−1}] (φ·(−(x1 − x2)²))`.
pub fn grassmannian_integral(n: u32, phi: &Poly2) -> BigInt {
    let top = phi.mul(&Poly2::linear(1, -1).pow(2)).coeff(n - 1, n - 1);
    -top / BigInt::from(2)
}

/// Euler class of `Sym^k S*` on `G(2, N)`: `Π_{a=0}^{k} (a·x1 + (k−a)·x2)`.
pub fn euler_sym(k: u32) -> Poly2 {
    (0..=k as i64).fold(Poly2::one(), |acc, a| acc.mul(&Poly2::linear(a, k as i64 - a)))
}

/// Lines on a generic degree-`2N−5` hypersurface in `P^{N−1}`.
pub fn lines_on_hypersurface(n: u32) -> BigInt {
    grassmannian_integral(n, &euler_sym(2 * n - 5))
}

pub fn bin() -> &'static str {
    env!("CARGO_BIN_EXE_qrr")
}
