use std::collections::BTreeMap;
use std::fmt;

use num_traits::Zero;

use crate::rational::{binomial, int, Rational};

use super::hamiltonian::{cocycle_eval, poisson_bracket, QuadraticHamiltonian};
use super::FockError;

/// `Σ c·ħ^h·q^α`, a polynomial in the `q` variables with Laurent `ħ` powers.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct FockPolynomial {
    terms: BTreeMap<(i32, Vec<u32>), Rational>,
}

impl FockPolynomial {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn monomial(c: Rational, hbar: i32, q: Vec<u32>) -> Self {
        let mut p = Self::zero();
        p.add_term(hbar, q, c);
        p
    }

    pub fn add_term(&mut self, hbar: i32, q: Vec<u32>, c: Rational) {
        if c.is_zero() {
            return;
        }
        let key = (hbar, q);
        let entry = self.terms.entry(key.clone()).or_insert_with(Rational::zero);
        *entry += c;
        if entry.is_zero() {
            self.terms.remove(&key);
        }
    }

    pub fn terms(&self) -> impl Iterator<Item = (&(i32, Vec<u32>), &Rational)> {
        self.terms.iter()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for ((h, q), c) in &other.terms {
            out.add_term(*h, q.clone(), c.clone());
        }
        out
    }

    pub fn scale(&self, c: &Rational) -> Self {
        let mut out = Self::zero();
        for ((h, q), x) in &self.terms {
            out.add_term(*h, q.clone(), x * c);
        }
        out
    }

    /// First monomial where `self` and `other` differ.
    pub fn first_difference(&self, other: &Self) -> Option<(i32, Vec<u32>)> {
        let diff = self.add(&other.scale(&int(-1)));
        diff.terms.keys().next().cloned()
    }
}

/// Normal-ordered operator `Σ c·ħ^h·q^α·∂^β` acting on [`FockPolynomial`]s.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FockOperator {
    vars: usize,
    terms: BTreeMap<(i32, Vec<u32>, Vec<u32>), Rational>,
}

impl FockOperator {
    pub fn zero(vars: usize) -> Self {
        Self { vars, terms: BTreeMap::new() }
    }

    /// Multiplication by the scalar `c`.
    pub fn scalar(vars: usize, c: Rational) -> Self {
        let mut op = Self::zero(vars);
        op.add_term(0, vec![0; vars], vec![0; vars], c);
        op
    }

    pub fn vars(&self) -> usize {
        self.vars
    }

    pub fn add_term(&mut self, hbar: i32, q: Vec<u32>, d: Vec<u32>, c: Rational) {
        assert!(q.len() == self.vars && d.len() == self.vars, "multi-index length mismatch");
        if c.is_zero() {
            return;
        }
        let key = (hbar, q, d);
        let entry = self.terms.entry(key.clone()).or_insert_with(Rational::zero);
        *entry += c;
        if entry.is_zero() {
            self.terms.remove(&key);
        }
    }

    pub fn terms(&self) -> impl Iterator<Item = (&(i32, Vec<u32>, Vec<u32>), &Rational)> {
        self.terms.iter()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for ((h, q, d), c) in &other.terms {
            out.add_term(*h, q.clone(), d.clone(), c.clone());
        }
        out
    }

    pub fn scale(&self, c: &Rational) -> Self {
        let mut out = Self::zero(self.vars);
        for ((h, q, d), x) in &self.terms {
            out.add_term(*h, q.clone(), d.clone(), x * c);
        }
        out
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.scale(&int(-1)))
    }

    /// `self ∘ other`, re-normal-ordered with `∂^β q^γ = Σ_κ Π C(β,κ)·γ!/(γ−κ)!·q^{γ−κ} ∂^{β−κ}`.
    pub fn compose(&self, other: &Self) -> Self {
        assert_eq!(self.vars, other.vars);
        let mut out = Self::zero(self.vars);
        for ((ha, qa, da), ca) in &self.terms {
            for ((hb, qb, db), cb) in &other.terms {
                let mut partial: Vec<(Vec<u32>, Vec<u32>, Rational)> = vec![(qa.clone(), Vec::new(), ca * cb)];
                for i in 0..self.vars {
                    let mut next = Vec::new();
                    for (q, d, c) in &partial {
                        for kappa in 0..=da[i].min(qb[i]) {
                            let falling = (0..kappa).fold(int(1), |acc, t| acc * int((qb[i] - t) as i64));
                            let w = binomial(da[i] as i64, kappa as u64) * falling;
                            let mut q2 = q.clone();
                            q2[i] += qb[i] - kappa;
                            let mut d2 = d.clone();
                            d2.push(da[i] - kappa + db[i]);
                            next.push((q2, d2, c * w));
                        }
                    }
                    partial = next;
                }
                for (q, d, c) in partial {
                    out.add_term(ha + hb, q, d, c);
                }
            }
        }
        out
    }

    pub fn commutator(&self, other: &Self) -> Self {
        self.compose(other).sub(&other.compose(self))
    }

    pub fn apply(&self, poly: &FockPolynomial) -> FockPolynomial {
        let mut out = FockPolynomial::zero();
        for ((h, q, d), c) in &self.terms {
            'monomials: for ((hp, qp), cp) in poly.terms() {
                let mut coeff = c * cp;
                let mut exps = qp.clone();
                for i in 0..self.vars {
                    if d[i] > exps[i] {
                        continue 'monomials;
                    }
                    let falling = (0..d[i]).fold(int(1), |acc, t| acc * int((exps[i] - t) as i64));
                    coeff *= falling;
                    exps[i] = exps[i] - d[i] + q[i];
                }
                out.add_term(h + hp, exps, coeff);
            }
        }
        out
    }

    /// Common weight under `ħ ↦ 2`, `q ↦ 1`, `∂ ↦ −1`, if every term has the same one.
    pub fn weight(&self) -> Option<i64> {
        let mut weights = self.terms.keys().map(|(h, q, d)| {
            2 * *h as i64 + q.iter().map(|&x| x as i64).sum::<i64>() - d.iter().map(|&x| x as i64).sum::<i64>()
        });
        let first = weights.next()?;
        weights.all(|w| w == first).then_some(first)
    }
}

impl fmt::Display for FockOperator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (i, ((h, q, d), c)) in self.terms.iter().enumerate() {
            if i > 0 {
                write!(f, " + ")?;
            }
            write!(f, "{c}·ħ^{h}")?;
            for (k, e) in q.iter().enumerate().filter(|(_, e)| **e > 0) {
                write!(f, "·q{k}^{e}")?;
            }
            for (k, e) in d.iter().enumerate().filter(|(_, e)| **e > 0) {
                write!(f, "·∂{k}^{e}")?;
            }
        }
        Ok(())
    }
}

fn unit(vars: usize, i: usize) -> Vec<u32> {
    let mut v = vec![0; vars];
    v[i] += 1;
    v
}

fn pair(vars: usize, i: usize, j: usize) -> Vec<u32> {
    let mut v = unit(vars, i);
    v[j] += 1;
    v
}

/// `(q_a q_b)^ = q_a q_b/ħ`, `(p_a q_b)^ = q_b ∂_a`, `(p_a p_b)^ = ħ ∂_a ∂_b`.
pub fn quantize(h: &QuadraticHamiltonian) -> FockOperator {
    let m = h.space().dim();
    let zero = vec![0; m];
    let half = Rational::new(1.into(), 2.into());
    let mut op = FockOperator::zero(m);
    for a in 0..m {
        for b in 0..m {
            let qq = h.qq().get(a, b);
            if !qq.is_zero() {
                op.add_term(-1, pair(m, a, b), zero.clone(), qq * &half);
            }
            let pq = h.pq().get(a, b);
            if !pq.is_zero() {
                op.add_term(0, unit(m, b), unit(m, a), pq.clone());
            }
            let pp = h.pp().get(a, b);
            if !pp.is_zero() {
                op.add_term(1, zero.clone(), pair(m, a, b), pp * &half);
            }
        }
    }
    op
}

/// Verifies `[F̂, Ĝ] = {F, G}^ + 𝒞(F, G)` on `poly`.
pub fn projective_identity_check(
    f: &QuadraticHamiltonian,
    g: &QuadraticHamiltonian,
    poly: &FockPolynomial,
) -> Result<(), FockError> {
    let m = f.space().dim();
    let lhs = quantize(f).commutator(&quantize(g)).apply(poly);
    let rhs_op = quantize(&poisson_bracket(f, g)).add(&FockOperator::scalar(m, cocycle_eval(f, g)));
    let rhs = rhs_op.apply(poly);
    match lhs.first_difference(&rhs) {
        None => Ok(()),
        Some((hbar, q)) => Err(FockError::IdentityFailure { hbar, monomial: q }),
    }
}
