use num_traits::Zero;

use crate::rational::{int, Rational};

use super::hamiltonian::QuadraticHamiltonian;
use super::matrix::Mat;
use super::FockError;

/// Darboux coordinates on a `z`-window of `H((z^{-1}))`:
/// `f = Σ_{k<N} q_k z^k + Σ_{k<N} p_k (−z)^{−1−k}`, `q_k, p_k ∈ H`, with `H`
/// Euclidean of dimension `h_dim`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct DarbouxSpace {
    h_dim: usize,
    window: usize,
}

impl DarbouxSpace {
    pub fn new(h_dim: usize, window: usize) -> Result<Self, FockError> {
        if h_dim == 0 || window == 0 {
            return Err(FockError::EmptySpace);
        }
        Ok(Self { h_dim, window })
    }

    pub fn h_dim(&self) -> usize {
        self.h_dim
    }

    pub fn window(&self) -> usize {
        self.window
    }

    /// Number of `q` coordinates (equal to the number of `p` coordinates).
    pub fn dim(&self) -> usize {
        self.h_dim * self.window
    }

    /// Flat index of `q_{k,α}` or `p_{k,α}`.
    pub fn index(&self, k: usize, alpha: usize) -> usize {
        k * self.h_dim + alpha
    }
}

/// A point `(q, p)` of the window.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PhaseVector {
    pub q: Vec<Rational>,
    pub p: Vec<Rational>,
}

impl PhaseVector {
    pub fn zero(space: DarbouxSpace) -> Self {
        Self { q: vec![Rational::zero(); space.dim()], p: vec![Rational::zero(); space.dim()] }
    }

    /// The `i`-th vector of the basis `(q_0.., p_0..)`.
    pub fn basis(space: DarbouxSpace, i: usize) -> Self {
        let mut v = Self::zero(space);
        let m = space.dim();
        if i < m {
            v.q[i] = int(1);
        } else {
            v.p[i - m] = int(1);
        }
        v
    }
}

/// `Ω(f, g) = Σ p(f)·q(g) − q(f)·p(g)`.
pub fn omega(f: &PhaseVector, g: &PhaseVector) -> Rational {
    let a = f.p.iter().zip(&g.q).fold(Rational::zero(), |acc, (x, y)| acc + x * y);
    let b = f.q.iter().zip(&g.p).fold(Rational::zero(), |acc, (x, y)| acc + x * y);
    a - b
}

/// `T = Σ_j A_j z^j` acting on `H((z^{-1}))`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LoopOperator {
    h_dim: usize,
    terms: Vec<(i64, Mat)>,
}

impl LoopOperator {
    pub fn zero(h_dim: usize) -> Self {
        Self { h_dim, terms: Vec::new() }
    }

    /// `A·z^j`.
    pub fn monomial(a: Mat, j: i64) -> Self {
        Self { h_dim: a.dim(), terms: vec![(j, a)] }
    }

    pub fn plus(mut self, a: Mat, j: i64) -> Self {
        assert_eq!(a.dim(), self.h_dim);
        self.terms.push((j, a));
        self
    }

    /// Image of a window vector, re-expanded in the window coordinates (components
    /// leaving the window are dropped; they cannot pair with window vectors).
    pub fn apply(&self, space: DarbouxSpace, v: &PhaseVector) -> PhaseVector {
        assert_eq!(space.h_dim(), self.h_dim, "operator acts on a different H");
        let h = self.h_dim;
        let mut out = PhaseVector::zero(space);
        let mut place = |e: i64, vec: Vec<Rational>, c: &Rational| {
            if e >= 0 {
                if (e as usize) < space.window() {
                    for (alpha, x) in vec.into_iter().enumerate() {
                        out.q[space.index(e as usize, alpha)] += x * c;
                    }
                }
            } else {
                let k = (-1 - e) as usize;
                // z^e = (−1)^e (−z)^e
                let sign = if e.rem_euclid(2) == 0 { int(1) } else { int(-1) };
                if k < space.window() {
                    for (alpha, x) in vec.into_iter().enumerate() {
                        out.p[space.index(k, alpha)] += x * c * &sign;
                    }
                }
            }
        };
        for (j, a) in &self.terms {
            for k in 0..space.window() {
                let qk: Vec<Rational> = (0..h).map(|al| v.q[space.index(k, al)].clone()).collect();
                let pk: Vec<Rational> = (0..h).map(|al| v.p[space.index(k, al)].clone()).collect();
                if qk.iter().any(|x| !x.is_zero()) {
                    place(k as i64 + j, a.mul_vec(&qk), &int(1));
                }
                if pk.iter().any(|x| !x.is_zero()) {
                    // (−z)^{−1−k} = (−1)^{k+1} z^{−1−k}
                    let sign = if k % 2 == 0 { int(-1) } else { int(1) };
                    place(j - 1 - k as i64, a.mul_vec(&pk), &sign);
                }
            }
        }
        out
    }
}

/// `Ω(Tf, f)/2` as a quadratic form, after checking `Ω(Te_i, e_j) + Ω(e_i, Te_j) = 0`
/// on every pair of window basis vectors.
pub fn hamiltonian_of(space: DarbouxSpace, t: &LoopOperator) -> Result<QuadraticHamiltonian, FockError> {
    let m = space.dim();
    let basis: Vec<PhaseVector> = (0..2 * m).map(|i| PhaseVector::basis(space, i)).collect();
    let images: Vec<PhaseVector> = basis.iter().map(|b| t.apply(space, b)).collect();
    let mut w = Mat::zero(2 * m);
    for i in 0..2 * m {
        for j in 0..2 * m {
            let a = omega(&images[i], &basis[j]);
            let b = omega(&basis[i], &images[j]);
            if !(a.clone() + b).is_zero() {
                return Err(FockError::NotInfinitesimallySymplectic { i, j });
            }
            w.set(i, j, a);
        }
    }
    let block = |r0: usize, c0: usize| {
        let mut out = Mat::zero(m);
        for i in 0..m {
            for j in 0..m {
                out.set(i, j, w.get(r0 + i, c0 + j).clone());
            }
        }
        out
    };
    QuadraticHamiltonian::new(space, block(0, 0), block(m, 0), block(m, m))
}

/// `½ Ω(Tx, x)` evaluated directly.
pub fn half_omega(space: DarbouxSpace, t: &LoopOperator, x: &PhaseVector) -> Rational {
    omega(&t.apply(space, x), x) / int(2)
}
