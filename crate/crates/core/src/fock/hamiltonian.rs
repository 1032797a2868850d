use num_traits::Zero;

use crate::rational::{int, Rational};

use super::matrix::Mat;
use super::space::{DarbouxSpace, PhaseVector};
use super::FockError;

/// A Darboux coordinate.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Var {
    Q(usize),
    P(usize),
}

/// `H = ½ qᵀ·QQ·q + pᵀ·PQ·q + ½ pᵀ·PP·p` with `QQ`, `PP` symmetric.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QuadraticHamiltonian {
    space: DarbouxSpace,
    qq: Mat,
    pq: Mat,
    pp: Mat,
}

impl QuadraticHamiltonian {
    pub fn new(space: DarbouxSpace, qq: Mat, pq: Mat, pp: Mat) -> Result<Self, FockError> {
        let m = space.dim();
        if [&qq, &pq, &pp].iter().any(|x| x.dim() != m) {
            return Err(FockError::ShapeMismatch);
        }
        if !qq.is_symmetric() || !pp.is_symmetric() {
            return Err(FockError::NotSymmetric);
        }
        Ok(Self { space, qq, pq, pp })
    }

    pub fn zero(space: DarbouxSpace) -> Self {
        let m = space.dim();
        Self { space, qq: Mat::zero(m), pq: Mat::zero(m), pp: Mat::zero(m) }
    }

    /// The monomial `a·b`.
    pub fn monomial(space: DarbouxSpace, a: Var, b: Var) -> Self {
        let mut h = Self::zero(space);
        let one = int(1);
        match (a, b) {
            (Var::Q(i), Var::Q(j)) => {
                h.qq.add_at(i, j, &one);
                h.qq.add_at(j, i, &one);
            }
            (Var::P(i), Var::P(j)) => {
                h.pp.add_at(i, j, &one);
                h.pp.add_at(j, i, &one);
            }
            (Var::P(i), Var::Q(j)) | (Var::Q(j), Var::P(i)) => h.pq.add_at(i, j, &one),
        }
        h
    }

    pub fn space(&self) -> DarbouxSpace {
        self.space
    }

    pub fn qq(&self) -> &Mat {
        &self.qq
    }

    pub fn pq(&self) -> &Mat {
        &self.pq
    }

    pub fn pp(&self) -> &Mat {
        &self.pp
    }

    pub fn is_zero(&self) -> bool {
        self.qq.is_zero() && self.pq.is_zero() && self.pp.is_zero()
    }

    pub fn add(&self, other: &Self) -> Self {
        Self {
            space: self.space,
            qq: self.qq.add(&other.qq),
            pq: self.pq.add(&other.pq),
            pp: self.pp.add(&other.pp),
        }
    }

    pub fn scale(&self, c: &Rational) -> Self {
        Self { space: self.space, qq: self.qq.scale(c), pq: self.pq.scale(c), pp: self.pp.scale(c) }
    }

    pub fn evaluate(&self, x: &PhaseVector) -> Rational {
        let dot = |a: &[Rational], b: &[Rational]| a.iter().zip(b).fold(Rational::zero(), |acc, (u, v)| acc + u * v);
        let half = Rational::new(1.into(), 2.into());
        half.clone() * dot(&x.q, &self.qq.mul_vec(&x.q))
            + dot(&x.p, &self.pq.mul_vec(&x.q))
            + half * dot(&x.p, &self.pp.mul_vec(&x.p))
    }
}

/// `{F, G} = Σ_a ∂F/∂p_a ∂G/∂q_a − ∂F/∂q_a ∂G/∂p_a`.
pub fn poisson_bracket(f: &QuadraticHamiltonian, g: &QuadraticHamiltonian) -> QuadraticHamiltonian {
    assert_eq!(f.space, g.space, "hamiltonians on different spaces");
    // ∂_q F = QQ_F q + PQ_Fᵀ p,  ∂_p F = PQ_F q + PP_F p
    let s_qq = f.pq.transpose().mul(&g.qq).sub(&f.qq.mul(&g.pq));
    let s_pp = f.pp.mul(&g.pq.transpose()).sub(&f.pq.mul(&g.pp));
    let pq = f
        .pp
        .mul(&g.qq)
        .add(&g.pq.mul(&f.pq))
        .sub(&g.pp.mul(&f.qq))
        .sub(&f.pq.mul(&g.pq));
    QuadraticHamiltonian { space: f.space, qq: s_qq.symmetrized(), pq, pp: s_pp.symmetrized() }
}

/// The anomaly of the quantization on a pair of quadratic hamiltonians:
/// `𝒞(p_a p_b, q_a q_b) = 1` for `a ≠ b`, `𝒞(p_a², q_a²) = 2`, antisymmetric, zero on other
/// Darboux monomial pairs, extended bilinearly.
pub fn cocycle_eval(f: &QuadraticHamiltonian, g: &QuadraticHamiltonian) -> Rational {
    let half = Rational::new(1.into(), 2.into());
    (f.pp.mul(&g.qq).trace() - g.pp.mul(&f.qq).trace()) * half
}

#[cfg(test)]
mod tests {
    use super::*;

    fn space() -> DarbouxSpace {
        DarbouxSpace::new(1, 2).unwrap()
    }

    #[test]
    fn cocycle_table() {
        let s = space();
        let p0p0 = QuadraticHamiltonian::monomial(s, Var::P(0), Var::P(0));
        let q0q0 = QuadraticHamiltonian::monomial(s, Var::Q(0), Var::Q(0));
        let p0p1 = QuadraticHamiltonian::monomial(s, Var::P(0), Var::P(1));
        let q0q1 = QuadraticHamiltonian::monomial(s, Var::Q(0), Var::Q(1));
        let q0p1 = QuadraticHamiltonian::monomial(s, Var::Q(0), Var::P(1));
        assert_eq!(cocycle_eval(&p0p0, &q0q0), int(2));
        assert_eq!(cocycle_eval(&q0q0, &p0p0), int(-2));
        assert_eq!(cocycle_eval(&p0p1, &q0q1), int(1));
        assert!(cocycle_eval(&p0p0, &q0q1).is_zero());
        assert!(cocycle_eval(&q0p1, &q0q0).is_zero());
    }

    #[test]
    fn bracket_of_monomials() {
        let s = space();
        // {p0², q0²} = 4 p0 q0
        let f = QuadraticHamiltonian::monomial(s, Var::P(0), Var::P(0));
        let g = QuadraticHamiltonian::monomial(s, Var::Q(0), Var::Q(0));
        let b = poisson_bracket(&f, &g);
        assert_eq!(b, QuadraticHamiltonian::monomial(s, Var::P(0), Var::Q(0)).scale(&int(4)));
        // {p0 q1, q0²} = ∂_{p0}F·∂_{q0}G = q1·2q0
        let f = QuadraticHamiltonian::monomial(s, Var::P(0), Var::Q(1));
        let b = poisson_bracket(&f, &g);
        assert_eq!(b, QuadraticHamiltonian::monomial(s, Var::Q(0), Var::Q(1)).scale(&int(2)));
    }

    #[test]
    fn evaluation_matches_monomial() {
        let s = space();
        let h = QuadraticHamiltonian::monomial(s, Var::P(1), Var::Q(0));
        let mut x = PhaseVector::zero(s);
        x.p[1] = int(3);
        x.q[0] = int(5);
        assert_eq!(h.evaluate(&x), int(15));
        let h = QuadraticHamiltonian::monomial(s, Var::Q(1), Var::Q(1));
        x.q[1] = int(2);
        assert_eq!(h.evaluate(&x), int(4));
    }
}
