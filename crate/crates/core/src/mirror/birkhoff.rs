use serde_json::{json, Value};

use crate::ring::{CohElement, LambdaScalar};
use crate::series::{directional_derivative, exp_series, series_mul, Convention, ZPoly, ZSeries};

use super::qseries::{invert_series, scale_by_qseries, substitute, QSeries};
use super::MirrorError;

/// Output of the factorization / mirror-map procedures.
#[derive(Clone, Debug)]
pub struct MirrorResult {
    /// `F` with `F(0) = 1`.
    pub f: QSeries,
    /// `G − t·F`, the `P`-slot of the naive parameter.
    pub g: QSeries,
    /// `τ₀`, the string-direction shift.
    pub tau0: QSeries,
    /// `τ₁ − t`.
    pub tau_of_q: QSeries,
    /// `q = φ(q')` with `q' = q·e^{τ₁ − t}`.
    pub q_of_tau: QSeries,
    /// The series after factorization, still in the variable `q`.
    pub normalized: ZSeries,
    /// The factored series in the `τ` chart; `None` when `τ` leaves `span(1, P)`.
    pub j_out: Option<ZSeries>,
    /// `c_k(q, z)` stored as the `P^k` component of a series.
    pub c_coeffs: ZSeries,
}

impl MirrorResult {
    /// Every correction coefficient and every mirror-map datum vanishes.
    pub fn is_identity(&self) -> bool {
        self.c_coeffs.is_zero() && self.tau0.is_zero() && self.tau_of_q.is_zero()
    }

    pub fn to_json(&self) -> Value {
        json!({
            "F": self.f.to_json(),
            "G": self.g.to_json(),
            "tau0": self.tau0.to_json(),
            "tau_minus_t": self.tau_of_q.to_json(),
            "q_of_tau": self.q_of_tau.to_json(),
            "normalized": self.normalized.to_json(),
            "j_out": self.j_out.as_ref().map(ZSeries::to_json),
            "c_coeffs": self.c_coeffs.to_json(),
        })
    }
}

fn check_input(i: &ZSeries) -> Result<(), MirrorError> {
    if i.convention() != Convention::Reduced {
        return Err(MirrorError::Transversality("input must be a reduced series".into()));
    }
    if i.slice(0) != &ZPoly::one(i.ring()) {
        return Err(MirrorError::Transversality("degree-0 slice is not 1".into()));
    }
    Ok(())
}

/// `P^k` component of a coefficient, as a scalar class.
fn component_poly(p: &ZPoly, k: usize) -> ZPoly {
    let ring = p.ring();
    let mut out = ZPoly::zero(ring);
    for (e, c) in p.terms() {
        out.add_term(*e, CohElement::from_scalar(ring, c.component(k).clone()));
    }
    out
}

/// `Σ_k c_k·(zD_P)^k I` from stored coefficients.
pub fn recompose(i: &ZSeries, c_coeffs: &ZSeries) -> Result<ZSeries, MirrorError> {
    let n = i.ring().n();
    let mut frame = i.clone();
    let mut out = i.clone();
    for k in 0..n {
        let ck = c_coeffs.map_slices(|_, s| component_poly(s, k));
        out = out.try_add(&series_mul(&ck, &frame)?)?;
        frame = directional_derivative(&frame)?;
    }
    Ok(out)
}

/// Reads `τ` off the `z^{-1}` coefficients and moves to the `τ` chart.
fn finish(normalized: ZSeries, c_coeffs: ZSeries, f: QSeries) -> Result<MirrorResult, MirrorError> {
    let dmax = normalized.max_degree();
    let mut tau0 = QSeries::zero(dmax);
    let mut h = QSeries::zero(dmax);
    let mut small = true;
    for d in 1..=dmax {
        let c = normalized.slice(d).coeff(-1);
        tau0.set_coeff(d, c.component(0).clone());
        h.set_coeff(d, c.component(1).clone());
        small &= c.components()[2..].iter().all(LambdaScalar::is_zero);
    }
    let g = f.mul(&h);
    let q_of_tau = invert_series(&h)?;
    let j_out = if small { Some(change_chart(&normalized, &tau0, &h, &q_of_tau)?) } else { None };
    Ok(MirrorResult { f, g, tau0, tau_of_q: h, q_of_tau, normalized, j_out, c_coeffs })
}

/// `Y = e^{−(τ₀ + P(τ₁ − t))/z}·X`, then `q = φ(q')`.
fn change_chart(x: &ZSeries, tau0: &QSeries, h: &QSeries, phi: &QSeries) -> Result<ZSeries, MirrorError> {
    let ring = x.ring();
    let dmax = x.max_degree();
    let mut exponent = ZSeries::zero(ring, dmax, Convention::Reduced);
    for d in 1..=dmax {
        let c = CohElement::linear(ring, -tau0.coeff(d), -h.coeff(d));
        exponent.set_slice(d, ZPoly::monomial(-1, c));
    }
    let y = series_mul(&exp_series(&exponent)?, x)?;
    let out = substitute(&y, phi)?;
    if out.slice(0) != &ZPoly::one(ring) {
        return Err(MirrorError::Chart("degree-0 slice is not 1".into()));
    }
    for d in 1..=dmax {
        if let Some(top) = out.slice(d).max_z() {
            if top > -2 && !out.slice(d).filter_z(|e| e > -2).is_zero() {
                return Err(MirrorError::Chart(format!("slice {d} has a z^{top} term")));
            }
        }
    }
    Ok(out)
}

/// Kills every `z^{≥0}` term of `I_d` (`d ≥ 1`) with `Σ_k c_k(q, z)·(zD_P)^k I`, `c_k`
/// polynomial in `z`, ascending in `q`.
pub fn birkhoff(i: &ZSeries) -> Result<MirrorResult, MirrorError> {
    check_input(i)?;
    let ring = i.ring();
    let n = ring.n();
    let dmax = i.max_degree();
    let mut frames = vec![i.clone()];
    for k in 1..n {
        frames.push(directional_derivative(&frames[k - 1])?);
    }
    // c[k][d]: scalar z-polynomial
    let mut c: Vec<Vec<ZPoly>> = vec![vec![ZPoly::zero(ring); dmax + 1]; n];
    let mut normalized = ZSeries::one(ring, dmax, Convention::Reduced);
    for d in 1..=dmax {
        let mut r = i.slice(d).clone();
        for (k, frame) in frames.iter().enumerate() {
            for e in 1..d {
                if !c[k][e].is_zero() {
                    r = &r + &(&c[k][e] * frame.slice(d - e));
                }
            }
        }
        // the leading block is the q⁰ frame P^k, so each P^k z^j slot fixes c_{k,d}[z^j]
        let nonneg = r.filter_z(|e| e >= 0);
        for (k, ck) in c.iter_mut().enumerate() {
            ck[d] = -&component_poly(&nonneg, k);
        }
        normalized.set_slice(d, r.filter_z(|e| e < 0));
    }
    let mut c_coeffs = ZSeries::zero(ring, dmax, Convention::Reduced);
    for d in 1..=dmax {
        let mut slot = ZPoly::zero(ring);
        for (k, ck) in c.iter().enumerate() {
            for (e, v) in ck[d].terms() {
                slot.add_term(*e, CohElement::p_monomial(ring, k, v.component(0).clone()));
            }
        }
        c_coeffs.set_slice(d, slot);
    }
    if recompose(i, &c_coeffs)? != normalized {
        return Err(MirrorError::Transversality("back-substitution failed".into()));
    }
    let mut unit = QSeries::one(dmax);
    for d in 1..=dmax {
        unit.set_coeff(d, c[0][d].coeff(0).component(0).clone());
    }
    finish(normalized, c_coeffs, unit.inverse()?)
}

/// The small-parameter route: `F` from the `z⁰` slot, `J = I/F`, `τ = G/F`.
/// Needs a non-equivariant `I` whose slices have no positive `z`-powers.
pub fn small_mirror(i: &ZSeries) -> Result<MirrorResult, MirrorError> {
    check_input(i)?;
    let ring = i.ring();
    let dmax = i.max_degree();
    let mut f = QSeries::one(dmax);
    for d in 0..=dmax {
        for (e, c) in i.slice(d).terms() {
            for s in c.components() {
                if s.terms().any(|((le, ll), _)| *le != 0 || *ll != 0) || s.is_truncated() {
                    return Err(MirrorError::NotNonEquivariant);
                }
            }
            if *e > 0 && !c.is_zero() {
                return Err(MirrorError::PositiveZPower { degree: d });
            }
        }
        if d == 0 {
            continue;
        }
        let z0 = i.slice(d).coeff(0);
        if z0.components()[1..].iter().any(|s| !s.is_zero()) {
            return Err(MirrorError::NotAUnit);
        }
        f.set_coeff(d, z0.component(0).clone());
    }
    let inv = f.inverse()?;
    let normalized = scale_by_qseries(i, &inv);
    let mut c_coeffs = ZSeries::zero(ring, dmax, Convention::Reduced);
    for d in 1..=dmax {
        let c0 = inv.coeff(d);
        if !c0.is_zero() {
            c_coeffs.set_slice(d, ZPoly::constant(CohElement::from_scalar(ring, c0.clone())));
        }
    }
    debug_assert_eq!(recompose(i, &c_coeffs).ok().as_ref(), Some(&normalized));
    finish(normalized, c_coeffs, f)
}
