use num_complex::Complex64;
use serde::Serialize;

use crate::error::Result;
use crate::fock::{word_operator, Truncation, Word};
use crate::qkernel::{norm_log, one_phi_one, q_shifted_qpow, DeformationParams, LogMagnitude};

use super::state::coherent_vector;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Expectation {
    pub value: Complex64,
    /// Series remainder bound scaled by the prefactor.
    pub tail: f64,
}

/// ⟨a†ᵐ aⁿ⟩ = z̄ᵐ zⁿ.
pub fn cs_expectation_normal(p: &DeformationParams, z: Complex64, m: usize, n: usize) -> Result<Complex64> {
    p.require_domain(z.norm_sqr())?;
    Ok(z.conj().powu(m as u32) * z.powu(n as u32))
}

/// ⟨aⁿ a†ᵐ⟩ through the three ₁φ₁ branches (n<m, n>m, n=m), each divided by 𝒩(|z|²).
pub fn cs_expectation_antinormal(p: &DeformationParams, z: Complex64, n: usize, m: usize) -> Result<Expectation> {
    p.require_positive_lsq()?;
    let x = z.norm_sqr();
    p.require_domain(x)?;
    let q = p.q();
    let g = p.gamma();
    let c = |v: f64| Complex64::new(v, 0.0);
    let qp = |k: i64| q.powi(k as i32);
    let (pref, a, b, targ) = if n < m {
        let lm = q_shifted_qpow(q, -(m as i64), n) * LogMagnitude::from_f64(-g * q).powi(n as i64);
        (c(lm.value()) * z.conj().powu((m - n) as u32), qp(1 + m as i64), qp(1 + m as i64 - n as i64), -x * qp(-(n as i64)) / g)
    } else if n > m {
        let lm = q_shifted_qpow(q, -(n as i64), m) * LogMagnitude::from_f64(-g * q).powi(m as i64);
        (c(lm.value()) * z.powu((n - m) as u32), qp(1 + n as i64), qp(1 + n as i64 - m as i64), -x * qp(-(m as i64)) / g)
    } else {
        let nn = n as i64;
        let lm = LogMagnitude::from_ln(-((nn * (nn - 1) / 2) as f64) * q.ln(), 1.0) * LogMagnitude::from_f64(g).powi(nn) * q_shifted_qpow(q, 1, n);
        (c(lm.value()), qp(1 + nn), q, -x * qp(-nn) / g)
    };
    let s = one_phi_one(c(a), c(b), q, c(targ))?.require()?;
    let inv_norm = (-norm_log(x, p)?).exp();
    Ok(Expectation { value: pref * s.value * inv_norm, tail: pref.norm() * s.tail_bound * inv_norm })
}

/// ⟨z|W|z⟩ on the truncated space, the matrix oracle for the closed forms.
pub fn sandwich(p: &DeformationParams, z: Complex64, word: &Word, t: Truncation) -> Result<(Complex64, f64)> {
    let v = coherent_vector(p, z, t)?;
    let w = word_operator(p, t.dim, word)?;
    Ok((v.coeffs.dotc(&(&w.matrix * &v.coeffs)), v.tail_error))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct QuadratureMoments {
    pub q_mean: f64,
    pub p_mean: f64,
    pub q_sq: f64,
    pub p_sq: f64,
    pub delta_q: f64,
    pub delta_p: f64,
    pub uncertainty: f64,
}

/// Q = (a†+a)/√2, P = i(a†−a)/√2 in |z⟩.
pub fn quadrature_moments(p: &DeformationParams, z: Complex64) -> Result<QuadratureMoments> {
    p.require_domain(z.norm_sqr())?;
    let inv_q = 1.0 / p.q();
    let base = p.lsq() * p.q().powf(p.lambda() - 1.0) / 2.0;
    let (re2, im2) = (z.re * z.re, z.im * z.im);
    let q_sq = (3.0 + inv_q) / 2.0 * re2 + (inv_q - 1.0) / 2.0 * im2 + base;
    let p_sq = (inv_q - 1.0) / 2.0 * re2 + (3.0 + inv_q) / 2.0 * im2 + base;
    let var = base + (inv_q - 1.0) / 2.0 * z.norm_sqr();
    Ok(QuadratureMoments {
        q_mean: 2f64.sqrt() * z.re,
        p_mean: 2f64.sqrt() * z.im,
        q_sq,
        p_sq,
        delta_q: var.sqrt(),
        delta_p: var.sqrt(),
        uncertainty: var,
    })
}
