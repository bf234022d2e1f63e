//! Expectation values in the diagonal-representation state with the Gaussian-analogue
//! weight φ₁ = 1, φ₂ = 1/(π𝒩): displayed closed forms next to independent evaluations.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::fock::{KerrParams, Truncation};
use crate::qkernel::{log_q_shifted_inf_real, q_bessel_j0, q_factorial_log, q_shifted_qpow, sum_terms, DeformationParams, LogMagnitude, Regime, SeriesPolicy};

use super::density::{density_from_weight, gaussian_weight, DensityCoefficients};
use super::measure::{RadialMeasure, RadialSpec};

/// tr(ρ a†^σ a^ν) as displayed: ln q^{−1} γ^{ν+1} q^{−C(ν+1,2)} (q;q)_ν for q<1,
/// (−γ)^ν q^{−1} (q^{−1};q^{−1})_ν for q>1; zero unless σ = ν.
pub fn trace_normal_closed(p: &DeformationParams, sigma: usize, nu: usize) -> f64 {
    if sigma != nu {
        return 0.0;
    }
    let q = p.q();
    let g = LogMagnitude::from_f64(p.gamma());
    match p.regime() {
        Regime::SubOne => {
            let e = -((nu * (nu + 1) / 2) as f64) * q.ln();
            (-q.ln()) * (g.powi(nu as i64 + 1) * LogMagnitude::from_ln(e, 1.0) * q_factorial_log(q, nu)).value()
        }
        Regime::SuperOne => (LogMagnitude::from_f64(-p.gamma()).powi(nu as i64) * q_factorial_log(1.0 / q, nu)).value() / q,
    }
}

/// The defining integral ∫ d²z φ z̄^σ z^ν, radial part on the regime's node set.
pub fn trace_normal_integral(p: &DeformationParams, sigma: usize, nu: usize, spec: &RadialSpec) -> Result<f64> {
    if sigma != nu {
        return Ok(0.0);
    }
    let m = RadialMeasure::plain(p, nu, spec)?;
    // plain nodes carry π/𝒩; φ₂ = 1/(π𝒩) leaves ∫ xⁿ/𝒩 dx (q<1) or the Jackson sum (q>1)
    Ok(m.nodes.iter().map(|nd| (nd.ln_weight + nu as f64 * nd.point.ln_x).exp()).sum::<f64>() / PI)
}

/// tr(ρ a^ν a†^ν) for q>1 as displayed, through 𝒪_∞ and the q-Bessel function.
pub fn trace_antinormal_closed(p: &DeformationParams, nu: usize) -> Result<f64> {
    p.require_regime(Regime::SuperOne)?;
    let q = p.q();
    let pb = 1.0 / q;
    let nu_i = nu as i64;
    let pref = LogMagnitude::from_ln(-((nu_i * (nu_i - 1) / 2 + 1) as f64) * q.ln(), 1.0)
        * LogMagnitude::from_f64(p.gamma()).powi(nu_i)
        * q_factorial_log(q, nu);
    let pinf = log_q_shifted_inf_real(pb, pb).0.exp();
    let o = big_o_infinity(-(q.powi(-(nu as i32))), nu, q)?;
    Ok(pref.value() * pinf * pinf * o)
}

/// 𝒪_∞(x; q^{1+m} | q) = Σ q^{C(n,2)} (q^{1+m};q)_n / ((q;q)_n)² xⁿ J₀(2i q^{−(1+n)/2}; q^{−1}).
fn big_o_infinity(x: f64, m: usize, q: f64) -> Result<f64> {
    let mut err = None;
    let s = sum_terms(
        |n| {
            let ni = n as i64;
            let coef = LogMagnitude::from_ln(((ni * (ni - 1) / 2) as f64) * q.ln(), 1.0) * q_shifted_qpow(q, 1 + m as i64, n)
                / (q_factorial_log(q, n) * q_factorial_log(q, n))
                * LogMagnitude::from_f64(x).powi(ni);
            let j = match q_bessel_j0(Complex64::new(0.0, 2.0 * q.powf(-(1.0 + n as f64) / 2.0)), 1.0 / q).and_then(|v| v.require()) {
                Ok(v) => v.value.re,
                Err(e) => {
                    err.get_or_insert(e);
                    0.0
                }
            };
            Complex64::new(coef.value() * j, 0.0)
        },
        &SeriesPolicy::from_env(),
    );
    if let Some(e) = err {
        return Err(e);
    }
    if !s.converged {
        return Err(Error::NonConvergence { terms: s.terms_used, last_term: f64::NAN });
    }
    Ok(s.value.re)
}

/// Σ_n ρ(n,n) ⟨n|F|n⟩ for diagonal F given by its eigenvalues.
pub fn spectral_sum(rho: &DensityCoefficients, eig: impl Fn(usize) -> f64) -> f64 {
    (0..rho.rho.nrows()).map(|n| rho.rho[(n, n)].re * eig(n)).sum()
}

/// ρ(n,n) for the (unnormalized) Gaussian-analogue weight.
pub fn gaussian_density(p: &DeformationParams, t: Truncation, spec: &RadialSpec) -> Result<DensityCoefficients> {
    density_from_weight(p, |x| gaussian_weight(p, x), t, spec)
}

/// tr(ρ a^ν a†^ν) as Σ ρ(n,n) φ(n+1)…φ(n+ν).
pub fn trace_antinormal_spectral(p: &DeformationParams, nu: usize, rho: &DensityCoefficients) -> f64 {
    spectral_sum(rho, |n| (n + 1..=n + nu).map(|j| p.phi(j)).product())
}

/// tr(ρ a†a): γ² q^{−1}(1−q) ln q^{−1} for q<1, l² q^{λ−3} for q>1.
pub fn trace_number_display(p: &DeformationParams) -> f64 {
    let q = p.q();
    match p.regime() {
        Regime::SubOne => p.gamma().powi(2) / q * (1.0 - q) * (-q.ln()),
        Regime::SuperOne => p.lsq() * q.powf(p.lambda() - 3.0),
    }
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct HamiltonianTrace {
    pub display: f64,
    /// (1 + q^{−1}) tr(ρ a†a) + l²q^{λ−1} tr ρ, from aa† = q^{−1}a†a + l²q^{λ−1}.
    pub derived: f64,
}

/// tr(ρ(aa† + a†a)): the two-branch display and the value implied by the algebra.
pub fn trace_hamiltonian(p: &DeformationParams) -> HamiltonianTrace {
    let q = p.q();
    let base = p.lsq() * q.powf(p.lambda() - 1.0);
    let display = match p.regime() {
        Regime::SubOne => base * (1.0 + (q.powi(-2)).ln() * p.lsq() * q.powf(p.lambda() - 2.0) / (1.0 - q)),
        Regime::SuperOne => base * (1.0 + 2.0 / (q * q)),
    };
    let derived = (1.0 + 1.0 / q) * trace_normal_closed(p, 1, 1) + base * trace_normal_closed(p, 0, 0);
    HamiltonianTrace { display, derived }
}

/// tr(ρ H_d) for H_d = a†a + (χ/2) a†²a², as displayed.
pub fn kerr_expectation(p: &DeformationParams, k: KerrParams) -> f64 {
    let q = p.q();
    let chi = k.chi;
    match p.regime() {
        Regime::SubOne => trace_number_display(p) * (1.0 + chi / 2.0 * p.gamma() / (q * q) * (1.0 - q * q)),
        Regime::SuperOne => {
            let s = p.lsq() * q.powf(p.lambda() - 3.0);
            s * (1.0 + chi / 2.0 * s * (1.0 + q))
        }
    }
}

/// Σ ρ(n,n) φ(n)(1 + (χ/2)φ(n−1)).
pub fn kerr_spectral(p: &DeformationParams, k: KerrParams, rho: &DensityCoefficients) -> f64 {
    spectral_sum(rho, |n| if n == 0 { 0.0 } else { p.phi(n) * (1.0 + k.chi / 2.0 * p.phi(n - 1)) })
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct PositionTrace {
    /// The two-branch display for tr(ρQ) = tr(ρP).
    pub display: f64,
    /// π ∫ √x φ₂ dx (q<1) or π ∫ √x φ₂ d_q x (q>1), the intermediate reduction.
    pub reduction: f64,
    /// √2 ∫ d²z φ Re z with φ₁ = cos θ/√2, evaluated directly.
    pub direct: f64,
}

/// tr(ρQ) for φ₁ = cos θ/√2, φ₂ = 1/(π𝒩).
pub fn trace_position(p: &DeformationParams, spec: &RadialSpec) -> Result<PositionTrace> {
    let q = p.q();
    let display = match p.regime() {
        Regime::SubOne => (p.lsq() * q.powf(p.lambda() - 2.0) / (1.0 - q)).powi(3) * (-q.ln()) * (1.0 - q) * (1.0 - q * q),
        Regime::SuperOne => {
            let pb = 1.0 / q;
            let num = log_q_shifted_inf_real(pb, pb).0;
            let den = log_q_shifted_inf_real(q.powf(-1.5), pb).0;
            (p.lsq() * q.powf(p.lambda() - 3.0) / (q - 1.0)).sqrt() * (num - den).exp()
        }
    };
    let m = RadialMeasure::plain(p, 1, spec)?;
    // ∫ √x/𝒩: plain nodes carry π/𝒩
    let half_moment: f64 = m.nodes.iter().map(|nd| (nd.ln_weight + 0.5 * nd.point.ln_x).exp()).sum::<f64>() / PI;
    Ok(PositionTrace { display, reduction: half_moment, direct: 0.5 * half_moment })
}
