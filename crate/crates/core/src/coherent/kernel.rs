use std::f64::consts::PI;

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::fock::Truncation;
use crate::qkernel::{sum_ratio_series, DeformationParams, Regime, SeriesPolicy};

use super::density::{rho_function, DensityCoefficients};
use super::measure::{RadialMeasure, RadialSpec};
use super::state::{coherent_vector, overlap};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct KernelValue {
    pub z: Complex64,
    pub zeta: Complex64,
    pub value: Complex64,
}

/// The weight carried by K on its second argument: 1/(π ln q^{−1}(η+x)) or 1/(π(1+x/η)).
pub fn kernel_weight(p: &DeformationParams, x: f64) -> f64 {
    match p.regime() {
        Regime::SubOne => 1.0 / (PI * (-p.ln_q()) * (p.eta() + x)),
        Regime::SuperOne => 1.0 / (PI * (1.0 + x / p.eta())),
    }
}

/// K(z, ζ) = ⟨ζ|z⟩ · w(|ζ|²).
pub fn kernel_k(p: &DeformationParams, z: Complex64, zeta: Complex64) -> Result<KernelValue> {
    let value = overlap(p, zeta, z)? * kernel_weight(p, zeta.norm_sqr());
    Ok(KernelValue { z, zeta, value })
}

/// K(z, z) as the geometric series in t = (q−1)|z|²/(l²q^λ), with prefactor
/// (1−q)/(l²q^λ π ln q^{−1}) for q<1 and 1/π for q>1.
pub fn kernel_diagonal_series(p: &DeformationParams, z: Complex64) -> Result<f64> {
    let t = (p.q() - 1.0) * z.norm_sqr() / p.coupling();
    if t.abs() >= 1.0 {
        return Err(Error::Divergent(format!("diagonal kernel series needs |t| < 1, got t = {t}")));
    }
    let pref = match p.regime() {
        Regime::SubOne => (1.0 - p.q()) / (p.coupling() * PI * (-p.ln_q())),
        Regime::SuperOne => 1.0 / PI,
    };
    let s = sum_ratio_series(Complex64::new(1.0, 0.0), |_| Ok(Complex64::new(t, 0.0)), &SeriesPolicy::from_env())?.require()?;
    Ok(pref * s.value.re)
}

/// |K(z,ζ) − conj K(ζ,z)| and the weight ratio w(|ζ|²)/w(|z|²) that separates them.
pub fn kernel_hermiticity_gap(p: &DeformationParams, z: Complex64, zeta: Complex64) -> Result<(f64, f64)> {
    let a = kernel_k(p, z, zeta)?.value;
    let b = kernel_k(p, zeta, z)?.value.conj();
    Ok(((a - b).norm(), kernel_weight(p, zeta.norm_sqr()) / kernel_weight(p, z.norm_sqr())))
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct KernelCheck {
    pub integral: Complex64,
    pub target: Complex64,
    pub residual: f64,
}

fn resolution_diagonal(p: &DeformationParams, t: Truncation, spec: &RadialSpec) -> Result<Vec<f64>> {
    Ok(RadialMeasure::resolution(p, t.dim - 1, spec)?.normalized_moments(p, t.dim - 1))
}

/// ∫ d²ζ K(z,ζ) K(ζ,z′) against K(z,z′), the ζ integral on the resolution quadrature.
pub fn kernel_idempotence(p: &DeformationParams, z: Complex64, z_prime: Complex64, t: Truncation, spec: &RadialSpec) -> Result<KernelCheck> {
    let diag = resolution_diagonal(p, t, spec)?;
    let (vz, vzp) = (coherent_vector(p, z, t)?, coherent_vector(p, z_prime, t)?);
    let inner: Complex64 = (0..t.dim).map(|n| vzp.coeffs[n].conj() * vz.coeffs[n] * diag[n]).sum();
    let integral = inner * kernel_weight(p, z_prime.norm_sqr());
    let target = kernel_k(p, z, z_prime)?.value;
    Ok(KernelCheck { integral, target, residual: (integral - target).norm() })
}

/// ρ(z′,z) against ∫ d²ζ ρ(z′,ζ) K(z,ζ).
pub fn reproducing_check(p: &DeformationParams, rho: &DensityCoefficients, z_prime: Complex64, z: Complex64, spec: &RadialSpec) -> Result<KernelCheck> {
    let t = Truncation::new(rho.rho.nrows())?;
    let diag = resolution_diagonal(p, t, spec)?;
    let (vz, vzp) = (coherent_vector(p, z, t)?, coherent_vector(p, z_prime, t)?);
    let left = rho.rho.adjoint() * &vzp.coeffs;
    let integral: Complex64 = (0..t.dim).map(|n| left[n].conj() * diag[n] * vz.coeffs[n]).sum();
    let target = rho_function(p, rho, z_prime, z)?;
    Ok(KernelCheck { integral, target, residual: (integral - target).norm() })
}

/// The argument order as displayed, ∫ d²ζ K(ζ,z) ρ(z′,ζ): the angular integral leaves
/// only the vacuum term, so it is ρ(0,0)⟨z′|0⟩⟨z|0⟩ w(|z|²) ∫ d²ζ/𝒩(|ζ|²).
pub fn reproducing_check_displayed_order(p: &DeformationParams, rho: &DensityCoefficients, z_prime: Complex64, z: Complex64, spec: &RadialSpec) -> Result<KernelCheck> {
    let t = Truncation::new(rho.rho.nrows())?;
    let plain = RadialMeasure::plain(p, 0, spec)?;
    let mass: f64 = plain.nodes.iter().map(|nd| nd.ln_weight.exp()).sum();
    let (vz, vzp) = (coherent_vector(p, z, t)?, coherent_vector(p, z_prime, t)?);
    let integral = vzp.coeffs[0].conj() * rho.rho[(0, 0)] * vz.coeffs[0].conj() * kernel_weight(p, z.norm_sqr()) * mass;
    let target = rho_function(p, rho, z_prime, z)?;
    Ok(KernelCheck { integral, target, residual: (integral - target).norm() })
}
