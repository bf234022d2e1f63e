use std::f64::consts::PI;
use std::ops::Mul;

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::fock::Truncation;
use crate::qkernel::{jackson_derivative_poly, norm_log, q_shifted_qpow, DeformationParams, LogMagnitude, Regime};

use super::measure::{ln_coeff_sq, RadialMeasure, RadialSpec};
use super::state::coherent_vector;

#[derive(Debug, Clone, Serialize)]
pub struct DensityCoefficients {
    #[serde(skip)]
    pub rho: DMatrix<Complex64>,
    pub trace: f64,
}

#[derive(Clone)]
struct MatPoly(DMatrix<Complex64>);

impl Mul<f64> for MatPoly {
    type Output = MatPoly;
    fn mul(self, rhs: f64) -> MatPoly {
        MatPoly(self.0 * Complex64::new(rhs, 0.0))
    }
}

/// Rebuilds |n⟩⟨m| from the coherent-state projectors: Fourier filter e^{isθ} with
/// s = m − n on 𝒩(r²)|re^{iθ}⟩⟨re^{iθ}| (a matrix polynomial in r), n+m Jackson
/// derivatives in r, evaluation at r = 0, then the normalizing prefactor.
pub fn projector_reconstruct(p: &DeformationParams, n: usize, m: usize, t: Truncation) -> Result<DMatrix<Complex64>> {
    p.require_positive_lsq()?;
    let d = t.dim;
    if n >= d || m >= d {
        return Err(Error::Truncation { needed: n.max(m) + 1, dim: d });
    }
    let lc = ln_coeff_sq(p, d - 1);
    let s = m as i64 - n as i64;
    let degree = 2 * (d - 1);
    let mut poly = vec![MatPoly(DMatrix::zeros(d, d)); degree + 1];
    // trapezoid in θ is exact for these trigonometric polynomials
    let nodes = 2 * d + 1;
    for j in 0..nodes {
        let theta = 2.0 * PI * j as f64 / nodes as f64;
        let filter = Complex64::from_polar(1.0 / nodes as f64, s as f64 * theta);
        for a in 0..d {
            for b in 0..d {
                let c = (0.5 * (lc[a] + lc[b])).exp();
                poly[a + b].0[(a, b)] += filter * Complex64::from_polar(c, (a as f64 - b as f64) * theta);
            }
        }
    }
    for _ in 0..n + m {
        poly = jackson_derivative_poly(&poly, p);
    }
    let at_zero = poly.into_iter().next().map(|c| c.0).unwrap_or_else(|| DMatrix::zeros(d, d));
    Ok(at_zero * Complex64::new(projector_prefactor(p, n, m)?, 0.0))
}

/// (q^{C(n+m,2)+nm} / (γ^{n+m} (q^{1+n};q)_m (q^{1+m};q)_n))^{1/2}
fn projector_prefactor(p: &DeformationParams, n: usize, m: usize) -> Result<f64> {
    let q = p.q();
    let k = n + m;
    let e = (k * k.saturating_sub(1) / 2 + n * m) as f64;
    let den = LogMagnitude::from_f64(p.gamma()).powi(k as i64) * q_shifted_qpow(q, 1 + n as i64, m) * q_shifted_qpow(q, 1 + m as i64, n);
    if den.sign() <= 0.0 {
        return Err(Error::Domain("projector prefactor has a non-positive radicand".into()));
    }
    Ok((LogMagnitude::from_ln(e * q.ln(), 1.0) / den).sqrt_abs().value())
}

/// φ₂(x) = 1/(π𝒩(x)), the Gaussian-analogue radial weight (zero at x = R for q>1).
pub fn gaussian_weight(p: &DeformationParams, x: f64) -> f64 {
    if p.regime() == Regime::SuperOne && x >= p.radius() {
        return 0.0;
    }
    norm_log(x, p).map(|l| (-l).exp() / PI).unwrap_or(0.0)
}

/// ∫ d²z φ₂(|z|²) for the Gaussian-analogue weight: γ ln q^{−1} (q<1), q^{−1} (q>1).
pub fn gaussian_weight_mass(p: &DeformationParams) -> f64 {
    match p.regime() {
        Regime::SubOne => p.gamma() * (-p.ln_q()),
        Regime::SuperOne => 1.0 / p.q(),
    }
}

/// ρ(n,n) = π c_n² ∫ φ₂(x) xⁿ/𝒩(x) dx (q<1) or the Jackson integral over (0, R] (q>1).
/// Off-diagonal entries vanish for rotation-invariant weights.
pub fn density_from_weight<F>(p: &DeformationParams, phi2: F, t: Truncation, spec: &RadialSpec) -> Result<DensityCoefficients>
where
    F: Fn(f64) -> f64,
{
    let d = t.dim;
    let m = RadialMeasure::plain(p, d - 1, spec)?;
    let lc = ln_coeff_sq(p, d - 1);
    let mut diag = vec![0.0f64; d];
    for nd in m.nodes.iter().filter(|nd| nd.ln_weight > f64::NEG_INFINITY) {
        let w = phi2(nd.point.x);
        if w == 0.0 {
            continue;
        }
        for (n, slot) in diag.iter_mut().enumerate() {
            *slot += w * (lc[n] + n as f64 * nd.point.ln_x + nd.ln_weight).exp();
        }
    }
    if diag.iter().any(|v| !v.is_finite()) {
        return Err(Error::Divergent("radial weight is not integrable against 1/𝒩".into()));
    }
    let trace = diag.iter().sum();
    let rho = DMatrix::from_fn(d, d, |i, j| if i == j { Complex64::new(diag[i], 0.0) } else { Complex64::new(0.0, 0.0) });
    Ok(DensityCoefficients { rho, trace })
}

/// ρ(z′, z) = ⟨z′|ρ|z⟩ on the truncated space.
pub fn rho_function(p: &DeformationParams, rho: &DensityCoefficients, z_prime: Complex64, z: Complex64) -> Result<Complex64> {
    let t = Truncation::new(rho.rho.nrows())?;
    let (a, b) = (coherent_vector(p, z_prime, t)?, coherent_vector(p, z, t)?);
    Ok(a.coeffs.dotc(&(&rho.rho * &b.coeffs)))
}

/// tr(ρ F) on the truncated space.
pub fn trace_with(rho: &DensityCoefficients, op: &DMatrix<Complex64>) -> Complex64 {
    (&rho.rho * op).trace()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn elementary(d: usize, n: usize, m: usize) -> DMatrix<Complex64> {
        let mut e = DMatrix::zeros(d, d);
        e[(n, m)] = Complex64::new(1.0, 0.0);
        e
    }

    #[test]
    fn projector_vacuum_exact() {
        let p = DeformationParams::new(0.5, 1.0, 0.0).unwrap();
        let r = projector_reconstruct(&p, 0, 0, Truncation::new(6).unwrap()).unwrap();
        assert!((r - elementary(6, 0, 0)).iter().all(|c| c.norm() < 1e-15));
    }

    #[test]
    fn projectors_recovered_both_regimes() {
        for (q, lsq, lambda) in [(0.5, 1.0, 0.0), (0.7, 1.3, 1.0), (2.0, 1.0, 0.0), (2.5, 0.8, -0.5)] {
            let p = DeformationParams::new(q, lsq, lambda).unwrap();
            let t = Truncation::new(12).unwrap();
            for n in 0..=5 {
                for m in 0..=5 {
                    let r = projector_reconstruct(&p, n, m, t).unwrap();
                    let err = (r - elementary(12, n, m)).iter().map(|c| c.norm()).fold(0.0, f64::max);
                    assert!(err < 1e-9, "q={q} ({n},{m}): {err}");
                }
            }
        }
    }

    #[test]
    fn gaussian_density_trace_matches_mass() {
        for (q, lambda) in [(0.5, 0.0), (0.5, 1.0), (2.0, 0.0), (2.0, 1.0)] {
            let p = DeformationParams::new(q, 1.0, lambda).unwrap();
            let mass = gaussian_weight_mass(&p);
            let rho = density_from_weight(&p, |x| gaussian_weight(&p, x) / mass, Truncation::new(64).unwrap(), &RadialSpec::default()).unwrap();
            assert!((rho.trace - 1.0).abs() < 1e-8, "q={q}: {}", rho.trace);
            let h = rho.rho.adjoint();
            assert!((&rho.rho - h).iter().all(|c| c.norm() == 0.0));
        }
    }

    #[test]
    fn divergent_weight_flagged() {
        let p = DeformationParams::new(0.5, 1.0, 0.0).unwrap();
        let r = density_from_weight(&p, |x| (x * x).exp(), Truncation::new(8).unwrap(), &RadialSpec::default());
        assert!(r.is_err());
    }
}
