use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::fock::Truncation;
use crate::qkernel::{norm_log, norm_ratio, norm_series, sum_ratio_series, DeformationParams, SeriesPolicy};

use super::measure::{ln_coeff_sq, RadialMeasure, RadialSpec};

#[derive(Debug, Clone, Serialize)]
pub struct CoherentVector {
    pub z: Complex64,
    #[serde(skip)]
    pub coeffs: DVector<Complex64>,
    /// 𝒩(|z|²)
    pub norm_sq: f64,
    /// Weight Σ_{n≥dim} |coeff_n|² cut off by the truncation, plus rounding.
    pub tail_error: f64,
}

/// |z⟩ = 𝒩(|z|²)^{−1/2} Σ q^{n(n−1)/4} zⁿ / √(γⁿ(q;q)_n) |n⟩ on |0⟩…|dim−1⟩.
pub fn coherent_vector(p: &DeformationParams, z: Complex64, t: Truncation) -> Result<CoherentVector> {
    p.require_positive_lsq()?;
    let x = z.norm_sqr();
    p.require_domain(x)?;
    let ln_norm = norm_log(x, p)?;
    let lc = ln_coeff_sq(p, t.dim - 1);
    let (ln_r, theta) = (z.norm().ln(), z.arg());
    let coeffs = DVector::from_fn(t.dim, |n, _| {
        if n == 0 {
            return Complex64::new((-0.5 * ln_norm).exp(), 0.0);
        }
        if x == 0.0 {
            return Complex64::new(0.0, 0.0);
        }
        let mag = (0.5 * lc[n] + n as f64 * ln_r - 0.5 * ln_norm).exp();
        Complex64::from_polar(mag, n as f64 * theta)
    });
    let tail = if x == 0.0 {
        0.0
    } else {
        // Σ_{n≥dim} xⁿ c_n² / 𝒩, continued by the series ratio
        let first = (lc[t.dim - 1] + (t.dim - 1) as f64 * x.ln() - ln_norm).exp() * x * norm_ratio(p, t.dim - 1);
        let s = sum_ratio_series(Complex64::new(first, 0.0), |k| Ok(Complex64::new(x * norm_ratio(p, t.dim + k), 0.0)), &SeriesPolicy::from_env())?;
        if s.converged { s.value.re + s.tail_bound } else { f64::INFINITY }
    };
    let rounding = 4.0 * f64::EPSILON * t.dim as f64;
    Ok(CoherentVector { z, coeffs, norm_sq: ln_norm.exp(), tail_error: tail + rounding })
}

/// ⟨z1|z2⟩ = 𝒩(z̄₁z₂) / √(𝒩(|z1|²)𝒩(|z2|²)).
pub fn overlap(p: &DeformationParams, z1: Complex64, z2: Complex64) -> Result<Complex64> {
    p.require_positive_lsq()?;
    let (x1, x2) = (z1.norm_sqr(), z2.norm_sqr());
    p.require_domain(x1)?;
    p.require_domain(x2)?;
    let cross = norm_series(z1.conj() * z2, p)?.require()?;
    let ln_den = 0.5 * (norm_log(x1, p)? + norm_log(x2, p)?);
    Ok(cross.value * (-ln_den).exp())
}

#[derive(Debug, Clone)]
pub struct ResolutionReport {
    /// M − I on the valid rows, M = ∫ dμ |z⟩⟨z| on the truncated space.
    pub residual: DMatrix<Complex64>,
    pub max_abs: f64,
    pub evals: usize,
    pub achieved: f64,
}

/// Angular integral done exactly: M is diagonal with M_nn = c_n² ∫ xⁿ dμ/𝒩.
pub fn identity_resolution_check(p: &DeformationParams, t: Truncation, spec: &RadialSpec) -> Result<ResolutionReport> {
    let m = RadialMeasure::resolution(p, t.dim - 1, spec)?;
    let diag = m.normalized_moments(p, t.dim - 1);
    let v = t.valid_rows;
    let residual = DMatrix::from_fn(v, v, |i, j| if i == j { Complex64::new(diag[i] - 1.0, 0.0) } else { Complex64::new(0.0, 0.0) });
    let max_abs = residual.iter().map(|c| c.norm()).fold(0.0, f64::max);
    if !max_abs.is_finite() {
        return Err(Error::Quadrature { evals: m.evals, achieved: max_abs, wanted: spec.tol });
    }
    Ok(ResolutionReport { residual, max_abs, evals: m.evals, achieved: m.achieved })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fock::build_ladder;

    fn grid(p: &DeformationParams) -> Vec<Complex64> {
        let r = if p.q() > 1.0 { 0.8 * p.radius().sqrt() } else { 1.5 };
        let mut out = Vec::new();
        for i in 0..5 {
            for j in 0..5 {
                let re = -r / 2f64.sqrt() + r * 2f64.sqrt() * i as f64 / 4.0;
                let im = -r / 2f64.sqrt() + r * 2f64.sqrt() * j as f64 / 4.0;
                out.push(Complex64::new(re, im));
            }
        }
        out
    }

    fn params() -> Vec<DeformationParams> {
        [(0.5, 1.0, 0.0), (0.5, 1.0, 1.0), (2.0, 1.0, 0.0), (2.0, 1.0, 1.0)]
            .iter()
            .map(|&(q, l, la)| DeformationParams::new(q, l, la).unwrap())
            .collect()
    }

    #[test]
    fn vacuum_at_origin() {
        let p = DeformationParams::new(0.5, 1.0, 0.0).unwrap();
        let v = coherent_vector(&p, Complex64::new(0.0, 0.0), Truncation::new(8).unwrap()).unwrap();
        assert_eq!(v.coeffs[0], Complex64::new(1.0, 0.0));
        assert!(v.coeffs.iter().skip(1).all(|c| *c == Complex64::new(0.0, 0.0)));
    }

    #[test]
    fn domain_enforced() {
        let p = DeformationParams::new(2.0, 1.0, 0.0).unwrap();
        assert!(coherent_vector(&p, Complex64::new(1.0, 0.0), Truncation::new(8).unwrap()).is_err());
        assert!(overlap(&p, Complex64::new(0.2, 0.0), Complex64::new(0.0, 1.1)).is_err());
    }

    #[test]
    fn normalized_and_eigenvector() {
        let t = Truncation::new(64).unwrap();
        for p in params() {
            let lad = build_ladder(&p, t).unwrap();
            for z in grid(&p) {
                if !p.in_domain(z.norm_sqr()) {
                    continue;
                }
                let v = coherent_vector(&p, z, t).unwrap();
                let nrm: f64 = v.coeffs.iter().map(|c| c.norm_sqr()).sum();
                assert!((nrm - 1.0).abs() <= v.tail_error, "norm {nrm} tail {}", v.tail_error);
                let av = &lad.a.matrix * &v.coeffs - &v.coeffs * z;
                let res = av.rows(0, t.dim - 1).iter().map(|c| c.norm()).fold(0.0, f64::max);
                assert!(res < 1e-10f64.max(v.tail_error), "z={z}: {res}");
            }
        }
    }

    #[test]
    fn overlap_properties() {
        let t = Truncation::new(64).unwrap();
        for p in params() {
            let g = grid(&p);
            for &z1 in g.iter().step_by(3) {
                assert!((overlap(&p, z1, z1).unwrap() - 1.0).norm() < 1e-13);
                for &z2 in g.iter().step_by(4) {
                    let o = overlap(&p, z1, z2).unwrap();
                    assert!(o.norm() <= 1.0 + 1e-13);
                    let (v1, v2) = (coherent_vector(&p, z1, t).unwrap(), coherent_vector(&p, z2, t).unwrap());
                    let dot = v1.coeffs.dotc(&v2.coeffs);
                    assert!((dot - o).norm() < 1e-10f64.max(2.0 * (v1.tail_error + v2.tail_error).sqrt()));
                }
            }
        }
    }

    #[test]
    fn resolution_of_identity_both_regimes() {
        let t = Truncation { dim: 64, valid_rows: 32 };
        for p in params() {
            let r = identity_resolution_check(&p, t, &RadialSpec::default()).unwrap();
            assert!(r.max_abs < 1e-6, "{p:?}: {}", r.max_abs);
        }
    }
}
