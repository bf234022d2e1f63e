use std::ops::Mul;

use num_complex::Complex64;

use super::params::{DeformationParams, Regime};
use super::series::{sum_terms, SeriesPolicy, SeriesValue};
use crate::error::{Error, Result};

/// ∂f(y) = l² q^λ (f(y) − f(y/q)) / ((q − 1) y).
pub fn jackson_derivative<F>(f: F, y: f64, p: &DeformationParams) -> Result<f64>
where
    F: Fn(f64) -> f64,
{
    if y == 0.0 {
        return Err(Error::Domain("Jackson derivative at y = 0; use the polynomial form".into()));
    }
    Ok(p.coupling() * (f(y) - f(y / p.q())) / ((p.q() - 1.0) * y))
}

/// Action on coefficient vectors: c_n yⁿ ↦ φ(n) c_n y^{n−1}.
pub fn jackson_derivative_poly<T>(coeffs: &[T], p: &DeformationParams) -> Vec<T>
where
    T: Clone + Mul<f64, Output = T>,
{
    coeffs.iter().enumerate().skip(1).map(|(n, c)| c.clone() * p.phi(n)).collect()
}

/// ∫₀^b f d_q x, the right inverse of [`jackson_derivative`] for q > 1:
/// q^{1−λ}/l² · b(1 − q^{−1}) Σ_k q^{−k} f(b q^{−k}).
pub fn jackson_integral<F>(f: F, b: f64, p: &DeformationParams) -> Result<SeriesValue>
where
    F: Fn(f64) -> f64,
{
    p.require_regime(Regime::SuperOne)?;
    if !(b > 0.0 && b <= p.radius() * (1.0 + 1e-15)) {
        return Err(Error::Domain(format!("upper limit {b} outside (0, R = {}]", p.radius())));
    }
    let base = 1.0 / p.q();
    let pref = p.q().powf(1.0 - p.lambda()) / p.lsq() * b * (1.0 - base);
    let s = sum_terms(
        |k| {
            let w = base.powi(k as i32);
            Complex64::new(w * f(b * w), 0.0)
        },
        &SeriesPolicy::from_env(),
    );
    Ok(SeriesValue { value: s.value * pref, tail_bound: s.tail_bound * pref.abs(), ..s })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn params(q: f64, lsq: f64, lambda: f64) -> DeformationParams {
        DeformationParams::new(q, lsq, lambda).unwrap()
    }

    #[test]
    fn derivative_of_constant_and_monomials() {
        let p = params(0.5, 1.3, 0.4);
        assert_eq!(jackson_derivative(|_| 3.0, 0.7, &p).unwrap(), 0.0);
        for n in 1..8 {
            let y: f64 = 0.9;
            let d = jackson_derivative(|x| x.powi(n), y, &p).unwrap();
            let expect = p.phi(n as usize) * y.powi(n - 1);
            assert!((d - expect).abs() < 1e-12 * expect.abs());
        }
        assert!(jackson_derivative(|x| x, 0.0, &p).is_err());
    }

    #[test]
    fn derivative_classical_limit() {
        for eps in [1e-5, -1e-5] {
            let p = params(1.0 + eps, 1.0, 0.0);
            let y = 0.8;
            let d = jackson_derivative(|x| x.sin() * x.exp(), y, &p).unwrap();
            let exact = y.cos() * y.exp() + y.sin() * y.exp();
            assert!((d - exact).abs() < 1e-4);
        }
    }

    #[test]
    fn poly_rules() {
        let p = params(2.0, 1.0, 0.0);
        assert!(jackson_derivative_poly(&[5.0], &p).is_empty());
        let d = jackson_derivative_poly(&[0.0, 0.0, 1.0], &p);
        assert_eq!(d, vec![0.0, p.phi(2)]);
        for deg in 0..=10usize {
            let mut c = vec![0.0; deg + 1];
            c[deg] = 1.0;
            for _ in 0..deg {
                c = jackson_derivative_poly(&c, &p);
            }
            let prod: f64 = (1..=deg).map(|k| p.phi(k)).product();
            assert!((c[0] - prod).abs() <= 1e-13 * prod);
        }
    }

    #[test]
    fn integral_zero_and_fundamental_theorem() {
        let p = params(2.0, 1.0, 0.5);
        assert_eq!(jackson_integral(|_| 0.0, 1.0, &p).unwrap().value.re, 0.0);
        let f = |x: f64| (1.0 + x).recip() + x.cos();
        let b = p.radius();
        let big_f = |x: f64| jackson_integral(f, x, &p).unwrap().value.re;
        for k in 0..12 {
            let y = b * p.q().powi(-k);
            let d = jackson_derivative(big_f, y, &p).unwrap();
            assert!((d - f(y)).abs() < 1e-12, "k={k}: {d} vs {}", f(y));
        }
    }

    #[test]
    fn integral_lattice_sum_for_trace() {
        // ∫₀^R x^{1/2} d_qx against R^{1/2} Σ q^{-3n/2} times the prefactor
        let p = params(2.0, 1.0, 0.0);
        let r = p.radius();
        let j = jackson_integral(|x| x.sqrt(), r, &p).unwrap().value.re;
        let sum: f64 = (0..50).map(|n| p.q().powf(-1.5 * n as f64)).sum();
        let pref = p.q().powf(1.0 - p.lambda()) / p.lsq() * r * (1.0 - 1.0 / p.q());
        assert!((j - pref * r.sqrt() * sum).abs() < 1e-13);
        // with this prefactor the lattice weight is exactly q^{-k}
        assert!((pref - 1.0).abs() < 1e-15);
    }

    #[test]
    fn integral_regime_and_limits() {
        assert!(jackson_integral(|x| x, 1.0, &params(0.5, 1.0, 0.0)).is_err());
        assert!(jackson_integral(|x| x, 2.0, &params(2.0, 1.0, 0.0)).is_err());
    }
}
