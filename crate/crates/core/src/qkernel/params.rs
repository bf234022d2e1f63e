use serde::Serialize;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Regime {
    /// 0 < q < 1: unbounded spectrum of φ(N), coherent states on the whole plane.
    SubOne,
    /// q > 1: φ(N) bounded by R, coherent states on the disc |z|² < R.
    SuperOne,
}

impl Regime {
    pub fn name(self) -> &'static str {
        match self {
            Regime::SubOne => "0<q<1",
            Regime::SuperOne => "q>1",
        }
    }
}

/// The triple (q, l², λ) with the derived constants γ, η and R.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DeformationParams {
    q: f64,
    lsq: f64,
    lambda: f64,
    gamma: f64,
    eta: f64,
    radius: f64,
    regime: Regime,
}

impl DeformationParams {
    pub fn new(q: f64, lsq: f64, lambda: f64) -> Result<Self> {
        if !(q.is_finite() && q > 0.0) || q == 1.0 {
            return Err(Error::Parameter(format!("q must be positive and != 1, got {q}")));
        }
        if !lsq.is_finite() || lsq == 0.0 {
            return Err(Error::Parameter(format!("lsq must be finite and nonzero, got {lsq}")));
        }
        if !lambda.is_finite() {
            return Err(Error::Parameter(format!("lambda must be finite, got {lambda}")));
        }
        let coupling = lsq * q.powf(lambda);
        let gamma = lsq * q.powf(lambda - 1.0) / (1.0 - q);
        let eta = coupling / (1.0 - q);
        let (regime, radius) = if q < 1.0 {
            (Regime::SubOne, f64::INFINITY)
        } else {
            (Regime::SuperOne, coupling / (q - 1.0))
        };
        Ok(Self { q, lsq, lambda, gamma, eta, radius, regime })
    }

    pub fn q(&self) -> f64 {
        self.q
    }
    pub fn lsq(&self) -> f64 {
        self.lsq
    }
    pub fn lambda(&self) -> f64 {
        self.lambda
    }
    pub fn gamma(&self) -> f64 {
        self.gamma
    }
    pub fn eta(&self) -> f64 {
        self.eta
    }
    /// Convergence radius of 𝒩 in the variable t = |z|²; infinite for q < 1.
    pub fn radius(&self) -> f64 {
        self.radius
    }
    pub fn regime(&self) -> Regime {
        self.regime
    }
    pub fn ln_q(&self) -> f64 {
        self.q.ln()
    }
    /// l² q^λ, the prefactor of φ.
    pub fn coupling(&self) -> f64 {
        self.lsq * self.q.powf(self.lambda)
    }

    pub fn phi(&self, n: usize) -> f64 {
        structure_phi(self, n)
    }

    /// φ at an arbitrary real index (used for the Kerr φ(s−1) term and limits).
    pub fn phi_real(&self, x: f64) -> f64 {
        self.coupling() * (-(-x * self.ln_q()).exp_m1()) / (self.q - 1.0)
    }

    pub fn require_positive_lsq(&self) -> Result<()> {
        if self.lsq > 0.0 {
            Ok(())
        } else {
            Err(Error::Parameter(format!(
                "lsq must be positive for the Fock representation, got {}",
                self.lsq
            )))
        }
    }

    pub fn require_regime(&self, r: Regime) -> Result<()> {
        if self.regime == r {
            Ok(())
        } else {
            Err(Error::Regime { expected: r.name() })
        }
    }

    /// Whether x = |z|² lies inside the coherent-state domain.
    pub fn in_domain(&self, x: f64) -> bool {
        x >= 0.0 && x < self.radius
    }

    pub fn require_domain(&self, x: f64) -> Result<()> {
        if self.in_domain(x) {
            Ok(())
        } else {
            Err(Error::Domain(format!("|z|^2 = {x} outside [0, R = {})", self.radius)))
        }
    }
}

/// 1 − q^k without cancellation near q = 1. Exactly zero for k = 0.
pub fn one_minus_q_pow(q: f64, k: i64) -> f64 {
    -((k as f64) * q.ln()).exp_m1()
}

/// φ(n) = l² q^λ (1 − q^{−n})/(q − 1).
pub fn structure_phi(p: &DeformationParams, n: usize) -> f64 {
    p.coupling() * one_minus_q_pow(p.q, -(n as i64)) / (p.q - 1.0)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_bad_triples() {
        assert!(DeformationParams::new(1.0, 1.0, 0.0).is_err());
        assert!(DeformationParams::new(-0.5, 1.0, 0.0).is_err());
        assert!(DeformationParams::new(0.5, 0.0, 0.0).is_err());
        assert!(DeformationParams::new(0.5, 1.0, f64::NAN).is_err());
    }

    #[test]
    fn derived_constants() {
        let p = DeformationParams::new(0.5, 1.0, 0.0).unwrap();
        assert_eq!(p.gamma(), 4.0);
        assert_eq!(p.eta(), 2.0);
        assert!(p.radius().is_infinite());
        let p = DeformationParams::new(2.0, 1.0, 1.0).unwrap();
        assert_eq!(p.regime(), Regime::SuperOne);
        assert!((p.radius() - 2.0).abs() < 1e-15);
        assert!((p.eta() - p.q() * p.gamma()).abs() < 1e-15);
    }

    #[test]
    fn phi_small_values() {
        let p = DeformationParams::new(0.5, 1.0, 0.0).unwrap();
        assert_eq!(p.phi(0), 0.0);
        assert!((p.phi(1) - 2.0).abs() < 1e-15);
        let p = DeformationParams::new(2.0, 0.3, 1.0).unwrap();
        assert!((p.phi(1) - 0.3 * 2f64.powf(0.0)).abs() < 1e-15);
    }

    #[test]
    fn phi_classical_limit() {
        for eps in [1e-4, -1e-4] {
            let p = DeformationParams::new(1.0 + eps, 1.0, 0.0).unwrap();
            for n in 0..20 {
                assert!((p.phi(n) - n as f64).abs() < 1e-3 * (1.0 + n as f64));
            }
        }
    }

    #[test]
    fn phi_monotone_and_bounded() {
        for (q, lambda) in [(0.5, 0.0), (2.0, 1.0), (1.3, -0.5)] {
            let p = DeformationParams::new(q, 0.7, lambda).unwrap();
            let mut prev = -1.0;
            for n in 0..=200 {
                let v = p.phi(n);
                // strict until 1 − q^{−n} rounds to 1
                if q < 1.0 || n < 40 {
                    assert!(v > prev, "q={q} n={n}");
                } else {
                    assert!(v >= prev, "q={q} n={n}");
                }
                if q > 1.0 {
                    assert!(v <= p.radius() * (1.0 + 1e-15));
                }
                prev = v;
            }
        }
    }
}
