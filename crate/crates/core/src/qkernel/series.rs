use num_complex::Complex64;
use serde::Serialize;

use super::params::{one_minus_q_pow, DeformationParams, Regime};
use super::pochhammer::log_q_shifted_inf_real;
use crate::error::{Error, Result};

const DEFAULT_MAX_TERMS: usize = 10_000;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SeriesValue {
    pub value: Complex64,
    pub terms_used: usize,
    pub tail_bound: f64,
    pub converged: bool,
}

impl SeriesValue {
    pub fn exact(value: Complex64) -> Self {
        Self { value, terms_used: 1, tail_bound: 0.0, converged: true }
    }

    /// Turns a non-converged result into an error.
    pub fn require(self) -> Result<Self> {
        if self.converged {
            Ok(self)
        } else {
            Err(Error::NonConvergence { terms: self.terms_used, last_term: self.tail_bound })
        }
    }
}

/// Stop after `quiet_run` consecutive terms below `rel_tol·|partial|`.
#[derive(Debug, Clone, Copy)]
pub struct SeriesPolicy {
    pub rel_tol: f64,
    pub quiet_run: usize,
    pub max_terms: usize,
}

impl Default for SeriesPolicy {
    fn default() -> Self {
        Self { rel_tol: 1e-16, quiet_run: 3, max_terms: DEFAULT_MAX_TERMS }
    }
}

impl SeriesPolicy {
    /// Default policy with the term cap taken from `QOSC_MAX_TERMS` when set.
    pub fn from_env() -> Self {
        let max_terms = std::env::var("QOSC_MAX_TERMS")
            .ok()
            .and_then(|s| s.trim().parse::<usize>().ok())
            .filter(|&n| n > 0)
            .unwrap_or(DEFAULT_MAX_TERMS);
        Self { max_terms, ..Self::default() }
    }
}

struct Accumulator {
    sum: Complex64,
    abs_sum: f64,
    terms: usize,
    quiet: usize,
    last: [f64; 2],
}

impl Accumulator {
    fn new(first: Complex64) -> Self {
        Self { sum: first, abs_sum: first.norm(), terms: 1, quiet: 0, last: [0.0, first.norm()] }
    }

    fn push(&mut self, term: Complex64, policy: &SeriesPolicy) {
        self.sum += term;
        self.abs_sum += term.norm();
        self.terms += 1;
        self.last = [self.last[1], term.norm()];
        if term.norm() < policy.rel_tol * self.sum.norm() {
            self.quiet += 1;
        } else {
            self.quiet = 0;
        }
    }

    fn rounding(&self) -> f64 {
        2.0 * self.terms as f64 * f64::EPSILON * self.abs_sum
    }

    fn finish(&self, ratio: f64) -> SeriesValue {
        let tail = if ratio < 1.0 {
            2.0 * self.last[1] * ratio / (1.0 - ratio)
        } else {
            f64::INFINITY
        };
        SeriesValue {
            value: self.sum,
            terms_used: self.terms,
            tail_bound: tail + self.rounding(),
            converged: tail.is_finite(),
        }
    }

    fn terminated(&self) -> SeriesValue {
        SeriesValue { value: self.sum, terms_used: self.terms, tail_bound: self.rounding(), converged: true }
    }

    fn exhausted(&self) -> SeriesValue {
        SeriesValue { value: self.sum, terms_used: self.terms, tail_bound: f64::INFINITY, converged: false }
    }
}

/// Σ t_n with t_0 = `first` and t_{n+1} = t_n · ratio(n).
///
/// A zero term ends the sum (terminating series). The tail bound is the geometric
/// remainder from the larger of the last two term ratios, plus a rounding term.
pub fn sum_ratio_series<F>(first: Complex64, mut ratio: F, policy: &SeriesPolicy) -> Result<SeriesValue>
where
    F: FnMut(usize) -> Result<Complex64>,
{
    let mut acc = Accumulator::new(first);
    let mut term = first;
    let mut rho = [0.0f64; 2];
    loop {
        if term == Complex64::new(0.0, 0.0) {
            return Ok(acc.terminated());
        }
        if acc.quiet >= policy.quiet_run {
            return Ok(acc.finish(rho[0].max(rho[1])));
        }
        if acc.terms >= policy.max_terms {
            return Ok(acc.exhausted());
        }
        let r = ratio(acc.terms - 1)?;
        rho = [rho[1], r.norm()];
        term *= r;
        if !term.re.is_finite() || !term.im.is_finite() {
            return Ok(acc.exhausted());
        }
        acc.push(term, policy);
    }
}

/// The same recursion summed for exactly `n_terms` terms, no stopping rule.
pub fn sum_ratio_fixed<F>(first: Complex64, mut ratio: F, n_terms: usize) -> Result<Complex64>
where
    F: FnMut(usize) -> Result<Complex64>,
{
    let mut sum = first;
    let mut term = first;
    for n in 0..n_terms.saturating_sub(1) {
        term *= ratio(n)?;
        sum += term;
    }
    Ok(sum)
}

/// Σ term(k) for terms given directly; tail from the ratio of the last two terms.
pub fn sum_terms<F>(mut term: F, policy: &SeriesPolicy) -> SeriesValue
where
    F: FnMut(usize) -> Complex64,
{
    let first = term(0);
    let mut acc = Accumulator::new(first);
    loop {
        if acc.quiet >= policy.quiet_run {
            let ratio = if acc.last[0] > 0.0 { acc.last[1] / acc.last[0] } else { 0.0 };
            return acc.finish(ratio);
        }
        if acc.terms >= policy.max_terms {
            return acc.exhausted();
        }
        let t = term(acc.terms);
        acc.push(t, policy);
    }
}

/// 𝒩(t) = Σ q^{n(n−1)/2} tⁿ / (γⁿ (q;q)_n).
pub fn norm_series(t: Complex64, p: &DeformationParams) -> Result<SeriesValue> {
    if p.regime() == Regime::SuperOne && t.norm() >= p.radius().abs() {
        return Err(Error::Domain(format!("|t| = {} >= R = {}", t.norm(), p.radius())));
    }
    sum_ratio_series(Complex64::new(1.0, 0.0), |n| Ok(t * norm_ratio(p, n)), &SeriesPolicy::from_env())
}

/// c_{n+1}/c_n for the coefficients of 𝒩: q^n / (γ (1 − q^{n+1})), kept finite for q > 1.
pub fn norm_ratio(p: &DeformationParams, n: usize) -> f64 {
    let q = p.q();
    if q < 1.0 {
        q.powi(n as i32) / (p.gamma() * one_minus_q_pow(q, n as i64 + 1))
    } else {
        1.0 / (p.gamma() * ((1.0 / q).powi(n as i32) - q))
    }
}

/// ln 𝒩(x) for real x ≥ 0 and l² > 0, through the product forms
/// (−x/γ; q)_∞ (q < 1) and 1/(x/R; q^{-1})_∞ (q > 1).
pub fn norm_log(x: f64, p: &DeformationParams) -> Result<f64> {
    p.require_positive_lsq()?;
    if x < 0.0 {
        return Err(Error::Domain(format!("norm_log needs x >= 0, got {x}")));
    }
    match p.regime() {
        Regime::SubOne => Ok(log_q_shifted_inf_real(-x / p.gamma(), p.q()).0),
        Regime::SuperOne => {
            p.require_domain(x)?;
            Ok(-log_q_shifted_inf_real(x / p.radius(), 1.0 / p.q()).0)
        }
    }
}

/// ₁φ₁(A; B | q; t) = Σ (−1)ⁿ q^{n(n−1)/2} (A;q)_n / ((B;q)_n (q;q)_n) tⁿ.
pub fn one_phi_one(a: Complex64, b: Complex64, q: f64, t: Complex64) -> Result<SeriesValue> {
    let one = Complex64::new(1.0, 0.0);
    sum_ratio_series(
        one,
        |n| {
            let r = if q > 1.0 {
                // divided through by q^{2n} to keep the factors bounded
                let u = (1.0 / q).powi(n as i32);
                if (u - b).norm() <= 1e-14 * (u + b.norm()) {
                    return Err(Error::Pole { index: n });
                }
                -(u - a) / ((u - b) * (u - q))
            } else {
                let qn = q.powi(n as i32);
                let den_b = one - b * qn;
                if den_b.norm() <= 1e-14 * (1.0 + (b * qn).norm()) {
                    return Err(Error::Pole { index: n });
                }
                -(one - a * qn) * qn / (den_b * one_minus_q_pow(q, n as i64 + 1))
            };
            Ok(r * t)
        },
        &SeriesPolicy::from_env(),
    )
}

/// J₀(z; q) = Σ (−1)ⁿ (z/2)^{2n} / ((q;q)_n)².
pub fn q_bessel_j0(z: Complex64, q: f64) -> Result<SeriesValue> {
    let w = -(z * 0.5) * (z * 0.5);
    sum_ratio_series(
        Complex64::new(1.0, 0.0),
        |n| {
            let d = one_minus_q_pow(q, n as i64 + 1);
            Ok(w / (d * d))
        },
        &SeriesPolicy::from_env(),
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qkernel::q_shifted;
    use proptest::prelude::*;

    fn c(x: f64) -> Complex64 {
        Complex64::new(x, 0.0)
    }

    fn params(q: f64, lsq: f64, lambda: f64) -> DeformationParams {
        DeformationParams::new(q, lsq, lambda).unwrap()
    }

    #[test]
    fn norm_at_origin() {
        for p in [params(0.5, 1.0, 0.0), params(2.0, 1.0, 1.0)] {
            assert_eq!(norm_series(c(0.0), &p).unwrap().value, c(1.0));
        }
    }

    #[test]
    fn norm_terms_positive() {
        for p in [params(0.3, 1.0, 0.0), params(0.8, 2.0, 1.0), params(2.0, 1.0, 0.0), params(3.0, 0.5, -1.0)] {
            for n in 0..200 {
                assert!(norm_ratio(&p, n) > 0.0, "q={} n={n}", p.q());
            }
        }
    }

    #[test]
    fn norm_zeros_sub_unity() {
        // zeros on the negative axis at −γ q^{−k}
        let p = params(0.6, 1.0, 0.0);
        for k in 0..3 {
            let xk = -p.gamma() * p.q().powi(-k);
            let at = norm_series(c(xk), &p).unwrap().value.norm();
            let half = norm_series(c(xk / 2.0), &p).unwrap().value.norm();
            assert!(at < 1e-8 * half, "k={k}: {at} vs {half}");
        }
    }

    #[test]
    fn norm_product_forms() {
        for p in [params(0.5, 1.0, 0.0), params(0.9, 0.4, 1.0), params(2.0, 1.0, 0.0), params(1.5, 2.0, 1.0)] {
            for frac in [0.0, 0.1, 0.5, 0.9] {
                let x = if p.regime() == Regime::SuperOne { frac * p.radius() } else { 10.0 * frac };
                let s = norm_series(c(x), &p).unwrap();
                let l = norm_log(x, &p).unwrap().exp();
                assert!((s.value.re - l).abs() < 1e-12 * l, "q={} x={x}", p.q());
            }
        }
    }

    #[test]
    fn norm_domain_guard() {
        let p = params(2.0, 1.0, 0.0);
        assert!(matches!(norm_series(c(1.0), &p), Err(Error::Domain(_))));
        assert!(norm_series(c(0.999), &p).is_ok());
    }

    #[test]
    fn norm_coefficient_recursion() {
        for p in [params(0.5, 1.0, 0.0), params(2.0, 1.0, 1.0)] {
            let q = p.q();
            let coeff = |n: usize| {
                let num = q.powf((n * n.saturating_sub(1)) as f64 / 2.0);
                num / (p.gamma().powi(n as i32) * q_shifted(c(q), q, n).re)
            };
            let t: f64 = 0.3;
            for n in 0..20 {
                let lhs = coeff(n + 1) * t.powi(n as i32 + 1) / (coeff(n) * t.powi(n as i32));
                let rhs = q.powi(n as i32) * t / (p.gamma() * (1.0 - q.powi(n as i32 + 1)));
                assert!((lhs - rhs).abs() < 1e-12 * rhs.abs());
            }
        }
    }

    #[test]
    fn one_phi_one_trivial_and_cancelled() {
        assert_eq!(one_phi_one(c(0.3), c(0.2), 0.5, c(0.0)).unwrap().value, c(1.0));
        let q = 0.6;
        let t = c(0.7);
        let lhs = one_phi_one(c(0.25), c(0.25), q, t).unwrap().value;
        let mut rhs = c(0.0);
        for n in 0..80usize {
            let s = if n % 2 == 0 { 1.0 } else { -1.0 };
            rhs += t.powu(n as u32) * (s * q.powf((n * n.saturating_sub(1)) as f64 / 2.0))
                / q_shifted(c(q), q, n);
        }
        assert!((lhs - rhs).norm() < 1e-14);
    }

    #[test]
    fn one_phi_one_pole() {
        let q: f64 = 0.5;
        let r = one_phi_one(c(0.3), c(q.powi(-2)), q, c(1.0));
        assert!(matches!(r, Err(Error::Pole { index: 2 })));
    }

    #[test]
    fn one_phi_one_reference_values() {
        // A = q², B = 0.7q, t = 0.3 − 0.2i, summed at 50 digits
        let cases = [
            (0.4, 0.4668648268068367, 0.27946554349783136),
            (0.8, 0.19136721380028035, 0.2116843263174091),
            (1.5, -22.951100201096064, -79.99528547755333),
            (2.5, 2.1371426522632252, -3.0118328305198057),
        ];
        for (q, re, im) in cases {
            let v = one_phi_one(c(q * q), c(0.7 * q), q, Complex64::new(0.3, -0.2)).unwrap().value;
            let want = Complex64::new(re, im);
            assert!((v - want).norm() < 1e-13 * want.norm(), "q={q}: {v}");
        }
    }

    #[test]
    fn one_phi_one_terminates() {
        // (q^{-2}; q)_n vanishes for n ≥ 3: a degree-2 polynomial in t
        let q: f64 = 2.0;
        let a = c(q.powi(-2));
        let v = one_phi_one(a, c(0.1), q, c(0.4)).unwrap();
        assert!(v.terms_used <= 4);
        assert!(v.converged);
    }

    #[test]
    fn bessel_even_and_origin() {
        let q = 0.5;
        assert_eq!(q_bessel_j0(c(0.0), q).unwrap().value, c(1.0));
        let z = Complex64::new(0.7, -1.1);
        let a = q_bessel_j0(z, q).unwrap().value;
        let b = q_bessel_j0(-z, q).unwrap().value;
        assert!((a - b).norm() < 1e-15);
        let big_base = q_bessel_j0(Complex64::new(0.0, 3.0), 2.0).unwrap();
        assert!(big_base.converged);
    }

    #[test]
    fn max_terms_flag() {
        let policy = SeriesPolicy { max_terms: 5, ..SeriesPolicy::default() };
        let v = sum_ratio_series(c(1.0), |_| Ok(c(0.9)), &policy).unwrap();
        assert!(!v.converged);
        assert!(v.require().is_err());
    }

    proptest! {
        #[test]
        fn tail_bound_covers_4x_truth(q in 0.2f64..0.95, x in 0.0f64..40.0, lambda in -1.0f64..1.0) {
            let p = params(q, 1.0, lambda);
            let t = c(x);
            let ratio = |n: usize| Ok(t * norm_ratio(&p, n));
            let v = sum_ratio_series(c(1.0), ratio, &SeriesPolicy::default()).unwrap();
            let truth = sum_ratio_fixed(c(1.0), ratio, 4 * v.terms_used).unwrap();
            prop_assert!((truth - v.value).norm() <= v.tail_bound);
        }

        #[test]
        fn tail_bound_covers_4x_truth_super(q in 1.1f64..4.0, frac in 0.0f64..0.95, lambda in -1.0f64..1.0) {
            let p = params(q, 1.0, lambda);
            let t = c(frac * p.radius());
            let ratio = |n: usize| Ok(t * norm_ratio(&p, n));
            let v = sum_ratio_series(c(1.0), ratio, &SeriesPolicy::default()).unwrap();
            let truth = sum_ratio_fixed(c(1.0), ratio, 4 * v.terms_used).unwrap();
            prop_assert!((truth - v.value).norm() <= v.tail_bound);
        }

        #[test]
        fn one_phi_one_tail_bound(q in 1.2f64..3.0, m in 0i32..5, n in 0i32..5, x in -0.9f64..0.9) {
            // large-index term ratio tends to −q^{n−1} t, so t = x q^{1−n} keeps it at |x|
            let n = n.min(m);
            let a = c(q.powi(1 + m));
            let b = c(q.powi(1 + m - n));
            let t = c(x * q.powi(1 - n));
            let v = one_phi_one(a, b, q, t).unwrap();
            let one = c(1.0);
            let ratio = |k: usize| {
                let u = (1.0 / q).powi(k as i32);
                Ok(-(c(u) - a) / ((c(u) - b) * (u - q)) * t)
            };
            let truth = sum_ratio_fixed(one, ratio, 4 * v.terms_used).unwrap();
            prop_assert!((truth - v.value).norm() <= v.tail_bound);
        }
    }
}
