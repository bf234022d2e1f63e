use num_complex::Complex64;

use super::logmag::LogMagnitude;
use super::params::one_minus_q_pow;
use super::series::{SeriesPolicy, SeriesValue};
use crate::error::{Error, Result};

/// (z; q)_n = ∏_{k<n} (1 − z q^k).
pub fn q_shifted(z: Complex64, q: f64, n: usize) -> Complex64 {
    let mut acc = Complex64::new(1.0, 0.0);
    for k in 0..n {
        acc *= Complex64::new(1.0, 0.0) - z * q.powi(k as i32);
    }
    acc
}

/// (q^a; q)_n as a scaled real; exact zeros when some a + k = 0.
pub fn q_shifted_qpow(q: f64, a: i64, n: usize) -> LogMagnitude {
    let mut acc = LogMagnitude::ONE;
    for k in 0..n as i64 {
        acc *= LogMagnitude::from_f64(one_minus_q_pow(q, a + k));
    }
    acc
}

/// (q; q)_n as a scaled real.
pub fn q_factorial_log(q: f64, n: usize) -> LogMagnitude {
    q_shifted_qpow(q, 1, n)
}

/// (z; q)_∞ for 0 < q < 1.
pub fn q_shifted_inf(z: Complex64, q: f64) -> Result<SeriesValue> {
    if !(q > 0.0 && q < 1.0) {
        return Err(Error::Regime { expected: "0<q<1" });
    }
    let policy = SeriesPolicy::from_env();
    let one = Complex64::new(1.0, 0.0);
    let mut acc = one;
    let mut zqk = z;
    let mut k = 0usize;
    loop {
        if zqk.norm() < f64::EPSILON * 0.5 || acc == Complex64::new(0.0, 0.0) {
            // remaining factors ∏(1 − w q^j), |w| small: |log| ≤ Σ |w| q^j / (1 − |w| q^j)
            let w = zqk.norm();
            let log_tail = w / ((1.0 - q) * (1.0 - w));
            let tail = acc.norm() * log_tail.exp_m1() + acc.norm() * (k as f64 + 1.0) * f64::EPSILON;
            return Ok(SeriesValue { value: acc, terms_used: k.max(1), tail_bound: tail, converged: true });
        }
        if k >= policy.max_terms {
            return Ok(SeriesValue {
                value: acc,
                terms_used: k,
                tail_bound: f64::INFINITY,
                converged: false,
            });
        }
        acc *= one - zqk;
        zqk *= q;
        k += 1;
    }
}

/// ln |(x; q)_∞| and its sign for real x, 0 < q < 1.
pub fn log_q_shifted_inf_real(x: f64, q: f64) -> (f64, f64) {
    debug_assert!(q > 0.0 && q < 1.0);
    let mut ln = 0.0;
    let mut sign = 1.0;
    let mut xqk = x;
    while xqk.abs() > f64::EPSILON * 1e-3 {
        let f = 1.0 - xqk;
        if f == 0.0 {
            return (f64::NEG_INFINITY, 0.0);
        }
        if f < 0.0 {
            sign = -sign;
        }
        ln += if xqk.abs() < 0.5 { (-xqk).ln_1p() } else { f.abs().ln() };
        xqk *= q;
    }
    (ln - xqk / (1.0 - q), sign)
}
