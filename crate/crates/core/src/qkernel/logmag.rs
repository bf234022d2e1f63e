use std::ops::{Div, Mul, MulAssign};

/// A real number kept as `mantissa · 2^exp2` with |mantissa| in [0.5, 1).
///
/// Products of many q-factors for q > 1 leave the f64 range long before the
/// quantities they feed into do; this keeps them exact up to rounding of the
/// mantissa products and round-trips representable values bit-for-bit.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LogMagnitude {
    mantissa: f64,
    exp2: i64,
}

fn frexp(x: f64) -> (f64, i64) {
    if x == 0.0 || !x.is_finite() {
        return (x, 0);
    }
    let (x, bias) = if x.abs() < f64::MIN_POSITIVE { (x * 2f64.powi(64), -64) } else { (x, 0) };
    let bits = x.to_bits();
    let e = ((bits >> 52) & 0x7ff) as i64 - 1022;
    let m = f64::from_bits((bits & !(0x7ff << 52)) | (1022 << 52));
    (m, e + bias)
}

fn ldexp(m: f64, e: i64) -> f64 {
    if m == 0.0 || !m.is_finite() {
        return m;
    }
    if e > 1024 {
        m * f64::INFINITY
    } else if e > 1023 {
        m * 2f64.powi(1023) * 2.0
    } else if e >= -1022 {
        m * 2f64.powi(e as i32)
    } else if e + 1074 >= -1 {
        // one rounding into the subnormal range
        (m * 2f64.powi((e + 1074) as i32)) * f64::from_bits(1)
    } else {
        m * 0.0
    }
}

impl LogMagnitude {
    pub const ONE: Self = Self { mantissa: 0.5, exp2: 1 };
    pub const ZERO: Self = Self { mantissa: 0.0, exp2: 0 };

    pub fn from_f64(x: f64) -> Self {
        let (mantissa, exp2) = frexp(x);
        Self { mantissa, exp2 }
    }

    /// e^{ln_abs} with the given sign, for magnitudes only known through their log.
    pub fn from_ln(ln_abs: f64, sign: f64) -> Self {
        if sign == 0.0 || ln_abs == f64::NEG_INFINITY {
            return Self::ZERO;
        }
        let k = (ln_abs / std::f64::consts::LN_2).floor();
        let r = ln_abs - k * std::f64::consts::LN_2;
        Self::from_f64(sign.signum() * r.exp()).scale2(k as i64)
    }

    fn scale2(mut self, k: i64) -> Self {
        if self.mantissa != 0.0 {
            self.exp2 += k;
        }
        self
    }

    pub fn value(self) -> f64 {
        ldexp(self.mantissa, self.exp2)
    }

    pub fn ln_abs(self) -> f64 {
        if self.mantissa == 0.0 {
            f64::NEG_INFINITY
        } else {
            self.mantissa.abs().ln() + self.exp2 as f64 * std::f64::consts::LN_2
        }
    }

    pub fn sign(self) -> f64 {
        if self.mantissa == 0.0 {
            0.0
        } else {
            self.mantissa.signum()
        }
    }

    pub fn is_zero(self) -> bool {
        self.mantissa == 0.0
    }

    pub fn abs(self) -> Self {
        Self { mantissa: self.mantissa.abs(), exp2: self.exp2 }
    }

    /// Square root of the magnitude; the sign is dropped.
    pub fn sqrt_abs(self) -> Self {
        if self.is_zero() {
            return Self::ZERO;
        }
        let m = self.mantissa.abs();
        if self.exp2 % 2 == 0 {
            Self::from_f64(m.sqrt()).scale2(self.exp2 / 2)
        } else {
            Self::from_f64((2.0 * m).sqrt()).scale2((self.exp2 - 1).div_euclid(2))
        }
    }

    pub fn powi(self, n: i64) -> Self {
        let mut acc = Self::ONE;
        let mut base = if n < 0 { Self::ONE / self } else { self };
        let mut k = n.unsigned_abs();
        while k > 0 {
            if k & 1 == 1 {
                acc *= base;
            }
            base *= base;
            k >>= 1;
        }
        acc
    }
}

impl Mul for LogMagnitude {
    type Output = Self;
    fn mul(self, rhs: Self) -> Self {
        let (m, e) = frexp(self.mantissa * rhs.mantissa);
        if m == 0.0 {
            return Self::ZERO;
        }
        Self { mantissa: m, exp2: self.exp2 + rhs.exp2 + e }
    }
}

impl MulAssign for LogMagnitude {
    fn mul_assign(&mut self, rhs: Self) {
        *self = *self * rhs;
    }
}

impl Div for LogMagnitude {
    type Output = Self;
    fn div(self, rhs: Self) -> Self {
        let (m, e) = frexp(self.mantissa / rhs.mantissa);
        if m == 0.0 {
            return Self::ZERO;
        }
        Self { mantissa: m, exp2: self.exp2 - rhs.exp2 + e }
    }
}

impl From<f64> for LogMagnitude {
    fn from(x: f64) -> Self {
        Self::from_f64(x)
    }
}
