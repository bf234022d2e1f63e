//! Truncated Fock space: ladder matrices, operator words, the closed-form matrix
//! elements of normal and anti-normal monomials, and the Kerr Hamiltonian.

use std::fmt;

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::qkernel::{q_shifted_qpow, DeformationParams, LogMagnitude};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Truncation {
    pub dim: usize,
    pub valid_rows: usize,
}

impl Truncation {
    pub fn new(dim: usize) -> Result<Self> {
        if dim == 0 {
            return Err(Error::Parameter("truncation dimension must be positive".into()));
        }
        Ok(Self { dim, valid_rows: dim })
    }

    /// Square window |0⟩…|valid_rows−1⟩ on which a word with the given letter counts
    /// is unaffected by cutting the space at `dim`.
    pub fn for_word(dim: usize, creations: usize, annihilations: usize) -> Self {
        let lost = creations.max(annihilations);
        Self { dim, valid_rows: dim.saturating_sub(lost).max(1) }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Letter {
    A,
    Adag,
}

/// A product of ladder operators, leftmost letter first.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Word(pub Vec<Letter>);

impl Word {
    pub fn identity() -> Self {
        Self(Vec::new())
    }

    /// a†ᵐ aⁿ
    pub fn normal(m: usize, n: usize) -> Self {
        let mut w = vec![Letter::Adag; m];
        w.extend(std::iter::repeat(Letter::A).take(n));
        Self(w)
    }

    /// aⁿ a†ᵐ
    pub fn antinormal(n: usize, m: usize) -> Self {
        let mut w = vec![Letter::A; n];
        w.extend(std::iter::repeat(Letter::Adag).take(m));
        Self(w)
    }

    /// Parses whitespace-separated letters: `a`, and `a+`, `adag` or `a†` for the creator.
    pub fn parse(s: &str) -> Result<Self> {
        s.split_whitespace()
            .map(|tok| match tok {
                "a" => Ok(Letter::A),
                "a+" | "adag" | "a†" => Ok(Letter::Adag),
                other => Err(Error::Parameter(format!("unknown letter '{other}' in operator word"))),
            })
            .collect::<Result<Vec<_>>>()
            .map(Self)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn creations(&self) -> usize {
        self.0.iter().filter(|&&l| l == Letter::Adag).count()
    }

    pub fn annihilations(&self) -> usize {
        self.0.len() - self.creations()
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return write!(f, "I");
        }
        let parts: Vec<&str> = self.0.iter().map(|l| if *l == Letter::A { "a" } else { "a†" }).collect();
        write!(f, "{}", parts.join(" "))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FockOperator {
    pub matrix: DMatrix<Complex64>,
    pub trunc: Truncation,
    pub word: String,
}

impl FockOperator {
    pub fn dim(&self) -> usize {
        self.trunc.dim
    }

    pub fn diagonal(p: impl Fn(usize) -> f64, trunc: Truncation, word: &str) -> Self {
        let d = trunc.dim;
        let matrix = DMatrix::from_fn(d, d, |i, j| if i == j { Complex64::new(p(i), 0.0) } else { Complex64::new(0.0, 0.0) });
        Self { matrix, trunc, word: word.to_string() }
    }
}

#[derive(Debug, Clone)]
pub struct Ladder {
    pub a: FockOperator,
    pub adag: FockOperator,
    pub number: FockOperator,
}

/// a|n⟩ = √φ(n)|n−1⟩, a†|n⟩ = √φ(n+1)|n+1⟩, N|n⟩ = n|n⟩ on |0⟩…|dim−1⟩.
pub fn build_ladder(p: &DeformationParams, t: Truncation) -> Result<Ladder> {
    p.require_positive_lsq()?;
    let d = t.dim;
    let zero = Complex64::new(0.0, 0.0);
    let a = DMatrix::from_fn(d, d, |i, j| if j == i + 1 { Complex64::new(p.phi(j).sqrt(), 0.0) } else { zero });
    let adag = a.adjoint();
    let full = Truncation::new(d)?;
    Ok(Ladder {
        a: FockOperator { matrix: a, trunc: full, word: "a".into() },
        adag: FockOperator { matrix: adag, trunc: Truncation::for_word(d, 1, 0), word: "a†".into() },
        number: FockOperator::diagonal(|n| n as f64, full, "N"),
    })
}

/// The word as an explicit product of truncated ladder matrices.
pub fn word_operator(p: &DeformationParams, dim: usize, word: &Word) -> Result<FockOperator> {
    let ladder = build_ladder(p, Truncation::new(dim)?)?;
    let mut m = DMatrix::<Complex64>::identity(dim, dim);
    for l in &word.0 {
        m = match l {
            Letter::A => m * &ladder.a.matrix,
            Letter::Adag => m * &ladder.adag.matrix,
        };
    }
    Ok(FockOperator {
        matrix: m,
        trunc: Truncation::for_word(dim, word.creations(), word.annihilations()),
        word: word.to_string(),
    })
}

/// ⟨r|word|s⟩ read off the matrix product; dim must leave the entry uncontaminated.
pub fn oracle_element(p: &DeformationParams, t: Truncation, word: &Word, r: usize, s: usize) -> Result<Complex64> {
    let needed = r + s + word.len() + 2;
    if t.dim < needed {
        return Err(Error::Truncation { needed, dim: t.dim });
    }
    Ok(word_operator(p, t.dim, word)?.matrix[(r, s)])
}

fn q_pow_half(p: &DeformationParams, twice_exponent: i64) -> LogMagnitude {
    LogMagnitude::from_ln(0.5 * twice_exponent as f64 * p.ln_q(), 1.0)
}

fn binom2(n: usize) -> i64 {
    (n * n.saturating_sub(1) / 2) as i64
}

/// (−q)^k γ^k (q^{a}; q)_k: the prefactor common to both normal-form branches.
fn signed_prefix(p: &DeformationParams, k: usize, a: i64) -> LogMagnitude {
    let mq = LogMagnitude::from_f64(-p.q() * p.gamma()).powi(k as i64);
    mq * q_shifted_qpow(p.q(), a, k)
}

/// ⟨r| a†ᵐ aⁿ |s⟩ in closed form.
///
/// Branch n ≤ m: (−q)ⁿ(q^{−s};q)_n q^{−C(m−n,2)/2 − s(m−n)/2} γⁿ √(γ^{m−n}(q^{1+s};q)_{m−n}).
/// Branch n > m: (−q)ᵐ(q^{n−s−m};q)_m q^{−C(n−m,2)/2 − r(n−m)/2} γᵐ √(γ^{n−m}(q^{1+r};q)_{n−m}).
/// The γ^{m+n} under the root is split so that the sign survives when γ < 0.
pub fn normal_element(p: &DeformationParams, r: usize, m: usize, n: usize, s: usize) -> Complex64 {
    if r as i64 != s as i64 + m as i64 - n as i64 {
        return Complex64::new(0.0, 0.0);
    }
    let v = if n <= m {
        let k = m - n;
        let root = (LogMagnitude::from_f64(p.gamma()).powi(k as i64) * q_shifted_qpow(p.q(), 1 + s as i64, k)).sqrt_abs();
        signed_prefix(p, n, -(s as i64)) * q_pow_half(p, -binom2(k) - (s * k) as i64) * root
    } else {
        let k = n - m;
        let root = (LogMagnitude::from_f64(p.gamma()).powi(k as i64) * q_shifted_qpow(p.q(), 1 + r as i64, k)).sqrt_abs();
        signed_prefix(p, m, n as i64 - s as i64 - m as i64) * q_pow_half(p, -binom2(k) - (r * k) as i64) * root
    };
    Complex64::new(v.value(), 0.0)
}

/// ⟨r| aⁿ a†ᵐ |s⟩ = q^{−C(n,2)/2 − C(m,2)/2 − (rn+sm)/2} √(γ^{n+m}(q^{1+r};q)_n(q^{1+s};q)_m) δ_{r+n,s+m}.
pub fn antinormal_element(p: &DeformationParams, r: usize, n: usize, m: usize, s: usize) -> Complex64 {
    if r + n != s + m {
        return Complex64::new(0.0, 0.0);
    }
    let under = LogMagnitude::from_f64(p.gamma()).powi((n + m) as i64)
        * q_shifted_qpow(p.q(), 1 + r as i64, n)
        * q_shifted_qpow(p.q(), 1 + s as i64, m);
    let v = q_pow_half(p, -binom2(n) - binom2(m) - (r * n + s * m) as i64) * under.sqrt_abs();
    Complex64::new(v.value(), 0.0)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct KerrParams {
    pub chi: f64,
}

impl KerrParams {
    pub fn new(chi: f64) -> Result<Self> {
        if !(chi >= 0.0 && chi.is_finite()) {
            return Err(Error::Parameter(format!("Kerr strength must be finite and >= 0, got {chi}")));
        }
        Ok(Self { chi })
    }
}

/// H = a†a + (χ/2) a†² a², diagonal with entries φ(s)(1 + (χ/2)φ(s−1)).
pub fn kerr_hamiltonian(p: &DeformationParams, t: Truncation, k: KerrParams) -> Result<FockOperator> {
    p.require_positive_lsq()?;
    let entry = |s: usize| if s == 0 { 0.0 } else { p.phi(s) * (1.0 + 0.5 * k.chi * p.phi(s - 1)) };
    Ok(FockOperator::diagonal(entry, t, "a† a + (chi/2) a† a† a a"))
}
