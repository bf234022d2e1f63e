//! The four deformed Hermite families (position/momentum × q<1 / q>1), their maps
//! into Fock-basis coefficients, the orthogonality weights, and a Gram-matrix check.

use std::f64::consts::PI;

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::qkernel::{log_q_shifted_inf_real, one_minus_q_pow, q_factorial_log, DeformationParams, Regime};
use crate::quad::{refine, QuadRule};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum FamilyKind {
    /// h_n, position, 0 < q < 1
    PosSub,
    /// ĥ_n, position, q > 1
    PosSuper,
    /// χ_n, momentum, 0 < q < 1
    MomSub,
    /// χ̂_n, momentum, q > 1
    MomSuper,
}

impl FamilyKind {
    pub const ALL: [FamilyKind; 4] = [FamilyKind::PosSub, FamilyKind::PosSuper, FamilyKind::MomSub, FamilyKind::MomSuper];

    pub fn regime(self) -> Regime {
        match self {
            FamilyKind::PosSub | FamilyKind::MomSub => Regime::SubOne,
            FamilyKind::PosSuper | FamilyKind::MomSuper => Regime::SuperOne,
        }
    }

    pub fn is_momentum(self) -> bool {
        matches!(self, FamilyKind::MomSub | FamilyKind::MomSuper)
    }

    pub fn name(self) -> &'static str {
        match self {
            FamilyKind::PosSub => "pos-sub",
            FamilyKind::PosSuper => "pos-super",
            FamilyKind::MomSub => "mom-sub",
            FamilyKind::MomSuper => "mom-super",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| Error::Parameter(format!("unknown family '{s}' (expected pos-sub, pos-super, mom-sub or mom-super)")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PolyFamily {
    pub kind: FamilyKind,
    pub params: DeformationParams,
}

impl PolyFamily {
    pub fn new(kind: FamilyKind, params: DeformationParams) -> Result<Self> {
        params.require_regime(kind.regime())?;
        Ok(Self { kind, params })
    }

    /// β_n in h_{n+1} = 2x h_n − β_n h_{n−1}: l²q^λ(q^{−n} − 1) for q<1, l²q^λ(1 − q^{−n}) for q>1.
    pub fn recursion_coefficient(&self, n: usize) -> f64 {
        let p = &self.params;
        let d = one_minus_q_pow(p.q(), -(n as i64));
        match self.kind.regime() {
            Regime::SubOne => -p.coupling() * d,
            Regime::SuperOne => p.coupling() * d,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PolySequence {
    pub family: PolyFamily,
    pub x: f64,
    pub values: Vec<f64>,
}

impl PolySequence {
    /// Largest relative residual of the three-term recursion over all degrees.
    pub fn recursion_residual(&self) -> f64 {
        let v = &self.values;
        let mut worst = 0.0f64;
        for n in 0..v.len().saturating_sub(1) {
            let prev = if n == 0 { 0.0 } else { v[n - 1] };
            let b = self.family.recursion_coefficient(n) * prev;
            let lhs = 2.0 * self.x * v[n];
            let scale = lhs.abs() + v[n + 1].abs() + b.abs();
            if scale > 0.0 {
                worst = worst.max((lhs - v[n + 1] - b).abs() / scale);
            }
        }
        worst
    }
}

/// h_{−1} = 0, h_0 = 1, forward three-term recursion.
pub fn poly_eval(fam: &PolyFamily, x: f64, n_max: usize) -> PolySequence {
    let mut values = Vec::with_capacity(n_max + 1);
    values.push(1.0);
    let mut prev = 0.0;
    for n in 0..n_max {
        let next = 2.0 * x * values[n] - fam.recursion_coefficient(n) * prev;
        prev = values[n];
        values.push(next);
    }
    PolySequence { family: *fam, x, values }
}

/// Argument scale of the coefficient maps: y = √(|1−q|/2)·x.
fn argument_scale(p: &DeformationParams) -> f64 {
    ((1.0 - p.q()).abs() / 2.0).sqrt()
}

/// Normalized coefficients c_n P_n(y) with c_n built from |l²q^λ| and the polynomial
/// recursion from the signed l²q^λ, run in ratio form so nothing overflows.
fn normalized_values(kind: FamilyKind, p: &DeformationParams, x: f64, n_max: usize) -> Vec<f64> {
    let fam = PolyFamily { kind, params: *p };
    let y = argument_scale(p) * x;
    let ell = p.coupling().abs();
    let q = p.q();
    // c_{n+1}/c_n
    let step = |n: usize| match kind.regime() {
        Regime::SubOne => (q.powi(n as i32 + 1) / (ell * one_minus_q_pow(q, n as i64 + 1))).sqrt(),
        Regime::SuperOne => (1.0 / (ell * one_minus_q_pow(q, -(n as i64) - 1))).sqrt(),
    };
    let mut out = Vec::with_capacity(n_max + 1);
    out.push(1.0);
    let mut prev = 0.0;
    for n in 0..n_max {
        let back = if n == 0 { 0.0 } else { fam.recursion_coefficient(n) * step(n - 1) * prev };
        let next = step(n) * (2.0 * y * out[n] - back);
        prev = out[n];
        out.push(next);
    }
    out
}

/// q_n(x) for n = 0..=n_max: the Fock-basis coefficients of the position eigenvector.
pub fn coeff_position_all(p: &DeformationParams, x: f64, n_max: usize) -> Result<Vec<f64>> {
    p.require_positive_lsq()?;
    let kind = match p.regime() {
        Regime::SubOne => FamilyKind::PosSub,
        Regime::SuperOne => FamilyKind::PosSuper,
    };
    Ok(normalized_values(kind, p, x, n_max))
}

/// q_n(x) = (l²q^λ)^{−n/2} q^{n(n+1)/4} (q;q)_n^{−1/2} h_n(√((1−q)/2) x) for q<1,
/// (l²q^λ)^{−n/2} (q^{−1};q^{−1})_n^{−1/2} ĥ_n(√((q−1)/2) x) for q>1.
pub fn coeff_position(p: &DeformationParams, x: f64, n: usize) -> Result<f64> {
    Ok(coeff_position_all(p, x, n)?[n])
}

/// p_n(x) for n = 0..=n_max. The prefactor (i^{−1} l q^{λ/2})^{−n} uses the principal
/// root l = √(l²); it is iⁿ times a real number for l² > 0 and real for l² < 0.
/// The q>1 prefactor carries the exponent −n, like the position map.
pub fn coeff_momentum_all(p: &DeformationParams, x: f64, n_max: usize) -> Vec<Complex64> {
    let kind = match p.regime() {
        Regime::SubOne => FamilyKind::MomSub,
        Regime::SuperOne => FamilyKind::MomSuper,
    };
    let real = normalized_values(kind, p, x, n_max);
    let phase = if p.lsq() > 0.0 { Complex64::new(0.0, 1.0) } else { Complex64::new(1.0, 0.0) };
    let mut ph = Complex64::new(1.0, 0.0);
    real.into_iter()
        .map(|v| {
            let out = ph * v;
            ph *= phase;
            out
        })
        .collect()
}

pub fn coeff_momentum(p: &DeformationParams, x: f64, n: usize) -> Complex64 {
    coeff_momentum_all(p, x, n)[n]
}

/// h_n(sinh u | q) = Σ_k (−1)^k q^{k(k−n)} [n k]_q e^{(n−2k)u}.
pub fn explicit_h_sinh(u: f64, q: f64, n: usize) -> f64 {
    let fact = |k: usize| q_factorial_log(q, k);
    let nf = fact(n);
    (0..=n)
        .map(|k| {
            let binom = (nf / (fact(k) * fact(n - k))).value();
            let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
            let kk = k as f64;
            sign * q.powf(kk * (kk - n as f64)) * binom * ((n as f64 - 2.0 * kk) * u).exp()
        })
        .sum()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum WeightNormalization {
    /// The densities exactly as displayed (q>1: total mass 2/(q−1)).
    Displayed,
    /// q>1 densities rescaled by (q−1)/2 to unit mass; q<1 densities unchanged.
    Unit,
}

/// ln ∏_{k≥1} (1 + 2 cosh(2u) q^k + q^{2k}), overflow-safe in u.
fn ln_sub_product(u: f64, q: f64) -> f64 {
    let lq = q.ln();
    let au = 2.0 * u.abs();
    let mut total = 0.0;
    for k in 1.. {
        let a = au + k as f64 * lq;
        let terms = [0.0, a, a - 2.0 * au, 2.0 * k as f64 * lq];
        let m = terms.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let s: f64 = terms.iter().map(|t| (t - m).exp()).sum();
        let ln = m + s.ln();
        total += ln;
        if a < -40.0 {
            // remaining factors are 1 + O(e^a q^j)
            total += a.exp() * q / (1.0 - q);
            break;
        }
    }
    total
}

fn sub_density(u: f64, q: f64) -> f64 {
    let (ln_qq, _) = log_q_shifted_inf_real(q, q);
    (-(ln_qq + ln_sub_product(u, q))).exp() / (1.0 / q).ln()
}

/// Super-unity density in terms of s = 2 − (q−1)x², which callers near the support
/// edge compute from the distance to the endpoint. The k = 0 factor of the product
/// equals 2s, so the density vanishes like √s at ±c.
fn super_density(x: f64, s: f64, q: f64) -> f64 {
    let p = 1.0 / q;
    let (ln_pp, _) = log_q_shifted_inf_real(p, p);
    let c2 = (q - 1.0) * x * x - 1.0;
    let mut ln_prod = 0.0;
    let mut pk = p;
    while pk > 1e-18 {
        ln_prod += (1.0 - 2.0 * c2 * pk + pk * pk).ln();
        pk *= p;
    }
    ln_pp.exp() / (PI * (q - 1.0).sqrt()) * 2.0 * s.max(0.0).sqrt() * ln_prod.exp()
}

fn super_scale(norm: WeightNormalization, q: f64) -> f64 {
    match norm {
        WeightNormalization::Displayed => 1.0,
        WeightNormalization::Unit => (q - 1.0) / 2.0,
    }
}

/// Half-width c = √(2/(q−1)) of the q>1 support.
pub fn support_half_width(q: f64) -> f64 {
    (2.0 / (q - 1.0)).sqrt()
}

/// The displayed weight: dμ/du (= dν/dv) at `point = u` for q<1, μ̂(x) (= ν̂) at
/// `point = x` for q>1. Only q enters; the weights belong to the λ = 0 reductions.
pub fn weight_density(fam: &PolyFamily, point: f64) -> Result<f64> {
    weight_density_normalized(fam, point, WeightNormalization::Displayed)
}

pub fn weight_density_normalized(fam: &PolyFamily, point: f64, norm: WeightNormalization) -> Result<f64> {
    let q = fam.params.q();
    match fam.kind.regime() {
        Regime::SubOne => Ok(sub_density(point, q)),
        Regime::SuperOne => {
            let c = support_half_width(q);
            if !(point.abs() < c) {
                return Err(Error::Support(point));
            }
            let s = 2.0 - (q - 1.0) * point * point;
            Ok(super_scale(norm, q) * super_density(point, s, q))
        }
    }
}

#[derive(Debug, Clone, Copy)]
pub struct QuadSpec {
    pub tol: f64,
    pub max_evals: usize,
    pub normalization: WeightNormalization,
}

impl Default for QuadSpec {
    fn default() -> Self {
        Self { tol: 1e-12, max_evals: 1_000_000, normalization: WeightNormalization::Unit }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct GramReport {
    pub family: FamilyKind,
    /// G − I, G_{mn} = ∫ P_m conj(P_n) dw.
    #[serde(skip)]
    pub residual: DMatrix<Complex64>,
    pub max_abs: f64,
    pub evals: usize,
    pub achieved: f64,
}

fn basis_values(fam: &PolyFamily, x: f64, n_max: usize) -> Result<Vec<Complex64>> {
    if fam.kind.is_momentum() {
        Ok(coeff_momentum_all(&fam.params, x, n_max))
    } else {
        Ok(coeff_position_all(&fam.params, x, n_max)?.into_iter().map(|v| Complex64::new(v, 0.0)).collect())
    }
}

fn gram_from_nodes<I>(fam: &PolyFamily, n_max: usize, nodes: I) -> Result<(DMatrix<Complex64>, usize)>
where
    I: Iterator<Item = (f64, f64)>,
{
    let d = n_max + 1;
    let mut g = DMatrix::<Complex64>::zeros(d, d);
    let mut count = 0;
    for (x, w) in nodes {
        if w == 0.0 {
            continue;
        }
        let v = basis_values(fam, x, n_max)?;
        for m in 0..d {
            for n in 0..d {
                g[(m, n)] += v[m] * v[n].conj() * w;
            }
        }
        count += 1;
    }
    Ok((g, count))
}

/// Half-width U in u beyond which weight × Σ P_n² is below 1e−20 of its peak.
fn sub_window(fam: &PolyFamily, n_max: usize) -> Result<f64> {
    let q = fam.params.q();
    let size = |u: f64| -> Result<f64> {
        let x = fam.params.coupling().abs().sqrt() * (2.0 / (1.0 - q)).sqrt() * u.sinh();
        let v = basis_values(fam, x, n_max)?;
        Ok(sub_density(u, q) * v.iter().map(|c| c.norm_sqr()).sum::<f64>())
    };
    let mut peak = 0.0f64;
    let mut u = 0.0;
    loop {
        let s = size(u)?;
        peak = peak.max(s);
        if u > 1.0 && s < 1e-20 * peak {
            return Ok(u);
        }
        u += 0.25;
        if u > 700.0 {
            return Err(Error::Quadrature { evals: 0, achieved: s / peak, wanted: 1e-20 });
        }
    }
}

/// ∫ P_m conj(P_n) dw − δ_{mn} for m, n ≤ n_max.
///
/// q<1: x = √(l²q^λ)·√(2/(1−q))·sinh u against dμ(u), composite Gauss-Legendre on |u| ≤ U.
/// q>1: x = √(l²q^λ)·x', x' ∈ (−c, c) against μ̂(x')dx', tanh-sinh.
/// For λ = 0, l² = 1 the maps are the identity and the weights are the displayed ones.
pub fn orthonormality_check(fam: &PolyFamily, n_max: usize, spec: &QuadSpec) -> Result<GramReport> {
    fam.params.require_positive_lsq()?;
    let q = fam.params.q();
    let scale = fam.params.coupling().sqrt();
    let dist = |a: &DMatrix<Complex64>, b: &DMatrix<Complex64>| (a - b).iter().map(|c| c.norm()).fold(0.0, f64::max);
    let conv = match fam.kind.regime() {
        Regime::SubOne => {
            let big_u = sub_window(fam, n_max)?;
            let b = (2.0 / (1.0 - q)).sqrt();
            refine(
                2,
                14,
                spec.tol,
                spec.max_evals,
                |level| {
                    let rule = QuadRule::composite_gauss_legendre(-big_u, big_u, 1 << level, 16);
                    let nodes = rule.nodes.iter().zip(&rule.weights).map(|(&u, &w)| (scale * b * u.sinh(), w * sub_density(u, q)));
                    gram_from_nodes(fam, n_max, nodes)
                },
                dist,
            )?
        }
        Regime::SuperOne => {
            let c = support_half_width(q);
            let wscale = super_scale(spec.normalization, q);
            refine(
                3,
                12,
                spec.tol,
                spec.max_evals,
                |level| {
                    let rule = QuadRule::tanh_sinh(-c, c, level);
                    let nodes = rule.nodes.iter().zip(&rule.weights).zip(&rule.edge).map(|((&x, &w), &e)| {
                        let s = (q - 1.0) * e * (2.0 * c - e);
                        (scale * x, w * wscale * super_density(x, s, q))
                    });
                    gram_from_nodes(fam, n_max, nodes)
                },
                dist,
            )?
        }
    };
    let d = n_max + 1;
    let residual = conv.value - DMatrix::<Complex64>::identity(d, d);
    let max_abs = residual.iter().map(|c| c.norm()).fold(0.0, f64::max);
    Ok(GramReport { family: fam.kind, residual, max_abs, evals: conv.evals, achieved: conv.achieved })
}

/// Total mass of the q>1 weight under the given normalization.
pub fn super_weight_mass(q: f64, norm: WeightNormalization) -> Result<f64> {
    if q <= 1.0 {
        return Err(Error::Regime { expected: "q>1" });
    }
    let c = support_half_width(q);
    let rule = QuadRule::tanh_sinh(-c, c, 8);
    let wscale = super_scale(norm, q);
    Ok(rule
        .nodes
        .iter()
        .zip(&rule.weights)
        .zip(&rule.edge)
        .map(|((&x, &w), &e)| w * wscale * super_density(x, (q - 1.0) * e * (2.0 * c - e), q))
        .sum())
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn fam(kind: FamilyKind, q: f64, lsq: f64, lambda: f64) -> PolyFamily {
        PolyFamily::new(kind, DeformationParams::new(q, lsq, lambda).unwrap()).unwrap()
    }

    #[test]
    fn regime_mismatch_rejected() {
        let p = DeformationParams::new(0.5, 1.0, 0.0).unwrap();
        assert!(PolyFamily::new(FamilyKind::PosSuper, p).is_err());
        assert!(FamilyKind::parse("pos-sideways").is_err());
        assert_eq!(FamilyKind::parse("mom-super").unwrap(), FamilyKind::MomSuper);
    }

    #[test]
    fn low_degrees() {
        let f = fam(FamilyKind::PosSub, 0.5, 1.3, 0.7);
        let s = poly_eval(&f, 0.9, 2);
        assert_eq!(s.values[0], 1.0);
        assert_eq!(s.values[1], 1.8);
        let l = 1.3 * 0.5f64.powf(0.7);
        assert!((s.values[2] - (4.0 * 0.81 - l * (1.0 / 0.5 - 1.0))).abs() < 1e-14);
    }

    #[test]
    fn recursion_residual_all_families() {
        for kind in FamilyKind::ALL {
            let q = if kind.regime() == Regime::SubOne { 0.6 } else { 1.7 };
            let f = fam(kind, q, 1.0, 0.5);
            let half = if q > 1.0 { support_half_width(q) } else { 3.0 };
            for i in 0..11 {
                let x = -half + 2.0 * half * i as f64 / 10.0;
                let s = poly_eval(&f, x, 40);
                assert!(s.recursion_residual() < 1e-10);
            }
        }
    }

    #[test]
    fn coefficient_maps_match_literal_formula() {
        for (q, lsq, lambda) in [(0.5, 1.0, 0.0), (0.7, 2.0, 0.5), (2.0, 1.0, 0.0), (1.5, 0.6, -1.0)] {
            let p = DeformationParams::new(q, lsq, lambda).unwrap();
            let kind = if q < 1.0 { FamilyKind::PosSub } else { FamilyKind::PosSuper };
            let x = 0.37;
            let y = argument_scale(&p) * x;
            let h = poly_eval(&PolyFamily::new(kind, p).unwrap(), y, 12).values;
            for n in 0..=12usize {
                let nf = n as f64;
                let pref = match p.regime() {
                    Regime::SubOne => p.coupling().powf(-nf / 2.0) * q.powf(nf * (nf + 1.0) / 4.0) / q_factorial_log(q, n).value().sqrt(),
                    Regime::SuperOne => p.coupling().powf(-nf / 2.0) / q_factorial_log(1.0 / q, n).value().sqrt(),
                };
                let lit = pref * h[n];
                let got = coeff_position(&p, x, n).unwrap();
                assert!((got - lit).abs() <= 1e-11 * lit.abs().max(1e-12), "q={q} n={n}: {got} vs {lit}");
            }
        }
        assert!(coeff_position(&DeformationParams::new(0.5, -1.0, 0.0).unwrap(), 0.1, 2).is_err());
    }

    #[test]
    fn position_recursion_consistency() {
        // √(2|1−q|) x q_n = √(l²q^λ a_{n+1}) q_{n+1} + √(l²q^λ a_n) q_{n−1}
        for (q, lsq, lambda) in [(0.5, 1.0, 0.0), (0.8, 0.4, 1.0), (2.0, 1.0, 0.0), (3.0, 2.0, 0.5)] {
            let p = DeformationParams::new(q, lsq, lambda).unwrap();
            let a = |k: usize| match p.regime() {
                Regime::SubOne => q.powi(-(k as i32)) * one_minus_q_pow(q, k as i64),
                Regime::SuperOne => one_minus_q_pow(q, -(k as i64)),
            };
            let x = 0.8;
            let v = coeff_position_all(&p, x, 30).unwrap();
            for n in 0..29 {
                let prev = if n == 0 { 0.0 } else { v[n - 1] };
                let lhs = (2.0 * (1.0 - q).abs()).sqrt() * x * v[n];
                let rhs = (p.coupling() * a(n + 1)).sqrt() * v[n + 1] + (p.coupling() * a(n)).sqrt() * prev;
                assert!((lhs - rhs).abs() < 1e-10 * (lhs.abs() + rhs.abs()).max(1e-300));
            }
        }
    }

    #[test]
    fn momentum_recursion_consistency() {
        // −√(2|1−q|) x p_n = i√(l²q^λ a_{n+1}) p_{n+1} − i√(l²q^λ a_n) p_{n−1}, complex roots
        let i = Complex64::new(0.0, 1.0);
        for (q, lsq, lambda) in [(0.5, 1.0, 0.0), (0.5, -1.0, 0.0), (0.7, 0.3, 1.0), (2.0, 1.0, 0.0), (2.0, -1.0, 0.0), (1.6, 2.0, -0.5)] {
            let p = DeformationParams::new(q, lsq, lambda).unwrap();
            let a = |k: usize| match p.regime() {
                Regime::SubOne => q.powi(-(k as i32)) * one_minus_q_pow(q, k as i64),
                Regime::SuperOne => one_minus_q_pow(q, -(k as i64)),
            };
            let root = |k: usize| Complex64::new(p.coupling() * a(k), 0.0).sqrt();
            let x = -0.45;
            let v = coeff_momentum_all(&p, x, 25);
            for n in 0..24 {
                let prev = if n == 0 { Complex64::new(0.0, 0.0) } else { v[n - 1] };
                let lhs = v[n] * (-(2.0 * (1.0 - q).abs()).sqrt() * x);
                let rhs = i * root(n + 1) * v[n + 1] - i * root(n) * prev;
                assert!((lhs - rhs).norm() < 1e-10 * (lhs.norm() + rhs.norm()).max(1e-300), "q={q} lsq={lsq} n={n}");
            }
        }
    }

    #[test]
    fn half_exponent_momentum_prefactor_fails_recursion() {
        // the alternative (i^{-1} l)^{-n/2} prefactor for q>1 breaks the n=1 step
        let q: f64 = 2.0;
        let p = DeformationParams::new(q, 1.0, 0.0).unwrap();
        let x: f64 = 0.3;
        let y = ((q - 1.0) / 2.0).sqrt() * x;
        let i = Complex64::new(0.0, 1.0);
        let pref = |n: i32| (-i).powf(-(n as f64) / 2.0);
        let p1 = pref(1) * (2.0 * y) / (1.0 - 1.0 / q).sqrt();
        let lhs = -(2.0 * (q - 1.0)).sqrt() * x;
        let rhs = i * Complex64::new(p.coupling() * (1.0 - 1.0 / q), 0.0).sqrt() * p1;
        assert!((lhs - rhs).norm() > 0.1);
    }

    #[test]
    fn l_equals_i_reduction() {
        // χ_n(y) with l² = −1, λ = 0 equals i^{−n} h_n(i y) for the l² = 1 family
        let q = 0.6;
        let chi = fam(FamilyKind::MomSub, q, -1.0, 0.0);
        let h = fam(FamilyKind::PosSub, q, 1.0, 0.0);
        let y = 0.7;
        let c = poly_eval(&chi, y, 12).values;
        // h_n(iy) = iⁿ g_n(y), g from 2y g_n = g_{n+1} − β_n g_{n−1}
        let mut g = vec![1.0, 2.0 * y];
        for n in 1..12 {
            let next = 2.0 * y * g[n] + h.recursion_coefficient(n) * g[n - 1];
            g.push(next);
        }
        for n in 0..=12 {
            assert!((c[n] - g[n]).abs() < 1e-10 * g[n].abs().max(1.0));
        }
    }

    #[test]
    fn explicit_sum_matches_recursion() {
        let q = 0.55;
        let f = fam(FamilyKind::PosSub, q, 1.0, 0.0);
        assert_eq!(explicit_h_sinh(0.3, q, 0), 1.0);
        assert!((explicit_h_sinh(0.3, q, 1) - 2.0 * 0.3f64.sinh()).abs() < 1e-15);
        for i in 0..=20 {
            let u = -2.0 + 0.2 * i as f64;
            let rec = poly_eval(&f, u.sinh(), 12).values;
            for n in 0..=12 {
                let e = explicit_h_sinh(u, q, n);
                let scale = q.powf(-((n * n) as f64) / 4.0) * (n as f64 * u.abs()).exp();
                assert!((e - rec[n]).abs() <= 1e-12 * scale, "u={u} n={n}: {e} vs {}", rec[n]);
            }
        }
    }

    #[test]
    fn weights_positive_even_and_at_origin() {
        let sub = fam(FamilyKind::PosSub, 0.5, 1.0, 0.0);
        for i in 0..100 {
            let u = -5.0 + 0.1 * i as f64;
            let w = weight_density(&sub, u).unwrap();
            assert!(w > 0.0);
            assert!((w - weight_density(&sub, -u).unwrap()).abs() <= 1e-14 * w);
        }
        let q: f64 = 2.0;
        let sup = fam(FamilyKind::PosSuper, q, 1.0, 0.0);
        let c = support_half_width(q);
        for i in 1..100 {
            let x = -c + 2.0 * c * i as f64 / 100.0;
            assert!(weight_density(&sup, x).unwrap() > 0.0);
        }
        assert!(matches!(weight_density(&sup, c), Err(Error::Support(_))));
        let pinf = |b: f64| log_q_shifted_inf_real(b, b).0.exp();
        let mut prod = 1.0;
        for k in 0..200 {
            let pk = q.powi(-k);
            prod *= 1.0 + 2.0 * pk + pk * pk;
        }
        let expect = pinf(1.0 / q) / (PI * (q - 1.0).sqrt()) * prod / 2f64.sqrt();
        let got = weight_density(&sup, 0.0).unwrap();
        assert!((got - expect).abs() < 1e-13 * expect);
    }

    #[test]
    fn super_weight_mass_as_displayed() {
        for q in [1.5, 2.0, 3.0, 4.0] {
            let disp = super_weight_mass(q, WeightNormalization::Displayed).unwrap();
            assert!((disp - 2.0 / (q - 1.0)).abs() < 1e-12, "q={q}: {disp}");
            assert!((super_weight_mass(q, WeightNormalization::Unit).unwrap() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn gram_identity_reduced_families() {
        for kind in FamilyKind::ALL {
            let q = if kind.regime() == Regime::SubOne { 0.5 } else { 2.0 };
            let r = orthonormality_check(&fam(kind, q, 1.0, 0.0), 10, &QuadSpec::default()).unwrap();
            assert!(r.max_abs < 1e-6, "{kind:?}: {}", r.max_abs);
            assert!(r.evals <= 1_000_000);
        }
    }

    #[test]
    fn gram_displayed_weight_at_q3() {
        let spec = QuadSpec { normalization: WeightNormalization::Displayed, ..QuadSpec::default() };
        let r = orthonormality_check(&fam(FamilyKind::PosSuper, 3.0, 1.0, 0.0), 10, &spec).unwrap();
        assert!(r.max_abs < 1e-6);
        let r = orthonormality_check(&fam(FamilyKind::PosSuper, 2.0, 1.0, 0.0), 4, &spec).unwrap();
        assert!((r.residual[(0, 0)].re - 1.0).abs() < 1e-9);
    }

    #[test]
    fn classical_limit_sub_and_super() {
        let hermite = |y: f64, n: usize| {
            let (mut a, mut b) = (1.0, 2.0 * y);
            if n == 0 {
                return a;
            }
            for k in 1..n {
                let c = 2.0 * y * b - 2.0 * k as f64 * a;
                a = b;
                b = c;
            }
            b
        };
        for (eps, tol) in [(1e-3, 1e-2), (1e-4, 1e-3)] {
            for q in [1.0 - eps, 1.0 + eps] {
                let kind = if q < 1.0 { FamilyKind::PosSub } else { FamilyKind::PosSuper };
                let f = fam(kind, q, 1.0, 0.0);
                let s = ((1.0 - q).abs() / 2.0).sqrt();
                for i in 0..9 {
                    let y = -2.0 + 0.5 * i as f64;
                    let v = poly_eval(&f, s * y, 6).values;
                    for n in 0..=6 {
                        let got = v[n] * s.powi(-(n as i32));
                        let h = hermite(y, n);
                        // H_n on |y| ≤ 2 is bounded by |H_n(2i)|
                        let scale = {
                            let (mut a, mut b) = (1.0, 4.0);
                            for k in 1..n.max(1) {
                                (a, b) = (b, 4.0 * b + 2.0 * k as f64 * a);
                            }
                            if n == 0 { a } else { b }
                        };
                        assert!((got - h).abs() <= tol * scale, "q={q} y={y} n={n}: {got} vs {h}");
                    }
                }
            }
        }
    }

    proptest! {
        #[test]
        fn parity_and_leading_coefficient(q in prop::sample::select(vec![0.3, 0.7, 1.5, 2.5]), lambda in -1.0f64..1.0, x in -2.0f64..2.0, n in 0usize..20) {
            let kind = if q < 1.0 { FamilyKind::PosSub } else { FamilyKind::PosSuper };
            let f = fam(kind, q, 0.8, lambda);
            let a = poly_eval(&f, x, n).values[n];
            let b = poly_eval(&f, -x, n).values[n];
            let sign = if n % 2 == 0 { 1.0 } else { -1.0 };
            prop_assert!((a - sign * b).abs() <= 1e-12 * a.abs().max(1.0));
            // h_n(t)/tⁿ → 2ⁿ as t grows
            let t = 1e6 * (1.0 + f.recursion_coefficient(n).abs().sqrt());
            let lead = poly_eval(&f, t, n).values[n] / t.powi(n as i32);
            prop_assert!((lead / 2f64.powi(n as i32) - 1.0).abs() < 1e-6);
        }
    }
}
