//! Radial node sets for integrals over the disc after the angular average.
//!
//! q<1: x = e^u on a scanned window, composite Gauss-Legendre in u, panels doubled
//! until the monitored moments settle. q>1: the Jackson lattice x_k = R q^{−k} with
//! weights q^{−k}, cut where the tail is negligible.

use crate::error::{Error, Result};
use crate::qkernel::{log_q_shifted_inf_real, norm_log, DeformationParams, Regime};
use crate::quad::{refine, QuadRule};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RadialPoint {
    pub x: f64,
    pub ln_x: f64,
    /// Lattice index k for q > 1 (x = R q^{−k}).
    pub lattice: Option<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RadialNode {
    pub point: RadialPoint,
    /// ln of quadrature weight × Jacobian × density.
    pub ln_weight: f64,
}

#[derive(Debug, Clone)]
pub struct RadialMeasure {
    pub nodes: Vec<RadialNode>,
    pub evals: usize,
    pub achieved: f64,
}

#[derive(Debug, Clone, Copy)]
pub struct RadialSpec {
    pub tol: f64,
    pub max_evals: usize,
}

impl Default for RadialSpec {
    fn default() -> Self {
        Self { tol: 1e-13, max_evals: 2_000_000 }
    }
}

/// ln 1/𝒩(x); exact −∞ at the lattice point x = R.
pub fn ln_inv_norm(p: &DeformationParams, pt: &RadialPoint) -> Result<f64> {
    match (p.regime(), pt.lattice) {
        (Regime::SuperOne, Some(k)) => {
            let b = 1.0 / p.q();
            Ok(log_q_shifted_inf_real(b.powi(k as i32), b).0)
        }
        _ => Ok(-norm_log(pt.x, p)?),
    }
}

/// ln of the resolution-of-identity density divided by 𝒩, per unit x (q<1) or per
/// lattice weight (q>1): 1/(ln q^{−1}(η+x)𝒩(x)) and 1/((1+x/η)𝒩(x)) = (q^{−k−1};q^{−1})_∞.
pub fn ln_resolution_density(p: &DeformationParams, pt: &RadialPoint) -> Result<f64> {
    match (p.regime(), pt.lattice) {
        (Regime::SuperOne, Some(k)) => {
            let b = 1.0 / p.q();
            Ok(log_q_shifted_inf_real(b.powi(k as i32 + 1), b).0)
        }
        (Regime::SuperOne, None) => Err(Error::Parameter("q>1 radial integrals live on the Jackson lattice".into())),
        (Regime::SubOne, _) => Ok(-(-p.ln_q()).ln() - (p.eta() + pt.x).ln() - norm_log(pt.x, p)?),
    }
}

/// ln c_n² = −Σ_{j≤n} ln φ(j) for n = 0..=n_max.
pub fn ln_coeff_sq(p: &DeformationParams, n_max: usize) -> Vec<f64> {
    let mut out = Vec::with_capacity(n_max + 1);
    let mut acc = 0.0;
    out.push(0.0);
    for j in 1..=n_max {
        acc -= p.phi(j).ln();
        out.push(acc);
    }
    out
}

fn point_u(u: f64) -> RadialPoint {
    RadialPoint { x: u.exp(), ln_x: u, lattice: None }
}

const WINDOW_DROP: f64 = 46.0;
const U_LIMIT: f64 = 700.0;

impl RadialMeasure {
    /// Nodes for ∫ h(x) dens(x) dx (q<1) or Σ_k q^{−k} h(x_k) dens(x_k) (q>1), sized
    /// so the moments c_n² ∫ xⁿ dens, n ≤ n_max, are resolved to `spec.tol`.
    pub fn build<D>(p: &DeformationParams, n_max: usize, ln_density: D, spec: &RadialSpec) -> Result<Self>
    where
        D: Fn(&RadialPoint) -> Result<f64>,
    {
        p.require_positive_lsq()?;
        let lc = ln_coeff_sq(p, n_max);
        match p.regime() {
            Regime::SubOne => Self::build_line(p, &lc, &ln_density, spec),
            Regime::SuperOne => Self::build_lattice(p, &lc, &ln_density, spec),
        }
    }

    /// The resolution-of-identity measure dμ/𝒩.
    pub fn resolution(p: &DeformationParams, n_max: usize, spec: &RadialSpec) -> Result<Self> {
        Self::build(p, n_max, |pt| ln_resolution_density(p, pt), spec)
    }

    /// Plain d²z/𝒩 after the angular integral (π dx for q<1, π·lattice for q>1).
    pub fn plain(p: &DeformationParams, n_max: usize, spec: &RadialSpec) -> Result<Self> {
        Self::build(p, n_max, |pt| Ok(std::f64::consts::PI.ln() + ln_inv_norm(p, pt)?), spec)
    }

    fn build_line<D>(p: &DeformationParams, lc: &[f64], ln_density: &D, spec: &RadialSpec) -> Result<Self>
    where
        D: Fn(&RadialPoint) -> Result<f64>,
    {
        // log-integrand of moment n in u, Jacobian included
        let profile = |u: f64| -> Result<Vec<f64>> {
            let pt = point_u(u);
            let d = ln_density(&pt)? + u;
            Ok(lc.iter().enumerate().map(|(n, c)| c + n as f64 * u + d).collect())
        };
        let width = (-p.ln_q()).sqrt();
        let h = (width / 4.0).min(0.25);
        let mut peaks = profile(0.0)?;
        let done = |v: &[f64], peaks: &[f64]| v.iter().zip(peaks).all(|(a, b)| !(a.is_finite() && *a > b - WINDOW_DROP));
        let mut hi = 0.0;
        loop {
            hi += h;
            let v = profile(hi)?;
            for (pk, x) in peaks.iter_mut().zip(&v) {
                *pk = pk.max(*x);
            }
            if done(&v, &peaks) {
                break;
            }
            if hi > U_LIMIT {
                return Err(Error::Divergent("radial integrand does not decay at large |z|".into()));
            }
        }
        let mut lo = 0.0;
        loop {
            lo -= h;
            let v = profile(lo)?;
            for (pk, x) in peaks.iter_mut().zip(&v) {
                *pk = pk.max(*x);
            }
            if done(&v, &peaks) {
                break;
            }
            if lo < -U_LIMIT {
                return Err(Error::Divergent("radial integrand does not decay at the origin".into()));
            }
        }
        let base = (((hi - lo) / (8.0 * h)).ceil() as usize).max(1);
        let nodes_at = |level: usize| -> Result<Vec<RadialNode>> {
            let rule = QuadRule::composite_gauss_legendre(lo, hi, base << level, 16);
            rule.nodes
                .iter()
                .zip(&rule.weights)
                .map(|(&u, &w)| {
                    let pt = point_u(u);
                    Ok(RadialNode { point: pt, ln_weight: w.ln() + u + ln_density(&pt)? })
                })
                .collect()
        };
        let moments = |nodes: &[RadialNode]| -> Vec<f64> {
            lc.iter()
                .enumerate()
                .map(|(n, c)| nodes.iter().map(|nd| (c + n as f64 * nd.point.ln_x + nd.ln_weight).exp()).sum())
                .collect()
        };
        let conv = refine(
            0,
            10,
            spec.tol,
            spec.max_evals,
            |level| {
                let nodes = nodes_at(level)?;
                let m = moments(&nodes);
                let n = nodes.len();
                Ok(((nodes, m), n))
            },
            |a, b| relative_gap(&a.1, &b.1),
        )?;
        Ok(Self { nodes: conv.value.0, evals: conv.evals, achieved: conv.achieved })
    }

    fn build_lattice<D>(p: &DeformationParams, lc: &[f64], ln_density: &D, spec: &RadialSpec) -> Result<Self>
    where
        D: Fn(&RadialPoint) -> Result<f64>,
    {
        let ln_p = -p.ln_q();
        let ln_r = p.radius().ln();
        let mut nodes = Vec::new();
        let mut sums = vec![0.0f64; lc.len()];
        let mut quiet = 0;
        let mut last_rel = f64::INFINITY;
        for k in 0.. {
            if k >= spec.max_evals {
                return Err(Error::Quadrature { evals: k, achieved: last_rel, wanted: spec.tol });
            }
            let ln_x = ln_r + k as f64 * ln_p;
            let pt = RadialPoint { x: ln_x.exp(), ln_x, lattice: Some(k) };
            let ln_weight = k as f64 * ln_p + ln_density(&pt)?;
            let node = RadialNode { point: pt, ln_weight };
            let mut rel = 0.0f64;
            for (n, c) in lc.iter().enumerate() {
                let t = (c + n as f64 * ln_x + ln_weight).exp();
                sums[n] += t;
                if sums[n] > 0.0 {
                    rel = rel.max(t / sums[n]);
                }
            }
            nodes.push(node);
            last_rel = rel;
            quiet = if k > 0 && rel < 1e-18 { quiet + 1 } else { 0 };
            if quiet >= 3 {
                break;
            }
        }
        // geometric tail of the n = 0 moment, ratio ≤ q^{−1}
        let achieved = last_rel / (1.0 - ln_p.exp());
        Ok(Self { evals: nodes.len(), nodes, achieved })
    }

    /// ∫ xⁿ c_n² over the measure for n = 0..=n_max.
    pub fn normalized_moments(&self, p: &DeformationParams, n_max: usize) -> Vec<f64> {
        let lc = ln_coeff_sq(p, n_max);
        lc.iter()
            .enumerate()
            .map(|(n, c)| self.nodes.iter().map(|nd| (c + n as f64 * nd.point.ln_x + nd.ln_weight).exp()).sum())
            .collect()
    }
}

fn relative_gap(a: &[f64], b: &[f64]) -> f64 {
    let scale = b.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y).abs() / y.abs().max(1e-14 * scale).max(f64::MIN_POSITIVE))
        .fold(0.0, f64::max)
}
