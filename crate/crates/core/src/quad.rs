//! Quadrature rules: Gauss-Legendre (single and composite), tanh-sinh, and a
//! level-doubling driver that stops once two successive levels agree.

use std::f64::consts::{FRAC_PI_2, PI};

use crate::error::{Error, Result};

/// Nodes and weights; `edge[i]` is the distance from node i to the nearer endpoint,
/// kept separately because `b − x` loses all digits near the ends of tanh-sinh rules.
#[derive(Debug, Clone, Default)]
pub struct QuadRule {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
    pub edge: Vec<f64>,
}

impl QuadRule {
    /// n-point Gauss-Legendre on [−1, 1].
    pub fn gauss_legendre(n: usize) -> Self {
        assert!(n >= 1);
        let mut nodes = vec![0.0; n];
        let mut weights = vec![0.0; n];
        for i in 0..n.div_ceil(2) {
            let mut x = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
            let mut dp = 0.0;
            for _ in 0..100 {
                let (p, d) = legendre(n, x);
                dp = d;
                let dx = p / d;
                x -= dx;
                if dx.abs() < 1e-16 {
                    break;
                }
            }
            let (_, d) = legendre(n, x);
            if d != 0.0 {
                dp = d;
            }
            let w = 2.0 / ((1.0 - x * x) * dp * dp);
            nodes[i] = -x;
            nodes[n - 1 - i] = x;
            weights[i] = w;
            weights[n - 1 - i] = w;
        }
        let edge = nodes.iter().map(|x| 1.0 - x.abs()).collect();
        Self { nodes, weights, edge }
    }

    /// `panels` equal panels of an `order`-point Gauss-Legendre rule on [a, b].
    pub fn composite_gauss_legendre(a: f64, b: f64, panels: usize, order: usize) -> Self {
        let base = Self::gauss_legendre(order);
        let h = (b - a) / panels as f64;
        let mut rule = Self::default();
        for k in 0..panels {
            let lo = a + k as f64 * h;
            for (x, w) in base.nodes.iter().zip(&base.weights) {
                let node = lo + 0.5 * h * (x + 1.0);
                rule.nodes.push(node);
                rule.weights.push(0.5 * h * w);
                rule.edge.push((node - a).min(b - node));
            }
        }
        rule
    }

    /// Tanh-sinh rule on [a, b] with step 2^{−level}. Integrands singular at the ends
    /// should be evaluated through `edge`, since nodes can round onto a or b.
    pub fn tanh_sinh(a: f64, b: f64, level: usize) -> Self {
        let h = 0.5f64.powi(level as i32);
        let half = 0.5 * (b - a);
        let mut rule = Self::default();
        let push = |t: f64, rule: &mut Self| -> bool {
            let u = FRAC_PI_2 * t.sinh();
            // distance to the nearer endpoint: half · 2/(1 + e^{2|u|})
            let dist = half * 2.0 / (1.0 + (2.0 * u.abs()).exp());
            let ch = u.cosh();
            let w = h * half * FRAC_PI_2 * t.cosh() / (ch * ch);
            if dist <= 0.0 || !w.is_finite() || w < 1e-300 {
                return false;
            }
            // x may round onto an endpoint; `edge` keeps the true distance
            let x = if u >= 0.0 { b - dist } else { a + dist };
            rule.nodes.push(x);
            rule.weights.push(w);
            rule.edge.push(dist);
            true
        };
        push(0.0, &mut rule);
        let mut k = 1;
        loop {
            let t = k as f64 * h;
            let right = push(t, &mut rule);
            let left = push(-t, &mut rule);
            if !right && !left {
                break;
            }
            k += 1;
        }
        rule
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn integrate<F: Fn(f64) -> f64>(&self, f: F) -> f64 {
        self.nodes.iter().zip(&self.weights).map(|(&x, &w)| w * f(x)).sum()
    }
}

fn legendre(n: usize, x: f64) -> (f64, f64) {
    let (mut p0, mut p1) = (1.0, x);
    for k in 2..=n {
        let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
        p0 = p1;
        p1 = p2;
    }
    if n == 0 {
        return (1.0, 0.0);
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

#[derive(Debug, Clone)]
pub struct Converged<T> {
    pub value: T,
    pub level: usize,
    pub evals: usize,
    pub achieved: f64,
}

/// Evaluates `eval(level)` for increasing levels until `dist` between two successive
/// results falls below `tol`. `eval` returns the value and the evaluations it used.
pub fn refine<T, E, D>(start: usize, max_level: usize, tol: f64, budget: usize, mut eval: E, dist: D) -> Result<Converged<T>>
where
    E: FnMut(usize) -> Result<(T, usize)>,
    D: Fn(&T, &T) -> f64,
{
    let (mut prev, mut evals) = eval(start)?;
    let mut achieved = f64::INFINITY;
    for level in start + 1..=max_level {
        let (cur, n) = eval(level)?;
        evals += n;
        achieved = dist(&prev, &cur);
        if achieved <= tol {
            return Ok(Converged { value: cur, level, evals, achieved });
        }
        if evals > budget {
            break;
        }
        prev = cur;
    }
    Err(Error::Quadrature { evals, achieved, wanted: tol })
}
