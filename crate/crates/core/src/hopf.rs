//! Coproduct, counit and antipode of the oscillator algebra checked on truncated
//! tensor-product spaces.
//!
//! Δ(a†) = q^{−γ/2}(a†⊗K + K⊗a†), Δ(a) likewise, Δ(N) = N⊗I + I⊗N + γ I⊗I with
//! K = q^{−N/2} and q^{−γ} = 2. Products of generators are tracked as term lists,
//! so triple tensors are assembled sparsely.

use std::collections::HashMap;

use nalgebra::DMatrix;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::qkernel::DeformationParams;
use crate::report::{CheckReport, ParamsRecord, Suite};

/// Largest factor dimension for dense tensor operators.
pub const MAX_TENSOR_DIM: usize = 32;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum Generator {
    A,
    Adag,
    N,
    I,
    /// q^{−N/2}
    K,
}

impl Generator {
    pub const LADDER: [Generator; 4] = [Generator::A, Generator::Adag, Generator::N, Generator::I];

    pub fn name(self) -> &'static str {
        match self {
            Generator::A => "a",
            Generator::Adag => "a†",
            Generator::N => "N",
            Generator::I => "I",
            Generator::K => "q^{-N/2}",
        }
    }

    /// The one nonzero per row: row i ↦ (column, value).
    fn row_entries(self, p: &DeformationParams, dim: usize) -> Vec<Option<(usize, f64)>> {
        (0..dim)
            .map(|i| match self {
                Generator::A => (i + 1 < dim).then(|| (i + 1, p.phi(i + 1).sqrt())),
                Generator::Adag => (i > 0).then(|| (i - 1, p.phi(i).sqrt())),
                Generator::N => Some((i, i as f64)),
                Generator::I => Some((i, 1.0)),
                Generator::K => Some((i, (-0.5 * p.ln_q() * i as f64).exp())),
            })
            .collect()
    }

    pub fn matrix(self, p: &DeformationParams, dim: usize) -> DMatrix<f64> {
        let mut m = DMatrix::zeros(dim, dim);
        for (i, e) in self.row_entries(p, dim).into_iter().enumerate() {
            if let Some((j, v)) = e {
                m[(i, j)] = v;
            }
        }
        m
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Term2 {
    pub coef: f64,
    pub left: Generator,
    pub right: Generator,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct HopfMaps {
    /// γ with q^{−γ} = 2.
    pub gamma: f64,
    /// Free constant in S(N) = N + c13.
    pub c13: f64,
    ln_q: f64,
}

impl HopfMaps {
    pub fn new(p: &DeformationParams, c13: f64) -> Self {
        Self { gamma: -std::f64::consts::LN_2 / p.ln_q(), c13, ln_q: p.ln_q() }
    }

    fn q_pow(&self, e: f64) -> f64 {
        (e * self.ln_q).exp()
    }

    pub fn coproduct(&self, g: Generator) -> Vec<Term2> {
        let t = |coef, left, right| Term2 { coef, left, right };
        let c = self.q_pow(-self.gamma / 2.0);
        match g {
            Generator::A | Generator::Adag => vec![t(c, g, Generator::K), t(c, Generator::K, g)],
            Generator::N => vec![t(1.0, Generator::N, Generator::I), t(1.0, Generator::I, Generator::N), t(self.gamma, Generator::I, Generator::I)],
            Generator::I => vec![t(1.0, Generator::I, Generator::I)],
            // q^{−Δ(N)/2}
            Generator::K => vec![t(c, Generator::K, Generator::K)],
        }
    }

    pub fn counit(&self, g: Generator) -> f64 {
        match g {
            Generator::A | Generator::Adag => 0.0,
            Generator::N => -self.gamma,
            Generator::I => 1.0,
            Generator::K => self.q_pow(self.gamma / 2.0),
        }
    }

    /// S(g) as a combination of generators.
    pub fn antipode(&self, g: Generator) -> Vec<(f64, Generator)> {
        let s = self.q_pow(-self.c13 / 2.0);
        match g {
            Generator::A | Generator::Adag | Generator::K => vec![(s, g)],
            Generator::N => vec![(1.0, Generator::N), (self.c13, Generator::I)],
            Generator::I => vec![(1.0, Generator::I)],
        }
    }
}

/// An operator on the dim²-dimensional tensor space.
#[derive(Debug, Clone)]
pub struct TensorOperator {
    pub matrix: DMatrix<f64>,
    pub factors: String,
    pub dim: usize,
}

impl TensorOperator {
    pub fn from_terms(p: &DeformationParams, terms: &[Term2], dim: usize, factors: impl Into<String>) -> Result<Self> {
        if dim > MAX_TENSOR_DIM {
            return Err(Error::Parameter(format!("tensor checks cap the factor dimension at {MAX_TENSOR_DIM}, got {dim}")));
        }
        let mut m = DMatrix::zeros(dim * dim, dim * dim);
        for t in terms {
            m += t.left.matrix(p, dim).kronecker(&t.right.matrix(p, dim)) * t.coef;
        }
        Ok(Self { matrix: m, factors: factors.into(), dim })
    }

    /// Row/column index of |i⟩⊗|j⟩.
    pub fn index(&self, i: usize, j: usize) -> usize {
        i * self.dim + j
    }

    /// max |A − B| over rows and columns whose factor indices stay below `limit`.
    pub fn window_gap(&self, other: &DMatrix<f64>, limit: usize) -> f64 {
        let mut r: f64 = 0.0;
        for (i, j) in pairs(limit) {
            for (k, l) in pairs(limit) {
                let (row, col) = (self.index(i, j), self.index(k, l));
                r = r.max((self.matrix[(row, col)] - other[(row, col)]).abs());
            }
        }
        r
    }
}

fn pairs(limit: usize) -> impl Iterator<Item = (usize, usize)> {
    (0..limit).flat_map(move |i| (0..limit).map(move |j| (i, j)))
}

pub fn coproduct(p: &DeformationParams, maps: &HopfMaps, g: Generator, dim: usize) -> Result<TensorOperator> {
    TensorOperator::from_terms(p, &maps.coproduct(g), dim, format!("Δ({})", g.name()))
}

type Sparse = HashMap<(usize, usize), f64>;

/// Σ coef · g1⊗g2⊗g3 on the dim³ space, stored by nonzero entry.
fn sparse_triple(p: &DeformationParams, terms: &[(f64, [Generator; 3])], dim: usize) -> Sparse {
    let mut cache: HashMap<Generator, Vec<Option<(usize, f64)>>> = HashMap::new();
    let mut out = Sparse::new();
    for (coef, gens) in terms {
        for g in gens {
            cache.entry(*g).or_insert_with(|| g.row_entries(p, dim));
        }
        let (r1, r2, r3) = (&cache[&gens[0]], &cache[&gens[1]], &cache[&gens[2]]);
        for i in 0..dim {
            let Some((ci, vi)) = r1[i] else { continue };
            for j in 0..dim {
                let Some((cj, vj)) = r2[j] else { continue };
                for k in 0..dim {
                    let Some((ck, vk)) = r3[k] else { continue };
                    let key = ((i * dim + j) * dim + k, (ci * dim + cj) * dim + ck);
                    *out.entry(key).or_insert(0.0) += coef * vi * vj * vk;
                }
            }
        }
    }
    out
}

fn sparse_gap(a: &Sparse, b: &Sparse) -> f64 {
    let diff = |x: &Sparse, y: &Sparse| x.iter().map(|(k, v)| (v - y.get(k).copied().unwrap_or(0.0)).abs()).fold(0.0, f64::max);
    diff(a, b).max(diff(b, a))
}

fn sparse_scale(a: &Sparse) -> f64 {
    a.values().fold(1.0f64, |m, v| m.max(v.abs()))
}

/// Relative residual of (Δ⊗id)Δ(g) − (id⊗Δ)Δ(g) on the dim³ space.
pub fn coassociativity_residual(p: &DeformationParams, maps: &HopfMaps, g: Generator, dim: usize) -> f64 {
    let outer = maps.coproduct(g);
    let mut left = Vec::new();
    let mut right = Vec::new();
    for t in &outer {
        for s in maps.coproduct(t.left) {
            left.push((t.coef * s.coef, [s.left, s.right, t.right]));
        }
        for s in maps.coproduct(t.right) {
            right.push((t.coef * s.coef, [t.left, s.left, s.right]));
        }
    }
    let (l, r) = (sparse_triple(p, &left, dim), sparse_triple(p, &right, dim));
    sparse_gap(&l, &r) / sparse_scale(&l)
}

/// (max |(id⊗ε)Δ(g) − g|, max |(ε⊗id)Δ(g) − g|).
pub fn counit_residuals(p: &DeformationParams, maps: &HopfMaps, g: Generator, dim: usize) -> (f64, f64) {
    let target = g.matrix(p, dim);
    let mut right = DMatrix::zeros(dim, dim);
    let mut left = DMatrix::zeros(dim, dim);
    for t in maps.coproduct(g) {
        right += t.left.matrix(p, dim) * (t.coef * maps.counit(t.right));
        left += t.right.matrix(p, dim) * (t.coef * maps.counit(t.left));
    }
    let scale = target.amax().max(1.0);
    ((right - &target).amax() / scale, (left - &target).amax() / scale)
}

/// m(S⊗id)Δ(g) and m(id⊗S)Δ(g) as matrices.
pub fn antipode_products(p: &DeformationParams, maps: &HopfMaps, g: Generator, dim: usize) -> (DMatrix<f64>, DMatrix<f64>) {
    let combo = |v: Vec<(f64, Generator)>| v.into_iter().fold(DMatrix::zeros(dim, dim), |acc, (c, h)| acc + h.matrix(p, dim) * c);
    let mut sl = DMatrix::zeros(dim, dim);
    let mut sr = DMatrix::zeros(dim, dim);
    for t in maps.coproduct(g) {
        sl += combo(maps.antipode(t.left)) * t.right.matrix(p, dim) * t.coef;
        sr += t.left.matrix(p, dim) * combo(maps.antipode(t.right)) * t.coef;
    }
    (sl, sr)
}

/// Residuals of the tensor-space identities that the structure is expected to
/// respect, each restricted to factor indices below dim − 1.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct AlgebraResiduals {
    /// Δ(a)Δ(a†) − αΔ(a†)Δ(a) against its expansion into the four cross terms.
    pub expansion: f64,
    /// The same against (l²q^λ/(q−1))(1 − α − q^{−1−γ}(1−qα) K²⊗K²), at α = 1/q.
    pub commutator_display: f64,
    /// Δ(a†)Δ(a) against φ(Δ(N)).
    pub homomorphism_number: f64,
    /// Δ(a)Δ(a†) against φ(Δ(N) + 1).
    pub homomorphism_inverse: f64,
}

pub fn algebra_residuals(p: &DeformationParams, maps: &HopfMaps, dim: usize) -> Result<AlgebraResiduals> {
    use Generator::*;
    let da = coproduct(p, maps, A, dim)?.matrix;
    let dad = coproduct(p, maps, Adag, dim)?.matrix;
    let alpha = 1.0 / p.q();
    let lhs = TensorOperator { matrix: &da * &dad - (&dad * &da) * alpha, factors: "Δ([a,a†]_α)".into(), dim };
    let c2 = (-maps.gamma * p.ln_q()).exp();
    let kron = |x: &DMatrix<f64>, y: &DMatrix<f64>| x.kronecker(y);
    let (a, ad, k) = (A.matrix(p, dim), Adag.matrix(p, dim), K.matrix(p, dim));
    let comm = &a * &ad - (&ad * &a) * alpha;
    let k2 = &k * &k;
    let expansion = (kron(&comm, &k2) + kron(&k2, &comm) + kron(&(&a * &k), &(&k * &ad)) - kron(&(&k * &a), &(&ad * &k)) * alpha
        + kron(&(&k * &ad), &(&a * &k))
        - kron(&(&ad * &k), &(&k * &a)) * alpha)
        * c2;
    let coupling = p.coupling();
    let id = DMatrix::<f64>::identity(dim, dim);
    let display = (kron(&id, &id) * (1.0 - alpha) - kron(&k2, &k2) * (p.q().powf(-1.0 - maps.gamma) * (1.0 - p.q() * alpha))) * (coupling / (p.q() - 1.0));
    let dn = coproduct(p, maps, N, dim)?.matrix;
    let phi_of = |shift: f64| DMatrix::from_fn(dim * dim, dim * dim, |i, j| if i == j { p.phi_real(dn[(i, i)] + shift) } else { 0.0 });
    let number = TensorOperator { matrix: &dad * &da, factors: "Δ(a†)Δ(a)".into(), dim };
    let inverse = TensorOperator { matrix: &da * &dad, factors: "Δ(a)Δ(a†)".into(), dim };
    let lim = dim - 1;
    let rel = |t: &TensorOperator, m: &DMatrix<f64>| t.window_gap(m, lim) / m.amax().max(1.0);
    Ok(AlgebraResiduals {
        expansion: rel(&lhs, &expansion),
        commutator_display: rel(&lhs, &display),
        homomorphism_number: rel(&number, &phi_of(0.0)),
        homomorphism_inverse: rel(&inverse, &phi_of(1.0)),
    })
}

/// Every axiom check on the generators at factor dimension `dim` (≥ 2, ≤ MAX_TENSOR_DIM).
pub fn verify_axioms(p: &DeformationParams, dim: usize, c13: f64) -> Result<Suite> {
    if !(2..=MAX_TENSOR_DIM).contains(&dim) {
        return Err(Error::Parameter(format!("hopf checks need 2 <= dim <= {MAX_TENSOR_DIM}, got {dim}")));
    }
    p.require_positive_lsq()?;
    let maps = HopfMaps::new(p, c13);
    let rec = ParamsRecord::new(p, dim);
    let tol = 1e-10;
    let mut s = Suite::default();
    for g in Generator::LADDER {
        s.push(CheckReport::asserted(
            format!("hopf.coassociativity[{}]", g.name()),
            "(Δ⊗id)Δ = (id⊗Δ)Δ on the triple tensor space",
            rec,
            coassociativity_residual(p, &maps, g, dim),
            tol,
        ));
        let (r, l) = counit_residuals(p, &maps, g, dim);
        s.push(CheckReport::asserted(format!("hopf.counit[{}]", g.name()), "(id⊗ε)Δ(h) = h = (ε⊗id)Δ(h)", rec, r.max(l), 1e-12));
    }
    let (sl, sr) = antipode_products(p, &maps, Generator::N, dim);
    let target = DMatrix::from_fn(dim, dim, |i, j| if i == j { 2.0 * i as f64 + maps.gamma + c13 } else { 0.0 });
    let scale = target.amax().max(1.0);
    s.push(CheckReport::asserted(
        "hopf.antipode_identity[N]",
        "m(S⊗id)Δ(N) = 2N + γI + c13 = m(id⊗S)Δ(N)",
        rec,
        (&sl - &target).amax().max((&sr - &target).amax()) / scale,
        tol,
    ));
    for g in Generator::LADDER {
        let (sl, sr) = antipode_products(p, &maps, g, dim);
        let eps = DMatrix::<f64>::identity(dim, dim) * maps.counit(g);
        let window = |m: &DMatrix<f64>| m.view((0, 0), (dim - 1, dim - 1)).amax();
        let r = window(&(&sl - &eps)).max(window(&(&sr - &eps)));
        s.push(CheckReport::reported(format!("hopf.antipode_axiom[{}]", g.name()), "m(S⊗id)Δ(h) = ε(h)I", rec, r, tol));
    }
    let alg = algebra_residuals(p, &maps, dim)?;
    s.push(CheckReport::asserted(
        "hopf.alpha_commutator_expansion",
        "Δ(a)Δ(a†) − αΔ(a†)Δ(a) equals its four-term expansion",
        rec,
        alg.expansion,
        tol,
    ));
    s.push(CheckReport::reported(
        "hopf.alpha_commutator_display",
        "Δ([a,a†]_α) = (l²q^λ/(q−1))(1 − α − q^{−1−γ}(1−qα)q^{−N}⊗q^{−N}), α = 1/q",
        rec,
        alg.commutator_display,
        tol,
    ));
    s.push(CheckReport::reported("hopf.homomorphism[a†a]", "Δ(a†)Δ(a) = φ(Δ(N))", rec, alg.homomorphism_number, tol));
    s.push(CheckReport::reported("hopf.homomorphism[aa†]", "Δ(a)Δ(a†) = φ(Δ(N)+1)", rec, alg.homomorphism_inverse, tol));
    Ok(s)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn params() -> Vec<DeformationParams> {
        [(0.5, 1.0, 0.0), (2.0, 1.0, 1.0), (0.8, 1.5, -0.5), (3.0, 0.7, 0.2)]
            .into_iter()
            .map(|(q, l, a)| DeformationParams::new(q, l, a).unwrap())
            .collect()
    }

    #[test]
    fn kronecker_mixed_product() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let mut rand_m = |n: usize| DMatrix::<f64>::from_fn(n, n, |_, _| rng.gen_range(-1.0..1.0));
        for _ in 0..5 {
            let (a, b, c, d) = (rand_m(4), rand_m(5), rand_m(4), rand_m(5));
            let lhs = a.kronecker(&b) * c.kronecker(&d);
            let rhs = (&a * &c).kronecker(&(&b * &d));
            assert!((lhs - rhs).amax() < 1e-12);
        }
    }

    #[test]
    fn gamma_and_counit_values() {
        for p in params() {
            let m = HopfMaps::new(&p, 0.3);
            assert!(((-m.gamma * p.ln_q()).exp() - 2.0).abs() < 1e-14);
            assert_eq!(m.counit(Generator::A), 0.0);
            assert_eq!(m.counit(Generator::Adag), 0.0);
            assert_eq!(m.counit(Generator::N), -m.gamma);
            assert_eq!(m.counit(Generator::I), 1.0);
        }
    }

    #[test]
    fn coproduct_of_identity_and_number() {
        let p = DeformationParams::new(0.5, 1.0, 0.0).unwrap();
        let m = HopfMaps::new(&p, 0.0);
        let d = 6;
        let id = coproduct(&p, &m, Generator::I, d).unwrap();
        assert_eq!(id.matrix, DMatrix::identity(d * d, d * d));
        let n = coproduct(&p, &m, Generator::N, d).unwrap();
        for i in 0..d {
            for j in 0..d {
                let k = n.index(i, j);
                assert!((n.matrix[(k, k)] - (i + j) as f64 - m.gamma).abs() < 1e-13);
            }
        }
        assert!(coproduct(&p, &m, Generator::I, MAX_TENSOR_DIM + 1).is_err());
    }

    #[test]
    fn sparse_triple_matches_dense_kronecker() {
        let p = DeformationParams::new(2.0, 1.0, 0.0).unwrap();
        let d = 4;
        let gens = [Generator::Adag, Generator::K, Generator::A];
        let sp = sparse_triple(&p, &[(1.5, gens)], d);
        let dense = gens[0].matrix(&p, d).kronecker(&gens[1].matrix(&p, d)).kronecker(&gens[2].matrix(&p, d)) * 1.5;
        for ((r, c), v) in &sp {
            assert!((dense[(*r, *c)] - v).abs() < 1e-14);
        }
        assert_eq!(sp.len(), dense.iter().filter(|v| **v != 0.0).count());
    }

    #[test]
    fn axioms_hold_and_shrink_with_dim() {
        for p in params() {
            let m = HopfMaps::new(&p, 0.4);
            for g in Generator::LADDER {
                let small = coassociativity_residual(&p, &m, g, 4);
                let big = coassociativity_residual(&p, &m, g, 8);
                assert!(big < 1e-12 && (big <= small || big < 1e-14), "{}", g.name());
                let (r, l) = counit_residuals(&p, &m, g, 8);
                assert!(r < 1e-12 && l < 1e-12);
            }
            let s = verify_axioms(&p, 8, 0.4).unwrap();
            assert!(s.all_pass(), "{:#?}", s.checks.iter().filter(|c| c.fails_run()).collect::<Vec<_>>());
        }
    }

    #[test]
    fn antipode_on_number_operator() {
        let p = DeformationParams::new(0.5, 1.0, 0.0).unwrap();
        let m = HopfMaps::new(&p, 1.25);
        let (sl, sr) = antipode_products(&p, &m, Generator::N, 5);
        for i in 0..5 {
            assert!((sl[(i, i)] - (2.0 * i as f64 + m.gamma + 1.25)).abs() < 1e-14);
            assert!((sr[(i, i)] - sl[(i, i)]).abs() < 1e-14);
        }
    }

    #[test]
    fn displayed_commutator_image_is_not_reproduced() {
        for p in params() {
            let r = algebra_residuals(&p, &HopfMaps::new(&p, 0.0), 6).unwrap();
            assert!(r.expansion < 1e-12);
            assert!(r.commutator_display > 1e-3);
        }
    }
}
