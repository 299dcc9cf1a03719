//! Floating-point norms in q-metrics.
//!
//! A tensor power carries the inner product `⟨x, P y⟩` for a Gram operator
//! `P = L L^†`. The norm of a map `M` between two such spaces is the spectral
//! norm of `L_dst^† M L_src^{-†}`.

use std::collections::HashMap;
use std::sync::{Arc, RwLock};

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::fock::FockOperator;
use crate::qtensor::{pow, LinMap, QSpace, Tensor};
use crate::sampling::{random_float_tensor, split_rng};

/// Largest amplification accepted by the amplified norms.
pub const MAX_AMPLIFICATION: usize = 4;
/// Relative increment below which a truncation trace counts as converged.
pub const CONVERGENCE_TOLERANCE: f64 = 0.005;
/// Fock-space dimension (times amplification) above which a trace stops.
pub const MAX_FOCK_DIM: usize = 600;

/// How the legs of a tensor power are grouped for the metric.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Grading {
    /// Flat coordinate inner product on `legs` legs.
    Flat(usize),
    /// `P_q^n` on `n` legs.
    Level(usize),
    /// `P_q^{n_1} ⊗ P_q^{n_2} ⊗ …`.
    Split(Vec<usize>),
}

impl Grading {
    pub fn legs(&self) -> usize {
        match self {
            Grading::Flat(n) | Grading::Level(n) => *n,
            Grading::Split(parts) => parts.iter().sum(),
        }
    }
}

/// Spectral norm of a dense row-major matrix.
pub fn spectral_norm_flat(rows: usize, cols: usize, data: &[Complex64]) -> f64 {
    spectral_norm(&DMatrix::from_row_slice(rows, cols, data))
}

pub fn spectral_norm(m: &DMatrix<Complex64>) -> f64 {
    if m.is_empty() {
        return 0.0;
    }
    m.singular_values().max()
}

fn to_matrix(m: &LinMap<Complex64>) -> DMatrix<Complex64> {
    DMatrix::from_row_slice(m.rows(), m.cols(), m.data())
}

fn block_diagonal(blocks: &[&DMatrix<Complex64>]) -> DMatrix<Complex64> {
    let n: usize = blocks.iter().map(|b| b.nrows()).sum();
    let mut out = DMatrix::zeros(n, n);
    let mut at = 0;
    for b in blocks {
        out.view_mut((at, at), (b.nrows(), b.ncols())).copy_from(b);
        at += b.nrows();
    }
    out
}

/// `X · L^{-†}` for lower-triangular `L`.
fn right_solve_adjoint(x: &DMatrix<Complex64>, l: &DMatrix<Complex64>) -> DMatrix<Complex64> {
    // Z L^† = X  ⇔  L Z^† = X^†.
    l.solve_lower_triangular(&x.adjoint()).expect("Cholesky factors are invertible").adjoint()
}

/// Gram factors and norms for the float backend.
#[derive(Debug)]
pub struct NormLab {
    space: QSpace<Complex64>,
    factors: RwLock<HashMap<usize, Arc<DMatrix<Complex64>>>>,
}

impl NormLab {
    pub fn new(dim: usize, q: f64) -> Result<Self> {
        Ok(NormLab { space: QSpace::numeric(dim, q)?, factors: RwLock::default() })
    }

    pub fn from_space(space: QSpace<Complex64>) -> Self {
        NormLab { space, factors: RwLock::default() }
    }

    pub fn space(&self) -> &QSpace<Complex64> {
        &self.space
    }

    pub fn dim(&self) -> usize {
        self.space.dim()
    }

    pub fn q(&self) -> f64 {
        self.space.q_value()
    }

    /// Lower-triangular `L_n` with `L_n L_n^† = P_q^n`.
    pub fn gram_factor(&self, n: usize) -> Result<Arc<DMatrix<Complex64>>> {
        if let Some(l) = self.factors.read().expect("factor cache poisoned").get(&n) {
            return Ok(l.clone());
        }
        let gram = to_matrix(&*self.space.gram(n)?);
        let l = Arc::new(gram.cholesky().ok_or(Error::NotPositiveDefinite(n))?.l());
        self.factors.write().expect("factor cache poisoned").insert(n, l.clone());
        Ok(l)
    }

    /// Factor of the Gram operator of a grading.
    pub fn grading_factor(&self, g: &Grading) -> Result<DMatrix<Complex64>> {
        Ok(match g {
            Grading::Flat(n) => DMatrix::identity(pow(self.dim(), *n), pow(self.dim(), *n)),
            Grading::Level(n) => (*self.gram_factor(*n)?).clone(),
            Grading::Split(parts) => {
                let mut acc = DMatrix::identity(1, 1);
                for &p in parts {
                    acc = acc.kronecker(&*self.gram_factor(p)?);
                }
                acc
            }
        })
    }

    /// Operator norm of `m` from `src` to `dst`.
    pub fn qop_norm(&self, m: &LinMap<Complex64>, src: &Grading, dst: &Grading) -> Result<f64> {
        if m.src_legs() != src.legs() || m.dst_legs() != dst.legs() || m.dim() != self.dim() {
            return Err(Error::ShapeMismatch("map does not match its gradings".into()));
        }
        let ls = self.grading_factor(src)?;
        let ld = self.grading_factor(dst)?;
        Ok(spectral_norm(&right_solve_adjoint(&(ld.adjoint() * to_matrix(m)), &ls)))
    }

    /// Norm of `R*_{n,k}` from `H_q^{⊗(n+k)}` to `H_q^{⊗n} ⊗ H_q^{⊗k}`, and
    /// the norm of its q-adjoint `R_{n,k}`, which in coordinates is the
    /// identity from the split space to the joint one.
    pub fn rstar_norm(&self, n: usize, k: usize) -> Result<RstarNorm> {
        let rstar = self.space.rstar(n, k)?;
        let joint = Grading::Level(n + k);
        let split = Grading::Split(vec![n, k]);
        let norm = self.qop_norm(&rstar, &joint, &split)?;
        let dual = self.qop_norm(&LinMap::identity(n + k, self.dim()), &split, &joint)?;
        Ok(RstarNorm { n, k, rstar: norm, r: dual })
    }

    fn fock_factor(&self, truncation: usize) -> Result<DMatrix<Complex64>> {
        let factors = (0..=truncation).map(|m| self.gram_factor(m)).collect::<Result<Vec<_>>>()?;
        Ok(block_diagonal(&factors.iter().map(|f| f.as_ref()).collect::<Vec<_>>()))
    }

    fn fock_matrix(op: &FockOperator<Complex64>) -> DMatrix<Complex64> {
        let n = op.truncation();
        let offsets: Vec<usize> = (0..=n).scan(0, |acc, m| {
            let at = *acc;
            *acc += pow(op.dim(), m);
            Some(at)
        }).collect();
        let total = op.total_dim();
        let mut out = DMatrix::zeros(total, total);
        for dst in 0..=n {
            for src in 0..=n {
                if let Some(b) = op.block(dst, src) {
                    out.view_mut((offsets[dst], offsets[src]), (b.rows(), b.cols())).copy_from(&to_matrix(b));
                }
            }
        }
        out
    }

    /// Norm of a Fock operator in the q-metric.
    pub fn fock_norm(&self, op: &FockOperator<Complex64>) -> Result<f64> {
        self.amplified_fock_norm(&[op.clone()], 1)
    }

    /// Norm of `Σ_{a,b} E_{ab} ⊗ ops[a·m + b]` on `C^m ⊗ F`.
    pub fn amplified_fock_norm(&self, ops: &[FockOperator<Complex64>], m: usize) -> Result<f64> {
        if ops.len() != m * m || m == 0 {
            return Err(Error::ShapeMismatch(format!("{} blocks for amplification {m}", ops.len())));
        }
        if ops.iter().any(|o| o.dim() != self.dim() || o.truncation() != ops[0].truncation()) {
            return Err(Error::ShapeMismatch("amplified blocks of different shapes".into()));
        }
        let l = self.fock_factor(ops[0].truncation())?;
        let size = l.nrows();
        let mut big = DMatrix::zeros(m * size, m * size);
        for a in 0..m {
            for b in 0..m {
                let conj = right_solve_adjoint(&(l.adjoint() * Self::fock_matrix(&ops[a * m + b])), &l);
                big.view_mut((a * size, b * size), (size, size)).copy_from(&conj);
            }
        }
        Ok(spectral_norm(&big))
    }

    /// Norm of `ζ` in `M_m ⊗_min (H_q^{⊗(n-k)})_c ⊗_h (H_q^{⊗k})_r`, with `n`
    /// the number of legs of each entry.
    pub fn column_row_norm(&self, zeta: &AmplifiedTensor, k: usize) -> Result<f64> {
        let n = zeta.legs();
        if k > n || zeta.dim() != self.dim() {
            return Err(Error::ShapeMismatch(format!("split {k} of a {n}-leg tensor")));
        }
        let m = zeta.m();
        let (rows, cols) = (pow(self.dim(), n - k), pow(self.dim(), k));
        let mut z = DMatrix::zeros(m * rows, m * cols);
        for a in 0..m {
            for b in 0..m {
                let block = DMatrix::from_row_slice(rows, cols, zeta.entry(a, b).data());
                z.view_mut((a * rows, b * cols), (rows, cols)).copy_from(&block);
            }
        }
        let lc = self.gram_factor(n - k)?.adjoint();
        let lr = self.gram_factor(k)?.map(|v| v.conj());
        let eye = DMatrix::<Complex64>::identity(m, m);
        Ok(spectral_norm(&(eye.kronecker(&lc) * z * eye.kronecker(&lr))))
    }

    /// Norms of `‖W(ξ)‖` on truncations `N = n, n+1, …, max_truncation`, on
    /// the Fock space of the letters that occur in `ξ`.
    pub fn wick_norm_estimate(&self, xi: &AmplifiedTensor, max_truncation: usize) -> Result<WickTrace> {
        let n = xi.legs();
        if max_truncation < n {
            return Err(Error::TruncationTooSmall { legs: n, truncation: max_truncation });
        }
        let (restricted, letters) = xi.restrict_to_support();
        let sub = NormLab::from_space(QSpace::numeric(letters.max(1), self.q())?.with_ceiling(self.space.ceiling()));
        let mut trace = WickTrace { dim: letters, truncations: Vec::new(), values: Vec::new() };
        for truncation in n..=max_truncation {
            let fock_dim: usize = (0..=truncation).map(|l| pow(sub.dim(), l)).sum();
            if truncation > n && fock_dim * xi.m() > MAX_FOCK_DIM {
                break;
            }
            let ops = restricted
                .entries()
                .iter()
                .map(|t| sub.space.wick_operator(t, truncation))
                .collect::<Result<Vec<_>>>()?;
            trace.truncations.push(truncation);
            trace.values.push(sub.amplified_fock_norm(&ops, xi.m())?);
        }
        Ok(trace)
    }

    /// Compare `max_k ‖(Id ⊗ R*_{n-k,k}) ξ‖_{c,r}` with the Wick-norm trace.
    pub fn khintchine_report(&self, xi: &AmplifiedTensor, max_truncation: usize) -> Result<KhintchineReport> {
        let n = xi.legs();
        let mut column_row = Vec::with_capacity(n + 1);
        for k in 0..=n {
            let rstar = self.space.rstar(n - k, k)?;
            let split = xi.map_entries(|t| rstar.apply(t))?;
            column_row.push(self.column_row_norm(&split, k)?);
        }
        let lhs = column_row.iter().cloned().fold(0.0, f64::max);
        let trace = self.wick_norm_estimate(xi, max_truncation)?;
        let estimate = trace.estimate();
        let slack = trace.last_increment().max(1e-12);
        let ratio = if lhs > 0.0 { estimate / lhs } else { 1.0 };
        Ok(KhintchineReport {
            n,
            m: xi.m(),
            q: self.q(),
            column_row,
            lhs,
            estimate,
            ratio,
            ratio_per_level: ratio / (n + 1) as f64,
            lower_holds: lhs <= estimate * (1.0 + slack),
            converged: trace.converged(),
            trace,
        })
    }

    /// `sup ‖W(ξ_n)‖ / ‖x‖` over random `x = Σ_{l ≤ n+1} W(ξ_l)`; the first
    /// sample is `x = W(ξ_n)` alone.
    pub fn pn_lower_bound_estimate(&self, n: usize, samples: usize, truncation: usize, seed: u64) -> Result<PnEstimate> {
        let top = n + 1;
        if truncation < top {
            return Err(Error::TruncationTooSmall { legs: top, truncation });
        }
        let mut ratios = Vec::with_capacity(samples);
        for s in 0..samples {
            let mut r = split_rng(seed, s as u64);
            let parts: Vec<Tensor<Complex64>> = (0..=top)
                .map(|l| {
                    let complex = r.random::<bool>();
                    let t = random_float_tensor(&mut r, l, self.dim(), complex);
                    if s == 0 && l != n { t.scale(&Complex64::new(0.0, 0.0)) } else { t }
                })
                .collect();
            let target = self.fock_norm(&self.space.wick_operator(&parts[n], truncation)?)?;
            let mut x = FockOperator::zeros(self.dim(), truncation);
            for t in &parts {
                x = x.add(&self.space.wick_operator(t, truncation)?)?;
            }
            let whole = self.fock_norm(&x)?;
            ratios.push(if whole > 0.0 { target / whole } else { 0.0 });
        }
        let max = ratios.iter().cloned().fold(0.0, f64::max);
        Ok(PnEstimate { n, samples, truncation, ratios, max })
    }

    /// L² facts behind the Haagerup argument at `(n, t)` on the truncation `N`.
    pub fn haagerup_tail_report(&self, n: usize, t: f64, c_fit: f64, epsilon: f64, truncation: usize) -> Result<HaagerupReport> {
        let tail = haagerup_tail(n, t, c_fit)?;
        let brute = haagerup_tail_brute(n, t, c_fit)?;
        let minimal_n = haagerup_minimal_n(epsilon, t, c_fit)?;
        let gamma = self.space.t_nt_l2(truncation, t, truncation)?;
        let mut weight_error: f64 = 0.0;
        for m in 0..=truncation {
            let expected = LinMap::identity(m, self.dim()).scale(&Complex64::new((-(m as f64) * t).exp(), 0.0));
            let block = gamma.block(m, m).ok_or(Error::ShapeMismatch("missing diagonal block".into()))?;
            for (a, b) in block.data().iter().zip(expected.data()) {
                weight_error = weight_error.max((a - b).norm());
            }
        }
        let gamma_norm = self.fock_norm(&gamma)?;
        let t_nt_norm = self.fock_norm(&self.space.t_nt_l2(n.min(truncation), t, truncation)?)?;
        Ok(HaagerupReport { n, t, c_fit, epsilon, tail, brute, minimal_n, weight_error, gamma_norm, t_nt_norm })
    }
}

/// Norms of `R*_{n,k}` and of its adjoint `R_{n,k}`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct RstarNorm {
    pub n: usize,
    pub k: usize,
    pub rstar: f64,
    pub r: f64,
}

/// An element of `M_m ⊗ H^{⊗n}`, stored as an `m × m` array of tensors.
#[derive(Clone, Debug, PartialEq)]
pub struct AmplifiedTensor {
    m: usize,
    entries: Vec<Tensor<Complex64>>,
}

impl AmplifiedTensor {
    pub fn new(m: usize, entries: Vec<Tensor<Complex64>>) -> Result<Self> {
        if m == 0 || m > MAX_AMPLIFICATION {
            return Err(Error::ShapeMismatch(format!("amplification {m} outside 1..={MAX_AMPLIFICATION}")));
        }
        if entries.len() != m * m {
            return Err(Error::ShapeMismatch(format!("{} entries for amplification {m}", entries.len())));
        }
        let (legs, dim) = (entries[0].legs(), entries[0].dim());
        if entries.iter().any(|t| t.legs() != legs || t.dim() != dim) {
            return Err(Error::ShapeMismatch("amplified entries of different shapes".into()));
        }
        Ok(AmplifiedTensor { m, entries })
    }

    pub fn from_tensor(t: Tensor<Complex64>) -> Self {
        AmplifiedTensor { m: 1, entries: vec![t] }
    }

    /// Entries with independent standard normal coordinates.
    pub fn random(rng: &mut impl Rng, m: usize, legs: usize, dim: usize) -> Result<Self> {
        Self::new(m, (0..m * m).map(|_| random_float_tensor(rng, legs, dim, true)).collect())
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn legs(&self) -> usize {
        self.entries[0].legs()
    }

    pub fn dim(&self) -> usize {
        self.entries[0].dim()
    }

    pub fn entry(&self, a: usize, b: usize) -> &Tensor<Complex64> {
        &self.entries[a * self.m + b]
    }

    pub fn entries(&self) -> &[Tensor<Complex64>] {
        &self.entries
    }

    pub fn map_entries(&self, f: impl Fn(&Tensor<Complex64>) -> Result<Tensor<Complex64>>) -> Result<Self> {
        Self::new(self.m, self.entries.iter().map(f).collect::<Result<_>>()?)
    }

    /// The same element over `C^{d'}`, `d'` the number of letters used by any
    /// entry; returns it with `d'`.
    pub fn restrict_to_support(&self) -> (AmplifiedTensor, usize) {
        let mut letters: Vec<usize> = self.entries.iter().flat_map(Tensor::support_letters).collect();
        letters.sort_unstable();
        letters.dedup();
        let d = letters.len().max(1);
        let legs = self.legs();
        let relabel: HashMap<usize, usize> = letters.iter().enumerate().map(|(i, &s)| (s, i)).collect();
        let entries = self
            .entries
            .iter()
            .map(|t| {
                let mut out = Tensor::zeros(legs, d);
                for (idx, v) in t.data().iter().enumerate() {
                    if *v == Complex64::new(0.0, 0.0) {
                        continue;
                    }
                    let word: Vec<usize> = crate::qtensor::digits(idx, legs, t.dim()).iter().map(|s| relabel[s]).collect();
                    out.data_mut()[crate::qtensor::flat_index(&word, d)] = *v;
                }
                out
            })
            .collect();
        (AmplifiedTensor { m: self.m, entries }, letters.len())
    }
}

/// Compressed Wick norms for increasing truncation.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct WickTrace {
    /// Number of letters the computation was restricted to.
    pub dim: usize,
    pub truncations: Vec<usize>,
    pub values: Vec<f64>,
}

impl WickTrace {
    pub fn estimate(&self) -> f64 {
        self.values.last().copied().unwrap_or(0.0)
    }

    /// Relative increase over the last two truncation steps.
    pub fn last_increment(&self) -> f64 {
        let n = self.values.len();
        if n < 3 {
            return f64::INFINITY;
        }
        let (now, before) = (self.values[n - 1], self.values[n - 3]);
        if now == 0.0 { 0.0 } else { (now - before) / now }
    }

    pub fn converged(&self) -> bool {
        self.last_increment() < CONVERGENCE_TOLERANCE
    }

    pub fn is_nondecreasing(&self, tol: f64) -> bool {
        self.values.windows(2).all(|w| w[1] >= w[0] - tol * w[0].max(1.0))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct KhintchineReport {
    pub n: usize,
    pub m: usize,
    pub q: f64,
    /// `‖(Id ⊗ R*_{n-k,k}) ξ‖_{c,r}` for `k = 0..=n`.
    pub column_row: Vec<f64>,
    pub lhs: f64,
    pub estimate: f64,
    pub ratio: f64,
    pub ratio_per_level: f64,
    pub lower_holds: bool,
    pub converged: bool,
    pub trace: WickTrace,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PnEstimate {
    pub n: usize,
    pub samples: usize,
    pub truncation: usize,
    pub ratios: Vec<f64>,
    pub max: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct HaagerupReport {
    pub n: usize,
    pub t: f64,
    pub c_fit: f64,
    pub epsilon: f64,
    pub tail: f64,
    pub brute: f64,
    pub minimal_n: usize,
    /// Largest deviation of the blocks of `Γ_q(e^{-t})` from `e^{-mt}`.
    pub weight_error: f64,
    pub gamma_norm: f64,
    pub t_nt_norm: f64,
}

/// `c Σ_{k>n} k e^{-kt} = c x^{n+1} ((n+1) − n x) / (1 − x)²` with `x = e^{-t}`.
pub fn haagerup_tail(n: usize, t: f64, c_fit: f64) -> Result<f64> {
    if !(t > 0.0) {
        return Err(Error::InvalidTime(t));
    }
    let x = (-t).exp();
    let n = n as f64;
    Ok(c_fit * (-(n + 1.0) * t).exp() * ((n + 1.0) - n * x) / ((1.0 - x) * (1.0 - x)))
}

/// The same tail by direct summation until the terms stop mattering.
pub fn haagerup_tail_brute(n: usize, t: f64, c_fit: f64) -> Result<f64> {
    if !(t > 0.0) {
        return Err(Error::InvalidTime(t));
    }
    let mut sum = 0.0;
    let mut k = n + 1;
    loop {
        let term = k as f64 * (-(k as f64) * t).exp();
        sum += term;
        if term < 1e-20 * sum.max(f64::MIN_POSITIVE) || term == 0.0 {
            break;
        }
        k += 1;
    }
    Ok(c_fit * sum)
}

/// Smallest `n` with `haagerup_tail(n, t, c_fit) ≤ epsilon`.
pub fn haagerup_minimal_n(epsilon: f64, t: f64, c_fit: f64) -> Result<usize> {
    if !(epsilon > 0.0) {
        return Err(Error::Config(format!("tail threshold must be positive, got {epsilon}")));
    }
    let mut n = 0;
    while haagerup_tail(n, t, c_fit)? > epsilon {
        n += 1;
    }
    Ok(n)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sampling::rng;

    fn lab(q: f64) -> NormLab {
        NormLab::new(2, q).unwrap()
    }

    fn e1_power(n: usize) -> Tensor<Complex64> {
        Tensor::basis(2, &vec![0; n])
    }

    #[test]
    fn qop_norm_examples() {
        let l = lab(0.5);
        for g in [Grading::Flat(2), Grading::Level(2), Grading::Split(vec![1, 1])] {
            let v = l.qop_norm(&LinMap::identity(2, 2), &g, &g).unwrap();
            assert!((v - 1.0).abs() < 1e-12);
        }
        let p2 = l.space().pqn(2).unwrap();
        let v = l.qop_norm(&p2, &Grading::Flat(2), &Grading::Flat(2)).unwrap();
        assert!((v - 1.5).abs() < 1e-12);
        for n in 1..=4 {
            let s = l.space().sigma(n).unwrap();
            let v = l.qop_norm(&s, &Grading::Level(n), &Grading::Level(n)).unwrap();
            assert!((v - 1.0).abs() < 1e-10, "n={n}");
        }
    }

    #[test]
    fn qop_norm_is_submultiplicative() {
        let l = lab(0.5);
        for seed in 0..20 {
            let mut r = rng(seed);
            let data = |r: &mut rand_chacha::ChaCha8Rng| random_float_tensor(r, 4, 2, true).into_data();
            let a = LinMap::from_rows(2, 2, 2, data(&mut r)).unwrap();
            let b = LinMap::from_rows(2, 2, 2, data(&mut r)).unwrap();
            let g = Grading::Level(2);
            let ab = l.qop_norm(&a.compose(&b).unwrap(), &g, &g).unwrap();
            let prod = l.qop_norm(&a, &g, &g).unwrap() * l.qop_norm(&b, &g, &g).unwrap();
            assert!(ab <= prod * (1.0 + 1e-12));
        }
    }

    #[test]
    fn gram_positivity() {
        for q in [-0.9, -0.5, 0.0, 0.5, 0.9] {
            for d in 1..=3 {
                let l = NormLab::new(d, q).unwrap();
                for n in 0..=if d == 3 { 5 } else { 6 } {
                    assert!(l.gram_factor(n).is_ok(), "q={q} d={d} n={n}");
                }
            }
        }
    }

    #[test]
    fn rstar_norms() {
        let free = lab(0.0);
        let l = lab(0.5);
        for total in 0..=5 {
            for n in 0..=total {
                let z = free.rstar_norm(n, total - n).unwrap();
                assert!((z.rstar - 1.0).abs() < 1e-12 && (z.r - 1.0).abs() < 1e-12);
                let v = l.rstar_norm(n, total - n).unwrap();
                assert!(v.rstar >= 1.0 - 1e-12 && v.rstar.is_finite());
                assert!((v.rstar - v.r).abs() < 1e-9 * v.rstar);
                if n == 0 || n == total {
                    assert!((v.rstar - 1.0).abs() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn column_row_examples() {
        let l = lab(0.5);
        let e1 = AmplifiedTensor::from_tensor(e1_power(1));
        assert!((l.column_row_norm(&e1, 0).unwrap() - 1.0).abs() < 1e-12);
        let n = 3;
        let zeta = AmplifiedTensor::from_tensor(e1_power(n));
        for k in 0..=n {
            let expected = |m: usize| l.space().q_norm_sq(&e1_power(m)).unwrap().re.sqrt();
            let v = l.column_row_norm(&zeta, k).unwrap();
            assert!((v - expected(n - k) * expected(k)).abs() < 1e-12, "k={k}");
        }
    }

    #[test]
    fn column_row_at_zero_is_flat() {
        let l = lab(0.0);
        let mut r = rng(4);
        for m in 1..=2 {
            let zeta = AmplifiedTensor::random(&mut r, m, 3, 2).unwrap();
            for k in 0..=3 {
                let (rows, cols) = (pow(2, 3 - k), pow(2, k));
                let mut z = DMatrix::zeros(m * rows, m * cols);
                for a in 0..m {
                    for b in 0..m {
                        for (i, v) in zeta.entry(a, b).data().iter().enumerate() {
                            z[(a * rows + i / cols, b * cols + i % cols)] = *v;
                        }
                    }
                }
                assert!((l.column_row_norm(&zeta, k).unwrap() - spectral_norm(&z)).abs() < 1e-12);
            }
        }
    }

    /// Largest eigenvalue of the Jacobi matrix with off-diagonal `√[m]_q`.
    fn jacobi_oracle(q: f64, truncation: usize) -> f64 {
        let size = truncation + 1;
        let mut j = DMatrix::<f64>::zeros(size, size);
        for m in 1..size {
            let bracket: f64 = (0..m).map(|i| q.powi(i as i32)).sum();
            j[(m - 1, m)] = bracket.sqrt();
            j[(m, m - 1)] = bracket.sqrt();
        }
        j.symmetric_eigenvalues().iter().cloned().fold(f64::MIN, f64::max)
    }

    #[test]
    fn field_norm_trace() {
        for q in [0.0, 0.5] {
            let l = lab(q);
            let trace = l.wick_norm_estimate(&AmplifiedTensor::from_tensor(e1_power(1)), 30).unwrap();
            assert_eq!(trace.dim, 1);
            assert!(trace.is_nondecreasing(1e-12));
            for (&n, &v) in trace.truncations.iter().zip(&trace.values) {
                assert!((v - jacobi_oracle(q, n)).abs() < 1e-9, "q={q} N={n}");
            }
            let limit = 2.0 / (1.0 - q).sqrt();
            assert!((trace.estimate() - limit).abs() < 0.01 * limit);
            assert!(trace.converged());
        }
        let free = lab(0.0);
        let trace = free.wick_norm_estimate(&AmplifiedTensor::from_tensor(e1_power(1)), 8).unwrap();
        for (&n, &v) in trace.truncations.iter().zip(&trace.values) {
            let expected = 2.0 * (std::f64::consts::PI / (n as f64 + 2.0)).cos();
            assert!((v - expected).abs() < 1e-12);
        }
    }

    #[test]
    fn scalar_wick_norm() {
        let l = lab(0.5);
        let c = Complex64::new(3.0, -4.0);
        let trace = l.wick_norm_estimate(&AmplifiedTensor::from_tensor(Tensor::scalar(2, c)), 3).unwrap();
        assert!(trace.values.iter().all(|v| (v - 5.0).abs() < 1e-12));
    }

    #[test]
    fn khintchine_examples() {
        let l = lab(0.5);
        let rep = l.khintchine_report(&AmplifiedTensor::from_tensor(e1_power(1)), 30).unwrap();
        assert!((rep.lhs - 1.0).abs() < 1e-12);
        assert!((rep.estimate - 2.0 * 2f64.sqrt()).abs() < 0.03);
        assert!(rep.lower_holds);
        let rep = l.khintchine_report(&AmplifiedTensor::from_tensor(Tensor::scalar(2, Complex64::new(2.0, 0.0))), 2).unwrap();
        assert!((rep.lhs - 2.0).abs() < 1e-12 && (rep.ratio - 1.0).abs() < 1e-12);
    }

    #[test]
    fn khintchine_lower_inequality_at_zero() {
        let l = lab(0.0);
        let mut r = rng(9);
        for n in 0..=3 {
            let xi = AmplifiedTensor::random(&mut r, 1, n, 2).unwrap();
            let rep = l.khintchine_report(&xi, n + 2).unwrap();
            assert!(rep.lower_holds, "n={n}");
        }
    }

    #[test]
    fn second_quantisation_contracts() {
        for seed in 0..20 {
            let mut r = rng(seed);
            let d = 1 + (seed as usize % 3);
            let l = NormLab::new(d, 0.6).unwrap();
            let raw: Vec<Complex64> = random_float_tensor(&mut r, 2, d, false).into_data();
            let norm = spectral_norm_flat(d, d, &raw);
            let t = LinMap::from_rows(1, 1, d, raw.iter().map(|v| v / norm).collect()).unwrap();
            let gamma = l.space().second_quantization_l2(&t, 4).unwrap();
            assert!(l.fock_norm(&gamma).unwrap() <= 1.0 + 1e-10);
            let omega = gamma.block(0, 0).unwrap().get(0, 0);
            assert!((omega - Complex64::new(1.0, 0.0)).norm() < 1e-15);
        }
    }

    #[test]
    fn haagerup_tail_values() {
        let tail = haagerup_tail(10, 1.0, 1.0).unwrap();
        let brute = haagerup_tail_brute(10, 1.0, 1.0).unwrap();
        assert!((tail - brute).abs() < 1e-10);
        assert!((tail - 3.060155e-4).abs() < 1e-9);
        assert!(haagerup_tail(400, 1.0, 1.0).unwrap() < 1e-150);
        let n = haagerup_minimal_n(0.1, 0.5, 2.0).unwrap();
        assert!(haagerup_tail_brute(n, 0.5, 2.0).unwrap() <= 0.1);
        assert!(haagerup_tail_brute(n - 1, 0.5, 2.0).unwrap() > 0.1);
        assert!(haagerup_tail(3, 0.0, 1.0).is_err());
    }

    #[test]
    fn haagerup_report_facts() {
        let l = lab(0.5);
        let rep = l.haagerup_tail_report(2, 0.5, 1.0, 0.01, 4).unwrap();
        assert!(rep.weight_error < 1e-12);
        assert!((rep.gamma_norm - 1.0).abs() < 1e-12);
        assert!((rep.t_nt_norm - 1.0).abs() < 1e-12);
    }

    #[test]
    fn pn_estimates() {
        let l = lab(0.5);
        let est = l.pn_lower_bound_estimate(1, 6, 3, 7).unwrap();
        assert!((est.ratios[0] - 1.0).abs() < 1e-12);
        assert!(est.max >= 1.0 - 1e-12 && est.max.is_finite());
        let zero = l.pn_lower_bound_estimate(0, 6, 2, 7).unwrap();
        assert!(zero.ratios.iter().all(|&r| r <= 1.0 + 1e-12));
    }
}
