//! The truncated q-Fock space `⊕_{m ≤ N} H^{⊗m}`.
//!
//! Operators are compressions of the full Fock-space operators to levels
//! `0..=N`. Creation maps level `N` to zero. Products that annihilate first and
//! create afterwards (normal order, as in the Wick expansion) never leave the
//! truncated space at an intermediate step, so their compression is exact.

use std::collections::{BTreeMap, HashMap};

use num_complex::Complex64;

use crate::combinatorics::Subset;
use crate::combinatorics::subset_inversion_stat;
use crate::error::{Error, Result};
use crate::normlab::spectral_norm_flat;
use crate::qtensor::{digits, flat_index, pow, LinMap, QSpace, Residual, Scalar, Tensor};

/// A vector in the truncated Fock space; level `m` has `m` legs.
#[derive(Clone, Debug, PartialEq)]
pub struct FockVector<S> {
    dim: usize,
    truncation: usize,
    levels: Vec<Tensor<S>>,
}

impl<S: Scalar> FockVector<S> {
    pub fn zeros(dim: usize, truncation: usize) -> Self {
        FockVector { dim, truncation, levels: (0..=truncation).map(|m| Tensor::zeros(m, dim)).collect() }
    }

    /// The vacuum `Ω`.
    pub fn vacuum(dim: usize, truncation: usize) -> Self {
        let mut v = Self::zeros(dim, truncation);
        v.levels[0] = Tensor::scalar(dim, S::one());
        v
    }

    /// A homogeneous tensor placed at its own level.
    pub fn from_tensor(t: &Tensor<S>, truncation: usize) -> Result<Self> {
        if t.legs() > truncation {
            return Err(Error::TruncationTooSmall { legs: t.legs(), truncation });
        }
        let mut v = Self::zeros(t.dim(), truncation);
        v.levels[t.legs()] = t.clone();
        Ok(v)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn truncation(&self) -> usize {
        self.truncation
    }

    pub fn level(&self, m: usize) -> &Tensor<S> {
        &self.levels[m]
    }

    pub fn levels(&self) -> &[Tensor<S>] {
        &self.levels
    }

    pub fn add_to_level(&mut self, t: &Tensor<S>) -> Result<()> {
        if t.legs() > self.truncation {
            return Err(Error::TruncationTooSmall { legs: t.legs(), truncation: self.truncation });
        }
        self.levels[t.legs()].add_assign(t)
    }

    pub fn add(&self, other: &FockVector<S>) -> Result<FockVector<S>> {
        self.check_shape(other)?;
        let levels = self.levels.iter().zip(&other.levels).map(|(a, b)| a.add(b)).collect::<Result<_>>()?;
        Ok(FockVector { levels, ..*self })
    }

    pub fn sub(&self, other: &FockVector<S>) -> Result<FockVector<S>> {
        self.check_shape(other)?;
        let levels = self.levels.iter().zip(&other.levels).map(|(a, b)| a.sub(b)).collect::<Result<_>>()?;
        Ok(FockVector { levels, ..*self })
    }

    pub fn scale(&self, c: &S) -> FockVector<S> {
        FockVector { levels: self.levels.iter().map(|t| t.scale(c)).collect(), ..*self }
    }

    /// The same vector in a space with a different truncation; levels above
    /// the new truncation must vanish.
    pub fn retruncate(&self, truncation: usize) -> Result<FockVector<S>> {
        let mut out = Self::zeros(self.dim, truncation);
        for (m, t) in self.levels.iter().enumerate() {
            if m <= truncation {
                out.levels[m] = t.clone();
            } else if !t.is_zero() {
                return Err(Error::TruncationTooSmall { legs: m, truncation });
            }
        }
        Ok(out)
    }

    /// Per-level residual between two vectors of equal shape.
    pub fn residual(&self, other: &FockVector<S>) -> Result<Residual> {
        self.check_shape(other)?;
        let mut r = Residual::new();
        for (a, b) in self.levels.iter().zip(&other.levels) {
            r.absorb_tensors(a, b)?;
        }
        Ok(r)
    }

    pub fn is_zero(&self) -> bool {
        self.levels.iter().all(Tensor::is_zero)
    }

    fn check_shape(&self, other: &FockVector<S>) -> Result<()> {
        if self.dim != other.dim || self.truncation != other.truncation {
            return Err(Error::ShapeMismatch("Fock vectors of different shapes".into()));
        }
        Ok(())
    }
}

/// An operator on the truncated Fock space, stored as level blocks.
#[derive(Clone, Debug, PartialEq)]
pub struct FockOperator<S> {
    dim: usize,
    truncation: usize,
    /// Indexed by `dst * (truncation + 1) + src`.
    blocks: Vec<Option<LinMap<S>>>,
}

impl<S: Scalar> FockOperator<S> {
    pub fn zeros(dim: usize, truncation: usize) -> Self {
        FockOperator { dim, truncation, blocks: vec![None; (truncation + 1) * (truncation + 1)] }
    }

    pub fn identity(dim: usize, truncation: usize) -> Self {
        let mut op = Self::zeros(dim, truncation);
        for m in 0..=truncation {
            op.set_block(m, m, LinMap::identity(m, dim));
        }
        op
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn truncation(&self) -> usize {
        self.truncation
    }

    fn slot(&self, dst: usize, src: usize) -> usize {
        dst * (self.truncation + 1) + src
    }

    pub fn block(&self, dst: usize, src: usize) -> Option<&LinMap<S>> {
        self.blocks[self.slot(dst, src)].as_ref()
    }

    pub fn set_block(&mut self, dst: usize, src: usize, map: LinMap<S>) {
        let i = self.slot(dst, src);
        self.blocks[i] = Some(map);
    }

    /// Add `c · map` into block `(dst, src)`.
    pub fn accumulate(&mut self, dst: usize, src: usize, map: &LinMap<S>, c: &S) -> Result<()> {
        let i = self.slot(dst, src);
        match &mut self.blocks[i] {
            Some(b) => b.add_scaled(map, c),
            slot @ None => {
                *slot = Some(map.scale(c));
                Ok(())
            }
        }
    }

    pub fn apply(&self, x: &FockVector<S>) -> Result<FockVector<S>> {
        if x.dim != self.dim || x.truncation != self.truncation {
            return Err(Error::ShapeMismatch("operator and vector truncations differ".into()));
        }
        let mut out = FockVector::zeros(self.dim, self.truncation);
        for src in 0..=self.truncation {
            if x.levels[src].is_zero() {
                continue;
            }
            for dst in 0..=self.truncation {
                if let Some(b) = self.block(dst, src) {
                    out.levels[dst].add_assign(&b.apply(&x.levels[src])?)?;
                }
            }
        }
        Ok(out)
    }

    /// `self ∘ other`.
    pub fn compose(&self, other: &FockOperator<S>) -> Result<FockOperator<S>> {
        if self.dim != other.dim || self.truncation != other.truncation {
            return Err(Error::ShapeMismatch("operators of different truncations".into()));
        }
        let n = self.truncation;
        let mut out = Self::zeros(self.dim, n);
        for dst in 0..=n {
            for src in 0..=n {
                let mut acc: Option<LinMap<S>> = None;
                for mid in 0..=n {
                    if let (Some(a), Some(b)) = (self.block(dst, mid), other.block(mid, src)) {
                        let p = a.compose(b)?;
                        acc = Some(match acc {
                            Some(s) => s.add(&p)?,
                            None => p,
                        });
                    }
                }
                if let Some(a) = acc {
                    out.set_block(dst, src, a);
                }
            }
        }
        Ok(out)
    }

    pub fn add(&self, other: &FockOperator<S>) -> Result<FockOperator<S>> {
        let mut out = self.clone();
        out.add_assign(other, &S::one())?;
        Ok(out)
    }

    pub fn sub(&self, other: &FockOperator<S>) -> Result<FockOperator<S>> {
        let mut out = self.clone();
        out.add_assign(other, &S::one().neg_ref())?;
        Ok(out)
    }

    pub fn add_assign(&mut self, other: &FockOperator<S>, c: &S) -> Result<()> {
        if self.dim != other.dim || self.truncation != other.truncation {
            return Err(Error::ShapeMismatch("operators of different truncations".into()));
        }
        for dst in 0..=self.truncation {
            for src in 0..=self.truncation {
                if let Some(b) = other.block(dst, src) {
                    self.accumulate(dst, src, b, c)?;
                }
            }
        }
        Ok(())
    }

    pub fn scale(&self, c: &S) -> FockOperator<S> {
        FockOperator { blocks: self.blocks.iter().map(|b| b.as_ref().map(|m| m.scale(c))).collect(), ..*self }
    }

    /// Residual between `self` and `other` on source levels `≤ max_src`.
    pub fn residual_on_levels(&self, other: &FockOperator<S>, max_src: usize) -> Result<Residual> {
        let mut r = Residual::new();
        for src in 0..=max_src.min(self.truncation) {
            for dst in 0..=self.truncation {
                let a = self.block(dst, src).cloned().unwrap_or_else(|| LinMap::zeros(src, dst, self.dim));
                let b = other.block(dst, src).cloned().unwrap_or_else(|| LinMap::zeros(src, dst, self.dim));
                r.absorb_maps(&a, &b)?;
            }
        }
        Ok(r)
    }

    /// Total dimension `Σ_{m ≤ N} d^m` of the truncated space.
    pub fn total_dim(&self) -> usize {
        (0..=self.truncation).map(|m| pow(self.dim, m)).sum()
    }
}

/// Projection onto level `n`.
pub fn level_projection<S: Scalar>(dim: usize, n: usize, truncation: usize) -> Result<FockOperator<S>> {
    if n > truncation {
        return Err(Error::TruncationTooSmall { legs: n, truncation });
    }
    let mut op = FockOperator::zeros(dim, truncation);
    op.set_block(n, n, LinMap::identity(n, dim));
    Ok(op)
}

/// Projection onto levels `≤ n`.
pub fn q_n_projection<S: Scalar>(dim: usize, n: usize, truncation: usize) -> Result<FockOperator<S>> {
    if n > truncation {
        return Err(Error::TruncationTooSmall { legs: n, truncation });
    }
    let mut op = FockOperator::zeros(dim, truncation);
    for m in 0..=n {
        op.set_block(m, m, LinMap::identity(m, dim));
    }
    Ok(op)
}

/// `n` creation or annihilation letters, indexed by source level.
type LevelChain<S> = Vec<Option<LinMap<S>>>;

impl<S: Scalar> QSpace<S> {
    fn check_vector(&self, v: &Tensor<S>) -> Result<()> {
        if v.legs() != 1 || v.dim() != self.dim() {
            return Err(Error::ShapeMismatch("expected a one-leg tensor of the space dimension".into()));
        }
        Ok(())
    }

    /// `⟨x, y⟩_q = Σ_m ⟨x_m, P_q^m y_m⟩`.
    pub fn fock_inner(&self, x: &FockVector<S>, y: &FockVector<S>) -> Result<S> {
        x.check_shape(y)?;
        let mut acc = S::zero();
        for (a, b) in x.levels.iter().zip(&y.levels) {
            if !a.is_zero() && !b.is_zero() {
                acc.add_assign_ref(&self.q_inner(a, b)?);
            }
        }
        Ok(acc)
    }

    /// Creation `a*(v): x ↦ v ⊗ x`.
    pub fn creation(&self, v: &Tensor<S>, truncation: usize) -> Result<FockOperator<S>> {
        self.check_vector(v)?;
        let d = self.dim();
        let mut op = FockOperator::zeros(d, truncation);
        for m in 0..truncation {
            let mut b = LinMap::zeros(m, m + 1, d);
            let size = pow(d, m);
            for (s, vs) in v.data().iter().enumerate() {
                if vs.is_zero() {
                    continue;
                }
                for col in 0..size {
                    b.set(s * size + col, col, vs.clone());
                }
            }
            op.set_block(m + 1, m, b);
        }
        Ok(op)
    }

    /// Level-`m` block of `a(v)`: `Σ_i q^{i-1} ⟨v, x_i⟩ x_1⊗…x̂_i…⊗x_m`.
    fn annihilation_block(&self, v: &Tensor<S>, m: usize) -> LinMap<S> {
        let d = self.dim();
        let powers: Vec<S> = (0..m).map(|k| self.q_pow(k)).collect();
        let conj_v: Vec<S> = v.data().iter().map(S::conj).collect();
        let mut b = LinMap::<S>::zeros(m, m - 1, d);
        let mut rest = Vec::with_capacity(m);
        for col in 0..pow(d, m) {
            let full = digits(col, m, d);
            for pos in 0..m {
                let cv = &conj_v[full[pos]];
                if cv.is_zero() {
                    continue;
                }
                rest.clear();
                rest.extend(full.iter().enumerate().filter(|&(i, _)| i != pos).map(|(_, &s)| s));
                let row = flat_index(&rest, d);
                b.entry_mut(row, col).mul_add_assign(&powers[pos], cv);
            }
        }
        b
    }

    /// Annihilation `a(v)`, the q-adjoint of `a*(v)`; `a(v)Ω = 0`.
    pub fn annihilation(&self, v: &Tensor<S>, truncation: usize) -> Result<FockOperator<S>> {
        self.check_vector(v)?;
        let mut op = FockOperator::zeros(self.dim(), truncation);
        for m in 1..=truncation {
            op.set_block(m - 1, m, self.annihilation_block(v, m));
        }
        Ok(op)
    }

    /// Field operator `a*(v) + a(v)` for real `v`.
    pub fn field_operator(&self, v: &Tensor<S>, truncation: usize) -> Result<FockOperator<S>> {
        if !v.is_real() {
            return Err(Error::NotReal);
        }
        self.creation(v, truncation)?.add(&self.annihilation(v, truncation)?)
    }

    /// `a(e_{t_1}) ⋯ a(e_{t_c})`, blocks from level `m` to `m - c`.
    fn annihilation_chain(
        &self,
        letters: &[usize],
        truncation: usize,
        memo: &mut HashMap<Vec<usize>, LevelChain<S>>,
        basic: &[LevelChain<S>],
    ) -> Result<LevelChain<S>> {
        if let Some(c) = memo.get(letters) {
            return Ok(c.clone());
        }
        let chain = if letters.is_empty() {
            (0..=truncation).map(|m| Some(LinMap::identity(m, self.dim()))).collect()
        } else {
            let tail = self.annihilation_chain(&letters[1..], truncation, memo, basic)?;
            let c = letters.len();
            let mut out: LevelChain<S> = vec![None; truncation + 1];
            for m in c..=truncation {
                let inner = tail[m].as_ref().expect("tail block exists above its length");
                let outer = basic[letters[0]][m - c + 1].as_ref().expect("basic block exists");
                out[m] = Some(outer.compose(inner)?);
            }
            out
        };
        memo.insert(letters.to_vec(), chain.clone());
        Ok(chain)
    }

    /// Wick word `W(ξ) = Σ_{A ⊂ [n]} q^{i(A)} a*(ξ_A) a(I ξ_{A^c})`, extended
    /// linearly over the standard product basis.
    pub fn wick_operator(&self, xi: &Tensor<S>, truncation: usize) -> Result<FockOperator<S>> {
        let n = xi.legs();
        if n > truncation {
            return Err(Error::TruncationTooSmall { legs: n, truncation });
        }
        let d = self.dim();
        // Coefficient of each normal-ordered letter pair (created, annihilated).
        let mut terms: BTreeMap<(Vec<usize>, Vec<usize>), S> = BTreeMap::new();
        let subsets: Vec<(Vec<usize>, usize)> = (0..=n)
            .flat_map(|k| Subset::all_of_size(n, k))
            .map(|a| {
                let w = subset_inversion_stat(&a);
                (a.elements().to_vec(), w)
            })
            .collect();
        let powers: Vec<S> = (0..=n * n).map(|k| self.q_pow(k)).collect();
        for (idx, c) in xi.data().iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let word = digits(idx, n, d);
            for (a, w) in &subsets {
                let mut created = Vec::with_capacity(a.len());
                let mut annihilated = Vec::with_capacity(n - a.len());
                let mut it = a.iter().peekable();
                for (pos, &letter) in word.iter().enumerate() {
                    if it.peek() == Some(&&(pos + 1)) {
                        it.next();
                        created.push(letter);
                    } else {
                        annihilated.push(letter);
                    }
                }
                terms.entry((created, annihilated)).or_insert_with(S::zero).mul_add_assign(c, &powers[*w]);
            }
        }

        let basic: Vec<LevelChain<S>> = (0..d)
            .map(|t| {
                let e = Tensor::basis(d, &[t]);
                (0..=truncation).map(|m| (m >= 1).then(|| self.annihilation_block(&e, m))).collect()
            })
            .collect();
        let mut memo = HashMap::new();
        let mut op = FockOperator::zeros(d, truncation);
        for ((created, annihilated), coef) in &terms {
            if coef.is_zero() {
                continue;
            }
            let chain = self.annihilation_chain(annihilated, truncation, &mut memo, &basic)?;
            let (a, c) = (created.len(), annihilated.len());
            let prefix = flat_index(created, d);
            for m in c..=truncation {
                let dst = m - c + a;
                if dst > truncation {
                    continue;
                }
                let inner = chain[m].as_ref().expect("chain block exists");
                let mid = pow(d, m - c);
                let mut lifted = LinMap::zeros(m, dst, d);
                for r in 0..mid {
                    for col in 0..inner.cols() {
                        let v = inner.get(r, col);
                        if !v.is_zero() {
                            lifted.set(prefix * mid + r, col, v.clone());
                        }
                    }
                }
                op.accumulate(dst, m, &lifted, coef)?;
            }
        }
        Ok(op)
    }

    /// `W(ξ)W(η)Ω = Σ_j m_j(R*_{n-j,j} ξ ⊗ R*_{j,k-j} η)`, computed through
    /// shuffles and pairings.
    pub fn wick_product_vector(&self, xi: &Tensor<S>, eta: &Tensor<S>) -> Result<FockVector<S>> {
        self.check_ceiling(xi.legs() + eta.legs())?;
        self.wick_product_joint(&xi.kron(eta), xi.legs())
    }

    /// Bilinear extension of [`Self::wick_product_vector`] to a joint tensor
    /// whose first `left` legs play the role of `ξ`.
    pub fn wick_product_joint(&self, zeta: &Tensor<S>, left: usize) -> Result<FockVector<S>> {
        let total = zeta.legs();
        if left > total {
            return Err(Error::ShapeMismatch("split point beyond the tensor".into()));
        }
        self.check_ceiling(total)?;
        let (n, k) = (left, total - left);
        let mut out = FockVector::zeros(self.dim(), total);
        for j in 0..=n.min(k) {
            let split = self.rstar(n - j, j)?.kron_apply(&*self.rstar(j, k - j)?, zeta)?;
            let paired = self.contract_middle(&split, n, j, &self.m_kernel(j)?)?;
            out.add_to_level(&paired)?;
        }
        Ok(out)
    }

    /// `Γ_q(T)` on `L²`: `⊕_m T^{⊗m}`, for a real contraction `T` on `H`.
    pub fn second_quantization_l2(&self, t: &LinMap<S>, truncation: usize) -> Result<FockOperator<S>> {
        if t.src_legs() != 1 || t.dst_legs() != 1 || t.dim() != self.dim() {
            return Err(Error::ShapeMismatch("second quantisation needs a map on H".into()));
        }
        if !t.data().iter().all(S::is_real) {
            return Err(Error::NotReal);
        }
        let numeric = t.data().iter().map(|v| v.approx().ok_or(Error::SymbolicEntry)).collect::<Result<Vec<_>>>()?;
        let norm = spectral_norm_flat(self.dim(), self.dim(), &numeric);
        if norm > 1.0 + 1e-12 {
            return Err(Error::NotContraction(norm));
        }
        let mut op = FockOperator::zeros(self.dim(), truncation);
        let mut power = LinMap::identity(0, self.dim());
        for m in 0..=truncation {
            if m > 0 {
                power = power.kron(t);
            }
            op.set_block(m, m, power.clone());
        }
        Ok(op)
    }
}

impl QSpace<Complex64> {
    /// `T_{n,t} = Γ_q(e^{-t}) Q_n`. `t = 0` is admitted only when `n = N`,
    /// where the map is the identity.
    pub fn t_nt_l2(&self, n: usize, t: f64, truncation: usize) -> Result<FockOperator<Complex64>> {
        if !(t > 0.0 || (t == 0.0 && n == truncation)) {
            return Err(Error::InvalidTime(t));
        }
        let contraction = LinMap::identity(1, self.dim()).scale(&Complex64::new((-t).exp(), 0.0));
        self.second_quantization_l2(&contraction, truncation)?.compose(&q_n_projection(self.dim(), n, truncation)?)
    }
}
