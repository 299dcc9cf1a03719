//! Dense tensors on `H^{⊗n}` and linear maps between tensor powers.
//!
//! Flattening is row-major with leg 1 most significant, so the basis string
//! `e_{s_1} ⊗ … ⊗ e_{s_n}` sits at index `Σ s_l d^{n-l}` (zero-based digits).

use crate::combinatorics::Permutation;
use crate::error::{Error, Result};

use super::Scalar;

/// `d^n`.
pub fn pow(dim: usize, legs: usize) -> usize {
    dim.pow(legs as u32)
}

/// Zero-based digits of a flat index, leg 1 first.
pub fn digits(mut index: usize, legs: usize, dim: usize) -> Vec<usize> {
    let mut out = vec![0; legs];
    for slot in out.iter_mut().rev() {
        *slot = index % dim;
        index /= dim;
    }
    out
}

/// Inverse of [`digits`].
pub fn flat_index(digits: &[usize], dim: usize) -> usize {
    digits.iter().fold(0, |acc, &s| acc * dim + s)
}

/// An element of `H^{⊗legs}` with `H = C^dim`.
#[derive(Clone, Debug, PartialEq)]
pub struct Tensor<S> {
    legs: usize,
    dim: usize,
    data: Vec<S>,
}

impl<S: Scalar> Tensor<S> {
    pub fn zeros(legs: usize, dim: usize) -> Self {
        Tensor { legs, dim, data: vec![S::zero(); pow(dim, legs)] }
    }

    pub fn from_vec(legs: usize, dim: usize, data: Vec<S>) -> Result<Self> {
        if data.len() != pow(dim, legs) {
            return Err(Error::ShapeMismatch(format!(
                "{} entries for {legs} legs of dimension {dim}",
                data.len()
            )));
        }
        Ok(Tensor { legs, dim, data })
    }

    /// A zero-leg tensor, i.e. a multiple of the vacuum.
    pub fn scalar(dim: usize, value: S) -> Self {
        Tensor { legs: 0, dim, data: vec![value] }
    }

    /// `e_{s_1} ⊗ … ⊗ e_{s_n}` for zero-based `s`.
    pub fn basis(dim: usize, string: &[usize]) -> Self {
        let mut t = Self::zeros(string.len(), dim);
        t.data[flat_index(string, dim)] = S::one();
        t
    }

    pub fn basis_index(legs: usize, dim: usize, index: usize) -> Self {
        let mut t = Self::zeros(legs, dim);
        t.data[index] = S::one();
        t
    }

    pub fn legs(&self) -> usize {
        self.legs
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn data(&self) -> &[S] {
        &self.data
    }

    pub fn data_mut(&mut self) -> &mut [S] {
        &mut self.data
    }

    pub fn into_data(self) -> Vec<S> {
        self.data
    }

    pub fn get(&self, string: &[usize]) -> &S {
        &self.data[flat_index(string, self.dim)]
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(S::is_zero)
    }

    /// `self ⊗ other`.
    pub fn kron(&self, other: &Tensor<S>) -> Tensor<S> {
        assert_eq!(self.dim, other.dim, "tensor dimensions differ");
        let mut data = Vec::with_capacity(self.data.len() * other.data.len());
        for a in &self.data {
            for b in &other.data {
                data.push(if a.is_zero() { S::zero() } else { a.mul_ref(b) });
            }
        }
        Tensor { legs: self.legs + other.legs, dim: self.dim, data }
    }

    pub fn add(&self, other: &Tensor<S>) -> Result<Tensor<S>> {
        self.check_same_shape(other)?;
        let data = self.data.iter().zip(&other.data).map(|(a, b)| a.add_ref(b)).collect();
        Ok(Tensor { legs: self.legs, dim: self.dim, data })
    }

    pub fn sub(&self, other: &Tensor<S>) -> Result<Tensor<S>> {
        self.check_same_shape(other)?;
        let data = self.data.iter().zip(&other.data).map(|(a, b)| a.sub_ref(b)).collect();
        Ok(Tensor { legs: self.legs, dim: self.dim, data })
    }

    pub fn add_assign(&mut self, other: &Tensor<S>) -> Result<()> {
        self.check_same_shape(other)?;
        for (a, b) in self.data.iter_mut().zip(&other.data) {
            if !b.is_zero() {
                a.add_assign_ref(b);
            }
        }
        Ok(())
    }

    pub fn scale(&self, c: &S) -> Tensor<S> {
        Tensor { legs: self.legs, dim: self.dim, data: self.data.iter().map(|a| a.mul_ref(c)).collect() }
    }

    /// Entrywise complex conjugation in the standard real basis (the map `I`).
    pub fn conj(&self) -> Tensor<S> {
        Tensor { legs: self.legs, dim: self.dim, data: self.data.iter().map(S::conj).collect() }
    }

    /// Leg reversal `v_1 ⊗ … ⊗ v_n ↦ v_n ⊗ … ⊗ v_1`.
    pub fn reversed(&self) -> Tensor<S> {
        self.permute_legs(&Permutation::reversal(self.legs))
    }

    /// Output leg `l` carries input leg `π(l)`.
    pub fn permute_legs(&self, perm: &Permutation) -> Tensor<S> {
        assert_eq!(perm.len(), self.legs);
        let mut out = Self::zeros(self.legs, self.dim);
        for (idx, v) in self.data.iter().enumerate() {
            if v.is_zero() {
                continue;
            }
            let input = digits(idx, self.legs, self.dim);
            let output: Vec<usize> = (1..=self.legs).map(|l| input[perm.at(l) - 1]).collect();
            out.data[flat_index(&output, self.dim)] = v.clone();
        }
        out
    }

    pub fn is_real(&self) -> bool {
        self.data.iter().all(S::is_real)
    }

    /// Zero-based leg values that occur in some nonzero entry.
    pub fn support_letters(&self) -> Vec<usize> {
        let mut used = vec![false; self.dim];
        for (idx, v) in self.data.iter().enumerate() {
            if !v.is_zero() {
                for s in digits(idx, self.legs, self.dim) {
                    used[s] = true;
                }
            }
        }
        (0..self.dim).filter(|&s| used[s]).collect()
    }

    fn check_same_shape(&self, other: &Tensor<S>) -> Result<()> {
        if self.legs != other.legs || self.dim != other.dim {
            return Err(Error::ShapeMismatch(format!(
                "({} legs, dim {}) vs ({} legs, dim {})",
                self.legs, self.dim, other.legs, other.dim
            )));
        }
        Ok(())
    }
}

/// A linear map `H^{⊗src_legs} → H^{⊗dst_legs}`, stored as a dense row-major
/// `d^dst × d^src` matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct LinMap<S> {
    src_legs: usize,
    dst_legs: usize,
    dim: usize,
    data: Vec<S>,
}

impl<S: Scalar> LinMap<S> {
    pub fn zeros(src_legs: usize, dst_legs: usize, dim: usize) -> Self {
        LinMap { src_legs, dst_legs, dim, data: vec![S::zero(); pow(dim, src_legs) * pow(dim, dst_legs)] }
    }

    pub fn identity(legs: usize, dim: usize) -> Self {
        let mut m = Self::zeros(legs, legs, dim);
        for i in 0..m.cols() {
            m.set(i, i, S::one());
        }
        m
    }

    pub fn from_rows(src_legs: usize, dst_legs: usize, dim: usize, data: Vec<S>) -> Result<Self> {
        if data.len() != pow(dim, src_legs) * pow(dim, dst_legs) {
            return Err(Error::ShapeMismatch(format!("{} entries for a {dst_legs}<-{src_legs} map", data.len())));
        }
        Ok(LinMap { src_legs, dst_legs, dim, data })
    }

    /// The leg permutation action `v_1⊗…⊗v_n ↦ v_{π(1)}⊗…⊗v_{π(n)}`.
    pub fn leg_permutation(perm: &Permutation, dim: usize) -> Self {
        let n = perm.len();
        let mut m = Self::zeros(n, n, dim);
        for col in 0..pow(dim, n) {
            let input = digits(col, n, dim);
            let output: Vec<usize> = (1..=n).map(|l| input[perm.at(l) - 1]).collect();
            m.set(flat_index(&output, dim), col, S::one());
        }
        m
    }

    pub fn src_legs(&self) -> usize {
        self.src_legs
    }

    pub fn dst_legs(&self) -> usize {
        self.dst_legs
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn rows(&self) -> usize {
        pow(self.dim, self.dst_legs)
    }

    pub fn cols(&self) -> usize {
        pow(self.dim, self.src_legs)
    }

    pub fn data(&self) -> &[S] {
        &self.data
    }

    pub fn get(&self, row: usize, col: usize) -> &S {
        &self.data[row * self.cols() + col]
    }

    pub fn set(&mut self, row: usize, col: usize, v: S) {
        let cols = self.cols();
        self.data[row * cols + col] = v;
    }

    pub fn entry_mut(&mut self, row: usize, col: usize) -> &mut S {
        let cols = self.cols();
        &mut self.data[row * cols + col]
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(S::is_zero)
    }

    pub fn apply(&self, x: &Tensor<S>) -> Result<Tensor<S>> {
        if x.legs() != self.src_legs || x.dim() != self.dim {
            return Err(Error::ShapeMismatch(format!(
                "map expects {} legs, tensor has {}",
                self.src_legs,
                x.legs()
            )));
        }
        let cols = self.cols();
        let nz: Vec<(usize, &S)> = x.data().iter().enumerate().filter(|(_, v)| !v.is_zero()).collect();
        let mut out = vec![S::zero(); self.rows()];
        for (r, slot) in out.iter_mut().enumerate() {
            let row = &self.data[r * cols..(r + 1) * cols];
            for &(c, v) in &nz {
                slot.mul_add_assign(&row[c], v);
            }
        }
        Tensor::from_vec(self.dst_legs, self.dim, out)
    }

    /// `self ∘ other`.
    pub fn compose(&self, other: &LinMap<S>) -> Result<LinMap<S>> {
        if self.src_legs != other.dst_legs || self.dim != other.dim {
            return Err(Error::ShapeMismatch(format!(
                "cannot compose {}<-{} after {}<-{}",
                self.dst_legs, self.src_legs, other.dst_legs, other.src_legs
            )));
        }
        let inner = self.cols();
        let cols = other.cols();
        let other_rows: Vec<Vec<(usize, &S)>> = (0..inner)
            .map(|k| {
                other.data[k * cols..(k + 1) * cols].iter().enumerate().filter(|(_, v)| !v.is_zero()).collect()
            })
            .collect();
        let mut out = LinMap::<S>::zeros(other.src_legs, self.dst_legs, self.dim);
        for r in 0..self.rows() {
            for (k, a) in self.data[r * inner..(r + 1) * inner].iter().enumerate() {
                if a.is_zero() {
                    continue;
                }
                for &(c, b) in &other_rows[k] {
                    out.data[r * cols + c].mul_add_assign(a, b);
                }
            }
        }
        Ok(out)
    }

    /// `self ⊗ other`, legs of `self` first.
    pub fn kron(&self, other: &LinMap<S>) -> LinMap<S> {
        assert_eq!(self.dim, other.dim, "map dimensions differ");
        let (r2, c2) = (other.rows(), other.cols());
        let mut out = LinMap::zeros(self.src_legs + other.src_legs, self.dst_legs + other.dst_legs, self.dim);
        let cols = out.cols();
        for r1 in 0..self.rows() {
            for c1 in 0..self.cols() {
                let a = self.get(r1, c1);
                if a.is_zero() {
                    continue;
                }
                for rr in 0..r2 {
                    for cc in 0..c2 {
                        let b = other.get(rr, cc);
                        if !b.is_zero() {
                            out.data[(r1 * r2 + rr) * cols + c1 * c2 + cc] = a.mul_ref(b);
                        }
                    }
                }
            }
        }
        out
    }

    /// `(self ⊗ other) x` without forming the Kronecker product.
    pub fn kron_apply(&self, other: &LinMap<S>, x: &Tensor<S>) -> Result<Tensor<S>> {
        if x.legs() != self.src_legs + other.src_legs || x.dim() != self.dim || other.dim != self.dim {
            return Err(Error::ShapeMismatch("Kronecker factors do not match the tensor".into()));
        }
        let (c1, c2, r2) = (self.cols(), other.cols(), other.rows());
        // Right factor on each row block, then the left factor across blocks.
        let mut half = vec![S::zero(); c1 * r2];
        for a in 0..c1 {
            let block = &x.data()[a * c2..(a + 1) * c2];
            if block.iter().all(S::is_zero) {
                continue;
            }
            for r in 0..r2 {
                let row = &other.data[r * c2..(r + 1) * c2];
                let slot = &mut half[a * r2 + r];
                for (m, v) in row.iter().zip(block) {
                    slot.mul_add_assign(m, v);
                }
            }
        }
        let mut out = vec![S::zero(); self.rows() * r2];
        for r in 0..self.rows() {
            for a in 0..c1 {
                let m = &self.data[r * c1 + a];
                if m.is_zero() {
                    continue;
                }
                for b in 0..r2 {
                    out[r * r2 + b].mul_add_assign(m, &half[a * r2 + b]);
                }
            }
        }
        Tensor::from_vec(self.dst_legs + other.dst_legs, self.dim, out)
    }

    pub fn add(&self, other: &LinMap<S>) -> Result<LinMap<S>> {
        self.check_same_shape(other)?;
        let data = self.data.iter().zip(&other.data).map(|(a, b)| a.add_ref(b)).collect();
        Ok(LinMap { data, ..*self })
    }

    pub fn sub(&self, other: &LinMap<S>) -> Result<LinMap<S>> {
        self.check_same_shape(other)?;
        let data = self.data.iter().zip(&other.data).map(|(a, b)| a.sub_ref(b)).collect();
        Ok(LinMap { data, ..*self })
    }

    pub fn add_scaled(&mut self, other: &LinMap<S>, c: &S) -> Result<()> {
        self.check_same_shape(other)?;
        for (a, b) in self.data.iter_mut().zip(&other.data) {
            a.mul_add_assign(b, c);
        }
        Ok(())
    }

    pub fn scale(&self, c: &S) -> LinMap<S> {
        LinMap { data: self.data.iter().map(|a| a.mul_ref(c)).collect(), ..*self }
    }

    /// Conjugate transpose with respect to the flat coordinate inner product.
    pub fn adjoint(&self) -> LinMap<S> {
        let mut out = LinMap::zeros(self.dst_legs, self.src_legs, self.dim);
        for r in 0..self.rows() {
            for c in 0..self.cols() {
                out.set(c, r, self.get(r, c).conj());
            }
        }
        out
    }

    pub fn map_entries<T: Scalar>(&self, f: impl Fn(&S) -> T) -> LinMap<T> {
        LinMap {
            src_legs: self.src_legs,
            dst_legs: self.dst_legs,
            dim: self.dim,
            data: self.data.iter().map(f).collect(),
        }
    }

    fn check_same_shape(&self, other: &LinMap<S>) -> Result<()> {
        if self.src_legs != other.src_legs || self.dst_legs != other.dst_legs || self.dim != other.dim {
            return Err(Error::ShapeMismatch(format!(
                "{}<-{} vs {}<-{}",
                self.dst_legs, self.src_legs, other.dst_legs, other.src_legs
            )));
        }
        Ok(())
    }
}

impl<S: Scalar> Tensor<S> {
    pub fn map_entries<T: Scalar>(&self, f: impl Fn(&S) -> T) -> Tensor<T> {
        Tensor { legs: self.legs, dim: self.dim, data: self.data.iter().map(f).collect() }
    }
}

/// Accumulated size of the differences seen by an identity check.
#[derive(Clone, Copy, Debug, PartialEq, Default)]
pub struct Residual {
    /// Largest [`Scalar::magnitude`] among the differences.
    pub max: f64,
    /// Whether every difference was exactly zero.
    pub exact_zero: bool,
    /// Number of scalar comparisons performed.
    pub compared: usize,
}

impl Residual {
    pub fn new() -> Self {
        Residual { max: 0.0, exact_zero: true, compared: 0 }
    }

    pub fn absorb<S: Scalar>(&mut self, diff: &S) {
        self.compared += 1;
        if !diff.is_zero() {
            self.exact_zero = false;
            self.max = self.max.max(diff.magnitude());
        }
    }

    pub fn absorb_tensors<S: Scalar>(&mut self, a: &Tensor<S>, b: &Tensor<S>) -> Result<()> {
        for d in a.sub(b)?.data() {
            self.absorb(d);
        }
        Ok(())
    }

    pub fn absorb_maps<S: Scalar>(&mut self, a: &LinMap<S>, b: &LinMap<S>) -> Result<()> {
        for d in a.sub(b)?.data() {
            self.absorb(d);
        }
        Ok(())
    }

    pub fn merge(&mut self, other: &Residual) {
        self.max = self.max.max(other.max);
        self.exact_zero &= other.exact_zero;
        self.compared += other.compared;
    }

    pub fn within(&self, tol: f64) -> bool {
        self.exact_zero || self.max <= tol
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qtensor::QPoly;
    use num_complex::Complex64;

    #[test]
    fn digit_round_trip() {
        for idx in 0..27 {
            assert_eq!(flat_index(&digits(idx, 3, 3), 3), idx);
        }
        assert_eq!(digits(5, 3, 2), vec![1, 0, 1]);
    }

    #[test]
    fn leg_permutation_moves_legs() {
        let p = Permutation::new(vec![2, 3, 1]).unwrap();
        let t = Tensor::<QPoly>::basis(3, &[0, 1, 2]);
        let m = LinMap::leg_permutation(&p, 3);
        assert_eq!(m.apply(&t).unwrap(), Tensor::basis(3, &[1, 2, 0]));
        assert_eq!(t.permute_legs(&p), Tensor::basis(3, &[1, 2, 0]));
    }

    #[test]
    fn kron_of_maps_acts_legwise() {
        let swap = LinMap::<Complex64>::leg_permutation(&Permutation::reversal(2), 2);
        let id = LinMap::identity(1, 2);
        let m = id.kron(&swap);
        let t = Tensor::basis(2, &[0, 0, 1]);
        assert_eq!(m.apply(&t).unwrap(), Tensor::basis(2, &[0, 1, 0]));
        let composed = m.compose(&m).unwrap();
        assert_eq!(composed, LinMap::identity(3, 2));
    }

    #[test]
    fn shape_errors() {
        let m = LinMap::<Complex64>::identity(2, 2);
        let t = Tensor::<Complex64>::zeros(1, 2);
        assert!(m.apply(&t).is_err());
        assert!(m.compose(&LinMap::identity(1, 2)).is_err());
        assert!(Tensor::<Complex64>::from_vec(2, 2, vec![Complex64::new(0.0, 0.0); 3]).is_err());
    }

    #[test]
    fn support_letters_reports_used_coordinates() {
        let mut t = Tensor::<Complex64>::zeros(2, 3);
        t.data_mut()[flat_index(&[0, 2], 3)] = Complex64::new(1.0, 0.0);
        assert_eq!(t.support_letters(), vec![0, 2]);
    }
}
