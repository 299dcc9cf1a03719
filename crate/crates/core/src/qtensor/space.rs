//! The q-geometry on tensor powers of `H = C^d`.
//!
//! [`QSpace`] fixes the dimension, the value of `q` (a formal variable for
//! the exact backend, a number for the float backend) and an enumeration
//! ceiling, and builds the symmetrizers `P_q^n`, the shuffle operators `R*`,
//! the leg reversal `σ_n` and the partial pairings `m_j`, `m̃_j`.

use std::collections::HashMap;
use std::sync::{Arc, RwLock};

use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, Signed};

use crate::combinatorics::{subset_inversion_stat, subset_to_permutation, Permutation, Subset};
use crate::error::{Error, Result};

use super::tensor::{digits, flat_index, pow, LinMap, Residual, Tensor};
use super::{QPoly, Scalar};

/// Default per-object leg ceiling.
pub const DEFAULT_CEILING: usize = 8;

/// Append-only cache of the symmetrizers `P_q^n`, keyed by level.
///
/// A miss may be computed twice by concurrent callers; both produce the same
/// map and the last insert wins.
#[derive(Debug)]
pub struct GramCache<S> {
    maps: RwLock<HashMap<usize, Arc<LinMap<S>>>>,
}

impl<S> Default for GramCache<S> {
    fn default() -> Self {
        GramCache { maps: RwLock::default() }
    }
}

impl<S: Scalar> GramCache<S> {
    pub fn get(&self, n: usize) -> Option<Arc<LinMap<S>>> {
        self.maps.read().expect("gram cache poisoned").get(&n).cloned()
    }

    pub fn insert(&self, n: usize, map: Arc<LinMap<S>>) {
        self.maps.write().expect("gram cache poisoned").insert(n, map);
    }
}

#[derive(Debug)]
pub struct QSpace<S: Scalar> {
    dim: usize,
    q: S,
    ceiling: usize,
    gram: GramCache<S>,
    rstar: RwLock<HashMap<(usize, usize), Arc<LinMap<S>>>>,
}

impl QSpace<QPoly> {
    /// Exact backend with `q` kept as a formal variable.
    pub fn symbolic(dim: usize) -> Self {
        QSpace::new(dim, QPoly::q())
    }

    /// Exact backend with `q` fixed to a rational value.
    pub fn at_rational(dim: usize, q: BigRational) -> Result<Self> {
        if q.abs() >= BigRational::one() {
            return Err(Error::InvalidQ(q.to_string()));
        }
        Ok(QSpace::new(dim, QPoly::rational(q)))
    }
}

impl QSpace<Complex64> {
    /// Floating-point backend.
    pub fn numeric(dim: usize, q: f64) -> Result<Self> {
        if !(q.abs() < 1.0) {
            return Err(Error::InvalidQ(q.to_string()));
        }
        Ok(QSpace::new(dim, Complex64::new(q, 0.0)))
    }

    pub fn q_value(&self) -> f64 {
        self.q.re
    }
}

impl<S: Scalar> QSpace<S> {
    pub fn new(dim: usize, q: S) -> Self {
        assert!(dim >= 1, "dimension must be positive");
        QSpace { dim, q, ceiling: DEFAULT_CEILING, gram: GramCache::default(), rstar: RwLock::default() }
    }

    pub fn with_ceiling(mut self, ceiling: usize) -> Self {
        self.ceiling = ceiling;
        self
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn q(&self) -> &S {
        &self.q
    }

    pub fn ceiling(&self) -> usize {
        self.ceiling
    }

    pub fn check_ceiling(&self, legs: usize) -> Result<()> {
        if legs > self.ceiling {
            return Err(Error::CeilingExceeded { legs, ceiling: self.ceiling });
        }
        Ok(())
    }

    pub fn q_pow(&self, k: usize) -> S {
        let mut v = S::one();
        for _ in 0..k {
            v = v.mul_ref(&self.q);
        }
        v
    }

    /// `Σ_k counts[k] q^k`.
    pub fn poly_from_counts(&self, counts: &[i64]) -> S {
        let mut acc = S::zero();
        let mut power = S::one();
        for (k, &c) in counts.iter().enumerate() {
            if k > 0 {
                power = power.mul_ref(&self.q);
            }
            if c != 0 {
                acc.add_assign_ref(&power.scale_i64(c));
            }
        }
        acc
    }

    /// `Σ_π q^{w(π)} π` for weighted leg permutations on `legs` legs.
    ///
    /// Integer multiplicities are collected per matrix entry and inversion
    /// weight before any scalar arithmetic, which keeps the exact backend
    /// cheap.
    fn weighted_permutation_sum(&self, legs: usize, terms: &[(Permutation, usize)]) -> LinMap<S> {
        let size = pow(self.dim, legs);
        let max_weight = terms.iter().map(|t| t.1).max().unwrap_or(0);
        let mut out = LinMap::zeros(legs, legs, self.dim);
        let mut counts: HashMap<usize, Vec<i64>> = HashMap::new();
        for col in 0..size {
            counts.clear();
            let input = digits(col, legs, self.dim);
            let mut output = vec![0; legs];
            for (perm, weight) in terms {
                for (l, slot) in output.iter_mut().enumerate() {
                    *slot = input[perm.image()[l] - 1];
                }
                let row = flat_index(&output, self.dim);
                counts.entry(row).or_insert_with(|| vec![0; max_weight + 1])[*weight] += 1;
            }
            for (&row, c) in &counts {
                out.set(row, col, self.poly_from_counts(c));
            }
        }
        out
    }

    /// `P_q^n = Σ_{π ∈ S_n} q^{i(π)} π`.
    pub fn pqn(&self, n: usize) -> Result<Arc<LinMap<S>>> {
        self.check_ceiling(n)?;
        if let Some(m) = self.gram.get(n) {
            return Ok(m);
        }
        let terms: Vec<(Permutation, usize)> = Permutation::all(n)
            .map(|p| {
                let w = p.inversions();
                (p, w)
            })
            .collect();
        let map = Arc::new(self.weighted_permutation_sum(n, &terms));
        self.gram.insert(n, map.clone());
        Ok(map)
    }

    /// `P_q^n` at any level. Up to the ceiling this is [`Self::pqn`]; above it
    /// the level is built as `(Id ⊗ P_q^{n-1}) R*_{1,n-1}`, which needs only
    /// `n` leg rotations instead of `n!` permutations.
    pub fn gram(&self, n: usize) -> Result<Arc<LinMap<S>>> {
        if n <= self.ceiling {
            return self.pqn(n);
        }
        if let Some(m) = self.gram.get(n) {
            return Ok(m);
        }
        let below = self.gram(n - 1)?;
        let terms: Vec<(Permutation, usize)> = (1..=n)
            .map(|i| {
                let s = Subset::new(vec![i], n).expect("singleton subset");
                (subset_to_permutation(&s), i - 1)
            })
            .collect();
        let shuffle = self.weighted_permutation_sum(n, &terms);
        let map = Arc::new(LinMap::identity(1, self.dim).kron(&below).compose(&shuffle)?);
        self.gram.insert(n, map.clone());
        Ok(map)
    }

    /// `⟨ξ, P_q^n η⟩`, conjugate-linear in `ξ`.
    pub fn q_inner(&self, xi: &Tensor<S>, eta: &Tensor<S>) -> Result<S> {
        if xi.legs() != eta.legs() || xi.dim() != eta.dim() || xi.dim() != self.dim {
            return Err(Error::ShapeMismatch("q-inner product of tensors of different shapes".into()));
        }
        let p_eta = self.gram(eta.legs())?.apply(eta)?;
        let mut acc = S::zero();
        for (a, b) in xi.data().iter().zip(p_eta.data()) {
            if !a.is_zero() {
                acc.mul_add_assign(&a.conj(), b);
            }
        }
        Ok(acc)
    }

    /// `‖ξ‖_q²`.
    pub fn q_norm_sq(&self, xi: &Tensor<S>) -> Result<S> {
        self.q_inner(xi, xi)
    }

    /// `R*_{a,b}: v_{[a+b]} ↦ Σ_{|A|=a} q^{i(A)} v_A ⊗ v_{A^c}`.
    pub fn rstar(&self, a: usize, b: usize) -> Result<Arc<LinMap<S>>> {
        self.check_ceiling(a + b)?;
        if let Some(m) = self.rstar.read().expect("rstar cache poisoned").get(&(a, b)) {
            return Ok(m.clone());
        }
        let terms: Vec<(Permutation, usize)> = Subset::all_of_size(a + b, a)
            .map(|s| (subset_to_permutation(&s), subset_inversion_stat(&s)))
            .collect();
        let map = Arc::new(self.weighted_permutation_sum(a + b, &terms));
        self.rstar.write().expect("rstar cache poisoned").insert((a, b), map.clone());
        Ok(map)
    }

    /// `R*_{a,b,c} = (Id_a ⊗ R*_{b,c}) R*_{a,b+c}`.
    pub fn rstar3(&self, a: usize, b: usize, c: usize) -> Result<LinMap<S>> {
        self.check_ceiling(a + b + c)?;
        let inner = LinMap::identity(a, self.dim).kron(&*self.rstar(b, c)?);
        inner.compose(&*self.rstar(a, b + c)?)
    }

    /// `(R*_{a,b} ⊗ Id_c) R*_{a+b,c}`, the other splitting route.
    pub fn rstar3_right(&self, a: usize, b: usize, c: usize) -> Result<LinMap<S>> {
        self.check_ceiling(a + b + c)?;
        let outer = self.rstar(a, b)?.kron(&LinMap::identity(c, self.dim));
        outer.compose(&*self.rstar(a + b, c)?)
    }

    /// Leg reversal `σ_n`.
    pub fn sigma(&self, n: usize) -> Result<LinMap<S>> {
        self.check_ceiling(n)?;
        Ok(LinMap::leg_permutation(&Permutation::reversal(n), self.dim))
    }

    /// Bilinear kernel `K` of `m_j`: `m_j(x ⊗ y) = Σ x_u K[u,w] y_w`,
    /// `K = σ_j P_q^j`.
    pub fn m_kernel(&self, j: usize) -> Result<LinMap<S>> {
        self.sigma(j)?.compose(&*self.pqn(j)?)
    }

    /// Kernel of `m̃_j`, which is `P_q^j` itself.
    pub fn mtilde_kernel(&self, j: usize) -> Result<Arc<LinMap<S>>> {
        self.pqn(j)
    }

    /// Contract legs `left-j+1..=left` of `zeta` against legs
    /// `left+1..=left+j` through the bilinear kernel, keeping the outer legs
    /// in order.
    pub fn contract_middle(&self, zeta: &Tensor<S>, left: usize, j: usize, kernel: &LinMap<S>) -> Result<Tensor<S>> {
        let total = zeta.legs();
        if left > total || j > left || j > total - left {
            return Err(Error::PairingTooLarge { j, available: left.min(total.saturating_sub(left)) });
        }
        if kernel.src_legs() != j || kernel.dst_legs() != j {
            return Err(Error::ShapeMismatch("pairing kernel has the wrong size".into()));
        }
        let d = self.dim;
        let (outer_l, outer_r) = (left - j, total - left - j);
        let (nl, nj, nr) = (pow(d, outer_l), pow(d, j), pow(d, outer_r));
        let kernel_nz: Vec<(usize, usize, &S)> = (0..nj)
            .flat_map(|u| (0..nj).map(move |w| (u, w)))
            .filter_map(|(u, w)| {
                let k = kernel.get(u, w);
                (!k.is_zero()).then_some((u, w, k))
            })
            .collect();
        let mut out = Tensor::<S>::zeros(outer_l + outer_r, d);
        let data = zeta.data();
        for l in 0..nl {
            for &(u, w, k) in &kernel_nz {
                let base = ((l * nj + u) * nj + w) * nr;
                for r in 0..nr {
                    let z = &data[base + r];
                    if !z.is_zero() {
                        out.data_mut()[l * nr + r].mul_add_assign(z, k);
                    }
                }
            }
        }
        Ok(out)
    }

    /// `m_j` on `ξ ⊗ η`: the last `j` legs of `ξ` paired with the first `j`
    /// legs of `η` through `⟨J·,·⟩_q`.
    pub fn pairing_m(&self, j: usize, xi: &Tensor<S>, eta: &Tensor<S>) -> Result<Tensor<S>> {
        self.check_pairing(j, xi, eta)?;
        self.contract_middle(&xi.kron(eta), xi.legs(), j, &self.m_kernel(j)?)
    }

    /// `m̃_j` on `ξ ⊗ η`, pairing through `⟨I·,·⟩_q`.
    pub fn pairing_mtilde(&self, j: usize, xi: &Tensor<S>, eta: &Tensor<S>) -> Result<Tensor<S>> {
        self.check_pairing(j, xi, eta)?;
        self.contract_middle(&xi.kron(eta), xi.legs(), j, &*self.mtilde_kernel(j)?)
    }

    fn check_pairing(&self, j: usize, xi: &Tensor<S>, eta: &Tensor<S>) -> Result<()> {
        let available = xi.legs().min(eta.legs());
        if j > available {
            return Err(Error::PairingTooLarge { j, available });
        }
        self.check_ceiling(j)
    }

    /// Compare `m_{s+j}` with `m_s m_j (R*_{s,j} ⊗ Id_{s+j})` on every pair of
    /// basis tensors of `H^{⊗(s+j)}`.
    pub fn pairing_composition_check(&self, s: usize, j: usize) -> Result<Residual> {
        let n = s + j;
        self.check_ceiling(2 * n)?;
        let full = self.m_kernel(n)?;
        let rstar = self.rstar(s, j)?;
        let inner = self.m_kernel(j)?;
        let outer = self.m_kernel(s)?;
        let size = pow(self.dim, n);
        let mut residual = Residual::new();
        for x in 0..size {
            let split = rstar.apply(&Tensor::basis_index(n, self.dim, x))?;
            for y in 0..size {
                let lhs = full.get(x, y);
                let joint = split.kron(&Tensor::basis_index(n, self.dim, y));
                let after_inner = self.contract_middle(&joint, n, j, &inner)?;
                let after_outer = self.contract_middle(&after_inner, s, s, &outer)?;
                residual.absorb(&lhs.sub_ref(&after_outer.data()[0]));
            }
        }
        Ok(residual)
    }
}

/// `I`: entrywise conjugation in the standard real basis.
pub fn conjugate_i<S: Scalar>(xi: &Tensor<S>) -> Tensor<S> {
    xi.conj()
}

/// `J = I σ`: reverse the legs and conjugate.
pub fn conjugate_j<S: Scalar>(xi: &Tensor<S>) -> Tensor<S> {
    xi.reversed().conj()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qtensor::GaussRat;

    fn sym(d: usize) -> QSpace<QPoly> {
        QSpace::symbolic(d)
    }

    fn swap(d: usize) -> LinMap<QPoly> {
        LinMap::leg_permutation(&Permutation::reversal(2), d)
    }

    fn q_times(m: &LinMap<QPoly>) -> LinMap<QPoly> {
        m.scale(&QPoly::q())
    }

    #[test]
    fn pqn_small_levels() {
        let sp = sym(2);
        assert_eq!(*sp.pqn(0).unwrap(), LinMap::identity(0, 2));
        assert_eq!(*sp.pqn(1).unwrap(), LinMap::identity(1, 2));
        let expected = LinMap::identity(2, 2).add(&q_times(&swap(2))).unwrap();
        assert_eq!(*sp.pqn(2).unwrap(), expected);
        let zero = QSpace::at_rational(2, BigRational::from_integer(0.into())).unwrap();
        for n in 0..=4 {
            assert_eq!(*zero.pqn(n).unwrap(), LinMap::identity(n, 2));
        }
    }

    #[test]
    fn recursive_gram_matches_enumeration() {
        let full = sym(2);
        let low = sym(2).with_ceiling(1);
        for n in 0..=5 {
            assert_eq!(*low.gram(n).unwrap(), *full.pqn(n).unwrap(), "n={n}");
        }
        let line = QSpace::symbolic(1).with_ceiling(0);
        // [3]_q! = (1 + q)(1 + q + q²).
        assert_eq!(line.gram(3).unwrap().get(0, 0), &QPoly::from_int_coeffs(&[1, 2, 2, 1]));
    }

    #[test]
    fn pqn_ceiling() {
        let sp = sym(2).with_ceiling(3);
        assert!(matches!(sp.pqn(4), Err(Error::CeilingExceeded { .. })));
    }

    #[test]
    fn q_inner_examples() {
        let sp = sym(2);
        let e1 = Tensor::basis(2, &[0]);
        assert_eq!(sp.q_inner(&e1, &e1).unwrap(), QPoly::one());
        let e11 = Tensor::basis(2, &[0, 0]);
        assert_eq!(sp.q_inner(&e11, &e11).unwrap(), QPoly::from_int_coeffs(&[1, 1]));
        let e12 = Tensor::basis(2, &[0, 1]);
        let e21 = Tensor::basis(2, &[1, 0]);
        assert_eq!(sp.q_inner(&e12, &e21).unwrap(), QPoly::q());
        assert!(sp.q_inner(&e1, &e12).is_err());
    }

    #[test]
    fn rstar_examples() {
        let sp = sym(2);
        assert_eq!(*sp.rstar(3, 0).unwrap(), LinMap::identity(3, 2));
        assert_eq!(*sp.rstar(0, 2).unwrap(), LinMap::identity(2, 2));
        assert_eq!(*sp.rstar(1, 1).unwrap(), *sp.pqn(2).unwrap());
        let zero = QSpace::at_rational(2, BigRational::from_integer(0.into())).unwrap();
        assert_eq!(*zero.rstar(2, 2).unwrap(), LinMap::identity(4, 2));
    }

    #[test]
    fn factorization_of_pqn() {
        let sp = sym(2);
        for total in 0..=5 {
            for a in 0..=total {
                let b = total - a;
                let rhs = sp.pqn(a).unwrap().kron(&*sp.pqn(b).unwrap()).compose(&*sp.rstar(a, b).unwrap()).unwrap();
                assert_eq!(*sp.pqn(total).unwrap(), rhs, "a={a} b={b}");
            }
        }
    }

    #[test]
    fn splitting_routes_agree() {
        let sp = sym(2);
        assert_eq!(sp.rstar3(1, 1, 0).unwrap(), *sp.rstar(1, 1).unwrap());
        assert_eq!(sp.rstar3(1, 1, 1).unwrap(), sp.rstar3_right(1, 1, 1).unwrap());
        assert_eq!(sp.rstar3(2, 1, 2).unwrap(), sp.rstar3_right(2, 1, 2).unwrap());
    }

    #[test]
    fn sigma_and_conjugations() {
        let sp = sym(2);
        assert_eq!(sp.sigma(1).unwrap(), LinMap::identity(1, 2));
        assert_eq!(sp.sigma(2).unwrap(), swap(2));
        let t = Tensor::<QPoly>::basis(2, &[0, 0, 1]);
        assert_eq!(sp.sigma(3).unwrap().apply(&t).unwrap(), Tensor::basis(2, &[1, 0, 0]));
        let s3 = sp.sigma(3).unwrap();
        assert_eq!(s3.compose(&s3).unwrap(), LinMap::identity(3, 2));

        let e12 = Tensor::<QPoly>::basis(2, &[0, 1]);
        assert_eq!(conjugate_i(&e12), e12);
        assert_eq!(conjugate_j(&e12), Tensor::basis(2, &[1, 0]));
        let z = e12.scale(&QPoly::constant(GaussRat::new(BigRational::from_integer(1.into()), BigRational::from_integer(2.into()))));
        assert_eq!(conjugate_j(&conjugate_j(&z)), z);
    }

    #[test]
    fn pairing_examples() {
        let sp = sym(2);
        let e1 = Tensor::<QPoly>::basis(2, &[0]);
        let e2 = Tensor::<QPoly>::basis(2, &[1]);
        let e12 = Tensor::<QPoly>::basis(2, &[0, 1]);
        assert_eq!(sp.pairing_m(0, &e1, &e2).unwrap(), e1.kron(&e2));
        assert_eq!(sp.pairing_m(1, &e1, &e1).unwrap(), Tensor::scalar(2, QPoly::one()));
        assert_eq!(sp.pairing_m(1, &e12, &e2).unwrap(), e1);
        assert_eq!(sp.pairing_mtilde(1, &e12, &e2).unwrap(), e1);
        assert!(matches!(sp.pairing_m(2, &e1, &e12), Err(Error::PairingTooLarge { .. })));
    }

    #[test]
    fn composition_of_pairings() {
        let sp = sym(2);
        for (s, j) in [(0, 1), (1, 0), (1, 1), (2, 1), (1, 2)] {
            let r = sp.pairing_composition_check(s, j).unwrap();
            assert!(r.exact_zero, "s={s} j={j}");
        }
    }
}
