//! The maps `v_{n,k}` and `w^j_{n,k}`, the cancellation operators `S_p` and
//! the identity `Σ_j α_j w^j_{n,k} = Id_{n+k}`.
//!
//! All maps are evaluated on tensors of `H^{⊗n} ⊗ H^{⊗k}`, identified with
//! `H^{⊗(n+k)}`; the left factor is always the first `n` legs. Results are
//! [`FockVector`]s truncated at level `n + k`.

use std::collections::BTreeMap;

use crate::combinatorics::{alpha_coefficient, alpha_with_exponent, beta, subset_inversion_stat, subset_to_permutation, Subset};
use crate::error::{Error, Result};
use crate::fock::FockVector;
use crate::qtensor::{pow, LinMap, QSpace, Residual, Scalar, Tensor};
use crate::sampling::{random_gauss_tensor, rng};

/// Inputs up to this many coordinates are checked on the whole basis.
pub const BASIS_LIMIT: usize = 256;
/// Number of random inputs used above [`BASIS_LIMIT`].
pub const RANDOM_SAMPLES: usize = 20;

/// `v_{n,k}(ξ ⊗ η) = W(ξ)W(η)Ω`.
pub fn v_map<S: Scalar>(space: &QSpace<S>, xi: &Tensor<S>, eta: &Tensor<S>) -> Result<FockVector<S>> {
    space.wick_product_vector(xi, eta)
}

/// `v_{n,k}` on a joint tensor whose first `left` legs form the left factor.
pub fn v_joint<S: Scalar>(space: &QSpace<S>, zeta: &Tensor<S>, left: usize) -> Result<FockVector<S>> {
    space.wick_product_joint(zeta, left)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Strategy {
    /// `v_{n-j,k-j} ∘ m̃_j (R*_{n-j,j} ⊗ R*_{j,k-j})`.
    Factored,
    /// `Σ_{p ≥ j} m_p(R*_{n-p,p} ⊗ ((σ_j ⊗ Id_{p-j}) R*_{j,p-j} ⊗ Id_{k-p}) R*_{p,k-p})`.
    Simplified,
}

/// `w^j_{n,k}` with its evaluation strategy and any precomputed factors.
pub struct WjMap<'a, S: Scalar> {
    space: &'a QSpace<S>,
    j: usize,
    n: usize,
    k: usize,
    strategy: Strategy,
    /// Simplified strategy: the right-hand factor for each `p ≥ j`.
    right: Vec<LinMap<S>>,
}

impl<'a, S: Scalar> WjMap<'a, S> {
    pub fn new(space: &'a QSpace<S>, j: usize, n: usize, k: usize, strategy: Strategy) -> Result<Self> {
        if j > n.min(k) {
            return Err(Error::PairingTooLarge { j, available: n.min(k) });
        }
        space.check_ceiling(n + k)?;
        let d = space.dim();
        let mut right = Vec::new();
        if strategy == Strategy::Simplified {
            for p in j..=n.min(k) {
                let twisted = space.sigma(j)?.kron(&LinMap::identity(p - j, d)).compose(&*space.rstar(j, p - j)?)?;
                right.push(twisted.kron(&LinMap::identity(k - p, d)).compose(&*space.rstar(p, k - p)?)?);
            }
        }
        Ok(WjMap { space, j, n, k, strategy, right })
    }

    pub fn j(&self) -> usize {
        self.j
    }

    pub fn strategy(&self) -> Strategy {
        self.strategy
    }

    /// Evaluate on `ζ ∈ H^{⊗n} ⊗ H^{⊗k}`.
    pub fn apply(&self, zeta: &Tensor<S>) -> Result<FockVector<S>> {
        if zeta.legs() != self.n + self.k {
            return Err(Error::ShapeMismatch(format!("w-map expects {} legs", self.n + self.k)));
        }
        let (sp, j, n, k) = (self.space, self.j, self.n, self.k);
        match self.strategy {
            Strategy::Factored => {
                let split = sp.rstar(n - j, j)?.kron_apply(&*sp.rstar(j, k - j)?, zeta)?;
                let paired = sp.contract_middle(&split, n, j, &*sp.mtilde_kernel(j)?)?;
                sp.wick_product_joint(&paired, n - j)?.retruncate(n + k)
            }
            Strategy::Simplified => {
                let mut out = FockVector::zeros(sp.dim(), n + k);
                for (p, right) in (j..=n.min(k)).zip(&self.right) {
                    let split = sp.rstar(n - p, p)?.kron_apply(right, zeta)?;
                    out.add_to_level(&sp.contract_middle(&split, n, p, &sp.m_kernel(p)?)?)?;
                }
                Ok(out)
            }
        }
    }
}

pub fn w_map_factored<S: Scalar>(space: &QSpace<S>, j: usize, xi: &Tensor<S>, eta: &Tensor<S>) -> Result<FockVector<S>> {
    WjMap::new(space, j, xi.legs(), eta.legs(), Strategy::Factored)?.apply(&xi.kron(eta))
}

pub fn w_map_simplified<S: Scalar>(space: &QSpace<S>, j: usize, xi: &Tensor<S>, eta: &Tensor<S>) -> Result<FockVector<S>> {
    WjMap::new(space, j, xi.legs(), eta.legs(), Strategy::Simplified)?.apply(&xi.kron(eta))
}

/// `S_p = Σ_{j ≤ p} α_j (σ_j ⊗ Id_{p-j}) R*_{j,p-j}` with `α_j = (−1)^j q^{C(j,2)}`.
pub fn s_p_operator<S: Scalar>(space: &QSpace<S>, p: usize) -> Result<LinMap<S>> {
    let alphas: Vec<S> = (0..=p).map(|j| alpha_coefficient(j, space.q())).collect();
    s_p_operator_with(space, p, &alphas)
}

/// `S_p` with caller-supplied coefficients `alphas[0..=p]`.
pub fn s_p_operator_with<S: Scalar>(space: &QSpace<S>, p: usize, alphas: &[S]) -> Result<LinMap<S>> {
    if alphas.len() <= p {
        return Err(Error::ShapeMismatch(format!("{} coefficients for S_{p}", alphas.len())));
    }
    space.check_ceiling(p)?;
    let d = space.dim();
    let mut out = LinMap::zeros(p, p, d);
    for (j, alpha) in alphas.iter().enumerate().take(p + 1) {
        let term = space.sigma(j)?.kron(&LinMap::identity(p - j, d)).compose(&*space.rstar(j, p - j)?)?;
        out.add_scaled(&term, alpha)?;
    }
    Ok(out)
}

/// Residual of `S_p` against its expected value (`Id` for `p = 0`, else `0`).
pub fn s_p_residual<S: Scalar>(space: &QSpace<S>, p: usize) -> Result<Residual> {
    let expected = if p == 0 { LinMap::identity(0, space.dim()) } else { LinMap::zeros(p, p, space.dim()) };
    let mut r = Residual::new();
    r.absorb_maps(&s_p_operator(space, p)?, &expected)?;
    Ok(r)
}

/// One term `(−1)^j q^{C(j,2) + i(A)}` of the expansion of `S_p`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Contribution {
    pub j: usize,
    pub subset: Vec<usize>,
    pub sign: i8,
    pub exponent: usize,
}

/// Outcome of grouping the expansion of `S_p` by the permutation of legs
/// each term implements.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct PermutationCancellation {
    pub p: usize,
    pub groups: usize,
    pub contributions: usize,
    /// Groups that are not a pair of opposite-sign, equal-power terms.
    pub violations: Vec<Vec<usize>>,
}

impl PermutationCancellation {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Group the terms of `S_p` by implemented permutation and check that every
/// group cancels in pairs. For `p = 0` the single group is the identity with
/// coefficient `+1`.
pub fn permutation_cancellation(p: usize) -> Result<PermutationCancellation> {
    permutation_cancellation_with(p, &(0..=p).map(beta).collect::<Vec<_>>())
}

/// [`permutation_cancellation`] with exponents `betas[j]` in place of `C(j,2)`.
pub fn permutation_cancellation_with(p: usize, betas: &[usize]) -> Result<PermutationCancellation> {
    if p > crate::combinatorics::MAX_ENUMERATION {
        return Err(Error::CeilingExceeded { legs: p, ceiling: crate::combinatorics::MAX_ENUMERATION });
    }
    let mut groups: BTreeMap<Vec<usize>, Vec<Contribution>> = BTreeMap::new();
    for j in 0..=p {
        for subset in Subset::all_of_size(p, j) {
            let pi = subset_to_permutation(&subset);
            // (σ_j ⊗ Id) T_{π_A}: output leg l reads input leg π_A(σ(l)).
            let image: Vec<usize> = (1..=p).map(|l| pi.at(if l <= j { j + 1 - l } else { l })).collect();
            groups.entry(image).or_default().push(Contribution {
                j,
                subset: subset.elements().to_vec(),
                sign: if j % 2 == 0 { 1 } else { -1 },
                exponent: betas[j] + subset_inversion_stat(&subset),
            });
        }
    }
    let mut report = PermutationCancellation { p, groups: groups.len(), ..Default::default() };
    for (image, terms) in &groups {
        report.contributions += terms.len();
        let ok = if p == 0 {
            terms.len() == 1 && terms[0].sign == 1 && terms[0].exponent == 0
        } else {
            terms.len() == 2 && terms[0].sign != terms[1].sign && terms[0].exponent == terms[1].exponent
        };
        if !ok {
            report.violations.push(image.clone());
        }
    }
    Ok(report)
}

/// Raise `β_j` by one and return the first `p ≤ j + 1` with `S_p ≠ 0`.
pub fn beta_perturbation_probe<S: Scalar>(space: &QSpace<S>, j: usize) -> Result<Option<usize>> {
    for p in j.max(1)..=j + 1 {
        let alphas: Vec<S> = (0..=p)
            .map(|i| {
                let exponent = if i == j { beta(i) + 1 } else { beta(i) };
                alpha_with_exponent(i, exponent, space.q())
            })
            .collect();
        if !s_p_operator_with(space, p, &alphas)?.is_zero() {
            return Ok(Some(p));
        }
    }
    Ok(None)
}

/// The inputs an identity on `H^{⊗legs}` is checked against.
pub fn spanning_set<S: Scalar>(dim: usize, legs: usize, seed: u64) -> (Vec<Tensor<S>>, bool) {
    let size = pow(dim, legs);
    if size <= BASIS_LIMIT {
        ((0..size).map(|i| Tensor::basis_index(legs, dim, i)).collect(), true)
    } else {
        let mut r = rng(seed);
        ((0..RANDOM_SAMPLES).map(|_| random_gauss_tensor(&mut r, legs, dim, true)).collect(), false)
    }
}

/// Result of checking `Σ_j α_j w^j_{n,k} = Id_{n+k}`.
#[derive(Clone, Debug, PartialEq)]
pub struct CombinatorialCheck {
    pub n: usize,
    pub k: usize,
    /// Whole difference over all levels.
    pub residual: Residual,
    /// Difference at each level `n + k − 2p`, keyed by `p`.
    pub level_residuals: Vec<(usize, Residual)>,
    pub inputs: usize,
    pub full_basis: bool,
}

impl CombinatorialCheck {
    pub fn within(&self, tol: f64) -> bool {
        self.residual.within(tol)
    }
}

/// Evaluate `Σ_j α_j w^j_{n,k}(ζ) − ζ` on a spanning set, with each `w^j`
/// computed by the factored strategy.
pub fn combinatorial_identity_check<S: Scalar>(space: &QSpace<S>, n: usize, k: usize, seed: u64) -> Result<CombinatorialCheck> {
    space.check_ceiling(n + k)?;
    let maps = (0..=n.min(k))
        .map(|j| WjMap::new(space, j, n, k, Strategy::Factored))
        .collect::<Result<Vec<_>>>()?;
    let alphas: Vec<S> = (0..=n.min(k)).map(|j| alpha_coefficient(j, space.q())).collect();
    let (inputs, full_basis) = spanning_set::<S>(space.dim(), n + k, seed);
    let mut level_residuals: Vec<(usize, Residual)> = (0..=n.min(k)).map(|p| (p, Residual::new())).collect();
    let mut residual = Residual::new();
    for zeta in &inputs {
        let mut total = FockVector::zeros(space.dim(), n + k);
        for (w, alpha) in maps.iter().zip(&alphas) {
            total = total.add(&w.apply(zeta)?.scale(alpha))?;
        }
        let expected = FockVector::from_tensor(zeta, n + k)?;
        for (p, r) in level_residuals.iter_mut() {
            let level = n + k - 2 * *p;
            r.absorb_tensors(total.level(level), expected.level(level))?;
        }
        residual.merge(&total.residual(&expected)?);
    }
    Ok(CombinatorialCheck { n, k, residual, level_residuals, inputs: inputs.len(), full_basis })
}

/// Largest difference between the two strategies for `w^j_{n,k}` on a
/// spanning set.
pub fn strategy_equivalence_check<S: Scalar>(space: &QSpace<S>, j: usize, n: usize, k: usize, seed: u64) -> Result<Residual> {
    let factored = WjMap::new(space, j, n, k, Strategy::Factored)?;
    let simplified = WjMap::new(space, j, n, k, Strategy::Simplified)?;
    let mut r = Residual::new();
    for zeta in spanning_set::<S>(space.dim(), n + k, seed).0 {
        r.merge(&factored.apply(&zeta)?.residual(&simplified.apply(&zeta)?)?);
    }
    Ok(r)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qtensor::{GaussRat, QPoly};
    use crate::sampling::random_rational_tensor;
    use num_rational::BigRational;

    fn e(s: &[usize]) -> Tensor<QPoly> {
        Tensor::basis(2, s)
    }

    #[test]
    fn v_map_examples() {
        let sp = QSpace::symbolic(2);
        let c = QPoly::constant(GaussRat::from_int(3));
        let omega = Tensor::scalar(2, c.clone());
        let one = Tensor::scalar(2, QPoly::one());
        assert_eq!(v_map(&sp, &omega, &one).unwrap(), FockVector::from_tensor(&omega, 0).unwrap());
        let got = v_map(&sp, &e(&[0]), &e(&[0])).unwrap();
        let expected = FockVector::from_tensor(&e(&[0, 0]), 2).unwrap().add(&FockVector::vacuum(2, 2)).unwrap();
        assert_eq!(got, expected);
        let xi = e(&[1, 0]);
        assert_eq!(v_map(&sp, &xi, &one).unwrap(), FockVector::from_tensor(&xi, 2).unwrap());
    }

    #[test]
    fn w_map_examples() {
        let sp = QSpace::symbolic(2);
        let mut r = rng(2);
        let xi = random_rational_tensor(&mut r, 1, 2, true);
        let eta = random_rational_tensor(&mut r, 1, 2, true);
        assert_eq!(w_map_factored(&sp, 0, &xi, &eta).unwrap(), v_map(&sp, &xi, &eta).unwrap());
        let inner = sp.q_inner(&xi.conj(), &eta).unwrap();
        let w1 = w_map_factored(&sp, 1, &xi, &eta).unwrap();
        assert_eq!(w1, FockVector::from_tensor(&Tensor::scalar(2, inner), 2).unwrap());
        assert!(w_map_factored(&sp, 2, &xi, &eta).is_err());
    }

    #[test]
    fn strategies_agree() {
        let sp = QSpace::symbolic(2);
        for n in 0..=2 {
            for k in 0..=2 {
                for j in 0..=n.min(k) {
                    let r = strategy_equivalence_check(&sp, j, n, k, 0).unwrap();
                    assert!(r.exact_zero, "j={j} n={n} k={k}");
                }
            }
        }
    }

    #[test]
    fn s_p_small_cases() {
        let sp = QSpace::symbolic(2);
        assert_eq!(s_p_operator(&sp, 0).unwrap(), LinMap::identity(0, 2));
        for p in 1..=4 {
            assert!(s_p_operator(&sp, p).unwrap().is_zero(), "p={p}");
        }
    }

    #[test]
    fn s_p_terms_for_p_two() {
        // Id − (Id + q·Swap) + q·Swap.
        let sp = QSpace::symbolic(2);
        let swap = sp.sigma(2).unwrap();
        let terms = [
            LinMap::identity(2, 2),
            sp.rstar(1, 1).unwrap().scale(&QPoly::from_i64(-1)),
            swap.scale(&QPoly::q()),
        ];
        let mut sum = LinMap::zeros(2, 2, 2);
        for t in &terms {
            sum = sum.add(t).unwrap();
        }
        assert!(sum.is_zero());
    }

    #[test]
    fn permutation_groups_cancel_in_pairs() {
        for p in 0..=6 {
            let rep = permutation_cancellation(p).unwrap();
            assert!(rep.passed(), "p={p}: {:?}", rep.violations);
            assert_eq!(rep.contributions, 1 << p);
        }
    }

    #[test]
    fn perturbed_betas_break_cancellation() {
        let sp = QSpace::symbolic(2);
        for j in 0..=5 {
            let hit = beta_perturbation_probe(&sp, j).unwrap();
            assert!(hit.is_some_and(|p| p <= j + 1), "j={j}");
            let mut betas: Vec<usize> = (0..=j + 1).map(beta).collect();
            betas[j] += 1;
            assert!(!permutation_cancellation_with(j + 1, &betas).unwrap().passed());
        }
    }

    #[test]
    fn combinatorial_identity_small() {
        let sp = QSpace::symbolic(2);
        for (n, k) in [(0, 0), (1, 0), (1, 1), (2, 1), (1, 2), (2, 2)] {
            let c = combinatorial_identity_check(&sp, n, k, 0).unwrap();
            assert!(c.residual.exact_zero, "n={n} k={k}");
            assert!(c.full_basis);
        }
    }

    #[test]
    fn combinatorial_identity_at_zero() {
        let sp = QSpace::at_rational(2, BigRational::from_integer(0.into())).unwrap();
        for (n, k) in [(3, 1), (2, 3)] {
            assert!(combinatorial_identity_check(&sp, n, k, 0).unwrap().residual.exact_zero);
        }
    }

    #[test]
    fn wrong_coefficients_leave_a_residual() {
        let sp = QSpace::symbolic(2);
        let alphas = [QPoly::one(), QPoly::from_i64(-1), QPoly::one()];
        assert!(!s_p_operator_with(&sp, 2, &alphas).unwrap().is_zero());
    }

    #[test]
    fn spanning_set_switches_to_samples() {
        let (basis, full) = spanning_set::<QPoly>(2, 8, 0);
        assert!(full);
        assert_eq!(basis.len(), 256);
        let (samples, full) = spanning_set::<QPoly>(3, 6, 0);
        assert!(!full);
        assert_eq!(samples.len(), RANDOM_SAMPLES);
    }
}
