//! Permutations, subsets and their inversion statistics.
//!
//! Permutations are one-indexed image arrays: `image[l - 1] = π(l)`.
//! A subset `A = {i_1 < … < i_k} ⊂ [n]` is identified with the shuffle
//! permutation `π_A` that lists `A` first and the complement afterwards, both
//! in increasing order.

use itertools::Itertools;

use crate::error::{Error, Result};
use crate::qtensor::Scalar;

/// Largest `n` for which exhaustive enumeration is allowed.
pub const MAX_ENUMERATION: usize = 12;

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Permutation {
    image: Vec<usize>,
}

impl Permutation {
    pub fn new(image: Vec<usize>) -> Result<Self> {
        let n = image.len();
        let mut seen = vec![false; n];
        for &v in &image {
            if v == 0 || v > n || seen[v - 1] {
                return Err(Error::InvalidPermutation(image));
            }
            seen[v - 1] = true;
        }
        Ok(Permutation { image })
    }

    pub fn identity(n: usize) -> Self {
        Permutation { image: (1..=n).collect() }
    }

    pub fn reversal(n: usize) -> Self {
        Permutation { image: (1..=n).rev().collect() }
    }

    pub fn len(&self) -> usize {
        self.image.len()
    }

    pub fn is_empty(&self) -> bool {
        self.image.is_empty()
    }

    pub fn image(&self) -> &[usize] {
        &self.image
    }

    /// `π(l)` for one-indexed `l`.
    pub fn at(&self, l: usize) -> usize {
        self.image[l - 1]
    }

    /// Number of pairs `i < j` with `π(i) > π(j)`.
    pub fn inversions(&self) -> usize {
        let n = self.image.len();
        let mut count = 0;
        for i in 0..n {
            for j in i + 1..n {
                if self.image[i] > self.image[j] {
                    count += 1;
                }
            }
        }
        count
    }

    /// Whether `π` is decreasing on `{1..j}` and increasing on `{j+1..n}`.
    pub fn in_class(&self, j: usize) -> bool {
        if j > self.image.len() {
            return false;
        }
        let (head, tail) = self.image.split_at(j);
        head.windows(2).all(|w| w[0] > w[1]) && tail.windows(2).all(|w| w[0] < w[1])
    }

    /// All permutations of `[n]` in lexicographic order.
    pub fn all(n: usize) -> impl Iterator<Item = Permutation> {
        (1..=n).permutations(n).map(|image| Permutation { image })
    }
}

/// Number of inversions of `π`.
pub fn inversions(perm: &Permutation) -> usize {
    perm.inversions()
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Subset {
    elements: Vec<usize>,
    n: usize,
}

impl Subset {
    pub fn new(elements: Vec<usize>, n: usize) -> Result<Self> {
        let ascending = elements.windows(2).all(|w| w[0] < w[1]);
        let in_range = elements.iter().all(|&e| e >= 1 && e <= n);
        if !ascending || !in_range {
            return Err(Error::InvalidSubset { elements, n });
        }
        Ok(Subset { elements, n })
    }

    pub fn elements(&self) -> &[usize] {
        &self.elements
    }

    pub fn ambient(&self) -> usize {
        self.n
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    /// `[n] ∖ A`, increasing.
    pub fn complement(&self) -> Vec<usize> {
        let mut it = self.elements.iter().peekable();
        (1..=self.n)
            .filter(|v| {
                if it.peek() == Some(&v) {
                    it.next();
                    false
                } else {
                    true
                }
            })
            .collect()
    }

    /// All `k`-element subsets of `[n]`, lexicographically.
    pub fn all_of_size(n: usize, k: usize) -> impl Iterator<Item = Subset> {
        (1..=n).combinations(k).map(move |elements| Subset { elements, n })
    }
}

/// `i(A) = Σ_l (i_l − l)`, the cost of moving `A` to the front of `[n]`.
pub fn subset_inversion_stat(subset: &Subset) -> usize {
    subset.elements.iter().enumerate().map(|(l, &i)| i - (l + 1)).sum()
}

/// The shuffle permutation `π_A`.
pub fn subset_to_permutation(subset: &Subset) -> Permutation {
    let mut image = subset.elements.clone();
    image.extend(subset.complement());
    Permutation { image }
}

/// Permutations decreasing on `{1..j}` and increasing on `{j+1..n}`.
///
/// Built from the `j`-subsets of `[n]`: the chosen values fill the first
/// block in decreasing order, the rest fill the tail in increasing order.
pub fn enumerate_sjn(n: usize, j: usize) -> Result<Vec<Permutation>> {
    if n > MAX_ENUMERATION {
        return Err(Error::CeilingExceeded { legs: n, ceiling: MAX_ENUMERATION });
    }
    if j > n {
        return Ok(Vec::new());
    }
    Ok(Subset::all_of_size(n, j)
        .map(|a| {
            let mut image: Vec<usize> = a.elements.iter().rev().copied().collect();
            image.extend(a.complement());
            Permutation { image }
        })
        .collect())
}

/// All `k ≠ j` with `π ∈ S^k_n`, found by a direct monotonicity scan.
pub fn twin_classes(perm: &Permutation, j: usize) -> Result<Vec<usize>> {
    if !perm.in_class(j) {
        return Err(Error::NotInClass { perm: perm.image.clone(), j });
    }
    Ok((0..=perm.len()).filter(|&k| k != j && perm.in_class(k)).collect())
}

/// `β_j = C(j, 2)`.
pub fn beta(j: usize) -> usize {
    j * j.saturating_sub(1) / 2
}

/// `α_j = (−1)^j q^{β_j}`, evaluated with the given `q`.
pub fn alpha_coefficient<S: Scalar>(j: usize, q: &S) -> S {
    alpha_with_exponent(j, beta(j), q)
}

/// `(−1)^j q^{exponent}`; used to probe perturbed coefficient choices.
pub fn alpha_with_exponent<S: Scalar>(j: usize, exponent: usize, q: &S) -> S {
    let mut value = S::one();
    for _ in 0..exponent {
        value = value.mul_ref(q);
    }
    if j % 2 == 1 {
        value.neg_ref()
    } else {
        value
    }
}

/// Binomial coefficient, small arguments only.
pub fn binomial(n: usize, k: usize) -> usize {
    if k > n {
        return 0;
    }
    (0..k).fold(1, |acc, i| acc * (n - i) / (i + 1))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qtensor::QPoly;
    use proptest::prelude::*;

    fn perm(v: &[usize]) -> Permutation {
        Permutation::new(v.to_vec()).unwrap()
    }

    fn subset(v: &[usize], n: usize) -> Subset {
        Subset::new(v.to_vec(), n).unwrap()
    }

    /// Independent pair count used as oracle.
    fn brute_inversions(image: &[usize]) -> usize {
        (0..image.len())
            .flat_map(|i| (0..image.len()).map(move |j| (i, j)))
            .filter(|&(i, j)| i < j && image[i] > image[j])
            .count()
    }

    #[test]
    fn inversion_examples() {
        assert_eq!(inversions(&Permutation::identity(3)), 0);
        assert_eq!(inversions(&perm(&[2, 1])), 1);
        assert_eq!(inversions(&perm(&[3, 1, 2])), 2);
        assert_eq!(inversions(&Permutation::reversal(6)), 15);
    }

    #[test]
    fn rejects_invalid_inputs() {
        assert!(Permutation::new(vec![1, 1]).is_err());
        assert!(Permutation::new(vec![0, 1]).is_err());
        assert!(Subset::new(vec![2, 1], 3).is_err());
        assert!(Subset::new(vec![4], 3).is_err());
    }

    #[test]
    fn subset_statistics() {
        assert_eq!(subset_inversion_stat(&subset(&[], 4)), 0);
        assert_eq!(subset_inversion_stat(&subset(&[2, 4], 4)), 3);
        assert_eq!(subset_inversion_stat(&subset(&[1, 2, 3], 5)), 0);
        assert_eq!(subset_to_permutation(&subset(&[1, 2], 3)), Permutation::identity(3));
        assert_eq!(subset_to_permutation(&subset(&[2, 4], 4)), perm(&[2, 4, 1, 3]));
        assert_eq!(subset_to_permutation(&subset(&[3], 3)), perm(&[3, 1, 2]));
        assert_eq!(brute_inversions(&[2, 4, 1, 3]), 3);
    }

    #[test]
    fn subset_stat_matches_permutation_inversions() {
        for n in 0..=8 {
            for k in 0..=n {
                for a in Subset::all_of_size(n, k) {
                    let p = subset_to_permutation(&a);
                    assert_eq!(subset_inversion_stat(&a), brute_inversions(p.image()));
                }
            }
        }
    }

    #[test]
    fn sjn_examples_and_counts() {
        assert_eq!(enumerate_sjn(2, 0).unwrap(), vec![Permutation::identity(2)]);
        let s12 = enumerate_sjn(2, 1).unwrap();
        assert_eq!(s12.len(), 2);
        assert!(s12.contains(&Permutation::identity(2)));
        assert!(s12.contains(&perm(&[2, 1])));
        assert_eq!(enumerate_sjn(3, 3).unwrap(), vec![Permutation::reversal(3)]);
        for n in 0..=8 {
            for j in 0..=n {
                assert_eq!(enumerate_sjn(n, j).unwrap().len(), binomial(n, j));
            }
        }
        assert!(enumerate_sjn(13, 1).is_err());
    }

    #[test]
    fn sjn_matches_filtered_enumeration() {
        for n in 0..=6 {
            for j in 0..=n {
                let mut filtered: Vec<_> = Permutation::all(n).filter(|p| p.in_class(j)).collect();
                let mut built = enumerate_sjn(n, j).unwrap();
                filtered.sort();
                built.sort();
                assert_eq!(filtered, built, "n={n} j={j}");
            }
        }
    }

    #[test]
    fn twin_examples() {
        assert_eq!(twin_classes(&Permutation::identity(2), 1).unwrap(), vec![0]);
        assert_eq!(twin_classes(&perm(&[2, 1]), 1).unwrap(), vec![2]);
        for n in 1..=5 {
            assert_eq!(twin_classes(&Permutation::identity(n), 0).unwrap(), vec![1]);
        }
        assert!(twin_classes(&perm(&[2, 1]), 0).is_err());
    }

    #[test]
    fn alpha_examples() {
        let q = QPoly::q();
        assert_eq!(alpha_coefficient(0, &q), QPoly::one());
        assert_eq!(alpha_coefficient(1, &q), QPoly::from_i64(-1));
        assert_eq!(alpha_coefficient(3, &q), QPoly::monomial(-1, 3));
        assert_eq!(alpha_coefficient(2, &q), QPoly::q());
    }

    #[test]
    fn beta_recurrences() {
        for j in 1..=12 {
            assert_eq!(beta(j), beta(j - 1) + (j - 1));
            assert_eq!(beta(j + 1), beta(j) + j);
        }
        assert_eq!(beta(0), 0);
    }

    proptest! {
        #[test]
        fn inversions_agree_with_pair_count(image in Just((1..=7usize).collect::<Vec<_>>()).prop_shuffle()) {
            let p = Permutation::new(image.clone()).unwrap();
            prop_assert_eq!(p.inversions(), brute_inversions(&image));
        }

        #[test]
        fn twin_is_adjacent_and_unique(image in Just((1..=7usize).collect::<Vec<_>>()).prop_shuffle(), j in 0usize..=7) {
            let p = Permutation::new(image).unwrap();
            if p.in_class(j) {
                let twins = twin_classes(&p, j).unwrap();
                prop_assert_eq!(twins.len(), 1);
                let expected = if j >= 1 && p.at(j) == 1 { j - 1 } else { j + 1 };
                prop_assert_eq!(twins[0], expected);
            }
        }
    }
}
