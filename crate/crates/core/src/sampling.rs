//! Seeded random inputs for identity checks and norm experiments.

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::qtensor::{pow, GaussRat, QPoly, Scalar, Tensor};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Independent generator for task `task` of a run seeded with `seed`.
pub fn split_rng(seed: u64, task: u64) -> ChaCha8Rng {
    let mut r = ChaCha8Rng::seed_from_u64(seed);
    r.set_stream(task);
    r
}

pub fn random_rational(rng: &mut impl Rng) -> BigRational {
    let p: i64 = rng.random_range(-6..=6);
    let r: i64 = rng.random_range(1..=5);
    BigRational::new(BigInt::from(p), BigInt::from(r))
}

/// A rational strictly inside `(-1, 1)`.
pub fn random_q(rng: &mut impl Rng) -> BigRational {
    let r: i64 = rng.random_range(2..=11);
    let p: i64 = rng.random_range(-(r - 1)..=(r - 1));
    BigRational::new(BigInt::from(p), BigInt::from(r))
}

/// Dense tensor with small Gaussian-rational entries, in any backend.
pub fn random_gauss_tensor<S: Scalar>(rng: &mut impl Rng, legs: usize, dim: usize, complex: bool) -> Tensor<S> {
    let data = (0..pow(dim, legs))
        .map(|_| {
            let re = random_rational(rng);
            let im = if complex { random_rational(rng) } else { BigRational::from_integer(0.into()) };
            S::from_gauss(&GaussRat::new(re, im))
        })
        .collect();
    Tensor::from_vec(legs, dim, data).expect("shape is consistent")
}

/// [`random_gauss_tensor`] in the exact backend.
pub fn random_rational_tensor(rng: &mut impl Rng, legs: usize, dim: usize, complex: bool) -> Tensor<QPoly> {
    random_gauss_tensor(rng, legs, dim, complex)
}

/// Dense tensor with standard normal real and imaginary parts.
pub fn random_float_tensor(rng: &mut impl Rng, legs: usize, dim: usize, complex: bool) -> Tensor<Complex64> {
    let data = (0..pow(dim, legs))
        .map(|_| {
            let re: f64 = rng.sample(StandardNormal);
            let im: f64 = if complex { rng.sample(StandardNormal) } else { 0.0 };
            Complex64::new(re, im)
        })
        .collect();
    Tensor::from_vec(legs, dim, data).expect("shape is consistent")
}
