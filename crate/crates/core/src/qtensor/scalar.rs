//! Scalar backends.
//!
//! Two backends implement [`Scalar`]: [`QPoly`], a polynomial in a formal
//! variable `q` with Gaussian-rational coefficients, and [`Complex64`] for
//! floating-point work at a fixed numeric `q`. Every identity checked by this
//! crate is polynomial in `q`, so a vanishing [`QPoly`] residual certifies the
//! identity for all `q` at once.

use std::fmt;

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

/// Ring operations shared by the exact and the floating-point backend.
///
/// Methods take references so that big-number backends avoid needless clones.
pub trait Scalar: Clone + fmt::Debug + PartialEq + Send + Sync + 'static {
    fn zero() -> Self;
    fn one() -> Self;
    fn from_i64(v: i64) -> Self;
    /// Embed a Gaussian rational.
    fn from_gauss(c: &GaussRat) -> Self;
    fn is_zero(&self) -> bool;
    fn add_ref(&self, other: &Self) -> Self;
    fn sub_ref(&self, other: &Self) -> Self;
    fn mul_ref(&self, other: &Self) -> Self;
    fn neg_ref(&self) -> Self;
    /// Complex conjugation. `q` is real, so exact polynomials conjugate
    /// coefficientwise.
    fn conj(&self) -> Self;
    /// True when the value is real for every real `q`.
    fn is_real(&self) -> bool;
    /// Size used in residual reports: largest coefficient modulus for exact
    /// polynomials, modulus for floats.
    fn magnitude(&self) -> f64;
    /// Numeric value, if the scalar does not depend on `q`.
    fn approx(&self) -> Option<Complex64>;
    /// Whether arithmetic in this backend is exact.
    fn is_exact() -> bool;

    fn add_assign_ref(&mut self, other: &Self) {
        *self = self.add_ref(other);
    }

    fn mul_add_assign(&mut self, a: &Self, b: &Self) {
        if !a.is_zero() && !b.is_zero() {
            let p = a.mul_ref(b);
            self.add_assign_ref(&p);
        }
    }

    fn scale_i64(&self, k: i64) -> Self {
        self.mul_ref(&Self::from_i64(k))
    }
}

impl Scalar for Complex64 {
    fn zero() -> Self {
        Complex64::new(0.0, 0.0)
    }
    fn one() -> Self {
        Complex64::new(1.0, 0.0)
    }
    fn from_i64(v: i64) -> Self {
        Complex64::new(v as f64, 0.0)
    }
    fn from_gauss(c: &GaussRat) -> Self {
        c.to_c64()
    }
    fn is_zero(&self) -> bool {
        self.re == 0.0 && self.im == 0.0
    }
    fn add_ref(&self, other: &Self) -> Self {
        self + other
    }
    fn sub_ref(&self, other: &Self) -> Self {
        self - other
    }
    fn mul_ref(&self, other: &Self) -> Self {
        self * other
    }
    fn neg_ref(&self) -> Self {
        -self
    }
    fn conj(&self) -> Self {
        Complex64::conj(self)
    }
    fn is_real(&self) -> bool {
        self.im == 0.0
    }
    fn magnitude(&self) -> f64 {
        self.norm()
    }
    fn approx(&self) -> Option<Complex64> {
        Some(*self)
    }
    fn is_exact() -> bool {
        false
    }
    fn add_assign_ref(&mut self, other: &Self) {
        *self += other;
    }
    fn mul_add_assign(&mut self, a: &Self, b: &Self) {
        *self += a * b;
    }
}

/// A Gaussian rational `re + i·im`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct GaussRat {
    pub re: BigRational,
    pub im: BigRational,
}

impl GaussRat {
    pub fn new(re: BigRational, im: BigRational) -> Self {
        GaussRat { re, im }
    }

    pub fn real(re: BigRational) -> Self {
        GaussRat { re, im: BigRational::zero() }
    }

    pub fn from_int(v: i64) -> Self {
        Self::real(BigRational::from_integer(BigInt::from(v)))
    }

    pub fn zero() -> Self {
        Self::real(BigRational::zero())
    }

    pub fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }

    fn add(&self, o: &Self) -> Self {
        let im = match (self.im.is_zero(), o.im.is_zero()) {
            (true, true) => BigRational::zero(),
            (true, false) => o.im.clone(),
            (false, true) => self.im.clone(),
            (false, false) => &self.im + &o.im,
        };
        GaussRat { re: &self.re + &o.re, im }
    }

    fn neg(&self) -> Self {
        GaussRat { re: -&self.re, im: -&self.im }
    }

    fn mul(&self, o: &Self) -> Self {
        if self.im.is_zero() && o.im.is_zero() {
            return Self::real(&self.re * &o.re);
        }
        GaussRat {
            re: &self.re * &o.re - &self.im * &o.im,
            im: &self.re * &o.im + &self.im * &o.re,
        }
    }

    fn conj(&self) -> Self {
        GaussRat { re: self.re.clone(), im: -&self.im }
    }

    /// Modulus, in floating point.
    pub fn abs_f64(&self) -> f64 {
        let re = self.re.to_f64().unwrap_or(f64::INFINITY);
        let im = self.im.to_f64().unwrap_or(f64::INFINITY);
        re.hypot(im)
    }

    pub fn to_c64(&self) -> Complex64 {
        Complex64::new(
            self.re.to_f64().unwrap_or(f64::NAN),
            self.im.to_f64().unwrap_or(f64::NAN),
        )
    }
}

impl fmt::Display for GaussRat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (self.re.is_zero(), self.im.is_zero()) {
            (_, true) => write!(f, "{}", self.re),
            (true, false) => write!(f, "{}i", self.im),
            (false, false) => {
                let sign = if self.im.is_negative() { '-' } else { '+' };
                write!(f, "({}{}{}i)", self.re, sign, self.im.abs())
            }
        }
    }
}

/// Polynomial in the formal deformation parameter `q`, dense in the degree,
/// with Gaussian-rational coefficients. The coefficient vector never carries
/// trailing zeros, so the zero polynomial is the empty vector.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct QPoly {
    coeffs: Vec<GaussRat>,
}

impl QPoly {
    /// The formal variable `q`.
    pub fn q() -> Self {
        QPoly { coeffs: vec![GaussRat::zero(), GaussRat::from_int(1)] }
    }

    pub fn constant(c: GaussRat) -> Self {
        let mut p = QPoly { coeffs: vec![c] };
        p.trim();
        p
    }

    pub fn rational(r: BigRational) -> Self {
        Self::constant(GaussRat::real(r))
    }

    /// `Σ_k coeffs[k] q^k` with integer coefficients.
    pub fn from_int_coeffs(coeffs: &[i64]) -> Self {
        let mut p = QPoly { coeffs: coeffs.iter().map(|&c| GaussRat::from_int(c)).collect() };
        p.trim();
        p
    }

    /// `sign · q^power`.
    pub fn monomial(sign: i64, power: usize) -> Self {
        let mut coeffs = vec![GaussRat::zero(); power + 1];
        coeffs[power] = GaussRat::from_int(sign);
        let mut p = QPoly { coeffs };
        p.trim();
        p
    }

    pub fn coeffs(&self) -> &[GaussRat] {
        &self.coeffs
    }

    /// Degree, or `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    fn trim(&mut self) {
        while self.coeffs.last().is_some_and(GaussRat::is_zero) {
            self.coeffs.pop();
        }
    }

    /// Exact evaluation at a rational point.
    pub fn eval_rational(&self, q: &BigRational) -> GaussRat {
        let qq = GaussRat::real(q.clone());
        let mut acc = GaussRat::zero();
        for c in self.coeffs.iter().rev() {
            acc = acc.mul(&qq).add(c);
        }
        acc
    }

    /// Floating-point evaluation.
    pub fn eval_f64(&self, q: f64) -> Complex64 {
        let mut acc = Complex64::new(0.0, 0.0);
        for c in self.coeffs.iter().rev() {
            acc = acc * q + c.to_c64();
        }
        acc
    }
}

impl Scalar for QPoly {
    fn zero() -> Self {
        QPoly { coeffs: Vec::new() }
    }

    fn one() -> Self {
        QPoly { coeffs: vec![GaussRat::from_int(1)] }
    }

    fn from_i64(v: i64) -> Self {
        Self::constant(GaussRat::from_int(v))
    }

    fn from_gauss(c: &GaussRat) -> Self {
        Self::constant(c.clone())
    }

    fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    fn add_ref(&self, other: &Self) -> Self {
        let mut out = self.clone();
        out.add_assign_ref(other);
        out
    }

    fn add_assign_ref(&mut self, other: &Self) {
        if other.coeffs.len() > self.coeffs.len() {
            self.coeffs.resize(other.coeffs.len(), GaussRat::zero());
        }
        for (a, b) in self.coeffs.iter_mut().zip(&other.coeffs) {
            if !b.is_zero() {
                *a = a.add(b);
            }
        }
        self.trim();
    }

    fn sub_ref(&self, other: &Self) -> Self {
        self.add_ref(&other.neg_ref())
    }

    fn mul_ref(&self, other: &Self) -> Self {
        if self.is_zero() || other.is_zero() {
            return Self::zero();
        }
        let mut coeffs = vec![GaussRat::zero(); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.coeffs.iter().enumerate() {
                if !b.is_zero() {
                    coeffs[i + j] = coeffs[i + j].add(&a.mul(b));
                }
            }
        }
        let mut p = QPoly { coeffs };
        p.trim();
        p
    }

    fn neg_ref(&self) -> Self {
        QPoly { coeffs: self.coeffs.iter().map(GaussRat::neg).collect() }
    }

    fn conj(&self) -> Self {
        QPoly { coeffs: self.coeffs.iter().map(GaussRat::conj).collect() }
    }

    fn is_real(&self) -> bool {
        self.coeffs.iter().all(|c| c.im.is_zero())
    }

    fn magnitude(&self) -> f64 {
        self.coeffs.iter().map(GaussRat::abs_f64).fold(0.0, f64::max)
    }

    fn approx(&self) -> Option<Complex64> {
        match self.coeffs.len() {
            0 => Some(Complex64::new(0.0, 0.0)),
            1 => Some(self.coeffs[0].to_c64()),
            _ => None,
        }
    }

    fn is_exact() -> bool {
        true
    }

    fn scale_i64(&self, k: i64) -> Self {
        if k == 0 {
            return Self::zero();
        }
        let f = GaussRat::from_int(k);
        QPoly { coeffs: self.coeffs.iter().map(|c| c.mul(&f)).collect() }
    }
}

impl fmt::Display for QPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.coeffs.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for (k, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let (neg, body) = if c.im.is_zero() {
                (c.re.is_negative(), GaussRat::real(c.re.abs()))
            } else {
                (false, c.clone())
            };
            if first {
                if neg {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {} ", if neg { '-' } else { '+' })?;
            }
            first = false;
            let unit = body.im.is_zero() && body.re.is_one();
            match (k, unit) {
                (0, _) => write!(f, "{body}")?,
                (1, true) => write!(f, "q")?,
                (1, false) => write!(f, "{body}q")?,
                (_, true) => write!(f, "q^{k}")?,
                (_, false) => write!(f, "{body}q^{k}")?,
            }
        }
        Ok(())
    }
}

/// Parse `"p/r"` or `"p"` into an exact rational.
pub fn parse_rational(s: &str) -> Option<BigRational> {
    let s = s.trim();
    match s.split_once('/') {
        Some((p, r)) => {
            let p: BigInt = p.trim().parse().ok()?;
            let r: BigInt = r.trim().parse().ok()?;
            if r.is_zero() {
                return None;
            }
            Some(BigRational::new(p, r))
        }
        None => s.parse::<BigInt>().ok().map(BigRational::from_integer),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rat(p: i64, r: i64) -> BigRational {
        BigRational::new(p.into(), r.into())
    }

    #[test]
    fn polynomial_ring_basics() {
        let q = QPoly::q();
        let one_plus_q = QPoly::one().add_ref(&q);
        let one_minus_q = QPoly::one().sub_ref(&q);
        let prod = one_plus_q.mul_ref(&one_minus_q);
        assert_eq!(prod, QPoly::from_int_coeffs(&[1, 0, -1]));
        assert!(prod.sub_ref(&prod).is_zero());
        assert_eq!(prod.degree(), Some(2));
        assert_eq!(QPoly::zero().degree(), None);
    }

    #[test]
    fn evaluation_commutes_with_ring_ops() {
        let a = QPoly::from_int_coeffs(&[3, -1, 2]);
        let b = QPoly::from_int_coeffs(&[0, 5, 0, 1]);
        let x = rat(1, 2);
        let lhs = a.mul_ref(&b).add_ref(&a).eval_rational(&x);
        let ea = a.eval_rational(&x);
        let eb = b.eval_rational(&x);
        assert_eq!(lhs, ea.mul(&eb).add(&ea));
        let fl = a.mul_ref(&b).add_ref(&a).eval_f64(0.5);
        assert!((fl - lhs.to_c64()).norm() < 1e-14);
    }

    #[test]
    fn conjugation_and_reality() {
        let z = QPoly::constant(GaussRat::new(rat(1, 3), rat(-2, 1)));
        assert!(!z.is_real());
        assert!(z.mul_ref(&z.conj()).is_real());
        assert!(QPoly::q().is_real());
    }

    #[test]
    fn display() {
        assert_eq!(QPoly::zero().to_string(), "0");
        assert_eq!(QPoly::monomial(-1, 3).to_string(), "-q^3");
        assert_eq!(QPoly::from_int_coeffs(&[1, 1]).to_string(), "1 + q");
        assert_eq!(QPoly::from_int_coeffs(&[0, 2, -1]).to_string(), "2q - q^2");
    }

    #[test]
    fn parse() {
        assert_eq!(parse_rational("1/2"), Some(rat(1, 2)));
        assert_eq!(parse_rational("-3"), Some(rat(-3, 1)));
        assert_eq!(parse_rational("1/0"), None);
        assert_eq!(parse_rational("0.5"), None);
    }
}
