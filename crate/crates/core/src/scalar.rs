//! Exact scalar arithmetic: the field Q(i) of Gaussian rationals, and the
//! radical ring of finite sums `c * sqrt(r) * hbar^k` with `c` in Q(i),
//! `r` a squarefree positive integer and `hbar` a formal symbol.
//!
//! All values are immutable and all operations are exact. Numeric evaluation
//! ([`RadicalScalar::eval_f64`]) exists only for rendering and spot checks;
//! it never feeds back into exact computations.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use thiserror::Error;

/// Errors from exact scalar arithmetic.
#[derive(Debug, Error, PartialEq, Eq)]
pub enum ScalarError {
    #[error("division by zero")]
    DivisionByZero,
}

/// An element of Q(i): `re + im*i` with reduced rational parts.
///
/// `BigRational` keeps numerator and denominator coprime with a positive
/// denominator, so structural equality is value equality.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct GaussianRational {
    re: BigRational,
    im: BigRational,
}

impl GaussianRational {
    pub fn new(re: BigRational, im: BigRational) -> Self {
        Self { re, im }
    }

    pub fn zero() -> Self {
        Self::default()
    }

    pub fn one() -> Self {
        Self::from_int(1)
    }

    /// The imaginary unit.
    pub fn i() -> Self {
        Self::new(BigRational::zero(), BigRational::one())
    }

    pub fn from_int(n: i64) -> Self {
        Self::new(
            BigRational::from_integer(BigInt::from(n)),
            BigRational::zero(),
        )
    }

    pub fn from_bigint(n: BigInt) -> Self {
        Self::new(BigRational::from_integer(n), BigRational::zero())
    }

    pub fn from_rational(r: BigRational) -> Self {
        Self::new(r, BigRational::zero())
    }

    /// `num/den` as a real value. Panics if `den == 0`.
    pub fn ratio(num: i64, den: i64) -> Self {
        assert!(den != 0, "zero denominator");
        Self::new(
            BigRational::new(BigInt::from(num), BigInt::from(den)),
            BigRational::zero(),
        )
    }

    /// `(re_num/re_den) + (im_num/im_den) i`. Panics on zero denominators.
    pub fn ratio_pair(re_num: i64, re_den: i64, im_num: i64, im_den: i64) -> Self {
        assert!(re_den != 0 && im_den != 0, "zero denominator");
        Self::new(
            BigRational::new(BigInt::from(re_num), BigInt::from(re_den)),
            BigRational::new(BigInt::from(im_num), BigInt::from(im_den)),
        )
    }

    pub fn re(&self) -> &BigRational {
        &self.re
    }

    pub fn im(&self) -> &BigRational {
        &self.im
    }

    pub fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.re.is_one() && self.im.is_zero()
    }

    pub fn is_real(&self) -> bool {
        self.im.is_zero()
    }

    /// Both real and imaginary parts nonzero.
    pub fn is_mixed(&self) -> bool {
        !self.re.is_zero() && !self.im.is_zero()
    }

    pub fn conj(&self) -> Self {
        Self::new(self.re.clone(), -self.im.clone())
    }

    /// Multiplication by the imaginary unit.
    pub fn mul_i(&self) -> Self {
        Self::new(-self.im.clone(), self.re.clone())
    }

    pub fn scale(&self, r: &BigRational) -> Self {
        Self::new(&self.re * r, &self.im * r)
    }

    /// Multiplicative inverse; `Err` on zero.
    pub fn inv(&self) -> Result<Self, ScalarError> {
        let norm = &self.re * &self.re + &self.im * &self.im;
        if norm.is_zero() {
            return Err(ScalarError::DivisionByZero);
        }
        Ok(Self::new(&self.re / &norm, -(&self.im / &norm)))
    }

    pub fn checked_div(&self, rhs: &Self) -> Result<Self, ScalarError> {
        Ok(self * &rhs.inv()?)
    }

    pub fn pow(&self, exp: u32) -> Self {
        let mut acc = Self::one();
        for _ in 0..exp {
            acc = &acc * self;
        }
        acc
    }

    /// True when the canonical sign of the value is negative: `re < 0`, or
    /// `re == 0` and `im < 0`. Drives the `+`/`-` joiners in renderings.
    pub fn leading_negative(&self) -> bool {
        self.re.is_negative() || (self.re.is_zero() && self.im.is_negative())
    }

    /// Approximate value as `(re, im)`.
    pub fn to_f64_pair(&self) -> (f64, f64) {
        (
            self.re.to_f64().unwrap_or(f64::NAN),
            self.im.to_f64().unwrap_or(f64::NAN),
        )
    }
}

impl Add for &GaussianRational {
    type Output = GaussianRational;

    fn add(self, rhs: Self) -> GaussianRational {
        GaussianRational::new(&self.re + &rhs.re, &self.im + &rhs.im)
    }
}

impl Sub for &GaussianRational {
    type Output = GaussianRational;

    fn sub(self, rhs: Self) -> GaussianRational {
        GaussianRational::new(&self.re - &rhs.re, &self.im - &rhs.im)
    }
}

impl Mul for &GaussianRational {
    type Output = GaussianRational;

    fn mul(self, rhs: Self) -> GaussianRational {
        GaussianRational::new(
            &self.re * &rhs.re - &self.im * &rhs.im,
            &self.re * &rhs.im + &self.im * &rhs.re,
        )
    }
}

impl Neg for &GaussianRational {
    type Output = GaussianRational;

    fn neg(self) -> GaussianRational {
        GaussianRational::new(-self.re.clone(), -self.im.clone())
    }
}

impl Neg for GaussianRational {
    type Output = GaussianRational;

    fn neg(self) -> GaussianRational {
        -&self
    }
}

/// Compact form used inside radical strings: `3/2`, `i`, `-2i`, `3/2+1/2i`.
impl fmt::Display for GaussianRational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fn imag(part: &BigRational) -> String {
            if part.is_one() {
                "i".to_owned()
            } else if (-part).is_one() {
                "-i".to_owned()
            } else {
                format!("{part}i")
            }
        }
        if self.is_zero() {
            write!(f, "0")
        } else if self.im.is_zero() {
            write!(f, "{}", self.re)
        } else if self.re.is_zero() {
            write!(f, "{}", imag(&self.im))
        } else if self.im.is_negative() {
            write!(f, "{}-{}", self.re, imag(&(-self.im.clone())))
        } else {
            write!(f, "{}+{}", self.re, imag(&self.im))
        }
    }
}

/// Split `n` as `(root, squarefree)` with `n = root^2 * squarefree`.
///
/// Trial division; radicands at desk scale stay well below `2^53`.
pub fn squarefree_split(n: u64) -> (u64, u64) {
    if n == 0 {
        return (0, 0);
    }
    let mut rest = n;
    let mut root = 1u64;
    let mut squarefree = 1u64;
    let mut p = 2u64;
    while p * p <= rest {
        if rest.is_multiple_of(p) {
            let mut e = 0u32;
            while rest.is_multiple_of(p) {
                rest /= p;
                e += 1;
            }
            for _ in 0..e / 2 {
                root *= p;
            }
            if e % 2 == 1 {
                squarefree *= p;
            }
        }
        p += 1;
    }
    (root, squarefree * rest)
}

/// Map key: hbar power first so iteration matches the canonical rendering
/// order (hbar_power, radicand).
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
struct RadKey {
    hbar_pow: u32,
    radicand: u64,
}

/// A finite sum `sum c * sqrt(r) * hbar^k` over Q(i).
///
/// Invariants: every stored radicand is squarefree and >= 1, and no zero
/// coefficient is stored, so map equality is value equality.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct RadicalScalar {
    terms: BTreeMap<RadKey, GaussianRational>,
}

impl RadicalScalar {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn one() -> Self {
        Self::from_gaussian(GaussianRational::one())
    }

    /// `c * sqrt(1) * hbar^0`.
    pub fn from_gaussian(c: GaussianRational) -> Self {
        Self::normalized(c, 1, 0)
    }

    /// `c * hbar^k`.
    pub fn gaussian_hbar(c: GaussianRational, hbar_pow: u32) -> Self {
        Self::normalized(c, 1, hbar_pow)
    }

    /// Normal form of `c * sqrt(radicand) * hbar^k`: the square part of the
    /// radicand is extracted into the coefficient. A zero radicand or a zero
    /// coefficient yields the zero scalar.
    pub fn normalized(c: GaussianRational, radicand: u64, hbar_pow: u32) -> Self {
        let mut out = Self::zero();
        if c.is_zero() || radicand == 0 {
            return out;
        }
        let (root, squarefree) = squarefree_split(radicand);
        let coeff = &c * &GaussianRational::from_bigint(BigInt::from(root));
        out.insert_term(
            RadKey {
                hbar_pow,
                radicand: squarefree,
            },
            coeff,
        );
        out
    }

    fn insert_term(&mut self, key: RadKey, c: GaussianRational) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(key) {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                let sum = o.get() + &c;
                if sum.is_zero() {
                    o.remove();
                } else {
                    *o.get_mut() = sum;
                }
            }
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    /// Iterate `(radicand, hbar_power, coefficient)` in canonical order.
    pub fn terms(&self) -> impl Iterator<Item = (u64, u32, &GaussianRational)> {
        self.terms.iter().map(|(k, c)| (k.radicand, k.hbar_pow, c))
    }

    pub fn conj(&self) -> Self {
        let mut out = Self::zero();
        for (k, c) in &self.terms {
            out.insert_term(*k, c.conj());
        }
        out
    }

    pub fn scale_gaussian(&self, c: &GaussianRational) -> Self {
        let mut out = Self::zero();
        if c.is_zero() {
            return out;
        }
        for (k, v) in &self.terms {
            out.insert_term(*k, v * c);
        }
        out
    }

    /// Multiply by `hbar^k` (shift every stored power).
    pub fn mul_hbar(&self, k: u32) -> Self {
        let mut out = Self::zero();
        for (key, c) in &self.terms {
            out.insert_term(
                RadKey {
                    hbar_pow: key.hbar_pow + k,
                    radicand: key.radicand,
                },
                c.clone(),
            );
        }
        out
    }

    /// Evaluate with `sqrt` as a floating square root and `hbar` numeric.
    pub fn eval_f64(&self, hbar: f64) -> (f64, f64) {
        let mut re = 0.0;
        let mut im = 0.0;
        for (key, c) in &self.terms {
            let (cr, ci) = c.to_f64_pair();
            let w = (key.radicand as f64).sqrt() * hbar.powi(key.hbar_pow as i32);
            re += cr * w;
            im += ci * w;
        }
        (re, im)
    }
}

impl Add for &RadicalScalar {
    type Output = RadicalScalar;

    fn add(self, rhs: Self) -> RadicalScalar {
        let mut out = self.clone();
        for (k, c) in &rhs.terms {
            out.insert_term(*k, c.clone());
        }
        out
    }
}

impl Sub for &RadicalScalar {
    type Output = RadicalScalar;

    fn sub(self, rhs: Self) -> RadicalScalar {
        self + &-rhs
    }
}

impl Neg for &RadicalScalar {
    type Output = RadicalScalar;

    fn neg(self) -> RadicalScalar {
        let mut out = RadicalScalar::zero();
        for (k, c) in &self.terms {
            out.insert_term(*k, -c);
        }
        out
    }
}

impl Mul for &RadicalScalar {
    type Output = RadicalScalar;

    fn mul(self, rhs: Self) -> RadicalScalar {
        let mut out = RadicalScalar::zero();
        for (ka, ca) in &self.terms {
            for (kb, cb) in &rhs.terms {
                // sqrt(r1)*sqrt(r2) = g*sqrt((r1/g)*(r2/g)) with g = gcd;
                // the cofactors are coprime and squarefree, so the product
                // radicand is already squarefree.
                let g = num_integer::gcd(ka.radicand, kb.radicand);
                let rad = (ka.radicand / g)
                    .checked_mul(kb.radicand / g)
                    .expect("radicand overflow");
                let coeff = &(ca * cb) * &GaussianRational::from_bigint(BigInt::from(g));
                out.insert_term(
                    RadKey {
                        hbar_pow: ka.hbar_pow + kb.hbar_pow,
                        radicand: rad,
                    },
                    coeff,
                );
            }
        }
        out
    }
}

/// Canonical rendering: terms sorted by (hbar_power, radicand), e.g.
/// `(3/2+1/2i)*sqrt(6)*hbar^2`.
impl fmt::Display for RadicalScalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let mut out = String::new();
        for (idx, (key, c)) in self.terms.iter().enumerate() {
            let neg = c.leading_negative();
            let mag = if neg { -c } else { c.clone() };
            if idx == 0 {
                if neg {
                    out.push('-');
                }
            } else {
                out.push_str(if neg { " - " } else { " + " });
            }
            out.push_str(&radical_term_string(&mag, key.radicand, key.hbar_pow));
        }
        write!(f, "{out}")
    }
}

fn radical_term_string(c: &GaussianRational, radicand: u64, hbar_pow: u32) -> String {
    let mut factors: Vec<String> = Vec::new();
    let has_tail = radicand > 1 || hbar_pow > 0;
    if !(c.is_one() && has_tail) {
        let s = c.to_string();
        let parens = c.is_mixed() || (has_tail && s.contains('/'));
        factors.push(if parens { format!("({s})") } else { s });
    }
    if radicand > 1 {
        factors.push(format!("sqrt({radicand})"));
    }
    match hbar_pow {
        0 => {}
        1 => factors.push("hbar".to_owned()),
        k => factors.push(format!("hbar^{k}")),
    }
    if factors.is_empty() {
        "1".to_owned()
    } else {
        factors.join("*")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn g(re_num: i64, re_den: i64, im_num: i64, im_den: i64) -> GaussianRational {
        GaussianRational::ratio_pair(re_num, re_den, im_num, im_den)
    }

    #[test]
    fn addition_cancels_imaginary_parts() {
        let a = g(1, 2, 1, 1);
        let b = g(1, 2, -1, 1);
        assert_eq!(&a + &b, GaussianRational::one());
    }

    #[test]
    fn i_squared_is_minus_one() {
        let i = GaussianRational::i();
        assert_eq!(&i * &i, GaussianRational::from_int(-1));
    }

    #[test]
    fn division_by_conjugate() {
        // (1+i)/(1-i) = i, checked by back-multiplication.
        let a = g(1, 1, 1, 1);
        let b = g(1, 1, -1, 1);
        let q = a.checked_div(&b).unwrap();
        assert_eq!(q, GaussianRational::i());
        assert_eq!(&q * &b, a);
    }

    #[test]
    fn division_by_zero_reported() {
        let a = GaussianRational::one();
        assert_eq!(
            a.checked_div(&GaussianRational::zero()),
            Err(ScalarError::DivisionByZero)
        );
    }

    #[test]
    fn squarefree_extraction() {
        assert_eq!(squarefree_split(8), (2, 2));
        assert_eq!(squarefree_split(1), (1, 1));
        assert_eq!(squarefree_split(12), (2, 3));
        assert_eq!(squarefree_split(360), (6, 10));
        assert_eq!(squarefree_split(0), (0, 0));
    }

    #[test]
    fn normalization_examples() {
        let two_sqrt2 = RadicalScalar::normalized(GaussianRational::one(), 8, 0);
        assert_eq!(two_sqrt2.to_string(), "2*sqrt(2)");

        let unit = RadicalScalar::normalized(GaussianRational::one(), 1, 0);
        assert_eq!(unit, RadicalScalar::one());
        assert_eq!(unit.to_string(), "1");

        let h2 = RadicalScalar::normalized(GaussianRational::one(), 12, 2);
        assert_eq!(h2.to_string(), "2*sqrt(3)*hbar^2");
    }

    #[test]
    fn radical_products() {
        let s2 = RadicalScalar::normalized(GaussianRational::one(), 2, 0);
        let s3 = RadicalScalar::normalized(GaussianRational::one(), 3, 0);
        assert_eq!(
            &s2 * &s3,
            RadicalScalar::normalized(GaussianRational::one(), 6, 0)
        );
        assert_eq!(
            &s2 * &s2,
            RadicalScalar::from_gaussian(GaussianRational::from_int(2))
        );
    }

    #[test]
    fn like_term_cancellation() {
        let s2 = RadicalScalar::normalized(GaussianRational::one(), 2, 0);
        let s3 = RadicalScalar::normalized(GaussianRational::one(), 3, 0);
        let sum = &(&s2 + &s3) + &-&s2;
        assert_eq!(sum, s3);
    }

    #[test]
    fn canonical_radical_rendering() {
        let v = RadicalScalar::normalized(g(3, 2, 1, 2), 6, 2);
        assert_eq!(v.to_string(), "(3/2+1/2i)*sqrt(6)*hbar^2");

        let minus_i_hbar = RadicalScalar::gaussian_hbar(-GaussianRational::i(), 1);
        assert_eq!(minus_i_hbar.to_string(), "-i*hbar");

        let mixed = &RadicalScalar::normalized(GaussianRational::one(), 3, 1)
            + &RadicalScalar::normalized(GaussianRational::from_int(-2), 2, 0);
        assert_eq!(mixed.to_string(), "-2*sqrt(2) + sqrt(3)*hbar");

        assert_eq!(RadicalScalar::zero().to_string(), "0");
    }

    #[test]
    fn numeric_evaluation_matches_exact_products() {
        let a = &RadicalScalar::normalized(g(1, 3, -2, 1), 10, 1)
            + &RadicalScalar::normalized(GaussianRational::from_int(4), 7, 0);
        let b = &RadicalScalar::normalized(g(0, 1, 5, 2), 14, 2)
            + &RadicalScalar::normalized(GaussianRational::from_int(-1), 10, 1);
        let exact = (&a * &b).eval_f64(1.0);
        let (ar, ai) = a.eval_f64(1.0);
        let (br, bi) = b.eval_f64(1.0);
        let approx = (ar * br - ai * bi, ar * bi + ai * br);
        assert!((exact.0 - approx.0).abs() <= 1e-12 * approx.0.abs().max(1.0));
        assert!((exact.1 - approx.1).abs() <= 1e-12 * approx.1.abs().max(1.0));
    }
}
