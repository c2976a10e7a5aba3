//! The noncommutative operator algebra generated by `x^`, `p^` and a central
//! `hbar`, with `[x^, p^] = i hbar`, held in the canonical normal order
//! `p^a x^b`; the quantization map of an ordering scheme; the formal
//! adjoint; and the ladder-operator algebra `a`, `a+` with `[a, a+] = 1` in
//! anti-normal order `a^m (a+)^n`.
//!
//! Words are never stored: every operation maps canonical forms to canonical
//! forms through the two closed-form reordering identities
//!
//! `x^b p^c = sum_k k! C(b,k) C(c,k) (i hbar)^k p^{c-k} x^{b-k}`
//! `(a+)^n a^c = sum_k (-1)^k k! C(n,k) C(c,k) a^{c-k} (a+)^{n-k}`

use std::collections::BTreeMap;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_integer::binomial;
use num_rational::BigRational;
use thiserror::Error;

use crate::phase::{PhasePoly, Var};
use crate::scalar::GaussianRational;
use crate::series::{factorial, Ordering};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum OpAlgError {
    #[error("ordering series order {available} insufficient: need at least {needed}")]
    InsufficientOrder { needed: usize, available: usize },
}

/// Monomial key `hbar^k p^a x^b` (canonical order, `p^` letters left).
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub struct OpKey {
    pub p_pow: u32,
    pub x_pow: u32,
    pub hbar_pow: u32,
}

/// Operator polynomial in canonical normal order; no zero coefficients.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct OpPoly {
    terms: BTreeMap<OpKey, GaussianRational>,
}

/// Monomial key `hbar^k a^m (a+)^n` (anti-normal order, `a` letters left).
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub struct AAKey {
    pub a_pow: u32,
    pub adag_pow: u32,
    pub hbar_pow: u32,
}

/// Ladder-operator polynomial in canonical anti-normal order.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct AAPoly {
    terms: BTreeMap<AAKey, GaussianRational>,
}

impl OpPoly {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn one() -> Self {
        Self::monomial(0, 0, 0, GaussianRational::one())
    }

    pub fn x_hat() -> Self {
        Self::monomial(0, 1, 0, GaussianRational::one())
    }

    pub fn p_hat() -> Self {
        Self::monomial(1, 0, 0, GaussianRational::one())
    }

    pub fn var(v: Var) -> Self {
        match v {
            Var::X => Self::x_hat(),
            Var::P => Self::p_hat(),
        }
    }

    pub fn monomial(p_pow: u32, x_pow: u32, hbar_pow: u32, c: GaussianRational) -> Self {
        let mut out = Self::zero();
        out.add_term(
            OpKey {
                p_pow,
                x_pow,
                hbar_pow,
            },
            c,
        );
        out
    }

    pub(crate) fn add_term(&mut self, key: OpKey, c: GaussianRational) {
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

    pub fn terms(&self) -> impl Iterator<Item = (OpKey, &GaussianRational)> {
        self.terms.iter().map(|(k, c)| (*k, c))
    }

    pub fn coeff(&self, p_pow: u32, x_pow: u32, hbar_pow: u32) -> GaussianRational {
        self.terms
            .get(&OpKey {
                p_pow,
                x_pow,
                hbar_pow,
            })
            .cloned()
            .unwrap_or_else(GaussianRational::zero)
    }

    pub fn scale(&self, c: &GaussianRational) -> Self {
        let mut out = Self::zero();
        if c.is_zero() {
            return out;
        }
        for (k, v) in &self.terms {
            out.add_term(*k, v * c);
        }
        out
    }

    /// Multiply by `i*hbar`.
    pub fn mul_ihbar(&self) -> Self {
        let mut out = Self::zero();
        for (k, c) in &self.terms {
            out.add_term(
                OpKey {
                    hbar_pow: k.hbar_pow + 1,
                    ..*k
                },
                c.mul_i(),
            );
        }
        out
    }

    /// Max of `p_pow + x_pow` over all monomials (letter count).
    pub fn letter_degree(&self) -> u32 {
        self.terms
            .keys()
            .map(|k| k.p_pow + k.x_pow)
            .max()
            .unwrap_or(0)
    }

    /// Formal adjoint: conjugate coefficients (`hbar` real, the generators
    /// self-adjoint), reverse each word, renormalize. An involution.
    pub fn adjoint(&self) -> Self {
        let mut out = Self::zero();
        for (k, c) in &self.terms {
            // (p^a x^b)+ = x^b p^a, then back to canonical order.
            let reduced = normal_reduce_xp(k.x_pow, k.p_pow);
            let conj = c.conj();
            for (rk, rc) in &reduced.terms {
                out.add_term(
                    OpKey {
                        hbar_pow: rk.hbar_pow + k.hbar_pow,
                        ..*rk
                    },
                    &conj * rc,
                );
            }
        }
        out
    }
}

impl Add for &OpPoly {
    type Output = OpPoly;

    fn add(self, rhs: Self) -> OpPoly {
        let mut out = self.clone();
        for (k, c) in &rhs.terms {
            out.add_term(*k, c.clone());
        }
        out
    }
}

impl Sub for &OpPoly {
    type Output = OpPoly;

    fn sub(self, rhs: Self) -> OpPoly {
        self + &-rhs
    }
}

impl Neg for &OpPoly {
    type Output = OpPoly;

    fn neg(self) -> OpPoly {
        let mut out = OpPoly::zero();
        for (k, c) in &self.terms {
            out.add_term(*k, -c);
        }
        out
    }
}

impl Mul for &OpPoly {
    type Output = OpPoly;

    fn mul(self, rhs: Self) -> OpPoly {
        op_mul(self, rhs)
    }
}

/// Canonical form of the misordered word `x^b p^c`:
/// `sum_k k! C(b,k) C(c,k) (i hbar)^k p^{c-k} x^{b-k}`.
pub fn normal_reduce_xp(b: u32, c: u32) -> OpPoly {
    let mut out = OpPoly::zero();
    let i = GaussianRational::i();
    for k in 0..=b.min(c) {
        let count = factorial(k)
            * binomial(BigInt::from(b), BigInt::from(k))
            * binomial(BigInt::from(c), BigInt::from(k));
        let coeff = i.pow(k).scale(&BigRational::from_integer(count));
        out.add_term(
            OpKey {
                p_pow: c - k,
                x_pow: b - k,
                hbar_pow: k,
            },
            coeff,
        );
    }
    out
}

/// Product in the operator algebra, recollected into canonical order.
pub fn op_mul(a: &OpPoly, b: &OpPoly) -> OpPoly {
    let mut out = OpPoly::zero();
    for (ka, ca) in &a.terms {
        for (kb, cb) in &b.terms {
            // (p^a1 x^b1)(p^a2 x^b2) = p^a1 [x^b1 p^a2] x^b2
            let mid = normal_reduce_xp(ka.x_pow, kb.p_pow);
            let c = ca * cb;
            for (km, cm) in &mid.terms {
                out.add_term(
                    OpKey {
                        p_pow: ka.p_pow + km.p_pow,
                        x_pow: km.x_pow + kb.x_pow,
                        hbar_pow: ka.hbar_pow + kb.hbar_pow + km.hbar_pow,
                    },
                    &c * cm,
                );
            }
        }
    }
    out
}

/// `[a, b] = ab - ba`.
pub fn commutator(a: &OpPoly, b: &OpPoly) -> OpPoly {
    &op_mul(a, b) - &op_mul(b, a)
}

/// The quantization map of an ordering: linear extension of
/// `p^m x^n -> sum_{s=0..min(m,n)} g(m,n,s) hbar^s p^{m-s} x^{n-s}`,
/// with `hbar` factors passing through.
pub fn quantize(a: &PhasePoly, ordering: &Ordering) -> Result<OpPoly, OpAlgError> {
    let needed = a.max_mixed_degree() as usize;
    if ordering.order() < needed {
        return Err(OpAlgError::InsufficientOrder {
            needed,
            available: ordering.order(),
        });
    }
    let mut out = OpPoly::zero();
    for (key, c) in a.terms() {
        let (m, n) = (key.p_pow, key.x_pow);
        for s in 0..=m.min(n) {
            let g = ordering.g(m, n, s).expect("s <= min(m,n) <= order");
            out.add_term(
                OpKey {
                    p_pow: m - s,
                    x_pow: n - s,
                    hbar_pow: key.hbar_pow + s,
                },
                &g * c,
            );
        }
    }
    Ok(out)
}

/// The quantization-rule defect for one variable:
/// `i hbar W({v, A}) - [v^, W(A)]`. Identically zero for every admissible
/// ordering; returned as a polynomial so failures are diagnosable.
pub fn dirac_defect(a: &PhasePoly, ordering: &Ordering, var: Var) -> Result<OpPoly, OpAlgError> {
    let bracket = match var {
        // {x, A} = dA/dp, {p, A} = -dA/dx
        Var::X => a.partial_derivative(Var::P, 1),
        Var::P => -&a.partial_derivative(Var::X, 1),
    };
    let lhs = quantize(&bracket, ordering)?.mul_ihbar();
    let w = quantize(a, ordering)?;
    let rhs = commutator(&OpPoly::var(var), &w);
    Ok(&lhs - &rhs)
}

impl AAPoly {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn one() -> Self {
        Self::monomial(0, 0, 0, GaussianRational::one())
    }

    pub fn annihilator() -> Self {
        Self::monomial(1, 0, 0, GaussianRational::one())
    }

    pub fn creator() -> Self {
        Self::monomial(0, 1, 0, GaussianRational::one())
    }

    pub fn monomial(a_pow: u32, adag_pow: u32, hbar_pow: u32, c: GaussianRational) -> Self {
        let mut out = Self::zero();
        out.add_term(
            AAKey {
                a_pow,
                adag_pow,
                hbar_pow,
            },
            c,
        );
        out
    }

    pub(crate) fn add_term(&mut self, key: AAKey, c: GaussianRational) {
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

    pub fn terms(&self) -> impl Iterator<Item = (AAKey, &GaussianRational)> {
        self.terms.iter().map(|(k, c)| (*k, c))
    }

    pub fn scale(&self, c: &GaussianRational) -> Self {
        let mut out = Self::zero();
        if c.is_zero() {
            return out;
        }
        for (k, v) in &self.terms {
            out.add_term(*k, v * c);
        }
        out
    }
}

impl Add for &AAPoly {
    type Output = AAPoly;

    fn add(self, rhs: Self) -> AAPoly {
        let mut out = self.clone();
        for (k, c) in &rhs.terms {
            out.add_term(*k, c.clone());
        }
        out
    }
}

impl Sub for &AAPoly {
    type Output = AAPoly;

    fn sub(self, rhs: Self) -> AAPoly {
        self + &-rhs
    }
}

impl Neg for &AAPoly {
    type Output = AAPoly;

    fn neg(self) -> AAPoly {
        let mut out = AAPoly::zero();
        for (k, c) in &self.terms {
            out.add_term(*k, -c);
        }
        out
    }
}

impl Mul for &AAPoly {
    type Output = AAPoly;

    fn mul(self, rhs: Self) -> AAPoly {
        aa_mul(self, rhs)
    }
}

/// Canonical form of `(a+)^n a^c`:
/// `sum_k (-1)^k k! C(n,k) C(c,k) a^{c-k} (a+)^{n-k}`.
fn anti_normal_reduce(n: u32, c: u32) -> AAPoly {
    let mut out = AAPoly::zero();
    for k in 0..=n.min(c) {
        let count = factorial(k)
            * binomial(BigInt::from(n), BigInt::from(k))
            * binomial(BigInt::from(c), BigInt::from(k));
        let mut factor = BigRational::from_integer(count);
        if k % 2 == 1 {
            factor = -factor;
        }
        out.add_term(
            AAKey {
                a_pow: c - k,
                adag_pow: n - k,
                hbar_pow: 0,
            },
            GaussianRational::from_rational(factor),
        );
    }
    out
}

/// Product in the ladder algebra, recollected into anti-normal order.
pub fn aa_mul(a: &AAPoly, b: &AAPoly) -> AAPoly {
    let mut out = AAPoly::zero();
    for (ka, ca) in &a.terms {
        for (kb, cb) in &b.terms {
            // (a^m1 (a+)^n1)(a^m2 (a+)^n2) = a^m1 [(a+)^n1 a^m2] (a+)^n2
            let mid = anti_normal_reduce(ka.adag_pow, kb.a_pow);
            let c = ca * cb;
            for (km, cm) in &mid.terms {
                out.add_term(
                    AAKey {
                        a_pow: ka.a_pow + km.a_pow,
                        adag_pow: km.adag_pow + kb.adag_pow,
                        hbar_pow: ka.hbar_pow + kb.hbar_pow,
                    },
                    &c * cm,
                );
            }
        }
    }
    out
}

/// The algebra isomorphism sending `x^ -> a+` and `p^ -> -i hbar a`:
/// `hbar^k p^a x^b -> (-i)^a hbar^{k+a} a^a (a+)^b`. The image of a
/// canonical word is already anti-normal.
pub fn ladder_map(a: &OpPoly) -> AAPoly {
    let minus_i = -GaussianRational::i();
    let mut out = AAPoly::zero();
    for (k, c) in &a.terms {
        out.add_term(
            AAKey {
                a_pow: k.p_pow,
                adag_pow: k.x_pow,
                hbar_pow: k.hbar_pow + k.p_pow,
            },
            c * &minus_i.pow(k.p_pow),
        );
    }
    out
}
