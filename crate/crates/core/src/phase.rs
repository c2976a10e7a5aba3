//! The commutative polynomial algebra in `(x, p, hbar)` together with its
//! deformation structure: Poisson bracket, Moyal product, the alpha
//! transform of an ordering, and the generalized star product.
//!
//! Monomial keys are `(p_power, x_power, hbar_power)`; keeping `p` first
//! matches the canonical operator order used throughout.

use std::collections::BTreeMap;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_integer::binomial;
use num_rational::BigRational;
use num_traits::One;
use thiserror::Error;

use crate::scalar::GaussianRational;
use crate::series::{factorial, FormalSeries, Ordering};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum PhaseError {
    #[error("ordering series order {available} insufficient: need at least {needed}")]
    InsufficientOrder { needed: usize, available: usize },
    #[error("polynomial has hbar-free terms; cannot divide by i*hbar")]
    NotDivisibleByHbar,
}

/// A phase-space variable.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Var {
    X,
    P,
}

impl Var {
    pub fn name(self) -> &'static str {
        match self {
            Var::X => "x",
            Var::P => "p",
        }
    }
}

/// Monomial key `p^a x^b hbar^k`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub struct PhaseKey {
    pub p_pow: u32,
    pub x_pow: u32,
    pub hbar_pow: u32,
}

/// Sparse commutative polynomial over Q(i); no zero coefficients stored.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct PhasePoly {
    terms: BTreeMap<PhaseKey, GaussianRational>,
}

impl PhasePoly {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn one() -> Self {
        Self::constant(GaussianRational::one())
    }

    pub fn constant(c: GaussianRational) -> Self {
        Self::monomial(0, 0, 0, c)
    }

    pub fn var(v: Var) -> Self {
        match v {
            Var::X => Self::x(),
            Var::P => Self::p(),
        }
    }

    pub fn x() -> Self {
        Self::monomial(0, 1, 0, GaussianRational::one())
    }

    pub fn p() -> Self {
        Self::monomial(1, 0, 0, GaussianRational::one())
    }

    pub fn hbar() -> Self {
        Self::monomial(0, 0, 1, GaussianRational::one())
    }

    pub fn monomial(p_pow: u32, x_pow: u32, hbar_pow: u32, c: GaussianRational) -> Self {
        let mut out = Self::zero();
        out.add_term(
            PhaseKey {
                p_pow,
                x_pow,
                hbar_pow,
            },
            c,
        );
        out
    }

    pub(crate) fn add_term(&mut self, key: PhaseKey, c: GaussianRational) {
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

    pub fn terms(&self) -> impl Iterator<Item = (PhaseKey, &GaussianRational)> {
        self.terms.iter().map(|(k, c)| (*k, c))
    }

    pub fn coeff(&self, p_pow: u32, x_pow: u32, hbar_pow: u32) -> GaussianRational {
        self.terms
            .get(&PhaseKey {
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

    pub fn pow(&self, exp: u32) -> Self {
        let mut acc = Self::one();
        for _ in 0..exp {
            acc = &acc * self;
        }
        acc
    }

    /// Coefficient-wise complex conjugation (`x`, `p`, `hbar` stay real).
    pub fn conjugated(&self) -> Self {
        let mut out = Self::zero();
        for (k, c) in &self.terms {
            out.add_term(*k, c.conj());
        }
        out
    }

    pub fn has_real_coeffs(&self) -> bool {
        self.terms.values().all(|c| c.is_real())
    }

    /// Max of `p_pow + x_pow + hbar_pow` over all monomials; 0 for the zero
    /// polynomial.
    pub fn total_degree(&self) -> u32 {
        self.terms
            .keys()
            .map(|k| k.p_pow + k.x_pow + k.hbar_pow)
            .max()
            .unwrap_or(0)
    }

    /// Max of `p_pow + x_pow` over all monomials.
    pub fn xp_degree(&self) -> u32 {
        self.terms
            .keys()
            .map(|k| k.p_pow + k.x_pow)
            .max()
            .unwrap_or(0)
    }

    /// Max of `min(p_pow, x_pow)`: the mixed-derivative depth a transform or
    /// quantization of this polynomial needs.
    pub fn max_mixed_degree(&self) -> u32 {
        self.terms
            .keys()
            .map(|k| k.p_pow.min(k.x_pow))
            .max()
            .unwrap_or(0)
    }

    /// Formal `d^times / d var^times`.
    pub fn partial_derivative(&self, var: Var, times: u32) -> Self {
        let mut out = Self::zero();
        for (k, c) in &self.terms {
            let pow = match var {
                Var::X => k.x_pow,
                Var::P => k.p_pow,
            };
            if pow < times {
                continue;
            }
            // falling factorial pow * (pow-1) * ... * (pow-times+1)
            let mut factor = BigInt::one();
            for t in 0..times {
                factor *= BigInt::from(pow - t);
            }
            let key = match var {
                Var::X => PhaseKey {
                    x_pow: k.x_pow - times,
                    ..*k
                },
                Var::P => PhaseKey {
                    p_pow: k.p_pow - times,
                    ..*k
                },
            };
            out.add_term(key, c.scale(&BigRational::from_integer(factor)));
        }
        out
    }

    /// Multiply by `hbar^k`.
    pub fn mul_hbar(&self, k: u32) -> Self {
        let mut out = Self::zero();
        for (key, c) in &self.terms {
            out.add_term(
                PhaseKey {
                    hbar_pow: key.hbar_pow + k,
                    ..*key
                },
                c.clone(),
            );
        }
        out
    }

    /// Drop every term with `hbar_power >= 1`.
    pub fn classical_limit(&self) -> Self {
        let mut out = Self::zero();
        for (k, c) in &self.terms {
            if k.hbar_pow == 0 {
                out.add_term(*k, c.clone());
            }
        }
        out
    }

    /// Exact division by `i*hbar`: shift every hbar power down by one and
    /// scale by `-i`. Fails if any term is hbar-free.
    pub fn div_ihbar(&self) -> Result<Self, PhaseError> {
        let mut out = Self::zero();
        for (k, c) in &self.terms {
            if k.hbar_pow == 0 {
                return Err(PhaseError::NotDivisibleByHbar);
            }
            out.add_term(
                PhaseKey {
                    hbar_pow: k.hbar_pow - 1,
                    ..*k
                },
                -c.mul_i(),
            );
        }
        Ok(out)
    }
}

impl Add for &PhasePoly {
    type Output = PhasePoly;

    fn add(self, rhs: Self) -> PhasePoly {
        let mut out = self.clone();
        for (k, c) in &rhs.terms {
            out.add_term(*k, c.clone());
        }
        out
    }
}

impl Sub for &PhasePoly {
    type Output = PhasePoly;

    fn sub(self, rhs: Self) -> PhasePoly {
        self + &-rhs
    }
}

impl Neg for &PhasePoly {
    type Output = PhasePoly;

    fn neg(self) -> PhasePoly {
        let mut out = PhasePoly::zero();
        for (k, c) in &self.terms {
            out.add_term(*k, -c);
        }
        out
    }
}

impl Mul for &PhasePoly {
    type Output = PhasePoly;

    fn mul(self, rhs: Self) -> PhasePoly {
        let mut out = PhasePoly::zero();
        for (ka, ca) in &self.terms {
            for (kb, cb) in &rhs.terms {
                out.add_term(
                    PhaseKey {
                        p_pow: ka.p_pow + kb.p_pow,
                        x_pow: ka.x_pow + kb.x_pow,
                        hbar_pow: ka.hbar_pow + kb.hbar_pow,
                    },
                    ca * cb,
                );
            }
        }
        out
    }
}

/// `{A, B} = dA/dx dB/dp - dA/dp dB/dx`.
pub fn poisson_bracket(a: &PhasePoly, b: &PhasePoly) -> PhasePoly {
    let lhs = &a.partial_derivative(Var::X, 1) * &b.partial_derivative(Var::P, 1);
    let rhs = &a.partial_derivative(Var::P, 1) * &b.partial_derivative(Var::X, 1);
    &lhs - &rhs
}

/// The Moyal product, expanded as the finite bidifferential sum
///
/// `A * B = sum_k (i hbar / 2)^k / k!
///          sum_j (-1)^j C(k,j) (dx^{k-j} dp^j A)(dp^{k-j} dx^j B)`.
///
/// The sum terminates at `k = min(deg_xp A, deg_xp B)`.
pub fn moyal_star(a: &PhasePoly, b: &PhasePoly) -> PhasePoly {
    let kmax = a.xp_degree().min(b.xp_degree());
    let half_i = GaussianRational::ratio_pair(0, 1, 1, 2);
    let mut out = PhasePoly::zero();
    for k in 0..=kmax {
        let mut inner = PhasePoly::zero();
        for j in 0..=k {
            let da = a
                .partial_derivative(Var::X, k - j)
                .partial_derivative(Var::P, j);
            let db = b
                .partial_derivative(Var::P, k - j)
                .partial_derivative(Var::X, j);
            if da.is_zero() || db.is_zero() {
                continue;
            }
            let mut factor = BigRational::from_integer(binomial(BigInt::from(k), BigInt::from(j)));
            if j % 2 == 1 {
                factor = -factor;
            }
            inner = &inner + &(&da * &db).scale(&GaussianRational::from_rational(factor));
        }
        let weight = half_i
            .pow(k)
            .scale(&BigRational::new(BigInt::one(), factorial(k)));
        out = &out + &inner.scale(&weight).mul_hbar(k);
    }
    out
}

/// Apply the operator `series(-hbar d^2/(dx dp))` termwise:
/// `A -> sum_k c_k (-1)^k hbar^k dx^k dp^k A`.
pub fn alpha_transform(a: &PhasePoly, series: &FormalSeries) -> Result<PhasePoly, PhaseError> {
    let needed = a.max_mixed_degree() as usize;
    if series.order() < needed {
        return Err(PhaseError::InsufficientOrder {
            needed,
            available: series.order(),
        });
    }
    let mut out = PhasePoly::zero();
    for k in 0..=needed as u32 {
        let c = series.coeff(k as usize);
        if c.is_zero() {
            continue;
        }
        let d = a
            .partial_derivative(Var::X, k)
            .partial_derivative(Var::P, k);
        if d.is_zero() {
            continue;
        }
        let signed = if k % 2 == 1 { -c } else { c.clone() };
        out = &out + &d.scale(&signed).mul_hbar(k);
    }
    Ok(out)
}

/// The generalized star product of an ordering:
/// `A *_g B = alpha_inv_hat[(alpha_hat A) * (alpha_hat B)]`.
pub fn g_star(a: &PhasePoly, b: &PhasePoly, ordering: &Ordering) -> Result<PhasePoly, PhaseError> {
    let ta = alpha_transform(a, ordering.alpha())?;
    let tb = alpha_transform(b, ordering.alpha())?;
    let product = moyal_star(&ta, &tb);
    alpha_transform(&product, ordering.alpha_inv())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::series::Preset;

    fn qi(re_n: i64, re_d: i64, im_n: i64, im_d: i64) -> GaussianRational {
        GaussianRational::ratio_pair(re_n, re_d, im_n, im_d)
    }

    #[test]
    fn commutative_product() {
        let xp = &PhasePoly::x() * &PhasePoly::p();
        assert_eq!(xp, PhasePoly::monomial(1, 1, 0, GaussianRational::one()));
        assert_eq!(xp, &PhasePoly::p() * &PhasePoly::x());
    }

    #[test]
    fn binomial_square() {
        let s = &PhasePoly::x() + &PhasePoly::p();
        let sq = s.pow(2);
        let expected = &(&PhasePoly::monomial(0, 2, 0, GaussianRational::one())
            + &PhasePoly::monomial(1, 1, 0, GaussianRational::from_int(2)))
            + &PhasePoly::monomial(2, 0, 0, GaussianRational::one());
        assert_eq!(sq, expected);
    }

    #[test]
    fn additive_inverse() {
        let a = PhasePoly::monomial(2, 1, 0, qi(3, 2, -1, 3));
        assert!((&a + &-&a).is_zero());
    }

    #[test]
    fn derivative_examples() {
        let x2p = PhasePoly::monomial(1, 2, 0, GaussianRational::one());
        assert_eq!(
            x2p.partial_derivative(Var::X, 1),
            PhasePoly::monomial(1, 1, 0, GaussianRational::from_int(2))
        );
        let xp = PhasePoly::monomial(1, 1, 0, GaussianRational::one());
        assert_eq!(
            xp.partial_derivative(Var::X, 1)
                .partial_derivative(Var::P, 1),
            PhasePoly::one()
        );
        let x2 = PhasePoly::monomial(0, 2, 0, GaussianRational::one());
        assert!(x2.partial_derivative(Var::P, 1).is_zero());
    }

    #[test]
    fn poisson_canonical_pair() {
        assert_eq!(
            poisson_bracket(&PhasePoly::x(), &PhasePoly::p()),
            PhasePoly::one()
        );
        assert_eq!(
            poisson_bracket(&PhasePoly::p(), &PhasePoly::x()),
            PhasePoly::constant(GaussianRational::from_int(-1))
        );
        let x2 = PhasePoly::monomial(0, 2, 0, GaussianRational::one());
        assert_eq!(
            poisson_bracket(&x2, &PhasePoly::p()),
            PhasePoly::monomial(0, 1, 0, GaussianRational::from_int(2))
        );
    }

    #[test]
    fn moyal_on_canonical_pair() {
        let expected = &PhasePoly::monomial(1, 1, 0, GaussianRational::one())
            + &PhasePoly::monomial(0, 0, 1, qi(0, 1, 1, 2));
        assert_eq!(moyal_star(&PhasePoly::x(), &PhasePoly::p()), expected);

        let expected_rev = &PhasePoly::monomial(1, 1, 0, GaussianRational::one())
            + &PhasePoly::monomial(0, 0, 1, qi(0, 1, -1, 2));
        assert_eq!(moyal_star(&PhasePoly::p(), &PhasePoly::x()), expected_rev);
    }

    #[test]
    fn moyal_unit() {
        let a = &PhasePoly::monomial(2, 3, 1, qi(1, 2, 2, 3)) + &PhasePoly::x();
        assert_eq!(moyal_star(&PhasePoly::one(), &a), a);
        assert_eq!(moyal_star(&a, &PhasePoly::one()), a);
    }

    #[test]
    fn alpha_transform_identity_series() {
        let a = &PhasePoly::monomial(2, 2, 0, qi(1, 1, 1, 1)) + &PhasePoly::p();
        let one = crate::series::FormalSeries::one(4);
        assert_eq!(alpha_transform(&a, &one).unwrap(), a);
    }

    #[test]
    fn alpha_transform_standard_on_xp() {
        // alpha = exp(-iy/2): single k = 1 term contributes (i/2) hbar.
        let ord = Ordering::preset(Preset::Standard, 4);
        let xp = PhasePoly::monomial(1, 1, 0, GaussianRational::one());
        let got = alpha_transform(&xp, ord.alpha()).unwrap();
        let expected = &xp + &PhasePoly::monomial(0, 0, 1, qi(0, 1, 1, 2));
        assert_eq!(got, expected);
    }

    #[test]
    fn alpha_transform_fixes_univariate() {
        let x3 = PhasePoly::monomial(0, 3, 0, GaussianRational::one());
        for preset in crate::series::ALL_PRESETS {
            let ord = Ordering::preset(preset, 4);
            assert_eq!(alpha_transform(&x3, ord.alpha()).unwrap(), x3);
        }
    }

    #[test]
    fn alpha_transform_inverse_roundtrip() {
        let a = &PhasePoly::monomial(2, 3, 0, qi(2, 1, -1, 2))
            + &PhasePoly::monomial(1, 1, 1, qi(0, 1, 1, 3));
        for preset in crate::series::ALL_PRESETS {
            let ord = Ordering::preset(preset, 6);
            let round =
                alpha_transform(&alpha_transform(&a, ord.alpha()).unwrap(), ord.alpha_inv())
                    .unwrap();
            assert_eq!(round, a);
        }
    }

    #[test]
    fn insufficient_order_reported() {
        let a = PhasePoly::monomial(3, 3, 0, GaussianRational::one());
        let short = crate::series::FormalSeries::one(2);
        assert_eq!(
            alpha_transform(&a, &short),
            Err(PhaseError::InsufficientOrder {
                needed: 3,
                available: 2
            })
        );
    }

    #[test]
    fn g_star_weyl_reduces_to_moyal() {
        let ord = Ordering::preset(Preset::Weyl, 4);
        let got = g_star(&PhasePoly::x(), &PhasePoly::p(), &ord).unwrap();
        assert_eq!(got, moyal_star(&PhasePoly::x(), &PhasePoly::p()));
    }

    #[test]
    fn g_star_antistandard_on_canonical_pair() {
        let ord = Ordering::preset(Preset::AntiStandard, 4);
        let got = g_star(&PhasePoly::x(), &PhasePoly::p(), &ord).unwrap();
        let expected = &PhasePoly::monomial(1, 1, 0, GaussianRational::one())
            + &PhasePoly::monomial(0, 0, 1, GaussianRational::i());
        assert_eq!(got, expected);
    }

    #[test]
    fn g_star_unit() {
        let a = &PhasePoly::monomial(0, 3, 0, GaussianRational::one()) + &PhasePoly::hbar();
        for preset in crate::series::ALL_PRESETS {
            let ord = Ordering::preset(preset, 6);
            assert_eq!(g_star(&PhasePoly::one(), &a, &ord).unwrap(), a);
            assert_eq!(g_star(&a, &PhasePoly::one(), &ord).unwrap(), a);
        }
    }

    #[test]
    fn classical_limit_examples() {
        let a = &PhasePoly::monomial(1, 1, 0, GaussianRational::one())
            + &PhasePoly::monomial(0, 0, 1, qi(0, 1, 1, 2));
        assert_eq!(
            a.classical_limit(),
            PhasePoly::monomial(1, 1, 0, GaussianRational::one())
        );
        assert!(PhasePoly::monomial(0, 0, 2, GaussianRational::one())
            .classical_limit()
            .is_zero());
        let x2p = PhasePoly::monomial(1, 2, 0, GaussianRational::one());
        assert_eq!(x2p.classical_limit(), x2p);
    }

    #[test]
    fn div_ihbar_shifts_and_scales() {
        let a = PhasePoly::monomial(1, 1, 1, GaussianRational::i());
        assert_eq!(
            a.div_ihbar().unwrap(),
            PhasePoly::monomial(1, 1, 0, GaussianRational::one())
        );
        assert_eq!(
            PhasePoly::x().div_ihbar(),
            Err(PhaseError::NotDivisibleByHbar)
        );
    }

    #[test]
    fn star_commutator_over_ihbar_tends_to_poisson() {
        let a = &PhasePoly::monomial(0, 2, 0, GaussianRational::one()) + &PhasePoly::p();
        let b = &PhasePoly::monomial(2, 1, 0, qi(1, 3, 0, 1)) + &PhasePoly::x();
        for preset in crate::series::ALL_PRESETS {
            let ord = Ordering::preset(preset, 8);
            let comm = &g_star(&a, &b, &ord).unwrap() - &g_star(&b, &a, &ord).unwrap();
            let scaled = comm.div_ihbar().unwrap();
            assert_eq!(
                scaled.classical_limit(),
                poisson_bracket(&a, &b),
                "{}",
                preset.name()
            );
        }
    }

    #[test]
    fn moyal_argument_swap_conjugates_for_real_inputs() {
        let a = &PhasePoly::monomial(0, 2, 0, qi(2, 1, 0, 1)) + &PhasePoly::p();
        let b = &PhasePoly::monomial(1, 1, 0, qi(-1, 2, 0, 1)) + &PhasePoly::x();
        assert_eq!(moyal_star(&b, &a), moyal_star(&a, &b).conjugated());
        let comm = &moyal_star(&a, &b) - &moyal_star(&b, &a);
        assert!(comm.terms().all(|(k, _)| k.hbar_pow % 2 == 1));
    }
}
