//! Truncated formal power series over Q(i), the operator-ordering presets,
//! and the ordering coefficients `g(m, n, s)`.
//!
//! An ordering scheme is encoded by a series `f(y)` with `f(0) = 1`. The
//! companion series `alpha(y) = f(y) * exp(iy/2)` drives the twisted star
//! product, and `g(m, n, s)` can be computed from either series; agreement of
//! the two routes is one of the verified invariants.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use thiserror::Error;

use crate::scalar::GaussianRational;

/// Errors from series arithmetic and ordering construction.
#[derive(Debug, Error, PartialEq, Eq)]
pub enum SeriesError {
    #[error("unknown ordering preset `{0}`")]
    UnknownPreset(String),
    #[error("series truncation orders differ: {left} vs {right}")]
    OrderMismatch { left: usize, right: usize },
    #[error("series has no reciprocal: constant term is zero")]
    NonUnitConstantTerm,
    #[error("index {index} out of range (limit {limit})")]
    IndexOutOfRange { index: usize, limit: usize },
    #[error("custom ordering rejected: leading coefficient must be 1, got {0}")]
    CustomLeadingCoefficient(String),
    #[error("custom ordering file, line {line}: {reason}")]
    CustomFormat { line: usize, reason: String },
}

pub(crate) fn factorial(n: u32) -> BigInt {
    let mut acc = BigInt::one();
    for k in 2..=n.max(1) {
        acc *= BigInt::from(k);
    }
    acc
}

/// One-variable series `sum_k c_k y^k` truncated at a fixed order
/// (`coeffs.len() == order + 1`).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FormalSeries {
    coeffs: Vec<GaussianRational>,
}

impl FormalSeries {
    pub fn new(coeffs: Vec<GaussianRational>) -> Self {
        assert!(
            !coeffs.is_empty(),
            "a series stores at least the constant term"
        );
        Self { coeffs }
    }

    pub fn from_fn(order: usize, f: impl Fn(usize) -> GaussianRational) -> Self {
        Self::new((0..=order).map(f).collect())
    }

    /// The constant series 1.
    pub fn one(order: usize) -> Self {
        Self::from_fn(order, |k| {
            if k == 0 {
                GaussianRational::one()
            } else {
                GaussianRational::zero()
            }
        })
    }

    pub fn order(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeff(&self, k: usize) -> &GaussianRational {
        &self.coeffs[k]
    }

    pub fn coeffs(&self) -> &[GaussianRational] {
        &self.coeffs
    }

    /// Truncate or zero-extend. Zero-extension treats the series as a
    /// polynomial, which is the intended semantics for custom orderings.
    pub fn resized(&self, order: usize) -> Self {
        let mut coeffs = self.coeffs.clone();
        coeffs.resize(order + 1, GaussianRational::zero());
        Self::new(coeffs)
    }

    /// Cauchy product truncated at the common order.
    pub fn mul(&self, rhs: &Self) -> Result<Self, SeriesError> {
        if self.order() != rhs.order() {
            return Err(SeriesError::OrderMismatch {
                left: self.order(),
                right: rhs.order(),
            });
        }
        let order = self.order();
        let mut coeffs = vec![GaussianRational::zero(); order + 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in rhs.coeffs.iter().take(order + 1 - i).enumerate() {
                coeffs[i + j] = &coeffs[i + j] + &(a * b);
            }
        }
        Ok(Self::new(coeffs))
    }

    /// Reciprocal to the same order: `b_0 = 1/a_0`,
    /// `b_n = -(1/a_0) * sum_{k=1..n} a_k b_{n-k}`.
    pub fn reciprocal(&self) -> Result<Self, SeriesError> {
        let a0_inv = self.coeffs[0]
            .inv()
            .map_err(|_| SeriesError::NonUnitConstantTerm)?;
        let order = self.order();
        let mut coeffs = vec![GaussianRational::zero(); order + 1];
        coeffs[0] = a0_inv.clone();
        for n in 1..=order {
            let mut acc = GaussianRational::zero();
            for k in 1..=n {
                acc = &acc + &(&self.coeffs[k] * &coeffs[n - k]);
            }
            coeffs[n] = -&(&a0_inv * &acc);
        }
        Ok(Self::new(coeffs))
    }

    /// `s! * c_s`, the s-th derivative at the origin.
    pub fn derivative_at_zero(&self, s: usize) -> Result<GaussianRational, SeriesError> {
        if s > self.order() {
            return Err(SeriesError::IndexOutOfRange {
                index: s,
                limit: self.order(),
            });
        }
        Ok(self.coeffs[s].scale(&BigRational::from_integer(factorial(s as u32))))
    }

    /// All coefficients real (zero imaginary part).
    pub fn is_real(&self) -> bool {
        self.coeffs.iter().all(|c| c.im().is_zero())
    }
}

/// `exp(rate * y)` truncated: coefficients `rate^k / k!`.
pub fn exp_series(rate: &GaussianRational, order: usize) -> FormalSeries {
    FormalSeries::from_fn(order, |k| {
        rate.pow(k as u32)
            .scale(&BigRational::new(BigInt::one(), factorial(k as u32)))
    })
}

/// `exp(iy/2)`, the fixed factor relating `f` to `alpha`.
pub fn exp_iy_half(order: usize) -> FormalSeries {
    exp_series(&GaussianRational::ratio_pair(0, 1, 1, 2), order)
}

/// The five built-in ordering schemes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Preset {
    Weyl,
    Standard,
    AntiStandard,
    Symmetric,
    BornJordan,
}

pub const ALL_PRESETS: [Preset; 5] = [
    Preset::Weyl,
    Preset::Standard,
    Preset::AntiStandard,
    Preset::Symmetric,
    Preset::BornJordan,
];

impl Preset {
    pub fn from_name(name: &str) -> Result<Self, SeriesError> {
        match name {
            "weyl" => Ok(Self::Weyl),
            "standard" => Ok(Self::Standard),
            "antistandard" => Ok(Self::AntiStandard),
            "symmetric" => Ok(Self::Symmetric),
            "born_jordan" => Ok(Self::BornJordan),
            other => Err(SeriesError::UnknownPreset(other.to_owned())),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Self::Weyl => "weyl",
            Self::Standard => "standard",
            Self::AntiStandard => "antistandard",
            Self::Symmetric => "symmetric",
            Self::BornJordan => "born_jordan",
        }
    }

    /// Exact k-th coefficient of the preset's `f(y)`.
    ///
    /// - weyl: `f = exp(-iy/2)`, so `f_k = (-i/2)^k / k!`
    /// - standard: `f = exp(-iy)`, so `f_k = (-i)^k / k!`
    /// - antistandard: `f = 1`
    /// - symmetric: `f = (1 + exp(-iy))/2`, so `f_k = (-i)^k / (2 k!)` for `k >= 1`
    /// - born_jordan: `f = (1 - exp(-iy))/(iy)`, so `f_k = (-i)^k / (k+1)!`
    pub fn f_coeff(self, k: usize) -> GaussianRational {
        let minus_i = -GaussianRational::i();
        let kfac_inv = |n: u32| BigRational::new(BigInt::one(), factorial(n));
        match self {
            Self::Weyl => GaussianRational::ratio_pair(0, 1, -1, 2)
                .pow(k as u32)
                .scale(&kfac_inv(k as u32)),
            Self::Standard => minus_i.pow(k as u32).scale(&kfac_inv(k as u32)),
            Self::AntiStandard => {
                if k == 0 {
                    GaussianRational::one()
                } else {
                    GaussianRational::zero()
                }
            }
            Self::Symmetric => {
                if k == 0 {
                    GaussianRational::one()
                } else {
                    minus_i
                        .pow(k as u32)
                        .scale(&kfac_inv(k as u32))
                        .scale(&BigRational::new(BigInt::one(), BigInt::from(2)))
                }
            }
            Self::BornJordan => minus_i
                .pow(k as u32)
                .scale(&BigRational::new(BigInt::one(), factorial(k as u32 + 1))),
        }
    }

    pub fn f_series(self, order: usize) -> FormalSeries {
        FormalSeries::from_fn(order, |k| self.f_coeff(k))
    }
}

/// `f` series of a named preset.
pub fn preset_f(name: &str, order: usize) -> Result<FormalSeries, SeriesError> {
    Ok(Preset::from_name(name)?.f_series(order))
}

/// An ordering scheme fixed at a truncation order: `f`, `alpha = f*exp(iy/2)`
/// and the reciprocal of `alpha`, all to the same order.
#[derive(Debug, Clone)]
pub struct Ordering {
    label: String,
    preset: Option<Preset>,
    f: FormalSeries,
    alpha: FormalSeries,
    alpha_inv: FormalSeries,
}

impl Ordering {
    fn from_f(label: String, preset: Option<Preset>, f: FormalSeries) -> Self {
        let alpha = f
            .mul(&exp_iy_half(f.order()))
            .expect("orders match by construction");
        let alpha_inv = alpha.reciprocal().expect("alpha has unit constant term");
        Self {
            label,
            preset,
            f,
            alpha,
            alpha_inv,
        }
    }

    pub fn preset(preset: Preset, order: usize) -> Self {
        Self::from_f(
            preset.name().to_owned(),
            Some(preset),
            preset.f_series(order),
        )
    }

    /// Custom scheme from an explicit list of `f` coefficients, interpreted
    /// as a polynomial (zero beyond the listed entries). The leading
    /// coefficient must be exactly 1.
    pub fn custom(
        label: impl Into<String>,
        f_coeffs: &[GaussianRational],
        order: usize,
    ) -> Result<Self, SeriesError> {
        match f_coeffs.first() {
            Some(c) if c.is_one() => {}
            Some(c) => return Err(SeriesError::CustomLeadingCoefficient(c.to_string())),
            None => return Err(SeriesError::CustomLeadingCoefficient("<empty>".to_owned())),
        }
        let f = FormalSeries::new(f_coeffs.to_vec()).resized(order);
        Ok(Self::from_f(label.into(), None, f))
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn preset_kind(&self) -> Option<Preset> {
        self.preset
    }

    pub fn order(&self) -> usize {
        self.f.order()
    }

    pub fn f(&self) -> &FormalSeries {
        &self.f
    }

    pub fn alpha(&self) -> &FormalSeries {
        &self.alpha
    }

    pub fn alpha_inv(&self) -> &FormalSeries {
        &self.alpha_inv
    }

    /// `g(m, n, s)` from the `f` route.
    pub fn g(&self, m: u32, n: u32, s: u32) -> Result<GaussianRational, SeriesError> {
        g_from_f(&self.f, m, n, s)
    }

    /// Whether `alpha` is real up to the built truncation order. Real
    /// `alpha` is the criterion for the quantization map to send real
    /// polynomials to formally self-adjoint operators.
    pub fn alpha_is_real(&self) -> bool {
        self.alpha.is_real()
    }
}

fn check_g_range(order: usize, m: u32, n: u32, s: u32) -> Result<(), SeriesError> {
    let limit = m.min(n);
    if s > limit {
        return Err(SeriesError::IndexOutOfRange {
            index: s as usize,
            limit: limit as usize,
        });
    }
    if s as usize > order {
        return Err(SeriesError::IndexOutOfRange {
            index: s as usize,
            limit: order,
        });
    }
    Ok(())
}

/// `g(m, n, s) = (-1)^s * m! n! / (s! (m-s)! (n-s)!) * (d^s f/dy^s)(0)`.
pub fn g_from_f(f: &FormalSeries, m: u32, n: u32, s: u32) -> Result<GaussianRational, SeriesError> {
    check_g_range(f.order(), m, n, s)?;
    // With (d^s f)(0) = s! f_s the s! cancels:
    // g = (-1)^s * m! n! / ((m-s)! (n-s)!) * f_s
    let num = factorial(m) * factorial(n);
    let den = factorial(m - s) * factorial(n - s);
    let mut factor = BigRational::new(num, den);
    if s % 2 == 1 {
        factor = -factor;
    }
    Ok(f.coeff(s as usize).scale(&factor))
}

/// `g(m, n, s) = (i/2)^s * m! n! / ((m-s)! (n-s)!)
///             * sum_{k=0..s} (2i)^k / (s-k)! * alpha_k`.
pub fn g_from_alpha(
    alpha: &FormalSeries,
    m: u32,
    n: u32,
    s: u32,
) -> Result<GaussianRational, SeriesError> {
    check_g_range(alpha.order(), m, n, s)?;
    let two_i = GaussianRational::ratio_pair(0, 1, 2, 1);
    let mut sum = GaussianRational::zero();
    for k in 0..=s {
        let term = &two_i.pow(k) * alpha.coeff(k as usize);
        sum = &sum + &term.scale(&BigRational::new(BigInt::one(), factorial(s - k)));
    }
    let half_i = GaussianRational::ratio_pair(0, 1, 1, 2);
    let factor = BigRational::new(
        factorial(m) * factorial(n),
        factorial(m - s) * factorial(n - s),
    );
    Ok((&half_i.pow(s) * &sum).scale(&factor))
}

/// Parse the custom-f file format: one coefficient per line as
/// `re_num/re_den,im_num/im_den`. Blank lines are skipped; the first
/// coefficient must parse to 1.
pub fn parse_custom_f(text: &str) -> Result<Vec<GaussianRational>, SeriesError> {
    fn part(raw: &str, line: usize) -> Result<BigRational, SeriesError> {
        let bad = |reason: String| SeriesError::CustomFormat { line, reason };
        let (num, den) = raw
            .split_once('/')
            .ok_or_else(|| bad(format!("`{raw}` is not of the form num/den")))?;
        let num: BigInt = num
            .trim()
            .parse()
            .map_err(|_| bad(format!("bad numerator `{num}`")))?;
        let den: BigInt = den
            .trim()
            .parse()
            .map_err(|_| bad(format!("bad denominator `{den}`")))?;
        if den <= BigInt::zero() {
            return Err(bad(format!("denominator must be positive, got `{den}`")));
        }
        Ok(BigRational::new(num, den))
    }

    let mut coeffs = Vec::new();
    for (idx, raw_line) in text.lines().enumerate() {
        let line = raw_line.trim();
        if line.is_empty() {
            continue;
        }
        let lineno = idx + 1;
        let (re, im) = line.split_once(',').ok_or(SeriesError::CustomFormat {
            line: lineno,
            reason: "expected `re_num/re_den,im_num/im_den`".to_owned(),
        })?;
        coeffs.push(GaussianRational::new(part(re, lineno)?, part(im, lineno)?));
    }
    match coeffs.first() {
        Some(c) if c.is_one() => Ok(coeffs),
        Some(c) => Err(SeriesError::CustomLeadingCoefficient(c.to_string())),
        None => Err(SeriesError::CustomLeadingCoefficient("<empty>".to_owned())),
    }
}
