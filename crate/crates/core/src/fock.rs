//! Truncated Fock-space matrix representation: ladder matrices, the banded
//! blocks `F(m,n) = (-i hbar a)^m (a+)^n` by direct multiplication and by
//! closed-form entries, the matrix quantization map, and truncation-aware
//! block comparison.
//!
//! Truncating an infinite matrix product corrupts entries near the
//! bottom-right corner (components pushed past the cutoff are silently
//! dropped), so block comparisons take an explicit safety margin. Direct
//! multiplication is the source of truth everywhere; the closed forms exist
//! to be validated against it.
//!
//! Indices are 1-based throughout, matching the convention that puts
//! `sqrt(1)` in the top superdiagonal slot of the annihilation matrix.

use serde::Serialize;

use crate::opalg::AAPoly;
use crate::phase::PhasePoly;
use crate::scalar::{GaussianRational, RadicalScalar};
use crate::series::Ordering;
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum FockError {
    #[error("matrix dimensions differ: {left} vs {right}")]
    DimMismatch { left: usize, right: usize },
    #[error("margin {margin} too large for dimension {dim}")]
    MarginTooLarge { margin: usize, dim: usize },
    #[error("no closed form for the unit block (m = n = 0)")]
    UndefinedForUnitCase,
    #[error("ordering series order {available} insufficient: need at least {needed}")]
    InsufficientOrder { needed: usize, available: usize },
}

/// Dense square matrix over the radical scalar ring.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FockMatrix {
    dim: usize,
    entries: Vec<RadicalScalar>,
}

impl FockMatrix {
    pub fn zero(dim: usize) -> Self {
        assert!(dim >= 1, "dimension must be positive");
        Self {
            dim,
            entries: vec![RadicalScalar::zero(); dim * dim],
        }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zero(dim);
        for j in 1..=dim {
            m.set(j, j, RadicalScalar::one());
        }
        m
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// 1-based access.
    pub fn get(&self, row: usize, col: usize) -> &RadicalScalar {
        &self.entries[(row - 1) * self.dim + (col - 1)]
    }

    pub fn set(&mut self, row: usize, col: usize, value: RadicalScalar) {
        self.entries[(row - 1) * self.dim + (col - 1)] = value;
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(RadicalScalar::is_zero)
    }

    fn check_dims(&self, rhs: &Self) -> Result<(), FockError> {
        if self.dim != rhs.dim {
            return Err(FockError::DimMismatch {
                left: self.dim,
                right: rhs.dim,
            });
        }
        Ok(())
    }

    pub fn add(&self, rhs: &Self) -> Result<Self, FockError> {
        self.check_dims(rhs)?;
        let mut out = Self::zero(self.dim);
        for idx in 0..self.entries.len() {
            out.entries[idx] = &self.entries[idx] + &rhs.entries[idx];
        }
        Ok(out)
    }

    pub fn mul(&self, rhs: &Self) -> Result<Self, FockError> {
        self.check_dims(rhs)?;
        let n = self.dim;
        let mut out = Self::zero(n);
        for r in 0..n {
            for k in 0..n {
                let a = &self.entries[r * n + k];
                if a.is_zero() {
                    continue;
                }
                for c in 0..n {
                    let b = &rhs.entries[k * n + c];
                    if b.is_zero() {
                        continue;
                    }
                    out.entries[r * n + c] = &out.entries[r * n + c] + &(a * b);
                }
            }
        }
        Ok(out)
    }

    pub fn scale(&self, s: &RadicalScalar) -> Self {
        let mut out = Self::zero(self.dim);
        for (idx, e) in self.entries.iter().enumerate() {
            out.entries[idx] = e * s;
        }
        out
    }

    pub fn pow(&self, exp: u32) -> Self {
        let mut acc = Self::identity(self.dim);
        for _ in 0..exp {
            acc = acc.mul(self).expect("same dimension");
        }
        acc
    }

    /// Conjugate transpose with `hbar` treated as real.
    pub fn conj_transpose(&self) -> Self {
        let mut out = Self::zero(self.dim);
        for r in 1..=self.dim {
            for c in 1..=self.dim {
                out.set(c, r, self.get(r, c).conj());
            }
        }
        out
    }
}

/// The truncated annihilation/creation pair: `a` carries `sqrt(j)` at
/// `(j, j+1)` for `j = 1..dim-1`, and the creation matrix is its transpose.
pub fn ladder_matrices(dim: usize) -> (FockMatrix, FockMatrix) {
    let mut a = FockMatrix::zero(dim);
    let mut adag = FockMatrix::zero(dim);
    for j in 1..dim {
        let root = RadicalScalar::normalized(GaussianRational::one(), j as u64, 0);
        a.set(j, j + 1, root.clone());
        adag.set(j + 1, j, root);
    }
    (a, adag)
}

/// `(-i hbar)^m` as a radical scalar.
fn minus_ihbar_pow(m: u32) -> RadicalScalar {
    RadicalScalar::gaussian_hbar((-GaussianRational::i()).pow(m), m)
}

/// `F(m,n) = (-i hbar a)^m (a+)^n` by direct truncated multiplication.
pub fn f_matrix_direct(m: u32, n: u32, dim: usize) -> FockMatrix {
    let (a, adag) = ladder_matrices(dim);
    let word = a.pow(m).mul(&adag.pow(n)).expect("same dimension");
    word.scale(&minus_ihbar_pow(m))
}

/// Product of `count` consecutive integers starting at `start`; 1 if empty.
fn run_product(start: u64, count: u32) -> u64 {
    let mut acc = 1u64;
    for t in 0..count as u64 {
        acc = acc.checked_mul(start + t).expect("index product overflow");
    }
    acc
}

/// `F(m,n)` filled from the closed-form entries of the untruncated matrices,
/// windowed to `dim`; `m = n = 0` has no closed form.
pub fn f_matrix_closed(m: u32, n: u32, dim: usize) -> Result<FockMatrix, FockError> {
    if m == 0 && n == 0 {
        return Err(FockError::UndefinedForUnitCase);
    }
    let mut out = FockMatrix::zero(dim);
    let prefactor = (-GaussianRational::i()).pow(m);
    let entry = |count: u64, radicand: u64| {
        RadicalScalar::normalized(
            &prefactor * &GaussianRational::from_bigint(count.into()),
            radicand,
            m,
        )
    };
    if n == 0 {
        // (j, j+m) = (-i hbar)^m sqrt(j (j+1) ... (j+m-1))
        for j in 1..=dim.saturating_sub(m as usize) {
            out.set(j, j + m as usize, entry(1, run_product(j as u64, m)));
        }
    } else if m == 0 {
        // (j+n, j) = sqrt(j (j+1) ... (j+n-1))
        for j in 1..=dim.saturating_sub(n as usize) {
            out.set(j + n as usize, j, entry(1, run_product(j as u64, n)));
        }
    } else if m > n {
        // (j, j+m-n) = (-i hbar)^m (j+m-n)...(j+m-1) sqrt(j ... (j+m-n-1))
        let shift = (m - n) as usize;
        for j in 1..=dim.saturating_sub(shift) {
            let plain = run_product(j as u64 + (m - n) as u64, n);
            out.set(j, j + shift, entry(plain, run_product(j as u64, m - n)));
        }
    } else if m == n {
        // (j, j) = (-i hbar)^m j (j+1) ... (j+m-1)
        for j in 1..=dim {
            out.set(j, j, entry(run_product(j as u64, m), 1));
        }
    } else {
        // (j+n-m, j) = (-i hbar)^m (j+n-m)...(j+n-1) sqrt(j ... (j+n-m-1))
        let shift = (n - m) as usize;
        for j in 1..=dim.saturating_sub(shift) {
            let plain = run_product(j as u64 + (n - m) as u64, m);
            out.set(j + shift, j, entry(plain, run_product(j as u64, n - m)));
        }
    }
    Ok(out)
}

/// Matrix quantization map: linear extension of
/// `p^m x^n -> sum_s g(m,n,s) hbar^s F(m-s, n-s)` over the monomials of `a`,
/// with the blocks built by direct multiplication.
pub fn quantize_matrix(
    a: &PhasePoly,
    ordering: &Ordering,
    dim: usize,
) -> Result<FockMatrix, FockError> {
    let needed = a.max_mixed_degree() as usize;
    if ordering.order() < needed {
        return Err(FockError::InsufficientOrder {
            needed,
            available: ordering.order(),
        });
    }
    let (base_a, base_adag) = ladder_matrices(dim);
    let max_pow = a
        .terms()
        .map(|(k, _)| k.p_pow.max(k.x_pow))
        .max()
        .unwrap_or(0);
    let mut a_pows = Vec::with_capacity(max_pow as usize + 1);
    let mut adag_pows = Vec::with_capacity(max_pow as usize + 1);
    a_pows.push(FockMatrix::identity(dim));
    adag_pows.push(FockMatrix::identity(dim));
    for k in 1..=max_pow as usize {
        a_pows.push(a_pows[k - 1].mul(&base_a).expect("same dimension"));
        adag_pows.push(adag_pows[k - 1].mul(&base_adag).expect("same dimension"));
    }

    let mut out = FockMatrix::zero(dim);
    for (key, c) in a.terms() {
        let (m, n) = (key.p_pow, key.x_pow);
        for s in 0..=m.min(n) {
            let g = ordering.g(m, n, s).expect("s <= min(m,n) <= order");
            let block = a_pows[(m - s) as usize]
                .mul(&adag_pows[(n - s) as usize])
                .expect("same dimension")
                .scale(&minus_ihbar_pow(m - s));
            let weight = RadicalScalar::gaussian_hbar(&g * c, key.hbar_pow + s);
            out = out.add(&block.scale(&weight)).expect("same dimension");
        }
    }
    Ok(out)
}

/// Substitute the truncated ladder matrices into a ladder polynomial:
/// `hbar^k a^m (a+)^n -> hbar^k a_mat^m adag_mat^n`, extended linearly.
pub fn substitute_aa(poly: &AAPoly, dim: usize) -> FockMatrix {
    let (base_a, base_adag) = ladder_matrices(dim);
    let mut out = FockMatrix::zero(dim);
    for (key, c) in poly.terms() {
        let block = base_a
            .pow(key.a_pow)
            .mul(&base_adag.pow(key.adag_pow))
            .expect("same dimension");
        let weight = RadicalScalar::gaussian_hbar(c.clone(), key.hbar_pow);
        out = out.add(&block.scale(&weight)).expect("same dimension");
    }
    out
}

/// First differing entry of a block comparison, both sides rendered.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct BlockMismatch {
    pub row: usize,
    pub col: usize,
    pub left: String,
    pub right: String,
}

/// Outcome of [`safe_block_equal`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BlockComparison {
    pub equal: bool,
    pub first_mismatch: Option<BlockMismatch>,
}

/// Compare the top-left blocks with `max(row, col) <= dim - margin`,
/// reporting the first mismatch in row-major order.
pub fn safe_block_equal(
    a: &FockMatrix,
    b: &FockMatrix,
    margin: usize,
) -> Result<BlockComparison, FockError> {
    a.check_dims(b)?;
    if margin >= a.dim {
        return Err(FockError::MarginTooLarge { margin, dim: a.dim });
    }
    let limit = a.dim - margin;
    for row in 1..=limit {
        for col in 1..=limit {
            if a.get(row, col) != b.get(row, col) {
                return Ok(BlockComparison {
                    equal: false,
                    first_mismatch: Some(BlockMismatch {
                        row,
                        col,
                        left: a.get(row, col).to_string(),
                        right: b.get(row, col).to_string(),
                    }),
                });
            }
        }
    }
    Ok(BlockComparison {
        equal: true,
        first_mismatch: None,
    })
}

#[derive(Serialize)]
struct MatrixEntryJson {
    row: usize,
    col: usize,
    value: String,
}

#[derive(Serialize)]
struct MatrixJson {
    dim: usize,
    entries: Vec<MatrixEntryJson>,
}

/// Render as JSON: zero entries omitted, 1-based indices, values in canonical
/// radical form, or as `re,im` decimal pairs when a numeric `hbar` is given.
pub fn matrix_to_json(m: &FockMatrix, hbar: Option<f64>) -> String {
    let mut entries = Vec::new();
    for row in 1..=m.dim() {
        for col in 1..=m.dim() {
            let v = m.get(row, col);
            if v.is_zero() {
                continue;
            }
            let value = match hbar {
                None => v.to_string(),
                Some(h) => {
                    let (re, im) = v.eval_f64(h);
                    format!("{re},{im}")
                }
            };
            entries.push(MatrixEntryJson { row, col, value });
        }
    }
    serde_json::to_string(&MatrixJson {
        dim: m.dim(),
        entries,
    })
    .expect("matrix serialization cannot fail")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::opalg::{ladder_map, quantize};
    use crate::series::Preset;

    fn qi(re_n: i64, re_d: i64, im_n: i64, im_d: i64) -> GaussianRational {
        GaussianRational::ratio_pair(re_n, re_d, im_n, im_d)
    }

    fn rad(c: GaussianRational, r: u64, h: u32) -> RadicalScalar {
        RadicalScalar::normalized(c, r, h)
    }

    #[test]
    fn ladder_entries() {
        let (a, adag) = ladder_matrices(3);
        assert_eq!(a.get(1, 2), &RadicalScalar::one());
        assert_eq!(a.get(2, 3), &rad(GaussianRational::one(), 2, 0));
        assert!(a.get(3, 1).is_zero());
        assert_eq!(adag.get(2, 1), &RadicalScalar::one());
        assert_eq!(adag.get(3, 2), &rad(GaussianRational::one(), 2, 0));

        let (a1, ad1) = ladder_matrices(1);
        assert!(a1.is_zero());
        assert!(ad1.is_zero());

        let (a4, _) = ladder_matrices(4);
        assert_eq!(a4.get(3, 4), &rad(GaussianRational::one(), 3, 0));
    }

    #[test]
    fn truncated_number_block() {
        // a a+ at dim 2 is diag(1, 0): the (2,2) slot is a truncation
        // artifact of the cutoff, not the untruncated value 2.
        let (a, adag) = ladder_matrices(2);
        let prod = a.mul(&adag).unwrap();
        assert_eq!(prod.get(1, 1), &RadicalScalar::one());
        assert!(prod.get(2, 2).is_zero());
    }

    #[test]
    fn identity_and_zero_laws() {
        let (a, _) = ladder_matrices(3);
        let id = FockMatrix::identity(3);
        assert_eq!(id.mul(&a).unwrap(), a);
        assert_eq!(a.add(&FockMatrix::zero(3)).unwrap(), a);
    }

    #[test]
    fn dim_mismatch_reported() {
        let a = FockMatrix::zero(2);
        let b = FockMatrix::zero(3);
        assert_eq!(a.mul(&b), Err(FockError::DimMismatch { left: 2, right: 3 }));
    }

    #[test]
    fn f_direct_unit_case() {
        assert_eq!(f_matrix_direct(0, 0, 4), FockMatrix::identity(4));
    }

    #[test]
    fn f_direct_number_operator() {
        let f = f_matrix_direct(1, 1, 4);
        for j in 1..=3u32 {
            assert_eq!(
                f.get(j as usize, j as usize),
                &RadicalScalar::gaussian_hbar(qi(0, 1, -(j as i64), 1), 1)
            );
        }
        assert!(f.get(4, 4).is_zero());
    }

    #[test]
    fn f_direct_2_1_superdiagonal() {
        // (j, j+1) = (-i hbar)^2 (j+1) sqrt(j) inside the safe range
        let f = f_matrix_direct(2, 1, 6);
        for j in 1..=4u32 {
            let expected = rad(GaussianRational::from_int(-((j as i64) + 1)), j as u64, 2);
            assert_eq!(f.get(j as usize, j as usize + 1), &expected, "j={j}");
        }
    }

    #[test]
    fn f_closed_examples() {
        let f02 = f_matrix_closed(0, 2, 5).unwrap();
        for j in 1..=3u64 {
            assert_eq!(
                f02.get(j as usize + 2, j as usize),
                &rad(GaussianRational::one(), j * (j + 1), 0)
            );
        }

        let f30 = f_matrix_closed(3, 0, 6).unwrap();
        for j in 1..=3u64 {
            assert_eq!(
                f30.get(j as usize, j as usize + 3),
                &rad(GaussianRational::i(), j * (j + 1) * (j + 2), 3)
            );
        }

        let f11 = f_matrix_closed(1, 1, 4).unwrap();
        for j in 1..=4i64 {
            assert_eq!(
                f11.get(j as usize, j as usize),
                &RadicalScalar::gaussian_hbar(qi(0, 1, -j, 1), 1)
            );
        }

        assert_eq!(
            f_matrix_closed(0, 0, 3),
            Err(FockError::UndefinedForUnitCase)
        );
    }

    #[test]
    fn closed_matches_direct_on_safe_blocks() {
        for m in 0..=4u32 {
            for n in 0..=4u32 {
                if m + n == 0 || m as usize >= 8 {
                    continue;
                }
                let direct = f_matrix_direct(m, n, 8);
                let closed = f_matrix_closed(m, n, 8).unwrap();
                let cmp = safe_block_equal(&direct, &closed, m as usize).unwrap();
                assert!(cmp.equal, "F({m},{n}): {:?}", cmp.first_mismatch);
            }
        }
    }

    #[test]
    fn block_comparison_margins() {
        // Truncated a a+ vs the closed-form number block at dim 2.
        let (a, adag) = ladder_matrices(2);
        let direct = a.mul(&adag).unwrap();
        let closed = f_matrix_closed(1, 1, 2)
            .unwrap()
            .scale(&RadicalScalar::gaussian_hbar(GaussianRational::i(), 0));
        // closed now holds hbar * diag(1, 2); rescale direct the same way.
        let direct = direct.scale(&RadicalScalar::gaussian_hbar(GaussianRational::one(), 1));
        assert!(safe_block_equal(&direct, &closed, 1).unwrap().equal);
        let full = safe_block_equal(&direct, &closed, 0).unwrap();
        assert!(!full.equal);
        let miss = full.first_mismatch.unwrap();
        assert_eq!((miss.row, miss.col), (2, 2));
    }

    #[test]
    fn block_comparison_ignores_corner_perturbation() {
        let mut a = FockMatrix::identity(4);
        let b = a.clone();
        a.set(4, 4, rad(GaussianRational::from_int(7), 5, 1));
        assert!(safe_block_equal(&a, &b, 1).unwrap().equal);
        assert!(!safe_block_equal(&a, &b, 0).unwrap().equal);
        assert_eq!(
            safe_block_equal(&a, &b, 4),
            Err(FockError::MarginTooLarge { margin: 4, dim: 4 })
        );
    }

    #[test]
    fn quantize_matrix_antistandard_gives_plain_blocks() {
        let ord = Ordering::preset(Preset::AntiStandard, 4);
        for (m, n) in [(1u32, 1u32), (2, 1), (0, 3)] {
            let poly = PhasePoly::monomial(m, n, 0, GaussianRational::one());
            assert_eq!(
                quantize_matrix(&poly, &ord, 5).unwrap(),
                f_matrix_direct(m, n, 5)
            );
        }
    }

    #[test]
    fn quantize_matrix_weyl_px() {
        let ord = Ordering::preset(Preset::Weyl, 2);
        let px = PhasePoly::monomial(1, 1, 0, GaussianRational::one());
        let expected = f_matrix_direct(1, 1, 4)
            .add(&FockMatrix::identity(4).scale(&RadicalScalar::gaussian_hbar(qi(0, 1, 1, 2), 1)))
            .unwrap();
        assert_eq!(quantize_matrix(&px, &ord, 4).unwrap(), expected);
    }

    #[test]
    fn quantize_matrix_born_jordan_px() {
        // s = 1 coefficient of the Born-Jordan image of p*x is i/2.
        let ord = Ordering::preset(Preset::BornJordan, 2);
        let px = PhasePoly::monomial(1, 1, 0, GaussianRational::one());
        let expected = f_matrix_direct(1, 1, 4)
            .add(&FockMatrix::identity(4).scale(&RadicalScalar::gaussian_hbar(qi(0, 1, 1, 2), 1)))
            .unwrap();
        assert_eq!(quantize_matrix(&px, &ord, 4).unwrap(), expected);
    }

    #[test]
    fn substitute_examples() {
        assert_eq!(substitute_aa(&AAPoly::one(), 3), FockMatrix::identity(3));

        let minus_ihbar_aad = AAPoly::monomial(1, 1, 1, qi(0, 1, -1, 1));
        let got = substitute_aa(&minus_ihbar_aad, 2);
        assert_eq!(
            got.get(1, 1),
            &RadicalScalar::gaussian_hbar(qi(0, 1, -1, 1), 1)
        );
        assert!(got.get(2, 2).is_zero());

        let adag = substitute_aa(&AAPoly::creator(), 3);
        assert_eq!(adag.get(2, 1), &RadicalScalar::one());
        assert_eq!(adag.get(3, 2), &rad(GaussianRational::one(), 2, 0));
    }

    #[test]
    fn representation_routes_agree_exactly() {
        let poly = &(&PhasePoly::monomial(2, 1, 0, qi(1, 2, 1, 3))
            + &PhasePoly::monomial(1, 2, 1, qi(-1, 1, 0, 1)))
            + &PhasePoly::monomial(0, 0, 0, qi(0, 1, 2, 1));
        for preset in crate::series::ALL_PRESETS {
            let ord = Ordering::preset(preset, 6);
            for dim in [1usize, 2, 5] {
                let direct = quantize_matrix(&poly, &ord, dim).unwrap();
                let via_ops = substitute_aa(&ladder_map(&quantize(&poly, &ord).unwrap()), dim);
                assert_eq!(direct, via_ops, "{} dim={dim}", preset.name());
            }
        }
    }

    #[test]
    fn json_rendering() {
        let f = f_matrix_direct(1, 1, 3);
        assert_eq!(
            matrix_to_json(&f, None),
            r#"{"dim":3,"entries":[{"row":1,"col":1,"value":"-i*hbar"},{"row":2,"col":2,"value":"-2i*hbar"}]}"#
        );
        assert_eq!(
            matrix_to_json(&FockMatrix::zero(2), None),
            r#"{"dim":2,"entries":[]}"#
        );
        let numeric = matrix_to_json(&f, Some(2.0));
        assert!(numeric.contains(r#""value":"0,-2""#), "{numeric}");
    }
}
