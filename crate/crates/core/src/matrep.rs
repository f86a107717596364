//! Matrix models and the linear algebra used to certify bases.
//!
//! `GaussRes` is `Z/n[i]/(i^2 + 1)`. Hamilton and `(1, 1)` quaternions embed
//! into 2x2 matrices over it:
//!
//! ```text
//! H:  x0 + x1 i + x2 j + x3 k  ->  [[x0 - x1 i, -x2 + x3 i], [x2 + x3 i, x0 + x1 i]]
//! L:  x0 + x1 i + x2 j + x3 k  ->  [[x0 - x3 i,  x1 + x2 i], [x1 - x2 i, x0 + x3 i]]
//! ```
//!
//! In the L image the generator `i` goes to `[[0, 1], [1, 0]]` and `j` to
//! `[[0, i], [-i, 0]]`, both squaring to the identity.

use std::ops::{Add, Mul, Neg, Sub};

use serde::ser::SerializeSeq;
use serde::{Serialize, Serializer};
use thiserror::Error;

use crate::modint::{add_mod, gcd, inv_mod, mul_mod, reduce, sub_mod};
use crate::quat::{Quaternion, RingParams};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MatrepError {
    #[error("expected the ring {expected}, got {actual}")]
    WrongRing {
        expected: RingParams,
        actual: RingParams,
    },
}

/// `re + im * i` with `i^2 = -1`, both parts canonical mod `n`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct GaussRes {
    pub re: u64,
    pub im: u64,
    pub n: u64,
}

impl GaussRes {
    pub fn new(re: i64, im: i64, n: u64) -> Self {
        GaussRes {
            re: reduce(re as i128, n),
            im: reduce(im as i128, n),
            n,
        }
    }

    pub fn from_parts(re: u64, im: u64, n: u64) -> Self {
        GaussRes {
            re: re % n,
            im: im % n,
            n,
        }
    }

    pub fn zero(n: u64) -> Self {
        GaussRes::from_parts(0, 0, n)
    }

    pub fn one(n: u64) -> Self {
        GaussRes::from_parts(1, 0, n)
    }

    pub fn unit_i(n: u64) -> Self {
        GaussRes::from_parts(0, 1, n)
    }

    pub fn conj(&self) -> Self {
        GaussRes {
            re: self.re,
            im: sub_mod(0, self.im, self.n),
            n: self.n,
        }
    }

    pub fn scale(&self, c: u64) -> Self {
        GaussRes {
            re: mul_mod(self.re, c, self.n),
            im: mul_mod(self.im, c, self.n),
            n: self.n,
        }
    }
}

impl Serialize for GaussRes {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        [self.re, self.im].serialize(serializer)
    }
}

impl Add for GaussRes {
    type Output = GaussRes;
    fn add(self, rhs: GaussRes) -> GaussRes {
        assert_eq!(self.n, rhs.n);
        GaussRes {
            re: add_mod(self.re, rhs.re, self.n),
            im: add_mod(self.im, rhs.im, self.n),
            n: self.n,
        }
    }
}

impl Neg for GaussRes {
    type Output = GaussRes;
    fn neg(self) -> GaussRes {
        GaussRes {
            re: sub_mod(0, self.re, self.n),
            im: sub_mod(0, self.im, self.n),
            n: self.n,
        }
    }
}

impl Sub for GaussRes {
    type Output = GaussRes;
    fn sub(self, rhs: GaussRes) -> GaussRes {
        self + (-rhs)
    }
}

impl Mul for GaussRes {
    type Output = GaussRes;
    fn mul(self, rhs: GaussRes) -> GaussRes {
        assert_eq!(self.n, rhs.n);
        let n = self.n;
        GaussRes {
            re: sub_mod(mul_mod(self.re, rhs.re, n), mul_mod(self.im, rhs.im, n), n),
            im: add_mod(mul_mod(self.re, rhs.im, n), mul_mod(self.im, rhs.re, n), n),
            n,
        }
    }
}

/// 2x2 matrix over `GaussRes`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(transparent)]
pub struct Mat2G {
    pub entries: [[GaussRes; 2]; 2],
}

impl Mat2G {
    pub fn new(entries: [[GaussRes; 2]; 2]) -> Self {
        Mat2G { entries }
    }

    pub fn identity(n: u64) -> Self {
        Mat2G::scalar(GaussRes::one(n))
    }

    pub fn scalar(c: GaussRes) -> Self {
        let z = GaussRes::zero(c.n);
        Mat2G {
            entries: [[c, z], [z, c]],
        }
    }

    pub fn modulus(&self) -> u64 {
        self.entries[0][0].n
    }
}

impl Mul for Mat2G {
    type Output = Mat2G;
    fn mul(self, rhs: Mat2G) -> Mat2G {
        let (l, r) = (self.entries, rhs.entries);
        let cell = |i: usize, j: usize| l[i][0] * r[0][j] + l[i][1] * r[1][j];
        Mat2G {
            entries: [[cell(0, 0), cell(0, 1)], [cell(1, 0), cell(1, 1)]],
        }
    }
}

impl Add for Mat2G {
    type Output = Mat2G;
    fn add(self, rhs: Mat2G) -> Mat2G {
        let (l, r) = (self.entries, rhs.entries);
        Mat2G {
            entries: [
                [l[0][0] + r[0][0], l[0][1] + r[0][1]],
                [l[1][0] + r[1][0], l[1][1] + r[1][1]],
            ],
        }
    }
}

impl Neg for Mat2G {
    type Output = Mat2G;
    fn neg(self) -> Mat2G {
        Mat2G {
            entries: self.entries.map(|row| row.map(|e| -e)),
        }
    }
}

/// 2x2 matrix over `Z/n`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Mat2Z {
    pub entries: [[u64; 2]; 2],
    pub n: u64,
}

impl Mat2Z {
    pub fn new(entries: [[i64; 2]; 2], n: u64) -> Self {
        Mat2Z {
            entries: entries.map(|row| row.map(|e| reduce(e as i128, n))),
            n,
        }
    }

    pub fn from_entries(entries: [[u64; 2]; 2], n: u64) -> Self {
        Mat2Z {
            entries: entries.map(|row| row.map(|e| e % n)),
            n,
        }
    }

    pub fn identity(n: u64) -> Self {
        Mat2Z::scalar(1, n)
    }

    pub fn scalar(c: u64, n: u64) -> Self {
        Mat2Z::from_entries([[c, 0], [0, c]], n)
    }

    /// Entries read row by row, `(X, Y, Z, T)` for `[[X, Y], [Z, T]]`.
    pub fn flat(&self) -> [u64; 4] {
        let e = self.entries;
        [e[0][0], e[0][1], e[1][0], e[1][1]]
    }
}

impl Serialize for Mat2Z {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let mut seq = serializer.serialize_seq(Some(2))?;
        for row in &self.entries {
            seq.serialize_element(row)?;
        }
        seq.end()
    }
}

impl Mul for Mat2Z {
    type Output = Mat2Z;
    fn mul(self, rhs: Mat2Z) -> Mat2Z {
        assert_eq!(self.n, rhs.n);
        let n = self.n;
        let (l, r) = (self.entries, rhs.entries);
        let cell = |i: usize, j: usize| add_mod(mul_mod(l[i][0], r[0][j], n), mul_mod(l[i][1], r[1][j], n), n);
        Mat2Z {
            entries: [[cell(0, 0), cell(0, 1)], [cell(1, 0), cell(1, 1)]],
            n,
        }
    }
}

impl Add for Mat2Z {
    type Output = Mat2Z;
    fn add(self, rhs: Mat2Z) -> Mat2Z {
        assert_eq!(self.n, rhs.n);
        let n = self.n;
        let (l, r) = (self.entries, rhs.entries);
        Mat2Z {
            entries: [
                [add_mod(l[0][0], r[0][0], n), add_mod(l[0][1], r[0][1], n)],
                [add_mod(l[1][0], r[1][0], n), add_mod(l[1][1], r[1][1], n)],
            ],
            n,
        }
    }
}

fn require(params: RingParams, expected: RingParams) -> Result<(), MatrepError> {
    if params != expected {
        return Err(MatrepError::WrongRing {
            expected,
            actual: params,
        });
    }
    Ok(())
}

/// The Hamilton block embedding; requires `(a, b) = (-1, -1)`.
pub fn embed_h(z: &Quaternion) -> Result<Mat2G, MatrepError> {
    let p = z.params();
    require(p, RingParams::hamilton(p.n()).expect("n >= 2"))?;
    let n = p.n();
    let [x0, x1, x2, x3] = z.coeffs();
    let neg = |v: u64| sub_mod(0, v, n);
    Ok(Mat2G::new([
        [GaussRes::from_parts(x0, neg(x1), n), GaussRes::from_parts(neg(x2), x3, n)],
        [GaussRes::from_parts(x2, x3, n), GaussRes::from_parts(x0, x1, n)],
    ]))
}

/// The `(1, 1)` block embedding; requires `(a, b) = (1, 1)`.
pub fn embed_l(z: &Quaternion) -> Result<Mat2G, MatrepError> {
    let p = z.params();
    require(p, RingParams::ell(p.n()).expect("n >= 2"))?;
    let n = p.n();
    let [x0, x1, x2, x3] = z.coeffs();
    let neg = |v: u64| sub_mod(0, v, n);
    Ok(Mat2G::new([
        [GaussRes::from_parts(x0, neg(x3), n), GaussRes::from_parts(x1, x2, n)],
        [GaussRes::from_parts(x1, neg(x2), n), GaussRes::from_parts(x0, x3, n)],
    ]))
}

/// Inverse of [`embed_l`] on its image: `None` when `m` is not of the L block form.
pub fn unembed_l(m: &Mat2G) -> Option<[u64; 4]> {
    let n = m.modulus();
    let [[d0, u], [l, d1]] = m.entries;
    let (x0, x3) = (d1.re, d1.im);
    let (x1, x2) = (u.re, u.im);
    let coeffs = [x0, x1, x2, x3];
    let params = RingParams::ell(n).ok()?;
    let back = embed_l(&Quaternion::from_coeffs(params, coeffs)).ok()?;
    (back.entries[0][0] == d0 && back.entries[1][0] == l).then_some(coeffs)
}

/// 4x4 matrix over `Z/n`, indexed `[row][column]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Mat4 {
    pub rows: [[u64; 4]; 4],
    pub n: u64,
}

fn det3(m: &[[u64; 3]; 3], n: u64) -> u64 {
    let term = |a: u64, b: u64, c: u64| mul_mod(mul_mod(a, b, n), c, n);
    let plus = add_mod(
        add_mod(term(m[0][0], m[1][1], m[2][2]), term(m[0][1], m[1][2], m[2][0]), n),
        term(m[0][2], m[1][0], m[2][1]),
        n,
    );
    let minus = add_mod(
        add_mod(term(m[0][2], m[1][1], m[2][0]), term(m[0][0], m[1][2], m[2][1]), n),
        term(m[0][1], m[1][0], m[2][2]),
        n,
    );
    sub_mod(plus, minus, n)
}

impl Mat4 {
    pub fn identity(n: u64) -> Self {
        Mat4::diagonal([1, 1, 1, 1], n)
    }

    pub fn diagonal(d: [u64; 4], n: u64) -> Self {
        let mut rows = [[0u64; 4]; 4];
        for (t, v) in d.iter().enumerate() {
            rows[t][t] = v % n;
        }
        Mat4 { rows, n }
    }

    pub fn from_columns(columns: [[u64; 4]; 4], n: u64) -> Self {
        let mut rows = [[0u64; 4]; 4];
        for (c, col) in columns.iter().enumerate() {
            for (r, v) in col.iter().enumerate() {
                rows[r][c] = v % n;
            }
        }
        Mat4 { rows, n }
    }

    pub fn column(&self, c: usize) -> [u64; 4] {
        [self.rows[0][c], self.rows[1][c], self.rows[2][c], self.rows[3][c]]
    }

    fn minor(&self, row: usize, col: usize) -> u64 {
        let mut sub = [[0u64; 3]; 3];
        for (si, r) in (0..4).filter(|&r| r != row).enumerate() {
            for (sj, c) in (0..4).filter(|&c| c != col).enumerate() {
                sub[si][sj] = self.rows[r][c];
            }
        }
        det3(&sub, self.n)
    }

    fn cofactor(&self, row: usize, col: usize) -> u64 {
        let m = self.minor(row, col);
        if (row + col) % 2 == 0 {
            m
        } else {
            sub_mod(0, m, self.n)
        }
    }

    /// Cofactor expansion along the first row; no division is ever needed.
    pub fn det(&self) -> u64 {
        (0..4).fold(0, |acc, c| {
            add_mod(acc, mul_mod(self.rows[0][c], self.cofactor(0, c), self.n), self.n)
        })
    }

    pub fn is_invertible(&self) -> bool {
        gcd(self.det(), self.n) == 1
    }

    /// `adj(M) * det(M)^{-1}` when the determinant is a unit.
    pub fn inverse(&self) -> Option<Mat4> {
        let det_inv = inv_mod(self.det(), self.n).ok()?;
        let mut rows = [[0u64; 4]; 4];
        for (r, row) in rows.iter_mut().enumerate() {
            for (c, v) in row.iter_mut().enumerate() {
                *v = mul_mod(self.cofactor(c, r), det_inv, self.n);
            }
        }
        Some(Mat4 { rows, n: self.n })
    }

    pub fn mul_vec(&self, v: &[u64; 4]) -> [u64; 4] {
        let n = self.n;
        self.rows
            .map(|row| (0..4).fold(0, |acc, c| add_mod(acc, mul_mod(row[c], v[c], n), n)))
    }
}

impl Mul for Mat4 {
    type Output = Mat4;
    fn mul(self, rhs: Mat4) -> Mat4 {
        assert_eq!(self.n, rhs.n);
        let cols = [0, 1, 2, 3].map(|c| self.mul_vec(&rhs.column(c)));
        Mat4::from_columns(cols, self.n)
    }
}

/// True iff `gcd(det(M), n) = 1`.
pub fn is_invertible_mod_n(m: &Mat4) -> bool {
    m.is_invertible()
}

/// Columns are the coefficient vectors of the four elements.
pub fn basis_matrix(g: [&Quaternion; 4]) -> Mat4 {
    let n = g[0].params().n();
    Mat4::from_columns(g.map(|q| q.coeffs()), n)
}

/// Columns are the entries `(X, Y, Z, T)` of the four matrices.
pub fn basis_matrix_m2(g: [&Mat2Z; 4]) -> Mat4 {
    Mat4::from_columns(g.map(|m| m.flat()), g[0].n)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quat::enumerate_elements;

    #[test]
    fn embed_h_examples() {
        let p = RingParams::hamilton(5).unwrap();
        assert_eq!(embed_h(&Quaternion::one(p)).unwrap(), Mat2G::identity(5));
        let ei = embed_h(&Quaternion::i(p)).unwrap();
        assert_eq!(ei * ei, -Mat2G::identity(5));
        assert!(embed_h(&Quaternion::one(RingParams::ell(5).unwrap())).is_err());
    }

    #[test]
    fn embed_l_examples() {
        let p = RingParams::ell(8).unwrap();
        assert_eq!(embed_l(&Quaternion::one(p)).unwrap(), Mat2G::identity(8));
        let ej = embed_l(&Quaternion::j(p)).unwrap();
        assert_eq!(ej * ej, Mat2G::identity(8));
        let ei = embed_l(&Quaternion::i(p)).unwrap();
        assert_eq!(ei * ei, Mat2G::identity(8));
        assert!(embed_l(&Quaternion::one(RingParams::hamilton(8).unwrap())).is_err());
    }

    fn check_hom(params: RingParams, embed: fn(&Quaternion) -> Result<Mat2G, MatrepError>, step: usize) {
        let all: Vec<_> = enumerate_elements(params, u128::MAX).unwrap().collect();
        let mut images = std::collections::HashSet::new();
        for z in &all {
            assert!(images.insert(embed(z).unwrap()), "not injective");
        }
        for z in all.iter().step_by(step) {
            for w in all.iter().step_by(step) {
                assert_eq!(embed(&(*z * *w)).unwrap(), embed(z).unwrap() * embed(w).unwrap());
                assert_eq!(embed(&(*z + *w)).unwrap(), embed(z).unwrap() + embed(w).unwrap());
            }
        }
    }

    #[test]
    fn embeddings_are_injective_homomorphisms_mod_3() {
        check_hom(RingParams::hamilton(3).unwrap(), embed_h, 1);
        check_hom(RingParams::ell(3).unwrap(), embed_l, 1);
    }

    #[test]
    fn embeddings_multiplicative_at_larger_moduli() {
        check_hom(RingParams::hamilton(5).unwrap(), embed_h, 7);
        check_hom(RingParams::ell(8).unwrap(), embed_l, 13);
    }

    #[test]
    fn unembed_round_trips() {
        let p = RingParams::ell(16).unwrap();
        for z in enumerate_elements(p, u128::MAX).unwrap().step_by(101) {
            assert_eq!(unembed_l(&embed_l(&z).unwrap()), Some(z.coeffs()));
        }
        let h = embed_h(&Quaternion::j(RingParams::hamilton(16).unwrap())).unwrap();
        assert_eq!(unembed_l(&h), None);
    }

    #[test]
    fn basis_matrix_examples() {
        for (n, a, b) in [(5u64, -1i64, -1i64), (8, 3, 5), (12, 5, 7)] {
            let p = RingParams::new(n, a, b).unwrap();
            let m = basis_matrix([
                &Quaternion::one(p),
                &Quaternion::i(p),
                &Quaternion::j(p),
                &Quaternion::k(p),
            ]);
            assert_eq!(m, Mat4::identity(n));
        }
        let p = RingParams::hamilton(3).unwrap();
        let (j, k) = (Quaternion::j(p), Quaternion::k(p));
        let m = basis_matrix([&Quaternion::one(p), &Quaternion::i(p), &(j + k), &(j - k)]);
        // det [[1,1],[1,-1]] = -2 = 1 mod 3
        assert_eq!(m.det(), 1);
        assert!(is_invertible_mod_n(&m));
        let dup = basis_matrix([&Quaternion::one(p), &Quaternion::i(p), &j, &j]);
        assert!(!is_invertible_mod_n(&dup));
    }

    #[test]
    fn invertibility_examples() {
        assert!(is_invertible_mod_n(&Mat4::identity(8)));
        assert!(!is_invertible_mod_n(&Mat4::diagonal([1, 1, 1, 2], 8)));
        assert!(is_invertible_mod_n(&Mat4::diagonal([1, 1, 1, 2], 9)));
    }

    #[test]
    fn inverse_multiplies_to_identity() {
        let m = Mat4 {
            rows: [[1, 2, 3, 4], [0, 1, 5, 6], [7, 0, 1, 2], [3, 3, 0, 1]],
            n: 101,
        };
        let inv = m.inverse().unwrap();
        assert_eq!(m * inv, Mat4::identity(101));
        assert_eq!(inv * m, Mat4::identity(101));
        assert!(Mat4::diagonal([1, 1, 1, 2], 8).inverse().is_none());
    }

    #[test]
    fn mat2z_json_shape() {
        let m = Mat2Z::new([[0, -1], [1, 0]], 5);
        assert_eq!(serde_json::to_string(&m).unwrap(), "[[0,4],[1,0]]");
        let g = Mat2G::identity(5);
        assert_eq!(serde_json::to_string(&g).unwrap(), "[[[1,0],[0,0]],[[0,0],[1,0]]]");
    }
}
