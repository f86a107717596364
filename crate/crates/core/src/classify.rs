//! Classification of `(a, b / Z/nZ)` and isomorphism witnesses.
//!
//! A ring isomorphism out of `(a, b / Z/n)` is determined by the images of
//! `i` and `j`: they must square to `a` and `b`, anticommute, and together
//! with `1` and their product span the target freely. A witness records those
//! images for every prime-power factor of `n` and is checked factor by factor.
//!
//! Odd prime powers always split: with `b = u^2 - a v^2` the matrices
//! `A = [[0, a], [1, 0]]` and `B = [[u, -a v], [v, -u]]` generate `M2(Z/p^s)`.
//! Powers of two are walked through a fixed table indexed by `(a mod 8, b mod 8)`
//! using three moves: rescaling a generator by a 2-adic square root, the swap
//! `(a, b) -> (-ab, a)`, and one of three explicit endpoint maps.

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::congruence::{solve_binary_form_odd, solve_scalar_square_2adic, CongruenceError};
use crate::matrep::{basis_matrix, basis_matrix_m2, unembed_l, GaussRes, Mat2G, Mat2Z, Mat4};
use crate::modint::{factorize, gcd, reduce, ModError, Residue};
use crate::quat::{QuatError, Quaternion, RingParams};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ClassifyError {
    #[error(transparent)]
    Modulus(#[from] ModError),
    #[error(transparent)]
    Ring(#[from] QuatError),
    #[error(transparent)]
    Congruence(#[from] CongruenceError),
    #[error("{0}")]
    Domain(String),
}

/// Canonical target of the classification.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Tag {
    #[serde(rename = "HAMILTON")]
    Hamilton,
    #[serde(rename = "ELL")]
    Ell,
}

impl Tag {
    pub fn opposite(self) -> Tag {
        match self {
            Tag::Hamilton => Tag::Ell,
            Tag::Ell => Tag::Hamilton,
        }
    }

    /// `(-1, -1)` or `(1, 1)` over `Z/n`.
    pub fn params(self, n: u64) -> Result<RingParams, QuatError> {
        match self {
            Tag::Hamilton => RingParams::hamilton(n),
            Tag::Ell => RingParams::ell(n),
        }
    }
}

impl fmt::Display for Tag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Tag::Hamilton => "HAMILTON",
            Tag::Ell => "ELL",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct CanonicalClass {
    pub tag: Tag,
    /// Isomorphic to `M2(Z/n)`; exactly when `n` is odd.
    pub split: bool,
    /// Both tags name isomorphic rings; exactly when `4` does not divide `n`.
    pub collapse: bool,
}

/// Hamilton class iff `a = b = -1 (mod 4)`, read off the integers as given.
///
/// When `4 | n` this only depends on `a, b mod n`. Otherwise both classes
/// coincide and `collapse` is set.
pub fn classify(n: u64, a: i64, b: i64) -> Result<CanonicalClass, ClassifyError> {
    RingParams::new(n, a, b)?;
    let hamilton = a.rem_euclid(4) == 3 && b.rem_euclid(4) == 3;
    Ok(CanonicalClass {
        tag: if hamilton { Tag::Hamilton } else { Tag::Ell },
        split: n % 2 == 1,
        collapse: n % 4 != 0,
    })
}

/// The relation that a candidate generator pair violates.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Relation {
    #[serde(rename = "phi(i)^2 = a")]
    SquareI,
    #[serde(rename = "phi(j)^2 = b")]
    SquareJ,
    #[serde(rename = "phi(i)phi(j) = -phi(j)phi(i)")]
    Anticommute,
    #[serde(rename = "basis {1, phi(i), phi(j), phi(i)phi(j)}")]
    Basis,
}

impl fmt::Display for Relation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Relation::SquareI => "phi(i)^2 = a",
            Relation::SquareJ => "phi(j)^2 = b",
            Relation::Anticommute => "phi(i)phi(j) = -phi(j)phi(i)",
            Relation::Basis => "basis {1, phi(i), phi(j), phi(i)phi(j)}",
        })
    }
}

/// A free rank-4 `Z/m`-algebra in which generator images can be checked.
pub trait WitnessAlgebra: Copy + PartialEq {
    fn modulus(&self) -> u64;
    fn mul(&self, rhs: &Self) -> Self;
    fn add(&self, rhs: &Self) -> Self;
    fn scalar_like(&self, c: u64) -> Self;
    /// Coordinates in the algebra's canonical basis.
    fn coords(&self) -> [u64; 4];
}

impl WitnessAlgebra for Quaternion {
    fn modulus(&self) -> u64 {
        self.params().n()
    }
    fn mul(&self, rhs: &Self) -> Self {
        *self * *rhs
    }
    fn add(&self, rhs: &Self) -> Self {
        *self + *rhs
    }
    fn scalar_like(&self, c: u64) -> Self {
        Quaternion::from_coeffs(self.params(), [c, 0, 0, 0])
    }
    fn coords(&self) -> [u64; 4] {
        self.coeffs()
    }
}

impl WitnessAlgebra for Mat2Z {
    fn modulus(&self) -> u64 {
        self.n
    }
    fn mul(&self, rhs: &Self) -> Self {
        *self * *rhs
    }
    fn add(&self, rhs: &Self) -> Self {
        *self + *rhs
    }
    fn scalar_like(&self, c: u64) -> Self {
        Mat2Z::scalar(c, self.n)
    }
    fn coords(&self) -> [u64; 4] {
        self.flat()
    }
}

/// Every relation among `I^2 = a`, `J^2 = b`, `IJ + JI = 0` and the basis
/// condition that fails for the pair `(I, J)`.
pub fn relation_violations<T: WitnessAlgebra>(a: u64, b: u64, gi: &T, gj: &T) -> Vec<Relation> {
    let m = gi.modulus();
    let mut bad = Vec::new();
    if gi.mul(gi) != gi.scalar_like(a % m) {
        bad.push(Relation::SquareI);
    }
    if gj.mul(gj) != gj.scalar_like(b % m) {
        bad.push(Relation::SquareJ);
    }
    let ij = gi.mul(gj);
    if ij.add(&gj.mul(gi)) != gi.scalar_like(0) {
        bad.push(Relation::Anticommute);
    }
    let one = gi.scalar_like(1);
    let basis = Mat4::from_columns([one.coords(), gi.coords(), gj.coords(), ij.coords()], m);
    if !basis.is_invertible() {
        bad.push(Relation::Basis);
    }
    bad
}

/// A homomorphism between two quaternion rings over the same `Z/m`, given by
/// the images of the source generators.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct QuatMap {
    pub source: RingParams,
    pub target: RingParams,
    pub phi_i: Quaternion,
    pub phi_j: Quaternion,
}

impl QuatMap {
    pub fn new(source: RingParams, phi_i: Quaternion, phi_j: Quaternion) -> Self {
        assert_eq!(source.n(), phi_i.params().n());
        assert_eq!(phi_i.params(), phi_j.params());
        QuatMap {
            source,
            target: phi_i.params(),
            phi_i,
            phi_j,
        }
    }

    pub fn identity(params: RingParams) -> Self {
        QuatMap::new(params, Quaternion::i(params), Quaternion::j(params))
    }

    /// Columns are the images of `1, i, j, k` in target coordinates.
    pub fn matrix(&self) -> Mat4 {
        let k = self.phi_i * self.phi_j;
        basis_matrix([&Quaternion::one(self.target), &self.phi_i, &self.phi_j, &k])
    }

    pub fn apply(&self, z: &Quaternion) -> Quaternion {
        assert_eq!(z.params(), self.source);
        Quaternion::from_coeffs(self.target, self.matrix().mul_vec(&z.coeffs()))
    }

    /// `next` after `self`.
    pub fn then(&self, next: &QuatMap) -> QuatMap {
        assert_eq!(self.target, next.source, "maps do not compose");
        QuatMap::new(self.source, next.apply(&self.phi_i), next.apply(&self.phi_j))
    }

    /// The inverse map, when the image basis is invertible.
    pub fn inverse(&self) -> Option<QuatMap> {
        let inv = self.matrix().inverse()?;
        Some(QuatMap::new(
            self.target,
            Quaternion::from_coeffs(self.source, inv.column(1)),
            Quaternion::from_coeffs(self.source, inv.column(2)),
        ))
    }

    pub fn violations(&self) -> Vec<Relation> {
        relation_violations(
            self.source.a().value(),
            self.source.b().value(),
            &self.phi_i,
            &self.phi_j,
        )
    }

    pub fn is_isomorphism(&self) -> bool {
        self.violations().is_empty()
    }
}

fn params_mod(m: u64, a: i64, b: i64) -> Result<RingParams, ClassifyError> {
    Ok(RingParams::new(m, a, b)?)
}

/// Solution `(u, v)` of `b = u^2 - a v^2 (mod p^s)` and the matrices it yields.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SplitWitness {
    pub u: u64,
    pub v: u64,
    pub image_i: Mat2Z,
    pub image_j: Mat2Z,
}

/// `(a, b / Z/p^s) = M2(Z/p^s)` for an odd prime `p`.
pub fn witness_odd_prime_power(p: u64, s: u32, a: i64, b: i64) -> Result<SplitWitness, ClassifyError> {
    if p % 2 == 0 {
        return Err(ClassifyError::Domain(format!("{p} is not an odd prime")));
    }
    let m = p
        .checked_pow(s)
        .ok_or_else(|| ClassifyError::Domain(format!("{p}^{s} overflows")))?;
    let ar = reduce(a as i128, m);
    let br = reduce(b as i128, m);
    params_mod(m, a, b)?;
    let (u, v) = solve_binary_form_odd(1, -(ar as i64), br as i64, p, s)?;
    let neg_av = reduce(-((ar as i128) * (v as i128)), m);
    let image_i = Mat2Z::from_entries([[0, ar], [1, 0]], m);
    let image_j = Mat2Z::from_entries([[u, neg_av], [v, (m - u) % m]], m);
    Ok(SplitWitness {
        u,
        v,
        image_i,
        image_j,
    })
}

fn two_power(s: u32) -> Result<u64, ClassifyError> {
    if s == 0 || s > 62 {
        return Err(ClassifyError::Domain(format!("unsupported exponent 2^{s}")));
    }
    Ok(1u64 << s)
}

/// `(a', b' / Z/2^s) -> (a, b / Z/2^s)` sending `i' -> alpha^{-1} i` and
/// `j' -> beta^{-1} j`, where `a' alpha^2 = a` and `b' beta^2 = b`.
///
/// Needs `a = a'` and `b = b'` modulo `2^min(s, 3)`.
pub fn rescale_step(s: u32, from: (i64, i64), to: (i64, i64)) -> Result<QuatMap, ClassifyError> {
    let m = two_power(s)?;
    let source = params_mod(m, to.0, to.1)?;
    let target = params_mod(m, from.0, from.1)?;
    let alpha = solve_scalar_square_2adic(to.0, from.0, s)?;
    let beta = solve_scalar_square_2adic(to.1, from.1, s)?;
    let alpha_inv = Residue::new(alpha, m).inverse()?;
    let beta_inv = Residue::new(beta, m).inverse()?;
    Ok(QuatMap::new(
        source,
        Quaternion::i(target).scale(alpha_inv),
        Quaternion::j(target).scale(beta_inv),
    ))
}

/// `(-ab, a / Z/2^s) -> (a, b / Z/2^s)` sending `i' -> k` and `j' -> i`.
///
/// Then `k' = ki = -a j`, so the image basis is `{1, k, i, -a j}`.
pub fn swap_step(s: u32, a: i64, b: i64) -> Result<QuatMap, ClassifyError> {
    let m = two_power(s)?;
    let target = params_mod(m, a, b)?;
    let source = params_mod(m, -((a as i128 * b as i128) % m as i128) as i64, a)?;
    Ok(QuatMap::new(source, Quaternion::k(target), Quaternion::i(target)))
}

/// `(1, beta / Z/2^s)` into the `(1, 1)` matrix model.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct OneBetaWitness {
    pub beta: i64,
    pub eta: i64,
    pub theta: i64,
    /// `[[0, i], [-i, 0]]`, squaring to the identity.
    pub image_i: Mat2G,
    /// `[[eta i, theta], [theta, -eta i]]`, squaring to `beta`.
    pub image_j: Mat2G,
}

impl OneBetaWitness {
    /// The same map with images read back as `(1, 1)` quaternions.
    pub fn quat_map(&self) -> Result<QuatMap, ClassifyError> {
        let m = self.image_i.modulus();
        let source = params_mod(m, 1, self.beta)?;
        let target = RingParams::ell(m)?;
        let read = |g: &Mat2G| {
            unembed_l(g)
                .map(|c| Quaternion::from_coeffs(target, c))
                .ok_or_else(|| ClassifyError::Domain("image outside the (1, 1) model".into()))
        };
        Ok(QuatMap::new(source, read(&self.image_i)?, read(&self.image_j)?))
    }
}

/// Exact integer pairs with `theta^2 - eta^2 = beta`.
const ONE_BETA_PAIRS: [(i64, i64, i64); 4] = [(-1, 1, 0), (1, 0, 1), (3, 1, 2), (5, 2, 3)];

pub fn endpoint_one_beta(beta: i64, s: u32) -> Result<OneBetaWitness, ClassifyError> {
    let m = two_power(s)?;
    let &(_, eta, theta) = ONE_BETA_PAIRS
        .iter()
        .find(|(b, _, _)| *b == beta)
        .ok_or_else(|| ClassifyError::Domain(format!("beta = {beta} is not one of -1, 1, 3, 5")))?;
    let g = |re: i64, im: i64| GaussRes::new(re, im, m);
    Ok(OneBetaWitness {
        beta,
        eta,
        theta,
        image_i: Mat2G::new([[g(0, 0), g(0, 1)], [g(0, -1), g(0, 0)]]),
        image_j: Mat2G::new([[g(0, eta), g(theta, 0)], [g(theta, 0), g(0, -eta)]]),
    })
}

/// `(-1, 5 / Z/2^s) -> (-1, 1 / Z/2^s)` with `i' -> i`, `j' -> j + 2k`.
///
/// In `(-1, 1)` both `j` and `k` square to 1 and anticommute, so
/// `(eta j + theta k)^2 = eta^2 + theta^2`, which is 5 for `(1, 2)`.
pub fn endpoint_minus_one_five(s: u32) -> Result<QuatMap, ClassifyError> {
    let m = two_power(s)?;
    let source = params_mod(m, -1, 5)?;
    let target = params_mod(m, -1, 1)?;
    Ok(QuatMap::new(
        source,
        Quaternion::i(target),
        Quaternion::new(target, [0, 0, 1, 2]),
    ))
}

/// `(-1, 3 / Z/2^s) -> (-1, -1 / Z/2^s)`: rescale to `(-1, -5)` (since
/// `3 = -5 mod 8`), then `i' -> i`, `j' -> j + 2k`, using
/// `(eta j + theta k)^2 = -(eta^2 + theta^2) = -5` in the Hamilton ring.
pub fn endpoint_minus_one_three(s: u32) -> Result<QuatMap, ClassifyError> {
    let m = two_power(s)?;
    let to_minus_five = rescale_step(s, (-1, 3), (-1, -5))?
        .inverse()
        .ok_or_else(|| ClassifyError::Domain("rescale is not invertible".into()))?;
    let hamilton = RingParams::hamilton(m)?;
    let into_h = QuatMap::new(
        params_mod(m, -1, -5)?,
        Quaternion::i(hamilton),
        Quaternion::new(hamilton, [0, 0, 1, 2]),
    );
    Ok(to_minus_five.then(&into_h))
}

/// One move in the 2-power reduction.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Move {
    /// Rescale generators onto the given representatives.
    Rescale(i64, i64),
    /// `(a, b) -> (-ab, a)`.
    Swap,
    /// `(1, beta) -> (1, 1)`.
    OneBeta(i64),
    /// `(-1, 5) -> (-1, 1)`.
    MinusOneFive,
    /// `(-1, 3) -> (-1, -1)`.
    MinusOneThree,
}

impl fmt::Display for Move {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Move::Rescale(a, b) => write!(f, "rescale({a},{b})"),
            Move::Swap => f.write_str("swap"),
            Move::OneBeta(beta) => write!(f, "endpoint_one_beta({beta})"),
            Move::MinusOneFive => f.write_str("endpoint_minus_one_five"),
            Move::MinusOneThree => f.write_str("endpoint_minus_one_three"),
        }
    }
}

/// A row of the reduction table.
#[derive(Debug, Clone, Copy)]
pub struct ChainRow {
    pub residues: (u64, u64),
    pub target: Tag,
    pub moves: &'static [Move],
    pub reason: &'static str,
}

use Move::*;

/// Move sequences for every `(a mod 8, b mod 8)`. Two swaps send `(a, b)` to
/// `(b, -ab)` modulo squares, three swaps are the identity.
pub const CHAIN_TABLE: [ChainRow; 16] = [
    ChainRow { residues: (1, 1), target: Tag::Ell, moves: &[Rescale(1, 1), OneBeta(1)], reason: "already (1, 1)" },
    ChainRow { residues: (1, 3), target: Tag::Ell, moves: &[Rescale(1, 3), OneBeta(3)], reason: "(1, beta) endpoint" },
    ChainRow { residues: (1, 5), target: Tag::Ell, moves: &[Rescale(1, 5), OneBeta(5)], reason: "(1, beta) endpoint" },
    ChainRow { residues: (1, 7), target: Tag::Ell, moves: &[Rescale(1, -1), OneBeta(-1)], reason: "(1, beta) endpoint" },
    ChainRow { residues: (3, 1), target: Tag::Ell, moves: &[Swap, Swap, Rescale(1, 5), OneBeta(5)], reason: "(3, 1) -> (1, -3)" },
    ChainRow { residues: (3, 3), target: Tag::Hamilton, moves: &[Swap, Rescale(-1, 3), MinusOneThree], reason: "ab = 1 mod 8: (3, 3) -> (-1, 3)" },
    ChainRow { residues: (3, 5), target: Tag::Ell, moves: &[Swap, Rescale(1, 3), OneBeta(3)], reason: "ab = -1 mod 8: (3, 5) -> (1, 3)" },
    ChainRow { residues: (3, 7), target: Tag::Hamilton, moves: &[Swap, Swap, Rescale(-1, 3), MinusOneThree], reason: "(3, 7) -> (3, 3) -> (-1, 3)" },
    ChainRow { residues: (5, 1), target: Tag::Ell, moves: &[Swap, Swap, Rescale(1, 3), OneBeta(3)], reason: "(5, 1) -> (1, -5)" },
    ChainRow { residues: (5, 3), target: Tag::Ell, moves: &[Swap, Rescale(1, 5), OneBeta(5)], reason: "ab = -1 mod 8: (5, 3) -> (1, 5)" },
    ChainRow { residues: (5, 5), target: Tag::Ell, moves: &[Swap, Rescale(-1, 5), MinusOneFive, Swap, OneBeta(-1)], reason: "ab = 1 mod 8: (5, 5) -> (-1, 5)" },
    ChainRow { residues: (5, 7), target: Tag::Ell, moves: &[Swap, Swap, Rescale(-1, 5), MinusOneFive, Swap, OneBeta(-1)], reason: "(5, 7) -> (5, 5) -> (-1, 5)" },
    ChainRow { residues: (7, 1), target: Tag::Ell, moves: &[Swap, Swap, Rescale(1, 1), OneBeta(1)], reason: "(7, 1) -> (1, -7)" },
    ChainRow { residues: (7, 3), target: Tag::Hamilton, moves: &[Rescale(-1, 3), MinusOneThree], reason: "(-1, 3) endpoint" },
    ChainRow { residues: (7, 5), target: Tag::Ell, moves: &[Rescale(-1, 5), MinusOneFive, Swap, OneBeta(-1)], reason: "(-1, 5) endpoint" },
    ChainRow { residues: (7, 7), target: Tag::Hamilton, moves: &[Rescale(-1, -1)], reason: "already (-1, -1)" },
];

pub fn chain_row(a8: u64, b8: u64) -> Option<&'static ChainRow> {
    CHAIN_TABLE.iter().find(|r| r.residues == (a8, b8))
}

/// Forward map of one move out of `current`, together with its label.
fn apply_move(s: u32, current: RingParams, mv: Move) -> Result<QuatMap, ClassifyError> {
    let (a, b) = (current.a().value() as i64, current.b().value() as i64);
    let internal = |what: &str| ClassifyError::Domain(format!("{mv} cannot apply to {current}: {what}"));
    let map = match mv {
        Rescale(ta, tb) => rescale_step(s, (a, b), (ta, tb))?
            .inverse()
            .ok_or_else(|| internal("not invertible"))?,
        Swap => swap_step(s, a, b)?
            .inverse()
            .ok_or_else(|| internal("not invertible"))?,
        OneBeta(beta) => endpoint_one_beta(beta, s)?.quat_map()?,
        MinusOneFive => endpoint_minus_one_five(s)?,
        MinusOneThree => endpoint_minus_one_three(s)?,
    };
    if map.source != current {
        return Err(internal("move starts from a different ring"));
    }
    Ok(map)
}

/// The step maps taking `(a, b / Z/2^s)` to its canonical ring, in order.
pub fn two_power_chain(a: i64, b: i64, s: u32) -> Result<(Tag, Vec<(Move, QuatMap)>), ClassifyError> {
    let m = two_power(s)?;
    let start = params_mod(m, a, b)?;
    let row = chain_row(start.a().value() % 8, start.b().value() % 8)
        .ok_or_else(|| ClassifyError::Domain(format!("{start} has even parameters")))?;
    let mut current = start;
    let mut steps = Vec::with_capacity(row.moves.len());
    for &mv in row.moves {
        let map = apply_move(s, current, mv)?;
        current = map.target;
        steps.push((mv, map));
    }
    if current != row.target.params(m)? {
        return Err(ClassifyError::Domain(format!(
            "reduction of {start} ended at {current}"
        )));
    }
    Ok((row.target, steps))
}

/// Images of a generator inside one prime-power target.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Image {
    Quaternion([u64; 4]),
    Matrix([[u64; 2]; 2]),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum TargetKind {
    H,
    L,
    M2,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FactorWitness {
    pub p: u64,
    pub s: u32,
    pub target: TargetKind,
    pub phi_i: Image,
    pub phi_j: Image,
    pub steps: Vec<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Source {
    pub n: u64,
    pub a: u64,
    pub b: u64,
}

/// Per-prime-power generator images of an isomorphism out of `(a, b / Z/n)`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct IsoWitness {
    pub source: Source,
    pub factors: Vec<FactorWitness>,
}

fn quat_factor(p: u64, s: u32, target: TargetKind, map: &QuatMap, steps: Vec<String>) -> FactorWitness {
    FactorWitness {
        p,
        s,
        target,
        phi_i: Image::Quaternion(map.phi_i.coeffs()),
        phi_j: Image::Quaternion(map.phi_j.coeffs()),
        steps,
    }
}

fn kind_of(tag: Tag) -> TargetKind {
    match tag {
        Tag::Hamilton => TargetKind::H,
        Tag::Ell => TargetKind::L,
    }
}

/// Builds a witness into `M2` for odd prime powers and into the canonical
/// quaternion ring for the power of two.
pub fn build_witness(n: u64, a: i64, b: i64) -> Result<IsoWitness, ClassifyError> {
    let class = classify(n, a, b)?;
    let modulus = factorize(n)?;
    let source = RingParams::new(n, a, b)?;
    let (ar, br) = (source.a().value(), source.b().value());
    let mut factors = Vec::with_capacity(modulus.factors().len());
    for f in modulus.factors() {
        let m = f.value();
        let (af, bf) = ((ar % m) as i64, (br % m) as i64);
        let factor = if f.p != 2 {
            let w = witness_odd_prime_power(f.p, f.s, af, bf)?;
            FactorWitness {
                p: f.p,
                s: f.s,
                target: TargetKind::M2,
                phi_i: Image::Matrix(w.image_i.entries),
                phi_j: Image::Matrix(w.image_j.entries),
                steps: vec![format!("split(u={},v={})", w.u, w.v)],
            }
        } else if f.s == 1 {
            // Over Z/2 every presentation is (1, 1) = (-1, -1).
            let params = params_mod(2, af, bf)?;
            quat_factor(2, 1, kind_of(class.tag), &QuatMap::identity(params), vec!["identity".into()])
        } else {
            let (tag, chain) = two_power_chain(af, bf, f.s)?;
            debug_assert_eq!(tag, class.tag);
            let start = params_mod(m, af, bf)?;
            let composite = chain
                .iter()
                .fold(QuatMap::identity(start), |acc, (_, step)| acc.then(step));
            let steps = chain.iter().map(|(mv, _)| mv.to_string()).collect();
            quat_factor(2, f.s, kind_of(tag), &composite, steps)
        };
        factors.push(factor);
    }
    Ok(IsoWitness {
        source: Source { n, a: ar, b: br },
        factors,
    })
}

/// One failed check inside a witness.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Failure {
    /// `p^s` of the offending factor, or `None` for whole-witness problems.
    pub factor: Option<String>,
    pub relation: Option<Relation>,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct VerifyReport {
    pub ok: bool,
    pub failures: Vec<Failure>,
}

fn structural(failures: &mut Vec<Failure>, factor: Option<String>, detail: String) {
    failures.push(Failure {
        factor,
        relation: None,
        detail,
    });
}

/// Checks the generator relations and the basis condition for every factor.
pub fn verify_witness(w: &IsoWitness) -> VerifyReport {
    let mut failures = Vec::new();
    let Source { n, a, b } = w.source;
    let modulus = match factorize(n) {
        Ok(m) => m,
        Err(e) => {
            structural(&mut failures, None, e.to_string());
            return VerifyReport { ok: false, failures };
        }
    };
    if gcd(a % n, n) != 1 || gcd(b % n, n) != 1 {
        structural(&mut failures, None, format!("a = {a} or b = {b} is not a unit mod {n}"));
    }
    let expected: Vec<(u64, u32)> = modulus.factors().iter().map(|f| (f.p, f.s)).collect();
    let claimed: Vec<(u64, u32)> = w.factors.iter().map(|f| (f.p, f.s)).collect();
    if expected != claimed {
        structural(
            &mut failures,
            None,
            format!("factors {claimed:?} do not match the factorization {expected:?} of {n}"),
        );
    }
    if !failures.is_empty() {
        return VerifyReport { ok: false, failures };
    }
    for f in &w.factors {
        let m = f.p.pow(f.s);
        let label = format!("{}^{}", f.p, f.s);
        let (af, bf) = (a % m, b % m);
        let violations = match (f.target, f.phi_i, f.phi_j) {
            (TargetKind::H | TargetKind::L, Image::Quaternion(ci), Image::Quaternion(cj)) => {
                let params = if f.target == TargetKind::H {
                    RingParams::hamilton(m)
                } else {
                    RingParams::ell(m)
                }
                .expect("m >= 2");
                relation_violations(
                    af,
                    bf,
                    &Quaternion::from_coeffs(params, ci),
                    &Quaternion::from_coeffs(params, cj),
                )
            }
            (TargetKind::M2, Image::Matrix(mi), Image::Matrix(mj)) => relation_violations(
                af,
                bf,
                &Mat2Z::from_entries(mi, m),
                &Mat2Z::from_entries(mj, m),
            ),
            (kind, _, _) => {
                structural(
                    &mut failures,
                    Some(label),
                    format!("images do not have the shape of a {kind:?} element"),
                );
                continue;
            }
        };
        for relation in violations {
            failures.push(Failure {
                factor: Some(label.clone()),
                relation: Some(relation),
                detail: format!("{relation} fails in the {:?} target mod {m}", f.target),
            });
        }
    }
    VerifyReport {
        ok: failures.is_empty(),
        failures,
    }
}

/// Coefficient matrix of `{I, A, B, AB}` in matrix-entry coordinates.
pub fn split_basis_matrix(w: &SplitWitness) -> Mat4 {
    let m = w.image_i.n;
    let ab = w.image_i * w.image_j;
    basis_matrix_m2([&Mat2Z::identity(m), &w.image_i, &w.image_j, &ab])
}
