//! Quaternion rings `(a, b / Z/nZ)`.
//!
//! Elements are `x0 + x1 i + x2 j + x3 k` with `i^2 = a`, `j^2 = b` and
//! `ij = -ji = k`. From these, `ik = a j`, `ki = -a j`, `jk = -b i`,
//! `kj = b i` and `k^2 = -ab`.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::modint::{add_mod, factorize, gcd, mul_mod, reduce, sub_mod, ModError, Modulus, Residue};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum QuatError {
    #[error(transparent)]
    Modulus(#[from] ModError),
    #[error("parameter {which} = {value} is not a unit modulo {n} (gcd = {gcd})")]
    NonUnitParameter {
        which: char,
        value: i64,
        n: u64,
        gcd: u64,
    },
    #[error("operands belong to different quaternion rings: {left} vs {right}")]
    MismatchedParams { left: RingParams, right: RingParams },
    #[error("element is not a unit: gcd(norm, n) = {gcd}")]
    NotAUnit { gcd: u64 },
    #[error("enumeration needs {required} items but the budget is {budget}")]
    BudgetExceeded { required: u128, budget: u128 },
}

/// Names the ring `(a, b / Z/nZ)`; `a` and `b` are units mod `n`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct RingParams {
    n: u64,
    a: u64,
    b: u64,
}

impl RingParams {
    pub fn new(n: u64, a: i64, b: i64) -> Result<Self, QuatError> {
        if n < 2 {
            return Err(ModError::ModulusTooSmall(n).into());
        }
        let (ar, br) = (reduce(a as i128, n), reduce(b as i128, n));
        for (which, value, r) in [('a', a, ar), ('b', b, br)] {
            let g = gcd(r, n);
            if g != 1 {
                return Err(QuatError::NonUnitParameter { which, value, n, gcd: g });
            }
        }
        Ok(RingParams { n, a: ar, b: br })
    }

    /// Hamilton quaternions `(-1, -1 / Z/n)`.
    pub fn hamilton(n: u64) -> Result<Self, QuatError> {
        RingParams::new(n, -1, -1)
    }

    /// `(1, 1 / Z/n)`.
    pub fn ell(n: u64) -> Result<Self, QuatError> {
        RingParams::new(n, 1, 1)
    }

    pub fn n(&self) -> u64 {
        self.n
    }

    pub fn a(&self) -> Residue {
        Residue::new(self.a, self.n)
    }

    pub fn b(&self) -> Residue {
        Residue::new(self.b, self.n)
    }

    pub fn modulus(&self) -> Modulus {
        factorize(self.n).expect("n >= 2 checked at construction")
    }

    /// The same presentation over `Z/m` for a divisor `m` of `n`.
    pub fn reduce_to(&self, m: u64) -> Result<Self, QuatError> {
        debug_assert_eq!(self.n % m, 0);
        RingParams::new(m, (self.a % m) as i64, (self.b % m) as i64)
    }

    /// `n^4`, the number of elements.
    pub fn order(&self) -> u128 {
        (self.n as u128).pow(4)
    }
}

impl fmt::Display for RingParams {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {} / Z/{})", self.a, self.b, self.n)
    }
}

/// One element `x0 + x1 i + x2 j + x3 k`, coefficients canonical mod `n`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Quaternion {
    params: RingParams,
    coeffs: [u64; 4],
}

impl Quaternion {
    pub fn new(params: RingParams, coeffs: [i64; 4]) -> Self {
        Quaternion {
            params,
            coeffs: coeffs.map(|c| reduce(c as i128, params.n)),
        }
    }

    pub fn from_coeffs(params: RingParams, coeffs: [u64; 4]) -> Self {
        Quaternion {
            params,
            coeffs: coeffs.map(|c| c % params.n),
        }
    }

    pub fn scalar(params: RingParams, value: i64) -> Self {
        Quaternion::new(params, [value, 0, 0, 0])
    }

    pub fn zero(params: RingParams) -> Self {
        Quaternion::from_coeffs(params, [0; 4])
    }

    pub fn one(params: RingParams) -> Self {
        Quaternion::from_coeffs(params, [1, 0, 0, 0])
    }

    pub fn i(params: RingParams) -> Self {
        Quaternion::from_coeffs(params, [0, 1, 0, 0])
    }

    pub fn j(params: RingParams) -> Self {
        Quaternion::from_coeffs(params, [0, 0, 1, 0])
    }

    pub fn k(params: RingParams) -> Self {
        Quaternion::from_coeffs(params, [0, 0, 0, 1])
    }

    pub fn params(&self) -> RingParams {
        self.params
    }

    pub fn coeffs(&self) -> [u64; 4] {
        self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs == [0; 4]
    }

    pub fn is_one(&self) -> bool {
        self.coeffs == [1 % self.params.n, 0, 0, 0]
    }

    /// True when every non-real coefficient vanishes.
    pub fn is_scalar(&self) -> bool {
        self.coeffs[1..] == [0, 0, 0]
    }

    pub fn scale(&self, r: Residue) -> Self {
        assert_eq!(r.modulus(), self.params.n);
        let n = self.params.n;
        Quaternion {
            params: self.params,
            coeffs: self.coeffs.map(|c| mul_mod(c, r.value(), n)),
        }
    }

    pub fn checked_mul(&self, rhs: &Quaternion) -> Result<Quaternion, QuatError> {
        if self.params != rhs.params {
            return Err(QuatError::MismatchedParams {
                left: self.params,
                right: rhs.params,
            });
        }
        Ok(Quaternion {
            params: self.params,
            coeffs: product(&self.params, &self.coeffs, &rhs.coeffs),
        })
    }

    pub fn square(&self) -> Self {
        *self * *self
    }

    /// `x0 - x1 i - x2 j - x3 k`.
    pub fn conjugate(&self) -> Self {
        let n = self.params.n;
        let [x0, x1, x2, x3] = self.coeffs;
        Quaternion {
            params: self.params,
            coeffs: [x0, sub_mod(0, x1, n), sub_mod(0, x2, n), sub_mod(0, x3, n)],
        }
    }

    /// `x0^2 - a x1^2 - b x2^2 + ab x3^2`, the scalar `z * conj(z)`.
    pub fn norm(&self) -> Residue {
        let RingParams { n, a, b } = self.params;
        let [x0, x1, x2, x3] = self.coeffs.map(|c| mul_mod(c, c, n));
        let ab = mul_mod(a, b, n);
        let mut v = x0;
        v = sub_mod(v, mul_mod(a, x1, n), n);
        v = sub_mod(v, mul_mod(b, x2, n), n);
        v = add_mod(v, mul_mod(ab, x3, n), n);
        Residue::new(v, n)
    }

    /// `2 x0`.
    pub fn trace(&self) -> Residue {
        Residue::new(add_mod(self.coeffs[0], self.coeffs[0], self.params.n), self.params.n)
    }

    /// A quaternion is a unit exactly when its norm is a unit of `Z/n`.
    pub fn is_unit(&self) -> bool {
        self.norm().is_unit()
    }

    /// `conj(z) * norm(z)^{-1}`, or `NotAUnit` with `gcd(norm(z), n)`.
    pub fn try_inverse(&self) -> Result<Quaternion, QuatError> {
        let norm = self.norm();
        match norm.inverse() {
            Ok(inv) => Ok(self.conjugate().scale(inv)),
            Err(_) => Err(QuatError::NotAUnit {
                gcd: norm.gcd_with_modulus(),
            }),
        }
    }

    /// `zw - wz`.
    pub fn commutator(&self, other: &Quaternion) -> Quaternion {
        *self * *other - *other * *self
    }

    /// `zw + wz`.
    pub fn anticommutator(&self, other: &Quaternion) -> Quaternion {
        *self * *other + *other * *self
    }
}

impl fmt::Display for Quaternion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let [x0, x1, x2, x3] = self.coeffs;
        write!(f, "{x0} + {x1}i + {x2}j + {x3}k in {}", self.params)
    }
}

/// The multiplication table of `(a, b / Z/n)` applied to coefficient vectors.
fn product(params: &RingParams, x: &[u64; 4], y: &[u64; 4]) -> [u64; 4] {
    let RingParams { n, a, b } = *params;
    let neg = |v: u64| sub_mod(0, v % n, n);
    let ab = mul_mod(a, b, n);
    // Coefficients, with negative signs folded in:
    // r0 = x0y0 + a x1y1 + b x2y2 - ab x3y3
    // r1 = x0y1 + x1y0 - b x2y3 + b x3y2
    // r2 = x0y2 + x2y0 + a x1y3 - a x3y1
    // r3 = x0y3 + x3y0 + x1y2 - x2y1
    let terms: [[(u64, usize, usize); 4]; 4] = [
        [(1, 0, 0), (a, 1, 1), (b, 2, 2), (neg(ab), 3, 3)],
        [(1, 0, 1), (1, 1, 0), (neg(b), 2, 3), (b, 3, 2)],
        [(1, 0, 2), (1, 2, 0), (a, 1, 3), (neg(a), 3, 1)],
        [(1, 0, 3), (1, 3, 0), (1, 1, 2), (neg(1), 2, 1)],
    ];
    if n < (1 << 20) {
        // Each term is below n^3 < 2^60, so four of them fit in a u64.
        terms.map(|row| {
            row.iter()
                .map(|&(c, l, r)| c * x[l] * y[r])
                .sum::<u64>()
                % n
        })
    } else {
        terms.map(|row| {
            row.iter().fold(0, |acc, &(c, l, r)| {
                add_mod(acc, mul_mod(c, mul_mod(x[l], y[r], n), n), n)
            })
        })
    }
}

impl Mul for Quaternion {
    type Output = Quaternion;
    fn mul(self, rhs: Quaternion) -> Quaternion {
        self.checked_mul(&rhs).expect("quaternions from different rings")
    }
}

impl Add for Quaternion {
    type Output = Quaternion;
    fn add(self, rhs: Quaternion) -> Quaternion {
        assert_eq!(self.params, rhs.params, "quaternions from different rings");
        let n = self.params.n;
        let mut coeffs = self.coeffs;
        for (c, r) in coeffs.iter_mut().zip(rhs.coeffs) {
            *c = add_mod(*c, r, n);
        }
        Quaternion { params: self.params, coeffs }
    }
}

impl Sub for Quaternion {
    type Output = Quaternion;
    fn sub(self, rhs: Quaternion) -> Quaternion {
        self + (-rhs)
    }
}

impl Neg for Quaternion {
    type Output = Quaternion;
    fn neg(self) -> Quaternion {
        let n = self.params.n;
        Quaternion {
            params: self.params,
            coeffs: self.coeffs.map(|c| sub_mod(0, c, n)),
        }
    }
}

/// Iterator over all `n^4` elements in lexicographic coefficient order.
#[derive(Debug, Clone)]
pub struct Elements {
    params: RingParams,
    next: u128,
    end: u128,
}

impl Iterator for Elements {
    type Item = Quaternion;

    fn next(&mut self) -> Option<Quaternion> {
        if self.next >= self.end {
            return None;
        }
        let n = self.params.n as u128;
        let mut rest = self.next;
        let mut coeffs = [0u64; 4];
        for c in coeffs.iter_mut().rev() {
            *c = (rest % n) as u64;
            rest /= n;
        }
        self.next += 1;
        Some(Quaternion { params: self.params, coeffs })
    }

    fn size_hint(&self) -> (usize, Option<usize>) {
        let left = (self.end - self.next) as usize;
        (left, Some(left))
    }
}

impl ExactSizeIterator for Elements {}

/// Every element of the ring, refusing when `n^4` exceeds `budget`.
pub fn enumerate_elements(params: RingParams, budget: u128) -> Result<Elements, QuatError> {
    let required = params.order();
    if required > budget {
        return Err(QuatError::BudgetExceeded { required, budget });
    }
    Ok(Elements {
        params,
        next: 0,
        end: required,
    })
}

/// Convenience for `modint::Residue` scalars living in the ring.
pub fn scalar_residue(params: RingParams, r: Residue) -> Quaternion {
    assert_eq!(r.modulus(), params.n);
    Quaternion::from_coeffs(params, [r.value(), 0, 0, 0])
}
