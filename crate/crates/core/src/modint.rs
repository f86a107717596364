//! Exact arithmetic in Z/nZ.
//!
//! Moduli are machine words. Products are formed in `u128`, so every
//! operation is exact for any `n < 2^64`.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ModError {
    #[error("modulus must be at least 2, got {0}")]
    ModulusTooSmall(u64),
    #[error("{value} is not a unit modulo {modulus} (gcd = {gcd})")]
    NotAUnit { value: u64, modulus: u64, gcd: u64 },
    #[error("CRT parts do not match the factorization of {modulus}: {reason}")]
    CrtMismatch { modulus: u64, reason: String },
}

/// `gcd(a, b)`, with `gcd(0, 0) = 0`.
pub fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

/// Extended Euclid on signed integers: returns `(g, x, y)` with `a x + b y = g >= 0`.
pub fn ext_gcd(a: i128, b: i128) -> (i128, i128, i128) {
    let (mut old_r, mut r) = (a, b);
    let (mut old_s, mut s) = (1i128, 0i128);
    let (mut old_t, mut t) = (0i128, 1i128);
    while r != 0 {
        let q = old_r.div_euclid(r);
        (old_r, r) = (r, old_r - q * r);
        (old_s, s) = (s, old_s - q * s);
        (old_t, t) = (t, old_t - q * t);
    }
    if old_r < 0 {
        (-old_r, -old_s, -old_t)
    } else {
        (old_r, old_s, old_t)
    }
}

#[inline]
pub fn mul_mod(a: u64, b: u64, n: u64) -> u64 {
    ((a as u128 * b as u128) % n as u128) as u64
}

#[inline]
pub fn add_mod(a: u64, b: u64, n: u64) -> u64 {
    ((a as u128 + b as u128) % n as u128) as u64
}

#[inline]
pub fn sub_mod(a: u64, b: u64, n: u64) -> u64 {
    add_mod(a, n - b % n, n)
}

/// Canonical representative of a signed integer modulo `n`.
#[inline]
pub fn reduce(v: i128, n: u64) -> u64 {
    v.rem_euclid(n as i128) as u64
}

pub fn pow_mod(mut base: u64, mut exp: u64, n: u64) -> u64 {
    let mut acc = 1 % n;
    base %= n;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mul_mod(acc, base, n);
        }
        base = mul_mod(base, base, n);
        exp >>= 1;
    }
    acc
}

/// Inverse of `x` modulo `n`, or `NotAUnit` carrying `gcd(x, n)`.
pub fn inv_mod(x: u64, n: u64) -> Result<u64, ModError> {
    let (g, s, _) = ext_gcd((x % n) as i128, n as i128);
    if g != 1 {
        return Err(ModError::NotAUnit {
            value: x % n,
            modulus: n,
            gcd: g as u64,
        });
    }
    Ok(reduce(s, n))
}

pub fn is_unit(x: u64, n: u64) -> bool {
    gcd(x % n, n) == 1
}

/// Deterministic Miller-Rabin; the witness set is exact for all 64-bit inputs.
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for p in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        if n % p == 0 {
            return n == p;
        }
    }
    let mut d = n - 1;
    let mut r = 0;
    while d % 2 == 0 {
        d /= 2;
        r += 1;
    }
    'witness: for a in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        let mut x = pow_mod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..r {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

/// One prime-power factor `p^s` of a modulus.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct PrimePower {
    pub p: u64,
    pub s: u32,
}

impl PrimePower {
    pub fn value(&self) -> u64 {
        self.p.pow(self.s)
    }
}

impl fmt::Display for PrimePower {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}^{}", self.p, self.s)
    }
}

/// A modulus `n >= 2` together with its prime-power factorization.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Modulus {
    n: u64,
    factors: Vec<PrimePower>,
}

impl Modulus {
    pub fn new(n: u64) -> Result<Self, ModError> {
        factorize(n)
    }

    pub fn n(&self) -> u64 {
        self.n
    }

    /// Prime-power factors in strictly increasing order of `p`.
    pub fn factors(&self) -> &[PrimePower] {
        &self.factors
    }

    /// The exponent of 2 in `n`.
    pub fn two_adic_valuation(&self) -> u32 {
        self.factors
            .iter()
            .find(|f| f.p == 2)
            .map(|f| f.s)
            .unwrap_or(0)
    }

    /// Splits `x mod n` into its residues modulo each prime-power factor.
    pub fn crt_split(&self, x: u64) -> Vec<Residue> {
        self.factors
            .iter()
            .map(|f| Residue::new(x, f.value()))
            .collect()
    }
}

/// Trial-division factorization.
pub fn factorize(n: u64) -> Result<Modulus, ModError> {
    if n < 2 {
        return Err(ModError::ModulusTooSmall(n));
    }
    let mut rest = n;
    let mut factors = Vec::new();
    let mut push = |p: u64, rest: &mut u64| {
        let mut s = 0;
        while *rest % p == 0 {
            *rest /= p;
            s += 1;
        }
        if s > 0 {
            factors.push(PrimePower { p, s });
        }
    };
    push(2, &mut rest);
    let mut d = 3u64;
    while d.saturating_mul(d) <= rest {
        push(d, &mut rest);
        d += 2;
    }
    if rest > 1 {
        push(rest, &mut rest);
    }
    debug_assert!(factors.iter().all(|f| is_prime(f.p)));
    Ok(Modulus { n, factors })
}

/// An element of Z/nZ, stored canonically in `[0, n)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Residue {
    value: u64,
    modulus: u64,
}

impl Residue {
    pub fn new(value: u64, modulus: u64) -> Self {
        assert!(modulus >= 1, "modulus must be positive");
        Residue {
            value: value % modulus,
            modulus,
        }
    }

    /// Normalizes a signed literal into `[0, n)`.
    pub fn from_signed(value: i64, modulus: u64) -> Self {
        Residue {
            value: reduce(value as i128, modulus),
            modulus,
        }
    }

    pub fn zero(modulus: u64) -> Self {
        Residue::new(0, modulus)
    }

    pub fn one(modulus: u64) -> Self {
        Residue::new(1, modulus)
    }

    pub fn value(&self) -> u64 {
        self.value
    }

    pub fn modulus(&self) -> u64 {
        self.modulus
    }

    pub fn is_unit(&self) -> bool {
        is_unit(self.value, self.modulus)
    }

    pub fn gcd_with_modulus(&self) -> u64 {
        gcd(self.value, self.modulus)
    }

    pub fn pow(&self, exp: u64) -> Self {
        Residue {
            value: pow_mod(self.value, exp, self.modulus),
            modulus: self.modulus,
        }
    }

    pub fn inverse(&self) -> Result<Self, ModError> {
        inv_mod(self.value, self.modulus).map(|v| Residue::new(v, self.modulus))
    }

    /// Reduction along the projection Z/n -> Z/m for `m | n`.
    pub fn reduce_to(&self, m: u64) -> Self {
        debug_assert_eq!(self.modulus % m, 0);
        Residue::new(self.value, m)
    }

    fn check_same(&self, other: &Residue) {
        assert_eq!(
            self.modulus, other.modulus,
            "residues with different moduli combined"
        );
    }
}

impl fmt::Display for Residue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} mod {}", self.value, self.modulus)
    }
}

impl Add for Residue {
    type Output = Residue;
    fn add(self, rhs: Residue) -> Residue {
        self.check_same(&rhs);
        Residue {
            value: add_mod(self.value, rhs.value, self.modulus),
            modulus: self.modulus,
        }
    }
}

impl Sub for Residue {
    type Output = Residue;
    fn sub(self, rhs: Residue) -> Residue {
        self.check_same(&rhs);
        Residue {
            value: sub_mod(self.value, rhs.value, self.modulus),
            modulus: self.modulus,
        }
    }
}

impl Mul for Residue {
    type Output = Residue;
    fn mul(self, rhs: Residue) -> Residue {
        self.check_same(&rhs);
        Residue {
            value: mul_mod(self.value, rhs.value, self.modulus),
            modulus: self.modulus,
        }
    }
}

impl Neg for Residue {
    type Output = Residue;
    fn neg(self) -> Residue {
        Residue {
            value: sub_mod(0, self.value, self.modulus),
            modulus: self.modulus,
        }
    }
}

/// Inverse of a unit residue.
pub fn inverse(x: Residue) -> Result<Residue, ModError> {
    x.inverse()
}

/// Recombines one residue per prime-power factor of `modulus` into a residue mod `n`.
pub fn crt_combine(parts: &[Residue], modulus: &Modulus) -> Result<Residue, ModError> {
    let factors = modulus.factors();
    if parts.len() != factors.len() {
        return Err(ModError::CrtMismatch {
            modulus: modulus.n(),
            reason: format!("expected {} parts, got {}", factors.len(), parts.len()),
        });
    }
    let n = modulus.n();
    let mut acc = 0u64;
    for (part, f) in parts.iter().zip(factors) {
        let q = f.value();
        if part.modulus() != q {
            return Err(ModError::CrtMismatch {
                modulus: n,
                reason: format!("part modulo {} where {} was expected", part.modulus(), q),
            });
        }
        // e = (n/q) * ((n/q)^{-1} mod q) is 1 mod q and 0 mod every other factor.
        let cofactor = n / q;
        let e = mul_mod(cofactor, inv_mod(cofactor % q, q)?, n);
        acc = add_mod(acc, mul_mod(e, part.value(), n), n);
    }
    Ok(Residue::new(acc, n))
}
