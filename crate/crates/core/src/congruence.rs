//! Quadratic congruences in two variables.
//!
//! Odd prime powers are handled by a base solution modulo `p` followed by
//! two-variable Hensel lifting. Modulo powers of two Hensel lifting never
//! applies to `a x^2 + b y^2` (both partial derivatives are even), so the
//! 2-adic solvers work directly on the bits of the solution.

use thiserror::Error;

use crate::modint::{gcd, inv_mod, is_prime, mul_mod, reduce};

/// Largest exponent accepted by the breadth-first 2-adic solver. The frontier
/// holds every solution modulo `2^t`, which grows like `2^t`.
pub const MAX_BFS_EXPONENT: u32 = 20;

/// Largest exponent for which `2^s` fits comfortably in a `u64`.
pub const MAX_EXPONENT: u32 = 62;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CongruenceError {
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("the prime must be odd")]
    EvenPrime,
    #[error("{value} is not coprime to {p}")]
    NotCoprime { value: i64, p: u64 },
    #[error("{value} must be odd")]
    EvenCoefficient { value: i64 },
    #[error("exponent must be at least 1")]
    ZeroExponent,
    #[error("exponent {s} exceeds the supported maximum {max}")]
    ExponentTooLarge { s: u32, max: u32 },
    #[error("point is not a root modulo {p}^{j}")]
    NotARoot { p: u64, j: u32 },
    #[error("both partial derivatives vanish modulo {p} at the point")]
    NonSmoothPoint { p: u64 },
    #[error("no solution: {0}")]
    NoSolution(String),
}

/// `f(x, y) = xx*x^2 + yy*y^2 + xy*x*y + x_coef*x + y_coef*y + constant`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BivariateQuadratic {
    pub xx: i64,
    pub yy: i64,
    pub xy: i64,
    pub x: i64,
    pub y: i64,
    pub constant: i64,
}

impl BivariateQuadratic {
    pub fn new(xx: i64, yy: i64, xy: i64, x: i64, y: i64, constant: i64) -> Self {
        BivariateQuadratic {
            xx,
            yy,
            xy,
            x,
            y,
            constant,
        }
    }

    /// `a x^2 + b y^2 - c`.
    pub fn binary_form(a: i64, b: i64, c: i64) -> Self {
        BivariateQuadratic::new(a, b, 0, 0, 0, -c)
    }

    pub fn eval_mod(&self, x: u64, y: u64, m: u64) -> u64 {
        let r = |v: i64| reduce(v as i128, m);
        let (x, y) = (x % m, y % m);
        let terms = [
            mul_mod(r(self.xx), mul_mod(x, x, m), m),
            mul_mod(r(self.yy), mul_mod(y, y, m), m),
            mul_mod(r(self.xy), mul_mod(x, y, m), m),
            mul_mod(r(self.x), x, m),
            mul_mod(r(self.y), y, m),
            r(self.constant),
        ];
        terms
            .iter()
            .fold(0u128, |acc, &t| (acc + t as u128) % m as u128) as u64
    }

    /// `(df/dx, df/dy)` at the point, reduced modulo `m`.
    pub fn gradient_mod(&self, x: u64, y: u64, m: u64) -> (u64, u64) {
        let r = |v: i64| reduce(v as i128, m);
        let twice = |v: i64| reduce(2 * v as i128, m);
        let (x, y) = (x % m, y % m);
        let dx = (mul_mod(twice(self.xx), x, m) as u128
            + mul_mod(r(self.xy), y, m) as u128
            + r(self.x) as u128)
            % m as u128;
        let dy = (mul_mod(twice(self.yy), y, m) as u128
            + mul_mod(r(self.xy), x, m) as u128
            + r(self.y) as u128)
            % m as u128;
        (dx as u64, dy as u64)
    }
}

fn prime_power(p: u64, s: u32) -> Result<u64, CongruenceError> {
    if s == 0 {
        return Err(CongruenceError::ZeroExponent);
    }
    p.checked_pow(s)
        .filter(|v| *v < (1u64 << MAX_EXPONENT))
        .ok_or(CongruenceError::ExponentTooLarge {
            s,
            max: (MAX_EXPONENT as f64 / (p as f64).log2()).floor() as u32,
        })
}

/// One Hensel step: lifts a root of `f` modulo `p^j` to a root modulo `p^(j+1)`.
///
/// The new point is `(x + t1 p^j, y + t2 p^j)` where the offsets solve
/// `t1 f_x + t2 f_y = -f(x, y) / p^j (mod p)`. When `f_x` is a unit the
/// offset goes entirely into `x` (`t2 = 0`), otherwise entirely into `y`.
pub fn lift_step(
    f: &BivariateQuadratic,
    p: u64,
    j: u32,
    point: (u64, u64),
) -> Result<(u64, u64), CongruenceError> {
    if !is_prime(p) {
        return Err(CongruenceError::NotPrime(p));
    }
    let pj = prime_power(p, j)?;
    let next = prime_power(p, j + 1)?;
    let (x, y) = (point.0 % pj, point.1 % pj);
    let value = f.eval_mod(x, y, next);
    if value % pj != 0 {
        return Err(CongruenceError::NotARoot { p, j });
    }
    let rhs = reduce(-((value / pj) as i128), p);
    let (dx, dy) = f.gradient_mod(x, y, p);
    let (t1, t2) = if dx != 0 {
        (mul_mod(rhs, inv_mod(dx, p).expect("nonzero mod prime"), p), 0)
    } else if dy != 0 {
        (0, mul_mod(rhs, inv_mod(dy, p).expect("nonzero mod prime"), p))
    } else {
        return Err(CongruenceError::NonSmoothPoint { p });
    };
    let lifted = ((x + t1 * pj) % next, (y + t2 * pj) % next);
    debug_assert_eq!(f.eval_mod(lifted.0, lifted.1, next), 0);
    Ok(lifted)
}

fn require_odd_prime(p: u64) -> Result<(), CongruenceError> {
    if p == 2 {
        return Err(CongruenceError::EvenPrime);
    }
    if !is_prime(p) {
        return Err(CongruenceError::NotPrime(p));
    }
    Ok(())
}

fn require_coprime(value: i64, p: u64) -> Result<(), CongruenceError> {
    if gcd(reduce(value as i128, p), p) != 1 {
        return Err(CongruenceError::NotCoprime { value, p });
    }
    Ok(())
}

/// `(x, y)` in `[0, p)^2` with `a x^2 + b y^2 = c (mod p)`.
///
/// Meet in the middle: tabulate the smallest `y` for every value of `b y^2`,
/// then scan `x` upward probing `c - a x^2`. Every `c` is reachable when
/// `p` is odd and `a`, `b` are units. The scan starts at `x = 1` and only
/// falls back to `x = 0` when no solution has `x` prime to `p`, so the
/// result is the lexicographically smallest solution with `x` a unit if
/// there is one.
pub fn solve_binary_form_mod_p(a: i64, b: i64, c: i64, p: u64) -> Result<(u64, u64), CongruenceError> {
    require_odd_prime(p)?;
    require_coprime(a, p)?;
    require_coprime(b, p)?;
    let (a, b, c) = (
        reduce(a as i128, p),
        reduce(b as i128, p),
        reduce(c as i128, p),
    );
    let mut smallest_y = vec![u64::MAX; p as usize];
    for y in (0..p).rev() {
        smallest_y[mul_mod(b, mul_mod(y, y, p), p) as usize] = y;
    }
    for x in (1..p).chain(std::iter::once(0)) {
        let want = (c + p - mul_mod(a, mul_mod(x, x, p), p)) % p;
        let y = smallest_y[want as usize];
        if y != u64::MAX {
            return Ok((x, y));
        }
    }
    Err(CongruenceError::NoSolution(format!(
        "{a}x^2 + {b}y^2 = {c} has no solution mod {p}"
    )))
}

/// `(x, y)` with `a x^2 + b y^2 = c (mod p^s)` for an odd prime `p` not dividing `abc`.
///
/// Since `p` does not divide `c`, the base solution has a coordinate prime to
/// `p`, so the gradient `(2ax, 2by)` never vanishes and every lift succeeds.
pub fn solve_binary_form_odd(
    a: i64,
    b: i64,
    c: i64,
    p: u64,
    s: u32,
) -> Result<(u64, u64), CongruenceError> {
    require_odd_prime(p)?;
    require_coprime(c, p)?;
    prime_power(p, s)?;
    let mut point = solve_binary_form_mod_p(a, b, c, p)?;
    let f = BivariateQuadratic::binary_form(a, b, c);
    for j in 1..s {
        point = lift_step(&f, p, j, point)?;
    }
    Ok(point)
}

fn require_odd(value: i64) -> Result<(), CongruenceError> {
    if value.rem_euclid(2) == 0 {
        return Err(CongruenceError::EvenCoefficient { value });
    }
    Ok(())
}

/// Smallest `x` in `[0, 2^s)` with `a x^2 = b (mod 2^s)`, for odd `a`, `b`.
///
/// Odd squares are 1 mod 8, so a solution exists exactly when
/// `a = b (mod 2^min(s, 3))`. For `s >= 3` this finds a square root of
/// `r = b a^{-1}` by fixing one bit per step: if `x^2 = r (mod 2^t)` then
/// either `x` or `x + 2^(t-1)` is a root modulo `2^(t+1)`.
pub fn solve_scalar_square_2adic(a: i64, b: i64, s: u32) -> Result<u64, CongruenceError> {
    require_odd(a)?;
    require_odd(b)?;
    let m = prime_power(2, s)?;
    let (ar, br) = (reduce(a as i128, m), reduce(b as i128, m));
    if s <= 2 {
        return (0..m)
            .find(|&x| mul_mod(ar, mul_mod(x, x, m), m) == br)
            .ok_or_else(|| {
                CongruenceError::NoSolution(format!("{a}x^2 = {b} (mod {m}) has no solution"))
            });
    }
    if a.rem_euclid(8) != b.rem_euclid(8) {
        return Err(CongruenceError::NoSolution(format!(
            "{a} and {b} differ modulo 8, so {a}x^2 = {b} (mod {m}) has no solution"
        )));
    }
    let r = mul_mod(br, inv_mod(ar, m).expect("odd is a unit mod 2^s"), m);
    let mut x = 1u64;
    for t in 3..s {
        let mask = (1u64 << (t + 1)) - 1;
        if mul_mod(x, x, m) & mask != r & mask {
            x += 1u64 << (t - 1);
        }
    }
    let half = m / 2;
    let roots = [x % m, (m - x) % m, (x + half) % m, (m - x + half) % m];
    let best = *roots.iter().min().expect("non-empty");
    debug_assert_eq!(mul_mod(ar, mul_mod(best, best, m), m), br);
    Ok(best)
}

/// `(x, y)` with `a x^2 + b y^2 = c (mod 2^s)` for odd `a`, `b`, `c`.
///
/// Breadth-first lifting: all solutions modulo `2^min(s,3)` by exhaustion,
/// then each survivor is extended by `{0, 2^t}` in both coordinates and
/// filtered modulo `2^(t+1)`. Of the solutions modulo `2^s` the result is the
/// lexicographically smallest one with `x` odd.
pub fn solve_binary_form_2adic(a: i64, b: i64, c: i64, s: u32) -> Result<(u64, u64), CongruenceError> {
    require_odd(a)?;
    require_odd(b)?;
    require_odd(c)?;
    if s == 0 {
        return Err(CongruenceError::ZeroExponent);
    }
    if s > MAX_BFS_EXPONENT {
        return Err(CongruenceError::ExponentTooLarge {
            s,
            max: MAX_BFS_EXPONENT,
        });
    }
    let f = BivariateQuadratic::binary_form(a, b, c);
    let seed_exp = s.min(3);
    let seed_mod = 1u64 << seed_exp;
    let mut frontier: Vec<(u64, u64)> = (0..seed_mod)
        .flat_map(|x| (0..seed_mod).map(move |y| (x, y)))
        .filter(|&(x, y)| f.eval_mod(x, y, seed_mod) == 0)
        .collect();
    for t in seed_exp..s {
        let step = 1u64 << t;
        let next = step << 1;
        frontier = frontier
            .iter()
            .flat_map(|&(x, y)| {
                [(x, y), (x + step, y), (x, y + step), (x + step, y + step)]
            })
            .filter(|&(x, y)| f.eval_mod(x, y, next) == 0)
            .collect();
        if frontier.is_empty() {
            break;
        }
    }
    frontier
        .iter()
        .copied()
        .min_by_key(|&(x, y)| (x % 2 == 0, x, y))
        .ok_or_else(|| {
            CongruenceError::NoSolution(format!(
                "{a}x^2 + {b}y^2 = {c} has no solution mod 2^{s}"
            ))
        })
}

/// `(x, y)` with `x^2 + y^2 = c (mod 2^s)`, `c` odd.
pub fn solve_sum_two_squares_2adic(c: i64, s: u32) -> Result<(u64, u64), CongruenceError> {
    solve_binary_form_2adic(1, 1, c, s)
}

/// The inverse of 5 modulo `2^s`. The congruence `5x^2 + 5y^2 = 1 (mod 2^s)`
/// is equivalent to `x^2 + y^2 = inverse_of_five(s)`.
pub fn inverse_of_five(s: u32) -> u64 {
    let m = 1u64 << s;
    inv_mod(5 % m, m).expect("5 is odd")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn brute_roots(f: &BivariateQuadratic, m: u64) -> Vec<(u64, u64)> {
        (0..m)
            .flat_map(|x| (0..m).map(move |y| (x, y)))
            .filter(|&(x, y)| f.eval_mod(x, y, m) == 0)
            .collect()
    }

    #[test]
    fn lift_step_examples() {
        // Offsets enumerated over {0,1,2}^2: (t1, t2) in {(1,0), (0,1), (2,2)} all work.
        let f = BivariateQuadratic::new(1, 1, 0, 0, 0, 1);
        let lifted = lift_step(&f, 3, 1, (1, 1)).unwrap();
        assert_eq!(lifted, (4, 1));
        assert_eq!(f.eval_mod(4, 1, 9), 0);
        let valid: Vec<_> = brute_roots(&f, 9)
            .into_iter()
            .filter(|&(x, y)| x % 3 == 1 && y % 3 == 1)
            .collect();
        assert!(valid.contains(&lifted));

        let g = BivariateQuadratic::new(1, 0, 0, 0, 0, -1);
        assert_eq!(lift_step(&g, 5, 1, (1, 0)).unwrap(), (1, 0));

        let h = BivariateQuadratic::new(1, 1, 0, 0, 0, -2);
        let lifted = lift_step(&h, 7, 1, (1, 1)).unwrap();
        assert!(brute_roots(&h, 49).contains(&lifted));
        assert_eq!((lifted.0 % 7, lifted.1 % 7), (1, 1));
    }

    #[test]
    fn lift_step_errors() {
        let f = BivariateQuadratic::new(1, 1, 0, 0, 0, 1);
        assert_eq!(
            lift_step(&f, 3, 1, (0, 0)),
            Err(CongruenceError::NotARoot { p: 3, j: 1 })
        );
        // x^2 + y^2 at the origin: a root with zero gradient.
        let g = BivariateQuadratic::new(1, 1, 0, 0, 0, 0);
        assert_eq!(
            lift_step(&g, 5, 1, (0, 0)),
            Err(CongruenceError::NonSmoothPoint { p: 5 })
        );
        assert_eq!(lift_step(&f, 9, 1, (1, 1)), Err(CongruenceError::NotPrime(9)));
    }

    #[test]
    fn lift_uses_y_when_x_derivative_vanishes() {
        // x^2 + y^2 + 1 at (0, ...) mod 5: 0 + 4 + 1 = 5, y = 2.
        let f = BivariateQuadratic::new(1, 1, 0, 0, 0, 1);
        let lifted = lift_step(&f, 5, 1, (0, 2)).unwrap();
        assert_eq!(lifted.0, 0);
        assert_eq!(f.eval_mod(lifted.0, lifted.1, 25), 0);
    }

    #[test]
    fn mod_p_examples() {
        assert_eq!(solve_binary_form_mod_p(1, 1, -1, 3).unwrap(), (1, 1));
        let all: Vec<_> = brute_roots(&BivariateQuadratic::binary_form(1, 1, -1), 7);
        assert_eq!(all[0], (2, 3));
        assert_eq!(solve_binary_form_mod_p(1, 1, -1, 7).unwrap(), (2, 3));
        let (x, y) = solve_binary_form_mod_p(2, 3, 1, 5).unwrap();
        assert_eq!((2 * x * x + 3 * y * y) % 5, 1);
        let first_with_unit_x = brute_roots(&BivariateQuadratic::binary_form(2, 3, 1), 5)
            .into_iter()
            .find(|&(x, _)| x % 5 != 0)
            .unwrap();
        assert_eq!(first_with_unit_x, (x, y));
        assert_eq!(solve_binary_form_mod_p(1, 1, 1, 5).unwrap(), (1, 0));
    }

    #[test]
    fn mod_p_falls_back_to_zero_x() {
        // x^2 + 2y^2 = 2 (mod 3) is solved only by (0, 1) and (0, 2).
        assert_eq!(solve_binary_form_mod_p(1, 2, 2, 3).unwrap(), (0, 1));
        assert_eq!(solve_binary_form_odd(1, 2, 2, 3, 4).map(|(x, _)| x % 3), Ok(0));
    }

    #[test]
    fn mod_p_errors() {
        assert_eq!(solve_binary_form_mod_p(1, 1, 1, 2), Err(CongruenceError::EvenPrime));
        assert_eq!(
            solve_binary_form_mod_p(3, 1, 1, 3),
            Err(CongruenceError::NotCoprime { value: 3, p: 3 })
        );
        assert_eq!(solve_binary_form_mod_p(1, 1, 1, 15), Err(CongruenceError::NotPrime(15)));
    }

    #[test]
    fn odd_prime_power_examples() {
        assert_eq!(solve_binary_form_odd(1, 1, -1, 3, 2).unwrap(), (4, 1));
        assert_eq!((16 + 1) % 9, 8);
        assert_eq!(solve_binary_form_odd(1, 1, 1, 5, 1).unwrap(), (1, 0));
        let (x, y) = solve_binary_form_odd(1, 1, -1, 7, 3).unwrap();
        assert_eq!((x * x + y * y + 1) % 343, 0);
        assert!(solve_binary_form_odd(1, 1, 0, 7, 3).is_err());
    }

    #[test]
    fn odd_solver_agrees_with_enumeration() {
        for (p, s) in [(3u64, 1u32), (3, 2), (3, 3), (5, 1), (5, 2), (7, 1), (7, 2), (11, 1)] {
            let m = p.pow(s);
            for a in 1..p as i64 {
                for b in 1..p as i64 {
                    for c in 1..p as i64 {
                        let f = BivariateQuadratic::binary_form(a, b, c);
                        let pt = solve_binary_form_odd(a, b, c, p, s).unwrap();
                        assert!(brute_roots(&f, m).contains(&pt), "{a} {b} {c} mod {m}");
                    }
                }
            }
        }
    }

    #[test]
    fn scalar_square_examples() {
        assert_eq!(solve_scalar_square_2adic(3, 3, 4).unwrap(), 1);
        assert_eq!(solve_scalar_square_2adic(1, 9, 4).unwrap(), 3);
        let x = solve_scalar_square_2adic(5, 13, 5).unwrap();
        assert_eq!((5 * x * x) % 32, 13);
        let brute = (0..32u64).find(|x| (5 * x * x) % 32 == 13).unwrap();
        assert_eq!(x, brute);
        assert!(matches!(
            solve_scalar_square_2adic(3, 5, 4),
            Err(CongruenceError::NoSolution(_))
        ));
        assert!(matches!(
            solve_scalar_square_2adic(2, 5, 4),
            Err(CongruenceError::EvenCoefficient { value: 2 })
        ));
    }

    #[test]
    fn scalar_square_small_exponents_by_inspection() {
        // Modulo 4 only a = b (mod 4) matters.
        assert_eq!(solve_scalar_square_2adic(1, 5, 2).unwrap(), 1);
        assert!(solve_scalar_square_2adic(1, 3, 2).is_err());
        assert_eq!(solve_scalar_square_2adic(1, 3, 1).unwrap(), 1);
    }

    #[test]
    fn scalar_square_large_exponent() {
        let s = 60;
        let m = 1u64 << s;
        let x = solve_scalar_square_2adic(-7, 17, s).unwrap();
        let lhs = mul_mod(reduce(-7, m), mul_mod(x, x, m), m);
        assert_eq!(lhs, 17);
    }

    #[test]
    fn sum_two_squares_examples() {
        assert_eq!(inverse_of_five(3), 5);
        assert_eq!(inverse_of_five(1), 1);
        assert_eq!(inverse_of_five(2), 1);
        assert_eq!(solve_sum_two_squares_2adic(5, 3).unwrap(), (1, 2));
        assert_eq!(solve_sum_two_squares_2adic(1, 1).unwrap(), (1, 0));
        let alpha6 = inverse_of_five(6);
        let (x, y) = solve_sum_two_squares_2adic(alpha6 as i64, 6).unwrap();
        assert_eq!((x * x + y * y) % 64, alpha6);
        let brute = brute_roots(&BivariateQuadratic::binary_form(1, 1, alpha6 as i64), 64);
        assert!(brute.contains(&(x, y)));
    }

    #[test]
    fn sum_two_squares_alpha_all_exponents() {
        for s in 1..=16 {
            let alpha = inverse_of_five(s);
            let (x, y) = solve_sum_two_squares_2adic(alpha as i64, s).unwrap();
            let m = 1u64 << s;
            assert_eq!((x * x + y * y) % m, alpha, "s = {s}");
        }
    }

    #[test]
    fn two_adic_no_solution_and_limits() {
        // Sums of two squares are never 3 mod 4.
        assert!(matches!(
            solve_sum_two_squares_2adic(3, 5),
            Err(CongruenceError::NoSolution(_))
        ));
        assert!(matches!(
            solve_sum_two_squares_2adic(1, MAX_BFS_EXPONENT + 1),
            Err(CongruenceError::ExponentTooLarge { .. })
        ));
    }
}
