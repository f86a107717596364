//! Brute-force ground truth at small moduli.
//!
//! Everything here enumerates: ring elements for censuses and local-ring
//! checks, generator pairs for isomorphism search, and residues for checking
//! the congruence solvers.
//!
//! A unital isomorphism `(a, b) -> T` fixes `Z/n`, so it sends `i, j` to a
//! generator pair of `T`: `I^2 = a`, `J^2 = b`, `IJ = -JI`, with
//! `{1, I, J, IJ}` a basis. Conversely such a pair defines a homomorphism
//! that maps a basis to a basis, hence a bijection. So an isomorphism exists
//! exactly when a generator pair does.

use std::collections::HashMap;
use std::sync::{Mutex, OnceLock};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::classify::{relation_violations, QuatMap};
use crate::congruence::{
    inverse_of_five, solve_binary_form_odd, solve_scalar_square_2adic, solve_sum_two_squares_2adic,
};
use crate::modint::{gcd, mul_mod, reduce};
use crate::quat::{QuatError, Quaternion, RingParams};

pub const BUDGET_ENV: &str = "QUATRING_BUDGET";
/// Elements enumerated by a census or local check: `n <= 16`.
pub const DEFAULT_ELEMENT_BUDGET: u128 = 16 * 16 * 16 * 16;
/// Nominal `n^8` generator-pair space: `n <= 8`.
pub const DEFAULT_PAIR_BUDGET: u128 = 1 << 24;
/// Coefficient triples per modulus before the odd-form suite switches to
/// one representative per scaling class.
pub const DEFAULT_TRIPLE_BUDGET: u128 = 1 << 25;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum OracleError {
    #[error("{what} needs {required} steps, over the budget of {budget}")]
    BudgetExceeded {
        what: &'static str,
        required: u128,
        budget: u128,
    },
    #[error("rings over Z/{0} and Z/{1} cannot be compared")]
    ModulusMismatch(u64, u64),
    #[error("invalid {BUDGET_ENV} value {0:?}: expected ELEMENTS or ELEMENTS,PAIRS")]
    BadBudget(String),
    #[error(transparent)]
    Ring(#[from] QuatError),
}

/// Enumeration limits for element and generator-pair searches.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Budget {
    pub elements: u128,
    pub pairs: u128,
}

impl Default for Budget {
    fn default() -> Self {
        Budget {
            elements: DEFAULT_ELEMENT_BUDGET,
            pairs: DEFAULT_PAIR_BUDGET,
        }
    }
}

impl Budget {
    /// `ELEMENTS` or `ELEMENTS,PAIRS`; a missing pair budget keeps the default.
    pub fn parse(text: &str) -> Result<Budget, OracleError> {
        let bad = || OracleError::BadBudget(text.to_string());
        let mut parts = text.split(',').map(str::trim);
        let elements = parts.next().ok_or_else(bad)?.parse().map_err(|_| bad())?;
        let pairs = match parts.next() {
            Some(p) => p.parse().map_err(|_| bad())?,
            None => DEFAULT_PAIR_BUDGET,
        };
        if parts.next().is_some() {
            return Err(bad());
        }
        Ok(Budget { elements, pairs })
    }

    pub fn from_env() -> Result<Budget, OracleError> {
        match std::env::var(BUDGET_ENV) {
            Ok(v) if !v.trim().is_empty() => Budget::parse(&v),
            _ => Ok(Budget::default()),
        }
    }

    fn require_elements(&self, params: RingParams) -> Result<u128, OracleError> {
        let required = params.order();
        if required > self.elements {
            return Err(OracleError::BudgetExceeded {
                what: "element enumeration",
                required,
                budget: self.elements,
            });
        }
        Ok(required)
    }
}

/// The element with lexicographic index `idx`.
fn element_at(params: RingParams, mut idx: u128) -> Quaternion {
    let n = params.n() as u128;
    let mut coeffs = [0u64; 4];
    for c in coeffs.iter_mut().rev() {
        *c = (idx % n) as u64;
        idx /= n;
    }
    Quaternion::from_coeffs(params, coeffs)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct InvariantFingerprint {
    pub n: u64,
    pub a: u64,
    pub b: u64,
    pub unit_count: u64,
    /// `z^2 = 1`
    pub involution_count: u64,
    /// `z^2 = 0`
    pub square_zero_count: u64,
    /// `z^2 = z`
    pub idempotent_count: u64,
    pub center_size: u64,
}

impl InvariantFingerprint {
    /// The counts alone, dropping the presentation.
    pub fn counts(&self) -> [u64; 5] {
        [
            self.unit_count,
            self.involution_count,
            self.square_zero_count,
            self.idempotent_count,
            self.center_size,
        ]
    }
}

/// Exact element counts by full enumeration.
pub fn census(params: RingParams, budget: &Budget) -> Result<InvariantFingerprint, OracleError> {
    let order = budget.require_elements(params)?;
    let (one, zero) = (Quaternion::one(params), Quaternion::zero(params));
    let (i, j) = (Quaternion::i(params), Quaternion::j(params));
    let counts = (0..order as u64)
        .into_par_iter()
        .map(|idx| {
            let z = element_at(params, idx as u128);
            let sq = z * z;
            [
                z.is_unit() as u64,
                (sq == one) as u64,
                (sq == zero) as u64,
                (sq == z) as u64,
                (z * i == i * z && z * j == j * z) as u64,
            ]
        })
        .reduce(|| [0; 5], |x, y| std::array::from_fn(|t| x[t] + y[t]));
    Ok(InvariantFingerprint {
        n: params.n(),
        a: params.a().value(),
        b: params.b().value(),
        unit_count: counts[0],
        involution_count: counts[1],
        square_zero_count: counts[2],
        idempotent_count: counts[3],
        center_size: counts[4],
    })
}

/// Outcome of a generator-pair search.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum PairSearch {
    /// A valid pair, as a map into the target.
    Found(QuatMap),
    /// No pair exists; counts of the candidate roots that were tried.
    Exhausted { roots_i: usize, roots_j: usize },
}

impl PairSearch {
    pub fn is_found(&self) -> bool {
        matches!(self, PairSearch::Found(_))
    }

    pub fn map(&self) -> Option<&QuatMap> {
        match self {
            PairSearch::Found(m) => Some(m),
            PairSearch::Exhausted { .. } => None,
        }
    }
}

type PairCache = Mutex<HashMap<(RingParams, RingParams), PairSearch>>;

fn pair_cache() -> &'static PairCache {
    static CACHE: OnceLock<PairCache> = OnceLock::new();
    CACHE.get_or_init(|| Mutex::new(HashMap::new()))
}

/// Searches `target` for images of the generators of `source`.
///
/// Candidates for `I` are the roots of `a`; for each, `J` runs over the roots
/// of `b` that anticommute with `I`. The outer loop runs in parallel and the
/// first hit in lexicographic order wins, so the result does not depend on
/// scheduling. A ring searched against itself gets the identity pair.
/// Results are cached per `(source, target)`.
pub fn find_generator_pair(
    source: RingParams,
    target: RingParams,
    budget: &Budget,
) -> Result<PairSearch, OracleError> {
    if source.n() != target.n() {
        return Err(OracleError::ModulusMismatch(source.n(), target.n()));
    }
    let order = budget.require_elements(target)?;
    let space = order * order;
    if space > budget.pairs {
        return Err(OracleError::BudgetExceeded {
            what: "generator-pair search",
            required: space,
            budget: budget.pairs,
        });
    }
    if let Some(hit) = pair_cache().lock().expect("cache poisoned").get(&(source, target)) {
        return Ok(hit.clone());
    }
    if source == target {
        return Ok(PairSearch::Found(QuatMap::identity(source)));
    }
    let sa = Quaternion::from_coeffs(target, [source.a().value(), 0, 0, 0]);
    let sb = Quaternion::from_coeffs(target, [source.b().value(), 0, 0, 0]);
    let roots = |s: Quaternion| -> Vec<Quaternion> {
        (0..order as u64)
            .into_par_iter()
            .map(|idx| element_at(target, idx as u128))
            .filter(|z| z.square() == s)
            .collect()
    };
    let (roots_i, roots_j) = (roots(sa), roots(sb));
    let (a, b) = (source.a().value(), source.b().value());
    let hit = roots_i.par_iter().find_map_first(|gi| {
        roots_j
            .iter()
            .filter(|gj| (*gi * **gj + **gj * *gi).is_zero())
            .find(|gj| relation_violations(a, b, gi, *gj).is_empty())
            .map(|gj| QuatMap::new(source, *gi, *gj))
    });
    let result = match hit {
        Some(map) => PairSearch::Found(map),
        None => PairSearch::Exhausted {
            roots_i: roots_i.len(),
            roots_j: roots_j.len(),
        },
    };
    pair_cache()
        .lock()
        .expect("cache poisoned")
        .insert((source, target), result.clone());
    Ok(result)
}

/// True iff `z` or `1 - z` is a unit for every `z`, units decided by the norm.
pub fn check_local(params: RingParams, budget: &Budget) -> Result<bool, OracleError> {
    let order = budget.require_elements(params)?;
    let one = Quaternion::one(params);
    Ok((0..order as u64).into_par_iter().all(|idx| {
        let z = element_at(params, idx as u128);
        z.is_unit() || (one - z).is_unit()
    }))
}

/// Unit flags for every element, in enumeration order, found by searching
/// for a right inverse. Costs `n^8` products.
pub fn units_by_search(params: RingParams, budget: &Budget) -> Result<Vec<bool>, OracleError> {
    let order = budget.require_elements(params)?;
    if order * order > budget.pairs {
        return Err(OracleError::BudgetExceeded {
            what: "inverse search",
            required: order * order,
            budget: budget.pairs,
        });
    }
    let elements: Vec<Quaternion> = (0..order).map(|idx| element_at(params, idx)).collect();
    Ok(elements
        .par_iter()
        .map(|z| elements.iter().any(|w| (*z * *w).is_one()))
        .collect())
}

/// [`check_local`] with units decided by [`units_by_search`].
pub fn check_local_by_search(params: RingParams, budget: &Budget) -> Result<bool, OracleError> {
    let units = units_by_search(params, budget)?;
    let n = params.n() as u128;
    // 1 - z flips the scalar coefficient and negates the rest.
    Ok((0..units.len() as u128).all(|idx| {
        let z = element_at(params, idx);
        let c = z.coeffs();
        let m = params.n();
        let w = [(1 + m - c[0]) % m, (m - c[1]) % m, (m - c[2]) % m, (m - c[3]) % m];
        let widx = w.iter().fold(0u128, |acc, &x| acc * n + x as u128);
        units[idx as usize] || units[widx as usize]
    }))
}

/// Which solver a crosscheck exercises.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Suite {
    BinaryFormOdd,
    ScalarSquare2adic,
    SumTwoSquares2adic,
}

impl Suite {
    pub const ALL: [Suite; 3] = [
        Suite::BinaryFormOdd,
        Suite::ScalarSquare2adic,
        Suite::SumTwoSquares2adic,
    ];

    pub fn parse(name: &str) -> Option<Vec<Suite>> {
        match name {
            "all" => Some(Suite::ALL.to_vec()),
            "binary_form_odd" => Some(vec![Suite::BinaryFormOdd]),
            "scalar_square_2adic" => Some(vec![Suite::ScalarSquare2adic]),
            "sum_two_squares_2adic" => Some(vec![Suite::SumTwoSquares2adic]),
            _ => None,
        }
    }
}

/// Parameter ranges for the crosscheck suites.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CrosscheckRanges {
    /// Odd prime powers `p^s` as `(p, s)`.
    pub odd_moduli: Vec<(u64, u32)>,
    pub scalar_square_max_s: u32,
    pub sum_two_squares_max_s: u32,
    pub triple_budget: u128,
}

impl Default for CrosscheckRanges {
    /// Every `p^s <= 2187` for `p` in 3, 5, 7; `s <= 10` and `s <= 12` for
    /// the 2-adic solvers.
    fn default() -> Self {
        let mut odd_moduli = Vec::new();
        for p in [3u64, 5, 7] {
            let mut s = 1;
            while p.pow(s) <= 2187 {
                odd_moduli.push((p, s));
                s += 1;
            }
        }
        CrosscheckRanges {
            odd_moduli,
            scalar_square_max_s: 10,
            sum_two_squares_max_s: 12,
            triple_budget: DEFAULT_TRIPLE_BUDGET,
        }
    }
}

/// One checked parameter tuple.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CheckRecord {
    pub suite: Suite,
    pub modulus: u64,
    pub params: Vec<i64>,
    pub solvable: bool,
    pub solution: Option<Vec<u64>>,
    pub ok: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SuiteSummary {
    pub suite: Suite,
    pub checked: u64,
    pub mismatches: u64,
    /// Moduli where only one coefficient triple per scaling class was run.
    pub reduced_moduli: Vec<u64>,
}

/// Bitset of the values `x^2 mod m`.
fn squares_mod(m: u64) -> Vec<bool> {
    let mut sq = vec![false; m as usize];
    for x in 0..m {
        sq[mul_mod(x, x, m) as usize] = true;
    }
    sq
}

/// Every value of `a x^2 + b y^2 mod m`, from the set of squares.
fn form_values(a: u64, b: u64, squares: &[bool]) -> Vec<bool> {
    let m = squares.len() as u64;
    let q: Vec<u64> = (0..m).filter(|&v| squares[v as usize]).collect();
    let mut hit = vec![false; m as usize];
    for &u in &q {
        let au = mul_mod(a, u, m);
        for &v in &q {
            hit[((au + mul_mod(b, v, m)) % m) as usize] = true;
        }
    }
    hit
}

fn check_odd_modulus(p: u64, s: u32, triple_budget: u128, sink: &(dyn Fn(&CheckRecord) + Sync)) -> (u64, u64, bool) {
    let m = p.pow(s);
    let squares = squares_mod(m);
    let units: Vec<u64> = (1..m).filter(|&x| gcd(x, m) == 1).collect();
    let nonsquare = *units
        .iter()
        .find(|&&u| !squares[u as usize])
        .expect("odd prime powers have non-squares");
    // a = a0 t^2 with t a unit has the same values of a x^2 as a0.
    let class = |u: u64| if squares[u as usize] { 0 } else { 1 };
    let reps = [1, nonsquare];
    let values: Vec<Vec<Vec<bool>>> = reps
        .iter()
        .map(|&a0| reps.iter().map(|&b0| form_values(a0, b0, &squares)).collect())
        .collect();
    let phi = units.len() as u128;
    let reduced = phi * phi * phi > triple_budget;
    let cs: Vec<u64> = if reduced { reps.to_vec() } else { units.clone() };
    let pairs: Vec<(u64, u64)> = units
        .iter()
        .flat_map(|&a| units.iter().map(move |&b| (a, b)))
        .collect();
    let (checked, bad) = pairs
        .par_iter()
        .map(|&(a, b)| {
            let table = &values[class(a)][class(b)];
            let mut bad = 0u64;
            for &c in &cs {
                let solvable = table[c as usize];
                let got = solve_binary_form_odd(a as i64, b as i64, c as i64, p, s).ok();
                let ok = match got {
                    Some((x, y)) => {
                        (mul_mod(a, mul_mod(x, x, m), m) + mul_mod(b, mul_mod(y, y, m), m)) % m == c
                    }
                    None => !solvable,
                };
                bad += !ok as u64;
                sink(&CheckRecord {
                    suite: Suite::BinaryFormOdd,
                    modulus: m,
                    params: vec![a as i64, b as i64, c as i64],
                    solvable,
                    solution: got.map(|(x, y)| vec![x, y]),
                    ok,
                });
            }
            (cs.len() as u64, bad)
        })
        .reduce(|| (0, 0), |x, y| (x.0 + y.0, x.1 + y.1));
    (checked, bad, reduced)
}

fn check_binary_form_odd(ranges: &CrosscheckRanges, sink: &(dyn Fn(&CheckRecord) + Sync)) -> SuiteSummary {
    let mut summary = SuiteSummary {
        suite: Suite::BinaryFormOdd,
        checked: 0,
        mismatches: 0,
        reduced_moduli: Vec::new(),
    };
    for &(p, s) in &ranges.odd_moduli {
        let (checked, bad, reduced) = check_odd_modulus(p, s, ranges.triple_budget, sink);
        summary.checked += checked;
        summary.mismatches += bad;
        if reduced {
            summary.reduced_moduli.push(p.pow(s));
        }
    }
    summary
}

/// Smallest root is compared too: the solver promises it.
fn check_scalar_square(ranges: &CrosscheckRanges, sink: &(dyn Fn(&CheckRecord) + Sync)) -> SuiteSummary {
    let mut summary = SuiteSummary {
        suite: Suite::ScalarSquare2adic,
        checked: 0,
        mismatches: 0,
        reduced_moduli: Vec::new(),
    };
    for s in 1..=ranges.scalar_square_max_s {
        let m = 1u64 << s;
        let (checked, bad) = (0..m / 2)
            .into_par_iter()
            .map(|h| 2 * h + 1)
            .map(|a| {
                let mut smallest: Vec<Option<u64>> = vec![None; m as usize];
                for x in (0..m).rev() {
                    smallest[mul_mod(a, mul_mod(x, x, m), m) as usize] = Some(x);
                }
                let mut bad = 0u64;
                for b in (1..m).step_by(2) {
                    let expected = smallest[b as usize];
                    let got = solve_scalar_square_2adic(a as i64, b as i64, s).ok();
                    let ok = got == expected;
                    bad += !ok as u64;
                    sink(&CheckRecord {
                        suite: Suite::ScalarSquare2adic,
                        modulus: m,
                        params: vec![a as i64, b as i64],
                        solvable: expected.is_some(),
                        solution: got.map(|x| vec![x]),
                        ok,
                    });
                }
                (m / 2, bad)
            })
            .reduce(|| (0, 0), |x, y| (x.0 + y.0, x.1 + y.1));
        summary.checked += checked;
        summary.mismatches += bad;
    }
    summary
}

fn check_sum_two_squares(ranges: &CrosscheckRanges, sink: &(dyn Fn(&CheckRecord) + Sync)) -> SuiteSummary {
    let mut summary = SuiteSummary {
        suite: Suite::SumTwoSquares2adic,
        checked: 0,
        mismatches: 0,
        reduced_moduli: Vec::new(),
    };
    for s in 1..=ranges.sum_two_squares_max_s {
        let m = 1u64 << s;
        let c = inverse_of_five(s);
        let squares = squares_mod(m);
        let solvable = (0..m).any(|u| squares[u as usize] && squares[reduce(c as i128 - u as i128, m) as usize]);
        let got = solve_sum_two_squares_2adic(c as i64, s).ok();
        let ok = match got {
            Some((x, y)) => (mul_mod(x, x, m) + mul_mod(y, y, m)) % m == c,
            None => !solvable,
        } && solvable;
        summary.checked += 1;
        summary.mismatches += !ok as u64;
        sink(&CheckRecord {
            suite: Suite::SumTwoSquares2adic,
            modulus: m,
            params: vec![c as i64],
            solvable,
            solution: got.map(|(x, y)| vec![x, y]),
            ok,
        });
    }
    summary
}

/// Compares solver outputs and solvability verdicts with exhaustive residue
/// enumeration. Every checked tuple is passed to `sink`.
///
/// For the odd binary form the verdict table comes from the full value set
/// of `a0 x^2 + b0 y^2` for the two square classes of `a` and of `b`. When a
/// modulus has more than `triple_budget` unit triples, only `c` in
/// `{1, nonsquare}` is run: scaling `(a, b, c)` by a unit keeps the solution
/// set, so these cover every triple up to scaling.
pub fn crosscheck_solver(
    suites: &[Suite],
    ranges: &CrosscheckRanges,
    sink: &(dyn Fn(&CheckRecord) + Sync),
) -> Vec<SuiteSummary> {
    suites
        .iter()
        .map(|suite| match suite {
            Suite::BinaryFormOdd => check_binary_form_odd(ranges, sink),
            Suite::ScalarSquare2adic => check_scalar_square(ranges, sink),
            Suite::SumTwoSquares2adic => check_sum_two_squares(ranges, sink),
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::classify::{classify, Tag};

    fn b() -> Budget {
        Budget::default()
    }

    #[test]
    fn involution_census_mod_4() {
        let h = census(RingParams::hamilton(4).unwrap(), &b()).unwrap();
        let l = census(RingParams::ell(4).unwrap(), &b()).unwrap();
        assert_eq!(h.involution_count, 32);
        assert_eq!(l.involution_count, 64);
    }

    #[test]
    fn census_mod_2_agrees() {
        let h = census(RingParams::hamilton(2).unwrap(), &b()).unwrap();
        let l = census(RingParams::ell(2).unwrap(), &b()).unwrap();
        assert_eq!(h.counts(), l.counts());
    }

    #[test]
    fn census_brute_force_small() {
        let p = RingParams::new(3, 1, 2).unwrap();
        let f = census(p, &b()).unwrap();
        let all: Vec<Quaternion> = (0..81).map(|t| element_at(p, t)).collect();
        let one = Quaternion::one(p);
        let units = all.iter().filter(|z| all.iter().any(|w| (**z * *w) == one)).count();
        assert_eq!(f.unit_count as usize, units);
        let center = all
            .iter()
            .filter(|z| all.iter().all(|w| **z * *w == *w * **z))
            .count();
        assert_eq!(f.center_size as usize, center);
        assert!(f.involution_count >= 2);
    }

    #[test]
    fn census_respects_budget() {
        let p = RingParams::hamilton(17).unwrap();
        let err = census(p, &b()).unwrap_err();
        assert!(matches!(err, OracleError::BudgetExceeded { required: 83521, .. }));
    }

    #[test]
    fn pair_search_examples() {
        let (h4, l4) = (RingParams::hamilton(4).unwrap(), RingParams::ell(4).unwrap());
        assert!(!find_generator_pair(h4, l4, &b()).unwrap().is_found());
        assert!(!find_generator_pair(l4, h4, &b()).unwrap().is_found());

        let src = RingParams::new(8, 3, 3).unwrap();
        let hit = find_generator_pair(src, RingParams::hamilton(8).unwrap(), &b()).unwrap();
        assert!(hit.map().unwrap().is_isomorphism());

        let h3 = RingParams::hamilton(3).unwrap();
        let hit = find_generator_pair(h3, h3, &b()).unwrap();
        let map = hit.map().unwrap();
        assert_eq!(map.phi_i.coeffs(), [0, 1, 0, 0]);
        assert_eq!(map.phi_j.coeffs(), [0, 0, 1, 0]);
    }

    #[test]
    fn pair_search_is_cached_and_stable() {
        let src = RingParams::new(4, 1, 3).unwrap();
        let tgt = RingParams::ell(4).unwrap();
        let first = find_generator_pair(src, tgt, &b()).unwrap();
        let again = find_generator_pair(src, tgt, &b()).unwrap();
        assert_eq!(first, again);
    }

    #[test]
    fn concordance_small_moduli() {
        for n in [2u64, 3, 4, 5] {
            for a in 1..n as i64 {
                for bb in 1..n as i64 {
                    if gcd(a as u64, n) != 1 || gcd(bb as u64, n) != 1 {
                        continue;
                    }
                    let src = RingParams::new(n, a, bb).unwrap();
                    let tag = classify(n, a, bb).unwrap().tag;
                    let hit = find_generator_pair(src, tag.params(n).unwrap(), &b()).unwrap();
                    assert!(hit.is_found(), "({a},{bb}) mod {n}");
                    let other = find_generator_pair(src, tag.opposite().params(n).unwrap(), &b()).unwrap();
                    assert_eq!(other.is_found(), n % 4 != 0, "({a},{bb}) mod {n}");
                }
            }
        }
        assert_eq!(classify(4, 3, 3).unwrap().tag, Tag::Hamilton);
    }

    #[test]
    fn fingerprints_match_across_found_pairs() {
        let n = 4;
        for a in [1i64, 3] {
            for bb in [1i64, 3] {
                let src = RingParams::new(n, a, bb).unwrap();
                for tgt in [RingParams::hamilton(n).unwrap(), RingParams::ell(n).unwrap()] {
                    if find_generator_pair(src, tgt, &b()).unwrap().is_found() {
                        assert_eq!(census(src, &b()).unwrap().counts(), census(tgt, &b()).unwrap().counts());
                    }
                }
            }
        }
    }

    #[test]
    fn local_ring_examples() {
        for n in [2u64, 4, 8] {
            assert!(check_local(RingParams::hamilton(n).unwrap(), &b()).unwrap());
            assert!(check_local(RingParams::ell(n).unwrap(), &b()).unwrap());
        }
        for n in [3u64, 5, 9] {
            assert!(!check_local(RingParams::hamilton(n).unwrap(), &b()).unwrap());
        }
    }

    #[test]
    fn norm_units_match_inverse_search() {
        for n in [2u64, 3, 4] {
            for p in [RingParams::hamilton(n).unwrap(), RingParams::ell(n).unwrap()] {
                let units = units_by_search(p, &b()).unwrap();
                for (idx, &u) in units.iter().enumerate() {
                    assert_eq!(element_at(p, idx as u128).is_unit(), u);
                }
                assert_eq!(check_local(p, &b()).unwrap(), check_local_by_search(p, &b()).unwrap());
            }
        }
    }

    #[test]
    fn budget_parsing() {
        assert_eq!(Budget::parse("100").unwrap(), Budget { elements: 100, pairs: DEFAULT_PAIR_BUDGET });
        assert_eq!(Budget::parse("100, 200").unwrap(), Budget { elements: 100, pairs: 200 });
        assert!(Budget::parse("x").is_err());
        assert!(Budget::parse("1,2,3").is_err());
    }

    #[test]
    fn crosscheck_small_ranges() {
        let ranges = CrosscheckRanges {
            odd_moduli: vec![(3, 1), (3, 2), (3, 3), (5, 1), (5, 2), (7, 1), (7, 2)],
            scalar_square_max_s: 6,
            sum_two_squares_max_s: 8,
            triple_budget: DEFAULT_TRIPLE_BUDGET,
        };
        let seen = std::sync::atomic::AtomicU64::new(0);
        let sink = |_: &CheckRecord| {
            seen.fetch_add(1, std::sync::atomic::Ordering::Relaxed);
        };
        let report = crosscheck_solver(&Suite::ALL, &ranges, &sink);
        let total: u64 = report.iter().map(|r| r.checked).sum();
        assert_eq!(total, seen.into_inner());
        for r in &report {
            assert_eq!(r.mismatches, 0, "{:?}", r.suite);
            assert!(r.reduced_moduli.is_empty());
        }
        let odd = &report[0];
        let expected: u64 = [2u64, 6, 18, 4, 20, 6, 42].iter().map(|f| f * f * f).sum();
        assert_eq!(odd.checked, expected);
    }

    #[test]
    fn crosscheck_reduces_over_budget() {
        let ranges = CrosscheckRanges {
            odd_moduli: vec![(3, 3)],
            scalar_square_max_s: 0,
            sum_two_squares_max_s: 0,
            triple_budget: 100,
        };
        let report = crosscheck_solver(&[Suite::BinaryFormOdd], &ranges, &|_| {});
        assert_eq!(report[0].reduced_moduli, vec![27]);
        assert_eq!(report[0].checked, 18 * 18 * 2);
        assert_eq!(report[0].mismatches, 0);
    }
}
