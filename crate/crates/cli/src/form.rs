//! Parsing of `a x^2 + b y^2 = c` and `p^s`.

use anyhow::{anyhow, bail, Context, Result};
use quatring::modint::factorize;

/// Coefficients `(a, b, c)` of `a x^2 + b y^2 = c`.
///
/// Terms may come in either order, coefficients may be omitted or written
/// with `*`, and whitespace is ignored: `3x^2 - y^2 = -1` is `(3, -1, -1)`.
pub fn parse_form(text: &str) -> Result<(i64, i64, i64)> {
    let compact: String = text.chars().filter(|c| !c.is_whitespace()).collect();
    let (lhs, rhs) = compact
        .split_once('=')
        .ok_or_else(|| anyhow!("form {text:?} has no '='"))?;
    let c: i64 = rhs
        .parse()
        .with_context(|| format!("right-hand side {rhs:?} is not an integer"))?;
    let (mut a, mut b) = (None, None);
    for term in split_terms(lhs) {
        let (coeff, var) = if let Some(head) = term.strip_suffix("x^2") {
            (head, &mut a)
        } else if let Some(head) = term.strip_suffix("y^2") {
            (head, &mut b)
        } else {
            bail!("term {term:?} is neither a multiple of x^2 nor of y^2");
        };
        if var.is_some() {
            bail!("repeated term {term:?}");
        }
        *var = Some(parse_coefficient(coeff)?);
    }
    match (a, b) {
        (Some(a), Some(b)) => Ok((a, b, c)),
        _ => bail!("form {text:?} needs both an x^2 and a y^2 term"),
    }
}

fn split_terms(lhs: &str) -> Vec<&str> {
    let mut terms = Vec::new();
    let mut start = 0;
    for (idx, ch) in lhs.char_indices() {
        if (ch == '+' || ch == '-') && idx > start {
            terms.push(&lhs[start..idx]);
            start = idx;
        }
    }
    terms.push(&lhs[start..]);
    terms
}

fn parse_coefficient(head: &str) -> Result<i64> {
    let head = head.strip_prefix('+').unwrap_or(head);
    let head = head.strip_suffix('*').unwrap_or(head);
    match head {
        "" => Ok(1),
        "-" => Ok(-1),
        _ => head
            .parse()
            .with_context(|| format!("coefficient {head:?} is not an integer")),
    }
}

/// `p^s` written as `p^s` or as the value itself.
pub fn parse_prime_power(text: &str) -> Result<(u64, u32)> {
    let text = text.trim();
    if let Some((p, s)) = text.split_once('^') {
        let p: u64 = p.trim().parse().with_context(|| format!("{p:?} is not a prime"))?;
        let s: u32 = s.trim().parse().with_context(|| format!("{s:?} is not an exponent"))?;
        let factors = factorize(p)?;
        if factors.factors().len() != 1 || factors.factors()[0].s != 1 {
            bail!("{p} is not prime");
        }
        if s == 0 {
            bail!("exponent must be positive");
        }
        return Ok((p, s));
    }
    let m: u64 = text.parse().with_context(|| format!("{text:?} is not a modulus"))?;
    match factorize(m)?.factors() {
        [f] => Ok((f.p, f.s)),
        _ => bail!("{m} is not a prime power"),
    }
}
