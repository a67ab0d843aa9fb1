//! Capacity bounds, the joint-privacy comparison rate, and an exhaustive
//! oracle for the integer program behind the converse.

use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::Rational;

/// Largest `K` accepted by [`ilp_bruteforce`].
pub const ILP_MAX_K: usize = 60;

fn check(k: usize, d: usize, l: usize) -> Result<()> {
    if l == 0 || l > d || d > k {
        return Err(Error::BadShape(format!(
            "need 1 <= L <= D <= K, got K={k} D={d} L={l}"
        )));
    }
    Ok(())
}

fn r(k: usize, d: usize) -> i64 {
    (k % d) as i64
}

/// `(floor(K/D) + min(1, R/L))^{-1}`.
pub fn capacity_upper(k: usize, d: usize, l: usize) -> Result<Rational> {
    check(k, d, l)?;
    let extra = Rational::new(r(k, d), l as i64).min(Rational::from_integer(1));
    Ok((Rational::from_integer((k / d) as i64) + extra).recip())
}

/// `(floor(K/D) + min(R/S, R/L))^{-1}` with `S = gcd(D + R, R)`.
pub fn capacity_lower(k: usize, d: usize, l: usize) -> Result<Rational> {
    check(k, d, l)?;
    let rem = r(k, d);
    let s = num_integer::gcd(d as i64 + rem, rem);
    let extra = Rational::new(rem, s).min(Rational::new(rem, l as i64));
    Ok((Rational::from_integer((k / d) as i64) + extra).recip())
}

/// The capacity when the bounds meet, which happens exactly when `R <= L` or `R | D`.
pub fn capacity_exact(k: usize, d: usize, l: usize) -> Result<Option<Rational>> {
    check(k, d, l)?;
    let rem = k % d;
    if rem <= l || d.is_multiple_of(rem) {
        Ok(Some(capacity_upper(k, d, l)?))
    } else {
        Ok(None)
    }
}

/// Rate of an optimal protocol with joint privacy, `L / (K - D + L)`.
pub fn jplt_rate(k: usize, d: usize, l: usize) -> Result<Rational> {
    check(k, d, l)?;
    Ok(Rational::new(l as i64, (k - d + l) as i64))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
#[cfg_attr(feature = "json", derive(serde::Serialize))]
pub struct RateBounds {
    pub upper: Rational,
    pub lower: Rational,
    pub exact: Option<Rational>,
    pub jplt: Rational,
}

pub fn rate_bounds(k: usize, d: usize, l: usize) -> Result<RateBounds> {
    Ok(RateBounds {
        upper: capacity_upper(k, d, l)?,
        lower: capacity_lower(k, d, l)?,
        exact: capacity_exact(k, d, l)?,
        jplt: jplt_rate(k, d, l)?,
    })
}

/// Minimum of `sum_i min(L, N_i)` over ways to write `K` as a sum of parts
/// `N_i` in `[1, D]` with at least one part equal to `D`.
pub fn ilp_bruteforce(k: usize, d: usize, l: usize) -> Result<u64> {
    check(k, d, l)?;
    if k > ILP_MAX_K {
        return Err(Error::TooLarge(format!("K = {k} exceeds {ILP_MAX_K}")));
    }
    // best[x]: cheapest split of mass x into parts in [1, D]
    let mut best = vec![u64::MAX; k - d + 1];
    best[0] = 0;
    for x in 1..best.len() {
        best[x] = (1..=d.min(x))
            .map(|p| l.min(p) as u64 + best[x - p])
            .min()
            .expect("p = 1 always fits");
    }
    Ok(l as u64 + best[k - d])
}

/// `L floor(K/D) + min(L, R)`.
pub fn ilp_closed_form(k: usize, d: usize, l: usize) -> Result<u64> {
    check(k, d, l)?;
    Ok((l * (k / d) + l.min(k % d)) as u64)
}

/// One line of a rate sweep. `l` is `None` when `ratio * D` is not an integer.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SweepRow {
    pub d: usize,
    pub l: Option<usize>,
    pub bounds: Option<RateBounds>,
}

pub fn sweep(k: usize, ratio: Rational, d_values: &[usize]) -> Result<Vec<SweepRow>> {
    d_values
        .iter()
        .map(|&d| {
            let l = ratio * Rational::from_integer(d as i64);
            if !l.is_integer() || *l.numer() < 1 || *l.numer() as usize > d || d > k {
                return Ok(SweepRow {
                    d,
                    l: None,
                    bounds: None,
                });
            }
            let l = *l.numer() as usize;
            Ok(SweepRow {
                d,
                l: Some(l),
                bounds: Some(rate_bounds(k, d, l)?),
            })
        })
        .collect()
}

pub const SWEEP_HEADER: &str = "D,L,iplt_lower,iplt_upper,jplt,exact";

pub fn sweep_csv(rows: &[SweepRow]) -> String {
    let mut out = String::from(SWEEP_HEADER);
    out.push('\n');
    for row in rows {
        match (row.l, row.bounds) {
            (Some(l), Some(b)) => {
                let exact = b.exact.map(decimal6).unwrap_or_default();
                let _ = writeln!(
                    out,
                    "{},{},{},{},{},{}",
                    row.d,
                    l,
                    decimal6(b.lower),
                    decimal6(b.upper),
                    decimal6(b.jplt),
                    exact
                );
            }
            _ => {
                let _ = writeln!(out, "# D={} skipped: L is not an integer in [1, D]", row.d);
            }
        }
    }
    out
}

/// Renders a nonnegative rational with six fractional digits, rounding half up.
pub fn decimal6(x: Rational) -> String {
    let (n, d) = (*x.numer() as i128, *x.denom() as i128);
    let scaled = (2 * n * 1_000_000 + d) / (2 * d);
    format!("{}.{:06}", scaled / 1_000_000, scaled % 1_000_000)
}

/// Parses `"3/5"`, `"0.6"` or `"2"` as an exact rational.
pub fn parse_rational(s: &str) -> Result<Rational> {
    let bad = || Error::BadShape(format!("cannot read {s:?} as a rational"));
    let s = s.trim();
    if s.contains('/') {
        return s.parse::<Rational>().map_err(|_| bad());
    }
    match s.split_once('.') {
        None => s
            .parse::<i64>()
            .map(Rational::from_integer)
            .map_err(|_| bad()),
        Some((whole, frac)) => {
            if frac.is_empty() || frac.len() > 12 || !frac.bytes().all(|b| b.is_ascii_digit()) {
                return Err(bad());
            }
            let whole: i64 = if whole.is_empty() {
                0
            } else {
                whole.parse().map_err(|_| bad())?
            };
            let scale = 10i64.pow(frac.len() as u32);
            let frac: i64 = frac.parse().map_err(|_| bad())?;
            Ok(Rational::from_integer(whole) + Rational::new(frac, scale))
        }
    }
}
