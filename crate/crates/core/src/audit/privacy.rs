//! Exact posterior computation.
//!
//! From the server's side a query admits a fixed list of candidate supports.
//! Each leading block contributes one candidate with prior mass `D/K`. The
//! trailing block contributes mass `(D + R)/K`, spread evenly over every way
//! of choosing `t + 1` of its `t + m` column groups (aligned case) or `D` of
//! its `D + R` columns (parity case). A candidate only counts if it names
//! exactly `D` messages and, for a leading block, the block is MDS. The
//! posterior of a message is the surviving mass of candidates containing it,
//! normalised by the total surviving mass.

use std::fmt;

use num_rational::Ratio;

use crate::error::{Error, Result};
use crate::matrix::{is_mds, FqMatrix};
use crate::protocol::{ProtocolCase, ProtocolParams, Query};
use crate::Rational;

type Big = Ratio<i128>;

/// Upper limit for [`candidate_supports`]; the posterior itself never enumerates.
pub const MAX_ENUMERATED_CANDIDATES: u128 = 1_000_000;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum CandidateOrigin {
    /// 1-based leading block.
    Block(usize),
    /// 1-based column groups of the trailing block.
    Trailing(Vec<usize>),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SupportCandidate {
    /// Ascending 1-based message indices.
    pub support: Vec<usize>,
    pub weight: Rational,
    pub origin: CandidateOrigin,
}

/// Candidates sharing one prior mass: choose `choose` of `groups`.
struct Family {
    groups: Vec<Vec<usize>>,
    choose: usize,
    mass: Big,
    block: Option<usize>,
    admissible: bool,
}

impl Family {
    fn sizes(&self) -> Vec<usize> {
        self.groups.iter().map(Vec::len).collect()
    }

    /// `(valid, containing)`: number of valid choices, and for each group the
    /// number of valid choices that include it.
    fn counts(&self, d: usize) -> (u128, Vec<u128>) {
        let g = self.groups.len();
        if !self.admissible || self.choose > g {
            return (0, vec![0; g]);
        }
        let sizes = self.sizes();
        if let Some(&w) = sizes.first() {
            if sizes.iter().all(|&s| s == w) {
                if w * self.choose != d {
                    return (0, vec![0; g]);
                }
                let per = if self.choose == 0 {
                    0
                } else {
                    binomial(g - 1, self.choose - 1)
                };
                return (binomial(g, self.choose), vec![per; g]);
            }
        }
        let valid = subset_sums(&sizes, None, self.choose, d);
        let containing = (0..g)
            .map(|x| {
                if self.choose == 0 || sizes[x] > d {
                    0
                } else {
                    subset_sums(&sizes, Some(x), self.choose - 1, d - sizes[x])
                }
            })
            .collect();
        (valid, containing)
    }
}

/// Number of `choose`-subsets of `sizes` (skipping `skip`) summing to `target`.
fn subset_sums(sizes: &[usize], skip: Option<usize>, choose: usize, target: usize) -> u128 {
    let mut ways = vec![vec![0u128; target + 1]; choose + 1];
    ways[0][0] = 1;
    for (i, &s) in sizes.iter().enumerate() {
        if Some(i) == skip {
            continue;
        }
        for c in (1..=choose).rev() {
            for sum in (s..=target).rev() {
                ways[c][sum] += ways[c - 1][sum - s];
            }
        }
    }
    ways[choose][target]
}

pub(crate) fn binomial(n: usize, k: usize) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    (0..k).fold(1u128, |acc, i| acc * (n - i) as u128 / (i + 1) as u128)
}

fn families(g: &FqMatrix, pi: &[usize], params: &ProtocolParams) -> Vec<Family> {
    let (k, d, l, n) = (params.k, params.d, params.l, params.n);
    let mut pre = vec![Vec::new(); k];
    for (i, &p) in pi.iter().enumerate() {
        if p < k {
            pre[p].push(i);
        }
    }
    let union = |range: std::ops::Range<usize>| -> Vec<usize> {
        let mut v: Vec<usize> = range.flat_map(|p| pre[p].iter().copied()).collect();
        v.sort_unstable();
        v
    };
    let kk = k as i128;
    let mut out = Vec::with_capacity(n + 1);
    for j in 0..n {
        let admissible = g
            .block(j * l, j * d, l, d)
            .ok()
            .and_then(|b| is_mds(&b).ok())
            .unwrap_or(false);
        out.push(Family {
            groups: vec![union(j * d..(j + 1) * d)],
            choose: 1,
            mass: Big::new(d as i128, kk),
            block: Some(j + 1),
            admissible,
        });
    }
    let base = n * d;
    let (groups, choose) = match params.case {
        ProtocolCase::AlignS { t, m } => {
            let s = params.s;
            (
                (0..t + m)
                    .map(|j| union(base + j * s..base + (j + 1) * s))
                    .collect(),
                t + 1,
            )
        }
        ProtocolCase::ParityEmbed => ((base..k).map(|p| union(p..p + 1)).collect(), d),
    };
    out.push(Family {
        groups,
        choose,
        mass: Big::new((d + params.r) as i128, kk),
        block: None,
        admissible: true,
    });
    out
}

/// Per-message posterior, 0-based. All zero when no candidate survives.
fn posteriors(fams: &[Family], k: usize, d: usize) -> (Vec<Big>, u128) {
    let mut post = vec![Big::from_integer(0); k];
    let mut total = Big::from_integer(0);
    let mut candidates = 0u128;
    for fam in fams {
        let (valid, containing) = fam.counts(d);
        if valid == 0 {
            continue;
        }
        candidates += valid;
        let all = binomial(fam.groups.len(), fam.choose) as i128;
        total += fam.mass * Big::new(valid as i128, all);
        for (grp, &cnt) in fam.groups.iter().zip(&containing) {
            let share = fam.mass * Big::new(cnt as i128, all);
            for &i in grp {
                post[i] += share;
            }
        }
    }
    if total != Big::from_integer(0) {
        for p in &mut post {
            *p /= total;
        }
    }
    (post, candidates)
}

fn to_rational(x: Big) -> Rational {
    Rational::new(*x.numer() as i64, *x.denom() as i64)
}

/// Lists every candidate support with its normalised weight.
pub fn candidate_supports(query: &Query, params: &ProtocolParams) -> Result<Vec<SupportCandidate>> {
    let fams = families(query.g(), query.pi(), params);
    let (_, count) = posteriors(&fams, params.k, params.d);
    if count > MAX_ENUMERATED_CANDIDATES {
        return Err(Error::TooLarge(format!("{count} candidate supports")));
    }
    let mut total = Big::from_integer(0);
    let mut raw: Vec<(Vec<usize>, Big, CandidateOrigin)> = Vec::new();
    for fam in &fams {
        if !fam.admissible {
            continue;
        }
        let all = binomial(fam.groups.len(), fam.choose) as i128;
        let each = fam.mass / Big::from_integer(all);
        for chosen in combinations(fam.groups.len(), fam.choose) {
            let mut support: Vec<usize> = chosen
                .iter()
                .flat_map(|&c| fam.groups[c].iter().map(|i| i + 1))
                .collect();
            if support.len() != params.d {
                continue;
            }
            support.sort_unstable();
            let origin = match fam.block {
                Some(b) => CandidateOrigin::Block(b),
                None => CandidateOrigin::Trailing(chosen.iter().map(|c| c + 1).collect()),
            };
            total += each;
            raw.push((support, each, origin));
        }
    }
    Ok(raw
        .into_iter()
        .map(|(support, w, origin)| SupportCandidate {
            support,
            weight: to_rational(w / total),
            origin,
        })
        .collect())
}

pub(crate) fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    if k > n {
        return out;
    }
    let mut idx: Vec<usize> = (0..k).collect();
    loop {
        out.push(idx.clone());
        let mut i = k;
        loop {
            if i == 0 {
                return out;
            }
            i -= 1;
            if idx[i] < n - k + i {
                idx[i] += 1;
                for j in i + 1..k {
                    idx[j] = idx[j - 1] + 1;
                }
                break;
            }
        }
    }
}

/// Total weight of the candidates containing message `i` (1-based).
pub fn posterior(i: usize, candidates: &[SupportCandidate]) -> Rational {
    candidates
        .iter()
        .filter(|c| c.support.binary_search(&i).is_ok())
        .map(|c| c.weight)
        .sum()
}

/// Counts for machine consumption.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
#[cfg_attr(feature = "json", derive(serde::Serialize))]
pub struct AuditSummary {
    pub messages: usize,
    pub candidates: u128,
    pub violations: usize,
    pub structural_issues: usize,
}

impl fmt::Display for AuditSummary {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "messages={} candidates={} violations={} structural_issues={}",
            self.messages, self.candidates, self.violations, self.structural_issues
        )
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PrivacyReport {
    pub expected: Rational,
    /// `posteriors[i]` is the posterior of message `i + 1`.
    pub posteriors: Vec<Rational>,
    pub violations: Vec<(usize, Rational)>,
    pub structural: Vec<String>,
    pub candidates: u128,
}

impl PrivacyReport {
    pub fn passed(&self) -> bool {
        self.violations.is_empty() && self.structural.is_empty()
    }

    pub fn summary(&self) -> AuditSummary {
        AuditSummary {
            messages: self.posteriors.len(),
            candidates: self.candidates,
            violations: self.violations.len(),
            structural_issues: self.structural.len(),
        }
    }

    pub fn render(&self) -> String {
        let mut out = String::new();
        for s in &self.structural {
            out.push_str(&format!("structure: {s}\n"));
        }
        for (i, p) in &self.violations {
            out.push_str(&format!(
                "violation: message {i} has posterior {p}, expected {}\n",
                self.expected
            ));
        }
        if self.passed() {
            out.push_str(&format!(
                "posterior {} for all {} indices over {} candidate supports\n",
                self.expected,
                self.posteriors.len(),
                self.candidates
            ));
        }
        out
    }
}

/// Checks that every message's posterior equals `D/K`.
pub fn audit_individual_privacy(query: &Query, params: &ProtocolParams) -> PrivacyReport {
    audit_view(query.g(), query.pi(), params)
}

/// Same audit on a raw `(G, pi)` pair, which need not be well formed.
pub fn audit_view(g: &FqMatrix, pi: &[usize], params: &ProtocolParams) -> PrivacyReport {
    let (k, d, l, n) = (params.k, params.d, params.l, params.n);
    let mut structural = Vec::new();
    if pi.len() != k {
        structural.push(format!(
            "permutation has {} entries, expected {k}",
            pi.len()
        ));
    } else if let Err(e) = crate::protocol::check_bijection(pi) {
        structural.push(e.to_string());
    }
    if g.shape() != (params.answer_rows, k) {
        structural.push(format!(
            "G is {}x{}, expected {}x{k}",
            g.rows(),
            g.cols(),
            params.answer_rows
        ));
    } else {
        let mut outside = 0usize;
        for i in 0..g.rows() {
            let blk = (i / l).min(n);
            for j in 0..k {
                let inside = if blk < n { j / d == blk } else { j >= n * d };
                if !inside && !g[(i, j)].is_zero() {
                    outside += 1;
                }
            }
        }
        if outside > 0 {
            structural.push(format!(
                "{outside} nonzero entries outside the diagonal blocks"
            ));
        }
    }
    let expected = Rational::new(d as i64, k as i64);
    let (post, candidates) = posteriors(&families(g, pi, params), k, d);
    let posteriors: Vec<Rational> = post.into_iter().map(to_rational).collect();
    let violations = posteriors
        .iter()
        .enumerate()
        .filter(|(_, p)| **p != expected)
        .map(|(i, p)| (i + 1, *p))
        .collect();
    PrivacyReport {
        expected,
        posteriors,
        violations,
        structural,
        candidates,
    }
}
