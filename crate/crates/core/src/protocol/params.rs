use num_integer::gcd;
use rand::Rng;

use crate::error::{Error, Result};
use crate::field::PrimeField;
use crate::Rational;

/// Which construction the trailing block uses.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
#[cfg_attr(feature = "json", derive(serde::Serialize, serde::Deserialize))]
pub enum ProtocolCase {
    /// `L <= S`: Cauchy-scaled column blocks of width `S`, with `t + m = (D + R) / S`.
    AlignS { t: usize, m: usize },
    /// `L > S`: the trailing block generates an `[D + R, L + R]` MDS code.
    ParityEmbed,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
#[cfg_attr(feature = "json", derive(serde::Serialize, serde::Deserialize))]
pub struct ProtocolParams {
    pub k: usize,
    pub d: usize,
    pub l: usize,
    pub field: PrimeField,
    /// Message length N.
    pub msg_len: usize,
    pub r: usize,
    pub s: usize,
    /// Number of plain `L x D` blocks, `floor(K/D) - 1`.
    pub n: usize,
    pub case: ProtocolCase,
    pub answer_rows: usize,
}

pub fn derive_params(
    k: usize,
    d: usize,
    l: usize,
    q: u64,
    msg_len: usize,
) -> Result<ProtocolParams> {
    if l == 0 || l > d || d > k {
        return Err(Error::BadShape(format!(
            "need 1 <= L <= D <= K, got K={k} D={d} L={l}"
        )));
    }
    if msg_len == 0 {
        return Err(Error::BadShape("message length N must be positive".into()));
    }
    let field = PrimeField::new(q)?;
    let r = k % d;
    if (q as usize) < d + r {
        return Err(Error::FieldTooSmall { q, needed: d + r });
    }
    // gcd(D, 0) = D covers the R = 0 convention
    let s = gcd(d + r, r);
    let n = k / d - 1;
    let (case, answer_rows) = if l <= s {
        let t = d / s - 1;
        let m = r / s + 1;
        (ProtocolCase::AlignS { t, m }, l * (n + m))
    } else {
        (ProtocolCase::ParityEmbed, l * (n + 1) + r)
    };
    Ok(ProtocolParams {
        k,
        d,
        l,
        field,
        msg_len,
        r,
        s,
        n,
        case,
        answer_rows,
    })
}

impl ProtocolParams {
    /// Rows of the trailing block `G_{n+1}`.
    pub fn trailing_rows(&self) -> usize {
        self.answer_rows - self.l * self.n
    }

    /// Columns of the trailing block, `D + R`.
    pub fn trailing_cols(&self) -> usize {
        self.d + self.r
    }

    /// `L / answer_rows`.
    pub fn achieved_rate(&self) -> Rational {
        Rational::new(self.l as i64, self.answer_rows as i64)
    }

    /// Probability that the demand is placed in block `b` (1-based).
    pub fn block_probability(&self, b: usize) -> Rational {
        let k = self.k as i64;
        if (1..=self.n).contains(&b) {
            Rational::new(self.d as i64, k)
        } else if b == self.n + 1 {
            Rational::new((self.d + self.r) as i64, k)
        } else {
            Rational::from_integer(0)
        }
    }
}

pub fn achieved_rate(params: &ProtocolParams) -> Rational {
    params.achieved_rate()
}

/// Draws the block that will carry the demand: each of the first `n` blocks
/// with probability `D/K`, the trailing block with probability `(D+R)/K`.
pub fn select_block<R: Rng + ?Sized>(params: &ProtocolParams, rng: &mut R) -> usize {
    let u = rng.random_range(0..params.k);
    if u < params.n * params.d {
        u / params.d + 1
    } else {
        params.n + 1
    }
}
