use rand::seq::SliceRandom;
use rand::Rng;

use super::demand::{shuffle_demand, Demand};
use super::params::{select_block, ProtocolCase, ProtocolParams};
use crate::error::{Error, Result};
use crate::field::{FieldElement, PrimeField};
use crate::matrix::{
    cauchy, generator_from_parity, mds_complete, random_grs_points, random_mds, ColumnTemplate,
    FqMatrix,
};

/// Attempts allowed to each randomized MDS completion.
pub const COMPLETION_RETRY_CAP: usize = 1000;

/// What the server sees: the coding matrix and the message permutation.
///
/// `pi[i]` is the 0-based position that message `i` (0-based) takes in the
/// permuted message matrix.
#[derive(Clone, Debug, PartialEq, Eq)]
#[cfg_attr(feature = "json", derive(serde::Serialize, serde::Deserialize))]
pub struct Query {
    g: FqMatrix,
    pi: Vec<usize>,
}

impl Query {
    pub fn new(g: FqMatrix, pi: Vec<usize>) -> Result<Self> {
        if g.cols() != pi.len() {
            return Err(Error::Shape(format!(
                "G has {} columns but pi has {} entries",
                g.cols(),
                pi.len()
            )));
        }
        check_bijection(&pi)?;
        Ok(Query { g, pi })
    }

    pub fn g(&self) -> &FqMatrix {
        &self.g
    }

    pub fn pi(&self) -> &[usize] {
        &self.pi
    }

    pub fn k(&self) -> usize {
        self.pi.len()
    }

    pub fn field(&self) -> PrimeField {
        self.g.field()
    }

    /// `inverse[p]` is the message placed at position `p`.
    pub fn pi_inverse(&self) -> Vec<usize> {
        let mut inv = vec![0; self.pi.len()];
        for (i, &p) in self.pi.iter().enumerate() {
            inv[p] = i;
        }
        inv
    }
}

pub(crate) fn check_bijection(pi: &[usize]) -> Result<()> {
    let mut seen = vec![false; pi.len()];
    for (i, &p) in pi.iter().enumerate() {
        if p >= pi.len() {
            return Err(Error::InvalidPermutation(format!(
                "message {i} mapped to {p}, outside 0..{}",
                pi.len()
            )));
        }
        if std::mem::replace(&mut seen[p], true) {
            return Err(Error::InvalidPermutation(format!(
                "position {p} used twice"
            )));
        }
    }
    Ok(())
}

/// The server's reply `Y = G · pi(X)`.
#[derive(Clone, Debug, PartialEq, Eq)]
#[cfg_attr(feature = "json", derive(serde::Serialize, serde::Deserialize))]
pub struct Answer {
    y: FqMatrix,
}

impl Answer {
    pub fn new(y: FqMatrix) -> Self {
        Answer { y }
    }

    pub fn y(&self) -> &FqMatrix {
        &self.y
    }

    pub fn into_inner(self) -> FqMatrix {
        self.y
    }
}

/// Cauchy-scaled layout of the trailing block when `L <= S`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AlignmentScaffold {
    pub x: Vec<FieldElement>,
    pub y: Vec<FieldElement>,
    /// `m x t`, entry `(i, j) = (x_i - y_j)^{-1}`.
    pub omega: FqMatrix,
    /// `alpha[i]` scales column block `i` (0-based here, `alpha_{i+1}` in the
    /// usual numbering).
    pub alpha: Vec<FieldElement>,
    /// `L x (D + R)` MDS matrix split into `t + m` blocks of width `S`.
    pub c: FqMatrix,
}

/// Where the demand was hidden inside the scaffold. Indices are 1-based:
/// `k_idx` in `[1, t]`, `l_idx` in `[t + 1, t + m]`, both ascending.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AlignmentChoice {
    pub k_idx: Vec<usize>,
    pub l_idx: Vec<usize>,
    /// Row-block coefficients `c_{l_1}, ..., c_{l_s}` with `c_{l_1} = 1`.
    pub c: Vec<FieldElement>,
}

/// Shortening data for `L > S`. `h` is 1-based and ascending.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ParityChoice {
    pub h: Vec<usize>,
    pub lambda: FqMatrix,
    pub h_matrix: FqMatrix,
    pub trailing: FqMatrix,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum TrailingSecret {
    Align {
        scaffold: AlignmentScaffold,
        choice: Option<AlignmentChoice>,
    },
    Parity {
        choice: Option<ParityChoice>,
    },
}

/// Everything the client keeps to itself.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ClientSecret {
    /// 1-based index of the block carrying the demand.
    pub b: usize,
    /// The demand in the shuffled order that was planted.
    pub demand: Demand,
    pub trailing: TrailingSecret,
}

/// Row-block coefficients for the chosen block indices: the null vector of
/// `M1` normalised to `c_{l_1} = 1`.
///
/// `k_idx` (in `[1, t]`) and `l_idx` (in `[t+1, t+m]`) are 1-based with
/// `|k_idx| + |l_idx| = t + 1`.
pub fn alignment_coefficients(
    t: usize,
    m: usize,
    k_idx: &[usize],
    l_idx: &[usize],
    omega: &FqMatrix,
) -> Result<Vec<FieldElement>> {
    let f = omega.field();
    if omega.shape() != (m, t) {
        return Err(Error::Shape(format!(
            "omega is {}x{}, expected {m}x{t}",
            omega.rows(),
            omega.cols()
        )));
    }
    if l_idx.is_empty() || k_idx.len() + l_idx.len() != t + 1 {
        return Err(Error::AlignmentSingular(format!(
            "{} k and {} l indices for t = {t}",
            k_idx.len(),
            l_idx.len()
        )));
    }
    if k_idx.iter().any(|&k| k == 0 || k > t) || l_idx.iter().any(|&l| l <= t || l > t + m) {
        return Err(Error::AlignmentSingular("block index out of range".into()));
    }
    let unchosen: Vec<usize> = (1..=t).filter(|j| !k_idx.contains(j)).collect();
    let mut m1 = FqMatrix::zeros(f, unchosen.len(), l_idx.len());
    for (a, &k) in unchosen.iter().enumerate() {
        for (j, &l) in l_idx.iter().enumerate() {
            m1[(a, j)] = omega[(l - t - 1, k - 1)];
        }
    }
    let null = m1.right_null_space();
    if null.rows() != 1 {
        return Err(Error::AlignmentSingular(format!(
            "null space of M1 has dimension {}",
            null.rows()
        )));
    }
    let raw = null.row(0);
    if raw.iter().any(|e| e.is_zero()) {
        return Err(Error::AlignmentSingular(
            "null vector of M1 has a zero entry".into(),
        ));
    }
    let norm = f.inv(raw[0])?;
    Ok(raw.iter().map(|&e| f.mul(e, norm)).collect())
}

/// Solves the alignment system: `c` from [`alignment_coefficients`] and all
/// `t + m` scalars `alpha`, the unconstrained ones drawn at random.
pub fn solve_alignment<R: Rng + ?Sized>(
    t: usize,
    m: usize,
    k_idx: &[usize],
    l_idx: &[usize],
    omega: &FqMatrix,
    rng: &mut R,
) -> Result<(Vec<FieldElement>, Vec<FieldElement>)> {
    let f = omega.field();
    let c = alignment_coefficients(t, m, k_idx, l_idx, omega)?;
    let mut alpha: Vec<FieldElement> = (0..t + m)
        .map(|_| f.elem(rng.random_range(1..f.modulus())))
        .collect();
    for (j, &l) in l_idx.iter().enumerate() {
        alpha[l - 1] = f.inv(c[j])?;
    }
    for &k in k_idx {
        let sum = l_idx
            .iter()
            .zip(&c)
            .fold(FieldElement::ZERO, |acc, (&l, &cj)| {
                f.add(acc, f.mul(cj, omega[(l - t - 1, k - 1)]))
            });
        alpha[k - 1] = f
            .inv(sum)
            .map_err(|_| Error::AlignmentSingular(format!("alpha_{k} has no inverse")))?;
    }
    Ok((c, alpha))
}

/// Assembles the `L m x (D + R)` trailing block from its scaffold: row block
/// `i` holds `alpha_j omega_{i,j} C_j` for `j < t` and `alpha_{t+i} C_{t+i}`.
pub fn alignment_trailing_block(scaffold: &AlignmentScaffold, s: usize) -> Result<FqMatrix> {
    let f = scaffold.c.field();
    let (m, t) = scaffold.omega.shape();
    let l = scaffold.c.rows();
    if scaffold.c.cols() != (t + m) * s || scaffold.alpha.len() != t + m {
        return Err(Error::Shape("scaffold dimensions disagree".into()));
    }
    let blocks: Vec<FqMatrix> = (0..t + m)
        .map(|j| scaffold.c.block(0, j * s, l, s))
        .collect::<Result<_>>()?;
    let mut g = FqMatrix::zeros(f, l * m, (t + m) * s);
    for i in 0..m {
        #[allow(clippy::needless_range_loop)]
        for j in 0..t {
            let coef = f.mul(scaffold.alpha[j], scaffold.omega[(i, j)]);
            g.set_block(i * l, j * s, &blocks[j].scale(coef))?;
        }
        g.set_block(
            i * l,
            (t + i) * s,
            &blocks[t + i].scale(scaffold.alpha[t + i]),
        )?;
    }
    Ok(g)
}

/// Places the `n` leading blocks on the diagonal and the trailing block in the
/// bottom-right corner.
pub fn assemble_query_matrix(
    params: &ProtocolParams,
    blocks: &[FqMatrix],
    trailing: &FqMatrix,
) -> Result<FqMatrix> {
    let (l, d) = (params.l, params.d);
    if blocks.len() != params.n || blocks.iter().any(|b| b.shape() != (l, d)) {
        return Err(Error::Shape(format!(
            "expected {} blocks of size {l}x{d}",
            params.n
        )));
    }
    if trailing.shape() != (params.trailing_rows(), params.trailing_cols()) {
        return Err(Error::Shape(format!(
            "trailing block is {}x{}, expected {}x{}",
            trailing.rows(),
            trailing.cols(),
            params.trailing_rows(),
            params.trailing_cols()
        )));
    }
    let mut g = FqMatrix::zeros(params.field, params.answer_rows, params.k);
    for (i, b) in blocks.iter().enumerate() {
        g.set_block(i * l, i * d, b)?;
    }
    g.set_block(params.n * l, params.n * d, trailing)?;
    Ok(g)
}

/// 0-based positions receiving the shuffled demand's messages, in order.
pub fn planted_positions(params: &ProtocolParams, secret: &ClientSecret) -> Vec<usize> {
    let (d, s, n) = (params.d, params.s, params.n);
    if secret.b <= n {
        return ((secret.b - 1) * d..secret.b * d).collect();
    }
    match &secret.trailing {
        TrailingSecret::Align {
            choice: Some(ch), ..
        } => {
            let r = ch.k_idx.len();
            (0..d)
                .map(|j| {
                    let e = j / s;
                    let block = if e < r { ch.k_idx[e] } else { ch.l_idx[e - r] };
                    n * d + (block - 1) * s + j % s
                })
                .collect()
        }
        TrailingSecret::Parity { choice: Some(ch) } => {
            ch.h.iter().map(|&h| n * d + h - 1).collect()
        }
        _ => Vec::new(),
    }
}

/// Builds the permutation: the planted messages go to `planted`, the rest
/// are spread uniformly over the remaining positions.
fn build_permutation<R: Rng + ?Sized>(
    k: usize,
    w: &[usize],
    planted: &[usize],
    rng: &mut R,
) -> Vec<usize> {
    let mut pi = vec![usize::MAX; k];
    let mut taken = vec![false; k];
    for (&msg, &pos) in w.iter().zip(planted) {
        pi[msg - 1] = pos;
        taken[pos] = true;
    }
    let mut free: Vec<usize> = (0..k).filter(|&p| !taken[p]).collect();
    free.shuffle(rng);
    let mut free = free.into_iter();
    for slot in pi.iter_mut().filter(|p| **p == usize::MAX) {
        *slot = free
            .next()
            .expect("as many free positions as unplanted messages");
    }
    pi
}

/// Builds the query for `demand`, which must have `W` inside `[1, K]`, `D`
/// columns and `L` rows matching `params`.
pub fn build_query<R: Rng + ?Sized>(
    demand: &Demand,
    params: &ProtocolParams,
    rng: &mut R,
) -> Result<(Query, ClientSecret)> {
    if demand.d() != params.d || demand.l() != params.l || demand.v().field() != params.field {
        return Err(Error::InvalidDemand(format!(
            "demand is {}x{} over {}, parameters need {}x{} over {}",
            demand.l(),
            demand.d(),
            demand.v().field(),
            params.l,
            params.d,
            params.field
        )));
    }
    if demand.w().iter().any(|&i| i == 0 || i > params.k) {
        return Err(Error::InvalidDemand(format!(
            "support outside [1, {}]",
            params.k
        )));
    }
    let f = params.field;
    let (l, d, n) = (params.l, params.d, params.n);
    let shuffled = shuffle_demand(demand, rng);
    let b = select_block(params, rng);

    let mut blocks = Vec::with_capacity(n);
    for i in 1..=n {
        blocks.push(if i == b {
            shuffled.v().clone()
        } else {
            random_mds(f, l, d, rng)?
        });
    }

    let (trailing_block, trailing) = match params.case {
        ProtocolCase::AlignS { t, m } => {
            let s = params.s;
            let points = random_grs_points(f, t + m, rng)?;
            let (x, y) = (points[..m].to_vec(), points[m..].to_vec());
            let omega = cauchy(f, &x, &y)?;
            let (c_matrix, alpha, choice) = if b <= n {
                let c_matrix = random_mds(f, l, d + params.r, rng)?;
                let alpha = (0..t + m)
                    .map(|_| f.elem(rng.random_range(1..f.modulus())))
                    .collect();
                (c_matrix, alpha, None)
            } else {
                let mut chosen = rand::seq::index::sample(rng, t + m, t + 1).into_vec();
                chosen.sort_unstable();
                let k_idx: Vec<usize> = chosen.iter().filter(|&&j| j < t).map(|j| j + 1).collect();
                let l_idx: Vec<usize> = chosen.iter().filter(|&&j| j >= t).map(|j| j + 1).collect();
                let mut template = ColumnTemplate::new(f, l, d + params.r);
                for (e, &block) in k_idx.iter().chain(&l_idx).enumerate() {
                    let piece = shuffled.v().block(0, e * s, l, s)?;
                    let targets: Vec<usize> = ((block - 1) * s..block * s).collect();
                    template.pin_columns(&targets, &piece)?;
                }
                let c_matrix = mds_complete(&template, rng, COMPLETION_RETRY_CAP)?;
                let (c, alpha) = solve_alignment(t, m, &k_idx, &l_idx, &omega, rng)?;
                (c_matrix, alpha, Some(AlignmentChoice { k_idx, l_idx, c }))
            };
            let scaffold = AlignmentScaffold {
                x,
                y,
                omega,
                alpha,
                c: c_matrix,
            };
            let g = alignment_trailing_block(&scaffold, s)?;
            (g, TrailingSecret::Align { scaffold, choice })
        }
        ProtocolCase::ParityEmbed => {
            let width = d + params.r;
            if b <= n {
                (
                    random_mds(f, l + params.r, width, rng)?,
                    TrailingSecret::Parity { choice: None },
                )
            } else {
                let mut h: Vec<usize> = rand::seq::index::sample(rng, width, d)
                    .into_iter()
                    .map(|j| j + 1)
                    .collect();
                h.sort_unstable();
                let lambda = shuffled.v().right_null_space();
                let mut template = ColumnTemplate::new(f, d - l, width);
                let targets: Vec<usize> = h.iter().map(|j| j - 1).collect();
                template.pin_columns(&targets, &lambda)?;
                let h_matrix = mds_complete(&template, rng, COMPLETION_RETRY_CAP)?;
                // a random basis so the code, not its reduced echelon form, is what leaks
                let basis = FqMatrix::random_invertible(f, l + params.r, rng);
                let g = basis.mul(&generator_from_parity(&h_matrix, width)?)?;
                let choice = ParityChoice {
                    h,
                    lambda,
                    h_matrix,
                    trailing: g.clone(),
                };
                (
                    g,
                    TrailingSecret::Parity {
                        choice: Some(choice),
                    },
                )
            }
        }
    };

    let g = assemble_query_matrix(params, &blocks, &trailing_block)?;
    let secret = ClientSecret {
        b,
        demand: shuffled,
        trailing,
    };
    let planted = planted_positions(params, &secret);
    let pi = build_permutation(params.k, secret.demand.w(), &planted, rng);
    Ok((Query { g, pi }, secret))
}

/// The server's computation: permute the rows of `x` by `pi`, multiply by `G`.
pub fn answer(query: &Query, x: &FqMatrix) -> Result<Answer> {
    if x.rows() != query.k() {
        return Err(Error::Shape(format!(
            "store holds {} messages, query expects {}",
            x.rows(),
            query.k()
        )));
    }
    if x.field() != query.field() {
        return Err(Error::Shape(format!(
            "store is over {}, query over {}",
            x.field(),
            query.field()
        )));
    }
    let permuted = x.select_rows(&query.pi_inverse())?;
    Ok(Answer {
        y: query.g.mul(&permuted)?,
    })
}
