use super::privacy::{binomial, combinations};
use crate::error::{Error, Result};
use crate::field::FieldElement;
use crate::matrix::{is_mds, FqMatrix};
use crate::protocol::{
    alignment_coefficients, combine_row_blocks, ClientSecret, ProtocolCase, ProtocolParams, Query,
    TrailingSecret,
};

/// Basis of the code spanned by `m`'s rows, shortened to the coordinates in
/// `w` (0-based): the codewords vanishing off `w`, restricted to `w` in the
/// given order.
pub fn shortened_code(m: &FqMatrix, w: &[usize]) -> Result<FqMatrix> {
    if let Some(&bad) = w.iter().find(|&&c| c >= m.cols()) {
        return Err(Error::Index {
            index: bad,
            len: m.cols(),
        });
    }
    let basis = m.row_space_basis();
    let off: Vec<usize> = (0..m.cols()).filter(|c| !w.contains(c)).collect();
    // y · basis vanishes off w  <=>  y in the left null space of basis[:, off]
    let combos = basis.select_columns(&off)?.transpose().right_null_space();
    combos.mul(&basis)?.select_columns(w)
}

/// Whether the row space of `m` contains `L` codewords supported inside `w`
/// (1-based, ordered like `v`'s columns) whose restriction to `w` spans the
/// same code as `v`.
pub fn kl_feasible(m: &FqMatrix, w: &[usize], v: &FqMatrix) -> Result<bool> {
    if v.cols() != w.len() {
        return Err(Error::Shape(format!(
            "support has {} indices, V has {} columns",
            w.len(),
            v.cols()
        )));
    }
    if w.contains(&0) {
        return Err(Error::Index {
            index: 0,
            len: m.cols(),
        });
    }
    let cols: Vec<usize> = w.iter().map(|i| i - 1).collect();
    let code = shortened_code(m, &cols)?;
    Ok(code.row_space_eq(v))
}

/// Outcome for one choice of column groups (1-based) of the trailing block.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SubsetOutcome {
    pub subset: Vec<usize>,
    /// Row-block coefficients, present in the aligned case when solvable.
    pub c: Option<Vec<FieldElement>>,
    pub feasible: bool,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SweepReport {
    pub outcomes: Vec<SubsetOutcome>,
}

impl SweepReport {
    pub fn total(&self) -> usize {
        self.outcomes.len()
    }

    pub fn feasible(&self) -> usize {
        self.outcomes.iter().filter(|o| o.feasible).count()
    }

    pub fn infeasible(&self) -> Vec<&[usize]> {
        self.outcomes
            .iter()
            .filter(|o| !o.feasible)
            .map(|o| o.subset.as_slice())
            .collect()
    }

    pub fn all_feasible(&self) -> bool {
        self.outcomes.iter().all(|o| o.feasible)
    }

    pub fn find(&self, subset: &[usize]) -> Option<&SubsetOutcome> {
        self.outcomes.iter().find(|o| o.subset == subset)
    }
}

/// For every `(t+1)`-subset `J` of the `t + m` column groups: solve for the
/// row-block coefficients, combine, and check the result is supported exactly
/// on `J` with an MDS `L x D` restriction.
pub fn alignment_feasibility_sweep(
    trailing: &FqMatrix,
    omega: &FqMatrix,
    params: &ProtocolParams,
) -> Result<SweepReport> {
    let ProtocolCase::AlignS { t, m } = params.case else {
        return Err(Error::BadShape(
            "alignment sweep needs the aligned case".into(),
        ));
    };
    let (l, s) = (params.l, params.s);
    if trailing.shape() != (l * m, (t + m) * s) {
        return Err(Error::Shape(format!(
            "trailing block is {}x{}",
            trailing.rows(),
            trailing.cols()
        )));
    }
    let mut outcomes = Vec::new();
    for chosen in combinations(t + m, t + 1) {
        let subset: Vec<usize> = chosen.iter().map(|c| c + 1).collect();
        let k_idx: Vec<usize> = subset.iter().copied().filter(|&j| j <= t).collect();
        let l_idx: Vec<usize> = subset.iter().copied().filter(|&j| j > t).collect();
        let Ok(c) = alignment_coefficients(t, m, &k_idx, &l_idx, omega) else {
            outcomes.push(SubsetOutcome {
                subset,
                c: None,
                feasible: false,
            });
            continue;
        };
        let combined = combine_row_blocks(trailing, l, t, &l_idx, &c)?;
        let mut feasible = true;
        for blk in 0..t + m {
            let piece = combined.block(0, blk * s, l, s)?;
            if !subset.contains(&(blk + 1)) && !piece.is_zero() {
                feasible = false;
            }
        }
        if feasible {
            let cols: Vec<usize> = chosen.iter().flat_map(|&b| b * s..(b + 1) * s).collect();
            feasible = is_mds(&combined.select_columns(&cols)?)?;
        }
        outcomes.push(SubsetOutcome {
            subset,
            c: Some(c),
            feasible,
        });
    }
    Ok(SweepReport { outcomes })
}

/// For every `D`-subset of the `D + R` trailing columns: the shortened code
/// must have dimension `L`, be MDS, and pass [`kl_feasible`].
pub fn parity_shortening_sweep(
    trailing: &FqMatrix,
    params: &ProtocolParams,
) -> Result<SweepReport> {
    let width = params.d + params.r;
    if trailing.cols() != width {
        return Err(Error::Shape(format!(
            "trailing block has {} columns, expected {width}",
            trailing.cols()
        )));
    }
    let mut outcomes = Vec::new();
    for chosen in combinations(width, params.d) {
        let code = shortened_code(trailing, &chosen)?;
        let subset: Vec<usize> = chosen.iter().map(|c| c + 1).collect();
        let feasible =
            code.rows() == params.l && is_mds(&code)? && kl_feasible(trailing, &subset, &code)?;
        outcomes.push(SubsetOutcome {
            subset,
            c: None,
            feasible,
        });
    }
    Ok(SweepReport { outcomes })
}

/// Number of subsets [`trailing_feasibility_sweep`] visits for `params`.
pub fn trailing_subset_count(params: &ProtocolParams) -> u128 {
    match params.case {
        ProtocolCase::AlignS { t, m } => binomial(t + m, t + 1),
        ProtocolCase::ParityEmbed => binomial(params.d + params.r, params.d),
    }
}

/// Runs the sweep matching the protocol case on the trailing block of
/// `query`. The aligned sweep needs the Cauchy matrix from `secret`.
pub fn trailing_feasibility_sweep(
    query: &Query,
    secret: &ClientSecret,
    params: &ProtocolParams,
) -> Result<SweepReport> {
    let trailing = query.g().block(
        params.n * params.l,
        params.n * params.d,
        params.trailing_rows(),
        params.trailing_cols(),
    )?;
    match (&params.case, &secret.trailing) {
        (ProtocolCase::AlignS { .. }, TrailingSecret::Align { scaffold, .. }) => {
            alignment_feasibility_sweep(&trailing, &scaffold.omega, params)
        }
        (ProtocolCase::ParityEmbed, TrailingSecret::Parity { .. }) => {
            parity_shortening_sweep(&trailing, params)
        }
        _ => Err(Error::BadShape(
            "client secret does not match the protocol case".into(),
        )),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::PrimeField;
    use crate::protocol::{build_query, derive_params, planted_positions, Demand, TrailingSecret};
    use crate::rng::seeded_rng;

    #[test]
    fn planted_supports_are_feasible() {
        let mut rng = seeded_rng(40);
        for (k, d, l, q) in [
            (24, 8, 2, 17),
            (24, 9, 2, 17),
            (24, 7, 2, 17),
            (14, 4, 3, 17),
        ] {
            let p = derive_params(k, d, l, q, 1).unwrap();
            for _ in 0..6 {
                let demand = Demand::random(&p, &mut rng).unwrap();
                let (query, secret) = build_query(&demand, &p, &mut rng).unwrap();
                // G acts on permuted coordinates, so the shuffled demand sits at the planted positions
                let pos: Vec<usize> = planted_positions(&p, &secret)
                    .iter()
                    .map(|x| x + 1)
                    .collect();
                assert!(kl_feasible(query.g(), &pos, secret.demand.v()).unwrap());
                let pi = query.pi();
                let via_pi: Vec<usize> = secret.demand.w().iter().map(|&i| pi[i - 1] + 1).collect();
                assert_eq!(via_pi, pos);
            }
        }
    }

    #[test]
    fn shrinking_support_breaks_feasibility() {
        let mut rng = seeded_rng(41);
        let p = derive_params(24, 8, 2, 17, 1).unwrap();
        let demand = Demand::random(&p, &mut rng).unwrap();
        let (query, secret) = build_query(&demand, &p, &mut rng).unwrap();
        let pos: Vec<usize> = planted_positions(&p, &secret)
            .iter()
            .map(|x| x + 1)
            .collect();
        let outside = (1..=24).find(|i| !pos.contains(i)).unwrap();
        let mut w = pos.clone();
        w[0] = outside;
        assert!(!kl_feasible(query.g(), &w, secret.demand.v()).unwrap());
        assert!(kl_feasible(query.g(), &w[..7], secret.demand.v()).is_err());
    }

    #[test]
    fn shortening_a_grs_code() {
        let f = PrimeField::new(17).unwrap();
        let m = crate::matrix::random_mds(f, 5, 10, &mut seeded_rng(3)).unwrap();
        let code = shortened_code(&m, &[0, 2, 3, 5, 6, 7, 9]).unwrap();
        assert_eq!(code.shape(), (2, 7));
        assert!(is_mds(&code).unwrap());
        assert!(shortened_code(&m, &[11]).is_err());
    }

    #[test]
    fn sweeps_over_generated_queries() {
        let mut rng = seeded_rng(42);
        for (k, d, l, q) in [
            (24, 9, 2, 17),
            (24, 7, 2, 17),
            (30, 8, 2, 17),
            (10, 3, 1, 11),
            (16, 5, 2, 11),
        ] {
            let p = derive_params(k, d, l, q, 1).unwrap();
            for _ in 0..4 {
                let demand = Demand::random(&p, &mut rng).unwrap();
                let (query, secret) = build_query(&demand, &p, &mut rng).unwrap();
                let g = query
                    .g()
                    .block(p.n * p.l, p.n * p.d, p.trailing_rows(), p.trailing_cols())
                    .unwrap();
                let report = match &secret.trailing {
                    TrailingSecret::Align { scaffold, choice } => {
                        let r = alignment_feasibility_sweep(&g, &scaffold.omega, &p).unwrap();
                        if let Some(ch) = choice {
                            let planted: Vec<usize> =
                                ch.k_idx.iter().chain(&ch.l_idx).copied().collect();
                            assert_eq!(r.find(&planted).unwrap().c.as_ref(), Some(&ch.c));
                        }
                        r
                    }
                    TrailingSecret::Parity { .. } => parity_shortening_sweep(&g, &p).unwrap(),
                };
                assert!(report.all_feasible(), "{:?}", report.infeasible());
                assert!(report.total() > 0);
            }
        }
    }

    #[test]
    fn corrupted_trailing_block_is_infeasible() {
        let mut rng = seeded_rng(43);
        let p = derive_params(24, 9, 2, 17, 1).unwrap();
        let demand = Demand::random(&p, &mut rng).unwrap();
        let (query, secret) = build_query(&demand, &p, &mut rng).unwrap();
        let TrailingSecret::Align { scaffold, .. } = &secret.trailing else {
            unreachable!()
        };
        let mut g = query
            .g()
            .block(p.n * p.l, p.n * p.d, p.trailing_rows(), p.trailing_cols())
            .unwrap();
        g[(0, 0)] = p.field.add(g[(0, 0)], p.field.elem(1));
        let r = alignment_feasibility_sweep(&g, &scaffold.omega, &p).unwrap();
        assert!(!r.all_feasible());
        assert!(r.feasible() < r.total());
    }
}
