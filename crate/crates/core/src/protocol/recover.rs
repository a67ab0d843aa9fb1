use super::params::{ProtocolCase, ProtocolParams};
use super::query::{Answer, ClientSecret, TrailingSecret};
use crate::error::{Error, Result};
use crate::field::FieldElement;
use crate::matrix::FqMatrix;

/// Recovers `V · X_W` from the server's answer.
pub fn recover(
    answer: &Answer,
    secret: &ClientSecret,
    params: &ProtocolParams,
) -> Result<FqMatrix> {
    let y = answer.y();
    if y.rows() != params.answer_rows {
        return Err(Error::RecoveryInconsistent(format!(
            "answer has {} rows, expected {}",
            y.rows(),
            params.answer_rows
        )));
    }
    let (l, n) = (params.l, params.n);
    let cols = y.cols();
    if secret.b <= n {
        return y.block((secret.b - 1) * l, 0, l, cols);
    }
    let trailing = y.block(n * l, 0, params.trailing_rows(), cols)?;
    match (&secret.trailing, params.case) {
        (
            TrailingSecret::Align {
                choice: Some(ch), ..
            },
            ProtocolCase::AlignS { t, .. },
        ) => combine_row_blocks(&trailing, l, t, &ch.l_idx, &ch.c),
        (TrailingSecret::Parity { choice: Some(ch) }, ProtocolCase::ParityEmbed) => {
            let v = secret.demand.v();
            let mut target = FqMatrix::zeros(params.field, l, params.trailing_cols());
            for (j, &h) in ch.h.iter().enumerate() {
                for i in 0..l {
                    target[(i, h - 1)] = v[(i, j)];
                }
            }
            let t = ch.trailing.solve_left(&target)?.ok_or_else(|| {
                Error::RecoveryInconsistent("target is not in the row space of G_{n+1}".into())
            })?;
            t.mul(&trailing)
        }
        _ => Err(Error::RecoveryInconsistent(format!(
            "secret for block {} does not match the protocol case",
            secret.b
        ))),
    }
}

/// Row-block combination used by the aligned recovery, applied to the query
/// matrix instead of the answer. Exposed for audits.
pub fn combine_row_blocks(
    trailing: &FqMatrix,
    l: usize,
    t: usize,
    l_idx: &[usize],
    c: &[FieldElement],
) -> Result<FqMatrix> {
    let f = trailing.field();
    let mut acc = FqMatrix::zeros(f, l, trailing.cols());
    for (&li, &ci) in l_idx.iter().zip(c) {
        acc = acc.add(
            &trailing
                .block((li - t - 1) * l, 0, l, trailing.cols())?
                .scale(ci),
        )?;
    }
    Ok(acc)
}
