use rand::seq::SliceRandom;
use rand::Rng;

use super::params::ProtocolParams;
use crate::error::{Error, Result};
use crate::matrix::{find_singular_minor, is_mds, random_mds, FqMatrix};

/// The demand `V · X_W`: `L` combinations of the messages indexed by `W`.
///
/// `w` holds 1-based message indices; column `j` of `v` is the coefficient
/// column of message `w[j]`.
#[derive(Clone, Debug, PartialEq, Eq)]
#[cfg_attr(feature = "json", derive(serde::Serialize, serde::Deserialize))]
pub struct Demand {
    w: Vec<usize>,
    v: FqMatrix,
}

impl Demand {
    /// Checks that `w` holds distinct indices in `[1, k]` matching `v`'s
    /// columns and that `v` is MDS.
    pub fn new(w: Vec<usize>, v: FqMatrix, k: usize) -> Result<Self> {
        if w.len() != v.cols() {
            return Err(Error::InvalidDemand(format!(
                "{} indices but V has {} columns",
                w.len(),
                v.cols()
            )));
        }
        if v.rows() == 0 || v.rows() > v.cols() {
            return Err(Error::InvalidDemand(format!(
                "V is {}x{}, need 1 <= L <= D",
                v.rows(),
                v.cols()
            )));
        }
        if let Some(&bad) = w.iter().find(|&&i| i == 0 || i > k) {
            return Err(Error::InvalidDemand(format!(
                "index {bad} outside [1, {k}]"
            )));
        }
        let mut sorted = w.clone();
        sorted.sort_unstable();
        if let Some(dup) = sorted.windows(2).find(|p| p[0] == p[1]) {
            return Err(Error::InvalidDemand(format!("index {} repeated", dup[0])));
        }
        if !is_mds(&v)? {
            let cols = find_singular_minor(&v)?.unwrap_or_default();
            let named: Vec<usize> = cols.iter().map(|&c| w[c]).collect();
            return Err(Error::InvalidDemand(format!(
                "V is not MDS: columns for messages {named:?} form a singular submatrix"
            )));
        }
        Ok(Demand { w, v })
    }

    /// Uniform support and a random MDS coefficient matrix, `W` ascending.
    pub fn random<R: Rng + ?Sized>(params: &ProtocolParams, rng: &mut R) -> Result<Self> {
        let mut w: Vec<usize> = rand::seq::index::sample(rng, params.k, params.d)
            .into_iter()
            .map(|i| i + 1)
            .collect();
        w.sort_unstable();
        let v = random_mds(params.field, params.l, params.d, rng)?;
        Ok(Demand { w, v })
    }

    pub fn w(&self) -> &[usize] {
        &self.w
    }

    pub fn v(&self) -> &FqMatrix {
        &self.v
    }

    pub fn d(&self) -> usize {
        self.w.len()
    }

    pub fn l(&self) -> usize {
        self.v.rows()
    }

    /// Reorders `W` and the columns of `V` together: entry `j` of the result
    /// is entry `order[j]` of `self`.
    pub fn reordered(&self, order: &[usize]) -> Result<Demand> {
        let mut seen = vec![false; self.d()];
        if order.len() != self.d()
            || order
                .iter()
                .any(|&o| o >= self.d() || std::mem::replace(&mut seen[o], true))
        {
            return Err(Error::InvalidPermutation(format!(
                "{order:?} is not a permutation of 0..{}",
                self.d()
            )));
        }
        Ok(Demand {
            w: order.iter().map(|&o| self.w[o]).collect(),
            v: self.v.select_columns(order)?,
        })
    }

    /// `V · X_W` computed directly from the plaintext demand.
    pub fn evaluate(&self, x: &FqMatrix) -> Result<FqMatrix> {
        let rows: Vec<usize> = self.w.iter().map(|&i| i - 1).collect();
        self.v.mul(&x.select_rows(&rows)?)
    }
}

/// Applies a uniformly random permutation to the support and carries `V`'s
/// columns along.
pub fn shuffle_demand<R: Rng + ?Sized>(demand: &Demand, rng: &mut R) -> Demand {
    let mut order: Vec<usize> = (0..demand.d()).collect();
    order.shuffle(rng);
    demand
        .reordered(&order)
        .expect("a shuffle is a permutation")
}
