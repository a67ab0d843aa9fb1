//! MDS verification and completion.

use rand::Rng;

use super::grs::recognize_grs;
use super::FqMatrix;
use crate::error::{Error, Result};
use crate::field::{FieldElement, PrimeField};

/// Incremental echelon basis used to test linear independence of column sets
/// without recomputing from scratch at every node of the subset search.
#[derive(Clone)]
struct Echelon {
    field: PrimeField,
    // (pivot index, vector normalised so the pivot entry is 1)
    rows: Vec<(usize, Vec<FieldElement>)>,
}

impl Echelon {
    fn new(field: PrimeField) -> Self {
        Echelon {
            field,
            rows: Vec::new(),
        }
    }

    /// Reduces `v` against the basis; returns the residual pivot if independent.
    fn insert(&mut self, mut v: Vec<FieldElement>) -> bool {
        let f = self.field;
        for (p, row) in &self.rows {
            let factor = v[*p];
            if factor.is_zero() {
                continue;
            }
            for (x, r) in v.iter_mut().zip(row) {
                *x = f.sub(*x, f.mul(factor, *r));
            }
        }
        let Some(p) = v.iter().position(|e| !e.is_zero()) else {
            return false;
        };
        let inv = f.inv(v[p]).expect("nonzero pivot");
        for x in v.iter_mut() {
            *x = f.mul(*x, inv);
        }
        self.rows.push((p, v));
        true
    }

    fn pop(&mut self) {
        self.rows.pop();
    }
}

/// Searches for a set of `rows(m)` columns whose square submatrix is singular.
/// Exhaustive over all maximal minors, with early pruning: once a column
/// subset is dependent every superset is too.
pub fn find_singular_minor(m: &FqMatrix) -> Result<Option<Vec<usize>>> {
    let (k, n) = m.shape();
    if k > n {
        return Err(Error::Shape(format!(
            "MDS check needs rows <= cols, got {k}x{n}"
        )));
    }
    if k == 0 {
        return Ok(None);
    }
    let columns: Vec<Vec<FieldElement>> = (0..n).map(|j| m.column(j)).collect();
    let mut basis = Echelon::new(m.field());
    let mut chosen = Vec::with_capacity(k);
    Ok(
        search(&columns, k, 0, &mut chosen, &mut basis).map(|mut bad| {
            // pad the dependent prefix to a full k-subset for reporting
            let mut j = 0;
            while bad.len() < k {
                if !bad.contains(&j) {
                    bad.push(j);
                }
                j += 1;
            }
            bad.sort_unstable();
            bad
        }),
    )
}

fn search(
    columns: &[Vec<FieldElement>],
    k: usize,
    start: usize,
    chosen: &mut Vec<usize>,
    basis: &mut Echelon,
) -> Option<Vec<usize>> {
    if chosen.len() == k {
        return None;
    }
    let remaining = k - chosen.len();
    for j in start..=columns.len() - remaining {
        chosen.push(j);
        if !basis.insert(columns[j].clone()) {
            return Some(chosen.clone());
        }
        let found = search(columns, k, j + 1, chosen, basis);
        basis.pop();
        chosen.pop();
        if found.is_some() {
            return found;
        }
    }
    None
}

/// True iff every maximal square submatrix is invertible, checked by
/// enumerating all of them.
pub fn is_mds_exhaustive(m: &FqMatrix) -> Result<bool> {
    Ok(find_singular_minor(m)?.is_none())
}

/// True iff every maximal square submatrix is invertible.
///
/// A matrix spanning a GRS code is certified directly from its recovered
/// evaluation points; anything else falls back to the exhaustive search.
pub fn is_mds(m: &FqMatrix) -> Result<bool> {
    let (k, n) = m.shape();
    if k > n {
        return Err(Error::Shape(format!(
            "MDS check needs rows <= cols, got {k}x{n}"
        )));
    }
    if k == 0 || recognize_grs(m).is_some() {
        return Ok(true);
    }
    is_mds_exhaustive(m)
}

/// A matrix under construction in which some columns are pinned and the rest
/// are left for [`mds_complete`] to fill.
#[derive(Clone, Debug)]
pub struct ColumnTemplate {
    matrix: FqMatrix,
    pinned: Vec<bool>,
}

impl ColumnTemplate {
    pub fn new(field: PrimeField, rows: usize, cols: usize) -> Self {
        ColumnTemplate {
            matrix: FqMatrix::zeros(field, rows, cols),
            pinned: vec![false; cols],
        }
    }

    /// Every column pinned.
    pub fn fixed(matrix: FqMatrix) -> Self {
        let cols = matrix.cols();
        ColumnTemplate {
            matrix,
            pinned: vec![true; cols],
        }
    }

    /// Pins `src`'s columns at the given target positions.
    pub fn pin_columns(&mut self, targets: &[usize], src: &FqMatrix) -> Result<()> {
        if src.rows() != self.matrix.rows() || src.cols() != targets.len() {
            return Err(Error::Shape(format!(
                "pinning {}x{} into {} positions of a {}-row template",
                src.rows(),
                src.cols(),
                targets.len(),
                self.matrix.rows()
            )));
        }
        for (c, &t) in targets.iter().enumerate() {
            if t >= self.pinned.len() {
                return Err(Error::Index {
                    index: t,
                    len: self.pinned.len(),
                });
            }
            for i in 0..src.rows() {
                self.matrix[(i, t)] = src[(i, c)];
            }
            self.pinned[t] = true;
        }
        Ok(())
    }

    pub fn is_pinned(&self, col: usize) -> bool {
        self.pinned[col]
    }

    pub fn pinned_indices(&self) -> Vec<usize> {
        (0..self.pinned.len()).filter(|&c| self.pinned[c]).collect()
    }

    pub fn free_indices(&self) -> Vec<usize> {
        (0..self.pinned.len())
            .filter(|&c| !self.pinned[c])
            .collect()
    }

    pub fn matrix(&self) -> &FqMatrix {
        &self.matrix
    }
}

/// Fills the free columns of `template` so that the whole matrix is MDS,
/// leaving pinned columns untouched.
///
/// When the pinned columns span a GRS code the code is lengthened with fresh
/// evaluation points, which always succeeds while the total length is at most
/// q. Otherwise free columns are drawn at random one at a time, rejecting any
/// draw that creates a singular maximal minor; after `retry_cap` failed passes
/// the completion gives up.
pub fn mds_complete<R: Rng + ?Sized>(
    template: &ColumnTemplate,
    rng: &mut R,
    retry_cap: usize,
) -> Result<FqMatrix> {
    let m = &template.matrix;
    let (k, n) = m.shape();
    if k > n {
        return Err(Error::Shape(format!(
            "MDS completion needs rows <= cols, got {k}x{n}"
        )));
    }
    let pinned = template.pinned_indices();
    let free = template.free_indices();
    if k == 0 {
        return Ok(m.clone());
    }
    let pinned_block = m.select_columns(&pinned)?;
    // a recognised GRS block is MDS, so the exhaustive minor search is only
    // needed when recognition fails
    let grs = if pinned.len() >= k {
        recognize_grs(&pinned_block)
    } else {
        None
    };
    if pinned.len() >= k {
        if grs.is_none() {
            if let Some(singular) = find_singular_minor(&pinned_block)? {
                let cols: Vec<usize> = singular.iter().map(|&i| pinned[i]).collect();
                return Err(Error::Shape(format!(
                    "pinned columns {cols:?} are already singular"
                )));
            }
        }
    } else if pinned_block.rank() < pinned.len() {
        return Err(Error::Shape("pinned columns are linearly dependent".into()));
    }
    if free.is_empty() {
        return Ok(m.clone());
    }

    if let Some(cols) = grs.and_then(|form| form.fresh_columns(free.len(), rng)) {
        let mut out = m.clone();
        for (&c, col) in free.iter().zip(cols) {
            for (i, e) in col.into_iter().enumerate() {
                out[(i, c)] = e;
            }
        }
        return Ok(out);
    }

    const DRAWS_PER_COLUMN: usize = 64;
    let f = m.field();
    let q = f.modulus();
    for _ in 0..retry_cap {
        let mut out = m.clone();
        let mut placed: Vec<Vec<FieldElement>> = pinned.iter().map(|&c| m.column(c)).collect();
        let mut ok = true;
        for &c in &free {
            let accepted = (0..DRAWS_PER_COLUMN).find_map(|_| {
                let col: Vec<FieldElement> =
                    (0..k).map(|_| f.elem(rng.random_range(0..q))).collect();
                compatible(&placed, &col, k, f).then_some(col)
            });
            match accepted {
                Some(col) => {
                    for (i, e) in col.iter().enumerate() {
                        out[(i, c)] = *e;
                    }
                    placed.push(col);
                }
                None => {
                    ok = false;
                    break;
                }
            }
        }
        if ok {
            return Ok(out);
        }
    }
    Err(Error::CompletionFailed {
        attempts: retry_cap,
    })
}

/// Whether adding `col` keeps every set of at most `k` columns independent,
/// given that `placed` already has that property.
fn compatible(placed: &[Vec<FieldElement>], col: &[FieldElement], k: usize, f: PrimeField) -> bool {
    let size = (k - 1).min(placed.len());
    let mut idx: Vec<usize> = (0..size).collect();
    loop {
        let mut e = Echelon::new(f);
        let independent =
            idx.iter().all(|&i| e.insert(placed[i].clone())) && e.insert(col.to_vec());
        if !independent {
            return false;
        }
        // next combination
        let mut i = size;
        loop {
            if i == 0 {
                return true;
            }
            i -= 1;
            if idx[i] < placed.len() - size + i {
                idx[i] += 1;
                for j in i + 1..size {
                    idx[j] = idx[j - 1] + 1;
                }
                break;
            }
        }
    }
}
