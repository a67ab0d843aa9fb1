//! Dense linear algebra over GF(q).

mod codes;
mod grs;
mod mds;

pub use codes::{cauchy, generator_from_parity, grs_generator, random_grs_points, random_mds};
pub use grs::{recognize_grs, GrsForm};
pub use mds::{find_singular_minor, is_mds, is_mds_exhaustive, mds_complete, ColumnTemplate};

use std::fmt;
use std::ops::{Index, IndexMut};

use rand::Rng;

use crate::error::{Error, Result};
use crate::field::{FieldElement, PrimeField};

/// Dense row-major matrix over a prime field.
#[derive(Clone, PartialEq, Eq, Hash)]
#[cfg_attr(feature = "json", derive(serde::Serialize, serde::Deserialize))]
pub struct FqMatrix {
    field: PrimeField,
    rows: usize,
    cols: usize,
    data: Vec<FieldElement>,
}

impl FqMatrix {
    pub fn new(
        field: PrimeField,
        rows: usize,
        cols: usize,
        data: Vec<FieldElement>,
    ) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::Shape(format!(
                "{} entries for a {rows}x{cols} matrix",
                data.len()
            )));
        }
        if let Some(bad) = data.iter().find(|e| !field.contains(**e)) {
            return Err(Error::Shape(format!(
                "entry {bad} not reduced mod {}",
                field.modulus()
            )));
        }
        Ok(FqMatrix {
            field,
            rows,
            cols,
            data,
        })
    }

    /// Builds a matrix from integer rows, reducing every entry mod q.
    pub fn from_rows<R: AsRef<[u64]>>(field: PrimeField, rows: &[R]) -> Result<Self> {
        let cols = rows.first().map_or(0, |r| r.as_ref().len());
        let mut data = Vec::with_capacity(rows.len() * cols);
        for (i, r) in rows.iter().enumerate() {
            let r = r.as_ref();
            if r.len() != cols {
                return Err(Error::Shape(format!(
                    "row {i} has {} entries, expected {cols}",
                    r.len()
                )));
            }
            data.extend(r.iter().map(|&v| field.elem(v)));
        }
        Ok(FqMatrix {
            field,
            rows: rows.len(),
            cols,
            data,
        })
    }

    pub fn zeros(field: PrimeField, rows: usize, cols: usize) -> Self {
        FqMatrix {
            field,
            rows,
            cols,
            data: vec![FieldElement::ZERO; rows * cols],
        }
    }

    pub fn identity(field: PrimeField, n: usize) -> Self {
        let mut m = Self::zeros(field, n, n);
        for i in 0..n {
            m[(i, i)] = FieldElement::ONE;
        }
        m
    }

    /// Uniformly random entries.
    pub fn random<R: Rng + ?Sized>(
        field: PrimeField,
        rows: usize,
        cols: usize,
        rng: &mut R,
    ) -> Self {
        let q = field.modulus();
        let data = (0..rows * cols)
            .map(|_| field.elem(rng.random_range(0..q)))
            .collect();
        FqMatrix {
            field,
            rows,
            cols,
            data,
        }
    }

    /// Uniformly random invertible `n x n` matrix (rejection on singular draws).
    pub fn random_invertible<R: Rng + ?Sized>(field: PrimeField, n: usize, rng: &mut R) -> Self {
        loop {
            let m = Self::random(field, n, n, rng);
            if m.rank() == n {
                return m;
            }
        }
    }

    #[inline]
    pub fn field(&self) -> PrimeField {
        self.field
    }

    #[inline]
    pub fn rows(&self) -> usize {
        self.rows
    }

    #[inline]
    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    pub fn data(&self) -> &[FieldElement] {
        &self.data
    }

    pub fn row(&self, i: usize) -> &[FieldElement] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> Vec<FieldElement> {
        (0..self.rows).map(|i| self[(i, j)]).collect()
    }

    /// Entries as plain integers, row by row. Handy for fixtures and printing.
    pub fn to_u64_rows(&self) -> Vec<Vec<u64>> {
        (0..self.rows)
            .map(|i| self.row(i).iter().map(|e| e.value()).collect())
            .collect()
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|e| e.is_zero())
    }

    fn same_field(&self, other: &FqMatrix) -> Result<()> {
        if self.field != other.field {
            return Err(Error::Shape(format!(
                "field mismatch: {} vs {}",
                self.field, other.field
            )));
        }
        Ok(())
    }

    pub fn mul(&self, other: &FqMatrix) -> Result<FqMatrix> {
        self.same_field(other)?;
        if self.cols != other.rows {
            return Err(Error::Shape(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let f = self.field;
        let q = f.modulus();
        let mut out = vec![0u64; self.rows * other.cols];
        for i in 0..self.rows {
            let acc = &mut out[i * other.cols..(i + 1) * other.cols];
            for (k, a) in self.row(i).iter().enumerate() {
                if a.is_zero() {
                    continue;
                }
                for (o, b) in acc.iter_mut().zip(other.row(k)) {
                    *o = (*o + a.value() * b.value()) % q;
                }
            }
        }
        Ok(FqMatrix {
            field: f,
            rows: self.rows,
            cols: other.cols,
            data: out.into_iter().map(|v| f.elem(v)).collect(),
        })
    }

    pub fn add(&self, other: &FqMatrix) -> Result<FqMatrix> {
        self.same_field(other)?;
        if self.shape() != other.shape() {
            return Err(Error::Shape(
                "addition of differently shaped matrices".into(),
            ));
        }
        let f = self.field;
        let data = self
            .data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| f.add(*a, *b))
            .collect();
        Ok(FqMatrix { data, ..*self })
    }

    pub fn scale(&self, s: FieldElement) -> FqMatrix {
        let f = self.field;
        FqMatrix {
            data: self.data.iter().map(|a| f.mul(*a, s)).collect(),
            ..*self
        }
    }

    pub fn transpose(&self) -> FqMatrix {
        let mut data = Vec::with_capacity(self.data.len());
        for j in 0..self.cols {
            for i in 0..self.rows {
                data.push(self[(i, j)]);
            }
        }
        FqMatrix {
            field: self.field,
            rows: self.cols,
            cols: self.rows,
            data,
        }
    }

    /// Columns in the given order (duplicates allowed).
    pub fn select_columns(&self, cols: &[usize]) -> Result<FqMatrix> {
        if let Some(&bad) = cols.iter().find(|&&c| c >= self.cols) {
            return Err(Error::Index {
                index: bad,
                len: self.cols,
            });
        }
        let mut data = Vec::with_capacity(self.rows * cols.len());
        for i in 0..self.rows {
            let row = self.row(i);
            data.extend(cols.iter().map(|&c| row[c]));
        }
        Ok(FqMatrix {
            field: self.field,
            rows: self.rows,
            cols: cols.len(),
            data,
        })
    }

    pub fn select_rows(&self, rows: &[usize]) -> Result<FqMatrix> {
        if let Some(&bad) = rows.iter().find(|&&r| r >= self.rows) {
            return Err(Error::Index {
                index: bad,
                len: self.rows,
            });
        }
        let mut data = Vec::with_capacity(rows.len() * self.cols);
        for &r in rows {
            data.extend_from_slice(self.row(r));
        }
        Ok(FqMatrix {
            field: self.field,
            rows: rows.len(),
            cols: self.cols,
            data,
        })
    }

    /// Deletes the listed columns, keeping the survivors in order.
    pub fn puncture(&self, cols: &[usize]) -> Result<FqMatrix> {
        let mut drop = vec![false; self.cols];
        for &c in cols {
            if c >= self.cols {
                return Err(Error::Index {
                    index: c,
                    len: self.cols,
                });
            }
            drop[c] = true;
        }
        let keep: Vec<usize> = (0..self.cols).filter(|&c| !drop[c]).collect();
        self.select_columns(&keep)
    }

    /// Copy of the `rows x cols` block whose top-left corner is `(r0, c0)`.
    pub fn block(&self, r0: usize, c0: usize, rows: usize, cols: usize) -> Result<FqMatrix> {
        if r0 + rows > self.rows || c0 + cols > self.cols {
            return Err(Error::Shape(format!(
                "block {rows}x{cols} at ({r0},{c0}) exceeds {}x{}",
                self.rows, self.cols
            )));
        }
        let mut data = Vec::with_capacity(rows * cols);
        for i in r0..r0 + rows {
            data.extend_from_slice(&self.row(i)[c0..c0 + cols]);
        }
        Ok(FqMatrix {
            field: self.field,
            rows,
            cols,
            data,
        })
    }

    /// Writes `src` with its top-left corner at `(r0, c0)`.
    pub fn set_block(&mut self, r0: usize, c0: usize, src: &FqMatrix) -> Result<()> {
        self.same_field(src)?;
        if r0 + src.rows > self.rows || c0 + src.cols > self.cols {
            return Err(Error::Shape(format!(
                "block {}x{} at ({r0},{c0}) exceeds {}x{}",
                src.rows, src.cols, self.rows, self.cols
            )));
        }
        for i in 0..src.rows {
            let dst = (r0 + i) * self.cols + c0;
            self.data[dst..dst + src.cols].copy_from_slice(src.row(i));
        }
        Ok(())
    }

    pub fn vstack(&self, other: &FqMatrix) -> Result<FqMatrix> {
        self.same_field(other)?;
        if self.cols != other.cols && self.rows != 0 && other.rows != 0 {
            return Err(Error::Shape(
                "vstack of matrices with different widths".into(),
            ));
        }
        let cols = if self.rows == 0 {
            other.cols
        } else {
            self.cols
        };
        let mut data = self.data.clone();
        data.extend_from_slice(&other.data);
        Ok(FqMatrix {
            field: self.field,
            rows: self.rows + other.rows,
            cols,
            data,
        })
    }

    pub fn hstack(&self, other: &FqMatrix) -> Result<FqMatrix> {
        self.same_field(other)?;
        if self.rows != other.rows {
            return Err(Error::Shape(
                "hstack of matrices with different heights".into(),
            ));
        }
        let mut data = Vec::with_capacity(self.data.len() + other.data.len());
        for i in 0..self.rows {
            data.extend_from_slice(self.row(i));
            data.extend_from_slice(other.row(i));
        }
        Ok(FqMatrix {
            field: self.field,
            rows: self.rows,
            cols: self.cols + other.cols,
            data,
        })
    }

    /// Reduced row echelon form and the pivot column of each nonzero row.
    pub fn rref(&self) -> (FqMatrix, Vec<usize>) {
        let mut m = self.clone();
        let pivots = m.rref_in_place(self.cols);
        (m, pivots)
    }

    /// Row-reduces in place, only choosing pivots among the first `pivot_cols`
    /// columns. Returns the pivot columns.
    fn rref_in_place(&mut self, pivot_cols: usize) -> Vec<usize> {
        let f = self.field;
        let cols = self.cols;
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..pivot_cols {
            if r == self.rows {
                break;
            }
            let Some(p) = (r..self.rows).find(|&i| !self.data[i * cols + c].is_zero()) else {
                continue;
            };
            if p != r {
                for j in 0..cols {
                    self.data.swap(p * cols + j, r * cols + j);
                }
            }
            let inv = f.inv(self.data[r * cols + c]).expect("pivot is nonzero");
            for j in c..cols {
                let e = &mut self.data[r * cols + j];
                *e = f.mul(*e, inv);
            }
            for i in 0..self.rows {
                if i == r {
                    continue;
                }
                let factor = self.data[i * cols + c];
                if factor.is_zero() {
                    continue;
                }
                for j in c..cols {
                    let sub = f.mul(factor, self.data[r * cols + j]);
                    let e = &mut self.data[i * cols + j];
                    *e = f.sub(*e, sub);
                }
            }
            pivots.push(c);
            r += 1;
        }
        pivots
    }

    pub fn rank(&self) -> usize {
        self.rref().1.len()
    }

    /// Basis of `{x : M x = 0}` as the rows of a `(cols - rank) x cols` matrix
    /// in reduced row echelon form.
    pub fn right_null_space(&self) -> FqMatrix {
        let f = self.field;
        let (r, pivots) = self.rref();
        let mut is_pivot = vec![false; self.cols];
        for &p in &pivots {
            is_pivot[p] = true;
        }
        let free: Vec<usize> = (0..self.cols).filter(|&c| !is_pivot[c]).collect();
        let mut basis = FqMatrix::zeros(f, free.len(), self.cols);
        for (k, &fc) in free.iter().enumerate() {
            basis[(k, fc)] = FieldElement::ONE;
            for (i, &pc) in pivots.iter().enumerate() {
                basis[(k, pc)] = f.neg(r[(i, fc)]);
            }
        }
        basis.rref().0
    }

    /// Row-space basis in reduced row echelon form (zero rows dropped).
    pub fn row_space_basis(&self) -> FqMatrix {
        let (r, pivots) = self.rref();
        let rank = pivots.len();
        r.block(0, 0, rank, self.cols).expect("rank rows exist")
    }

    /// Whether both matrices span the same row space.
    pub fn row_space_eq(&self, other: &FqMatrix) -> bool {
        if self.field != other.field || self.cols != other.cols {
            return false;
        }
        let a = self.rank();
        a == other.rank() && self.vstack(other).map(|s| s.rank() == a).unwrap_or(false)
    }

    pub fn determinant(&self) -> Result<FieldElement> {
        if self.rows != self.cols {
            return Err(Error::Shape("determinant of a non-square matrix".into()));
        }
        let f = self.field;
        let n = self.rows;
        let mut m = self.data.clone();
        let mut det = FieldElement::ONE;
        for c in 0..n {
            let Some(p) = (c..n).find(|&i| !m[i * n + c].is_zero()) else {
                return Ok(FieldElement::ZERO);
            };
            if p != c {
                for j in 0..n {
                    m.swap(p * n + j, c * n + j);
                }
                det = f.neg(det);
            }
            let pivot = m[c * n + c];
            det = f.mul(det, pivot);
            let inv = f.inv(pivot)?;
            for i in c + 1..n {
                let factor = f.mul(m[i * n + c], inv);
                if factor.is_zero() {
                    continue;
                }
                for j in c..n {
                    let sub = f.mul(factor, m[c * n + j]);
                    m[i * n + j] = f.sub(m[i * n + j], sub);
                }
            }
        }
        Ok(det)
    }

    pub fn inverse(&self) -> Result<FqMatrix> {
        if self.rows != self.cols {
            return Err(Error::Shape("inverse of a non-square matrix".into()));
        }
        let n = self.rows;
        let mut aug = self.hstack(&FqMatrix::identity(self.field, n))?;
        let pivots = aug.rref_in_place(n);
        if pivots.len() < n {
            return Err(Error::RankDeficient {
                rank: pivots.len(),
                rows: n,
            });
        }
        aug.block(0, n, n, n)
    }

    /// Solves `T · self = target` for `T`. Free variables are set to zero when
    /// `self` lacks full row rank. Returns `None` when no solution exists.
    pub fn solve_left(&self, target: &FqMatrix) -> Result<Option<FqMatrix>> {
        self.same_field(target)?;
        if target.cols != self.cols {
            return Err(Error::Shape(format!(
                "target has {} columns, expected {}",
                target.cols, self.cols
            )));
        }
        // self^T · T^T = target^T
        let n = self.rows;
        let mut aug = self.transpose().hstack(&target.transpose())?;
        let pivots = aug.rref_in_place(n);
        for i in pivots.len()..aug.rows {
            if aug.row(i)[n..].iter().any(|e| !e.is_zero()) {
                return Ok(None);
            }
        }
        let mut sol_t = FqMatrix::zeros(self.field, n, target.rows);
        for (i, &p) in pivots.iter().enumerate() {
            for j in 0..target.rows {
                sol_t[(p, j)] = aug[(i, n + j)];
            }
        }
        Ok(Some(sol_t.transpose()))
    }
}

impl Index<(usize, usize)> for FqMatrix {
    type Output = FieldElement;

    #[inline]
    fn index(&self, (i, j): (usize, usize)) -> &FieldElement {
        assert!(
            i < self.rows && j < self.cols,
            "index ({i},{j}) out of {}x{}",
            self.rows,
            self.cols
        );
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for FqMatrix {
    #[inline]
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut FieldElement {
        assert!(
            i < self.rows && j < self.cols,
            "index ({i},{j}) out of {}x{}",
            self.rows,
            self.cols
        );
        &mut self.data[i * self.cols + j]
    }
}

impl fmt::Debug for FqMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(
            f,
            "FqMatrix {}x{} over {}",
            self.rows, self.cols, self.field
        )?;
        for i in 0..self.rows {
            let row: Vec<String> = self.row(i).iter().map(|e| e.to_string()).collect();
            writeln!(f, "  [{}]", row.join(" "))?;
        }
        Ok(())
    }
}

impl fmt::Display for FqMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.rows {
            let row: Vec<String> = self.row(i).iter().map(|e| e.to_string()).collect();
            writeln!(f, "{}", row.join(" "))?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::seeded_rng;
    use proptest::prelude::*;
    use rand::Rng;

    fn gf(q: u64) -> PrimeField {
        PrimeField::new(q).unwrap()
    }

    fn mat(q: u64, rows: &[&[u64]]) -> FqMatrix {
        FqMatrix::from_rows(gf(q), rows).unwrap()
    }

    #[test]
    fn rank_of_small_cases() {
        assert_eq!(FqMatrix::zeros(gf(17), 3, 4).rank(), 0);
        assert_eq!(FqMatrix::identity(gf(17), 5).rank(), 5);
        // second row is 2x first
        assert_eq!(mat(17, &[&[1, 2, 3], &[2, 4, 6], &[0, 0, 1]]).rank(), 2);
    }

    #[test]
    fn null_space_of_identity_is_empty() {
        let n = FqMatrix::identity(gf(19), 4).right_null_space();
        assert_eq!(n.shape(), (0, 4));
    }

    #[test]
    fn null_space_of_zero_is_identity() {
        let n = FqMatrix::zeros(gf(19), 2, 3).right_null_space();
        assert_eq!(n, FqMatrix::identity(gf(19), 3));
    }

    #[test]
    fn inverse_and_determinant_agree() {
        let mut rng = seeded_rng(3);
        let f = gf(23);
        for _ in 0..50 {
            let m = FqMatrix::random(f, 4, 4, &mut rng);
            let det = m.determinant().unwrap();
            match m.inverse() {
                Ok(inv) => {
                    assert!(!det.is_zero());
                    assert_eq!(m.mul(&inv).unwrap(), FqMatrix::identity(f, 4));
                }
                Err(_) => assert!(det.is_zero()),
            }
        }
    }

    #[test]
    fn solve_left_recovers_coefficients() {
        let mut rng = seeded_rng(9);
        let f = gf(17);
        let g = FqMatrix::random(f, 3, 7, &mut rng);
        assert_eq!(g.rank(), 3);
        let t = FqMatrix::random(f, 2, 3, &mut rng);
        let u = t.mul(&g).unwrap();
        assert_eq!(g.solve_left(&u).unwrap().unwrap(), t);
        // a target outside the row space has no solution
        let mut bad = u.clone();
        let extra = g.right_null_space().row(0).to_vec();
        for (j, e) in extra.into_iter().enumerate() {
            bad[(0, j)] = f.add(bad[(0, j)], e);
        }
        assert!(g.solve_left(&bad).unwrap().is_none());
    }

    #[test]
    fn puncture_and_select() {
        let m = mat(17, &[&[1, 2, 3, 4], &[5, 6, 7, 8]]);
        assert_eq!(m.puncture(&[]).unwrap(), m);
        assert_eq!(m.puncture(&[0, 2]).unwrap(), mat(17, &[&[2, 4], &[6, 8]]));
        assert!(matches!(
            m.puncture(&[4]),
            Err(Error::Index { index: 4, len: 4 })
        ));
        assert!(m.select_rows(&[2]).is_err());
    }

    #[test]
    fn mismatched_shapes_are_errors() {
        let a = FqMatrix::zeros(gf(17), 2, 3);
        let b = FqMatrix::zeros(gf(17), 2, 3);
        assert!(a.mul(&b).is_err());
        let c = FqMatrix::zeros(gf(19), 3, 2);
        assert!(a.mul(&c).is_err());
        assert!(FqMatrix::from_rows(gf(17), &[vec![1u64, 2], vec![3]]).is_err());
    }

    fn arb_matrix() -> impl Strategy<Value = FqMatrix> {
        (
            prop::sample::select(vec![2u64, 3, 5, 17, 23]),
            0usize..6,
            0usize..7,
            any::<u64>(),
        )
            .prop_map(|(q, r, c, seed)| {
                let mut rng = seeded_rng(seed);
                let f = gf(q);
                // bias towards rank deficiency by duplicating a row
                let mut m = FqMatrix::random(f, r, c, &mut rng);
                if r >= 2 {
                    let first = m.row(0).to_vec();
                    for (j, e) in first.into_iter().enumerate() {
                        m[(r - 1, j)] = e;
                    }
                }
                m
            })
    }

    proptest! {
        #[test]
        fn rank_nullity(m in arb_matrix()) {
            let n = m.right_null_space();
            prop_assert_eq!(m.rank() + n.rows(), m.cols());
            prop_assert!(m.mul(&n.transpose()).unwrap().is_zero());
            prop_assert_eq!(n.rank(), n.rows());
        }

        #[test]
        fn rank_invariant_under_row_ops(m in arb_matrix(), seed in any::<u64>()) {
            let mut rng = seeded_rng(seed);
            let f = m.field();
            let p = FqMatrix::random_invertible(f, m.rows(), &mut rng);
            prop_assert_eq!(p.mul(&m).unwrap().rank(), m.rank());
            let mut order: Vec<usize> = (0..m.rows()).collect();
            order.reverse();
            prop_assert_eq!(m.select_rows(&order).unwrap().rank(), m.rank());
            if m.rows() > 0 {
                let s = f.elem(rng.random_range(1..f.modulus()));
                let mut scaled = m.clone();
                for j in 0..m.cols() {
                    scaled[(0, j)] = f.mul(m[(0, j)], s);
                }
                prop_assert_eq!(scaled.rank(), m.rank());
            }
        }
    }
}
