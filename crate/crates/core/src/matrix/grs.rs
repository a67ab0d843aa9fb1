//! Recognition of generalized Reed-Solomon codes.
//!
//! A full-rank `k x n` matrix whose row space is a GRS code admits a
//! factorisation `M = B · grs_generator(points, multipliers)` with `B`
//! invertible. Knowing the factorisation certifies the MDS property and lets
//! the code be lengthened with fresh evaluation points, which is how MDS
//! completions with pinned columns are built.
//!
//! Recovery works on the systematic form `[I | A]`. For a GRS code the entries
//! of `A` are `c_i d_j / (b_j - a_i)`, so the entrywise inverse of `A` has rank
//! two, and a rank-two factorisation of it yields the evaluation points as
//! projective points. A Möbius map moves them off infinity, the multipliers
//! come from a linear solve, and the result is checked by rebuilding the code.

use rand::Rng;

use super::codes::{grs_generator, random_nonzero};
use super::FqMatrix;
use crate::field::{FieldElement, PrimeField};

/// `matrix = basis · grs_generator(k, points, multipliers)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GrsForm {
    pub points: Vec<FieldElement>,
    pub multipliers: Vec<FieldElement>,
    pub basis: FqMatrix,
}

impl GrsForm {
    pub fn field(&self) -> PrimeField {
        self.basis.field()
    }

    pub fn dimension(&self) -> usize {
        self.basis.rows()
    }

    /// The column that evaluation point `point` with multiplier `multiplier`
    /// contributes, expressed in this form's basis.
    pub fn column(&self, point: FieldElement, multiplier: FieldElement) -> Vec<FieldElement> {
        let f = self.field();
        let k = self.dimension();
        let mut powers = Vec::with_capacity(k);
        let mut e = multiplier;
        for _ in 0..k {
            powers.push(e);
            e = f.mul(e, point);
        }
        (0..k)
            .map(|i| {
                self.basis
                    .row(i)
                    .iter()
                    .zip(&powers)
                    .fold(FieldElement::ZERO, |acc, (b, p)| f.add(acc, f.mul(*b, *p)))
            })
            .collect()
    }

    /// Draws `count` new columns at evaluation points not yet used, with
    /// random nonzero multipliers. `None` when the field runs out of points.
    pub fn fresh_columns<R: Rng + ?Sized>(
        &self,
        count: usize,
        rng: &mut R,
    ) -> Option<Vec<Vec<FieldElement>>> {
        let f = self.field();
        let q = f.modulus() as usize;
        let used: std::collections::HashSet<u64> = self.points.iter().map(|p| p.value()).collect();
        if used.len() + count > q {
            return None;
        }
        let mut chosen = Vec::with_capacity(count);
        let mut taken = used.clone();
        while chosen.len() < count {
            let p = rng.random_range(0..q as u64);
            if taken.insert(p) {
                chosen.push(f.elem(p));
            }
        }
        Some(
            chosen
                .into_iter()
                .map(|p| self.column(p, random_nonzero(f, rng)))
                .collect(),
        )
    }
}

/// Homogeneous coordinates `(u : w)` on the projective line; `w = 0` is infinity.
#[derive(Clone, Copy, Debug)]
struct Projective {
    u: FieldElement,
    w: FieldElement,
}

impl Projective {
    fn same(&self, other: &Projective, f: PrimeField) -> bool {
        f.mul(self.u, other.w) == f.mul(other.u, self.w)
    }
}

/// Tries to write `m` as `B · grs_generator(points, multipliers)`.
///
/// Returns `None` when `m` lacks full row rank, is longer than the field
/// size, or does not span a GRS code.
pub fn recognize_grs(m: &FqMatrix) -> Option<GrsForm> {
    let f = m.field();
    let (k, n) = m.shape();
    if k > n || n as u64 > f.modulus() {
        return None;
    }
    if k == 0 {
        return Some(GrsForm {
            points: (0..n as u64).map(|v| f.elem(v)).collect(),
            multipliers: vec![FieldElement::ONE; n],
            basis: FqMatrix::zeros(f, 0, 0),
        });
    }
    let head: Vec<usize> = (0..k).collect();
    let head_inv = m.select_columns(&head).ok()?.inverse().ok()?;
    let systematic = head_inv.mul(m).ok()?;
    let redundancy = n - k;

    let points: Vec<FieldElement> = if k == 1 || redundancy <= 1 {
        // every MDS code of dimension 1 or codimension <= 1 is GRS for any points
        (0..n as u64).map(|v| f.elem(v)).collect()
    } else {
        let tail: Vec<usize> = (k..n).collect();
        let a = systematic.select_columns(&tail).ok()?;
        if a.data().iter().any(|e| e.is_zero()) {
            return None;
        }
        let mut inv_entries = FqMatrix::zeros(f, k, redundancy);
        for i in 0..k {
            for j in 0..redundancy {
                inv_entries[(i, j)] = f.inv(a[(i, j)]).ok()?;
            }
        }
        let (rref, pivots) = inv_entries.rref();
        if pivots.len() != 2 {
            return None;
        }
        let projective = projective_points(&inv_entries, &rref, &pivots);
        for x in 0..n {
            for y in x + 1..n {
                if projective[x].same(&projective[y], f) {
                    return None;
                }
            }
        }
        to_affine(&projective, f)?
    };

    let multipliers = solve_multipliers(m, k, &points)?;
    let grs = grs_generator(f, k, &points, &multipliers).ok()?;
    let basis = m
        .select_columns(&head)
        .ok()?
        .mul(&grs.select_columns(&head).ok()?.inverse().ok()?)
        .ok()?;
    if basis.mul(&grs).ok()? != *m {
        return None;
    }
    Some(GrsForm {
        points,
        multipliers,
        basis,
    })
}

/// Evaluation points for the systematic coordinates (from the row factors)
/// followed by the redundant coordinates (from the column factors).
fn projective_points(inv_entries: &FqMatrix, rref: &FqMatrix, pivots: &[usize]) -> Vec<Projective> {
    let f = inv_entries.field();
    let (k, r) = inv_entries.shape();
    let mut out = Vec::with_capacity(k + r);
    // row i = x1 · y1 + x2 · y2 where y1, y2 are the two RREF rows, so the
    // coefficients can be read off at the pivot columns
    for i in 0..k {
        let x1 = inv_entries[(i, pivots[0])];
        let x2 = inv_entries[(i, pivots[1])];
        out.push(Projective {
            u: f.neg(x2),
            w: x1,
        });
    }
    for j in 0..r {
        out.push(Projective {
            u: rref[(0, j)],
            w: rref[(1, j)],
        });
    }
    out
}

/// Applies a Möbius map sending an unused point to infinity, so every point
/// becomes a finite field element.
fn to_affine(points: &[Projective], f: PrimeField) -> Option<Vec<FieldElement>> {
    let infinity_used = points.iter().any(|p| p.w.is_zero());
    if !infinity_used {
        return points.iter().map(|p| f.div(p.u, p.w).ok()).collect();
    }
    let used: std::collections::HashSet<u64> = points
        .iter()
        .filter(|p| !p.w.is_zero())
        .map(|p| f.div(p.u, p.w).unwrap().value())
        .collect();
    let z = f.elements().find(|e| !used.contains(&e.value()))?;
    // (u : w) -> (w : u - z w)
    points
        .iter()
        .map(|p| {
            let denom = f.sub(p.u, f.mul(z, p.w));
            f.div(p.w, denom).ok()
        })
        .collect()
}

/// Multipliers `v` with `v_j a_j^i` in the row space of `m` for every `i < k`.
fn solve_multipliers(m: &FqMatrix, k: usize, points: &[FieldElement]) -> Option<Vec<FieldElement>> {
    let f = m.field();
    let n = m.cols();
    if k == n {
        return Some(vec![FieldElement::ONE; n]);
    }
    let parity = m.right_null_space();
    let mut system = FqMatrix::zeros(f, parity.rows() * k, n);
    for r in 0..parity.rows() {
        for j in 0..n {
            let mut e = parity[(r, j)];
            for i in 0..k {
                system[(r * k + i, j)] = e;
                e = f.mul(e, points[j]);
            }
        }
    }
    let sols = system.right_null_space();
    if sols.rows() != 1 {
        return None;
    }
    let v = sols.row(0).to_vec();
    v.iter().all(|e| !e.is_zero()).then_some(v)
}
