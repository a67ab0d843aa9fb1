//! Structured generators: Cauchy, generalized Reed-Solomon, and the
//! parity-check to generator duality.

use rand::Rng;

use super::FqMatrix;
use crate::error::{Error, Result};
use crate::field::{FieldElement, PrimeField};

/// `m x t` matrix with entry `(i, j) = (x_i - y_j)^{-1}`.
pub fn cauchy(field: PrimeField, x: &[FieldElement], y: &[FieldElement]) -> Result<FqMatrix> {
    let mut all: Vec<u64> = x.iter().chain(y).map(|e| e.value()).collect();
    all.sort_unstable();
    if all.windows(2).any(|w| w[0] == w[1]) {
        return Err(Error::DegenerateCauchy);
    }
    let mut m = FqMatrix::zeros(field, x.len(), y.len());
    for (i, &xi) in x.iter().enumerate() {
        for (j, &yj) in y.iter().enumerate() {
            m[(i, j)] = field.inv(field.sub(xi, yj))?;
        }
    }
    Ok(m)
}

/// `k x n` generator of the GRS code with the given evaluation points and
/// column multipliers: entry `(i, j) = multipliers[j] * points[j]^i`.
pub fn grs_generator(
    field: PrimeField,
    k: usize,
    points: &[FieldElement],
    multipliers: &[FieldElement],
) -> Result<FqMatrix> {
    let n = points.len();
    if multipliers.len() != n {
        return Err(Error::BadGrsParameters(format!(
            "{} points but {} multipliers",
            n,
            multipliers.len()
        )));
    }
    if k > n {
        return Err(Error::BadGrsParameters(format!(
            "dimension {k} exceeds length {n}"
        )));
    }
    if n as u64 > field.modulus() {
        return Err(Error::BadGrsParameters(format!(
            "length {n} exceeds field size {}",
            field.modulus()
        )));
    }
    let mut sorted: Vec<u64> = points.iter().map(|p| p.value()).collect();
    sorted.sort_unstable();
    if sorted.windows(2).any(|w| w[0] == w[1]) {
        return Err(Error::BadGrsParameters(
            "evaluation points are not distinct".into(),
        ));
    }
    if multipliers.iter().any(|v| v.is_zero()) {
        return Err(Error::BadGrsParameters("zero column multiplier".into()));
    }
    let mut g = FqMatrix::zeros(field, k, n);
    for j in 0..n {
        let mut e = multipliers[j];
        for i in 0..k {
            g[(i, j)] = e;
            e = field.mul(e, points[j]);
        }
    }
    Ok(g)
}

/// `n` distinct field elements drawn uniformly without replacement.
pub fn random_grs_points<R: Rng + ?Sized>(
    field: PrimeField,
    n: usize,
    rng: &mut R,
) -> Result<Vec<FieldElement>> {
    let q = field.modulus() as usize;
    if n > q {
        return Err(Error::BadGrsParameters(format!(
            "{n} distinct points requested from GF({q})"
        )));
    }
    Ok(rand::seq::index::sample(rng, q, n)
        .into_iter()
        .map(|v| field.elem(v as u64))
        .collect())
}

pub(crate) fn random_nonzero<R: Rng + ?Sized>(field: PrimeField, rng: &mut R) -> FieldElement {
    field.elem(rng.random_range(1..field.modulus()))
}

/// A random `k x n` MDS matrix: a random basis of a GRS code with random
/// distinct points and random nonzero multipliers.
pub fn random_mds<R: Rng + ?Sized>(
    field: PrimeField,
    k: usize,
    n: usize,
    rng: &mut R,
) -> Result<FqMatrix> {
    let points = random_grs_points(field, n, rng)?;
    let multipliers: Vec<FieldElement> = (0..n).map(|_| random_nonzero(field, rng)).collect();
    let g = grs_generator(field, k, &points, &multipliers)?;
    FqMatrix::random_invertible(field, k, rng).mul(&g)
}

/// Generator of the code whose parity-check matrix is `h`: a full-row-rank
/// `(n - rows(h)) x n` matrix `G` with `G · hᵀ = 0`.
pub fn generator_from_parity(h: &FqMatrix, n: usize) -> Result<FqMatrix> {
    if h.cols() != n {
        return Err(Error::Shape(format!(
            "parity check has {} columns, expected {n}",
            h.cols()
        )));
    }
    let rank = h.rank();
    if rank < h.rows() {
        return Err(Error::RankDeficient {
            rank,
            rows: h.rows(),
        });
    }
    Ok(h.right_null_space())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix::{is_mds, is_mds_exhaustive};
    use crate::rng::seeded_rng;

    fn gf(q: u64) -> PrimeField {
        PrimeField::new(q).unwrap()
    }

    fn elems(f: PrimeField, v: &[u64]) -> Vec<FieldElement> {
        v.iter().map(|&x| f.elem(x)).collect()
    }

    fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
        fn rec(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
            if cur.len() == k {
                out.push(cur.clone());
                return;
            }
            for i in start..n {
                cur.push(i);
                rec(i + 1, n, k, cur, out);
                cur.pop();
            }
        }
        let mut out = Vec::new();
        rec(0, n, k, &mut Vec::new(), &mut out);
        out
    }

    fn all_square_minors_invertible(m: &FqMatrix) -> bool {
        let max = m.rows().min(m.cols());
        (1..=max).all(|size| {
            combinations(m.rows(), size).iter().all(|rs| {
                combinations(m.cols(), size).iter().all(|cs| {
                    let sub = m.select_rows(rs).unwrap().select_columns(cs).unwrap();
                    !sub.determinant().unwrap().is_zero()
                })
            })
        })
    }

    #[test]
    fn cauchy_matches_worked_example() {
        let f = gf(17);
        let c = cauchy(f, &elems(f, &[1, 5, 7]), &elems(f, &[11, 16])).unwrap();
        assert_eq!(c.to_u64_rows(), vec![vec![5, 9], vec![14, 3], vec![4, 15]]);
        assert!(all_square_minors_invertible(&c));
    }

    #[test]
    fn cauchy_single_entry_and_degenerate() {
        let f = gf(17);
        let c = cauchy(f, &elems(f, &[3]), &elems(f, &[10])).unwrap();
        assert_eq!(c[(0, 0)], f.inv(f.sub(f.elem(3), f.elem(10))).unwrap());
        assert_eq!(
            cauchy(f, &elems(f, &[1, 2]), &elems(f, &[2])),
            Err(Error::DegenerateCauchy)
        );
        assert_eq!(
            cauchy(f, &elems(f, &[1, 1]), &elems(f, &[2])),
            Err(Error::DegenerateCauchy)
        );
    }

    #[test]
    fn cauchy_minors_exhaustive_small_shapes() {
        let mut rng = seeded_rng(1);
        for q in [17, 19, 23] {
            let f = gf(q);
            for m in 1..=4 {
                for t in 1..=4 {
                    for _ in 0..3 {
                        let pts = random_grs_points(f, m + t, &mut rng).unwrap();
                        let c = cauchy(f, &pts[..m], &pts[m..]).unwrap();
                        assert!(all_square_minors_invertible(&c), "q={q} m={m} t={t}");
                    }
                }
            }
        }
    }

    #[test]
    fn square_vandermonde_is_invertible() {
        let f = gf(17);
        let g = grs_generator(f, 5, &elems(f, &[0, 1, 2, 3, 4]), &[FieldElement::ONE; 5]).unwrap();
        assert!(!g.determinant().unwrap().is_zero());
    }

    #[test]
    fn grs_rejects_bad_parameters() {
        let f = gf(17);
        let ones = [FieldElement::ONE; 3];
        assert!(matches!(
            grs_generator(f, 2, &elems(f, &[1, 1, 2]), &ones),
            Err(Error::BadGrsParameters(_))
        ));
        assert!(matches!(
            grs_generator(f, 2, &elems(f, &[1, 2, 3]), &elems(f, &[1, 0, 1])),
            Err(Error::BadGrsParameters(_))
        ));
        assert!(grs_generator(f, 4, &elems(f, &[1, 2, 3]), &ones).is_err());
    }

    #[test]
    fn grs_is_mds_exhaustively() {
        let mut rng = seeded_rng(2);
        let f = gf(17);
        let pts = random_grs_points(f, 7, &mut rng).unwrap();
        let mult: Vec<_> = (0..7).map(|_| random_nonzero(f, &mut rng)).collect();
        assert!(is_mds_exhaustive(&grs_generator(f, 3, &pts, &mult).unwrap()).unwrap());
        let pts = random_grs_points(f, 9, &mut rng).unwrap();
        let g = grs_generator(f, 2, &pts, &[FieldElement::ONE; 9]).unwrap();
        assert!(is_mds_exhaustive(&g).unwrap());
        // scaling a column by a nonzero scalar keeps the property
        let mut scaled = g.clone();
        for i in 0..2 {
            scaled[(i, 4)] = f.mul(scaled[(i, 4)], f.elem(6));
        }
        assert!(is_mds_exhaustive(&scaled).unwrap());
    }

    #[test]
    fn grs_always_mds_up_to_5_by_10() {
        let mut rng = seeded_rng(50);
        let f = gf(17);
        for trial in 0..50 {
            let n = 1 + trial % 10;
            let k = 1 + (trial / 10) % n.min(5);
            let pts = random_grs_points(f, n, &mut rng).unwrap();
            let mult: Vec<_> = (0..n).map(|_| random_nonzero(f, &mut rng)).collect();
            let g = grs_generator(f, k, &pts, &mult).unwrap();
            assert!(is_mds_exhaustive(&g).unwrap(), "k={k} n={n}");
        }
    }

    #[test]
    fn puncturing_grs_to_k_columns_is_invertible() {
        let mut rng = seeded_rng(4);
        let f = gf(19);
        for _ in 0..20 {
            let g = random_mds(f, 3, 8, &mut rng).unwrap();
            let keep = rand::seq::index::sample(&mut rng, 8, 3).into_vec();
            let drop: Vec<usize> = (0..8).filter(|c| !keep.contains(c)).collect();
            let sq = g.puncture(&drop).unwrap();
            assert_eq!(sq.shape(), (3, 3));
            assert!(!sq.determinant().unwrap().is_zero());
        }
    }

    #[test]
    fn random_mds_passes_check() {
        let mut rng = seeded_rng(5);
        let f = gf(23);
        for (k, n) in [(1, 5), (2, 9), (3, 7), (4, 10), (5, 10)] {
            let g = random_mds(f, k, n, &mut rng).unwrap();
            assert!(is_mds_exhaustive(&g).unwrap());
            assert!(is_mds(&g).unwrap());
        }
    }

    #[test]
    fn generator_from_parity_duality() {
        let mut rng = seeded_rng(6);
        let f = gf(17);
        for (r, n) in [(1, 4), (2, 6), (3, 7), (5, 10)] {
            let h = FqMatrix::random(f, r, n, &mut rng);
            if h.rank() < r {
                continue;
            }
            let g = generator_from_parity(&h, n).unwrap();
            assert_eq!(g.shape(), (n - r, n));
            assert_eq!(g.rank(), n - r);
            assert!(g.mul(&h.transpose()).unwrap().is_zero());
        }
        let empty = FqMatrix::zeros(f, 0, 5);
        assert_eq!(
            generator_from_parity(&empty, 5).unwrap(),
            FqMatrix::identity(f, 5)
        );
        let deficient = FqMatrix::from_rows(f, &[[1u64, 2, 3], [2, 4, 6]]).unwrap();
        assert!(matches!(
            generator_from_parity(&deficient, 3),
            Err(Error::RankDeficient { .. })
        ));
        assert!(generator_from_parity(&deficient, 4).is_err());
    }
}
