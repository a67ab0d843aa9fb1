//! Arithmetic in the prime field GF(q).

use std::fmt;

use crate::error::{Error, Result};

/// Largest modulus accepted. Keeps every product of two reduced values inside `u64`.
pub const MAX_MODULUS: u64 = 1 << 31;

/// A residue in `[0, q)`. The modulus is carried by the [`PrimeField`] that
/// produced the value.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
#[cfg_attr(feature = "json", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "json", serde(transparent))]
pub struct FieldElement(u64);

impl FieldElement {
    pub const ZERO: FieldElement = FieldElement(0);
    pub const ONE: FieldElement = FieldElement(1);

    #[inline]
    pub fn value(self) -> u64 {
        self.0
    }

    #[inline]
    pub fn is_zero(self) -> bool {
        self.0 == 0
    }
}

impl fmt::Display for FieldElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// The field GF(q) for a prime `q`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
#[cfg_attr(feature = "json", derive(serde::Serialize, serde::Deserialize))]
pub struct PrimeField {
    q: u64,
}

fn is_prime(q: u64) -> bool {
    if q < 2 {
        return false;
    }
    if q.is_multiple_of(2) {
        return q == 2;
    }
    let mut d = 3;
    while d * d <= q {
        if q.is_multiple_of(d) {
            return false;
        }
        d += 2;
    }
    true
}

impl PrimeField {
    /// Validates primality by trial division.
    pub fn new(q: u64) -> Result<Self> {
        if q > MAX_MODULUS || !is_prime(q) {
            return Err(Error::NotPrime(q));
        }
        Ok(PrimeField { q })
    }

    #[inline]
    pub fn modulus(&self) -> u64 {
        self.q
    }

    /// Reduces an arbitrary integer into the field.
    #[inline]
    pub fn elem(&self, v: u64) -> FieldElement {
        FieldElement(v % self.q)
    }

    /// Reduces a signed integer, so `elem_i64(-9)` is `q - 9`.
    #[inline]
    pub fn elem_i64(&self, v: i64) -> FieldElement {
        FieldElement(v.rem_euclid(self.q as i64) as u64)
    }

    /// Wraps an already-reduced value, rejecting anything `>= q`.
    pub fn checked_elem(&self, v: u64) -> Option<FieldElement> {
        (v < self.q).then_some(FieldElement(v))
    }

    pub fn contains(&self, a: FieldElement) -> bool {
        a.0 < self.q
    }

    #[inline]
    pub fn add(&self, a: FieldElement, b: FieldElement) -> FieldElement {
        let s = a.0 + b.0;
        FieldElement(if s >= self.q { s - self.q } else { s })
    }

    #[inline]
    pub fn sub(&self, a: FieldElement, b: FieldElement) -> FieldElement {
        FieldElement(if a.0 >= b.0 {
            a.0 - b.0
        } else {
            a.0 + self.q - b.0
        })
    }

    #[inline]
    pub fn neg(&self, a: FieldElement) -> FieldElement {
        FieldElement(if a.0 == 0 { 0 } else { self.q - a.0 })
    }

    #[inline]
    pub fn mul(&self, a: FieldElement, b: FieldElement) -> FieldElement {
        FieldElement(a.0 * b.0 % self.q)
    }

    pub fn pow(&self, a: FieldElement, mut exp: u64) -> FieldElement {
        let mut base = a;
        let mut acc = FieldElement::ONE;
        while exp > 0 {
            if exp & 1 == 1 {
                acc = self.mul(acc, base);
            }
            base = self.mul(base, base);
            exp >>= 1;
        }
        acc
    }

    /// Multiplicative inverse by the extended Euclidean algorithm.
    pub fn inv(&self, a: FieldElement) -> Result<FieldElement> {
        if a.0 == 0 {
            return Err(Error::InversionOfZero);
        }
        let (mut r0, mut r1) = (self.q as i64, a.0 as i64);
        let (mut t0, mut t1) = (0i64, 1i64);
        while r1 != 0 {
            let quot = r0 / r1;
            (r0, r1) = (r1, r0 - quot * r1);
            (t0, t1) = (t1, t0 - quot * t1);
        }
        debug_assert_eq!(r0, 1);
        Ok(self.elem_i64(t0))
    }

    /// `a / b`.
    pub fn div(&self, a: FieldElement, b: FieldElement) -> Result<FieldElement> {
        Ok(self.mul(a, self.inv(b)?))
    }

    /// All nonzero elements in increasing order.
    pub fn nonzero_elements(&self) -> impl Iterator<Item = FieldElement> {
        (1..self.q).map(FieldElement)
    }

    pub fn elements(&self) -> impl Iterator<Item = FieldElement> {
        (0..self.q).map(FieldElement)
    }
}

impl fmt::Display for PrimeField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "GF({})", self.q)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn gf(q: u64) -> PrimeField {
        PrimeField::new(q).unwrap()
    }

    fn search_inverse(f: &PrimeField, a: u64) -> u64 {
        (1..f.modulus())
            .find(|b| a * b % f.modulus() == 1)
            .expect("nonzero residue has an inverse")
    }

    #[test]
    fn rejects_composite_and_tiny_moduli() {
        for q in [0, 1, 4, 9, 15, 21, 25, 91, 221] {
            assert!(
                matches!(PrimeField::new(q), Err(Error::NotPrime(_))),
                "q={q}"
            );
        }
        for q in [2, 3, 5, 17, 19, 23, 29, 101, 2_147_483_647] {
            assert!(PrimeField::new(q).is_ok(), "q={q}");
        }
        assert!(PrimeField::new(MAX_MODULUS + 11).is_err());
    }

    #[test]
    fn inverse_examples() {
        let f = gf(17);
        assert_eq!(f.inv(f.elem(13)).unwrap(), f.elem(4));
        assert_eq!(f.inv(f.elem(1)).unwrap(), f.elem(1));
        assert_eq!(f.inv(f.elem(7)).unwrap().value(), search_inverse(&f, 7));
        assert_eq!(f.inv(f.elem(7)).unwrap(), f.elem(5));
        assert!(matches!(
            f.inv(FieldElement::ZERO),
            Err(Error::InversionOfZero)
        ));
    }

    #[test]
    fn alignment_scalars_from_worked_example() {
        let f = gf(17);
        // c5 = -9 * c3 / 15 with c3 = 1
        let c5 = f.div(f.elem_i64(-9), f.elem(15)).unwrap();
        assert_eq!(c5, f.elem(13));
        let denom = f.add(f.mul(f.elem(5), f.elem(1)), f.mul(f.elem(4), c5));
        assert_eq!(denom, f.elem(6));
        assert_eq!(f.inv(denom).unwrap(), f.elem(3));
        assert_eq!(f.add(f.elem(11), FieldElement::ZERO), f.elem(11));
    }

    #[test]
    fn inverse_matches_exhaustive_search_up_to_101() {
        for q in (2..=101).filter(|&q| is_prime(q)) {
            let f = gf(q);
            for a in 1..q {
                assert_eq!(
                    f.inv(f.elem(a)).unwrap().value(),
                    search_inverse(&f, a),
                    "q={q} a={a}"
                );
            }
        }
    }

    #[test]
    fn pow_and_fermat() {
        let f = gf(23);
        for a in f.nonzero_elements() {
            assert_eq!(f.pow(a, 22), FieldElement::ONE);
            assert_eq!(f.pow(a, 21), f.inv(a).unwrap());
        }
        assert_eq!(f.pow(FieldElement::ZERO, 0), FieldElement::ONE);
    }

    proptest! {
        #[test]
        fn field_axioms(q in prop::sample::select(vec![2u64, 3, 17, 19, 23, 29, 101, 65_521, 2_147_483_647]),
                        a in any::<u64>(), b in any::<u64>(), c in any::<u64>()) {
            let f = gf(q);
            let (a, b, c) = (f.elem(a), f.elem(b), f.elem(c));
            prop_assert_eq!(f.mul(a, f.add(b, c)), f.add(f.mul(a, b), f.mul(a, c)));
            prop_assert_eq!(f.add(a, f.neg(a)), FieldElement::ZERO);
            prop_assert_eq!(f.sub(a, b), f.add(a, f.neg(b)));
            if !a.is_zero() {
                prop_assert_eq!(f.mul(a, f.inv(a).unwrap()), FieldElement::ONE);
            }
        }
    }
}
