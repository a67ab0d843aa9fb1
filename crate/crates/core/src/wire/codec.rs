use crate::error::{Error, Result};
use crate::field::PrimeField;
use crate::matrix::FqMatrix;
use crate::protocol::{Answer, Query};

/// Little-endian cursor that reports the offset of whatever it fails on.
pub(crate) struct Reader<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> Reader<'a> {
    pub(crate) fn new(bytes: &'a [u8]) -> Self {
        Reader { bytes, pos: 0 }
    }

    pub(crate) fn offset(&self) -> usize {
        self.pos
    }

    pub(crate) fn take(&mut self, n: usize) -> Result<&'a [u8]> {
        if self.bytes.len() - self.pos < n {
            return Err(Error::MalformedPayload {
                offset: self.pos,
                reason: format!("needs {n} more bytes, {} left", self.bytes.len() - self.pos),
            });
        }
        let s = &self.bytes[self.pos..self.pos + n];
        self.pos += n;
        Ok(s)
    }

    pub(crate) fn u8(&mut self) -> Result<u8> {
        Ok(self.take(1)?[0])
    }

    pub(crate) fn u32(&mut self) -> Result<u32> {
        Ok(u32::from_le_bytes(
            self.take(4)?.try_into().expect("four bytes"),
        ))
    }

    pub(crate) fn u64(&mut self) -> Result<u64> {
        Ok(u64::from_le_bytes(
            self.take(8)?.try_into().expect("eight bytes"),
        ))
    }

    fn finish(&self) -> Result<()> {
        if self.pos != self.bytes.len() {
            return Err(Error::MalformedPayload {
                offset: self.pos,
                reason: "trailing bytes".into(),
            });
        }
        Ok(())
    }

    fn matrix(&mut self, field: PrimeField, rows: usize, cols: usize) -> Result<FqMatrix> {
        let q = field.modulus();
        let mut data = Vec::with_capacity(rows * cols);
        for _ in 0..rows * cols {
            let at = self.pos;
            let v = self.u64()?;
            if v >= q {
                return Err(Error::MalformedPayload {
                    offset: at,
                    reason: format!("entry {v} not below q = {q}"),
                });
            }
            data.push(field.elem(v));
        }
        FqMatrix::new(field, rows, cols, data)
    }
}

fn put_matrix(out: &mut Vec<u8>, m: &FqMatrix) {
    for e in m.data() {
        out.extend_from_slice(&e.value().to_le_bytes());
    }
}

/// Byte length of an encoded query with `rows` rows over `k` messages.
pub fn query_payload_len(rows: usize, k: usize) -> usize {
    8 + 4 + 4 + 8 * rows * k + 4 * k
}

/// `q` (u64), `K` (u32), rows (u32), `G` row-major (u64 each), then `pi` as
/// `K` one-based u32 positions.
pub fn encode_query(query: &Query) -> Vec<u8> {
    let g = query.g();
    let mut out = Vec::with_capacity(query_payload_len(g.rows(), query.k()));
    out.extend_from_slice(&query.field().modulus().to_le_bytes());
    out.extend_from_slice(&(query.k() as u32).to_le_bytes());
    out.extend_from_slice(&(g.rows() as u32).to_le_bytes());
    put_matrix(&mut out, g);
    for &p in query.pi() {
        out.extend_from_slice(&(p as u32 + 1).to_le_bytes());
    }
    out
}

pub fn decode_query(bytes: &[u8]) -> Result<Query> {
    let mut r = Reader::new(bytes);
    let q = r.u64()?;
    let field = PrimeField::new(q).map_err(|e| Error::MalformedPayload {
        offset: 0,
        reason: e.to_string(),
    })?;
    let k = r.u32()? as usize;
    let rows = r.u32()? as usize;
    let expected = rows
        .checked_mul(k)
        .and_then(|rk| rk.checked_mul(8))
        .and_then(|b| b.checked_add(16 + 4 * k));
    if expected != Some(bytes.len()) {
        return Err(Error::MalformedPayload {
            offset: 12,
            reason: format!(
                "header announces {rows} x {k} but payload has {} bytes",
                bytes.len()
            ),
        });
    }
    let g = r.matrix(field, rows, k)?;
    let mut seen = vec![false; k];
    let mut pi = Vec::with_capacity(k);
    for i in 0..k {
        let at = r.offset();
        let p = r.u32()? as usize;
        if p == 0 || p > k {
            return Err(Error::MalformedPayload {
                offset: at,
                reason: format!("pi({}) = {p} outside 1..={k}", i + 1),
            });
        }
        if std::mem::replace(&mut seen[p - 1], true) {
            return Err(Error::MalformedPayload {
                offset: at,
                reason: format!("pi is not a bijection: {p} repeats"),
            });
        }
        pi.push(p - 1);
    }
    r.finish()?;
    Query::new(g, pi)
}

/// rows (u32), `N` (u32), then `Y` row-major (u64 each).
pub fn encode_answer(answer: &Answer) -> Vec<u8> {
    let y = answer.y();
    let mut out = Vec::with_capacity(8 + 8 * y.rows() * y.cols());
    out.extend_from_slice(&(y.rows() as u32).to_le_bytes());
    out.extend_from_slice(&(y.cols() as u32).to_le_bytes());
    put_matrix(&mut out, y);
    out
}

/// The answer carries no modulus; the client supplies the query's field.
pub fn decode_answer(bytes: &[u8], field: PrimeField) -> Result<Answer> {
    let mut r = Reader::new(bytes);
    let rows = r.u32()? as usize;
    let n = r.u32()? as usize;
    let expected = rows
        .checked_mul(n)
        .and_then(|rn| rn.checked_mul(8))
        .and_then(|b| b.checked_add(8));
    if expected != Some(bytes.len()) {
        return Err(Error::MalformedPayload {
            offset: 4,
            reason: format!(
                "header announces {rows} x {n} but payload has {} bytes",
                bytes.len()
            ),
        });
    }
    let y = r.matrix(field, rows, n)?;
    r.finish()?;
    Ok(Answer::new(y))
}

#[cfg(feature = "json")]
pub fn query_to_json(query: &Query) -> String {
    serde_json::to_string_pretty(query).expect("query serialises")
}

#[cfg(feature = "json")]
pub fn answer_to_json(answer: &Answer) -> String {
    serde_json::to_string_pretty(answer).expect("answer serialises")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::example;
    use crate::protocol::answer;
    use crate::rng::seeded_rng;

    #[test]
    fn round_trips_on_examples() {
        for n in 1..=3 {
            let q = example(n).unwrap().query;
            let bytes = encode_query(&q);
            assert_eq!(bytes.len(), query_payload_len(q.g().rows(), 24));
            let back = decode_query(&bytes).unwrap();
            assert_eq!(back, q);
            assert_eq!(encode_query(&back), bytes);
        }
    }

    #[test]
    fn example3_payload_size() {
        let q = example(3).unwrap().query;
        assert_eq!(q.g().shape(), (9, 24));
        assert_eq!(encode_query(&q).len(), 8 + 4 + 4 + 9 * 24 * 8 + 24 * 4);
    }

    #[test]
    fn pi_is_one_based_on_the_wire() {
        let q = example(1).unwrap().query;
        let bytes = encode_query(&q);
        let pi_start = bytes.len() - 4 * 24;
        // message 5 sits at position 9
        assert_eq!(&bytes[pi_start + 16..pi_start + 20], &9u32.to_le_bytes());
    }

    #[test]
    fn rejects_duplicate_and_out_of_range_pi() {
        let q = example(1).unwrap().query;
        let bytes = encode_query(&q);
        let pi_start = bytes.len() - 4 * 24;
        let mut dup = bytes.clone();
        dup[pi_start..pi_start + 4].copy_from_slice(&bytes[pi_start + 4..pi_start + 8]);
        assert_eq!(
            decode_query(&dup).unwrap_err(),
            Error::MalformedPayload {
                offset: pi_start + 4,
                reason: format!("pi is not a bijection: {} repeats", q.pi()[1] + 1)
            }
        );
        let mut zero = bytes.clone();
        zero[pi_start..pi_start + 4].copy_from_slice(&0u32.to_le_bytes());
        assert!(
            matches!(decode_query(&zero), Err(Error::MalformedPayload { offset, .. }) if offset == pi_start)
        );
    }

    #[test]
    fn rejects_bad_entries_and_lengths() {
        let q = example(2).unwrap().query;
        let bytes = encode_query(&q);
        let mut big = bytes.clone();
        big[16..24].copy_from_slice(&17u64.to_le_bytes());
        assert!(matches!(
            decode_query(&big),
            Err(Error::MalformedPayload { offset: 16, .. })
        ));
        assert!(matches!(
            decode_query(&bytes[..bytes.len() - 1]),
            Err(Error::MalformedPayload { offset: 12, .. })
        ));
        assert!(matches!(
            decode_query(&bytes[..5]),
            Err(Error::MalformedPayload { offset: 0, .. })
        ));
        let mut composite = bytes.clone();
        composite[0] = 15;
        assert!(matches!(
            decode_query(&composite),
            Err(Error::MalformedPayload { offset: 0, .. })
        ));
    }

    #[test]
    fn answer_round_trip() {
        let mut rng = seeded_rng(9);
        let ex = example(2).unwrap();
        let x = FqMatrix::random(ex.query.field(), 24, 3, &mut rng);
        let a = answer(&ex.query, &x).unwrap();
        let bytes = encode_answer(&a);
        assert_eq!(bytes.len(), 8 + 8 * 8 * 3);
        assert_eq!(decode_answer(&bytes, ex.query.field()).unwrap(), a);
        assert!(decode_answer(&bytes[..bytes.len() - 8], ex.query.field()).is_err());
    }

    proptest::proptest! {
        #[test]
        fn random_answers_round_trip(rows in 0usize..10, n in 0usize..6, seed: u64) {
            let f = PrimeField::new(29).unwrap();
            let a = Answer::new(FqMatrix::random(f, rows, n, &mut seeded_rng(seed)));
            let bytes = encode_answer(&a);
            proptest::prop_assert_eq!(decode_answer(&bytes, f).unwrap(), a);
        }

        #[test]
        fn truncated_queries_are_rejected(cut in 0usize..1840) {
            let bytes = encode_query(&example(3).unwrap().query);
            let is_malformed = matches!(decode_query(&bytes[..cut]), Err(Error::MalformedPayload { .. }));
            proptest::prop_assert!(is_malformed);
        }
    }

    #[cfg(feature = "json")]
    #[test]
    fn json_debug_encoding() {
        let q = example(1).unwrap().query;
        let s = query_to_json(&q);
        let back: Query = serde_json::from_str(&s).unwrap();
        assert_eq!(back, q);
    }
}
