//! Demand files: a line `W: i1,...,iD` with ascending 1-based indices,
//! followed by `L` lines of `D` space-separated coefficients. Blank lines and
//! lines starting with `#` are ignored.

use anyhow::{anyhow, bail, Context, Result};
use iplt::protocol::Demand;
use iplt::{FqMatrix, PrimeField};

pub fn parse(text: &str, k: usize, field: PrimeField) -> Result<Demand> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));
    let (_, header) = lines.next().ok_or_else(|| anyhow!("empty demand file"))?;
    let list = header
        .strip_prefix("W:")
        .ok_or_else(|| anyhow!("first line must start with `W:`"))?;
    let w: Vec<usize> = list
        .split(',')
        .map(|s| {
            s.trim()
                .parse::<usize>()
                .with_context(|| format!("bad index {s:?} in W"))
        })
        .collect::<Result<_>>()?;
    if w.windows(2).any(|p| p[0] >= p[1]) {
        bail!("W must be strictly ascending");
    }
    let q = field.modulus();
    let mut rows = Vec::new();
    for (lineno, line) in lines {
        let row: Vec<u64> = line
            .split_whitespace()
            .map(|s| {
                s.parse::<u64>()
                    .with_context(|| format!("line {lineno}: bad coefficient {s:?}"))
            })
            .collect::<Result<_>>()?;
        if row.len() != w.len() {
            bail!(
                "line {lineno}: {} coefficients, expected D = {}",
                row.len(),
                w.len()
            );
        }
        if let Some(v) = row.iter().find(|&&v| v >= q) {
            bail!("line {lineno}: coefficient {v} is not below q = {q}");
        }
        rows.push(row);
    }
    if rows.is_empty() {
        bail!("no coefficient rows after the W line");
    }
    let v = FqMatrix::from_rows(field, &rows)?;
    Ok(Demand::new(w, v, k)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn gf17() -> PrimeField {
        PrimeField::new(17).unwrap()
    }

    #[test]
    fn parses_example_one_demand() {
        let text = "W: 2,4,5,7,8,10,11,18\n2 15 3 6 1 4 11 13\n6 9 4 3 11 15 13 8\n";
        let d = parse(text, 24, gf17()).unwrap();
        assert_eq!(d.w(), &[2, 4, 5, 7, 8, 10, 11, 18]);
        assert_eq!(d.l(), 2);
    }

    #[test]
    fn rejects_malformed_files() {
        let f = gf17();
        assert!(parse("", 24, f).is_err());
        assert!(parse("X: 1,2\n1 2\n", 24, f).is_err());
        assert!(parse("W: 2,1\n1 2\n", 24, f).is_err());
        assert!(parse("W: 1,2\n1 2 3\n", 24, f).is_err());
        assert!(parse("W: 1,2\n1 17\n", 24, f).is_err());
        assert!(parse("W: 1,2\n", 24, f).is_err());
        assert!(parse("W: 1,30\n1 2\n", 24, f).is_err());
    }

    #[test]
    fn non_mds_coefficients_name_the_minor() {
        let err = parse("W: 1,2,3\n1 0 1\n2 0 5\n", 24, gf17()).unwrap_err();
        let msg = format!("{err:#}");
        assert!(msg.contains("messages [1, 2]"), "{msg}");
    }
}
