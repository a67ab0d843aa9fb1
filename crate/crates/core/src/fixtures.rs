//! The three worked examples over GF(17) with `K = 24`, `L = 2`, reproduced
//! from their printed matrices, together with a checker that recomputes every
//! printed derived value and runs answer and recovery on a message matrix.

use std::fmt;

use crate::audit::{
    alignment_feasibility_sweep, audit_individual_privacy, parity_shortening_sweep,
};
use crate::bounds::jplt_rate;
use crate::error::{Error, Result};
use crate::field::{FieldElement, PrimeField};
use crate::matrix::{cauchy, generator_from_parity, is_mds, FqMatrix};
use crate::protocol::{
    alignment_coefficients, alignment_trailing_block, answer, assemble_query_matrix, derive_params,
    recover, AlignmentChoice, AlignmentScaffold, ClientSecret, Demand, ParityChoice, ProtocolCase,
    ProtocolParams, Query, TrailingSecret,
};
use crate::Rational;

pub const K: usize = 24;
pub const L: usize = 2;
pub const Q: u64 = 17;

fn gf() -> PrimeField {
    PrimeField::new(Q).expect("17 is prime")
}

fn mat<const C: usize>(rows: &[[u64; C]]) -> FqMatrix {
    FqMatrix::from_rows(gf(), rows).expect("rectangular literal")
}

fn elems(v: &[u64]) -> Vec<FieldElement> {
    v.iter().map(|&x| gf().elem(x)).collect()
}

/// `pi` (0-based) from the printed order of the permuted messages.
fn pi_from_order(order: &[usize; K]) -> Vec<usize> {
    let mut pi = vec![0; K];
    for (pos, &msg) in order.iter().enumerate() {
        pi[msg - 1] = pos;
    }
    pi
}

/// One worked example: the parameters, the (unshuffled) demand, the printed
/// query and the client's secret.
#[derive(Clone, Debug)]
pub struct Example {
    pub number: u8,
    pub params: ProtocolParams,
    pub demand: Demand,
    pub query: Query,
    pub secret: ClientSecret,
}

const EX1_ORDER: [usize; K] = [
    1, 22, 13, 19, 24, 17, 20, 12, 5, 8, 11, 2, 4, 7, 10, 18, 3, 15, 9, 21, 16, 14, 6, 23,
];
const EX2_ORDER: [usize; K] = [
    17, 22, 20, 14, 24, 21, 19, 15, 6, 10, 4, 8, 1, 13, 16, 11, 7, 23, 9, 3, 12, 18, 2, 5,
];
const EX3_ORDER: [usize; K] = [
    8, 14, 17, 22, 19, 16, 13, 3, 20, 24, 21, 1, 6, 12, 4, 5, 10, 7, 9, 23, 18, 2, 11, 15,
];

fn sorted_demand(shuffled: &Demand) -> Result<Demand> {
    let mut order: Vec<usize> = (0..shuffled.d()).collect();
    order.sort_by_key(|&j| shuffled.w()[j]);
    shuffled.reordered(&order)
}

pub fn example(number: u8) -> Result<Example> {
    match number {
        1 => example1(),
        2 => example2(),
        3 => example3(),
        _ => Err(Error::BadShape(format!(
            "no example {number}; choose 1, 2 or 3"
        ))),
    }
}

fn example1() -> Result<Example> {
    let params = derive_params(K, 8, L, Q, 1)?;
    let shuffled = Demand::new(
        vec![5, 8, 11, 2, 4, 7, 10, 18],
        mat(&[[3, 1, 11, 2, 15, 6, 4, 13], [4, 11, 13, 6, 9, 3, 15, 8]]),
        K,
    )?;
    let g1 = mat(&[[1, 4, 7, 6, 3, 12, 4, 9], [5, 7, 6, 9, 3, 15, 2, 1]]);
    let g3 = mat(&[[9, 13, 2, 10, 7, 1, 15, 3], [9, 11, 12, 3, 13, 13, 7, 10]]);
    let g = assemble_query_matrix(&params, &[g1, shuffled.v().clone()], &g3)?;
    let query = Query::new(g, pi_from_order(&EX1_ORDER))?;
    // with t = 0 the trailing block is a single column group scaled by alpha = 1
    let scaffold = AlignmentScaffold {
        x: elems(&[0]),
        y: Vec::new(),
        omega: FqMatrix::zeros(gf(), 1, 0),
        alpha: elems(&[1]),
        c: g3,
    };
    let secret = ClientSecret {
        b: 2,
        demand: shuffled.clone(),
        trailing: TrailingSecret::Align {
            scaffold,
            choice: None,
        },
    };
    Ok(Example {
        number: 1,
        params,
        demand: sorted_demand(&shuffled)?,
        query,
        secret,
    })
}

/// Column blocks `C_2` and `C_4` chosen to complete the MDS matrix.
pub fn example2_completion() -> (FqMatrix, FqMatrix) {
    (mat(&[[1, 4, 7], [5, 7, 6]]), mat(&[[6, 3, 12], [9, 3, 15]]))
}

fn example2() -> Result<Example> {
    let params = derive_params(K, 9, L, Q, 1)?;
    let shuffled = Demand::new(
        vec![10, 4, 8, 11, 7, 23, 18, 2, 5],
        mat(&[
            [4, 15, 1, 11, 6, 9, 13, 2, 3],
            [15, 9, 11, 13, 3, 1, 8, 6, 4],
        ]),
        K,
    )?;
    let g1 = mat(&[
        [3, 14, 11, 8, 4, 10, 5, 5, 6],
        [12, 16, 3, 4, 6, 3, 7, 15, 4],
    ]);
    let v = shuffled.v();
    let (c2, c4) = example2_completion();
    let c = v
        .block(0, 0, 2, 3)?
        .hstack(&c2)?
        .hstack(&v.block(0, 3, 2, 3)?)?
        .hstack(&c4)?
        .hstack(&v.block(0, 6, 2, 3)?)?;
    let (x, y) = (elems(&[1, 5, 7]), elems(&[11, 16]));
    let omega = cauchy(gf(), &x, &y)?;
    let scaffold = AlignmentScaffold {
        x,
        y,
        omega,
        alpha: elems(&[3, 2, 1, 10, 4]),
        c,
    };
    let g2 = alignment_trailing_block(&scaffold, params.s)?;
    let g = assemble_query_matrix(&params, &[g1], &g2)?;
    let query = Query::new(g, pi_from_order(&EX2_ORDER))?;
    let choice = AlignmentChoice {
        k_idx: vec![1],
        l_idx: vec![3, 5],
        c: elems(&[1, 13]),
    };
    let secret = ClientSecret {
        b: 2,
        demand: shuffled.clone(),
        trailing: TrailingSecret::Align {
            scaffold,
            choice: Some(choice),
        },
    };
    Ok(Example {
        number: 2,
        params,
        demand: sorted_demand(&shuffled)?,
        query,
        secret,
    })
}

/// Printed parity-check matrix of the code generated by the shuffled `V`.
pub fn example3_lambda() -> FqMatrix {
    mat(&[
        [8, 5, 9, 6, 14, 11, 13],
        [15, 6, 13, 12, 6, 16, 3],
        [9, 14, 15, 7, 5, 14, 2],
        [2, 10, 16, 14, 7, 8, 7],
        [8, 12, 8, 11, 3, 7, 16],
    ])
}

/// Printed recovery matrix applied to the trailing answer rows.
pub fn example3_recovery_matrix() -> FqMatrix {
    mat(&[[6, 4, 13, 1, 0], [0, 6, 4, 13, 1]])
}

/// Trailing block of example 3 as printed. Columns 2 and 8 are not
/// orthogonal to `H`; every other column is.
pub fn example3_printed_trailing() -> FqMatrix {
    mat(&[
        [3, 14, 11, 8, 4, 10, 8, 5, 5, 6],
        [12, 16, 3, 4, 6, 3, 1, 15, 8, 4],
        [14, 11, 7, 2, 9, 6, 15, 11, 6, 14],
        [5, 15, 5, 1, 5, 12, 4, 16, 13, 15],
        [3, 5, 6, 9, 16, 7, 9, 14, 14, 10],
    ])
}

/// Trailing block of example 3 with columns 2 and 8 recomputed from the code
/// with parity check `H`. It reproduces the printed `T G_3`.
pub fn example3_trailing() -> FqMatrix {
    mat(&[
        [3, 3, 11, 8, 4, 10, 8, 4, 5, 6],
        [12, 1, 3, 4, 6, 3, 1, 12, 8, 4],
        [14, 6, 7, 2, 9, 6, 15, 2, 6, 14],
        [5, 2, 5, 1, 5, 12, 4, 6, 13, 15],
        [3, 12, 6, 9, 16, 7, 9, 1, 14, 10],
    ])
}

fn example3() -> Result<Example> {
    let params = derive_params(K, 7, L, Q, 1)?;
    // the permutation places messages in this order; the printed set lists
    // the first two swapped, but the printed V and pi both follow this one
    let shuffled = Demand::new(
        vec![4, 10, 7, 23, 18, 2, 15],
        mat(&[[15, 4, 6, 9, 13, 2, 11], [9, 15, 3, 1, 8, 6, 13]]),
        K,
    )?;
    let g1 = mat(&[[11, 5, 10, 1, 15, 2, 7], [16, 10, 16, 6, 1, 1, 13]]);
    let g2 = mat(&[[5, 8, 14, 7, 4, 3, 16], [3, 5, 8, 1, 6, 2, 15]]);
    let h_matrix = mat(&[
        [8, 1, 5, 9, 2, 6, 14, 11, 4, 13],
        [15, 6, 6, 13, 3, 12, 6, 16, 3, 3],
        [9, 2, 14, 15, 13, 7, 5, 14, 15, 2],
        [2, 12, 10, 16, 11, 14, 7, 8, 7, 7],
        [8, 4, 12, 8, 8, 11, 3, 7, 1, 16],
    ]);
    let g3 = example3_trailing();
    let g = assemble_query_matrix(&params, &[g1, g2], &g3)?;
    let query = Query::new(g, pi_from_order(&EX3_ORDER))?;
    let choice = ParityChoice {
        h: vec![1, 3, 4, 6, 7, 8, 10],
        lambda: example3_lambda(),
        h_matrix,
        trailing: g3,
    };
    let secret = ClientSecret {
        b: 3,
        demand: shuffled.clone(),
        trailing: TrailingSecret::Parity {
            choice: Some(choice),
        },
    };
    Ok(Example {
        number: 3,
        params,
        demand: sorted_demand(&shuffled)?,
        query,
        secret,
    })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FixtureCheck {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FixtureReport {
    pub example: u8,
    pub checks: Vec<FixtureCheck>,
}

impl FixtureReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }
}

impl fmt::Display for FixtureReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for c in &self.checks {
            write!(f, "{} {}", if c.passed { "ok  " } else { "FAIL" }, c.name)?;
            if !c.detail.is_empty() {
                write!(f, ": {}", c.detail)?;
            }
            writeln!(f)?;
        }
        let failed = self.checks.iter().filter(|c| !c.passed).count();
        write!(
            f,
            "example {}: {} checks, {} failed",
            self.example,
            self.checks.len(),
            failed
        )
    }
}

struct Checks(Vec<FixtureCheck>);

impl Checks {
    fn eq<T: PartialEq + fmt::Debug>(&mut self, name: &str, got: T, want: T) {
        let passed = got == want;
        let detail = if passed {
            String::new()
        } else {
            format!("got {got:?}, expected {want:?}")
        };
        self.0.push(FixtureCheck {
            name: name.into(),
            passed,
            detail,
        });
    }

    fn holds(&mut self, name: &str, passed: bool, detail: impl Into<String>) {
        let detail = if passed { String::new() } else { detail.into() };
        self.0.push(FixtureCheck {
            name: name.into(),
            passed,
            detail,
        });
    }
}

fn rows(m: &FqMatrix) -> Vec<Vec<u64>> {
    m.to_u64_rows()
}

/// Recomputes every printed derived value of example `number` and checks
/// answer and recovery on the message matrix `x` (24 rows over GF(17)).
pub fn verify_example(number: u8, x: &FqMatrix) -> Result<FixtureReport> {
    let ex = example(number)?;
    let p = &ex.params;
    let mut c = Checks(Vec::new());
    let one_based_pi = |msg: usize| ex.query.pi()[msg - 1] + 1;

    let y = answer(&ex.query, x)?;
    let want = ex.demand.evaluate(x)?;
    c.eq(
        "recover returns V X_W",
        recover(&y, &ex.secret, p)?,
        want.clone(),
    );
    c.eq(
        "rate",
        p.achieved_rate(),
        [
            Rational::new(1, 3),
            Rational::new(1, 4),
            Rational::new(2, 9),
        ][number as usize - 1],
    );
    c.eq(
        "joint-privacy rate",
        jplt_rate(p.k, p.d, p.l)?,
        Rational::new(2, [18, 17, 19][number as usize - 1]),
    );
    let audit = audit_individual_privacy(&ex.query, p);
    c.holds(
        "posterior D/K for every message",
        audit.passed(),
        audit.render(),
    );
    for i in 0..p.n {
        let block = ex.query.g().block(i * p.l, i * p.d, p.l, p.d)?;
        c.holds(
            &format!("G_{} is MDS", i + 1),
            is_mds(&block)?,
            "singular minor",
        );
    }
    let planted = crate::protocol::planted_positions(p, &ex.secret);
    let via_pi: Vec<usize> = ex
        .secret
        .demand
        .w()
        .iter()
        .map(|&i| ex.query.pi()[i - 1])
        .collect();
    c.eq(
        "pi sends the demand to its planted positions",
        via_pi,
        planted,
    );

    match number {
        1 => {
            c.eq(
                "R, S, n, rows",
                (p.r, p.s, p.n, p.answer_rows),
                (0, 8, 2, 6),
            );
            c.eq("case", p.case, ProtocolCase::AlignS { t: 0, m: 1 });
            let placed: Vec<usize> = [5, 8, 11, 2, 4, 7, 10, 18]
                .iter()
                .map(|&i| one_based_pi(i))
                .collect();
            c.eq("pi(5), ..., pi(18)", placed, (9..=16).collect());
            c.eq("Y_2 = V X_W", y.y().block(2, 0, 2, x.cols())?, want);
            c.eq(
                "G_2 = V",
                ex.query.g().block(2, 8, 2, 8)?,
                ex.secret.demand.v().clone(),
            );
        }
        2 => {
            let f = p.field;
            c.eq(
                "R, S, n, rows",
                (p.r, p.s, p.n, p.answer_rows),
                (6, 3, 1, 8),
            );
            c.eq("case", p.case, ProtocolCase::AlignS { t: 2, m: 3 });
            let TrailingSecret::Align { scaffold, .. } = &ex.secret.trailing else {
                unreachable!()
            };
            c.eq(
                "Cauchy matrix",
                rows(&scaffold.omega),
                vec![vec![5, 9], vec![14, 3], vec![4, 15]],
            );
            let coeffs = alignment_coefficients(2, 3, &[1], &[3, 5], &scaffold.omega)?;
            c.eq("c_3, c_5", coeffs.clone(), elems(&[1, 13]));
            let w = &scaffold.omega;
            let a1 = f.inv(f.add(f.mul(coeffs[0], w[(0, 0)]), f.mul(coeffs[1], w[(2, 0)])))?;
            c.eq(
                "alpha_1, alpha_3, alpha_5",
                (a1, f.inv(coeffs[0])?, f.inv(coeffs[1])?),
                (f.elem(3), f.elem(1), f.elem(4)),
            );
            c.holds(
                "C = [V_1, C_2, V_2, C_4, V_3] is MDS",
                is_mds(&scaffold.c)?,
                "singular minor",
            );
            // the printed G_2 as scalar multiples of the C blocks
            let pattern = [[15u64, 1, 1, 0, 0], [8, 6, 0, 10, 0], [12, 13, 0, 0, 4]];
            let g2 = ex.query.g().block(2, 9, 6, 15)?;
            let mut matches = true;
            for (i, row) in pattern.iter().enumerate() {
                for (j, &coef) in row.iter().enumerate() {
                    let want_block = scaffold.c.block(0, 3 * j, 2, 3)?.scale(f.elem(coef));
                    matches &= g2.block(2 * i, 3 * j, 2, 3)? == want_block;
                }
            }
            c.holds(
                "G_2 coefficient pattern",
                matches,
                "block differs from the printed multiple of C_j",
            );
            let placed: Vec<usize> = [10, 4, 8, 11, 7, 23, 18, 2, 5]
                .iter()
                .map(|&i| one_based_pi(i))
                .collect();
            c.eq(
                "pi(10), ..., pi(5)",
                placed,
                vec![10, 11, 12, 16, 17, 18, 22, 23, 24],
            );
            let y2 = y.y().block(2, 0, 6, x.cols())?;
            let combined = y2
                .block(0, 0, 2, x.cols())?
                .add(&y2.block(4, 0, 2, x.cols())?.scale(f.elem(13)))?;
            c.eq("[c_3 I, 0, c_5 I] Y_2 = V X_W", combined, want);
            let sweep = alignment_feasibility_sweep(&g2, &scaffold.omega, p)?;
            c.eq(
                "aligned subsets feasible",
                (sweep.feasible(), sweep.total()),
                (10, 10),
            );
            c.eq(
                "planted subset {1,3,5} gives c",
                sweep.find(&[1, 3, 5]).and_then(|o| o.c.clone()),
                Some(elems(&[1, 13])),
            );
        }
        3 => {
            c.eq(
                "R, S, n, rows",
                (p.r, p.s, p.n, p.answer_rows),
                (3, 1, 2, 9),
            );
            c.eq("case", p.case, ProtocolCase::ParityEmbed);
            let TrailingSecret::Parity { choice: Some(ch) } = &ex.secret.trailing else {
                unreachable!()
            };
            let v = ex.secret.demand.v();
            c.eq("rank of Lambda", ch.lambda.rank(), 5);
            c.holds(
                "Lambda V^T = 0",
                ch.lambda.mul(&v.transpose())?.is_zero(),
                "nonzero product",
            );
            c.holds(
                "null space of V spans Lambda",
                v.right_null_space().row_space_eq(&ch.lambda),
                "row spaces differ",
            );
            let cols: Vec<usize> = ch.h.iter().map(|h| h - 1).collect();
            c.eq(
                "H restricted to h is Lambda",
                ch.h_matrix.select_columns(&cols)?,
                ch.lambda.clone(),
            );
            c.holds("H is MDS", is_mds(&ch.h_matrix)?, "singular minor");
            c.holds(
                "G_3 H^T = 0",
                ch.trailing.mul(&ch.h_matrix.transpose())?.is_zero(),
                "nonzero product",
            );
            c.holds(
                "G_3 spans the code with parity check H",
                generator_from_parity(&ch.h_matrix, 10)?.row_space_eq(&ch.trailing),
                "row spaces differ",
            );
            let printed = example3_printed_trailing();
            let differing: Vec<usize> = (0..10)
                .filter(|&j| printed.column(j) != ch.trailing.column(j))
                .map(|j| j + 1)
                .collect();
            c.eq(
                "printed G_3 differs only in columns 2 and 8",
                differing,
                vec![2, 8],
            );
            let t = example3_recovery_matrix();
            c.eq(
                "T G_3",
                rows(&t.mul(&ch.trailing)?),
                vec![
                    vec![15, 0, 4, 6, 0, 9, 13, 2, 0, 11],
                    vec![9, 0, 15, 3, 0, 1, 8, 6, 0, 13],
                ],
            );
            let mut target = FqMatrix::zeros(p.field, 2, 10);
            for (j, &col) in cols.iter().enumerate() {
                target[(0, col)] = v[(0, j)];
                target[(1, col)] = v[(1, j)];
            }
            c.eq(
                "solved T",
                ch.trailing.solve_left(&target)?.map(|m| rows(&m)),
                Some(rows(&t)),
            );
            c.eq(
                "T Y_3 = V X_W",
                t.mul(&y.y().block(4, 0, 5, x.cols())?)?,
                want,
            );
            let placed: Vec<usize> = [4, 10, 7, 23, 18, 2, 15]
                .iter()
                .map(|&i| one_based_pi(i))
                .collect();
            c.eq(
                "pi(4), ..., pi(15)",
                placed,
                vec![15, 17, 18, 20, 21, 22, 24],
            );
            let sweep = parity_shortening_sweep(&ch.trailing, p)?;
            c.eq(
                "shortened supports feasible",
                (sweep.feasible(), sweep.total()),
                (120, 120),
            );
        }
        _ => unreachable!("example() rejects other numbers"),
    }
    Ok(FixtureReport {
        example: number,
        checks: c.0,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::seeded_rng;

    #[test]
    fn all_examples_pass() {
        let mut rng = seeded_rng(0);
        for n in 1..=3 {
            for cols in [1, 3] {
                let x = FqMatrix::random(gf(), K, cols, &mut rng);
                let report = verify_example(n, &x).unwrap();
                assert!(report.passed(), "{report}");
            }
        }
    }

    #[test]
    fn sorted_demands_match_printed_originals() {
        let ex = example(1).unwrap();
        assert_eq!(ex.demand.w(), &[2, 4, 5, 7, 8, 10, 11, 18]);
        assert_eq!(
            rows(ex.demand.v()),
            vec![
                vec![2, 15, 3, 6, 1, 4, 11, 13],
                vec![6, 9, 4, 3, 11, 15, 13, 8]
            ]
        );
        let ex = example(2).unwrap();
        assert_eq!(ex.demand.w(), &[2, 4, 5, 7, 8, 10, 11, 18, 23]);
        assert_eq!(
            rows(ex.demand.v()),
            vec![
                vec![2, 15, 3, 6, 1, 4, 11, 13, 9],
                vec![6, 9, 4, 3, 11, 15, 13, 8, 1]
            ]
        );
        let ex = example(3).unwrap();
        assert_eq!(ex.demand.w(), &[2, 4, 7, 10, 15, 18, 23]);
        assert_eq!(
            rows(ex.demand.v()),
            vec![vec![2, 15, 6, 4, 11, 13, 9], vec![6, 9, 3, 15, 13, 8, 1]]
        );
    }

    #[test]
    fn unknown_example() {
        assert!(example(4).is_err());
    }

    #[test]
    fn corrupted_answer_is_caught() {
        let mut rng = seeded_rng(1);
        let ex = example(3).unwrap();
        let x = FqMatrix::random(gf(), K, 2, &mut rng);
        let mut y = answer(&ex.query, &x).unwrap().into_inner();
        y[(4, 0)] = ex.params.field.add(y[(4, 0)], ex.params.field.elem(1));
        let z = recover(&crate::protocol::Answer::new(y), &ex.secret, &ex.params).unwrap();
        assert_ne!(z, ex.demand.evaluate(&x).unwrap());
    }
}
