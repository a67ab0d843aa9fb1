use std::fs;
use std::io::Write;
use std::path::Path;

use anyhow::{bail, Context, Result};
use iplt::audit::{audit_individual_privacy, trailing_feasibility_sweep, trailing_subset_count};
use iplt::bounds::{
    decimal6, ilp_bruteforce, ilp_closed_form, parse_rational, rate_bounds, sweep_csv, ILP_MAX_K,
};
use iplt::fixtures::verify_example;
use iplt::protocol::{
    answer, build_query, derive_params, recover, Demand, ProtocolCase, ProtocolParams,
};
use iplt::rng::seeded_rng;
use iplt::wire::{self, MessageStore};
use iplt::{FqMatrix, PrimeField, Rational};

use crate::demand_file;

/// Feasibility sweeps visiting more subsets than this are skipped by `audit`.
const SWEEP_LIMIT: u128 = 5_000;

fn frac(x: Rational) -> String {
    format!("{x}")
}

fn describe(p: &ProtocolParams) -> String {
    let case = match p.case {
        ProtocolCase::AlignS { t, m } => format!("aligned (t={t}, m={m})"),
        ProtocolCase::ParityEmbed => "parity embedding".to_string(),
    };
    format!(
        "K={} D={} L={} q={}: R={} S={} n={}, case {case}",
        p.k,
        p.d,
        p.l,
        p.field.modulus(),
        p.r,
        p.s,
        p.n
    )
}

fn write_matrix(out: &mut dyn Write, m: &FqMatrix) -> Result<()> {
    for row in m.to_u64_rows() {
        let cells: Vec<String> = row.iter().map(u64::to_string).collect();
        writeln!(out, "{}", cells.join(" "))?;
    }
    Ok(())
}

pub fn bounds(out: &mut dyn Write, k: usize, d: usize, l: usize) -> Result<bool> {
    let b = rate_bounds(k, d, l)?;
    writeln!(out, "K={k} D={d} L={l}")?;
    writeln!(out, "upper  {:<8} {}", frac(b.upper), decimal6(b.upper))?;
    writeln!(out, "lower  {:<8} {}", frac(b.lower), decimal6(b.lower))?;
    match b.exact {
        Some(c) => writeln!(out, "exact  {:<8} {}", frac(c), decimal6(c))?,
        None => writeln!(out, "exact  none")?,
    }
    writeln!(out, "jplt   {:<8} {}", frac(b.jplt), decimal6(b.jplt))?;
    Ok(true)
}

pub fn example(out: &mut dyn Write, which: u8, n: usize, seed: u64) -> Result<bool> {
    let mut rng = seeded_rng(seed);
    let field = PrimeField::new(iplt::fixtures::Q)?;
    let x = FqMatrix::random(field, iplt::fixtures::K, n, &mut rng);
    let report = verify_example(which, &x)?;
    writeln!(out, "{report}")?;
    Ok(report.passed())
}

#[allow(clippy::too_many_arguments)]
pub fn demo(
    out: &mut dyn Write,
    k: usize,
    d: usize,
    l: usize,
    q: u64,
    n: usize,
    demand_path: Option<&Path>,
    seed: u64,
) -> Result<bool> {
    let params = derive_params(k, d, l, q, n)?;
    let mut rng = seeded_rng(seed);
    let demand = match demand_path {
        Some(path) => {
            let text =
                fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
            let demand = demand_file::parse(&text, k, params.field)?;
            if (demand.d(), demand.l()) != (d, l) {
                bail!(
                    "demand file has D={} L={}, flags say D={d} L={l}",
                    demand.d(),
                    demand.l()
                );
            }
            demand
        }
        None => Demand::random(&params, &mut rng)?,
    };
    let x = FqMatrix::random(params.field, k, n, &mut rng);
    let (query, secret) = build_query(&demand, &params, &mut rng)?;
    let y = answer(&query, &x)?;
    let z = recover(&y, &secret, &params)?;
    let ok = z == demand.evaluate(&x)?;
    writeln!(out, "{}", describe(&params))?;
    writeln!(out, "demand W = {:?}", demand.w())?;
    writeln!(out, "block b = {} of {}", secret.b, params.n + 1)?;
    writeln!(out, "answer: {} rows x {}", y.y().rows(), y.y().cols())?;
    writeln!(
        out,
        "recovered: {}, rate {}",
        if ok { "OK" } else { "MISMATCH" },
        params.achieved_rate()
    )?;
    Ok(ok)
}

pub fn audit(
    out: &mut dyn Write,
    k: usize,
    d: usize,
    l: usize,
    q: u64,
    trials: usize,
    seed: u64,
) -> Result<bool> {
    let params = derive_params(k, d, l, q, 1)?;
    let mut rng = seeded_rng(seed);
    let subsets = trailing_subset_count(&params);
    let sweep = subsets <= SWEEP_LIMIT;
    let (mut violations, mut structural, mut infeasible, mut checked) =
        (0usize, 0usize, 0usize, 0u128);
    for trial in 0..trials {
        let demand = Demand::random(&params, &mut rng)?;
        let (query, secret) = build_query(&demand, &params, &mut rng)?;
        let report = audit_individual_privacy(&query, &params);
        if !report.passed() {
            writeln!(out, "trial {trial}: {}", report.summary())?;
        }
        violations += report.violations.len();
        structural += report.structural.len();
        if sweep {
            let s = trailing_feasibility_sweep(&query, &secret, &params)?;
            checked += s.total() as u128;
            let bad = s.total() - s.feasible();
            if bad > 0 {
                writeln!(
                    out,
                    "trial {trial}: {bad} infeasible subsets, first {:?}",
                    s.infeasible()[0]
                )?;
            }
            infeasible += bad;
        }
    }
    writeln!(out, "{}", describe(&params))?;
    if violations == 0 && structural == 0 {
        writeln!(
            out,
            "privacy: posterior D/K for all indices in all trials ({trials} trials)"
        )?;
    } else {
        writeln!(out, "privacy: {violations} posterior violations, {structural} structural issues in {trials} trials")?;
    }
    if sweep {
        writeln!(
            out,
            "feasibility: {infeasible} infeasible of {checked} subsets"
        )?;
    } else {
        writeln!(
            out,
            "feasibility: skipped ({subsets} subsets per query exceeds {SWEEP_LIMIT})"
        )?;
    }
    Ok(violations == 0 && structural == 0 && infeasible == 0)
}

pub fn ilp(out: &mut dyn Write, max_k: usize) -> Result<bool> {
    if max_k > ILP_MAX_K {
        bail!("--max-K {max_k} exceeds the oracle limit {ILP_MAX_K}");
    }
    let (mut triples, mut mismatches) = (0usize, 0usize);
    for k in 1..=max_k {
        for d in 1..=k {
            for l in 1..=d {
                triples += 1;
                let (oracle, closed) = (ilp_bruteforce(k, d, l)?, ilp_closed_form(k, d, l)?);
                if oracle != closed {
                    mismatches += 1;
                    writeln!(
                        out,
                        "mismatch K={k} D={d} L={l}: oracle {oracle}, closed form {closed}"
                    )?;
                }
            }
        }
    }
    writeln!(
        out,
        "{triples} triples with K <= {max_k}: {mismatches} mismatches"
    )?;
    Ok(mismatches == 0)
}

pub fn sweep(
    out: &mut dyn Write,
    k: usize,
    ratio: &str,
    dstep: usize,
    path: Option<&Path>,
) -> Result<bool> {
    if dstep == 0 {
        bail!("--dstep must be positive");
    }
    let ratio = parse_rational(ratio)?;
    let d_values: Vec<usize> = (1..).map(|i| i * dstep).take_while(|&d| d <= k).collect();
    let csv = sweep_csv(&iplt::bounds::sweep(k, ratio, &d_values)?);
    match path {
        Some(p) => {
            fs::write(p, &csv).with_context(|| format!("writing {}", p.display()))?;
            writeln!(out, "wrote {} rows to {}", d_values.len(), p.display())?;
        }
        None => out.write_all(csv.as_bytes())?,
    }
    Ok(true)
}

pub fn make_store(
    out: &mut dyn Write,
    k: usize,
    n: usize,
    q: u64,
    path: &Path,
    seed: u64,
) -> Result<bool> {
    let field = PrimeField::new(q)?;
    let store = MessageStore::random(field, k, n, &mut seeded_rng(seed));
    store
        .save(path)
        .with_context(|| format!("writing {}", path.display()))?;
    writeln!(
        out,
        "wrote {k} x {n} store over GF({q}) to {}",
        path.display()
    )?;
    Ok(true)
}

pub fn serve(out: &mut dyn Write, store_path: &Path, listen: &str) -> Result<bool> {
    let store = MessageStore::load(store_path)
        .with_context(|| format!("loading {}", store_path.display()))?;
    let (k, n) = (store.k(), store.n());
    let handle = wire::serve(store, listen)?;
    writeln!(
        out,
        "listening on {} ({k} messages of length {n})",
        handle.local_addr()
    )?;
    out.flush()?;
    handle.join();
    Ok(true)
}

#[allow(clippy::too_many_arguments)]
pub fn fetch(
    out: &mut dyn Write,
    addr: &str,
    demand_path: &Path,
    k: usize,
    q: u64,
    path: Option<&Path>,
    seed: u64,
) -> Result<bool> {
    let field = PrimeField::new(q)?;
    let text = fs::read_to_string(demand_path)
        .with_context(|| format!("reading {}", demand_path.display()))?;
    let demand = demand_file::parse(&text, k, field)?;
    let params = derive_params(k, demand.d(), demand.l(), q, 1)?;
    let (query, secret) = build_query(&demand, &params, &mut seeded_rng(seed))?;
    let reply = wire::fetch(addr, &query)?;
    let z = recover(&reply, &secret, &params)?;
    match path {
        Some(p) => {
            let mut buf = Vec::new();
            write_matrix(&mut buf, &z)?;
            fs::write(p, buf).with_context(|| format!("writing {}", p.display()))?;
            writeln!(
                out,
                "recovered {} x {} demand, rate {}; wrote {}",
                z.rows(),
                z.cols(),
                params.achieved_rate(),
                p.display()
            )?;
        }
        None => write_matrix(out, &z)?,
    }
    Ok(true)
}
