//! `iplt`: bounds, worked examples, end-to-end demos, audits and a TCP
//! server/client for the private linear transformation protocol.

mod commands;
mod demand_file;

use std::io::{self, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

#[derive(Parser, Debug)]
#[command(
    name = "iplt",
    version,
    about = "Private linear transformation with individual privacy"
)]
struct Cli {
    /// Seed for every randomized step.
    #[arg(long, env = "PLT_SEED", default_value_t = 0, global = true)]
    seed: u64,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Capacity bounds and the joint-privacy rate for one (K, D, L).
    Bounds {
        #[arg(long = "K")]
        k: usize,
        #[arg(long = "D")]
        d: usize,
        #[arg(long = "L")]
        l: usize,
    },
    /// Reproduce a worked example over GF(17) and check every printed value.
    Example {
        #[arg(value_parser = clap::value_parser!(u8).range(1..=3))]
        which: u8,
        /// Message length of the random message matrix.
        #[arg(long = "N", default_value_t = 3)]
        n: usize,
    },
    /// Build a query, answer it in process and recover the demand.
    Demo {
        #[arg(long = "K")]
        k: usize,
        #[arg(long = "D")]
        d: usize,
        #[arg(long = "L")]
        l: usize,
        #[arg(long)]
        q: u64,
        #[arg(long = "N", default_value_t = 1)]
        n: usize,
        /// Demand file; a random demand is drawn when absent.
        #[arg(long)]
        demand: Option<PathBuf>,
    },
    /// Privacy audit and feasibility sweeps over random queries.
    Audit {
        #[arg(long = "K")]
        k: usize,
        #[arg(long = "D")]
        d: usize,
        #[arg(long = "L")]
        l: usize,
        #[arg(long)]
        q: u64,
        #[arg(long, default_value_t = 10)]
        trials: usize,
    },
    /// Compare the exhaustive integer-program oracle with its closed form.
    Ilp {
        #[arg(long = "max-K")]
        max_k: usize,
    },
    /// CSV of rates for D = dstep, 2 dstep, ... up to K with L = ratio * D.
    Sweep {
        #[arg(long = "K")]
        k: usize,
        /// L/D as a fraction or decimal, e.g. 3/5 or 0.6.
        #[arg(long)]
        ratio: String,
        #[arg(long)]
        dstep: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Write a random message store.
    MakeStore {
        #[arg(long = "K")]
        k: usize,
        #[arg(long = "N")]
        n: usize,
        #[arg(long)]
        q: u64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Serve a message store over TCP.
    Serve {
        #[arg(long)]
        store: PathBuf,
        #[arg(long, default_value = "127.0.0.1:7878")]
        listen: String,
    },
    /// Query a server for the demand in a demand file and recover it.
    Fetch {
        #[arg(long)]
        addr: String,
        #[arg(long)]
        demand: PathBuf,
        #[arg(long = "K")]
        k: usize,
        #[arg(long)]
        q: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn run(cli: Cli, out: &mut dyn Write) -> anyhow::Result<bool> {
    use commands::*;
    let seed = cli.seed;
    match cli.command {
        Command::Bounds { k, d, l } => bounds(out, k, d, l),
        Command::Example { which, n } => example(out, which, n, seed),
        Command::Demo {
            k,
            d,
            l,
            q,
            n,
            demand,
        } => demo(out, k, d, l, q, n, demand.as_deref(), seed),
        Command::Audit { k, d, l, q, trials } => audit(out, k, d, l, q, trials, seed),
        Command::Ilp { max_k } => ilp(out, max_k),
        Command::Sweep {
            k,
            ratio,
            dstep,
            out: path,
        } => sweep(out, k, &ratio, dstep, path.as_deref()),
        Command::MakeStore { k, n, q, out: path } => make_store(out, k, n, q, &path, seed),
        Command::Serve { store, listen } => serve(out, &store, &listen),
        Command::Fetch {
            addr,
            demand,
            k,
            q,
            out: path,
        } => fetch(out, &addr, &demand, k, q, path.as_deref(), seed),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let stdout = io::stdout();
    let mut out = stdout.lock();
    match run(cli, &mut out) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            let _ = out.flush();
            eprintln!("error: {e:#}");
            if let Some(iplt::Error::BadShape(_)) = e.downcast_ref::<iplt::Error>() {
                eprintln!("hint: parameters must satisfy 1 <= L <= D <= K");
            }
            ExitCode::from(2)
        }
    }
}
