//! `distopf`: generate radial networks, solve them with distributed ADMM,
//! check the closed-form kernels against the oracles and time them.
//!
//! Exit codes: 0 success or converged, 1 usage or I/O error, 2 iteration cap
//! reached, 3 kernel check failure.

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Parser, Subcommand, ValueEnum};

use distopf::check::{self, Family, KernelSet};
use distopf::harness::{exactness_gap, flow_residual, run_with};
use distopf::kernels::{DiskCase, DiskQp, DiskSolution};
use distopf::KernelError;
use distopf::{gen_fat_tree, gen_line, gen_random_tree, load_network, save_network, LoadProfile, SolveConfig, Status, TraceRow};

const EXIT_USAGE: u8 = 1;
const EXIT_MAX_ITERS: u8 = 2;
const EXIT_CHECK_FAILED: u8 = 3;

#[derive(Parser)]
#[command(name = "distopf", version, about = "Distributed ADMM for radial optimal power flow")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve a network document and write the trace and solution.
    Solve {
        network: PathBuf,
        #[arg(long, default_value_t = 1.0)]
        rho: f64,
        #[arg(long, default_value_t = 1e-4)]
        tol_scale: f64,
        #[arg(long, default_value_t = 100_000)]
        max_iters: u64,
        /// Worker threads; defaults to the number of cores.
        #[arg(long)]
        parallelism: Option<usize>,
        /// Solution document; stdout when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Trace CSV, flushed after every iteration.
        #[arg(long)]
        trace: Option<PathBuf>,
    },
    /// Write a generated network document.
    Generate {
        topology: Topology,
        size: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// stdout when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Compare every kernel family against its oracle on random instances.
    KernelCheck {
        #[arg(long, default_value_t = 1000)]
        count: usize,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        /// Replace one kernel with a deliberately wrong one (checker self-test).
        #[arg(long, hide = true)]
        inject_fault: Option<FaultFamily>,
    },
    /// Time each kernel on random instances.
    Bench {
        #[arg(long, default_value_t = 10_000)]
        count: usize,
        #[arg(long, default_value_t = 1)]
        seed: u64,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Topology {
    Line,
    Fattree,
    Random,
}

#[derive(Clone, Copy, ValueEnum)]
enum FaultFamily {
    Disk,
}

fn write_output(path: Option<&Path>, bytes: &[u8]) -> Result<()> {
    match path {
        Some(p) => std::fs::write(p, bytes).with_context(|| format!("writing {}", p.display())),
        None => io::stdout().write_all(bytes).context("writing stdout"),
    }
}

fn cmd_solve(
    network: &Path,
    config: SolveConfig,
    out: Option<&Path>,
    trace: Option<&Path>,
) -> Result<ExitCode> {
    let bytes = std::fs::read(network).with_context(|| format!("reading {}", network.display()))?;
    let net = load_network(&bytes).with_context(|| format!("loading {}", network.display()))?;
    let mut sink = match trace {
        Some(p) => {
            let mut w = BufWriter::new(File::create(p).with_context(|| format!("creating {}", p.display()))?);
            writeln!(w, "{}", TraceRow::CSV_HEADER)?;
            Some(w)
        }
        None => None,
    };
    let (sol, tr) = run_with(net.clone(), config, |row| {
        if let Some(w) = sink.as_mut() {
            writeln!(w, "{}", row.csv_line())?;
            w.flush()?;
        }
        Ok(())
    })?;
    write_output(out, sol.to_json().as_bytes())?;
    let gap = exactness_gap(&sol, &net).into_iter().fold(0.0f64, f64::max);
    eprintln!("status: {:?}", tr.status);
    eprintln!("iterations: {}", sol.iterations);
    eprintln!("residuals: r = {:e}, s = {:e}", sol.r, sol.s);
    eprintln!("objective: {}", sol.objective);
    eprintln!("max exactness gap: {gap:e}");
    eprintln!("flow residual: {:e}", flow_residual(&sol, &net));
    Ok(match tr.status {
        Status::Converged => ExitCode::SUCCESS,
        Status::MaxIters => ExitCode::from(EXIT_MAX_ITERS),
    })
}

fn cmd_generate(topology: Topology, size: usize, seed: u64, out: Option<&Path>) -> Result<ExitCode> {
    let profile = LoadProfile::with_seed(seed);
    let net = match topology {
        Topology::Line => gen_line(size, &profile),
        Topology::Fattree => gen_fat_tree(size, &profile),
        Topology::Random => gen_random_tree(size, &profile),
    }?;
    write_output(out, &save_network(&net))?;
    Ok(ExitCode::SUCCESS)
}

fn zero_disk(_: &DiskQp) -> Result<DiskSolution, KernelError> {
    Ok(DiskSolution {
        p: 0.0,
        q: 0.0,
        case: DiskCase::Interior,
    })
}

fn cmd_kernel_check(count: usize, seed: u64, fault: Option<FaultFamily>) -> Result<ExitCode> {
    let mut kernels = KernelSet::default();
    if let Some(FaultFamily::Disk) = fault {
        kernels.disk = zero_disk;
    }
    let report = check::kernel_check(&kernels, count, seed);
    for fam in &report.families {
        println!(
            "{:<9} count {:>6}  max gap {:>10.3e}  max violation {:>10.3e}  {}",
            fam.family.name(),
            fam.count,
            fam.max_gap,
            fam.max_violation,
            if fam.passed() { "ok" } else { "FAILED" }
        );
        if let Some(f) = fam.failures.first() {
            println!("  first failure (#{}, {}): {}", f.index, f.reason, f.instance);
            if fam.failures.len() > 1 {
                println!("  ... and {} more", fam.failures.len() - 1);
            }
        }
    }
    let tolerances = [
        (Family::EqQp, check::EQ_GAP_TOL, check::EQ_FEAS_TOL),
        (Family::ConeBox, check::CONE_GAP_TOL, check::CONE_FEAS_TOL),
        (Family::Disk, check::DISK_GAP_TOL, check::DISK_FEAS_TOL),
    ];
    for (f, g, v) in tolerances {
        println!("tolerance {:<9} gap {g:e}, violation {v:e}", f.name());
    }
    Ok(if report.passed() {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(EXIT_CHECK_FAILED)
    })
}

fn cmd_bench(count: usize, seed: u64) -> Result<ExitCode> {
    println!("{:<18} {:>8} {:>11} {:>11} {:>11}", "kernel", "samples", "mean_us", "median_us", "p99_us");
    for b in check::bench(count, seed) {
        println!(
            "{:<18} {:>8} {:>11.3} {:>11.3} {:>11.3}",
            b.kernel, b.samples, b.mean_us, b.median_us, b.p99_us
        );
    }
    Ok(ExitCode::SUCCESS)
}

fn dispatch(cli: Cli) -> Result<ExitCode> {
    match cli.command {
        Command::Solve {
            network,
            rho,
            tol_scale,
            max_iters,
            parallelism,
            out,
            trace,
        } => {
            let mut config = SolveConfig {
                rho,
                tol_scale,
                max_iters,
                ..SolveConfig::default()
            };
            if let Some(p) = parallelism {
                config.parallelism = p;
            }
            cmd_solve(&network, config, out.as_deref(), trace.as_deref())
        }
        Command::Generate {
            topology,
            size,
            seed,
            out,
        } => cmd_generate(topology, size, seed, out.as_deref()),
        Command::KernelCheck {
            count,
            seed,
            inject_fault,
        } => cmd_kernel_check(count, seed, inject_fault),
        Command::Bench { count, seed } => cmd_bench(count, seed),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match dispatch(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(EXIT_USAGE)
        }
    }
}
