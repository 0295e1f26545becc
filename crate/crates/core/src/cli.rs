//! Command-line front end. Every flag can also be set through a
//! `QLSPLAB_`-prefixed environment variable; all randomness flows from `--seed`.

use std::fmt::Write as _;
use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use crate::analysis::{kappa_formula, spectral_check, DEFAULT_DELTA};
use crate::blockenc::{check_perturbation_lemma, check_pipeline_bound, perturbation_csv, pipeline_eps};
use crate::encoding::{Dims, SparseOracleView, DEFAULT_DENSE_CAP};
use crate::error::{Error, Result};
use crate::json::{to_canonical, to_canonical_value};
use crate::ledger::QueryLedger;
use crate::mtx;
use crate::permchain::PermutationChain;
use crate::pipeline::{
    load_chain, run_reduction_on, chain_to_json, verify_all, walk_p, Fault, Level, ReductionConfig, SolverKind,
    VerifyOptions, DEFAULT_REPETITIONS,
};
use crate::rng::derive_seed;
use crate::solver::{sample_outcomes, solve_direct, solve_neumann, SolveReport};
use crate::analysis::StateVector;

#[derive(Debug, Parser)]
#[command(name = "qlsplab", version, about = "Permutation-chain linear systems: build, solve, sample, verify")]
pub struct Cli {
    #[command(flatten)]
    pub global: Global,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct Global {
    #[arg(long, global = true, env = "QLSPLAB_SEED", default_value_t = 1)]
    pub seed: u64,
    /// Permutation size.
    #[arg(long = "N", global = true, env = "QLSPLAB_N", default_value_t = 2)]
    pub n: usize,
    /// Chain length.
    #[arg(long, global = true, env = "QLSPLAB_Q", default_value_t = 1)]
    pub q: usize,
    #[arg(long, global = true, env = "QLSPLAB_EPS")]
    pub eps: Option<f64>,
    #[arg(long, global = true, env = "QLSPLAB_SHOTS")]
    pub shots: Option<u64>,
    #[arg(long, global = true, env = "QLSPLAB_REPS", default_value_t = DEFAULT_REPETITIONS)]
    pub reps: u64,
    #[arg(long, global = true, env = "QLSPLAB_DENSE_CAP", default_value_t = DEFAULT_DENSE_CAP)]
    pub dense_cap: usize,
    #[arg(long, global = true, env = "QLSPLAB_FORMAT", value_enum, default_value_t = Format::Json)]
    pub format: Format,
    /// Output file; standard output when absent.
    #[arg(long, global = true, env = "QLSPLAB_OUT")]
    pub out: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum SolverArg {
    Direct,
    Neumann,
    Blockenc,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum LevelArg {
    Fast,
    Full,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Draw a random chain and write it as permchain-v1 JSON.
    Gen,
    /// Write the encoding matrix of a chain as MatrixMarket.
    Build(ChainArg),
    /// Solve the chain's linear system and write the SolveReport.
    Solve {
        #[command(flatten)]
        chain: ChainArg,
        #[arg(long, value_enum, default_value_t = SolverArg::Direct)]
        solver: SolverArg,
    },
    /// Measure a solved state and write the outcomes as CSV.
    Sample {
        /// SolveReport or state JSON.
        #[arg(long)]
        state: PathBuf,
    },
    /// Run the full reduction and write the ReductionReport.
    Reduce {
        #[command(flatten)]
        chain: ChainArg,
        #[arg(long, value_enum, default_value_t = SolverArg::Direct)]
        solver: SolverArg,
        /// Leave wall-clock timings out of the report.
        #[arg(long, env = "QLSPLAB_NO_TIMINGS")]
        no_timings: bool,
    },
    /// Run every check on one random instance; exits 1 on any failure.
    Verify {
        #[arg(long, value_enum, default_value_t = LevelArg::Fast)]
        level: LevelArg,
        #[arg(long, default_value_t = DEFAULT_DELTA)]
        delta: f64,
        /// Overwrite entry (0, 1) of the matrix before checking.
        #[arg(long, hide = true)]
        inject_fault: bool,
    },
    /// Randomized perturbation-bound trials and the pipeline error budget.
    Perturb {
        #[arg(long, value_delimiter = ',', default_values_t = [2.0, 8.0, 32.0])]
        kappa: Vec<f64>,
        #[arg(long, default_value_t = 200)]
        trials: u64,
        /// Matrix dimension for the trials.
        #[arg(long, default_value_t = 8)]
        dim: usize,
    },
    /// Time each phase over a grid of sizes and write CSV.
    Bench {
        /// Sizes as N:q pairs; defaults to a small grid.
        #[arg(long, value_delimiter = ',')]
        sizes: Vec<String>,
    },
}

#[derive(Debug, Args)]
pub struct ChainArg {
    /// permchain-v1 file; a chain is drawn from --N, --q and --seed when absent.
    #[arg(long)]
    pub chain: Option<PathBuf>,
}

impl ChainArg {
    fn resolve(&self, g: &Global) -> Result<PermutationChain> {
        match &self.chain {
            Some(path) => load_chain(path),
            None => {
                if g.n == 0 || g.q == 0 {
                    return Err(Error::BadParameters("--N and --q must be >= 1".into()));
                }
                Ok(PermutationChain::random(g.n, g.q, g.seed))
            }
        }
    }
}

fn emit(g: &Global, text: &str) -> Result<()> {
    match &g.out {
        Some(path) => fs::write(path, text)?,
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout.write_all(text.as_bytes())?;
            if !text.ends_with('\n') {
                stdout.write_all(b"\n")?;
            }
        }
    }
    Ok(())
}

fn solver_kind(arg: SolverArg, g: &Global, q: usize) -> SolverKind {
    match arg {
        SolverArg::Direct => SolverKind::Direct,
        SolverArg::Neumann => SolverKind::Neumann {
            eps: g.eps.unwrap_or(1e-3),
        },
        SolverArg::Blockenc => SolverKind::Blockenc {
            eps: g.eps.unwrap_or_else(|| pipeline_eps(kappa_formula(q))),
        },
    }
}

fn read_state(path: &Path) -> Result<StateVector> {
    let value: Value = serde_json::from_str(&fs::read_to_string(path)?).map_err(|e| Error::Schema {
        path: path.to_path_buf(),
        msg: e.to_string(),
    })?;
    let state = match value.get("state") {
        Some(inner) => inner.clone(),
        None => value,
    };
    serde_json::from_value(state).map_err(|e| Error::Schema {
        path: path.to_path_buf(),
        msg: e.to_string(),
    })
}

fn parse_size(s: &str) -> Result<(usize, usize)> {
    let (n, q) = s
        .split_once(':')
        .ok_or_else(|| Error::BadParameters(format!("size {s:?} is not N:q")))?;
    let parse = |v: &str| {
        v.parse::<usize>()
            .map_err(|e| Error::BadParameters(format!("size {s:?}: {e}")))
    };
    Ok((parse(n)?, parse(q)?))
}

/// Runs one parsed invocation; `Ok(false)` means a check failed.
pub fn execute(cli: &Cli) -> Result<bool> {
    let g = &cli.global;
    match &cli.command {
        Command::Gen => {
            let chain = ChainArg { chain: None }.resolve(g)?;
            emit(g, &chain_to_json(&chain))?;
        }
        Command::Build(chain) => {
            let chain = chain.resolve(g)?;
            let view = SparseOracleView::new(&chain);
            let dim = view.dims().dim();
            Dims::of(&chain).check_cap(g.dense_cap)?;
            emit(g, &mtx::render(dim, dim, &view.triplets()))?;
        }
        Command::Solve { chain, solver } => {
            let chain = chain.resolve(g)?;
            let report: SolveReport = match solver_kind(*solver, g, chain.q()) {
                SolverKind::Direct => {
                    let a = SparseOracleView::new(&chain).materialize_dense(g.dense_cap)?;
                    solve_direct(&a, Dims::of(&chain))?
                }
                SolverKind::Neumann { eps } => solve_neumann(&chain, &mut QueryLedger::new(), eps)?,
                SolverKind::Blockenc { .. } => {
                    return Err(Error::BadParameters("solve supports direct and neumann; use reduce for blockenc".into()))
                }
            };
            emit(g, &to_canonical(&report)?)?;
        }
        Command::Sample { state } => {
            let state = read_state(state)?;
            let shots = g.shots.unwrap_or(1000);
            let outcomes = sample_outcomes(&state, shots, g.seed);
            let dims = state.dims();
            let text = match g.format {
                Format::Csv => {
                    let mut out = String::from("shot,b,j,x,index\n");
                    for (i, o) in outcomes.iter().enumerate() {
                        let _ = writeln!(out, "{i},{},{},{},{}", o.b, o.j, o.x, o.flatten(dims));
                    }
                    out
                }
                Format::Json => {
                    let rows: Vec<Value> = outcomes.iter().map(|o| json!([o.b, o.j, o.x])).collect();
                    to_canonical_value(&json!({ "seed": g.seed, "shots": shots, "outcomes": rows }))
                }
            };
            emit(g, &text)?;
        }
        Command::Reduce {
            chain,
            solver,
            no_timings,
        } => {
            let chain = chain.resolve(g)?;
            let config = ReductionConfig {
                solver: solver_kind(*solver, g, chain.q()),
                max_repetitions: g.reps,
                shots_per_repetition: g.shots.unwrap_or(1),
                dense_cap: g.dense_cap,
                record_timings: !no_timings,
            };
            let report = run_reduction_on(&chain, g.seed, &config)?;
            emit(g, &to_canonical(&report)?)?;
        }
        Command::Verify {
            level,
            delta,
            inject_fault,
        } => {
            let options = VerifyOptions {
                dense_cap: g.dense_cap,
                delta: *delta,
                fault: inject_fault.then_some(Fault::CorruptEntry {
                    row: 0,
                    col: 1,
                    value: 0.5,
                }),
            };
            let level = match level {
                LevelArg::Fast => Level::Fast,
                LevelArg::Full => Level::Full,
            };
            let report = verify_all(g.n, g.q, g.seed, level, &options)?;
            emit(g, &to_canonical(&report)?)?;
            return Ok(report.passed);
        }
        Command::Perturb { kappa, trials, dim } => return perturb(g, kappa, *trials, *dim),
        Command::Bench { sizes } => bench(g, sizes)?,
    }
    Ok(true)
}

fn perturb(g: &Global, kappas: &[f64], trials: u64, dim: usize) -> Result<bool> {
    let mut all = Vec::new();
    let mut batches = Vec::new();
    let mut ok = true;
    for (i, &kappa) in kappas.iter().enumerate() {
        let eps = g.eps.unwrap_or(1.0 / (2.0 * kappa * kappa));
        let reports = check_perturbation_lemma(kappa, eps, trials, derive_seed(g.seed, 100 + i as u64), dim)?;
        let failures = reports.iter().filter(|r| !r.passed()).count();
        ok &= failures == 0;
        batches.push(json!({ "kappa": kappa, "eps": eps, "trials": trials, "failures": failures }));
        all.extend(reports);
    }
    if g.format == Format::Csv {
        emit(g, &perturbation_csv(&all))?;
        return Ok(ok);
    }
    let chain = PermutationChain::random(g.n, g.q, g.seed);
    let a = SparseOracleView::new(&chain).materialize_dense(g.dense_cap)?;
    let spectral = spectral_check(&a, g.q, DEFAULT_DELTA, g.dense_cap)?;
    let pipeline = if spectral.inv_norm >= 4.0 {
        let r = check_pipeline_bound(&a, spectral.inv_norm, derive_seed(g.seed, 2), 2 * g.dense_cap)?;
        ok &= r.passed();
        serde_json::to_value(&r)?
    } else {
        json!({ "skipped": "inverse norm below 4; raise --q" })
    };
    let report = json!({ "passed": ok, "batches": batches, "pipeline": pipeline });
    emit(g, &to_canonical_value(&report))?;
    Ok(ok)
}

fn bench(g: &Global, sizes: &[String]) -> Result<()> {
    let grid: Vec<(usize, usize)> = if sizes.is_empty() {
        vec![(2, 1), (4, 2), (8, 4), (16, 6)]
    } else {
        sizes.iter().map(|s| parse_size(s)).collect::<Result<_>>()?
    };
    let mut out = String::from("N,q,dim,phase,ms\n");
    for (n, q) in grid {
        let chain = PermutationChain::random(n, q, g.seed);
        let dim = Dims::of(&chain).dim();
        let mut row = |phase: &str, t: Instant| {
            let _ = writeln!(out, "{n},{q},{dim},{phase},{:.4}", t.elapsed().as_secs_f64() * 1e3);
        };
        let t = Instant::now();
        let a = SparseOracleView::new(&chain).materialize_dense(g.dense_cap)?;
        row("dense", t);
        let t = Instant::now();
        spectral_check(&a, q, DEFAULT_DELTA, g.dense_cap)?;
        row("spectral", t);
        let t = Instant::now();
        solve_direct(&a, Dims::of(&chain))?;
        row("direct", t);
        let t = Instant::now();
        solve_neumann(&chain, &mut QueryLedger::new(), g.eps.unwrap_or(1e-3))?;
        row("neumann", t);
        let t = Instant::now();
        walk_p(&chain, &mut QueryLedger::new(), 3 * q)?;
        row("p_cycle", t);
    }
    emit(g, &out)
}

/// Entry point for the binary.
pub fn main_with_args<I, T>(args: I) -> ExitCode
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match execute(&cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}
