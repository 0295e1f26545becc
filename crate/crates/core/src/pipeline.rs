//! End-to-end reduction runs, chain persistence and the full verification sweep.

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;
use std::time::Instant;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::analysis::{
    closed_form_inverse, exact_solution_state, kappa_formula, spectral_check, success_probability,
    success_probability_floor, xj_table, DEFAULT_DELTA,
};
use crate::blockenc::{
    build_block_encoding, check_pipeline_bound, check_perturbation_lemma, pipeline_eps, BlockEncodingAdapter,
    BlockEncodingReport, BlockMode, PerturbationReport, BLOCK_COST, UNITARY_TOL,
};
use crate::encoding::{apply_p_step, p_step, BasisIndex, Dims, Direction, SparseOracleView, DEFAULT_DENSE_CAP};
use crate::error::{Error, Result};
use crate::json::to_canonical;
use crate::ledger::{LedgerSummary, OracleKind, QueryLedger};
use crate::permchain::PermutationChain;
use crate::rng::derive_seed;
use crate::solver::{
    extract_answer, neumann_depth_ceiling, solve_direct, solve_neumann, Sampler, SolveReport, DIRECT_RESIDUAL_TOL,
};

pub const CHAIN_FORMAT: &str = "permchain-v1";

/// Repetitions needed for a 99% hit rate at the 0.015 per-shot floor: `⌈ln 100 / 0.015⌉`.
pub const DEFAULT_REPETITIONS: u64 = 308;

/// Stream label for measurement shots, kept apart from the chain's stream.
const SAMPLE_STREAM: u64 = 1;
/// Stream label for block-encoding perturbations.
const PERTURB_STREAM: u64 = 2;

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ChainFile {
    format: String,
    #[serde(rename = "N")]
    n: usize,
    q: usize,
    perms: Vec<Vec<usize>>,
}

/// Canonical `permchain-v1` JSON (sorted keys, no whitespace).
pub fn chain_to_json(chain: &PermutationChain) -> String {
    let file = ChainFile {
        format: CHAIN_FORMAT.into(),
        n: chain.n(),
        q: chain.q(),
        perms: chain.tables(),
    };
    to_canonical(&file).expect("chain file serializes")
}

pub fn chain_from_json(path: &Path, text: &str) -> Result<PermutationChain> {
    let file: ChainFile = serde_json::from_str(text).map_err(|e| Error::Schema {
        path: path.to_path_buf(),
        msg: e.to_string(),
    })?;
    if file.format != CHAIN_FORMAT {
        return Err(Error::Schema {
            path: path.to_path_buf(),
            msg: format!("field `format`: expected \"{CHAIN_FORMAT}\", found {:?}", file.format),
        });
    }
    PermutationChain::from_arrays(file.n, file.q, &file.perms)
}

pub fn store_chain(chain: &PermutationChain, path: &Path) -> Result<()> {
    fs::write(path, chain_to_json(chain))?;
    Ok(())
}

pub fn load_chain(path: &Path) -> Result<PermutationChain> {
    chain_from_json(path, &fs::read_to_string(path)?)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum SolverKind {
    Direct,
    Neumann { eps: f64 },
    /// Solve the half-scale matrix behind a block-encoding perturbed by `eps`.
    Blockenc { eps: f64 },
}

#[derive(Clone, Debug, PartialEq)]
pub struct ReductionConfig {
    pub solver: SolverKind,
    pub max_repetitions: u64,
    pub shots_per_repetition: u64,
    pub dense_cap: usize,
    pub record_timings: bool,
}

impl Default for ReductionConfig {
    fn default() -> Self {
        Self {
            solver: SolverKind::Direct,
            max_repetitions: DEFAULT_REPETITIONS,
            shots_per_repetition: 1,
            dense_cap: DEFAULT_DENSE_CAP,
            record_timings: true,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReductionReport {
    #[serde(rename = "N")]
    pub n: usize,
    pub q: usize,
    pub seed: u64,
    pub solver: SolverKind,
    pub answer: Option<usize>,
    /// `Π_q(0)` computed directly from the chain.
    pub truth: usize,
    pub success: bool,
    pub repetitions_used: u64,
    pub shots_used: u64,
    /// Exact probability that one shot of the prepared state hits the answer window.
    pub window_mass: f64,
    pub truncation_k: Option<usize>,
    pub ledger: LedgerSummary,
    pub block_encoding: Option<BlockEncodingReport>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub timings_ms: Option<BTreeMap<String, f64>>,
}

/// Draws a chain from `seed` and runs the reduction on it.
pub fn run_reduction(n: usize, q: usize, seed: u64, config: &ReductionConfig) -> Result<ReductionReport> {
    if n == 0 || q == 0 {
        return Err(Error::BadParameters(format!("need N >= 1 and q >= 1, got N = {n}, q = {q}")));
    }
    run_reduction_on(&PermutationChain::random(n, q, seed), seed, config)
}

/// Solves the chain's linear system, then measures until an outcome lands in
/// the answer window or the repetition budget runs out.
pub fn run_reduction_on(chain: &PermutationChain, seed: u64, config: &ReductionConfig) -> Result<ReductionReport> {
    if config.max_repetitions == 0 || config.shots_per_repetition == 0 {
        return Err(Error::BadParameters("repetitions and shots must be >= 1".into()));
    }
    let dims = Dims::of(chain);
    let view = SparseOracleView::new(chain);
    let mut ledger = QueryLedger::new();
    let mut timings = BTreeMap::new();
    let mut block_encoding = None;

    let start = Instant::now();
    let solved: SolveReport = match config.solver {
        SolverKind::Direct => {
            let a = view.materialize_dense(config.dense_cap)?;
            timings.insert("build".to_string(), ms(start));
            solve_direct(&a, dims)?
        }
        SolverKind::Neumann { eps } => solve_neumann(chain, &mut ledger, eps)?,
        SolverKind::Blockenc { eps } => {
            dims.check_cap(config.dense_cap / 2)?;
            let a = view.materialize_via_oracles(&mut ledger, config.dense_cap)?;
            let mode = BlockMode::Perturbed {
                eps,
                seed: derive_seed(seed, PERTURB_STREAM),
            };
            let (u, report) = build_block_encoding(&a, mode, config.dense_cap)?;
            block_encoding = Some(report);
            timings.insert("build".to_string(), ms(start));
            let n = dims.dim();
            let a_half = u.view((0, 0), (n, n)).into_owned();
            solve_direct(&a_half, dims)?
        }
    };
    timings.insert("solve".to_string(), ms(start));

    let sample_start = Instant::now();
    let sampler = Sampler::new(&solved.state);
    let sample_seed = derive_seed(seed, SAMPLE_STREAM);
    let shots = config.shots_per_repetition;
    let mut answer = None;
    let mut repetitions_used = 0;
    for rep in 0..config.max_repetitions {
        repetitions_used = rep + 1;
        let outcomes = sampler.shots(sample_seed, rep * shots..(rep + 1) * shots);
        answer = extract_answer(&outcomes, chain.q());
        if answer.is_some() {
            break;
        }
    }
    timings.insert("sample".to_string(), ms(sample_start));

    let truth = chain.answer();
    Ok(ReductionReport {
        n: chain.n(),
        q: chain.q(),
        seed,
        solver: config.solver,
        answer,
        truth,
        success: answer == Some(truth),
        repetitions_used,
        shots_used: repetitions_used * shots,
        window_mass: solved.state.window_mass(),
        truncation_k: solved.truncation_k,
        ledger: ledger.summary(),
        block_encoding,
        timings_ms: config.record_timings.then_some(timings),
    })
}

fn ms(since: Instant) -> f64 {
    since.elapsed().as_secs_f64() * 1e3
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Level {
    Fast,
    Full,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
    Skipped,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CheckResult {
    pub status: Status,
    pub detail: Value,
}

impl CheckResult {
    fn from_bool(ok: bool, detail: Value) -> Self {
        Self {
            status: if ok { Status::Pass } else { Status::Fail },
            detail,
        }
    }

    fn skipped(reason: &str) -> Self {
        Self {
            status: Status::Skipped,
            detail: json!({ "reason": reason }),
        }
    }
}

/// Deliberate corruption for exercising the failure path.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Fault {
    /// Overwrite one entry of the dense matrix before any check runs.
    CorruptEntry { row: usize, col: usize, value: f64 },
}

#[derive(Clone, Debug, PartialEq)]
pub struct VerifyOptions {
    pub dense_cap: usize,
    pub delta: f64,
    pub fault: Option<Fault>,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        Self {
            dense_cap: DEFAULT_DENSE_CAP,
            delta: DEFAULT_DELTA,
            fault: None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VerifyReport {
    #[serde(rename = "N")]
    pub n: usize,
    pub q: usize,
    pub seed: u64,
    pub level: Level,
    pub passed: bool,
    pub checks: BTreeMap<String, CheckResult>,
}

/// Runs every structural, spectral, probabilistic and cost check on one random instance.
pub fn verify_all(n: usize, q: usize, seed: u64, level: Level, options: &VerifyOptions) -> Result<VerifyReport> {
    if n == 0 || q == 0 {
        return Err(Error::BadParameters(format!("need N >= 1 and q >= 1, got N = {n}, q = {q}")));
    }
    let chain = PermutationChain::random(n, q, seed);
    let dims = Dims::of(&chain);
    let view = SparseOracleView::new(&chain);
    let mut a = view.materialize_dense(options.dense_cap)?;
    if let Some(Fault::CorruptEntry { row, col, value }) = options.fault {
        a[(row % dims.dim(), col % dims.dim())] = value;
    }

    let mut checks = BTreeMap::new();
    checks.insert("sparsity".into(), check_sparsity(&a));
    checks.insert("symmetry".into(), check_symmetry(&a));
    checks.insert("p_order".into(), check_p_order(&chain));
    checks.insert("oracle_equivalence".into(), check_oracle_equivalence(&view, &a, options.dense_cap)?);
    checks.insert("oracle_cost".into(), check_oracle_cost(&view)?);
    checks.insert("solution_state".into(), check_solution_state(&chain, &a, level, options.dense_cap)?);
    checks.insert("window_probability".into(), check_window_probability(&chain));
    checks.insert("answer_correctness".into(), check_answer_correctness(&chain)?);
    checks.insert("neumann".into(), check_neumann(&chain)?);

    let trials = match level {
        Level::Fast => 20,
        Level::Full => 200,
    };
    checks.insert("perturbation_bounds".into(), check_perturbation(seed, trials)?);

    match level {
        Level::Fast => {
            for key in ["spectral", "block_encoding", "pipeline_bound"] {
                checks.insert(key.into(), CheckResult::skipped("full level only"));
            }
        }
        Level::Full => {
            let spectral = check_spectral(&a, q, options)?;
            checks.insert("spectral".into(), spectral.0);
            checks.insert("block_encoding".into(), check_block_encoding(&a, seed, options.dense_cap)?);
            let pipeline = match spectral.1 {
                Some(kappa) if kappa >= 4.0 => {
                    let r = check_pipeline_bound(&a, kappa, derive_seed(seed, PERTURB_STREAM), 2 * options.dense_cap)?;
                    CheckResult::from_bool(r.passed(), serde_json::to_value(&r)?)
                }
                Some(_) => CheckResult::skipped("inverse norm below 4"),
                None => CheckResult::skipped("spectral check failed"),
            };
            checks.insert("pipeline_bound".into(), pipeline);
        }
    }

    let passed = checks.values().all(|c| c.status != Status::Fail);
    Ok(VerifyReport {
        n,
        q,
        seed,
        level,
        passed,
        checks,
    })
}

fn check_sparsity(a: &DMatrix<f64>) -> CheckResult {
    let bad_rows = (0..a.nrows()).filter(|&r| a.row(r).iter().filter(|v| **v != 0.0).count() != 2).count();
    let bad_cols = (0..a.ncols()).filter(|&c| a.column(c).iter().filter(|v| **v != 0.0).count() != 2).count();
    CheckResult::from_bool(
        bad_rows == 0 && bad_cols == 0,
        json!({ "dim": a.nrows(), "rows_not_2_sparse": bad_rows, "cols_not_2_sparse": bad_cols }),
    )
}

fn check_symmetry(a: &DMatrix<f64>) -> CheckResult {
    let mismatches = (0..a.nrows())
        .flat_map(|r| (0..r).map(move |c| (r, c)))
        .filter(|&(r, c)| a[(r, c)].to_bits() != a[(c, r)].to_bits())
        .count();
    CheckResult::from_bool(mismatches == 0, json!({ "asymmetric_pairs": mismatches }))
}

fn check_p_order(chain: &PermutationChain) -> CheckResult {
    let dims = Dims::of(chain);
    let half = dims.half();
    let index = |j: usize, x: usize| j * dims.n + x;
    let mut image_hit = vec![false; half];
    let mut not_identity = 0;
    let mut early_return = 0;
    for j in 0..dims.steps() {
        for x in 0..dims.n {
            let (nj, nx) = p_step(chain, j, x, Direction::Forward);
            image_hit[index(nj, nx)] = true;
            let (mut cj, mut cx) = (j, x);
            for step in 1..=dims.steps() {
                (cj, cx) = p_step(chain, cj, cx, Direction::Forward);
                if (cj, cx) == (j, x) && step < dims.steps() {
                    early_return += 1;
                }
            }
            if (cj, cx) != (j, x) {
                not_identity += 1;
            }
        }
    }
    let bijective = image_hit.iter().all(|&h| h);
    CheckResult::from_bool(
        bijective && not_identity == 0 && early_return == 0,
        json!({
            "bijective": bijective,
            "points_not_fixed_by_p_3q": not_identity,
            "cycles_shorter_than_3q": early_return,
        }),
    )
}

fn check_oracle_equivalence(view: &SparseOracleView<'_>, a: &DMatrix<f64>, cap: usize) -> Result<CheckResult> {
    let mut ledger = QueryLedger::new();
    let via = view.materialize_via_oracles(&mut ledger, cap)?;
    let equal = via == *a;
    let summary = ledger.summary();
    Ok(CheckResult::from_bool(
        equal,
        json!({ "matches_dense": equal, "ledger": summary }),
    ))
}

/// Expected `PI` charge of a `P` step out of `j` in the given direction.
fn step_charge(q: usize, j: usize, direction: Direction) -> u64 {
    let from = match direction {
        Direction::Forward => j,
        Direction::Inverse => (j + 3 * q - 1) % (3 * q),
    };
    u64::from(!(q..2 * q).contains(&from))
}

fn check_oracle_cost(view: &SparseOracleView<'_>) -> Result<CheckResult> {
    let dims = view.dims();
    let mut calls = 0u64;
    let mut mismatched = 0u64;
    let mut max_charge = 0u64;
    let mut row_reads_over_budget = 0u64;
    for row in 0..dims.dim() {
        let r = BasisIndex::unflatten(dims, row);
        let direction = if r.b == 0 { Direction::Inverse } else { Direction::Forward };
        let expected_step = step_charge(dims.q, r.j, direction);
        let mut row_ledger = QueryLedger::new();
        for k in 1..=2 {
            let mut ledger = QueryLedger::new();
            let col = view.oracle_sparse_index(&mut ledger, row, k)?;
            row_ledger.append(&ledger);
            let charged = ledger.counts().total;
            calls += 1;
            max_charge = max_charge.max(charged);
            mismatched += u64::from(charged != expected_step);

            let mut ledger = QueryLedger::new();
            view.oracle_entry(&mut ledger, row, col)?;
            row_ledger.append(&ledger);
            let charged = ledger.counts().total;
            let c = BasisIndex::unflatten(dims, col);
            let expected = if (c.j, c.x) == (r.j, r.x) { 0 } else { expected_step };
            calls += 1;
            max_charge = max_charge.max(charged);
            mismatched += u64::from(charged != expected);
        }
        row_reads_over_budget += u64::from(row_ledger.counts().total > BLOCK_COST.pi_calls);
    }

    let adapter = BlockEncodingAdapter::new(DMatrix::identity(2, 2));
    let mut ledger = QueryLedger::new();
    adapter.charge(&mut ledger);
    let summary = ledger.summary();
    let adapter_ok = summary.pi_equivalents == BLOCK_COST.pi_calls
        && summary.kind(OracleKind::SparseS).total == BLOCK_COST.os_calls
        && summary.kind(OracleKind::SparseA).total == BLOCK_COST.oa_calls;

    Ok(CheckResult::from_bool(
        mismatched == 0 && max_charge <= 1 && row_reads_over_budget == 0 && adapter_ok,
        json!({
            "oracle_calls": calls,
            "max_pi_per_call": max_charge,
            "calls_with_unexpected_charge": mismatched,
            "row_reads_over_budget": row_reads_over_budget,
            "adapter_pi_equivalents": summary.pi_equivalents,
        }),
    ))
}

fn check_solution_state(chain: &PermutationChain, a: &DMatrix<f64>, level: Level, cap: usize) -> Result<CheckResult> {
    let dims = Dims::of(chain);
    let (_, exact) = exact_solution_state(chain);
    let direct = match solve_direct(a, dims) {
        Ok(r) => r,
        Err(Error::SingularMatrix(p)) => {
            return Ok(CheckResult::from_bool(false, json!({ "singular_pivot": p })));
        }
        Err(e) => return Err(e),
    };
    let distance = direct.state.distance(&exact);
    let b_zero_mass = exact.mass_where(|i| i.b == 0);
    let mut ok = distance <= 1e-10 && direct.residual <= DIRECT_RESIDUAL_TOL && b_zero_mass == 0.0;
    let mut detail = json!({
        "distance_to_closed_form": distance,
        "residual": direct.residual,
        "mass_on_b0": b_zero_mass,
    });
    if level == Level::Full {
        let inv = closed_form_inverse(chain, cap)?;
        let err = (a * inv - DMatrix::identity(dims.dim(), dims.dim())).amax();
        ok &= err <= 1e-10;
        detail["closed_form_inverse_error"] = json!(err);
    }
    Ok(CheckResult::from_bool(ok, detail))
}

fn check_window_probability(chain: &PermutationChain) -> CheckResult {
    let (_, exact) = exact_solution_state(chain);
    let mass = exact.window_mass();
    let formula = success_probability(chain.q());
    let floor = success_probability_floor();
    let gap = (mass - formula).abs();
    CheckResult::from_bool(
        gap <= 1e-12 && formula >= floor - 1e-15 && formula > 0.015,
        json!({ "window_mass": mass, "formula": formula, "floor": floor, "gap": gap }),
    )
}

fn check_answer_correctness(chain: &PermutationChain) -> Result<CheckResult> {
    let q = chain.q();
    let truth = chain.answer();
    let (_, exact) = exact_solution_state(chain);
    let dims = Dims::of(chain);
    let mut wrong = 0;
    let mut in_window = 0;
    for (i, _) in exact.support() {
        let b = BasisIndex::unflatten(dims, i);
        if b.j > q && b.j <= 2 * q {
            in_window += 1;
            wrong += usize::from(b.x != truth);
        }
    }
    let xs = xj_table(chain);
    let mut table_mismatch = 0;
    for (j, &x) in xs.iter().enumerate() {
        let expected = if j <= q {
            chain.prefix_compose(j)?
        } else if j <= 2 * q {
            truth
        } else {
            chain.prefix_compose(3 * q - j)?
        };
        table_mismatch += usize::from(x != expected);
    }
    Ok(CheckResult::from_bool(
        wrong == 0 && in_window == q && table_mismatch == 0,
        json!({
            "truth": truth,
            "window_support_points": in_window,
            "wrong_answers": wrong,
            "xj_table_mismatches": table_mismatch,
        }),
    ))
}

fn check_neumann(chain: &PermutationChain) -> Result<CheckResult> {
    let (_, exact) = exact_solution_state(chain);
    let q = chain.q();
    let mut runs = Vec::new();
    let mut ok = true;
    for eps in [1e-1, 1e-2, 1e-3] {
        let mut ledger = QueryLedger::new();
        let report = solve_neumann(chain, &mut ledger, eps)?;
        let err = report.state.distance(&exact);
        let d = report.ledger_delta.all;
        let ceiling = neumann_depth_ceiling(q, eps) as u64;
        let steps = report.p_steps.unwrap_or(0) as u64;
        let pass = err <= eps && d.width <= 1 && d.depth <= steps && d.total <= steps && d.depth <= ceiling;
        ok &= pass;
        runs.push(json!({
            "eps": eps,
            "error": err,
            "terms": report.truncation_k,
            "depth": d.depth,
            "depth_ceiling": ceiling,
            "pass": pass,
        }));
    }
    Ok(CheckResult::from_bool(ok, json!({ "runs": runs })))
}

fn check_perturbation(seed: u64, trials: u64) -> Result<CheckResult> {
    let mut per_kappa = Vec::new();
    let mut ok = true;
    for (i, kappa) in [2.0f64, 8.0, 32.0].into_iter().enumerate() {
        let eps = 1.0 / (2.0 * kappa * kappa);
        let reports = check_perturbation_lemma(kappa, eps, trials, derive_seed(seed, 100 + i as u64), 8)?;
        let failures = reports.iter().filter(|r| !r.passed()).count();
        ok &= failures == 0;
        let worst = |f: fn(&PerturbationReport) -> f64| reports.iter().map(f).fold(0.0, f64::max);
        per_kappa.push(json!({
            "kappa": kappa,
            "eps": eps,
            "trials": trials,
            "failures": failures,
            "max_inv_ratio": worst(|r| r.inv_gap / r.bound_inv),
            "max_sol_ratio": worst(|r| r.sol_gap / r.bound_sol),
        }));
    }
    Ok(CheckResult::from_bool(ok, json!({ "batches": per_kappa })))
}

fn check_spectral(a: &DMatrix<f64>, q: usize, options: &VerifyOptions) -> Result<(CheckResult, Option<f64>)> {
    let report = match spectral_check(a, q, options.delta, options.dense_cap) {
        Ok(r) => r,
        Err(Error::SingularMatrix(s)) => {
            return Ok((CheckResult::from_bool(false, json!({ "sigma_min": s })), None));
        }
        Err(e) => return Err(e),
    };
    let tight = (report.inv_norm - kappa_formula(q)).abs() <= 1e-9;
    let unit_iff_even = ((report.op_norm - 1.0).abs() <= 1e-9) == (q % 2 == 0);
    let mut detail = serde_json::to_value(&report)?;
    detail["inv_norm_tight"] = json!(tight);
    detail["op_norm_unit_iff_q_even"] = json!(unit_iff_even);
    let ok = report.op_norm_ok && report.inv_norm_ok && tight && unit_iff_even;
    Ok((CheckResult::from_bool(ok, detail), Some(report.inv_norm)))
}

fn check_block_encoding(a: &DMatrix<f64>, seed: u64, cap: usize) -> Result<CheckResult> {
    let cap = 2 * cap;
    let (_, exact) = match build_block_encoding(a, BlockMode::Exact, cap) {
        Ok(r) => r,
        Err(Error::NormTooLarge(norm)) | Err(Error::NotUnitary(norm)) => {
            return Ok(CheckResult::from_bool(false, json!({ "error_value": norm })));
        }
        Err(e) => return Err(e),
    };
    let eps = pipeline_eps(4.0);
    let mode = BlockMode::Perturbed {
        eps,
        seed: derive_seed(seed, PERTURB_STREAM),
    };
    let (_, perturbed) = build_block_encoding(a, mode, cap)?;
    let ok = exact.unitarity_error <= UNITARY_TOL
        && exact.defect <= UNITARY_TOL
        && perturbed.unitarity_error <= UNITARY_TOL
        && (perturbed.defect - eps).abs() <= 1e-10;
    Ok(CheckResult::from_bool(ok, json!({ "exact": exact, "perturbed": perturbed })))
}

/// Charges a forward `P` walk of `steps` steps, one layer per step. Used by benches.
pub fn walk_p(chain: &PermutationChain, ledger: &mut QueryLedger, steps: usize) -> Result<(usize, usize)> {
    let (mut j, mut x) = (0, 0);
    for _ in 0..steps {
        ledger.begin_layer();
        (j, x) = apply_p_step(chain, ledger, j, x, Direction::Forward)?;
    }
    Ok((j, x))
}
