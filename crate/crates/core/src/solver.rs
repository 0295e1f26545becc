//! Solvers for `A v = |0̄⟩`, measurement sampling and answer extraction.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::analysis::{closed_form_norm, StateVector};
use crate::encoding::{apply_p_step, BasisIndex, Dims, Direction, SparseOracleView};
use crate::error::{Error, Result};
use crate::ledger::{LedgerSummary, QueryLedger};
use crate::permchain::PermutationChain;
use crate::rng::{unit_f64, SplitMix64};

/// Residual contract of [`solve_direct`].
pub const DIRECT_RESIDUAL_TOL: f64 = 1e-10;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SolveReport {
    pub state: StateVector,
    /// `‖A v − |0̄⟩‖ / ‖v‖` for the unnormalized solution `v`.
    pub residual: f64,
    /// Number of series terms kept by the Neumann solver.
    pub truncation_k: Option<usize>,
    /// Sequential `P` applications performed by the Neumann solver.
    pub p_steps: Option<usize>,
    pub ledger_delta: LedgerSummary,
}

fn unit_rhs(dim: usize) -> DVector<f64> {
    let mut e0 = DVector::zeros(dim);
    e0[0] = 1.0;
    e0
}

fn relative_residual(a: &DMatrix<f64>, v: &DVector<f64>) -> f64 {
    (a * v - unit_rhs(a.nrows())).norm() / v.norm()
}

/// Dense LU solve of `A v = |0̄⟩`. Charges nothing.
pub fn solve_direct(a: &DMatrix<f64>, dims: Dims) -> Result<SolveReport> {
    if a.nrows() != dims.dim() || a.ncols() != dims.dim() {
        return Err(Error::BadShape(format!(
            "matrix is {}x{}, expected side {}",
            a.nrows(),
            a.ncols(),
            dims.dim()
        )));
    }
    let lu = a.clone().lu();
    let u = lu.u();
    let scale = a.amax();
    let min_pivot = u.diagonal().iter().fold(f64::INFINITY, |m, p| m.min(p.abs()));
    if !(min_pivot > 1e-14 * scale) {
        return Err(Error::SingularMatrix(min_pivot));
    }
    let v = lu
        .solve(&unit_rhs(dims.dim()))
        .ok_or(Error::SingularMatrix(0.0))?;
    let residual = relative_residual(a, &v);
    Ok(SolveReport {
        state: StateVector::new(dims, v.as_slice().to_vec()).normalize(),
        residual,
        truncation_k: None,
        p_steps: None,
        ledger_delta: LedgerSummary::default(),
    })
}

/// Number of series terms the Neumann solver keeps for accuracy `eps`.
///
/// The smallest `K >= 1` with `(1 + e^{−1/q}) e^{−K/q} / ((1 − e^{−1/q}) ‖A⁻¹|0̄⟩‖) <= eps/2`.
/// The left side bounds the relative norm of the dropped tail, and a relative
/// perturbation `t` of a vector moves its normalization by at most `2t`.
pub fn neumann_terms(q: usize, eps: f64) -> usize {
    let decay = (-1.0 / q as f64).exp();
    let lead = (1.0 + decay) / ((1.0 - decay) * closed_form_norm(q));
    let tail = |k: usize| lead * (-(k as f64) / q as f64).exp();
    let estimate = (q as f64 * (2.0 * lead / eps).ln()).ceil().max(1.0) as usize;
    let mut k = estimate.saturating_sub(2).max(1);
    while tail(k) > eps / 2.0 {
        k += 1;
    }
    k
}

/// `⌈3q·ln(4 / (eps (1 − e^{−1/q})))⌉`, the cost ceiling the Neumann solver stays under.
pub fn neumann_depth_ceiling(q: usize, eps: f64) -> usize {
    let decay = (-1.0 / q as f64).exp();
    (3.0 * q as f64 * (4.0 / (eps * (1.0 - decay))).ln()).ceil() as usize
}

/// Truncated Neumann series for `(I − e^{−1/q}P)⁻¹|0, 0⟩`, walked through `O_pi`.
///
/// Each `P` step opens its own ledger layer, so the width is 1 and the depth
/// is the number of steps that needed a query.
pub fn solve_neumann(chain: &PermutationChain, ledger: &mut QueryLedger, eps: f64) -> Result<SolveReport> {
    if !(eps > 0.0 && eps < 1.0) {
        return Err(Error::BadEps(eps));
    }
    let dims = Dims::of(chain);
    let q = chain.q() as f64;
    let lead = 1.0 + (-1.0 / q).exp();
    let terms = neumann_terms(chain.q(), eps);
    let mark = ledger.mark();

    let mut amplitudes = vec![0.0; dims.dim()];
    let (mut j, mut x) = (0, 0);
    for k in 0..terms {
        amplitudes[BasisIndex::new(1, j, x).flatten(dims)] += lead * (-(k as f64) / q).exp();
        if k + 1 < terms {
            ledger.begin_layer();
            (j, x) = apply_p_step(chain, ledger, j, x, Direction::Forward)?;
        }
    }

    let view = SparseOracleView::new(chain);
    let av = view.apply(&amplitudes);
    let norm = amplitudes.iter().map(|a| a * a).sum::<f64>().sqrt();
    let residual = av
        .iter()
        .enumerate()
        .map(|(i, r)| {
            let d = r - if i == 0 { 1.0 } else { 0.0 };
            d * d
        })
        .sum::<f64>()
        .sqrt()
        / norm;

    Ok(SolveReport {
        state: StateVector::new(dims, amplitudes).normalize(),
        residual,
        truncation_k: Some(terms),
        p_steps: Some(terms - 1),
        ledger_delta: ledger.since(mark).summary(),
    })
}

/// Inverse-CDF sampler over the support of a state.
#[derive(Clone, Debug)]
pub struct Sampler {
    dims: Dims,
    indices: Vec<usize>,
    cdf: Vec<f64>,
}

impl Sampler {
    pub fn new(state: &StateVector) -> Self {
        let mut indices = Vec::new();
        let mut cdf = Vec::new();
        let mut acc = 0.0;
        for (i, a) in state.support() {
            acc += a * a;
            indices.push(i);
            cdf.push(acc);
        }
        Self {
            dims: state.dims(),
            indices,
            cdf,
        }
    }

    /// Outcome of shot `shot`, a function of `(seed, shot)` only.
    pub fn shot(&self, seed: u64, shot: u64) -> BasisIndex {
        let total = *self.cdf.last().expect("state has empty support");
        let u = unit_f64(SplitMix64::at(seed, shot)) * total;
        let k = self.cdf.partition_point(|&c| c <= u).min(self.cdf.len() - 1);
        BasisIndex::unflatten(self.dims, self.indices[k])
    }

    pub fn shots(&self, seed: u64, range: std::ops::Range<u64>) -> Vec<BasisIndex> {
        range.map(|s| self.shot(seed, s)).collect()
    }
}

/// `shots` i.i.d. computational-basis measurements of `state`.
pub fn sample_outcomes(state: &StateVector, shots: u64, seed: u64) -> Vec<BasisIndex> {
    Sampler::new(state).shots(seed, 0..shots)
}

/// Same output as [`sample_outcomes`], computed on `workers` threads.
pub fn sample_outcomes_sharded(state: &StateVector, shots: u64, seed: u64, workers: usize) -> Vec<BasisIndex> {
    let sampler = Sampler::new(state);
    let workers = workers.max(1) as u64;
    let chunk = shots.div_ceil(workers);
    std::thread::scope(|scope| {
        let handles: Vec<_> = (0..workers)
            .map(|w| {
                let sampler = &sampler;
                let start = (w * chunk).min(shots);
                let end = ((w + 1) * chunk).min(shots);
                scope.spawn(move || sampler.shots(seed, start..end))
            })
            .collect();
        handles
            .into_iter()
            .flat_map(|h| h.join().expect("sampling worker panicked"))
            .collect()
    })
}

/// `x` of the first outcome in the window `q < j <= 2q`.
pub fn extract_answer(outcomes: &[BasisIndex], q: usize) -> Option<usize> {
    outcomes.iter().find(|o| o.j > q && o.j <= 2 * q).map(|o| o.x)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analysis::exact_solution_state;
    use crate::encoding::DEFAULT_DENSE_CAP;

    fn swap_chain() -> PermutationChain {
        PermutationChain::from_arrays(2, 1, &[vec![1, 0]]).unwrap()
    }

    #[test]
    fn direct_matches_closed_form() {
        let chain = swap_chain();
        let a = SparseOracleView::new(&chain).materialize_dense(DEFAULT_DENSE_CAP).unwrap();
        let report = solve_direct(&a, Dims::of(&chain)).unwrap();
        assert!(report.residual <= DIRECT_RESIDUAL_TOL);
        let (_, exact) = exact_solution_state(&chain);
        assert!(report.state.distance(&exact) <= 1e-10);

        let scaled = solve_direct(&(&a * 2.0), Dims::of(&chain)).unwrap();
        assert_eq!(scaled.state, report.state);
    }

    #[test]
    fn direct_identity_support() {
        let chain = PermutationChain::identity(1, 1);
        let a = SparseOracleView::new(&chain).materialize_dense(DEFAULT_DENSE_CAP).unwrap();
        let state = solve_direct(&a, Dims::of(&chain)).unwrap().state;
        let support: Vec<usize> = state
            .support()
            .iter()
            .filter(|(_, a)| a.abs() > 1e-12)
            .map(|(i, _)| *i)
            .collect();
        assert_eq!(support, vec![3, 4, 5]);
        assert!((state.probability(BasisIndex::new(1, 0, 0)) - 0.866813).abs() < 1e-6);
        assert!((state.probability(BasisIndex::new(1, 1, 0)) - 0.117310).abs() < 1e-6);
        assert!((state.probability(BasisIndex::new(1, 2, 0)) - 0.015876).abs() < 1e-6);
    }

    #[test]
    fn direct_rejects_singular_and_bad_shape() {
        let dims = Dims::new(1, 1);
        assert!(matches!(solve_direct(&DMatrix::zeros(6, 6), dims), Err(Error::SingularMatrix(_))));
        assert!(matches!(solve_direct(&DMatrix::identity(5, 5), dims), Err(Error::BadShape(_))));
    }

    #[test]
    fn neumann_swap_eps_1e3() {
        let chain = swap_chain();
        let mut ledger = QueryLedger::new();
        let report = solve_neumann(&chain, &mut ledger, 1e-3).unwrap();
        let k = report.truncation_k.unwrap();
        assert_eq!(k, 8);
        assert!(k <= 12);
        let (_, exact) = exact_solution_state(&chain);
        assert!(report.state.distance(&exact) <= 1e-3);
        let d = report.ledger_delta.all;
        assert_eq!(d.width, 1);
        assert!(d.depth <= (k - 1) as u64);
        assert_eq!(d.total, d.depth);
    }

    #[test]
    fn neumann_coarse_is_spike() {
        let chain = swap_chain();
        let mut ledger = QueryLedger::new();
        let report = solve_neumann(&chain, &mut ledger, 0.5).unwrap();
        assert!(report.truncation_k.unwrap() >= 1);
        assert!(report.state.probability(BasisIndex::new(1, 0, 0)) > 0.8);
    }

    #[test]
    fn neumann_bad_eps() {
        let chain = swap_chain();
        let mut ledger = QueryLedger::new();
        for eps in [0.0, 1.0, -0.1, f64::NAN] {
            assert!(matches!(solve_neumann(&chain, &mut ledger, eps), Err(Error::BadEps(_))));
        }
    }

    #[test]
    fn deterministic_state_sampling() {
        let dims = Dims::new(2, 1);
        let state = StateVector::from_support(dims, &[(7, 1.0)]).unwrap();
        let out = sample_outcomes(&state, 50, 3);
        assert!(out.iter().all(|o| *o == BasisIndex::new(1, 0, 1)));
    }

    #[test]
    fn sampling_is_reproducible_and_shard_independent() {
        let (_, state) = exact_solution_state(&PermutationChain::random(4, 2, 5));
        let a = sample_outcomes(&state, 1000, 77);
        assert_eq!(a, sample_outcomes(&state, 1000, 77));
        for workers in [1, 3, 8] {
            assert_eq!(a, sample_outcomes_sharded(&state, 1000, 77, workers));
        }
    }

    #[test]
    fn extraction() {
        let outs = [BasisIndex::new(1, 0, 0), BasisIndex::new(1, 2, 1)];
        assert_eq!(extract_answer(&outs, 1), Some(1));
        assert_eq!(extract_answer(&outs[..1], 1), None);
        assert_eq!(extract_answer(&[], 3), None);
    }

    #[test]
    fn depth_ceiling_dominates_terms() {
        for q in 1..=8 {
            for eps in [1e-1, 1e-2, 1e-3, 1e-6] {
                assert!(neumann_terms(q, eps) <= neumann_depth_ceiling(q, eps));
            }
        }
    }
}
