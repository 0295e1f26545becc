//! Block-encodings of the encoding matrix and perturbation checks.
//!
//! At desk scale the block-encoding is the explicit one-ancilla dilation
//!
//! ```text
//! U = [[ H,  S ],
//!      [ S, −H ]],   H = A/2,  S = √(I − H²)
//! ```
//!
//! which is a `(2, 1, 0)` block-encoding of `A` whenever `‖A‖ <= 1`. The
//! query cost of the sparse-access circuit it stands in for (two `O_s` and
//! two `O_A` calls per application, so four `O_pi` calls) is charged to the
//! ledger by [`BlockEncodingAdapter`].

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::encoding::SparseOracleView;
use crate::error::{Error, Result};
use crate::ledger::{OracleKind, QueryLedger};
use crate::linalg::{gaussian_symmetric, spectral_norm, sym_abs_extremes, sym_function, sym_spectral_norm, with_spectrum};
use crate::rng::{derive_seed, SplitMix64};

/// Tolerance for unitarity and exact-mode defects.
pub const UNITARY_TOL: f64 = 1e-10;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub enum BlockMode {
    Exact,
    /// Encode `A + E` for a random symmetric `E` with `‖E‖ = eps`.
    Perturbed { eps: f64, seed: u64 },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CostModel {
    pub os_calls: u64,
    pub oa_calls: u64,
    pub pi_calls: u64,
}

/// Queries per application of `U_A` for a 2-sparse matrix.
pub const BLOCK_COST: CostModel = CostModel {
    os_calls: 2,
    oa_calls: 2,
    pi_calls: 4,
};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BlockEncodingReport {
    pub alpha: f64,
    /// Ancilla qubits of the dilation actually built.
    pub ancillas: usize,
    /// Ancillas of the sparse-access circuit being modelled, `⌈log₂ dim⌉ + 3`.
    pub model_ancillas: usize,
    /// `‖α·⟨0|U|0⟩ − A‖`.
    pub defect: f64,
    /// Precision the construction promises.
    pub declared_eps: f64,
    pub unitarity_error: f64,
    pub cost_model: CostModel,
}

fn top_left(u: &DMatrix<f64>, n: usize) -> DMatrix<f64> {
    u.view((0, 0), (n, n)).into_owned()
}

/// Symmetric Gaussian direction scaled to spectral norm exactly `eps`.
pub fn random_perturbation(n: usize, eps: f64, seed: u64) -> DMatrix<f64> {
    if eps == 0.0 || n == 0 {
        return DMatrix::zeros(n, n);
    }
    let mut rng = SplitMix64::new(seed);
    let e = gaussian_symmetric(&mut rng, n);
    let norm = sym_spectral_norm(&e);
    e * (eps / norm)
}

/// One-ancilla dilation of `target / 2`.
fn dilate(target: &DMatrix<f64>) -> DMatrix<f64> {
    let n = target.nrows();
    let half = target * 0.5;
    let s = sym_function(&half, |l| (1.0 - l * l).clamp(0.0, 1.0).sqrt());
    let mut u = DMatrix::zeros(2 * n, 2 * n);
    u.view_mut((0, 0), (n, n)).copy_from(&half);
    u.view_mut((0, n), (n, n)).copy_from(&s);
    u.view_mut((n, 0), (n, n)).copy_from(&s);
    u.view_mut((n, n), (n, n)).copy_from(&(-half));
    u
}

pub fn unitarity_error(u: &DMatrix<f64>) -> f64 {
    let g = u * u.transpose() - DMatrix::identity(u.nrows(), u.nrows());
    sym_spectral_norm(&((&g + g.transpose()) * 0.5))
}

/// Builds `U` with `2·⟨0|U|0⟩ = A` (exact) or `= A + E` (perturbed).
pub fn build_block_encoding(
    a: &DMatrix<f64>,
    mode: BlockMode,
    cap: usize,
) -> Result<(DMatrix<f64>, BlockEncodingReport)> {
    let n = a.nrows();
    if n != a.ncols() {
        return Err(Error::BadShape(format!("matrix is {}x{}", n, a.ncols())));
    }
    if 2 * n > cap {
        return Err(Error::TooLarge { dim: 2 * n, cap });
    }
    let norm = sym_spectral_norm(a);
    if norm > 1.0 + 1e-9 {
        return Err(Error::NormTooLarge(norm));
    }
    let (target, declared_eps) = match mode {
        BlockMode::Exact => (a.clone(), UNITARY_TOL),
        BlockMode::Perturbed { eps, seed } => (a + random_perturbation(n, eps, seed), eps),
    };
    let u = dilate(&target);
    let defect = verify_block_encoding(&u, a, 2.0)?;
    let report = BlockEncodingReport {
        alpha: 2.0,
        ancillas: 1,
        model_ancillas: (n.max(1) as f64).log2().ceil() as usize + 3,
        defect,
        declared_eps,
        unitarity_error: unitarity_error(&u),
        cost_model: BLOCK_COST,
    };
    Ok((u, report))
}

/// `‖α·⟨0|U|0⟩ − A‖`, after checking that `U` is unitary.
pub fn verify_block_encoding(u: &DMatrix<f64>, a: &DMatrix<f64>, alpha: f64) -> Result<f64> {
    let n = a.nrows();
    if u.nrows() != u.ncols() || u.nrows() < n || a.ncols() != n {
        return Err(Error::BadShape(format!(
            "U is {}x{}, A is {}x{}",
            u.nrows(),
            u.ncols(),
            n,
            a.ncols()
        )));
    }
    let err = unitarity_error(u);
    if err > UNITARY_TOL {
        return Err(Error::NotUnitary(err));
    }
    Ok(spectral_norm(&(top_left(u, n) * alpha - a)))
}

/// Applies `U_A` while charging the sparse-access cost of one application.
#[derive(Clone, Debug)]
pub struct BlockEncodingAdapter {
    u: DMatrix<f64>,
}

impl BlockEncodingAdapter {
    pub fn new(u: DMatrix<f64>) -> Self {
        Self { u }
    }

    pub fn unitary(&self) -> &DMatrix<f64> {
        &self.u
    }

    /// Charges `O_s`, `O_A`, `O_A`, `O_s` as four sequential layers.
    pub fn charge(&self, ledger: &mut QueryLedger) {
        for kind in [OracleKind::SparseS, OracleKind::SparseA, OracleKind::SparseA, OracleKind::SparseS] {
            ledger.begin_layer();
            ledger.record(kind);
        }
    }

    pub fn apply(&self, ledger: &mut QueryLedger, v: &DVector<f64>) -> DVector<f64> {
        self.charge(ledger);
        &self.u * v
    }
}

/// Reads one row through `O_s` and `O_A`, returning its non-zeros.
///
/// This is the access pattern each `U_A` application performs coherently; the
/// `PI` queries it charges never exceed [`BLOCK_COST`]`.pi_calls`.
pub fn read_row_via_oracles(view: &SparseOracleView<'_>, ledger: &mut QueryLedger, row: usize) -> Result<[(usize, f64); 2]> {
    let c1 = view.oracle_sparse_index(ledger, row, 1)?;
    let c2 = view.oracle_sparse_index(ledger, row, 2)?;
    Ok([(c1, view.oracle_entry(ledger, row, c1)?), (c2, view.oracle_entry(ledger, row, c2)?)])
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PerturbationReport {
    pub trial: u64,
    /// `‖A − B‖`.
    pub eps: f64,
    pub kappa: f64,
    /// `‖A⁻¹ − B⁻¹‖`.
    pub inv_gap: f64,
    /// Distance between the normalized solutions for `x = e_0`.
    pub sol_gap: f64,
    /// `κ²ε / (1 − κε)`.
    pub bound_inv: f64,
    /// `κ²(κ + 1)ε / (1 − κε)`.
    pub bound_sol: f64,
}

impl PerturbationReport {
    pub fn passed(&self) -> bool {
        self.inv_gap <= self.bound_inv && self.sol_gap <= self.bound_sol
    }
}

fn inverse(m: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    m.clone().try_inverse().ok_or(Error::SingularMatrix(0.0))
}

fn normalized_solution(inv: &DMatrix<f64>) -> DVector<f64> {
    let col = inv.column(0).into_owned();
    let n = col.norm();
    col / n
}

/// Compares `A` and `B` against both perturbation bounds at `(kappa, ‖A − B‖)`.
pub fn perturbation_report(a: &DMatrix<f64>, b: &DMatrix<f64>, kappa: f64, trial: u64) -> Result<PerturbationReport> {
    let eps = sym_spectral_norm(&(a - b));
    let a_inv = inverse(a)?;
    let b_inv = inverse(b)?;
    let diff = &a_inv - &b_inv;
    let inv_gap = spectral_norm(&diff);
    let sol_gap = (normalized_solution(&a_inv) - normalized_solution(&b_inv)).norm();
    let denom = 1.0 - kappa * eps;
    Ok(PerturbationReport {
        trial,
        eps,
        kappa,
        inv_gap,
        sol_gap,
        bound_inv: kappa * kappa * eps / denom,
        bound_sol: kappa * kappa * (kappa + 1.0) * eps / denom,
    })
}

/// Randomized check of the two perturbation bounds on positive definite instances.
///
/// Trial `t` draws `A` with eigenvalues in `[1/κ, 1]` (both endpoints
/// included) in a Haar-random basis, adds a symmetric perturbation of norm
/// `eps/2` and clips the result's spectrum at 1 so that `B ⪯ I`. Clipping
/// moves `B` by at most `eps/2`, so `‖A − B‖ <= eps`.
pub fn check_perturbation_lemma(
    kappa: f64,
    eps: f64,
    trials: u64,
    seed: u64,
    dim: usize,
) -> Result<Vec<PerturbationReport>> {
    if !(kappa >= 1.0) {
        return Err(Error::BadParameters(format!("kappa = {kappa} must be >= 1")));
    }
    if !(eps > 0.0 && eps * kappa < 1.0) {
        return Err(Error::BadParameters(format!("eps = {eps} must lie in (0, 1/kappa)")));
    }
    if dim < 2 {
        return Err(Error::BadParameters("dimension must be >= 2".into()));
    }
    (0..trials)
        .map(|t| {
            let mut rng = SplitMix64::new(derive_seed(seed, t));
            let lo = 1.0 / kappa;
            let mut spectrum: Vec<f64> = (0..dim).map(|_| lo + (1.0 - lo) * rng.next_f64()).collect();
            spectrum[0] = lo;
            spectrum[1] = 1.0;
            let a = with_spectrum(&mut rng, &spectrum);
            let e = random_perturbation(dim, eps / 2.0, rng.next());
            let b = sym_function(&(&a + e), |l| l.min(1.0));
            perturbation_report(&a, &b, kappa, t)
        })
        .collect()
}

/// One CSV row per trial, with a header.
pub fn perturbation_csv(reports: &[PerturbationReport]) -> String {
    let mut out = String::from("trial,kappa,eps,inv_gap,bound_inv,sol_gap,bound_sol,pass\n");
    for r in reports {
        out.push_str(&format!(
            "{},{:e},{:e},{:e},{:e},{:e},{:e},{}\n",
            r.trial,
            r.kappa,
            r.eps,
            r.inv_gap,
            r.bound_inv,
            r.sol_gap,
            r.bound_sol,
            r.passed()
        ));
    }
    out
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PipelineReport {
    pub kappa: f64,
    pub eps_prime: f64,
    /// `2κ / (1 − 2κε′)`.
    pub kappa_prime: f64,
    /// Measured `‖2A′ − A‖`.
    pub defect: f64,
    /// Distance between the normalized solutions of `A` and `A′` for `|0̄⟩`.
    pub distance: f64,
    /// `2κ²(2κ + 1)ε′ / (1 − κε′)`.
    pub bound: f64,
    pub bound_ok: bool,
    pub below_inv_kappa: bool,
    pub sigma_min_prime: f64,
    pub sigma_max_prime: f64,
    /// Singular values of `A′` lie in `[1/κ′, 1]`.
    pub spectrum_ok: bool,
}

impl PipelineReport {
    pub fn passed(&self) -> bool {
        self.bound_ok && self.below_inv_kappa && self.spectrum_ok
    }
}

/// `ε′ = 1/(2κ⁵)`.
pub fn pipeline_eps(kappa: f64) -> f64 {
    1.0 / (2.0 * kappa.powi(5))
}

/// Error budget of swapping `A` for the half-scale matrix behind a perturbed block-encoding.
pub fn check_pipeline_bound(a: &DMatrix<f64>, kappa: f64, seed: u64, cap: usize) -> Result<PipelineReport> {
    check_pipeline_bound_with(a, kappa, pipeline_eps(kappa), seed, cap)
}

/// [`check_pipeline_bound`] with an explicit `ε′`.
pub fn check_pipeline_bound_with(
    a: &DMatrix<f64>,
    kappa: f64,
    eps_prime: f64,
    seed: u64,
    cap: usize,
) -> Result<PipelineReport> {
    if !(kappa >= 4.0) {
        return Err(Error::BadKappa(kappa));
    }
    let n = a.nrows();
    let (u, report) = build_block_encoding(a, BlockMode::Perturbed { eps: eps_prime, seed }, cap)?;
    let a_prime = top_left(&u, n);
    let distance = (normalized_solution(&inverse(a)?) - normalized_solution(&inverse(&a_prime)?)).norm();
    let bound = 2.0 * kappa * kappa * (2.0 * kappa + 1.0) * eps_prime / (1.0 - kappa * eps_prime);
    let kappa_prime = 2.0 * kappa / (1.0 - 2.0 * kappa * eps_prime);
    let (sigma_min_prime, sigma_max_prime) = sym_abs_extremes(&a_prime);
    Ok(PipelineReport {
        kappa,
        eps_prime,
        kappa_prime,
        defect: report.defect,
        distance,
        bound,
        bound_ok: distance <= bound,
        below_inv_kappa: distance < 1.0 / kappa,
        sigma_min_prime,
        sigma_max_prime,
        spectrum_ok: sigma_min_prime >= 1.0 / kappa_prime && sigma_max_prime <= 1.0,
    })
}
