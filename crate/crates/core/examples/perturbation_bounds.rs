//! Randomized perturbation-bound trials and the error budget of a perturbed block-encoding.

use qlsplab::analysis::{spectral_check, DEFAULT_DELTA};
use qlsplab::blockenc::{check_perturbation_lemma, check_pipeline_bound};
use qlsplab::encoding::{SparseOracleView, DEFAULT_DENSE_CAP};
use qlsplab::permchain::PermutationChain;

fn main() -> qlsplab::Result<()> {
    for kappa in [2.0, 8.0, 32.0] {
        let reports = check_perturbation_lemma(kappa, 0.1 / kappa, 100, 17, 8)?;
        let worst = reports
            .iter()
            .map(|r| r.sol_gap / r.bound_sol)
            .fold(0.0f64, f64::max);
        let held = reports.iter().filter(|r| r.passed()).count();
        println!("kappa {kappa:>4}: {held}/100 within bounds, worst sol_gap/bound {worst:.3}");
    }

    let chain = PermutationChain::random(6, 3, 2);
    let a = SparseOracleView::new(&chain).materialize_dense(DEFAULT_DENSE_CAP)?;
    let kappa = spectral_check(&a, chain.q(), DEFAULT_DELTA, DEFAULT_DENSE_CAP)?.inv_norm;
    let p = check_pipeline_bound(&a, kappa, 4, DEFAULT_DENSE_CAP)?;
    println!(
        "pipeline: kappa {:.3}, eps' {:.2e}, distance {:.2e} (< 1/kappa = {:.3}), bound {:.2e}",
        p.kappa,
        p.eps_prime,
        p.distance,
        1.0 / p.kappa,
        p.bound
    );
    Ok(())
}
