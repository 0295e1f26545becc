//! One-ancilla block-encoding of the encoding matrix and its query cost per application.

use nalgebra::DVector;
use qlsplab::blockenc::{build_block_encoding, verify_block_encoding, BlockEncodingAdapter, BlockMode};
use qlsplab::encoding::{SparseOracleView, DEFAULT_DENSE_CAP};
use qlsplab::ledger::QueryLedger;
use qlsplab::permchain::PermutationChain;

fn main() -> qlsplab::Result<()> {
    let chain = PermutationChain::random(4, 2, 8);
    let a = SparseOracleView::new(&chain).materialize_dense(DEFAULT_DENSE_CAP)?;

    let (u, report) = build_block_encoding(&a, BlockMode::Exact, DEFAULT_DENSE_CAP)?;
    println!(
        "alpha {}, ancillas {}, unitarity error {:.1e}, defect {:.1e}",
        report.alpha, report.ancillas, report.unitarity_error, report.defect
    );
    println!("verified block error {:.1e}", verify_block_encoding(&u, &a, report.alpha)?);

    let (_, noisy) = build_block_encoding(&a, BlockMode::Perturbed { eps: 1e-4, seed: 1 }, DEFAULT_DENSE_CAP)?;
    println!("perturbed: declared eps {:?}, defect {:.2e}", noisy.declared_eps, noisy.defect);

    let adapter = BlockEncodingAdapter::new(u);
    let mut ledger = QueryLedger::new();
    let mut v = DVector::zeros(2 * a.nrows());
    v[0] = 1.0;
    for _ in 0..3 {
        v = adapter.apply(&mut ledger, &v);
    }
    let s = ledger.summary();
    println!("3 applications: depth {}, PI-equivalents {}", s.all.depth, s.pi_equivalents);
    Ok(())
}
