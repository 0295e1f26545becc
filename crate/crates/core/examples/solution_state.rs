//! Closed-form solution state, its answer window and the spectral certificate.

use qlsplab::analysis::{
    exact_solution_state, kappa_formula, spectral_check, success_probability, xj_table, DEFAULT_DELTA,
};
use qlsplab::encoding::{BasisIndex, Dims, SparseOracleView, DEFAULT_DENSE_CAP};
use qlsplab::permchain::PermutationChain;

fn main() -> qlsplab::Result<()> {
    let chain = PermutationChain::random(5, 3, 7);
    let q = chain.q();
    let dims = Dims::of(&chain);

    println!("x_j = {:?}", xj_table(&chain));
    let (norm, state) = exact_solution_state(&chain);
    println!("||A^-1 |0>|| = {norm:.6}");
    for (i, a) in state.support() {
        let b = BasisIndex::unflatten(dims, i);
        let mark = if b.j > q && b.j <= 2 * q { "  <- window" } else { "" };
        println!("  (b={}, j={:2}, x={})  p = {:.5}{mark}", b.b, b.j, b.x, a * a);
    }
    println!("window mass {:.6} (formula {:.6}), answer {}", state.window_mass(), success_probability(q), chain.answer());

    let a = SparseOracleView::new(&chain).materialize_dense(DEFAULT_DENSE_CAP)?;
    let r = spectral_check(&a, q, DEFAULT_DELTA, DEFAULT_DENSE_CAP)?;
    println!(
        "||A|| = {:.6}, ||A^-1|| = {:.6} (formula {:.6}), kappa = {:.4}",
        r.op_norm,
        r.inv_norm,
        kappa_formula(q),
        r.kappa
    );
    Ok(())
}
