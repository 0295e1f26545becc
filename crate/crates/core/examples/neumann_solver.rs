//! Truncated Neumann solver: accuracy against the direct solve and query depth against eps.

use qlsplab::encoding::{Dims, SparseOracleView, DEFAULT_DENSE_CAP};
use qlsplab::ledger::QueryLedger;
use qlsplab::permchain::PermutationChain;
use qlsplab::solver::{neumann_depth_ceiling, solve_direct, solve_neumann};

fn main() -> qlsplab::Result<()> {
    let chain = PermutationChain::random(16, 6, 3);
    let a = SparseOracleView::new(&chain).materialize_dense(DEFAULT_DENSE_CAP)?;
    let direct = solve_direct(&a, Dims::of(&chain))?;
    println!("direct residual {:.1e}", direct.residual);

    println!("{:>8} {:>4} {:>6} {:>8} {:>10}", "eps", "K", "depth", "ceiling", "distance");
    for eps in [1e-1, 1e-2, 1e-3, 1e-4, 1e-6] {
        let mut ledger = QueryLedger::new();
        let r = solve_neumann(&chain, &mut ledger, eps)?;
        println!(
            "{eps:>8.0e} {:>4} {:>6} {:>8} {:>10.2e}",
            r.truncation_k.unwrap_or(0),
            ledger.counts().depth,
            neumann_depth_ceiling(chain.q(), eps),
            r.state.distance(&direct.state)
        );
    }
    Ok(())
}
