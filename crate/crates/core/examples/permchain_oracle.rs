//! Draw a permutation chain, answer it with q sequential O_pi queries and inspect the ledger.

use qlsplab::ledger::QueryLedger;
use qlsplab::permchain::PermutationChain;

fn main() -> qlsplab::Result<()> {
    let chain = PermutationChain::random(8, 4, 42);
    for (j, p) in chain.tables().iter().enumerate() {
        println!("pi_{} = {:?}", j + 1, p);
    }

    let mut ledger = QueryLedger::new();
    let mut x = 0;
    for j in 1..=chain.q() {
        ledger.begin_layer();
        x = chain.oracle_pi(&mut ledger, j, x)?;
        println!("Pi_{j}(0) = {x}");
    }
    // The second half of the oracle's domain runs the chain backwards.
    ledger.begin_layer();
    let back = chain.oracle_pi(&mut ledger, chain.q() + chain.q(), x)?;

    let c = ledger.counts();
    println!("answer {x} (truth {}), pi_q^-1 of it = {back}", chain.answer());
    println!("ledger: total {} depth {} width {}", c.total, c.depth, c.width);
    Ok(())
}
