//! End-to-end reduction: solve, measure until the answer window is hit, compare with the truth.

use qlsplab::analysis::exact_solution_state;
use qlsplab::permchain::PermutationChain;
use qlsplab::pipeline::{run_reduction_on, ReductionConfig, SolverKind};
use qlsplab::solver::{extract_answer, sample_outcomes_sharded};

fn main() -> qlsplab::Result<()> {
    let chain = PermutationChain::random(8, 3, 11);

    let (_, state) = exact_solution_state(&chain);
    let outcomes = sample_outcomes_sharded(&state, 1000, 99, 4);
    let hits = outcomes.iter().filter(|o| o.j > chain.q() && o.j <= 2 * chain.q()).count();
    println!("1000 shots: {hits} in the window, first answer {:?}", extract_answer(&outcomes, chain.q()));

    for solver in [SolverKind::Direct, SolverKind::Neumann { eps: 1e-3 }, SolverKind::Blockenc { eps: 1e-6 }] {
        let config = ReductionConfig {
            solver,
            record_timings: false,
            ..ReductionConfig::default()
        };
        let r = run_reduction_on(&chain, 5, &config)?;
        println!(
            "{solver:?}: answer {:?} truth {} after {} repetitions, ledger depth {}",
            r.answer, r.truth, r.repetitions_used, r.ledger.all.depth
        );
    }
    Ok(())
}
