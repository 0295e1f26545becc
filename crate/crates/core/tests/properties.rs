use proptest::prelude::*;

use qlsplab::encoding::{apply_p_step, p_step, BasisIndex, Dims, Direction, SparseOracleView, DEFAULT_DENSE_CAP};
use qlsplab::ledger::{OracleKind, QueryLedger};
use qlsplab::mtx;
use qlsplab::permchain::PermutationChain;

fn chain_strategy(max_n: usize, max_q: usize) -> impl Strategy<Value = PermutationChain> {
    (1..=max_n, 1..=max_q, any::<u64>()).prop_map(|(n, q, seed)| PermutationChain::random(n, q, seed))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn forward_and_inverse_oracles_cancel(chain in chain_strategy(64, 6)) {
        let q = chain.q();
        let mut ledger = QueryLedger::new();
        for j in 1..=q {
            for x in 0..chain.n() {
                let y = chain.oracle_pi(&mut ledger, j, x).unwrap();
                prop_assert_eq!(chain.oracle_pi(&mut ledger, j + q, y).unwrap(), x);
            }
        }
        prop_assert_eq!(ledger.counts().total, (2 * q * chain.n()) as u64);
    }

    #[test]
    fn flatten_is_a_bijection(n in 1usize..20, q in 1usize..6) {
        let dims = Dims::new(n, q);
        for i in 0..dims.dim() {
            let b = BasisIndex::unflatten(dims, i);
            prop_assert!(b.b <= 1 && b.j < 3 * q && b.x < n);
            prop_assert_eq!(b.flatten(dims), i);
        }
        prop_assert!(BasisIndex::checked_unflatten(dims, dims.dim()).is_err());
    }

    #[test]
    fn prefix_fold_costs_q_sequential_queries(chain in chain_strategy(32, 8)) {
        let mut ledger = QueryLedger::new();
        let mut x = 0;
        for j in 1..=chain.q() {
            ledger.begin_layer();
            x = chain.oracle_pi(&mut ledger, j, x).unwrap();
        }
        prop_assert_eq!(x, chain.answer());
        prop_assert_eq!(x, chain.prefix_compose(chain.q()).unwrap());
        let c = ledger.summary().kind(OracleKind::Pi);
        prop_assert_eq!(c.as_tuple(), (chain.q() as u64, chain.q() as u64, 1));
    }

    #[test]
    fn matrix_is_symmetric_and_two_sparse(chain in chain_strategy(12, 4)) {
        let view = SparseOracleView::new(&chain);
        let dim = view.dims().dim();
        let mut col_counts = vec![0usize; dim];
        for r in 0..dim {
            let row = view.row(r);
            prop_assert!(row[0].0 < row[1].0);
            for (c, v) in row {
                prop_assert!(v != 0.0);
                col_counts[c] += 1;
                let back = view.row(c);
                prop_assert!(back.iter().any(|&(rc, rv)| rc == r && rv == v));
            }
        }
        prop_assert!(col_counts.iter().all(|&k| k == 2));
    }

    #[test]
    fn p_has_order_3q(chain in chain_strategy(16, 6)) {
        let steps = 3 * chain.q();
        for j0 in 0..steps {
            for x0 in 0..chain.n() {
                let (mut j, mut x) = (j0, x0);
                for s in 1..=steps {
                    (j, x) = p_step(&chain, j, x, Direction::Forward);
                    if s < steps {
                        prop_assert!(j != j0);
                    }
                }
                prop_assert_eq!((j, x), (j0, x0));
                let back = p_step(&chain, j0, x0, Direction::Forward);
                prop_assert_eq!(p_step(&chain, back.0, back.1, Direction::Inverse), (j0, x0));
            }
        }
    }

    #[test]
    fn oracle_calls_cost_at_most_one_query(chain in chain_strategy(8, 4), picks in prop::collection::vec(any::<u32>(), 1..40)) {
        let view = SparseOracleView::new(&chain);
        let dim = view.dims().dim();
        let mut ledger = QueryLedger::new();
        for p in picks {
            let row = p as usize % dim;
            let before = ledger.counts().total;
            let col = view.oracle_sparse_index(&mut ledger, row, 1 + (p as usize >> 20) % 2).unwrap();
            prop_assert!(ledger.counts().total - before <= 1);
            let before = ledger.counts().total;
            let v = view.oracle_entry(&mut ledger, row, col).unwrap();
            prop_assert!(ledger.counts().total - before <= 1);
            prop_assert!(view.row(row).iter().any(|&(c, rv)| c == col && rv == v));
        }
    }

    #[test]
    fn ledger_replay_reproduces_counts(ops in prop::collection::vec((0u8..5, 1u64..4), 0..60)) {
        let mut ledger = QueryLedger::new();
        for (op, n) in ops {
            match op {
                0 => ledger.begin_layer(),
                1 => ledger.record_n(OracleKind::Pi, n),
                2 => ledger.record_n(OracleKind::SparseS, n),
                3 => ledger.record_n(OracleKind::SparseA, n),
                _ => ledger.record(OracleKind::BlockU),
            }
        }
        let replayed = QueryLedger::replay(ledger.events());
        prop_assert_eq!(replayed.summary(), ledger.summary());
        let split = ledger.events().len() / 2;
        let mut left = QueryLedger::replay(&ledger.events()[..split]);
        let right = QueryLedger::replay(&ledger.events()[split..]);
        let (l, r) = (left.counts(), right.counts());
        left.append(&right);
        prop_assert_eq!(left.counts().total, l.total + r.total);
        prop_assert_eq!(left.counts().depth, l.depth + r.depth);
    }

    #[test]
    fn matrix_market_round_trip(chain in chain_strategy(6, 3)) {
        let view = SparseOracleView::new(&chain);
        let dim = view.dims().dim();
        let text = mtx::render(dim, dim, &view.triplets());
        let parsed = mtx::parse(std::path::Path::new("mem.mtx"), &text).unwrap();
        let dense = view.materialize_dense(DEFAULT_DENSE_CAP).unwrap();
        prop_assert!((parsed.to_dense() - dense).amax() <= 1e-15);
    }
}

#[test]
fn charged_steps_match_the_segment() {
    let chain = PermutationChain::random(5, 3, 17);
    let q = chain.q();
    for j in 0..3 * q {
        let mut ledger = QueryLedger::new();
        apply_p_step(&chain, &mut ledger, j, 2, Direction::Forward).unwrap();
        let expected = u64::from(!(q..2 * q).contains(&j));
        assert_eq!(ledger.counts().total, expected, "j = {j}");
    }
}
