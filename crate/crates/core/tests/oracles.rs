//! Cross-checks against independent reference computations written here from scratch.

use nalgebra::DMatrix;
use qlsplab::analysis::{closed_form_inverse, closed_form_norm, exact_solution_state, success_probability, xj_table};
use qlsplab::encoding::{BasisIndex, Dims, SparseOracleView, DEFAULT_DENSE_CAP};
use qlsplab::permchain::PermutationChain;
use qlsplab::solver::solve_direct;

fn splitmix(state: &mut u64) -> u64 {
    *state = state.wrapping_add(0x9E3779B97F4A7C15);
    let mut z = *state;
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58476D1CE4E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D049BB133111EB);
    z ^ (z >> 31)
}

fn reference_chain(n: usize, q: usize, seed: u64) -> Vec<Vec<usize>> {
    let mut s = seed;
    let mut out = Vec::new();
    for _ in 0..q {
        let mut p: Vec<usize> = (0..n).collect();
        let mut i = n;
        while i > 1 {
            i -= 1;
            let bound = i as u64 + 1;
            let limit = u64::MAX - u64::MAX % bound;
            let k = loop {
                let v = splitmix(&mut s);
                if v < limit {
                    break (v % bound) as usize;
                }
            };
            p.swap(i, k);
        }
        out.push(p);
    }
    out
}

fn invert(p: &[usize]) -> Vec<usize> {
    let mut inv = vec![0; p.len()];
    for (x, &y) in p.iter().enumerate() {
        inv[y] = x;
    }
    inv
}

/// `P` as a 0/1 matrix, with `P[P(z), z] = 1`.
fn reference_p(tables: &[Vec<usize>]) -> DMatrix<f64> {
    let q = tables.len();
    let n = tables[0].len();
    let m = 3 * q * n;
    let mut p = DMatrix::zeros(m, m);
    for j in 0..3 * q {
        for x in 0..n {
            let (j2, x2) = if j < q {
                (j + 1, tables[j][x])
            } else if j < 2 * q {
                (j + 1, x)
            } else {
                ((j + 1) % (3 * q), invert(&tables[3 * q - j - 1])[x])
            };
            p[(j2 * n + x2, j * n + x)] = 1.0;
        }
    }
    p
}

fn reference_a(tables: &[Vec<usize>]) -> DMatrix<f64> {
    let q = tables.len() as f64;
    let e = (-1.0 / q).exp();
    let c = 1.0 / (1.0 + e);
    let p = reference_p(tables);
    let m = p.nrows();
    let id = DMatrix::<f64>::identity(m, m);
    let upper = (&id - &p * e) * c;
    let lower = (&id - p.transpose() * e) * c;
    let mut a = DMatrix::zeros(2 * m, 2 * m);
    a.view_mut((0, m), (m, m)).copy_from(&upper);
    a.view_mut((m, 0), (m, m)).copy_from(&lower);
    a
}

#[test]
fn random_chain_matches_reference_shuffle() {
    for &(n, q, seed) in &[(16, 4, 42), (1, 3, 0), (64, 8, 2024), (5, 1, u64::MAX)] {
        let chain = PermutationChain::random(n, q, seed);
        assert_eq!(chain.tables(), reference_chain(n, q, seed), "N={n} q={q} seed={seed}");
    }
}

#[test]
fn random_chain_is_uniform_on_s4() {
    let mut counts = std::collections::HashMap::new();
    let trials = 10_000u64;
    for seed in 0..trials {
        *counts.entry(PermutationChain::random(4, 1, seed).tables()).or_insert(0u64) += 1;
    }
    assert_eq!(counts.len(), 24);
    let p = 1.0 / 24.0;
    let mean = trials as f64 * p;
    let sigma = (trials as f64 * p * (1.0 - p)).sqrt();
    for (perm, &k) in &counts {
        assert!((k as f64 - mean).abs() <= 5.0 * sigma, "{perm:?} drawn {k} times");
    }
}

#[test]
fn dense_matrix_matches_reference_construction() {
    for &(n, q, seed) in &[(2, 1, 3), (3, 2, 9), (5, 3, 11), (4, 4, 1)] {
        let chain = PermutationChain::random(n, q, seed);
        let ours = SparseOracleView::new(&chain).materialize_dense(DEFAULT_DENSE_CAP).unwrap();
        let reference = reference_a(&chain.tables());
        assert!((ours - reference).amax() < 1e-15);
    }
}

#[test]
fn swap_chain_reference_values() {
    // Numbers from an independent numpy construction of A for pi_1 = (0 1).
    let chain = PermutationChain::from_arrays(2, 1, &[vec![1, 0]]).unwrap();
    let (norm, state) = exact_solution_state(&chain);
    assert!((norm - 1.5461943947361818).abs() < 1e-12);
    let probs: Vec<(usize, f64)> = state.support().into_iter().map(|(i, a)| (i, a * a)).collect();
    let expected = [(6, 0.86681333), (9, 0.11731043), (11, 0.01587624)];
    assert_eq!(probs.len(), 3);
    for ((i, p), (ei, ep)) in probs.iter().zip(expected) {
        assert_eq!(*i, ei);
        assert!((p - ep).abs() < 1e-8);
    }
}

#[test]
fn solution_state_matches_dense_inverse() {
    for &(n, q, seed) in &[(2, 1, 5), (3, 2, 6), (4, 3, 7), (2, 5, 8)] {
        let chain = PermutationChain::random(n, q, seed);
        let a = reference_a(&chain.tables());
        let inv = a.clone().try_inverse().unwrap();
        let col = inv.column(0).into_owned();
        assert!((col.norm() - closed_form_norm(q)).abs() < 1e-10);
        let (_, state) = exact_solution_state(&chain);
        let reference = col.normalize();
        let dist = state
            .amplitudes()
            .iter()
            .zip(reference.iter())
            .map(|(a, b)| (a - b).powi(2))
            .sum::<f64>()
            .sqrt();
        assert!(dist < 1e-12, "distance {dist}");

        let closed = closed_form_inverse(&chain, DEFAULT_DENSE_CAP).unwrap();
        assert!((closed - &inv).amax() < 1e-10);

        let direct = solve_direct(&a, Dims::of(&chain)).unwrap();
        assert!(direct.state.distance(&state) < 1e-10);
    }
}

#[test]
fn xj_table_walks_the_chain() {
    let chain = PermutationChain::random(7, 4, 31);
    let t = chain.tables();
    let q = 4;
    let mut prefix = vec![0usize];
    for p in &t {
        prefix.push(p[*prefix.last().unwrap()]);
    }
    let xs = xj_table(&chain);
    for j in 0..=q {
        assert_eq!(xs[j], prefix[j]);
    }
    for j in q..=2 * q {
        assert_eq!(xs[j], prefix[q]);
    }
    for j in 2 * q + 1..3 * q {
        assert_eq!(xs[j], prefix[3 * q - j]);
    }
}

#[test]
fn window_probability_matches_summed_amplitudes() {
    for q in 1..=8 {
        let chain = PermutationChain::random(3, q, q as u64);
        let (_, state) = exact_solution_state(&chain);
        let dims = Dims::of(&chain);
        let mut mass = 0.0;
        for (i, a) in state.support() {
            let b = BasisIndex::unflatten(dims, i);
            if b.j > q && b.j <= 2 * q {
                mass += a * a;
            }
        }
        assert!((mass - success_probability(q)).abs() < 1e-12);
    }
}
