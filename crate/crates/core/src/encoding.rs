//! The linear-system encoding of a permutation chain.
//!
//! The index space has three registers `(b, j, x)` with `b ∈ {0, 1}`,
//! `j ∈ [0, 3q)` and `x ∈ [0, N)`, flattened as `b·3qN + j·N + x`.
//!
//! `P` walks the chain forward through `π_1, .., π_q`, idles for `q` steps,
//! then unwinds through `π_q⁻¹, .., π_1⁻¹`, so `P^{3q} = I`. The encoding
//! matrix is
//!
//! ```text
//! A = c·( |0⟩⟨1| ⊗ (I − e^{−1/q} P) + |1⟩⟨0| ⊗ (I − e^{−1/q} P⁻¹) ),   c = 1/(1 + e^{−1/q})
//! ```
//!
//! which is real symmetric with exactly two non-zeros per row: `c` on the
//! partner of the same `(j, x)` in the other `b` block and `−d = −c·e^{−1/q}`
//! on the `P`-shifted partner.

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::ledger::QueryLedger;
use crate::permchain::PermutationChain;

/// Default upper bound on the side of any dense matrix the crate builds.
pub const DEFAULT_DENSE_CAP: usize = 32768;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Dims {
    pub n: usize,
    pub q: usize,
}

impl Dims {
    pub fn new(n: usize, q: usize) -> Self {
        Self { n, q }
    }

    pub fn of(chain: &PermutationChain) -> Self {
        Self::new(chain.n(), chain.q())
    }

    /// Number of `j` values, `3q`.
    pub fn steps(&self) -> usize {
        3 * self.q
    }

    /// Side of one `b` block, `3qN`.
    pub fn half(&self) -> usize {
        3 * self.q * self.n
    }

    /// Side of `A`, `6qN`.
    pub fn dim(&self) -> usize {
        6 * self.q * self.n
    }

    pub fn check_cap(&self, cap: usize) -> Result<()> {
        if self.dim() > cap {
            return Err(Error::TooLarge {
                dim: self.dim(),
                cap,
            });
        }
        Ok(())
    }
}

/// A computational basis label `(b, j, x)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct BasisIndex {
    pub b: u8,
    pub j: usize,
    pub x: usize,
}

impl BasisIndex {
    pub const ZERO: BasisIndex = BasisIndex { b: 0, j: 0, x: 0 };

    pub fn new(b: u8, j: usize, x: usize) -> Self {
        Self { b, j, x }
    }

    pub fn flatten(&self, dims: Dims) -> usize {
        self.b as usize * dims.half() + self.j * dims.n + self.x
    }

    pub fn unflatten(dims: Dims, index: usize) -> Self {
        let half = dims.half();
        let b = (index / half) as u8;
        let rest = index % half;
        Self {
            b,
            j: rest / dims.n,
            x: rest % dims.n,
        }
    }

    pub fn checked_unflatten(dims: Dims, index: usize) -> Result<Self> {
        if index >= dims.dim() {
            return Err(Error::IndexOutOfRange {
                what: "index",
                value: index,
                range: format!("[0, {})", dims.dim()),
            });
        }
        Ok(Self::unflatten(dims, index))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Direction {
    Forward,
    Inverse,
}

/// Target `j` of one `P` step and the `O_pi` index it needs, if any.
fn step_plan(q: usize, j: usize, direction: Direction) -> (usize, Option<usize>) {
    let steps = 3 * q;
    match direction {
        Direction::Forward => {
            let next = (j + 1) % steps;
            let oracle = if j < q {
                Some(j + 1)
            } else if j < 2 * q {
                None
            } else {
                // π_{3q−j}⁻¹
                Some(q + (steps - j))
            };
            (next, oracle)
        }
        Direction::Inverse => {
            let prev = (j + steps - 1) % steps;
            let oracle = if prev < q {
                // undo π_{prev+1}
                Some(q + prev + 1)
            } else if prev < 2 * q {
                None
            } else {
                // undo π_{3q−prev}⁻¹
                Some(steps - prev)
            };
            (prev, oracle)
        }
    }
}

fn lookup(chain: &PermutationChain, oracle: usize, x: usize) -> usize {
    let q = chain.q();
    if oracle <= q {
        chain.perm(oracle).apply(x)
    } else {
        chain.inv_perm(oracle - q).apply(x)
    }
}

fn check_step(chain: &PermutationChain, j: usize, x: usize) -> Result<()> {
    let steps = 3 * chain.q();
    if j >= steps {
        return Err(Error::IndexOutOfRange {
            what: "j",
            value: j,
            range: format!("[0, {steps})"),
        });
    }
    if x >= chain.n() {
        return Err(Error::IndexOutOfRange {
            what: "x",
            value: x,
            range: format!("[0, {})", chain.n()),
        });
    }
    Ok(())
}

/// One application of `P` (or `P⁻¹`) to `|j⟩|x⟩` through `O_pi`.
///
/// Charges one `PI` query unless the step lies in the idle segment.
pub fn apply_p_step(
    chain: &PermutationChain,
    ledger: &mut QueryLedger,
    j: usize,
    x: usize,
    direction: Direction,
) -> Result<(usize, usize)> {
    check_step(chain, j, x)?;
    let (next, oracle) = step_plan(chain.q(), j, direction);
    let x = match oracle {
        Some(o) => chain.oracle_pi(ledger, o, x)?,
        None => x,
    };
    Ok((next, x))
}

/// Uncharged `P` step, for reference paths.
pub fn p_step(chain: &PermutationChain, j: usize, x: usize, direction: Direction) -> (usize, usize) {
    let (next, oracle) = step_plan(chain.q(), j, direction);
    (next, oracle.map_or(x, |o| lookup(chain, o, x)))
}

/// Oracle access to the encoding matrix of one chain.
#[derive(Clone, Copy, Debug)]
pub struct SparseOracleView<'a> {
    chain: &'a PermutationChain,
    dims: Dims,
    c: f64,
    d: f64,
}

impl<'a> SparseOracleView<'a> {
    pub fn new(chain: &'a PermutationChain) -> Self {
        let q = chain.q() as f64;
        let decay = (-1.0 / q).exp();
        let c = 1.0 / (1.0 + decay);
        Self {
            chain,
            dims: Dims::of(chain),
            c,
            d: decay * c,
        }
    }

    pub fn chain(&self) -> &'a PermutationChain {
        self.chain
    }

    pub fn dims(&self) -> Dims {
        self.dims
    }

    /// Weight of the same-`(j, x)` entry, `1/(1 + e^{−1/q})`.
    pub fn c(&self) -> f64 {
        self.c
    }

    /// Magnitude of the shifted entry, `e^{−1/q}/(1 + e^{−1/q})`.
    pub fn d(&self) -> f64 {
        self.d
    }

    fn row_index(&self, row: usize) -> Result<BasisIndex> {
        BasisIndex::checked_unflatten(self.dims, row)
    }

    /// `O_s`: the `k`-th non-zero column (`k ∈ {1, 2}`) of `row`, in ascending order.
    pub fn oracle_sparse_index(&self, ledger: &mut QueryLedger, row: usize, k: usize) -> Result<usize> {
        let r = self.row_index(row)?;
        if k != 1 && k != 2 {
            return Err(Error::BadK(k));
        }
        let direction = if r.b == 0 {
            Direction::Inverse
        } else {
            Direction::Forward
        };
        let (j, x) = apply_p_step(self.chain, ledger, r.j, r.x, direction)?;
        let other = 1 - r.b;
        let mut cols = [
            BasisIndex::new(other, r.j, r.x).flatten(self.dims),
            BasisIndex::new(other, j, x).flatten(self.dims),
        ];
        cols.sort_unstable();
        Ok(cols[k - 1])
    }

    /// `O_A`: the entry `A[row, col]`. Charges at most one `PI` query.
    pub fn oracle_entry(&self, ledger: &mut QueryLedger, row: usize, col: usize) -> Result<f64> {
        let r = self.row_index(row)?;
        let s = self.row_index(col)?;
        if r.b == s.b {
            return Ok(0.0);
        }
        if r.j == s.j && r.x == s.x {
            return Ok(self.c);
        }
        let direction = if r.b == 0 {
            Direction::Inverse
        } else {
            Direction::Forward
        };
        let (target_j, _) = step_plan(self.dims.q, r.j, direction);
        if s.j != target_j {
            return Ok(0.0);
        }
        let (_, x) = apply_p_step(self.chain, ledger, r.j, r.x, direction)?;
        Ok(if x == s.x { -self.d } else { 0.0 })
    }

    /// The two `(column, value)` pairs of `row`, uncharged, columns ascending.
    pub fn row(&self, row: usize) -> [(usize, f64); 2] {
        let r = BasisIndex::unflatten(self.dims, row);
        let direction = if r.b == 0 {
            Direction::Inverse
        } else {
            Direction::Forward
        };
        let (j, x) = p_step(self.chain, r.j, r.x, direction);
        let other = 1 - r.b;
        let diag = (BasisIndex::new(other, r.j, r.x).flatten(self.dims), self.c);
        let shifted = (BasisIndex::new(other, j, x).flatten(self.dims), -self.d);
        if diag.0 < shifted.0 {
            [diag, shifted]
        } else {
            [shifted, diag]
        }
    }

    /// All non-zeros as `(row, col, value)`, sorted by `(row, col)`.
    pub fn triplets(&self) -> Vec<(usize, usize, f64)> {
        (0..self.dims.dim())
            .flat_map(|r| self.row(r).map(|(c, v)| (r, c, v)))
            .collect()
    }

    /// `A·v` without materializing `A`.
    pub fn apply(&self, v: &[f64]) -> Vec<f64> {
        assert_eq!(v.len(), self.dims.dim());
        (0..self.dims.dim())
            .map(|r| self.row(r).iter().map(|&(c, a)| a * v[c]).sum())
            .collect()
    }

    /// Dense `A`, built directly from the chain tables without charging queries.
    pub fn materialize_dense(&self, cap: usize) -> Result<DMatrix<f64>> {
        self.dims.check_cap(cap)?;
        let dims = self.dims;
        let half = dims.half();
        let mut a = DMatrix::zeros(dims.dim(), dims.dim());
        for j in 0..dims.steps() {
            for x in 0..dims.n {
                let y = BasisIndex::new(0, j, x).flatten(dims);
                a[(y, y + half)] = self.c;
                a[(y + half, y)] = self.c;
                // (I − e^{−1/q}P)[P z, z] carries the shift.
                let (pj, px) = p_step(self.chain, j, x, Direction::Forward);
                let pz = BasisIndex::new(0, pj, px).flatten(dims);
                a[(pz, y + half)] = -self.d;
                a[(y + half, pz)] = -self.d;
            }
        }
        Ok(a)
    }

    /// Dense `A` assembled purely through `O_s` and `O_A`.
    ///
    /// All `O_s` calls form one parallel layer and all `O_A` calls a second.
    pub fn materialize_via_oracles(&self, ledger: &mut QueryLedger, cap: usize) -> Result<DMatrix<f64>> {
        self.dims.check_cap(cap)?;
        let dim = self.dims.dim();
        ledger.begin_layer();
        let mut cols = Vec::with_capacity(2 * dim);
        for row in 0..dim {
            for k in 1..=2 {
                cols.push((row, self.oracle_sparse_index(ledger, row, k)?));
            }
        }
        ledger.begin_layer();
        let mut a = DMatrix::zeros(dim, dim);
        for (row, col) in cols {
            a[(row, col)] = self.oracle_entry(ledger, row, col)?;
        }
        Ok(a)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn swap_chain() -> PermutationChain {
        PermutationChain::from_arrays(2, 1, &[vec![1, 0]]).unwrap()
    }

    #[test]
    fn flatten_layout() {
        let dims = Dims::new(2, 1);
        assert_eq!(BasisIndex::new(1, 0, 0).flatten(dims), 6);
        assert_eq!(BasisIndex::new(0, 1, 1).flatten(dims), 3);
        assert_eq!(BasisIndex::new(1, 2, 1).flatten(dims), 11);
        assert_eq!(BasisIndex::ZERO.flatten(dims), 0);
        assert!(BasisIndex::checked_unflatten(dims, 12).is_err());
    }

    #[test]
    fn p_step_segments() {
        let chain = swap_chain();
        let mut ledger = QueryLedger::new();
        assert_eq!(apply_p_step(&chain, &mut ledger, 0, 0, Direction::Forward).unwrap(), (1, 1));
        assert_eq!(ledger.counts().total, 1);
        assert_eq!(apply_p_step(&chain, &mut ledger, 1, 1, Direction::Forward).unwrap(), (2, 1));
        assert_eq!(ledger.counts().total, 1);
        assert_eq!(apply_p_step(&chain, &mut ledger, 2, 1, Direction::Forward).unwrap(), (0, 0));
        assert_eq!(ledger.counts().total, 2);
        assert!(apply_p_step(&chain, &mut ledger, 3, 0, Direction::Forward).is_err());
    }

    #[test]
    fn idle_segment_is_free() {
        let chain = PermutationChain::random(5, 3, 11);
        let mut ledger = QueryLedger::new();
        for x in 0..5 {
            assert_eq!(apply_p_step(&chain, &mut ledger, 3, x, Direction::Forward).unwrap(), (4, x));
            assert_eq!(apply_p_step(&chain, &mut ledger, 4, x, Direction::Inverse).unwrap(), (3, x));
        }
        assert_eq!(ledger.counts().total, 0);
    }

    #[test]
    fn sparse_index_examples() {
        let chain = swap_chain();
        let view = SparseOracleView::new(&chain);
        let mut ledger = QueryLedger::new();
        assert_eq!(view.oracle_sparse_index(&mut ledger, 6, 1).unwrap(), 0);
        assert_eq!(view.oracle_sparse_index(&mut ledger, 6, 2).unwrap(), 3);
        assert_eq!(view.oracle_sparse_index(&mut ledger, 0, 1).unwrap(), 6);
        assert_eq!(view.oracle_sparse_index(&mut ledger, 0, 2).unwrap(), 11);
        assert!(matches!(view.oracle_sparse_index(&mut ledger, 0, 3), Err(Error::BadK(3))));
        assert!(view.oracle_sparse_index(&mut ledger, 12, 1).is_err());

        let id = PermutationChain::identity(1, 1);
        let view = SparseOracleView::new(&id);
        assert_eq!(view.oracle_sparse_index(&mut ledger, 1, 1).unwrap(), 3);
        assert_eq!(view.oracle_sparse_index(&mut ledger, 1, 2).unwrap(), 4);
    }

    #[test]
    fn entry_examples() {
        let chain = swap_chain();
        let view = SparseOracleView::new(&chain);
        let mut ledger = QueryLedger::new();
        let c = view.oracle_entry(&mut ledger, 6, 0).unwrap();
        assert!((c - 0.7310585786300049).abs() < 1e-15);
        let d = view.oracle_entry(&mut ledger, 6, 3).unwrap();
        assert!((d + 0.2689414213699951).abs() < 1e-15);
        for i in 0..12 {
            assert_eq!(view.oracle_entry(&mut ledger, i, i).unwrap(), 0.0);
        }
        assert!((view.c() + view.d() - 1.0).abs() <= 1e-15);
        assert!((view.c() - view.d() * 1f64.exp()).abs() <= 1e-15);
    }

    #[test]
    fn dense_matches_examples() {
        let chain = swap_chain();
        let view = SparseOracleView::new(&chain);
        let a = view.materialize_dense(DEFAULT_DENSE_CAP).unwrap();
        assert_eq!(a.nrows(), 12);
        let nz: Vec<(usize, f64)> = (0..12).filter(|&c| a[(6, c)] != 0.0).map(|c| (c, a[(6, c)])).collect();
        assert_eq!(nz.len(), 2);
        assert_eq!(nz[0].0, 0);
        assert_eq!(nz[1].0, 3);
        assert!((nz[0].1 - 0.7310585786).abs() < 1e-10);
        assert!((nz[1].1 + 0.2689414214).abs() < 1e-10);
        assert_eq!(a, a.transpose());
        assert!(matches!(view.materialize_dense(11), Err(Error::TooLarge { dim: 12, cap: 11 })));
    }

    #[test]
    fn apply_matches_dense() {
        let chain = PermutationChain::random(3, 2, 4);
        let view = SparseOracleView::new(&chain);
        let a = view.materialize_dense(DEFAULT_DENSE_CAP).unwrap();
        let v: Vec<f64> = (0..view.dims().dim()).map(|i| (i as f64).sin()).collect();
        let dense = &a * nalgebra::DVector::from_column_slice(&v);
        for (x, y) in view.apply(&v).iter().zip(dense.iter()) {
            assert!((x - y).abs() < 1e-14);
        }
    }
}
