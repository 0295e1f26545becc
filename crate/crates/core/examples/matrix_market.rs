//! Build the 2-sparse encoding matrix of a chain, export it as MatrixMarket and read it back.

use qlsplab::encoding::{BasisIndex, SparseOracleView, DEFAULT_DENSE_CAP};
use qlsplab::ledger::QueryLedger;
use qlsplab::mtx;
use qlsplab::permchain::PermutationChain;

fn main() -> qlsplab::Result<()> {
    let chain = PermutationChain::from_arrays(3, 2, &[vec![1, 2, 0], vec![0, 2, 1]])?;
    let view = SparseOracleView::new(&chain);
    let dims = view.dims();
    println!("N = {}, q = {}, dimension 6qN = {}", dims.n, dims.q, dims.dim());
    println!("c = {:.6}, d = {:.6}", view.c(), view.d());

    let row = BasisIndex::new(1, 1, 2).flatten(dims);
    let mut ledger = QueryLedger::new();
    for k in 1..=2 {
        let col = view.oracle_sparse_index(&mut ledger, row, k)?;
        let value = view.oracle_entry(&mut ledger, row, col)?;
        println!("row {row}: k={k} -> col {col} ({:?}) = {value:.6}", BasisIndex::unflatten(dims, col));
    }
    println!("PI queries spent: {}", ledger.counts().total);

    let dir = std::env::temp_dir().join("qlsplab-example");
    std::fs::create_dir_all(&dir)?;
    let path = dir.join("a.mtx");
    mtx::write(&path, dims.dim(), dims.dim(), &view.triplets())?;
    let back = mtx::read(&path)?.to_dense();
    let dense = view.materialize_dense(DEFAULT_DENSE_CAP)?;
    println!("wrote {}, max round-trip error {:e}", path.display(), (back - &dense).amax());
    println!("symmetric: {}", dense == dense.transpose());
    Ok(())
}
