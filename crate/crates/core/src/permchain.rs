//! Permutation chains and the `O_pi` oracle.
//!
//! Permutations are indexed `1..=q`, elements `0..N`. The oracle index `j`
//! runs over `1..=2q`: the upper half addresses the inverses.

use crate::error::{Error, Result};
use crate::ledger::{OracleKind, QueryLedger};
use crate::rng::SplitMix64;

/// A bijection on `{0, .., N-1}` stored as its image table.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Permutation {
    images: Vec<usize>,
}

impl Permutation {
    /// Validates `images`; `None` if it is not a bijection.
    pub fn from_images(images: Vec<usize>) -> Option<Self> {
        let n = images.len();
        let mut seen = vec![false; n];
        for &v in &images {
            if v >= n || std::mem::replace(&mut seen[v], true) {
                return None;
            }
        }
        Some(Self { images })
    }

    pub fn identity(n: usize) -> Self {
        Self {
            images: (0..n).collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.images.len()
    }

    pub fn is_empty(&self) -> bool {
        self.images.is_empty()
    }

    pub fn images(&self) -> &[usize] {
        &self.images
    }

    #[inline]
    pub fn apply(&self, x: usize) -> usize {
        self.images[x]
    }

    pub fn inverse(&self) -> Self {
        let mut inv = vec![0; self.images.len()];
        for (x, &y) in self.images.iter().enumerate() {
            inv[y] = x;
        }
        Self { images: inv }
    }

    /// `self ∘ other`, i.e. `other` first.
    pub fn compose(&self, other: &Permutation) -> Self {
        Self {
            images: other.images.iter().map(|&x| self.images[x]).collect(),
        }
    }

    pub fn is_identity(&self) -> bool {
        self.images.iter().enumerate().all(|(x, &y)| x == y)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PermutationChain {
    n: usize,
    perms: Vec<Permutation>,
    inv_perms: Vec<Permutation>,
}

impl PermutationChain {
    /// Builds a chain from `q` image tables of length `n`.
    pub fn from_arrays(n: usize, q: usize, tables: &[Vec<usize>]) -> Result<Self> {
        if n == 0 || q == 0 {
            return Err(Error::BadShape(format!("need N >= 1 and q >= 1, got N = {n}, q = {q}")));
        }
        if tables.len() != q {
            return Err(Error::BadShape(format!(
                "expected {q} permutation tables, got {}",
                tables.len()
            )));
        }
        let mut perms = Vec::with_capacity(q);
        for (i, table) in tables.iter().enumerate() {
            if table.len() != n {
                return Err(Error::BadShape(format!(
                    "table {} has length {}, expected {n}",
                    i + 1,
                    table.len()
                )));
            }
            let p = Permutation::from_images(table.clone())
                .ok_or(Error::NotABijection { index: i + 1 })?;
            perms.push(p);
        }
        Ok(Self::from_permutations(perms))
    }

    fn from_permutations(perms: Vec<Permutation>) -> Self {
        let n = perms[0].len();
        let inv_perms = perms.iter().map(Permutation::inverse).collect();
        Self { n, perms, inv_perms }
    }

    pub fn identity(n: usize, q: usize) -> Self {
        assert!(n >= 1 && q >= 1);
        Self::from_permutations(vec![Permutation::identity(n); q])
    }

    /// `q` independent uniform permutations of `{0, .., N-1}`.
    ///
    /// One SplitMix64 stream seeded with `seed` drives everything. Each
    /// permutation starts from the identity and is shuffled by Fisher–Yates
    /// from the top: for `i = N-1` down to `1`, swap positions `i` and
    /// `below(i + 1)`, where `below` is unbiased rejection sampling on the raw
    /// 64-bit outputs.
    pub fn random(n: usize, q: usize, seed: u64) -> Self {
        assert!(n >= 1 && q >= 1, "need N >= 1 and q >= 1");
        let mut rng = SplitMix64::new(seed);
        let perms = (0..q)
            .map(|_| {
                let mut images: Vec<usize> = (0..n).collect();
                for i in (1..n).rev() {
                    let k = rng.below(i as u64 + 1) as usize;
                    images.swap(i, k);
                }
                Permutation { images }
            })
            .collect();
        Self::from_permutations(perms)
    }

    /// Domain size `N`.
    pub fn n(&self) -> usize {
        self.n
    }

    /// Chain length `q`.
    pub fn q(&self) -> usize {
        self.perms.len()
    }

    pub fn perms(&self) -> &[Permutation] {
        &self.perms
    }

    /// `pi_j` for `1 <= j <= q`.
    pub fn perm(&self, j: usize) -> &Permutation {
        &self.perms[j - 1]
    }

    /// `pi_j^{-1}` for `1 <= j <= q`.
    pub fn inv_perm(&self, j: usize) -> &Permutation {
        &self.inv_perms[j - 1]
    }

    pub fn tables(&self) -> Vec<Vec<usize>> {
        self.perms.iter().map(|p| p.images.clone()).collect()
    }

    /// `Pi_j(0) = pi_j(...pi_1(0))`, with `Pi_0(0) = 0`. Uncharged ground truth.
    pub fn prefix_compose(&self, j: usize) -> Result<usize> {
        if j > self.q() {
            return Err(Error::IndexOutOfRange {
                what: "j",
                value: j,
                range: format!("[0, {}]", self.q()),
            });
        }
        Ok(self.perms[..j].iter().fold(0, |x, p| p.apply(x)))
    }

    /// `Pi_q(0)`, the answer to the chain problem.
    pub fn answer(&self) -> usize {
        self.perms.iter().fold(0, |x, p| p.apply(x))
    }

    /// Evaluates `O_pi` on `(j, x)`, charging one `PI` query to the current layer.
    ///
    /// Returns `pi_j(x)` for `1 <= j <= q` and `pi_{j-q}^{-1}(x)` for
    /// `q < j <= 2q`.
    pub fn oracle_pi(&self, ledger: &mut QueryLedger, j: usize, x: usize) -> Result<usize> {
        let q = self.q();
        if j == 0 || j > 2 * q {
            return Err(Error::IndexOutOfRange {
                what: "j",
                value: j,
                range: format!("[1, {}]", 2 * q),
            });
        }
        if x >= self.n {
            return Err(Error::IndexOutOfRange {
                what: "x",
                value: x,
                range: format!("[0, {})", self.n),
            });
        }
        ledger.record(OracleKind::Pi);
        Ok(if j <= q {
            self.perms[j - 1].apply(x)
        } else {
            self.inv_perms[j - q - 1].apply(x)
        })
    }
}
