//! Closed-form ground truth for the encoding.
//!
//! `A⁻¹|0̄⟩` is supported on the `b = 1` block at the points `(1, j, x_j)`,
//! where `x_j` is the `x` register after `j` forward `P` steps from `(0, 0)`.
//! Its amplitudes decay as `e^{−j/q}`, so measuring it lands in the window
//! `q < j <= 2q` (where `x_j = Π_q(0)`) with a probability bounded away
//! from zero for every `q`.

use std::f64::consts::E;

use nalgebra::{DMatrix, SymmetricEigen};
use serde::{Deserialize, Serialize};

use crate::encoding::{p_step, BasisIndex, Dims, Direction};
use crate::error::{Error, Result};
use crate::permchain::PermutationChain;

/// Amplitudes over the `6qN` basis.
///
/// Serializes sparsely as `{"N", "q", "support": [[index, amplitude], ..]}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(into = "StateRepr", try_from = "StateRepr")]
pub struct StateVector {
    dims: Dims,
    amplitudes: Vec<f64>,
    normalized: bool,
}

impl StateVector {
    pub fn new(dims: Dims, amplitudes: Vec<f64>) -> Self {
        assert_eq!(amplitudes.len(), dims.dim(), "amplitude count must be 6qN");
        Self {
            dims,
            amplitudes,
            normalized: false,
        }
    }

    /// Scales to unit norm. Zero vectors stay unnormalized.
    pub fn normalize(mut self) -> Self {
        let norm = self.norm();
        if norm > 0.0 {
            self.amplitudes.iter_mut().for_each(|a| *a /= norm);
            self.normalized = true;
        }
        self
    }

    pub fn dims(&self) -> Dims {
        self.dims
    }

    pub fn amplitudes(&self) -> &[f64] {
        &self.amplitudes
    }

    pub fn is_normalized(&self) -> bool {
        self.normalized
    }

    pub fn norm(&self) -> f64 {
        self.amplitudes.iter().map(|a| a * a).sum::<f64>().sqrt()
    }

    pub fn probability(&self, index: BasisIndex) -> f64 {
        let a = self.amplitudes[index.flatten(self.dims)];
        a * a
    }

    /// Non-zero `(flattened index, amplitude)` pairs in index order.
    pub fn support(&self) -> Vec<(usize, f64)> {
        self.amplitudes
            .iter()
            .enumerate()
            .filter(|(_, a)| **a != 0.0)
            .map(|(i, &a)| (i, a))
            .collect()
    }

    pub fn from_support(dims: Dims, support: &[(usize, f64)]) -> Result<Self> {
        let mut amplitudes = vec![0.0; dims.dim()];
        for &(i, a) in support {
            if i >= dims.dim() {
                return Err(Error::IndexOutOfRange {
                    what: "index",
                    value: i,
                    range: format!("[0, {})", dims.dim()),
                });
            }
            amplitudes[i] = a;
        }
        let mut state = Self::new(dims, amplitudes);
        state.normalized = (state.norm() - 1.0).abs() <= 1e-12;
        Ok(state)
    }

    /// Euclidean distance to another state of the same shape.
    pub fn distance(&self, other: &StateVector) -> f64 {
        assert_eq!(self.dims, other.dims);
        self.amplitudes
            .iter()
            .zip(&other.amplitudes)
            .map(|(a, b)| (a - b) * (a - b))
            .sum::<f64>()
            .sqrt()
    }

    /// Probability mass on basis points satisfying `pred`.
    pub fn mass_where(&self, mut pred: impl FnMut(BasisIndex) -> bool) -> f64 {
        let total: f64 = self.amplitudes.iter().map(|a| a * a).sum();
        let hit: f64 = self
            .amplitudes
            .iter()
            .enumerate()
            .filter(|(i, _)| pred(BasisIndex::unflatten(self.dims, *i)))
            .map(|(_, a)| a * a)
            .sum();
        hit / total
    }

    /// Mass on the answer window `q < j <= 2q`.
    pub fn window_mass(&self) -> f64 {
        let q = self.dims.q;
        self.mass_where(|i| i.j > q && i.j <= 2 * q)
    }
}

#[derive(Serialize, Deserialize)]
struct StateRepr {
    #[serde(rename = "N")]
    n: usize,
    q: usize,
    support: Vec<(usize, f64)>,
}

impl From<StateVector> for StateRepr {
    fn from(s: StateVector) -> Self {
        Self {
            n: s.dims.n,
            q: s.dims.q,
            support: s.support(),
        }
    }
}

impl TryFrom<StateRepr> for StateVector {
    type Error = Error;

    fn try_from(r: StateRepr) -> Result<Self> {
        if r.n == 0 || r.q == 0 {
            return Err(Error::BadShape("state needs N >= 1 and q >= 1".into()));
        }
        StateVector::from_support(Dims::new(r.n, r.q), &r.support)
    }
}

/// `x_j` for `j = 0..3q`, by walking `P` forward from `(0, 0)`.
pub fn xj_table(chain: &PermutationChain) -> Vec<usize> {
    let steps = 3 * chain.q();
    let mut table = Vec::with_capacity(steps);
    let (mut j, mut x) = (0, 0);
    for _ in 0..steps {
        table.push(x);
        (j, x) = p_step(chain, j, x, Direction::Forward);
    }
    debug_assert_eq!((j, x), (0, 0));
    table
}

fn decay(q: usize) -> f64 {
    (-1.0 / q as f64).exp()
}

/// `‖A⁻¹|0̄⟩‖` from its closed form.
pub fn closed_form_norm(q: usize) -> f64 {
    let e = decay(q);
    let lead = (1.0 + e) / (1.0 - E.powi(-3));
    (lead * lead * (1.0 - E.powi(-6)) / (1.0 - e * e)).sqrt()
}

/// The normalized solution state of `A v = |0̄⟩` and `‖A⁻¹|0̄⟩‖`.
pub fn exact_solution_state(chain: &PermutationChain) -> (f64, StateVector) {
    let dims = Dims::of(chain);
    let q = chain.q() as f64;
    let lead = (1.0 + decay(chain.q())) / (1.0 - E.powi(-3));
    let mut amplitudes = vec![0.0; dims.dim()];
    for (j, x) in xj_table(chain).into_iter().enumerate() {
        amplitudes[BasisIndex::new(1, j, x).flatten(dims)] = lead * (-(j as f64) / q).exp();
    }
    let state = StateVector::new(dims, amplitudes);
    (closed_form_norm(chain.q()), state.normalize())
}

/// Probability that measuring the solution state yields `q < j <= 2q`.
pub fn success_probability(q: usize) -> f64 {
    assert!(q >= 1);
    (E.powi(-2) - E.powi(-4)) / (1.0 - E.powi(-6)) * (-2.0 / q as f64).exp()
}

/// `q`-independent lower bound of [`success_probability`], attained at `q = 1`.
pub fn success_probability_floor() -> f64 {
    (E.powi(-4) - E.powi(-6)) / (1.0 - E.powi(-6))
}

/// `(1 + e^{−1/q}) / (1 − e^{−1/q})`, the exact `‖A⁻¹‖`.
pub fn kappa_formula(q: usize) -> f64 {
    let e = decay(q);
    (1.0 + e) / (1.0 - e)
}

/// Smallest `q` with `kappa_formula(q) <= (2 + delta)·q`; the ratio decreases in `q`.
pub fn min_certified_q(delta: f64) -> Option<usize> {
    (1..=1_000_000).find(|&q| kappa_formula(q) <= (2.0 + delta) * q as f64)
}

/// Dense `A⁻¹` from its closed form, using `P^{3q} = I` to sum the geometric series exactly.
pub fn closed_form_inverse(chain: &PermutationChain, cap: usize) -> Result<DMatrix<f64>> {
    let dims = Dims::of(chain);
    dims.check_cap(cap)?;
    let q = chain.q() as f64;
    let half = dims.half();
    let scale = (1.0 + decay(chain.q())) / (1.0 - E.powi(-3));
    let mut inv = DMatrix::zeros(dims.dim(), dims.dim());
    for j0 in 0..dims.steps() {
        for x0 in 0..dims.n {
            let z = BasisIndex::new(0, j0, x0).flatten(dims);
            // (I − e^{−1/q}P)⁻¹ sits in the (1, 0) block, (I − e^{−1/q}P⁻¹)⁻¹ in (0, 1).
            let (mut fj, mut fx) = (j0, x0);
            let (mut bj, mut bx) = (j0, x0);
            for k in 0..dims.steps() {
                let w = scale * (-(k as f64) / q).exp();
                inv[(half + BasisIndex::new(0, fj, fx).flatten(dims), z)] = w;
                inv[(BasisIndex::new(0, bj, bx).flatten(dims), half + z)] = w;
                (fj, fx) = p_step(chain, fj, fx, Direction::Forward);
                (bj, bx) = p_step(chain, bj, bx, Direction::Inverse);
            }
        }
    }
    Ok(inv)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpectralReport {
    pub op_norm: f64,
    pub inv_norm: f64,
    /// `op_norm · inv_norm`.
    pub kappa: f64,
    pub kappa_formula: f64,
    pub sigma_min: f64,
    pub delta: f64,
    pub op_norm_ok: bool,
    pub inv_norm_ok: bool,
    pub kappa_delta_ok: bool,
    /// Smallest `q` for which `(2 + delta)·q` bounds `kappa_formula`.
    pub min_certified_q: Option<usize>,
}

impl SpectralReport {
    pub fn passed(&self) -> bool {
        self.op_norm_ok && self.inv_norm_ok && self.kappa_delta_ok
    }
}

pub const DEFAULT_DELTA: f64 = 0.1;

/// Singular spectrum of the symmetric matrix `a` by full eigendecomposition.
pub fn spectral_check(a: &DMatrix<f64>, q: usize, delta: f64, cap: usize) -> Result<SpectralReport> {
    if a.nrows() > cap {
        return Err(Error::TooLarge { dim: a.nrows(), cap });
    }
    let eig = SymmetricEigen::new(a.clone());
    let (sigma_min, op_norm) = eig
        .eigenvalues
        .iter()
        .fold((f64::INFINITY, 0.0f64), |(lo, hi), &l| (lo.min(l.abs()), hi.max(l.abs())));
    if sigma_min < 1e-14 {
        return Err(Error::SingularMatrix(sigma_min));
    }
    let inv_norm = 1.0 / sigma_min;
    let kappa = op_norm * inv_norm;
    let formula = kappa_formula(q);
    Ok(SpectralReport {
        op_norm,
        inv_norm,
        kappa,
        kappa_formula: formula,
        sigma_min,
        delta,
        op_norm_ok: op_norm <= 1.0 + 1e-9,
        inv_norm_ok: (inv_norm - formula).abs() <= 1e-9,
        kappa_delta_ok: kappa <= (2.0 + delta) * q as f64,
        min_certified_q: min_certified_q(delta),
    })
}
