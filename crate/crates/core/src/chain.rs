//! Birth-death chain specifications and their classical transition kernels.
//!
//! Each dimension `i` is a chain on `{0, ..., N_i}` with reflecting ends.
//! Given that dimension `i` is selected, it moves down with probability
//! `p_i(k)` and up with probability `1 - p_i(k)`; `p_i(0) = 0` and
//! `p_i(N_i) = 1`. The composite kernel selects dimension `i` with
//! probability `q_i`, so
//!
//! ```text
//! P_N = sum_i q_i (I ⊗ ... ⊗ P_i ⊗ ... ⊗ I)
//! ```
//!
//! where `P_i` is the conditional kernel of dimension `i`.

use ndarray::Array2;

use crate::error::{invalid, Result};
use crate::space::{add_embedded, ProductSpace};

const SELECT_SUM_TOL: f64 = 1e-12;
const MASS_TOL: f64 = 1e-10;

/// One birth-death dimension with `size + 1` states.
#[derive(Debug, Clone, PartialEq)]
pub struct DimensionSpec {
    size: usize,
    /// `decrease_prob[k - 1]` is `p(k)` for interior `k = 1..size-1`.
    decrease_prob: Vec<f64>,
}

impl DimensionSpec {
    /// `decrease_prob` lists `p(1), ..., p(size - 1)`, each strictly inside (0, 1).
    pub fn new(size: usize, decrease_prob: Vec<f64>) -> Result<Self> {
        if size == 0 {
            return Err(invalid("dimension size must be at least 1"));
        }
        if decrease_prob.len() != size - 1 {
            return Err(invalid(format!(
                "dimension of size {size} needs {} interior decrease probabilities, got {}",
                size - 1,
                decrease_prob.len()
            )));
        }
        if let Some((k, p)) = decrease_prob
            .iter()
            .enumerate()
            .find(|(_, &p)| !(p > 0.0 && p < 1.0))
        {
            return Err(invalid(format!(
                "decrease probability p({}) = {p} must lie strictly inside (0, 1)",
                k + 1
            )));
        }
        Ok(Self { size, decrease_prob })
    }

    /// Ehrenfest urn dimension: `p(k) = k / n`.
    pub fn ehrenfest(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(invalid("Ehrenfest dimension needs n >= 1"));
        }
        let table = (1..n).map(|k| k as f64 / n as f64).collect();
        Self::new(n, table)
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn num_states(&self) -> usize {
        self.size + 1
    }

    /// Interior table `p(1), ..., p(size - 1)`.
    pub fn decrease_prob(&self) -> &[f64] {
        &self.decrease_prob
    }

    /// `p(k)` including the reflecting boundary values.
    pub fn decrease_at(&self, k: usize) -> f64 {
        match k {
            0 => 0.0,
            k if k >= self.size => 1.0,
            k => self.decrease_prob[k - 1],
        }
    }
}

/// Ehrenfest urn dimension with `n` balls of one kind.
pub fn ehrenfest_dimension(n: usize) -> Result<DimensionSpec> {
    DimensionSpec::ehrenfest(n)
}

/// A `d`-dimensional chain: per-dimension specs plus selection probabilities.
#[derive(Debug, Clone, PartialEq)]
pub struct MultiChainSpec {
    dims: Vec<DimensionSpec>,
    select_prob: Vec<f64>,
}

impl MultiChainSpec {
    pub fn new(dims: Vec<DimensionSpec>, select_prob: Vec<f64>) -> Result<Self> {
        if dims.is_empty() {
            return Err(invalid("a chain needs at least one dimension"));
        }
        if dims.len() != select_prob.len() {
            return Err(invalid(format!(
                "{} dimensions but {} selection probabilities",
                dims.len(),
                select_prob.len()
            )));
        }
        if let Some((i, q)) = select_prob
            .iter()
            .enumerate()
            .find(|(_, &q)| !(q > 0.0 && q.is_finite()))
        {
            return Err(invalid(format!(
                "selection probability q({}) = {q} must be positive",
                i + 1
            )));
        }
        let total: f64 = select_prob.iter().sum();
        if (total - 1.0).abs() > SELECT_SUM_TOL {
            return Err(invalid(format!(
                "selection probabilities sum to {total}, expected 1"
            )));
        }
        Ok(Self { dims, select_prob })
    }

    /// Every dimension selected with probability `1 / d`.
    pub fn uniform(dims: Vec<DimensionSpec>) -> Result<Self> {
        let d = dims.len().max(1);
        Self::new(dims, vec![1.0 / d as f64; d])
    }

    pub fn dims(&self) -> &[DimensionSpec] {
        &self.dims
    }

    pub fn select_prob(&self) -> &[f64] {
        &self.select_prob
    }

    pub fn num_dims(&self) -> usize {
        self.dims.len()
    }

    pub fn space(&self) -> ProductSpace {
        ProductSpace::new(self.dims.iter().map(DimensionSpec::num_states).collect())
            .expect("validated spec has at least one dimension")
    }
}

/// Within-dimension kernel, conditioned on the dimension being selected.
#[derive(Debug, Clone, PartialEq)]
pub struct ConditionalTransitionMatrix {
    entries: Array2<f64>,
}

impl ConditionalTransitionMatrix {
    pub fn from_spec(spec: &DimensionSpec) -> Self {
        let n = spec.num_states();
        let mut entries = Array2::zeros((n, n));
        for k in 0..n {
            let down = spec.decrease_at(k);
            if k > 0 {
                entries[[k, k - 1]] = down;
            }
            if k + 1 < n {
                entries[[k, k + 1]] = 1.0 - down;
            }
        }
        Self { entries }
    }

    pub fn entries(&self) -> &Array2<f64> {
        &self.entries
    }

    pub fn num_states(&self) -> usize {
        self.entries.nrows()
    }

    /// Probability of moving from `k` to `k + 1`.
    pub fn up(&self, k: usize) -> f64 {
        self.entries[[k, k + 1]]
    }

    /// Probability of moving from `k` to `k - 1`.
    pub fn down(&self, k: usize) -> f64 {
        self.entries[[k, k - 1]]
    }
}

pub fn build_conditional_matrix(spec: &DimensionSpec) -> ConditionalTransitionMatrix {
    ConditionalTransitionMatrix::from_spec(spec)
}

/// A normalized, nonnegative mass function on positions `0..len`.
#[derive(Debug, Clone, PartialEq)]
pub struct ProbabilityVector {
    mass: Vec<f64>,
}

impl ProbabilityVector {
    pub fn new(mass: Vec<f64>) -> Result<Self> {
        if mass.is_empty() {
            return Err(invalid("probability vector is empty"));
        }
        if let Some((k, m)) = mass
            .iter()
            .enumerate()
            .find(|(_, &m)| !(m >= 0.0 && m.is_finite()))
        {
            return Err(invalid(format!("mass at position {k} is {m}")));
        }
        let total: f64 = mass.iter().sum();
        if (total - 1.0).abs() > MASS_TOL {
            return Err(invalid(format!("total mass is {total}, expected 1")));
        }
        Ok(Self { mass })
    }

    pub fn point_mass(len: usize, at: usize) -> Result<Self> {
        if at >= len {
            return Err(invalid(format!("position {at} outside 0..{len}")));
        }
        let mut mass = vec![0.0; len];
        mass[at] = 1.0;
        Ok(Self { mass })
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.mass
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.mass
    }

    pub fn len(&self) -> usize {
        self.mass.len()
    }

    pub fn is_empty(&self) -> bool {
        self.mass.is_empty()
    }

    pub fn total(&self) -> f64 {
        self.mass.iter().sum()
    }
}

/// Detailed-balance stationary law via `pi(k+1) = pi(k) up(k) / down(k+1)`.
pub fn stationary_distribution(m: &ConditionalTransitionMatrix) -> ProbabilityVector {
    let n = m.num_states();
    let mut pi = Vec::with_capacity(n);
    pi.push(1.0);
    for k in 0..n - 1 {
        let next = pi[k] * m.up(k) / m.down(k + 1);
        pi.push(next);
    }
    let total: f64 = pi.iter().sum();
    pi.iter_mut().for_each(|x| *x /= total);
    ProbabilityVector { mass: pi }
}

/// Largest pairwise violation of `pi(k) P[k][k+1] = pi(k+1) P[k+1][k]`.
pub fn detailed_balance_defect(m: &ConditionalTransitionMatrix, pi: &ProbabilityVector) -> f64 {
    let pi = pi.as_slice();
    (0..m.num_states() - 1)
        .map(|k| (pi[k] * m.up(k) - pi[k + 1] * m.down(k + 1)).abs())
        .fold(0.0, f64::max)
}

/// `max_k |(pi P)_k - pi_k|`.
pub fn stationarity_defect(m: &ConditionalTransitionMatrix, pi: &ProbabilityVector) -> f64 {
    let row = ndarray::ArrayView1::from(pi.as_slice());
    let image = row.dot(m.entries());
    image
        .iter()
        .zip(pi.as_slice())
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max)
}

/// Dense composite kernel `P_N` over the mixed-radix product space.
pub fn full_transition_matrix(spec: &MultiChainSpec, cap: usize) -> Result<Array2<f64>> {
    let space = spec.space();
    let size = space.check_cap(cap)?;
    let mut full = Array2::zeros((size, size));
    for (i, (dim, &q)) in spec.dims().iter().zip(spec.select_prob()).enumerate() {
        let local = ConditionalTransitionMatrix::from_spec(dim);
        add_embedded(&mut full, &space, i, local.entries(), q);
    }
    Ok(full)
}

/// Row vector evolution `init · P^steps`.
pub fn evolve_classical(
    init: &ProbabilityVector,
    p: &Array2<f64>,
    steps: usize,
) -> Result<ProbabilityVector> {
    if p.nrows() != p.ncols() || p.nrows() != init.len() {
        return Err(invalid(format!(
            "distribution of length {} cannot be evolved by a {}x{} matrix",
            init.len(),
            p.nrows(),
            p.ncols()
        )));
    }
    let mut row = ndarray::Array1::from(init.as_slice().to_vec());
    for _ in 0..steps {
        row = row.dot(p);
    }
    ProbabilityVector::new(row.to_vec())
}
