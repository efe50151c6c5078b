//! Continuous-time quantum walk propagators and transition probabilities.
//!
//! A single dimension evolves under `U(t) = exp(i t J) = sum_m e^{i t lambda_m} v_m v_m^T`.
//! On the product space the generator is the Kronecker sum
//! `J_N = sum_l q_l (I ⊗ ... ⊗ J_l ⊗ ... ⊗ I)`; its summands commute, so
//!
//! ```text
//! |<k| exp(i t J_N) |j>|^2 = prod_l |<k_l| exp(i q_l t J_l) |j_l>|^2
//! ```
//!
//! The left side is computed by [`DenseOracle`], the right side by
//! [`transition_prob_factorized`].

use ndarray::Array2;
use num_complex::Complex64;

use crate::chain::{MultiChainSpec, ProbabilityVector};
use crate::error::{invalid, Error, Result};
use crate::space::{add_embedded, kron_all, kron_vectors, ProductSpace};
use crate::spectral::{jacobi_matrix, max_identity_deviation, SpectralData};
use crate::stats::binomial_pmf;

/// Largest tolerated `|J_N V - V Lambda|` entry in the dense oracle.
const EIGEN_RESIDUAL_TOL: f64 = 1e-9;

/// `exp(i t H)` where `H = V diag(lambda) V^T` with real orthogonal `V`.
fn spectral_exponential(vectors: &Array2<f64>, eigenvalues: &[f64], t: f64) -> Array2<Complex64> {
    let mut cos_part = vectors.clone();
    let mut sin_part = vectors.clone();
    for ((mut c, mut s), &lam) in cos_part
        .columns_mut()
        .into_iter()
        .zip(sin_part.columns_mut())
        .zip(eigenvalues)
    {
        let (sn, cs) = (t * lam).sin_cos();
        c *= cs;
        s *= sn;
    }
    let re = cos_part.dot(&vectors.t());
    let im = sin_part.dot(&vectors.t());
    ndarray::Zip::from(&re)
        .and(&im)
        .map_collect(|&r, &i| Complex64::new(r, i))
}

/// Time-evolution operator `exp(i t J)`.
#[derive(Debug, Clone, PartialEq)]
pub struct Propagator {
    time: f64,
    matrix: Array2<Complex64>,
}

impl Propagator {
    pub fn time(&self) -> f64 {
        self.time
    }

    pub fn matrix(&self) -> &Array2<Complex64> {
        &self.matrix
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    /// `<to| U |from>`.
    pub fn element(&self, to: usize, from: usize) -> Complex64 {
        self.matrix[[to, from]]
    }

    /// `max |U^dagger U - I|`.
    pub fn unitarity_defect(&self) -> f64 {
        let adjoint = self.matrix.t().mapv(|z| z.conj());
        let gram = adjoint.dot(&self.matrix);
        gram.indexed_iter()
            .map(|((i, j), z)| (z - if i == j { Complex64::new(1.0, 0.0) } else { Complex64::new(0.0, 0.0) }).norm())
            .fold(0.0, f64::max)
    }

    /// `max |U - U^T|`.
    pub fn symmetry_defect(&self) -> f64 {
        self.matrix
            .indexed_iter()
            .map(|((i, j), z)| (z - self.matrix[[j, i]]).norm())
            .fold(0.0, f64::max)
    }

    /// `U(t1) U(t2)`, carrying elapsed time `t1 + t2`.
    pub fn compose(&self, other: &Propagator) -> Result<Propagator> {
        if self.dim() != other.dim() {
            return Err(invalid("cannot compose propagators of different dimension"));
        }
        Ok(Propagator {
            time: self.time + other.time,
            matrix: self.matrix.dot(&other.matrix),
        })
    }

    pub fn apply(&self, state: &StateVector) -> Result<StateVector> {
        if state.len() != self.dim() {
            return Err(invalid(format!(
                "state of length {} does not match propagator of dimension {}",
                state.len(),
                self.dim()
            )));
        }
        let psi = ndarray::Array1::from(state.amplitudes.clone());
        Ok(StateVector {
            amplitudes: self.matrix.dot(&psi).to_vec(),
        })
    }
}

/// Normalized complex amplitudes over a position basis.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    amplitudes: Vec<Complex64>,
}

impl StateVector {
    pub fn new(amplitudes: Vec<Complex64>) -> Result<Self> {
        let norm: f64 = amplitudes.iter().map(|z| z.norm_sqr()).sum();
        if (norm - 1.0).abs() > 1e-10 {
            return Err(invalid(format!("state has squared norm {norm}, expected 1")));
        }
        Ok(Self { amplitudes })
    }

    /// The walker localized at `at`.
    pub fn basis(len: usize, at: usize) -> Result<Self> {
        if at >= len {
            return Err(invalid(format!("position {at} outside 0..{len}")));
        }
        let mut amplitudes = vec![Complex64::new(0.0, 0.0); len];
        amplitudes[at] = Complex64::new(1.0, 0.0);
        Ok(Self { amplitudes })
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    pub fn len(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.amplitudes.is_empty()
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amplitudes.iter().map(|z| z.norm_sqr()).sum()
    }

    /// Born-rule position law.
    pub fn probabilities(&self) -> Result<ProbabilityVector> {
        ProbabilityVector::new(self.amplitudes.iter().map(|z| z.norm_sqr()).collect())
    }
}

/// Law of the walker position, stored as independent per-dimension factors
/// and optionally as a dense table over the product space.
#[derive(Debug, Clone, PartialEq)]
pub struct JointDistribution {
    factors: Vec<ProbabilityVector>,
    dense: Option<ProbabilityVector>,
}

impl JointDistribution {
    pub fn new(factors: Vec<ProbabilityVector>) -> Result<Self> {
        if factors.is_empty() {
            return Err(invalid("joint distribution needs at least one factor"));
        }
        Ok(Self { factors, dense: None })
    }

    pub fn factors(&self) -> &[ProbabilityVector] {
        &self.factors
    }

    pub fn dense(&self) -> Option<&ProbabilityVector> {
        self.dense.as_ref()
    }

    pub fn space(&self) -> ProductSpace {
        ProductSpace::new(self.factors.iter().map(ProbabilityVector::len).collect())
            .expect("at least one factor")
    }

    /// Attaches a dense table, e.g. from [`DenseOracle::position_distribution`].
    pub fn with_dense(mut self, dense: ProbabilityVector) -> Result<Self> {
        if dense.len() != self.space().len() {
            return Err(invalid(format!(
                "dense table has {} entries, product space has {}",
                dense.len(),
                self.space().len()
            )));
        }
        self.dense = Some(dense);
        Ok(self)
    }

    /// Product of the factors over the mixed-radix product space.
    pub fn densify(&self, cap: usize) -> Result<ProbabilityVector> {
        self.space().check_cap(cap)?;
        ProbabilityVector::new(kron_vectors(self.factors.iter().map(ProbabilityVector::as_slice)))
    }
}

/// `exp(i t J)` from one dimension's spectral data.
pub fn propagator(s: &SpectralData, t: f64) -> Propagator {
    Propagator {
        time: t,
        matrix: spectral_exponential(s.eigenvectors(), s.eigenvalues(), t),
    }
}

fn check_position(s: &SpectralData, pos: usize, what: &str) -> Result<()> {
    if pos >= s.num_states() {
        return Err(invalid(format!(
            "{what} position {pos} outside 0..={}",
            s.num_states() - 1
        )));
    }
    Ok(())
}

/// `<k| exp(i t J) |j>` as `sum_m e^{i t lambda_m} v_m(k) v_m(j)`.
pub fn transition_amplitude_1d(s: &SpectralData, t: f64, j: usize, k: usize) -> Result<Complex64> {
    check_position(s, j, "start")?;
    check_position(s, k, "target")?;
    let v = s.eigenvectors();
    Ok(s
        .eigenvalues()
        .iter()
        .enumerate()
        .map(|(m, &lam)| Complex64::from_polar(v[[k, m]] * v[[j, m]], t * lam))
        .sum())
}

/// The same amplitude through the weight function:
/// `sum_m e^{i t lambda_m} p_m(k) p_m(j) mu(lambda_m)`.
pub fn weighted_transition_amplitude(
    s: &SpectralData,
    t: f64,
    j: usize,
    k: usize,
) -> Result<Complex64> {
    check_position(s, j, "start")?;
    check_position(s, k, "target")?;
    let p = s.poly_table();
    Ok(s
        .eigenvalues()
        .iter()
        .zip(s.weights())
        .enumerate()
        .map(|(m, (&lam, &mu))| Complex64::from_polar(p[[k, m]] * p[[j, m]] * mu, t * lam))
        .sum())
}

/// `|<k| exp(i t J) |j>|^2` for one dimension.
pub fn transition_prob_1d(s: &SpectralData, t: f64, j: usize, k: usize) -> Result<f64> {
    Ok(transition_amplitude_1d(s, t, j, k)?.norm_sqr())
}

/// Law of the position at elapsed time `t` for a walker started at `j`.
pub fn transition_row_1d(s: &SpectralData, t: f64, j: usize) -> Result<ProbabilityVector> {
    check_position(s, j, "start")?;
    let row = (0..s.num_states())
        .map(|k| transition_prob_1d(s, t, j, k))
        .collect::<Result<Vec<_>>>()?;
    ProbabilityVector::new(row)
}

/// `table[[j, k]] = P(k | j)` at elapsed time `t`.
pub fn transition_table_1d(s: &SpectralData, t: f64) -> Array2<f64> {
    propagator(s, t).matrix.t().mapv(|z| z.norm_sqr())
}

fn check_spectra(spec: &MultiChainSpec, spectra: &[SpectralData]) -> Result<()> {
    if spectra.len() != spec.num_dims() {
        return Err(invalid(format!(
            "{} spectra supplied for {} dimensions",
            spectra.len(),
            spec.num_dims()
        )));
    }
    for (i, (s, d)) in spectra.iter().zip(spec.dims()).enumerate() {
        if s.num_states() != d.num_states() {
            return Err(invalid(format!(
                "spectrum {} has {} states, dimension has {}",
                i + 1,
                s.num_states(),
                d.num_states()
            )));
        }
    }
    Ok(())
}

/// Per-dimension spectral data for every dimension of `spec`.
pub fn spectra_for(spec: &MultiChainSpec) -> Result<Vec<SpectralData>> {
    spec.dims().iter().map(SpectralData::for_dimension).collect()
}

/// Product over dimensions of 1-D transition probabilities at time `q_l t`.
pub fn transition_prob_factorized(
    spec: &MultiChainSpec,
    spectra: &[SpectralData],
    t: f64,
    j: &[usize],
    k: &[usize],
) -> Result<f64> {
    check_spectra(spec, spectra)?;
    let space = spec.space();
    space.check_index(j)?;
    space.check_index(k)?;
    spectra
        .iter()
        .zip(spec.select_prob())
        .zip(j.iter().zip(k))
        .try_fold(1.0, |acc, ((s, &q), (&jl, &kl))| {
            Ok(acc * transition_prob_1d(s, q * t, jl, kl)?)
        })
}

/// All-pairs table `[[j, k]] = P(k | j)` on the product space, assembled as
/// the Kronecker product of 1-D tables at times `q_l t`.
pub fn factorized_transition_table(
    spec: &MultiChainSpec,
    spectra: &[SpectralData],
    t: f64,
    cap: usize,
) -> Result<Array2<f64>> {
    check_spectra(spec, spectra)?;
    spec.space().check_cap(cap)?;
    let tables: Vec<_> = spectra
        .iter()
        .zip(spec.select_prob())
        .map(|(s, &q)| transition_table_1d(s, q * t))
        .collect();
    Ok(kron_all(&tables))
}

/// Factorized position law at elapsed time `t` for a walker started at `j`.
pub fn position_distribution(
    spec: &MultiChainSpec,
    spectra: &[SpectralData],
    t: f64,
    j: &[usize],
) -> Result<JointDistribution> {
    check_spectra(spec, spectra)?;
    spec.space().check_index(j)?;
    let factors = spectra
        .iter()
        .zip(spec.select_prob())
        .zip(j)
        .map(|((s, &q), &jl)| transition_row_1d(s, q * t, jl))
        .collect::<Result<Vec<_>>>()?;
    JointDistribution::new(factors)
}

/// Dense evaluation on the full product space.
///
/// Assembles `J_N` as a dense matrix, takes its eigenpairs from the tensor
/// products of per-dimension eigenvectors (eigenvalues are the `q`-weighted
/// sums), verifies `J_N V = V Lambda`, and exponentiates as `V e^{i t Lambda} V^T`.
#[derive(Debug, Clone)]
pub struct DenseOracle {
    space: ProductSpace,
    generator: Array2<f64>,
    eigenvalues: Vec<f64>,
    eigenvectors: Array2<f64>,
    eigen_residual: f64,
}

impl DenseOracle {
    pub fn new(spec: &MultiChainSpec, cap: usize) -> Result<Self> {
        let space = spec.space();
        let size = space.check_cap(cap)?;

        let mut generator = Array2::zeros((size, size));
        let mut spectra = Vec::with_capacity(spec.num_dims());
        for (i, (dim, &q)) in spec.dims().iter().zip(spec.select_prob()).enumerate() {
            let jacobi = jacobi_matrix(dim)?;
            add_embedded(&mut generator, &space, i, &jacobi.to_dense(), q);
            spectra.push(crate::spectral::eigendecompose(&jacobi)?);
        }

        let eigenvectors = kron_all(spectra.iter().map(SpectralData::eigenvectors));
        let eigenvalues: Vec<f64> = (0..size)
            .map(|flat| {
                space
                    .decode(flat)
                    .iter()
                    .zip(&spectra)
                    .zip(spec.select_prob())
                    .map(|((&l, s), &q)| q * s.eigenvalues()[l])
                    .sum()
            })
            .collect();

        let lhs = generator.dot(&eigenvectors);
        let mut rhs = eigenvectors.clone();
        for (mut col, &lam) in rhs.columns_mut().into_iter().zip(&eigenvalues) {
            col *= lam;
        }
        let eigen_residual = (&lhs - &rhs).iter().fold(0.0f64, |m, x| m.max(x.abs()));
        if eigen_residual > EIGEN_RESIDUAL_TOL {
            return Err(Error::NumericalFailure(format!(
                "tensor eigenbasis residual {eigen_residual:e} exceeds {EIGEN_RESIDUAL_TOL:e}"
            )));
        }

        Ok(Self {
            space,
            generator,
            eigenvalues,
            eigenvectors,
            eigen_residual,
        })
    }

    pub fn space(&self) -> &ProductSpace {
        &self.space
    }

    /// Dense `J_N`.
    pub fn generator(&self) -> &Array2<f64> {
        &self.generator
    }

    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    /// `max |J_N V - V Lambda|` observed at construction.
    pub fn eigen_residual(&self) -> f64 {
        self.eigen_residual
    }

    /// `max |V^T V - I|` of the tensor eigenbasis.
    pub fn orthonormality_defect(&self) -> f64 {
        max_identity_deviation(&self.eigenvectors.t().dot(&self.eigenvectors))
    }

    pub fn propagator(&self, t: f64) -> Propagator {
        Propagator {
            time: t,
            matrix: spectral_exponential(&self.eigenvectors, &self.eigenvalues, t),
        }
    }

    /// `table[[j, k]] = P(k | j)` for all pairs of product states.
    pub fn transition_table(&self, t: f64) -> Array2<f64> {
        self.propagator(t).matrix.t().mapv(|z| z.norm_sqr())
    }

    pub fn transition_prob(&self, t: f64, j: &[usize], k: &[usize]) -> Result<f64> {
        let (jf, kf) = (self.space.encode(j)?, self.space.encode(k)?);
        Ok(self.propagator(t).element(kf, jf).norm_sqr())
    }

    /// Position law over the whole product space for a walker started at `j`.
    pub fn position_distribution(&self, t: f64, j: &[usize]) -> Result<ProbabilityVector> {
        let start = StateVector::basis(self.space.len(), self.space.encode(j)?)?;
        self.propagator(t).apply(&start)?.probabilities()
    }
}

/// `|<k| exp(i t J_N) |j>|^2` through the dense oracle.
pub fn transition_prob_dense(
    spec: &MultiChainSpec,
    t: f64,
    j: &[usize],
    k: &[usize],
    cap: usize,
) -> Result<f64> {
    DenseOracle::new(spec, cap)?.transition_prob(t, j, k)
}

/// Position law of the sum of `d` edge walkers started at 0, each run for
/// time `t / d`: `Binomial(d, sin^2(t / d))`.
pub fn ehrenfest_sum_law(d: usize, t: f64) -> Result<ProbabilityVector> {
    if d == 0 {
        return Err(invalid("number of edges must be at least 1"));
    }
    binomial_pmf(d, (t / d as f64).sin().powi(2))
}
