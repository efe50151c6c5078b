//! Continuous-time quantum walks on multi-dimensional birth-death chains.
//!
//! The walk on a `d`-dimensional product of birth-death chains is driven by
//! the Kronecker sum `J_N = sum_l q_l (I ⊗ ... ⊗ J_l ⊗ ... ⊗ I)`. Because the
//! summands commute, the transition probability on the full product space is
//! the product of one-dimensional transition probabilities, each evaluated at
//! the rescaled elapsed time `q_l t`. This crate computes both sides: the
//! factorized fast path from per-dimension spectra, and a dense oracle over
//! the full product space for cross-checking.
//!
//! Modules:
//! - [`chain`]: chain specifications, conditional kernels, stationary laws.
//! - [`spectral`]: Jacobi matrices, tridiagonal eigensolver, weights and
//!   orthogonal polynomial tables.
//! - [`ctqw`]: propagators, factorized and dense transition probabilities.
//! - [`stats`]: moments, exact sum laws, Gaussian CDF, distances.
//! - [`expm`]: a structure-blind matrix exponential used as a reference.

pub mod chain;
pub mod ctqw;
pub mod error;
pub mod expm;
pub mod space;
pub mod spectral;
pub mod stats;

pub use chain::{
    build_conditional_matrix, detailed_balance_defect, ehrenfest_dimension, evolve_classical,
    full_transition_matrix, stationarity_defect, stationary_distribution,
    ConditionalTransitionMatrix, DimensionSpec, MultiChainSpec, ProbabilityVector,
};
pub use ctqw::{
    ehrenfest_sum_law, position_distribution, propagator, transition_prob_1d,
    transition_prob_dense, transition_prob_factorized, DenseOracle, JointDistribution,
    Propagator, StateVector,
};
pub use ndarray;
pub use error::{Error, Result};
pub use space::{ProductSpace, DEFAULT_ORACLE_CAP};
pub use spectral::{
    eigendecompose, jacobi_matrix, orthogonality_defect, symmetrize, SpectralData,
    SymmetricTridiagonal,
};
pub use stats::{
    clt_distance, convolve_sum, gaussian_cdf, moments, total_variation, SumDistribution,
};
