//! Symmetrization of birth-death kernels and their spectral data.
//!
//! For a reversible kernel `P` with stationary law `pi`, the Jacobi matrix
//! `J = D^{1/2} P D^{-1/2}` (with `D = diag(pi)`) is symmetric tridiagonal and
//! shares the spectrum of `P`. Its eigenvectors `v_l`, normalized so that the
//! first component is positive, define the weights `mu(lambda_l) = v_l(0)^2`
//! and the polynomial values `p_l(j) = v_l(j) / v_l(0)`, which are
//! orthonormal with respect to `mu`.

use ndarray::Array2;
use serde::Serialize;

use crate::chain::{detailed_balance_defect, ConditionalTransitionMatrix, DimensionSpec, ProbabilityVector};
use crate::error::{invalid, Error, Result};
use crate::space::{kron_all, kron_vectors, ProductSpace};

/// Implicit QL sweeps allowed per eigenvalue before giving up.
const MAX_SWEEPS: usize = 30;

/// Unreduced symmetric tridiagonal matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct SymmetricTridiagonal {
    diag: Vec<f64>,
    offdiag: Vec<f64>,
}

impl SymmetricTridiagonal {
    pub fn new(diag: Vec<f64>, offdiag: Vec<f64>) -> Result<Self> {
        if diag.is_empty() {
            return Err(invalid("tridiagonal matrix must have at least one row"));
        }
        if offdiag.len() + 1 != diag.len() {
            return Err(invalid(format!(
                "{} diagonal entries need {} off-diagonal entries, got {}",
                diag.len(),
                diag.len() - 1,
                offdiag.len()
            )));
        }
        if diag.iter().any(|x| !x.is_finite()) {
            return Err(invalid("diagonal entries must be finite"));
        }
        if let Some((k, e)) = offdiag
            .iter()
            .enumerate()
            .find(|(_, &e)| !(e > 0.0 && e.is_finite()))
        {
            return Err(invalid(format!(
                "off-diagonal entry {k} is {e}; an unreduced matrix needs positive couplings"
            )));
        }
        Ok(Self { diag, offdiag })
    }

    pub fn diag(&self) -> &[f64] {
        &self.diag
    }

    pub fn offdiag(&self) -> &[f64] {
        &self.offdiag
    }

    pub fn len(&self) -> usize {
        self.diag.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn to_dense(&self) -> Array2<f64> {
        let n = self.len();
        let mut out = Array2::zeros((n, n));
        for (k, &d) in self.diag.iter().enumerate() {
            out[[k, k]] = d;
        }
        for (k, &e) in self.offdiag.iter().enumerate() {
            out[[k, k + 1]] = e;
            out[[k + 1, k]] = e;
        }
        out
    }
}

/// Builds `J = D^{1/2} m D^{-1/2}` from a reversible kernel and its stationary law.
pub fn symmetrize(
    m: &ConditionalTransitionMatrix,
    pi: &ProbabilityVector,
) -> Result<SymmetricTridiagonal> {
    let n = m.num_states();
    if pi.len() != n {
        return Err(invalid(format!(
            "stationary law has {} entries, kernel has {n} states",
            pi.len()
        )));
    }
    if pi.as_slice().iter().any(|&x| x <= 0.0) {
        return Err(invalid("stationary law must be strictly positive"));
    }
    let scale = pi.as_slice().iter().cloned().fold(0.0, f64::max);
    if detailed_balance_defect(m, pi) > 1e-9 * scale {
        return Err(invalid(
            "supplied law does not satisfy detailed balance for this kernel",
        ));
    }
    let diag = (0..n).map(|k| m.entries()[[k, k]]).collect();
    let offdiag = (0..n - 1)
        .map(|k| (m.up(k) * m.down(k + 1)).sqrt())
        .collect();
    SymmetricTridiagonal::new(diag, offdiag)
}

/// Eigen-decomposition of one dimension's Jacobi matrix.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(into = "SpectralRecord")]
pub struct SpectralData {
    eigenvalues: Vec<f64>,
    /// Column `l` is the unit eigenvector for `eigenvalues[l]`.
    eigenvectors: Array2<f64>,
    weights: Vec<f64>,
    /// `poly_table[[j, l]] = p_l(j)`.
    poly_table: Array2<f64>,
}

impl SpectralData {
    /// Full pipeline for a single dimension: kernel, stationary law, Jacobi
    /// matrix, eigendecomposition.
    pub fn for_dimension(spec: &DimensionSpec) -> Result<Self> {
        eigendecompose(&jacobi_matrix(spec)?)
    }

    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    pub fn eigenvectors(&self) -> &Array2<f64> {
        &self.eigenvectors
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn poly_table(&self) -> &Array2<f64> {
        &self.poly_table
    }

    pub fn num_states(&self) -> usize {
        self.eigenvalues.len()
    }

    /// `max |V^T V - I|`.
    pub fn orthonormality_defect(&self) -> f64 {
        let v = &self.eigenvectors;
        let gram = v.t().dot(v);
        max_identity_deviation(&gram)
    }

    /// `max |V diag(lambda) V^T - J|`.
    pub fn reconstruction_defect(&self, j: &SymmetricTridiagonal) -> f64 {
        let v = &self.eigenvectors;
        let mut scaled = v.clone();
        for (mut col, &lam) in scaled.columns_mut().into_iter().zip(&self.eigenvalues) {
            col *= lam;
        }
        let rebuilt = scaled.dot(&v.t());
        (&rebuilt - &j.to_dense())
            .iter()
            .fold(0.0, |m, x| m.max(x.abs()))
    }
}

#[derive(Serialize)]
struct SpectralRecord {
    eigenvalues: Vec<f64>,
    eigenvectors: Vec<Vec<f64>>,
    weights: Vec<f64>,
    poly_table: Vec<Vec<f64>>,
}

impl From<SpectralData> for SpectralRecord {
    fn from(s: SpectralData) -> Self {
        let rows = |m: &Array2<f64>| m.rows().into_iter().map(|r| r.to_vec()).collect();
        Self {
            eigenvectors: rows(&s.eigenvectors),
            poly_table: rows(&s.poly_table),
            eigenvalues: s.eigenvalues,
            weights: s.weights,
        }
    }
}

pub(crate) fn max_identity_deviation(m: &Array2<f64>) -> f64 {
    m.indexed_iter()
        .map(|((i, j), &x)| (x - if i == j { 1.0 } else { 0.0 }).abs())
        .fold(0.0, f64::max)
}

/// The Jacobi matrix of a dimension spec.
pub fn jacobi_matrix(spec: &DimensionSpec) -> Result<SymmetricTridiagonal> {
    let m = ConditionalTransitionMatrix::from_spec(spec);
    let pi = crate::chain::stationary_distribution(&m);
    symmetrize(&m, &pi)
}

/// Implicit QL with Wilkinson shifts, eigenvectors accumulated.
///
/// Eigenvalues come back ascending; each eigenvector column is flipped so that
/// its first component is positive.
pub fn eigendecompose(j: &SymmetricTridiagonal) -> Result<SpectralData> {
    let n = j.len();
    let mut d = j.diag.clone();
    // e[i] couples rows i and i + 1; e[n - 1] is scratch.
    let mut e = j.offdiag.clone();
    e.push(0.0);
    let mut z = Array2::<f64>::eye(n);

    // The Ehrenfest family has an all-zero diagonal, so a deflation test
    // relative to |d[m]| + |d[m+1]| alone can stall; use the matrix scale.
    let anorm = d
        .iter()
        .zip(&e)
        .map(|(a, b)| a.abs() + b.abs())
        .fold(0.0, f64::max)
        .max(f64::MIN_POSITIVE);
    let tol = f64::EPSILON * anorm;

    for l in 0..n {
        let mut sweeps = 0;
        loop {
            let mut m = l;
            while m + 1 < n {
                let dd = d[m].abs() + d[m + 1].abs();
                if e[m].abs() <= f64::EPSILON * dd || e[m].abs() <= tol {
                    break;
                }
                m += 1;
            }
            if m == l {
                break;
            }
            if sweeps == MAX_SWEEPS {
                return Err(Error::NumericalFailure(format!(
                    "tridiagonal QL did not converge for eigenvalue {l} after {MAX_SWEEPS} sweeps"
                )));
            }
            sweeps += 1;

            let mut g = (d[l + 1] - d[l]) / (2.0 * e[l]);
            let mut r = g.hypot(1.0);
            g = d[m] - d[l] + e[l] / (g + if g >= 0.0 { r } else { -r });
            let (mut s, mut c, mut p) = (1.0, 1.0, 0.0);
            let mut deflated_early = false;
            for i in (l..m).rev() {
                let f = s * e[i];
                let b = c * e[i];
                r = f.hypot(g);
                e[i + 1] = r;
                if r == 0.0 {
                    d[i + 1] -= p;
                    e[m] = 0.0;
                    deflated_early = true;
                    break;
                }
                s = f / r;
                c = g / r;
                g = d[i + 1] - p;
                r = (d[i] - g) * s + 2.0 * c * b;
                p = s * r;
                d[i + 1] = g + p;
                g = c * r - b;
                for k in 0..n {
                    let zk1 = z[[k, i + 1]];
                    let zk = z[[k, i]];
                    z[[k, i + 1]] = s * zk + c * zk1;
                    z[[k, i]] = c * zk - s * zk1;
                }
            }
            if deflated_early {
                continue;
            }
            d[l] -= p;
            e[l] = g;
            e[m] = 0.0;
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| d[a].total_cmp(&d[b]));

    let eigenvalues: Vec<f64> = order.iter().map(|&i| d[i]).collect();
    let mut eigenvectors = Array2::zeros((n, n));
    for (col, &src) in order.iter().enumerate() {
        let sign = if z[[0, src]] < 0.0 { -1.0 } else { 1.0 };
        for row in 0..n {
            eigenvectors[[row, col]] = sign * z[[row, src]];
        }
    }

    let mut poly_table = Array2::zeros((n, n));
    let mut weights = Vec::with_capacity(n);
    for l in 0..n {
        let lead = eigenvectors[[0, l]];
        if lead <= 0.0 {
            return Err(Error::NumericalFailure(format!(
                "eigenvector {l} has vanishing first component"
            )));
        }
        weights.push(lead * lead);
        for row in 0..n {
            poly_table[[row, l]] = eigenvectors[[row, l]] / lead;
        }
    }

    Ok(SpectralData {
        eigenvalues,
        eigenvectors,
        weights,
        poly_table,
    })
}

/// Largest deviation from `delta_{j,k}` of
/// `sum_l prod_m p_{l_m}(j_m) p_{l_m}(k_m) mu(lambda_{l_m})`
/// over all pairs of product states.
pub fn orthogonality_defect(datasets: &[SpectralData], cap: usize) -> Result<f64> {
    if datasets.is_empty() {
        return Err(invalid("orthogonality check needs at least one spectrum"));
    }
    let space = ProductSpace::new(datasets.iter().map(SpectralData::num_states).collect())?;
    space.check_cap(cap)?;
    // table[[j, l]] = prod_m p_{l_m}(j_m); weight[l] = prod_m mu(lambda_{l_m})
    let table = kron_all(datasets.iter().map(SpectralData::poly_table));
    let weight = kron_vectors(datasets.iter().map(SpectralData::weights));
    let mut weighted = table.clone();
    for (mut col, &w) in weighted.columns_mut().into_iter().zip(&weight) {
        col *= w;
    }
    let gram = weighted.dot(&table.t());
    Ok(max_identity_deviation(&gram))
}
