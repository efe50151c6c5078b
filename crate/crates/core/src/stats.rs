//! Moments, exact sum laws, and distances to the standard Gaussian.

use crate::chain::ProbabilityVector;
use crate::error::{invalid, Error, Result};

/// Mean and variance of a law on positions `0..len`.
pub fn moments(p: &ProbabilityVector) -> (f64, f64) {
    let mean: f64 = p
        .as_slice()
        .iter()
        .enumerate()
        .map(|(k, &m)| k as f64 * m)
        .sum();
    let variance = p
        .as_slice()
        .iter()
        .enumerate()
        .map(|(k, &m)| (k as f64 - mean).powi(2) * m)
        .sum();
    (mean, variance)
}

/// Law of an integer-valued sum, with atom `k` located at `origin + k`.
#[derive(Debug, Clone, PartialEq)]
pub struct SumDistribution {
    mass: ProbabilityVector,
    origin: f64,
    mean: f64,
    variance: f64,
}

impl SumDistribution {
    pub fn new(mass: ProbabilityVector) -> Self {
        let (mean, variance) = moments(&mass);
        Self {
            mass,
            origin: 0.0,
            mean,
            variance,
        }
    }

    pub fn mass(&self) -> &ProbabilityVector {
        &self.mass
    }

    pub fn origin(&self) -> f64 {
        self.origin
    }

    pub fn mean(&self) -> f64 {
        self.mean
    }

    pub fn variance(&self) -> f64 {
        self.variance
    }

    /// Relabels the support by `offset`.
    pub fn shifted(&self, offset: f64) -> Self {
        Self {
            mass: self.mass.clone(),
            origin: self.origin + offset,
            mean: self.mean + offset,
            variance: self.variance,
        }
    }
}

/// Exact law of the sum of independent factors, by repeated convolution.
pub fn convolve_sum(factors: &[ProbabilityVector]) -> Result<SumDistribution> {
    let (first, rest) = factors
        .split_first()
        .ok_or_else(|| invalid("convolution needs at least one factor"))?;
    let mut acc = first.as_slice().to_vec();
    for f in rest {
        let f = f.as_slice();
        let mut next = vec![0.0; acc.len() + f.len() - 1];
        for (i, &a) in acc.iter().enumerate() {
            if a == 0.0 {
                continue;
            }
            for (j, &b) in f.iter().enumerate() {
                next[i + j] += a * b;
            }
        }
        acc = next;
    }
    let sum = SumDistribution::new(ProbabilityVector::new(acc)?);

    let (mean, variance) = factors
        .iter()
        .map(moments)
        .fold((0.0, 0.0), |(m, v), (fm, fv)| (m + fm, v + fv));
    let tol = |x: f64| 1e-10 * x.abs().max(1.0);
    if (sum.mean - mean).abs() > tol(mean) || (sum.variance - variance).abs() > tol(variance) {
        return Err(Error::NumericalFailure(format!(
            "convolved moments ({}, {}) disagree with summed factor moments ({mean}, {variance})",
            sum.mean, sum.variance
        )));
    }
    Ok(sum)
}

/// `Binomial(n, p)` probabilities. The coefficient recursion
/// `C(n, k+1) = C(n, k) (n - k) / (k + 1)` is carried in log space.
pub fn binomial_pmf(n: usize, p: f64) -> Result<ProbabilityVector> {
    if !(0.0..=1.0).contains(&p) {
        return Err(invalid(format!("success probability {p} outside [0, 1]")));
    }
    if p == 0.0 || p == 1.0 {
        return ProbabilityVector::point_mass(n + 1, if p == 0.0 { 0 } else { n });
    }
    let (ln_p, ln_q) = (p.ln(), (-p).ln_1p());
    let mut ln_coef = 0.0;
    let mut mass = Vec::with_capacity(n + 1);
    for k in 0..=n {
        mass.push((ln_coef + k as f64 * ln_p + (n - k) as f64 * ln_q).exp());
        ln_coef += ((n - k) as f64 / (k + 1) as f64).ln();
    }
    ProbabilityVector::new(mass)
}

/// Standard normal CDF.
pub fn gaussian_cdf(x: f64) -> f64 {
    0.5 * libm::erfc(-x / std::f64::consts::SQRT_2)
}

/// Kolmogorov distance between the standardized sum of `d` iid factors and
/// the standard Gaussian.
///
/// With per-factor moments `m1 = mean / d` and `v1 = variance / d`, atom `x`
/// maps to `(x - d m1) / sqrt(d v1)`. The supremum over the real line is
/// attained at an atom, from the left or the right.
pub fn clt_distance(s: &SumDistribution, d: usize) -> Result<f64> {
    if d == 0 {
        return Err(invalid("number of factors must be at least 1"));
    }
    let (m1, v1) = (s.mean / d as f64, s.variance / d as f64);
    if v1.is_nan() || v1 <= 1e-14 {
        return Err(invalid(
            "per-factor variance is zero; standardization is degenerate",
        ));
    }
    let (center, scale) = (d as f64 * m1, (d as f64 * v1).sqrt());
    let mut below = 0.0;
    let mut worst: f64 = 0.0;
    for (k, &m) in s.mass.as_slice().iter().enumerate() {
        let z = (s.origin + k as f64 - center) / scale;
        let phi = gaussian_cdf(z);
        let above = below + m;
        worst = worst.max((below - phi).abs()).max((above - phi).abs());
        below = above;
    }
    Ok(worst)
}

/// `(1/2) sum |p - q|`.
pub fn total_variation(p: &ProbabilityVector, q: &ProbabilityVector) -> Result<f64> {
    if p.len() != q.len() {
        return Err(invalid(format!(
            "supports differ in length: {} vs {}",
            p.len(),
            q.len()
        )));
    }
    Ok(0.5
        * p.as_slice()
            .iter()
            .zip(q.as_slice())
            .map(|(a, b)| (a - b).abs())
            .sum::<f64>())
}
