//! Reference matrix exponential by scaling and squaring of a Taylor series.
//!
//! Knows nothing about Kronecker or tridiagonal structure, so it serves as an
//! independent check on the spectral propagators. Cubic in the dimension;
//! intended for small matrices only.

use ndarray::Array2;
use num_complex::Complex64;

const MAX_TERMS: usize = 60;

fn norm_one(a: &Array2<Complex64>) -> f64 {
    a.columns()
        .into_iter()
        .map(|c| c.iter().map(|z| z.norm()).sum::<f64>())
        .fold(0.0, f64::max)
}

/// `exp(a)` for a square complex matrix.
pub fn expm(a: &Array2<Complex64>) -> Array2<Complex64> {
    let n = a.nrows();
    assert_eq!(n, a.ncols(), "expm needs a square matrix");
    let norm = norm_one(a);
    let squarings = if norm > 0.5 {
        (norm / 0.5).log2().ceil() as i32
    } else {
        0
    };
    let scaled = a.mapv(|z| z / 2f64.powi(squarings));

    let mut sum = Array2::<Complex64>::eye(n);
    let mut term = Array2::<Complex64>::eye(n);
    for k in 1..=MAX_TERMS {
        term = term.dot(&scaled).mapv(|z| z / k as f64);
        sum += &term;
        if norm_one(&term) <= 1e-18 * norm_one(&sum) {
            break;
        }
    }
    for _ in 0..squarings {
        sum = sum.dot(&sum);
    }
    sum
}

/// `exp(i t h)` for a real symmetric generator `h`.
pub fn unitary_exponential(h: &Array2<f64>, t: f64) -> Array2<Complex64> {
    expm(&h.mapv(|x| Complex64::new(0.0, t * x)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::array;

    #[test]
    fn zero_matrix_gives_identity() {
        let z = Array2::<Complex64>::zeros((3, 3));
        assert_eq!(expm(&z), Array2::eye(3));
    }

    #[test]
    fn pauli_x_rotation() {
        let x = array![[0.0, 1.0], [1.0, 0.0]];
        for &t in &[0.3, 1.0, 2.5, 10.0] {
            let u = unitary_exponential(&x, t);
            let (c, s) = (t.cos(), t.sin());
            assert!((u[[0, 0]] - Complex64::new(c, 0.0)).norm() < 1e-13);
            assert!((u[[0, 1]] - Complex64::new(0.0, s)).norm() < 1e-13);
            assert!((u[[1, 0]] - Complex64::new(0.0, s)).norm() < 1e-13);
            assert!((u[[1, 1]] - Complex64::new(c, 0.0)).norm() < 1e-13);
        }
    }

    #[test]
    fn diagonal_input() {
        let d = array![[Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0)],
                       [Complex64::new(0.0, 0.0), Complex64::new(-2.0, 0.5)]];
        let e = expm(&d);
        assert!((e[[0, 0]] - Complex64::new(1.0, 0.0).exp()).norm() < 1e-13);
        assert!((e[[1, 1]] - Complex64::new(-2.0, 0.5).exp()).norm() < 1e-13);
        assert!(e[[0, 1]].norm() < 1e-15);
    }
}
