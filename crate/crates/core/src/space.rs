//! Mixed-radix indexing of the tensor-product position space.
//!
//! A product state `(x_1, ..., x_d)` with `x_i in 0..=N_i` is flattened with
//! dimension 1 most significant, so the flat index of `(x_1, ..., x_d)` is
//! `((x_1 * r_2 + x_2) * r_3 + x_3) ...` where `r_i = N_i + 1`. Kronecker
//! products `A_1 ⊗ A_2 ⊗ ... ⊗ A_d` use exactly the same ordering.

use ndarray::Array2;

use crate::error::{invalid, Error, Result};

/// Default ceiling on the number of product states for dense computations.
pub const DEFAULT_ORACLE_CAP: usize = 4096;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProductSpace {
    radices: Vec<usize>,
}

impl ProductSpace {
    /// `radices[i]` is the number of states of dimension `i` (that is `N_i + 1`).
    pub fn new(radices: Vec<usize>) -> Result<Self> {
        if radices.is_empty() {
            return Err(invalid("product space needs at least one dimension"));
        }
        if radices.contains(&0) {
            return Err(invalid("every dimension needs at least one state"));
        }
        Ok(Self { radices })
    }

    pub fn radices(&self) -> &[usize] {
        &self.radices
    }

    pub fn dims(&self) -> usize {
        self.radices.len()
    }

    /// Total number of product states, saturating at `usize::MAX`.
    pub fn len(&self) -> usize {
        self.radices
            .iter()
            .try_fold(1usize, |acc, &r| acc.checked_mul(r))
            .unwrap_or(usize::MAX)
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn check_cap(&self, cap: usize) -> Result<usize> {
        let size = self.len();
        if size > cap {
            return Err(Error::SizeLimit { size, cap });
        }
        Ok(size)
    }

    pub fn check_index(&self, index: &[usize]) -> Result<()> {
        if index.len() != self.radices.len() {
            return Err(invalid(format!(
                "multi-index has {} coordinates, expected {}",
                index.len(),
                self.radices.len()
            )));
        }
        for (i, (&x, &r)) in index.iter().zip(&self.radices).enumerate() {
            if x >= r {
                return Err(invalid(format!(
                    "coordinate {} of multi-index is {x}, must be at most {}",
                    i + 1,
                    r - 1
                )));
            }
        }
        Ok(())
    }

    pub fn encode(&self, index: &[usize]) -> Result<usize> {
        self.check_index(index)?;
        Ok(index
            .iter()
            .zip(&self.radices)
            .fold(0usize, |acc, (&x, &r)| acc * r + x))
    }

    pub fn decode(&self, mut flat: usize) -> Vec<usize> {
        let mut out = vec![0; self.radices.len()];
        for (slot, &r) in out.iter_mut().zip(&self.radices).rev() {
            *slot = flat % r;
            flat /= r;
        }
        out
    }
}

/// Kronecker product `a ⊗ b`.
pub fn kron(a: &Array2<f64>, b: &Array2<f64>) -> Array2<f64> {
    let (ar, ac) = a.dim();
    let (br, bc) = b.dim();
    let mut out = Array2::zeros((ar * br, ac * bc));
    for ((i, j), &x) in a.indexed_iter() {
        if x == 0.0 {
            continue;
        }
        let mut block = out.slice_mut(ndarray::s![i * br..(i + 1) * br, j * bc..(j + 1) * bc]);
        block.zip_mut_with(b, |o, &y| *o = x * y);
    }
    out
}

/// Kronecker product of a sequence of matrices, left to right.
pub fn kron_all<'a>(mats: impl IntoIterator<Item = &'a Array2<f64>>) -> Array2<f64> {
    mats.into_iter()
        .fold(Array2::ones((1, 1)), |acc, m| kron(&acc, m))
}

/// Kronecker product of vectors, left to right, in mixed-radix order.
pub fn kron_vectors<'a>(vecs: impl IntoIterator<Item = &'a [f64]>) -> Vec<f64> {
    vecs.into_iter().fold(vec![1.0], |acc, v| {
        acc.iter()
            .flat_map(|&a| v.iter().map(move |&b| a * b))
            .collect()
    })
}

/// Adds `weight * (I ⊗ ... ⊗ factor ⊗ ... ⊗ I)` into `target`, with `factor`
/// acting on dimension `dim` of `space`.
pub fn add_embedded(
    target: &mut Array2<f64>,
    space: &ProductSpace,
    dim: usize,
    factor: &Array2<f64>,
    weight: f64,
) {
    let radices = space.radices();
    let m = radices[dim];
    debug_assert_eq!(factor.dim(), (m, m));
    let left: usize = radices[..dim].iter().product();
    let right: usize = radices[dim + 1..].iter().product();
    for a in 0..left {
        for ((i, k), &x) in factor.indexed_iter() {
            if x == 0.0 {
                continue;
            }
            let row0 = (a * m + i) * right;
            let col0 = (a * m + k) * right;
            for b in 0..right {
                target[[row0 + b, col0 + b]] += weight * x;
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::array;

    #[test]
    fn encode_decode_dimension_one_most_significant() {
        let space = ProductSpace::new(vec![2, 3]).unwrap();
        assert_eq!(space.len(), 6);
        assert_eq!(space.encode(&[0, 2]).unwrap(), 2);
        assert_eq!(space.encode(&[1, 0]).unwrap(), 3);
        for flat in 0..6 {
            assert_eq!(space.encode(&space.decode(flat)).unwrap(), flat);
        }
    }

    #[test]
    fn out_of_range_coordinate_is_rejected() {
        let space = ProductSpace::new(vec![2, 3]).unwrap();
        assert!(matches!(space.encode(&[0, 3]), Err(Error::InvalidArgument(_))));
        assert!(matches!(space.encode(&[0]), Err(Error::InvalidArgument(_))));
    }

    #[test]
    fn cap_reports_size() {
        let space = ProductSpace::new(vec![2; 13]).unwrap();
        assert_eq!(
            space.check_cap(4096),
            Err(Error::SizeLimit { size: 8192, cap: 4096 })
        );
        assert_eq!(space.check_cap(8192), Ok(8192));
    }

    #[test]
    fn saturating_len() {
        let space = ProductSpace::new(vec![1 << 20; 4]).unwrap();
        assert_eq!(space.len(), usize::MAX);
    }

    #[test]
    fn embedding_matches_explicit_kron() {
        let space = ProductSpace::new(vec![2, 3, 2]).unwrap();
        let f = array![[0.0, 1.0, 0.0], [0.5, 0.0, 0.5], [0.0, 1.0, 0.0]];
        let mut got = Array2::zeros((12, 12));
        add_embedded(&mut got, &space, 1, &f, 0.25);
        let want = kron_all([&Array2::eye(2), &f, &Array2::eye(2)]) * 0.25;
        assert_eq!(got, want);
    }

    #[test]
    fn kron_vectors_order() {
        let v = kron_vectors([&[1.0, 2.0][..], &[1.0, 10.0, 100.0][..]]);
        assert_eq!(v, vec![1.0, 10.0, 100.0, 2.0, 20.0, 200.0]);
    }
}
