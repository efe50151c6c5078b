//! Fixtures shared by the criterion benchmarks.

use bdqw_core::{ehrenfest_dimension, DimensionSpec, MultiChainSpec};

/// `d` Ehrenfest edges with uniform selection.
pub fn edge_walk(d: usize) -> MultiChainSpec {
    let edge = ehrenfest_dimension(1).expect("n = 1 is valid");
    MultiChainSpec::uniform(vec![edge; d]).expect("uniform selection is valid")
}

/// `d` copies of an `n`-ball Ehrenfest dimension with uniform selection.
pub fn ehrenfest_walk(d: usize, n: usize) -> MultiChainSpec {
    let dim: DimensionSpec = ehrenfest_dimension(n).expect("n >= 1");
    MultiChainSpec::uniform(vec![dim; d]).expect("uniform selection is valid")
}

/// Target multi-index with every coordinate at its top state.
pub fn far_corner(spec: &MultiChainSpec) -> Vec<usize> {
    spec.dims().iter().map(DimensionSpec::size).collect()
}
