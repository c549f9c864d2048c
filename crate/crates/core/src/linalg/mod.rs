//! Direct solvers for the per-step linear systems.

mod cyclic;
mod sparse;

pub use cyclic::{solve_cyclic_tridiagonal, CyclicFactorization, CyclicTridiagonal};
pub use sparse::{solve_sparse, SparseLu, SparseMatrix, TripletBuilder};

/// Pivots with magnitude at or below this value are treated as zero.
pub const PIVOT_FLOOR: f64 = 1e-300;
