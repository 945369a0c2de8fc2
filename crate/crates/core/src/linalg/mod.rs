//! Exact integer and rational linear algebra: Hermite/Smith normal forms,
//! lattice indices, kernels over prime fields, and rational lattices.

pub mod hnf;
pub mod lattice;
pub mod matrix;
pub mod modp;

pub use hnf::{hnf, hnf_full_row_rank, is_hnf, lattice_index, row_lattice_basis, snf, HnfDecomp};
pub use lattice::Lattice;
pub use matrix::Matrix;
pub use modp::{kernel_mod_p, rank_mod_p, row_space_mod_p, rref_mod_p};
