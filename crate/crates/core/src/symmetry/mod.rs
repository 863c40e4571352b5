//! Symmetric-group machinery for unitary-invariant marginals: permutations
//! and partitions, Young's orthogonal irreps, Weingarten calculus, and the
//! block-diagonal positivity test for invariant operators.

mod invariant;
mod irrep;
mod perm;
mod qubit;

pub use invariant::{
    is_state, min_eigenvalue, permutation_matrix, positivity_blocks, reconstruct_operator, InvariantOperator, MAX_DIM,
};
pub use irrep::{
    character, irrep_table, perm_of_type, standard_tableaux, weingarten, weingarten_exact, young_orthogonal_irrep,
    MAX_K,
};
pub use perm::{factorial, schur_dimension, Partition, Perm};
pub use qubit::{
    check_lm_pt, derive_full_s4, ew_params, fourqubit_blocks, fourqubit_forms, fourqubit_moments, pt_excess,
    three_qubit_operator, Affine9, EwParams, FourQubitBlocks, FourQubitForms, LM_PT_TOL, PAIRS4, PRODUCTS4,
};
