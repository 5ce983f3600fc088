//! Two-qubit structure: Cartan form, generalized-thermal classification and
//! product preservation.

mod cartan;
mod gg;
mod pure_pp;
mod theorems;

pub use cartan::{assemble, cartan_decompose, interaction, magic_basis, CartanForm};
pub use gg::{
    classify_gg, distance_to_multiple, gg_angle_test, gg_nullspace_oracle, local_sum_residual, outgoing_local_terms,
    FlipAssignment, GGCase, GGClassification, GGHamiltonianFamily, GGTuple, NullspaceReport,
};
pub use pure_pp::{solve_pure_pp, split_product_ket, PPBranch, PurePPSolution, QuadraticPPProblem};
pub use theorems::{
    check_pure_mixed_gg, check_spectra_preservation, fixed_product_non_gg_unitary, gg_from_orthogonal_pairs,
    gg_theorem1_bridge, search_pure_mixed_preservation, MixedSearchReport, OrthogonalPairsGG, PairConstruction,
    SpectraReport,
};
