//! Dense complex linear algebra: matrices, operators, Kronecker structure and
//! spectral functions.

mod eig;
mod matrix;
mod operators;
mod ops;

pub(crate) use eig::eig_hermitian_part;
pub use eig::{
    entanglement_entropy, expm_hermitian, expm_i_hermitian, herm_eig, inv_sqrtm, log_negativity, logm,
    pseudo_inv_sqrtm, real_min_norm_lstsq, real_svd_full, schmidt_coefficients, singular_values, sqrtm,
    EigenDecomposition,
};
pub use matrix::{basis_vec, c, inner, kron_vec, normalize, vec_norm, ComplexMatrix, C64, I, ONE, ZERO};
pub use operators::{
    eig_checked, pauli_x, pauli_y, pauli_z, paulis, traceless_hermitian_basis, DensityOperator, HermitianOperator,
    UnitaryOperator,
};
pub use ops::{
    conjugate, is_zero, ket_as_matrix, kron, kron_all, matrix_unit, partial_trace, partial_transpose, realign,
    swap_operator, Subsystem,
};

/// Spectral function selector for [`matrix_function`].
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum MatrixFunction {
    Sqrt,
    InvSqrt,
    PseudoInvSqrt,
    Ln,
    Exp,
}

pub fn matrix_function(
    h: &HermitianOperator,
    f: MatrixFunction,
    tol: &crate::tolerance::Tolerances,
) -> crate::error::Result<HermitianOperator> {
    let m = h.matrix();
    let out = match f {
        MatrixFunction::Sqrt => sqrtm(m, tol)?,
        MatrixFunction::InvSqrt => inv_sqrtm(m, tol)?,
        MatrixFunction::PseudoInvSqrt => pseudo_inv_sqrtm(m, tol)?,
        MatrixFunction::Ln => logm(m, tol)?,
        MatrixFunction::Exp => expm_hermitian(m, tol)?,
    };
    Ok(HermitianOperator::hermitian_part(&out))
}
