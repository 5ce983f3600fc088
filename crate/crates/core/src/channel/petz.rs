use super::{LinearMap, QuantumChannel, StinespringDilation};
use crate::error::{Error, Result};
use crate::linalg::{
    eig_hermitian_part, kron, partial_trace, ComplexMatrix, DensityOperator, EigenDecomposition, Subsystem,
};
use crate::tolerance::Tolerances;

/// How the assignment map treats a rank-deficient A-marginal.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum AssignmentConvention {
    /// Rank deficiency is an error.
    Strict,
    /// Invert only on the support.
    Pseudoinverse,
}

fn inverse_sqrt(e: &EigenDecomposition, conv: AssignmentConvention, tol: &Tolerances) -> Result<ComplexMatrix> {
    let deficient = e.values.iter().filter(|&&x| x <= tol.rank).count();
    if deficient > 0 && conv == AssignmentConvention::Strict {
        return Err(Error::RankDeficientOutput {
            deficient_dim: deficient,
        });
    }
    Ok(e.apply(|x| if x > tol.rank { 1.0 / x.sqrt() } else { 0.0 }))
}

fn sqrt_psd(m: &ComplexMatrix, tol: &Tolerances) -> Result<ComplexMatrix> {
    let e = eig_hermitian_part(m)?;
    if e.values[0] < -tol.psd_floor {
        return Err(Error::InvalidState(format!("negative eigenvalue {:.3e}", e.values[0])));
    }
    Ok(e.apply(|x| x.max(0.0).sqrt()))
}

fn petz_map(
    e: &QuantumChannel,
    alpha: &DensityOperator,
    conv: AssignmentConvention,
    tol: &Tolerances,
) -> Result<LinearMap> {
    if alpha.dim() != e.d_in() {
        return Err(Error::mismatch("prior", e.d_in(), alpha.dim()));
    }
    let sigma = e.apply(alpha.matrix())?;
    let s_inv = inverse_sqrt(&eig_hermitian_part(&sigma)?, conv, tol)?;
    let a_half = sqrt_psd(alpha.matrix(), tol)?;
    let adj = e.adjoint();
    LinearMap::from_fn(e.d_out(), e.d_in(), |y| {
        let inner = adj.apply(&(&(&s_inv * y) * &s_inv))?;
        Ok(&(&a_half * &inner) * &a_half)
    })
}

/// Petz recovery map `sqrt(a) E^dagger(E[a]^{-1/2} . E[a]^{-1/2}) sqrt(a)`.
pub fn petz(e: &QuantumChannel, alpha: &DensityOperator, tol: &Tolerances) -> Result<QuantumChannel> {
    QuantumChannel::from_map(petz_map(e, alpha, AssignmentConvention::Strict, tol)?, tol)
}

/// Petz map with the pseudoinverse of `E[alpha]`; completely positive, possibly trace decreasing.
pub fn petz_pseudoinverse(e: &QuantumChannel, alpha: &DensityOperator, tol: &Tolerances) -> Result<LinearMap> {
    petz_map(e, alpha, AssignmentConvention::Pseudoinverse, tol)
}

/// `X -> sqrt(Omega) [(mu^{-1/2} X mu^{-1/2}) (x) 1] sqrt(Omega)` with `mu = Tr_B Omega`.
pub fn quantum_assignment(omega: &DensityOperator, conv: AssignmentConvention, tol: &Tolerances) -> Result<LinearMap> {
    let (d_a, d_b) = omega
        .bipartition()
        .ok_or_else(|| Error::InvalidArgument("assignment reference needs a bipartition".into()))?;
    let mu = partial_trace(omega.matrix(), d_a, d_b, Subsystem::A)?;
    let mu_inv = inverse_sqrt(&eig_hermitian_part(&mu)?, conv, tol)?;
    let root = sqrt_psd(omega.matrix(), tol)?;
    let id_b = ComplexMatrix::identity(d_b);
    LinearMap::from_fn(d_a, d_a * d_b, |x| {
        let local = kron(&(&(&mu_inv * x) * &mu_inv), &id_b)?;
        Ok(&(&root * &local) * &root)
    })
}

/// `Tr_B` as a map from `A (x) B` operators to `A` operators.
pub fn partial_trace_map(d_a: usize, d_b: usize) -> Result<LinearMap> {
    LinearMap::from_fn(d_a * d_b, d_a, |x| partial_trace(x, d_a, d_b, Subsystem::A))
}

/// Retrodiction assembled from the dilation: assignment with reference
/// `U(alpha (x) beta)U^dagger`, then the inverse unitary, then `Tr_B`.
pub fn petz_via_dilation(
    dil: &StinespringDilation,
    alpha: &DensityOperator,
    tol: &Tolerances,
) -> Result<QuantumChannel> {
    let omega = dil.global_output(alpha, tol)?;
    let assign = quantum_assignment(&omega, AssignmentConvention::Strict, tol)?;
    let undo = LinearMap::unitary(&dil.unitary().matrix().adjoint())?;
    let trace_b = partial_trace_map(dil.d_a(), dil.d_b())?;
    let map = trace_b.compose(&undo.compose(&assign)?)?;
    QuantumChannel::from_map(map, tol)
}

/// Stepwise retrodiction of a chain applied `channels[0]` first:
/// `R[E1, a] o R[E2, E1[a]] o ...`.
pub fn compose_retro_quantum(
    channels: &[QuantumChannel],
    alpha: &DensityOperator,
    tol: &Tolerances,
) -> Result<QuantumChannel> {
    let (first, rest) = channels
        .split_first()
        .ok_or_else(|| Error::InvalidArgument("empty channel chain".into()))?;
    let mut acc = petz(first, alpha, tol)?;
    let mut prior = first.apply_state(alpha, tol)?;
    for e in rest {
        acc = acc.compose(&petz(e, &prior, tol)?)?;
        prior = e.apply_state(&prior, tol)?;
    }
    Ok(acc)
}

/// Petz map of the composed chain.
pub fn petz_of_composition(
    channels: &[QuantumChannel],
    alpha: &DensityOperator,
    tol: &Tolerances,
) -> Result<QuantumChannel> {
    let (first, rest) = channels
        .split_first()
        .ok_or_else(|| Error::InvalidArgument("empty channel chain".into()))?;
    let mut total = first.clone();
    for e in rest {
        total = e.compose(&total)?;
    }
    petz(&total, alpha, tol)
}
