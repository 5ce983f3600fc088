use serde::Serialize;

use super::{petz, reversed_dilation, StinespringDilation};
use crate::error::{Error, Result};
use crate::linalg::{kron, ComplexMatrix, DensityOperator, HermitianOperator};
use crate::tolerance::Tolerances;

const EXPONENT_LIMIT: f64 = 700.0;

/// Hamiltonian and inverse temperature, `kappa = -1/(k_B T)`.
#[derive(Clone, Debug, PartialEq)]
pub struct GibbsSpec {
    pub h: HermitianOperator,
    pub kappa: f64,
}

/// `exp(kappa H) / Tr exp(kappa H)`.
pub fn gibbs_state(spec: &GibbsSpec, tol: &Tolerances) -> Result<DensityOperator> {
    let e = spec.h.eig()?;
    let radius = e.values.iter().map(|x| x.abs()).fold(0.0, f64::max);
    let value = spec.kappa.abs() * radius;
    if value > EXPONENT_LIMIT {
        return Err(Error::ExponentOverflow {
            value,
            limit: EXPONENT_LIMIT,
        });
    }
    let shift = e
        .values
        .iter()
        .map(|&x| spec.kappa * x)
        .fold(f64::NEG_INFINITY, f64::max);
    let z: f64 = e.values.iter().map(|&x| (spec.kappa * x - shift).exp()).sum();
    let rho = e.apply(|x| (spec.kappa * x - shift).exp() / z);
    DensityOperator::from_computed(&rho, tol)
}

#[derive(Clone, Debug, Serialize)]
pub struct ThermalReport {
    /// Frobenius norm of `[U, H_A (x) 1 + 1 (x) H_B]`.
    pub commutator_norm: f64,
    /// Choi distance between the Petz map with the Gibbs prior and the reversed dilation.
    pub choi_distance: f64,
    pub energy_conserving: bool,
    pub reversal_holds: bool,
}

/// Compares the Petz map of a thermal operation with the reversed dilation
/// `Tr_B[U^dagger (. (x) tau_B) U]`.
pub fn thermal_reverse_check(
    dil: &StinespringDilation,
    spec_a: &GibbsSpec,
    spec_b: &GibbsSpec,
    tol: &Tolerances,
) -> Result<ThermalReport> {
    let tau_a = gibbs_state(spec_a, tol)?;
    let tau_b = gibbs_state(spec_b, tol)?;
    if tau_a.dim() != dil.d_a() || tau_b.dim() != dil.d_b() {
        return Err(Error::mismatch(
            "Gibbs Hamiltonians",
            dil.d_a() * dil.d_b(),
            tau_a.dim() * tau_b.dim(),
        ));
    }
    let dev = dil.beta().matrix().max_abs_diff(tau_b.matrix());
    if dev > tol.equality {
        return Err(Error::InvalidArgument(format!(
            "ancilla differs from the Gibbs state of H_B by {dev:.3e}"
        )));
    }
    let h_total = &kron(spec_a.h.matrix(), &ComplexMatrix::identity(dil.d_b()))?
        + &kron(&ComplexMatrix::identity(dil.d_a()), spec_b.h.matrix())?;
    let commutator_norm = dil.unitary().matrix().commutator(&h_total).frobenius_norm();
    let channel = dil.channel(tol)?;
    let recovered = petz(&channel, &tau_a, tol)?;
    let reversed = reversed_dilation(dil, tau_b.matrix())?;
    let choi_distance = recovered.map().dist(&reversed);
    Ok(ThermalReport {
        commutator_norm,
        choi_distance,
        energy_conserving: commutator_norm <= tol.equality,
        reversal_holds: choi_distance <= tol.channel,
    })
}
