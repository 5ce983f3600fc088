//! Product preservation, tabletop reversibility and its composable variant.

mod fixtures;
mod nsteady;
mod tr;

pub use fixtures::{
    energy_conserving_unitary, swap_mixing_dilation, theorem4_fixtures, Theorem4Expectation, Theorem4Fixture,
};
pub use nsteady::{make_n_steady_channel, qutrit_cycle, NSteadyChannel};
pub use tr::{check_tr, check_trc, TRCertificate, TRStatus, TRcReport};

use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::{kron, partial_trace, DensityOperator, Subsystem, UnitaryOperator};
use crate::tolerance::Tolerances;
use crate::twoqubit::{check_spectra_preservation, SpectraReport};

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PPReport {
    pub is_product: bool,
    pub alpha_out: DensityOperator,
    pub beta_out: DensityOperator,
    pub product_residual: f64,
    pub spectra: SpectraReport,
    /// Both inputs maximally mixed: preserved by every unitary, so excluded.
    pub trivially_excluded: bool,
}

/// Whether `U (alpha (x) beta) U^dagger` is again a product state.
pub fn check_pp(
    u: &UnitaryOperator,
    alpha: &DensityOperator,
    beta: &DensityOperator,
    tol: &Tolerances,
) -> Result<PPReport> {
    let (d_a, d_b) = (alpha.dim(), beta.dim());
    if u.dim() != d_a * d_b {
        return Err(Error::mismatch("unitary on the joint space", d_a * d_b, u.dim()));
    }
    let omega = u.conjugate(&kron(alpha.matrix(), beta.matrix())?);
    let alpha_out = DensityOperator::from_computed(&partial_trace(&omega, d_a, d_b, Subsystem::A)?, tol)?;
    let beta_out = DensityOperator::from_computed(&partial_trace(&omega, d_a, d_b, Subsystem::B)?, tol)?;
    let product_residual = omega.dist(&kron(alpha_out.matrix(), beta_out.matrix())?);
    let spectra = check_spectra_preservation(alpha, beta, &alpha_out, &beta_out)?;
    let mixed = |s: &DensityOperator| {
        s.matrix()
            .max_abs_diff(DensityOperator::maximally_mixed(s.dim()).matrix())
            <= tol.equality
    };
    Ok(PPReport {
        is_product: product_residual <= tol.product,
        alpha_out,
        beta_out,
        product_residual,
        spectra,
        trivially_excluded: mixed(alpha) && mixed(beta),
    })
}
