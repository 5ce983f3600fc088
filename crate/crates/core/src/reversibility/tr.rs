use nalgebra::{DMatrix, DVector};
use serde::Serialize;

use crate::channel::{petz, reversed_dilation, LinearMap, StinespringDilation};
use crate::error::{Error, Result};
use crate::linalg::{
    eig_hermitian_part, real_min_norm_lstsq, real_svd_full, traceless_hermitian_basis, ComplexMatrix, DensityOperator,
    Subsystem,
};
use crate::tolerance::Tolerances;

const PROJECTION_CAP: usize = 10_000;
const PROJECTION_STEP: f64 = 1e-12;
const PSD_SLACK: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum TRStatus {
    #[serde(rename = "TR")]
    Tr,
    #[serde(rename = "not-TR")]
    NotTr,
    UndefinedRetrodiction,
    Indeterminate,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TRCertificate {
    pub status: TRStatus,
    pub beta_prime: Option<DensityOperator>,
    /// Choi distance between the Petz map and the reversed dilation (null when undefined).
    pub residual: f64,
    pub family_dim: usize,
}

impl TRCertificate {
    pub fn is_tr(&self) -> bool {
        self.status == TRStatus::Tr
    }
}

fn real_vec(m: &ComplexMatrix) -> Vec<f64> {
    m.data().iter().flat_map(|z| [z.re, z.im]).collect()
}

/// Affine parametrization `beta' = 1/d + sum_k x_k G_k` with the reversed-dilation
/// Choi matrix linear in `x`.
struct AffineProblem {
    basis: Vec<ComplexMatrix>,
    d_b: usize,
    x0: DVector<f64>,
    null: DMatrix<f64>,
    residual: f64,
}

impl AffineProblem {
    fn new(dil: &StinespringDilation, target: &ComplexMatrix) -> Result<Self> {
        let d_b = dil.d_b();
        let basis = traceless_hermitian_basis(d_b);
        let centre = ComplexMatrix::identity(d_b).scale_real(1.0 / d_b as f64);
        let c0 = reversed_dilation(dil, &centre)?;
        let cols: Vec<Vec<f64>> = basis
            .iter()
            .map(|g| Ok(real_vec(reversed_dilation(dil, g)?.choi())))
            .collect::<Result<_>>()?;
        let rhs = DVector::from_vec(real_vec(&(target - c0.choi())));
        let n = basis.len();
        let m = DMatrix::from_fn(rhs.len(), n, |i, j| cols[j][i]);
        let (x0, null) = if n == 0 {
            (DVector::zeros(0), DMatrix::zeros(0, 0))
        } else {
            min_norm_solution(&m, &rhs)?
        };
        let residual = (&m * &x0 - &rhs).norm();
        Ok(AffineProblem {
            basis,
            d_b,
            x0,
            null,
            residual,
        })
    }

    fn matrix(&self, x: &DVector<f64>) -> ComplexMatrix {
        let mut b = ComplexMatrix::identity(self.d_b).scale_real(1.0 / self.d_b as f64);
        for (k, g) in self.basis.iter().enumerate() {
            b = &b + &g.scale_real(x[k]);
        }
        b
    }

    fn coords(&self, b: &ComplexMatrix) -> DVector<f64> {
        DVector::from_iterator(self.basis.len(), self.basis.iter().map(|g| g.inner(b).re))
    }

    fn project_affine(&self, x: &DVector<f64>) -> DVector<f64> {
        if self.null.ncols() == 0 {
            return self.x0.clone();
        }
        let d = x - &self.x0;
        &self.x0 + &self.null * (self.null.transpose() * d)
    }

    /// Alternating projections between the affine solution set and the PSD cone.
    fn find_psd(&self) -> Result<Option<DVector<f64>>> {
        let mut x = self.x0.clone();
        for _ in 0..PROJECTION_CAP {
            let e = eig_hermitian_part(&self.matrix(&x))?;
            if e.values[0] >= -PSD_SLACK {
                return Ok(Some(x));
            }
            let clipped = e.apply(|v| v.max(0.0));
            let next = self.project_affine(&self.coords(&clipped));
            let step = (&next - &x).norm();
            x = next;
            if step < PROJECTION_STEP {
                break;
            }
        }
        let e = eig_hermitian_part(&self.matrix(&x))?;
        Ok((e.values[0] >= -PSD_SLACK).then_some(x))
    }
}

/// Least-squares minimizer of least norm and an orthonormal basis of the nullspace.
fn min_norm_solution(m: &DMatrix<f64>, rhs: &DVector<f64>) -> Result<(DVector<f64>, DMatrix<f64>)> {
    let (values, v) = real_svd_full(m)?;
    let smax = values.first().copied().unwrap_or(0.0);
    let cut = (1e-10 * smax).max(1e-12);
    let x = real_min_norm_lstsq(m, rhs, cut)?;
    let null_cols: Vec<DVector<f64>> = values
        .iter()
        .enumerate()
        .filter(|&(_, &s)| s <= cut)
        .map(|(k, _)| v.column(k).into_owned())
        .collect();
    let null = if null_cols.is_empty() {
        DMatrix::zeros(m.ncols(), 0)
    } else {
        DMatrix::from_columns(&null_cols)
    };
    Ok((x, null))
}

fn clip_state(m: &ComplexMatrix, tol: &Tolerances) -> Result<DensityOperator> {
    let e = eig_hermitian_part(m)?;
    let clipped = e.apply(|v| v.max(0.0));
    let tr = clipped.trace().re;
    DensityOperator::from_computed(&clipped.scale_real(1.0 / tr), tol)
}

/// Decides whether the Petz recovery of the dilated channel at prior `alpha` is
/// the same unitary run backwards with some replacement ancilla `beta'`.
pub fn check_tr(dil: &StinespringDilation, alpha: &DensityOperator, tol: &Tolerances) -> Result<TRCertificate> {
    let channel = dil.channel(tol)?;
    let target = match petz(&channel, alpha, tol) {
        Ok(p) => p,
        Err(Error::RankDeficientOutput { .. } | Error::UndefinedRetrodiction { .. }) => {
            return Ok(TRCertificate {
                status: TRStatus::UndefinedRetrodiction,
                beta_prime: None,
                residual: f64::NAN,
                family_dim: 0,
            })
        }
        Err(e) => return Err(e),
    };
    let problem = AffineProblem::new(dil, target.choi())?;
    let family_dim = problem.null.ncols();
    if problem.residual > tol.tr_residual {
        return Ok(TRCertificate {
            status: TRStatus::NotTr,
            beta_prime: None,
            residual: problem.residual,
            family_dim,
        });
    }
    // The evolved ancilla marginal is the natural candidate; it works for every
    // product-preserving tuple and fixes the choice when the family is not a point.
    let marginal = dil.global_output(alpha, tol)?.marginal(Subsystem::B)?;
    let residual = reversed_dilation(dil, marginal.matrix())?.dist(target.map());
    if residual <= tol.tr_residual {
        return Ok(TRCertificate {
            status: TRStatus::Tr,
            beta_prime: Some(marginal),
            residual,
            family_dim,
        });
    }
    let Some(x) = problem.find_psd()? else {
        return Ok(TRCertificate {
            status: TRStatus::Indeterminate,
            beta_prime: None,
            residual: problem.residual,
            family_dim,
        });
    };
    let beta_prime = clip_state(&problem.matrix(&x), tol)?;
    let residual = reversed_dilation(dil, beta_prime.matrix())?.dist(target.map());
    Ok(TRCertificate {
        status: if residual <= tol.tr_residual {
            TRStatus::Tr
        } else {
            TRStatus::Indeterminate
        },
        beta_prime: Some(beta_prime),
        residual,
        family_dim,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TRcReport {
    pub status: TRStatus,
    pub max_l_checked: usize,
    pub residuals: Vec<f64>,
    pub is_composable: bool,
    pub certificate: TRCertificate,
}

/// Compares the Petz recovery of `E^L` with the `L`-fold reversed dilation for
/// `L = 1..=max_l`.
pub fn check_trc(
    dil: &StinespringDilation,
    alpha: &DensityOperator,
    max_l: usize,
    tol: &Tolerances,
) -> Result<TRcReport> {
    let certificate = check_tr(dil, alpha, tol)?;
    let Some(beta_prime) = certificate.beta_prime.clone().filter(|_| certificate.is_tr()) else {
        return Ok(TRcReport {
            status: certificate.status,
            max_l_checked: 0,
            residuals: Vec::new(),
            is_composable: false,
            certificate,
        });
    };
    let channel = dil.channel(tol)?;
    let reverse = reversed_dilation(dil, beta_prime.matrix())?;
    let mut power = channel.clone();
    let mut reverse_power: LinearMap = reverse.clone();
    let mut residuals = Vec::with_capacity(max_l);
    for l in 1..=max_l {
        if l > 1 {
            power = channel.compose(&power)?;
            reverse_power = reverse_power.compose(&reverse)?;
        }
        let p = petz(&power, alpha, tol)?;
        residuals.push(p.map().dist(&reverse_power));
    }
    Ok(TRcReport {
        status: certificate.status,
        max_l_checked: max_l,
        is_composable: residuals.iter().all(|&r| r <= tol.tr_residual),
        residuals,
        certificate,
    })
}
