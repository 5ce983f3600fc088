use nalgebra::{DMatrix, DVector, SymmetricEigen};

use super::matrix::{c, ComplexMatrix, C64};
use super::ops::{partial_transpose, Subsystem};
use crate::error::{Error, Result};
use crate::tolerance::Tolerances;

const EIG_MAX_ITER: usize = 10_000;

/// Eigenvalues in ascending order with eigenvectors as the columns of `vectors`.
#[derive(Clone, Debug)]
pub struct EigenDecomposition {
    pub values: Vec<f64>,
    pub vectors: ComplexMatrix,
}

impl EigenDecomposition {
    pub fn vector(&self, k: usize) -> Vec<C64> {
        self.vectors.column(k)
    }

    /// V f(D) V^dagger
    pub fn apply(&self, f: impl Fn(f64) -> f64) -> ComplexMatrix {
        let n = self.values.len();
        let fv: Vec<f64> = self.values.iter().map(|&x| f(x)).collect();
        let v = &self.vectors;
        ComplexMatrix::from_fn(n, n, |i, j| (0..n).map(|k| v[(i, k)] * fv[k] * v[(j, k)].conj()).sum())
    }
}

/// Hermitian eigendecomposition after checking the Hermiticity invariant.
pub fn herm_eig(h: &ComplexMatrix, tol: &Tolerances) -> Result<EigenDecomposition> {
    let dev = h.hermiticity_deviation();
    if dev > tol.hermiticity {
        return Err(Error::NotHermitian { deviation: dev });
    }
    eig_hermitian_part(h)
}

/// Eigendecomposition of (H + H^dagger)/2, for operators that are Hermitian up to round-off.
pub(crate) fn eig_hermitian_part(h: &ComplexMatrix) -> Result<EigenDecomposition> {
    let n = h.rows();
    let sym = DMatrix::from_fn(n, n, |i, j| (h[(i, j)] + h[(j, i)].conj()) * 0.5);
    let eig = SymmetricEigen::try_new(sym, f64::EPSILON, EIG_MAX_ITER).ok_or_else(|| Error::NonConvergence {
        context: "Hermitian eigensolver".into(),
    })?;
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let values = order.iter().map(|&k| eig.eigenvalues[k]).collect();
    let mut vectors = ComplexMatrix::zeros(n, n);
    for (col, &k) in order.iter().enumerate() {
        let v: Vec<C64> = (0..n).map(|i| eig.eigenvectors[(i, k)]).collect();
        let phase = phase_fix(&v);
        for i in 0..n {
            vectors[(i, col)] = v[i] * phase;
        }
    }
    Ok(EigenDecomposition { values, vectors })
}

/// Unit factor making the first non-negligible component real positive.
fn phase_fix(v: &[C64]) -> C64 {
    let max = v.iter().map(|z| z.norm()).fold(0.0, f64::max);
    match v.iter().find(|z| z.norm() > 1e-8 * max.max(1e-300)) {
        Some(z) => z.conj() / z.norm(),
        None => c(1.0, 0.0),
    }
}

pub fn sqrtm(h: &ComplexMatrix, tol: &Tolerances) -> Result<ComplexMatrix> {
    let e = herm_eig(h, tol)?;
    if let Some(&m) = e.values.first() {
        if m < -tol.psd_floor {
            return Err(Error::InvalidState(format!(
                "negative eigenvalue {m:.3e} under square root"
            )));
        }
    }
    Ok(e.apply(|x| x.max(0.0).sqrt()))
}

pub fn inv_sqrtm(h: &ComplexMatrix, tol: &Tolerances) -> Result<ComplexMatrix> {
    let e = herm_eig(h, tol)?;
    require_full_rank(&e, tol)?;
    Ok(e.apply(|x| 1.0 / x.sqrt()))
}

/// Inverse square root on the support; eigenvalues at or below the rank tolerance map to zero.
pub fn pseudo_inv_sqrtm(h: &ComplexMatrix, tol: &Tolerances) -> Result<ComplexMatrix> {
    let e = herm_eig(h, tol)?;
    let r = tol.rank;
    Ok(e.apply(|x| if x > r { 1.0 / x.sqrt() } else { 0.0 }))
}

pub fn logm(h: &ComplexMatrix, tol: &Tolerances) -> Result<ComplexMatrix> {
    let e = herm_eig(h, tol)?;
    require_full_rank(&e, tol)?;
    Ok(e.apply(f64::ln))
}

pub fn expm_hermitian(h: &ComplexMatrix, tol: &Tolerances) -> Result<ComplexMatrix> {
    let e = herm_eig(h, tol)?;
    Ok(e.apply(f64::exp))
}

/// exp(iH) for Hermitian H, a unitary.
pub fn expm_i_hermitian(h: &ComplexMatrix, tol: &Tolerances) -> Result<ComplexMatrix> {
    let e = herm_eig(h, tol)?;
    let n = e.values.len();
    let v = &e.vectors;
    Ok(ComplexMatrix::from_fn(n, n, |i, j| {
        (0..n)
            .map(|k| v[(i, k)] * C64::from_polar(1.0, e.values[k]) * v[(j, k)].conj())
            .sum()
    }))
}

fn require_full_rank(e: &EigenDecomposition, tol: &Tolerances) -> Result<()> {
    match e.values.first() {
        Some(&m) if m <= tol.rank => Err(Error::RankDeficient { min_eigenvalue: m }),
        _ => Ok(()),
    }
}

/// log2 of the trace norm of the partial transpose over B.
pub fn log_negativity(rho: &ComplexMatrix, d_a: usize, d_b: usize) -> Result<f64> {
    let pt = partial_transpose(rho, d_a, d_b, Subsystem::B)?;
    let e = eig_hermitian_part(&pt)?;
    let norm: f64 = e.values.iter().map(|x| x.abs()).sum();
    Ok(norm.log2().max(0.0))
}

/// Singular values (descending) of a complex matrix.
pub fn singular_values(m: &ComplexMatrix) -> Vec<f64> {
    let a = faer::Mat::<faer::c64>::from_fn(m.rows(), m.cols(), |i, j| m[(i, j)]);
    let mut s = a.singular_values().unwrap_or_default();
    s.sort_by(|a, b| b.total_cmp(a));
    s
}

fn to_faer(a: &DMatrix<f64>) -> faer::Mat<f64> {
    faer::Mat::from_fn(a.nrows(), a.ncols(), |i, j| a[(i, j)])
}

/// Real SVD returning singular values (descending, padded with zeros to `n`) and
/// the matching right singular vectors as columns of an `n x n` matrix.
pub fn real_svd_full(a: &DMatrix<f64>) -> Result<(Vec<f64>, DMatrix<f64>)> {
    let n = a.ncols();
    let svd = to_faer(a).svd().map_err(|e| Error::NonConvergence {
        context: format!("singular value decomposition ({e:?})"),
    })?;
    let s = svd.S().column_vector();
    let mut values: Vec<f64> = (0..n).map(|k| if k < s.nrows() { s[k] } else { 0.0 }).collect();
    let v = DMatrix::from_fn(n, n, |i, j| svd.V()[(i, j)]);
    // faer already orders them; keep the contract explicit.
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&x, &y| values[y].total_cmp(&values[x]));
    let v = DMatrix::from_fn(n, n, |i, j| v[(i, order[j])]);
    values = order.iter().map(|&k| values[k]).collect();
    Ok((values, v))
}

/// Least-squares solution of least norm, treating singular values at or below
/// `cut` as zero.
pub fn real_min_norm_lstsq(a: &DMatrix<f64>, b: &DVector<f64>, cut: f64) -> Result<DVector<f64>> {
    let svd = to_faer(a).thin_svd().map_err(|e| Error::NonConvergence {
        context: format!("singular value decomposition ({e:?})"),
    })?;
    let (u, v) = (svd.U(), svd.V());
    let s = svd.S().column_vector();
    let mut x = DVector::zeros(a.ncols());
    for k in 0..s.nrows() {
        if s[k] > cut {
            let coef = (0..a.nrows()).map(|i| u[(i, k)] * b[i]).sum::<f64>() / s[k];
            for j in 0..a.ncols() {
                x[j] += coef * v[(j, k)];
            }
        }
    }
    Ok(x)
}

/// Schmidt coefficients (descending) of a bipartite pure state.
pub fn schmidt_coefficients(psi: &[C64], d_a: usize, d_b: usize) -> Result<Vec<f64>> {
    let m = super::ops::ket_as_matrix(psi, d_a, d_b)?;
    Ok(singular_values(&m))
}

/// Von Neumann entropy (bits) of the reduced state of a pure bipartite ket.
pub fn entanglement_entropy(psi: &[C64], d_a: usize, d_b: usize) -> Result<f64> {
    let s = schmidt_coefficients(psi, d_a, d_b)?;
    let norm: f64 = s.iter().map(|x| x * x).sum();
    Ok(s.iter()
        .map(|x| x * x / norm)
        .filter(|&p| p > 0.0)
        .map(|p| -p * p.log2())
        .sum::<f64>()
        .max(0.0))
}
