use super::matrix::{ComplexMatrix, C64, ZERO};
use crate::error::{Error, Result};
use crate::tolerance::MAX_DIM;

/// Which factor of a bipartite space an operation keeps or acts on.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Subsystem {
    A,
    B,
}

/// Kronecker product with the first factor's index major.
pub fn kron(a: &ComplexMatrix, b: &ComplexMatrix) -> Result<ComplexMatrix> {
    let (rows, cols) = (a.rows() * b.rows(), a.cols() * b.cols());
    if rows.max(cols) > MAX_DIM {
        return Err(Error::DimensionOverflow {
            dim: rows.max(cols),
            max: MAX_DIM,
        });
    }
    let (br, bc) = (b.rows(), b.cols());
    Ok(ComplexMatrix::from_fn(rows, cols, |i, j| {
        a[(i / br, j / bc)] * b[(i % br, j % bc)]
    }))
}

pub fn kron_all(factors: &[&ComplexMatrix]) -> Result<ComplexMatrix> {
    let mut acc = ComplexMatrix::identity(1);
    for f in factors {
        acc = kron(&acc, f)?;
    }
    Ok(acc)
}

fn check_bipartite(m: &ComplexMatrix, d_a: usize, d_b: usize) -> Result<()> {
    if !m.is_square() {
        return Err(Error::mismatch("bipartite operator (columns)", m.rows(), m.cols()));
    }
    if m.rows() != d_a * d_b {
        return Err(Error::mismatch("bipartite operator", d_a * d_b, m.rows()));
    }
    Ok(())
}

/// Traces out one factor of `m` on `d_a x d_b`; `keep` names the factor that survives.
pub fn partial_trace(m: &ComplexMatrix, d_a: usize, d_b: usize, keep: Subsystem) -> Result<ComplexMatrix> {
    check_bipartite(m, d_a, d_b)?;
    Ok(match keep {
        Subsystem::A => ComplexMatrix::from_fn(d_a, d_a, |i, j| (0..d_b).map(|k| m[(i * d_b + k, j * d_b + k)]).sum()),
        Subsystem::B => ComplexMatrix::from_fn(d_b, d_b, |k, l| (0..d_a).map(|i| m[(i * d_b + k, i * d_b + l)]).sum()),
    })
}

pub fn partial_transpose(m: &ComplexMatrix, d_a: usize, d_b: usize, sys: Subsystem) -> Result<ComplexMatrix> {
    check_bipartite(m, d_a, d_b)?;
    let n = d_a * d_b;
    Ok(ComplexMatrix::from_fn(n, n, |r, s| {
        let (i, k) = (r / d_b, r % d_b);
        let (j, l) = (s / d_b, s % d_b);
        match sys {
            Subsystem::B => m[(i * d_b + l, j * d_b + k)],
            Subsystem::A => m[(j * d_b + k, i * d_b + l)],
        }
    }))
}

/// Reshuffles a bipartite operator so that `m = sum_k A_k (x) B_k` becomes the
/// matrix `sum_k vec(A_k) vec(B_k)^T`; its rank is the operator-Schmidt rank.
pub fn realign(m: &ComplexMatrix, d_a: usize, d_b: usize) -> Result<ComplexMatrix> {
    check_bipartite(m, d_a, d_b)?;
    let mut out = ComplexMatrix::zeros(d_a * d_a, d_b * d_b);
    for i in 0..d_a {
        for j in 0..d_a {
            for k in 0..d_b {
                for l in 0..d_b {
                    out[(i * d_a + j, k * d_b + l)] = m[(i * d_b + k, j * d_b + l)];
                }
            }
        }
    }
    Ok(out)
}

/// Coefficient matrix of a bipartite ket, `psi[a * d_b + b]` at `(a, b)`.
pub fn ket_as_matrix(psi: &[C64], d_a: usize, d_b: usize) -> Result<ComplexMatrix> {
    if psi.len() != d_a * d_b {
        return Err(Error::mismatch("bipartite ket", d_a * d_b, psi.len()));
    }
    ComplexMatrix::new(d_a, d_b, psi.to_vec())
}

pub fn swap_operator(d: usize) -> ComplexMatrix {
    let mut s = ComplexMatrix::zeros(d * d, d * d);
    for a in 0..d {
        for b in 0..d {
            s[(b * d + a, a * d + b)] = C64::new(1.0, 0.0);
        }
    }
    s
}

/// U X U^dagger
pub fn conjugate(u: &ComplexMatrix, x: &ComplexMatrix) -> ComplexMatrix {
    &(u * x) * &u.adjoint()
}

/// Matrix unit |i><j| in dimension d.
pub fn matrix_unit(d: usize, i: usize, j: usize) -> ComplexMatrix {
    let mut m = ComplexMatrix::zeros(d, d);
    m[(i, j)] = C64::new(1.0, 0.0);
    m
}

pub fn is_zero(m: &ComplexMatrix, tol: f64) -> bool {
    m.data().iter().all(|z| (z - ZERO).norm() <= tol)
}
