use super::eig::{eig_hermitian_part, herm_eig, EigenDecomposition};
use super::matrix::{c, ComplexMatrix, C64, I, ONE, ZERO};
use super::ops::{kron, partial_trace, Subsystem};
use crate::error::{Error, Result};
use crate::tolerance::Tolerances;

#[derive(Clone, Debug, PartialEq, serde::Serialize)]
#[serde(transparent)]
pub struct HermitianOperator {
    matrix: ComplexMatrix,
}

impl HermitianOperator {
    pub fn new(matrix: ComplexMatrix, tol: &Tolerances) -> Result<Self> {
        if !matrix.is_square() {
            return Err(Error::mismatch("Hermitian operator", matrix.rows(), matrix.cols()));
        }
        let dev = matrix.hermiticity_deviation();
        if dev > tol.hermiticity {
            return Err(Error::NotHermitian { deviation: dev });
        }
        Ok(Self::hermitian_part(&matrix))
    }

    /// (M + M^dagger)/2; used for operators that are Hermitian by construction.
    pub fn hermitian_part(m: &ComplexMatrix) -> Self {
        let n = m.rows();
        HermitianOperator {
            matrix: ComplexMatrix::from_fn(n, n, |i, j| (m[(i, j)] + m[(j, i)].conj()) * 0.5),
        }
    }

    pub fn dim(&self) -> usize {
        self.matrix.rows()
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> ComplexMatrix {
        self.matrix
    }

    pub fn eig(&self) -> Result<EigenDecomposition> {
        eig_hermitian_part(&self.matrix)
    }

    /// Traceless part, H - Tr(H)/d.
    pub fn traceless(&self) -> Self {
        let d = self.dim() as f64;
        let shift = self.matrix.trace().re / d;
        HermitianOperator {
            matrix: &self.matrix - &ComplexMatrix::identity(self.dim()).scale_real(shift),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct DensityOperator {
    matrix: ComplexMatrix,
    bipartition: Option<(usize, usize)>,
}

impl DensityOperator {
    /// Validates Hermiticity, unit trace (1e-12) and the PSD floor.
    pub fn new(matrix: ComplexMatrix, tol: &Tolerances) -> Result<Self> {
        let h = HermitianOperator::new(matrix, tol)?;
        Self::from_hermitian(h, tol)
    }

    fn from_hermitian(h: HermitianOperator, tol: &Tolerances) -> Result<Self> {
        let tr = h.matrix().trace().re;
        if (tr - 1.0).abs() > tol.probability {
            return Err(Error::InvalidState(format!("trace {tr} differs from 1")));
        }
        let e = h.eig()?;
        if let Some(&m) = e.values.first() {
            if m < -tol.psd_floor {
                return Err(Error::InvalidState(format!("negative eigenvalue {m:.3e}")));
            }
        }
        Ok(DensityOperator {
            matrix: h.into_matrix(),
            bipartition: None,
        })
    }

    /// Accepts an operator that is a state up to accumulated round-off:
    /// symmetrizes, renormalizes the trace, then checks the PSD floor.
    pub fn from_computed(m: &ComplexMatrix, tol: &Tolerances) -> Result<Self> {
        let h = HermitianOperator::hermitian_part(m);
        let tr = h.matrix().trace().re;
        if (tr - 1.0).abs() > tol.channel {
            return Err(Error::InvalidState(format!("trace {tr} differs from 1")));
        }
        let scaled = HermitianOperator::hermitian_part(&h.matrix().scale_real(1.0 / tr));
        Self::from_hermitian(scaled, tol)
    }

    pub fn with_bipartition(mut self, d_a: usize, d_b: usize) -> Result<Self> {
        if d_a * d_b != self.dim() {
            return Err(Error::mismatch("bipartition", self.dim(), d_a * d_b));
        }
        self.bipartition = Some((d_a, d_b));
        Ok(self)
    }

    pub fn pure(psi: &[C64]) -> Result<Self> {
        let n = super::matrix::vec_norm(psi);
        if !(n > 0.0) || !n.is_finite() {
            return Err(Error::InvalidState("zero or non-finite ket".into()));
        }
        let v: Vec<C64> = psi.iter().map(|z| z / n).collect();
        Ok(DensityOperator {
            matrix: HermitianOperator::hermitian_part(&ComplexMatrix::outer(&v, &v)).into_matrix(),
            bipartition: None,
        })
    }

    pub fn maximally_mixed(d: usize) -> Self {
        DensityOperator {
            matrix: ComplexMatrix::identity(d).scale_real(1.0 / d as f64),
            bipartition: None,
        }
    }

    pub fn diagonal(p: &[f64], tol: &Tolerances) -> Result<Self> {
        Self::new(ComplexMatrix::diag_real(p), tol)
    }

    pub fn dim(&self) -> usize {
        self.matrix.rows()
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn bipartition(&self) -> Option<(usize, usize)> {
        self.bipartition
    }

    pub fn eig(&self) -> Result<EigenDecomposition> {
        eig_hermitian_part(&self.matrix)
    }

    pub fn spectrum(&self) -> Result<Vec<f64>> {
        Ok(self.eig()?.values)
    }

    pub fn tensor(&self, other: &DensityOperator) -> Result<DensityOperator> {
        Ok(DensityOperator {
            matrix: kron(&self.matrix, &other.matrix)?,
            bipartition: Some((self.dim(), other.dim())),
        })
    }

    pub fn marginal(&self, keep: Subsystem) -> Result<DensityOperator> {
        let (d_a, d_b) = self
            .bipartition
            .ok_or_else(|| Error::InvalidArgument("state has no bipartition".into()))?;
        Ok(DensityOperator {
            matrix: HermitianOperator::hermitian_part(&partial_trace(&self.matrix, d_a, d_b, keep)?).into_matrix(),
            bipartition: None,
        })
    }

    pub fn is_full_rank(&self, tol: &Tolerances) -> Result<bool> {
        Ok(self.eig()?.values[0] > tol.rank)
    }

    pub fn is_pure(&self, tol: &Tolerances) -> Result<bool> {
        let v = self.eig()?.values;
        Ok((v[v.len() - 1] - 1.0).abs() <= tol.product)
    }
}

#[derive(Clone, Debug, PartialEq, serde::Serialize)]
#[serde(transparent)]
pub struct UnitaryOperator {
    matrix: ComplexMatrix,
}

impl UnitaryOperator {
    pub fn new(matrix: ComplexMatrix, tol: &Tolerances) -> Result<Self> {
        if !matrix.is_square() {
            return Err(Error::mismatch("unitary", matrix.rows(), matrix.cols()));
        }
        let dev = (&matrix * &matrix.adjoint()).max_abs_diff(&ComplexMatrix::identity(matrix.rows()));
        if dev > tol.unitarity {
            return Err(Error::NotUnitary { deviation: dev });
        }
        Ok(UnitaryOperator { matrix })
    }

    pub fn identity(d: usize) -> Self {
        UnitaryOperator {
            matrix: ComplexMatrix::identity(d),
        }
    }

    pub fn dim(&self) -> usize {
        self.matrix.rows()
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn adjoint(&self) -> UnitaryOperator {
        UnitaryOperator {
            matrix: self.matrix.adjoint(),
        }
    }

    pub fn compose(&self, other: &UnitaryOperator) -> UnitaryOperator {
        UnitaryOperator {
            matrix: &self.matrix * &other.matrix,
        }
    }

    pub fn tensor(&self, other: &UnitaryOperator) -> Result<UnitaryOperator> {
        Ok(UnitaryOperator {
            matrix: kron(&self.matrix, &other.matrix)?,
        })
    }

    /// U X U^dagger
    pub fn conjugate(&self, x: &ComplexMatrix) -> ComplexMatrix {
        super::ops::conjugate(&self.matrix, x)
    }

    pub(crate) fn from_trusted(matrix: ComplexMatrix) -> Self {
        UnitaryOperator { matrix }
    }
}

pub fn pauli_x() -> ComplexMatrix {
    ComplexMatrix::from_rows(&[vec![ZERO, ONE], vec![ONE, ZERO]]).expect("2x2")
}

pub fn pauli_y() -> ComplexMatrix {
    ComplexMatrix::from_rows(&[vec![ZERO, -I], vec![I, ZERO]]).expect("2x2")
}

pub fn pauli_z() -> ComplexMatrix {
    ComplexMatrix::from_rows(&[vec![ONE, ZERO], vec![ZERO, c(-1.0, 0.0)]]).expect("2x2")
}

/// sigma_1, sigma_2, sigma_3
pub fn paulis() -> [ComplexMatrix; 3] {
    [pauli_x(), pauli_y(), pauli_z()]
}

/// Orthonormal (Hilbert-Schmidt) basis of traceless Hermitian d x d matrices.
pub fn traceless_hermitian_basis(d: usize) -> Vec<ComplexMatrix> {
    let mut basis = Vec::with_capacity(d * d - 1);
    let s = std::f64::consts::FRAC_1_SQRT_2;
    for j in 0..d {
        for k in (j + 1)..d {
            let mut m = ComplexMatrix::zeros(d, d);
            m[(j, k)] = c(s, 0.0);
            m[(k, j)] = c(s, 0.0);
            basis.push(m);
            let mut m = ComplexMatrix::zeros(d, d);
            m[(j, k)] = c(0.0, -s);
            m[(k, j)] = c(0.0, s);
            basis.push(m);
        }
    }
    for l in 1..d {
        let norm = 1.0 / ((l * (l + 1)) as f64).sqrt();
        let mut m = ComplexMatrix::zeros(d, d);
        for i in 0..l {
            m[(i, i)] = c(norm, 0.0);
        }
        m[(l, l)] = c(-(l as f64) * norm, 0.0);
        basis.push(m);
    }
    basis
}

/// Checked Hermitian eigendecomposition of a validated operator.
pub fn eig_checked(h: &HermitianOperator, tol: &Tolerances) -> Result<EigenDecomposition> {
    herm_eig(h.matrix(), tol)
}

impl serde::Serialize for DensityOperator {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        use serde::ser::SerializeMap;
        let n = self.matrix.rows();
        let mut map = s.serialize_map(None)?;
        map.serialize_entry("rows", &n)?;
        map.serialize_entry("cols", &n)?;
        let data: Vec<[f64; 2]> = self.matrix.data().iter().map(|z| [z.re, z.im]).collect();
        map.serialize_entry("data", &data)?;
        if let Some((a, b)) = self.bipartition {
            map.serialize_entry("d_A", &a)?;
            map.serialize_entry("d_B", &b)?;
        }
        map.end()
    }
}
