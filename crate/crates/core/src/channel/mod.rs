//! Quantum channels in Choi form, Petz recovery and dilations.

mod conventions;
mod petz;
mod thermal;

pub use conventions::{
    conventions_compare_two_qubit, product_factors, qubit_complement, ActionTable, ConventionsReport,
};
pub use petz::{
    compose_retro_quantum, partial_trace_map, petz, petz_of_composition, petz_pseudoinverse, petz_via_dilation,
    quantum_assignment, AssignmentConvention,
};
pub use thermal::{gibbs_state, thermal_reverse_check, GibbsSpec, ThermalReport};

use crate::error::{Error, Result};
use crate::linalg::{
    eig_hermitian_part, kron, matrix_unit, partial_trace, ComplexMatrix, DensityOperator, Subsystem, UnitaryOperator,
    ZERO,
};
use crate::tolerance::{Tolerances, MAX_DIM};

/// The guard applies to the Hilbert spaces; the Choi matrix itself may be larger.
fn check_dims(d_in: usize, d_out: usize) -> Result<()> {
    let d = d_in.max(d_out);
    if d > MAX_DIM {
        return Err(Error::DimensionOverflow { dim: d, max: MAX_DIM });
    }
    Ok(())
}

/// Linear map between operator spaces held as its Choi matrix
/// `J = sum_ij E(|i><j|) (x) |i><j|`, output factor first.
#[derive(Clone, Debug, PartialEq)]
pub struct LinearMap {
    d_in: usize,
    d_out: usize,
    choi: ComplexMatrix,
}

impl LinearMap {
    pub fn from_choi(d_in: usize, d_out: usize, choi: ComplexMatrix) -> Result<Self> {
        let n = d_in * d_out;
        check_dims(d_in, d_out)?;
        if choi.rows() != n || choi.cols() != n {
            return Err(Error::mismatch("Choi matrix", n, choi.rows()));
        }
        Ok(LinearMap { d_in, d_out, choi })
    }

    /// Builds the Choi matrix by evaluating `f` on every matrix unit.
    pub fn from_fn(
        d_in: usize,
        d_out: usize,
        mut f: impl FnMut(&ComplexMatrix) -> Result<ComplexMatrix>,
    ) -> Result<Self> {
        let n = d_in * d_out;
        check_dims(d_in, d_out)?;
        let mut choi = ComplexMatrix::zeros(n, n);
        for i in 0..d_in {
            for j in 0..d_in {
                let out = f(&matrix_unit(d_in, i, j))?;
                if out.rows() != d_out || out.cols() != d_out {
                    return Err(Error::mismatch("map output", d_out, out.rows()));
                }
                for a in 0..d_out {
                    for b in 0..d_out {
                        choi[(a * d_in + i, b * d_in + j)] = out[(a, b)];
                    }
                }
            }
        }
        Ok(LinearMap { d_in, d_out, choi })
    }

    pub fn from_kraus(kraus: &[ComplexMatrix]) -> Result<Self> {
        let first = kraus
            .first()
            .ok_or_else(|| Error::InvalidArgument("empty Kraus list".into()))?;
        let (d_out, d_in) = (first.rows(), first.cols());
        Self::from_fn(d_in, d_out, |x| {
            let mut acc = ComplexMatrix::zeros(d_out, d_out);
            for k in kraus {
                if (k.rows(), k.cols()) != (d_out, d_in) {
                    return Err(Error::mismatch("Kraus operator", d_out * d_in, k.rows() * k.cols()));
                }
                acc = &acc + &(&(k * x) * &k.adjoint());
            }
            Ok(acc)
        })
    }

    pub fn unitary(u: &ComplexMatrix) -> Result<Self> {
        Self::from_kraus(std::slice::from_ref(u))
    }

    pub fn identity(d: usize) -> Self {
        Self::unitary(&ComplexMatrix::identity(d)).expect("identity map")
    }

    pub fn d_in(&self) -> usize {
        self.d_in
    }

    pub fn d_out(&self) -> usize {
        self.d_out
    }

    pub fn choi(&self) -> &ComplexMatrix {
        &self.choi
    }

    pub fn apply(&self, x: &ComplexMatrix) -> Result<ComplexMatrix> {
        if x.rows() != self.d_in || x.cols() != self.d_in {
            return Err(Error::mismatch("map input", self.d_in, x.rows()));
        }
        let (di, dout) = (self.d_in, self.d_out);
        Ok(ComplexMatrix::from_fn(dout, dout, |a, b| {
            let mut s = ZERO;
            for i in 0..di {
                for j in 0..di {
                    let xij = x[(i, j)];
                    if xij != ZERO {
                        s += xij * self.choi[(a * di + i, b * di + j)];
                    }
                }
            }
            s
        }))
    }

    /// `self` after `first`.
    pub fn compose(&self, first: &LinearMap) -> Result<LinearMap> {
        if first.d_out != self.d_in {
            return Err(Error::mismatch("map composition", self.d_in, first.d_out));
        }
        LinearMap::from_fn(first.d_in, self.d_out, |x| self.apply(&first.apply(x)?))
    }

    /// Hilbert-Schmidt adjoint, `Tr(E[X] Y) = Tr(X E^dagger[Y])`.
    pub fn adjoint(&self) -> LinearMap {
        let (di, dout) = (self.d_in, self.d_out);
        let n = di * dout;
        let choi = ComplexMatrix::from_fn(n, n, |r, s| {
            let (i, a) = (r / dout, r % dout);
            let (j, b) = (s / dout, s % dout);
            self.choi[(b * di + j, a * di + i)]
        });
        LinearMap {
            d_in: dout,
            d_out: di,
            choi,
        }
    }

    /// Largest deviation of `Tr_out J` from the identity.
    pub fn tp_deviation(&self) -> f64 {
        partial_trace(&self.choi, self.d_out, self.d_in, Subsystem::B)
            .map(|m| m.max_abs_diff(&ComplexMatrix::identity(self.d_in)))
            .unwrap_or(f64::INFINITY)
    }

    pub fn unital_deviation(&self) -> f64 {
        self.apply(&ComplexMatrix::identity(self.d_in))
            .map(|m| m.max_abs_diff(&ComplexMatrix::identity(self.d_out)))
            .unwrap_or(f64::INFINITY)
    }

    pub fn min_choi_eigenvalue(&self) -> Result<f64> {
        Ok(eig_hermitian_part(&self.choi)?.values[0])
    }

    /// Kraus operators from the Choi eigendecomposition, dropping eigenvalues below the rank tolerance.
    pub fn kraus(&self, tol: &Tolerances) -> Result<Vec<ComplexMatrix>> {
        let e = eig_hermitian_part(&self.choi)?;
        let mut ops = Vec::new();
        for (k, &lam) in e.values.iter().enumerate().rev() {
            if lam <= tol.rank {
                continue;
            }
            let s = lam.sqrt();
            let v = e.vector(k);
            ops.push(ComplexMatrix::from_fn(self.d_out, self.d_in, |a, i| {
                v[a * self.d_in + i] * s
            }));
        }
        Ok(ops)
    }

    /// Frobenius distance between Choi matrices.
    pub fn dist(&self, other: &LinearMap) -> f64 {
        self.choi.dist(&other.choi)
    }
}

/// Unitary dilation `E[X] = Tr_B[U (X (x) beta) U^dagger]`.
#[derive(Clone, Debug, PartialEq)]
pub struct StinespringDilation {
    d_a: usize,
    d_b: usize,
    u: UnitaryOperator,
    beta: DensityOperator,
}

impl StinespringDilation {
    pub fn new(u: UnitaryOperator, beta: DensityOperator) -> Result<Self> {
        let d_b = beta.dim();
        if d_b == 0 || !u.dim().is_multiple_of(d_b) {
            return Err(Error::mismatch("dilation unitary vs ancilla", d_b, u.dim()));
        }
        Ok(StinespringDilation {
            d_a: u.dim() / d_b,
            d_b,
            u,
            beta,
        })
    }

    pub fn d_a(&self) -> usize {
        self.d_a
    }

    pub fn d_b(&self) -> usize {
        self.d_b
    }

    pub fn unitary(&self) -> &UnitaryOperator {
        &self.u
    }

    pub fn beta(&self) -> &DensityOperator {
        &self.beta
    }

    /// `U (alpha (x) beta) U^dagger`, tagged with the bipartition.
    pub fn global_output(&self, alpha: &DensityOperator, tol: &Tolerances) -> Result<DensityOperator> {
        if alpha.dim() != self.d_a {
            return Err(Error::mismatch("prior", self.d_a, alpha.dim()));
        }
        let joint = kron(alpha.matrix(), self.beta.matrix())?;
        DensityOperator::from_computed(&self.u.conjugate(&joint), tol)?.with_bipartition(self.d_a, self.d_b)
    }

    pub fn channel(&self, tol: &Tolerances) -> Result<QuantumChannel> {
        channel_from_dilation(self, tol)
    }
}

/// CPTP map with optional Kraus and Stinespring views.
#[derive(Clone, Debug, PartialEq)]
pub struct QuantumChannel {
    map: LinearMap,
    kraus: Option<Vec<ComplexMatrix>>,
    stinespring: Option<StinespringDilation>,
}

impl QuantumChannel {
    /// Validates complete positivity and trace preservation at the channel tolerance.
    pub fn from_map(map: LinearMap, tol: &Tolerances) -> Result<Self> {
        let min = map.min_choi_eigenvalue()?;
        if min < -tol.channel {
            return Err(Error::NotChannel(format!("Choi eigenvalue {min:.3e} is negative")));
        }
        let tp = map.tp_deviation();
        if tp > tol.channel {
            return Err(Error::NotChannel(format!("trace preservation violated by {tp:.3e}")));
        }
        Ok(QuantumChannel {
            map,
            kraus: None,
            stinespring: None,
        })
    }

    pub fn from_choi(d_in: usize, d_out: usize, choi: ComplexMatrix, tol: &Tolerances) -> Result<Self> {
        if choi.hermiticity_deviation() > tol.channel {
            return Err(Error::NotChannel("Choi matrix is not Hermitian".into()));
        }
        Self::from_map(LinearMap::from_choi(d_in, d_out, choi)?, tol)
    }

    pub fn from_kraus(kraus: Vec<ComplexMatrix>, tol: &Tolerances) -> Result<Self> {
        let map = LinearMap::from_kraus(&kraus)?;
        let d_in = map.d_in();
        let mut sum = ComplexMatrix::zeros(d_in, d_in);
        for k in &kraus {
            sum = &sum + &(&k.adjoint() * k);
        }
        let dev = sum.max_abs_diff(&ComplexMatrix::identity(d_in));
        if dev > tol.channel {
            return Err(Error::NotChannel(format!("Kraus completeness violated by {dev:.3e}")));
        }
        let mut ch = Self::from_map(map, tol)?;
        ch.kraus = Some(kraus);
        Ok(ch)
    }

    pub fn unitary(u: &UnitaryOperator) -> Self {
        QuantumChannel {
            map: LinearMap::unitary(u.matrix()).expect("square unitary"),
            kraus: Some(vec![u.matrix().clone()]),
            stinespring: None,
        }
    }

    pub fn identity(d: usize) -> Self {
        Self::unitary(&UnitaryOperator::identity(d))
    }

    /// `X -> Tr(X) sigma`
    pub fn replacement(d_in: usize, sigma: &DensityOperator, tol: &Tolerances) -> Result<Self> {
        let map = LinearMap::from_fn(d_in, sigma.dim(), |x| Ok(sigma.matrix().scale(x.trace())))?;
        Self::from_map(map, tol)
    }

    pub fn map(&self) -> &LinearMap {
        &self.map
    }

    pub fn into_map(self) -> LinearMap {
        self.map
    }

    pub fn d_in(&self) -> usize {
        self.map.d_in
    }

    pub fn d_out(&self) -> usize {
        self.map.d_out
    }

    pub fn choi(&self) -> &ComplexMatrix {
        &self.map.choi
    }

    pub fn stinespring(&self) -> Option<&StinespringDilation> {
        self.stinespring.as_ref()
    }

    /// Stored Kraus operators, or ones extracted from the Choi matrix.
    pub fn kraus(&self, tol: &Tolerances) -> Result<Vec<ComplexMatrix>> {
        match &self.kraus {
            Some(k) => Ok(k.clone()),
            None => self.map.kraus(tol),
        }
    }

    pub fn apply(&self, x: &ComplexMatrix) -> Result<ComplexMatrix> {
        self.map.apply(x)
    }

    pub fn apply_state(&self, rho: &DensityOperator, tol: &Tolerances) -> Result<DensityOperator> {
        DensityOperator::from_computed(&self.map.apply(rho.matrix())?, tol)
    }

    /// `self` after `first`.
    pub fn compose(&self, first: &QuantumChannel) -> Result<QuantumChannel> {
        Ok(QuantumChannel {
            map: self.map.compose(&first.map)?,
            kraus: None,
            stinespring: None,
        })
    }

    /// `E^L`, `L >= 1`.
    pub fn power(&self, l: usize) -> Result<QuantumChannel> {
        if l == 0 {
            return Err(Error::InvalidArgument("channel power must be at least 1".into()));
        }
        let mut acc = self.clone();
        for _ in 1..l {
            acc = self.compose(&acc)?;
        }
        acc.kraus = None;
        acc.stinespring = None;
        Ok(acc)
    }

    pub fn adjoint(&self) -> LinearMap {
        adjoint(self)
    }

    pub fn dist(&self, other: &QuantumChannel) -> f64 {
        self.map.dist(&other.map)
    }
}

pub fn channel_from_dilation(dil: &StinespringDilation, tol: &Tolerances) -> Result<QuantumChannel> {
    let u = dil.u.matrix();
    let (d_a, d_b) = (dil.d_a, dil.d_b);
    let beta = dil.beta.matrix();
    let map = LinearMap::from_fn(d_a, d_a, |x| {
        let global = crate::linalg::conjugate(u, &kron(x, beta)?);
        partial_trace(&global, d_a, d_b, Subsystem::A)
    })?;
    let mut ch = QuantumChannel::from_map(map, tol)?;
    ch.stinespring = Some(dil.clone());
    Ok(ch)
}

/// Hilbert-Schmidt adjoint; completely positive and unital.
pub fn adjoint(e: &QuantumChannel) -> LinearMap {
    e.map.adjoint()
}

/// `X -> Tr_B[U^dagger (X (x) beta') U]`, the dilation run backwards with a replaced ancilla.
pub fn reversed_dilation(dil: &StinespringDilation, beta_prime: &ComplexMatrix) -> Result<LinearMap> {
    if beta_prime.rows() != dil.d_b {
        return Err(Error::mismatch("replacement ancilla", dil.d_b, beta_prime.rows()));
    }
    let ud = dil.u.matrix().adjoint();
    let (d_a, d_b) = (dil.d_a, dil.d_b);
    LinearMap::from_fn(d_a, d_a, |x| {
        partial_trace(
            &crate::linalg::conjugate(&ud, &kron(x, beta_prime)?),
            d_a,
            d_b,
            Subsystem::A,
        )
    })
}
