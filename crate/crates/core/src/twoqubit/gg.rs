use std::f64::consts::{FRAC_PI_2, FRAC_PI_4};

use nalgebra::DMatrix;
use serde::Serialize;

use super::cartan::{cartan_decompose, CartanForm};
use crate::error::{Error, Result};
use crate::linalg::{
    conjugate, kron, paulis, real_svd_full, traceless_hermitian_basis, ComplexMatrix, HermitianOperator,
    UnitaryOperator,
};
use crate::tolerance::Tolerances;

/// Distance from `x` to the nearest integer multiple of `period`.
pub fn distance_to_multiple(x: f64, period: f64) -> f64 {
    (x - period * (x / period).round()).abs()
}

fn near_multiple(x: f64, period: f64, tol: &Tolerances) -> bool {
    distance_to_multiple(x, period) <= tol.angle
}

/// The angle test: some pair has `t_j - t_k` or `t_j + t_k` congruent to 0 mod pi/2.
pub fn gg_angle_test(t: [f64; 3], tol: &Tolerances) -> bool {
    [(0, 1), (0, 2), (1, 2)]
        .iter()
        .any(|&(j, k)| near_multiple(t[j] - t[k], FRAC_PI_2, tol) || near_multiple(t[j] + t[k], FRAC_PI_2, tol))
}

/// `|| U (H_A (x) 1 + 1 (x) H_B) U^dagger - (H_A' (x) 1 + 1 (x) H_B') ||_F`.
pub fn local_sum_residual(
    u: &ComplexMatrix,
    h_a: &ComplexMatrix,
    h_b: &ComplexMatrix,
    h_a_out: &ComplexMatrix,
    h_b_out: &ComplexMatrix,
) -> Result<f64> {
    let lhs = conjugate(u, &local_sum(h_a, h_b)?);
    let rhs = local_sum(h_a_out, h_b_out)?;
    if lhs.rows() != rhs.rows() {
        return Err(Error::mismatch("local sum", lhs.rows(), rhs.rows()));
    }
    Ok(lhs.dist(&rhs))
}

pub(crate) fn local_sum(h_a: &ComplexMatrix, h_b: &ComplexMatrix) -> Result<ComplexMatrix> {
    let a = kron(h_a, &ComplexMatrix::identity(h_b.rows()))?;
    let b = kron(&ComplexMatrix::identity(h_a.rows()), h_b)?;
    Ok(&a + &b)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GGTuple {
    pub h_a: HermitianOperator,
    pub h_b: HermitianOperator,
    pub h_a_out: HermitianOperator,
    pub h_b_out: HermitianOperator,
}

impl GGTuple {
    pub fn residual(&self, u: &ComplexMatrix) -> Result<f64> {
        local_sum_residual(
            u,
            self.h_a.matrix(),
            self.h_b.matrix(),
            self.h_a_out.matrix(),
            self.h_b_out.matrix(),
        )
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "case", rename_all = "kebab-case")]
pub enum GGCase {
    /// At most one angle is a multiple of pi/4.
    Generic,
    /// A single admissible Pauli axis; `swap` when the other two angles sit at pi/4.
    OneAxis {
        axis: usize,
        swap: bool,
    },
    /// Every angle a multiple of pi/4 with equal parity: all local pairs admissible.
    CliffordLike {
        swap: bool,
    },
    None,
}

/// Exponents of the bit flips `prod_j s_j^{m_j}` for the generic case.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FlipAssignment {
    pub m_minus: [u8; 3],
    pub m_plus: [u8; 3],
    pub sigma_tilde: ComplexMatrix,
    pub varsigma_tilde: ComplexMatrix,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GGHamiltonianFamily {
    pub case: GGCase,
    pub basis: Vec<GGTuple>,
    pub flips: Vec<FlipAssignment>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GGClassification {
    pub is_gg: bool,
    pub cartan: CartanForm,
    pub family: GGHamiltonianFamily,
    pub max_residual: f64,
    pub oracle_dim: usize,
    /// False when the angle test and the nullspace oracle disagree.
    pub oracle_agrees: bool,
}

fn flip_operator(m: [u8; 3]) -> ComplexMatrix {
    let p = paulis();
    (0..3).fold(
        ComplexMatrix::identity(2),
        |acc, j| if m[j] == 1 { &acc * &p[j] } else { acc },
    )
}

/// Sign picked up by s_j under conjugation with `prod_i s_i^{m_i}`.
fn conjugation_sign(m: [u8; 3], j: usize) -> f64 {
    let odd = (0..3).filter(|&i| i != j && m[i] == 1).count() % 2 == 1;
    if odd {
        -1.0
    } else {
        1.0
    }
}

struct Direction {
    axis: usize,
    sign: f64,
    k_a: f64,
    k_b: f64,
}

/// Admissible directions `(s_j, +-s_j)` in the frame where `U` is `A(t)`, with the
/// coefficients the interaction assigns to the outgoing local terms.
fn directions(t: [f64; 3], tol: &Tolerances) -> Vec<Direction> {
    let mut out = Vec::new();
    for j in 0..3 {
        let (k, l) = ((j + 1) % 3, (j + 2) % 3);
        let (ck, sk) = ((2.0 * t[k]).cos(), (2.0 * t[k]).sin());
        let (cl, sl) = ((2.0 * t[l]).cos(), (2.0 * t[l]).sin());
        for (sign, ok) in [
            (1.0, near_multiple(t[k] - t[l], FRAC_PI_2, tol)),
            (-1.0, near_multiple(t[k] + t[l], FRAC_PI_2, tol)),
        ] {
            if ok {
                out.push(Direction {
                    axis: j,
                    sign,
                    k_a: ck * cl + sign * sk * sl,
                    k_b: sign * ck * cl + sk * sl,
                });
            }
        }
    }
    out
}

fn case_tag(t: [f64; 3], is_gg: bool, tol: &Tolerances) -> GGCase {
    if !is_gg {
        return GGCase::None;
    }
    let zero: Vec<bool> = t.iter().map(|&x| near_multiple(x, FRAC_PI_4, tol)).collect();
    let odd: Vec<bool> = t.iter().map(|&x| !near_multiple(x, FRAC_PI_2, tol)).collect();
    match zero.iter().filter(|&&z| z).count() {
        0 | 1 => GGCase::Generic,
        2 => {
            let axis = zero.iter().position(|&z| !z).expect("one free axis");
            let j = (axis + 1) % 3;
            GGCase::OneAxis { axis, swap: odd[j] }
        }
        _ => {
            if odd[0] == odd[1] && odd[1] == odd[2] {
                GGCase::CliffordLike { swap: odd[0] }
            } else {
                // Two angles share a parity; the third fixes the admissible axis.
                let axis = (0..3)
                    .find(|&l| odd[(l + 1) % 3] == odd[(l + 2) % 3])
                    .expect("pigeonhole");
                GGCase::OneAxis {
                    axis,
                    swap: odd[(axis + 1) % 3],
                }
            }
        }
    }
}

fn family_from_form(form: &CartanForm, tol: &Tolerances) -> (bool, GGHamiltonianFamily) {
    let p = paulis();
    let dirs = directions(form.t, tol);
    let is_gg = gg_angle_test(form.t, tol);
    let case = case_tag(form.t, is_gg, tol);
    let rot =
        |w: &ComplexMatrix, j: usize, s: f64| HermitianOperator::hermitian_part(&conjugate(w, &p[j]).scale_real(s));
    let basis: Vec<GGTuple> = dirs
        .iter()
        .map(|d| GGTuple {
            h_a: rot(&form.v_a, d.axis, 1.0),
            h_b: rot(&form.v_b, d.axis, d.sign),
            h_a_out: rot(&form.u_a, d.axis, d.k_a),
            h_b_out: rot(&form.u_b, d.axis, d.k_b),
        })
        .collect();
    let flips = if case == GGCase::Generic {
        generic_flips(&dirs)
    } else {
        Vec::new()
    };
    (is_gg, GGHamiltonianFamily { case, basis, flips })
}

/// All even-parity exponent vectors whose flips reproduce every admissible direction.
fn generic_flips(dirs: &[Direction]) -> Vec<FlipAssignment> {
    let vectors: Vec<[u8; 3]> = (0..8u8)
        .map(|b| [b & 1, (b >> 1) & 1, (b >> 2) & 1])
        .filter(|m| m.iter().sum::<u8>() % 2 == 0)
        .collect();
    let mut out = Vec::new();
    for &m_minus in &vectors {
        for &m_plus in &vectors {
            let ok = dirs.iter().all(|d| {
                conjugation_sign(m_minus, d.axis) == d.sign && conjugation_sign(m_plus, d.axis) == d.k_a.signum()
            });
            if ok {
                out.push(FlipAssignment {
                    m_minus,
                    m_plus,
                    sigma_tilde: flip_operator(m_minus),
                    varsigma_tilde: flip_operator(m_plus),
                });
            }
        }
    }
    out
}

/// Decides the generalized-thermal property from the Weyl angles and builds
/// the admissible Hamiltonian family.
pub fn classify_gg(u: &UnitaryOperator, tol: &Tolerances) -> Result<GGClassification> {
    let form = cartan_decompose(u, tol)?;
    let (is_gg, family) = family_from_form(&form, tol);
    let mut max_residual: f64 = 0.0;
    for tuple in &family.basis {
        max_residual = max_residual.max(tuple.residual(u.matrix())?);
    }
    let oracle = gg_nullspace_oracle(u, 2, 2)?;
    Ok(GGClassification {
        is_gg,
        oracle_agrees: is_gg == (oracle.dim >= 1) && (!is_gg || oracle.dim == family.basis.len()),
        oracle_dim: oracle.dim,
        cartan: form,
        family,
        max_residual,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct NullspaceReport {
    pub dim: usize,
    pub basis: Vec<(HermitianOperator, HermitianOperator)>,
    /// Singular values of the non-locality map, ascending.
    pub singular_values: Vec<f64>,
}

const NULLSPACE_THRESHOLD: f64 = 1e-9;

/// Nullspace of the real-linear map sending traceless `(H_A, H_B)` to the part of
/// `U (H_A (x) 1 + 1 (x) H_B) U^dagger` orthogonal to all local sums.
pub fn gg_nullspace_oracle(u: &UnitaryOperator, d_a: usize, d_b: usize) -> Result<NullspaceReport> {
    let d = d_a * d_b;
    if u.dim() != d {
        return Err(Error::mismatch("nullspace oracle", d, u.dim()));
    }
    let ga = traceless_hermitian_basis(d_a);
    let gb = traceless_hermitian_basis(d_b);
    let ia = ComplexMatrix::identity(d_a);
    let ib = ComplexMatrix::identity(d_b);
    // Orthonormal spanning set of local sums (the identity is orthogonal to the rest).
    let mut local: Vec<ComplexMatrix> = Vec::with_capacity(ga.len() + gb.len() + 1);
    local.push(ComplexMatrix::identity(d).scale_real(1.0 / (d as f64).sqrt()));
    for g in &ga {
        local.push(kron(g, &ib)?.scale_real(1.0 / (d_b as f64).sqrt()));
    }
    for g in &gb {
        local.push(kron(&ia, g)?.scale_real(1.0 / (d_a as f64).sqrt()));
    }
    let inputs: Vec<ComplexMatrix> = local[1..].to_vec();
    let n = inputs.len();
    let mut columns = Vec::with_capacity(n);
    for x in &inputs {
        let y = u.conjugate(x);
        let mut r = y.clone();
        for l in &local {
            r = &r - &l.scale(l.inner(&y));
        }
        columns.push(r);
    }
    let m = DMatrix::from_fn(2 * d * d, n, |row, col| {
        let z = columns[col].data()[row / 2];
        if row % 2 == 0 {
            z.re
        } else {
            z.im
        }
    });
    let (values, v) = real_svd_full(&m)?;
    let mut basis = Vec::new();
    for (k, &s) in values.iter().enumerate() {
        if s < NULLSPACE_THRESHOLD {
            let mut h_a = ComplexMatrix::zeros(d_a, d_a);
            let mut h_b = ComplexMatrix::zeros(d_b, d_b);
            for (i, g) in ga.iter().enumerate() {
                h_a = &h_a + &g.scale_real(v[(i, k)]);
            }
            for (i, g) in gb.iter().enumerate() {
                h_b = &h_b + &g.scale_real(v[(ga.len() + i, k)]);
            }
            basis.push((
                HermitianOperator::hermitian_part(&h_a),
                HermitianOperator::hermitian_part(&h_b),
            ));
        }
    }
    let mut singular_values = values;
    singular_values.reverse();
    Ok(NullspaceReport {
        dim: basis.len(),
        basis,
        singular_values,
    })
}

/// Outgoing local Hamiltonians for a nullspace element: the local-sum projection
/// of the conjugated input.
pub fn outgoing_local_terms(
    u: &UnitaryOperator,
    h_a: &ComplexMatrix,
    h_b: &ComplexMatrix,
) -> Result<(HermitianOperator, HermitianOperator)> {
    let (d_a, d_b) = (h_a.rows(), h_b.rows());
    let y = u.conjugate(&local_sum(h_a, h_b)?);
    let ya = crate::linalg::partial_trace(&y, d_a, d_b, crate::linalg::Subsystem::A)?.scale_real(1.0 / d_b as f64);
    let yb = crate::linalg::partial_trace(&y, d_a, d_b, crate::linalg::Subsystem::B)?.scale_real(1.0 / d_a as f64);
    let shift = y.trace().re / (d_a * d_b) as f64;
    let ya = &ya - &ComplexMatrix::identity(d_a).scale_real(shift);
    Ok((
        HermitianOperator::hermitian_part(&ya),
        HermitianOperator::hermitian_part(&yb),
    ))
}
