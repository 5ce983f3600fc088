use serde::Serialize;

use super::cartan::{cartan_decompose, CartanForm};
use crate::error::{Error, Result};
use crate::linalg::{c, entanglement_entropy, normalize, vec_norm, ComplexMatrix, UnitaryOperator, C64, ONE, ZERO};
use crate::tolerance::Tolerances;

const COEFF_TOL: f64 = 1e-10;
const ENTANGLEMENT_TOL: f64 = 1e-8;

/// `a x^2 + b x + c = 0` in the frame where the nonlocal part is diagonal; a root
/// `x` gives the product-preserved input `v_A (|0> + x|1>)`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct QuadraticPPProblem {
    pub a: C64,
    pub b: C64,
    pub c: C64,
    pub b0: C64,
    pub b1: C64,
    pub t: [f64; 3],
}

impl QuadraticPPProblem {
    pub fn new(t: [f64; 3], b0: C64, b1: C64) -> Self {
        let [t1, t2, t3] = t;
        let e_m = C64::from_polar(1.0, -2.0 * t3);
        let e_p = C64::from_polar(1.0, 2.0 * t3);
        let (sp, sm) = ((2.0 * t1 + 2.0 * t2).sin(), (2.0 * t1 - 2.0 * t2).sin());
        let (cp, cm) = ((2.0 * t1 + 2.0 * t2).cos(), (2.0 * t1 - 2.0 * t2).cos());
        let half_i = c(0.0, 0.5);
        QuadraticPPProblem {
            a: half_i * (b0 * b0 * e_m * sp - b1 * b1 * e_p * sm),
            b: b0 * b1 * (e_m * cp - e_p * cm),
            c: -half_i * (b0 * b0 * e_p * sm - b1 * b1 * e_m * sp),
            b0,
            b1,
            t,
        }
    }

    pub fn eval(&self, x: C64) -> C64 {
        (self.a * x + self.b) * x + self.c
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum PPBranch {
    Quadratic,
    Linear,
    /// `a = b = 0`, `c != 0`: the root sits at infinity, i.e. `v_A|1>`.
    AtInfinity,
    /// All coefficients vanish; every `x` works and `x = 0` is returned.
    Trivial,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PurePPSolution {
    pub alpha: Vec<C64>,
    pub alpha_out: Vec<C64>,
    pub beta_out: Vec<C64>,
    pub x: Option<C64>,
    pub branch: PPBranch,
    pub problem: QuadraticPPProblem,
    /// Every verified preserved input found (one per distinct root).
    pub candidates: Vec<Vec<C64>>,
    pub entanglement: f64,
}

fn mat_vec(m: &ComplexMatrix, v: &[C64]) -> Vec<C64> {
    m.mul_vec(v)
}

/// Roots of `a x^2 + b x + c` with the cancellation-free formula.
fn quadratic_roots(a: C64, b: C64, c: C64) -> Vec<C64> {
    let sq = (b * b - a * c * 4.0).sqrt();
    let sq = if (b.conj() * sq).re < 0.0 { -sq } else { sq };
    let q = -(b + sq) * 0.5;
    let mut roots = vec![q / a];
    if q.norm() > 0.0 {
        roots.push(c / q);
    }
    roots
}

/// Finds a pure `|alpha>` with `U(|alpha> (x) |beta>)` a product state.
pub fn solve_pure_pp(u: &UnitaryOperator, beta: &[C64], tol: &Tolerances) -> Result<PurePPSolution> {
    if beta.len() != 2 {
        return Err(Error::mismatch("ancilla ket", 2, beta.len()));
    }
    let n = vec_norm(beta);
    if (n - 1.0).abs() > 1e-9 {
        return Err(Error::InvalidState(format!("ancilla ket has norm {n}")));
    }
    let form = cartan_decompose(u, tol)?;
    solve_with_form(u, &form, beta)
}

pub(crate) fn solve_with_form(u: &UnitaryOperator, form: &CartanForm, beta: &[C64]) -> Result<PurePPSolution> {
    let rotated = mat_vec(&form.v_b.adjoint(), beta);
    let problem = QuadraticPPProblem::new(form.t, rotated[0], rotated[1]);
    let (a, b, cc) = (problem.a, problem.b, problem.c);
    let small = |z: C64| z.norm() <= COEFF_TOL;
    let (branch, xs): (PPBranch, Vec<Option<C64>>) = if !small(a) {
        let mut roots = quadratic_roots(a, b, cc);
        roots.sort_by(|p, q| p.norm().total_cmp(&q.norm()).then(p.arg().total_cmp(&q.arg())));
        (PPBranch::Quadratic, roots.into_iter().map(Some).collect())
    } else if !small(b) {
        (PPBranch::Linear, vec![Some(-cc / b)])
    } else if !small(cc) {
        (PPBranch::AtInfinity, vec![None])
    } else {
        (PPBranch::Trivial, vec![Some(ZERO)])
    };

    let beta_n = beta.to_vec();
    let mut verified: Vec<(Option<C64>, Vec<C64>, f64)> = Vec::new();
    for x in xs {
        let local = match x {
            Some(x) => normalize(&[ONE, x]),
            None => vec![ZERO, ONE],
        };
        let alpha = mat_vec(&form.v_a, &local);
        let out = mat_vec(u.matrix(), &crate::linalg::kron_vec(&alpha, &beta_n));
        let s = entanglement_entropy(&out, 2, 2)?;
        if s <= ENTANGLEMENT_TOL && !verified.iter().any(|(_, v, _)| same_ray(v, &alpha)) {
            verified.push((x, alpha, s));
        }
    }
    let Some((x, alpha, entanglement)) = verified.first().cloned() else {
        return Err(Error::Internal(
            "no root of the product-preservation quadratic yields a product output".into(),
        ));
    };
    let out = mat_vec(u.matrix(), &crate::linalg::kron_vec(&alpha, &beta_n));
    let (alpha_out, beta_out) = split_product_ket(&out);
    Ok(PurePPSolution {
        alpha,
        alpha_out,
        beta_out,
        x,
        branch,
        problem,
        candidates: verified.into_iter().map(|(_, v, _)| v).collect(),
        entanglement,
    })
}

fn same_ray(u: &[C64], v: &[C64]) -> bool {
    let ov: C64 = u.iter().zip(v).map(|(p, q)| p.conj() * q).sum();
    (ov.norm() - 1.0).abs() < 1e-9
}

/// Factors a (near) product two-qubit ket as `x (x) y`, with `y` normalized and
/// the global phase carried by `x`.
pub fn split_product_ket(psi: &[C64]) -> (Vec<C64>, Vec<C64>) {
    let rows = [[psi[0], psi[1]], [psi[2], psi[3]]];
    let r = if rows[0][0].norm_sqr() + rows[0][1].norm_sqr() >= rows[1][0].norm_sqr() + rows[1][1].norm_sqr() {
        0
    } else {
        1
    };
    let y = normalize(&rows[r]);
    let x: Vec<C64> = rows
        .iter()
        .map(|row| row[0] * y[0].conj() + row[1] * y[1].conj())
        .collect();
    (x, y)
}
