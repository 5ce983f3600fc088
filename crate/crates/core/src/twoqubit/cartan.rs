use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_2, FRAC_PI_4};

use nalgebra::{DMatrix, SymmetricEigen};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::{c, kron, paulis, ComplexMatrix, UnitaryOperator, C64, ONE, ZERO};
use crate::tolerance::Tolerances;

/// `U = e^{i phase} (u_A (x) u_B) exp(i sum_k t_k s_k (x) s_k) (v_A^dagger (x) v_B^dagger)`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CartanForm {
    #[serde(rename = "uA")]
    pub u_a: ComplexMatrix,
    #[serde(rename = "uB")]
    pub u_b: ComplexMatrix,
    #[serde(rename = "vA")]
    pub v_a: ComplexMatrix,
    #[serde(rename = "vB")]
    pub v_b: ComplexMatrix,
    pub t: [f64; 3],
    pub phase: f64,
}

/// Columns Phi+, i Phi-, i Psi+, Psi-, each over sqrt 2. In this basis local
/// SU(2) x SU(2) becomes SO(4) and every s_k (x) s_k is diagonal.
pub fn magic_basis() -> ComplexMatrix {
    let h = FRAC_1_SQRT_2;
    let r = c(h, 0.0);
    let i = c(0.0, h);
    ComplexMatrix::from_rows(&[
        vec![r, i, ZERO, ZERO],
        vec![ZERO, ZERO, i, r],
        vec![ZERO, ZERO, i, -r],
        vec![r, -i, ZERO, ZERO],
    ])
    .expect("4x4")
}

/// `exp(i (t1 XX + t2 YY + t3 ZZ))`
pub fn interaction(t: [f64; 3]) -> ComplexMatrix {
    let b = magic_basis();
    let [t1, t2, t3] = t;
    let d = ComplexMatrix::diag(&[
        C64::from_polar(1.0, t1 - t2 + t3),
        C64::from_polar(1.0, -t1 + t2 + t3),
        C64::from_polar(1.0, t1 + t2 - t3),
        C64::from_polar(1.0, -(t1 + t2 + t3)),
    ]);
    &(&b * &d) * &b.adjoint()
}

impl CartanForm {
    pub fn reconstruct(&self) -> ComplexMatrix {
        let left = kron(&self.u_a, &self.u_b).expect("2x2 factors");
        let right = kron(&self.v_a.adjoint(), &self.v_b.adjoint()).expect("2x2 factors");
        (&(&left * &interaction(self.t)) * &right).scale(C64::from_polar(1.0, self.phase))
    }

    pub fn reconstruction_error(&self, u: &ComplexMatrix) -> f64 {
        self.reconstruct().max_abs_diff(u)
    }

    /// Rewrites `A(t) = A(t + pi/2 e_k) (-i s_k (x) s_k)`, shifting t_k up by pi/2.
    fn shift_up(&mut self, k: usize) {
        let s = &paulis()[k];
        self.t[k] += FRAC_PI_2;
        self.phase -= FRAC_PI_2;
        self.v_a = &self.v_a * s;
        self.v_b = &self.v_b * s;
    }

    fn shift_down(&mut self, k: usize) {
        let s = &paulis()[k];
        self.t[k] -= FRAC_PI_2;
        self.phase += FRAC_PI_2;
        self.v_a = &self.v_a * s;
        self.v_b = &self.v_b * s;
    }

    /// Negates t_j and t_k by conjugating with s_l on qubit A.
    fn flip_pair(&mut self, j: usize, k: usize) {
        let l = 3 - j - k;
        let s = &paulis()[l];
        self.t[j] = -self.t[j];
        self.t[k] = -self.t[k];
        self.u_a = &self.u_a * s;
        self.v_a = &self.v_a * s;
    }

    /// Exchanges t_j and t_k with R = (s_j + s_k)/sqrt 2 on both qubits.
    fn swap(&mut self, j: usize, k: usize) {
        let p = paulis();
        let r = (&p[j] + &p[k]).scale_real(FRAC_1_SQRT_2);
        self.t.swap(j, k);
        self.u_a = &self.u_a * &r;
        self.u_b = &self.u_b * &r;
        self.v_a = &self.v_a * &r;
        self.v_b = &self.v_b * &r;
    }

    /// Moves t into pi/4 >= t1 >= t2 >= |t3|, with t3 >= 0 when t1 = pi/4.
    pub fn canonicalize(&mut self) {
        for k in 0..3 {
            while self.t[k] > FRAC_PI_4 + 1e-12 {
                self.shift_down(k);
            }
            while self.t[k] <= -FRAC_PI_4 + 1e-12 {
                self.shift_up(k);
            }
        }
        for i in 0..3 {
            for j in 0..2 - i {
                if self.t[j].abs() < self.t[j + 1].abs() {
                    self.swap(j, j + 1);
                }
            }
        }
        match (self.t[0] < 0.0, self.t[1] < 0.0) {
            (true, true) => self.flip_pair(0, 1),
            (true, false) => self.flip_pair(0, 2),
            (false, true) => self.flip_pair(1, 2),
            (false, false) => {}
        }
        if (self.t[0] - FRAC_PI_4).abs() < 1e-9 && self.t[2] < 0.0 {
            self.shift_down(0);
            self.flip_pair(0, 2);
        }
        self.phase = wrap_angle(self.phase);
    }
}

fn wrap_angle(x: f64) -> f64 {
    let two_pi = 2.0 * std::f64::consts::PI;
    let y = x.rem_euclid(two_pi);
    if y > std::f64::consts::PI {
        y - two_pi
    } else {
        y
    }
}

fn det(m: &ComplexMatrix) -> C64 {
    m.to_nalgebra().determinant()
}

/// Splits `m = a (x) b` for 2x2 factors; `b` is normalized to det 1.
fn split_product(m: &ComplexMatrix) -> Result<(ComplexMatrix, ComplexMatrix)> {
    let block = |p: usize, q: usize| ComplexMatrix::from_fn(2, 2, |i, j| m[(2 * p + i, 2 * q + j)]);
    let (bp, bq) = (0..4)
        .map(|k| (k / 2, k % 2))
        .max_by(|x, y| {
            block(x.0, x.1)
                .frobenius_norm()
                .total_cmp(&block(y.0, y.1).frobenius_norm())
        })
        .expect("four blocks");
    let blk = block(bp, bq);
    let d = det(&blk);
    if d.norm() < 1e-12 {
        return Err(Error::NonConvergence {
            context: "local factor extraction".into(),
        });
    }
    let b = blk.scale(ONE / d.sqrt());
    let bd = b.adjoint();
    let a = ComplexMatrix::from_fn(2, 2, |p, q| (&bd * &block(p, q)).trace() * 0.5);
    let residual = kron(&a, &b)?.max_abs_diff(m);
    if residual > 1e-8 {
        return Err(Error::NonConvergence {
            context: format!("local factor extraction (residual {residual:.2e})"),
        });
    }
    Ok((a, b))
}

/// Real orthogonal P (det +1) diagonalizing the complex symmetric unitary `m`.
fn orthogonal_diagonalizer(m: &ComplexMatrix) -> Result<DMatrix<f64>> {
    let re = DMatrix::from_fn(4, 4, |i, j| m[(i, j)].re);
    let im = DMatrix::from_fn(4, 4, |i, j| m[(i, j)].im);
    let mut rng = ChaCha8Rng::seed_from_u64(0x6361_7274);
    for _ in 0..64 {
        let (a, b): (f64, f64) = (rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0));
        let mix = &re * a + &im * b;
        let Some(eig) = SymmetricEigen::try_new(mix, f64::EPSILON, 10_000) else {
            continue;
        };
        let mut p = eig.eigenvectors;
        if p.determinant() < 0.0 {
            let col = -p.column(0);
            p.set_column(0, &col);
        }
        let pr = &p.transpose() * &re * &p;
        let pi = &p.transpose() * &im * &p;
        let off = (0..4)
            .flat_map(|i| (0..4).map(move |j| (i, j)))
            .filter(|(i, j)| i != j)
            .map(|(i, j)| pr[(i, j)].abs().max(pi[(i, j)].abs()))
            .fold(0.0, f64::max);
        if off < 1e-10 {
            return Ok(p);
        }
    }
    Err(Error::NonConvergence {
        context: "simultaneous diagonalization in the magic basis".into(),
    })
}

fn real_to_complex(p: &DMatrix<f64>) -> ComplexMatrix {
    ComplexMatrix::from_fn(p.nrows(), p.ncols(), |i, j| c(p[(i, j)], 0.0))
}

/// Cartan (KAK) decomposition with t moved into the canonical Weyl cell.
pub fn cartan_decompose(u: &UnitaryOperator, tol: &Tolerances) -> Result<CartanForm> {
    let mut form = cartan_raw(u)?;
    form.canonicalize();
    let err = form.reconstruction_error(u.matrix());
    if err > tol.channel {
        return Err(Error::NonConvergence {
            context: format!("Cartan decomposition (reconstruction error {err:.2e})"),
        });
    }
    Ok(form)
}

/// Decomposition before canonicalization.
pub(crate) fn cartan_raw(u: &UnitaryOperator) -> Result<CartanForm> {
    if u.dim() != 4 {
        return Err(Error::mismatch("two-qubit unitary", 4, u.dim()));
    }
    let b = magic_basis();
    let phase0 = det(u.matrix()).arg() / 4.0;
    let us = u.matrix().scale(C64::from_polar(1.0, -phase0));
    let um = &(&b.adjoint() * &us) * &b;
    let m2 = &um.transpose() * &um;
    let p = orthogonal_diagonalizer(&m2)?;
    let pc = real_to_complex(&p);
    let diag = &(&pc.transpose() * &m2) * &pc;
    let mut d: Vec<C64> = (0..4).map(|k| diag[(k, k)].sqrt()).collect();
    let prod: C64 = d.iter().product();
    if prod.re < 0.0 {
        d[0] = -d[0];
    }
    let d_inv = ComplexMatrix::diag(&d.iter().map(|z| z.conj() / z.norm_sqr()).collect::<Vec<_>>());
    let o1 = &(&um * &pc) * &d_inv;
    let k1 = &(&b * &o1) * &b.adjoint();
    let k2 = &(&b * &pc.transpose()) * &b.adjoint();
    let (u_a, u_b) = split_product(&k1)?;
    let (va_dag, vb_dag) = split_product(&k2)?;
    let psi: Vec<f64> = d.iter().map(|z| z.arg()).collect();
    let t = [
        (psi[0] + psi[2]) / 2.0,
        (psi[1] + psi[2]) / 2.0,
        (psi[0] + psi[1]) / 2.0,
    ];
    let mut form = CartanForm {
        u_a,
        u_b,
        v_a: va_dag.adjoint(),
        v_b: vb_dag.adjoint(),
        t,
        phase: phase0,
    };
    // Absorb the residual global phase (a sign from the half-angle branch or the
    // unit-modulus factor left in u_a by the split).
    let rec = form.reconstruct();
    let (i, j) = (0..16)
        .map(|k| (k / 4, k % 4))
        .max_by(|x, y| u.matrix()[*x].norm().total_cmp(&u.matrix()[*y].norm()))
        .expect("16 entries");
    let ratio = u.matrix()[(i, j)] / rec[(i, j)];
    form.phase += ratio.arg();
    Ok(form)
}

/// `U = (u_A (x) u_B) A(t) (v_A^dagger (x) v_B^dagger)` assembled from parts, with phase 0.
pub fn assemble(
    u_a: &ComplexMatrix,
    u_b: &ComplexMatrix,
    t: [f64; 3],
    v_a: &ComplexMatrix,
    v_b: &ComplexMatrix,
) -> UnitaryOperator {
    let form = CartanForm {
        u_a: u_a.clone(),
        u_b: u_b.clone(),
        v_a: v_a.clone(),
        v_b: v_b.clone(),
        t,
        phase: 0.0,
    };
    UnitaryOperator::from_trusted(form.reconstruct())
}
