//! Seeded random instances: Haar unitaries, states, stochastic maps.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp1, StandardNormal};

use crate::classical::{ProbabilityVector, StochasticMatrix};
use crate::linalg::{c, inner, ComplexMatrix, DensityOperator, HermitianOperator, UnitaryOperator, C64};
use crate::tolerance::Tolerances;

pub type SeededRng = ChaCha8Rng;

pub fn rng(seed: u64) -> SeededRng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn complex_gaussian<R: Rng + ?Sized>(rng: &mut R) -> C64 {
    let re: f64 = StandardNormal.sample(rng);
    let im: f64 = StandardNormal.sample(rng);
    c(re, im) * std::f64::consts::FRAC_1_SQRT_2
}

/// Haar-random unitary via Gram-Schmidt on a complex Ginibre matrix.
pub fn haar_unitary<R: Rng + ?Sized>(d: usize, rng: &mut R) -> UnitaryOperator {
    let mut cols: Vec<Vec<C64>> = Vec::with_capacity(d);
    while cols.len() < d {
        let mut v: Vec<C64> = (0..d).map(|_| complex_gaussian(rng)).collect();
        for _ in 0..2 {
            for q in &cols {
                let p = inner(q, &v);
                for (x, y) in v.iter_mut().zip(q) {
                    *x -= p * y;
                }
            }
        }
        let n = crate::linalg::vec_norm(&v);
        if n > 1e-6 {
            cols.push(v.iter().map(|z| z / n).collect());
        }
    }
    UnitaryOperator::new(ComplexMatrix::from_columns(&cols), &Tolerances::default())
        .expect("Gram-Schmidt output is unitary")
}

pub fn random_ket<R: Rng + ?Sized>(d: usize, rng: &mut R) -> Vec<C64> {
    let v: Vec<C64> = (0..d).map(|_| complex_gaussian(rng)).collect();
    crate::linalg::normalize(&v)
}

/// Full-rank state from a Ginibre matrix, mixed with a little white noise so
/// that the smallest eigenvalue stays away from zero.
pub fn random_density<R: Rng + ?Sized>(d: usize, rng: &mut R) -> DensityOperator {
    let g = ComplexMatrix::from_fn(d, d, |_, _| complex_gaussian(rng));
    let w = &g * &g.adjoint();
    let w = w.scale_real(1.0 / w.trace().re);
    let mixed = &w.scale_real(0.9) + &ComplexMatrix::identity(d).scale_real(0.1 / d as f64);
    DensityOperator::from_computed(&mixed, &Tolerances::default()).expect("valid state")
}

pub fn random_hermitian<R: Rng + ?Sized>(d: usize, rng: &mut R) -> HermitianOperator {
    let g = ComplexMatrix::from_fn(d, d, |_, _| complex_gaussian(rng));
    HermitianOperator::hermitian_part(&g)
}

/// Dirichlet(1) sample mixed with 5% uniform weight, so every entry is positive.
pub fn random_probability<R: Rng + ?Sized>(d: usize, rng: &mut R) -> ProbabilityVector {
    let e: Vec<f64> = (0..d).map(|_| Exp1.sample(rng)).collect();
    let s: f64 = e.iter().sum();
    let p = e.iter().map(|x| 0.95 * x / s + 0.05 / d as f64).collect();
    ProbabilityVector::new(p, &Tolerances::default()).expect("valid distribution")
}

pub fn random_stochastic<R: Rng + ?Sized>(d_out: usize, d_in: usize, rng: &mut R) -> StochasticMatrix {
    let cols: Vec<ProbabilityVector> = (0..d_in).map(|_| random_probability(d_out, rng)).collect();
    let data = (0..d_out * d_in).map(|k| cols[k % d_in].probs()[k / d_in]).collect();
    StochasticMatrix::new(d_out, d_in, data, &Tolerances::default()).expect("valid stochastic matrix")
}

pub fn random_permutation<R: Rng + ?Sized>(d: usize, rng: &mut R) -> Vec<usize> {
    let mut p: Vec<usize> = (0..d).collect();
    for i in (1..d).rev() {
        let j = rng.random_range(0..=i);
        p.swap(i, j);
    }
    p
}

/// Uniform point of the canonical Weyl cell `pi/4 >= t1 >= t2 >= |t3|`.
pub fn weyl_cell_point<R: Rng + ?Sized>(rng: &mut R) -> [f64; 3] {
    let q = std::f64::consts::FRAC_PI_4;
    loop {
        let t = [
            rng.random_range(0.0..q),
            rng.random_range(0.0..q),
            rng.random_range(-q..q),
        ];
        if t[0] >= t[1] && t[1] >= t[2].abs() {
            return t;
        }
    }
}

/// Uniform point on one of the two triangles of generalized-thermal angles:
/// `0 -> (pi/4,pi/4,pi/4) -> (pi/4,pi/4,0)` (`second = false`) or
/// `0 -> (pi/4,pi/4,pi/4) -> (pi/2,0,0)` (`second = true`).
pub fn gg_surface_point<R: Rng + ?Sized>(second: bool, rng: &mut R) -> [f64; 3] {
    let q = std::f64::consts::FRAC_PI_4;
    let corner_b = [q, q, q];
    let corner_c = if second { [2.0 * q, 0.0, 0.0] } else { [q, q, 0.0] };
    let (mut x, mut y): (f64, f64) = (rng.random(), rng.random());
    if x + y > 1.0 {
        (x, y) = (1.0 - x, 1.0 - y);
    }
    [0, 1, 2].map(|k| x * corner_b[k] + y * corner_c[k])
}

/// `e^{i phi} (u_A (x) u_B) A(t) (v_A (x) v_B)^dagger` with Haar-random local factors.
pub fn unitary_with_angles<R: Rng + ?Sized>(t: [f64; 3], rng: &mut R) -> UnitaryOperator {
    let f: Vec<UnitaryOperator> = (0..4).map(|_| haar_unitary(2, rng)).collect();
    let u = crate::twoqubit::assemble(f[0].matrix(), f[1].matrix(), t, f[2].matrix(), f[3].matrix());
    let phase = C64::from_polar(1.0, rng.random_range(0.0..std::f64::consts::TAU));
    UnitaryOperator::from_trusted(u.matrix().scale(phase))
}
