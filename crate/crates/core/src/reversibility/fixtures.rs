use std::f64::consts::PI;

use rand::Rng;
use serde::Serialize;

use crate::channel::StinespringDilation;
use crate::error::Result;
use crate::linalg::{c, kron, pauli_x, swap_operator, ComplexMatrix, DensityOperator, UnitaryOperator, C64};
use crate::sample::haar_unitary;
use crate::tolerance::Tolerances;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct Theorem4Expectation {
    pub tr: bool,
    pub pp: bool,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Theorem4Fixture {
    pub name: &'static str,
    pub dilation: StinespringDilation,
    pub alpha: DensityOperator,
    pub expected: Theorem4Expectation,
}

/// Mixing parameter of the first fixture's prior, `diag(a0, 1 - a0)`.
pub const THEOREM4_A0: f64 = 0.3;

const U2_ROWS: [[u8; 8]; 8] = [
    [0, 0, 0, 0, 0, 1, 0, 0],
    [0, 1, 0, 0, 0, 0, 0, 0],
    [0, 0, 1, 0, 0, 0, 0, 0],
    [0, 0, 0, 0, 0, 0, 1, 0],
    [0, 0, 0, 1, 0, 0, 0, 0],
    [0, 0, 0, 0, 0, 0, 0, 1],
    [0, 0, 0, 0, 1, 0, 0, 0],
    [1, 0, 0, 0, 0, 0, 0, 0],
];

fn beta2() -> ComplexMatrix {
    let p = |r: f64, k: f64| C64::from_polar(r / 217.0, k * PI / 3.0);
    ComplexMatrix::from_rows(&[
        vec![p(70.0, 0.0), p(84.0, 1.0), p(35.0, 0.0), p(30.0, -2.0)],
        vec![p(84.0, -1.0), p(112.0, 0.0), p(42.0, -1.0), p(-35.0, 0.0)],
        vec![p(35.0, 0.0), p(42.0, 1.0), p(21.0, 0.0), p(15.0, -2.0)],
        vec![p(30.0, 2.0), p(-35.0, 0.0), p(15.0, 2.0), p(14.0, 0.0)],
    ])
    .expect("4x4")
}

/// Two channels that are tabletop reversible although their dilations do not
/// preserve the product structure of the reference state.
pub fn theorem4_fixtures() -> Vec<Theorem4Fixture> {
    let tol = Tolerances::default();
    let p0 = ComplexMatrix::diag_real(&[1.0, 0.0]);
    let p1 = ComplexMatrix::diag_real(&[0.0, 1.0]);
    let u1 = &kron(&p0, &ComplexMatrix::identity(2)).expect("small") + &kron(&p1, &pauli_x()).expect("small");
    let u1 = UnitaryOperator::new(u1, &tol).expect("controlled-X");
    let beta1 = DensityOperator::diagonal(&[1.0, 0.0], &tol).expect("pure state");
    let alpha1 = DensityOperator::diagonal(&[THEOREM4_A0, 1.0 - THEOREM4_A0], &tol).expect("diagonal state");

    let u2 = ComplexMatrix::from_fn(8, 8, |i, j| c(U2_ROWS[i][j] as f64, 0.0));
    let u2 = UnitaryOperator::new(u2, &tol).expect("permutation");
    let beta2 = DensityOperator::new(beta2(), &tol).expect("tabulated state");
    let expected = Theorem4Expectation { tr: true, pp: false };
    vec![
        Theorem4Fixture {
            name: "controlled-x",
            dilation: StinespringDilation::new(u1, beta1).expect("dims"),
            alpha: alpha1,
            expected,
        },
        Theorem4Fixture {
            name: "permutation-8",
            dilation: StinespringDilation::new(u2, beta2).expect("dims"),
            alpha: DensityOperator::maximally_mixed(2),
            expected,
        },
    ]
}

/// `exp(i theta SWAP) = cos(theta) 1 + i sin(theta) SWAP` with ancilla `beta`.
pub fn swap_mixing_dilation(theta: f64, beta: DensityOperator) -> Result<StinespringDilation> {
    let d = beta.dim();
    let m = &ComplexMatrix::identity(d * d).scale_real(theta.cos()) + &swap_operator(d).scale(c(0.0, theta.sin()));
    StinespringDilation::new(UnitaryOperator::new(m, &Tolerances::default())?, beta)
}

/// Random two-qubit unitary commuting with `sz (x) 1 + 1 (x) sz`: phases on
/// |00> and |11> and a Haar block on span{|01>, |10>}.
pub fn energy_conserving_unitary<R: Rng + ?Sized>(rng: &mut R) -> UnitaryOperator {
    let block = haar_unitary(2, rng);
    let (p0, p3): (f64, f64) = (rng.random_range(0.0..2.0 * PI), rng.random_range(0.0..2.0 * PI));
    let mut m = ComplexMatrix::zeros(4, 4);
    m[(0, 0)] = C64::from_polar(1.0, p0);
    m[(3, 3)] = C64::from_polar(1.0, p3);
    for i in 0..2 {
        for j in 0..2 {
            m[(1 + i, 1 + j)] = block.matrix()[(i, j)];
        }
    }
    UnitaryOperator::new(m, &Tolerances::default()).expect("block unitary")
}
