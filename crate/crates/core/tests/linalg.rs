use retrodict::linalg::*;
use retrodict::sample::{haar_unitary, random_density, random_hermitian, random_ket, rng};
use retrodict::{Error, Tolerances};

fn tol() -> Tolerances {
    Tolerances::default()
}

#[test]
fn partial_trace_matches_index_sums() {
    let mut r = rng(1);
    let (d_a, d_b) = (2, 3);
    let m = random_density(d_a * d_b, &mut r).matrix().clone();
    let ta = partial_trace(&m, d_a, d_b, Subsystem::A).unwrap();
    let tb = partial_trace(&m, d_a, d_b, Subsystem::B).unwrap();
    for i in 0..d_a {
        for j in 0..d_a {
            let s: C64 = (0..d_b).map(|b| m[(i * d_b + b, j * d_b + b)]).sum();
            assert!((ta[(i, j)] - s).norm() < 1e-14);
        }
    }
    for i in 0..d_b {
        for j in 0..d_b {
            let s: C64 = (0..d_a).map(|a| m[(a * d_b + i, a * d_b + j)]).sum();
            assert!((tb[(i, j)] - s).norm() < 1e-14);
        }
    }
}

#[test]
fn kron_of_products() {
    let mut r = rng(2);
    let a = haar_unitary(2, &mut r);
    let b = haar_unitary(3, &mut r);
    let k = kron(a.matrix(), b.matrix()).unwrap();
    for i in 0..6 {
        for j in 0..6 {
            assert_eq!(k[(i, j)], a.matrix()[(i / 3, j / 3)] * b.matrix()[(i % 3, j % 3)]);
        }
    }
    assert!(UnitaryOperator::new(k, &tol()).is_ok());
}

#[test]
fn dimension_guard() {
    let big = ComplexMatrix::identity(9);
    assert!(matches!(kron(&big, &big), Err(Error::DimensionOverflow { .. })));
}

#[test]
fn matrix_functions_invert_each_other() {
    let mut r = rng(3);
    for _ in 0..20 {
        let rho = random_density(3, &mut r);
        let s = sqrtm(rho.matrix(), &tol()).unwrap();
        assert!((&s * &s).max_abs_diff(rho.matrix()) < 1e-12);
        let is = inv_sqrtm(rho.matrix(), &tol()).unwrap();
        assert!((&(&is * rho.matrix()) * &is).max_abs_diff(&ComplexMatrix::identity(3)) < 1e-9);
        let l = logm(rho.matrix(), &tol()).unwrap();
        assert!(expm_hermitian(&l, &tol()).unwrap().max_abs_diff(rho.matrix()) < 1e-12);
        let h = random_hermitian(3, &mut r);
        let u = expm_i_hermitian(h.matrix(), &tol()).unwrap();
        assert!(UnitaryOperator::new(u, &tol()).is_ok());
    }
    let pure = DensityOperator::pure(&random_ket(2, &mut r)).unwrap();
    assert!(matches!(
        inv_sqrtm(pure.matrix(), &tol()),
        Err(Error::RankDeficient { .. })
    ));
    let p = pseudo_inv_sqrtm(pure.matrix(), &tol()).unwrap();
    assert!((&(&p * pure.matrix()) * &p).max_abs_diff(pure.matrix()) < 1e-12);
}

#[test]
fn matrix_function_dispatch() {
    let h = HermitianOperator::new(pauli_z(), &tol()).unwrap();
    let e = matrix_function(&h, MatrixFunction::Exp, &tol()).unwrap();
    assert!((e.matrix()[(0, 0)].re - 1f64.exp()).abs() < 1e-12);
    assert!(matrix_function(&h, MatrixFunction::Sqrt, &tol()).is_err());
}

#[test]
fn bell_state_entanglement() {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let bell = vec![c(s, 0.0), ZERO, ZERO, c(s, 0.0)];
    assert!((entanglement_entropy(&bell, 2, 2).unwrap() - 1.0).abs() < 1e-12);
    let rho = DensityOperator::pure(&bell).unwrap();
    assert!((log_negativity(rho.matrix(), 2, 2).unwrap() - 1.0).abs() < 1e-12);
    let prod = kron_vec(&basis_vec(2, 0), &basis_vec(2, 1));
    assert!(entanglement_entropy(&prod, 2, 2).unwrap() < 1e-12);
}

#[test]
fn traceless_basis_is_orthonormal() {
    for d in 2..5 {
        let g = traceless_hermitian_basis(d);
        assert_eq!(g.len(), d * d - 1);
        for (i, x) in g.iter().enumerate() {
            assert!(x.trace().norm() < 1e-14);
            assert!(x.hermiticity_deviation() < 1e-14);
            for (j, y) in g.iter().enumerate() {
                let expect = if i == j { 1.0 } else { 0.0 };
                assert!((x.inner(y) - c(expect, 0.0)).norm() < 1e-12);
            }
        }
    }
}

#[test]
fn state_validation() {
    let bad_trace = ComplexMatrix::diag_real(&[0.6, 0.6]);
    assert!(matches!(
        DensityOperator::new(bad_trace, &tol()),
        Err(Error::InvalidState(_))
    ));
    let negative = ComplexMatrix::diag_real(&[1.2, -0.2]);
    assert!(DensityOperator::new(negative, &tol()).is_err());
    let not_herm = ComplexMatrix::from_rows(&[vec![c(0.5, 0.0), c(0.1, 0.0)], vec![c(0.0, 0.0), c(0.5, 0.0)]]).unwrap();
    assert!(matches!(
        DensityOperator::new(not_herm, &tol()),
        Err(Error::NotHermitian { .. })
    ));
    let not_unitary = ComplexMatrix::diag_real(&[1.0, 0.5]);
    assert!(matches!(
        UnitaryOperator::new(not_unitary, &tol()),
        Err(Error::NotUnitary { .. })
    ));
    let nan = ComplexMatrix::new(1, 1, vec![c(f64::NAN, 0.0)]);
    assert!(matches!(nan, Err(Error::NonFinite(_))));
}

#[test]
fn matrix_json_round_trip() {
    let mut r = rng(4);
    let u = haar_unitary(3, &mut r);
    let s = serde_json::to_string(u.matrix()).unwrap();
    let back: ComplexMatrix = serde_json::from_str(&s).unwrap();
    assert!(back.max_abs_diff(u.matrix()) < 1e-15);
    assert!(serde_json::from_str::<ComplexMatrix>(r#"{"rows":2,"cols":2,"data":[[1,0]]}"#).is_err());
}

#[test]
fn marginals_and_tensor() {
    let mut r = rng(5);
    let a = random_density(2, &mut r);
    let b = random_density(3, &mut r);
    let ab = a.tensor(&b).unwrap();
    assert_eq!(ab.bipartition(), Some((2, 3)));
    assert!(ab.marginal(Subsystem::A).unwrap().matrix().max_abs_diff(a.matrix()) < 1e-14);
    assert!(ab.marginal(Subsystem::B).unwrap().matrix().max_abs_diff(b.matrix()) < 1e-14);
}
