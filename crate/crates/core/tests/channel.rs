use rand::Rng;
use retrodict::channel::*;
use retrodict::classical::{assignment_map, bayes_invert};
use retrodict::linalg::*;
use retrodict::reversibility::{energy_conserving_unitary, theorem4_fixtures};
use retrodict::sample::{
    haar_unitary, random_density, random_hermitian, random_ket, random_probability, random_stochastic, rng,
};
use retrodict::twoqubit::solve_pure_pp;
use retrodict::{Error, Tolerances};

fn tol() -> Tolerances {
    Tolerances::default()
}

fn random_dilation(d_a: usize, d_b: usize, r: &mut impl Rng) -> StinespringDilation {
    StinespringDilation::new(haar_unitary(d_a * d_b, r), random_density(d_b, r)).unwrap()
}

fn random_channel(d: usize, r: &mut impl Rng) -> QuantumChannel {
    random_dilation(d, 2, r).channel(&tol()).unwrap()
}

fn assert_cptp(e: &QuantumChannel) {
    assert!(e.map().tp_deviation() <= 1e-9);
    assert!(e.map().min_choi_eigenvalue().unwrap() >= -1e-9);
}

#[test]
fn dilation_special_cases() {
    let mut r = rng(1);
    let v = haar_unitary(2, &mut r);
    let w = haar_unitary(3, &mut r);
    let beta = random_density(3, &mut r);
    let e = StinespringDilation::new(v.tensor(&w).unwrap(), beta)
        .unwrap()
        .channel(&tol())
        .unwrap();
    assert!(e.dist(&QuantumChannel::unitary(&v)) < 1e-12);

    let beta = random_density(2, &mut r);
    let swap = UnitaryOperator::new(swap_operator(2), &tol()).unwrap();
    let e = StinespringDilation::new(swap, beta.clone())
        .unwrap()
        .channel(&tol())
        .unwrap();
    assert!(e.dist(&QuantumChannel::replacement(2, &beta, &tol()).unwrap()) < 1e-12);
}

#[test]
fn adjoint_properties() {
    let mut r = rng(2);
    let dil = random_dilation(3, 2, &mut r);
    let e = dil.channel(&tol()).unwrap();
    let adj = adjoint(&e);
    assert!(
        adj.apply(&ComplexMatrix::identity(3))
            .unwrap()
            .max_abs_diff(&ComplexMatrix::identity(3))
            < 1e-9
    );
    for _ in 0..10 {
        let x = random_hermitian(3, &mut r).into_matrix();
        let y = random_hermitian(3, &mut r).into_matrix();
        let lhs = e.apply(&x).unwrap().inner(&y);
        let rhs = x.inner(&adj.apply(&y).unwrap());
        assert!((lhs - rhs).norm() < 1e-10);
    }
    // Kraus view {K^dagger}.
    let kraus: Vec<ComplexMatrix> = e.kraus(&tol()).unwrap().iter().map(|k| k.adjoint()).collect();
    assert!(LinearMap::from_kraus(&kraus).unwrap().dist(&adj) < 1e-10);
    // Dilation form of the adjoint.
    let root = kron(
        &ComplexMatrix::identity(3),
        &sqrtm(dil.beta().matrix(), &tol()).unwrap(),
    )
    .unwrap();
    let ud = dil.unitary().matrix().adjoint();
    let direct = LinearMap::from_fn(3, 3, |x| {
        let inner = conjugate(&ud, &kron(x, &ComplexMatrix::identity(2))?);
        partial_trace(&(&(&root * &inner) * &root), 3, 2, Subsystem::A)
    })
    .unwrap();
    assert!(direct.dist(&adj) < 1e-10);

    let u = haar_unitary(3, &mut r);
    assert!(
        QuantumChannel::unitary(&u)
            .adjoint()
            .dist(QuantumChannel::unitary(&u.adjoint()).map())
            < 1e-12
    );
}

#[test]
fn unital_adjoint_is_a_channel() {
    let mut r = rng(3);
    let units: Vec<ComplexMatrix> = (0..3).map(|_| haar_unitary(3, &mut r).matrix().clone()).collect();
    let w = [0.5f64, 0.3, 0.2];
    let kraus: Vec<ComplexMatrix> = units.iter().zip(w).map(|(u, p)| u.scale_real(p.sqrt())).collect();
    let e = QuantumChannel::from_kraus(kraus, &tol()).unwrap();
    assert!(e.map().unital_deviation() < 1e-12);
    assert!(QuantumChannel::from_map(e.adjoint(), &tol()).is_ok());
    let hat = petz(&e, &DensityOperator::maximally_mixed(3), &tol()).unwrap();
    assert!(hat.map().dist(&e.adjoint()) < 1e-10);
}

#[test]
fn petz_recovers_the_prior() {
    let mut r = rng(4);
    for _ in 0..200 {
        let d = r.random_range(2..5);
        let e = random_channel(d, &mut r);
        let alpha = random_density(d, &mut r);
        let hat = petz(&e, &alpha, &tol()).unwrap();
        assert_cptp(&hat);
        let back = hat.apply(&e.apply(alpha.matrix()).unwrap()).unwrap();
        assert!(back.max_abs_diff(alpha.matrix()) <= 1e-9);
    }
}

#[test]
fn petz_of_unitary_is_the_inverse() {
    let mut r = rng(5);
    let u = haar_unitary(3, &mut r);
    let e = QuantumChannel::unitary(&u);
    for _ in 0..5 {
        let hat = petz(&e, &random_density(3, &mut r), &tol()).unwrap();
        assert!(hat.dist(&QuantumChannel::unitary(&u.adjoint())) < 1e-10);
    }
}

#[test]
fn rank_deficient_output_is_an_error() {
    let sigma = DensityOperator::pure(&basis_vec(2, 0)).unwrap();
    let erase = QuantumChannel::replacement(2, &sigma, &tol()).unwrap();
    let alpha = DensityOperator::maximally_mixed(2);
    match petz(&erase, &alpha, &tol()) {
        Err(Error::RankDeficientOutput { deficient_dim }) => assert_eq!(deficient_dim, 1),
        other => panic!("{other:?}"),
    }
}

#[test]
fn petz_via_dilation_matches_petz() {
    let mut r = rng(6);
    for _ in 0..100 {
        let (d_a, d_b) = (r.random_range(2..4), r.random_range(2..4));
        let dil = random_dilation(d_a, d_b, &mut r);
        let alpha = random_density(d_a, &mut r);
        let a = petz_via_dilation(&dil, &alpha, &tol()).unwrap();
        let b = petz(&dil.channel(&tol()).unwrap(), &alpha, &tol()).unwrap();
        assert!(a.dist(&b) <= 1e-10);
    }
}

#[test]
fn theorem4_channels() {
    let fx = theorem4_fixtures();
    // First fixture: a dephasing channel whose retrodiction is dephasing.
    let e1 = fx[0].dilation.channel(&tol()).unwrap();
    assert!(
        e1.apply(fx[0].alpha.matrix())
            .unwrap()
            .max_abs_diff(fx[0].alpha.matrix())
            < 1e-12
    );
    let dephase = LinearMap::from_kraus(&[
        ComplexMatrix::diag_real(&[1.0, 0.0]),
        ComplexMatrix::diag_real(&[0.0, 1.0]),
    ])
    .unwrap();
    let hat = petz(&e1, &fx[0].alpha, &tol()).unwrap();
    assert!(hat.map().dist(&dephase) < 1e-10);
    // Second: depolarizing retrodiction through the dilation.
    let hat = petz_via_dilation(&fx[1].dilation, &fx[1].alpha, &tol()).unwrap();
    let depol = QuantumChannel::replacement(2, &DensityOperator::maximally_mixed(2), &tol()).unwrap();
    assert!(hat.dist(&depol) < 1e-9);
}

#[test]
fn quantum_assignment_cases() {
    let mut r = rng(7);
    let gamma = random_density(2, &mut r);
    let beta = random_density(3, &mut r);
    let omega = gamma.tensor(&beta).unwrap();
    let a = quantum_assignment(&omega, AssignmentConvention::Strict, &tol()).unwrap();
    let rho = random_density(2, &mut r);
    let expect = kron(rho.matrix(), beta.matrix()).unwrap();
    assert!(a.apply(rho.matrix()).unwrap().max_abs_diff(&expect) < 1e-12);

    let omega = random_density(6, &mut r).with_bipartition(2, 3).unwrap();
    let a = quantum_assignment(&omega, AssignmentConvention::Strict, &tol()).unwrap();
    let mu = omega.marginal(Subsystem::A).unwrap();
    assert!(a.apply(mu.matrix()).unwrap().max_abs_diff(omega.matrix()) < 1e-12);

    // Diagonal reference: the classical assignment map.
    let joint = random_probability(6, &mut r).with_bipartition(2, 3).unwrap();
    let omega = DensityOperator::diagonal(joint.probs(), &tol())
        .unwrap()
        .with_bipartition(2, 3)
        .unwrap();
    let a = quantum_assignment(&omega, AssignmentConvention::Strict, &tol()).unwrap();
    let lam = assignment_map(&joint, &tol()).unwrap();
    for k in 0..2 {
        let out = a.apply(&matrix_unit(2, k, k)).unwrap();
        for ab in 0..6 {
            assert!((out[(ab, ab)].re - lam.get(ab, k)).abs() < 1e-12);
        }
    }
}

#[test]
fn classical_embedding() {
    let mut r = rng(8);
    for _ in 0..20 {
        let d = r.random_range(2..5);
        let phi = random_stochastic(d, d, &mut r);
        let gamma = random_probability(d, &mut r);
        let kraus: Vec<ComplexMatrix> = (0..d)
            .flat_map(|i| (0..d).map(move |j| (i, j)))
            .map(|(i, j)| matrix_unit(d, i, j).scale_real(phi.get(i, j).sqrt()))
            .collect();
        let e = QuantumChannel::from_kraus(kraus, &tol()).unwrap();
        let alpha = DensityOperator::diagonal(gamma.probs(), &tol()).unwrap();
        let hat = petz(&e, &alpha, &tol()).unwrap();
        let classical = bayes_invert(&phi, &gamma, &tol()).unwrap();
        for i in 0..d {
            let out = hat.apply(&matrix_unit(d, i, i)).unwrap();
            for j in 0..d {
                assert!((out[(j, j)].re - classical.get(j, i)).abs() <= 1e-12);
            }
        }
    }
}

#[test]
fn composability() {
    let mut r = rng(9);
    for _ in 0..50 {
        let chain: Vec<QuantumChannel> = (0..3).map(|_| random_channel(2, &mut r)).collect();
        let alpha = random_density(2, &mut r);
        let a = compose_retro_quantum(&chain, &alpha, &tol()).unwrap();
        let b = petz_of_composition(&chain, &alpha, &tol()).unwrap();
        assert!(a.dist(&b) <= 1e-10);
    }
    let u1 = haar_unitary(2, &mut r);
    let u2 = haar_unitary(2, &mut r);
    let chain = [QuantumChannel::unitary(&u1), QuantumChannel::unitary(&u2)];
    let a = compose_retro_quantum(&chain, &random_density(2, &mut r), &tol()).unwrap();
    let inv = QuantumChannel::unitary(&u1.adjoint().compose(&u2.adjoint()));
    assert!(a.dist(&inv) < 1e-10);
}

#[test]
fn gibbs_states() {
    let z = HermitianOperator::new(pauli_z(), &tol()).unwrap();
    let g = gibbs_state(
        &GibbsSpec {
            h: z.clone(),
            kappa: 0.0,
        },
        &tol(),
    )
    .unwrap();
    assert!(g.matrix().max_abs_diff(&ComplexMatrix::identity(2).scale_real(0.5)) < 1e-15);
    let g = gibbs_state(
        &GibbsSpec {
            h: z.clone(),
            kappa: -1.0,
        },
        &tol(),
    )
    .unwrap();
    let e = std::f64::consts::E;
    let expect = ComplexMatrix::diag_real(&[1.0 / e / (1.0 / e + e), e / (1.0 / e + e)]);
    assert!(g.matrix().max_abs_diff(&expect) < 1e-15);
    assert!(matches!(
        gibbs_state(&GibbsSpec { h: z, kappa: -800.0 }, &tol()),
        Err(Error::ExponentOverflow { .. })
    ));

    let mut r = rng(10);
    let ha = random_hermitian(2, &mut r);
    let hb = random_hermitian(3, &mut r);
    let sum = &kron(ha.matrix(), &ComplexMatrix::identity(3)).unwrap()
        + &kron(&ComplexMatrix::identity(2), hb.matrix()).unwrap();
    let kappa = -0.7;
    let joint = gibbs_state(
        &GibbsSpec {
            h: HermitianOperator::new(sum, &tol()).unwrap(),
            kappa,
        },
        &tol(),
    )
    .unwrap();
    let ta = gibbs_state(&GibbsSpec { h: ha.clone(), kappa }, &tol()).unwrap();
    let tb = gibbs_state(&GibbsSpec { h: hb, kappa }, &tol()).unwrap();
    assert!(joint.matrix().max_abs_diff(&kron(ta.matrix(), tb.matrix()).unwrap()) <= 1e-12);
    assert!(ta.matrix().commutator(ha.matrix()).max_abs() <= 1e-10);
}

fn sz_spec(kappa: f64) -> GibbsSpec {
    GibbsSpec {
        h: HermitianOperator::new(pauli_z(), &Tolerances::default()).unwrap(),
        kappa,
    }
}

#[test]
fn thermal_reversal() {
    let mut r = rng(11);
    let spec = sz_spec(-1.0);
    let tau = gibbs_state(&spec, &tol()).unwrap();
    for _ in 0..20 {
        let u = energy_conserving_unitary(&mut r);
        let dil = StinespringDilation::new(u, tau.clone()).unwrap();
        let rep = thermal_reverse_check(&dil, &spec, &spec, &tol()).unwrap();
        assert!(rep.commutator_norm <= 1e-10 && rep.choi_distance <= 1e-9);
    }
    let swap = UnitaryOperator::new(swap_operator(2), &tol()).unwrap();
    let rep = thermal_reverse_check(
        &StinespringDilation::new(swap, tau.clone()).unwrap(),
        &spec,
        &spec,
        &tol(),
    )
    .unwrap();
    assert!(rep.reversal_holds && rep.energy_conserving);

    let dil = StinespringDilation::new(haar_unitary(4, &mut r), tau).unwrap();
    let rep = thermal_reverse_check(&dil, &spec, &spec, &tol()).unwrap();
    assert!(rep.commutator_norm > 0.1 && !rep.energy_conserving);
}

#[test]
fn pseudoinverse_convention() {
    let mut r = rng(12);
    let e = random_channel(2, &mut r);
    let alpha = random_density(2, &mut r);
    let p = petz_pseudoinverse(&e, &alpha, &tol()).unwrap();
    assert!(p.dist(petz(&e, &alpha, &tol()).unwrap().map()) < 1e-10);

    // Unitary channel with a pure prior: U^dagger P . P U.
    let u = haar_unitary(2, &mut r);
    let psi = random_ket(2, &mut r);
    let prior = DensityOperator::pure(&psi).unwrap();
    let p = petz_pseudoinverse(&QuantumChannel::unitary(&u), &prior, &tol()).unwrap();
    let out = u.matrix().mul_vec(&psi);
    let proj = ComplexMatrix::outer(&out, &out);
    let ud = u.adjoint();
    let expect = LinearMap::from_fn(2, 2, |x| Ok(ud.conjugate(&(&(&proj * x) * &proj)))).unwrap();
    assert!(p.dist(&expect) < 1e-10);

    // Erasure to |0>: X -> <0|X|0> alpha.
    let zero = DensityOperator::pure(&basis_vec(2, 0)).unwrap();
    let erase = QuantumChannel::replacement(2, &zero, &tol()).unwrap();
    let p = petz_pseudoinverse(&erase, &alpha, &tol()).unwrap();
    let expect = LinearMap::from_fn(2, 2, |x| Ok(alpha.matrix().scale(x[(0, 0)]))).unwrap();
    assert!(p.dist(&expect) < 1e-10);
}

fn product_pure_tuple(seed: u64) -> (UnitaryOperator, Vec<C64>, Vec<C64>) {
    let mut r = rng(seed);
    let u = haar_unitary(4, &mut r);
    let beta = random_ket(2, &mut r);
    let sol = solve_pure_pp(&u, &beta, &tol()).unwrap();
    (u, sol.alpha, beta)
}

#[test]
fn conventions_disagree_generically() {
    let (u, a, b) = product_pure_tuple(13);
    let rep = conventions_compare_two_qubit(
        &u,
        &DensityOperator::pure(&a).unwrap(),
        &DensityOperator::pure(&b).unwrap(),
        &tol(),
    )
    .unwrap();
    assert!(rep.u_block[(2, 1)].norm() > 1e-3);
    assert!(rep.dist_pseudo_neighbourhood > 1e-3);
    assert!(rep.dist_pseudo_naive > 1e-3);
    assert!(rep.dist_neighbourhood_naive > 1e-3);
    assert!(!rep.naive_agrees_predicted);
    assert!(rep.naive_definition_residual < 1e-10);
    assert!(rep.pseudoinverse.on_minus.max_abs() < 1e-10);
}

#[test]
fn conventions_agree_on_block_structure() {
    // Controlled-Z with |0> and |+>: u21 = u12 = 0.
    let cz = UnitaryOperator::new(ComplexMatrix::diag_real(&[1.0, 1.0, 1.0, -1.0]), &tol()).unwrap();
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let plus = vec![c(s, 0.0), c(s, 0.0)];
    let rep = conventions_compare_two_qubit(
        &cz,
        &DensityOperator::pure(&basis_vec(2, 0)).unwrap(),
        &DensityOperator::pure(&plus).unwrap(),
        &tol(),
    )
    .unwrap();
    assert!(rep.u_block[(2, 1)].norm() < 1e-12 && rep.u_block[(1, 2)].norm() < 1e-12);
    assert!(rep.naive_agrees_predicted);
    assert!(rep.dist_neighbourhood_naive <= 1e-10);
    assert!(rep.pseudoinverse.on_minus.max_abs() <= 1e-10);
}

#[test]
fn neighbourhood_convention_is_a_limit_of_petz_maps() {
    // Full-rank priors (1 - eps)|a+><a+| + eps|a-><a-| approach the closed form.
    let (u, a, b) = product_pure_tuple(14);
    let rep = conventions_compare_two_qubit(
        &u,
        &DensityOperator::pure(&a).unwrap(),
        &DensityOperator::pure(&b).unwrap(),
        &tol(),
    )
    .unwrap();
    let e = StinespringDilation::new(u, DensityOperator::pure(&b).unwrap())
        .unwrap()
        .channel(&tol())
        .unwrap();
    let am = qubit_complement(&a);
    let mut last = f64::INFINITY;
    for eps in [1e-4, 1e-5, 1e-6] {
        let prior =
            &ComplexMatrix::outer(&a, &a).scale_real(1.0 - eps) + &ComplexMatrix::outer(&am, &am).scale_real(eps);
        let hat = petz(&e, &DensityOperator::new(prior, &tol()).unwrap(), &tol()).unwrap();
        let table = ActionTable {
            on_plus: hat
                .apply(&ComplexMatrix::outer(&rep.alpha_prime_plus, &rep.alpha_prime_plus))
                .unwrap(),
            on_minus: hat
                .apply(&ComplexMatrix::outer(&rep.alpha_prime_minus, &rep.alpha_prime_minus))
                .unwrap(),
            on_cross: hat
                .apply(&ComplexMatrix::outer(&rep.alpha_prime_plus, &rep.alpha_prime_minus))
                .unwrap(),
        };
        let d = table.dist(&rep.neighbourhood);
        assert!(d < last, "no convergence at eps = {eps:e}");
        last = d;
    }
    // The error shrinks like sqrt(eps).
    assert!(last < 1e-3, "limit distance {last:.3e}");
}

#[test]
fn conventions_reject_non_product_tuples() {
    let cnot = UnitaryOperator::new(
        ComplexMatrix::from_real_rows(&[
            &[1.0, 0.0, 0.0, 0.0],
            &[0.0, 1.0, 0.0, 0.0],
            &[0.0, 0.0, 0.0, 1.0],
            &[0.0, 0.0, 1.0, 0.0],
        ])
        .unwrap(),
        &tol(),
    )
    .unwrap();
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let plus = DensityOperator::pure(&[c(s, 0.0), c(s, 0.0)]).unwrap();
    let zero = DensityOperator::pure(&basis_vec(2, 0)).unwrap();
    assert!(matches!(
        conventions_compare_two_qubit(&cnot, &plus, &zero, &tol()),
        Err(Error::NotProductPreserving { .. })
    ));
}
