use rand::Rng;
use retrodict::classical::*;
use retrodict::sample::{random_permutation, random_probability, random_stochastic, rng};
use retrodict::{Error, Tolerances};

fn tol() -> Tolerances {
    Tolerances::default()
}

/// Bayes rule written out entry by entry.
fn bayes_oracle(phi: &StochasticMatrix, gamma: &ProbabilityVector) -> Vec<Vec<f64>> {
    let g = gamma.probs();
    (0..phi.d_in())
        .map(|j| {
            (0..phi.d_out())
                .map(|i| {
                    let q: f64 = (0..phi.d_in()).map(|k| phi.get(i, k) * g[k]).sum();
                    g[j] * phi.get(i, j) / q
                })
                .collect()
        })
        .collect()
}

#[test]
fn bayes_inversion_matches_the_rule() {
    let mut r = rng(1);
    for _ in 0..100 {
        let (d_out, d_in) = (r.random_range(2..5), r.random_range(2..5));
        let phi = random_stochastic(d_out, d_in, &mut r);
        let gamma = random_probability(d_in, &mut r);
        let hat = bayes_invert(&phi, &gamma, &tol()).unwrap();
        let oracle = bayes_oracle(&phi, &gamma);
        for j in 0..d_in {
            for i in 0..d_out {
                assert!((hat.get(j, i) - oracle[j][i]).abs() < 1e-14);
            }
        }
        // The reverse maps the propagated prior back to the prior.
        let back = hat.apply(&phi.apply(&gamma).unwrap()).unwrap();
        assert!(back.max_abs_diff(&gamma) < 1e-14);
    }
}

#[test]
fn zero_output_probability_is_undefined() {
    let phi = StochasticMatrix::new(3, 2, vec![0.5, 0.2, 0.5, 0.8, 0.0, 0.0], &tol()).unwrap();
    let gamma = ProbabilityVector::new(vec![0.5, 0.5], &tol()).unwrap();
    match bayes_invert(&phi, &gamma, &tol()) {
        Err(Error::UndefinedRetrodiction { zero_states }) => assert_eq!(zero_states, vec![2]),
        other => panic!("{other:?}"),
    }
}

#[test]
fn special_cases() {
    let mut r = rng(2);
    let gamma = random_probability(4, &mut r);
    let perm = StochasticMatrix::permutation(&random_permutation(4, &mut r)).unwrap();
    let hat = bayes_invert(&perm, &gamma, &tol()).unwrap();
    assert!(hat.max_abs_diff(&perm.transpose()) < 1e-15);

    // Doubly stochastic map with the uniform prior: the transpose.
    let ds = StochasticMatrix::new(2, 2, vec![0.3, 0.7, 0.7, 0.3], &tol()).unwrap();
    let hat = bayes_invert(&ds, &ProbabilityVector::uniform(2), &tol()).unwrap();
    assert!(hat.max_abs_diff(&ds.transpose()) < 1e-15);
}

#[test]
fn composability() {
    let mut r = rng(3);
    for _ in 0..50 {
        let d = [
            r.random_range(2..4),
            r.random_range(2..4),
            r.random_range(2..4),
            r.random_range(2..4),
        ];
        let phis: Vec<StochasticMatrix> = (0..3).map(|k| random_stochastic(d[k + 1], d[k], &mut r)).collect();
        let gamma = random_probability(d[0], &mut r);
        let a = compose_retro_classical(&phis, &gamma, &tol()).unwrap();
        let b = retro_of_composition(&phis, &gamma, &tol()).unwrap();
        assert!(a.max_abs_diff(&b) < 1e-12);
    }
}

#[test]
fn dilation_reproduces_bayes() {
    let mut r = rng(4);
    for k in 0..100 {
        let (d_a, d_b) = (r.random_range(2..5), r.random_range(2..5));
        let global = random_stochastic(d_a * d_b, d_a * d_b, &mut r);
        let env = random_probability(d_b, &mut r);
        let cond = (k % 2 == 0).then(|| random_stochastic(d_b, d_a, &mut r));
        let dil = ClassicalDilation::new(global, env, cond).unwrap();
        let gamma = random_probability(d_a, &mut r);
        let via = retro_via_dilation(&dil, &gamma, &tol()).unwrap();
        let direct = bayes_invert(&dil.marginal_channel(), &gamma, &tol()).unwrap();
        assert!(via.max_abs_diff(&direct) <= 1e-12);
    }
}

#[test]
fn dilation_with_a_permutation_and_point_environment() {
    // Permutation global map and deterministic environment: some global outputs
    // have zero probability, which the inverse must tolerate.
    let mut r = rng(5);
    let global = StochasticMatrix::permutation(&random_permutation(6, &mut r)).unwrap();
    let env = ProbabilityVector::new(vec![1.0, 0.0], &tol()).unwrap();
    let dil = ClassicalDilation::new(global, env, None).unwrap();
    let gamma = random_probability(3, &mut r);
    let direct = bayes_invert(&dil.marginal_channel(), &gamma, &tol());
    let via = retro_via_dilation(&dil, &gamma, &tol());
    match (direct, via) {
        (Ok(d), Ok(v)) => assert!(d.max_abs_diff(&v) <= 1e-12),
        (Err(_), Err(_)) => {}
        (d, v) => panic!("disagreement: {d:?} vs {v:?}"),
    }
}

#[test]
fn assignment_map_recovers_the_joint() {
    let mut r = rng(6);
    let joint = random_probability(6, &mut r).with_bipartition(2, 3).unwrap();
    let lam = assignment_map(&joint, &tol()).unwrap();
    let back = lam.apply(&joint.marginal_a().unwrap()).unwrap();
    assert!(back.max_abs_diff(&joint) < 1e-15);
}

#[test]
fn cyclic_bit_dilation_is_not_reversible() {
    let dil = cyclic_bit_dilation(0.25, &tol()).unwrap();
    let gamma = ProbabilityVector::new(vec![0.25, 0.75], &tol()).unwrap();
    let hat = bayes_invert(&dil.marginal_channel(), &gamma, &tol()).unwrap();
    let expect = StochasticMatrix::new(2, 2, vec![0.1, 0.5, 0.9, 0.5], &tol()).unwrap();
    assert!(hat.max_abs_diff(&expect) < 1e-15);
    // Closed form of the reversed dilation: [[1 - eta0, eta0], [eta0, 1 - eta0]].
    for k in 0..=10 {
        let eta0 = k as f64 / 10.0;
        let eta = ProbabilityVector::new(vec![eta0, 1.0 - eta0], &tol()).unwrap();
        let form = reversed_dilation(&dil, &eta).unwrap();
        let closed = StochasticMatrix::new(2, 2, vec![1.0 - eta0, eta0, eta0, 1.0 - eta0], &tol()).unwrap();
        assert!(form.max_abs_diff(&closed) < 1e-15);
    }
    let (d, eta0) = distance_to_reversed_forms(&dil, &hat).unwrap();
    assert!((d - 0.2).abs() < 1e-9);
    assert!((eta0 - 0.7).abs() < 1e-6);
}

#[test]
fn validation() {
    assert!(StochasticMatrix::new(2, 2, vec![0.5, 0.5, 0.6, 0.5], &tol()).is_err());
    assert!(StochasticMatrix::new(2, 2, vec![1.2, 0.5, -0.2, 0.5], &tol()).is_err());
    assert!(ProbabilityVector::new(vec![0.5, 0.6], &tol()).is_err());
    assert!(StochasticMatrix::permutation(&[0, 0]).is_err());
}
