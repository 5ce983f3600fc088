use std::f64::consts::PI;

use serde_json::{json, Value};

use crate::commands::{fmt, fmt_list, fmt_list_sci};
use crate::report::{domain, to_value, Outcome, Summary};
use crate::{DemoName, GlobalOpts};
use retrodict::channel::{
    conventions_compare_two_qubit, gibbs_state, reversed_dilation, thermal_reverse_check, GibbsSpec, QuantumChannel,
    StinespringDilation,
};
use retrodict::classical::{bayes_invert, cyclic_bit_dilation, distance_to_reversed_forms, ProbabilityVector};
use retrodict::linalg::{basis_vec, c, log_negativity, pauli_z};
use retrodict::reversibility::{
    check_pp, check_tr, check_trc, energy_conserving_unitary, qutrit_cycle, swap_mixing_dilation, theorem4_fixtures,
};
use retrodict::sample::{haar_unitary, random_density, random_ket, rng};
use retrodict::twoqubit::solve_pure_pp;
use retrodict::{ComplexMatrix, DensityOperator, HermitianOperator, Tolerances, UnitaryOperator};

pub fn run(name: DemoName, opts: &GlobalOpts, tol: &Tolerances) -> Outcome {
    match name {
        DemoName::Theorem4 => theorem4(tol),
        DemoName::ClassicalCounterexample => classical_counterexample(tol),
        DemoName::QuantumCounterexample => swap_mixing(opts.seed, tol),
        DemoName::Thermal => thermal(opts.seed, tol),
        DemoName::Nsteady => nsteady(opts.seed, tol),
        DemoName::Conventions => conventions(opts.seed, tol),
    }
}

fn status_str(v: &impl serde::Serialize) -> String {
    to_value(v).as_str().unwrap_or_default().to_string()
}

/// Two dilations that are tabletop reversible without preserving products.
fn theorem4(tol: &Tolerances) -> Outcome {
    let mut s = Summary::default();
    let mut fixtures = Vec::new();
    for f in theorem4_fixtures() {
        let omega = domain(f.dilation.global_output(&f.alpha, tol))?;
        let ln = domain(log_negativity(omega.matrix(), f.dilation.d_a(), f.dilation.d_b()))?;
        let pp = domain(check_pp(f.dilation.unitary(), &f.alpha, f.dilation.beta(), tol))?;
        let cert = domain(check_tr(&f.dilation, &f.alpha, tol))?;
        s.line(f.name);
        s.kv("log negativity", format!("{ln:.6}"));
        s.kv("product preserving", pp.is_product);
        s.kv("tabletop reversible", status_str(&cert.status));
        let mut entry = json!({
            "name": f.name,
            "log_negativity": ln,
            "is_product": pp.is_product,
            "product_residual": pp.product_residual,
            "certificate": to_value(&cert),
            "expected": to_value(&f.expected),
        });
        if f.dilation.d_b() == 4 {
            let rev = domain(reversed_dilation(
                &f.dilation,
                DensityOperator::maximally_mixed(4).matrix(),
            ))?;
            let depol = domain(QuantumChannel::replacement(
                2,
                &DensityOperator::maximally_mixed(2),
                tol,
            ))?;
            let d = rev.dist(depol.map());
            s.kv("maximally mixed ancilla", format!("depolarizing within {}", fmt(d)));
            entry["depolarizing_distance"] = json!(d);
        }
        fixtures.push(entry);
    }
    s.finish(json!({ "fixtures": fixtures }))
}

/// Bit dilation whose retrodiction is not any reversed dilation.
fn classical_counterexample(tol: &Tolerances) -> Outcome {
    let dil = domain(cyclic_bit_dilation(0.25, tol))?;
    let gamma = domain(ProbabilityVector::new(vec![0.25, 0.75], tol))?;
    let hat = domain(bayes_invert(&dil.marginal_channel(), &gamma, tol))?;
    let (dist, eta0) = domain(distance_to_reversed_forms(&dil, &hat))?;
    let mut s = Summary::default();
    for j in 0..2 {
        s.kv(
            &format!("retrodiction row {j}"),
            fmt_list(&[hat.get(j, 0), hat.get(j, 1)]),
        );
    }
    s.kv(
        "closest reversed form",
        format!("distance {dist:.6} at eta0 = {eta0:.6}"),
    );
    s.finish(json!({
        "dilation": to_value(&dil),
        "prior": to_value(&gamma),
        "retrodiction": to_value(&hat),
        "distance_to_reversed_forms": dist,
        "best_eta0": eta0,
    }))
}

/// `cos(theta) 1 + i sin(theta) SWAP` for several angles.
fn swap_mixing(seed: u64, tol: &Tolerances) -> Outcome {
    let mut r = rng(seed);
    let alpha = random_density(2, &mut r);
    let beta = random_density(2, &mut r);
    let mut s = Summary::default();
    let mut rows = Vec::new();
    for (label, theta) in [
        ("0", 0.0),
        ("pi/5", PI / 5.0),
        ("pi/4", PI / 4.0),
        ("pi/2", PI / 2.0),
        ("pi", PI),
    ] {
        let dil = domain(swap_mixing_dilation(theta, beta.clone()))?;
        let cert = domain(check_tr(&dil, &alpha, tol))?;
        s.kv(
            &format!("theta = {label}"),
            format!("{} (residual {})", status_str(&cert.status), fmt(cert.residual)),
        );
        rows.push(json!({ "theta": theta, "certificate": to_value(&cert) }));
    }
    s.finish(json!({ "alpha": to_value(&alpha), "beta": to_value(&beta), "angles": rows }))
}

fn thermal(seed: u64, tol: &Tolerances) -> Outcome {
    let mut r = rng(seed);
    let spec = GibbsSpec {
        h: domain(HermitianOperator::new(pauli_z(), tol))?,
        kappa: -1.0,
    };
    let tau = domain(gibbs_state(&spec, tol))?;
    let dil = domain(StinespringDilation::new(energy_conserving_unitary(&mut r), tau.clone()))?;
    let rep = domain(thermal_reverse_check(&dil, &spec, &spec, tol))?;
    let cert = domain(check_tr(&dil, &tau, tol))?;
    let mut s = Summary::default();
    s.kv("commutator norm", fmt(rep.commutator_norm));
    s.kv("Petz vs reversed dilation", fmt(rep.choi_distance));
    s.kv("tabletop reversible", status_str(&cert.status));
    s.finish(json!({
        "dilation": to_value(&dil),
        "gibbs": to_value(&spec),
        "report": to_value(&rep),
        "certificate": to_value(&cert),
    }))
}

fn nsteady(seed: u64, tol: &Tolerances) -> Outcome {
    let ch = domain(qutrit_cycle(seed, tol))?;
    let rep = domain(check_trc(&ch.dilation, &ch.priors[0], 4, tol))?;
    let mut s = Summary::default();
    s.kv("cycle length", ch.priors.len());
    s.kv("composable", rep.is_composable);
    s.kv("residuals", fmt_list_sci(&rep.residuals));
    s.finish(json!({ "channel": to_value(&ch), "report": to_value(&rep) }))
}

fn conventions(seed: u64, tol: &Tolerances) -> Outcome {
    let mut r = rng(seed);
    let u = haar_unitary(4, &mut r);
    let beta = random_ket(2, &mut r);
    let sol = domain(solve_pure_pp(&u, &beta, tol))?;
    let pure = |v: &[retrodict::C64]| domain(DensityOperator::pure(v));
    let generic = domain(conventions_compare_two_qubit(
        &u,
        &pure(&sol.alpha)?,
        &pure(&beta)?,
        tol,
    ))?;

    let cz = domain(UnitaryOperator::new(
        ComplexMatrix::diag_real(&[1.0, 1.0, 1.0, -1.0]),
        tol,
    ))?;
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let block = domain(conventions_compare_two_qubit(
        &cz,
        &pure(&basis_vec(2, 0))?,
        &pure(&[c(h, 0.0), c(h, 0.0)])?,
        tol,
    ))?;
    let mut s = Summary::default();
    for (label, rep) in [("random unitary", &generic), ("controlled-Z", &block)] {
        s.line(label);
        s.kv("pseudoinverse vs neighbourhood", fmt(rep.dist_pseudo_neighbourhood));
        s.kv("pseudoinverse vs naive", fmt(rep.dist_pseudo_naive));
        s.kv("neighbourhood vs naive", fmt(rep.dist_neighbourhood_naive));
    }
    let result: Value = json!({ "generic": to_value(&generic), "block": to_value(&block) });
    s.finish(result)
}
