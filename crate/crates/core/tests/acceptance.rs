//! Acceptance run: one PASS/FAIL line per criterion, non-zero exit on any failure.

use std::f64::consts::PI;
use std::time::{Duration, Instant};

use rand::Rng;
use retrodict::channel::*;
use retrodict::classical::{
    bayes_invert, compose_retro_classical, cyclic_bit_dilation, distance_to_reversed_forms, retro_of_composition,
    retro_via_dilation, reversed_dilation as classical_reversed, ClassicalDilation, ProbabilityVector,
};
use retrodict::linalg::*;
use retrodict::reversibility::*;
use retrodict::sample::*;
use retrodict::twoqubit::*;
use retrodict::Tolerances;

type Outcome = Result<String, String>;

fn tol() -> Tolerances {
    Tolerances::default()
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn e2s<E: std::fmt::Debug>(e: E) -> String {
    format!("{e:?}")
}

/// Every product-preserving report seen during the run.
#[derive(Default)]
struct Ledger {
    reports: Vec<PPReport>,
}

impl Ledger {
    fn check_pp(&mut self, u: &UnitaryOperator, a: &DensityOperator, b: &DensityOperator) -> Result<PPReport, String> {
        let rep = check_pp(u, a, b, &tol()).map_err(e2s)?;
        self.reports.push(rep.clone());
        Ok(rep)
    }
}

fn gibbs(h: &HermitianOperator, kappa: f64) -> Result<DensityOperator, String> {
    gibbs_state(&GibbsSpec { h: h.clone(), kappa }, &tol()).map_err(e2s)
}

fn timed(limit: Duration, start: Instant) -> Result<(), String> {
    let el = start.elapsed();
    ensure(el < limit, || format!("took {el:?}, limit {limit:?}"))
}

fn c1() -> Outcome {
    let start = Instant::now();
    let f = theorem4_fixtures()
        .into_iter()
        .find(|f| f.name == "permutation-8")
        .ok_or("missing fixture")?;
    let omega = f.dilation.global_output(&f.alpha, &tol()).map_err(e2s)?;
    let ln = log_negativity(omega.matrix(), 2, 4).map_err(e2s)?;
    ensure((ln - 0.9135).abs() <= 5e-4, || format!("log negativity {ln}"))?;
    timed(Duration::from_secs(1), start)?;
    Ok(format!("log negativity {ln:.6}"))
}

fn c2() -> Outcome {
    let start = Instant::now();
    let mut r = rng(2);
    let mut worst: f64 = 0.0;
    for _ in 0..500 {
        let (d_a, d_b) = (r.random_range(2..4), r.random_range(2..4));
        let dil =
            StinespringDilation::new(haar_unitary(d_a * d_b, &mut r), random_density(d_b, &mut r)).map_err(e2s)?;
        let alpha = random_density(d_a, &mut r);
        let a = petz(&dil.channel(&tol()).map_err(e2s)?, &alpha, &tol()).map_err(e2s)?;
        let b = petz_via_dilation(&dil, &alpha, &tol()).map_err(e2s)?;
        worst = worst.max(a.dist(&b));
    }
    ensure(worst <= 1e-10, || format!("max Choi distance {worst:e}"))?;
    timed(Duration::from_secs(60), start)?;
    Ok(format!("max Choi distance {worst:.2e}"))
}

fn c3() -> Outcome {
    let mut r = rng(3);
    let mut worst: f64 = 0.0;
    for k in 0..500 {
        let (d_a, d_b) = (r.random_range(2..5), r.random_range(2..5));
        let global = random_stochastic(d_a * d_b, d_a * d_b, &mut r);
        let env = random_probability(d_b, &mut r);
        let cond = (k % 2 == 0).then(|| random_stochastic(d_b, d_a, &mut r));
        let dil = ClassicalDilation::new(global, env, cond).map_err(e2s)?;
        let gamma = random_probability(d_a, &mut r);
        let via = retro_via_dilation(&dil, &gamma, &tol()).map_err(e2s)?;
        let direct = bayes_invert(&dil.marginal_channel(), &gamma, &tol()).map_err(e2s)?;
        worst = worst.max(via.max_abs_diff(&direct));
    }
    ensure(worst <= 1e-12, || format!("max entrywise distance {worst:e}"))?;
    Ok(format!("max entrywise distance {worst:.2e}"))
}

fn c4() -> Outcome {
    let mut r = rng(4);
    let (mut worst_c, mut worst_q): (f64, f64) = (0.0, 0.0);
    for _ in 0..200 {
        let d: Vec<usize> = (0..4).map(|_| r.random_range(2..5)).collect();
        let phis: Vec<_> = (0..3).map(|k| random_stochastic(d[k + 1], d[k], &mut r)).collect();
        let gamma = random_probability(d[0], &mut r);
        let a = compose_retro_classical(&phis, &gamma, &tol()).map_err(e2s)?;
        let b = retro_of_composition(&phis, &gamma, &tol()).map_err(e2s)?;
        worst_c = worst_c.max(a.max_abs_diff(&b));
    }
    for _ in 0..200 {
        let d = r.random_range(2..4);
        let chain: Vec<QuantumChannel> = (0..3)
            .map(|_| {
                StinespringDilation::new(haar_unitary(2 * d, &mut r), random_density(2, &mut r))
                    .and_then(|dil| dil.channel(&tol()))
            })
            .collect::<Result<_, _>>()
            .map_err(e2s)?;
        let alpha = random_density(d, &mut r);
        let a = compose_retro_quantum(&chain, &alpha, &tol()).map_err(e2s)?;
        let b = petz_of_composition(&chain, &alpha, &tol()).map_err(e2s)?;
        worst_q = worst_q.max(a.dist(&b));
    }
    ensure(worst_c <= 1e-10 && worst_q <= 1e-10, || {
        format!("classical {worst_c:e}, quantum {worst_q:e}")
    })?;
    Ok(format!("classical {worst_c:.2e}, quantum {worst_q:.2e}"))
}

fn classifier_samples() -> Vec<[f64; 3]> {
    let mut r = rng(5);
    let mut pts: Vec<[f64; 3]> = (0..1000).map(|_| weyl_cell_point(&mut r)).collect();
    pts.extend((0..200).map(|k| gg_surface_point(k % 2 == 1, &mut r)));
    pts
}

fn c5(gg_unitaries: &mut Vec<(UnitaryOperator, GGClassification)>) -> Outcome {
    let mut r = rng(55);
    let mut disagreements = 0;
    let mut gg = 0;
    for t in classifier_samples() {
        let u = unitary_with_angles(t, &mut r);
        let g = classify_gg(&u, &tol()).map_err(e2s)?;
        let oracle = gg_nullspace_oracle(&u, 2, 2).map_err(e2s)?;
        if g.is_gg != (oracle.dim >= 1) || !g.oracle_agrees {
            disagreements += 1;
        }
        if g.is_gg {
            gg += 1;
            gg_unitaries.push((u, g));
        }
    }
    ensure(disagreements == 0, || format!("{disagreements} disagreements"))?;
    Ok(format!("1200 samples, {gg} GG, no disagreements"))
}

fn c6(gg_unitaries: &[(UnitaryOperator, GGClassification)], ledger: &mut Ledger) -> Outcome {
    let mut tuples = 0;
    let mut worst: f64 = 0.0;
    for (u, g) in gg_unitaries {
        for tuple in &g.family.basis {
            let res = tuple.residual(u.matrix()).map_err(e2s)?;
            worst = worst.max(res);
            ensure(res <= 1e-9, || {
                format!("tuple residual {res:e} at t = {:?}", g.cartan.t)
            })?;
            for kappa in [-0.5, -2.0] {
                let rep = ledger.check_pp(u, &gibbs(&tuple.h_a, kappa)?, &gibbs(&tuple.h_b, kappa)?)?;
                ensure(rep.is_product, || {
                    format!("Gibbs pair not preserved at t = {:?}", g.cartan.t)
                })?;
                let da = rep
                    .alpha_out
                    .matrix()
                    .max_abs_diff(gibbs(&tuple.h_a_out, kappa)?.matrix());
                let db = rep
                    .beta_out
                    .matrix()
                    .max_abs_diff(gibbs(&tuple.h_b_out, kappa)?.matrix());
                ensure(da.max(db) <= 1e-9, || format!("outputs off by {:e}", da.max(db)))?;
            }
            tuples += 1;
        }
    }
    ensure(tuples > 0, || "no tuples constructed".into())?;
    Ok(format!("{tuples} tuples, max residual {worst:.2e}"))
}

fn c7() -> Outcome {
    let mut r = rng(7);
    let mut degenerate = 0;
    let mut worst: f64 = 0.0;
    for k in 0..500 {
        let (u, beta) = if k % 20 == 0 {
            // t1 = t2 with beta = v_B|1> leaves only the constant coefficient.
            let t1 = 0.05 + 0.7 * r.random::<f64>();
            let t3 = (r.random::<f64>() - 0.5) * t1;
            let u = unitary_with_angles([t1, t1, t3], &mut r);
            let f = cartan_decompose(&u, &tol()).map_err(e2s)?;
            let beta = f.v_b.mul_vec(&basis_vec(2, 1));
            (u, beta)
        } else if k % 20 == 10 {
            let u = haar_unitary(2, &mut r).tensor(&haar_unitary(2, &mut r)).map_err(e2s)?;
            (u, random_ket(2, &mut r))
        } else {
            (haar_unitary(4, &mut r), random_ket(2, &mut r))
        };
        let s = solve_pure_pp(&u, &beta, &tol()).map_err(e2s)?;
        let out = u.matrix().mul_vec(&kron_vec(&s.alpha, &beta));
        let ent = entanglement_entropy(&out, 2, 2).map_err(e2s)?;
        worst = worst.max(ent);
        ensure(ent <= 1e-8, || format!("entanglement {ent:e} in case {k}"))?;
        let small = |z: C64| z.norm() <= 1e-9;
        if small(s.problem.a) && small(s.problem.b) && matches!(s.branch, PPBranch::AtInfinity | PPBranch::Trivial) {
            degenerate += 1;
        }
    }
    ensure(degenerate >= 20, || format!("only {degenerate} degenerate cases"))?;
    Ok(format!(
        "500 cases, {degenerate} degenerate, max entanglement {worst:.2e}"
    ))
}

fn c8(gg_unitaries: &[(UnitaryOperator, GGClassification)], ledger: &mut Ledger) -> Outcome {
    let mut r = rng(8);
    let mut tuples: Vec<(UnitaryOperator, DensityOperator, DensityOperator)> = Vec::new();
    for (u, g) in gg_unitaries.iter().take(100) {
        let tuple = &g.family.basis[r.random_range(0..g.family.basis.len())];
        let kappa = -r.random_range(0.3..2.0);
        tuples.push((u.clone(), gibbs(&tuple.h_a, kappa)?, gibbs(&tuple.h_b, kappa)?));
    }
    let (e0, e1) = (basis_vec(2, 0), basis_vec(2, 1));
    while tuples.len() < 200 {
        let u = energy_conserving_unitary(&mut r);
        let res = gg_from_orthogonal_pairs(&u, (&e0, &e0), (&e1, &e1), &tol()).map_err(e2s)?;
        let tuple = res.tuple.ok_or("orthogonal pairs gave no tuple")?;
        let kappa = -r.random_range(0.3..2.0);
        tuples.push((u, gibbs(&tuple.h_a, kappa)?, gibbs(&tuple.h_b, kappa)?));
    }
    let mut worst_res: f64 = 0.0;
    let mut worst_beta: f64 = 0.0;
    for (u, alpha, beta) in &tuples {
        let pp = ledger.check_pp(u, alpha, beta)?;
        ensure(pp.is_product, || "constructed tuple not product preserving".into())?;
        let dil = StinespringDilation::new(u.clone(), beta.clone()).map_err(e2s)?;
        let cert = check_tr(&dil, alpha, &tol()).map_err(e2s)?;
        ensure(cert.status == TRStatus::Tr, || format!("status {:?}", cert.status))?;
        let bp = cert.beta_prime.ok_or("no beta'")?;
        worst_res = worst_res.max(cert.residual);
        worst_beta = worst_beta.max(bp.matrix().max_abs_diff(pp.beta_out.matrix()));
    }
    ensure(worst_res <= 1e-8 && worst_beta <= 1e-9, || {
        format!("residual {worst_res:e}, beta' deviation {worst_beta:e}")
    })?;
    Ok(format!(
        "{} tuples, max residual {worst_res:.2e}, max beta' deviation {worst_beta:.2e}",
        tuples.len()
    ))
}

fn c9(ledger: &mut Ledger) -> Outcome {
    for f in theorem4_fixtures() {
        let cert = check_tr(&f.dilation, &f.alpha, &tol()).map_err(e2s)?;
        ensure(cert.status == TRStatus::Tr, || {
            format!("{}: status {:?}", f.name, cert.status)
        })?;
        let pp = ledger.check_pp(f.dilation.unitary(), &f.alpha, f.dilation.beta())?;
        ensure(!pp.is_product, || format!("{}: output is a product", f.name))?;
        if f.name == "permutation-8" {
            let rev = reversed_dilation(&f.dilation, DensityOperator::maximally_mixed(4).matrix()).map_err(e2s)?;
            let depol = QuantumChannel::replacement(2, &DensityOperator::maximally_mixed(2), &tol()).map_err(e2s)?;
            let d = rev.dist(depol.map());
            ensure(d <= 1e-9, || format!("depolarizing distance {d:e}"))?;
        }
    }
    Ok("both fixtures TR and not product preserving".into())
}

fn c10() -> Outcome {
    let dil = cyclic_bit_dilation(0.25, &tol()).map_err(e2s)?;
    let gamma = ProbabilityVector::new(vec![0.25, 0.75], &tol()).map_err(e2s)?;
    let hat = bayes_invert(&dil.marginal_channel(), &gamma, &tol()).map_err(e2s)?;
    // Closed form of every reversed dilation: [[1 - e, e], [e, 1 - e]].
    let mut closest = f64::INFINITY;
    for k in 0..=1000 {
        let e = k as f64 / 1000.0;
        let eta = ProbabilityVector::new(vec![e, 1.0 - e], &tol()).map_err(e2s)?;
        let form = classical_reversed(&dil, &eta).map_err(e2s)?;
        let closed = [[1.0 - e, e], [e, 1.0 - e]];
        for (i, row) in closed.iter().enumerate() {
            for (j, &x) in row.iter().enumerate() {
                ensure((form.get(i, j) - x).abs() < 1e-15, || {
                    "reversed form differs from closed form".into()
                })?;
            }
        }
        closest = closest.min(form.max_abs_diff(&hat));
    }
    let (d, _) = distance_to_reversed_forms(&dil, &hat).map_err(e2s)?;
    ensure(closest > 0.19 && (d - 0.2).abs() < 1e-9, || format!("distance {d}"))?;

    let mut r = rng(10);
    let beta = random_density(2, &mut r);
    let alpha = random_density(2, &mut r);
    let qdil = swap_mixing_dilation(PI / 5.0, beta).map_err(e2s)?;
    let cert = check_tr(&qdil, &alpha, &tol()).map_err(e2s)?;
    ensure(cert.status == TRStatus::NotTr, || {
        format!("swap mixing status {:?}", cert.status)
    })?;
    Ok(format!(
        "classical distance {d:.6}, swap mixing residual {:.3e}",
        cert.residual
    ))
}

fn c11() -> Outcome {
    let mut r = rng(11);
    let spec = GibbsSpec {
        h: HermitianOperator::new(pauli_z(), &tol()).map_err(e2s)?,
        kappa: -1.0,
    };
    let tau = gibbs_state(&spec, &tol()).map_err(e2s)?;
    let (mut comm, mut dist): (f64, f64) = (0.0, 0.0);
    for _ in 0..50 {
        let dil = StinespringDilation::new(energy_conserving_unitary(&mut r), tau.clone()).map_err(e2s)?;
        let rep = thermal_reverse_check(&dil, &spec, &spec, &tol()).map_err(e2s)?;
        comm = comm.max(rep.commutator_norm);
        dist = dist.max(rep.choi_distance);
    }
    ensure(comm <= 1e-10 && dist <= 1e-9, || {
        format!("commutator {comm:e}, distance {dist:e}")
    })?;
    Ok(format!("max commutator {comm:.2e}, max Choi distance {dist:.2e}"))
}

fn c12(ledger: &Ledger) -> Outcome {
    let products: Vec<&PPReport> = ledger.reports.iter().filter(|r| r.is_product).collect();
    let worst = products
        .iter()
        .map(|r| {
            r.spectra
                .swapped_distance
                .map_or(r.spectra.direct_distance, |s| s.min(r.spectra.direct_distance))
        })
        .fold(0.0, f64::max);
    ensure(!products.is_empty() && worst <= 1e-9, || {
        format!("spectra distance {worst:e}")
    })?;
    Ok(format!(
        "{} product reports, max spectrum distance {worst:.2e}",
        products.len()
    ))
}

fn c13() -> Outcome {
    let mut r = rng(13);
    let u = haar_unitary(4, &mut r);
    let beta = random_ket(2, &mut r);
    let s = solve_pure_pp(&u, &beta, &tol()).map_err(e2s)?;
    let pure = |v: &[C64]| DensityOperator::pure(v).map_err(e2s);
    let rep = conventions_compare_two_qubit(&u, &pure(&s.alpha)?, &pure(&beta)?, &tol()).map_err(e2s)?;
    let min = rep
        .dist_pseudo_neighbourhood
        .min(rep.dist_pseudo_naive)
        .min(rep.dist_neighbourhood_naive);
    ensure(rep.u_block[(2, 1)].norm() > 1e-3 && min > 1e-3, || {
        format!("min pairwise distance {min:e}")
    })?;

    let cz = UnitaryOperator::new(ComplexMatrix::diag_real(&[1.0, 1.0, 1.0, -1.0]), &tol()).map_err(e2s)?;
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let plus = [c(h, 0.0), c(h, 0.0)];
    let block = conventions_compare_two_qubit(&cz, &pure(&basis_vec(2, 0))?, &pure(&plus)?, &tol()).map_err(e2s)?;
    ensure(
        block.u_block[(2, 1)].norm() < 1e-12 && block.u_block[(1, 2)].norm() < 1e-12,
        || "fixture lacks block structure".into(),
    )?;
    ensure(block.dist_neighbourhood_naive <= 1e-10, || {
        format!("conventions 2, 3 differ by {:e}", block.dist_neighbourhood_naive)
    })?;
    let ann = block
        .pseudoinverse
        .on_minus
        .max_abs()
        .max(rep.pseudoinverse.on_minus.max_abs());
    ensure(ann <= 1e-10, || format!("pseudoinverse leaves {ann:e} on |a'-><a'-|"))?;
    Ok(format!("generic min pairwise distance {min:.3e}"))
}

fn c14() -> Outcome {
    let mut r = rng(14);
    let phases: Vec<Vec<f64>> = (0..3)
        .map(|_| (0..3).map(|_| r.random_range(0.0..2.0 * PI)).collect())
        .collect();
    let psi = haar_unitary(3, &mut r);
    let a = ProbabilityVector::new(vec![0.5, 0.3, 0.2], &tol()).map_err(e2s)?;
    let b = ProbabilityVector::new(vec![0.45, 0.35, 0.2], &tol()).map_err(e2s)?;
    let ch = make_n_steady_channel(3, &[1, 2, 0], &phases, &psi, &a, &b, &tol()).map_err(e2s)?;
    let rep = check_trc(&ch.dilation, &ch.priors[0], 4, &tol()).map_err(e2s)?;
    let worst = rep.residuals.iter().copied().fold(0.0, f64::max);
    ensure(rep.is_composable && rep.residuals.len() == 4 && worst <= 1e-8, || {
        format!("N-steady residuals {:?}", rep.residuals)
    })?;

    let swap = UnitaryOperator::new(swap_operator(2), &tol()).map_err(e2s)?;
    let dil = StinespringDilation::new(swap, random_density(2, &mut r)).map_err(e2s)?;
    let e = dil.channel(&tol()).map_err(e2s)?;
    ensure(e.compose(&e).map_err(e2s)?.dist(&e) < 1e-12, || {
        "swap channel not idempotent".into()
    })?;
    let srep = check_trc(&dil, &random_density(2, &mut r), 4, &tol()).map_err(e2s)?;
    let sworst = srep.residuals.iter().copied().fold(0.0, f64::max);
    ensure(srep.is_composable && sworst <= 1e-8, || {
        format!("swap residuals {:?}", srep.residuals)
    })?;
    Ok(format!(
        "N-steady max residual {worst:.2e}, swap max residual {sworst:.2e}"
    ))
}

fn main() {
    let start = Instant::now();
    let mut ledger = Ledger::default();
    let mut gg_unitaries = Vec::new();
    let results: Vec<(usize, Outcome)> = vec![
        (1, c1()),
        (2, c2()),
        (3, c3()),
        (4, c4()),
        (5, c5(&mut gg_unitaries)),
        (6, c6(&gg_unitaries, &mut ledger)),
        (7, c7()),
        (8, c8(&gg_unitaries, &mut ledger)),
        (9, c9(&mut ledger)),
        (10, c10()),
        (11, c11()),
        (13, c13()),
        (14, c14()),
    ];
    let mut results = results;
    results.push((12, c12(&ledger)));
    results.sort_by_key(|(k, _)| *k);
    let mut failed = 0;
    for (k, outcome) in &results {
        match outcome {
            Ok(detail) => println!("criterion {k:>2}: PASS  {detail}"),
            Err(why) => {
                failed += 1;
                println!("criterion {k:>2}: FAIL  {why}");
            }
        }
    }
    println!(
        "{} passed, {failed} failed in {:.1?}",
        results.len() - failed,
        start.elapsed()
    );
    if failed > 0 {
        std::process::exit(1);
    }
}
