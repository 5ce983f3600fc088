use std::path::Path;

use serde::Deserialize;
use serde_json::{json, Value};

use crate::report::{domain, load, to_value, Failure, Outcome, Summary};
use crate::{Command, GlobalOpts};
use retrodict::channel::{adjoint, conventions_compare_two_qubit, gibbs_state, petz, petz_via_dilation, GibbsSpec};
use retrodict::channel::{QuantumChannel, StinespringDilation};
use retrodict::classical::{bayes_invert, retro_via_dilation, ClassicalDilation, ProbabilityVector, StochasticMatrix};
use retrodict::io::{ket_matrix, FromJson};
use retrodict::reversibility::{check_pp, check_tr, check_trc, make_n_steady_channel, qutrit_cycle, NSteadyChannel};
use retrodict::twoqubit::{cartan_decompose, classify_gg, gg_nullspace_oracle, solve_pure_pp};
use retrodict::{DensityOperator, Error, Tolerances, UnitaryOperator, C64};

pub fn run(cmd: &Command, opts: &GlobalOpts, tol: &Tolerances) -> Outcome {
    match cmd {
        Command::RetroClassical { channel, prior } => retro_classical(channel, prior, tol),
        Command::RetroViaDilation { dilation, prior } => retro_dilated(dilation, prior, tol),
        Command::Petz { channel, prior } => {
            let e: QuantumChannel = load(channel, tol)?;
            let alpha: DensityOperator = load(prior, tol)?;
            let recovery = domain(petz(&e, &alpha, tol))?;
            let out = domain(e.apply_state(&alpha, tol))?;
            let mut s = Summary::default();
            s.kv("dimensions", format!("{} -> {}", recovery.d_in(), recovery.d_out()));
            s.kv("prior recovered within", recovery_error(&recovery, &out, &alpha));
            s.finish(json!({ "recovery": to_value(&recovery), "propagated_prior": to_value(&out) }))
        }
        Command::PetzDilated { dilation, prior } => {
            let dil: StinespringDilation = load(dilation, tol)?;
            let alpha: DensityOperator = load(prior, tol)?;
            let recovery = domain(petz_via_dilation(&dil, &alpha, tol))?;
            let direct = domain(dil.channel(tol).and_then(|e| petz(&e, &alpha, tol)))?;
            let dist = recovery.dist(&direct);
            let mut s = Summary::default();
            s.kv("Choi distance to petz", fmt(dist));
            s.finish(json!({ "recovery": to_value(&recovery), "distance_to_petz": dist }))
        }
        Command::Adjoint { channel } => {
            let e: QuantumChannel = load(channel, tol)?;
            let adj = adjoint(&e);
            let mut s = Summary::default();
            s.kv("unital deviation", fmt(adj.unital_deviation()));
            s.kv("trace deviation", fmt(adj.tp_deviation()));
            s.finish(json!({
                "adjoint": to_value(&adj),
                "unital_deviation": adj.unital_deviation(),
                "trace_deviation": adj.tp_deviation(),
            }))
        }
        Command::Gibbs { spec } => {
            let spec: GibbsSpec = load(spec, tol)?;
            let state = domain(gibbs_state(&spec, tol))?;
            let mut s = Summary::default();
            s.kv("populations", fmt_list(&domain(state.spectrum())?));
            s.finish(json!({ "state": to_value(&state) }))
        }
        Command::Cartan { unitary } => {
            let u: UnitaryOperator = load(unitary, tol)?;
            let form = domain(cartan_decompose(&u, tol))?;
            let err = form.reconstruction_error(u.matrix());
            let mut s = Summary::default();
            s.kv("interaction angles", fmt_list(&form.t));
            s.kv("reconstruction error", fmt(err));
            s.finish(json!({ "cartan": to_value(&form), "reconstruction_error": err }))
        }
        Command::ClassifyGg { unitary } => {
            let u: UnitaryOperator = load(unitary, tol)?;
            let g = domain(classify_gg(&u, tol))?;
            let mut s = Summary::default();
            s.kv("generalized thermal", g.is_gg);
            s.kv("case", serde_json::to_string(&g.family.case).unwrap_or_default());
            s.kv("family dimension", g.family.basis.len());
            s.kv("oracle dimension", g.oracle_dim);
            s.kv("oracle agrees", g.oracle_agrees);
            s.finish(to_value(&g))
        }
        Command::GgOracle { unitary, d_a, d_b } => {
            let u: UnitaryOperator = load(unitary, tol)?;
            let rep = domain(gg_nullspace_oracle(&u, *d_a, *d_b))?;
            let mut s = Summary::default();
            s.kv("nullspace dimension", rep.dim);
            s.finish(to_value(&rep))
        }
        Command::SolvePpPure { unitary, beta } => {
            let u: UnitaryOperator = load(unitary, tol)?;
            let b: Vec<C64> = load(beta, tol)?;
            let sol = domain(solve_pure_pp(&u, &b, tol))?;
            let mut s = Summary::default();
            s.kv("branch", format!("{:?}", sol.branch));
            s.kv("output entanglement", fmt(sol.entanglement));
            s.finish(json!({
                "solution": to_value(&sol),
                "alpha": to_value(&ket_matrix(&sol.alpha)),
                "alpha_out": to_value(&ket_matrix(&sol.alpha_out)),
                "beta_out": to_value(&ket_matrix(&sol.beta_out)),
            }))
        }
        Command::CheckPp { unitary, alpha, beta } => {
            let u: UnitaryOperator = load(unitary, tol)?;
            let a: DensityOperator = load(alpha, tol)?;
            let b: DensityOperator = load(beta, tol)?;
            let rep = domain(check_pp(&u, &a, &b, tol))?;
            let mut s = Summary::default();
            s.kv("product preserving", rep.is_product);
            s.kv("product residual", fmt(rep.product_residual));
            s.kv("spectra preserved", rep.spectra.preserved);
            s.finish(to_value(&rep))
        }
        Command::CheckTr { dilation, prior } => {
            let dil: StinespringDilation = load(dilation, tol)?;
            let alpha: DensityOperator = load(prior, tol)?;
            let cert = domain(check_tr(&dil, &alpha, tol))?;
            let mut s = Summary::default();
            s.kv("status", to_value(&cert.status).as_str().unwrap_or_default());
            s.kv("residual", fmt(cert.residual));
            s.kv("solution family dimension", cert.family_dim);
            s.finish(to_value(&cert))
        }
        Command::CheckTrc { dilation, prior, max_l } => {
            let dil: StinespringDilation = load(dilation, tol)?;
            let alpha: DensityOperator = load(prior, tol)?;
            let rep = domain(check_trc(&dil, &alpha, *max_l, tol))?;
            let mut s = Summary::default();
            s.kv("status", to_value(&rep.status).as_str().unwrap_or_default());
            s.kv("composable", rep.is_composable);
            s.kv("residuals", fmt_list_sci(&rep.residuals));
            s.finish(to_value(&rep))
        }
        Command::MakeNsteady { spec } => {
            let ch = match spec {
                Some(path) => {
                    let spec: NSteadySpec = load(path, tol)?;
                    spec.build(tol)?
                }
                None => domain(qutrit_cycle(opts.seed, tol))?,
            };
            let mut s = Summary::default();
            s.kv("cycle length", ch.priors.len());
            s.kv("construction residual", fmt(ch.residual));
            s.finish(to_value(&ch))
        }
        Command::ConventionsCompare { unitary, alpha, beta } => {
            let u: UnitaryOperator = load(unitary, tol)?;
            let a: DensityOperator = load(alpha, tol)?;
            let b: DensityOperator = load(beta, tol)?;
            let rep = domain(conventions_compare_two_qubit(&u, &a, &b, tol))?;
            let mut s = Summary::default();
            s.kv("pseudoinverse vs neighbourhood", fmt(rep.dist_pseudo_neighbourhood));
            s.kv("pseudoinverse vs naive", fmt(rep.dist_pseudo_naive));
            s.kv("neighbourhood vs naive", fmt(rep.dist_neighbourhood_naive));
            s.kv("2 and 3 agree (predicted)", rep.naive_agrees_predicted);
            s.finish(to_value(&rep))
        }
        Command::Demo { .. } => unreachable!("dispatched separately"),
    }
}

fn retro_classical(channel: &Path, prior: &Path, tol: &Tolerances) -> Outcome {
    let phi: StochasticMatrix = load(channel, tol)?;
    let gamma: ProbabilityVector = load(prior, tol)?;
    let hat = domain(bayes_invert(&phi, &gamma, tol))?;
    let out = domain(phi.apply(&gamma))?;
    let mut s = Summary::default();
    s.kv("propagated prior", fmt_list(out.probs()));
    for j in 0..hat.d_out() {
        let row: Vec<f64> = (0..hat.d_in()).map(|i| hat.get(j, i)).collect();
        s.kv(&format!("retrodiction row {j}"), fmt_list(&row));
    }
    s.finish(json!({ "retrodiction": to_value(&hat), "propagated_prior": to_value(&out) }))
}

fn retro_dilated(dilation: &Path, prior: &Path, tol: &Tolerances) -> Outcome {
    let dil: ClassicalDilation = load(dilation, tol)?;
    let gamma: ProbabilityVector = load(prior, tol)?;
    let via = domain(retro_via_dilation(&dil, &gamma, tol))?;
    let direct = domain(bayes_invert(&dil.marginal_channel(), &gamma, tol))?;
    let diff = via.max_abs_diff(&direct);
    let mut s = Summary::default();
    s.kv("distance to bayes_invert", fmt(diff));
    s.finish(json!({ "retrodiction": to_value(&via), "direct": to_value(&direct), "max_abs_diff": diff }))
}

fn recovery_error(recovery: &QuantumChannel, out: &DensityOperator, alpha: &DensityOperator) -> String {
    recovery
        .apply(out.matrix())
        .map(|m| fmt(m.max_abs_diff(alpha.matrix())))
        .unwrap_or_else(|e| e.to_string())
}

#[derive(Deserialize)]
struct NSteadySpecWire {
    n: usize,
    sigma: Vec<usize>,
    phases: Vec<Vec<f64>>,
    psi: Value,
    a: Vec<f64>,
    b: Vec<f64>,
}

/// `{"n", "sigma", "phases" (d_B rows of d_A), "psi": unitary, "a", "b"}`
struct NSteadySpec {
    n: usize,
    sigma: Vec<usize>,
    phases: Vec<Vec<f64>>,
    psi: UnitaryOperator,
    a: ProbabilityVector,
    b: ProbabilityVector,
}

impl FromJson for NSteadySpec {
    fn from_json(v: &Value, tol: &Tolerances) -> retrodict::Result<Self> {
        let w = NSteadySpecWire::deserialize(v).map_err(|e| Error::Parse(e.to_string()))?;
        Ok(NSteadySpec {
            n: w.n,
            sigma: w.sigma,
            phases: w.phases,
            psi: UnitaryOperator::from_json(&w.psi, tol)?,
            a: ProbabilityVector::new(w.a, tol)?,
            b: ProbabilityVector::new(w.b, tol)?,
        })
    }
}

impl NSteadySpec {
    fn build(&self, tol: &Tolerances) -> Result<NSteadyChannel, Failure> {
        domain(make_n_steady_channel(
            self.n,
            &self.sigma,
            &self.phases,
            &self.psi,
            &self.a,
            &self.b,
            tol,
        ))
    }
}

pub fn fmt(x: f64) -> String {
    format!("{x:.6e}")
}

pub fn fmt_list(xs: &[f64]) -> String {
    let parts: Vec<String> = xs.iter().map(|x| format!("{x:.6}")).collect();
    format!("[{}]", parts.join(", "))
}

pub fn fmt_list_sci(xs: &[f64]) -> String {
    let parts: Vec<String> = xs.iter().map(|x| format!("{x:.2e}")).collect();
    format!("[{}]", parts.join(", "))
}
