//! Classical stochastic maps, Bayes inversion, dilations and assignment maps.

use crate::error::{Error, Result};
use crate::tolerance::Tolerances;

#[derive(Clone, Debug, PartialEq)]
pub struct ProbabilityVector {
    probs: Vec<f64>,
    bipartition: Option<(usize, usize)>,
}

impl ProbabilityVector {
    /// Clips entries in `[-1e-12, 0)` to zero and renormalizes; rejects anything worse.
    pub fn new(probs: Vec<f64>, tol: &Tolerances) -> Result<Self> {
        if probs.is_empty() {
            return Err(Error::InvalidState("empty probability vector".into()));
        }
        if probs.iter().any(|p| !p.is_finite()) {
            return Err(Error::NonFinite("probability vector".into()));
        }
        if let Some(p) = probs.iter().find(|&&p| p < -tol.probability) {
            return Err(Error::InvalidState(format!("negative probability {p}")));
        }
        let clipped: Vec<f64> = probs.iter().map(|&p| p.max(0.0)).collect();
        let sum: f64 = clipped.iter().sum();
        if (sum - 1.0).abs() > tol.equality {
            return Err(Error::InvalidState(format!("probabilities sum to {sum}")));
        }
        Ok(ProbabilityVector {
            probs: clipped.iter().map(|p| p / sum).collect(),
            bipartition: None,
        })
    }

    pub fn uniform(d: usize) -> Self {
        ProbabilityVector {
            probs: vec![1.0 / d as f64; d],
            bipartition: None,
        }
    }

    pub fn with_bipartition(mut self, d_a: usize, d_b: usize) -> Result<Self> {
        if d_a * d_b != self.dim() {
            return Err(Error::mismatch("bipartition", self.dim(), d_a * d_b));
        }
        self.bipartition = Some((d_a, d_b));
        Ok(self)
    }

    pub fn dim(&self) -> usize {
        self.probs.len()
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn bipartition(&self) -> Option<(usize, usize)> {
        self.bipartition
    }

    pub fn tensor(&self, other: &ProbabilityVector) -> ProbabilityVector {
        let mut probs = Vec::with_capacity(self.dim() * other.dim());
        for a in &self.probs {
            for b in &other.probs {
                probs.push(a * b);
            }
        }
        ProbabilityVector {
            probs,
            bipartition: Some((self.dim(), other.dim())),
        }
    }

    fn split(&self) -> Result<(usize, usize)> {
        self.bipartition
            .ok_or_else(|| Error::InvalidArgument("distribution has no bipartition".into()))
    }

    pub fn marginal_a(&self) -> Result<ProbabilityVector> {
        let (d_a, d_b) = self.split()?;
        Ok(ProbabilityVector {
            probs: (0..d_a)
                .map(|a| self.probs[a * d_b..(a + 1) * d_b].iter().sum())
                .collect(),
            bipartition: None,
        })
    }

    pub fn marginal_b(&self) -> Result<ProbabilityVector> {
        let (d_a, d_b) = self.split()?;
        Ok(ProbabilityVector {
            probs: (0..d_b)
                .map(|b| (0..d_a).map(|a| self.probs[a * d_b + b]).sum())
                .collect(),
            bipartition: None,
        })
    }

    pub fn max_abs_diff(&self, other: &ProbabilityVector) -> f64 {
        if self.dim() != other.dim() {
            return f64::INFINITY;
        }
        self.probs
            .iter()
            .zip(&other.probs)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }
}

/// Column-stochastic matrix; entry `(i, j)` is the probability of output `i` given input `j`.
#[derive(Clone, Debug, PartialEq)]
pub struct StochasticMatrix {
    d_out: usize,
    d_in: usize,
    data: Vec<f64>,
}

impl StochasticMatrix {
    pub fn new(d_out: usize, d_in: usize, data: Vec<f64>, tol: &Tolerances) -> Result<Self> {
        if data.len() != d_out * d_in {
            return Err(Error::mismatch("stochastic matrix data", d_out * d_in, data.len()));
        }
        if data.iter().any(|p| !p.is_finite()) {
            return Err(Error::NonFinite("stochastic matrix".into()));
        }
        if let Some(p) = data
            .iter()
            .find(|&&p| p < -tol.probability || p > 1.0 + tol.probability)
        {
            return Err(Error::NotStochastic(format!("entry {p} outside [0, 1]")));
        }
        let m = StochasticMatrix {
            d_out,
            d_in,
            data: data.iter().map(|p| p.clamp(0.0, 1.0)).collect(),
        };
        for j in 0..d_in {
            let s: f64 = (0..d_out).map(|i| m.get(i, j)).sum();
            if (s - 1.0).abs() > tol.equality {
                return Err(Error::NotStochastic(format!("column {j} sums to {s}")));
            }
        }
        Ok(m)
    }

    pub(crate) fn from_fn(d_out: usize, d_in: usize, f: impl Fn(usize, usize) -> f64) -> Self {
        let mut data = Vec::with_capacity(d_out * d_in);
        for i in 0..d_out {
            for j in 0..d_in {
                data.push(f(i, j));
            }
        }
        StochasticMatrix { d_out, d_in, data }
    }

    pub fn identity(d: usize) -> Self {
        Self::from_fn(d, d, |i, j| if i == j { 1.0 } else { 0.0 })
    }

    /// Deterministic map sending input `j` to output `perm[j]`.
    pub fn permutation(perm: &[usize]) -> Result<Self> {
        let d = perm.len();
        let mut seen = vec![false; d];
        for &p in perm {
            if p >= d || seen[p] {
                return Err(Error::InvalidArgument(format!("{perm:?} is not a permutation")));
            }
            seen[p] = true;
        }
        Ok(Self::from_fn(d, d, |i, j| if perm[j] == i { 1.0 } else { 0.0 }))
    }

    /// Sum over the B index of a joint (a, b) distribution.
    pub fn marginalize_b(d_a: usize, d_b: usize) -> Self {
        Self::from_fn(d_a, d_a * d_b, |a, ab| if ab / d_b == a { 1.0 } else { 0.0 })
    }

    pub fn d_out(&self) -> usize {
        self.d_out
    }

    pub fn d_in(&self) -> usize {
        self.d_in
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.d_in + j]
    }

    pub fn apply(&self, p: &ProbabilityVector) -> Result<ProbabilityVector> {
        if p.dim() != self.d_in {
            return Err(Error::mismatch("stochastic map input", self.d_in, p.dim()));
        }
        Ok(ProbabilityVector {
            probs: (0..self.d_out)
                .map(|i| (0..self.d_in).map(|j| self.get(i, j) * p.probs[j]).sum())
                .collect(),
            bipartition: None,
        })
    }

    /// `self` after `first`, i.e. the matrix product `self * first`.
    pub fn compose(&self, first: &StochasticMatrix) -> Result<StochasticMatrix> {
        if self.d_in != first.d_out {
            return Err(Error::mismatch("stochastic composition", self.d_in, first.d_out));
        }
        Ok(Self::from_fn(self.d_out, first.d_in, |i, j| {
            (0..self.d_in).map(|k| self.get(i, k) * first.get(k, j)).sum()
        }))
    }

    pub fn transpose(&self) -> StochasticMatrix {
        Self::from_fn(self.d_in, self.d_out, |i, j| self.get(j, i))
    }

    pub fn is_permutation(&self) -> bool {
        self.d_in == self.d_out
            && self.data.iter().all(|&p| p == 0.0 || p == 1.0)
            && (0..self.d_out).all(|i| (0..self.d_in).map(|j| self.get(i, j)).sum::<f64>() == 1.0)
    }

    pub fn max_abs_diff(&self, other: &StochasticMatrix) -> f64 {
        if (self.d_out, self.d_in) != (other.d_out, other.d_in) {
            return f64::INFINITY;
        }
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }
}

/// Bayes inversion `D_gamma phi^T D^{-1}_{phi[gamma]}`.
pub fn bayes_invert(phi: &StochasticMatrix, gamma: &ProbabilityVector, tol: &Tolerances) -> Result<StochasticMatrix> {
    let q = phi.apply(gamma)?;
    let zero_states: Vec<usize> = (0..q.dim()).filter(|&i| q.probs[i] <= tol.rank).collect();
    if !zero_states.is_empty() {
        return Err(Error::UndefinedRetrodiction { zero_states });
    }
    Ok(invert_with_output(phi, gamma, &q))
}

fn invert_with_output(phi: &StochasticMatrix, gamma: &ProbabilityVector, q: &ProbabilityVector) -> StochasticMatrix {
    StochasticMatrix::from_fn(phi.d_in, phi.d_out, |j, i| {
        if q.probs[i] > 0.0 {
            gamma.probs[j] * phi.get(i, j) / q.probs[i]
        } else {
            // never reached with positive weight; any distribution keeps the column stochastic
            gamma.probs[j]
        }
    })
}

/// Jeffrey update `p(a) -> p(a) Lambda(b|a)` for a joint reference on A x B.
pub fn assignment_map(lambda: &ProbabilityVector, tol: &Tolerances) -> Result<StochasticMatrix> {
    let (d_a, d_b) = lambda.split()?;
    let mu = lambda.marginal_a()?;
    let zero_states: Vec<usize> = (0..d_a).filter(|&a| mu.probs[a] <= tol.rank).collect();
    if !zero_states.is_empty() {
        return Err(Error::UndefinedRetrodiction { zero_states });
    }
    Ok(StochasticMatrix::from_fn(d_a * d_b, d_a, |ab, a| {
        if ab / d_b == a {
            lambda.probs[ab] / mu.probs[a]
        } else {
            0.0
        }
    }))
}

/// Global map on A x B with an environment state that may depend on the input.
#[derive(Clone, Debug, PartialEq)]
pub struct ClassicalDilation {
    global: StochasticMatrix,
    env: ProbabilityVector,
    env_conditional: Option<StochasticMatrix>,
    d_a: usize,
    d_b: usize,
}

impl ClassicalDilation {
    pub fn new(
        global: StochasticMatrix,
        env: ProbabilityVector,
        env_conditional: Option<StochasticMatrix>,
    ) -> Result<Self> {
        let d_b = env.dim();
        if global.d_in != global.d_out {
            return Err(Error::mismatch("global map (square)", global.d_in, global.d_out));
        }
        if !global.d_in.is_multiple_of(d_b) {
            return Err(Error::mismatch("global map vs environment", d_b, global.d_in));
        }
        let d_a = global.d_in / d_b;
        if let Some(c) = &env_conditional {
            if c.d_out != d_b || c.d_in != d_a {
                return Err(Error::mismatch("conditional environment", d_b * d_a, c.d_out * c.d_in));
            }
        }
        Ok(ClassicalDilation {
            global,
            env,
            env_conditional,
            d_a,
            d_b,
        })
    }

    pub fn global(&self) -> &StochasticMatrix {
        &self.global
    }

    pub fn env(&self) -> &ProbabilityVector {
        &self.env
    }

    pub fn env_conditional(&self) -> Option<&StochasticMatrix> {
        self.env_conditional.as_ref()
    }

    pub fn dims(&self) -> (usize, usize) {
        (self.d_a, self.d_b)
    }

    fn beta(&self, b: usize, a: usize) -> f64 {
        match &self.env_conditional {
            Some(c) => c.get(b, a),
            None => self.env.probs[b],
        }
    }

    /// The map `a -> (a, b)` with `b ~ beta(b|a)`.
    fn attach_env(&self) -> StochasticMatrix {
        let d_b = self.d_b;
        StochasticMatrix::from_fn(self.d_a * d_b, self.d_a, |ab, a| {
            if ab / d_b == a {
                self.beta(ab % d_b, a)
            } else {
                0.0
            }
        })
    }

    /// Reduced channel on A.
    pub fn marginal_channel(&self) -> StochasticMatrix {
        let sigma = StochasticMatrix::marginalize_b(self.d_a, self.d_b);
        sigma
            .compose(&self.global)
            .and_then(|m| m.compose(&self.attach_env()))
            .expect("dimensions fixed at construction")
    }

    /// Joint reference `Gamma(a, b) = gamma(a) beta(b|a)`.
    pub fn joint_reference(&self, gamma: &ProbabilityVector) -> Result<ProbabilityVector> {
        let g = self.attach_env().apply(gamma)?;
        g.with_bipartition(self.d_a, self.d_b)
    }
}

/// Retrodiction assembled from the dilation: marginalize after the Bayes
/// inverse of the global map, fed by the Jeffrey update of `Phi[Gamma]`.
pub fn retro_via_dilation(
    dil: &ClassicalDilation,
    gamma: &ProbabilityVector,
    tol: &Tolerances,
) -> Result<StochasticMatrix> {
    let big_gamma = dil.joint_reference(gamma)?;
    let propagated = dil.global.apply(&big_gamma)?.with_bipartition(dil.d_a, dil.d_b)?;
    let assign = assignment_map(&propagated, tol)?;
    // Zero-probability global outputs carry no weight through the assignment map,
    // so the global inverse only needs to be defined on the support.
    let global_hat = invert_with_output(&dil.global, &big_gamma, &propagated);
    let sigma = StochasticMatrix::marginalize_b(dil.d_a, dil.d_b);
    sigma.compose(&global_hat)?.compose(&assign)
}

/// Stepwise retrodiction of a chain `phis[0]` first, returned as
/// `R[phi_1, gamma] o R[phi_2, phi_1[gamma]] o ...`.
pub fn compose_retro_classical(
    phis: &[StochasticMatrix],
    gamma: &ProbabilityVector,
    tol: &Tolerances,
) -> Result<StochasticMatrix> {
    let (first, rest) = phis
        .split_first()
        .ok_or_else(|| Error::InvalidArgument("empty channel chain".into()))?;
    let mut acc = bayes_invert(first, gamma, tol)?;
    let mut prior = first.apply(gamma)?;
    for phi in rest {
        acc = acc.compose(&bayes_invert(phi, &prior, tol)?)?;
        prior = phi.apply(&prior)?;
    }
    Ok(acc)
}

/// Bayes inversion of the composed chain, the other side of composability.
pub fn retro_of_composition(
    phis: &[StochasticMatrix],
    gamma: &ProbabilityVector,
    tol: &Tolerances,
) -> Result<StochasticMatrix> {
    let (first, rest) = phis
        .split_first()
        .ok_or_else(|| Error::InvalidArgument("empty channel chain".into()))?;
    let mut total = first.clone();
    for phi in rest {
        total = phi.compose(&total)?;
    }
    bayes_invert(&total, gamma, tol)
}

/// Reversed dilation with a replaced environment, `Sigma_B o Phi^T o (. x eta)`,
/// defined for permutation global maps.
pub fn reversed_dilation(dil: &ClassicalDilation, eta: &ProbabilityVector) -> Result<StochasticMatrix> {
    if !dil.global.is_permutation() {
        return Err(Error::InvalidArgument(
            "reversed dilation needs a permutation global map".into(),
        ));
    }
    if eta.dim() != dil.d_b {
        return Err(Error::mismatch("replacement environment", dil.d_b, eta.dim()));
    }
    let d_b = dil.d_b;
    let attach = StochasticMatrix::from_fn(dil.d_a * d_b, dil.d_a, |ab, a| {
        if ab / d_b == a {
            eta.probs[ab % d_b]
        } else {
            0.0
        }
    });
    let sigma = StochasticMatrix::marginalize_b(dil.d_a, d_b);
    sigma.compose(&dil.global.transpose())?.compose(&attach)
}

/// Bit dilation whose global map is the 4-cycle on (a, b) pairs.
pub fn cyclic_bit_dilation(beta0: f64, tol: &Tolerances) -> Result<ClassicalDilation> {
    let global = StochasticMatrix::permutation(&[1, 2, 3, 0])?;
    let env = ProbabilityVector::new(vec![beta0, 1.0 - beta0], tol)?;
    ClassicalDilation::new(global, env, None)
}

/// Distance from the retrodiction to the closest reversed-dilation form of the
/// bit dilation, minimized over the replacement environment.
pub fn distance_to_reversed_forms(dil: &ClassicalDilation, target: &StochasticMatrix) -> Result<(f64, f64)> {
    if dil.d_b != 2 {
        return Err(Error::InvalidArgument("scan implemented for a bit environment".into()));
    }
    let tol = Tolerances::default();
    let dist = |eta0: f64| -> Result<f64> {
        let eta = ProbabilityVector::new(vec![eta0, 1.0 - eta0], &tol)?;
        Ok(reversed_dilation(dil, &eta)?.max_abs_diff(target))
    };
    // The distance is convex in eta0 (max of affine functions): grid then golden section.
    let mut best = (f64::INFINITY, 0.0);
    for k in 0..=200 {
        let e = k as f64 / 200.0;
        let d = dist(e)?;
        if d < best.0 {
            best = (d, e);
        }
    }
    let (mut lo, mut hi) = ((best.1 - 0.005).max(0.0), (best.1 + 0.005).min(1.0));
    let phi = (5f64.sqrt() - 1.0) / 2.0;
    for _ in 0..100 {
        let m1 = hi - phi * (hi - lo);
        let m2 = lo + phi * (hi - lo);
        if dist(m1)? < dist(m2)? {
            hi = m2;
        } else {
            lo = m1;
        }
    }
    let e = 0.5 * (lo + hi);
    let d = dist(e)?;
    Ok(if d < best.0 { (d, e) } else { best })
}
