use crate::channel::StinespringDilation;
use crate::classical::ProbabilityVector;
use crate::error::{Error, Result};
use crate::linalg::{basis_vec, kron, ComplexMatrix, DensityOperator, UnitaryOperator, C64};
use crate::tolerance::Tolerances;

#[derive(Clone, Debug, PartialEq)]
pub struct NSteadyChannel {
    pub dilation: StinespringDilation,
    /// `alpha_n = sum_k a_k |sigma^n(k)><sigma^n(k)|`, for n = 0..N.
    pub priors: Vec<DensityOperator>,
    pub beta_prime: DensityOperator,
    /// Largest `|| U(alpha_n (x) beta)U^dagger - alpha_{n+1} (x) beta' ||_F`.
    pub residual: f64,
}

fn permutation_order(sigma: &[usize]) -> usize {
    let mut p: Vec<usize> = (0..sigma.len()).collect();
    for n in 1..=sigma.len().max(1) * sigma.len().max(1) {
        p = p.iter().map(|&i| sigma[i]).collect();
        if p.iter().enumerate().all(|(i, &j)| i == j) {
            return n;
        }
    }
    usize::MAX
}

/// Dilation `U = sum_k u_k (x) |psi_k><k|` with `u_k = sum_j e^{i phi_j^(k)} |sigma(j)><j|`,
/// ancilla `sum_k b_k |k><k|`, and the N priors it cycles through.
pub fn make_n_steady_channel(
    n: usize,
    sigma: &[usize],
    phases: &[Vec<f64>],
    psi_basis: &UnitaryOperator,
    a: &ProbabilityVector,
    b: &ProbabilityVector,
    tol: &Tolerances,
) -> Result<NSteadyChannel> {
    let d_a = sigma.len();
    let d_b = psi_basis.dim();
    if a.dim() != d_a {
        return Err(Error::mismatch("system weights", d_a, a.dim()));
    }
    if b.dim() != d_b {
        return Err(Error::mismatch("ancilla weights", d_b, b.dim()));
    }
    if phases.len() != d_b || phases.iter().any(|row| row.len() != d_a) {
        return Err(Error::InvalidArgument(format!("phase table must be {d_b} x {d_a}")));
    }
    let mut seen = vec![false; d_a];
    for &s in sigma {
        if s >= d_a || std::mem::replace(&mut seen[s], true) {
            return Err(Error::InvalidArgument("sigma is not a permutation".into()));
        }
    }
    let order = permutation_order(sigma);
    if order != n {
        return Err(Error::InvalidArgument(format!("sigma has order {order}, expected {n}")));
    }
    let mut sorted = a.probs().to_vec();
    sorted.sort_by(|x, y| y.total_cmp(x));
    if sorted.windows(2).any(|w| w[0] - w[1] <= tol.equality) {
        return Err(Error::InvalidArgument("system weights must be nondegenerate".into()));
    }
    // u_k^dagger u_k' is diagonal with entries e^{i(phi^(k') - phi^(k))}; it is a
    // multiple of the identity exactly when those differences agree.
    for k in 0..d_b {
        for kp in k + 1..d_b {
            let diffs: Vec<C64> = (0..d_a)
                .map(|j| C64::from_polar(1.0, phases[kp][j] - phases[k][j]))
                .collect();
            if diffs.iter().all(|z| (z - diffs[0]).norm() <= tol.equality) {
                return Err(Error::InvalidArgument(format!(
                    "u_{k} and u_{kp} differ by a global phase; the channel would be unitary"
                )));
            }
        }
    }

    let mut u = ComplexMatrix::zeros(d_a * d_b, d_a * d_b);
    for k in 0..d_b {
        let uk = ComplexMatrix::from_fn(d_a, d_a, |i, j| {
            if i == sigma[j] {
                C64::from_polar(1.0, phases[k][j])
            } else {
                C64::new(0.0, 0.0)
            }
        });
        let psi = psi_basis.matrix().column(k);
        let e_k = basis_vec(d_b, k);
        u = &u + &kron(&uk, &ComplexMatrix::outer(&psi, &e_k))?;
    }
    let u = UnitaryOperator::new(u, tol)?;
    let beta = DensityOperator::diagonal(b.probs(), tol)?;
    let beta_prime = {
        let mut m = ComplexMatrix::zeros(d_b, d_b);
        for k in 0..d_b {
            let psi = psi_basis.matrix().column(k);
            m = &m + &ComplexMatrix::outer(&psi, &psi).scale_real(b.probs()[k]);
        }
        DensityOperator::from_computed(&m, tol)?
    };
    let mut priors = Vec::with_capacity(n);
    let mut perm: Vec<usize> = (0..d_a).collect();
    for _ in 0..n {
        let mut diag = vec![0.0; d_a];
        for k in 0..d_a {
            diag[perm[k]] = a.probs()[k];
        }
        priors.push(DensityOperator::diagonal(&diag, tol)?);
        perm = perm.iter().map(|&i| sigma[i]).collect();
    }
    let mut residual: f64 = 0.0;
    for i in 0..n {
        let out = u.conjugate(&kron(priors[i].matrix(), beta.matrix())?);
        let expect = kron(priors[(i + 1) % n].matrix(), beta_prime.matrix())?;
        residual = residual.max(out.dist(&expect));
    }
    if residual > 1e-10 {
        return Err(Error::Internal(format!(
            "N-steady condition violated (residual {residual:.2e})"
        )));
    }
    Ok(NSteadyChannel {
        dilation: StinespringDilation::new(u, beta)?,
        priors,
        beta_prime,
        residual,
    })
}

/// Qutrit system cycling through three priors, with seeded phases and ancilla basis.
pub fn qutrit_cycle(seed: u64, tol: &Tolerances) -> Result<NSteadyChannel> {
    use rand::Rng;
    let mut r = crate::sample::rng(seed);
    let phases: Vec<Vec<f64>> = (0..3)
        .map(|_| (0..3).map(|_| r.random_range(0.0..std::f64::consts::TAU)).collect())
        .collect();
    let psi = crate::sample::haar_unitary(3, &mut r);
    let a = ProbabilityVector::new(vec![0.5, 0.3, 0.2], tol)?;
    let b = ProbabilityVector::new(vec![0.45, 0.35, 0.2], tol)?;
    make_n_steady_channel(3, &[1, 2, 0], &phases, &psi, &a, &b, tol)
}
