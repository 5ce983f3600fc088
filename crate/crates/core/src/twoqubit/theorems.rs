use rand::Rng;
use serde::Serialize;

use super::gg::{gg_nullspace_oracle, local_sum_residual, outgoing_local_terms, GGTuple};
use super::pure_pp::split_product_ket;
use crate::error::{Error, Result};
use crate::linalg::{
    c, inner, kron_vec, logm, normalize, pauli_x, pauli_y, pauli_z, ComplexMatrix, DensityOperator, HermitianOperator,
    UnitaryOperator, C64,
};
use crate::reversibility::check_pp;
use crate::sample;
use crate::tolerance::Tolerances;

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct SpectraReport {
    pub preserved: bool,
    pub swapped: bool,
    pub direct_distance: f64,
    pub swapped_distance: Option<f64>,
}

fn spectrum_distance(x: &DensityOperator, y: &DensityOperator) -> Result<f64> {
    if x.dim() != y.dim() {
        return Ok(f64::INFINITY);
    }
    let (sx, sy) = (x.spectrum()?, y.spectrum()?);
    Ok(sx.iter().zip(&sy).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max))
}

/// Compares sorted spectra of (alpha, alpha') and (beta, beta'), and the crossed
/// pairing when the two sides have equal dimension.
pub fn check_spectra_preservation(
    alpha: &DensityOperator,
    beta: &DensityOperator,
    alpha_out: &DensityOperator,
    beta_out: &DensityOperator,
) -> Result<SpectraReport> {
    const TOL: f64 = 1e-9;
    let direct = spectrum_distance(alpha, alpha_out)?.max(spectrum_distance(beta, beta_out)?);
    let crossed = if alpha.dim() == beta.dim() && alpha_out.dim() == beta_out.dim() {
        Some(spectrum_distance(alpha, beta_out)?.max(spectrum_distance(beta, alpha_out)?))
    } else {
        None
    };
    let direct_ok = direct <= TOL;
    let crossed_ok = crossed.is_some_and(|d| d <= TOL);
    Ok(SpectraReport {
        preserved: direct_ok || crossed_ok,
        swapped: !direct_ok && crossed_ok,
        direct_distance: direct,
        swapped_distance: crossed,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum PairConstruction {
    /// Eigenprojector construction on the input and output pairs.
    Projectors,
    /// The output pairs share a factor; Hamiltonians taken from the nullspace oracle.
    Oracle,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct OrthogonalPairsGG {
    pub is_gg: bool,
    pub construction: PairConstruction,
    pub theta: Option<f64>,
    pub omega: (f64, f64),
    pub tuple: Option<GGTuple>,
    pub residual: f64,
}

fn projector_difference(plus: &[C64], minus: &[C64], w: f64) -> HermitianOperator {
    let p = ComplexMatrix::outer(plus, plus);
    let m = ComplexMatrix::outer(minus, minus);
    HermitianOperator::hermitian_part(&(&p - &m).scale_real(w))
}

/// Generalized-thermal Hamiltonians for a unitary that maps two orthogonal product
/// pairs to product states.
pub fn gg_from_orthogonal_pairs(
    u: &UnitaryOperator,
    plus: (&[C64], &[C64]),
    minus: (&[C64], &[C64]),
    tol: &Tolerances,
) -> Result<OrthogonalPairsGG> {
    if u.dim() != 4 {
        return Err(Error::mismatch("two-qubit unitary", 4, u.dim()));
    }
    for v in [plus.0, plus.1, minus.0, minus.1] {
        if v.len() != 2 {
            return Err(Error::mismatch("qubit ket", 2, v.len()));
        }
    }
    let (ap, bp) = (normalize(plus.0), normalize(plus.1));
    let (am, bm) = (normalize(minus.0), normalize(minus.1));
    let overlap = inner(&ap, &am).norm().max(inner(&bp, &bm).norm());
    if overlap > 1e-10 {
        return Err(Error::NotOrthogonal { overlap });
    }
    let out_p = u.matrix().mul_vec(&kron_vec(&ap, &bp));
    let out_m = u.matrix().mul_vec(&kron_vec(&am, &bm));
    let (xp, yp) = split_product_ket(&out_p);
    let (xm, ym) = split_product_ket(&out_m);
    let residual = product_ket_residual(&out_p, &xp, &yp).max(product_ket_residual(&out_m, &xm, &ym));
    if residual > tol.product {
        return Err(Error::NotProductPreserving { residual });
    }

    let out_orth = inner(&xp, &xm).norm() <= 1e-8 && inner(&yp, &ym).norm() <= 1e-8;
    if !out_orth {
        return oracle_fallback(u);
    }
    let ins = [
        kron_vec(&ap, &bp),
        kron_vec(&ap, &bm),
        kron_vec(&am, &bp),
        kron_vec(&am, &bm),
    ];
    let outs = [
        kron_vec(&xp, &yp),
        kron_vec(&xp, &ym),
        kron_vec(&xm, &yp),
        kron_vec(&xm, &ym),
    ];
    let elem = |j: usize, k: usize| inner(&outs[j], &u.matrix().mul_vec(&ins[k]));
    let (m11, m12) = (elem(1, 1), elem(1, 2));
    let theta = 2.0 * m12.norm().atan2(m11.norm());
    let trivial = theta <= tol.angle;
    let omega = if trivial { (1.0, 0.5) } else { (1.0, 1.0) };
    let tuple = GGTuple {
        h_a: projector_difference(&ap, &am, omega.0),
        h_b: projector_difference(&bp, &bm, omega.1),
        h_a_out: projector_difference(&xp, &xm, omega.0),
        h_b_out: projector_difference(&yp, &ym, omega.1),
    };
    let residual = tuple.residual(u.matrix())?;
    Ok(OrthogonalPairsGG {
        is_gg: residual <= tol.product,
        construction: PairConstruction::Projectors,
        theta: Some(theta),
        omega,
        tuple: Some(tuple),
        residual,
    })
}

fn oracle_fallback(u: &UnitaryOperator) -> Result<OrthogonalPairsGG> {
    let report = gg_nullspace_oracle(u, 2, 2)?;
    let Some((h_a, h_b)) = report.basis.first() else {
        return Ok(OrthogonalPairsGG {
            is_gg: false,
            construction: PairConstruction::Oracle,
            theta: None,
            omega: (0.0, 0.0),
            tuple: None,
            residual: f64::NAN,
        });
    };
    let (h_a_out, h_b_out) = outgoing_local_terms(u, h_a.matrix(), h_b.matrix())?;
    let tuple = GGTuple {
        h_a: h_a.clone(),
        h_b: h_b.clone(),
        h_a_out,
        h_b_out,
    };
    let residual = tuple.residual(u.matrix())?;
    Ok(OrthogonalPairsGG {
        is_gg: true,
        construction: PairConstruction::Oracle,
        theta: None,
        omega: (1.0, 1.0),
        tuple: Some(tuple),
        residual,
    })
}

fn product_ket_residual(psi: &[C64], x: &[C64], y: &[C64]) -> f64 {
    let prod = kron_vec(x, y);
    psi.iter()
        .zip(&prod)
        .map(|(p, q)| (p - q).norm_sqr())
        .sum::<f64>()
        .sqrt()
}

/// For a tuple `(U, alpha, |beta><beta|)` with full-rank `alpha` that is product
/// preserving, confirms `U` is generalized thermal via the nullspace oracle.
pub fn check_pure_mixed_gg(
    u: &UnitaryOperator,
    alpha: &DensityOperator,
    beta: &DensityOperator,
    tol: &Tolerances,
) -> Result<bool> {
    if u.dim() != 4 || alpha.dim() != 2 || beta.dim() != 2 {
        return Err(Error::mismatch(
            "pure/mixed tuple",
            4,
            u.dim().max(2 * alpha.dim().max(beta.dim())),
        ));
    }
    if !alpha.is_full_rank(tol)? {
        return Err(Error::InvalidState("alpha must be full rank".into()));
    }
    if !beta.is_pure(tol)? {
        return Err(Error::InvalidState("beta must be pure".into()));
    }
    let pp = check_pp(u, alpha, beta, tol)?;
    if !pp.is_product {
        return Err(Error::NotProductPreserving {
            residual: pp.product_residual,
        });
    }
    let report = gg_nullspace_oracle(u, 2, 2)?;
    if report.dim == 0 {
        return Err(Error::Internal(
            "product-preserving pure/mixed tuple but the nullspace oracle finds no Hamiltonians".into(),
        ));
    }
    Ok(true)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MixedSearchReport {
    pub best_residual: f64,
    pub alpha_bloch: [f64; 3],
    pub beta_bloch: [f64; 3],
    pub evaluations: usize,
}

fn bloch_density(r: [f64; 3]) -> ComplexMatrix {
    let (x, y, z) = (pauli_x(), pauli_y(), pauli_z());
    let m = &(&(&ComplexMatrix::identity(2) + &x.scale_real(r[0])) + &y.scale_real(r[1])) + &z.scale_real(r[2]);
    m.scale_real(0.5)
}

fn sphere(theta: f64, phi: f64) -> [f64; 3] {
    [theta.sin() * phi.cos(), theta.sin() * phi.sin(), theta.cos()]
}

fn mixed_residual(u: &UnitaryOperator, r: [f64; 3], theta: f64, phi: f64) -> f64 {
    let alpha = bloch_density(r);
    let beta = bloch_density(sphere(theta, phi));
    let omega = u.conjugate(&crate::linalg::kron(&alpha, &beta).expect("qubits"));
    let a = crate::linalg::partial_trace(&omega, 2, 2, crate::linalg::Subsystem::A).expect("qubits");
    let b = crate::linalg::partial_trace(&omega, 2, 2, crate::linalg::Subsystem::B).expect("qubits");
    omega.dist(&crate::linalg::kron(&a, &b).expect("qubits"))
}

fn clamp_ball(r: [f64; 3], radius: f64) -> [f64; 3] {
    let n = (r[0] * r[0] + r[1] * r[1] + r[2] * r[2]).sqrt();
    if n > radius {
        r.map(|x| x * radius / n)
    } else {
        r
    }
}

/// Smallest product residual of `U(alpha (x) |beta><beta|)U^dagger` over mixed
/// `alpha` with Bloch radius at most `max_radius` and pure `beta`: a Fibonacci grid
/// followed by pattern search from the best grid points and random restarts.
pub fn search_pure_mixed_preservation(u: &UnitaryOperator, max_radius: f64, seed: u64) -> Result<MixedSearchReport> {
    if u.dim() != 4 {
        return Err(Error::mismatch("two-qubit unitary", 4, u.dim()));
    }
    let golden = std::f64::consts::PI * (3.0 - 5f64.sqrt());
    let fib = |n: usize| -> Vec<(f64, f64)> {
        (0..n)
            .map(|k| {
                let z = 1.0 - 2.0 * (k as f64 + 0.5) / n as f64;
                (z.acos(), golden * k as f64)
            })
            .collect()
    };
    let mut alphas = vec![[0.0; 3]];
    for frac in [0.5, 1.0] {
        for (t, p) in fib(40) {
            alphas.push(sphere(t, p).map(|x| x * frac * max_radius));
        }
    }
    let betas = fib(150);
    let mut evals = 0usize;
    let mut seeds: Vec<(f64, [f64; 3], f64, f64)> = Vec::new();
    for a in &alphas {
        for &(t, p) in &betas {
            evals += 1;
            seeds.push((mixed_residual(u, *a, t, p), *a, t, p));
        }
    }
    seeds.sort_by(|x, y| x.0.total_cmp(&y.0));
    seeds.truncate(6);
    let mut rng = sample::rng(seed);
    for _ in 0..6 {
        let r = clamp_ball(
            [
                rng.random_range(-1.0..1.0),
                rng.random_range(-1.0..1.0),
                rng.random_range(-1.0..1.0),
            ],
            max_radius,
        );
        let (t, p) = (
            rng.random_range(0.0..std::f64::consts::PI),
            rng.random_range(0.0..std::f64::consts::TAU),
        );
        evals += 1;
        seeds.push((mixed_residual(u, r, t, p), r, t, p));
    }
    let mut best = seeds[0];
    for s in seeds {
        let (mut f, mut x) = (s.0, [s.1[0], s.1[1], s.1[2], s.2, s.3]);
        let mut step = 0.1;
        while step > 1e-7 {
            let mut improved = false;
            for i in 0..5 {
                for dir in [1.0, -1.0] {
                    let mut y = x;
                    y[i] += dir * step;
                    let r = clamp_ball([y[0], y[1], y[2]], max_radius);
                    let (y0, y1, y2) = (r[0], r[1], r[2]);
                    let y = [y0, y1, y2, y[3], y[4]];
                    evals += 1;
                    let fy = mixed_residual(u, [y[0], y[1], y[2]], y[3], y[4]);
                    if fy < f {
                        f = fy;
                        x = y;
                        improved = true;
                    }
                }
            }
            if !improved {
                step *= 0.5;
            }
        }
        if f < best.0 {
            best = (f, [x[0], x[1], x[2]], x[3], x[4]);
        }
    }
    Ok(MixedSearchReport {
        best_residual: best.0,
        alpha_bloch: best.1,
        beta_bloch: sphere(best.2, best.3),
        evaluations: evals,
    })
}

/// Hamiltonians `-ln alpha`, `-ln beta` (and their images) for a full-rank
/// product-preserving tuple; `None` when the output is not a product.
pub fn gg_theorem1_bridge(
    u: &UnitaryOperator,
    alpha: &DensityOperator,
    beta: &DensityOperator,
    tol: &Tolerances,
) -> Result<Option<GGTuple>> {
    for s in [alpha, beta] {
        let spec = s.spectrum()?;
        if spec[0] <= tol.rank {
            return Err(Error::RankDeficient {
                min_eigenvalue: spec[0],
            });
        }
    }
    let pp = check_pp(u, alpha, beta, tol)?;
    if !pp.is_product {
        return Ok(None);
    }
    let neg_log = |m: &ComplexMatrix| -> Result<HermitianOperator> {
        Ok(HermitianOperator::hermitian_part(&logm(m, tol)?.scale_real(-1.0)))
    };
    let tuple = GGTuple {
        h_a: neg_log(alpha.matrix())?,
        h_b: neg_log(beta.matrix())?,
        h_a_out: neg_log(pp.alpha_out.matrix())?,
        h_b_out: neg_log(pp.beta_out.matrix())?,
    };
    let residual = local_sum_residual(
        u.matrix(),
        tuple.h_a.matrix(),
        tuple.h_b.matrix(),
        tuple.h_a_out.matrix(),
        tuple.h_b_out.matrix(),
    )?;
    // ln amplifies the product residual by roughly 1/lambda_min.
    let lambda_min = pp.alpha_out.spectrum()?[0].min(pp.beta_out.spectrum()?[0]);
    if residual > tol.product.max(10.0 * pp.product_residual / lambda_min) {
        return Err(Error::Internal(format!(
            "logarithms of a product-preserving tuple violate the local-sum identity (residual {residual:.2e})"
        )));
    }
    Ok(Some(tuple))
}

/// The two-qubit unitary that fixes |00> yet is far from generalized thermal.
pub fn fixed_product_non_gg_unitary() -> UnitaryOperator {
    let w = C64::from_polar(1.0, 2.0 * std::f64::consts::PI / 3.0);
    let s = 1.0 / 3f64.sqrt();
    let one = c(s, 0.0);
    let z = c(0.0, 0.0);
    // Columns are the images of |00>, |01>, |10>, |11>.
    let cols = [
        vec![c(1.0, 0.0), z, z, z],
        vec![z, w * s, w.conj() * s, one],
        vec![z, w.conj() * s, w * s, one],
        vec![z, one, one, one],
    ];
    let m = ComplexMatrix::from_fn(4, 4, |i, j| cols[j][i]);
    UnitaryOperator::new(m, &Tolerances::default()).expect("unitary by construction")
}
