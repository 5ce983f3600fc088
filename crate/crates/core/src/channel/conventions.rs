use serde::Serialize;

use super::{channel_from_dilation, petz_pseudoinverse, StinespringDilation};
use crate::error::{Error, Result};
use crate::linalg::{inner, kron_vec, vec_norm, ComplexMatrix, DensityOperator, UnitaryOperator, C64};
use crate::tolerance::Tolerances;

/// Orthogonal complement of a qubit ket, `(-conj(v1), conj(v0))`.
pub fn qubit_complement(v: &[C64]) -> Vec<C64> {
    vec![-v[1].conj(), v[0].conj()]
}

/// Splits a bipartite ket as `x (x) y` with `y` normalized; the residual is
/// `||psi - x (x) y||`, zero exactly for product states.
pub fn product_factors(psi: &[C64], d_a: usize, d_b: usize) -> Result<(Vec<C64>, Vec<C64>, f64)> {
    if psi.len() != d_a * d_b {
        return Err(Error::mismatch("bipartite ket", d_a * d_b, psi.len()));
    }
    let row = |a: usize| &psi[a * d_b..(a + 1) * d_b];
    let best = (0..d_a)
        .max_by(|&p, &q| vec_norm(row(p)).total_cmp(&vec_norm(row(q))))
        .expect("non-empty");
    let n = vec_norm(row(best));
    if n == 0.0 {
        return Err(Error::InvalidState("zero ket".into()));
    }
    let y: Vec<C64> = row(best).iter().map(|z| z / n).collect();
    let x: Vec<C64> = (0..d_a).map(|a| inner(&y, row(a))).collect();
    let prod = kron_vec(&x, &y);
    let residual = psi
        .iter()
        .zip(&prod)
        .map(|(p, q)| (p - q).norm_sqr())
        .sum::<f64>()
        .sqrt();
    Ok((x, y, residual))
}

/// Images of `|a'+><a'+|`, `|a'-><a'-|` and `|a'+><a'-|` under one convention.
#[derive(Clone, Debug, Serialize)]
pub struct ActionTable {
    pub on_plus: ComplexMatrix,
    pub on_minus: ComplexMatrix,
    pub on_cross: ComplexMatrix,
}

impl ActionTable {
    pub fn dist(&self, other: &ActionTable) -> f64 {
        [
            self.on_plus.dist(&other.on_plus),
            self.on_minus.dist(&other.on_minus),
            self.on_cross.dist(&other.on_cross),
        ]
        .into_iter()
        .fold(0.0, f64::max)
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct ConventionsReport {
    /// `u_jk` in the product bases, index order (++), (+-), (-+), (--).
    pub u_block: ComplexMatrix,
    pub alpha_plus: Vec<C64>,
    pub alpha_minus: Vec<C64>,
    pub alpha_prime_plus: Vec<C64>,
    pub alpha_prime_minus: Vec<C64>,
    pub pseudoinverse: ActionTable,
    pub neighbourhood: ActionTable,
    pub naive: ActionTable,
    pub dist_pseudo_neighbourhood: f64,
    pub dist_pseudo_naive: f64,
    pub dist_neighbourhood_naive: f64,
    /// The closed-form condition for conventions 2 and 3 to coincide.
    pub naive_agrees_predicted: bool,
    /// Deviation of the naive closed form from a direct evaluation of its definition.
    pub naive_definition_residual: f64,
    pub product_residual: f64,
}

fn pure_ket(rho: &DensityOperator, tol: &Tolerances) -> Result<Vec<C64>> {
    if rho.dim() != 2 {
        return Err(Error::mismatch("qubit state", 2, rho.dim()));
    }
    let e = rho.eig()?;
    if (e.values[1] - 1.0).abs() > tol.product {
        return Err(Error::InvalidState("state is not pure".into()));
    }
    Ok(e.vector(1))
}

/// Compares the pseudoinverse, full-rank-neighbourhood and naive product-preserving
/// conventions for retrodicting a pure prior through a product-preserving two-qubit dilation.
pub fn conventions_compare_two_qubit(
    u: &UnitaryOperator,
    alpha_plus: &DensityOperator,
    beta_plus: &DensityOperator,
    tol: &Tolerances,
) -> Result<ConventionsReport> {
    if u.dim() != 4 {
        return Err(Error::mismatch("two-qubit unitary", 4, u.dim()));
    }
    let ap = pure_ket(alpha_plus, tol)?;
    let bp = pure_ket(beta_plus, tol)?;
    let am = qubit_complement(&ap);
    let bm = qubit_complement(&bp);
    let out = u.matrix().mul_vec(&kron_vec(&ap, &bp));
    let (x, y, product_residual) = product_factors(&out, 2, 2)?;
    if product_residual > tol.product {
        return Err(Error::NotProductPreserving {
            residual: product_residual,
        });
    }
    let app = x;
    let bpp = y;
    let apm = qubit_complement(&app);
    let bpm = qubit_complement(&bpp);
    let ins = [
        kron_vec(&ap, &bp),
        kron_vec(&ap, &bm),
        kron_vec(&am, &bp),
        kron_vec(&am, &bm),
    ];
    let outs = [
        kron_vec(&app, &bpp),
        kron_vec(&app, &bpm),
        kron_vec(&apm, &bpp),
        kron_vec(&apm, &bpm),
    ];
    let u_block = ComplexMatrix::from_fn(4, 4, |j, k| inner(&outs[j], &u.matrix().mul_vec(&ins[k])));

    let op = |v: &[C64], w: &[C64]| ComplexMatrix::outer(v, w);
    let (u21, u22, u23, u32, u12) = (
        u_block[(2, 1)],
        u_block[(2, 2)],
        u_block[(2, 3)],
        u_block[(3, 2)],
        u_block[(1, 2)],
    );

    // (1) pseudoinverse, evaluated from its definition
    let beta_state = DensityOperator::pure(&bp)?;
    let dil = StinespringDilation::new(u.clone(), beta_state)?;
    let channel = channel_from_dilation(&dil, tol)?;
    let prior = DensityOperator::pure(&ap)?;
    let pinv = petz_pseudoinverse(&channel, &prior, tol)?;
    let pseudoinverse = ActionTable {
        on_plus: pinv.apply(&op(&app, &app))?,
        on_minus: pinv.apply(&op(&apm, &apm))?,
        on_cross: pinv.apply(&op(&app, &apm))?,
    };

    // (2) limit of Petz maps with full-rank priors approaching |a+><a+|
    let norm = (u22.norm_sqr() + u32.norm_sqr()).sqrt();
    if norm <= tol.rank {
        return Err(Error::InvalidArgument(
            "full-rank neighbourhood limit undefined when |u12| = 1".into(),
        ));
    }
    let neighbourhood = ActionTable {
        on_plus: op(&ap, &ap),
        on_minus: op(&am, &am),
        on_cross: op(&ap, &am).scale(u22 / norm),
    };

    // (3) naive product-preserving form Tr_B[U^dagger (. (x) |b'+><b'+|) U]
    let naive_minus = &(&(&op(&am, &am).scale_real(1.0 - u21.norm_sqr()) + &op(&ap, &ap).scale_real(u21.norm_sqr()))
        + &op(&ap, &am).scale(u21.conj() * u23))
        + &op(&am, &ap).scale(u21 * u23.conj());
    let naive = ActionTable {
        on_plus: op(&ap, &ap),
        on_minus: naive_minus,
        on_cross: op(&ap, &am).scale(u22),
    };
    let direct = super::reversed_dilation(&dil, &op(&bpp, &bpp))?;
    let direct_table = ActionTable {
        on_plus: direct.apply(&op(&app, &app))?,
        on_minus: direct.apply(&op(&apm, &apm))?,
        on_cross: direct.apply(&op(&app, &apm))?,
    };
    let naive_definition_residual = naive.dist(&direct_table);

    let small = |z: C64| z.norm() <= tol.angle;
    let naive_agrees_predicted = small(u21) && (small(u12) || small(u22));
    Ok(ConventionsReport {
        dist_pseudo_neighbourhood: pseudoinverse.dist(&neighbourhood),
        dist_pseudo_naive: pseudoinverse.dist(&naive),
        dist_neighbourhood_naive: neighbourhood.dist(&naive),
        u_block,
        alpha_plus: ap,
        alpha_minus: am,
        alpha_prime_plus: app,
        alpha_prime_minus: apm,
        pseudoinverse,
        neighbourhood,
        naive,
        naive_agrees_predicted,
        naive_definition_residual,
        product_residual,
    })
}
