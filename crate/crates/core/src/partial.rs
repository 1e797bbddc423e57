//! QFI for probes partially entangled with a noiseless ancilla.
//!
//! For `|Ψ⟩ = Σ ψ_i |ii⟩` the output `(Γ_θ ⊗ I)(|Ψ⟩⟨Ψ|)` splits into a block
//! on `span{|ii⟩}` and a diagonal block on `span{|ij⟩ : i ≠ j}`. Only the
//! diagonal of the score operator on the first block enters the QFI; it is
//! the solution of a `d(d+1)/2` linear system whose reduction yields
//!
//! ```text
//! J(θ) = 1/((1−θ)(θ + 1/(d−1))) + d/((1−θ)(1−θ+dθ)²) · bᵀ Z⁻¹ b
//! ```
//!
//! with `b_(ij) = 2ψ_iψ_j`, `Z = J + αΩᵀΩ`, `α = dθ/(1−θ+dθ)` and `Ω` the
//! `d × d(d−1)/2` pair-incidence matrix weighted by the Schmidt coefficients.
//!
//! Pairs `(i, j)` are zero-based here, `0 ≤ i < j < d`, ranked
//! lexicographically.

use nalgebra::{DMatrix, DVector, SymmetricEigen};

use crate::channels::SchmidtVector;
use crate::error::{Error, Result};
use crate::linalg;

/// Relative singular-value cutoff for the pseudo-inverse of `Z`.
pub const Z_CUTOFF: f64 = 1e-10;

/// A pair `i < j` and its lexicographic rank.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PairIndex {
    pub i: usize,
    pub j: usize,
    pub flat: usize,
}

impl PairIndex {
    pub fn new(i: usize, j: usize, d: usize) -> Option<Self> {
        (i < j && j < d).then(|| Self {
            i,
            j,
            flat: i * d - i * (i + 1) / 2 + (j - i - 1),
        })
    }

    pub fn from_flat(flat: usize, d: usize) -> Option<Self> {
        pairs(d).nth(flat)
    }
}

pub fn pair_count(d: usize) -> usize {
    d * d.saturating_sub(1) / 2
}

/// All pairs in lexicographic order: `(0,1), (0,2), …, (d−2,d−1)`.
pub fn pairs(d: usize) -> impl Iterator<Item = PairIndex> {
    (0..d).flat_map(move |i| ((i + 1)..d).map(move |j| PairIndex::new(i, j, d).unwrap()))
}

/// The matrices entering the partial-entanglement QFI.
#[derive(Debug, Clone)]
pub struct PartialEntanglementMatrices {
    pub b: DVector<f64>,
    pub jmat: DMatrix<f64>,
    pub omega: DMatrix<f64>,
    pub z: DMatrix<f64>,
    pub alpha: f64,
}

fn omega_rec(x: f64, rest: &[f64]) -> DMatrix<f64> {
    let m = rest.len();
    if m == 1 {
        return DMatrix::from_column_slice(2, 1, &[rest[0], x]);
    }
    let tail = omega_rec(rest[0], &rest[1..]);
    let cols = m + tail.ncols();
    let mut out = DMatrix::zeros(m + 1, cols);
    for (k, &r) in rest.iter().enumerate() {
        out[(0, k)] = r;
        out[(k + 1, k)] = x;
    }
    out.view_mut((1, m), (m, tail.ncols())).copy_from(&tail);
    out
}

/// `Ω_d`, built by the block recursion
/// `f_2(x, r) = (r; x)`, `f_{d+1}(x, r) = [[r, 0], [x·I_d, f_d(r)]]`.
pub fn build_omega(psi: &SchmidtVector) -> DMatrix<f64> {
    let p = psi.as_slice();
    omega_rec(p[0], &p[1..])
}

fn check_theta(theta: f64) -> Result<()> {
    if theta > 0.0 && theta < 1.0 {
        Ok(())
    } else {
        Err(Error::ThetaOutOfRange(theta))
    }
}

pub fn build_matrices(psi: &SchmidtVector, theta: f64) -> Result<PartialEntanglementMatrices> {
    check_theta(theta)?;
    let d = psi.d();
    let p = psi.as_slice();
    let m = pair_count(d);
    let mut b = DVector::zeros(m);
    let mut jdiag = DVector::zeros(m);
    for pair in pairs(d) {
        b[pair.flat] = 2.0 * p[pair.i] * p[pair.j];
        jdiag[pair.flat] = p[pair.i] * p[pair.i] + p[pair.j] * p[pair.j];
    }
    let jmat = DMatrix::from_diagonal(&jdiag);
    let omega = build_omega(psi);
    let df = d as f64;
    let alpha = df * theta / (1.0 - theta + df * theta);
    let z = &jmat + (omega.transpose() * &omega).scale(alpha);
    Ok(PartialEntanglementMatrices {
        b,
        jmat,
        omega,
        z,
        alpha,
    })
}

/// `bᵀ Z⁺ b` through the eigendecomposition of the symmetric `Z`, dropping
/// modes below `Z_CUTOFF · σ_max`.
pub fn quadratic_form(mats: &PartialEntanglementMatrices) -> f64 {
    let eig = SymmetricEigen::new(mats.z.clone());
    let smax = eig.eigenvalues.iter().fold(0.0f64, |acc, x| acc.max(x.abs()));
    let cutoff = Z_CUTOFF * smax;
    eig.eigenvalues
        .iter()
        .zip(eig.eigenvectors.column_iter())
        .filter(|(lam, _)| lam.abs() > cutoff)
        .map(|(lam, v)| v.dot(&mats.b).powi(2) / lam)
        .sum()
}

/// QFI of the channel output for an arbitrary Schmidt vector.
pub fn qfi_partial(psi: &SchmidtVector, theta: f64) -> Result<f64> {
    let mats = build_matrices(psi, theta)?;
    let d = psi.d() as f64;
    let q = 1.0 - theta + d * theta;
    let unentangled = 1.0 / ((1.0 - theta) * (theta + 1.0 / (d - 1.0)));
    Ok(unentangled + d / ((1.0 - theta) * q * q) * quadratic_form(&mats))
}

/// QFI for maximal entanglement on a `d_o`-dimensional subspace.
pub fn qfi_subspace(theta: f64, d: usize, d_o: usize) -> f64 {
    let dd = (d * d_o) as f64;
    1.0 / ((1.0 - theta) * (theta + 1.0 / (dd - 1.0)))
}

/// `lᵀ D x` from the reduced closed form.
pub fn l_dx_closed_form(psi: &SchmidtVector, theta: f64) -> Result<f64> {
    let mats = build_matrices(psi, theta)?;
    let d = psi.d() as f64;
    let q = 1.0 - theta + d * theta;
    Ok((d - 1.0) / q - d * d * theta / ((1.0 - theta) * q * q) * quadratic_form(&mats))
}

/// Block system `[[R, S], [Sᵀ, T]] (x; y) = (a; b)` for the diagonal `x` and
/// the off-diagonal `y` (pairs in lexicographic order) of the score operator
/// restricted to `span{|ii⟩}`.
pub fn block_system(psi: &SchmidtVector, theta: f64) -> Result<(DMatrix<f64>, DVector<f64>)> {
    check_theta(theta)?;
    let mats = build_matrices(psi, theta)?;
    let d = psi.d();
    let df = d as f64;
    let m = pair_count(d);
    let p = psi.as_slice();

    let dmat = DMatrix::from_diagonal(&DVector::from_iterator(d, p.iter().map(|x| x * x)));
    let sqrt_d = DMatrix::from_diagonal(&DVector::from_column_slice(p));
    let r = dmat.scale((1.0 - theta + df * theta) / df);
    let s = (sqrt_d * &mats.omega).scale(theta);
    let t = mats.jmat.scale((1.0 - theta) / df) + (mats.omega.transpose() * &mats.omega).scale(theta);

    let mut lhs = DMatrix::zeros(d + m, d + m);
    lhs.view_mut((0, 0), (d, d)).copy_from(&r);
    lhs.view_mut((0, d), (d, m)).copy_from(&s);
    lhs.view_mut((d, 0), (m, d)).copy_from(&s.transpose());
    lhs.view_mut((d, d), (m, m)).copy_from(&t);

    let mut rhs = DVector::zeros(d + m);
    for (i, x) in p.iter().enumerate() {
        rhs[i] = (df - 1.0) / df * x * x;
    }
    rhs.rows_mut(d, m).copy_from(&mats.b);
    Ok((lhs, rhs))
}

/// Diagonal of the score operator on `span{|ii⟩}` and `lᵀ D x`.
#[derive(Debug, Clone)]
pub struct ScoreDiagonal {
    pub x: DVector<f64>,
    pub l_dx: f64,
}

/// Solves the full block system directly (dense LU), without the
/// matrix-inversion-lemma reduction.
pub fn score_diag_oracle(psi: &SchmidtVector, theta: f64) -> Result<ScoreDiagonal> {
    if !psi.is_strictly_positive() {
        return Err(Error::SingularSystem);
    }
    let (lhs, rhs) = block_system(psi, theta)?;
    let sol = lhs.lu().solve(&rhs).ok_or(Error::SingularSystem)?;
    if sol.iter().any(|v| !v.is_finite()) {
        return Err(Error::SingularSystem);
    }
    let d = psi.d();
    let x = sol.rows(0, d).into_owned();
    let l_dx = psi.as_slice().iter().zip(x.iter()).map(|(p, xi)| p * p * xi).sum();
    Ok(ScoreDiagonal { x, l_dx })
}

/// QFI recovered from `lᵀ D x`: `(d−1)/(dθ(1−θ)) − lᵀDx/(dθ)`.
pub fn qfi_from_l_dx(l_dx: f64, theta: f64, d: usize) -> f64 {
    let d = d as f64;
    (d - 1.0) / (d * theta * (1.0 - theta)) - l_dx / (d * theta)
}

/// `A_d` with `a_ii = Σ_{k≠i} ψ_k²/(ψ_i²+ψ_k²)` and
/// `a_ij = ψ_iψ_j/(ψ_i²+ψ_j²)`.
pub fn build_a(psi: &SchmidtVector) -> Result<DMatrix<f64>> {
    let p = psi.as_slice();
    if let Some(k) = p.iter().position(|&x| x <= 0.0) {
        return Err(Error::ZeroCoefficient(k));
    }
    let d = p.len();
    Ok(DMatrix::from_fn(d, d, |i, j| {
        if i == j {
            (0..d)
                .filter(|&k| k != i)
                .map(|k| p[k] * p[k] / (p[i] * p[i] + p[k] * p[k]))
                .sum()
        } else {
            p[i] * p[j] / (p[i] * p[i] + p[j] * p[j])
        }
    }))
}

/// Result of [`verify_max_eig`].
#[derive(Debug, Clone, Copy)]
pub struct MaxEigCheck {
    pub lambda_max: f64,
    pub residual: f64,
}

/// Largest eigenvalue of `A_d`, and the relative residual of
/// `Λ_1 = (1/(ψ_iψ_j))_(i<j)` as an eigenvector of `J⁻¹ΩᵀΩ` for `d − 1`.
pub fn verify_max_eig(psi: &SchmidtVector) -> Result<MaxEigCheck> {
    let a = build_a(psi)?;
    let lambda_max = linalg::hermitian_eig(&linalg::complexify(&a))?.max_eigenvalue();

    let d = psi.d();
    let p = psi.as_slice();
    let omega = build_omega(psi);
    let gram = omega.transpose() * &omega;
    let mut lam1 = DVector::zeros(pair_count(d));
    let mut jdiag = DVector::zeros(pair_count(d));
    for pair in pairs(d) {
        lam1[pair.flat] = 1.0 / (p[pair.i] * p[pair.j]);
        jdiag[pair.flat] = p[pair.i] * p[pair.i] + p[pair.j] * p[pair.j];
    }
    let mapped = (&gram * &lam1).component_div(&jdiag);
    let resid = (mapped - lam1.scale(d as f64 - 1.0)).amax();
    Ok(MaxEigCheck {
        lambda_max,
        residual: resid / lam1.amax(),
    })
}

/// Path from no entanglement (`t = 0`) to maximal entanglement (`t = 1`):
/// `ψ(t) ∝ ((1−t) + t/√d, t/√d, …, t/√d)`.
pub fn interpolate_entanglement(d: usize, t: f64) -> Result<SchmidtVector> {
    if !(0.0..=1.0).contains(&t) {
        return Err(Error::InvalidArgument(format!("t = {t} not in [0, 1]")));
    }
    let w = t / (d as f64).sqrt();
    SchmidtVector::normalized((0..d).map(|i| if i == 0 { 1.0 - t + w } else { w }).collect())
}
