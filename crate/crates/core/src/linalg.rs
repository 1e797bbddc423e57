//! Dense complex linear algebra: Hermitian eigendecomposition, Kronecker
//! products, partial traces and the symmetric-logarithmic-derivative solve.
//!
//! Everything here works on small dense matrices (dimension at most a few
//! dozen), so there is no sparse path and no blocking.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num_complex::Complex64;

use crate::channels::DensityMatrix;
use crate::error::{Error, Result};

/// Dense complex matrix used for every operator in the crate.
pub type CMatrix = DMatrix<Complex64>;

/// Tolerance on `‖M − M†‖_max` (scaled by `max(1, ‖M‖_max)`) for a matrix to
/// count as Hermitian.
pub const HERMITIAN_TOL: f64 = 1e-10;

/// Absolute null-space threshold used by [`solve_sld`].
pub const EPS_NULL: f64 = 1e-12;

/// Components below this magnitude are skipped when fixing eigenvector phases.
const PHASE_FIX_TOL: f64 = 1e-10;

/// Spectral decomposition `M = V diag(λ) V†` of a Hermitian matrix.
///
/// Eigenvalues are ascending. The first component of each eigenvector whose
/// magnitude exceeds `1e-10` is real and positive.
#[derive(Debug, Clone)]
pub struct HermitianEig {
    pub eigenvalues: DVector<f64>,
    pub eigenvectors: CMatrix,
}

impl HermitianEig {
    /// Rebuilds `V diag(λ) V†`.
    pub fn reconstruct(&self) -> CMatrix {
        let v = &self.eigenvectors;
        let scaled = CMatrix::from_fn(v.nrows(), v.ncols(), |r, c| v[(r, c)] * self.eigenvalues[c]);
        scaled * v.adjoint()
    }

    pub fn max_eigenvalue(&self) -> f64 {
        self.eigenvalues[self.eigenvalues.len() - 1]
    }

    pub fn min_eigenvalue(&self) -> f64 {
        self.eigenvalues[0]
    }
}

pub fn identity(n: usize) -> CMatrix {
    CMatrix::identity(n, n)
}

/// Lifts a real matrix into the complex carrier.
pub fn complexify(m: &DMatrix<f64>) -> CMatrix {
    m.map(|x| Complex64::new(x, 0.0))
}

/// Largest absolute entry.
pub fn max_abs(m: &CMatrix) -> f64 {
    m.iter().fold(0.0, |acc, z| acc.max(z.norm()))
}

/// Largest absolute entrywise difference.
pub fn max_abs_diff(a: &CMatrix, b: &CMatrix) -> f64 {
    assert_eq!(a.shape(), b.shape(), "shape mismatch");
    a.iter().zip(b.iter()).fold(0.0, |acc, (x, y)| acc.max((x - y).norm()))
}

pub fn trace(m: &CMatrix) -> Complex64 {
    m.diagonal().iter().sum()
}

/// Returns `‖M − M†‖_max`.
pub fn hermitian_defect(m: &CMatrix) -> f64 {
    max_abs_diff(m, &m.adjoint())
}

pub(crate) fn ensure_square(m: &CMatrix) -> Result<()> {
    if m.nrows() != m.ncols() {
        return Err(Error::NotSquare {
            rows: m.nrows(),
            cols: m.ncols(),
        });
    }
    Ok(())
}

pub(crate) fn ensure_finite(m: &CMatrix) -> Result<()> {
    if m.iter().all(|z| z.re.is_finite() && z.im.is_finite()) {
        Ok(())
    } else {
        Err(Error::NonFinite)
    }
}

pub(crate) fn ensure_hermitian(m: &CMatrix) -> Result<()> {
    ensure_square(m)?;
    ensure_finite(m)?;
    let defect = hermitian_defect(m);
    if defect > HERMITIAN_TOL * max_abs(m).max(1.0) {
        return Err(Error::NonHermitian(defect));
    }
    Ok(())
}

/// Eigendecomposition of a Hermitian matrix with ascending eigenvalues and
/// deterministic eigenvector phases.
pub fn hermitian_eig(m: &CMatrix) -> Result<HermitianEig> {
    ensure_hermitian(m)?;
    let n = m.nrows();
    let sym = (m + m.adjoint()).scale(0.5);
    let eig = SymmetricEigen::new(sym);

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));

    let eigenvalues = DVector::from_iterator(n, order.iter().map(|&k| eig.eigenvalues[k]));
    let mut eigenvectors = CMatrix::zeros(n, n);
    for (col, &k) in order.iter().enumerate() {
        let v = eig.eigenvectors.column(k);
        let phase = v
            .iter()
            .find(|z| z.norm() > PHASE_FIX_TOL)
            .map(|z| z.conj() / z.norm())
            .unwrap_or(Complex64::new(1.0, 0.0));
        for r in 0..n {
            eigenvectors[(r, col)] = v[r] * phase;
        }
    }
    Ok(HermitianEig {
        eigenvalues,
        eigenvectors,
    })
}

/// Kronecker product `a ⊗ b` with row-major block order: block `(i, j)` of
/// the result is `a[i, j] · b`.
pub fn kron(a: &CMatrix, b: &CMatrix) -> CMatrix {
    let (ar, ac) = a.shape();
    let (br, bc) = b.shape();
    CMatrix::from_fn(ar * br, ac * bc, |r, c| a[(r / br, c / bc)] * b[(r % br, c % bc)])
}

/// Traces out the first factor of an operator on `C^{d1} ⊗ C^{d2}`.
pub fn partial_trace_first(m: &CMatrix, d1: usize, d2: usize) -> CMatrix {
    assert_eq!(m.shape(), (d1 * d2, d1 * d2), "shape mismatch");
    CMatrix::from_fn(d2, d2, |r, c| (0..d1).map(|k| m[(k * d2 + r, k * d2 + c)]).sum())
}

/// Traces out the second factor of an operator on `C^{d1} ⊗ C^{d2}`.
pub fn partial_trace_second(m: &CMatrix, d1: usize, d2: usize) -> CMatrix {
    assert_eq!(m.shape(), (d1 * d2, d1 * d2), "shape mismatch");
    CMatrix::from_fn(d1, d1, |r, c| (0..d2).map(|k| m[(r * d2 + k, c * d2 + k)]).sum())
}

/// Symmetric logarithmic derivative: the Hermitian `L` with
/// `(Lρ + ρL)/2 = ∂ρ` on the support of `ρ`.
///
/// Solved in the eigenbasis of `ρ` as `L̃_ij = 2 (∂ρ̃)_ij / (λ_i + λ_j)`.
/// Entries with `λ_i + λ_j ≤ EPS_NULL` are set to zero, provided the matching
/// derivative entry is also below `EPS_NULL`; otherwise the derivative leaves
/// the support and `InconsistentDerivative` is returned.
pub fn solve_sld(rho: &DensityMatrix, drho: &CMatrix) -> Result<CMatrix> {
    let n = rho.dim();
    if drho.shape() != (n, n) {
        return Err(Error::DimensionMismatch {
            expected: n,
            got: drho.nrows(),
        });
    }
    ensure_hermitian(drho)?;
    let tr = trace(drho);
    if tr.norm() > HERMITIAN_TOL * max_abs(drho).max(1.0) * n as f64 {
        return Err(Error::InvalidArgument(format!(
            "derivative must be traceless, trace = {tr}"
        )));
    }

    let eig = hermitian_eig(rho.matrix())?;
    let v = &eig.eigenvectors;
    let rotated = v.adjoint() * drho * v;
    let lam = &eig.eigenvalues;

    let mut sld = CMatrix::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            let denom = lam[i] + lam[j];
            let entry = rotated[(i, j)];
            if denom <= EPS_NULL {
                if entry.norm() > EPS_NULL {
                    return Err(Error::InconsistentDerivative {
                        row: i,
                        col: j,
                        magnitude: entry.norm(),
                    });
                }
            } else {
                sld[(i, j)] = entry * (2.0 / denom);
            }
        }
    }
    let l = v * sld * v.adjoint();
    Ok((&l + l.adjoint()).scale(0.5))
}
