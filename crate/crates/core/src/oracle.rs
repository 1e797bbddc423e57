//! Brute-force checks on the closed forms: numerical QFI from a density
//! matrix family, classical Fisher information of a measurement, and Monte
//! Carlo Cramér–Rao experiments with a maximum-likelihood estimator.

use nalgebra::DVector;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Binomial, Distribution, StandardNormal};
use rayon::prelude::*;

use crate::channels::{basis_state, family, max_entangled_state, DensityMatrix, ParamFamily, SchemeKind, SchemeSpec};
use crate::error::{Error, Result};
use crate::linalg::{self, CMatrix};
use crate::qfi::qfi_scheme;

const POVM_TOL: f64 = 1e-10;
const OUTCOME_P_NULL: f64 = 1e-14;
const OUTCOME_DP_NULL: f64 = 1e-12;

/// θ range accepted by [`crb_experiment`]; clamping bias of the estimator is
/// negligible inside it.
pub const CRB_THETA_RANGE: (f64, f64) = (0.2, 0.8);
pub const CRB_MIN_SHOTS: u64 = 1000;

/// Positive operators summing to the identity.
#[derive(Debug, Clone)]
pub struct Povm {
    elements: Vec<CMatrix>,
}

impl Povm {
    pub fn new(elements: Vec<CMatrix>) -> Result<Self> {
        let first = elements
            .first()
            .ok_or_else(|| Error::InvalidPovm("no elements".into()))?;
        let n = first.nrows();
        let mut total = CMatrix::zeros(n, n);
        for (k, e) in elements.iter().enumerate() {
            if e.shape() != (n, n) {
                return Err(Error::InvalidPovm(format!("element {k} has the wrong shape")));
            }
            let eig = linalg::hermitian_eig(e)?;
            if eig.min_eigenvalue() < -POVM_TOL {
                return Err(Error::InvalidPovm(format!("element {k} is not positive")));
            }
            total += e;
        }
        let defect = linalg::max_abs_diff(&total, &linalg::identity(n));
        if defect > POVM_TOL {
            return Err(Error::InvalidPovm(format!(
                "elements sum to identity only to {defect:e}"
            )));
        }
        Ok(Self { elements })
    }

    /// The single-outcome measurement `{I}`.
    pub fn trivial(dim: usize) -> Self {
        Self {
            elements: vec![linalg::identity(dim)],
        }
    }

    /// Rank-one projectors onto the columns of a unitary.
    pub fn from_basis(basis: &CMatrix) -> Result<Self> {
        Self::new(
            basis
                .column_iter()
                .map(|v| {
                    let v = v.into_owned();
                    &v * v.adjoint()
                })
                .collect(),
        )
    }

    pub fn elements(&self) -> &[CMatrix] {
        &self.elements
    }

    pub fn dim(&self) -> usize {
        self.elements[0].nrows()
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    /// Born-rule probabilities `tr(Π_k ρ)`.
    pub fn probabilities(&self, rho: &DensityMatrix) -> Result<Vec<f64>> {
        self.check_dim(rho.dim())?;
        Ok(self.elements.iter().map(|e| trace_product(e, rho.matrix())).collect())
    }

    fn check_dim(&self, dim: usize) -> Result<()> {
        if dim != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                got: dim,
            });
        }
        Ok(())
    }
}

fn trace_product(a: &CMatrix, b: &CMatrix) -> f64 {
    // Re tr(AB) without forming the product.
    a.iter().zip(b.transpose().iter()).map(|(x, y)| (x * y).re).sum()
}

fn check_interior<F: ParamFamily + ?Sized>(fam: &F, theta: f64) -> Result<()> {
    let (lo, hi) = fam.domain();
    if theta < lo || theta > hi {
        return Err(Error::ThetaOutOfRange(theta));
    }
    Ok(())
}

/// `tr(ρ L²)` with `L` the symmetric logarithmic derivative at θ.
pub fn qfi_numeric<F: ParamFamily + ?Sized>(fam: &F, theta: f64) -> Result<f64> {
    check_interior(fam, theta)?;
    let rho = fam.rho_at(theta)?;
    let drho = fam.drho_at(theta)?;
    let l = linalg::solve_sld(&rho, &drho)?;
    Ok(linalg::trace(&(rho.matrix() * &l * &l)).re)
}

/// Projective measurement onto the probe state and its complement.
pub fn optimal_projectors(spec: &SchemeSpec) -> Result<Povm> {
    spec.validate()?;
    let probe = match spec.kind {
        SchemeKind::O => basis_state(spec.d)?,
        SchemeKind::E | SchemeKind::B | SchemeKind::EEta { .. } => max_entangled_state(spec.d)?,
        SchemeKind::Partial(_) => {
            return Err(Error::UnsupportedCombination(
                "no two-outcome optimal measurement for partial entanglement; use sld_eigenbasis".into(),
            ))
        }
    };
    let pi0 = probe.into_matrix();
    let pi1 = linalg::identity(pi0.nrows()) - &pi0;
    Povm::new(vec![pi0, pi1])
}

/// Measurement in the eigenbasis of `ρ(θ)`.
pub fn rho_eigenbasis<F: ParamFamily + ?Sized>(fam: &F, theta: f64) -> Result<Povm> {
    let rho = fam.rho_at(theta)?;
    Povm::from_basis(&linalg::hermitian_eig(rho.matrix())?.eigenvectors)
}

/// Measurement in the eigenbasis of the symmetric logarithmic derivative at θ.
pub fn sld_eigenbasis<F: ParamFamily + ?Sized>(fam: &F, theta: f64) -> Result<Povm> {
    let rho = fam.rho_at(theta)?;
    let l = linalg::solve_sld(&rho, &fam.drho_at(theta)?)?;
    Povm::from_basis(&linalg::hermitian_eig(&l)?.eigenvectors)
}

/// `Σ_k (∂p_k)² / p_k` for the outcome distribution of `povm` on `ρ(θ)`.
pub fn classical_fisher<F: ParamFamily + ?Sized>(povm: &Povm, fam: &F, theta: f64) -> Result<f64> {
    let rho = fam.rho_at(theta)?;
    let drho = fam.drho_at(theta)?;
    povm.check_dim(rho.dim())?;
    let mut total = 0.0;
    for (k, e) in povm.elements().iter().enumerate() {
        let p = trace_product(e, rho.matrix());
        let dp = trace_product(e, &drho);
        if p <= OUTCOME_P_NULL {
            if dp.abs() > OUTCOME_DP_NULL {
                return Err(Error::DegenerateOutcome(k));
            }
            continue;
        }
        total += dp * dp / p;
    }
    Ok(total)
}

/// Draws `n` i.i.d. outcomes of `povm` on `rho` and returns per-outcome
/// counts. The draw is a sequence of conditional binomials, so a fixed seed
/// always yields the same counts.
pub fn sample_outcomes(povm: &Povm, rho: &DensityMatrix, n: u64, seed: u64) -> Result<Vec<u64>> {
    if n == 0 {
        return Err(Error::InvalidArgument("need at least one shot".into()));
    }
    let probs: Vec<f64> = povm.probabilities(rho)?.into_iter().map(|p| p.max(0.0)).collect();
    let total: f64 = probs.iter().sum();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut counts = vec![0u64; probs.len()];
    let mut remaining = n;
    let mut mass = total;
    for (k, &p) in probs.iter().enumerate() {
        if remaining == 0 {
            break;
        }
        if k + 1 == probs.len() {
            counts[k] = remaining;
            break;
        }
        let q = if mass > 0.0 { (p / mass).clamp(0.0, 1.0) } else { 0.0 };
        let draw = Binomial::new(remaining, q)
            .map_err(|e| Error::InvalidArgument(e.to_string()))?
            .sample(&mut rng);
        counts[k] = draw;
        remaining -= draw;
        mass -= p;
    }
    Ok(counts)
}

/// Maximum-likelihood θ from counts of the two-outcome optimal measurement.
///
/// With `D` the output dimension, `p_0 = (1 + (D−1)h(θ))/D`; the estimate of
/// `h` is clamped into `[0, 1]` before inverting `h`.
pub fn mle_theta(counts: &[u64], spec: &SchemeSpec) -> Result<f64> {
    spec.validate()?;
    if matches!(spec.kind, SchemeKind::Partial(_)) {
        return Err(Error::UnsupportedCombination("MLE for partial entanglement".into()));
    }
    if counts.len() != 2 {
        return Err(Error::InvalidArgument(format!(
            "expected two outcome counts, got {}",
            counts.len()
        )));
    }
    let total = counts[0] + counts[1];
    if total == 0 {
        return Err(Error::InvalidArgument("no shots recorded".into()));
    }
    let dim = spec.output_dim() as f64;
    let p0 = counts[0] as f64 / total as f64;
    let h = ((dim * p0 - 1.0) / (dim - 1.0)).clamp(0.0, 1.0);
    Ok(spec.strength().invert(h))
}

/// Outcome of a Monte Carlo Cramér–Rao experiment.
#[derive(Debug, Clone, PartialEq)]
pub struct CrbReport {
    pub theta_true: f64,
    pub n_shots: u64,
    pub n_trials: u64,
    pub mse: f64,
    /// `1/(n_shots · J)` with `J` the per-shot QFI.
    pub crb: f64,
    /// `mse / crb`.
    pub ratio: f64,
}

/// Repeats sample → MLE `n_trials` times; trial `k` uses seed `seed + k`.
pub fn crb_experiment(spec: &SchemeSpec, theta: f64, n_shots: u64, n_trials: u64, seed: u64) -> Result<CrbReport> {
    let (lo, hi) = CRB_THETA_RANGE;
    if !(lo..=hi).contains(&theta) {
        return Err(Error::ThetaOutOfRange(theta));
    }
    if n_shots < CRB_MIN_SHOTS {
        return Err(Error::InvalidArgument(format!("n_shots must be >= {CRB_MIN_SHOTS}")));
    }
    if n_trials == 0 {
        return Err(Error::InvalidArgument("n_trials must be >= 1".into()));
    }
    let j = qfi_scheme(spec, theta)?.per_shot();
    if j <= 0.0 {
        return Err(Error::InvalidArgument("family carries no information".into()));
    }
    let rho = family(spec)?.rho_at(theta)?;
    let povm = optimal_projectors(spec)?;

    let sq_errors = (0..n_trials)
        .into_par_iter()
        .map(|k| {
            let counts = sample_outcomes(&povm, &rho, n_shots, seed.wrapping_add(k))?;
            let est = mle_theta(&counts, spec)?;
            Ok((est - theta).powi(2))
        })
        .collect::<Result<Vec<f64>>>()?;
    let mse = sq_errors.iter().sum::<f64>() / n_trials as f64;
    let crb = 1.0 / (n_shots as f64 * j);
    Ok(CrbReport {
        theta_true: theta,
        n_shots,
        n_trials,
        mse,
        crb,
        ratio: mse / crb,
    })
}

fn inv_sqrt_psd(m: &CMatrix) -> Result<CMatrix> {
    let eig = linalg::hermitian_eig(m)?;
    let v = &eig.eigenvectors;
    let scaled = CMatrix::from_fn(v.nrows(), v.ncols(), |r, c| v[(r, c)] / eig.eigenvalues[c].sqrt());
    Ok(scaled * v.adjoint())
}

/// Random `outcomes`-element POVM on `C^dim` from complex Gaussian seeds,
/// normalized as `E_k = S^{-1/2} G_k S^{-1/2}` with `G_k = A_k A_k†`.
pub fn random_povm<R: Rng + ?Sized>(dim: usize, outcomes: usize, rng: &mut R) -> Result<Povm> {
    if outcomes == 0 {
        return Err(Error::InvalidPovm("no elements".into()));
    }
    let mut gram = Vec::with_capacity(outcomes);
    for _ in 0..outcomes {
        let a = CMatrix::from_fn(dim, dim, |_, _| {
            Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
        });
        gram.push(&a * a.adjoint());
    }
    let total = gram.iter().fold(CMatrix::zeros(dim, dim), |acc, g| acc + g);
    let w = inv_sqrt_psd(&total)?;
    let elements = gram
        .into_iter()
        .map(|g| {
            let e = &w * g * &w;
            (&e + e.adjoint()).scale(0.5)
        })
        .collect::<Vec<_>>();
    // Push any rounding in the completeness relation into the last element.
    let mut elements = elements;
    let sum = elements.iter().fold(CMatrix::zeros(dim, dim), |acc, e| acc + e);
    let fix = linalg::identity(dim) - sum;
    if let Some(last) = elements.last_mut() {
        *last += fix;
    }
    Povm::new(elements)
}

/// Probability vector of a pure `|v⟩` in the computational basis; handy for
/// checking samplers.
pub fn basis_probabilities(v: &DVector<Complex64>) -> Vec<f64> {
    v.iter().map(|z| z.norm_sqr()).collect()
}
