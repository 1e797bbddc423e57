//! Probe states, probing schemes and the parametric output families they
//! produce under the qudit depolarizing channel.
//!
//! Every family in scope is affine in a strength function `h(θ)`:
//! `ρ(θ) = (1 − h(θ))·M + h(θ)·σ`, where `σ` is the pure probe and `M` is the
//! fully depolarized output. The derivative is therefore exact:
//! `∂ρ = h'(θ)·(σ − M)`.

use nalgebra::DVector;
use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::linalg::{self, CMatrix};

/// Default domain on which families are handed to the oracle.
pub const DEFAULT_DOMAIN: (f64, f64) = (0.01, 0.99);

const DENSITY_TOL: f64 = 1e-10;
const SCHMIDT_NORM_TOL: f64 = 1e-12;

/// Hermitian, unit-trace, positive semi-definite operator.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    matrix: CMatrix,
}

impl DensityMatrix {
    pub fn new(matrix: CMatrix) -> Result<Self> {
        linalg::ensure_hermitian(&matrix).map_err(|e| Error::InvalidDensity(e.to_string()))?;
        let tr = linalg::trace(&matrix);
        if (tr - Complex64::new(1.0, 0.0)).norm() > DENSITY_TOL {
            return Err(Error::InvalidDensity(format!("trace is {tr}")));
        }
        let min = linalg::hermitian_eig(&matrix)?.min_eigenvalue();
        if min < -DENSITY_TOL {
            return Err(Error::InvalidDensity(format!("minimum eigenvalue {min:e} is negative")));
        }
        Ok(Self { matrix })
    }

    /// `|v⟩⟨v|` for a unit vector `v`.
    pub fn pure(state: &DVector<Complex64>) -> Result<Self> {
        let norm = state.norm();
        if (norm - 1.0).abs() > DENSITY_TOL {
            return Err(Error::InvalidDensity(format!("state norm is {norm}")));
        }
        Self::new(state * state.adjoint())
    }

    pub fn maximally_mixed(dim: usize) -> Self {
        Self {
            matrix: linalg::identity(dim).unscale(dim as f64),
        }
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> CMatrix {
        self.matrix
    }

    /// `tr(ρ²)`.
    pub fn purity(&self) -> f64 {
        linalg::trace(&(&self.matrix * &self.matrix)).re
    }
}

/// Non-negative Schmidt coefficients `ψ_1..ψ_d` with `Σψ_i² = 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct SchmidtVector {
    psi: Vec<f64>,
}

impl SchmidtVector {
    pub fn new(psi: Vec<f64>) -> Result<Self> {
        if psi.len() < 2 {
            return Err(Error::InvalidDimension(psi.len()));
        }
        if psi.iter().any(|x| !x.is_finite() || *x < 0.0) {
            return Err(Error::NegativeCoefficient);
        }
        let norm2: f64 = psi.iter().map(|x| x * x).sum();
        if (norm2 - 1.0).abs() > SCHMIDT_NORM_TOL {
            return Err(Error::NotNormalized(norm2));
        }
        Ok(Self { psi })
    }

    /// Rescales non-negative weights onto the unit sphere.
    pub fn normalized(weights: Vec<f64>) -> Result<Self> {
        if weights.iter().any(|x| !x.is_finite() || *x < 0.0) {
            return Err(Error::NegativeCoefficient);
        }
        let norm = weights.iter().map(|x| x * x).sum::<f64>().sqrt();
        if norm == 0.0 {
            return Err(Error::NotNormalized(0.0));
        }
        Self::new(weights.into_iter().map(|x| x / norm).collect())
    }

    /// Uniform coefficients `1/√d`.
    pub fn maximal(d: usize) -> Result<Self> {
        Self::subspace(d, d)
    }

    /// `e_1`: no entanglement.
    pub fn product(d: usize) -> Result<Self> {
        let mut psi = vec![0.0; d];
        if let Some(first) = psi.first_mut() {
            *first = 1.0;
        }
        Self::new(psi)
    }

    /// Maximal entanglement on the first `d_o` levels, none elsewhere.
    pub fn subspace(d: usize, d_o: usize) -> Result<Self> {
        if d_o == 0 || d_o > d {
            return Err(Error::InvalidArgument(format!(
                "subspace dimension {d_o} not in 1..={d}"
            )));
        }
        let w = 1.0 / (d_o as f64).sqrt();
        Self::new((0..d).map(|i| if i < d_o { w } else { 0.0 }).collect())
    }

    /// Isotropic draw on the positive orthant of the unit sphere.
    pub fn sample<R: Rng + ?Sized>(d: usize, rng: &mut R) -> Result<Self> {
        loop {
            let w: Vec<f64> = (0..d).map(|_| rng.sample::<f64, _>(StandardNormal).abs()).collect();
            if w.iter().any(|&x| x > 0.0) {
                return Self::normalized(w);
            }
        }
    }

    pub fn d(&self) -> usize {
        self.psi.len()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.psi
    }

    pub fn is_strictly_positive(&self) -> bool {
        self.psi.iter().all(|&x| x > 0.0)
    }

    /// Entanglement entropy `−Σ ψ_i² ln ψ_i²` of the reduced state.
    pub fn entropy(&self) -> f64 {
        self.psi
            .iter()
            .map(|x| x * x)
            .filter(|&p| p > 0.0)
            .map(|p| -p * p.ln())
            .sum()
    }
}

/// Probing scheme.
#[derive(Debug, Clone, PartialEq)]
pub enum SchemeKind {
    /// Unentangled pure probe.
    O,
    /// Probe maximally entangled with a noiseless ancilla.
    E,
    /// Maximally entangled pair, both halves sent through the channel.
    B,
    /// Scheme E with the ancilla depolarized by a known `Γ_η`.
    EEta { eta: f64 },
    /// Probe partially entangled with a noiseless ancilla.
    Partial(SchmidtVector),
}

/// A probing scheme together with the channel dimension and the number of
/// probe circulations before measurement.
#[derive(Debug, Clone, PartialEq)]
pub struct SchemeSpec {
    pub kind: SchemeKind,
    pub d: usize,
    pub n: u32,
}

impl SchemeSpec {
    pub fn o(d: usize) -> Self {
        Self {
            kind: SchemeKind::O,
            d,
            n: 1,
        }
    }

    pub fn e(d: usize) -> Self {
        Self {
            kind: SchemeKind::E,
            d,
            n: 1,
        }
    }

    pub fn b(d: usize) -> Self {
        Self {
            kind: SchemeKind::B,
            d,
            n: 1,
        }
    }

    pub fn e_eta(d: usize, eta: f64) -> Self {
        Self {
            kind: SchemeKind::EEta { eta },
            d,
            n: 1,
        }
    }

    pub fn partial(psi: SchmidtVector) -> Self {
        let d = psi.d();
        Self {
            kind: SchemeKind::Partial(psi),
            d,
            n: 1,
        }
    }

    pub fn with_circulations(mut self, n: u32) -> Self {
        self.n = n;
        self
    }

    pub fn label(&self) -> &'static str {
        match self.kind {
            SchemeKind::O => "O",
            SchemeKind::E => "E",
            SchemeKind::B => "B",
            SchemeKind::EEta { .. } => "E_eta",
            SchemeKind::Partial(_) => "Partial",
        }
    }

    pub fn eta(&self) -> Option<f64> {
        match self.kind {
            SchemeKind::EEta { eta } => Some(eta),
            _ => None,
        }
    }

    /// Uses of `Γ_θ` consumed by a single measured shot.
    pub fn channel_uses_per_shot(&self) -> u32 {
        match self.kind {
            SchemeKind::O | SchemeKind::E => self.n,
            SchemeKind::B => 2 * self.n,
            SchemeKind::EEta { .. } | SchemeKind::Partial(_) => 1,
        }
    }

    /// Dimension of the measured output.
    pub fn output_dim(&self) -> usize {
        match self.kind {
            SchemeKind::O => self.d,
            _ => self.d * self.d,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.d < 2 {
            return Err(Error::InvalidDimension(self.d));
        }
        if self.n < 1 {
            return Err(Error::InvalidArgument("circulation count must be >= 1".into()));
        }
        match &self.kind {
            SchemeKind::EEta { eta } => {
                if !(0.0..=1.0).contains(eta) {
                    return Err(Error::InvalidArgument(format!("eta = {eta} not in [0, 1]")));
                }
                if self.n != 1 {
                    return Err(Error::UnsupportedCombination(
                        "ancilla depolarization with re-circulation".into(),
                    ));
                }
            }
            SchemeKind::Partial(psi) => {
                if psi.d() != self.d {
                    return Err(Error::DimensionMismatch {
                        expected: self.d,
                        got: psi.d(),
                    });
                }
                if self.n != 1 {
                    return Err(Error::UnsupportedCombination(
                        "partial entanglement with re-circulation".into(),
                    ));
                }
            }
            _ => {}
        }
        Ok(())
    }

    /// Strength function `h(θ)` of the output family.
    pub fn strength(&self) -> Strength {
        match self.kind {
            SchemeKind::O | SchemeKind::E => Strength::Power(self.n),
            SchemeKind::B => Strength::Power(2 * self.n),
            SchemeKind::EEta { eta } => Strength::Scaled(eta),
            SchemeKind::Partial(_) => Strength::Power(1),
        }
    }
}

/// Generalized depolarization strength `h(θ)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Strength {
    /// `h(θ) = θ^k`.
    Power(u32),
    /// `h(θ) = η·θ`.
    Scaled(f64),
}

impl Strength {
    pub fn h(&self, theta: f64) -> f64 {
        match *self {
            Strength::Power(k) => theta.powi(k as i32),
            Strength::Scaled(eta) => eta * theta,
        }
    }

    pub fn dh(&self, theta: f64) -> f64 {
        match *self {
            Strength::Power(0) => 0.0,
            Strength::Power(k) => k as f64 * theta.powi(k as i32 - 1),
            Strength::Scaled(eta) => eta,
        }
    }

    /// Inverts `h` on `[0, 1]`, clamping the result into `[0, 1]`.
    pub fn invert(&self, h: f64) -> f64 {
        let h = h.clamp(0.0, 1.0);
        let theta = match *self {
            Strength::Power(1) => h,
            Strength::Power(k) => h.powf(1.0 / k as f64),
            Strength::Scaled(eta) if eta > 0.0 => h / eta,
            Strength::Scaled(_) => 0.0,
        };
        theta.clamp(0.0, 1.0)
    }
}

/// A density-matrix family `ρ(θ)` with its analytic derivative.
pub trait ParamFamily: Sync {
    fn dim(&self) -> usize;

    /// Closed interval on which the family is handed to the oracle.
    fn domain(&self) -> (f64, f64) {
        DEFAULT_DOMAIN
    }

    fn rho_at(&self, theta: f64) -> Result<DensityMatrix>;

    fn drho_at(&self, theta: f64) -> Result<CMatrix>;
}

/// `ρ(θ) = (1 − h(θ))·M + h(θ)·σ`.
#[derive(Debug, Clone)]
pub struct AffineFamily {
    probe: CMatrix,
    reference: CMatrix,
    strength: Strength,
    domain: (f64, f64),
}

impl AffineFamily {
    pub fn new(probe: DensityMatrix, reference: DensityMatrix, strength: Strength) -> Result<Self> {
        if probe.dim() != reference.dim() {
            return Err(Error::DimensionMismatch {
                expected: probe.dim(),
                got: reference.dim(),
            });
        }
        Ok(Self {
            probe: probe.into_matrix(),
            reference: reference.into_matrix(),
            strength,
            domain: DEFAULT_DOMAIN,
        })
    }

    pub fn with_domain(mut self, lo: f64, hi: f64) -> Self {
        self.domain = (lo, hi);
        self
    }

    pub fn probe(&self) -> &CMatrix {
        &self.probe
    }

    pub fn strength(&self) -> Strength {
        self.strength
    }

    fn check_theta(theta: f64) -> Result<()> {
        if (0.0..=1.0).contains(&theta) {
            Ok(())
        } else {
            Err(Error::ThetaOutOfRange(theta))
        }
    }
}

impl ParamFamily for AffineFamily {
    fn dim(&self) -> usize {
        self.probe.nrows()
    }

    fn domain(&self) -> (f64, f64) {
        self.domain
    }

    fn rho_at(&self, theta: f64) -> Result<DensityMatrix> {
        Self::check_theta(theta)?;
        let h = self.strength.h(theta);
        DensityMatrix::new(self.reference.scale(1.0 - h) + self.probe.scale(h))
    }

    fn drho_at(&self, theta: f64) -> Result<CMatrix> {
        Self::check_theta(theta)?;
        Ok((&self.probe - &self.reference).scale(self.strength.dh(theta)))
    }
}

/// `Γ_θ(σ) = (1 − θ)/d·I + θσ`.
pub fn depolarize(sigma: &DensityMatrix, theta: f64) -> Result<DensityMatrix> {
    if !(0.0..=1.0).contains(&theta) {
        return Err(Error::ThetaOutOfRange(theta));
    }
    let d = sigma.dim();
    DensityMatrix::new(linalg::identity(d).scale((1.0 - theta) / d as f64) + sigma.matrix().scale(theta))
}

/// Which factor of a bipartite operator a local channel acts on.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Factor {
    First,
    Second,
}

/// Applies `Γ_θ` to one factor of a state on `C^{d1} ⊗ C^{d2}`:
/// `(Γ_θ ⊗ I)(σ) = (1 − θ)·I/d1 ⊗ tr_1σ + θσ` and symmetrically.
pub fn depolarize_subsystem(
    sigma: &DensityMatrix,
    theta: f64,
    d1: usize,
    d2: usize,
    factor: Factor,
) -> Result<DensityMatrix> {
    if !(0.0..=1.0).contains(&theta) {
        return Err(Error::ThetaOutOfRange(theta));
    }
    if sigma.dim() != d1 * d2 {
        return Err(Error::DimensionMismatch {
            expected: d1 * d2,
            got: sigma.dim(),
        });
    }
    let m = sigma.matrix();
    let mixed = match factor {
        Factor::First => linalg::kron(
            &linalg::identity(d1).unscale(d1 as f64),
            &linalg::partial_trace_first(m, d1, d2),
        ),
        Factor::Second => linalg::kron(
            &linalg::partial_trace_second(m, d1, d2),
            &linalg::identity(d2).unscale(d2 as f64),
        ),
    };
    DensityMatrix::new(mixed.scale(1.0 - theta) + m.scale(theta))
}

/// `|μ⟩⟨μ|` with `|μ⟩ = Σ_i |ii⟩/√d`.
pub fn max_entangled_state(d: usize) -> Result<DensityMatrix> {
    schmidt_state(&SchmidtVector::maximal(d)?)
}

fn schmidt_ket(psi: &SchmidtVector) -> DVector<Complex64> {
    let d = psi.d();
    let mut ket = DVector::zeros(d * d);
    for (i, &p) in psi.as_slice().iter().enumerate() {
        ket[i * d + i] = Complex64::new(p, 0.0);
    }
    ket
}

/// `|Ψ⟩⟨Ψ|` with `|Ψ⟩ = Σ_i ψ_i |ii⟩`.
pub fn schmidt_state(psi: &SchmidtVector) -> Result<DensityMatrix> {
    DensityMatrix::pure(&schmidt_ket(psi))
}

/// `|0⟩⟨0|` on `C^d`.
pub fn basis_state(d: usize) -> Result<DensityMatrix> {
    let mut ket = DVector::zeros(d);
    ket[0] = Complex64::new(1.0, 0.0);
    DensityMatrix::pure(&ket)
}

/// Output family of a probing scheme.
pub fn family(spec: &SchemeSpec) -> Result<AffineFamily> {
    spec.validate()?;
    let d = spec.d;
    let strength = spec.strength();
    match &spec.kind {
        SchemeKind::O => AffineFamily::new(basis_state(d)?, DensityMatrix::maximally_mixed(d), strength),
        SchemeKind::E | SchemeKind::B | SchemeKind::EEta { .. } => {
            AffineFamily::new(max_entangled_state(d)?, DensityMatrix::maximally_mixed(d * d), strength)
        }
        SchemeKind::Partial(psi) => {
            let reduced = CMatrix::from_diagonal(&DVector::from_iterator(
                d,
                psi.as_slice().iter().map(|p| Complex64::new(p * p, 0.0)),
            ));
            let reference = linalg::kron(&linalg::identity(d).unscale(d as f64), &reduced);
            AffineFamily::new(schmidt_state(psi)?, DensityMatrix::new(reference)?, strength)
        }
    }
}
