//! Quantum Fisher information for identifying the qudit depolarizing channel
//! `Γ_θ(σ) = (1 − θ)/d·I + θσ`.
//!
//! The crate compares probing schemes by the information they carry about θ
//! per use of the channel:
//!
//! - **O**: an unentangled pure probe;
//! - **E**: a probe maximally entangled with a noiseless ancilla;
//! - **B**: a maximally entangled pair, both halves sent through the channel;
//! - **E_η**: scheme E with the ancilla depolarized by a known `Γ_η`;
//! - **Partial**: a probe with arbitrary Schmidt coefficients.
//!
//! Every closed form in [`qfi`] and [`partial`] has an independent numerical
//! counterpart in [`oracle`], built from the output families in [`channels`]
//! and the symmetric-logarithmic-derivative solver in [`linalg`].

#![forbid(unsafe_code)]

pub mod channels;
pub mod error;
pub mod linalg;
pub mod oracle;
pub mod partial;
pub mod qfi;

pub use channels::{
    depolarize, family, max_entangled_state, schmidt_state, AffineFamily, DensityMatrix, ParamFamily, SchemeKind,
    SchemeSpec, SchmidtVector, Strength,
};
pub use error::{Error, Result};
pub use linalg::{hermitian_eig, kron, solve_sld, CMatrix, HermitianEig};
pub use oracle::{classical_fisher, crb_experiment, optimal_projectors, qfi_numeric, CrbReport, Povm};
pub use partial::{qfi_partial, score_diag_oracle, verify_max_eig, PartialEntanglementMatrices};
pub use qfi::{g_eta, gain_e_over_o, qfi_h, qfi_quasiclassical, qfi_scheme, threshold_b_vs_o, QfiPoint};
