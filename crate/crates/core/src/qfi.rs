//! Closed-form quantum Fisher information for the depolarizing-channel
//! probing schemes, with the threshold functions that compare them.
//!
//! All values are per use of `Γ_θ`: scheme B and probe re-circulation divide
//! the per-shot information by the number of channel passages the shot
//! consumes (see [`SchemeSpec::channel_uses_per_shot`]).

use crate::channels::{SchemeKind, SchemeSpec};
use crate::error::{Error, Result};

/// Bracket searched by [`threshold_b_vs_o`].
pub const THRESHOLD_BRACKET: (f64, f64) = (0.3, 0.99);

const THRESHOLD_TOL: f64 = 1e-13;

/// QFI of one scheme at one parameter value.
#[derive(Debug, Clone, PartialEq)]
pub struct QfiPoint {
    pub theta: f64,
    pub d: usize,
    pub scheme: SchemeSpec,
    pub j_per_use: f64,
    pub channel_uses_per_shot: u32,
}

impl QfiPoint {
    /// Information carried by one measured shot.
    pub fn per_shot(&self) -> f64 {
        self.j_per_use * self.channel_uses_per_shot as f64
    }
}

/// `Σ dλ_i² / λ_i` for a family with θ-independent eigenvectors.
pub fn qfi_quasiclassical(lams: &[f64], dlams: &[f64]) -> Result<f64> {
    if lams.len() != dlams.len() {
        return Err(Error::DimensionMismatch {
            expected: lams.len(),
            got: dlams.len(),
        });
    }
    let total: f64 = lams.iter().sum();
    if (total - 1.0).abs() > 1e-10 {
        return Err(Error::InvalidArgument(format!(
            "eigenvalues sum to {total}, expected 1"
        )));
    }
    let mut j = 0.0;
    for (i, (&l, &dl)) in lams.iter().zip(dlams).enumerate() {
        if l <= 0.0 {
            if dl != 0.0 {
                return Err(Error::ZeroEigenvalue(i));
            }
            continue;
        }
        j += dl * dl / l;
    }
    Ok(j)
}

/// QFI of a pure probe of dimension `d` through a channel with strength
/// `h(θ)`: `h'² / ((1 − h)(h + 1/(d − 1)))`.
pub fn qfi_h(h: f64, dh: f64, d: usize) -> Result<f64> {
    if d < 2 {
        return Err(Error::InvalidDimension(d));
    }
    if !(0.0..=1.0).contains(&h) {
        return Err(Error::InvalidArgument(format!("h = {h} not in [0, 1]")));
    }
    if h == 1.0 {
        return Err(Error::Divergent);
    }
    Ok(dh * dh / ((1.0 - h) * (h + 1.0 / (d as f64 - 1.0))))
}

fn recirculated(theta: f64, n: u32, dim: f64) -> f64 {
    let n_f = n as f64;
    let tn = theta.powi(n as i32);
    n_f * theta.powi(2 * (n as i32 - 1)) / ((1.0 - tn) * (tn + 1.0 / (dim - 1.0)))
}

/// Per-use QFI of a scheme.
pub fn qfi_scheme(spec: &SchemeSpec, theta: f64) -> Result<QfiPoint> {
    spec.validate()?;
    if !(0.0..1.0).contains(&theta) {
        return Err(Error::ThetaOutOfRange(theta));
    }
    let d = spec.d as f64;
    let n = spec.n;
    let j_per_use = match spec.kind {
        SchemeKind::O => recirculated(theta, n, d),
        SchemeKind::E => recirculated(theta, n, d * d),
        SchemeKind::B => {
            let t2n = theta.powi(2 * n as i32);
            2.0 * n as f64 * theta.powi(2 * (2 * n as i32 - 1)) / ((1.0 - t2n) * (t2n + 1.0 / (d * d - 1.0)))
        }
        SchemeKind::EEta { eta } => eta * eta / ((1.0 - eta * theta) * (eta * theta + 1.0 / (d * d - 1.0))),
        SchemeKind::Partial(_) => {
            return Err(Error::UnsupportedCombination(
                "partial entanglement has no scalar closed form here; use partial::qfi_partial".into(),
            ))
        }
    };
    Ok(QfiPoint {
        theta,
        d: spec.d,
        scheme: spec.clone(),
        j_per_use,
        channel_uses_per_shot: spec.channel_uses_per_shot(),
    })
}

/// Information gained by maximal entanglement with a noiseless ancilla over
/// an unentangled probe, `J_E − J_O = d(d − 1) / ((1 − θ)(1 − θ + dθ)(1 − θ + d²θ))`.
pub fn gain_e_over_o(theta: f64, d: usize) -> Result<f64> {
    if d < 2 {
        return Err(Error::InvalidDimension(d));
    }
    if !(0.0..=1.0).contains(&theta) {
        return Err(Error::ThetaOutOfRange(theta));
    }
    if theta == 1.0 {
        return Err(Error::Divergent);
    }
    let d = d as f64;
    Ok(d * (d - 1.0) / ((1.0 - theta) * (1.0 - theta + d * theta) * (1.0 - theta + d * d * theta)))
}

/// The θ above which scheme E with a depolarized ancilla (`η`) carries less
/// information than scheme O.
pub fn g_eta(eta: f64, d: usize) -> Result<f64> {
    if d < 2 {
        return Err(Error::InvalidDimension(d));
    }
    if !(eta > 0.0 && eta <= 1.0) {
        return Err(Error::InvalidArgument(format!("eta = {eta} not in (0, 1]")));
    }
    let d = d as f64;
    let num = eta * eta * (d + 1.0) - 1.0;
    let den = eta * (1.0 - eta) * (d * d - 2.0) + eta * eta * d;
    if den <= 0.0 || !den.is_finite() {
        return Err(Error::DegenerateDenominator);
    }
    Ok(num / den)
}

/// The θ* in `(0.3, 0.99)` where scheme B overtakes scheme O (per channel
/// use), located by bisection.
pub fn threshold_b_vs_o(d: usize) -> Result<f64> {
    if d < 2 {
        return Err(Error::InvalidDimension(d));
    }
    let gap = |t: f64| -> Result<f64> {
        Ok(qfi_scheme(&SchemeSpec::b(d), t)?.j_per_use - qfi_scheme(&SchemeSpec::o(d), t)?.j_per_use)
    };
    let (mut lo, mut hi) = THRESHOLD_BRACKET;
    let mut f_lo = gap(lo)?;
    let f_hi = gap(hi)?;
    if f_lo.signum() == f_hi.signum() {
        return Err(Error::NoRootFound { lo, hi });
    }
    while hi - lo > THRESHOLD_TOL {
        let mid = 0.5 * (lo + hi);
        let f_mid = gap(mid)?;
        if f_mid == 0.0 {
            return Ok(mid);
        }
        if f_mid.signum() == f_lo.signum() {
            lo = mid;
            f_lo = f_mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}
