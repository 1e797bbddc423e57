//! The four subcommands. Each one renders a complete CSV document; grid
//! points are evaluated in parallel and assembled in a fixed order.

use qfi_probe::oracle::{CRB_MIN_SHOTS, CRB_THETA_RANGE};
use qfi_probe::{
    crb_experiment, family, g_eta, qfi_numeric, qfi_partial, qfi_scheme, threshold_b_vs_o, Error, SchemeSpec,
    SchmidtVector,
};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::config::{Command, RunConfig, SchemeName};
use crate::error::CliError;
use crate::format::fmt_num;

pub const CURVES_HEADER: &str = "scheme,d,n,eta,theta,j_per_use,j_numeric,rel_err";
pub const THRESHOLDS_HEADER: &str = "kind,d,eta,theta_star";
pub const PARTIAL_HEADER: &str = "psi,theta,j_partial,j_O,j_E,j_oracle,sandwich_ok";
pub const CRB_HEADER: &str = "scheme,d,n,eta,theta_true,n_shots,n_trials,mse,crb,ratio";

/// Slack allowed on each side of `J_O ≤ J ≤ J_E`.
pub const SANDWICH_SLACK: f64 = 1e-9;

/// Seed offset between consecutive CRB rows; trials within a row use
/// consecutive seeds, so rows never share a stream.
const CRB_ROW_STRIDE: u64 = 1 << 32;

pub fn render(cfg: &RunConfig) -> Result<String, CliError> {
    let (header, rows) = match cfg.command {
        Command::Curves => (CURVES_HEADER, curves(cfg)?),
        Command::Thresholds => (THRESHOLDS_HEADER, thresholds(cfg)?),
        Command::Partial => (PARTIAL_HEADER, partial(cfg)?),
        Command::Crb => (CRB_HEADER, crb(cfg)?),
    };
    let mut out = String::with_capacity(64 * (rows.len() + 1));
    out.push_str(header);
    out.push('\n');
    for row in rows {
        out.push_str(&row);
        out.push('\n');
    }
    Ok(out)
}

/// One (scheme, d, n, η) combination, in output order.
#[derive(Debug, Clone)]
struct SchemeCase {
    name: SchemeName,
    spec: SchemeSpec,
    n: u32,
    eta: Option<f64>,
}

/// Expands the scheme list. E_η only exists for `n = 1`, so other `n`
/// values are skipped for it.
fn scheme_cases(cfg: &RunConfig) -> Vec<SchemeCase> {
    let mut cases = Vec::new();
    for &name in &cfg.schemes {
        for &d in &cfg.d {
            for &n in &cfg.n {
                match name {
                    SchemeName::EEta => {
                        if n != 1 {
                            continue;
                        }
                        for &eta in &cfg.eta {
                            cases.push(SchemeCase {
                                name,
                                spec: SchemeSpec::e_eta(d, eta),
                                n,
                                eta: Some(eta),
                            });
                        }
                    }
                    _ => {
                        let spec = match name {
                            SchemeName::O => SchemeSpec::o(d),
                            SchemeName::E => SchemeSpec::e(d),
                            _ => SchemeSpec::b(d),
                        };
                        cases.push(SchemeCase {
                            name,
                            spec: spec.with_circulations(n),
                            n,
                            eta: None,
                        });
                    }
                }
            }
        }
    }
    cases
}

fn opt_num(x: Option<f64>) -> String {
    x.map(fmt_num).unwrap_or_default()
}

fn curves(cfg: &RunConfig) -> Result<Vec<String>, CliError> {
    let thetas = cfg.thetas();
    let jobs: Vec<(SchemeCase, f64)> = scheme_cases(cfg)
        .into_iter()
        .flat_map(|c| thetas.iter().map(move |&t| (c.clone(), t)))
        .collect();
    let rows = jobs
        .par_iter()
        .map(|(case, theta)| -> Result<String, Error> {
            let point = qfi_scheme(&case.spec, *theta)?;
            let uses = point.channel_uses_per_shot as f64;
            let j_numeric = qfi_numeric(&family(&case.spec)?, *theta)? / uses;
            let rel_err = (j_numeric - point.j_per_use).abs() / point.j_per_use.abs().max(f64::MIN_POSITIVE);
            Ok(format!(
                "{},{},{},{},{},{},{},{}",
                case.name,
                case.spec.d,
                case.n,
                opt_num(case.eta),
                fmt_num(*theta),
                fmt_num(point.j_per_use),
                fmt_num(j_numeric),
                fmt_num(rel_err)
            ))
        })
        .collect::<Result<Vec<_>, Error>>()?;
    Ok(rows)
}

fn thresholds(cfg: &RunConfig) -> Result<Vec<String>, CliError> {
    let b_vs_o = cfg
        .d
        .par_iter()
        .map(|&d| Ok(format!("B_vs_O,{d},,{}", fmt_num(threshold_b_vs_o(d)?))))
        .collect::<Result<Vec<_>, Error>>()?;
    let mut rows = b_vs_o;
    for &d in &cfg.d {
        for &eta in &cfg.eta {
            rows.push(format!("g_eta,{d},{},{}", fmt_num(eta), fmt_num(g_eta(eta, d)?)));
        }
    }
    Ok(rows)
}

/// The probe list: the inline ψ if given, otherwise `samples` random
/// vectors per d drawn from one stream seeded with the run seed.
fn partial_probes(cfg: &RunConfig) -> Result<Vec<SchmidtVector>, CliError> {
    if let Some(psi) = &cfg.psi {
        return SchmidtVector::new(psi.clone())
            .map(|p| vec![p])
            .map_err(|e| CliError::Config(format!("invalid psi: {e}")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut probes = Vec::with_capacity(cfg.d.len() * cfg.samples);
    for &d in &cfg.d {
        for _ in 0..cfg.samples {
            probes.push(SchmidtVector::sample(d, &mut rng)?);
        }
    }
    Ok(probes)
}

fn partial(cfg: &RunConfig) -> Result<Vec<String>, CliError> {
    let thetas = cfg.thetas();
    let probes = partial_probes(cfg)?;
    let jobs: Vec<(&SchmidtVector, f64)> = probes
        .iter()
        .flat_map(|p| thetas.iter().map(move |&t| (p, t)))
        .collect();
    let rows = jobs
        .par_iter()
        .map(|&(psi, theta)| -> Result<String, Error> {
            let d = psi.d();
            let j = qfi_partial(psi, theta)?;
            let j_o = qfi_scheme(&SchemeSpec::o(d), theta)?.j_per_use;
            let j_e = qfi_scheme(&SchemeSpec::e(d), theta)?.j_per_use;
            let j_oracle = qfi_numeric(&family(&SchemeSpec::partial(psi.clone()))?, theta)?;
            let ok = j >= j_o - SANDWICH_SLACK && j <= j_e + SANDWICH_SLACK;
            let psi_text = psi.as_slice().iter().map(|&x| fmt_num(x)).collect::<Vec<_>>().join(";");
            Ok(format!(
                "{psi_text},{},{},{},{},{},{ok}",
                fmt_num(theta),
                fmt_num(j),
                fmt_num(j_o),
                fmt_num(j_e),
                fmt_num(j_oracle)
            ))
        })
        .collect::<Result<Vec<_>, Error>>()?;
    Ok(rows)
}

fn crb(cfg: &RunConfig) -> Result<Vec<String>, CliError> {
    let (lo, hi) = CRB_THETA_RANGE;
    let thetas = cfg.thetas();
    if let Some(t) = thetas.iter().find(|t| !(lo..=hi).contains(*t)) {
        return Err(CliError::Config(format!(
            "crb needs theta within [{}, {}], got {}",
            fmt_num(lo),
            fmt_num(hi),
            fmt_num(*t)
        )));
    }
    if cfg.shots < CRB_MIN_SHOTS {
        return Err(CliError::Config(format!("crb needs shots >= {CRB_MIN_SHOTS}")));
    }
    let jobs: Vec<(SchemeCase, f64)> = scheme_cases(cfg)
        .into_iter()
        .flat_map(|c| thetas.iter().map(move |&t| (c.clone(), t)))
        .collect();
    // Rows run one after another; trials inside a row are already parallel.
    let mut rows = Vec::with_capacity(jobs.len());
    for (k, (case, theta)) in jobs.iter().enumerate() {
        let seed = cfg.seed.wrapping_add((k as u64).wrapping_mul(CRB_ROW_STRIDE));
        let r = crb_experiment(&case.spec, *theta, cfg.shots, cfg.trials, seed)?;
        rows.push(format!(
            "{},{},{},{},{},{},{},{},{},{}",
            case.name,
            case.spec.d,
            case.n,
            opt_num(case.eta),
            fmt_num(r.theta_true),
            r.n_shots,
            r.n_trials,
            fmt_num(r.mse),
            fmt_num(r.crb),
            fmt_num(r.ratio)
        ));
    }
    Ok(rows)
}
