//! Acceptance suite: one line per criterion, non-zero exit if any fails.

use std::path::Path;
use std::process::Command;
use std::time::Instant;

use qfi_probe::oracle::random_povm;
use qfi_probe::partial::{l_dx_closed_form, qfi_subspace, score_diag_oracle};
use qfi_probe::{
    classical_fisher, crb_experiment, family, g_eta, optimal_projectors, qfi_numeric, qfi_partial, qfi_scheme,
    threshold_b_vs_o, verify_max_eig, Result, SchemeSpec, SchmidtVector,
};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

type Outcome = std::result::Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(f64::MIN_POSITIVE)
}

fn grid(start: f64, stop: f64, step: f64) -> Vec<f64> {
    let n = ((stop - start) / step + 1e-9).floor() as usize + 1;
    (0..n)
        .map(|k| ((start + k as f64 * step) * 1e12).round() / 1e12)
        .collect()
}

fn check(ok: bool, detail: String) -> Outcome {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn lift<T>(r: Result<T>) -> std::result::Result<T, String> {
    r.map_err(|e| format!("library error: {e}"))
}

/// Every scheme of criteria 2 and 8.
fn scheme_grid() -> Vec<SchemeSpec> {
    let mut specs = Vec::new();
    for d in 2..=5 {
        for n in 1..=3 {
            specs.push(SchemeSpec::o(d).with_circulations(n));
            specs.push(SchemeSpec::e(d).with_circulations(n));
            specs.push(SchemeSpec::b(d).with_circulations(n));
        }
        for eta in [0.8, 0.9, 1.0] {
            specs.push(SchemeSpec::e_eta(d, eta));
        }
    }
    specs
}

fn c1_spot_values() -> Outcome {
    let e = SchemeSpec::e(2);
    let o2 = SchemeSpec::o(2).with_circulations(2);
    let je = lift(qfi_scheme(&e, 0.9))?.j_per_use;
    let je_num = lift(qfi_numeric(&lift(family(&e))?, 0.9))?;
    let jo2 = lift(qfi_scheme(&o2, 0.9))?.per_shot();
    let jo2_num = lift(qfi_numeric(&lift(family(&o2))?, 0.9))?;
    let ok = [je, je_num].iter().all(|v| (v - 8.11).abs() <= 0.005)
        && [jo2, jo2_num].iter().all(|v| (v - 9.42).abs() <= 0.005);
    check(
        ok,
        format!("J_E,1={je:.6} (oracle {je_num:.6}); 2*J_O,2={jo2:.6} (oracle {jo2_num:.6})"),
    )
}

fn c2_oracle_equivalence() -> Outcome {
    let mut worst: f64 = 0.0;
    let mut count = 0;
    for spec in scheme_grid() {
        let fam = lift(family(&spec))?;
        for theta in grid(0.1, 0.9, 0.1) {
            let closed = lift(qfi_scheme(&spec, theta))?.per_shot();
            let numeric = lift(qfi_numeric(&fam, theta))?;
            worst = worst.max(rel(numeric, closed));
            count += 1;
        }
    }
    check(
        worst <= 1e-6,
        format!("{count} points, max rel err {worst:.3e} (tol 1e-6)"),
    )
}

fn c3_partial_formula() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let (mut worst_j, mut worst_l): (f64, f64) = (0.0, 0.0);
    for d in 2..=6 {
        for _ in 0..200 {
            let psi = lift(SchmidtVector::sample(d, &mut rng))?;
            let fam = lift(family(&SchemeSpec::partial(psi.clone())))?;
            for theta in [0.1, 0.3, 0.5, 0.7, 0.9] {
                let j = lift(qfi_partial(&psi, theta))?;
                let j_num = lift(qfi_numeric(&fam, theta))?;
                worst_j = worst_j.max(rel(j, j_num));
                let closed = lift(l_dx_closed_form(&psi, theta))?;
                let oracle = lift(score_diag_oracle(&psi, theta))?.l_dx;
                worst_l = worst_l.max((closed - oracle).abs() / oracle.abs().max(1.0));
            }
        }
    }
    check(
        worst_j <= 1e-6 && worst_l <= 1e-8,
        format!("1000 probes x 5 theta: max rel err J {worst_j:.3e} (tol 1e-6), lDx {worst_l:.3e} (tol 1e-8)"),
    )
}

fn c4_sandwich() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let thetas = grid(0.05, 0.95, 0.05);
    let mut min_slack = f64::INFINITY;
    for d in 2..=6 {
        let j_o: Vec<f64> = thetas
            .iter()
            .map(|&t| qfi_scheme(&SchemeSpec::o(d), t).unwrap().j_per_use)
            .collect();
        let j_e: Vec<f64> = thetas
            .iter()
            .map(|&t| qfi_scheme(&SchemeSpec::e(d), t).unwrap().j_per_use)
            .collect();
        for _ in 0..1000 {
            let psi = lift(SchmidtVector::sample(d, &mut rng))?;
            for (k, &theta) in thetas.iter().enumerate() {
                let j = lift(qfi_partial(&psi, theta))?;
                min_slack = min_slack.min(j - j_o[k]).min(j_e[k] - j);
            }
        }
    }
    let mut worst_sub: f64 = 0.0;
    for (d, d_o) in [(4, 2), (6, 3)] {
        let psi = lift(SchmidtVector::subspace(d, d_o))?;
        for theta in grid(0.05, 0.95, 0.05) {
            let j = lift(qfi_partial(&psi, theta))?;
            worst_sub = worst_sub.max((j - qfi_subspace(theta, d, d_o)).abs());
        }
    }
    check(
        min_slack >= -1e-9 && worst_sub <= 1e-10,
        format!("min sandwich slack {min_slack:.3e} (tol -1e-9); subspace max abs err {worst_sub:.3e} (tol 1e-10)"),
    )
}

fn c5_max_eigenvalue() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let (mut worst_lam, mut worst_res): (f64, f64) = (0.0, 0.0);
    let mut count = 0;
    for d in 2..=8 {
        let mut taken = 0;
        while taken < 500 {
            let psi = lift(SchmidtVector::sample(d, &mut rng))?;
            if !psi.is_strictly_positive() {
                continue;
            }
            let r = lift(verify_max_eig(&psi))?;
            worst_lam = worst_lam.max((r.lambda_max - (d as f64 - 1.0)).abs());
            worst_res = worst_res.max(r.residual);
            taken += 1;
            count += 1;
        }
    }
    check(
        worst_lam <= 1e-9 && worst_res <= 1e-9,
        format!("{count} probes: max |lambda_max-(d-1)| {worst_lam:.3e}, max residual {worst_res:.3e} (tol 1e-9)"),
    )
}

fn c6_thresholds() -> Outcome {
    let t2 = lift(threshold_b_vs_o(2))?;
    let ts: Vec<f64> = (2..=10)
        .map(threshold_b_vs_o)
        .collect::<Result<_>>()
        .map_err(|e| e.to_string())?;
    let increasing = ts.windows(2).all(|w| w[1] > w[0]);
    let floor = 1.0 / 3f64.sqrt();
    let above = ts.iter().all(|&t| t >= floor - 1e-9);
    let mut worst_g: f64 = 0.0;
    for eta in [0.7, 0.8, 0.9] {
        for d in [2, 3, 5] {
            let g = lift(g_eta(eta, d))?;
            let je = lift(qfi_scheme(&SchemeSpec::e_eta(d, eta), g))?.j_per_use;
            let jo = lift(qfi_scheme(&SchemeSpec::o(d), g))?.j_per_use;
            worst_g = worst_g.max((je - jo).abs());
        }
    }
    check(
        (t2 - floor).abs() <= 1e-6 && increasing && above && worst_g <= 1e-8,
        format!(
            "theta*(2)={t2:.9}, increasing={increasing}, all >= 1/sqrt3: {above}, g(eta) gap {worst_g:.3e} (tol 1e-8)"
        ),
    )
}

fn c7_recirculation() -> Outcome {
    let thetas = grid(0.01, 0.99, 0.01);
    let mut worst_mono = f64::NEG_INFINITY;
    let mut worst_lift: f64 = 0.0;
    for d in 2..=6 {
        for &theta in &thetas {
            for n in 1..=5 {
                let j = |spec: SchemeSpec| qfi_scheme(&spec, theta).map(|p| p.j_per_use);
                let o_n = lift(j(SchemeSpec::o(d).with_circulations(n)))?;
                let o_next = lift(j(SchemeSpec::o(d).with_circulations(n + 1)))?;
                worst_mono = worst_mono.max(o_next - o_n);
                let e_n = lift(j(SchemeSpec::e(d).with_circulations(n)))?;
                let o_lift = lift(j(SchemeSpec::o(d * d).with_circulations(n)))?;
                let b_n = lift(j(SchemeSpec::b(d).with_circulations(n)))?;
                let o_lift2 = lift(j(SchemeSpec::o(d * d).with_circulations(2 * n)))?;
                worst_lift = worst_lift.max((e_n - o_lift).abs()).max((b_n - o_lift2).abs());
            }
        }
    }
    check(
        worst_mono <= 1e-12 && worst_lift <= 1e-12,
        format!("max J_O,n+1 - J_O,n = {worst_mono:.3e}; max lift defect {worst_lift:.3e} (tol 1e-12)"),
    )
}

fn c8_attainment() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let mut worst_opt: f64 = 0.0;
    let mut worst_excess = f64::NEG_INFINITY;
    for spec in scheme_grid() {
        let fam = lift(family(&spec))?;
        let povm = lift(optimal_projectors(&spec))?;
        let dim = spec.output_dim();
        let randoms: Vec<_> = (0..3)
            .map(|k| random_povm(dim, dim + k, &mut rng))
            .collect::<Result<_>>()
            .map_err(|e| e.to_string())?;
        for theta in grid(0.1, 0.9, 0.1) {
            let q = lift(qfi_numeric(&fam, theta))?;
            let f = lift(classical_fisher(&povm, &fam, theta))?;
            worst_opt = worst_opt.max((f - q).abs() / q.max(1.0));
            for r in &randoms {
                let fr = lift(classical_fisher(r, &fam, theta))?;
                worst_excess = worst_excess.max((fr - q) / q.max(1.0));
            }
        }
    }
    check(
        worst_opt <= 1e-8 && worst_excess <= 1e-8,
        format!("max |F_opt - J| {worst_opt:.3e}; max random-POVM excess {worst_excess:.3e} (tol 1e-8)"),
    )
}

fn c9_cramer_rao() -> Outcome {
    let (lo, hi) = (0.9, 1.15);
    let cases = [("E", SchemeSpec::e(2), 2024u64), ("O", SchemeSpec::o(3), 7u64 << 40)];
    let mut parts = Vec::new();
    let mut ok = true;
    for (name, spec, seed) in cases {
        let r = lift(crb_experiment(&spec, 0.5, 100_000, 400, seed))?;
        ok &= (lo..=hi).contains(&r.ratio);
        parts.push(format!("{name} d={} ratio={:.4}", spec.d, r.ratio));
    }
    check(ok, format!("{} (band [{lo}, {hi}])", parts.join(", ")))
}

fn run_cli(args: &[&str], out: &Path) -> std::result::Result<(Vec<u8>, Vec<u8>), String> {
    let status = Command::new(env!("CARGO_BIN_EXE_qfi-probe"))
        .args(args)
        .arg("--out")
        .arg(out)
        .env_remove("QFI_PROBE_SEED")
        .status()
        .map_err(|e| e.to_string())?;
    if !status.success() {
        return Err(format!("{args:?} exited with {status}"));
    }
    let csv = std::fs::read(out).map_err(|e| e.to_string())?;
    let manifest = std::fs::read(qfi_probe_cli::manifest_path(out)).map_err(|e| e.to_string())?;
    Ok((csv, manifest))
}

fn c10_determinism() -> Outcome {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let runs: [&[&str]; 4] = [
        &[
            "curves",
            "--d",
            "2,3",
            "--schemes",
            "O,E,B,E_eta",
            "--n",
            "1,2",
            "--theta-step",
            "0.07",
        ],
        &["thresholds"],
        &[
            "partial",
            "--d",
            "3,4",
            "--samples",
            "10",
            "--seed",
            "11",
            "--theta-step",
            "0.1",
        ],
        &["crb", "--d", "2", "--shots", "2000", "--trials", "30", "--seed", "5"],
    ];
    let mut bytes = 0;
    for (k, args) in runs.iter().enumerate() {
        let first = run_cli(args, &dir.path().join(format!("a{k}.csv")))?;
        let second = run_cli(args, &dir.path().join(format!("b{k}.csv")))?;
        if first.0 != second.0 {
            return Err(format!("{} CSV differs between runs", args[0]));
        }
        let strip = |m: &[u8]| {
            String::from_utf8_lossy(m)
                .lines()
                .filter(|l| !l.starts_with("out="))
                .collect::<Vec<_>>()
                .join("\n")
        };
        if strip(&first.1) != strip(&second.1) {
            return Err(format!("{} manifest differs between runs", args[0]));
        }
        bytes += first.0.len();
    }
    Ok(format!(
        "curves/thresholds/partial/crb byte-identical across two runs ({bytes} bytes)"
    ))
}

fn main() {
    let criteria: [Criterion; 10] = [
        ("reference spot values", c1_spot_values),
        ("closed form vs oracle", c2_oracle_equivalence),
        ("partial-entanglement formula", c3_partial_formula),
        ("sandwich inequality", c4_sandwich),
        ("max eigenvalue of A_d", c5_max_eigenvalue),
        ("thresholds", c6_thresholds),
        ("re-circulation and lifts", c7_recirculation),
        ("measurement attainment", c8_attainment),
        ("Cramer-Rao at desk scale", c9_cramer_rao),
        ("CLI determinism", c10_determinism),
    ];
    let mut failures = 0;
    for (k, (name, f)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = f();
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("criterion {:>2} PASS  {name}: {detail} [{secs:.1}s]", k + 1),
            Err(detail) => {
                failures += 1;
                println!("criterion {:>2} FAIL  {name}: {detail} [{secs:.1}s]", k + 1);
            }
        }
    }
    println!("acceptance: {} passed, {failures} failed", criteria.len() - failures);
    if failures > 0 {
        std::process::exit(1);
    }
}
