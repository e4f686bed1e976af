//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! nonzero if any fails.

use std::collections::BTreeMap;
use std::f64::consts::TAU;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, ExitCode};
use std::time::Instant;

use num_complex::Complex64;
use orderstat::ambiguity::{ambiguity_demo, shift_field};
use orderstat::asymptotics::{clt_empirical_check, order_statistic_moments};
use orderstat::estimator::coefficient_distance;
use orderstat::field::dimension;
use orderstat::harness::{fixed_field, run_mse_sweep, ExperimentConfig, FieldSource, DEFAULT_SEED};
use orderstat::mc::{run_trials, trial_rng};
use orderstat::{
    build_dft_matrix, coeffs_from_samples, deploy, distortion, distortion_bound, estimate_coeffs, observe,
    random_field, samples_from_coeffs, FourierCoefficients,
};

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: String) -> Outcome {
    Outcome { pass, detail }
}

fn sweep_config(n_list: Vec<usize>) -> ExperimentConfig {
    ExperimentConfig {
        b_list: vec![1, 2, 3],
        n_list,
        trials: 500,
        base_seed: DEFAULT_SEED,
        field_source: FieldSource::Random,
        output_dir: PathBuf::from("unused"),
    }
}

/// n·mean distortion under π²b²(2b+1) at n ∈ {10³, 10⁴, 10⁵}, and the
/// log-log slope over n ∈ {10², …, 10⁵}. One sweep serves both.
fn bound_and_rate() -> (Outcome, Outcome) {
    let report = run_mse_sweep(&sweep_config(vec![100, 1_000, 10_000, 100_000]), None).expect("sweep");

    let mut violations = 0;
    let mut worst = 0.0f64;
    for row in report.rows.iter().filter(|r| r.n >= 1_000) {
        let ratio = row.n_times_mse / distortion_bound(row.b);
        worst = worst.max(ratio);
        if row.n_times_mse > distortion_bound(row.b) {
            violations += 1;
        }
    }
    let c1 = outcome(
        violations == 0,
        format!("{violations} violations in 9 cells, max n·mse/bound = {worst:.4}"),
    );

    let slopes: Vec<(usize, f64)> = [1, 2, 3]
        .iter()
        .map(|&b| (b, report.slope(b).expect("four points")))
        .collect();
    let c2 = outcome(
        slopes.iter().all(|&(_, s)| (-1.25..=-0.75).contains(&s)),
        slopes
            .iter()
            .map(|(b, s)| format!("b={b} slope={s:.4}"))
            .collect::<Vec<_>>()
            .join(", "),
    );
    (c1, c2)
}

fn median(mut v: Vec<f64>) -> f64 {
    v.sort_by(f64::total_cmp);
    let m = v.len() / 2;
    if v.len() % 2 == 0 {
        0.5 * (v[m - 1] + v[m])
    } else {
        v[m]
    }
}

/// Median coefficient error shrinks at least fivefold from n = 10³ to 10⁵.
fn consistency() -> Outcome {
    let b = 2;
    let field = fixed_field(None, b, DEFAULT_SEED).unwrap();
    let median_err = |n: usize| {
        median(run_trials(100, None, |i| {
            let mut rng = trial_rng(DEFAULT_SEED, b, n, i);
            let draw = deploy(n, &mut rng).unwrap();
            let est = estimate_coeffs(&observe(&field, &draw), b).unwrap();
            distortion(&est, &field).unwrap().sqrt()
        }))
    };
    let small = median_err(1_000);
    let large = median_err(100_000);
    outcome(
        small / large >= 5.0,
        format!("median err {small:.3e} at n=1e3, {large:.3e} at n=1e5, ratio {:.2}", small / large),
    )
}

/// Quantile and coefficient covariances for the b = 1 cosine field.
fn covariances() -> (Outcome, Outcome) {
    let field = FourierCoefficients::cosine(0.5, 0.5);
    let r = clt_empirical_check(&field, 1, 10_000, 10_000, DEFAULT_SEED, None).expect("clt check");
    let ku = r.k_u_frobenius_rel_err.expect("nonzero K_U");
    let ka = r.frobenius_rel_err.expect("nonzero K_A");
    (
        outcome(ku <= 0.10, format!("K_U relative Frobenius error {ku:.4}")),
        outcome(ka <= 0.15, format!("K_A Hermitian relative Frobenius error {ka:.4}")),
    )
}

/// Single order statistic: scaled MSE bound and Beta variance.
fn order_statistics() -> Outcome {
    let ps = [1.0 / 3.0, 0.5, 2.0 / 3.0];
    let mut pass = true;
    let mut worst_mse = 0.0f64;
    let mut worst_z = 0.0f64;
    for n in [100, 1_000, 10_000] {
        let limit = 0.25 * (1.0 + 5.0 / (n as f64).sqrt());
        for m in order_statistic_moments(&ps, n, 100_000, DEFAULT_SEED, None).unwrap() {
            let z = (m.variance - m.beta_variance).abs() / m.stderr_variance;
            worst_mse = worst_mse.max(m.n_mse / limit);
            worst_z = worst_z.max(z);
            if m.n_mse > limit || z > 3.0 {
                pass = false;
                println!(
                    "    p={:.4} n={n}: n_mse={:.4} limit={limit:.4} z={z:.2}",
                    m.p, m.n_mse
                );
            }
        }
    }
    outcome(
        pass,
        format!("max n_mse/limit = {worst_mse:.4}, max |var - beta|/se = {worst_z:.2}"),
    )
}

/// Exact sup over all levels x of the difference between the fractions of
/// the M-point grid on which each field lies at or below x.
fn sup_level_difference(f: &FourierCoefficients, g: &FourierCoefficients, m: usize) -> f64 {
    let sorted = |c: &FourierCoefficients| {
        let mut v: Vec<f64> = (0..m).map(|i| c.eval(i as f64 / m as f64).re).collect();
        v.sort_by(f64::total_cmp);
        v
    };
    let (a, b) = (sorted(f), sorted(g));
    let (mut i, mut j, mut sup) = (0usize, 0usize, 0usize);
    while i < m || j < m {
        let x = match (a.get(i), b.get(j)) {
            (Some(&u), Some(&v)) => u.min(v),
            (Some(&u), None) => u,
            (None, Some(&v)) => v,
            (None, None) => unreachable!(),
        };
        while i < m && a[i] <= x {
            i += 1;
        }
        while j < m && b[j] <= x {
            j += 1;
        }
        sup = sup.max(i.abs_diff(j));
    }
    sup as f64 / m as f64
}

/// Shifted fields share their value law but differ in L².
fn ambiguity() -> Outcome {
    let m = 8192;
    let mut pass = true;
    let mut worst_gap = f64::NEG_INFINITY;
    let mut min_dist = f64::INFINITY;
    for i in 0..10 {
        let b = 1 + i % 4;
        let field = random_field(b, &mut trial_rng(DEFAULT_SEED, b, 0, i), true);
        let tol = 4.0 * b as f64 / m as f64 + 1e-9;
        for theta in [0.1, 1.0 / 3.0, 0.7] {
            let shifted = shift_field(&field, theta);
            let sup = sup_level_difference(&field, &shifted, m);
            let report = ambiguity_demo(&field, theta, 1_000, m, DEFAULT_SEED).unwrap().report;
            let dist = coefficient_distance(&field, &shifted).unwrap();
            // Independent: Σ|a_k|² |1 - e^{-j2πkθ}|²
            let direct: f64 = (-(b as i64)..=b as i64)
                .map(|k| {
                    let a = field.coeff(k).unwrap();
                    (a * (Complex64::new(1.0, 0.0) - Complex64::from_polar(1.0, -TAU * k as f64 * theta))).norm_sqr()
                })
                .sum();
            assert!((dist - direct).abs() < 1e-12);
            assert!((report.distortion_between_fields - dist).abs() < 1e-15);
            worst_gap = worst_gap.max(sup.max(report.sup_cdf_diff_theory) - tol);
            min_dist = min_dist.min(dist);
            if sup > tol || report.sup_cdf_diff_theory > tol || dist <= 0.01 {
                pass = false;
                println!("    field {i} (b={b}) θ={theta:.4}: sup={sup:.3e} tol={tol:.3e} ‖g-g_θ‖²={dist:.4}");
            }
        }
    }
    outcome(
        pass,
        format!("max (sup diff - tolerance) = {worst_gap:.3e}, min ‖g-g_θ‖² = {min_dist:.4}"),
    )
}

/// DFT round trip, Parseval against quadrature, and Φ†Φ = (2b+1)I.
fn linear_algebra() -> Outcome {
    let mut roundtrip = 0.0f64;
    let mut parseval = 0.0f64;
    let mut ortho = 0.0f64;
    for b in 0..=8usize {
        let d = dimension(b);
        let mut rng = trial_rng(DEFAULT_SEED, b, 0, 0);
        for real in [true, false] {
            let f = random_field(b, &mut rng, real);
            let back = coeffs_from_samples(b, &samples_from_coeffs(&f)).unwrap();
            for (x, y) in back.coeffs().iter().zip(f.coeffs()) {
                roundtrip = roundtrip.max((x - y).norm());
            }

            let energy: f64 = f.coeffs().iter().map(|a| a.norm_sqr()).sum();
            let q = 4096;
            let quad = (0..q).map(|i| f.eval(i as f64 / q as f64).norm_sqr()).sum::<f64>() / q as f64;
            parseval = parseval.max(((quad - energy) / energy).abs());
        }

        let phi = build_dft_matrix(b as i64).unwrap();
        let gram = phi.adjoint() * phi.matrix();
        for i in 0..d {
            for j in 0..d {
                let want = if i == j { d as f64 } else { 0.0 };
                ortho = ortho.max((gram[(i, j)] - Complex64::new(want, 0.0)).norm());
            }
        }
    }
    outcome(
        roundtrip <= 1e-10 && parseval <= 1e-6 && ortho <= 1e-10,
        format!("round trip {roundtrip:.2e}, Parseval {parseval:.2e}, Φ†Φ deviation {ortho:.2e}"),
    )
}

fn collect_files(root: &Path, dir: &Path, out: &mut BTreeMap<PathBuf, Vec<u8>>) {
    for entry in fs::read_dir(dir).unwrap() {
        let path = entry.unwrap().path();
        if path.is_dir() {
            collect_files(root, &path, out);
        } else {
            out.insert(path.strip_prefix(root).unwrap().to_path_buf(), fs::read(&path).unwrap());
        }
    }
}

/// Every subcommand produces byte-identical files and stdout at 1 and 8 workers.
fn determinism() -> Outcome {
    let runs: &[&[&str]] = &[
        &["gen-field", "--b", "3", "--seed", "17", "--out", "field"],
        &["sample", "--field", "field/field.json", "--n", "5000", "--seed", "17", "--out", "samples"],
        &["estimate", "--samples", "samples/samples.csv", "--out", "est_samples"],
        &["estimate", "--field", "field/field.json", "--n", "5000", "--seed", "17", "--out", "est_field"],
        &["mse-sweep", "--b", "1,2,3", "--n", "100,1000,10000", "--trials", "64", "--seed", "17", "--out", "sweep"],
        &["mse-sweep", "--field", "field/field.json", "--b", "3,4", "--n", "500", "--trials", "32", "--out", "sweep_fixed"],
        &["clt-check", "--b", "1,2", "--n", "1000", "--trials", "200", "--seed", "17", "--out", "clt"],
        &["ambiguity-demo", "--b", "3", "--theta", "0.4", "--n", "4000", "--seed", "17", "--out", "amb"],
    ];
    let tmp = tempfile::tempdir().unwrap();
    let mut trees = Vec::new();
    for workers in ["1", "8"] {
        let dir = tmp.path().join(format!("w{workers}"));
        fs::create_dir(&dir).unwrap();
        let mut files = BTreeMap::new();
        for (i, args) in runs.iter().enumerate() {
            let out = Command::new(env!("CARGO_BIN_EXE_orderstat"))
                .current_dir(&dir)
                .env("ORDERSTAT_THREADS", workers)
                .args(*args)
                .output()
                .unwrap();
            if !out.status.success() {
                return outcome(
                    false,
                    format!("`{}` failed: {}", args.join(" "), String::from_utf8_lossy(&out.stderr)),
                );
            }
            files.insert(PathBuf::from(format!("stdout-{i}")), out.stdout);
        }
        collect_files(&dir, &dir, &mut files);
        trees.push(files);
    }
    let differing: Vec<String> = trees[0]
        .iter()
        .filter(|(k, v)| trees[1].get(*k) != Some(v))
        .map(|(k, _)| k.display().to_string())
        .collect();
    let same_names = trees[0].keys().eq(trees[1].keys());
    outcome(
        differing.is_empty() && same_names,
        if differing.is_empty() {
            format!("{} outputs identical across 1 and 8 workers", trees[0].len())
        } else {
            format!("differing outputs: {}", differing.join(", "))
        },
    )
}

fn main() -> ExitCode {
    let start = Instant::now();
    let mut results: Vec<(u32, &str, Outcome)> = Vec::new();

    let t = Instant::now();
    let (c1, c2) = bound_and_rate();
    println!("  (distortion sweep: {:.1}s)", t.elapsed().as_secs_f64());
    results.push((1, "distortion bound", c1));
    results.push((2, "O(1/n) rate", c2));
    results.push((3, "consistency", consistency()));
    let (c4, c5) = covariances();
    results.push((4, "quantile covariance", c4));
    results.push((5, "coefficient covariance", c5));
    results.push((6, "order statistic moments", order_statistics()));
    results.push((7, "shift ambiguity", ambiguity()));
    results.push((8, "DFT linear algebra", linear_algebra()));
    results.push((9, "determinism", determinism()));

    let mut failed = 0;
    for (id, name, o) in &results {
        println!("{} criterion {id} ({name}): {}", if o.pass { "PASS" } else { "FAIL" }, o.detail);
        if !o.pass {
            failed += 1;
        }
    }
    println!(
        "acceptance: {} passed, {failed} failed in {:.1}s",
        results.len() - failed,
        start.elapsed().as_secs_f64()
    );
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
