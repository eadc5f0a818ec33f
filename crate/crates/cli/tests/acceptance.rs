//! Acceptance suite. Runs every criterion at its stated tolerance and time
//! limit, prints one PASS/FAIL line each, and exits non-zero on any failure.
//!
//! Run with `cargo test -p bellsym-cli --test acceptance`.

mod common;

use std::time::{Duration, Instant};

use bellsym_core::channel::apply_dephasing_factors;
use bellsym_core::kraus::choi_of_channel;
use bellsym_core::random::{haar_unitary, random_density_matrix, random_pure_state, stream_rng};
use bellsym_core::spinbath::{decoherence_factor, random_bath, reduced_density, CentralState};
use bellsym_core::symmetry::{
    asymptotic_symmetric_probability, outcome_analysis, symmetric_probability,
};
use bellsym_core::{
    apply_dephasing, apply_kraus, c64, canonical_kraus, kraus_from_choi,
    maximize_symmetric_probability, mix_kraus, BellState, ChannelParams, ComplexMatrix,
    ConstraintPattern, DensityMatrix, DephasingFactors, OptimizerConfig, UnitaryMixer,
};
use common::bellsym;

const SEED: u64 = 0;

type Check<'a> = Box<dyn Fn() -> Outcome + 'a>;

struct Outcome {
    passed: bool,
    detail: String,
}

fn outcome(passed: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        passed,
        detail: detail.into(),
    }
}

fn haar_mixer(seed: u64, k: u64) -> UnitaryMixer {
    UnitaryMixer::new(haar_unitary(&mut stream_rng(seed, k), 4)).expect("Haar unitary")
}

/// Hand-applied dephasing: entry `(i, j)` times `γ` per qubit whose bit differs.
fn dephased_by_hand(rho0: &ComplexMatrix, gamma: f64) -> ComplexMatrix {
    let mut out = rho0.clone();
    for i in 0..4usize {
        for j in 0..4usize {
            out[(i, j)] *= gamma.powi((i ^ j).count_ones() as i32);
        }
    }
    out
}

fn gamma_grid(n: usize) -> Vec<f64> {
    (0..=n).map(|k| k as f64 / n as f64).collect()
}

fn c1_kraus_consistency() -> Outcome {
    let mut worst = 0.0f64;
    for (g_idx, &gamma) in gamma_grid(100).iter().enumerate() {
        let set = canonical_kraus(gamma).unwrap();
        let f = DephasingFactors::identical(gamma).unwrap();
        let mut rng = stream_rng(SEED, 1_000 + g_idx as u64);
        for _ in 0..100 {
            let rho = random_density_matrix(&mut rng);
            let a = apply_kraus(&set, &rho).unwrap();
            let b = apply_dephasing_factors(&rho, f).unwrap();
            worst = worst.max(a.matrix().max_abs_diff(b.matrix()));
        }
    }
    outcome(
        worst <= 1e-12,
        format!("max entry error {worst:.2e} (tol 1e-12)"),
    )
}

fn c2_completeness() -> Outcome {
    let mut canonical = 0.0f64;
    let mut extracted = 0.0f64;
    for &gamma in &gamma_grid(100) {
        canonical = canonical.max(canonical_kraus(gamma).unwrap().completeness_residual());
        let params = params_for_gamma(gamma);
        let set = kraus_from_choi(&choi_of_channel(&params).unwrap()).unwrap();
        extracted = extracted.max(set.completeness_residual());
    }
    let mut mixed = 0.0f64;
    for k in 0..1000u64 {
        let gamma = k as f64 / 999.0;
        let set = mix_kraus(&canonical_kraus(gamma).unwrap(), &haar_mixer(SEED + 2, k)).unwrap();
        mixed = mixed.max(set.completeness_residual());
    }
    let worst = canonical.max(extracted).max(mixed);
    outcome(
        worst <= 1e-10,
        format!("residual canonical {canonical:.2e}, choi {extracted:.2e}, 1000 mixed {mixed:.2e} (tol 1e-10)"),
    )
}

/// Unit rate and the time that gives `gamma`; `t = 2000` underflows to `γ = 0` exactly.
fn params_for_gamma(gamma: f64) -> ChannelParams {
    let time = if gamma == 0.0 {
        2000.0
    } else {
        -2.0 * gamma.ln()
    };
    ChannelParams::identical(1.0, time).unwrap()
}

fn c3_choi_round_trip() -> Outcome {
    let mut worst = 0.0f64;
    for (g_idx, &gamma) in gamma_grid(10).iter().enumerate() {
        let params = params_for_gamma(gamma);
        let set = kraus_from_choi(&choi_of_channel(&params).unwrap()).unwrap();
        let mut rng = stream_rng(SEED + 3, g_idx as u64);
        for _ in 0..100 {
            let rho = random_density_matrix(&mut rng);
            let a = apply_kraus(&set, &rho).unwrap();
            let b = apply_dephasing(&rho, &params).unwrap();
            worst = worst.max(a.matrix().max_abs_diff(b.matrix()));
        }
    }
    outcome(
        worst <= 1e-9,
        format!("11 gammas x 100 states, max error {worst:.2e} (tol 1e-9)"),
    )
}

fn c4_b1_b2_symmetry() -> Outcome {
    let mut worst_asym = 0.0f64;
    let mut worst_total = 0.0f64;
    let mut missing = 0usize;
    for k in 0..1000u64 {
        let mixer = haar_mixer(SEED + 4, k);
        for gamma in [0.0, 0.5, 1.0] {
            for bell in [BellState::B1, BellState::B2] {
                for o in outcome_analysis(bell, gamma, &mixer, 1e-10).unwrap() {
                    if o.probability > 1e-12 {
                        match o.asymmetry {
                            Some(a) => worst_asym = worst_asym.max(a),
                            None => missing += 1,
                        }
                    }
                }
                let p = symmetric_probability(bell, gamma, &mixer, 1e-10).unwrap();
                worst_total = worst_total.max((p - 1.0).abs());
            }
        }
    }
    outcome(
        worst_asym <= 1e-10 && worst_total <= 1e-10 && missing == 0,
        format!("max asymmetry {worst_asym:.2e}, max |P_sym - 1| {worst_total:.2e} (tol 1e-10)"),
    )
}

fn run_cli_to(args: &[&str], path: &std::path::Path) -> Result<Vec<u8>, String> {
    let mut full: Vec<&str> = args.to_vec();
    let p = path.to_str().unwrap();
    full.extend(["--output", p]);
    let out = bellsym(&full);
    if !out.status.success() {
        return Err(format!(
            "bellsym {args:?} exited {:?}: {}",
            out.status.code(),
            String::from_utf8_lossy(&out.stderr)
        ));
    }
    std::fs::read(path).map_err(|e| e.to_string())
}

const SCAN_ARGS: [&str; 9] = [
    "--seed",
    "0",
    "symmetry-scan",
    "--state",
    "B3",
    "--gamma",
    "0",
    "--samples",
    "100000",
];
const MC_ARGS: [&str; 11] = [
    "--seed",
    "0",
    "montecarlo",
    "--state",
    "plus",
    "--rate",
    "1",
    "--time",
    "1",
    "--trajectories",
    "100000",
];

fn c5_b3_bound(dir: &std::path::Path) -> Outcome {
    // (a) Haar scan through the CLI, so criterion 10 can diff its output.
    let bytes = match run_cli_to(&SCAN_ARGS, &dir.join("scan_1.json")) {
        Ok(b) => b,
        Err(e) => return outcome(false, e),
    };
    let report: serde_json::Value = serde_json::from_slice(&bytes).unwrap();
    let scan_max = report["p_max"].as_f64().unwrap();
    let a_ok = scan_max <= 0.5 + 1e-9;

    // (b) Optimizer on each pattern.
    let mut opt = Vec::new();
    for n in 1..=3 {
        let pattern = ConstraintPattern::leading(n).unwrap();
        let r = maximize_symmetric_probability(
            BellState::B3,
            0.0,
            &pattern,
            &OptimizerConfig::default(),
        )
        .unwrap();
        opt.push(r.p_max);
    }
    let b_ok = opt.iter().all(|p| (p - 0.5).abs() <= 1e-6);

    // (c) Constant objective on the three-row pattern.
    let pattern = ConstraintPattern::leading(3).unwrap();
    let mut c_worst = 0.0f64;
    for k in 0..10_000u64 {
        let mixer = pattern.sample_mixer(&mut stream_rng(SEED + 5, k));
        let p = symmetric_probability(BellState::B3, 0.0, &mixer, 1e-9).unwrap();
        c_worst = c_worst.max((p - 0.5).abs());
    }
    let c_ok = c_worst <= 1e-12;

    outcome(
        a_ok && b_ok && c_ok,
        format!(
            "(a) Haar max {scan_max:.3e} <= 0.5+1e-9: {a_ok}; (b) optimum {{1}} {:.12} {{1,2}} {:.12} {{1,2,3}} {:.12} within 1e-6: {b_ok}; (c) max |p-0.5| {c_worst:.2e} (tol 1e-12): {c_ok}",
            opt[0], opt[1], opt[2]
        ),
    )
}

fn c6_closed_form() -> Outcome {
    let mut worst = 0.0f64;
    let mut worst_lib = 0.0f64;
    for n in 1..=3 {
        let pattern = ConstraintPattern::leading(n).unwrap();
        for k in 0..1000u64 {
            let mixer = pattern.sample_mixer(&mut stream_rng(SEED + 6 + n as u64, k));
            let p = symmetric_probability(BellState::B3, 0.0, &mixer, 1e-9).unwrap();
            // Rows with u_μ2 = 0 leave r = s = (u_μ3 + u_μ4)/2.
            let by_hand: f64 = (0..n)
                .map(|mu| 0.25 * (mixer.entry(mu, 2) + mixer.entry(mu, 3)).norm_sqr())
                .sum();
            worst = worst.max((p - by_hand).abs());
            worst_lib =
                worst_lib.max((p - asymptotic_symmetric_probability(&mixer, &pattern)).abs());
        }
    }
    outcome(
        worst <= 1e-12 && worst_lib <= 1e-12,
        format!("3 patterns x 1000 mixers, max deviation {worst:.2e} (library form {worst_lib:.2e}, tol 1e-12)"),
    )
}

fn c7_monte_carlo(dir: &std::path::Path) -> Outcome {
    let bytes = match run_cli_to(&MC_ARGS, &dir.join("mc_1.json")) {
        Ok(b) => b,
        Err(e) => return outcome(false, e),
    };
    let report: serde_json::Value = serde_json::from_slice(&bytes).unwrap();
    let plus = DensityMatrix::from_pure(&[c64(0.5, 0.0); 4]).unwrap();
    let gamma = (-0.5f64).exp();
    let exact = dephased_by_hand(plus.matrix(), gamma);
    let rho = report["rho"].as_array().unwrap();
    let se = report["entry_stderr"].as_array().unwrap();
    let mut worst_sigma = 0.0f64;
    for k in 0..16 {
        let e = exact[(k / 4, k % 4)];
        for (part, target) in [e.re, e.im].into_iter().enumerate() {
            let mc = rho[k][part].as_f64().unwrap();
            let s = se[k][part].as_f64().unwrap();
            let dev = (mc - target).abs();
            let sigma = if s > 0.0 {
                dev / s
            } else if dev == 0.0 {
                0.0
            } else {
                f64::INFINITY
            };
            worst_sigma = worst_sigma.max(sigma);
        }
    }
    // Single-qubit coherences of |++⟩ are 1/4 · γ.
    let mut single = Vec::new();
    for i in 0..4usize {
        for j in 0..4usize {
            if (i ^ j).count_ones() == 1 {
                single.push(rho[i * 4 + j][0].as_f64().unwrap() / 0.25);
            }
        }
    }
    let estimate = single.iter().sum::<f64>() / single.len() as f64;
    let rel = (estimate - gamma).abs() / gamma;
    outcome(
        worst_sigma <= 4.0 && rel <= 0.01,
        format!(
            "worst entry {worst_sigma:.2} standard errors (limit 4); gamma estimate {estimate:.6} vs {gamma:.6}, rel err {rel:.2e} (tol 1e-2)"
        ),
    )
}

fn c8_spinbath_equivalence() -> Outcome {
    let bath = random_bath(20, SEED + 8, true).unwrap();
    let times: Vec<f64> = (0..100).map(|k| 50.0 * k as f64 / 99.0).collect();
    let mut worst = 0.0f64;
    let mut rng = stream_rng(SEED + 8, 1);
    for _ in 0..100 {
        let v = random_pure_state(&mut rng);
        let psi = CentralState::new([v[0], v[1], v[2], v[3]]).unwrap();
        let rho0 = psi.density();
        for &t in &times {
            let r = decoherence_factor(&bath, t).unwrap();
            let quantum = reduced_density(&bath, &bath, &psi, t).unwrap();
            let classical =
                apply_dephasing_factors(&rho0, DephasingFactors::identical(r.re).unwrap()).unwrap();
            worst = worst.max(quantum.matrix().max_abs_diff(classical.matrix()));
        }
    }
    outcome(
        worst <= 1e-12,
        format!("100 states x 100 times, max error {worst:.2e} (tol 1e-12)"),
    )
}

fn c9_decoherence_factor() -> Outcome {
    let times: Vec<f64> = (0..100).map(|k| 50.0 * k as f64 / 99.0).collect();
    let mut r0_exact = true;
    let mut max_abs = 0.0f64;
    let mut max_im = 0.0f64;
    for k in 0..100u64 {
        for equal in [false, true] {
            let bath = random_bath(20, SEED + 9_000 + k, equal).unwrap();
            r0_exact &= decoherence_factor(&bath, 0.0).unwrap() == c64(1.0, 0.0);
            for &t in &times {
                let r = decoherence_factor(&bath, t).unwrap();
                max_abs = max_abs.max(r.norm());
                if equal {
                    max_im = max_im.max(r.im.abs());
                }
            }
        }
    }
    outcome(
        r0_exact && max_abs <= 1.0 && max_im <= 1e-13,
        format!("r(0) == 1 exactly: {r0_exact}; max |r| {max_abs:.17}; equal-amplitude max |Im r| {max_im:.2e} (tol 1e-13)"),
    )
}

fn c10_determinism(dir: &std::path::Path) -> Outcome {
    let mut same = Vec::new();
    for (args, name) in [(&SCAN_ARGS[..], "scan"), (&MC_ARGS[..], "mc")] {
        let first = std::fs::read(dir.join(format!("{name}_1.json")));
        let second = run_cli_to(args, &dir.join(format!("{name}_2.json")));
        match (first, second) {
            (Ok(a), Ok(b)) => same.push((name, a == b)),
            (a, b) => {
                return outcome(
                    false,
                    format!("{name}: missing output ({:?} / {:?})", a.err(), b.err()),
                )
            }
        }
    }
    outcome(
        same.iter().all(|(_, s)| *s),
        same.iter()
            .map(|(n, s)| format!("{n} byte-identical: {s}"))
            .collect::<Vec<_>>()
            .join("; "),
    )
}

fn main() {
    let dir = tempfile::tempdir().expect("temp dir");
    let d = dir.path();
    let criteria: Vec<(u32, &str, Option<u64>, Check<'_>)> = vec![
        (
            1,
            "Kraus consistency",
            Some(5),
            Box::new(c1_kraus_consistency),
        ),
        (2, "Completeness", Some(5), Box::new(c2_completeness)),
        (3, "Choi round trip", Some(10), Box::new(c3_choi_round_trip)),
        (
            4,
            "B1/B2 symmetry preservation",
            Some(30),
            Box::new(c4_b1_b2_symmetry),
        ),
        (5, "B3 bound", Some(120), Box::new(|| c5_b3_bound(d))),
        (
            6,
            "Closed-form agreement",
            Some(10),
            Box::new(c6_closed_form),
        ),
        (
            7,
            "Monte-Carlo dephasing",
            Some(30),
            Box::new(|| c7_monte_carlo(d)),
        ),
        (
            8,
            "Spin-bath equivalence",
            Some(30),
            Box::new(c8_spinbath_equivalence),
        ),
        (
            9,
            "Decoherence-factor properties",
            Some(5),
            Box::new(c9_decoherence_factor),
        ),
        (10, "Determinism", None, Box::new(|| c10_determinism(d))),
    ];

    let mut failures = 0;
    for (id, name, limit, run) in &criteria {
        let start = Instant::now();
        let result = run();
        let elapsed = start.elapsed();
        let in_time = limit.is_none_or(|l| elapsed <= Duration::from_secs(l));
        let passed = result.passed && in_time;
        if !passed {
            failures += 1;
        }
        let limit = limit.map_or("no limit".to_string(), |l| format!("limit {l}s"));
        println!(
            "[{}] criterion {id:>2} {name}: {} [{:.2}s, {limit}]",
            if passed { "PASS" } else { "FAIL" },
            result.detail,
            elapsed.as_secs_f64(),
        );
    }
    println!(
        "acceptance: {} passed, {failures} failed",
        criteria.len() - failures
    );
    if failures > 0 {
        std::process::exit(1);
    }
}
