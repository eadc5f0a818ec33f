use std::path::Path;

use bellsym_core::channel::gamma_factor;
use bellsym_core::kraus::choi_of_factors;
use bellsym_core::random::{haar_unitary, stream_rng};
use bellsym_core::spinbath::{random_bath_in, FrequencyRange};
use bellsym_core::symmetry::{
    brute_force_symmetry_scan, feasible_symmetry_scan, OptimizerStats, ScanSummary,
};
use bellsym_core::{
    apply_dephasing, c64, canonical_kraus, decoherence_factor, kraus_from_choi,
    maximize_symmetric_probability, mix_kraus, monte_carlo_dephasing, reduced_density,
    single_flip_decay, BathSpec, BellState, CentralState, ChannelParams, Complex64,
    ConstraintPattern, DensityMatrix, DephasingFactors, KrausSetDocument, NoiseTrajectoryConfig,
    OptimizerConfig, SymmetryReport, UnitaryMixer,
};
use serde::Serialize;

use crate::args::{
    Cli, Command, EvolveArgs, Format, InitialState, KrausArgs, KrausSource, MonteCarloArgs,
    OptimizeArgs, ScanArgs, SpinbathArgs,
};
use crate::error::{CliError, CliResult};
use crate::output::{density_columns, emit, to_json, Cell, Table};

/// Allowed excess of the optimum over the best sampled mixer.
pub const DEFAULT_AGREEMENT_TOL: f64 = 1e-2;

const KRAUS_CHECK_COMPLETENESS_TOL: f64 = 1e-10;
const KRAUS_CHECK_CHANNEL_TOL: f64 = 1e-9;

pub fn run(cli: Cli) -> CliResult<()> {
    let out = cli.output.as_deref();
    let text = match &cli.command {
        Command::Evolve(a) => evolve(a, cli.format.unwrap_or(Format::Csv))?,
        Command::Kraus(a) => kraus(a, cli.seed, cli.format.unwrap_or(Format::Json))?,
        Command::SymmetryScan(a) => symmetry_scan(a, cli.seed, cli.format.unwrap_or(Format::Json))?,
        Command::Optimize(a) => optimize(a, cli.seed, cli.format.unwrap_or(Format::Json))?,
        Command::Spinbath(a) => spinbath(a, cli.seed, cli.format.unwrap_or(Format::Csv))?,
        Command::Montecarlo(a) => montecarlo(a, cli.seed, cli.format.unwrap_or(Format::Json))?,
    };
    emit(out, &text)
}

fn render_table(table: &Table, format: Format) -> CliResult<String> {
    match format {
        Format::Csv => Ok(table.to_csv()),
        Format::Json => to_json(table),
    }
}

fn push_density(row: &mut Vec<Cell>, rho: &DensityMatrix) {
    for z in rho.matrix().as_slice() {
        row.push(z.re.into());
        row.push(z.im.into());
    }
}

fn evolve(a: &EvolveArgs, format: Format) -> CliResult<String> {
    let times = a.grid.resolve(5.0, 101)?;
    let rate_b = a.rate_b.unwrap_or(a.rate);
    let mut cols = vec!["t".to_string(), "gamma".to_string()];
    if a.rate_b.is_some() {
        cols.push("gamma_b".into());
    }
    cols.extend(density_columns());
    let mut table = Table::new(cols);
    let rho0 = a.state.density();
    for t in times {
        let params = ChannelParams::new(a.rate, rate_b, t)?;
        let f = params.factors();
        let mut row: Vec<Cell> = vec![t.into(), f.a.into()];
        if a.rate_b.is_some() {
            row.push(f.b.into());
        }
        push_density(&mut row, &apply_dephasing(&rho0, &params)?);
        table.push(row);
    }
    render_table(&table, format)
}

#[derive(Serialize)]
struct KrausCheckReport {
    label: String,
    gamma: f64,
    n_operators: usize,
    completeness_residual: f64,
    channel_deviation: f64,
}

fn kraus(a: &KrausArgs, seed: u64, format: Format) -> CliResult<String> {
    if let Some(path) = &a.check {
        return kraus_check(path, format);
    }
    let gamma = match (a.gamma, a.rate, a.time) {
        (Some(g), _, _) => g,
        (None, Some(rate), Some(time)) => gamma_factor(rate, time)?,
        _ => {
            return Err(CliError::Usage(
                "give --gamma or both --rate and --time".into(),
            ))
        }
    };
    let canonical = canonical_kraus(gamma)?;
    let set = match a.source {
        KrausSource::Canonical => canonical,
        KrausSource::Choi => {
            kraus_from_choi(&choi_of_factors(DephasingFactors::identical(gamma)?)?)?
        }
        KrausSource::Mixed => {
            let mixer = UnitaryMixer::new(haar_unitary(&mut stream_rng(seed, 0), 4))?;
            mix_kraus(&canonical, &mixer)?
        }
    };
    let doc = KrausSetDocument::from_set(&set, gamma);
    match format {
        Format::Json => to_json(&doc),
        Format::Csv => {
            let mut table = Table::new(["operator", "row", "col", "re", "im"]);
            for (k, op) in doc.operators.iter().enumerate() {
                for (idx, z) in op.iter().enumerate() {
                    table.push(vec![
                        (k + 1).into(),
                        (idx / 4 + 1).into(),
                        (idx % 4 + 1).into(),
                        z.re.into(),
                        z.im.into(),
                    ]);
                }
            }
            Ok(table.to_csv())
        }
    }
}

fn kraus_check(path: &Path, format: Format) -> CliResult<String> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    let doc: KrausSetDocument =
        serde_json::from_str(&text).map_err(|e| CliError::parse(path, e))?;
    if !(0.0..=1.0).contains(&doc.gamma) {
        return Err(CliError::Input(format!(
            "{}: gamma {} outside [0, 1]",
            path.display(),
            doc.gamma
        )));
    }
    let set = doc
        .to_set()
        .map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?;
    let residual = set.completeness_residual();
    let target = choi_of_factors(DephasingFactors::identical(doc.gamma)?)?;
    let deviation = set.choi().matrix().max_abs_diff(target.matrix());
    if residual > KRAUS_CHECK_COMPLETENESS_TOL {
        return Err(CliError::Numerical(format!(
            "Kraus set '{}' is not trace preserving: residual {residual:.3e}",
            doc.label
        )));
    }
    if deviation > KRAUS_CHECK_CHANNEL_TOL {
        return Err(CliError::Numerical(format!(
            "Kraus set '{}' does not implement dephasing at gamma = {}: Choi deviation {deviation:.3e}",
            doc.label, doc.gamma
        )));
    }
    let report = KrausCheckReport {
        label: doc.label,
        gamma: doc.gamma,
        n_operators: set.len(),
        completeness_residual: residual,
        channel_deviation: deviation,
    };
    match format {
        Format::Json => to_json(&report),
        Format::Csv => {
            let mut t = Table::new([
                "gamma",
                "n_operators",
                "completeness_residual",
                "channel_deviation",
            ]);
            t.push(vec![
                report.gamma.into(),
                report.n_operators.into(),
                report.completeness_residual.into(),
                report.channel_deviation.into(),
            ]);
            Ok(t.to_csv())
        }
    }
}

fn pattern_of(rows: &[usize]) -> CliResult<ConstraintPattern> {
    Ok(ConstraintPattern::from_rows(rows)?)
}

fn check_gamma(gamma: f64) -> CliResult<()> {
    if (0.0..=1.0).contains(&gamma) {
        Ok(())
    } else {
        Err(CliError::Usage(format!(
            "--gamma {gamma} must lie in [0, 1]"
        )))
    }
}

fn run_scan(
    state: BellState,
    gamma: f64,
    pattern: &ConstraintPattern,
    samples: usize,
    seed: u64,
) -> CliResult<ScanSummary> {
    let summary = if pattern.is_empty() {
        brute_force_symmetry_scan(state, gamma, samples, seed)?
    } else {
        feasible_symmetry_scan(state, gamma, pattern, samples, seed)?
    };
    Ok(summary)
}

fn render_report(report: &SymmetryReport, format: Format) -> CliResult<String> {
    match format {
        Format::Json => to_json(report),
        Format::Csv => {
            let mut t = Table::new(["bin", "count"]);
            for b in &report.histogram {
                t.push(vec![b.bin.into(), b.count.into()]);
            }
            Ok(t.to_csv())
        }
    }
}

fn symmetry_scan(a: &ScanArgs, seed: u64, format: Format) -> CliResult<String> {
    check_gamma(a.gamma)?;
    let pattern = pattern_of(&a.pattern.pattern)?;
    let summary = run_scan(a.state, a.gamma, &pattern, a.samples, seed)?;
    let report = SymmetryReport::from_scan(a.state, a.gamma, pattern, seed, &summary);
    render_report(&report, format)
}

fn optimize(a: &OptimizeArgs, seed: u64, format: Format) -> CliResult<String> {
    check_gamma(a.gamma)?;
    if !(a.agreement_tol.is_finite() && a.agreement_tol >= 0.0) {
        return Err(CliError::Usage(
            "--agreement-tol must be finite and >= 0".into(),
        ));
    }
    let pattern = pattern_of(&a.pattern.pattern)?;
    let cfg = OptimizerConfig {
        budget: a.budget,
        restarts: a.restarts,
        seed,
        ..Default::default()
    };
    let opt = maximize_symmetric_probability(a.state, a.gamma, &pattern, &cfg)?;
    let summary = run_scan(a.state, a.gamma, &pattern, a.samples, seed)?;
    let excess = opt.p_max - summary.max;
    let agreement = excess >= -1e-12 && excess <= a.agreement_tol;

    let mut report = SymmetryReport::from_scan(a.state, a.gamma, pattern, seed, &summary);
    // The larger of the two is reported; `agreement` flags an optimizer that lost.
    if opt.p_max >= summary.max {
        report.p_max = opt.p_max;
        report.mixer = opt.mixer.matrix().as_slice().to_vec();
    }
    report.optimizer = Some(OptimizerStats {
        p_opt: opt.p_max,
        evaluations: opt.evaluations,
        restarts: a.restarts,
        budget: a.budget,
        agreement,
        agreement_tol: a.agreement_tol,
    });
    render_report(&report, format)
}

fn load_bath(path: &Path) -> CliResult<BathSpec> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    serde_json::from_str(&text).map_err(|e| CliError::parse(path, e))
}

fn spinbath(a: &SpinbathArgs, seed: u64, format: Format) -> CliResult<String> {
    let times = a.grid.resolve(50.0, 101)?;
    let range = FrequencyRange {
        min: a.omega_min,
        max: a.omega_max,
    };
    let bath_a = match &a.bath {
        Some(p) => load_bath(p)?,
        None => random_bath_in(a.n_spins, seed, a.equal_amplitudes, range)?,
    };
    let bath_b = match (&a.bath_b, a.distinct) {
        (Some(p), _) => Some(load_bath(p)?),
        (None, true) => Some(random_bath_in(
            bath_a.spins().len(),
            seed.wrapping_add(1),
            a.equal_amplitudes,
            range,
        )?),
        (None, false) => None,
    };
    if let Some(p) = &a.save_bath {
        std::fs::write(p, to_json(&bath_a)?).map_err(|e| CliError::io(p, e))?;
    }

    let mut cols: Vec<String> = ["t", "r_re", "r_im", "r_abs"].map(String::from).to_vec();
    if bath_b.is_some() {
        cols.extend(["r2_re", "r2_im", "r2_abs"].map(String::from));
    }
    if a.state.is_some() {
        cols.extend(density_columns());
    }
    let mut table = Table::new(cols);
    let psi = a.state.map(CentralState::bell);
    for t in times {
        let r = decoherence_factor(&bath_a, t)?;
        let mut row: Vec<Cell> = vec![t.into(), r.re.into(), r.im.into(), r.norm().into()];
        if let Some(b) = &bath_b {
            let r2 = decoherence_factor(b, t)?;
            row.extend([Cell::from(r2.re), r2.im.into(), r2.norm().into()]);
        }
        if let Some(psi) = &psi {
            let rho = reduced_density(&bath_a, bath_b.as_ref().unwrap_or(&bath_a), psi, t)?;
            push_density(&mut row, &rho);
        }
        table.push(row);
    }
    render_table(&table, format)
}

#[derive(Serialize)]
struct MonteCarloReport {
    state: String,
    rate_a: f64,
    rate_b: f64,
    time: f64,
    n_trajectories: usize,
    dt: f64,
    seed: u64,
    /// Row-major trajectory average.
    rho: Vec<Complex64>,
    /// Row-major closed-form result.
    exact: Vec<Complex64>,
    /// Row-major `[stderr(re), stderr(im)]`.
    entry_stderr: Vec<[f64; 2]>,
    stderr: f64,
    /// Largest deviation from `exact` in units of the per-part standard error.
    max_deviation_sigma: f64,
    gamma_exact: f64,
    /// Decay of single-qubit coherences; absent when the initial state has none.
    gamma_estimate: Option<f64>,
}

fn montecarlo(a: &MonteCarloArgs, seed: u64, format: Format) -> CliResult<String> {
    let rho0 = match a.state {
        InitialState::Bell(b) => b.density(),
        InitialState::PlusPlus => DensityMatrix::from_pure(&[c64(0.5, 0.0); 4])?,
    };
    let rate_b = a.rate_b.unwrap_or(a.rate);
    let params = ChannelParams::new(a.rate, rate_b, a.time)?;
    let cfg = NoiseTrajectoryConfig {
        n_trajectories: a.trajectories,
        dt: a.dt,
        seed,
        ..Default::default()
    };
    let est = monte_carlo_dephasing(&rho0, &params, &cfg)?;
    let exact = apply_dephasing(&rho0, &params)?;

    let mut max_sigma = 0.0f64;
    for (k, (m, e)) in est
        .rho
        .matrix()
        .as_slice()
        .iter()
        .zip(exact.matrix().as_slice())
        .enumerate()
    {
        for (part, (x, y)) in [(m.re, e.re), (m.im, e.im)].into_iter().enumerate() {
            let se = est.entry_stderr[k][part];
            let dev = (x - y).abs();
            let sigma = if se > 0.0 {
                dev / se
            } else if dev == 0.0 {
                0.0
            } else {
                f64::INFINITY
            };
            max_sigma = max_sigma.max(sigma);
        }
    }

    let report = MonteCarloReport {
        state: a.state.to_string(),
        rate_a: a.rate,
        rate_b,
        time: a.time,
        n_trajectories: a.trajectories,
        dt: a.dt,
        seed,
        rho: est.rho.matrix().as_slice().to_vec(),
        exact: exact.matrix().as_slice().to_vec(),
        entry_stderr: est.entry_stderr.to_vec(),
        stderr: est.stderr,
        max_deviation_sigma: max_sigma,
        gamma_exact: params.factors().a,
        gamma_estimate: single_flip_decay(est.rho.matrix(), rho0.matrix()),
    };
    match format {
        Format::Json => to_json(&report),
        Format::Csv => {
            let mut t = Table::new([
                "row",
                "col",
                "mc_re",
                "mc_im",
                "exact_re",
                "exact_im",
                "stderr_re",
                "stderr_im",
            ]);
            for k in 0..16 {
                let (m, e, se) = (report.rho[k], report.exact[k], report.entry_stderr[k]);
                t.push(vec![
                    (k / 4 + 1).into(),
                    (k % 4 + 1).into(),
                    m.re.into(),
                    m.im.into(),
                    e.re.into(),
                    e.im.into(),
                    se[0].into(),
                    se[1].into(),
                ]);
            }
            Ok(t.to_csv())
        }
    }
}
