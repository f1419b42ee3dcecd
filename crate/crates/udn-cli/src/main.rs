//! `udn`: evaluate coverage, spectral efficiency and energy efficiency of
//! CoMP joint transmission in multi-tier ultra-dense networks, by paired
//! Monte Carlo and semi-analytic paths.

use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};

use udn_cli::acceptance::{self, Level};
use udn_cli::engine::{self, NamedPolicy, Paths, SchemeSpec, SweepSpec};
use udn_cli::report::{self, CsvSink, Manifest, PointStatus};
use udn_cli::scenario::{load_scenario, Scenario, ScenarioError};
use udn_core::analytic::EvalSettings;
use udn_core::model::{ratio_to_db, CompScheme};
use udn_core::sim::nee;

const EXIT_CONFIG: u8 = 2;
const EXIT_NUMERIC: u8 = 3;
const EXIT_ACCEPTANCE: u8 = 4;

#[derive(Parser)]
#[command(name = "udn", version, about = "CoMP joint-transmission evaluation for K-tier ultra-dense networks")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct RunOpts {
    /// Scenario file (JSON).
    #[arg(long)]
    scenario: PathBuf,
    /// Output directory.
    #[arg(long, default_value = "out")]
    out: PathBuf,
    /// Trials override (default from the scenario's sim block).
    #[arg(long)]
    trials: Option<u64>,
    /// Seed override.
    #[arg(long)]
    seed: Option<u64>,
    /// Worker threads for the Monte Carlo engine.
    #[arg(long, default_value_t = 1)]
    workers: usize,
}

#[derive(Subcommand)]
enum Command {
    /// Calibrate the RRLP threshold against target mean set sizes over a
    /// density grid.
    CalibrateEta {
        #[command(flatten)]
        run: RunOpts,
        /// Total densities, per km2.
        #[arg(long, value_delimiter = ',', default_values_t = vec![10.0, 100.0, 1000.0, 5000.0, 10000.0, 50000.0])]
        densities_per_km2: Vec<f64>,
        /// Mean cooperating-set size targets.
        #[arg(long, value_delimiter = ',', default_values_t = vec![2.0, 3.0])]
        targets: Vec<f64>,
    },
    /// Coverage probability over a threshold grid.
    Coverage {
        #[command(flatten)]
        run: RunOpts,
        /// SIR thresholds in dB.
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true, default_values_t = vec![0.0])]
        gammas_db: Vec<f64>,
        #[arg(long, value_enum, default_value = "mc")]
        path: PathArg,
    },
    /// Per-user SE and transmit/receive area spectral efficiency.
    Ase {
        #[command(flatten)]
        run: RunOpts,
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true, default_values_t = vec![0.0])]
        gammas_db: Vec<f64>,
        #[arg(long, value_enum, default_value = "mc")]
        path: PathArg,
    },
    /// Network energy efficiency (builds on the MC metrics).
    Nee {
        #[command(flatten)]
        run: RunOpts,
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true, default_values_t = vec![0.0])]
        gammas_db: Vec<f64>,
    },
    /// Metric sweep over a grid axis described by a sweep file.
    Sweep {
        #[command(flatten)]
        run: RunOpts,
        /// Sweep description (JSON).
        #[arg(long)]
        sweep: PathBuf,
    },
    /// Run the acceptance criteria and emit machine-readable verdicts.
    Validate {
        #[command(flatten)]
        run: RunOpts,
        #[arg(long, value_enum, default_value = "fast")]
        level: LevelArg,
    },
    /// Dump one sampled realization as CSV for inspection.
    DumpRealization {
        /// Scenario file (JSON).
        #[arg(long)]
        scenario: PathBuf,
        /// Output CSV path.
        #[arg(long)]
        out: PathBuf,
        /// Window radius override, meters.
        #[arg(long)]
        radius_m: Option<f64>,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long, default_value_t = 0)]
        trial: u64,
    },
}

#[derive(clap::ValueEnum, Clone, Copy, PartialEq, Eq)]
enum PathArg {
    Mc,
    Analytic,
    Both,
}

impl From<PathArg> for Paths {
    fn from(p: PathArg) -> Paths {
        match p {
            PathArg::Mc => Paths::Mc,
            PathArg::Analytic => Paths::Analytic,
            PathArg::Both => Paths::Both,
        }
    }
}

#[derive(clap::ValueEnum, Clone, Copy)]
enum LevelArg {
    Fast,
    Full,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            let mut code = EXIT_NUMERIC;
            for cause in e.chain() {
                if cause.downcast_ref::<ScenarioError>().is_some() {
                    code = EXIT_CONFIG;
                    break;
                }
                if cause.downcast_ref::<udn_core::numerics::NumericError>().is_some() {
                    code = EXIT_NUMERIC;
                    break;
                }
            }
            ExitCode::from(code)
        }
    }
}

fn apply_overrides(scenario: &mut Scenario, run: &RunOpts) {
    if let Some(t) = run.trials {
        scenario.trials = t;
    }
    if let Some(s) = run.seed {
        scenario.seed = s;
    }
}

fn scheme_of(scenario: &Scenario) -> NamedPolicy {
    let name = match scenario.policy.scheme {
        CompScheme::Rrlp => {
            format!("rrlp_eta{:+.2}dB", ratio_to_db(scenario.policy.eta.get(0, 0)))
        }
        CompScheme::Fnsb => format!("fnsb_{}", scenario.policy.n_strongest),
        CompScheme::ArlpThreshold => "arlp_threshold".to_string(),
        CompScheme::NoComp => "no_comp".to_string(),
    };
    NamedPolicy { name, policy: scenario.policy.clone() }
}

fn write_run_manifest(
    out: &std::path::Path,
    scenario: &Scenario,
    sweep: Option<SweepSpec>,
    start: Instant,
    status: Vec<PointStatus>,
) -> anyhow::Result<()> {
    let manifest = Manifest {
        scenario: scenario.file.clone(),
        sweep,
        seed: scenario.seed,
        code_version: report::CODE_VERSION,
        wall_time_s: start.elapsed().as_secs_f64(),
        per_point_status: status,
    };
    report::write_manifest(out, &manifest)?;
    Ok(())
}

fn run(cli: Cli) -> anyhow::Result<ExitCode> {
    match cli.command {
        Command::CalibrateEta { run, densities_per_km2, targets } => {
            let start = Instant::now();
            let scenario = load_scenario(&run.scenario)?;
            let rows = engine::calibrate_table(&scenario, &densities_per_km2, &targets)?;
            std::fs::create_dir_all(&run.out)?;
            let path = run.out.join("eta_table.csv");
            let mut text = String::from("lambda_b,target_N,eta_db\n");
            for (d, n, db) in &rows {
                // densities are read per km2 and reported per m2
                text.push_str(&format!("{},{},{}\n", d / 1e6, n, db));
            }
            std::fs::write(&path, text)?;
            println!(
                "wrote {} ({} rows, {:.2}s)",
                path.display(),
                rows.len(),
                start.elapsed().as_secs_f64()
            );
            Ok(ExitCode::SUCCESS)
        }
        Command::Coverage { run, gammas_db, path } => {
            let start = Instant::now();
            let mut scenario = load_scenario(&run.scenario)?;
            apply_overrides(&mut scenario, &run);
            let paths: Paths = path.into();
            let mut sink = CsvSink::new();
            let scheme = scheme_of(&scenario);
            if paths.mc() {
                let reports = engine::mc_point(
                    &scenario,
                    std::slice::from_ref(&scheme),
                    &gammas_db,
                    scenario.trials,
                    run.workers,
                    1.96,
                )?;
                let (name, rep) = &reports[0];
                for (gi, &db) in gammas_db.iter().enumerate() {
                    let c = rep.coverage[gi];
                    sink.push("coverage", db, name, "mc", c.value, c.ci_lo, c.ci_hi);
                }
            }
            if paths.analytic() {
                anyhow::ensure!(
                    scenario.policy.scheme == CompScheme::Rrlp,
                    "the analytic path is defined for the RRLP scheme only"
                );
                let settings = EvalSettings { seed: scenario.seed, ..EvalSettings::default() };
                let rows =
                    engine::analytic_point(&scenario, &scenario.policy.eta, &gammas_db, &settings)?;
                for (db, b) in rows {
                    sink.push("coverage", db, &scheme.name, "analytic", b.point, b.lower, b.upper);
                }
            }
            let written = sink.write_all(&run.out)?;
            write_run_manifest(&run.out, &scenario, None, start, vec![])?;
            for p in written {
                println!("wrote {}", p.display());
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Ase { run, gammas_db, path } => {
            let start = Instant::now();
            let mut scenario = load_scenario(&run.scenario)?;
            apply_overrides(&mut scenario, &run);
            let paths: Paths = path.into();
            let mut sink = CsvSink::new();
            let scheme = scheme_of(&scenario);
            if paths.mc() {
                let reports = engine::mc_point(
                    &scenario,
                    std::slice::from_ref(&scheme),
                    &gammas_db,
                    scenario.trials,
                    run.workers,
                    1.96,
                )?;
                let (name, rep) = &reports[0];
                for (gi, &db) in gammas_db.iter().enumerate() {
                    for (metric, e) in [
                        ("per_user_se", rep.per_user_se[gi]),
                        ("tx_ase", rep.tx_ase[gi]),
                        ("rx_ase", rep.rx_ase[gi]),
                    ] {
                        sink.push(metric, db, name, "mc", e.value, e.ci_lo, e.ci_hi);
                    }
                }
            }
            if paths.analytic() {
                anyhow::ensure!(
                    scenario.policy.scheme == CompScheme::Rrlp,
                    "the analytic path is defined for the RRLP scheme only"
                );
                let settings = EvalSettings {
                    seed: scenario.seed,
                    outer_nodes: 16,
                    inner_samples_min: 256,
                    inner_samples_max: 2048,
                    ..EvalSettings::default()
                };
                for &db in &gammas_db {
                    let rx =
                        engine::analytic_rx_ase(&scenario, &scenario.policy.eta, db, &settings)?;
                    sink.push(
                        "per_user_se",
                        db,
                        &scheme.name,
                        "analytic",
                        rx.per_user_se.point,
                        rx.per_user_se.lower,
                        rx.per_user_se.upper,
                    );
                    sink.push(
                        "rx_ase",
                        db,
                        &scheme.name,
                        "analytic",
                        rx.rx_ase.point,
                        rx.rx_ase.lower,
                        rx.rx_ase.upper,
                    );
                }
            }
            let written = sink.write_all(&run.out)?;
            write_run_manifest(&run.out, &scenario, None, start, vec![])?;
            for p in written {
                println!("wrote {}", p.display());
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Nee { run, gammas_db } => {
            let start = Instant::now();
            let mut scenario = load_scenario(&run.scenario)?;
            apply_overrides(&mut scenario, &run);
            let mut sink = CsvSink::new();
            let scheme = scheme_of(&scenario);
            let reports = engine::mc_point(
                &scenario,
                std::slice::from_ref(&scheme),
                &gammas_db,
                scenario.trials,
                run.workers,
                1.96,
            )?;
            let (name, rep) = &reports[0];
            for (gi, &db) in gammas_db.iter().enumerate() {
                let r = nee(
                    &scenario.model,
                    &scenario.power,
                    rep.per_user_se[gi].value,
                    rep.tx_ase[gi].value,
                    rep.rx_ase[gi].value,
                    &rep.mean_tier_counts,
                );
                sink.push("tx_nee", db, name, "mc", r.tx_nee, r.tx_nee, r.tx_nee);
                sink.push("rx_nee", db, name, "mc", r.rx_nee, r.rx_nee, r.rx_nee);
                println!("gamma {db} dB: P_nec = {:.6e} W/m2, P_UE = {:.4} W", r.p_nec, r.p_ue);
            }
            let written = sink.write_all(&run.out)?;
            write_run_manifest(&run.out, &scenario, None, start, vec![])?;
            for p in written {
                println!("wrote {}", p.display());
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Sweep { run, sweep } => {
            let start = Instant::now();
            let mut scenario = load_scenario(&run.scenario)?;
            apply_overrides(&mut scenario, &run);
            let text = std::fs::read_to_string(&sweep).map_err(ScenarioError::Io)?;
            let spec: SweepSpec = serde_json::from_str(&text).map_err(ScenarioError::Parse)?;
            spec.validate().map_err(|e| ScenarioError::Validation(e.to_string()))?;
            let (sink, status) = run_sweep(&scenario, &spec, scenario.trials, run.workers)?;
            let written = sink.write_all(&run.out)?;
            write_run_manifest(&run.out, &scenario, Some(spec), start, status)?;
            for p in written {
                println!("wrote {}", p.display());
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Validate { run, level } => {
            let level = match level {
                LevelArg::Fast => Level::Fast,
                LevelArg::Full => Level::Full,
            };
            let results = acceptance::run_for_file(&run.scenario, level, run.workers);
            std::fs::create_dir_all(&run.out)?;
            let path = run.out.join("verdicts.json");
            std::fs::write(&path, serde_json::to_string_pretty(&results)?)?;
            let mut failed = false;
            for r in &results {
                println!("{}", r.summary_line());
                failed |= !r.passed;
            }
            println!("wrote {}", path.display());
            if failed {
                Ok(ExitCode::from(EXIT_ACCEPTANCE))
            } else {
                Ok(ExitCode::SUCCESS)
            }
        }
        Command::DumpRealization { scenario, out, radius_m, seed, trial } => {
            let mut sc = load_scenario(&scenario)?;
            if let Some(s) = seed {
                sc.seed = s;
            }
            let radius = radius_m.unwrap_or(sc.window_radius);
            let real = udn_core::geometry::sample_realization(&sc.model, radius, sc.seed, trial)
                .map_err(|e| anyhow::anyhow!("sampling failed: {e}"))?;
            report::write_realization_csv(&out, &real)?;
            println!("wrote {} ({} points)", out.display(), real.points.len());
            Ok(ExitCode::SUCCESS)
        }
    }
}

/// Execute a sweep; grid-point failures are recorded and skipped.
fn run_sweep(
    base: &Scenario,
    spec: &SweepSpec,
    trials: u64,
    workers: usize,
) -> anyhow::Result<(CsvSink, Vec<PointStatus>)> {
    let mut sink = CsvSink::new();
    let mut status = Vec::new();
    for &value in &spec.grid {
        let point = (|| -> anyhow::Result<()> {
            let scenario = spec.apply(base, value)?;
            let schemes: Vec<NamedPolicy> = spec
                .schemes
                .iter()
                .map(|s| s.resolve(&scenario.model))
                .collect::<anyhow::Result<_>>()?;
            let gammas_db: Vec<f64> = match spec.axis {
                engine::SweepAxis::SirThresholdDb => vec![value],
                _ => spec.gammas_db.clone(),
            };
            if spec.paths.mc() {
                let reports =
                    engine::mc_point(&scenario, &schemes, &gammas_db, trials, workers, 1.96)?;
                for (name, rep) in &reports {
                    anyhow::ensure!(
                        rep.sentinel_fraction < 1e-6,
                        "infinite-SIR sentinel frequency {} at axis {value}; enlarge the window",
                        rep.sentinel_fraction
                    );
                    for (gi, _db) in gammas_db.iter().enumerate() {
                        let c = rep.coverage[gi];
                        sink.push("coverage", value, name, "mc", c.value, c.ci_lo, c.ci_hi);
                        let e = rep.per_user_se[gi];
                        sink.push("per_user_se", value, name, "mc", e.value, e.ci_lo, e.ci_hi);
                        let e = rep.tx_ase[gi];
                        sink.push("tx_ase", value, name, "mc", e.value, e.ci_lo, e.ci_hi);
                        let e = rep.rx_ase[gi];
                        sink.push("rx_ase", value, name, "mc", e.value, e.ci_lo, e.ci_hi);
                        let r = nee(
                            &scenario.model,
                            &scenario.power,
                            rep.per_user_se[gi].value,
                            rep.tx_ase[gi].value,
                            rep.rx_ase[gi].value,
                            &rep.mean_tier_counts,
                        );
                        sink.push("tx_nee", value, name, "mc", r.tx_nee, r.tx_nee, r.tx_nee);
                        sink.push("rx_nee", value, name, "mc", r.rx_nee, r.rx_nee, r.rx_nee);
                    }
                    let m = rep.mean_comp_size;
                    sink.push("mean_comp_size", value, name, "mc", m.value, m.ci_lo, m.ci_hi);
                }
            }
            if spec.paths.analytic() {
                let settings = EvalSettings { seed: scenario.seed, ..EvalSettings::default() };
                for (spec_scheme, named) in spec.schemes.iter().zip(&schemes) {
                    if !matches!(spec_scheme, SchemeSpec::Rrlp { .. }) {
                        continue;
                    }
                    let rows = engine::analytic_point(
                        &scenario,
                        &named.policy.eta,
                        &gammas_db,
                        &settings,
                    )?;
                    for (_db, b) in rows {
                        sink.push("coverage", value, &named.name, "analytic", b.point, b.lower, b.upper);
                    }
                }
            }
            Ok(())
        })();
        match point {
            Ok(()) => status.push(PointStatus { axis_value: value, status: "ok".into() }),
            Err(e) => {
                eprintln!("grid point {value} failed: {e:#}");
                status.push(PointStatus { axis_value: value, status: format!("error: {e:#}") });
            }
        }
    }
    Ok((sink, status))
}
