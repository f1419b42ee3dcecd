//! Parallel experiment engine: deterministic block-parallel Monte Carlo,
//! per-grid-point sweep orchestration, and the analytic-path drivers.
//!
//! Trials are split into the same fixed blocks the sequential runner uses;
//! blocks are computed in parallel and merged in block order, so a run is
//! bit-identical for any worker count.

use anyhow::{anyhow, Context, Result};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use udn_core::analytic::{
    coverage_analytic, coverage_special_case, rx_ase_analytic, Bracket, EvalSettings,
    SignalCombining,
};
use udn_core::model::{db_to_ratio, ratio_to_db, CompPolicy, CompScheme, EtaMatrix, NetworkModel};
use udn_core::numerics::MeanVar;
use udn_core::sim::{self, metrics_report, MetricsReport, TrialEvaluator, TRIAL_BLOCK};

use crate::scenario::Scenario;

/// Run `trials` trials on `workers` threads; bit-identical to
/// `sim::run_trials` for any worker count.
pub fn run_parallel(eval: &TrialEvaluator, trials: u64, workers: usize) -> Result<Vec<MeanVar>> {
    if workers <= 1 {
        return Ok(sim::run_trials(eval, trials));
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .context("building worker pool")?;
    let n_blocks = trials.div_ceil(TRIAL_BLOCK);
    let blocks: Vec<Vec<MeanVar>> = pool.install(|| {
        (0..n_blocks)
            .into_par_iter()
            .map(|b| {
                let from = b * TRIAL_BLOCK;
                let to = (from + TRIAL_BLOCK).min(trials);
                sim::run_block(eval, from, to)
            })
            .collect()
    });
    let mut total = vec![MeanVar::new(); eval.feature_len()];
    for block in blocks {
        for (a, b) in total.iter_mut().zip(block.iter()) {
            a.merge(b);
        }
    }
    Ok(total)
}

/// Named scheme resolved against a model.
#[derive(Debug, Clone)]
pub struct NamedPolicy {
    pub name: String,
    pub policy: CompPolicy,
}

/// Scheme request as it appears in sweep files.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(tag = "scheme", rename_all = "snake_case")]
pub enum SchemeSpec {
    Rrlp {
        #[serde(skip_serializing_if = "Option::is_none")]
        eta_db: Option<f64>,
        #[serde(skip_serializing_if = "Option::is_none")]
        target_n_avg: Option<f64>,
    },
    Fnsb { n_strongest: usize },
    ArlpThreshold { floor_dbm: f64 },
    NoComp,
}

impl SchemeSpec {
    pub fn resolve(&self, model: &NetworkModel) -> Result<NamedPolicy> {
        let k = model.num_tiers();
        match self {
            SchemeSpec::Rrlp { eta_db: Some(db), .. } => Ok(NamedPolicy {
                name: format!("rrlp_eta{db:+.2}dB"),
                policy: CompPolicy {
                    scheme: CompScheme::Rrlp,
                    eta: EtaMatrix::scalar(k, db_to_ratio(*db)),
                    n_strongest: 1,
                    arlp_floor: 0.0,
                },
            }),
            SchemeSpec::Rrlp { eta_db: None, target_n_avg: Some(target) } => {
                let eta = udn_core::association::calibrate_eta(model, *target)
                    .map_err(|e| anyhow!("eta calibration failed: {e}"))?;
                Ok(NamedPolicy {
                    name: format!("rrlp_n{target}"),
                    policy: CompPolicy::rrlp(k, eta),
                })
            }
            SchemeSpec::Rrlp { eta_db: None, target_n_avg: None } => {
                Err(anyhow!("rrlp scheme needs eta_db or target_n_avg"))
            }
            SchemeSpec::Fnsb { n_strongest } => Ok(NamedPolicy {
                name: format!("fnsb_{n_strongest}"),
                policy: CompPolicy::fnsb(k, *n_strongest),
            }),
            SchemeSpec::ArlpThreshold { floor_dbm } => Ok(NamedPolicy {
                name: format!("arlp_{floor_dbm:+.1}dBm"),
                policy: CompPolicy::arlp_threshold(
                    k,
                    udn_core::model::dbm_to_watts(*floor_dbm),
                ),
            }),
            SchemeSpec::NoComp => {
                Ok(NamedPolicy { name: "no_comp".into(), policy: CompPolicy::no_comp(k) })
            }
        }
    }
}

/// Sweep axes mirroring the evaluation figures.
#[derive(Debug, Clone, Copy, Serialize, Deserialize, PartialEq, Eq)]
#[serde(rename_all = "snake_case")]
pub enum SweepAxis {
    /// Total BS density, grid in per-km2.
    TotalDensity,
    /// Tier-1 share of the total density, grid in (0,1).
    DensityRatio,
    /// SIR threshold, grid in dB.
    SirThresholdDb,
    /// Calibration target for the mean cooperating-set size.
    TargetNAvg,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SweepSpec {
    pub axis: SweepAxis,
    pub grid: Vec<f64>,
    pub schemes: Vec<SchemeSpec>,
    pub paths: Paths,
    /// SIR thresholds (dB) evaluated at every grid point for the
    /// non-threshold axes.
    #[serde(default = "default_gamma_grid")]
    pub gammas_db: Vec<f64>,
}

fn default_gamma_grid() -> Vec<f64> {
    vec![0.0]
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize, PartialEq, Eq)]
#[serde(rename_all = "snake_case")]
pub enum Paths {
    Mc,
    Analytic,
    Both,
}

impl Paths {
    pub fn mc(self) -> bool {
        matches!(self, Paths::Mc | Paths::Both)
    }
    pub fn analytic(self) -> bool {
        matches!(self, Paths::Analytic | Paths::Both)
    }
}

impl SweepSpec {
    pub fn validate(&self) -> Result<()> {
        if self.grid.is_empty() {
            return Err(anyhow!("sweep grid must not be empty"));
        }
        if self.grid.windows(2).any(|w| w[1] <= w[0]) {
            return Err(anyhow!("sweep grid must be strictly increasing"));
        }
        if self.schemes.is_empty() {
            return Err(anyhow!("sweep needs at least one scheme"));
        }
        Ok(())
    }

    /// The scenario with this axis value applied.
    pub fn apply(&self, base: &Scenario, value: f64) -> Result<Scenario> {
        let mut file = base.file.clone();
        match self.axis {
            SweepAxis::TotalDensity => {
                let old_total: f64 = file.tiers.iter().map(|t| t.density_per_km2).sum();
                if old_total <= 0.0 {
                    return Err(anyhow!("base scenario has zero density"));
                }
                for t in &mut file.tiers {
                    t.density_per_km2 *= value / old_total;
                }
            }
            SweepAxis::DensityRatio => {
                if file.tiers.len() != 2 {
                    return Err(anyhow!("density_ratio sweeps need exactly two tiers"));
                }
                let total: f64 = file.tiers.iter().map(|t| t.density_per_km2).sum();
                file.tiers[0].density_per_km2 = value * total;
                file.tiers[1].density_per_km2 = (1.0 - value) * total;
            }
            SweepAxis::SirThresholdDb | SweepAxis::TargetNAvg => {}
        }
        if let SweepAxis::TargetNAvg = self.axis {
            file.comp.eta_db = None;
            file.comp.target_n_avg = Some(value);
        }
        // window depends on density; re-resolve
        file.sim.window_radius_m = base.file.sim.window_radius_m;
        Ok(file.resolve()?)
    }
}

/// All metric rows produced at one grid point for one scheme.
#[derive(Debug, Clone)]
pub struct PointMetrics {
    pub scheme: String,
    pub path: &'static str,
    /// One entry per gamma threshold: (gamma_db, metric name, estimate).
    pub rows: Vec<(f64, &'static str, f64, f64, f64)>,
}

/// Evaluate the MC path for a set of schemes at one scenario.
pub fn mc_point(
    scenario: &Scenario,
    schemes: &[NamedPolicy],
    gammas_db: &[f64],
    trials: u64,
    workers: usize,
    z: f64,
) -> Result<Vec<(String, MetricsReport)>> {
    let gammas: Vec<f64> = gammas_db.iter().map(|&db| db_to_ratio(db)).collect();
    let eval = TrialEvaluator {
        model: scenario.model.clone(),
        policies: schemes.iter().map(|s| s.policy.clone()).collect(),
        gammas,
        window_radius: scenario.window_radius,
        seed: scenario.seed,
    };
    let accs = run_parallel(&eval, trials, workers)?;
    Ok(schemes
        .iter()
        .enumerate()
        .map(|(pi, s)| (s.name.clone(), metrics_report(&eval, &accs, pi, z)))
        .collect())
}

/// Analytic coverage (and optionally the special case) for an RRLP policy.
pub fn analytic_point(
    scenario: &Scenario,
    eta: &EtaMatrix,
    gammas_db: &[f64],
    settings: &EvalSettings,
) -> Result<Vec<(f64, Bracket)>> {
    let model = &scenario.model;
    let special = !model.channel.los_enabled
        && model.channel.m_nlos == 1
        && model.channel.alpha_los == model.channel.alpha_nlos;
    gammas_db
        .iter()
        .map(|&db| {
            let gt = db_to_ratio(db);
            let b = if special {
                coverage_special_case(model, eta, gt, SignalCombining::CoherentAmplitude, settings)
            } else {
                coverage_analytic(model, eta, gt, settings)
            }
            .map_err(|e| anyhow!("analytic coverage at {db} dB: {e}"))?;
            Ok((db, b))
        })
        .collect()
}

/// Analytic receive-ASE at one threshold.
pub fn analytic_rx_ase(
    scenario: &Scenario,
    eta: &EtaMatrix,
    gamma_db: f64,
    settings: &EvalSettings,
) -> Result<udn_core::analytic::RxAse> {
    rx_ase_analytic(&scenario.model, eta, db_to_ratio(gamma_db), settings)
        .map_err(|e| anyhow!("analytic rx-ase: {e}"))
}

/// Calibration rows for the eta table.
pub fn calibrate_table(
    base: &Scenario,
    densities_per_km2: &[f64],
    targets: &[f64],
) -> Result<Vec<(f64, f64, f64)>> {
    let mut rows = Vec::new();
    for &d in densities_per_km2 {
        let mut file = base.file.clone();
        let old_total: f64 = file.tiers.iter().map(|t| t.density_per_km2).sum();
        for t in &mut file.tiers {
            t.density_per_km2 *= d / old_total;
        }
        let model = file.to_model()?;
        for &target in targets {
            let eta = udn_core::association::calibrate_eta(&model, target)
                .map_err(|e| anyhow!("calibration at density {d}/km2 target {target}: {e}"))?;
            rows.push((d, target, ratio_to_db(eta)));
        }
    }
    Ok(rows)
}
