//! Scenario files: JSON schema, table defaults, and conversion into the
//! validated SI-unit core model.
//!
//! Files use human units (per km2, dBm, dB); everything internal is SI.

use serde::{Deserialize, Serialize};
use std::path::Path;

use udn_core::model::{
    db_to_ratio, dbm_to_watts, BlockageBaseHeight, BlockageParams, ChannelParams, CompPolicy,
    CompScheme, Deployment, EtaMatrix, NetworkModel, PaTerm, PowerModel, TierParams,
};

#[derive(Debug, thiserror::Error)]
pub enum ScenarioError {
    #[error("cannot read scenario file: {0}")]
    Io(#[from] std::io::Error),
    #[error("malformed scenario file: {0}")]
    Parse(#[from] serde_json::Error),
    #[error("invalid scenario: {0}")]
    Validation(String),
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioFile {
    pub tiers: Vec<TierFile>,
    #[serde(default)]
    pub user: UserFile,
    #[serde(default)]
    pub blockage: BlockageFile,
    #[serde(default)]
    pub channel: ChannelFile,
    #[serde(default)]
    pub comp: CompFile,
    #[serde(default)]
    pub power: PowerFile,
    #[serde(default)]
    pub sim: SimFile,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TierFile {
    pub density_per_km2: f64,
    /// Defaults: 44 dBm for the first tier, 33 dBm for the rest.
    pub tx_power_dbm: Option<f64>,
    /// Defaults: 25 m for the first tier, 10 m for the rest.
    pub antenna_height_m: Option<f64>,
    #[serde(default)]
    pub deployment: DeploymentFile,
}

#[derive(Debug, Clone, Copy, Default, Serialize, Deserialize, PartialEq, Eq)]
#[serde(rename_all = "snake_case")]
pub enum DeploymentFile {
    #[default]
    Ppp,
    Hex,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct UserFile {
    #[serde(default = "d_user_height")]
    pub height_m: f64,
    #[serde(default = "d_user_density")]
    pub density_per_km2: f64,
}

fn d_user_height() -> f64 { 1.5 }
fn d_user_density() -> f64 { 3000.0 }

impl Default for UserFile {
    fn default() -> Self {
        UserFile { height_m: 1.5, density_per_km2: 3000.0 }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BlockageFile {
    #[serde(default = "d_epsilon")]
    pub epsilon: f64,
    #[serde(default = "d_buildings")]
    pub buildings_per_km2: f64,
    #[serde(default = "d_mean_height")]
    pub mean_height_m: f64,
    #[serde(default)]
    pub base_height: BaseHeightFile,
}

fn d_epsilon() -> f64 { 0.5 }
fn d_buildings() -> f64 { 300.0 }
fn d_mean_height() -> f64 { 20.0 }

#[derive(Debug, Clone, Copy, Default, Serialize, Deserialize, PartialEq, Eq)]
#[serde(rename_all = "snake_case")]
pub enum BaseHeightFile {
    #[default]
    HeightDifference,
    BsHeight,
}

impl Default for BlockageFile {
    fn default() -> Self {
        BlockageFile {
            epsilon: 0.5,
            buildings_per_km2: 300.0,
            mean_height_m: 20.0,
            base_height: BaseHeightFile::HeightDifference,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChannelFile {
    #[serde(default = "d_alpha_los")]
    pub alpha_los: f64,
    #[serde(default = "d_alpha_nlos")]
    pub alpha_nlos: f64,
    #[serde(default = "d_m_los")]
    pub m_los: u32,
    #[serde(default = "d_m_nlos")]
    pub m_nlos: u32,
    /// Setting this false evaluates the all-NLoS special channel.
    #[serde(default = "default_true")]
    pub los_enabled: bool,
}

fn default_true() -> bool {
    true
}

fn d_alpha_los() -> f64 { 2.5 }
fn d_alpha_nlos() -> f64 { 3.5 }
fn d_m_los() -> u32 { 10 }
fn d_m_nlos() -> u32 { 1 }

impl Default for ChannelFile {
    fn default() -> Self {
        ChannelFile { alpha_los: 2.5, alpha_nlos: 3.5, m_los: 10, m_nlos: 1, los_enabled: true }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CompFile {
    #[serde(default)]
    pub scheme: SchemeFile,
    /// Scalar threshold broadcast to all (j,k); mutually exclusive with
    /// `eta_db_matrix` and `target_n_avg`.
    pub eta_db: Option<f64>,
    pub eta_db_matrix: Option<Vec<Vec<f64>>>,
    /// Calibrate a scalar eta to this mean cooperating-set size at load.
    pub target_n_avg: Option<f64>,
    pub n_strongest: Option<usize>,
    pub arlp_floor_dbm: Option<f64>,
}

#[derive(Debug, Clone, Copy, Default, Serialize, Deserialize, PartialEq, Eq)]
#[serde(rename_all = "snake_case")]
pub enum SchemeFile {
    #[default]
    Rrlp,
    Fnsb,
    ArlpThreshold,
    NoComp,
}

impl Default for CompFile {
    fn default() -> Self {
        CompFile {
            scheme: SchemeFile::Rrlp,
            eta_db: None,
            eta_db_matrix: None,
            target_n_avg: Some(2.0),
            n_strongest: None,
            arlp_floor_dbm: None,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PowerFile {
    #[serde(default = "d_p_ant_bs")]
    pub antenna_power_bs_w: f64,
    #[serde(default = "d_p_fix")]
    pub fixed_power_w: f64,
    /// PA efficiency (0.39 in the consumption table).
    #[serde(default = "d_pa_eff")]
    pub pa_efficiency: f64,
    #[serde(default = "d_compute_eff")]
    pub compute_efficiency_gflops_per_w: f64,
    #[serde(default = "d_p_ant_ue")]
    pub antenna_power_ue_w: f64,
    #[serde(default = "d_p_rate")]
    pub rate_power_w_per_gbps: f64,
    #[serde(default = "d_bandwidth")]
    pub bandwidth_mhz: f64,
    #[serde(default = "d_coherence")]
    pub coherence_block_symbols: f64,
    #[serde(default)]
    pub pa_term: PaTermFile,
}

fn d_p_ant_bs() -> f64 { 1.0 }
fn d_p_fix() -> f64 { 18.0 }
fn d_pa_eff() -> f64 { 0.39 }
fn d_compute_eff() -> f64 { 12.8 }
fn d_p_ant_ue() -> f64 { 0.01 }
fn d_p_rate() -> f64 { 0.8 }
fn d_bandwidth() -> f64 { 20.0 }
fn d_coherence() -> f64 { 200.0 }

#[derive(Debug, Clone, Copy, Default, Serialize, Deserialize, PartialEq, Eq)]
#[serde(rename_all = "snake_case")]
pub enum PaTermFile {
    #[default]
    DivideByEfficiency,
    MultiplyLiteral,
}

impl Default for PowerFile {
    fn default() -> Self {
        PowerFile {
            antenna_power_bs_w: 1.0,
            fixed_power_w: 18.0,
            pa_efficiency: 0.39,
            compute_efficiency_gflops_per_w: 12.8,
            antenna_power_ue_w: 0.01,
            rate_power_w_per_gbps: 0.8,
            bandwidth_mhz: 20.0,
            coherence_block_symbols: 200.0,
            pa_term: PaTermFile::DivideByEfficiency,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimFile {
    /// Absent: sized automatically from the neglect fraction.
    #[serde(default)]
    pub window_radius_m: Option<f64>,
    #[serde(default = "d_neglect")]
    pub neglect_fraction: f64,
    #[serde(default = "d_trials")]
    pub trials: u64,
    #[serde(default = "d_seed")]
    pub seed: u64,
}

fn d_neglect() -> f64 { 1e-3 }
fn d_trials() -> u64 { 10_000 }
fn d_seed() -> u64 { 1 }

impl Default for SimFile {
    fn default() -> Self {
        SimFile { window_radius_m: None, neglect_fraction: 1e-3, trials: 10_000, seed: 1 }
    }
}

/// A fully resolved scenario.
#[derive(Debug, Clone)]
pub struct Scenario {
    pub file: ScenarioFile,
    pub model: NetworkModel,
    pub policy: CompPolicy,
    pub power: PowerModel,
    pub window_radius: f64,
    pub trials: u64,
    pub seed: u64,
}

impl ScenarioFile {
    pub fn from_path(path: &Path) -> Result<Self, ScenarioError> {
        let text = std::fs::read_to_string(path)?;
        let file: ScenarioFile = serde_json::from_str(&text)?;
        Ok(file)
    }

    pub fn to_model(&self) -> Result<NetworkModel, ScenarioError> {
        let tiers = self
            .tiers
            .iter()
            .enumerate()
            .map(|(i, t)| TierParams {
                density: t.density_per_km2 / 1e6,
                tx_power: dbm_to_watts(t.tx_power_dbm.unwrap_or(if i == 0 { 44.0 } else { 33.0 })),
                antenna_height: t.antenna_height_m.unwrap_or(if i == 0 { 25.0 } else { 10.0 }),
                deployment: match t.deployment {
                    DeploymentFile::Ppp => Deployment::Ppp,
                    DeploymentFile::Hex => Deployment::HexGrid,
                },
            })
            .collect();
        let model = NetworkModel {
            tiers,
            user_height: self.user.height_m,
            user_density: self.user.density_per_km2 / 1e6,
            blockage: BlockageParams {
                built_fraction: self.blockage.epsilon,
                building_density: self.blockage.buildings_per_km2 / 1e6,
                mean_building_height: self.blockage.mean_height_m,
                base_height: match self.blockage.base_height {
                    BaseHeightFile::HeightDifference => BlockageBaseHeight::HeightDifference,
                    BaseHeightFile::BsHeight => BlockageBaseHeight::BsHeight,
                },
            },
            channel: ChannelParams {
                alpha_los: self.channel.alpha_los,
                alpha_nlos: self.channel.alpha_nlos,
                m_los: self.channel.m_los,
                m_nlos: self.channel.m_nlos,
                los_enabled: self.channel.los_enabled,
            },
        };
        model.validate().map_err(|e| ScenarioError::Validation(e.to_string()))?;
        Ok(model)
    }

    pub fn to_policy(&self, model: &NetworkModel) -> Result<CompPolicy, ScenarioError> {
        let k = model.num_tiers();
        let policy = match self.comp.scheme {
            SchemeFile::Rrlp => {
                let eta = if let Some(db) = self.comp.eta_db {
                    EtaMatrix::scalar(k, db_to_ratio(db))
                } else if let Some(rows) = &self.comp.eta_db_matrix {
                    let linear: Vec<Vec<f64>> = rows
                        .iter()
                        .map(|r| r.iter().map(|&db| db_to_ratio(db)).collect())
                        .collect();
                    EtaMatrix::from_rows(linear)
                        .map_err(|e| ScenarioError::Validation(e.to_string()))?
                } else if let Some(target) = self.comp.target_n_avg {
                    let eta = udn_core::association::calibrate_eta(model, target)
                        .map_err(|e| ScenarioError::Validation(format!("eta calibration: {e}")))?;
                    EtaMatrix::scalar(k, eta)
                } else {
                    return Err(ScenarioError::Validation(
                        "rrlp scheme needs eta_db, eta_db_matrix or target_n_avg".into(),
                    ));
                };
                CompPolicy { scheme: CompScheme::Rrlp, eta, n_strongest: 1, arlp_floor: 0.0 }
            }
            SchemeFile::Fnsb => CompPolicy::fnsb(k, self.comp.n_strongest.unwrap_or(2)),
            SchemeFile::ArlpThreshold => {
                let floor = self.comp.arlp_floor_dbm.ok_or_else(|| {
                    ScenarioError::Validation("arlp_threshold scheme needs arlp_floor_dbm".into())
                })?;
                CompPolicy::arlp_threshold(k, dbm_to_watts(floor))
            }
            SchemeFile::NoComp => CompPolicy::no_comp(k),
        };
        policy.validate(k).map_err(|e| ScenarioError::Validation(e.to_string()))?;
        Ok(policy)
    }

    pub fn to_power(&self, k: usize) -> Result<PowerModel, ScenarioError> {
        let p = &self.power;
        let power = PowerModel {
            antenna_power_bs: vec![p.antenna_power_bs_w; k],
            fixed_power: vec![p.fixed_power_w; k],
            pa_efficiency: vec![p.pa_efficiency; k],
            compute_efficiency: vec![p.compute_efficiency_gflops_per_w * 1e9; k],
            antenna_power_ue: p.antenna_power_ue_w,
            rate_power: p.rate_power_w_per_gbps * 1e-9,
            bandwidth: p.bandwidth_mhz * 1e6,
            coherence_block: p.coherence_block_symbols,
            pa_term: match p.pa_term {
                PaTermFile::DivideByEfficiency => PaTerm::DivideByEfficiency,
                PaTermFile::MultiplyLiteral => PaTerm::MultiplyLiteral,
            },
        };
        power.validate(k).map_err(|e| ScenarioError::Validation(e.to_string()))?;
        Ok(power)
    }

    pub fn resolve(&self) -> Result<Scenario, ScenarioError> {
        let model = self.to_model()?;
        let policy = self.to_policy(&model)?;
        let power = self.to_power(model.num_tiers())?;
        let window_radius = match self.sim.window_radius_m {
            Some(r) if r > 0.0 => r,
            Some(_) => {
                return Err(ScenarioError::Validation("window radius must be positive".into()))
            }
            None => udn_core::geometry::window_radius_for(&model, self.sim.neglect_fraction)
                .map_err(|e| ScenarioError::Validation(format!("window sizing: {e}")))?,
        };
        Ok(Scenario {
            file: self.clone(),
            model,
            policy,
            power,
            window_radius,
            trials: self.sim.trials,
            seed: self.sim.seed,
        })
    }
}

/// Load and fully resolve a scenario file.
pub fn load_scenario(path: &Path) -> Result<Scenario, ScenarioError> {
    ScenarioFile::from_path(path)?.resolve()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn minimal_json() -> &'static str {
        r#"{"tiers":[{"density_per_km2":20.0},{"density_per_km2":80.0}]}"#
    }

    #[test]
    fn minimal_file_takes_table_defaults() {
        let file: ScenarioFile = serde_json::from_str(minimal_json()).unwrap();
        let model = file.to_model().unwrap();
        assert_eq!(model.num_tiers(), 2);
        assert!((model.tiers[0].tx_power - 25.118864315095795).abs() < 1e-9);
        assert!((model.tiers[1].tx_power - 1.9952623149688795).abs() < 1e-12);
        assert_eq!(model.tiers[0].antenna_height, 25.0);
        assert_eq!(model.tiers[1].antenna_height, 10.0);
        assert_eq!(model.user_height, 1.5);
        assert!((model.user_density - 3e-3).abs() < 1e-15);
        assert_eq!(model.blockage.built_fraction, 0.5);
        assert!((model.blockage.building_density - 300e-6).abs() < 1e-15);
        assert_eq!(model.blockage.mean_building_height, 20.0);
        assert_eq!(model.channel.alpha_los, 2.5);
        assert_eq!(model.channel.alpha_nlos, 3.5);
        assert_eq!(model.channel.m_los, 10);
        assert_eq!(model.channel.m_nlos, 1);
        // densities arrive per km2
        assert!((model.tiers[0].density - 2e-5).abs() < 1e-18);
    }

    #[test]
    fn power_defaults_match_consumption_table() {
        let file: ScenarioFile = serde_json::from_str(minimal_json()).unwrap();
        let power = file.to_power(2).unwrap();
        assert_eq!(power.antenna_power_bs, vec![1.0, 1.0]);
        assert_eq!(power.fixed_power, vec![18.0, 18.0]);
        assert_eq!(power.pa_efficiency, vec![0.39, 0.39]);
        assert_eq!(power.compute_efficiency, vec![12.8e9, 12.8e9]);
        assert_eq!(power.antenna_power_ue, 0.01);
        assert!((power.rate_power - 0.8e-9).abs() < 1e-24);
        assert_eq!(power.bandwidth, 20e6);
        assert_eq!(power.coherence_block, 200.0);
    }

    #[test]
    fn validation_error_names_the_invariant() {
        let json = r#"{"tiers":[{"density_per_km2":20.0,"antenna_height_m":1.0}]}"#;
        let file: ScenarioFile = serde_json::from_str(json).unwrap();
        let err = file.to_model().unwrap_err();
        match err {
            ScenarioError::Validation(msg) => assert!(msg.contains("antenna height")),
            other => panic!("unexpected: {other}"),
        }
    }

    #[test]
    fn malformed_file_is_a_parse_error() {
        let err = serde_json::from_str::<ScenarioFile>("{\"tiers\": [}").unwrap_err();
        let _ = ScenarioError::from(err);
    }

    #[test]
    fn round_trip_preserves_model() {
        let file: ScenarioFile = serde_json::from_str(minimal_json()).unwrap();
        let text = serde_json::to_string(&file).unwrap();
        let back: ScenarioFile = serde_json::from_str(&text).unwrap();
        let a = file.to_model().unwrap();
        let b = back.to_model().unwrap();
        assert_eq!(format!("{a:?}"), format!("{b:?}"));
    }

    #[test]
    fn eta_db_matrix_is_accepted() {
        let json = r#"{
            "tiers":[{"density_per_km2":20.0},{"density_per_km2":80.0}],
            "comp":{"scheme":"rrlp","eta_db_matrix":[[-3.0,-4.0],[-5.0,-6.0]]}
        }"#;
        let file: ScenarioFile = serde_json::from_str(json).unwrap();
        let model = file.to_model().unwrap();
        let policy = file.to_policy(&model).unwrap();
        assert!((policy.eta.get(1, 0) - db_to_ratio(-5.0)).abs() < 1e-15);
    }
}
