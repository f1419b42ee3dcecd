//! Scenario data model in strict SI units, with invariant validation and
//! the dB/dBm conversions used at the configuration boundary.

use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use crate::mathx;

/// Propagation class of a link.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum LinkClass {
    Los,
    Nlos,
}

impl LinkClass {
    pub const BOTH: [LinkClass; 2] = [LinkClass::Los, LinkClass::Nlos];

    pub fn index(self) -> usize {
        match self {
            LinkClass::Los => 0,
            LinkClass::Nlos => 1,
        }
    }
}

/// Spatial law of one tier's base stations.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Deployment {
    Ppp,
    HexGrid,
}

/// One tier of base stations.
#[derive(Debug, Clone)]
pub struct TierParams {
    /// BS density, per m^2.
    pub density: f64,
    /// Downlink transmit power, watts.
    pub tx_power: f64,
    /// Antenna height above ground, meters.
    pub antenna_height: f64,
    pub deployment: Deployment,
}

/// Which height enters the `rho/h` factor of the LoS-probability base.
///
/// The blockage model's symbol table defines `h_j` as the BS-user height
/// difference; the alternative reading (BS height itself) is kept behind
/// this switch.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BlockageBaseHeight {
    HeightDifference,
    BsHeight,
}

/// Building blockage statistics driving the LoS probability.
#[derive(Debug, Clone)]
pub struct BlockageParams {
    /// Fraction of area covered by buildings, in (0,1).
    pub built_fraction: f64,
    /// Buildings per m^2.
    pub building_density: f64,
    /// Mean building height, meters.
    pub mean_building_height: f64,
    pub base_height: BlockageBaseHeight,
}

/// Pathloss exponents and Nakagami shapes per link class.
#[derive(Debug, Clone)]
pub struct ChannelParams {
    pub alpha_los: f64,
    pub alpha_nlos: f64,
    /// Integer Nakagami shape for LoS links.
    pub m_los: u32,
    /// Integer Nakagami shape for NLoS links.
    pub m_nlos: u32,
    /// When false the LoS probability is identically zero (the all-NLoS
    /// special case).
    pub los_enabled: bool,
}

impl ChannelParams {
    pub fn alpha(&self, c: LinkClass) -> f64 {
        match c {
            LinkClass::Los => self.alpha_los,
            LinkClass::Nlos => self.alpha_nlos,
        }
    }

    pub fn m(&self, c: LinkClass) -> u32 {
        match c {
            LinkClass::Los => self.m_los,
            LinkClass::Nlos => self.m_nlos,
        }
    }
}

/// Complete scenario parameterization.
#[derive(Debug, Clone)]
pub struct NetworkModel {
    pub tiers: Vec<TierParams>,
    /// User antenna height, meters.
    pub user_height: f64,
    /// User density, per m^2.
    pub user_density: f64,
    pub blockage: BlockageParams,
    pub channel: ChannelParams,
}

impl NetworkModel {
    pub fn num_tiers(&self) -> usize {
        self.tiers.len()
    }

    /// Effective antenna height difference of tier `j`.
    pub fn height_diff(&self, j: usize) -> f64 {
        self.tiers[j].antenna_height - self.user_height
    }

    pub fn total_density(&self) -> f64 {
        self.tiers.iter().map(|t| t.density).sum()
    }

    pub fn validate(&self) -> Result<(), ModelError> {
        if self.tiers.is_empty() {
            return Err(ModelError::new("model must have at least one tier (K >= 1)"));
        }
        if !(self.user_density > 0.0) {
            return Err(ModelError::new("user density must be positive"));
        }
        if !(self.user_height > 0.0) {
            return Err(ModelError::new("user height must be positive"));
        }
        for (j, t) in self.tiers.iter().enumerate() {
            if !(t.density >= 0.0) {
                return Err(ModelError::with_tier(j, "tier density must be >= 0"));
            }
            if !(t.tx_power > 0.0) {
                return Err(ModelError::with_tier(j, "tier tx power must be > 0"));
            }
            if t.antenna_height <= self.user_height {
                return Err(ModelError::with_tier(
                    j,
                    "BS antenna height must exceed the user height (h_j > 0)",
                ));
            }
        }
        let b = &self.blockage;
        if !(b.built_fraction > 0.0 && b.built_fraction < 1.0) {
            return Err(ModelError::new("built fraction must lie in (0,1)"));
        }
        if !(b.building_density > 0.0) {
            return Err(ModelError::new("building density must be positive"));
        }
        if !(b.mean_building_height > 0.0) {
            return Err(ModelError::new("mean building height must be positive"));
        }
        let c = &self.channel;
        if !(c.alpha_los >= 2.0) || !(c.alpha_nlos >= c.alpha_los) {
            return Err(ModelError::new(
                "pathloss exponents must satisfy alpha_nlos >= alpha_los >= 2",
            ));
        }
        if c.m_los < 1 || c.m_nlos < 1 || c.m_los < c.m_nlos {
            return Err(ModelError::new(
                "Nakagami shapes must be integers with m_los >= m_nlos >= 1",
            ));
        }
        // the LoS-probability base must be a value in (0,1) for every tier
        if c.los_enabled {
            for (j, _) in self.tiers.iter().enumerate() {
                let base = crate::geometry::los_base(self, j);
                if !(base > 0.0 && base < 1.0) {
                    return Err(ModelError::with_tier(
                        j,
                        "LoS-probability base falls outside (0,1); blockage/height parameters inconsistent",
                    ));
                }
            }
        }
        Ok(())
    }
}

/// CoMP set formation rule.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CompScheme {
    /// Relative received link power: cooperate when ARLP >= eta * main ARLP.
    Rrlp,
    /// Fixed number of strongest BSs by ARLP.
    Fnsb,
    /// Absolute ARLP floor; the main link always cooperates.
    ArlpThreshold,
    /// Main link only.
    NoComp,
}

/// K x K matrix of RRLP thresholds, row = cooperator tier j, column = main
/// link tier k.
#[derive(Debug, Clone)]
pub struct EtaMatrix {
    k: usize,
    values: Vec<f64>,
}

impl EtaMatrix {
    pub fn scalar(k: usize, eta: f64) -> Self {
        EtaMatrix { k, values: alloc::vec![eta; k * k] }
    }

    pub fn from_rows(rows: Vec<Vec<f64>>) -> Result<Self, ModelError> {
        let k = rows.len();
        let mut values = Vec::with_capacity(k * k);
        for row in &rows {
            if row.len() != k {
                return Err(ModelError::new("eta matrix must be square (K x K)"));
            }
            values.extend_from_slice(row);
        }
        Ok(EtaMatrix { k, values })
    }

    #[inline]
    pub fn get(&self, j: usize, k: usize) -> f64 {
        self.values[j * self.k + k]
    }

    pub fn order(&self) -> usize {
        self.k
    }

    pub fn validate(&self) -> Result<(), ModelError> {
        for &v in &self.values {
            if !(v > 0.0 && v <= 1.0) {
                return Err(ModelError::new("eta thresholds must lie in (0, 1]"));
            }
        }
        Ok(())
    }
}

/// CoMP policy: scheme plus its parameters.
#[derive(Debug, Clone)]
pub struct CompPolicy {
    pub scheme: CompScheme,
    pub eta: EtaMatrix,
    /// FNSB set size.
    pub n_strongest: usize,
    /// ARLP floor in watts for the threshold scheme.
    pub arlp_floor: f64,
}

impl CompPolicy {
    pub fn rrlp(k: usize, eta: f64) -> Self {
        CompPolicy {
            scheme: CompScheme::Rrlp,
            eta: EtaMatrix::scalar(k, eta),
            n_strongest: 1,
            arlp_floor: 0.0,
        }
    }

    pub fn fnsb(k: usize, n: usize) -> Self {
        CompPolicy {
            scheme: CompScheme::Fnsb,
            eta: EtaMatrix::scalar(k, 1.0),
            n_strongest: n,
            arlp_floor: 0.0,
        }
    }

    pub fn no_comp(k: usize) -> Self {
        CompPolicy {
            scheme: CompScheme::NoComp,
            eta: EtaMatrix::scalar(k, 1.0),
            n_strongest: 1,
            arlp_floor: 0.0,
        }
    }

    pub fn arlp_threshold(k: usize, floor_watts: f64) -> Self {
        CompPolicy {
            scheme: CompScheme::ArlpThreshold,
            eta: EtaMatrix::scalar(k, 1.0),
            n_strongest: 1,
            arlp_floor: floor_watts,
        }
    }

    pub fn validate(&self, k: usize) -> Result<(), ModelError> {
        if self.eta.order() != k {
            return Err(ModelError::new("eta matrix order must equal the number of tiers"));
        }
        self.eta.validate()?;
        match self.scheme {
            CompScheme::Fnsb if self.n_strongest < 1 => {
                Err(ModelError::new("n_strongest must be >= 1"))
            }
            CompScheme::ArlpThreshold if !(self.arlp_floor > 0.0) => {
                Err(ModelError::new("arlp floor must be positive"))
            }
            _ => Ok(()),
        }
    }
}

/// How the power-amplifier term of the BS power model is applied.
///
/// The consumption table lists 0.39 against the PA-efficiency symbol; taken
/// literally the PA would consume less than it radiates, so the default
/// divides by 0.39 as an efficiency. `MultiplyLiteral` reproduces the
/// literal reading.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PaTerm {
    DivideByEfficiency,
    MultiplyLiteral,
}

/// Power-consumption model for NEE.
#[derive(Debug, Clone)]
pub struct PowerModel {
    /// Per-tier BS antenna power, watts.
    pub antenna_power_bs: Vec<f64>,
    /// Per-tier fixed BS power, watts.
    pub fixed_power: Vec<f64>,
    /// Per-tier PA efficiency, in (0,1].
    pub pa_efficiency: Vec<f64>,
    /// Per-tier computation efficiency, flops per watt.
    pub compute_efficiency: Vec<f64>,
    /// User antenna power, watts.
    pub antenna_power_ue: f64,
    /// Rate-dependent user power, watts per (bit/s).
    pub rate_power: f64,
    /// Bandwidth, Hz.
    pub bandwidth: f64,
    /// Coherence block length, symbols.
    pub coherence_block: f64,
    pub pa_term: PaTerm,
}

impl PowerModel {
    pub fn validate(&self, k: usize) -> Result<(), ModelError> {
        if self.antenna_power_bs.len() != k
            || self.fixed_power.len() != k
            || self.pa_efficiency.len() != k
            || self.compute_efficiency.len() != k
        {
            return Err(ModelError::new("power model vectors must have one entry per tier"));
        }
        let all_pos = self
            .antenna_power_bs
            .iter()
            .chain(&self.fixed_power)
            .chain(&self.compute_efficiency)
            .all(|&v| v > 0.0)
            && self.antenna_power_ue > 0.0
            && self.rate_power > 0.0
            && self.bandwidth > 0.0
            && self.coherence_block > 0.0;
        if !all_pos {
            return Err(ModelError::new("power model parameters must be strictly positive"));
        }
        if !self.pa_efficiency.iter().all(|&v| v > 0.0 && v <= 1.0) {
            return Err(ModelError::new("PA efficiency must lie in (0,1]"));
        }
        Ok(())
    }
}

/// dBm to watts.
#[inline]
pub fn dbm_to_watts(dbm: f64) -> f64 {
    mathx::powf(10.0, (dbm - 30.0) / 10.0)
}

/// Watts to dBm.
#[inline]
pub fn watts_to_dbm(w: f64) -> f64 {
    10.0 * mathx::log10(w) + 30.0
}

/// dB to a linear ratio.
#[inline]
pub fn db_to_ratio(db: f64) -> f64 {
    mathx::powf(10.0, db / 10.0)
}

/// Linear ratio to dB.
#[inline]
pub fn ratio_to_db(r: f64) -> f64 {
    10.0 * mathx::log10(r)
}

/// Validation failure; names the violated invariant.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ModelError {
    pub tier: Option<usize>,
    pub message: String,
}

impl ModelError {
    pub fn new(msg: &str) -> Self {
        ModelError { tier: None, message: String::from(msg) }
    }

    pub fn with_tier(tier: usize, msg: &str) -> Self {
        ModelError { tier: Some(tier), message: String::from(msg) }
    }
}

impl fmt::Display for ModelError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.tier {
            Some(t) => write!(f, "tier {t}: {}", self.message),
            None => write!(f, "{}", self.message),
        }
    }
}

impl core::error::Error for ModelError {}

/// Canonical scenarios used across tests and the CLI defaults.
pub mod presets {
    use super::*;

    /// Two-tier urban scenario with the default parameter tables: 44/33 dBm,
    /// 25/10 m antennas, 1.5 m users, 0.2/0.8 density split.
    pub fn paper_two_tier(total_density: f64) -> NetworkModel {
        NetworkModel {
            tiers: alloc::vec![
                TierParams {
                    density: 0.2 * total_density,
                    tx_power: dbm_to_watts(44.0),
                    antenna_height: 25.0,
                    deployment: Deployment::Ppp,
                },
                TierParams {
                    density: 0.8 * total_density,
                    tx_power: dbm_to_watts(33.0),
                    antenna_height: 10.0,
                    deployment: Deployment::Ppp,
                },
            ],
            user_height: 1.5,
            user_density: 3e-3,
            blockage: BlockageParams {
                built_fraction: 0.5,
                building_density: 300e-6,
                mean_building_height: 20.0,
                base_height: BlockageBaseHeight::HeightDifference,
            },
            channel: ChannelParams {
                alpha_los: 2.5,
                alpha_nlos: 3.5,
                m_los: 10,
                m_nlos: 1,
                los_enabled: true,
            },
        }
    }

    /// Single-tier, all-NLoS, Rayleigh scenario with a common pathloss
    /// exponent (the closed-form special case).
    pub fn single_tier_nlos_rayleigh(density: f64, alpha: f64) -> NetworkModel {
        let mut m = paper_two_tier(density);
        m.tiers.truncate(1);
        m.tiers[0].density = density;
        m.channel = ChannelParams {
            alpha_los: alpha,
            alpha_nlos: alpha,
            m_los: 1,
            m_nlos: 1,
            los_enabled: false,
        };
        m
    }

    /// Default power-consumption table: 1 W antenna, 18 W fixed, PA
    /// efficiency 0.39, 12.8 Gflops/W, 0.01 W user antenna,
    /// 0.8 W/(Gbit/s), 20 MHz, 200-symbol coherence block.
    pub fn paper_power_model(k: usize) -> PowerModel {
        PowerModel {
            antenna_power_bs: alloc::vec![1.0; k],
            fixed_power: alloc::vec![18.0; k],
            pa_efficiency: alloc::vec![0.39; k],
            compute_efficiency: alloc::vec![12.8e9; k],
            antenna_power_ue: 0.01,
            rate_power: 0.8e-9,
            bandwidth: 20e6,
            coherence_block: 200.0,
            pa_term: PaTerm::DivideByEfficiency,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::presets::paper_two_tier;
    use super::*;

    #[test]
    fn unit_conversions() {
        assert!((dbm_to_watts(30.0) - 1.0).abs() < 1e-15);
        assert!((dbm_to_watts(44.0) - 25.118864315095795).abs() < 1e-12);
        assert!((db_to_ratio(-7.70) - 0.16982436524617442).abs() < 1e-15);
        // round trip
        for &w in &[1e-9, 0.5, 1.0, 25.12, 4000.0] {
            let back = dbm_to_watts(watts_to_dbm(w));
            assert!(((back - w) / w).abs() < 1e-12);
        }
    }

    #[test]
    fn validation_catches_height_violation() {
        let mut m = paper_two_tier(1e-4);
        m.tiers[1].antenna_height = 1.0; // below the 1.5 m user
        let err = m.validate().unwrap_err();
        assert_eq!(err.tier, Some(1));
    }

    #[test]
    fn validation_enforces_shape_and_exponent_order() {
        let mut m = paper_two_tier(1e-4);
        m.channel.m_nlos = 12; // m_los = 10 < m_nlos
        assert!(m.validate().is_err());
        let mut m = paper_two_tier(1e-4);
        m.channel.alpha_los = 3.9; // alpha_nlos = 3.5 < alpha_los
        assert!(m.validate().is_err());
    }

    #[test]
    fn paper_defaults_validate() {
        assert!(paper_two_tier(1e-4).validate().is_ok());
    }

    #[test]
    fn eta_matrix_bounds() {
        assert!(EtaMatrix::scalar(2, 0.5).validate().is_ok());
        assert!(EtaMatrix::scalar(2, 0.0).validate().is_err());
        assert!(EtaMatrix::scalar(2, 1.2).validate().is_err());
    }
}
