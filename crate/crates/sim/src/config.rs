//! Campaign configuration: one flat TOML table plus `key=value` overrides.

use std::path::Path;

use gfdm_core::channel::ImpairmentRanges;
use gfdm_core::estimator::{compute_subspace_dims, plan_pilots, CfoCost, EstimatorOptions, PilotLayout};
use gfdm_core::waveform::rectangular_prototype;
use gfdm_core::{AssignmentPlan, LinkModel, SystemConfig};
use serde::{Deserialize, Serialize};

use crate::error::{Result, SimError};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum AssignmentKind {
    ContiguousBlock,
    Interleaved,
    /// Taken from `assignment_sets`.
    Explicit,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Prototype {
    Rrc,
    Rectangular,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Mode {
    Jcciqe,
    Genie,
}

impl Mode {
    pub fn tag(self) -> &'static str {
        match self {
            Mode::Jcciqe => "jcciqe",
            Mode::Genie => "genie",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CostKind {
    MinEig,
    LogDet,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CampaignConfig {
    pub k: usize,
    pub m: usize,
    pub users: usize,
    pub data_subcarriers: usize,
    pub channel_taps: usize,
    pub cp_len: usize,
    pub rx_antennas: usize,
    pub symbols_per_frame: usize,
    pub rolloff: f64,
    pub prototype: Prototype,
    pub pilots_per_user: usize,
    pub cfo_step: f64,
    pub cost: CostKind,
    pub assignment: AssignmentKind,
    /// `assignment_sets[u][m]`: 1-based subcarriers of user `u` on subsymbol `m`.
    pub assignment_sets: Option<Vec<Vec<Vec<usize>>>>,
    /// `inf` runs noise-free.
    #[serde(alias = "snr_db_list")]
    pub snr_db: Vec<f64>,
    pub trials: usize,
    pub master_seed: u64,
    pub cfo_max: f64,
    pub eps_range: [f64; 2],
    pub theta_range_deg: [f64; 2],
    pub rms_delay: f64,
    pub outage_threshold: f64,
    pub modes: Vec<Mode>,
    pub crlb: bool,
    /// Record wall time per row. Off by default so outputs stay byte-stable.
    pub timing: bool,
}

impl Default for CampaignConfig {
    fn default() -> Self {
        let s = SystemConfig::default();
        let r = ImpairmentRanges::default();
        Self {
            k: s.k,
            m: s.m,
            users: s.users,
            data_subcarriers: s.data_subcarriers,
            channel_taps: s.channel_taps,
            cp_len: s.cp_len,
            rx_antennas: s.rx_antennas,
            symbols_per_frame: s.symbols_per_frame,
            rolloff: s.rolloff,
            prototype: Prototype::Rrc,
            pilots_per_user: s.pilots_per_user,
            cfo_step: s.cfo_step,
            cost: CostKind::MinEig,
            assignment: AssignmentKind::ContiguousBlock,
            assignment_sets: None,
            snr_db: vec![10.0, 20.0, 30.0],
            trials: 50,
            master_seed: 1,
            cfo_max: r.cfo_max,
            eps_range: [r.epsilon.0, r.epsilon.1],
            theta_range_deg: [r.theta_deg.0, r.theta_deg.1],
            rms_delay: r.rms_delay,
            outage_threshold: 0.01,
            modes: vec![Mode::Jcciqe, Mode::Genie],
            crlb: false,
            timing: false,
        }
    }
}

fn config_err<T>(msg: impl Into<String>) -> Result<T> {
    Err(SimError::Config(msg.into()))
}

/// Everything a trial needs that does not change between trials.
#[derive(Debug, Clone)]
pub struct Prepared {
    pub link: LinkModel<f64>,
    pub layout: PilotLayout,
    pub ranges: ImpairmentRanges,
    pub estimator: EstimatorOptions,
}

impl CampaignConfig {
    pub fn from_toml_str(text: &str, overrides: &[String]) -> Result<Self> {
        let mut table: toml::Table = toml::from_str(text).map_err(|e| SimError::Config(e.to_string()))?;
        for o in overrides {
            apply_override(&mut table, o)?;
        }
        let cfg: Self = toml::Value::Table(table).try_into().map_err(|e: toml::de::Error| SimError::Config(e.to_string()))?;
        Ok(cfg)
    }

    pub fn load(path: &Path, overrides: &[String]) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| SimError::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::from_toml_str(&text, overrides)
    }

    pub fn to_toml_string(&self) -> String {
        toml::to_string(self).expect("campaign config serializes")
    }

    pub fn system(&self) -> SystemConfig {
        SystemConfig {
            k: self.k,
            m: self.m,
            users: self.users,
            data_subcarriers: self.data_subcarriers,
            channel_taps: self.channel_taps,
            cp_len: self.cp_len,
            rx_antennas: self.rx_antennas,
            symbols_per_frame: self.symbols_per_frame,
            rolloff: self.rolloff,
            pilots_per_user: self.pilots_per_user,
            cfo_step: self.cfo_step,
        }
    }

    pub fn ranges(&self) -> ImpairmentRanges {
        ImpairmentRanges {
            cfo_max: self.cfo_max,
            epsilon: (self.eps_range[0], self.eps_range[1]),
            theta_deg: (self.theta_range_deg[0], self.theta_range_deg[1]),
            rms_delay: self.rms_delay,
        }
    }

    pub fn estimator_options(&self) -> EstimatorOptions {
        let mut o = EstimatorOptions::with_step(self.cfo_step);
        o.cfo.cost = match self.cost {
            CostKind::MinEig => CfoCost::SmallestEigenvalue,
            CostKind::LogDet => CfoCost::LogDeterminant,
        };
        o
    }

    pub fn plan(&self) -> Result<AssignmentPlan> {
        let system = self.system();
        system.validate()?;
        let plan = match self.assignment {
            AssignmentKind::ContiguousBlock => AssignmentPlan::contiguous_block(&system)?,
            AssignmentKind::Interleaved => AssignmentPlan::interleaved(&system)?,
            AssignmentKind::Explicit => match &self.assignment_sets {
                Some(sets) => AssignmentPlan::new(&system, sets.clone())?,
                None => return config_err("assignment = \"explicit\" needs assignment_sets"),
            },
        };
        if self.assignment != AssignmentKind::Explicit && self.assignment_sets.is_some() {
            return config_err("assignment_sets given but assignment is not \"explicit\"");
        }
        Ok(plan)
    }

    /// Checks the campaign-level invariants and builds the link, including
    /// the antenna-count feasibility check.
    pub fn prepare(&self) -> Result<Prepared> {
        if self.trials == 0 {
            return config_err("trials must be at least 1");
        }
        if self.snr_db.is_empty() {
            return config_err("snr_db must list at least one SNR");
        }
        if let Some(bad) = self.snr_db.iter().find(|s| s.is_nan() || **s == f64::NEG_INFINITY) {
            return config_err(format!("invalid SNR {bad}"));
        }
        if self.symbols_per_frame < 2 {
            return config_err("a frame needs the pilot symbol plus at least one data symbol");
        }
        if !(0.0..=0.5).contains(&self.cfo_max) {
            return config_err(format!("cfo_max {} outside [0, 0.5]", self.cfo_max));
        }
        for (name, [lo, hi]) in [("eps_range", self.eps_range), ("theta_range_deg", self.theta_range_deg)] {
            if !(lo.is_finite() && hi.is_finite() && lo <= hi) {
                return config_err(format!("{name} [{lo}, {hi}] is not an ordered range"));
            }
        }
        if self.eps_range[0] <= 0.0 {
            return config_err("amplitude mismatch must be positive");
        }
        if self.theta_range_deg[0] <= -90.0 || self.theta_range_deg[1] >= 90.0 {
            return config_err("phase mismatch must stay inside (-90, 90) degrees");
        }
        if !(self.rms_delay > 0.0) {
            return config_err("rms_delay must be positive");
        }
        if !(0.0..=1.0).contains(&self.outage_threshold) {
            return config_err(format!("outage_threshold {} outside [0, 1]", self.outage_threshold));
        }
        if self.modes.is_empty() {
            return config_err("modes must name at least one of jcciqe, genie");
        }
        let mut modes = self.modes.clone();
        modes.sort();
        modes.dedup();
        if modes.len() != self.modes.len() {
            return config_err("modes lists a mode twice");
        }
        if !(self.cfo_step > 0.0 && self.cfo_step <= 0.5) {
            return config_err(format!("cfo_step {} outside (0, 0.5]", self.cfo_step));
        }
        let plan = self.plan()?;
        let system = self.system();
        compute_subspace_dims(&system, &plan, true)?;
        let layout = plan_pilots(&plan, self.pilots_per_user)?;
        let link = match self.prototype {
            Prototype::Rrc => LinkModel::new(system, plan)?,
            Prototype::Rectangular => {
                let proto = rectangular_prototype(system.n());
                LinkModel::with_prototype(system, plan, &proto)?
            }
        };
        Ok(Prepared {
            link,
            layout,
            ranges: self.ranges(),
            estimator: self.estimator_options(),
        })
    }
}

/// Applies `key=value`; the value is read as a TOML value, or as a bare
/// string if it does not parse as one.
pub fn apply_override(table: &mut toml::Table, item: &str) -> Result<()> {
    let Some((key, value)) = item.split_once('=') else {
        return config_err(format!("override `{item}` is not key=value"));
    };
    let key = key.trim();
    if key.is_empty() {
        return config_err(format!("override `{item}` has an empty key"));
    }
    let value = value.trim();
    let parsed = toml::from_str::<toml::Table>(&format!("v = {value}"))
        .ok()
        .and_then(|mut t| t.remove("v"))
        .unwrap_or_else(|| toml::Value::String(value.to_string()));
    table.insert(key.to_string(), parsed);
    Ok(())
}
