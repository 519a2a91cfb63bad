//! Monte-Carlo campaigns over the GFDM joint estimator: configuration,
//! seeding, per-trial metrics and CSV output.

pub mod campaign;
pub mod config;
pub mod error;
pub mod metrics;
pub mod output;
pub mod seed;
pub mod selftest;

pub use campaign::{run_campaign, Campaign, CampaignOutput, SummaryRow, TrialRecord};
pub use config::{AssignmentKind, CampaignConfig, CostKind, Mode, Prototype};
pub use error::{Result, SimError};
