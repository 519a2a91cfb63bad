//! Uplink multiuser SIMO GFDM link model with semi-blind joint estimation of
//! per-user carrier frequency offsets, channels and transmit IQ imbalance.
//!
//! Numerical code is generic over [`Real`] (`f32` or `f64`); the `*64`
//! aliases below fix the scalar to `f64`, which is what the simulation
//! harness uses.

pub mod channel;
pub mod config;
pub mod crlb;
pub mod detector;
pub mod error;
pub mod estimator;
pub mod frame;
pub mod linalg;
pub mod modem;
pub mod optimize;
pub mod scalar;
pub mod waveform;

pub use channel::{FrameTruth, ImpairmentRanges, ReceivedFrame, UserImpairment};
pub use config::SystemConfig;
pub use detector::{DetectionOperators, Detector};
pub use error::{Error, Result};
pub use estimator::{EstimationResult, EstimatorOptions, PilotLayout, UserEstimate};
pub use scalar::{CMatrix, CVector, Cx, Real};
pub use waveform::{AssignmentPlan, LinkModel, ModulationMatrix};

pub type LinkModel64 = LinkModel<f64>;
pub type ModulationMatrix64 = ModulationMatrix<f64>;
pub type ReceivedFrame64 = ReceivedFrame<f64>;
pub type UserImpairment64 = UserImpairment<f64>;
pub type EstimationResult64 = EstimationResult<f64>;
pub type Detector64 = Detector<f64>;
