//! GFDM transmit side: prototype pulse, modulation matrix, user assignment.

pub mod assignment;
pub mod modulation;
pub mod prototype;

pub use assignment::{build_assignment, default_data_subcarriers, image_subcarrier, AssignmentPlan};
pub use modulation::{build_modulation_matrix, ModulationMatrix};
pub use prototype::{build_prototype_filter, rectangular_prototype, rrc_impulse};

use nalgebra::DMatrix;

use crate::config::SystemConfig;
use crate::error::{config_err, input_err, Result};
use crate::scalar::{CMatrix, CVector, Real};

/// Everything the transmitter and the receiver share about the waveform.
///
/// `psi[u]` is `Ψ_u = A_cp Γ_u` (`G × N_u`); it maps user `u`'s data vector
/// to its CP-extended transmit samples.
#[derive(Debug, Clone)]
pub struct LinkModel<T: Real> {
    pub config: SystemConfig,
    pub modulation: ModulationMatrix<T>,
    pub plan: AssignmentPlan,
    pub psi: Vec<CMatrix<T>>,
}

impl<T: Real> LinkModel<T> {
    /// RRC prototype with the configured roll-off.
    pub fn new(config: SystemConfig, plan: AssignmentPlan) -> Result<Self> {
        config.validate()?;
        let proto = build_prototype_filter::<T>(config.k, config.m, config.rolloff)?;
        Self::with_prototype(config, plan, &proto)
    }

    pub fn with_prototype(config: SystemConfig, plan: AssignmentPlan, prototype: &[T]) -> Result<Self> {
        config.validate()?;
        if plan.k != config.k || plan.m != config.m || plan.users() != config.users {
            return config_err("assignment plan does not match the system dimensions");
        }
        let modulation = ModulationMatrix::new(prototype, config.k, config.m, config.cp_len)?;
        let psi = (0..plan.users())
            .map(|u| {
                let cols = plan.columns(u);
                DMatrix::from_fn(modulation.g(), cols.len(), |r, c| modulation.a_cp[(r, cols[c])])
            })
            .collect();
        Ok(Self {
            config,
            modulation,
            plan,
            psi,
        })
    }

    pub fn users(&self) -> usize {
        self.plan.users()
    }

    pub fn per_user(&self) -> usize {
        self.plan.per_user()
    }

    /// `s = Ψ_u d`.
    pub fn modulate_symbol(&self, u: usize, data: &CVector<T>) -> Result<CVector<T>> {
        if u >= self.users() {
            return input_err(format!("user {u} out of range"));
        }
        if data.len() != self.per_user() {
            return input_err(format!(
                "user data has {} entries, expected {}",
                data.len(),
                self.per_user()
            ));
        }
        Ok(&self.psi[u] * data)
    }
}
