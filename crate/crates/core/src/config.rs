use crate::error::{config_err, Result};

/// Dimensioning of one multiuser SIMO GFDM link.
///
/// Counts follow the usual GFDM naming: `k` subcarriers per subsymbol, `m`
/// subsymbols per symbol, `n() = m·k` samples per symbol and
/// `g() = n() + cp_len` samples once the cyclic prefix is attached.
#[derive(Debug, Clone, PartialEq)]
pub struct SystemConfig {
    pub k: usize,
    pub m: usize,
    pub users: usize,
    /// Data subcarriers per subsymbol; the remaining `k - data_subcarriers`
    /// carry DC/guard nulls.
    pub data_subcarriers: usize,
    pub channel_taps: usize,
    pub cp_len: usize,
    pub rx_antennas: usize,
    pub symbols_per_frame: usize,
    pub rolloff: f64,
    pub pilots_per_user: usize,
    /// Coarse CFO grid step in units of subcarrier spacing.
    pub cfo_step: f64,
}

impl Default for SystemConfig {
    fn default() -> Self {
        Self {
            k: 16,
            m: 4,
            users: 2,
            data_subcarriers: 14,
            channel_taps: 3,
            cp_len: 4,
            rx_antennas: 4,
            symbols_per_frame: 200,
            rolloff: 0.4,
            pilots_per_user: 1,
            cfo_step: 0.01,
        }
    }
}

impl SystemConfig {
    pub fn n(&self) -> usize {
        self.m * self.k
    }

    pub fn g(&self) -> usize {
        self.n() + self.cp_len
    }

    /// Number of ISI-free samples kept per antenna.
    pub fn kept_samples(&self) -> usize {
        self.g() + 1 - self.channel_taps
    }

    /// Length of a received vector `y_i`.
    pub fn obs_dim(&self) -> usize {
        self.rx_antennas * self.kept_samples()
    }

    /// Length of a stacked CIR vector.
    pub fn cir_len(&self) -> usize {
        self.rx_antennas * self.channel_taps
    }

    /// Data resource elements per symbol over all users.
    pub fn data_elements(&self) -> usize {
        self.m * self.data_subcarriers
    }

    /// Resource elements per user.
    pub fn per_user(&self) -> usize {
        self.data_elements() / self.users
    }

    pub fn validate(&self) -> Result<()> {
        let counts = [
            ("K", self.k),
            ("M", self.m),
            ("U", self.users),
            ("K_D", self.data_subcarriers),
            ("L", self.channel_taps),
            ("N_r", self.rx_antennas),
            ("N_s", self.symbols_per_frame),
        ];
        for (name, v) in counts {
            if v == 0 {
                return config_err(format!("{name} must be at least 1"));
            }
        }
        if self.data_subcarriers > self.k {
            return config_err(format!(
                "K_D = {} exceeds K = {}",
                self.data_subcarriers, self.k
            ));
        }
        if self.n() < 2 {
            return config_err("K·M must be at least 2");
        }
        if !(0.0..=1.0).contains(&self.rolloff) {
            return config_err(format!("roll-off {} outside [0, 1]", self.rolloff));
        }
        if !(self.cfo_step > 0.0 && self.cfo_step < 1.0) {
            return config_err(format!("CFO step {} outside (0, 1)", self.cfo_step));
        }
        if self.channel_taps > self.g() {
            return config_err("channel longer than the CP-extended symbol");
        }
        if !self.data_elements().is_multiple_of(self.users) {
            return config_err(format!(
                "{} data resource elements cannot be split equally among {} users",
                self.data_elements(),
                self.users
            ));
        }
        Ok(())
    }
}
