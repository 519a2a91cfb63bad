//! Ground-truth impairments and synthesis of the received frame.

pub mod cir;
pub mod iq;
pub mod matrices;

pub use cir::{cfo_included_cir, draw_channel, exponential_profile};
pub use iq::{iq_params, IqImbalance};
pub use matrices::{apply_cfo, apply_channel, build_cfo_matrix, build_channel_matrix, build_upsilon, cfo_ramp};

use rand::Rng;
use rand_distr::StandardNormal;

use crate::config::SystemConfig;
use crate::error::{input_err, Result};
use crate::scalar::{abs2, cx, CMatrix, CVector, Real};
use crate::waveform::LinkModel;

/// Per-user ground truth.
#[derive(Debug, Clone)]
pub struct UserImpairment<T: Real> {
    /// CFO normalized to the subcarrier spacing.
    pub phi: T,
    pub iq: IqImbalance<T>,
    /// Raw CIR, `N_r × L`.
    pub hbar: CMatrix<T>,
    /// CFO-included CIR stacked as `[h(L); …; h(1)]`.
    pub h: CVector<T>,
}

impl<T: Real> UserImpairment<T> {
    pub fn new(phi: T, iq: IqImbalance<T>, hbar: CMatrix<T>, k: usize) -> Self {
        let h = cfo_included_cir(&hbar, phi, k);
        Self { phi, iq, hbar, h }
    }

    /// `h·alpha`.
    pub fn h_source(&self) -> CVector<T> {
        &self.h * self.iq.alpha
    }

    /// `h·beta`.
    pub fn h_image(&self) -> CVector<T> {
        &self.h * self.iq.beta
    }
}

/// Ranges impairments are drawn from, uniformly, once per trial.
#[derive(Debug, Clone, PartialEq)]
pub struct ImpairmentRanges {
    /// CFOs are drawn from `[-cfo_max, cfo_max)`.
    pub cfo_max: f64,
    pub epsilon: (f64, f64),
    pub theta_deg: (f64, f64),
    /// RMS delay spread of the exponential profile, in samples.
    pub rms_delay: f64,
}

impl Default for ImpairmentRanges {
    fn default() -> Self {
        Self {
            cfo_max: 0.5,
            epsilon: (0.8, 1.2),
            theta_deg: (-15.0, 15.0),
            rms_delay: 1.5,
        }
    }
}

pub fn draw_impairments<T: Real, R: Rng + ?Sized>(
    config: &SystemConfig,
    ranges: &ImpairmentRanges,
    rng: &mut R,
) -> Vec<UserImpairment<T>> {
    (0..config.users)
        .map(|_| {
            let phi = ranges.cfo_max * (2.0 * rng.random::<f64>() - 1.0);
            let eps = uniform(rng, ranges.epsilon);
            let theta = uniform(rng, ranges.theta_deg).to_radians();
            let hbar = draw_channel(config.channel_taps, ranges.rms_delay, config.rx_antennas, rng);
            UserImpairment::new(T::lit(phi), IqImbalance::new(T::lit(eps), T::lit(theta)), hbar, config.k)
        })
        .collect()
}

fn uniform<R: Rng + ?Sized>(rng: &mut R, (lo, hi): (f64, f64)) -> f64 {
    lo + (hi - lo) * rng.random::<f64>()
}

/// `G_I = H E(phi) Ψ_u` and `G_Q = H E(phi) Ψ_u*` for CIR `h`.
pub fn signal_matrices<T: Real>(link: &LinkModel<T>, u: usize, h: &CVector<T>, phi: T) -> (CMatrix<T>, CMatrix<T>) {
    let c = &link.config;
    let ramp = cfo_ramp(phi, c.g(), c.k);
    let psi = &link.psi[u];
    let gi = apply_channel(h, &apply_cfo(&ramp, psi), c.channel_taps, c.rx_antennas);
    let gq = apply_channel(h, &apply_cfo(&ramp, &psi.map(|z| z.conj())), c.channel_taps, c.rx_antennas);
    (gi, gq)
}

/// What generated a frame: impairments plus `data[symbol][user]`.
#[derive(Debug, Clone)]
pub struct FrameTruth<T: Real> {
    pub users: Vec<UserImpairment<T>>,
    pub data: Vec<Vec<CVector<T>>>,
}

#[derive(Debug, Clone)]
pub struct ReceivedFrame<T: Real> {
    /// `N_s` vectors of length `N_r(G−L+1)`, antenna-interleaved.
    pub y: Vec<CVector<T>>,
    /// Noise variance per complex sample.
    pub sigma2: T,
    pub truth: FrameTruth<T>,
}

impl<T: Real> ReceivedFrame<T> {
    pub fn symbols(&self) -> usize {
        self.y.len()
    }
}

/// Received vectors without noise.
pub fn noise_free_signal<T: Real>(link: &LinkModel<T>, truth: &FrameTruth<T>) -> Result<Vec<CVector<T>>> {
    let c = &link.config;
    if truth.users.len() != link.users() {
        return input_err(format!("{} impairments for {} users", truth.users.len(), link.users()));
    }
    for (i, sym) in truth.data.iter().enumerate() {
        if sym.len() != link.users() || sym.iter().any(|d| d.len() != link.per_user()) {
            return input_err(format!("symbol {i} does not match the {}-user, {}-element layout", link.users(), link.per_user()));
        }
    }
    let ops: Vec<_> = truth
        .users
        .iter()
        .enumerate()
        .map(|(u, imp)| {
            let (gi, gq) = signal_matrices(link, u, &imp.h, imp.phi);
            (gi * imp.iq.alpha, gq * imp.iq.beta)
        })
        .collect();
    Ok(truth
        .data
        .iter()
        .map(|sym| {
            let mut y = CVector::zeros(c.obs_dim());
            for ((gi, gq), d) in ops.iter().zip(sym) {
                y += gi * d;
                y += gq * d.map(|z| z.conj());
            }
            y
        })
        .collect())
}

/// Average power per complex sample.
pub fn mean_power<T: Real>(y: &[CVector<T>]) -> T {
    let (sum, count) = y
        .iter()
        .fold((T::zero(), 0usize), |(s, n), v| (s + v.iter().fold(T::zero(), |a, z| a + abs2(*z)), n + v.len()));
    if count == 0 {
        T::zero()
    } else {
        sum / T::count(count)
    }
}

/// Adds circular complex Gaussian noise of variance `sigma2` per entry.
pub fn add_noise<T: Real, R: Rng + ?Sized>(y: &mut [CVector<T>], sigma2: T, rng: &mut R) {
    if sigma2 <= T::zero() {
        return;
    }
    let sd = (sigma2.to_f64_lossy() / 2.0).sqrt();
    for v in y.iter_mut() {
        for z in v.iter_mut() {
            let re: f64 = rng.sample(StandardNormal);
            let im: f64 = rng.sample(StandardNormal);
            *z += cx(T::lit(sd * re), T::lit(sd * im));
        }
    }
}

/// `y_i = Σ_u (α_u G_{I,u} d_{i,u} + β_u G_{Q,u} d*_{i,u}) + w_i`.
pub fn synthesize_received<T: Real, R: Rng + ?Sized>(
    link: &LinkModel<T>,
    truth: FrameTruth<T>,
    sigma2: T,
    rng: &mut R,
) -> Result<ReceivedFrame<T>> {
    let mut y = noise_free_signal(link, &truth)?;
    add_noise(&mut y, sigma2, rng);
    Ok(ReceivedFrame { y, sigma2, truth })
}

/// Synthesizes at `snr_db`, where SNR is the measured noise-free received
/// power per complex sample over the noise variance. `None` means no noise.
pub fn synthesize_at_snr<T: Real, R: Rng + ?Sized>(
    link: &LinkModel<T>,
    truth: FrameTruth<T>,
    snr_db: Option<f64>,
    rng: &mut R,
) -> Result<ReceivedFrame<T>> {
    let mut y = noise_free_signal(link, &truth)?;
    let sigma2 = match snr_db {
        Some(snr) => T::lit(mean_power(&y).to_f64_lossy() / 10f64.powf(snr / 10.0)),
        None => T::zero(),
    };
    add_noise(&mut y, sigma2, rng);
    Ok(ReceivedFrame { y, sigma2, truth })
}
