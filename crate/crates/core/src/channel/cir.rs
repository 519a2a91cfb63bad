//! Multipath channel draws and the CFO-included channel vector.

use nalgebra::DMatrix;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::scalar::{cis, cx, CMatrix, CVector, Real};

/// Exponential power-delay profile `p[l] ∝ exp(-l/rms)`, `l = 0..taps`,
/// normalized to unit total power.
pub fn exponential_profile(taps: usize, rms: f64) -> Vec<f64> {
    let raw: Vec<f64> = (0..taps).map(|l| (-(l as f64) / rms).exp()).collect();
    let total: f64 = raw.iter().sum();
    raw.into_iter().map(|p| p / total).collect()
}

/// Rayleigh-fading CIR, one row per receive antenna (`N_r × L`).
pub fn draw_channel<T: Real, R: Rng + ?Sized>(
    taps: usize,
    rms: f64,
    rx_antennas: usize,
    rng: &mut R,
) -> CMatrix<T> {
    let profile = exponential_profile(taps, rms);
    DMatrix::from_fn(rx_antennas, taps, |_, l| {
        let sd = (profile[l] / 2.0).sqrt();
        let re: f64 = rng.sample(StandardNormal);
        let im: f64 = rng.sample(StandardNormal);
        cx(T::lit(sd * re), T::lit(sd * im))
    })
}

/// Rotates tap `l` (1-based) by `exp(j2π·phi·l/K)` and stacks the taps as
/// `[h(L); h(L-1); …; h(1)]`, each block holding the `N_r` antennas.
pub fn cfo_included_cir<T: Real>(hbar: &CMatrix<T>, phi: T, k: usize) -> CVector<T> {
    let (nr, taps) = hbar.shape();
    let step = T::two_pi() * phi / T::count(k);
    CVector::from_fn(nr * taps, |idx, _| {
        let block = idx / nr;
        let ant = idx % nr;
        let l = taps - block; // 1-based tap number
        hbar[(ant, l - 1)] * cis(step * T::count(l))
    })
}
