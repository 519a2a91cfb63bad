//! Per-trial error metrics.

use gfdm_core::modem::bit_errors;
use gfdm_core::CVector;

/// `(1/U) Σ_u (φ̂_u − φ_u)²`.
pub fn mse_cfo(estimates: &[f64], truth: &[f64]) -> f64 {
    assert_eq!(estimates.len(), truth.len(), "one estimate per user");
    if truth.is_empty() {
        return 0.0;
    }
    estimates.iter().zip(truth).map(|(e, t)| (e - t).powi(2)).sum::<f64>() / truth.len() as f64
}

/// `(1/(2 U N_r L)) Σ_u (‖ĥ_I − h_I‖² + ‖ĥ_Q − h_Q‖²)` over `(source, image)` pairs.
pub fn mse_channel_iq(estimates: &[(CVector<f64>, CVector<f64>)], truth: &[(CVector<f64>, CVector<f64>)]) -> f64 {
    assert_eq!(estimates.len(), truth.len(), "one channel pair per user");
    let Some(first) = truth.first() else { return 0.0 };
    let total: f64 = estimates
        .iter()
        .zip(truth)
        .map(|((ei, eq), (ti, tq))| (ei - ti).norm_squared() + (eq - tq).norm_squared())
        .sum();
    total / (2 * truth.len() * first.0.len()) as f64
}

/// Bit errors between detected and transmitted QPSK vectors.
pub fn count_bit_errors(detected: &CVector<f64>, sent: &CVector<f64>) -> usize {
    assert_eq!(detected.len(), sent.len());
    detected.iter().zip(sent.iter()).map(|(a, b)| bit_errors(*a, *b)).sum()
}

/// A failed trial (no BER) counts as an outage.
pub fn is_outage(ber: Option<f64>, threshold: f64) -> bool {
    ber.is_none_or(|b| b > threshold)
}

/// Fraction of `bers` exceeding `threshold`; `None` entries count as outages.
pub fn outage_probability(bers: &[Option<f64>], threshold: f64) -> f64 {
    if bers.is_empty() {
        return 0.0;
    }
    bers.iter().filter(|b| is_outage(**b, threshold)).count() as f64 / bers.len() as f64
}
