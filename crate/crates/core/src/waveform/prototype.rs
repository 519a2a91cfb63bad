//! Root-raised-cosine prototype pulse.

use crate::error::{config_err, Result};
use crate::scalar::Real;

/// Continuous-time RRC impulse response with unit symbol period.
///
/// The removable singularities at `t = 0` and `|t| = 1/(4·rolloff)` are
/// replaced by their limits.
pub fn rrc_impulse<T: Real>(t: T, rolloff: T) -> T {
    let one = T::one();
    let pi = T::pi();
    let four = T::lit(4.0);
    let eps = T::lit(1e-9);
    if t.abs() < eps {
        return one - rolloff + four * rolloff / pi;
    }
    if rolloff > T::zero() && ((four * rolloff * t).abs() - one).abs() < eps {
        let two_over_pi = T::lit(2.0) / pi;
        let arg = pi / (four * rolloff);
        return rolloff / T::lit(2.0).sqrt()
            * ((one + two_over_pi) * arg.sin() + (one - two_over_pi) * arg.cos());
    }
    let x = four * rolloff * t;
    ((pi * t * (one - rolloff)).sin() + four * rolloff * t * (pi * t * (one + rolloff)).cos())
        / (pi * t * (one - x * x))
}

/// Sample instant (in symbol periods) of tap `n` for an `n_total`-tap pulse
/// spanning `n_total / k` symbols.
///
/// Taps sit half a sample off the pulse centre: index 0 holds `t = 1/(2k)`
/// and index `n_total - 1` holds `t = -1/(2k)`. Sampling exactly on the
/// centre makes the GFDM matrix singular for every even subsymbol count.
pub fn tap_instant(n: usize, n_total: usize, k: usize) -> f64 {
    let half = n_total / 2;
    let p = (n + half) % n_total;
    (p as f64 - half as f64 + 0.5) / k as f64
}

/// Circular RRC prototype of length `k·m`, normalized to unit energy.
pub fn build_prototype_filter<T: Real>(k: usize, m: usize, rolloff: f64) -> Result<Vec<T>> {
    let n_total = k * m;
    if n_total < 2 {
        return config_err("prototype needs K·M ≥ 2");
    }
    if !(0.0..=1.0).contains(&rolloff) {
        return config_err(format!("roll-off {rolloff} outside [0, 1]"));
    }
    let beta = T::lit(rolloff);
    let mut taps: Vec<T> = (0..n_total)
        .map(|n| rrc_impulse(T::lit(tap_instant(n, n_total, k)), beta))
        .collect();
    normalize(&mut taps);
    Ok(taps)
}

/// Flat pulse `1/sqrt(n)`; with one subsymbol this turns GFDM into OFDM.
pub fn rectangular_prototype<T: Real>(n_total: usize) -> Vec<T> {
    vec![T::one() / T::count(n_total).sqrt(); n_total]
}

fn normalize<T: Real>(taps: &mut [T]) {
    let energy = taps.iter().fold(T::zero(), |acc, &x| acc + x * x);
    let scale = T::one() / energy.sqrt();
    for x in taps.iter_mut() {
        *x *= scale;
    }
}
