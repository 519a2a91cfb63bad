//! Child seeds for independent trials.

/// One SplitMix64 output step.
pub fn splitmix64(x: u64) -> u64 {
    let mut z = x.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Seed of trial `trial` at SNR index `snr_index`.
pub fn child_seed(master: u64, snr_index: usize, trial: usize) -> u64 {
    let a = splitmix64(master ^ splitmix64(snr_index as u64 ^ 0x5151_0000_0000_0000));
    splitmix64(a ^ splitmix64(trial as u64))
}
