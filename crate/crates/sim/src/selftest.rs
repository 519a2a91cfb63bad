//! Quick invariant checks behind the `selftest` subcommand.

use crate::campaign::Campaign;
use crate::config::{CampaignConfig, Mode};
use crate::metrics::{mse_cfo, outage_probability};
use crate::output::trials_csv;

#[derive(Debug, Clone)]
pub struct Check {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

fn check(name: &'static str, passed: bool, detail: String) -> Check {
    Check { name, passed, detail }
}

/// K=8, M=2, K_D=6, L=2, N_r=3, N_s=50.
pub fn small_config() -> CampaignConfig {
    CampaignConfig {
        k: 8,
        m: 2,
        data_subcarriers: 6,
        channel_taps: 2,
        cp_len: 2,
        rx_antennas: 3,
        symbols_per_frame: 50,
        trials: 3,
        ..CampaignConfig::default()
    }
}

pub fn run_selftest() -> Vec<Check> {
    let mut out = Vec::new();

    let m = mse_cfo(&[0.1, -0.1], &[0.0, 0.0]);
    out.push(check("mse_cfo arithmetic", (m - 0.01).abs() < 1e-15, format!("{m:e}")));
    let o = (outage_probability(&[Some(0.3), Some(1.0)], 1.0), outage_probability(&[Some(1e-3)], 0.0));
    out.push(check("outage limits", o == (0.0, 1.0), format!("{o:?}")));

    let noise_free = CampaignConfig {
        snr_db: vec![f64::INFINITY],
        ..small_config()
    };
    match Campaign::new(noise_free) {
        Ok(c) => {
            let res = c.run();
            let worst = |mode: Mode, f: fn(&crate::campaign::TrialRecord) -> Option<f64>| {
                res.records
                    .iter()
                    .filter(|r| r.mode == mode)
                    .map(|r| f(r).unwrap_or(f64::INFINITY))
                    .fold(0.0, f64::max)
            };
            let (phi, ch, ber) = (worst(Mode::Jcciqe, |r| r.mse_cfo), worst(Mode::Jcciqe, |r| r.mse_channel_iq), worst(Mode::Jcciqe, |r| r.ber));
            out.push(check(
                "noise-free joint estimation",
                phi < 1e-8 && ch < 1e-8 && ber == 0.0,
                format!("worst mse_cfo {phi:.2e}, mse_channel_iq {ch:.2e}, ber {ber}"),
            ));
            let g = worst(Mode::Genie, |r| r.ber);
            out.push(check("noise-free genie detection", g == 0.0, format!("worst ber {g}")));
        }
        Err(e) => out.push(check("noise-free joint estimation", false, e.to_string())),
    }

    let noisy = CampaignConfig {
        snr_db: vec![15.0],
        trials: 2,
        crlb: true,
        ..small_config()
    };
    match Campaign::new(noisy) {
        Ok(c) => {
            let a = trials_csv(&c.run().records);
            let b = trials_csv(&c.run().records);
            out.push(check("deterministic output", a == b, format!("{} bytes", a.len())));
            let lin = c.frame(0, 0).and_then(|f| {
                let full = c.crlb(&f)?.unwrap_or(f64::NAN);
                let mut half = f.clone();
                half.sigma2 /= 2.0;
                let half = c.crlb(&half)?.unwrap_or(f64::NAN);
                Ok((half - full / 2.0).abs() / (full / 2.0))
            });
            match lin {
                Ok(r) => out.push(check("crlb linear in noise variance", r < 1e-9, format!("relative error {r:.2e}"))),
                Err(e) => out.push(check("crlb linear in noise variance", false, e.to_string())),
            }
        }
        Err(e) => out.push(check("deterministic output", false, e.to_string())),
    }
    out
}
