use gfdm_sim::campaign::summarize;
use gfdm_sim::output::{real, summary_csv, trials_csv};
use gfdm_sim::selftest::small_config;
use gfdm_sim::{run_campaign, CampaignConfig, Mode, SimError, TrialRecord};

fn cfg(snr: &[f64], trials: usize) -> CampaignConfig {
    CampaignConfig {
        snr_db: snr.to_vec(),
        trials,
        ..small_config()
    }
}

#[test]
fn genie_without_noise_has_no_bit_errors() {
    let out = run_campaign(CampaignConfig {
        modes: vec![Mode::Genie],
        ..cfg(&[f64::INFINITY], 10)
    })
    .unwrap();
    assert_eq!(out.records.len(), 10);
    for r in &out.records {
        assert_eq!(r.ber, Some(0.0), "trial {}", r.trial);
        assert!(!r.outage);
    }
}

#[test]
fn identical_configs_give_identical_files() {
    let c = CampaignConfig { crlb: true, ..cfg(&[5.0, 20.0], 4) };
    let a = run_campaign(c.clone()).unwrap();
    let b = run_campaign(c).unwrap();
    assert_eq!(trials_csv(&a.records), trials_csv(&b.records));
    assert_eq!(summary_csv(&a.summary), summary_csv(&b.summary));
}

#[test]
fn seed_changes_the_draws() {
    let a = run_campaign(cfg(&[20.0], 2)).unwrap();
    let b = run_campaign(CampaignConfig { master_seed: 99, ..cfg(&[20.0], 2) }).unwrap();
    assert_ne!(trials_csv(&a.records), trials_csv(&b.records));
}

#[test]
fn rows_are_ordered_and_finite() {
    let c = CampaignConfig { crlb: true, ..cfg(&[10.0, 30.0], 3) };
    let out = run_campaign(c).unwrap();
    let keys: Vec<(u64, usize, Mode)> = out.records.iter().map(|r| (r.snr_db.to_bits(), r.trial, r.mode)).collect();
    let mut expect = Vec::new();
    for snr in [10.0f64, 30.0] {
        for t in 0..3 {
            for m in [Mode::Jcciqe, Mode::Genie] {
                expect.push((snr.to_bits(), t, m));
            }
        }
    }
    assert_eq!(keys, expect);
    for r in &out.records {
        assert!(!r.failed(), "{:?}", r.error);
        for v in [r.mse_cfo, r.mse_channel_iq, r.ber, r.crlb_cfo] {
            let v = v.unwrap();
            assert!(v.is_finite() && v >= 0.0);
        }
        assert_eq!(r.wall_ms, 0.0);
    }
}

#[test]
fn summary_recomputes_from_the_trial_csv() {
    let c = CampaignConfig { crlb: true, ..cfg(&[10.0, 25.0], 5) };
    let out = run_campaign(c.clone()).unwrap();
    let csv = trials_csv(&out.records);
    let rows: Vec<Vec<String>> = csv.lines().skip(2).map(|l| l.split(',').map(str::to_string).collect()).collect();
    for s in &out.summary {
        let mine: Vec<&Vec<String>> = rows
            .iter()
            .filter(|r| r[0] == real(s.snr_db) && r[2] == s.mode.tag())
            .collect();
        assert_eq!(mine.len(), s.trials);
        let col_mean = |i: usize| {
            let v: Vec<f64> = mine.iter().filter(|r| !r[i].is_empty()).map(|r| r[i].parse::<f64>().unwrap()).collect();
            v.iter().sum::<f64>() / v.len() as f64
        };
        assert_eq!(col_mean(3), s.mse_cfo.unwrap());
        assert_eq!(col_mean(4), s.mse_channel_iq.unwrap());
        assert_eq!(col_mean(5), s.ber.unwrap());
        assert_eq!(col_mean(7), s.crlb_cfo.unwrap());
        let outage = mine.iter().filter(|r| r[6] == "1").count() as f64 / mine.len() as f64;
        assert_eq!(outage, s.outage);
        let ber_outage = mine.iter().filter(|r| r[5].parse::<f64>().unwrap() > c.outage_threshold).count() as f64 / mine.len() as f64;
        assert_eq!(ber_outage, s.outage);
    }
}

#[test]
fn mse_recomputes_from_the_frame() {
    use gfdm_core::estimator::estimate_frame;
    let c = cfg(&[15.0], 2);
    let campaign = gfdm_sim::Campaign::new(c).unwrap();
    let out = campaign.run();
    for t in 0..2 {
        let frame = campaign.frame(0, t).unwrap();
        let est = estimate_frame(&campaign.prepared.link, &frame.y, &campaign.prepared.layout, &campaign.prepared.estimator).unwrap();
        let mut phi = 0.0;
        let mut ch = 0.0;
        for (e, u) in est.users.iter().zip(&frame.truth.users) {
            phi += (e.phi - u.phi).powi(2);
            ch += (e.h_source() - u.h_source()).norm_squared() + (e.h_image() - u.h_image()).norm_squared();
        }
        let users = est.users.len() as f64;
        let n = frame.truth.users[0].h.len() as f64;
        let row = out.records.iter().find(|r| r.trial == t && r.mode == Mode::Jcciqe).unwrap();
        assert!((row.mse_cfo.unwrap() - phi / users).abs() <= 1e-15 * phi.max(1e-300));
        assert!((row.mse_channel_iq.unwrap() - ch / (2.0 * users * n)).abs() <= 1e-12 * ch);
    }
}

#[test]
fn genie_detection_is_no_worse_in_expectation() {
    let out = run_campaign(cfg(&[8.0], 50)).unwrap();
    let ber = |m: Mode| -> Vec<f64> { out.records.iter().filter(|r| r.mode == m).map(|r| r.ber.unwrap()).collect() };
    let diff: Vec<f64> = ber(Mode::Genie).iter().zip(ber(Mode::Jcciqe)).map(|(g, j)| g - j).collect();
    let n = diff.len() as f64;
    let mean = diff.iter().sum::<f64>() / n;
    let var = diff.iter().map(|d| (d - mean).powi(2)).sum::<f64>() / (n - 1.0);
    let se = (var / n).sqrt();
    assert!(mean <= 2.0 * se, "mean difference {mean:e}, standard error {se:e}");
}

#[test]
fn genie_outage_vanishes_at_high_snr() {
    let out = run_campaign(CampaignConfig {
        modes: vec![Mode::Genie],
        ..cfg(&[30.0], 50)
    })
    .unwrap();
    assert_eq!(out.summary[0].outage, 0.0);
}

fn record(ber: Option<f64>, trial: usize) -> TrialRecord {
    TrialRecord {
        snr_db: 10.0,
        trial,
        mode: Mode::Jcciqe,
        mse_cfo: ber.map(|_| 1e-4),
        mse_channel_iq: ber.map(|_| 1e-3),
        ber,
        outage: ber.is_none_or(|b| b > 0.01),
        crlb_cfo: None,
        seed: trial as u64,
        wall_ms: 0.0,
        error: ber.is_none().then(|| "singular".to_string()),
    }
}

#[test]
fn failed_trials_count_as_outages_and_skip_means() {
    let c = CampaignConfig {
        snr_db: vec![10.0],
        modes: vec![Mode::Jcciqe],
        ..CampaignConfig::default()
    };
    let recs = vec![record(Some(0.0), 0), record(Some(0.02), 1), record(None, 2), record(Some(0.004), 3)];
    let s = summarize(&recs, &c);
    assert_eq!(s.len(), 1);
    assert_eq!((s[0].trials, s[0].failed), (4, 1));
    assert_eq!(s[0].outage, 0.5);
    assert_eq!(s[0].ber, Some((0.0 + 0.02 + 0.004) / 3.0));
    assert_eq!(s[0].crlb_cfo, None);
    let line = trials_csv(&recs[2..3]).lines().nth(2).unwrap().to_string();
    assert_eq!(line, "1.0000000000000000e1,2,jcciqe,,,,1,,2,0.0000000000000000e0");
}

#[test]
fn failure_threshold() {
    let mk = |failed: usize, total: usize| gfdm_sim::CampaignOutput {
        records: (0..total).map(|t| record(if t < failed { None } else { Some(0.0) }, t)).collect(),
        summary: Vec::new(),
    };
    assert!(mk(1, 10).check_failures().is_ok());
    let err = mk(2, 10).check_failures().unwrap_err();
    assert!(matches!(err, SimError::TooManyFailures { failed: 2, total: 10 }));
    assert_eq!(err.exit_code(), 2);
}
