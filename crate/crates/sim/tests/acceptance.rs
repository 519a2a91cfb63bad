//! Acceptance suite: one PASS/FAIL line per criterion; exits non-zero if any fails.

use std::time::Instant;

use gfdm_core::channel::signal_matrices;
use gfdm_core::crlb::{crlb_cfo, jacobian, FisherLayout, SymbolParams};
use gfdm_core::estimator::{compute_subspace_dims, estimate_frame, plan_pilots, CfoCostModel, SubspaceDecomposition};
use gfdm_core::linalg::hermitian_eigenvalues;
use gfdm_core::waveform::{rectangular_prototype, ModulationMatrix};
use gfdm_core::{AssignmentPlan, CMatrix, Cx};
use gfdm_sim::metrics::mse_channel_iq;
use gfdm_sim::output::{summary_csv, trials_csv};
use gfdm_sim::{Campaign, CampaignConfig, Mode, Prototype};

// Pinned tolerances.
const C1_CFO_ABS: f64 = 1e-4;
const C1_CHANNEL_MSE: f64 = 1e-8;
const C1_SECONDS: f64 = 60.0;
const C2_ORTHOGONALITY: f64 = 1e-10;
const C3_NULL_RATIO: f64 = 1e-8;
const C3_OFF_RATIO: f64 = 1e-3;
const C3_OFFSET: f64 = 0.1;
const C4_STEP: f64 = 1e-6;
const C4_REL: f64 = 1e-5;
const C5_REL: f64 = 1e-9;
const C6_TRIALS: usize = 50;
const C6_CRLB_FACTOR: f64 = 20.0;
const C6_SECONDS: f64 = 1800.0;
const C9_UNITARY: f64 = 1e-10;

/// Criterion 1's system: K=8, M=2, U=2, N_r=3, L=2, N_s=50.
fn small() -> CampaignConfig {
    CampaignConfig {
        k: 8,
        m: 2,
        users: 2,
        data_subcarriers: 6,
        channel_taps: 2,
        cp_len: 2,
        rx_antennas: 3,
        symbols_per_frame: 50,
        snr_db: vec![f64::INFINITY],
        trials: 5,
        master_seed: 2024,
        ..CampaignConfig::default()
    }
}

struct Outcome {
    passed: bool,
    detail: String,
}

fn outcome(passed: bool, detail: String) -> Outcome {
    Outcome { passed, detail }
}

/// Noise-free recovery over every trial of `cfg`: per-user CFO error,
/// channel MSE and BER.
fn noise_free_recovery(cfg: CampaignConfig) -> Outcome {
    let start = Instant::now();
    let campaign = match Campaign::new(cfg) {
        Ok(c) => c,
        Err(e) => return outcome(false, e.to_string()),
    };
    let p = &campaign.prepared;
    let (mut worst_phi, mut worst_ch) = (0.0f64, 0.0f64);
    for t in 0..campaign.config.trials {
        let frame = campaign.frame(0, t).expect("frame");
        let est = match estimate_frame(&p.link, &frame.y, &p.layout, &p.estimator) {
            Ok(e) => e,
            Err(e) => return outcome(false, format!("trial {t}: {e}")),
        };
        for (e, u) in est.users.iter().zip(&frame.truth.users) {
            worst_phi = worst_phi.max((e.phi - u.phi).abs());
        }
        let ch: Vec<_> = est.users.iter().map(|u| (u.h_source(), u.h_image())).collect();
        let truth: Vec<_> = frame.truth.users.iter().map(|u| (u.h_source(), u.h_image())).collect();
        worst_ch = worst_ch.max(mse_channel_iq(&ch, &truth));
    }
    let run = campaign.run();
    let worst_ber = run
        .records
        .iter()
        .filter(|r| r.mode == Mode::Jcciqe)
        .map(|r| r.ber.unwrap_or(f64::INFINITY))
        .fold(0.0, f64::max);
    let secs = start.elapsed().as_secs_f64();
    outcome(
        worst_phi < C1_CFO_ABS && worst_ch < C1_CHANNEL_MSE && worst_ber == 0.0 && secs < C1_SECONDS,
        format!(
            "{} trials: max |dphi| {worst_phi:.2e}, max mse_channel_iq {worst_ch:.2e}, max ber {worst_ber}, {secs:.1} s",
            campaign.config.trials
        ),
    )
}

fn criterion_1() -> Outcome {
    noise_free_recovery(small())
}

fn criterion_2() -> Outcome {
    let campaign = Campaign::new(small()).unwrap();
    let link = &campaign.prepared.link;
    let mut worst = 0.0f64;
    for t in 0..campaign.config.trials {
        let frame = campaign.frame(0, t).unwrap();
        let sub = SubspaceDecomposition::new(&link.config, &link.plan, &frame.y, true).unwrap();
        let q = sub.dims.noise;
        let norm: f64 = (0..q).map(|i| sub.gamma(i).norm_squared()).sum();
        for (u, imp) in frame.truth.users.iter().enumerate() {
            let (gi, gq) = signal_matrices(link, u, &imp.h, imp.phi);
            for g in [gi, gq] {
                let leak: f64 = (0..q).map(|i| (sub.gamma(i).adjoint() * &g).norm_squared()).sum();
                worst = worst.max(leak / norm);
            }
        }
    }
    outcome(worst < C2_ORTHOGONALITY, format!("max relative leakage {worst:.2e} (source and image, every user)"))
}

fn spread(m: &CMatrix<f64>) -> f64 {
    let v = hermitian_eigenvalues(m).unwrap();
    v[0] / v[v.len() - 1]
}

fn criterion_3() -> Outcome {
    let campaign = Campaign::new(small()).unwrap();
    let link = &campaign.prepared.link;
    let (mut at_truth, mut off) = (0.0f64, f64::INFINITY);
    for t in 0..campaign.config.trials {
        let frame = campaign.frame(0, t).unwrap();
        let sub = SubspaceDecomposition::new(&link.config, &link.plan, &frame.y, true).unwrap();
        for (u, imp) in frame.truth.users.iter().enumerate() {
            let model = CfoCostModel::new(link, u, &sub).unwrap();
            at_truth = at_truth.max(spread(&model.r_p(imp.phi)));
            off = off.min(spread(&model.r_p(imp.phi + C3_OFFSET)));
        }
    }
    outcome(
        at_truth < C3_NULL_RATIO && off >= C3_OFF_RATIO,
        format!("max lambda_min/lambda_max at truth {at_truth:.2e}, min at truth+{C3_OFFSET} {off:.2e}"),
    )
}

fn criterion_4() -> Outcome {
    let cfg = CampaignConfig {
        k: 4,
        m: 2,
        data_subcarriers: 4,
        channel_taps: 2,
        cp_len: 1,
        rx_antennas: 2,
        symbols_per_frame: 5,
        snr_db: vec![20.0],
        trials: 3,
        ..CampaignConfig::default()
    };
    fim_fd_on(&cfg)
}

/// Symbols drawn directly, without a pilot layout.
fn fim_fd_on(cfg: &CampaignConfig) -> Outcome {
    use gfdm_core::channel::{draw_impairments, FrameTruth};
    use gfdm_core::modem::random_qpsk;
    use gfdm_core::LinkModel;
    use rand::SeedableRng;
    let system = cfg.system();
    let plan = AssignmentPlan::contiguous_block(&system).unwrap();
    let link = LinkModel::<f64>::new(system.clone(), plan).unwrap();
    let layout = FisherLayout::new(&link);
    let mut worst = 0.0f64;
    for seed in 0..cfg.trials as u64 {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let users = draw_impairments(&system, &cfg.ranges(), &mut rng);
        let data = (0..2).map(|_| (0..link.users()).map(|_| random_qpsk(link.per_user(), &mut rng)).collect()).collect();
        let truth = FrameTruth { users, data };
        let p = SymbolParams::from_truth(&truth, 1).unwrap();
        let j = jacobian(&link, &p).unwrap();
        for c in 0..layout.len() {
            let plus = p.perturbed(&layout, c, C4_STEP).synthesize(&link);
            let minus = p.perturbed(&layout, c, -C4_STEP).synthesize(&link);
            let fd = (plus - minus) / Cx::new(2.0 * C4_STEP, 0.0);
            let col = j.column(c);
            worst = worst.max((&fd - col).norm() / col.norm());
        }
    }
    outcome(
        worst < C4_REL,
        format!("{} columns x {} draws, max relative error {worst:.2e}", layout.len(), cfg.trials),
    )
}

fn criterion_5() -> Outcome {
    let campaign = Campaign::new(CampaignConfig { snr_db: vec![10.0], ..small() }).unwrap();
    let link = &campaign.prepared.link;
    let mut worst = 0.0f64;
    for t in 0..campaign.config.trials {
        let frame = campaign.frame(0, t).unwrap();
        let a = crlb_cfo(link, &frame.truth, frame.sigma2).unwrap();
        let b = crlb_cfo(link, &frame.truth, frame.sigma2 / 2.0).unwrap();
        worst = worst.max(((b - a / 2.0) / (a / 2.0)).abs());
    }
    outcome(worst < C5_REL, format!("max relative deviation {worst:.2e}"))
}

fn criterion_6() -> Outcome {
    let start = Instant::now();
    let cfg = CampaignConfig {
        snr_db: vec![10.0, 20.0, 30.0],
        trials: C6_TRIALS,
        modes: vec![Mode::Jcciqe],
        crlb: true,
        ..CampaignConfig::default()
    };
    let out = Campaign::new(cfg).unwrap().run();
    let secs = start.elapsed().as_secs_f64();
    let mse: Vec<f64> = out.summary.iter().map(|s| s.mse_cfo.unwrap_or(f64::NAN)).collect();
    let bound = out.summary[2].crlb_cfo.unwrap_or(f64::NAN);
    let failed = out.failed();
    let decreasing = mse[0] > mse[1] && mse[1] > mse[2];
    let floorless = mse[2] < mse[0] / 10.0;
    let ratio = mse[2] / bound;
    outcome(
        decreasing && floorless && ratio <= C6_CRLB_FACTOR && secs < C6_SECONDS && failed == 0,
        format!(
            "mse_cfo {:.2e} / {:.2e} / {:.2e} at 10/20/30 dB, crlb(30) {bound:.2e}, ratio {ratio:.1}, {failed} failed, {secs:.0} s",
            mse[0], mse[1], mse[2]
        ),
    )
}

fn criterion_7() -> Outcome {
    let cfg = CampaignConfig {
        k: 16,
        m: 4,
        users: 2,
        data_subcarriers: 14,
        channel_taps: 3,
        cp_len: 4,
        rx_antennas: 2,
        symbols_per_frame: 200,
        snr_db: vec![f64::INFINITY],
        trials: 3,
        master_seed: 7,
        ..CampaignConfig::default()
    };
    let system = cfg.system();
    let plan = AssignmentPlan::contiguous_block(&system).unwrap();
    let dims = match compute_subspace_dims(&system, &plan, true) {
        Ok(d) => d,
        Err(e) => return outcome(false, e.to_string()),
    };
    let rec = noise_free_recovery(cfg);
    outcome(
        rec.passed,
        format!("N_r=2 admitted ({} signal of {} dims); {}", dims.signal, system.obs_dim(), rec.detail),
    )
}

fn criterion_8() -> Outcome {
    let mut counts = Vec::new();
    for cfg in [CampaignConfig::default(), small()] {
        let plan = cfg.plan().unwrap();
        let layout = plan_pilots(&plan, 1).unwrap();
        counts.push(layout.pilots.iter().map(|p| p.len()).sum::<usize>());
    }
    outcome(counts.iter().all(|&c| c == 2), format!("pilot entries at P_pil=1: {counts:?}"))
}

fn criterion_9() -> Outcome {
    let mut worst = 0.0f64;
    for k in [4, 8, 16] {
        let a = ModulationMatrix::<f64>::new(&rectangular_prototype(k), k, 1, 0).unwrap().a;
        worst = worst.max((&a * a.adjoint() - CMatrix::identity(k, k)).camax());
    }
    let rec = noise_free_recovery(CampaignConfig {
        m: 1,
        prototype: Prototype::Rectangular,
        ..small()
    });
    outcome(worst < C9_UNITARY && rec.passed, format!("max |AA^H - I| {worst:.2e}; M=1: {}", rec.detail))
}

fn criterion_10() -> Outcome {
    let cfg = CampaignConfig {
        snr_db: vec![0.0, 15.0, f64::INFINITY],
        trials: 4,
        crlb: true,
        ..small()
    };
    let a = Campaign::new(cfg.clone()).unwrap().run();
    let b = Campaign::new(cfg).unwrap().run();
    let (ta, tb) = (trials_csv(&a.records), trials_csv(&b.records));
    let (sa, sb) = (summary_csv(&a.summary), summary_csv(&b.summary));
    outcome(ta == tb && sa == sb, format!("{} + {} bytes compared", ta.len(), sa.len()))
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 10] = [
        ("noise-free end-to-end recovery", criterion_1),
        ("subspace orthogonality", criterion_2),
        ("rank drop at the true CFO", criterion_3),
        ("Jacobian vs central differences", criterion_4),
        ("CRLB linear in noise variance", criterion_5),
        ("no error floor, near the CRLB", criterion_6),
        ("two receive antennas suffice", criterion_7),
        ("one pilot per user", criterion_8),
        ("OFDMA special case", criterion_9),
        ("byte-identical reruns", criterion_10),
    ];
    let mut failed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        let o = f();
        println!("criterion {:>2} {} {name}: {}", i + 1, if o.passed { "PASS" } else { "FAIL" }, o.detail);
        failed += usize::from(!o.passed);
    }
    println!("acceptance: {} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
