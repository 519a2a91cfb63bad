#![allow(dead_code)]

use gfdm_core::channel::{draw_impairments, synthesize_at_snr, IqImbalance, ImpairmentRanges, UserImpairment};
use gfdm_core::estimator::{plan_pilots, PilotLayout};
use gfdm_core::frame::draw_frame_truth;
use gfdm_core::{AssignmentPlan, LinkModel, ReceivedFrame, SystemConfig};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub fn small() -> SystemConfig {
    SystemConfig {
        k: 8,
        m: 2,
        data_subcarriers: 6,
        channel_taps: 2,
        cp_len: 2,
        rx_antennas: 3,
        symbols_per_frame: 50,
        ..SystemConfig::default()
    }
}

pub struct Scenario {
    pub link: LinkModel<f64>,
    pub layout: PilotLayout,
    pub frame: ReceivedFrame<f64>,
}

#[derive(Default)]
pub struct Overrides {
    pub phis: Option<Vec<f64>>,
    pub ideal_iq: bool,
}

pub fn scenario(config: SystemConfig, seed: u64, snr_db: Option<f64>, o: Overrides) -> Scenario {
    let plan = AssignmentPlan::contiguous_block(&config).unwrap();
    let link = LinkModel::new(config.clone(), plan).unwrap();
    scenario_on(link, seed, snr_db, o)
}

pub fn scenario_on(link: LinkModel<f64>, seed: u64, snr_db: Option<f64>, o: Overrides) -> Scenario {
    let config = link.config.clone();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let layout = plan_pilots(&link.plan, config.pilots_per_user).unwrap_or_else(|_| PilotLayout {
        nulls: (0..link.users()).map(|u| link.plan.intersection_positions(u)).collect(),
        pilots: vec![Vec::new(); link.users()],
    });
    let mut users: Vec<UserImpairment<f64>> = draw_impairments(&config, &ImpairmentRanges::default(), &mut rng);
    for (u, imp) in users.iter_mut().enumerate() {
        let phi = o.phis.as_ref().map_or(imp.phi, |p| p[u]);
        let iq = if o.ideal_iq { IqImbalance::ideal() } else { imp.iq };
        *imp = UserImpairment::new(phi, iq, imp.hbar.clone(), config.k);
    }
    let truth = draw_frame_truth(&link, users, &layout, &mut rng).unwrap();
    let frame = synthesize_at_snr(&link, truth, snr_db, &mut rng).unwrap();
    Scenario { link, layout, frame }
}

/// `‖est − truth‖² / ‖truth‖²`.
pub fn rel_err(est: &gfdm_core::CVector<f64>, truth: &gfdm_core::CVector<f64>) -> f64 {
    (est - truth).norm_squared() / truth.norm_squared()
}
