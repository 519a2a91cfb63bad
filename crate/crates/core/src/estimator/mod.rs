//! Semi-blind joint estimation of CFO, channel and IQ imbalance per user.
//!
//! Noise subspace from the sample covariance, a per-user CFO search on the
//! subspace-orthogonality cost, the CIR up to a complex scale from the
//! minimum eigenvector at the estimated CFO, and the scale/IQ pair from the
//! pilots on symbol 1.

pub mod ambiguity;
pub mod cfo;
pub mod pilots;
pub mod subspace;

pub use ambiguity::{estimate_ambiguity_iq, AmbiguityFit};
pub use cfo::{cfo_candidates, coarse_grid, cost_curve, estimate_cfo, stacked_projection, CfoCost, CfoCostModel, CfoSearch, CfoSearchOptions};
pub use pilots::{pilot_symbol, plan_pilots, PilotLayout};
pub use subspace::{compute_subspace_dims, noise_subspace, sample_covariance, SubspaceDecomposition, SubspaceDims};

use crate::error::{input_err, Result};
use crate::scalar::{abs2, CVector, Cx, Real};
use crate::waveform::LinkModel;

#[derive(Debug, Clone, PartialEq)]
pub struct EstimatorOptions {
    pub cfo: CfoSearchOptions,
    /// Relative singular value cutoff of the pilot fit.
    pub pinv_cutoff: f64,
    /// Size the noise subspace for source plus image columns.
    pub iq_present: bool,
}

impl Default for EstimatorOptions {
    fn default() -> Self {
        Self {
            cfo: CfoSearchOptions::default(),
            pinv_cutoff: 1e-10,
            iq_present: true,
        }
    }
}

impl EstimatorOptions {
    pub fn with_step(step: f64) -> Self {
        let mut o = Self::default();
        o.cfo.step = step;
        o
    }
}

#[derive(Debug, Clone)]
pub struct UserEstimate<T: Real> {
    pub phi: T,
    /// Unit-norm blind CIR.
    pub h0: CVector<T>,
    pub a: Cx<T>,
    pub b: Cx<T>,
    pub cfo_evaluations: usize,
}

impl<T: Real> UserEstimate<T> {
    /// `ĥ0·a`, the equivalent source-path channel.
    pub fn h_source(&self) -> CVector<T> {
        &self.h0 * self.a
    }

    /// `ĥ0·b`, the equivalent image-path channel.
    pub fn h_image(&self) -> CVector<T> {
        &self.h0 * self.b
    }
}

#[derive(Debug, Clone)]
pub struct EstimationResult<T: Real> {
    pub users: Vec<UserEstimate<T>>,
    pub dims: SubspaceDims,
}

/// Runs the full estimator on one frame whose first symbol follows `layout`.
///
/// When a user's resource elements are all images of another user's (see
/// [`AssignmentPlan::mirrored_partner`](crate::AssignmentPlan::mirrored_partner)),
/// each of the two CFO costs vanishes at both users' CFOs. The two deepest
/// minima are then assigned to the pair in the order for which the fitted
/// source coefficients dominate the image ones, since `|α| > |β|` for any
/// physical imbalance.
pub fn estimate_frame<T: Real>(
    link: &LinkModel<T>,
    y: &[CVector<T>],
    layout: &PilotLayout,
    opts: &EstimatorOptions,
) -> Result<EstimationResult<T>> {
    let Some(y1) = y.first() else {
        return input_err("empty frame");
    };
    let subspace = SubspaceDecomposition::new(&link.config, &link.plan, y, opts.iq_present)?;
    let models = (0..link.users())
        .map(|u| CfoCostModel::new(link, u, &subspace))
        .collect::<Result<Vec<_>>>()?;
    let mut blind = Vec::with_capacity(link.users());
    let mut evaluations = Vec::with_capacity(link.users());
    for model in &models {
        let search = estimate_cfo(model, &opts.cfo)?;
        let phi = T::lit(search.phi);
        blind.push((phi, model.blind_channel(phi)?));
        evaluations.push(search.evaluations);
    }
    for u in 0..link.users() {
        let Some(v) = link.plan.mirrored_partner(u) else { continue };
        if v < u || link.plan.mirrored_partner(v) != Some(u) {
            continue;
        }
        let found = cfo_candidates(&models[u], &opts.cfo, 2)?;
        evaluations[u] += found.iter().map(|c| c.evaluations).sum::<usize>();
        let [a, b] = [0, 1].map(|i| found.get(i).map(|c| T::lit(c.phi)));
        let (Some(a), Some(b)) = (a, b) else { continue };
        let mut best: Option<(f64, Vec<(T, CVector<T>)>)> = None;
        for (pu, pv) in [(a, b), (b, a)] {
            let mut trial = blind.clone();
            trial[u] = (pu, models[u].blind_channel(pu)?);
            trial[v] = (pv, models[v].blind_channel(pv)?);
            let Ok(fits) = estimate_ambiguity_iq(link, y1, &trial, layout, opts.pinv_cutoff) else {
                continue;
            };
            let score: f64 = [u, v]
                .iter()
                .map(|&w| 0.5 * (abs2(fits[w].a).to_f64_lossy() / abs2(fits[w].b).to_f64_lossy()).ln())
                .sum();
            if best.as_ref().is_none_or(|(s, _)| score > *s) {
                best = Some((score, trial));
            }
        }
        if let Some((_, trial)) = best {
            blind = trial;
        }
    }
    let fits = estimate_ambiguity_iq(link, y1, &blind, layout, opts.pinv_cutoff)?;
    let users = blind
        .into_iter()
        .zip(fits)
        .zip(evaluations)
        .map(|(((phi, h0), fit), cfo_evaluations)| UserEstimate {
            phi,
            h0,
            a: fit.a,
            b: fit.b,
            cfo_evaluations,
        })
        .collect();
    Ok(EstimationResult {
        users,
        dims: subspace.dims,
    })
}

/// Equivalent `(source, image)` channels of every user.
pub fn assemble_equivalent_channels<T: Real>(result: &EstimationResult<T>) -> Vec<(CVector<T>, CVector<T>)> {
    result.users.iter().map(|u| (u.h_source(), u.h_image())).collect()
}
