//! Resolution of the blind channel scale together with the IQ coefficients.

use crate::channel::signal_matrices;
use crate::error::{input_err, Error, Result};
use crate::linalg::PseudoInverse;
use crate::scalar::{CMatrix, CVector, Cx, Real};
use crate::waveform::LinkModel;

use super::pilots::PilotLayout;

/// Per-user `(a, b)` such that the source and image channels are
/// `ĥ0·a` and `ĥ0·b`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AmbiguityFit<T: Real> {
    pub a: Cx<T>,
    pub b: Cx<T>,
}

/// Zero-forcing fit of symbol 1 against the channels rebuilt from the blind
/// estimates, with null positions removed from both the source and image
/// parts, then a pilot average of the recovered entries.
pub fn estimate_ambiguity_iq<T: Real>(
    link: &LinkModel<T>,
    y1: &CVector<T>,
    estimates: &[(T, CVector<T>)],
    layout: &PilotLayout,
    rel_cutoff: f64,
) -> Result<Vec<AmbiguityFit<T>>> {
    let users = link.users();
    if estimates.len() != users || layout.users() != users {
        return input_err(format!("{} estimates and {} layouts for {users} users", estimates.len(), layout.users()));
    }
    if y1.len() != link.config.obs_dim() {
        return input_err("first received vector has the wrong length");
    }
    let nu = link.per_user();
    let kept: Vec<Vec<usize>> = (0..users)
        .map(|u| (0..nu).filter(|p| layout.nulls[u].binary_search(p).is_err()).collect())
        .collect();
    let total: usize = kept.iter().map(|k| 2 * k.len()).sum();
    let mut g_bar = CMatrix::zeros(y1.len(), total);
    let mut offset = Vec::with_capacity(users);
    let mut col = 0;
    for (u, (phi, h0)) in estimates.iter().enumerate() {
        let (gi, gq) = signal_matrices(link, u, h0, *phi);
        offset.push(col);
        for g in [&gi, &gq] {
            for &p in &kept[u] {
                g_bar.column_mut(col).copy_from(&g.column(p));
                col += 1;
            }
        }
    }
    let pinv = PseudoInverse::new(&g_bar, rel_cutoff)?;
    if !pinv.full_column_rank() {
        return Err(Error::Singular {
            what: "reduced signal matrix".into(),
            condition: pinv.full_condition,
        });
    }
    let r = &pinv.matrix * y1;
    (0..users)
        .map(|u| {
            let pilots = layout.pilot_values::<T>(u);
            if pilots.is_empty() {
                return input_err(format!("user {u} has no pilots"));
            }
            let mut a = Cx::new(T::zero(), T::zero());
            let mut b = a;
            for (p, v) in &pilots {
                let idx = kept[u].binary_search(p).map_err(|_| Error::Input(format!("pilot {p} of user {u} sits on a null")))?;
                a += r[offset[u] + idx] / v;
                b += r[offset[u] + kept[u].len() + idx] / v.conj();
            }
            let n = T::count(pilots.len());
            Ok(AmbiguityFit { a: a.unscale(n), b: b.unscale(n) })
        })
        .collect()
}
