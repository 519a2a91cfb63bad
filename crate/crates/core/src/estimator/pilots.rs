//! Null and pilot placement on the first symbol of a frame.

use crate::error::{config_err, input_err, Result};
use crate::scalar::{cis, CVector, Cx, Real};
use crate::waveform::AssignmentPlan;

/// Per-user positions (within the user's data vector) of nulls and pilots
/// on symbol 1.
#[derive(Debug, Clone, PartialEq)]
pub struct PilotLayout {
    /// Intersection positions, transmitted as zero.
    pub nulls: Vec<Vec<usize>>,
    /// `(position, QPSK index)`.
    pub pilots: Vec<Vec<(usize, u8)>>,
}

/// QPSK point `exp(j(π/4 + index·π/2))`.
pub fn pilot_symbol<T: Real>(index: u8) -> Cx<T> {
    let quarter = T::frac_pi_2();
    cis(T::frac_pi_4() + quarter * T::count(index as usize % 4))
}

/// Nulls every intersection position and puts `pilots_per_user` pilots on
/// the first remaining positions of each user.
pub fn plan_pilots(plan: &AssignmentPlan, pilots_per_user: usize) -> Result<PilotLayout> {
    if pilots_per_user == 0 {
        return config_err("at least one pilot per user is needed to resolve the ambiguity");
    }
    let mut nulls = Vec::with_capacity(plan.users());
    let mut pilots = Vec::with_capacity(plan.users());
    for u in 0..plan.users() {
        let null = plan.intersection_positions(u);
        let free: Vec<usize> = (0..plan.per_user()).filter(|p| null.binary_search(p).is_err()).collect();
        if free.len() < pilots_per_user {
            return config_err(format!(
                "user {u} has {} usable positions for {pilots_per_user} pilots",
                free.len()
            ));
        }
        pilots.push(
            free.iter()
                .take(pilots_per_user)
                .enumerate()
                .map(|(i, &p)| (p, ((u + 3 * i) % 4) as u8))
                .collect(),
        );
        nulls.push(null);
    }
    Ok(PilotLayout { nulls, pilots })
}

impl PilotLayout {
    pub fn users(&self) -> usize {
        self.pilots.len()
    }

    pub fn pilot_values<T: Real>(&self, u: usize) -> Vec<(usize, Cx<T>)> {
        self.pilots[u].iter().map(|&(p, i)| (p, pilot_symbol(i))).collect()
    }

    /// Overwrites nulls and pilots in the first symbol's per-user vectors.
    pub fn apply<T: Real>(&self, symbol: &mut [CVector<T>]) -> Result<()> {
        if symbol.len() != self.users() {
            return input_err(format!("{} user vectors for {} users", symbol.len(), self.users()));
        }
        for (u, d) in symbol.iter_mut().enumerate() {
            for &p in self.nulls[u].iter().chain(self.pilots[u].iter().map(|(p, _)| p)) {
                if p >= d.len() {
                    return input_err(format!("position {p} outside user {u}'s {} elements", d.len()));
                }
            }
            for &p in &self.nulls[u] {
                d[p] = Cx::new(T::zero(), T::zero());
            }
            for (p, v) in self.pilot_values(u) {
                d[p] = v;
            }
        }
        Ok(())
    }

    /// Positions that carry payload on symbol 1.
    pub fn is_reserved(&self, u: usize, position: usize) -> bool {
        self.nulls[u].contains(&position) || self.pilots[u].iter().any(|&(p, _)| p == position)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::SystemConfig;

    #[test]
    fn pilot_symbols_are_unit_qpsk() {
        for i in 0..4u8 {
            let s: Cx<f64> = pilot_symbol(i);
            assert!((s.norm() - 1.0).abs() < 1e-15);
            assert!((s.re.abs() - s.im.abs()).abs() < 1e-15);
        }
    }

    #[test]
    fn mirrored_plan_has_no_nulls() {
        let c = SystemConfig::default();
        let plan = AssignmentPlan::interleaved(&c).unwrap();
        let layout = plan_pilots(&plan, 2).unwrap();
        assert!(layout.nulls.iter().all(Vec::is_empty));
        assert_eq!(layout.pilots[0].iter().map(|p| p.0).collect::<Vec<_>>(), vec![0, 1]);
    }

    #[test]
    fn default_plan_pilots_on_unpaired_subcarrier() {
        let c = SystemConfig::default();
        let plan = AssignmentPlan::contiguous_block(&c).unwrap();
        let layout = plan_pilots(&plan, 4).unwrap();
        assert_eq!(layout.nulls[0].len(), 24);
        // Subcarrier 5 is the only one of user 0's whose image belongs to user 1.
        assert_eq!(layout.pilots[0].iter().map(|p| p.0).collect::<Vec<_>>(), vec![3, 10, 17, 24]);
        assert!(plan_pilots(&plan, 5).is_err());
    }

    #[test]
    fn pilots_skip_intersections() {
        let c = SystemConfig::default();
        let sets = vec![
            vec![vec![2, 3, 4, 5, 14, 15, 16]; 4],
            vec![vec![6, 7, 8, 10, 11, 12, 13]; 4],
        ];
        let plan = AssignmentPlan::new(&c, sets).unwrap();
        let layout = plan_pilots(&plan, 1).unwrap();
        assert_eq!(layout.nulls[0][..3], [0, 1, 2]);
        // Subcarrier 5 is the first one without an in-set image.
        assert_eq!(layout.pilots[0][0].0, 3);

        let mut sym = vec![CVector::<f64>::from_element(7 * 4, Cx::new(1.0, 1.0)); 2];
        layout.apply(&mut sym).unwrap();
        for &p in &layout.nulls[0] {
            assert_eq!(sym[0][p], Cx::new(0.0, 0.0));
        }
        assert_eq!(sym[0][3], pilot_symbol(layout.pilots[0][0].1));
    }

    #[test]
    fn too_many_pilots_rejected() {
        let c = SystemConfig::default();
        let plan = AssignmentPlan::contiguous_block(&c).unwrap();
        assert!(plan_pilots(&plan, 29).is_err());
        assert!(plan_pilots(&plan, 0).is_err());
    }
}
