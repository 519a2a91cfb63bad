//! Subsymbol/subcarrier assignment of resource elements to users.
//!
//! Subcarrier indices are 1-based throughout this module (`1..=K`), which is
//! how assignments are written in configuration files. Resource-element
//! columns (`m·K + k - 1`) are zero-based.

use std::collections::BTreeSet;

use nalgebra::DMatrix;

use crate::config::SystemConfig;
use crate::error::{config_err, Result};
use crate::scalar::Real;

/// Per-user, per-subsymbol subcarrier sets plus the derived selection and
/// image-intersection data.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AssignmentPlan {
    pub k: usize,
    pub m: usize,
    /// `sets[u][m]`: ascending 1-based subcarriers of user `u` on subsymbol `m`.
    pub sets: Vec<Vec<Vec<usize>>>,
    /// `intersections[u][m]`: members of `sets[u][m]` whose image subcarrier
    /// also belongs to `sets[u][m]`.
    pub intersections: Vec<Vec<Vec<usize>>>,
    /// Zero-based columns of the `N × N` identity selected for each user,
    /// ordered subsymbol-major.
    columns: Vec<Vec<usize>>,
}

/// Image subcarrier of `k` under conjugation: `((K - k + 1) mod K) + 1`.
pub fn image_subcarrier(k: usize, total: usize) -> usize {
    ((total + total - k + 1) % total) + 1
}

/// Zero-based frequency of 1-based subcarrier `k`, in `[-K/2, K/2)`.
pub fn signed_frequency(k: usize, total: usize) -> i64 {
    let f = (k - 1) as i64;
    if 2 * f >= total as i64 {
        f - total as i64
    } else {
        f
    }
}

/// Data subcarriers for `k_d` of `k`: DC is reserved first, then the band
/// around Nyquist, working outward.
pub fn default_data_subcarriers(k: usize, k_d: usize) -> Vec<usize> {
    let reserved = k.saturating_sub(k_d);
    let mut order = vec![1];
    let nyq = k / 2 + 1;
    if k > 1 {
        order.push(nyq);
        let mut off = 1;
        while order.len() < k {
            if nyq > off + 1 {
                order.push(nyq - off);
            }
            if nyq + off <= k && order.len() < k {
                order.push(nyq + off);
            }
            off += 1;
        }
    }
    let nulls: BTreeSet<usize> = order.into_iter().take(reserved).collect();
    (1..=k).filter(|c| !nulls.contains(c)).collect()
}

impl AssignmentPlan {
    pub fn new(config: &SystemConfig, sets: Vec<Vec<Vec<usize>>>) -> Result<Self> {
        let (k, m) = (config.k, config.m);
        if sets.len() != config.users {
            return config_err(format!(
                "assignment lists {} users, configuration has {}",
                sets.len(),
                config.users
            ));
        }
        let mut sorted = sets;
        for (u, per_user) in sorted.iter_mut().enumerate() {
            if per_user.len() != m {
                return config_err(format!(
                    "user {} has {} subsymbol sets, expected {m}",
                    u + 1,
                    per_user.len()
                ));
            }
            for (sub, set) in per_user.iter_mut().enumerate() {
                set.sort_unstable();
                if let Some(&bad) = set.iter().find(|&&c| c == 0 || c > k) {
                    return config_err(format!(
                        "subcarrier {bad} of user {} subsymbol {} outside 1..={k}",
                        u + 1,
                        sub + 1
                    ));
                }
                if set.windows(2).any(|w| w[0] == w[1]) {
                    return config_err(format!(
                        "duplicate subcarrier for user {} subsymbol {}",
                        u + 1,
                        sub + 1
                    ));
                }
            }
        }

        let mut data_set: Option<BTreeSet<usize>> = None;
        for sub in 0..m {
            let mut union = BTreeSet::new();
            for (u, per_user) in sorted.iter().enumerate() {
                for &c in &per_user[sub] {
                    if !union.insert(c) {
                        return config_err(format!(
                            "subcarrier {c} on subsymbol {} assigned twice (user {} overlaps)",
                            sub + 1,
                            u + 1
                        ));
                    }
                }
            }
            if union.len() != config.data_subcarriers {
                return config_err(format!(
                    "subsymbol {} allocates {} subcarriers, K_D = {}",
                    sub + 1,
                    union.len(),
                    config.data_subcarriers
                ));
            }
            match &data_set {
                None => data_set = Some(union),
                Some(prev) if *prev != union => {
                    return config_err(format!(
                        "subsymbol {} uses a different data subcarrier set",
                        sub + 1
                    ))
                }
                _ => {}
            }
        }

        let per_user: Vec<usize> = sorted
            .iter()
            .map(|s| s.iter().map(Vec::len).sum())
            .collect();
        if per_user.iter().any(|&n| n != per_user[0]) {
            return config_err(format!("unequal resource elements per user: {per_user:?}"));
        }

        let intersections = sorted
            .iter()
            .map(|per_user| {
                per_user
                    .iter()
                    .map(|set| {
                        set.iter()
                            .copied()
                            .filter(|&c| set.binary_search(&image_subcarrier(c, k)).is_ok())
                            .collect()
                    })
                    .collect()
            })
            .collect();

        let columns = sorted
            .iter()
            .map(|per_user| {
                per_user
                    .iter()
                    .enumerate()
                    .flat_map(|(sub, set)| set.iter().map(move |&c| sub * k + c - 1))
                    .collect()
            })
            .collect();

        Ok(Self {
            k,
            m,
            sets: sorted,
            intersections,
            columns,
        })
    }

    /// Each user takes a contiguous band of the data subcarriers on every
    /// subsymbol, counting bands cyclically in signed-frequency order with
    /// user 0's band centred on DC. For two users both bands then contain
    /// image pairs. When `K_D` is not a multiple of `U` the leftover
    /// subcarriers rotate over users from one subsymbol to the next.
    pub fn contiguous_block(config: &SystemConfig) -> Result<Self> {
        let mut data = default_data_subcarriers(config.k, config.data_subcarriers);
        data.sort_by_key(|&c| signed_frequency(c, config.k));
        let n = data.len();
        let dc = data.iter().take_while(|&&c| signed_frequency(c, config.k) < 0).count();
        let users = config.users;
        let base = n / users;
        let extra = n % users;
        let mut sets = vec![vec![Vec::new(); config.m]; users];
        for sub in 0..config.m {
            let len = |u: usize| base + usize::from((u + users - (sub * extra) % users) % users < extra);
            let mut start = (dc + n - len(0) / 2) % n;
            for (u, per_user) in sets.iter_mut().enumerate() {
                per_user[sub] = (0..len(u)).map(|i| data[(start + i) % n]).collect();
                start += len(u);
            }
        }
        Self::new(config, sets)
    }

    /// Resource elements are dealt round-robin over users, subsymbol-major.
    pub fn interleaved(config: &SystemConfig) -> Result<Self> {
        let data = default_data_subcarriers(config.k, config.data_subcarriers);
        let users = config.users;
        let mut sets = vec![vec![Vec::new(); config.m]; users];
        for sub in 0..config.m {
            for (j, &c) in data.iter().enumerate() {
                sets[(sub * data.len() + j) % users][sub].push(c);
            }
        }
        Self::new(config, sets)
    }

    pub fn users(&self) -> usize {
        self.sets.len()
    }

    pub fn n(&self) -> usize {
        self.k * self.m
    }

    /// `N_u`, identical for all users.
    pub fn per_user(&self) -> usize {
        self.columns[0].len()
    }

    /// Zero-based resource-element columns of user `u`, in data-vector order.
    pub fn columns(&self, u: usize) -> &[usize] {
        &self.columns[u]
    }

    /// `K_{I,u,m}`.
    pub fn intersection_count(&self, u: usize, m: usize) -> usize {
        self.intersections[u][m].len()
    }

    pub fn total_intersections(&self) -> usize {
        self.intersections.iter().flatten().map(Vec::len).sum()
    }

    /// Positions within user `u`'s data vector that fall in an intersection set.
    pub fn intersection_positions(&self, u: usize) -> Vec<usize> {
        let mut pos = 0;
        let mut out = Vec::new();
        for (sub, set) in self.sets[u].iter().enumerate() {
            for &c in set {
                if self.intersections[u][sub].binary_search(&c).is_ok() {
                    out.push(pos);
                }
                pos += 1;
            }
        }
        out
    }

    /// Another user whose image subcarriers cover all of `u`'s resource
    /// elements. The image path of that user then looks like a second copy
    /// of `u` with the partner's CFO and channel.
    pub fn mirrored_partner(&self, u: usize) -> Option<usize> {
        (0..self.users()).filter(|&v| v != u).find(|&v| {
            self.sets[u].iter().zip(&self.sets[v]).all(|(mine, theirs)| {
                mine.iter()
                    .all(|&c| theirs.binary_search(&image_subcarrier(c, self.k)).is_ok())
            })
        })
    }

    /// `Γ_u`: the `N × N_u` 0/1 selection matrix.
    pub fn gamma<T: Real>(&self, u: usize) -> DMatrix<T> {
        let cols = &self.columns[u];
        DMatrix::from_fn(self.n(), cols.len(), |r, c| {
            if cols[c] == r {
                T::one()
            } else {
                T::zero()
            }
        })
    }
}

/// Validates `sets` and derives the selection/intersection data.
pub fn build_assignment(
    config: &SystemConfig,
    sets: Vec<Vec<Vec<usize>>>,
) -> Result<AssignmentPlan> {
    AssignmentPlan::new(config, sets)
}
