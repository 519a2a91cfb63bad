//! CFO search over the noise subspace.

use crate::error::{input_err, Result};
use crate::linalg::{hermitian_eigenvalues, HermitianEigen};
use crate::optimize::{minimize_bounded, BrentOptions};
use crate::scalar::{cis, CMatrix, CVector, Real};
use crate::waveform::LinkModel;

use super::subspace::SubspaceDecomposition;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum CfoCost {
    /// Smallest eigenvalue of `R_P(phi)`.
    #[default]
    SmallestEigenvalue,
    /// `ln det R_P(phi)`.
    LogDeterminant,
}

/// `R_P(phi) = Σ_q P_q P_qᴴ`, `P_q = Υ_q E(phi) Ψ_u`, for one user.
///
/// `R_P` is a trigonometric polynomial in `phi`,
/// `Σ_d S_d exp(j2π·phi·d/K)` for `d = −(G−1) … G−1`, so the coefficients
/// are formed once and each evaluation costs `(2G−1)·(N_r L)²`.
#[derive(Debug, Clone)]
pub struct CfoCostModel<T: Real> {
    k: usize,
    g: usize,
    dim: usize,
    coefficients: Vec<CMatrix<T>>,
}

impl<T: Real> CfoCostModel<T> {
    pub fn new(link: &LinkModel<T>, u: usize, subspace: &SubspaceDecomposition<T>) -> Result<Self> {
        let c = &link.config;
        if u >= link.users() {
            return input_err(format!("user {u} out of range"));
        }
        let (g, taps, nr) = (c.g(), c.channel_taps, c.rx_antennas);
        let rows = c.kept_samples();
        let w = &subspace.projector;
        if w.nrows() != rows * nr {
            return input_err("noise subspace does not match the link dimensions");
        }
        let psi = &link.psi[u];
        let gram = psi * psi.adjoint();
        let dim = nr * taps;
        let mut coefficients = vec![CMatrix::zeros(dim, dim); 2 * g - 1];
        for j in 0..taps {
            for jp in 0..taps {
                for rp in 0..rows {
                    for r in 0..rows {
                        let (a, b) = (r + j, rp + jp);
                        let cab = gram[(a, b)];
                        let s = &mut coefficients[a + g - 1 - b];
                        for np in 0..nr {
                            for n in 0..nr {
                                s[(j * nr + n, jp * nr + np)] += cab * w[(r * nr + n, rp * nr + np)];
                            }
                        }
                    }
                }
            }
        }
        Ok(Self {
            k: c.k,
            g,
            dim,
            coefficients,
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn r_p(&self, phi: T) -> CMatrix<T> {
        let mut out = CMatrix::zeros(self.dim, self.dim);
        let omega = T::two_pi() * phi / T::count(self.k);
        for (i, s) in self.coefficients.iter().enumerate() {
            let d = i as f64 - (self.g - 1) as f64;
            out += s * cis(omega * T::lit(d));
        }
        out
    }

    pub fn cost(&self, phi: T, kind: CfoCost) -> Result<T> {
        let vals = hermitian_eigenvalues(&self.r_p(phi))?;
        Ok(match kind {
            CfoCost::SmallestEigenvalue => vals[0],
            CfoCost::LogDeterminant => vals.iter().fold(T::zero(), |acc, &v| {
                let floor = T::log_floor();
                acc + if v > floor { v } else { floor }.ln()
            }),
        })
    }

    /// Blind CIR estimate at `phi`: the conjugated minimum eigenvector of
    /// `R_P`, unit norm, with an unresolved complex scale.
    pub fn blind_channel(&self, phi: T) -> Result<CVector<T>> {
        let eig = HermitianEigen::new(&self.r_p(phi))?;
        Ok(eig.vectors.column(0).map(|z| z.conj()))
    }
}

/// `[Υ_1 E Ψ_u, …, Υ_Q E Ψ_u]` built directly from its definition.
pub fn stacked_projection<T: Real>(
    link: &LinkModel<T>,
    u: usize,
    subspace: &SubspaceDecomposition<T>,
    phi: T,
) -> Result<CMatrix<T>> {
    let c = &link.config;
    let e_psi = crate::channel::build_cfo_matrix(phi, c.g(), c.k) * &link.psi[u];
    let nu = e_psi.ncols();
    let q = subspace.gammas.ncols();
    let mut out = CMatrix::zeros(c.cir_len(), q * nu);
    for i in 0..q {
        let ups = crate::channel::build_upsilon(&subspace.gamma(i), c.g(), c.channel_taps, c.rx_antennas)?;
        out.columns_mut(i * nu, nu).copy_from(&(ups * &e_psi));
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CfoSearchOptions {
    /// Coarse grid spacing over `[-0.5, 0.5]`.
    pub step: f64,
    pub cost: CfoCost,
    pub fine: BrentOptions,
}

impl Default for CfoSearchOptions {
    fn default() -> Self {
        Self {
            step: 0.01,
            cost: CfoCost::default(),
            fine: BrentOptions::default(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CfoSearch {
    pub phi: f64,
    pub cost: f64,
    pub coarse_phi: f64,
    pub evaluations: usize,
}

/// Grid points `-0.5, -0.5 + 1/n, …, 0.5` with `n = round(1/step)`.
pub fn coarse_grid(step: f64) -> Result<Vec<f64>> {
    if !(step > 0.0 && step <= 0.5) {
        return input_err(format!("CFO grid step {step} outside (0, 0.5]"));
    }
    let n = (1.0 / step).round() as usize;
    Ok((0..=n).map(|i| -0.5 + i as f64 / n as f64).collect())
}

/// Coarse grid search, then a bounded Brent refinement within one grid step
/// of the best grid point.
pub fn estimate_cfo<T: Real>(model: &CfoCostModel<T>, opts: &CfoSearchOptions) -> Result<CfoSearch> {
    Ok(cfo_candidates(model, opts, 1)?.remove(0))
}

/// The `count` deepest local minima of the coarse grid, each refined, best
/// first. Grid ends count as minima when lower than their one neighbour.
pub fn cfo_candidates<T: Real>(model: &CfoCostModel<T>, opts: &CfoSearchOptions, count: usize) -> Result<Vec<CfoSearch>> {
    let grid = coarse_grid(opts.step)?;
    let spacing = grid[1] - grid[0];
    let costs = grid
        .iter()
        .map(|&phi| Ok(model.cost(T::lit(phi), opts.cost)?.to_f64_lossy()))
        .collect::<Result<Vec<f64>>>()?;
    let n = grid.len();
    let mut minima: Vec<usize> = (0..n)
        .filter(|&i| (i == 0 || costs[i] <= costs[i - 1]) && (i + 1 == n || costs[i] < costs[i + 1]))
        .collect();
    if minima.is_empty() {
        minima.push(0);
    }
    minima.sort_by(|&a, &b| costs[a].total_cmp(&costs[b]));
    let mut out = Vec::with_capacity(count);
    for &i in minima.iter().take(count.max(1)) {
        let coarse = (grid[i], costs[i]);
        let lo = (coarse.0 - spacing).max(-0.5);
        let hi = (coarse.0 + spacing).min(0.5);
        let mut failure = None;
        let fine = minimize_bounded(
            |phi| match model.cost(T::lit(phi), opts.cost) {
                Ok(v) => v.to_f64_lossy(),
                Err(e) => {
                    failure.get_or_insert(e);
                    f64::INFINITY
                }
            },
            lo,
            hi,
            opts.fine,
        );
        if let Some(e) = failure {
            return Err(e);
        }
        let (phi, cost) = if fine.value <= coarse.1 { (fine.x, fine.value) } else { coarse };
        out.push(CfoSearch {
            phi,
            cost,
            coarse_phi: coarse.0,
            evaluations: if out.is_empty() { n } else { 0 } + fine.evaluations,
        });
    }
    out.sort_by(|a, b| a.cost.total_cmp(&b.cost));
    Ok(out)
}

/// Cost at each grid point, for diagnostics.
pub fn cost_curve<T: Real>(model: &CfoCostModel<T>, grid: &[f64], kind: CfoCost) -> Result<Vec<(f64, f64)>> {
    grid.iter()
        .map(|&phi| Ok((phi, model.cost(T::lit(phi), kind)?.to_f64_lossy())))
        .collect()
}
