//! Sample covariance and noise-subspace extraction.

use nalgebra::DMatrix;

use crate::config::SystemConfig;
use crate::error::{input_err, Error, Result};
use crate::linalg::HermitianEigen;
use crate::scalar::{CMatrix, CVector, Real};
use crate::waveform::AssignmentPlan;

/// `R_y = (1/N_s) Σ_i y_i y_iᴴ`.
pub fn sample_covariance<T: Real>(y: &[CVector<T>]) -> Result<CMatrix<T>> {
    let Some(first) = y.first() else {
        return input_err("covariance of an empty frame");
    };
    let dim = first.len();
    if y.iter().any(|v| v.len() != dim) {
        return input_err("received vectors differ in length");
    }
    let stacked = DMatrix::from_fn(dim, y.len(), |r, c| y[c][r]);
    let scale = T::one() / T::count(y.len());
    let mut r = &stacked * stacked.adjoint();
    r.iter_mut().for_each(|z| *z *= scale);
    Ok(r)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SubspaceDims {
    pub signal: usize,
    pub noise: usize,
}

/// Signal/noise dimension split.
///
/// With IQ imbalance each user contributes its source and image columns,
/// minus one per subcarrier whose image falls in the same user's set on the
/// same subsymbol: `2·M·K_D − Σ K_I`. Without IQ imbalance it is `M·K_D`.
pub fn compute_subspace_dims(config: &SystemConfig, plan: &AssignmentPlan, iq_present: bool) -> Result<SubspaceDims> {
    let data = config.data_elements();
    let signal = if iq_present {
        2 * data - plan.total_intersections()
    } else {
        data
    };
    let observation = config.obs_dim();
    if observation <= signal {
        return Err(Error::Infeasible {
            signal_dim: signal,
            observation_dim: observation,
        });
    }
    Ok(SubspaceDims {
        signal,
        noise: observation - signal,
    })
}

/// Orthonormal eigenvectors of the `q` smallest eigenvalues, ascending.
pub fn noise_subspace<T: Real>(r_y: &CMatrix<T>, q: usize) -> Result<(CMatrix<T>, Vec<T>)> {
    if q == 0 || q > r_y.nrows() {
        return input_err(format!("noise subspace of dimension {q} in a {}-dimensional space", r_y.nrows()));
    }
    let eig = HermitianEigen::new(r_y)?;
    let vectors = eig.vectors.columns(0, q).into_owned();
    Ok((vectors, eig.values))
}

/// Noise subspace of one frame, ready for the per-user CFO searches.
#[derive(Debug, Clone)]
pub struct SubspaceDecomposition<T: Real> {
    pub covariance: CMatrix<T>,
    pub dims: SubspaceDims,
    /// `γ_1 … γ_Q` as columns; entry `r·N_r + n` is antenna `n` of block `r`.
    pub gammas: CMatrix<T>,
    /// All eigenvalues of the covariance, ascending.
    pub eigenvalues: Vec<T>,
    /// `Σ_q conj(γ_q) γ_qᵀ`.
    pub(crate) projector: CMatrix<T>,
}

impl<T: Real> SubspaceDecomposition<T> {
    pub fn new(config: &SystemConfig, plan: &AssignmentPlan, y: &[CVector<T>], iq_present: bool) -> Result<Self> {
        let dims = compute_subspace_dims(config, plan, iq_present)?;
        let covariance = sample_covariance(y)?;
        if covariance.nrows() != config.obs_dim() {
            return input_err(format!(
                "received vectors have {} entries, expected {}",
                covariance.nrows(),
                config.obs_dim()
            ));
        }
        let (gammas, eigenvalues) = noise_subspace(&covariance, dims.noise)?;
        Ok(Self::from_parts(covariance, dims, gammas, eigenvalues))
    }

    pub fn from_parts(covariance: CMatrix<T>, dims: SubspaceDims, gammas: CMatrix<T>, eigenvalues: Vec<T>) -> Self {
        let conj = gammas.map(|z| z.conj());
        let projector = &conj * gammas.transpose();
        Self {
            covariance,
            dims,
            gammas,
            eigenvalues,
            projector,
        }
    }

    pub fn gamma(&self, q: usize) -> CVector<T> {
        self.gammas.column(q).into_owned()
    }

    /// Same subspace, different basis: `gammas · unitary`.
    pub fn rotated(&self, unitary: &CMatrix<T>) -> Self {
        Self::from_parts(self.covariance.clone(), self.dims, &self.gammas * unitary, self.eigenvalues.clone())
    }
}
