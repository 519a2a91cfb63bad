//! Widely linear zero-forcing detection over all users.

use crate::channel::{signal_matrices, FrameTruth};
use crate::error::{input_err, Error, Result};
use crate::estimator::EstimationResult;
use crate::linalg::PseudoInverse;
use crate::scalar::{real, CMatrix, CVector, Cx, Real};
use crate::waveform::LinkModel;

/// `D = [D_1 … D_U]`, `D_u = Ĝ_{I,u} a_u`, and `F` likewise with `Ĝ_{Q,u} b_u`.
#[derive(Debug, Clone)]
pub struct DetectionOperators<T: Real> {
    pub d: CMatrix<T>,
    pub f: CMatrix<T>,
}

impl<T: Real> DetectionOperators<T> {
    /// From per-user `(phi, h, a, b)`.
    pub fn new(link: &LinkModel<T>, users: &[(T, CVector<T>, Cx<T>, Cx<T>)]) -> Result<Self> {
        if users.len() != link.users() {
            return input_err(format!("{} channel sets for {} users", users.len(), link.users()));
        }
        let nu = link.per_user();
        let rows = link.config.obs_dim();
        let mut d = CMatrix::zeros(rows, nu * users.len());
        let mut f = CMatrix::zeros(rows, nu * users.len());
        for (u, (phi, h, a, b)) in users.iter().enumerate() {
            if h.len() != link.config.cir_len() {
                return input_err(format!("user {u} CIR has {} entries", h.len()));
            }
            let (gi, gq) = signal_matrices(link, u, h, *phi);
            d.columns_mut(u * nu, nu).copy_from(&(gi * *a));
            f.columns_mut(u * nu, nu).copy_from(&(gq * *b));
        }
        Ok(Self { d, f })
    }

    pub fn from_estimate(link: &LinkModel<T>, result: &EstimationResult<T>) -> Result<Self> {
        let users: Vec<_> = result.users.iter().map(|e| (e.phi, e.h0.clone(), e.a, e.b)).collect();
        Self::new(link, &users)
    }

    /// Operators built from the true CFOs, CIRs and IQ coefficients.
    pub fn genie(link: &LinkModel<T>, truth: &FrameTruth<T>) -> Result<Self> {
        let users: Vec<_> = truth.users.iter().map(|t| (t.phi, t.h.clone(), t.iq.alpha, t.iq.beta)).collect();
        Self::new(link, &users)
    }

    pub fn data_len(&self) -> usize {
        self.d.ncols()
    }

    /// `[[D, F], [F*, D*]]`.
    pub fn augmented(&self) -> CMatrix<T> {
        let (r, c) = self.d.shape();
        let mut m = CMatrix::zeros(2 * r, 2 * c);
        m.view_mut((0, 0), (r, c)).copy_from(&self.d);
        m.view_mut((0, c), (r, c)).copy_from(&self.f);
        m.view_mut((r, 0), (r, c)).copy_from(&self.f.map(|z| z.conj()));
        m.view_mut((r, c), (r, c)).copy_from(&self.d.map(|z| z.conj()));
        m
    }
}

/// The augmented pseudoinverse, formed once per frame.
#[derive(Debug, Clone)]
pub struct Detector<T: Real> {
    pinv: CMatrix<T>,
    data_len: usize,
    pub condition: f64,
}

impl<T: Real> Detector<T> {
    pub fn new(ops: &DetectionOperators<T>, rel_cutoff: f64) -> Result<Self> {
        let p = PseudoInverse::new(&ops.augmented(), rel_cutoff)?;
        if !p.full_column_rank() {
            return Err(Error::Singular {
                what: "augmented detection operator".into(),
                condition: p.full_condition,
            });
        }
        Ok(Self {
            pinv: p.matrix,
            data_len: ops.data_len(),
            condition: p.condition,
        })
    }

    /// `(d̂_I, d̂_Q)`: the estimates of `d` and of `d*`.
    pub fn detect_parts(&self, y: &CVector<T>) -> Result<(CVector<T>, CVector<T>)> {
        let rows = self.pinv.ncols() / 2;
        if y.len() != rows {
            return input_err(format!("received vector has {} entries, expected {rows}", y.len()));
        }
        let mut stacked = CVector::zeros(2 * rows);
        stacked.rows_mut(0, rows).copy_from(y);
        stacked.rows_mut(rows, rows).copy_from(&y.map(|z| z.conj()));
        let x = &self.pinv * stacked;
        let n = self.data_len;
        Ok((x.rows(0, n).into_owned(), x.rows(n, n).into_owned()))
    }

    /// `(d̂_I + conj(d̂_Q)) / 2`, all users stacked in user order.
    pub fn detect_symbol(&self, y: &CVector<T>) -> Result<CVector<T>> {
        let (di, dq) = self.detect_parts(y)?;
        Ok((di + dq.map(|z| z.conj())) * real(T::lit(0.5)))
    }
}
