//! Dense complex linear algebra used by the estimator and detector.

use nalgebra::linalg::{SymmetricEigen, SVD};
use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::scalar::{real, CMatrix, Real};

/// Eigen-decomposition of a Hermitian matrix with eigenvalues ascending.
#[derive(Debug, Clone)]
pub struct HermitianEigen<T: Real> {
    pub values: Vec<T>,
    /// Column `i` pairs with `values[i]`.
    pub vectors: CMatrix<T>,
}

impl<T: Real> HermitianEigen<T> {
    pub fn new(m: &CMatrix<T>) -> Result<Self> {
        if !m.is_square() {
            return Err(Error::Numerical(format!("eigensolve of non-square {:?} matrix", m.shape())));
        }
        if m.iter().any(|z| !(z.re.is_finite() && z.im.is_finite())) {
            return Err(Error::Numerical("non-finite entry in Hermitian matrix".into()));
        }
        let n = m.nrows();
        // Symmetrize so round-off in the input cannot leak into the solver.
        let herm = DMatrix::from_fn(n, n, |i, j| (m[(i, j)] + m[(j, i)].conj()) * T::lit(0.5));
        let eig = SymmetricEigen::try_new(herm, T::default_epsilon(), 10_000)
            .ok_or_else(|| Error::Numerical("Hermitian eigensolver did not converge".into()))?;
        let mut order: Vec<usize> = (0..n).collect();
        // Stable sort: equal eigenvalues keep the solver's output order.
        order.sort_by(|&a, &b| eig.eigenvalues[a].partial_cmp(&eig.eigenvalues[b]).expect("finite eigenvalues"));
        let values = order.iter().map(|&i| eig.eigenvalues[i]).collect();
        let vectors = DMatrix::from_fn(n, n, |r, c| eig.eigenvectors[(r, order[c])]);
        Ok(Self { values, vectors })
    }

    pub fn min(&self) -> T {
        self.values[0]
    }

    pub fn max(&self) -> T {
        *self.values.last().expect("non-empty spectrum")
    }
}

/// Eigenvalues only, ascending.
pub fn hermitian_eigenvalues<T: Real>(m: &CMatrix<T>) -> Result<Vec<T>> {
    let n = m.nrows();
    let herm = DMatrix::from_fn(n, n, |i, j| (m[(i, j)] + m[(j, i)].conj()) * T::lit(0.5));
    let eig = SymmetricEigen::try_new(herm, T::default_epsilon(), 10_000)
        .ok_or_else(|| Error::Numerical("Hermitian eigensolver did not converge".into()))?;
    let mut v: Vec<T> = eig.eigenvalues.iter().copied().collect();
    if v.iter().any(|x| !x.is_finite()) {
        return Err(Error::Numerical("non-finite eigenvalue".into()));
    }
    v.sort_by(|a, b| a.partial_cmp(b).expect("finite eigenvalues"));
    Ok(v)
}

/// Moore–Penrose pseudoinverse by SVD.
#[derive(Debug, Clone)]
pub struct PseudoInverse<T: Real> {
    pub matrix: CMatrix<T>,
    /// Singular values above the cutoff.
    pub rank: usize,
    /// Ratio of the largest to the smallest retained singular value.
    pub condition: f64,
    /// Largest over smallest singular value, counting discarded ones.
    pub full_condition: f64,
    pub columns: usize,
}

impl<T: Real> PseudoInverse<T> {
    /// Singular values below `rel_cutoff · σ_max` are treated as zero.
    pub fn new(m: &CMatrix<T>, rel_cutoff: f64) -> Result<Self> {
        let (rows, cols) = m.shape();
        if m.iter().any(|z| !(z.re.is_finite() && z.im.is_finite())) {
            return Err(Error::Numerical("non-finite entry in matrix to invert".into()));
        }
        let svd = SVD::try_new(m.clone(), true, true, T::default_epsilon(), 10_000)
            .ok_or_else(|| Error::Numerical("SVD did not converge".into()))?;
        let u = svd.u.as_ref().expect("requested U");
        let v_t = svd.v_t.as_ref().expect("requested V^H");
        let sv = &svd.singular_values;
        let smax = sv.iter().copied().fold(T::zero(), |a, b| if b > a { b } else { a });
        let cut = smax * T::lit(rel_cutoff);
        let mut rank = 0;
        let mut smin_kept = smax;
        let mut smin_all = smax;
        // V Σ⁺ as the scaled adjoint of the kept rows of Vᴴ.
        let mut v_scaled = DMatrix::zeros(cols, sv.len());
        let mut u_kept = DMatrix::zeros(rows, sv.len());
        for (i, &s) in sv.iter().enumerate() {
            if s < smin_all {
                smin_all = s;
            }
            if s > cut && s > T::zero() {
                if s < smin_kept {
                    smin_kept = s;
                }
                let inv = real(T::one() / s);
                v_scaled.column_mut(rank).copy_from(&(v_t.row(i).adjoint() * inv));
                u_kept.column_mut(rank).copy_from(&u.column(i));
                rank += 1;
            }
        }
        let pinv = v_scaled.columns(0, rank) * u_kept.columns(0, rank).adjoint();
        let ratio = |lo: T| {
            if lo > T::zero() {
                (smax / lo).to_f64_lossy()
            } else {
                f64::INFINITY
            }
        };
        Ok(Self {
            matrix: pinv,
            rank,
            condition: ratio(smin_kept),
            full_condition: ratio(smin_all),
            columns: cols,
        })
    }

    pub fn full_column_rank(&self) -> bool {
        self.rank == self.columns
    }
}
