//! GFDM modulation matrix and its cyclic-prefix extension.

use nalgebra::DMatrix;

use crate::error::{config_err, Result};
use crate::scalar::{cis, real, CMatrix, Real};

/// Column `m·K + k` of `a` is the prototype circularly delayed by `m·K`
/// samples and modulated onto subcarrier `k` (both zero-based).
#[derive(Debug, Clone)]
pub struct ModulationMatrix<T: Real> {
    pub k: usize,
    pub m: usize,
    pub cp_len: usize,
    pub prototype: Vec<T>,
    /// `N × N`.
    pub a: CMatrix<T>,
    /// `(N + cp_len) × N`: the last `cp_len` rows of `a` followed by `a`.
    pub a_cp: CMatrix<T>,
}

impl<T: Real> ModulationMatrix<T> {
    pub fn new(prototype: &[T], k: usize, m: usize, cp_len: usize) -> Result<Self> {
        let n = k * m;
        if n == 0 || prototype.len() != n {
            return config_err(format!(
                "prototype length {} does not match K·M = {}",
                prototype.len(),
                n
            ));
        }
        if cp_len > n {
            return config_err(format!("CP length {cp_len} exceeds symbol length {n}"));
        }
        let two_pi = T::two_pi();
        let kf = T::count(k);
        let a = DMatrix::from_fn(n, n, |row, col| {
            let (sub, car) = (col / k, col % k);
            let tap = prototype[(row + n - sub * k) % n];
            // exp(-j2π·k·n/K), exponent reduced mod K for accuracy.
            let phase = -two_pi * T::count((car * row) % k) / kf;
            cis(phase) * real(tap)
        });
        let a_cp = DMatrix::from_fn(n + cp_len, n, |row, col| {
            if row < cp_len {
                a[(n - cp_len + row, col)]
            } else {
                a[(row - cp_len, col)]
            }
        });
        Ok(Self {
            k,
            m,
            cp_len,
            prototype: prototype.to_vec(),
            a,
            a_cp,
        })
    }

    pub fn n(&self) -> usize {
        self.k * self.m
    }

    pub fn g(&self) -> usize {
        self.n() + self.cp_len
    }

    /// Column index of (subcarrier `k`, subsymbol `m`), zero-based.
    pub fn column(&self, k: usize, m: usize) -> usize {
        m * self.k + k
    }

    /// 2-norm condition number of `a`.
    pub fn condition_number(&self) -> f64 {
        let sv = self.a.clone().singular_values();
        let max = sv.max().to_f64_lossy();
        let min = sv.min().to_f64_lossy();
        if min == 0.0 {
            f64::INFINITY
        } else {
            max / min
        }
    }
}

/// Builds `A` and `A_cp` from a prototype.
pub fn build_modulation_matrix<T: Real>(
    prototype: &[T],
    k: usize,
    m: usize,
    cp_len: usize,
) -> Result<ModulationMatrix<T>> {
    ModulationMatrix::new(prototype, k, m, cp_len)
}
