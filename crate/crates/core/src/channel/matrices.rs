//! Structured matrices of the received-signal model.

use nalgebra::DMatrix;

use crate::error::{input_err, Result};
use crate::scalar::{cis, CMatrix, CVector, Cx, Real};

/// Diagonal of the CFO matrix: `exp(j2π·phi·g/K)`, `g = 0..G`.
pub fn cfo_ramp<T: Real>(phi: T, g: usize, k: usize) -> CVector<T> {
    let step = T::two_pi() * phi / T::count(k);
    CVector::from_fn(g, |i, _| cis(step * T::count(i)))
}

/// `E(phi)` as a dense `G × G` matrix.
pub fn build_cfo_matrix<T: Real>(phi: T, g: usize, k: usize) -> CMatrix<T> {
    CMatrix::from_diagonal(&cfo_ramp(phi, g, k))
}

/// Banded channel matrix `H` of size `N_r(G−L+1) × G`.
///
/// Row block `r` holds the tap blocks of `h = [h(L); …; h(1)]` in columns
/// `r..r+L`; rows are antenna-interleaved.
pub fn build_channel_matrix<T: Real>(
    h: &CVector<T>,
    g: usize,
    taps: usize,
    rx_antennas: usize,
) -> Result<CMatrix<T>> {
    check_cir(h, g, taps, rx_antennas)?;
    let kept = g + 1 - taps;
    let mut out = DMatrix::zeros(rx_antennas * kept, g);
    for r in 0..kept {
        for j in 0..taps {
            for n in 0..rx_antennas {
                out[(r * rx_antennas + n, r + j)] = h[j * rx_antennas + n];
            }
        }
    }
    Ok(out)
}

/// `H·x` without materializing `H`; `x` is `G × c`.
pub fn apply_channel<T: Real>(h: &CVector<T>, x: &CMatrix<T>, taps: usize, rx_antennas: usize) -> CMatrix<T> {
    let g = x.nrows();
    let kept = g + 1 - taps;
    let mut out = DMatrix::zeros(rx_antennas * kept, x.ncols());
    for c in 0..x.ncols() {
        let xc = x.column(c);
        let mut oc = out.column_mut(c);
        for r in 0..kept {
            for j in 0..taps {
                let s = xc[r + j];
                for n in 0..rx_antennas {
                    oc[r * rx_antennas + n] += h[j * rx_antennas + n] * s;
                }
            }
        }
    }
    out
}

/// `Υ` (`N_rL × G`) satisfying `γᴴH = hᵀΥ` for every CIR `h`.
///
/// Row block `j` carries `conj(γ)`'s `G−L+1` antenna blocks starting at
/// column `j`.
pub fn build_upsilon<T: Real>(gamma: &CVector<T>, g: usize, taps: usize, rx_antennas: usize) -> Result<CMatrix<T>> {
    let kept = g + 1 - taps;
    if gamma.len() != rx_antennas * kept {
        return input_err(format!(
            "noise vector has {} entries, expected {}",
            gamma.len(),
            rx_antennas * kept
        ));
    }
    let mut out = DMatrix::zeros(rx_antennas * taps, g);
    for j in 0..taps {
        for r in 0..kept {
            for n in 0..rx_antennas {
                out[(j * rx_antennas + n, r + j)] = gamma[r * rx_antennas + n].conj();
            }
        }
    }
    Ok(out)
}

/// `E(phi)·x` for a `G × c` matrix.
pub fn apply_cfo<T: Real>(ramp: &CVector<T>, x: &CMatrix<T>) -> CMatrix<T> {
    let mut out = x.clone();
    for (i, mut row) in out.row_iter_mut().enumerate() {
        let w: Cx<T> = ramp[i];
        row.iter_mut().for_each(|z| *z *= w);
    }
    out
}

fn check_cir<T: Real>(h: &CVector<T>, g: usize, taps: usize, rx_antennas: usize) -> Result<()> {
    if taps == 0 || taps > g {
        return input_err(format!("{taps} taps incompatible with {g} samples"));
    }
    if h.len() != taps * rx_antennas {
        return input_err(format!(
            "CIR has {} entries, expected N_r·L = {}",
            h.len(),
            taps * rx_antennas
        ));
    }
    Ok(())
}
