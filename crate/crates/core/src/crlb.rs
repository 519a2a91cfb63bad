//! Approximate Fisher information and the CRLB on CFO estimation.
//!
//! Parameters per frame, in order: the `U` CFOs; the real and imaginary
//! parts of the equivalent source CIRs, then of the image CIRs, each
//! without its last stacked entry (taken as known); the real and imaginary
//! parts of the data vector. The Jacobian of the noise-free received
//! vector is laid out as `[jP, Q, jQ, S, jS, T, jU]`.

use nalgebra::{Cholesky, DMatrix, SymmetricEigen};

use crate::channel::{apply_cfo, apply_channel, cfo_ramp, FrameTruth};
use crate::error::{input_err, Error, Result};
use crate::scalar::{cx, CMatrix, CVector, Cx, Real};
use crate::waveform::LinkModel;

/// Column offsets of the parameter blocks.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FisherLayout {
    pub users: usize,
    /// Free CIR coordinates per user and branch, `N_r L − 1`.
    pub taps: usize,
    /// `M K_D`.
    pub data: usize,
}

impl FisherLayout {
    pub fn new<T: Real>(link: &LinkModel<T>) -> Self {
        Self {
            users: link.users(),
            taps: link.config.cir_len() - 1,
            data: link.users() * link.per_user(),
        }
    }

    pub fn channel_params(&self) -> usize {
        4 * self.users * self.taps
    }

    /// CFO plus channel parameters.
    pub fn frame_params(&self) -> usize {
        self.users + self.channel_params()
    }

    pub fn len(&self) -> usize {
        self.frame_params() + 2 * self.data
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Start of block `branch` (0: Re h_I, 1: Im h_I, 2: Re h_Q, 3: Im h_Q).
    pub fn channel_offset(&self, branch: usize) -> usize {
        self.users + branch * self.users * self.taps
    }
}

/// The point at which the Jacobian is taken, for one symbol.
#[derive(Debug, Clone)]
pub struct SymbolParams<T: Real> {
    pub phi: Vec<T>,
    pub h_source: Vec<CVector<T>>,
    pub h_image: Vec<CVector<T>>,
    /// Per-user data.
    pub data: Vec<CVector<T>>,
}

impl<T: Real> SymbolParams<T> {
    pub fn from_truth(truth: &FrameTruth<T>, symbol: usize) -> Result<Self> {
        let Some(data) = truth.data.get(symbol) else {
            return input_err(format!("symbol {symbol} outside a {}-symbol frame", truth.data.len()));
        };
        Ok(Self {
            phi: truth.users.iter().map(|u| u.phi).collect(),
            h_source: truth.users.iter().map(|u| u.h_source()).collect(),
            h_image: truth.users.iter().map(|u| u.h_image()).collect(),
            data: data.clone(),
        })
    }

    /// Adds `delta` to real coordinate `index` of the parameter vector.
    pub fn perturbed(&self, layout: &FisherLayout, index: usize, delta: T) -> Self {
        let mut p = self.clone();
        let (u_n, taps) = (layout.users, layout.taps);
        if index < u_n {
            p.phi[index] += delta;
            return p;
        }
        let mut i = index - u_n;
        if i < layout.channel_params() {
            let branch = i / (u_n * taps);
            i %= u_n * taps;
            let (u, c) = (i / taps, i % taps);
            let h = if branch < 2 { &mut p.h_source[u] } else { &mut p.h_image[u] };
            h[c] += if branch.is_multiple_of(2) { cx(delta, T::zero()) } else { cx(T::zero(), delta) };
            return p;
        }
        i -= layout.channel_params();
        let imag = i >= layout.data;
        i %= layout.data;
        let per_user = layout.data / u_n;
        let (u, k) = (i / per_user, i % per_user);
        p.data[u][k] += if imag { cx(T::zero(), delta) } else { cx(delta, T::zero()) };
        p
    }

    /// Noise-free received vector.
    pub fn synthesize(&self, link: &LinkModel<T>) -> CVector<T> {
        let c = &link.config;
        let mut y = CVector::zeros(c.obs_dim());
        for u in 0..link.users() {
            let ramp = cfo_ramp(self.phi[u], c.g(), c.k);
            let s = &link.psi[u] * &self.data[u];
            let x = CMatrix::from_fn(s.len(), 1, |n, _| ramp[n] * s[n]);
            let xc = CMatrix::from_fn(s.len(), 1, |n, _| ramp[n] * s[n].conj());
            y += apply_channel(&self.h_source[u], &x, c.channel_taps, c.rx_antennas).column(0);
            y += apply_channel(&self.h_image[u], &xc, c.channel_taps, c.rx_antennas).column(0);
        }
        y
    }
}

/// `∂V_i/∂Θᵀ`, `N_r(G−L+1) × len`.
pub fn jacobian<T: Real>(link: &LinkModel<T>, p: &SymbolParams<T>) -> Result<CMatrix<T>> {
    let layout = FisherLayout::new(link);
    let mut j = jacobian_frame_part(link, p, &layout)?;
    let data = data_jacobian(link, p);
    let cols = j.ncols();
    j = j.resize_horizontally(cols + data.ncols(), Cx::new(T::zero(), T::zero()));
    j.columns_mut(cols, data.ncols()).copy_from(&data);
    Ok(j)
}

/// CFO and channel columns, which depend on the symbol's data.
fn jacobian_frame_part<T: Real>(link: &LinkModel<T>, p: &SymbolParams<T>, layout: &FisherLayout) -> Result<CMatrix<T>> {
    let c = &link.config;
    if p.phi.len() != layout.users || p.data.len() != layout.users {
        return input_err("parameter set does not match the number of users");
    }
    let (g, taps, nr) = (c.g(), c.channel_taps, c.rx_antennas);
    let rows = c.obs_dim();
    let mut j = CMatrix::zeros(rows, layout.frame_params());
    let scale = T::two_pi() / T::count(c.k);
    let ju = cx(T::zero(), T::one());
    for u in 0..layout.users {
        let ramp = cfo_ramp(p.phi[u], g, c.k);
        let s = &link.psi[u] * &p.data[u];
        let x = CMatrix::from_fn(g, 1, |n, _| ramp[n] * s[n]);
        let xc = CMatrix::from_fn(g, 1, |n, _| ramp[n] * s[n].conj());
        let dx = CMatrix::from_fn(g, 1, |n, _| x[n] * cx(T::count(n), T::zero()));
        let dxc = CMatrix::from_fn(g, 1, |n, _| xc[n] * cx(T::count(n), T::zero()));
        let pu = (apply_channel(&p.h_source[u], &dx, taps, nr) + apply_channel(&p.h_image[u], &dxc, taps, nr))
            * cx(scale, T::zero());
        j.column_mut(u).copy_from(&(pu.column(0) * ju));
        for t in 0..layout.taps {
            let mut e = CVector::zeros(c.cir_len());
            e[t] = cx(T::one(), T::zero());
            let q = apply_channel(&e, &x, taps, nr);
            let sv = apply_channel(&e, &xc, taps, nr);
            let col = u * layout.taps + t;
            j.column_mut(layout.channel_offset(0) + col).copy_from(&q.column(0));
            j.column_mut(layout.channel_offset(1) + col).copy_from(&(q.column(0) * ju));
            j.column_mut(layout.channel_offset(2) + col).copy_from(&sv.column(0));
            j.column_mut(layout.channel_offset(3) + col).copy_from(&(sv.column(0) * ju));
        }
    }
    Ok(j)
}

/// `[T, jU]`, independent of the data.
fn data_jacobian<T: Real>(link: &LinkModel<T>, p: &SymbolParams<T>) -> CMatrix<T> {
    let c = &link.config;
    let nu = link.per_user();
    let total = nu * link.users();
    let mut out = CMatrix::zeros(c.obs_dim(), 2 * total);
    let ju = cx(T::zero(), T::one());
    for u in 0..link.users() {
        let ramp = cfo_ramp(p.phi[u], c.g(), c.k);
        let x = apply_cfo(&ramp, &link.psi[u]);
        let xc = apply_cfo(&ramp, &link.psi[u].map(|z| z.conj()));
        let gi = apply_channel(&p.h_source[u], &x, c.channel_taps, c.rx_antennas);
        let gq = apply_channel(&p.h_image[u], &xc, c.channel_taps, c.rx_antennas);
        out.columns_mut(u * nu, nu).copy_from(&(&gi + &gq));
        out.columns_mut(total + u * nu, nu).copy_from(&((gi - gq) * ju));
    }
    out
}

/// `Re(AᴴB)` via real products of the stacked real and imaginary parts.
fn real_gram<T: Real>(a: &CMatrix<T>, b: &CMatrix<T>) -> DMatrix<T> {
    let split = |m: &CMatrix<T>| {
        let r = m.nrows();
        DMatrix::from_fn(2 * r, m.ncols(), |i, k| if i < r { m[(i, k)].re } else { m[(i - r, k)].im })
    };
    split(a).transpose() * split(b)
}

/// `Π_i = (2/σ²) Re(JᴴJ)` for symbol `i`.
pub fn fim_per_symbol<T: Real>(link: &LinkModel<T>, truth: &FrameTruth<T>, symbol: usize, sigma2: T) -> Result<DMatrix<T>> {
    check_sigma(sigma2)?;
    let j = jacobian(link, &SymbolParams::from_truth(truth, symbol)?)?;
    Ok(real_gram(&j, &j) * (T::lit(2.0) / sigma2))
}

/// `Σ_i Π_i`, one Jacobian per symbol.
pub fn fim_sum_literal<T: Real>(link: &LinkModel<T>, truth: &FrameTruth<T>, sigma2: T) -> Result<DMatrix<T>> {
    let n = FisherLayout::new(link).len();
    (0..truth.data.len()).try_fold(DMatrix::zeros(n, n), |acc, i| Ok(acc + fim_per_symbol(link, truth, i, sigma2)?))
}

/// `Σ_i Π_i` using that the data columns do not change across symbols.
pub fn fim_frame<T: Real>(link: &LinkModel<T>, truth: &FrameTruth<T>, sigma2: T) -> Result<DMatrix<T>> {
    check_sigma(sigma2)?;
    let layout = FisherLayout::new(link);
    if truth.data.is_empty() {
        return input_err("frame without symbols");
    }
    let first = SymbolParams::from_truth(truth, 0)?;
    let jd = data_jacobian(link, &first);
    let fp = layout.frame_params();
    let mut pp = DMatrix::zeros(fp, fp);
    let mut jp_sum = CMatrix::zeros(link.config.obs_dim(), fp);
    for i in 0..truth.data.len() {
        let jp = jacobian_frame_part(link, &SymbolParams::from_truth(truth, i)?, &layout)?;
        pp += real_gram(&jp, &jp);
        jp_sum += jp;
    }
    let pd = real_gram(&jp_sum, &jd);
    let dd = real_gram(&jd, &jd) * T::count(truth.data.len());
    let n = layout.len();
    let mut out = DMatrix::zeros(n, n);
    out.view_mut((0, 0), (fp, fp)).copy_from(&pp);
    out.view_mut((0, fp), (fp, n - fp)).copy_from(&pd);
    out.view_mut((fp, 0), (n - fp, fp)).copy_from(&pd.transpose());
    out.view_mut((fp, fp), (n - fp, n - fp)).copy_from(&dd);
    Ok(out * (T::lit(2.0) / sigma2))
}

#[derive(Debug, Clone, PartialEq)]
pub struct CrlbReport {
    /// `(1/U) Σ_u χ(u,u)`.
    pub mean: f64,
    pub per_user: Vec<f64>,
    /// Eigenvalue spread of the summed FIM.
    pub condition: f64,
}

/// Inverse of the summed FIM, CFO entries averaged over users.
pub fn crlb_cfo_report<T: Real>(link: &LinkModel<T>, truth: &FrameTruth<T>, sigma2: T) -> Result<CrlbReport> {
    let fim = fim_frame(link, truth, sigma2)?;
    let users = link.users();
    // Diagonal equilibration before the factorization; the CFO rows are
    // orders of magnitude larger than the data rows.
    let scale: Vec<T> = fim.diagonal().iter().map(|&d| if d > T::zero() { T::one() / d.sqrt() } else { T::one() }).collect();
    let eq = DMatrix::from_fn(fim.nrows(), fim.ncols(), |r, c| fim[(r, c)] * scale[r] * scale[c]);
    let eig = SymmetricEigen::new(eq.clone());
    let (lo, hi) = eig.eigenvalues.iter().fold((T::max_value().unwrap(), T::zero()), |(lo, hi), &v| {
        (if v < lo { v } else { lo }, if v.abs() > hi { v.abs() } else { hi })
    });
    let condition = if lo > T::zero() { (hi / lo).to_f64_lossy() } else { f64::INFINITY };
    let singular = || Error::Singular {
        what: "Fisher information matrix".into(),
        condition,
    };
    if !(lo > hi * T::default_epsilon() * T::count(fim.nrows())) {
        return Err(singular());
    }
    let chol = Cholesky::new(eq).ok_or_else(singular)?;
    let mut per_user = Vec::with_capacity(users);
    for u in 0..users {
        let mut e = DMatrix::zeros(fim.nrows(), 1);
        e[(u, 0)] = T::one();
        let x = chol.solve(&e);
        per_user.push((x[(u, 0)] * scale[u] * scale[u]).to_f64_lossy());
    }
    Ok(CrlbReport {
        mean: per_user.iter().sum::<f64>() / users as f64,
        per_user,
        condition,
    })
}

pub fn crlb_cfo<T: Real>(link: &LinkModel<T>, truth: &FrameTruth<T>, sigma2: T) -> Result<f64> {
    Ok(crlb_cfo_report(link, truth, sigma2)?.mean)
}

fn check_sigma<T: Real>(sigma2: T) -> Result<()> {
    if sigma2 > T::zero() {
        Ok(())
    } else {
        input_err("the CRLB needs a positive noise variance")
    }
}
