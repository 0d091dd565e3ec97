//! Wireless channel generation and slot-to-slot evolution.
//!
//! Downlink, uplink, and inter-user channels are block Rayleigh fading;
//! self-interference channels are Rician with a deterministic line-of-sight
//! phase grid. Successive slots are tied together by a first-order
//! Gauss-Markov recursion whose correlation follows the Jakes model.

use crate::numerics::{bessel_j0, CMat, C64};
use rand::Rng;
use rand_distr::StandardNormal;

/// Static description of the propagation environment.
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelParams {
    /// Base-station antenna count (transmit and receive).
    pub n_b: usize,
    /// Number of single-antenna users.
    pub k: usize,
    /// Linear pathloss (power gain) of the downlink/uplink channels.
    pub l_dl: f64,
    /// Linear pathloss of the user-to-user interference channels.
    pub l_in: f64,
    /// Linear pathloss of the base-station self-interference channel.
    pub l_bb: f64,
    /// Linear pathloss of each user's self-interference channel.
    pub l_kk: f64,
    /// Rician K-factor (linear) of the self-interference channels.
    pub kappa: f64,
    /// Doppler frequency in Hz.
    pub f_d: f64,
    /// Slot duration in seconds.
    pub t_c: f64,
}

/// One realization of every channel in the network.
///
/// Shapes: `h` is `K x N_b` (downlink; the uplink is its transpose by
/// reciprocity), `h_bb` is `N_b x N_b`, `h_kk` is `K x K` diagonal, `h_in`
/// is `K x K` with a zero diagonal.
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelSet {
    pub h: CMat,
    pub h_bb: CMat,
    pub h_kk: CMat,
    pub h_in: CMat,
}

/// Draws a zero-mean circularly symmetric complex Gaussian matrix with the
/// given per-entry variance, sampling Re then Im in row-major order.
pub fn cgauss<R: Rng>(rng: &mut R, rows: usize, cols: usize, var: f64) -> CMat {
    let s = (var / 2.0).sqrt();
    let mut m = CMat::zeros(rows, cols);
    for r in 0..rows {
        for c in 0..cols {
            let re: f64 = rng.sample(StandardNormal);
            let im: f64 = rng.sample(StandardNormal);
            m[(r, c)] = C64::new(s * re, s * im);
        }
    }
    m
}

/// Rician fading matrix with pathloss `l` and K-factor `kappa`.
///
/// The line-of-sight component uses the deterministic phase grid
/// `theta(m, n) = pi (m + n) / max(rows, cols)`, so neighbouring antenna
/// pairs see smoothly rotating phases and the LOS matrix is rank one up to
/// the grid curvature.
pub fn draw_rician<R: Rng>(rng: &mut R, rows: usize, cols: usize, l: f64, kappa: f64) -> CMat {
    let denom = rows.max(cols) as f64;
    let los_w = (kappa / (kappa + 1.0)).sqrt();
    let scat_w = (1.0 / (kappa + 1.0)).sqrt();
    let scat = cgauss(rng, rows, cols, 1.0);
    let mut m = CMat::zeros(rows, cols);
    for r in 0..rows {
        for c in 0..cols {
            let theta = std::f64::consts::PI * ((r + c) as f64) / denom;
            let los = C64::new(theta.cos(), theta.sin());
            m[(r, c)] = C64::new(l.sqrt(), 0.0) * (los * los_w + scat[(r, c)] * scat_w);
        }
    }
    m
}

/// Draws the initial slot's channels.
///
/// Ordering of the draws is part of the deterministic contract: downlink,
/// then BS self-interference, then user self-interference, then inter-user.
pub fn draw_initial<R: Rng>(rng: &mut R, p: &ChannelParams) -> ChannelSet {
    let h = cgauss(rng, p.k, p.n_b, p.l_dl);
    let h_bb = draw_rician(rng, p.n_b, p.n_b, p.l_bb, p.kappa);
    let kk_full = draw_rician(rng, p.k, p.k, p.l_kk, p.kappa);
    let mut h_kk = CMat::zeros(p.k, p.k);
    for i in 0..p.k {
        h_kk[(i, i)] = kk_full[(i, i)];
    }
    let mut h_in = cgauss(rng, p.k, p.k, p.l_in);
    for i in 0..p.k {
        h_in[(i, i)] = C64::new(0.0, 0.0);
    }
    ChannelSet { h, h_bb, h_kk, h_in }
}

/// Slot-to-slot correlation under the Jakes model: `J0(2 pi f_d T_c)`.
pub fn jakes_rho(f_d: f64, t_c: f64) -> f64 {
    bessel_j0(2.0 * std::f64::consts::PI * f_d * t_c)
}

/// Advances the fading channels one slot with correlation `rho`.
///
/// The downlink and inter-user channels evolve by the Gauss-Markov
/// recursion `H' = rho H + sqrt(1 - rho^2) E`; the self-interference
/// channels are quasi-static and stay frozen.
pub fn evolve<R: Rng>(rng: &mut R, prev: &ChannelSet, rho: f64, p: &ChannelParams) -> ChannelSet {
    let mix = (1.0 - rho * rho).max(0.0).sqrt();
    let e_h = cgauss(rng, p.k, p.n_b, p.l_dl);
    let h = prev.h.map(|c| c * rho) + e_h.map(|c| c * mix);
    let e_in = cgauss(rng, p.k, p.k, p.l_in);
    let mut h_in = prev.h_in.map(|c| c * rho) + e_in.map(|c| c * mix);
    for i in 0..p.k {
        h_in[(i, i)] = C64::new(0.0, 0.0);
    }
    ChannelSet {
        h,
        h_bb: prev.h_bb.clone(),
        h_kk: prev.h_kk.clone(),
        h_in,
    }
}
