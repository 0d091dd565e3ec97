//! Uplink pilot reception and MMSE downlink channel estimation.
//!
//! Users transmit orthogonal pilot rows continuously; the BS correlates the
//! received block against the pilots and scales by the MMSE gain. Channel
//! aging between the training slot and the data slot enters through the
//! Jakes correlation `rho`, and whatever self-interference survives
//! cancellation raises the effective estimation noise floor.

use crate::channel::cgauss;
use crate::numerics::{fro_norm_sq, CMat, C64};
use crate::{Error, Result};
use rand::Rng;

/// Orthogonal pilot block transmitted by the `K` users over `T` symbols.
#[derive(Debug, Clone, PartialEq)]
pub struct TrainingBlock {
    /// `K x T` pilot matrix with `S S^H = T P_k I`.
    pub s_k: CMat,
    /// Per-user pilot power in mW.
    pub p_k: f64,
}

/// Output of one estimation pass.
#[derive(Debug, Clone, PartialEq)]
pub struct EstimateReport {
    /// Normalized downlink channel estimate, `K x N_b`, per-entry variance
    /// equal to the true channel's.
    pub h_hat: CMat,
    /// Normalized estimation MSE in `[0, 1]`.
    pub tau_dl_sq: f64,
    /// Residual self-interference power used by the estimator.
    pub sigma_r_sq: f64,
    /// Slot-to-slot correlation assumed by the estimator.
    pub rho: f64,
}

/// Builds the pilot block: `K` rows of a `T`-point DFT scaled to power `p_k`.
pub fn make_training(k: usize, t: usize, p_k: f64) -> Result<TrainingBlock> {
    if t < k {
        return Err(Error::PilotTooShort { symbols: t, users: k });
    }
    let amp = p_k.sqrt();
    let mut s = CMat::zeros(k, t);
    for u in 0..k {
        for n in 0..t {
            let ph = -2.0 * std::f64::consts::PI * (u as f64) * (n as f64) / (t as f64);
            s[(u, n)] = C64::new(amp * ph.cos(), amp * ph.sin());
        }
    }
    Ok(TrainingBlock { s_k: s, p_k })
}

/// Normalized MSE of the downlink estimate.
///
/// `tau^2 = (sigma_b^2 + sigma_r^2 + (1-rho^2) P_rx) /
///          (sigma_b^2 + sigma_r^2 + (1-rho^2) P_rx + rho^2 T P_rx)`,
/// with `P_rx` the per-user received pilot power in mW.
pub fn compute_mse(rho: f64, sigma_b_sq: f64, sigma_r_sq: f64, p_rx: f64, t: f64) -> Result<f64> {
    let num = sigma_b_sq + sigma_r_sq + (1.0 - rho * rho) * p_rx;
    let den = num + rho * rho * t * p_rx;
    if den == 0.0 {
        return Err(Error::DegenerateConfiguration(
            "all signal and noise powers are zero".into(),
        ));
    }
    Ok(num / den)
}

/// Residual self-interference power per RX chain,
/// `sigma_r^2 = P_b ||residual_si V_prev||_F^2 / N_b`.
pub fn residual_si_power(residual_si: &CMat, v_prev: &CMat, p_b: f64, n_b: usize) -> f64 {
    p_b * fro_norm_sq(&(residual_si * v_prev)) / n_b as f64
}

/// Synthesizes the pilot block received at the BS during the training slot.
///
/// The pilots arrive through the aged channel: a coherent part
/// `rho H^T S_K` plus a white aging term at per-entry power
/// `(1-rho^2) * p_chip * l_k` (where `p_chip` is the mean pilot chip power),
/// on top of residual self-interference from the previous slot's downlink
/// transmission and thermal noise.
#[allow(clippy::too_many_arguments)]
pub fn receive_training<R: Rng>(
    rng: &mut R,
    h_next: &CMat,
    rho: f64,
    residual_si: &CMat,
    v_prev: Option<&CMat>,
    training: &TrainingBlock,
    p_b: f64,
    l_k: f64,
    sigma_b_sq: f64,
) -> CMat {
    let n_b = residual_si.nrows();
    let t = training.s_k.ncols();
    let k = training.s_k.nrows();
    let mut y = (h_next.transpose() * &training.s_k).map(|c| c * rho);
    let p_chip = fro_norm_sq(&training.s_k) / (k * t) as f64;
    let age_var = (1.0 - rho * rho) * p_chip * l_k;
    if age_var > 0.0 {
        y += cgauss(rng, n_b, t, age_var);
    }
    if let Some(v) = v_prev {
        if fro_norm_sq(residual_si) > 0.0 {
            let s_b = cgauss(rng, v.ncols(), t, 1.0);
            y += (residual_si * v * s_b).map(|c| c * p_b.sqrt());
        }
    }
    if sigma_b_sq > 0.0 {
        y += cgauss(rng, n_b, t, sigma_b_sq);
    }
    y
}

/// MMSE estimate of the uplink channel (`N_b x K`) from the received block.
///
/// `H_hat_ul = rho l_k Y S^H / (sigma_b^2 + sigma_r^2 + (1-rho^2) P_rx +
/// rho^2 T P_rx)` with `P_rx = p_k l_k`; the downlink estimate is its
/// transpose.
pub fn mmse_estimate(
    y: &CMat,
    training: &TrainingBlock,
    rho: f64,
    sigma_b_sq: f64,
    sigma_r_sq: f64,
    l_k: f64,
) -> Result<CMat> {
    let t = training.s_k.ncols() as f64;
    let p_rx = training.p_k * l_k;
    let den = sigma_b_sq + sigma_r_sq + (1.0 - rho * rho) * p_rx + rho * rho * t * p_rx;
    if den == 0.0 {
        return Err(Error::DegenerateConfiguration(
            "estimator denominator is zero".into(),
        ));
    }
    let gain = rho * l_k / den;
    Ok((y * training.s_k.adjoint()).map(|c| c * gain))
}

/// Rescales the raw MMSE estimate so its per-entry variance matches the true
/// channel's (`h_hat = h_mmse / sqrt(1 - tau^2)`); collapses to zero when
/// estimation is unavailable (`tau^2 -> 1`).
pub fn gm_normalize(h_mmse: &CMat, tau_sq: f64) -> CMat {
    if tau_sq >= 1.0 - 1e-15 {
        return CMat::zeros(h_mmse.nrows(), h_mmse.ncols());
    }
    let s = 1.0 / (1.0 - tau_sq).sqrt();
    h_mmse.map(|c| c * s)
}

/// Draws an estimate consistent with the error model for schemes whose
/// training is not simulated symbol by symbol:
/// `h_hat = sqrt(1 - tau^2) h + tau e`, `e ~ CN(0, l_k)` per entry.
pub fn synthesize_estimate<R: Rng>(rng: &mut R, h: &CMat, tau_sq: f64, l_k: f64) -> CMat {
    let e = cgauss(rng, h.nrows(), h.ncols(), l_k);
    h.map(|c| c * (1.0 - tau_sq).max(0.0).sqrt()) + e.map(|c| c * tau_sq.max(0.0).sqrt())
}
