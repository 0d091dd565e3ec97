//! Per-slot execution of each transmission scheme and evaluation of the
//! achievable downlink rate.
//!
//! Four schemes share a common rate functional. The simultaneous scheme
//! estimates from live uplink pilots received under residual
//! self-interference; the baselines synthesize estimates of the documented
//! quality directly from the error model. All schemes are scored with the
//! same interference bookkeeping (inter-user term included) so that rate
//! differences isolate protocol structure, not covariance conventions.

use crate::cancellation::CancellerState;
use crate::channel::{cgauss, jakes_rho, ChannelParams, ChannelSet};
use crate::estimation::{
    compute_mse, make_training, mmse_estimate, receive_training, residual_si_power,
    synthesize_estimate,
};
use crate::estimation::gm_normalize;
use crate::numerics::{hermitianize, log_det_hermitian, scaled_eye, CMat, C64};
use crate::precoder::{self, precoder_power};
use crate::{Error, Result};
use rand::Rng;

/// Transmission scheme selector.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Scheme {
    /// Simultaneous downlink data and uplink pilots every slot; the slot-`i`
    /// precoder is built from slot-`(i-1)` pilots.
    Scdc,
    /// Sequential beamforming: TDMA uplink training under perfect
    /// self-interference cancellation while the downlink already serves
    /// trained users.
    Sbfd,
    /// Half duplex: a training fraction of each slot buys same-slot CSI, the
    /// remainder carries data.
    Hd,
    /// Genie bound: perfect CSI and full cancellation.
    Ideal,
}

impl Scheme {
    pub fn label(&self) -> &'static str {
        match self {
            Scheme::Scdc => "scdc",
            Scheme::Sbfd => "sbfd",
            Scheme::Hd => "hd",
            Scheme::Ideal => "ideal",
        }
    }
}

impl std::fmt::Display for Scheme {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.label())
    }
}

/// Operating point shared by the per-slot runners.
#[derive(Debug, Clone, PartialEq)]
pub struct SchemeParams {
    /// Fraction of each slot spent on training by the baseline schemes.
    pub training_fraction: f64,
    /// BS transmit power, mW.
    pub p_b: f64,
    /// Per-user transmit power, mW.
    pub p_k: f64,
    /// BS receiver noise power, mW.
    pub sigma_b_sq: f64,
    /// User receiver noise power, mW.
    pub sigma_k_sq: f64,
    /// Saturation threshold per BS receive chain, mW.
    pub lambda_b: f64,
    /// Saturation threshold per user receiver, mW.
    pub lambda_k: f64,
    /// Analog canceller tap budget.
    pub n_taps: usize,
    /// Symbols per slot.
    pub t: usize,
    /// Downlink streams to serve; 0 means `min(K, N_b)`.
    pub m_b: usize,
    /// Normalized error of the self-interference CSI (0 = perfect).
    pub si_csi_error: f64,
    /// Tap hardware resolution; `None` models continuous taps.
    pub quantizer: Option<crate::cancellation::QuantizerSpec>,
    /// Analog tap placement policy.
    pub tap_placement: crate::cancellation::TapPlacement,
}

impl SchemeParams {
    /// Number of streams the precoder should try to serve.
    pub fn streams(&self, k: usize, n_b: usize) -> usize {
        if self.m_b == 0 {
            k.min(n_b)
        } else {
            self.m_b
        }
    }
}

/// Result of one simulated slot.
#[derive(Debug, Clone, PartialEq)]
pub struct SlotOutcome {
    /// Achievable downlink sum rate, bits per channel use.
    pub rate_bits_per_use: f64,
    /// Normalized MSE of the downlink CSI that produced the precoder.
    pub tau_dl_sq: f64,
    /// Whether a precoder satisfying the saturation constraints existed.
    pub feasible: bool,
    pub scheme: Scheme,
}

impl SlotOutcome {
    fn infeasible(tau_dl_sq: f64, scheme: Scheme) -> Self {
        SlotOutcome {
            rate_bits_per_use: 0.0,
            tau_dl_sq,
            feasible: false,
            scheme,
        }
    }
}

/// Interference-plus-noise covariance seen by the users (`K x K`).
///
/// `Sigma = sigma_K^2 I + resid R_s resid^H + H_IN R_s H_IN^H
///        + tau^2 P_b l_K tr(V V^H) I`
/// with `R_s = s_cov_scale I` the ensemble covariance of the users' uplink
/// symbols and `resid` the post-cancellation user-side self-interference
/// coupling (diagonal).
pub fn interference_covariance(
    residual_ue_si: &CMat,
    h_in: &CMat,
    s_cov_scale: f64,
    tau_dl_sq: f64,
    p_b: f64,
    l_k: f64,
    v_b: &CMat,
    sigma_k_sq: f64,
) -> CMat {
    let k = h_in.nrows();
    let leak = tau_dl_sq * p_b * l_k * precoder_power(v_b);
    let mut sigma = scaled_eye(k, sigma_k_sq + leak);
    sigma += (residual_ue_si * residual_ue_si.adjoint()).map(|c| c * s_cov_scale);
    sigma += (h_in * h_in.adjoint()).map(|c| c * s_cov_scale);
    sigma
}

/// Achievable downlink sum rate in bits per channel use:
/// `log2 det(I + (1 - tau^2) P_b H V V^H H^H Sigma^{-1})`, evaluated as a
/// log-determinant difference of symmetrized forms and clamped at zero.
pub fn downlink_rate(
    h_hat: &CMat,
    v_b: &CMat,
    tau_dl_sq: f64,
    p_b: f64,
    sigma_k: &CMat,
) -> Result<f64> {
    if tau_dl_sq >= 1.0 {
        return Ok(0.0);
    }
    let hv = h_hat * v_b;
    let scale = (1.0 - tau_dl_sq) * p_b;
    let a = (&hv * hv.adjoint()).map(|c| c * scale);
    let ld_noise = log_det_hermitian(&hermitianize(sigma_k))?;
    let ld_total = log_det_hermitian(&hermitianize(&(sigma_k + a)))?;
    Ok((ld_total - ld_noise).max(0.0))
}

/// Rate over the served user subset: selects the matching rows of the
/// channel estimate and the principal submatrix of the covariance.
fn rate_over_served(
    h_hat: &CMat,
    v_b: &CMat,
    served: &[usize],
    tau_dl_sq: f64,
    p_b: f64,
    sigma_full: &CMat,
) -> Result<f64> {
    if served.is_empty() {
        return Ok(0.0);
    }
    let h_s = h_hat.select_rows(served.iter());
    let sigma_s = sigma_full.select_rows(served.iter()).select_columns(served.iter());
    downlink_rate(&h_s, v_b, tau_dl_sq, p_b, &sigma_s)
}

/// Self-interference CSI available to the canceller designer.
///
/// With `tau_si = 0` the true channels are returned; otherwise estimates are
/// synthesized from the Gauss-Markov posterior (BS matrix first, then the
/// user couplings, preserving the diagonal structure).
pub fn synthesize_si_estimates<R: Rng>(
    rng: &mut R,
    chan: &ChannelSet,
    tau_si: f64,
    p: &ChannelParams,
) -> (CMat, CMat) {
    if tau_si == 0.0 {
        return (chan.h_bb.clone(), chan.h_kk.clone());
    }
    let tau_sq = tau_si * tau_si;
    let h_bb_hat = synthesize_estimate(rng, &chan.h_bb, tau_sq, p.l_bb);
    let full = synthesize_estimate(rng, &chan.h_kk, tau_sq, p.l_kk);
    let k = chan.h_kk.nrows();
    let h_kk_hat = CMat::from_fn(k, k, |i, j| {
        if i == j {
            full[(i, i)]
        } else {
            C64::new(0.0, 0.0)
        }
    });
    (h_bb_hat, h_kk_hat)
}

/// Designs the slot-(i-1) precoder/canceller pair on an independent channel
/// draw so that `run_scdc_trial` starts from a realistic previous slot.
///
/// Returns the applied canceller state and, when the warm-up design was
/// feasible, the precoder that was live while slot-`i` pilots arrived.
pub fn scdc_warmup<R: Rng>(
    params: &SchemeParams,
    chan_p: &ChannelParams,
    h_bb_hat: &CMat,
    h_kk_hat: &CMat,
    rng: &mut R,
) -> Result<(CancellerState, Option<CMat>)> {
    let rho = jakes_rho(chan_p.f_d, chan_p.t_c);
    let p_rx = params.p_k * chan_p.l_dl;
    let tau0 = compute_mse(rho, params.sigma_b_sq, 0.0, p_rx, params.t as f64)?;
    let h_true = cgauss(rng, chan_p.k, chan_p.n_b, chan_p.l_dl);
    let h_hat = synthesize_estimate(rng, &h_true, tau0, chan_p.l_dl);
    let (design, canceller) = precoder::design(
        &h_hat,
        h_bb_hat,
        h_kk_hat,
        params.n_taps,
        params.p_b,
        params.p_k,
        params.lambda_b,
        params.lambda_k,
        params.streams(chan_p.k, chan_p.n_b),
        params.quantizer.as_ref(),
        params.tap_placement,
    )?;
    let v_prev = if design.feasible { Some(design.v_b) } else { None };
    Ok((canceller, v_prev))
}

/// One slot of the simultaneous scheme.
///
/// Slot-(i-1) pilots are received under the previous precoder's residual
/// self-interference, MMSE-estimated into slot-`i` downlink CSI, and fed to
/// the joint precoder/canceller design; the rate is then evaluated on the
/// slot-`i` channels. The full slot carries data (no training overhead).
///
/// The canceller state doubles as the carrier of the self-interference
/// estimates: analog plus digital taps reproduce `-H_hat` exactly, so the
/// design step recovers them without a separate CSI argument.
#[allow(clippy::too_many_arguments)]
pub fn run_scdc_trial<R: Rng>(
    params: &SchemeParams,
    chan_p: &ChannelParams,
    prev: &ChannelSet,
    next: &ChannelSet,
    canceller_prev: &CancellerState,
    v_prev: Option<&CMat>,
    rng: &mut R,
) -> Result<SlotOutcome> {
    let k = chan_p.k;
    let rho = jakes_rho(chan_p.f_d, chan_p.t_c);
    let p_rx = params.p_k * chan_p.l_dl;

    // Digital-domain residual while the previous precoder was live.
    let resid_prev = &prev.h_bb + &canceller_prev.c_b + &canceller_prev.d_b;
    let sigma_r_sq = match v_prev {
        Some(v) => residual_si_power(&resid_prev, v, params.p_b, chan_p.n_b),
        None => 0.0,
    };

    let training = make_training(k, params.t, params.p_k)?;
    let y = receive_training(
        rng,
        &next.h,
        rho,
        &resid_prev,
        v_prev,
        &training,
        params.p_b,
        chan_p.l_dl,
        params.sigma_b_sq,
    );
    let tau_sq = compute_mse(rho, params.sigma_b_sq, sigma_r_sq, p_rx, params.t as f64)?;
    let h_ul = mmse_estimate(&y, &training, rho, params.sigma_b_sq, sigma_r_sq, chan_p.l_dl)?;
    let h_hat = gm_normalize(&h_ul.transpose(), tau_sq);

    // Self-interference estimates encoded in the applied taps.
    let h_bb_hat = -(&canceller_prev.c_b + &canceller_prev.d_b);
    let h_kk_hat = CMat::from_fn(k, k, |i, j| {
        if i == j {
            -(canceller_prev.c_k[i] + canceller_prev.d_k[i])
        } else {
            C64::new(0.0, 0.0)
        }
    });

    let (design, canceller) = precoder::design(
        &h_hat,
        &h_bb_hat,
        &h_kk_hat,
        params.n_taps,
        params.p_b,
        params.p_k,
        params.lambda_b,
        params.lambda_k,
        params.streams(k, chan_p.n_b),
        params.quantizer.as_ref(),
        params.tap_placement,
    )?;
    if !design.feasible {
        return Ok(SlotOutcome::infeasible(tau_sq, Scheme::Scdc));
    }

    // Post-cancellation user-side couplings for the data slot.
    let resid_ue = CMat::from_fn(k, k, |i, j| {
        if i == j {
            next.h_kk[(i, i)] + canceller.c_k[i] + canceller.d_k[i]
        } else {
            C64::new(0.0, 0.0)
        }
    });
    let sigma = interference_covariance(
        &resid_ue,
        &next.h_in,
        params.p_k,
        tau_sq,
        params.p_b,
        chan_p.l_dl,
        &design.v_b,
        params.sigma_k_sq,
    );
    let rate = rate_over_served(&h_hat, &design.v_b, &design.served, tau_sq, params.p_b, &sigma)?;
    Ok(SlotOutcome {
        rate_bits_per_use: rate,
        tau_dl_sq: tau_sq,
        feasible: true,
        scheme: Scheme::Scdc,
    })
}

/// One slot of the half-duplex baseline.
///
/// Same-slot training (`rho = 1`, no self-interference) over
/// `round(training_fraction * T)` symbols; the remaining slot fraction
/// carries zero-forced data.
pub fn run_hd_trial<R: Rng>(
    params: &SchemeParams,
    chan_p: &ChannelParams,
    next: &ChannelSet,
    rng: &mut R,
) -> Result<SlotOutcome> {
    let t_tr = (params.training_fraction * params.t as f64).round();
    let p_rx = params.p_k * chan_p.l_dl;
    let tau_sq = compute_mse(1.0, params.sigma_b_sq, 0.0, p_rx, t_tr)?;
    let h_hat = synthesize_estimate(rng, &next.h, tau_sq, chan_p.l_dl);
    let m = params.streams(chan_p.k, chan_p.n_b);
    let (v, served) = match precoder::zf_design(&h_hat, m) {
        Ok(x) => x,
        Err(Error::IllConditioned { .. }) => {
            return Ok(SlotOutcome::infeasible(tau_sq, Scheme::Hd))
        }
        Err(e) => return Err(e),
    };
    let zero_ue = CMat::zeros(chan_p.k, chan_p.k);
    let sigma = interference_covariance(
        &zero_ue,
        &next.h_in,
        params.p_k,
        tau_sq,
        params.p_b,
        chan_p.l_dl,
        &v,
        params.sigma_k_sq,
    );
    let r = rate_over_served(&h_hat, &v, &served, tau_sq, params.p_b, &sigma)?;
    Ok(SlotOutcome {
        rate_bits_per_use: (1.0 - params.training_fraction) * r,
        tau_dl_sq: tau_sq,
        feasible: true,
        scheme: Scheme::Hd,
    })
}

/// One slot of the sequential-beamforming baseline.
///
/// Users train one at a time (`training_fraction * T / K` symbols each)
/// under perfect self-interference cancellation, while the BS keeps
/// transmitting to users whose training already finished. The slot rate is
/// the two-phase mixture `tf * R_delayed + (1 - tf) * R_fresh`: during the
/// training window the live precoder still rests on estimates that are one
/// training window old, afterwards everyone is freshly trained. The fresh
/// draw is taken before the delayed one.
pub fn run_sbfd_trial<R: Rng>(
    params: &SchemeParams,
    chan_p: &ChannelParams,
    next: &ChannelSet,
    rng: &mut R,
) -> Result<SlotOutcome> {
    let (r_f, r_d, tau_f, _) = sbfd_phase_rates(params, chan_p, next, rng)?;
    let tf = params.training_fraction;
    match (r_f, r_d) {
        (Some(rf), Some(rd)) => Ok(SlotOutcome {
            rate_bits_per_use: tf * rd + (1.0 - tf) * rf,
            tau_dl_sq: tau_f,
            feasible: true,
            scheme: Scheme::Sbfd,
        }),
        _ => Ok(SlotOutcome::infeasible(tau_f, Scheme::Sbfd)),
    }
}

/// The two phase rates behind [`run_sbfd_trial`]:
/// `(fresh, delayed, tau_fresh_sq, tau_delayed_sq)`, `None` marking an
/// ill-conditioned zero-forcing system. At `f_d = 0` the delayed phase
/// reuses the fresh estimate, so the two rates coincide exactly.
pub fn sbfd_phase_rates<R: Rng>(
    params: &SchemeParams,
    chan_p: &ChannelParams,
    next: &ChannelSet,
    rng: &mut R,
) -> Result<(Option<f64>, Option<f64>, f64, f64)> {
    let tf = params.training_fraction;
    let t_tr = tf * params.t as f64 / chan_p.k as f64;
    let p_rx = params.p_k * chan_p.l_dl;
    let tau_f = compute_mse(1.0, params.sigma_b_sq, 0.0, p_rx, t_tr)?;
    let rho_d = jakes_rho(chan_p.f_d, tf * chan_p.t_c);
    let tau_d = compute_mse(rho_d, params.sigma_b_sq, 0.0, p_rx, t_tr)?;
    let h_f = synthesize_estimate(rng, &next.h, tau_f, chan_p.l_dl);
    let h_d = if tau_d == tau_f {
        h_f.clone()
    } else {
        synthesize_estimate(rng, &next.h, tau_d, chan_p.l_dl)
    };
    let m = params.streams(chan_p.k, chan_p.n_b);
    let zero_ue = CMat::zeros(chan_p.k, chan_p.k);

    let phase = |h_hat: &CMat, tau_sq: f64| -> Result<Option<f64>> {
        let (v, served) = match precoder::zf_design(h_hat, m) {
            Ok(x) => x,
            Err(Error::IllConditioned { .. }) => return Ok(None),
            Err(e) => return Err(e),
        };
        let sigma = interference_covariance(
            &zero_ue,
            &next.h_in,
            params.p_k,
            tau_sq,
            params.p_b,
            chan_p.l_dl,
            &v,
            params.sigma_k_sq,
        );
        rate_over_served(h_hat, &v, &served, tau_sq, params.p_b, &sigma).map(Some)
    };

    let r_f = phase(&h_f, tau_f)?;
    let r_d = phase(&h_d, tau_d)?;
    Ok((r_f, r_d, tau_f, tau_d))
}

/// One slot of the genie-aided bound: perfect CSI, perfect cancellation,
/// full-slot data. Inter-user interference stays, because the users keep
/// transmitting pilots under the simultaneous protocol this bound idealizes.
pub fn run_ideal_trial(
    params: &SchemeParams,
    chan_p: &ChannelParams,
    next: &ChannelSet,
) -> Result<SlotOutcome> {
    let m = params.streams(chan_p.k, chan_p.n_b);
    let (v, served) = match precoder::zf_design(&next.h, m) {
        Ok(x) => x,
        Err(Error::IllConditioned { .. }) => {
            return Ok(SlotOutcome::infeasible(0.0, Scheme::Ideal))
        }
        Err(e) => return Err(e),
    };
    let zero_ue = CMat::zeros(chan_p.k, chan_p.k);
    let sigma = interference_covariance(
        &zero_ue,
        &next.h_in,
        params.p_k,
        0.0,
        params.p_b,
        chan_p.l_dl,
        &v,
        params.sigma_k_sq,
    );
    let rate = rate_over_served(&next.h, &v, &served, 0.0, params.p_b, &sigma)?;
    Ok(SlotOutcome {
        rate_bits_per_use: rate,
        tau_dl_sq: 0.0,
        feasible: true,
        scheme: Scheme::Ideal,
    })
}
