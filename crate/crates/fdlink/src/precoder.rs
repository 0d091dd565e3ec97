//! Joint downlink precoder and canceller design under saturation limits.
//!
//! The design walks the right-singular subspace of the residual
//! self-interference channel from the full space down: at each subspace
//! dimension `alpha` it zero-forces the strongest users inside the subspace
//! and accepts the first precoder whose residual keeps every BS RX chain and
//! every user RX below its saturation threshold. If even a single stream in
//! the weakest residual direction saturates, the slot is infeasible.

use crate::cancellation::{
    build_analog_canceller, build_digital_canceller_bs, build_ue_cancellers,
    per_chain_residual_powers, CancellerState, QuantizerSpec, TapPlacement,
};
use crate::numerics::{hermitian_solve, scaled_eye, svd_right, CMat};
use crate::{Error, Result};

/// Outcome of the joint design.
#[derive(Debug, Clone, PartialEq)]
pub struct PrecoderDesign {
    /// Unit-Frobenius-norm precoder, `N_b x streams`; zero when infeasible.
    pub v_b: CMat,
    /// Dimension of the retained singular subspace (0 when infeasible).
    pub alpha: usize,
    /// Row ordering applied by the sort step: output row -> input user index.
    pub permutation: Vec<usize>,
    /// Users actually carrying a stream, in sort order.
    pub served: Vec<usize>,
    /// Whether the saturation constraints could be met at all.
    pub feasible: bool,
}

/// Zero-forcing precoder with deterministic power normalization.
///
/// `G = beta Z^H (Z Z^H)^{-1}` with `beta = 1/sqrt(tr((Z Z^H)^{-1}))`, so
/// `Z G = beta I` and `tr(G G^H) = 1`.
pub fn zf_precoder(z: &CMat) -> Result<(CMat, f64)> {
    let zz = z * z.adjoint();
    let inv = hermitian_solve(&zz, &scaled_eye(zz.nrows(), 1.0))?;
    let tr: f64 = (0..inv.nrows()).map(|i| inv[(i, i)].re).sum();
    if !(tr > 0.0) || !tr.is_finite() {
        return Err(Error::IllConditioned { cond: f64::INFINITY });
    }
    let beta = 1.0 / tr.sqrt();
    let g = (z.adjoint() * inv).map(|c| c * beta);
    Ok((g, beta))
}

/// Reorders rows by nonincreasing Euclidean norm; ties keep original order.
/// Returns the sorted matrix and the output-row -> input-row map.
pub fn sort_rows_desc(m: &CMat) -> (CMat, Vec<usize>) {
    let mut perm: Vec<usize> = (0..m.nrows()).collect();
    perm.sort_by(|&a, &b| {
        m.row(b)
            .norm()
            .partial_cmp(&m.row(a).norm())
            .unwrap()
            .then(a.cmp(&b))
    });
    let sorted = CMat::from_rows(&perm.iter().map(|&i| m.row(i)).collect::<Vec<_>>());
    (sorted, perm)
}

/// Inputs that stay fixed across the subspace search.
#[allow(clippy::too_many_arguments)]
pub fn design(
    h_hat: &CMat,
    h_bb_hat: &CMat,
    h_kk_hat: &CMat,
    n_taps: usize,
    p_b: f64,
    p_k: f64,
    lambda_b: f64,
    lambda_k: f64,
    m_b: usize,
    quantizer: Option<&QuantizerSpec>,
    placement: TapPlacement,
) -> Result<(PrecoderDesign, CancellerState)> {
    let n_b = h_bb_hat.nrows();
    let k = h_hat.nrows();
    if m_b == 0 || m_b > k.min(n_b) {
        return Err(Error::Config(format!(
            "stream count {m_b} outside 1..=min(K={k}, N_b={n_b})"
        )));
    }

    let (c_b, taps) = build_analog_canceller(h_bb_hat, n_taps, quantizer, placement);
    let residual = h_bb_hat + &c_b;
    let q_b = svd_right(&residual).v;
    let (c_k, d_k) = build_ue_cancellers(h_kk_hat, quantizer);
    let ue_ok = (0..k).all(|i| p_k * (h_kk_hat[(i, i)] + c_k[i]).norm_sqr() <= lambda_k);
    let d_b = build_digital_canceller_bs(h_bb_hat, &c_b);
    let canceller = CancellerState { c_b, d_b, c_k, d_k, taps };

    let chains_ok = |v: &CMat| {
        per_chain_residual_powers(&residual, v, p_b)
            .iter()
            .all(|&p| p <= lambda_b)
    };

    for alpha in (2..=n_b).rev() {
        // The subspace cannot zero-force more streams than it has dimensions;
        // below m_b streams, serve the strongest alpha users the sort ranks.
        let streams = m_b.min(alpha);
        let f = q_b.columns(n_b - alpha, alpha).into_owned();
        let w = h_hat * &f;
        let (w_sorted, perm) = sort_rows_desc(&w);
        let z = w_sorted.rows(0, streams).into_owned();
        let (g, _beta) = match zf_precoder(&z) {
            Ok(x) => x,
            Err(Error::IllConditioned { .. }) => continue,
            Err(e) => return Err(e),
        };
        let v = &f * &g;
        if ue_ok && chains_ok(&v) {
            return Ok((
                PrecoderDesign {
                    v_b: v,
                    alpha,
                    served: perm[..streams].to_vec(),
                    permutation: perm,
                    feasible: true,
                },
                canceller,
            ));
        }
    }

    // Single-stream fallback along the weakest residual direction.
    let v = q_b.column(n_b - 1).into_owned();
    let v = CMat::from_columns(&[v.column(0)]);
    if ue_ok && chains_ok(&v) {
        let (_, perm) = sort_rows_desc(&(h_hat * &v));
        return Ok((
            PrecoderDesign {
                v_b: v,
                alpha: 1,
                served: perm[..1].to_vec(),
                permutation: perm,
                feasible: true,
            },
            canceller,
        ));
    }

    Ok((
        PrecoderDesign {
            v_b: CMat::zeros(n_b, 1),
            alpha: 0,
            permutation: Vec::new(),
            served: Vec::new(),
            feasible: false,
        },
        canceller,
    ))
}

/// Unconstrained zero-forcing design used by the baseline schemes: serve the
/// `m_b` strongest users of `h_hat` with a full-space ZF precoder.
pub fn zf_design(h_hat: &CMat, m_b: usize) -> Result<(CMat, Vec<usize>)> {
    let (sorted, perm) = sort_rows_desc(h_hat);
    let z = sorted.rows(0, m_b).into_owned();
    let (g, _beta) = zf_precoder(&z)?;
    Ok((g, perm[..m_b].to_vec()))
}

/// Complex matrix trace (real part).
pub fn trace_re(m: &CMat) -> f64 {
    (0..m.nrows().min(m.ncols())).map(|i| m[(i, i)].re).sum()
}

/// Total transmit weight of a precoder, `tr(V V^H)`; 1 for every feasible
/// design by construction.
pub fn precoder_power(v: &CMat) -> f64 {
    trace_re(&(v * v.adjoint()))
}
