//! Analog tap placement/quantization and digital self-interference cancellers.
//!
//! The analog canceller is a budget of `N` hardware lines, each subtracting a
//! quantized copy of one (TX antenna, RX chain) coupling before the RX chain
//! input. Whatever the analog stage leaves is removed digitally, so under
//! perfect self-interference CSI the digital-domain residual is exactly zero
//! and the tap budget matters only through the analog saturation headroom.

use crate::numerics::{CMat, C64};

/// Attenuator/phase-shifter resolution of one analog tap.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuantizerSpec {
    /// Attenuation step in dB. Strictly positive.
    pub att_step_db: f64,
    /// Phase step in degrees. Strictly positive.
    pub phase_step_deg: f64,
}

impl Default for QuantizerSpec {
    fn default() -> Self {
        QuantizerSpec {
            att_step_db: 0.02,
            phase_step_deg: 0.13,
        }
    }
}

/// Strategy for spending the analog tap budget.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TapPlacement {
    /// `N` individually largest-magnitude couplings (ties broken
    /// lexicographically by row, then column).
    Magnitude,
    /// Whole RX rows first (largest row norm first), so every
    /// `N_b` taps free one receive chain; leftover taps go to the
    /// largest-magnitude entries of the next row.
    Rows,
}

/// Applied canceller settings for one self-interference environment.
#[derive(Debug, Clone, PartialEq)]
pub struct CancellerState {
    /// Analog canceller matrix (nonzero only on tap positions).
    pub c_b: CMat,
    /// BS digital canceller, `-(H_bb_hat + C_b)`.
    pub d_b: CMat,
    /// Per-user analog taps (diagonal entries).
    pub c_k: Vec<C64>,
    /// Per-user digital cancellers.
    pub d_k: Vec<C64>,
    /// Tap positions spent by the analog stage.
    pub taps: Vec<(usize, usize)>,
}

/// Positions of the `n` largest-magnitude entries, ties broken by
/// (row, column) order.
pub fn select_taps(h_bb_hat: &CMat, n: usize) -> Vec<(usize, usize)> {
    let mut entries: Vec<(usize, usize)> = (0..h_bb_hat.nrows())
        .flat_map(|r| (0..h_bb_hat.ncols()).map(move |c| (r, c)))
        .collect();
    entries.sort_by(|&a, &b| {
        h_bb_hat[b]
            .norm()
            .partial_cmp(&h_bb_hat[a].norm())
            .unwrap()
            .then(a.cmp(&b))
    });
    entries.truncate(n.min(h_bb_hat.nrows() * h_bb_hat.ncols()));
    entries
}

/// Row-block tap placement: clears whole RX rows in descending row-norm
/// order, then spends any remainder on the next row's largest entries.
pub fn select_taps_by_row(h_bb_hat: &CMat, n: usize) -> Vec<(usize, usize)> {
    let rows = h_bb_hat.nrows();
    let cols = h_bb_hat.ncols();
    let budget = n.min(rows * cols);
    let mut order: Vec<usize> = (0..rows).collect();
    order.sort_by(|&a, &b| {
        h_bb_hat
            .row(b)
            .norm()
            .partial_cmp(&h_bb_hat.row(a).norm())
            .unwrap()
            .then(a.cmp(&b))
    });
    let mut taps = Vec::with_capacity(budget);
    let full = budget / cols;
    for &r in order.iter().take(full) {
        taps.extend((0..cols).map(|c| (r, c)));
    }
    let rem = budget - full * cols;
    if rem > 0 && full < rows {
        let r = order[full];
        let mut col_order: Vec<usize> = (0..cols).collect();
        col_order.sort_by(|&a, &b| {
            h_bb_hat[(r, b)]
                .norm()
                .partial_cmp(&h_bb_hat[(r, a)].norm())
                .unwrap()
                .then(a.cmp(&b))
        });
        taps.extend(col_order.into_iter().take(rem).map(|c| (r, c)));
    }
    taps
}

/// Rounds one tap value onto the attenuator/phase grid.
///
/// Magnitude is rounded in dB with step `att_step_db`, phase in degrees with
/// step `phase_step_deg`; zero passes through unchanged.
pub fn quantize_tap(v: C64, q: &QuantizerSpec) -> C64 {
    if v == C64::new(0.0, 0.0) {
        return v;
    }
    let mag_db = 20.0 * v.norm().log10();
    let mag = 10f64.powf((mag_db / q.att_step_db).round() * q.att_step_db / 20.0);
    let ph_deg = v.arg().to_degrees();
    let ph = ((ph_deg / q.phase_step_deg).round() * q.phase_step_deg).to_radians();
    C64::from_polar(mag, ph)
}

/// Analog canceller for the BS: `C_b[p] = -quantize(H_bb_hat[p])` on the
/// selected tap positions, zero elsewhere. `quantizer = None` models ideal
/// (continuous) taps.
pub fn build_analog_canceller(
    h_bb_hat: &CMat,
    n: usize,
    quantizer: Option<&QuantizerSpec>,
    placement: TapPlacement,
) -> (CMat, Vec<(usize, usize)>) {
    let taps = match placement {
        TapPlacement::Magnitude => select_taps(h_bb_hat, n),
        TapPlacement::Rows => select_taps_by_row(h_bb_hat, n),
    };
    let mut c_b = CMat::zeros(h_bb_hat.nrows(), h_bb_hat.ncols());
    for &p in &taps {
        let v = h_bb_hat[p];
        c_b[p] = -match quantizer {
            Some(q) => quantize_tap(v, q),
            None => v,
        };
    }
    (c_b, taps)
}

/// Single-tap analog plus digital cancellers for every user.
///
/// Returns `(c_k, d_k)` with `c_k = -quantize(h_kk_hat)` and
/// `d_k = -(h_kk_hat + c_k)`, making the digital-domain residual exactly
/// zero with respect to the estimate.
pub fn build_ue_cancellers(
    h_kk_hat: &CMat,
    quantizer: Option<&QuantizerSpec>,
) -> (Vec<C64>, Vec<C64>) {
    let k = h_kk_hat.nrows();
    let mut c_k = Vec::with_capacity(k);
    let mut d_k = Vec::with_capacity(k);
    for i in 0..k {
        let v = h_kk_hat[(i, i)];
        let c = -match quantizer {
            Some(q) => quantize_tap(v, q),
            None => v,
        };
        c_k.push(c);
        d_k.push(-(v + c));
    }
    (c_k, d_k)
}

/// BS digital canceller compensating whatever the applied analog stage left:
/// `D_b = -(H_bb_hat + C_b)`.
pub fn build_digital_canceller_bs(h_bb_hat: &CMat, c_b: &CMat) -> CMat {
    -(h_bb_hat + c_b)
}

/// Residual self-interference power entering each RX chain:
/// `P_b * ||row_j(residual * V)||^2` for every chain `j`.
pub fn per_chain_residual_powers(residual: &CMat, v: &CMat, p_b: f64) -> Vec<f64> {
    let rv = residual * v;
    (0..rv.nrows())
        .map(|r| p_b * rv.row(r).iter().map(|c| c.norm_sqr()).sum::<f64>())
        .collect()
}
