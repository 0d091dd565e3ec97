//! Monte Carlo engine: deterministic random streams, point and sweep
//! runners, configuration handling, and CSV export.
//!
//! Random streams are counter-based: every trial derives its generators from
//! `(seed, point index, trial index, lane)` tuples, so execution order and
//! worker count cannot change any result byte. The channel lane is shared by
//! all schemes of a point (matched-seed comparisons see the same fading),
//! while the noise lane additionally folds in the scheme index through the
//! per-point master seed.

use crate::cancellation::{QuantizerSpec, TapPlacement};
use crate::channel::{draw_initial, evolve, jakes_rho, ChannelParams};
use crate::link::{self, Scheme, SchemeParams, SlotOutcome};
use crate::numerics::{db_to_linear, dbm_to_mw};
use crate::{Error, Result};
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

/// Quantity varied along a sweep.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepVariable {
    /// BS transmit power in dBm.
    PbDbm,
    /// Number of users.
    K,
    /// Doppler frequency in Hz.
    FdHz,
}

impl SweepVariable {
    pub fn key(&self) -> &'static str {
        match self {
            SweepVariable::PbDbm => "p_b_dbm",
            SweepVariable::K => "k",
            SweepVariable::FdHz => "f_d_hz",
        }
    }

    fn parse(s: &str) -> Option<Self> {
        match s {
            "p_b_dbm" => Some(SweepVariable::PbDbm),
            "k" => Some(SweepVariable::K),
            "f_d_hz" => Some(SweepVariable::FdHz),
            _ => None,
        }
    }
}

/// One scheme entry of a sweep; simultaneous-scheme entries may carry their
/// own tap budget (`scdc64` etc.), others use the global one.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SchemeSpec {
    pub scheme: Scheme,
    pub taps: Option<usize>,
}

impl SchemeSpec {
    pub fn token(&self) -> String {
        match (self.scheme, self.taps) {
            (Scheme::Scdc, Some(t)) => format!("scdc{t}"),
            (s, _) => s.label().to_string(),
        }
    }

    pub fn parse(tok: &str) -> Option<Self> {
        match tok {
            "sbfd" => Some(SchemeSpec { scheme: Scheme::Sbfd, taps: None }),
            "hd" => Some(SchemeSpec { scheme: Scheme::Hd, taps: None }),
            "ideal" => Some(SchemeSpec { scheme: Scheme::Ideal, taps: None }),
            "scdc" => Some(SchemeSpec { scheme: Scheme::Scdc, taps: None }),
            _ => {
                let n = tok.strip_prefix("scdc")?.parse().ok()?;
                Some(SchemeSpec { scheme: Scheme::Scdc, taps: Some(n) })
            }
        }
    }
}

/// Full description of a simulation campaign, in the units of the
/// configuration file (dB/dBm); linear-scale parameters are materialized
/// per point.
#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioConfig {
    // [channel]
    pub n_b: usize,
    pub k: usize,
    pub dl_pathloss_db: f64,
    pub in_pathloss_db: f64,
    pub bs_si_pathloss_db: f64,
    pub ue_si_pathloss_db: f64,
    pub rician_kappa_db: f64,
    pub f_d_hz: f64,
    pub t_c_s: f64,
    // [scheme]
    pub p_b_dbm: f64,
    pub p_k_dbm: f64,
    pub bs_noise_dbm: f64,
    pub ue_noise_dbm: f64,
    pub lambda_b_dbm: f64,
    pub lambda_k_dbm: f64,
    /// Analog tap budget (config key `N`).
    pub n_taps: usize,
    /// Symbols per slot (config key `T`).
    pub t: usize,
    pub training_fraction: f64,
    /// Downlink streams; 0 = serve `min(K, N_b)`.
    pub m_b: usize,
    pub si_csi_error: f64,
    pub tap_placement: TapPlacement,
    // [quantizer]
    pub att_step_db: f64,
    pub phase_step_deg: f64,
    // [sweep]
    pub sweep_variable: SweepVariable,
    pub sweep_values: Vec<f64>,
    // [run]
    pub runs: usize,
    pub seed: u64,
    pub schemes: Vec<SchemeSpec>,
}

impl Default for ScenarioConfig {
    fn default() -> Self {
        ScenarioConfig {
            n_b: 8,
            k: 4,
            dl_pathloss_db: 110.0,
            in_pathloss_db: 110.0,
            bs_si_pathloss_db: 40.0,
            ue_si_pathloss_db: 40.0,
            rician_kappa_db: 30.0,
            f_d_hz: 50.0,
            t_c_s: 1e-3,
            p_b_dbm: 40.0,
            p_k_dbm: 10.0,
            bs_noise_dbm: -100.0,
            ue_noise_dbm: -100.0,
            lambda_b_dbm: -50.0,
            lambda_k_dbm: -50.0,
            n_taps: 64,
            t: 400,
            training_fraction: 0.10,
            m_b: 0,
            si_csi_error: 0.0,
            tap_placement: TapPlacement::Rows,
            att_step_db: 0.02,
            phase_step_deg: 0.13,
            sweep_variable: SweepVariable::PbDbm,
            sweep_values: vec![10.0, 15.0, 20.0, 25.0, 30.0, 35.0, 40.0],
            runs: 1000,
            seed: 1,
            schemes: vec![
                SchemeSpec { scheme: Scheme::Scdc, taps: Some(64) },
                SchemeSpec { scheme: Scheme::Scdc, taps: Some(32) },
                SchemeSpec { scheme: Scheme::Scdc, taps: Some(8) },
                SchemeSpec { scheme: Scheme::Sbfd, taps: None },
                SchemeSpec { scheme: Scheme::Hd, taps: None },
                SchemeSpec { scheme: Scheme::Ideal, taps: None },
            ],
        }
    }
}

impl ScenarioConfig {
    /// Propagation parameters at the configured operating point.
    pub fn channel_params(&self) -> ChannelParams {
        ChannelParams {
            n_b: self.n_b,
            k: self.k,
            l_dl: db_to_linear(-self.dl_pathloss_db),
            l_in: db_to_linear(-self.in_pathloss_db),
            l_bb: db_to_linear(-self.bs_si_pathloss_db),
            l_kk: db_to_linear(-self.ue_si_pathloss_db),
            kappa: db_to_linear(self.rician_kappa_db),
            f_d: self.f_d_hz,
            t_c: self.t_c_s,
        }
    }

    /// Scheme parameters at the configured operating point.
    pub fn scheme_params(&self) -> SchemeParams {
        let quantizer = if self.att_step_db > 0.0 && self.phase_step_deg > 0.0 {
            Some(QuantizerSpec {
                att_step_db: self.att_step_db,
                phase_step_deg: self.phase_step_deg,
            })
        } else {
            None
        };
        SchemeParams {
            training_fraction: self.training_fraction,
            p_b: dbm_to_mw(self.p_b_dbm),
            p_k: dbm_to_mw(self.p_k_dbm),
            sigma_b_sq: dbm_to_mw(self.bs_noise_dbm),
            sigma_k_sq: dbm_to_mw(self.ue_noise_dbm),
            lambda_b: dbm_to_mw(self.lambda_b_dbm),
            lambda_k: dbm_to_mw(self.lambda_k_dbm),
            n_taps: self.n_taps,
            t: self.t,
            m_b: self.m_b,
            si_csi_error: self.si_csi_error,
            quantizer,
            tap_placement: self.tap_placement,
        }
    }

    /// Parameters with the sweep variable set to `value` and the scheme
    /// entry's tap budget applied.
    pub fn at_point(&self, value: f64, spec: &SchemeSpec) -> (ChannelParams, SchemeParams) {
        let mut cp = self.channel_params();
        let mut sp = self.scheme_params();
        match self.sweep_variable {
            SweepVariable::PbDbm => sp.p_b = dbm_to_mw(value),
            SweepVariable::K => cp.k = value as usize,
            SweepVariable::FdHz => cp.f_d = value,
        }
        if let Some(taps) = spec.taps {
            sp.n_taps = taps;
        }
        (cp, sp)
    }

    /// Checks every invariant, including the preconditions of every derived
    /// per-point configuration.
    pub fn validate(&self) -> Result<()> {
        let fail = |msg: String| Err(Error::Config(msg));
        if self.runs < 1 {
            return fail(format!("runs must be >= 1, got {}", self.runs));
        }
        if self.n_b < 1 {
            return fail("n_b must be >= 1".into());
        }
        if self.k < 1 {
            return fail("k must be >= 1".into());
        }
        if self.t < 1 {
            return fail("T must be >= 1".into());
        }
        if !(self.training_fraction > 0.0 && self.training_fraction < 1.0) {
            return fail(format!(
                "training_fraction must lie in (0, 1), got {}",
                self.training_fraction
            ));
        }
        if !(0.0..1.0).contains(&self.si_csi_error) {
            return fail(format!(
                "si_csi_error must lie in [0, 1), got {}",
                self.si_csi_error
            ));
        }
        if self.att_step_db < 0.0 || self.phase_step_deg < 0.0 {
            return fail("quantizer steps must be nonnegative".into());
        }
        if self.t_c_s <= 0.0 {
            return fail("t_c_s must be positive".into());
        }
        if self.f_d_hz < 0.0 {
            return fail("f_d_hz must be nonnegative".into());
        }
        if self.sweep_values.is_empty() {
            return fail("sweep values must be nonempty".into());
        }
        if !self.sweep_values.windows(2).all(|w| w[0] < w[1]) {
            return fail("sweep values must be strictly increasing".into());
        }
        if self.schemes.is_empty() {
            return fail("schemes must be nonempty".into());
        }
        for &v in &self.sweep_values {
            match self.sweep_variable {
                SweepVariable::K => {
                    if v.fract() != 0.0 || v < 1.0 {
                        return fail(format!("K sweep values must be positive integers, got {v}"));
                    }
                }
                SweepVariable::FdHz => {
                    if v < 0.0 {
                        return fail(format!("f_d sweep values must be nonnegative, got {v}"));
                    }
                }
                SweepVariable::PbDbm => {}
            }
            for spec in &self.schemes {
                let (cp, sp) = self.at_point(v, spec);
                if sp.t < cp.k {
                    return fail(format!(
                        "T = {} cannot carry orthogonal pilots for K = {}",
                        sp.t, cp.k
                    ));
                }
                if sp.training_fraction * sp.t as f64 + 1e-12 < cp.k as f64 {
                    return fail(format!(
                        "training_fraction * T = {} is below K = {}",
                        sp.training_fraction * sp.t as f64,
                        cp.k
                    ));
                }
                if sp.m_b != 0 && sp.m_b > cp.k.min(cp.n_b) {
                    return fail(format!(
                        "m_b = {} exceeds min(K = {}, N_b = {})",
                        sp.m_b, cp.k, cp.n_b
                    ));
                }
            }
        }
        Ok(())
    }
}

/// Mean/spread summary of one sweep point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PointStat {
    pub mean: f64,
    pub std_error: f64,
    pub infeasible_fraction: f64,
}

/// One row of a sweep result.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub sweep_value: f64,
    pub scheme: Scheme,
    pub taps: Option<usize>,
    pub mean_rate: f64,
    pub std_error: f64,
    pub infeasible_fraction: f64,
    pub runs: usize,
    /// Per-point master seed (derived; recorded for reproduction).
    pub seed: u64,
}

/// Rows for the Cartesian product of sweep values and schemes, value-major.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepResult {
    pub sweep_variable: SweepVariable,
    pub rows: Vec<SweepRow>,
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Deterministic master seed of one (sweep index, scheme index) point.
pub fn point_master_seed(seed: u64, sweep_index: usize, scheme_index: usize) -> u64 {
    splitmix64(splitmix64(splitmix64(seed) ^ sweep_index as u64) ^ scheme_index as u64)
}

/// Counter-keyed generator: four 64-bit words, little-endian, fill the
/// 256-bit ChaCha key, so distinct tuples give independent streams.
pub fn stream(a: u64, b: u64, c: u64, d: u64) -> ChaCha8Rng {
    let mut key = [0u8; 32];
    key[0..8].copy_from_slice(&a.to_le_bytes());
    key[8..16].copy_from_slice(&b.to_le_bytes());
    key[16..24].copy_from_slice(&c.to_le_bytes());
    key[24..32].copy_from_slice(&d.to_le_bytes());
    ChaCha8Rng::from_seed(key)
}

const LANE_CHANNEL: u64 = 0;
const LANE_NOISE: u64 = 1;

/// Runs one trial of one scheme at a materialized point.
///
/// The fading draw depends only on `(seed, sweep index, trial)` so that all
/// schemes of a point face identical channels; receiver noise, pilot aging,
/// and warm-up draws come from the scheme-specific master stream.
pub fn run_trial(
    cp: &ChannelParams,
    sp: &SchemeParams,
    spec: &SchemeSpec,
    seed: u64,
    sweep_index: usize,
    master: u64,
    trial: usize,
) -> Result<SlotOutcome> {
    let mut chan_rng = stream(seed, sweep_index as u64, trial as u64, LANE_CHANNEL);
    let prev = draw_initial(&mut chan_rng, cp);
    let rho = jakes_rho(cp.f_d, cp.t_c);
    let next = evolve(&mut chan_rng, &prev, rho, cp);
    let mut noise_rng = stream(master, trial as u64, LANE_NOISE, 0);
    match spec.scheme {
        Scheme::Ideal => link::run_ideal_trial(sp, cp, &next),
        Scheme::Hd => link::run_hd_trial(sp, cp, &next, &mut noise_rng),
        Scheme::Sbfd => link::run_sbfd_trial(sp, cp, &next, &mut noise_rng),
        Scheme::Scdc => {
            let (h_bb_hat, h_kk_hat) =
                link::synthesize_si_estimates(&mut noise_rng, &prev, sp.si_csi_error, cp);
            let (canceller, v_prev) =
                link::scdc_warmup(sp, cp, &h_bb_hat, &h_kk_hat, &mut noise_rng)?;
            link::run_scdc_trial(sp, cp, &prev, &next, &canceller, v_prev.as_ref(), &mut noise_rng)
        }
    }
}

/// Monte Carlo summary of one (sweep value, scheme) point. Trials run on the
/// rayon pool; the reduction order is fixed by trial index, so results do
/// not depend on the worker count.
pub fn run_point(cfg: &ScenarioConfig, sweep_index: usize, scheme_index: usize) -> Result<PointStat> {
    let value = cfg.sweep_values[sweep_index];
    let spec = cfg.schemes[scheme_index];
    let (cp, sp) = cfg.at_point(value, &spec);
    let master = point_master_seed(cfg.seed, sweep_index, scheme_index);
    let outcomes: Result<Vec<SlotOutcome>> = (0..cfg.runs)
        .into_par_iter()
        .map(|trial| {
            run_trial(&cp, &sp, &spec, cfg.seed, sweep_index, master, trial).map_err(|e| {
                Error::Trial {
                    index: trial,
                    seed: master,
                    message: e.to_string(),
                }
            })
        })
        .collect();
    let outcomes = outcomes?;
    let n = outcomes.len() as f64;
    let mean = outcomes.iter().map(|o| o.rate_bits_per_use).sum::<f64>() / n;
    let std_error = if outcomes.len() > 1 {
        let var = outcomes
            .iter()
            .map(|o| (o.rate_bits_per_use - mean).powi(2))
            .sum::<f64>()
            / (n - 1.0);
        (var / n).sqrt()
    } else {
        0.0
    };
    let infeasible_fraction = outcomes.iter().filter(|o| !o.feasible).count() as f64 / n;
    Ok(PointStat {
        mean,
        std_error,
        infeasible_fraction,
    })
}

/// Full Cartesian sweep, emitting each finished row to `progress`.
pub fn run_sweep_with<F: FnMut(&SweepRow)>(
    cfg: &ScenarioConfig,
    mut progress: F,
) -> Result<SweepResult> {
    cfg.validate()?;
    let mut rows = Vec::with_capacity(cfg.sweep_values.len() * cfg.schemes.len());
    for (vi, &value) in cfg.sweep_values.iter().enumerate() {
        for (si, spec) in cfg.schemes.iter().enumerate() {
            let stat = run_point(cfg, vi, si)?;
            let taps = match spec.scheme {
                Scheme::Scdc => Some(spec.taps.unwrap_or(cfg.n_taps)),
                _ => None,
            };
            let row = SweepRow {
                sweep_value: value,
                scheme: spec.scheme,
                taps,
                mean_rate: stat.mean,
                std_error: stat.std_error,
                infeasible_fraction: stat.infeasible_fraction,
                runs: cfg.runs,
                seed: point_master_seed(cfg.seed, vi, si),
            };
            progress(&row);
            rows.push(row);
        }
    }
    Ok(SweepResult {
        sweep_variable: cfg.sweep_variable,
        rows,
    })
}

/// Full Cartesian sweep over values and schemes.
pub fn run_sweep(cfg: &ScenarioConfig) -> Result<SweepResult> {
    run_sweep_with(cfg, |_| {})
}

fn parse_val<T: std::str::FromStr>(key: &str, value: &str) -> Result<T> {
    value
        .parse()
        .map_err(|_| Error::Config(format!("invalid value {value:?} for key {key:?}")))
}

const SECTIONS: [&str; 5] = ["channel", "scheme", "quantizer", "sweep", "run"];

/// Applies a single `key = value` assignment; shared by the file parser and
/// command-line overrides so both surfaces accept exactly the same keys.
pub fn apply_key(cfg: &mut ScenarioConfig, key: &str, value: &str) -> Result<()> {
    match key {
        "n_b" => cfg.n_b = parse_val(key, value)?,
        "k" => cfg.k = parse_val(key, value)?,
        "dl_pathloss_db" => cfg.dl_pathloss_db = parse_val(key, value)?,
        "in_pathloss_db" => cfg.in_pathloss_db = parse_val(key, value)?,
        "bs_si_pathloss_db" => cfg.bs_si_pathloss_db = parse_val(key, value)?,
        "ue_si_pathloss_db" => cfg.ue_si_pathloss_db = parse_val(key, value)?,
        "rician_kappa_db" => cfg.rician_kappa_db = parse_val(key, value)?,
        "f_d_hz" => cfg.f_d_hz = parse_val(key, value)?,
        "t_c_s" => cfg.t_c_s = parse_val(key, value)?,
        "p_b_dbm" => cfg.p_b_dbm = parse_val(key, value)?,
        "p_k_dbm" => cfg.p_k_dbm = parse_val(key, value)?,
        "bs_noise_dbm" => cfg.bs_noise_dbm = parse_val(key, value)?,
        "ue_noise_dbm" => cfg.ue_noise_dbm = parse_val(key, value)?,
        "lambda_b_dbm" => cfg.lambda_b_dbm = parse_val(key, value)?,
        "lambda_k_dbm" => cfg.lambda_k_dbm = parse_val(key, value)?,
        "N" => cfg.n_taps = parse_val(key, value)?,
        "T" => cfg.t = parse_val(key, value)?,
        "training_fraction" => cfg.training_fraction = parse_val(key, value)?,
        "m_b" => cfg.m_b = parse_val(key, value)?,
        "si_csi_error" => cfg.si_csi_error = parse_val(key, value)?,
        "tap_placement" => {
            cfg.tap_placement = match value {
                "rows" => TapPlacement::Rows,
                "magnitude" => TapPlacement::Magnitude,
                _ => {
                    return Err(Error::Config(format!(
                        "tap_placement must be \"rows\" or \"magnitude\", got {value:?}"
                    )))
                }
            }
        }
        "att_step_db" => cfg.att_step_db = parse_val(key, value)?,
        "phase_step_deg" => cfg.phase_step_deg = parse_val(key, value)?,
        "variable" => {
            cfg.sweep_variable = SweepVariable::parse(value).ok_or_else(|| {
                Error::Config(format!(
                    "variable must be one of p_b_dbm, k, f_d_hz; got {value:?}"
                ))
            })?
        }
        "values" => {
            cfg.sweep_values = value
                .split(',')
                .map(|tok| parse_val("values", tok.trim()))
                .collect::<Result<Vec<f64>>>()?
        }
        "runs" => cfg.runs = parse_val(key, value)?,
        "seed" => cfg.seed = parse_val(key, value)?,
        "schemes" => {
            cfg.schemes = value
                .split(',')
                .map(|tok| {
                    let tok = tok.trim();
                    SchemeSpec::parse(tok)
                        .ok_or_else(|| Error::Config(format!("unknown scheme {tok:?}")))
                })
                .collect::<Result<Vec<_>>>()?
        }
        _ => return Err(Error::Config(format!("unknown key {key:?}"))),
    }
    Ok(())
}

/// Parses the line-oriented `key = value` format without the final
/// validation pass, so callers can layer overrides on top first. Missing
/// keys keep their defaults; `#` starts a comment; `[section]` headers group
/// keys but the key namespace is flat.
pub fn parse_config(text: &str) -> Result<ScenarioConfig> {
    let mut cfg = ScenarioConfig::default();
    for (idx, raw) in text.lines().enumerate() {
        let line = match raw.find('#') {
            Some(p) => &raw[..p],
            None => raw,
        }
        .trim();
        if line.is_empty() {
            continue;
        }
        let err_at = |msg: String| Error::Config(format!("line {}: {msg}", idx + 1));
        if let Some(name) = line.strip_prefix('[') {
            let name = name
                .strip_suffix(']')
                .ok_or_else(|| err_at("unterminated section header".into()))?;
            if !SECTIONS.contains(&name) {
                return Err(err_at(format!("unknown section {name:?}")));
            }
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| err_at("expected `key = value`".into()))?;
        apply_key(&mut cfg, key.trim(), value.trim())
            .map_err(|e| err_at(e.to_string()))?;
    }
    Ok(cfg)
}

/// Parses and validates a configuration text.
pub fn load_config(text: &str) -> Result<ScenarioConfig> {
    let cfg = parse_config(text)?;
    cfg.validate()?;
    Ok(cfg)
}

fn fmt_f64(v: f64) -> String {
    // Display prints the shortest decimal that round-trips, keeping
    // serialize -> load exact.
    format!("{v}")
}

/// Canonical text form of a configuration; `load_config` of the output
/// reproduces the input config exactly.
pub fn serialize_config(cfg: &ScenarioConfig) -> String {
    let placement = match cfg.tap_placement {
        TapPlacement::Rows => "rows",
        TapPlacement::Magnitude => "magnitude",
    };
    let values = cfg
        .sweep_values
        .iter()
        .map(|&v| fmt_f64(v))
        .collect::<Vec<_>>()
        .join(", ");
    let schemes = cfg
        .schemes
        .iter()
        .map(|s| s.token())
        .collect::<Vec<_>>()
        .join(", ");
    format!(
        "[channel]\n\
         n_b = {}\n\
         k = {}\n\
         dl_pathloss_db = {}\n\
         in_pathloss_db = {}\n\
         bs_si_pathloss_db = {}\n\
         ue_si_pathloss_db = {}\n\
         rician_kappa_db = {}\n\
         f_d_hz = {}\n\
         t_c_s = {}\n\
         \n\
         [scheme]\n\
         p_b_dbm = {}\n\
         p_k_dbm = {}\n\
         bs_noise_dbm = {}\n\
         ue_noise_dbm = {}\n\
         lambda_b_dbm = {}\n\
         lambda_k_dbm = {}\n\
         N = {}\n\
         T = {}\n\
         training_fraction = {}\n\
         m_b = {}\n\
         si_csi_error = {}\n\
         tap_placement = {}\n\
         \n\
         [quantizer]\n\
         att_step_db = {}\n\
         phase_step_deg = {}\n\
         \n\
         [sweep]\n\
         variable = {}\n\
         values = {}\n\
         \n\
         [run]\n\
         runs = {}\n\
         seed = {}\n\
         schemes = {}\n",
        cfg.n_b,
        cfg.k,
        fmt_f64(cfg.dl_pathloss_db),
        fmt_f64(cfg.in_pathloss_db),
        fmt_f64(cfg.bs_si_pathloss_db),
        fmt_f64(cfg.ue_si_pathloss_db),
        fmt_f64(cfg.rician_kappa_db),
        fmt_f64(cfg.f_d_hz),
        fmt_f64(cfg.t_c_s),
        fmt_f64(cfg.p_b_dbm),
        fmt_f64(cfg.p_k_dbm),
        fmt_f64(cfg.bs_noise_dbm),
        fmt_f64(cfg.ue_noise_dbm),
        fmt_f64(cfg.lambda_b_dbm),
        fmt_f64(cfg.lambda_k_dbm),
        cfg.n_taps,
        cfg.t,
        fmt_f64(cfg.training_fraction),
        cfg.m_b,
        fmt_f64(cfg.si_csi_error),
        placement,
        fmt_f64(cfg.att_step_db),
        fmt_f64(cfg.phase_step_deg),
        cfg.sweep_variable.key(),
        values,
        cfg.runs,
        cfg.seed,
        schemes,
    )
}

/// CSV text of a sweep: fixed header, one row per entry, rows in
/// value-major/scheme-minor order, reals with six significant digits.
pub fn format_csv(result: &SweepResult) -> String {
    let mut out = String::from(
        "sweep_var,sweep_value,scheme,taps,mean_rate_bits_per_use,std_error,infeasible_fraction,runs,seed\n",
    );
    for row in &result.rows {
        let taps = row.taps.map(|t| t.to_string()).unwrap_or_default();
        out.push_str(&format!(
            "{},{},{},{},{:.5e},{:.5e},{:.5e},{},{}\n",
            result.sweep_variable.key(),
            fmt_f64(row.sweep_value),
            row.scheme.label(),
            taps,
            row.mean_rate,
            row.std_error,
            row.infeasible_fraction,
            row.runs,
            row.seed,
        ));
    }
    out
}

/// Writes the CSV and its mandatory sidecar `<path>.cfg` holding the
/// fully-resolved configuration that produced it.
pub fn write_outputs(
    result: &SweepResult,
    cfg: &ScenarioConfig,
    csv_path: &std::path::Path,
) -> Result<()> {
    std::fs::write(csv_path, format_csv(result))?;
    let mut sidecar = csv_path.as_os_str().to_owned();
    sidecar.push(".cfg");
    std::fs::write(std::path::Path::new(&sidecar), serialize_config(cfg))?;
    Ok(())
}
