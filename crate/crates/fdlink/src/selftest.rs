//! Fast self-checks of documented example values across every module.
//!
//! Each check exercises one hand-computable behavior (identity cases, exact
//! cancellations, determinism) and runs in milliseconds. The CLI `selftest`
//! subcommand prints one line per check.

use crate::cancellation::{
    build_analog_canceller, build_digital_canceller_bs, build_ue_cancellers,
    per_chain_residual_powers, quantize_tap, select_taps, QuantizerSpec, TapPlacement,
};
use crate::channel::{draw_initial, draw_rician, evolve, jakes_rho};
use crate::estimation::{
    compute_mse, make_training, mmse_estimate, receive_training, residual_si_power,
};
use crate::harness::{
    format_csv, load_config, point_master_seed, run_point, run_trial, serialize_config, stream,
    ScenarioConfig, SchemeSpec, SweepResult, SweepRow, SweepVariable,
};
use crate::link::{
    downlink_rate, interference_covariance, run_hd_trial, run_ideal_trial, run_sbfd_trial,
    sbfd_phase_rates, Scheme,
};
use crate::numerics::{
    bessel_j0, db_to_linear, dbm_to_mw, fro_norm_sq, hermitian_solve, log_det_hermitian,
    svd_right, CMat, C64,
};
use crate::precoder::{design, precoder_power, sort_rows_desc, zf_precoder};

type CheckResult = std::result::Result<(), String>;

/// Outcome of one named check.
#[derive(Debug, Clone)]
pub struct CheckOutcome {
    pub name: &'static str,
    pub passed: bool,
    /// Failure description; empty on success.
    pub detail: String,
}

fn ensure(cond: bool, msg: String) -> CheckResult {
    if cond {
        Ok(())
    } else {
        Err(msg)
    }
}

fn close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol
}

fn mat_close(a: &CMat, b: &CMat, tol: f64) -> bool {
    a.shape() == b.shape() && fro_norm_sq(&(a - b)).sqrt() <= tol
}

fn fixed_mat(rows: usize, cols: usize, seed: u64) -> CMat {
    let mut rng = stream(seed, 0, 0, 99);
    crate::channel::cgauss(&mut rng, rows, cols, 1.0)
}

fn small_cfg() -> ScenarioConfig {
    ScenarioConfig {
        runs: 3,
        t: 50,
        sweep_values: vec![10.0, 20.0],
        schemes: vec![
            SchemeSpec { scheme: Scheme::Scdc, taps: Some(8) },
            SchemeSpec { scheme: Scheme::Ideal, taps: None },
        ],
        ..ScenarioConfig::default()
    }
}

fn svd_identity() -> CheckResult {
    let sv = svd_right(&CMat::identity(3, 3));
    ensure(
        sv.values.iter().all(|&s| close(s, 1.0, 1e-12)),
        format!("identity singular values {:?}", sv.values),
    )
}

fn svd_diagonal() -> CheckResult {
    let mut m = CMat::zeros(3, 3);
    for (i, d) in [3.0, 2.0, 1.0].iter().enumerate() {
        m[(i, i)] = C64::new(*d, 0.0);
    }
    let sv = svd_right(&m);
    ensure(
        close(sv.values[0], 3.0, 1e-12)
            && close(sv.values[1], 2.0, 1e-12)
            && close(sv.values[2], 1.0, 1e-12),
        format!("diag(3,2,1) gave {:?}", sv.values),
    )
}

fn solve_identity() -> CheckResult {
    let b = fixed_mat(5, 3, 1);
    let x = hermitian_solve(&CMat::identity(5, 5), &b).map_err(|e| e.to_string())?;
    ensure(mat_close(&x, &b, 1e-12), "I x = B should return B".into())
}

fn solve_scaled_identity() -> CheckResult {
    let a = CMat::identity(4, 4) * C64::new(2.0, 0.0);
    let x = hermitian_solve(&a, &CMat::identity(4, 4)).map_err(|e| e.to_string())?;
    let expect = CMat::identity(4, 4) * C64::new(0.5, 0.0);
    ensure(mat_close(&x, &expect, 1e-12), "2I x = I should give 0.5 I".into())
}

fn logdet_identity() -> CheckResult {
    let v = log_det_hermitian(&CMat::identity(4, 4)).map_err(|e| e.to_string())?;
    ensure(close(v, 0.0, 1e-12), format!("log2 det I4 = {v}"))
}

fn logdet_scaled() -> CheckResult {
    let a = CMat::identity(3, 3) * C64::new(2.0, 0.0);
    let v = log_det_hermitian(&a).map_err(|e| e.to_string())?;
    ensure(close(v, 3.0, 1e-12), format!("log2 det 2I3 = {v}, want 3"))
}

fn bessel_at_zero() -> CheckResult {
    ensure(bessel_j0(0.0) == 1.0, format!("J0(0) = {}", bessel_j0(0.0)))
}

fn dbm_examples() -> CheckResult {
    ensure(
        close(dbm_to_mw(10.0), 10.0, 1e-12)
            && close(dbm_to_mw(-100.0), 1e-10, 1e-22)
            && close(db_to_linear(-110.0), 1e-11, 1e-23),
        "dBm/dB conversions off".into(),
    )
}

fn single_user_has_no_inter_node() -> CheckResult {
    let mut cp = ScenarioConfig::default().channel_params();
    cp.k = 1;
    let mut rng = stream(7, 0, 0, 0);
    let ch = draw_initial(&mut rng, &cp);
    ensure(
        ch.h_in.nrows() == 1 && ch.h_in[(0, 0)] == C64::new(0.0, 0.0),
        "1-user inter-node channel must be the 1x1 zero".into(),
    )
}

fn channel_determinism() -> CheckResult {
    let cp = ScenarioConfig::default().channel_params();
    let a = draw_initial(&mut stream(3, 1, 4, 0), &cp);
    let b = draw_initial(&mut stream(3, 1, 4, 0), &cp);
    ensure(a == b, "same seed must give bit-identical channels".into())
}

fn rician_los_limit() -> CheckResult {
    let l = 1e-4;
    let m = draw_rician(&mut stream(5, 0, 0, 0), 4, 4, l, 1e12);
    let want = l.sqrt();
    let worst = m
        .iter()
        .map(|c| ((c.norm() - want) / want).abs())
        .fold(0.0, f64::max);
    ensure(worst < 1e-4, format!("LOS-limit magnitude off by {worst:.2e} relative"))
}

fn rician_determinism() -> CheckResult {
    let a = draw_rician(&mut stream(9, 0, 0, 0), 3, 5, 1e-4, 1000.0);
    let b = draw_rician(&mut stream(9, 0, 0, 0), 3, 5, 1e-4, 1000.0);
    ensure(a == b, "same seed must give identical Rician draw".into())
}

fn jakes_static() -> CheckResult {
    ensure(jakes_rho(0.0, 1e-3) == 1.0, "f_d = 0 must give rho = 1".into())
}

fn evolve_static() -> CheckResult {
    let cp = ScenarioConfig::default().channel_params();
    let mut rng = stream(11, 0, 0, 0);
    let prev = draw_initial(&mut rng, &cp);
    let next = evolve(&mut rng, &prev, 1.0, &cp);
    ensure(next.h == prev.h, "rho = 1 must freeze the downlink channel".into())
}

fn taps_full_budget() -> CheckResult {
    let h = fixed_mat(4, 4, 2);
    let taps = select_taps(&h, 16);
    let mut seen = taps.clone();
    seen.sort_unstable();
    seen.dedup();
    ensure(taps.len() == 16 && seen.len() == 16, "full budget must cover all positions".into())
}

fn taps_diagonal_dominance() -> CheckResult {
    let n = 4;
    let h = CMat::from_fn(n, n, |i, j| {
        if i == j {
            C64::new(10.0, 0.0)
        } else {
            C64::new(0.1, 0.0)
        }
    });
    let mut taps = select_taps(&h, n);
    taps.sort_unstable();
    let want: Vec<(usize, usize)> = (0..n).map(|i| (i, i)).collect();
    ensure(taps == want, format!("dominant diagonal not selected: {taps:?}"))
}

fn quantizer_fixed_point() -> CheckResult {
    let q = QuantizerSpec::default();
    let v = C64::from_polar(
        10f64.powf(2.0 * q.att_step_db / 20.0),
        (2.0 * q.phase_step_deg).to_radians(),
    );
    let w = quantize_tap(v, &q);
    ensure((v - w).norm() < 1e-12 * v.norm(), "on-grid value must be a fixed point".into())
}

fn quantizer_zero() -> CheckResult {
    let q = QuantizerSpec::default();
    ensure(
        quantize_tap(C64::new(0.0, 0.0), &q) == C64::new(0.0, 0.0),
        "zero must quantize to zero".into(),
    )
}

fn analog_full_tap_exact() -> CheckResult {
    let h = fixed_mat(4, 4, 3);
    let (c, _) = build_analog_canceller(&h, 16, None, TapPlacement::Magnitude);
    ensure(fro_norm_sq(&(&h + &c)) == 0.0, "unquantized full-tap residual must be zero".into())
}

fn analog_zero_tap() -> CheckResult {
    let h = fixed_mat(4, 4, 4);
    let (c, taps) = build_analog_canceller(&h, 0, None, TapPlacement::Magnitude);
    ensure(
        taps.is_empty() && fro_norm_sq(&c) == 0.0,
        "0-tap canceller must be the zero matrix".into(),
    )
}

fn ue_canceller_unquantized() -> CheckResult {
    let h = fixed_mat(3, 3, 5);
    let (c_k, d_k) = build_ue_cancellers(&h, None);
    let ok = (0..3).all(|i| c_k[i] == -h[(i, i)] && d_k[i] == C64::new(0.0, 0.0));
    ensure(ok, "unquantized taps must be -h with zero digital stage".into())
}

fn ue_canceller_scalar_exact() -> CheckResult {
    let h = fixed_mat(1, 1, 6);
    let q = QuantizerSpec::default();
    let (c_k, d_k) = build_ue_cancellers(&h, Some(&q));
    let resid = h[(0, 0)] + c_k[0] + d_k[0];
    ensure(resid == C64::new(0.0, 0.0), format!("scalar residual {resid}"))
}

fn digital_zero_when_analog_exact() -> CheckResult {
    let h = fixed_mat(4, 4, 7);
    let d = build_digital_canceller_bs(&h, &(-&h));
    ensure(fro_norm_sq(&d) == 0.0, "C = -H must leave no digital work".into())
}

fn digital_full_when_analog_absent() -> CheckResult {
    let h = fixed_mat(4, 4, 8);
    let d = build_digital_canceller_bs(&h, &CMat::zeros(4, 4));
    ensure(mat_close(&d, &(-&h), 0.0), "C = 0 must give D = -H".into())
}

fn chain_powers_zero_residual() -> CheckResult {
    let v = fixed_mat(4, 2, 9);
    let p = per_chain_residual_powers(&CMat::zeros(4, 4), &v, 100.0);
    ensure(p.iter().all(|&x| x == 0.0), "zero residual must give zero powers".into())
}

fn chain_powers_zero_precoder() -> CheckResult {
    let r = fixed_mat(4, 4, 10);
    let p = per_chain_residual_powers(&r, &CMat::zeros(4, 2), 100.0);
    ensure(p.iter().all(|&x| x == 0.0), "zero precoder must give zero powers".into())
}

fn pilots_orthogonal() -> CheckResult {
    let tr = make_training(2, 4, 1.0).map_err(|e| e.to_string())?;
    let g = &tr.s_k * tr.s_k.adjoint();
    let want = CMat::identity(2, 2) * C64::new(4.0, 0.0);
    ensure(mat_close(&g, &want, 1e-10), "K=2, T=4, P=1 pilots must satisfy S S^H = 4I".into())
}

fn pilot_single_user_norm() -> CheckResult {
    let tr = make_training(1, 8, 2.0).map_err(|e| e.to_string())?;
    let n2 = fro_norm_sq(&tr.s_k);
    ensure(close(n2, 16.0, 1e-10), format!("single pilot row norm^2 = {n2}, want T P = 16"))
}

fn reception_noiseless() -> CheckResult {
    let h = fixed_mat(4, 8, 11);
    let tr = make_training(4, 16, 1.0).map_err(|e| e.to_string())?;
    let zero = CMat::zeros(8, 8);
    let mut rng = stream(1, 2, 3, 4);
    let y = receive_training(&mut rng, &h, 1.0, &zero, None, &tr, 1.0, 1e-11, 0.0);
    let want = h.transpose() * &tr.s_k;
    ensure(mat_close(&y, &want, 0.0), "noiseless static reception must be H^T S exactly".into())
}

fn reception_determinism() -> CheckResult {
    let h = fixed_mat(4, 8, 12);
    let tr = make_training(4, 16, 1.0).map_err(|e| e.to_string())?;
    let zero = CMat::zeros(8, 8);
    let run = || {
        let mut rng = stream(5, 6, 7, 8);
        receive_training(&mut rng, &h, 0.9, &zero, None, &tr, 1.0, 1e-11, 1e-10)
    };
    ensure(run() == run(), "seeded reception must reproduce exactly".into())
}

fn estimator_nulls_at_rho_zero() -> CheckResult {
    let tr = make_training(4, 16, 1.0).map_err(|e| e.to_string())?;
    let y = fixed_mat(8, 16, 13);
    let h = mmse_estimate(&y, &tr, 0.0, 1e-10, 0.0, 1e-11).map_err(|e| e.to_string())?;
    ensure(fro_norm_sq(&h) == 0.0, "rho = 0 must null the estimate".into())
}

fn mse_at_rho_zero() -> CheckResult {
    let v = compute_mse(0.0, 1e-10, 0.0, 1e-10, 400.0).map_err(|e| e.to_string())?;
    ensure(v == 1.0, format!("mse(rho=0) = {v}, want 1"))
}

fn mse_long_training_limit() -> CheckResult {
    let v = compute_mse(1.0, 1e-10, 0.0, 1e-10, 1e12).map_err(|e| e.to_string())?;
    ensure(v < 1e-9, format!("mse(T=1e12) = {v:.3e}, want -> 0"))
}

fn residual_power_zero() -> CheckResult {
    let v = fixed_mat(8, 4, 14);
    let p = residual_si_power(&CMat::zeros(8, 8), &v, 1e4, 8);
    ensure(p == 0.0, "zero residual must carry zero power".into())
}

fn residual_power_linearity() -> CheckResult {
    let r = fixed_mat(8, 8, 15);
    let v = fixed_mat(8, 4, 16);
    let p1 = residual_si_power(&r, &v, 100.0, 8);
    let p2 = residual_si_power(&r, &v, 200.0, 8);
    ensure(close(p2, 2.0 * p1, 1e-12 * p2.abs()), "doubling P_b must double the power".into())
}

fn design_perfect_cancellation() -> CheckResult {
    let cfg = ScenarioConfig::default();
    let cp = cfg.channel_params();
    let sp = cfg.scheme_params();
    let h_hat = fixed_mat(4, 8, 17).map(|c| c * cp.l_dl.sqrt());
    let h_bb = draw_rician(&mut stream(18, 0, 0, 0), 8, 8, cp.l_bb, cp.kappa);
    let h_kk = {
        let full = draw_rician(&mut stream(19, 0, 0, 0), 4, 4, cp.l_kk, cp.kappa);
        CMat::from_fn(4, 4, |i, j| if i == j { full[(i, i)] } else { C64::new(0.0, 0.0) })
    };
    let (des, _) = design(
        &h_hat, &h_bb, &h_kk, 64, sp.p_b, sp.p_k, sp.lambda_b, sp.lambda_k, 4, None,
        TapPlacement::Rows,
    )
    .map_err(|e| e.to_string())?;
    let (zf, _) = crate::precoder::zf_design(&h_hat, 4).map_err(|e| e.to_string())?;
    ensure(
        des.feasible
            && des.alpha == 8
            && close(precoder_power(&des.v_b), 1.0, 1e-10)
            && mat_close(&des.v_b, &zf, 1e-9),
        format!("full-tap unquantized design: alpha = {}, feasible = {}", des.alpha, des.feasible),
    )
}

fn design_unconstrained() -> CheckResult {
    let cfg = ScenarioConfig::default();
    let cp = cfg.channel_params();
    let sp = cfg.scheme_params();
    let h_hat = fixed_mat(4, 8, 20).map(|c| c * cp.l_dl.sqrt());
    let h_bb = draw_rician(&mut stream(21, 0, 0, 0), 8, 8, cp.l_bb, cp.kappa);
    let h_kk = {
        let full = draw_rician(&mut stream(22, 0, 0, 0), 4, 4, cp.l_kk, cp.kappa);
        CMat::from_fn(4, 4, |i, j| if i == j { full[(i, i)] } else { C64::new(0.0, 0.0) })
    };
    let (des, _) = design(
        &h_hat, &h_bb, &h_kk, 8, sp.p_b, sp.p_k, f64::INFINITY, f64::INFINITY, 4,
        sp.quantizer.as_ref(), TapPlacement::Rows,
    )
    .map_err(|e| e.to_string())?;
    ensure(
        des.feasible && des.alpha == 8,
        format!("unconstrained design must stop at alpha = N_b, got {}", des.alpha),
    )
}

fn zf_identity() -> CheckResult {
    let (g, beta) = zf_precoder(&CMat::identity(4, 4)).map_err(|e| e.to_string())?;
    let want = CMat::identity(4, 4) * C64::new(0.5, 0.0);
    ensure(
        mat_close(&g, &want, 1e-12) && close(beta, 0.5, 1e-12),
        format!("ZF of I4: beta = {beta}, want 0.5 I"),
    )
}

fn row_sort_order() -> CheckResult {
    let m = CMat::from_fn(3, 2, |i, _| {
        C64::new([1.0, 3.0, 2.0][i] / 2f64.sqrt(), [1.0, 3.0, 2.0][i] / 2f64.sqrt())
    });
    let (_, perm) = sort_rows_desc(&m);
    ensure(perm == vec![1, 2, 0], format!("norms (1,3,2) sorted as {perm:?}"))
}

fn row_sort_stable_identity() -> CheckResult {
    let m = CMat::from_fn(3, 2, |i, _| C64::new((3 - i) as f64, 0.0));
    let (_, perm) = sort_rows_desc(&m);
    ensure(perm == vec![0, 1, 2], format!("sorted input permuted as {perm:?}"))
}

fn covariance_noise_floor() -> CheckResult {
    let k = 4;
    let zero = CMat::zeros(k, k);
    let v = fixed_mat(8, 4, 23);
    let sigma = interference_covariance(&zero, &zero, 10.0, 0.0, 1e4, 1e-11, &v, 1e-10);
    let want = CMat::identity(k, k) * C64::new(1e-10, 0.0);
    ensure(mat_close(&sigma, &want, 1e-24), "zero interference must leave the noise floor".into())
}

fn covariance_drops_ue_term() -> CheckResult {
    let k = 4;
    let h_in = fixed_mat(k, k, 24);
    let zero = CMat::zeros(k, k);
    let v = fixed_mat(8, 4, 25);
    let sigma = interference_covariance(&zero, &h_in, 10.0, 0.0, 1e4, 1e-11, &v, 1e-10);
    let want = CMat::identity(k, k) * C64::new(1e-10, 0.0) + (&h_in * h_in.adjoint()).map(|c| c * 10.0);
    ensure(
        mat_close(&sigma, &want, 1e-12),
        "zero UE residual must leave only noise + inter-node terms".into(),
    )
}

fn rate_zero_at_full_uncertainty() -> CheckResult {
    let h = fixed_mat(4, 8, 26);
    let v = fixed_mat(8, 4, 27);
    let sigma = CMat::identity(4, 4);
    let r = downlink_rate(&h, &v, 1.0, 1e4, &sigma).map_err(|e| e.to_string())?;
    ensure(r == 0.0, format!("tau^2 = 1 must zero the rate, got {r}"))
}

fn scdc_trial_determinism() -> CheckResult {
    let cfg = ScenarioConfig::default();
    let spec = SchemeSpec { scheme: Scheme::Scdc, taps: Some(64) };
    let (cp, sp) = cfg.at_point(30.0, &spec);
    let master = point_master_seed(cfg.seed, 0, 0);
    let run = || run_trial(&cp, &sp, &spec, cfg.seed, 0, master, 3);
    let a = run().map_err(|e| e.to_string())?;
    let b = run().map_err(|e| e.to_string())?;
    ensure(a == b, "seeded trial must reproduce byte-identically".into())
}

fn hd_rate_vanishes_without_data() -> CheckResult {
    let cfg = ScenarioConfig::default();
    let cp = cfg.channel_params();
    let mut sp = cfg.scheme_params();
    sp.training_fraction = 1.0 - 1e-12;
    let mut rng = stream(cfg.seed, 0, 0, 0);
    let ch = draw_initial(&mut rng, &cp);
    let mut noise = stream(1, 2, 3, 9);
    let out = run_hd_trial(&sp, &cp, &ch, &mut noise).map_err(|e| e.to_string())?;
    ensure(
        out.rate_bits_per_use < 1e-6,
        format!("training-only slot kept rate {}", out.rate_bits_per_use),
    )
}

fn sbfd_static_phase_collapse() -> CheckResult {
    let cfg = ScenarioConfig::default();
    let mut cp = cfg.channel_params();
    cp.f_d = 0.0;
    let sp = cfg.scheme_params();
    let mut rng = stream(cfg.seed, 0, 0, 0);
    let ch = draw_initial(&mut rng, &cp);
    let mut noise = stream(4, 5, 6, 7);
    let (r_f, r_d, _, _) =
        sbfd_phase_rates(&sp, &cp, &ch, &mut noise).map_err(|e| e.to_string())?;
    ensure(
        r_f.is_some() && r_f == r_d,
        format!("static channel phases differ: {r_f:?} vs {r_d:?}"),
    )
}

fn sbfd_residual_free_quality() -> CheckResult {
    let cfg = ScenarioConfig::default();
    let cp = cfg.channel_params();
    let sp = cfg.scheme_params();
    let mut rng = stream(cfg.seed, 1, 0, 0);
    let ch = draw_initial(&mut rng, &cp);
    let mut noise = stream(8, 9, 10, 11);
    let out = run_sbfd_trial(&sp, &cp, &ch, &mut noise).map_err(|e| e.to_string())?;
    let t_tr = sp.training_fraction * sp.t as f64 / cp.k as f64;
    let want = compute_mse(1.0, sp.sigma_b_sq, 0.0, sp.p_k * cp.l_dl, t_tr)
        .map_err(|e| e.to_string())?;
    ensure(
        out.tau_dl_sq == want,
        "reported estimation quality must assume zero residual".into(),
    )
}

fn ideal_reports_perfect_csi() -> CheckResult {
    let cfg = ScenarioConfig::default();
    let cp = cfg.channel_params();
    let sp = cfg.scheme_params();
    let mut rng = stream(cfg.seed, 2, 0, 0);
    let ch = draw_initial(&mut rng, &cp);
    let out = run_ideal_trial(&sp, &cp, &ch).map_err(|e| e.to_string())?;
    ensure(
        out.tau_dl_sq == 0.0 && out.feasible,
        "genie bound must report tau^2 = 0 and feasibility".into(),
    )
}

fn point_mean_of_single_run() -> CheckResult {
    let mut cfg = small_cfg();
    cfg.runs = 1;
    let stat = run_point(&cfg, 0, 1).map_err(|e| e.to_string())?;
    let spec = cfg.schemes[1];
    let (cp, sp) = cfg.at_point(cfg.sweep_values[0], &spec);
    let master = point_master_seed(cfg.seed, 0, 1);
    let out = run_trial(&cp, &sp, &spec, cfg.seed, 0, master, 0).map_err(|e| e.to_string())?;
    ensure(
        stat.mean == out.rate_bits_per_use && stat.std_error == 0.0,
        "single-run mean must equal the trial".into(),
    )
}

fn sweep_determinism() -> CheckResult {
    let cfg = small_cfg();
    let a = crate::harness::run_sweep(&cfg).map_err(|e| e.to_string())?;
    let b = crate::harness::run_sweep(&cfg).map_err(|e| e.to_string())?;
    ensure(
        format_csv(&a) == format_csv(&b),
        "same config and seed must give identical bytes".into(),
    )
}

fn zero_runs_rejected() -> CheckResult {
    let mut cfg = ScenarioConfig::default();
    cfg.runs = 0;
    match cfg.validate() {
        Err(e) => ensure(e.to_string().contains("runs"), format!("diagnostic must name runs: {e}")),
        Ok(()) => Err("runs = 0 must be rejected".into()),
    }
}

fn csv_header_only() -> CheckResult {
    let result = SweepResult { sweep_variable: SweepVariable::PbDbm, rows: Vec::new() };
    let text = format_csv(&result);
    ensure(text.lines().count() == 1, format!("empty result produced {} lines", text.lines().count()))
}

fn csv_single_row() -> CheckResult {
    let result = SweepResult {
        sweep_variable: SweepVariable::PbDbm,
        rows: vec![SweepRow {
            sweep_value: 40.0,
            scheme: Scheme::Ideal,
            taps: None,
            mean_rate: 33.0,
            std_error: 0.1,
            infeasible_fraction: 0.0,
            runs: 10,
            seed: 42,
        }],
    };
    let text = format_csv(&result);
    ensure(text.lines().count() == 2, format!("single row produced {} lines", text.lines().count()))
}

fn config_round_trip() -> CheckResult {
    let mut cfg = ScenarioConfig::default();
    cfg.sweep_values = vec![10.0, 12.5, 40.0];
    cfg.training_fraction = 0.125;
    cfg.seed = 0xDEAD_BEEF;
    let again = load_config(&serialize_config(&cfg)).map_err(|e| e.to_string())?;
    ensure(again == cfg, "serialize -> load must reproduce the config".into())
}

fn empty_config_is_default() -> CheckResult {
    let cfg = load_config("").map_err(|e| e.to_string())?;
    ensure(cfg == ScenarioConfig::default(), "empty text must yield the default scenario".into())
}

/// Runs every check, returning one outcome per name.
pub fn run_all() -> Vec<CheckOutcome> {
    let checks: Vec<(&'static str, fn() -> CheckResult)> = vec![
        ("svd identity singular values", svd_identity),
        ("svd diagonal singular values", svd_diagonal),
        ("solve with identity matrix", solve_identity),
        ("solve with scaled identity", solve_scaled_identity),
        ("log-det of identity", logdet_identity),
        ("log-det of scaled identity", logdet_scaled),
        ("bessel at zero", bessel_at_zero),
        ("dBm and dB conversions", dbm_examples),
        ("single user has no inter-node channel", single_user_has_no_inter_node),
        ("channel draw determinism", channel_determinism),
        ("Rician line-of-sight limit", rician_los_limit),
        ("Rician draw determinism", rician_determinism),
        ("static Doppler correlation", jakes_static),
        ("static channel evolution", evolve_static),
        ("full tap budget covers all positions", taps_full_budget),
        ("dominant diagonal tap selection", taps_diagonal_dominance),
        ("quantizer grid fixed point", quantizer_fixed_point),
        ("quantizer passes zero through", quantizer_zero),
        ("full-tap analog cancellation is exact", analog_full_tap_exact),
        ("zero-tap canceller is empty", analog_zero_tap),
        ("unquantized user taps need no digital stage", ue_canceller_unquantized),
        ("scalar user residual cancels exactly", ue_canceller_scalar_exact),
        ("digital stage idle after exact analog", digital_zero_when_analog_exact),
        ("digital stage carries full load alone", digital_full_when_analog_absent),
        ("chain powers vanish without residual", chain_powers_zero_residual),
        ("chain powers vanish without precoder", chain_powers_zero_precoder),
        ("pilot rows are orthogonal", pilots_orthogonal),
        ("single pilot row energy", pilot_single_user_norm),
        ("noiseless static reception is exact", reception_noiseless),
        ("reception determinism", reception_determinism),
        ("estimator nulls at zero correlation", estimator_nulls_at_rho_zero),
        ("estimation error saturates at zero correlation", mse_at_rho_zero),
        ("estimation error vanishes with long training", mse_long_training_limit),
        ("residual power of zero residual", residual_power_zero),
        ("residual power linear in transmit power", residual_power_linearity),
        ("perfect cancellation recovers plain zero-forcing", design_perfect_cancellation),
        ("unconstrained design keeps the full space", design_unconstrained),
        ("zero-forcing of identity", zf_identity),
        ("row sort by descending norm", row_sort_order),
        ("row sort of already sorted input", row_sort_stable_identity),
        ("covariance reduces to noise floor", covariance_noise_floor),
        ("covariance drops absent user residual", covariance_drops_ue_term),
        ("rate zero at full channel uncertainty", rate_zero_at_full_uncertainty),
        ("simultaneous-scheme trial determinism", scdc_trial_determinism),
        ("half-duplex rate vanishes without data", hd_rate_vanishes_without_data),
        ("sequential phases collapse on static channel", sbfd_static_phase_collapse),
        ("sequential scheme assumes zero residual", sbfd_residual_free_quality),
        ("genie bound reports perfect CSI", ideal_reports_perfect_csi),
        ("point mean of a single run", point_mean_of_single_run),
        ("sweep byte determinism", sweep_determinism),
        ("zero runs rejected by validation", zero_runs_rejected),
        ("header-only CSV for empty result", csv_header_only),
        ("two-line CSV for single row", csv_single_row),
        ("config round-trip", config_round_trip),
        ("empty config yields defaults", empty_config_is_default),
    ];
    checks
        .into_iter()
        .map(|(name, f)| match f() {
            Ok(()) => CheckOutcome { name, passed: true, detail: String::new() },
            Err(detail) => CheckOutcome { name, passed: false, detail },
        })
        .collect()
}
