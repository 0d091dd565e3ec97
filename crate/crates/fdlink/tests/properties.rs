//! Property-based invariants over randomized inputs.

use fdlink::cancellation::{quantize_tap, select_taps, QuantizerSpec};
use fdlink::estimation::{compute_mse, make_training};
use fdlink::harness::{load_config, serialize_config, stream, ScenarioConfig, SchemeSpec};
use fdlink::link::{downlink_rate, interference_covariance, Scheme};
use fdlink::numerics::{bessel_j0, dbm_to_mw, fro_norm_sq, CMat, C64};
use fdlink::precoder::sort_rows_desc;
use proptest::prelude::*;
use rand::RngCore;

fn cmat_from(parts: &[(f64, f64)], rows: usize, cols: usize) -> CMat {
    CMat::from_fn(rows, cols, |r, c| {
        let (re, im) = parts[r * cols + c];
        C64::new(re, im)
    })
}

proptest! {
    #[test]
    fn quantizer_error_is_bounded_by_half_steps(
        re in -100.0f64..100.0,
        im in -100.0f64..100.0,
        att_step in 0.002f64..0.2,
        phase_step in 0.02f64..2.0,
    ) {
        let v = C64::new(re, im);
        prop_assume!(v.norm() > 1e-6);
        let q = QuantizerSpec { att_step_db: att_step, phase_step_deg: phase_step };
        let rel = (quantize_tap(v, &q) - v).norm() / v.norm();
        // Half an attenuator step plus half a phase step, with margin.
        let bound = (10f64.powf(att_step / 40.0) - 1.0)
            + 10f64.powf(att_step / 40.0) * (phase_step / 2.0).to_radians()
            + 1e-12;
        prop_assert!(rel <= bound * 1.01, "rel {rel:.3e} > bound {bound:.3e}");
    }

    #[test]
    fn mse_lives_in_the_unit_interval_and_is_monotone(
        rho in 0.0f64..1.0,
        noise_exp in -14.0f64..-6.0,
        p_exp in -14.0f64..-6.0,
        t1 in 1.0f64..1000.0,
        extra in 0.0f64..1000.0,
    ) {
        let sigma = 10f64.powf(noise_exp);
        let p = 10f64.powf(p_exp);
        let a = compute_mse(rho, sigma, 0.0, p, t1).unwrap();
        prop_assert!((0.0..=1.0).contains(&a));
        // Longer training can only help.
        let b = compute_mse(rho, sigma, 0.0, p, t1 + extra).unwrap();
        prop_assert!(b <= a + 1e-15);
        // Residual self-interference can only hurt.
        let c = compute_mse(rho, sigma, sigma, p, t1).unwrap();
        prop_assert!(c >= a - 1e-15);
        // Better correlation can only help (T >= 1).
        let d = compute_mse((rho + 1.0) / 2.0, sigma, 0.0, p, t1).unwrap();
        prop_assert!(d <= a + 1e-15);
    }

    #[test]
    fn rate_is_nonnegative_and_zero_beyond_total_mismatch(
        parts_h in prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), 32),
        parts_v in prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), 32),
        tau in 0.0f64..1.2,
        p_exp in -3.0f64..5.0,
        s_exp in -12.0f64..0.0,
    ) {
        let h = cmat_from(&parts_h, 4, 8).map(|c| c * 1e-5);
        let v = cmat_from(&parts_v, 8, 4);
        let sigma = CMat::identity(4, 4) * C64::new(10f64.powf(s_exp), 0.0);
        let r = downlink_rate(&h, &v, tau, 10f64.powf(p_exp), &sigma).unwrap();
        prop_assert!(r >= 0.0);
        if tau >= 1.0 {
            prop_assert_eq!(r, 0.0);
        }
    }

    #[test]
    fn covariance_is_hermitian_positive_definite(
        parts_r in prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), 16),
        parts_i in prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), 16),
        parts_v in prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), 32),
        tau in 0.0f64..1.0,
        noise_exp in -12.0f64..-6.0,
    ) {
        let resid = CMat::from_fn(4, 4, |i, j| {
            if i == j {
                let (re, im) = parts_r[i * 4 + i];
                C64::new(re, im) * 1e-4
            } else {
                C64::new(0.0, 0.0)
            }
        });
        let h_in = cmat_from(&parts_i, 4, 4).map(|c| c * 1e-5);
        let v = cmat_from(&parts_v, 8, 4);
        let s_k = 10f64.powf(noise_exp);
        let sigma = interference_covariance(&resid, &h_in, 10.0, tau, 1e4, 1e-11, &v, s_k);
        // Hermitian within roundoff.
        let asym = fro_norm_sq(&(&sigma - sigma.adjoint())).sqrt();
        prop_assert!(asym <= 1e-12 * fro_norm_sq(&sigma).sqrt());
        // Strictly positive definite: every eigenvalue at least the noise floor.
        let eigs = fdlink::numerics::svd_right(&sigma).values;
        prop_assert!(eigs.iter().all(|&e| e >= s_k * (1.0 - 1e-9)));
    }

    #[test]
    fn pilot_blocks_are_orthogonal_for_any_shape(
        k in 1usize..5,
        extra in 0usize..40,
        p_exp in -1.0f64..1.0,
    ) {
        let t = k + extra;
        let p_k = 10f64.powf(p_exp);
        let tr = make_training(k, t, p_k).unwrap();
        let gram = &tr.s_k * tr.s_k.adjoint();
        let want = CMat::identity(k, k) * C64::new(t as f64 * p_k, 0.0);
        let err = fro_norm_sq(&(&gram - &want)).sqrt();
        prop_assert!(err <= 1e-9 * t as f64 * p_k);
    }

    #[test]
    fn row_sort_returns_a_valid_descending_permutation(
        parts in prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), 30),
    ) {
        let m = cmat_from(&parts, 6, 5);
        let (sorted, perm) = sort_rows_desc(&m);
        let mut seen = perm.clone();
        seen.sort_unstable();
        prop_assert_eq!(seen, (0..6).collect::<Vec<_>>());
        for i in 1..6 {
            prop_assert!(sorted.row(i - 1).norm() >= sorted.row(i).norm() - 1e-15);
        }
        for i in 0..6 {
            prop_assert_eq!(sorted.row(i), m.row(perm[i]));
        }
    }

    #[test]
    fn tap_selection_takes_the_largest_entries(
        parts in prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), 36),
        n in 0usize..40,
    ) {
        let m = cmat_from(&parts, 6, 6);
        let taps = select_taps(&m, n);
        prop_assert_eq!(taps.len(), n.min(36));
        if !taps.is_empty() && taps.len() < 36 {
            let cutoff = taps.iter().map(|&p| m[p].norm()).fold(f64::INFINITY, f64::min);
            for r in 0..6 {
                for c in 0..6 {
                    if !taps.contains(&(r, c)) {
                        prop_assert!(m[(r, c)].norm() <= cutoff + 1e-15);
                    }
                }
            }
        }
    }

    #[test]
    fn bessel_is_even_and_bounded(x in -50.0f64..50.0) {
        let j = bessel_j0(x);
        prop_assert!(j.abs() <= 1.0 + 1e-12);
        prop_assert_eq!(j, bessel_j0(-x));
    }

    #[test]
    fn dbm_conversion_round_trips(p_dbm in -150.0f64..60.0) {
        let mw = dbm_to_mw(p_dbm);
        prop_assert!(mw > 0.0);
        let back = 10.0 * mw.log10();
        prop_assert!((back - p_dbm).abs() <= 1e-9);
    }

    #[test]
    fn config_files_round_trip_for_arbitrary_campaigns(
        k in 1usize..5,
        m_b in 0usize..5,
        tf_num in 1u32..20,
        quarters in prop::collection::btree_set(1u32..200, 1..5),
        runs in 1usize..50,
        seed in any::<u64>(),
        f_d in 0.0f64..500.0,
        scheme_mask in 1u8..31,
    ) {
        prop_assume!(m_b <= k);
        let mut cfg = ScenarioConfig::default();
        cfg.k = k;
        cfg.m_b = m_b;
        cfg.training_fraction = tf_num as f64 / 40.0; // in (0, 0.5]
        cfg.sweep_values = quarters.iter().map(|&q| q as f64 / 4.0).collect();
        cfg.runs = runs;
        cfg.seed = seed;
        cfg.f_d_hz = f_d;
        let all = [
            SchemeSpec { scheme: Scheme::Scdc, taps: Some(64) },
            SchemeSpec { scheme: Scheme::Scdc, taps: None },
            SchemeSpec { scheme: Scheme::Sbfd, taps: None },
            SchemeSpec { scheme: Scheme::Hd, taps: None },
            SchemeSpec { scheme: Scheme::Ideal, taps: None },
        ];
        cfg.schemes = all
            .iter()
            .enumerate()
            .filter(|(i, _)| scheme_mask & (1 << i) != 0)
            .map(|(_, s)| *s)
            .collect();
        // Round-trip must be exact whether or not the campaign validates.
        let back = fdlink::harness::parse_config(&serialize_config(&cfg)).unwrap();
        prop_assert_eq!(&back, &cfg);
        if cfg.validate().is_ok() {
            let loaded = load_config(&serialize_config(&cfg)).unwrap();
            prop_assert_eq!(loaded, cfg);
        }
    }

    #[test]
    fn streams_are_deterministic_functions_of_their_tuple(
        a in any::<u64>(), b in any::<u64>(), c in any::<u64>(), d in any::<u64>(),
    ) {
        let mut x = [0u8; 32];
        let mut y = [0u8; 32];
        stream(a, b, c, d).fill_bytes(&mut x);
        stream(a, b, c, d).fill_bytes(&mut y);
        prop_assert_eq!(x, y);
        // Any single-coordinate change moves the stream.
        let mut z = [0u8; 32];
        stream(a.wrapping_add(1), b, c, d).fill_bytes(&mut z);
        prop_assert_ne!(x, z);
    }
}
