//! Amplifier, SNR-budget and optimizer properties.

use proptest::prelude::*;
use wdmlink_core::amplifier::{amplify, ase_power_mw, osnr, AmplifierSpec, AseRecord};
use wdmlink_core::fibre::FibreSpec;
use wdmlink_core::link::LinkConfig;
use wdmlink_core::snr::{combine_snr, shannon_rate};
use wdmlink_core::spectral::{build_plan, Band, BandName, LaunchProfile};
use wdmlink_core::tilt::{evaluate, optimize, Edge, Objective, TiltScenario, TrimAxis};
use wdmlink_core::units::{db_to_linear, linear_to_db, mw_to_dbm, PLANCK};
use wdmlink_core::Event;

#[test]
fn ase_hand_evaluation() {
    let f = 193.414;
    let want = 2.0 * (10f64.powf(0.5) / 2.0) * 6.626_070_15e-34 * f * 1e12 * (10f64.powf(1.7) - 1.0) * 32e9 * 1e3;
    let got = ase_power_mw(5.0, db_to_linear(17.0), f, 32.0);
    assert!((got - want).abs() / want < 1e-12);
    assert_eq!(PLANCK, 6.626_070_15e-34);
    assert_eq!(ase_power_mw(5.0, 1.0, f, 32.0), 0.0);
}

#[test]
fn osnr_examples() {
    let ase = AseRecord { ase_mw: vec![1e-3], reference_bandwidth_ghz: 12.5 };
    assert!((osnr(&[1.0], &ase)[0] - 30.0).abs() < 1e-12);
    assert!((osnr(&[2.0], &ase)[0] - 30.0 - linear_to_db(2.0)).abs() < 1e-12);
    let wide = ase.rescaled(32.0);
    assert!((osnr(&[1.0], &wide)[0] - 30.0).abs() < 1e-12);
    let none = AseRecord { ase_mw: vec![0.0], reference_bandwidth_ghz: 12.5 };
    assert_eq!(osnr(&[1.0], &none)[0], f64::INFINITY);
}

#[test]
fn tdfa_output_limit_scales_the_band() {
    let mut spec = AmplifierSpec::default_for("inline", BandName::S);
    spec.max_total_output_dbm = 10.0;
    let input = vec![1e-3; 100];
    let freqs: Vec<f64> = (0..100).map(|i| 200.0 + 0.0325 * i as f64).collect();
    let targets = vec![-5.0; 100];
    let out = amplify(&spec, &input, &freqs, &targets, 12.5).unwrap();
    let total: f64 = out.output_mw.iter().sum();
    assert!((mw_to_dbm(total) - 10.0).abs() < 1e-9);
    assert!(out.events.iter().any(|e| matches!(e, Event::OutputClamped { band: BandName::S, .. })));
}

proptest! {
    #[test]
    fn ase_grows_with_gain_and_nf(g1 in 0.1f64..30.0, dg in 0.01f64..10.0, nf in 3.01f64..10.0, dnf in 0.01f64..3.0) {
        let f = 195.0;
        prop_assert!(ase_power_mw(nf, db_to_linear(g1 + dg), f, 12.5) > ase_power_mw(nf, db_to_linear(g1), f, 12.5));
        prop_assert!(ase_power_mw(nf + dnf, db_to_linear(g1), f, 12.5) > ase_power_mw(nf, db_to_linear(g1), f, 12.5));
    }

    #[test]
    fn output_clamp_keeps_ratios(
        inputs in prop::collection::vec(-40.0f64..-10.0, 1..40),
        target in -10.0f64..10.0,
        cap in 0.0f64..20.0,
    ) {
        let mut spec = AmplifierSpec::default_for("inline", BandName::C);
        spec.max_total_output_dbm = cap;
        let input: Vec<f64> = inputs.iter().map(|p| db_to_linear(*p)).collect();
        let freqs: Vec<f64> = (0..input.len()).map(|i| 192.0 + 0.05 * i as f64).collect();
        let targets: Vec<f64> = (0..input.len()).map(|i| target + 0.1 * i as f64).collect();
        let out = amplify(&spec, &input, &freqs, &targets, 12.5).unwrap();
        let total = mw_to_dbm(out.output_mw.iter().sum());
        prop_assert!(total <= cap + 1e-9);
        if out.events.iter().any(|e| matches!(e, Event::OutputClamped { .. })) {
            let unclamped: Vec<f64> = input.iter().zip(&targets).map(|(p, t)| {
                let g = (t - mw_to_dbm(*p)).clamp(0.0, spec.max_gain_db);
                mw_to_dbm(*p) + g
            }).collect();
            for k in 1..input.len() {
                let a = mw_to_dbm(out.output_mw[k]) - mw_to_dbm(out.output_mw[0]);
                prop_assert!((a - (unclamped[k] - unclamped[0])).abs() < 1e-9);
            }
        }
        for a in &out.ase.ase_mw {
            prop_assert!(*a >= 0.0);
        }
    }

    #[test]
    fn combine_is_symmetric_and_bounded(a in -10.0f64..40.0, b in -10.0f64..40.0, c in -10.0f64..40.0) {
        let x = combine_snr(a, b, c);
        prop_assert!((x - combine_snr(c, a, b)).abs() < 1e-12);
        prop_assert!((x - combine_snr(b, c, a)).abs() < 1e-12);
        prop_assert!(x <= a.min(b).min(c) + 1e-12);
        let inv = 1.0 / db_to_linear(a) + 1.0 / db_to_linear(b) + 1.0 / db_to_linear(c);
        prop_assert!(((1.0 / db_to_linear(x)) - inv).abs() <= 1e-9 * inv);
    }

    #[test]
    fn shannon_is_increasing_and_linear_in_rate(s in -20.0f64..40.0, ds in 0.001f64..5.0, rs in 1.0f64..100.0) {
        prop_assert!(shannon_rate(s + ds, rs) > shannon_rate(s, rs));
        prop_assert!((shannon_rate(s, 2.0 * rs) - 2.0 * shannon_rate(s, rs)).abs() < 1e-9 * shannon_rate(s, rs).max(1.0));
    }
}

/// Exhaustive re-evaluation of the table's argmax on small link grids.
#[test]
fn optimizer_matches_exhaustive_argmax() {
    let base = build_plan(
        &[
            Band::new(BandName::S, 1480.0, 1526.0, 24),
            Band::new(BandName::C, 1530.0, 1566.0, 20),
            Band::new(BandName::L, 1572.0, 1615.0, 22),
        ],
        32.5,
        32.0,
    )
    .unwrap();
    let fibre = FibreSpec::ssmf(39.0);
    let mut link = LinkConfig::new(fibre, &[BandName::S, BandName::C, BandName::L]);
    link.snr_trx_db = vec![(BandName::S, 19.0), (BandName::C, 23.0), (BandName::L, 21.0)];
    for (total, trims) in [(10.0, vec![0, 1, 3]), (16.0, vec![0, 2]), (22.0, vec![0])] {
        let scenario = TiltScenario {
            tilts_db: vec![0.0, 1.5, 3.0, 4.5, 6.0, 7.5],
            trims: vec![
                TrimAxis { band: BandName::S, edge: Edge::HighFrequency, options: trims.clone() },
                TrimAxis { band: BandName::L, edge: Edge::LowFrequency, options: trims },
            ],
            objective: Objective::ShannonEstimate,
            grid_limit: 10_000,
        };
        let launch = LaunchProfile::new(total, 0.0);
        let eval = |p: &_| evaluate(&scenario, &base, &launch, &link, None, p);
        let result = optimize(&scenario, eval).unwrap();

        let mut best: Option<(f64, f64, usize)> = None;
        for p in scenario.grid().unwrap() {
            let v = evaluate(&scenario, &base, &launch, &link, None, &p).unwrap();
            let key = (v, p.tilt_db, p.trimmed_channels());
            let better = match best {
                None => true,
                Some((bv, bt, bn)) => v > bv || (v == bv && (p.tilt_db < bt || (p.tilt_db == bt && key.2 < bn))),
            };
            if better {
                best = Some(key);
            }
            assert!(result.best.throughput_tbps >= v);
        }
        let (bv, bt, bn) = best.unwrap();
        assert_eq!(result.best.throughput_tbps, bv);
        assert_eq!(result.best.point.tilt_db, bt);
        assert_eq!(result.best.point.trimmed_channels(), bn);
        // Repeating the search gives the identical result.
        assert_eq!(optimize(&scenario, |p| evaluate(&scenario, &base, &launch, &link, None, p)).unwrap(), result);
    }
}

#[test]
fn more_tilt_feeds_the_s_band() {
    let base = build_plan(
        &[Band::new(BandName::S, 1480.0, 1526.0, 30), Band::new(BandName::L, 1572.0, 1615.0, 30)],
        32.5,
        32.0,
    )
    .unwrap();
    let link = LinkConfig::new(FibreSpec::ssmf(39.0), &[BandName::S, BandName::L]);
    let scenario = TiltScenario { tilts_db: vec![0.0], trims: vec![], ..TiltScenario::default() };
    let launch = LaunchProfile::new(18.0, 0.0);
    let mut last = f64::NEG_INFINITY;
    for tilt in [0.0, 2.0, 4.0, 6.0] {
        let p = wdmlink_core::tilt::GridPoint { tilt_db: tilt, trims: vec![] };
        let plan = scenario.plan_for(&base, &launch, &p).unwrap();
        let r = wdmlink_core::link::simulate(&plan, &link).unwrap();
        let s_out: f64 = r.channels.iter().filter(|c| c.band == BandName::S).map(|c| c.fibre_out_dbm).sum();
        assert!(s_out > last);
        last = s_out;
    }
}
