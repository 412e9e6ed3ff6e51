//! Closed-form NLI against the numeric GN double integral.

use rand_chacha::rand_core::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use wdmlink_core::fibre::{FibreSpec, RamanProfile};
use wdmlink_core::nli::{nli_closed_form, nli_integral_oracle, nli_integral_oracle_with, NliParams, OracleGrid};
use wdmlink_core::spectral::{build_plan, Band, BandName, ChannelPlan};
use wdmlink_core::units::linear_to_db;

const SLOTS: usize = 40;

fn uniform(rng: &mut ChaCha8Rng) -> f64 {
    (rng.next_u64() >> 11) as f64 / (1u64 << 53) as f64
}

/// 1 to 9 active channels on a 40-slot C-band grid, −3..3 dBm each.
fn random_plan(seed: u64) -> ChannelPlan {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut plan = build_plan(&[Band::new(BandName::C, 1530.0, 1566.0, SLOTS)], 32.5, 32.0).unwrap();
    let count = 1 + (rng.next_u32() % 9) as usize;
    let mut picked = Vec::new();
    while picked.len() < count {
        let k = (rng.next_u32() as usize) % SLOTS;
        if !picked.contains(&k) {
            picked.push(k);
        }
    }
    for c in plan.channels.iter_mut() {
        if picked.contains(&c.index) {
            c.launch_power_dbm = -3.0 + 6.0 * uniform(&mut rng);
        } else {
            c.suppressed = true;
            c.launch_power_dbm = f64::NEG_INFINITY;
        }
    }
    plan
}

fn worst_gap_db(plan: &ChannelPlan, fibre: &FibreSpec, params: &NliParams) -> f64 {
    let cf = nli_closed_form(plan, fibre, params).unwrap();
    let or = nli_integral_oracle(plan, fibre, params).unwrap();
    cf.nli_mw
        .iter()
        .zip(&or.nli_mw)
        .map(|(a, b)| linear_to_db(a / b).abs())
        .fold(0.0, f64::max)
}

// The full 20-plan sweep runs in the acceptance target; a few here.
#[test]
fn closed_form_tracks_oracle_on_random_plans() {
    let fibre = FibreSpec::ssmf(39.0);
    let params = NliParams::default();
    for seed in [3, 8, 13] {
        let plan = random_plan(seed);
        let gap = worst_gap_db(&plan, &fibre, &params);
        assert!(gap < 0.5, "seed {seed}: {gap} dB");
    }
}

#[test]
fn oracle_is_converged() {
    let fibre = FibreSpec::ssmf(39.0);
    let params = NliParams::default();
    let plan = random_plan(5);
    let coarse = nli_integral_oracle_with(&plan, &fibre, &params, &OracleGrid::default()).unwrap();
    let fine = nli_integral_oracle_with(&plan, &fibre, &params, &OracleGrid::default().refined()).unwrap();
    for (a, b) in coarse.nli_mw.iter().zip(&fine.nli_mw) {
        assert!(linear_to_db(a / b).abs() < 0.01);
    }
}

#[test]
fn nli_scales_with_the_cube_of_power_without_raman() {
    let mut fibre = FibreSpec::ssmf(39.0);
    fibre.raman = RamanProfile::off();
    let params = NliParams::default();
    let plan = random_plan(2);
    let mut louder = plan.clone();
    louder.channels.iter_mut().filter(|c| !c.suppressed).for_each(|c| c.launch_power_dbm += 3.0);
    for f in [nli_closed_form, nli_integral_oracle] {
        let a = f(&plan, &fibre, &params).unwrap();
        let b = f(&louder, &fibre, &params).unwrap();
        for (x, y) in a.nli_mw.iter().zip(&b.nli_mw) {
            assert!((linear_to_db(y / x) - 9.0).abs() < 0.02);
        }
    }
}
