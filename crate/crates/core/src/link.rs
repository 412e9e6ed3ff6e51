//! Single-span link: fibre, in-line band amplifiers, receiver loss and
//! pre-amplifiers, with the per-channel SNR budget at the receiver.

use alloc::format;
use alloc::vec::Vec;

use crate::amplifier::{amplify, ase_power_mw, interpolate_gain_db, AmplifierSpec};
use crate::fibre::{propagate, FibreSpec, PowerEvolution};
use crate::nli::{nli_closed_form, NliParams};
use crate::snr::{combine_snr_db, notch_sweep, osnr_to_snr_db, shannon_rate, NotchProbeResult, NotchReading};
use crate::spectral::{carve_notches, BandName, ChannelPlan, NotchPlan, NotchPurpose};
use crate::units::{db_to_linear, linear_to_db, mw_to_dbm, OSNR_REFERENCE_GHZ};
use crate::{Error, Event, Result};

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct LinkConfig {
    pub fibre: FibreSpec,
    pub step_km: f64,
    /// One in-line amplifier per band, placed after the fibre. Its
    /// per-channel targets are the launch powers.
    pub inline: Vec<AmplifierSpec>,
    /// Loss between the in-line amplifiers and the receiver, dB.
    pub receiver_loss_db: f64,
    /// One pre-amplifier per band in front of the receiver.
    pub preamp: Vec<AmplifierSpec>,
    /// Per-channel power the pre-amplifiers aim for, dBm.
    pub preamp_target_dbm: f64,
    /// `None` leaves nonlinear interference out of the budget.
    pub nli: Option<NliParams>,
    pub snr_trx_db: Vec<(BandName, f64)>,
}

impl LinkConfig {
    /// Default amplifiers for `bands`, no receiver loss, 0 dBm pre-amp
    /// target, default NLI parameters and an ideal transceiver.
    pub fn new(fibre: FibreSpec, bands: &[BandName]) -> Self {
        LinkConfig {
            fibre,
            step_km: 0.1,
            inline: bands.iter().map(|b| AmplifierSpec::default_for("inline", *b)).collect(),
            receiver_loss_db: 0.0,
            preamp: bands.iter().map(|b| AmplifierSpec::default_for("preamp", *b)).collect(),
            preamp_target_dbm: 0.0,
            nli: Some(NliParams::default()),
            snr_trx_db: Vec::new(),
        }
    }

    pub fn snr_trx(&self, band: BandName) -> f64 {
        self.snr_trx_db
            .iter()
            .find(|(b, _)| *b == band)
            .map_or(f64::INFINITY, |(_, s)| *s)
    }

    fn stage(list: &[AmplifierSpec], stage: &str, band: BandName) -> Result<AmplifierSpec> {
        list.iter()
            .find(|a| a.band == band)
            .cloned()
            .ok_or_else(|| Error::Config(format!("no {stage} amplifier configured for band {band}")))
    }

    pub fn validate(&self) -> Result<()> {
        self.fibre.validate()?;
        if !(self.step_km > 0.0) || !self.step_km.is_finite() {
            return Err(Error::Config(format!("step {} km must be positive", self.step_km)));
        }
        if !(self.receiver_loss_db >= 0.0) || !self.receiver_loss_db.is_finite() {
            return Err(Error::Config("receiver loss must be finite and >= 0 dB".into()));
        }
        if !self.preamp_target_dbm.is_finite() {
            return Err(Error::Config("pre-amplifier target must be finite".into()));
        }
        for a in self.inline.iter().chain(&self.preamp) {
            a.validate()?;
        }
        if let Some(p) = &self.nli {
            p.validate()?;
        }
        Ok(())
    }
}

/// Everything known about one active channel at the receiver.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ChannelBudget {
    pub index: usize,
    pub band: BandName,
    pub frequency_thz: f64,
    pub wavelength_nm: f64,
    pub symbol_rate_gbaud: f64,
    pub launch_dbm: f64,
    pub fibre_out_dbm: f64,
    /// Fibre input minus fibre output, point losses included.
    pub net_loss_db: f64,
    pub inline_gain_db: f64,
    pub preamp_gain_db: f64,
    pub received_dbm: f64,
    /// Accumulated ASE at the receiver in 12.5 GHz, mW.
    pub ase_mw: f64,
    pub osnr_db: f64,
    pub snr_trx_db: f64,
    pub snr_ase_db: f64,
    pub snr_nli_db: f64,
    pub snr_total_db: f64,
    pub shannon_gbps: f64,
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct LinkResult {
    pub channels: Vec<ChannelBudget>,
    pub evolution: PowerEvolution,
    pub events: Vec<Event>,
}

impl LinkResult {
    /// Total SNR per plan channel, `None` for channels not simulated.
    pub fn snr_by_index(&self, plan_len: usize) -> Vec<Option<f64>> {
        let mut out = alloc::vec![None; plan_len];
        for c in &self.channels {
            if c.index < plan_len {
                out[c.index] = Some(c.snr_total_db);
            }
        }
        out
    }

    pub fn shannon_tbps(&self) -> f64 {
        self.channels.iter().map(|c| c.shannon_gbps).sum::<f64>() / 1000.0
    }

    pub fn band_shannon_tbps(&self, band: BandName) -> f64 {
        self.channels
            .iter()
            .filter(|c| c.band == band)
            .map(|c| c.shannon_gbps)
            .sum::<f64>()
            / 1000.0
    }

    /// Channels of one band in ascending frequency.
    fn band(&self, band: BandName) -> Vec<&ChannelBudget> {
        let mut v: Vec<&ChannelBudget> = self.channels.iter().filter(|c| c.band == band).collect();
        v.sort_by(|a, b| a.frequency_thz.total_cmp(&b.frequency_thz));
        v
    }
}

/// Runs the plan (launch powers already set) through the link.
pub fn simulate(plan: &ChannelPlan, config: &LinkConfig) -> Result<LinkResult> {
    config.validate()?;
    let evolution = propagate(plan, &config.fibre, config.step_km)?;
    let mut events = plan.warnings.clone();
    events.extend(evolution.warnings.iter().cloned());

    let nli = match &config.nli {
        Some(p) => {
            let est = nli_closed_form(plan, &config.fibre, p)?;
            events.extend(est.warnings.iter().cloned());
            Some(est)
        }
        None => None,
    };

    let launch = evolution.launch_mw();
    let output = evolution.output_mw();
    let rx_loss = db_to_linear(-config.receiver_loss_db);
    let mut channels = Vec::with_capacity(evolution.channels.len());
    for band in plan.band_names() {
        let members: Vec<usize> = evolution
            .channels
            .iter()
            .enumerate()
            .filter(|(_, i)| plan.channels[**i].band == band)
            .map(|(k, _)| k)
            .collect();
        if members.is_empty() {
            continue;
        }
        let freqs: Vec<f64> = members.iter().map(|k| evolution.frequencies_thz[*k]).collect();
        let fibre_out: Vec<f64> = members.iter().map(|k| output[*k]).collect();
        let targets: Vec<f64> = members.iter().map(|k| mw_to_dbm(launch[*k])).collect();

        let inline_spec = LinkConfig::stage(&config.inline, "inline", band)?;
        let first = amplify(&inline_spec, &fibre_out, &freqs, &targets, OSNR_REFERENCE_GHZ)?;
        events.extend(first.events.iter().cloned());

        let pre_in: Vec<f64> = first.output_mw.iter().map(|p| p * rx_loss).collect();
        let pre_targets = alloc::vec![config.preamp_target_dbm; members.len()];
        let pre_spec = LinkConfig::stage(&config.preamp, "preamp", band)?;
        let second = amplify(&pre_spec, &pre_in, &freqs, &pre_targets, OSNR_REFERENCE_GHZ)?;
        events.extend(second.events.iter().cloned());

        let trx = config.snr_trx(band);
        for (j, &k) in members.iter().enumerate() {
            let index = evolution.channels[k];
            let ch = &plan.channels[index];
            let g2 = db_to_linear(second.gains_db[j]);
            let ase = first.ase.ase_mw[j] * rx_loss * g2 + second.ase.ase_mw[j];
            let received = second.output_mw[j];
            let osnr_db = if ase > 0.0 { linear_to_db(received / ase) } else { f64::INFINITY };
            let snr_ase_db = osnr_to_snr_db(osnr_db, ch.symbol_rate_gbaud);
            let snr_nli_db = match &nli {
                Some(est) => est
                    .channels
                    .iter()
                    .position(|i| *i == index)
                    .map_or(f64::INFINITY, |p| est.snr_nli_db[p]),
                None => f64::INFINITY,
            };
            let snr_total_db = combine_snr_db(&[trx, snr_ase_db, snr_nli_db]);
            channels.push(ChannelBudget {
                index,
                band,
                frequency_thz: ch.center_frequency_thz,
                wavelength_nm: ch.wavelength_nm(),
                symbol_rate_gbaud: ch.symbol_rate_gbaud,
                launch_dbm: mw_to_dbm(launch[k]),
                fibre_out_dbm: mw_to_dbm(fibre_out[j]),
                net_loss_db: linear_to_db(launch[k] / fibre_out[j]),
                inline_gain_db: first.gains_db[j],
                preamp_gain_db: second.gains_db[j],
                received_dbm: mw_to_dbm(received),
                ase_mw: ase,
                osnr_db,
                snr_trx_db: trx,
                snr_ase_db,
                snr_nli_db,
                snr_total_db,
                shannon_gbps: shannon_rate(snr_total_db, ch.symbol_rate_gbaud),
            });
        }
    }
    channels.sort_by_key(|c| c.index);
    Ok(LinkResult {
        channels,
        evolution,
        events,
    })
}

/// What the receiver would see inside each probe notch of `plan`.
///
/// The in-notch noise is the ASE of both amplifier stages with their gains
/// interpolated from the neighbouring channels; the signal reference is the
/// mean received power of the nearest live channel on each side.
pub fn notch_readings(plan: &ChannelPlan, config: &LinkConfig, result: &LinkResult) -> Result<Vec<NotchReading>> {
    let rx_loss = db_to_linear(-config.receiver_loss_db);
    let mut out = Vec::new();
    for carved in plan.notches.iter().filter(|n| n.purpose == NotchPurpose::OsnrProbe) {
        let band = carved.band;
        let live = result.band(band);
        if live.is_empty() {
            return Err(Error::Validation(format!("notch in band {band} has no live neighbours")));
        }
        let f = carved.notch.center_frequency_thz;
        let freqs: Vec<f64> = live.iter().map(|c| c.frequency_thz).collect();
        let g1: Vec<f64> = live.iter().map(|c| c.inline_gain_db).collect();
        let g2: Vec<f64> = live.iter().map(|c| c.preamp_gain_db).collect();
        let g1 = db_to_linear(interpolate_gain_db(&freqs, &g1, f));
        let g2 = db_to_linear(interpolate_gain_db(&freqs, &g2, f));
        let nf1 = LinkConfig::stage(&config.inline, "inline", band)?.noise_figure_db;
        let nf2 = LinkConfig::stage(&config.preamp, "preamp", band)?.noise_figure_db;
        let psd = ase_power_mw(nf1, g1, f, 1.0) * rx_loss * g2 + ase_power_mw(nf2, g2, f, 1.0);

        let below = live.iter().rev().find(|c| c.frequency_thz < f);
        let above = live.iter().find(|c| c.frequency_thz > f);
        let neighbours: Vec<f64> = below
            .into_iter()
            .chain(above)
            .map(|c| db_to_linear(c.received_dbm))
            .collect();
        out.push(NotchReading {
            band,
            wavelength_nm: crate::units::frequency_to_wavelength(f)?,
            neighbour_signal_mw: neighbours.iter().sum::<f64>() / neighbours.len() as f64,
            noise_psd_mw_per_ghz: psd,
        });
    }
    Ok(out)
}

/// Notch-sweep estimate for `plan`: carves `per_band` one-slot probe
/// notches, simulates the carved plan, reads the notches and interpolates
/// back onto the original plan's channels.
pub fn notch_estimate(plan: &ChannelPlan, config: &LinkConfig, per_band: usize) -> Result<(NotchProbeResult, LinkResult)> {
    let probes = NotchPlan::uniform_probes(plan, per_band, 1);
    let carved = carve_notches(plan, &probes)?;
    let result = simulate(&carved, config)?;
    let readings = notch_readings(&carved, config, &result)?;
    let trx: Vec<(BandName, f64)> = plan.band_names().into_iter().map(|b| (b, config.snr_trx(b))).collect();
    Ok((notch_sweep(plan, &readings, &trx)?, result))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fibre::RamanProfile;
    use crate::spectral::{apply_launch_profile, build_plan, Band, LaunchProfile};

    fn c_band(n: usize) -> ChannelPlan {
        let plan = build_plan(&[Band::new(BandName::C, 1530.0, 1566.0, n)], 32.5, 32.0).unwrap();
        apply_launch_profile(&plan, &LaunchProfile::new(10.0, 0.0)).unwrap()
    }

    fn quiet_config() -> LinkConfig {
        let mut fibre = FibreSpec::ssmf(50.0);
        fibre.raman = RamanProfile::off();
        let mut cfg = LinkConfig::new(fibre, &[BandName::C]);
        cfg.nli = None;
        cfg
    }

    #[test]
    fn inline_stage_restores_launch_power() {
        let plan = c_band(8);
        let mut cfg = quiet_config();
        cfg.preamp_target_dbm = 3.0;
        let res = simulate(&plan, &cfg).unwrap();
        for c in &res.channels {
            assert!((c.launch_dbm - c.net_loss_db - c.fibre_out_dbm).abs() < 1e-9);
            assert!((c.inline_gain_db - c.net_loss_db).abs() < 1e-9);
            assert!((c.received_dbm - 3.0).abs() < 1e-9);
        }
    }

    #[test]
    fn single_stage_osnr_matches_hand_formula() {
        let plan = c_band(4);
        let mut cfg = quiet_config();
        // Pre-amp held transparent: target equal to its input.
        cfg.preamp_target_dbm = plan.channels[0].launch_power_dbm;
        let res = simulate(&plan, &cfg).unwrap();
        let c = &res.channels[0];
        assert!(c.preamp_gain_db.abs() < 1e-9);
        let ase = ase_power_mw(5.0, db_to_linear(c.inline_gain_db), c.frequency_thz, OSNR_REFERENCE_GHZ);
        let expect = c.launch_dbm - mw_to_dbm(ase);
        assert!((c.osnr_db - expect).abs() < 1e-9);
        assert!((c.snr_ase_db - (expect + linear_to_db(12.5 / 32.0))).abs() < 1e-9);
    }

    #[test]
    fn trx_caps_total_snr() {
        let plan = c_band(4);
        let mut cfg = quiet_config();
        cfg.snr_trx_db = alloc::vec![(BandName::C, 23.0)];
        let res = simulate(&plan, &cfg).unwrap();
        for c in &res.channels {
            assert!(c.snr_total_db < 23.0);
            assert!(c.snr_total_db <= c.snr_ase_db);
        }
    }

    #[test]
    fn missing_amplifier_is_a_config_error() {
        let plan = c_band(4);
        let mut cfg = quiet_config();
        cfg.inline.clear();
        assert!(matches!(simulate(&plan, &cfg), Err(Error::Config(_))));
    }

    #[test]
    fn notch_probe_agrees_with_direct_osnr() {
        let plan = c_band(40);
        let cfg = quiet_config();
        let direct = simulate(&plan, &cfg).unwrap();
        let (probe, _) = notch_estimate(&plan, &cfg, 5).unwrap();
        for c in &direct.channels {
            let est = probe.channel_osnr_db[c.index].unwrap();
            assert!((est - c.osnr_db).abs() < 0.2, "{} vs {}", est, c.osnr_db);
        }
    }
}
