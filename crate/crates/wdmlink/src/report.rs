//! Run reports and their CSV mirrors.

use serde::{Deserialize, Serialize};
use wdmlink_core::spectral::BandName;
use wdmlink_core::Event;

use crate::num::{cell, cell_opt};
use crate::scenario::{ScenarioFile, TrimEntry};

pub const TOOL: &str = "wdmlink";
pub const VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub tool: String,
    pub version: String,
    pub command: String,
    pub seed: u64,
    pub scenario: ScenarioFile,
    pub plan: PlanSummary,
    pub channels: Vec<ChannelRow>,
    pub probes: Vec<ProbeRow>,
    pub aggregates: Aggregates,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub throughput: Option<ThroughputSection>,
    pub events: Vec<EventRecord>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PlanSummary {
    pub spacing_ghz: f64,
    pub channels: usize,
    pub active_channels: usize,
    pub occupied_bandwidth_thz: f64,
    #[serde(with = "crate::num::real")]
    pub total_launch_dbm: f64,
    pub bands: Vec<BandLaunch>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BandLaunch {
    pub band: BandName,
    pub channels: usize,
    #[serde(with = "crate::num::real")]
    pub launch_dbm: f64,
}

/// One live channel of the link budget.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChannelRow {
    pub index: usize,
    pub band: BandName,
    pub frequency_thz: f64,
    pub wavelength_nm: f64,
    #[serde(with = "crate::num::real")]
    pub launch_dbm: f64,
    #[serde(with = "crate::num::real")]
    pub fibre_out_dbm: f64,
    #[serde(with = "crate::num::real")]
    pub net_loss_db: f64,
    #[serde(with = "crate::num::real")]
    pub inline_gain_db: f64,
    #[serde(with = "crate::num::real")]
    pub preamp_gain_db: f64,
    #[serde(with = "crate::num::real")]
    pub received_dbm: f64,
    #[serde(with = "crate::num::real")]
    pub osnr_db: f64,
    #[serde(with = "crate::num::real")]
    pub snr_trx_db: f64,
    #[serde(with = "crate::num::real")]
    pub snr_ase_db: f64,
    #[serde(with = "crate::num::real")]
    pub snr_nli_db: f64,
    #[serde(with = "crate::num::real")]
    pub snr_total_db: f64,
    pub shannon_rate_gbps: f64,
    /// From the notch sweep, interpolated to this channel.
    #[serde(with = "crate::num::real_opt")]
    pub notch_osnr_db: Option<f64>,
    #[serde(with = "crate::num::real_opt")]
    pub notch_snr_db: Option<f64>,
}

pub const CHANNEL_HEADER: [&str; 18] = [
    "index",
    "band",
    "center_frequency_THz",
    "wavelength_nm",
    "launch_power_dBm",
    "fibre_out_dBm",
    "net_loss_dB",
    "inline_gain_dB",
    "preamp_gain_dB",
    "received_dBm",
    "osnr_dB",
    "snr_trx_dB",
    "snr_ase_dB",
    "snr_nli_dB",
    "snr_total_dB",
    "shannon_rate_Gbps",
    "notch_osnr_dB",
    "notch_snr_dB",
];

impl ChannelRow {
    pub fn cells(&self) -> Vec<String> {
        vec![
            self.index.to_string(),
            self.band.to_string(),
            cell(self.frequency_thz),
            cell(self.wavelength_nm),
            cell(self.launch_dbm),
            cell(self.fibre_out_dbm),
            cell(self.net_loss_db),
            cell(self.inline_gain_db),
            cell(self.preamp_gain_db),
            cell(self.received_dbm),
            cell(self.osnr_db),
            cell(self.snr_trx_db),
            cell(self.snr_ase_db),
            cell(self.snr_nli_db),
            cell(self.snr_total_db),
            cell(self.shannon_rate_gbps),
            cell_opt(self.notch_osnr_db),
            cell_opt(self.notch_snr_db),
        ]
    }
}

/// One notch of the sweep.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProbeRow {
    pub band: BandName,
    pub wavelength_nm: f64,
    #[serde(with = "crate::num::real")]
    pub osnr_db: f64,
    #[serde(with = "crate::num::real")]
    pub snr_db: f64,
    #[serde(with = "crate::num::real")]
    pub snr_trx_db: f64,
}

pub const PROBE_HEADER: [&str; 4] = ["wavelength_nm", "osnr_dB", "snr_dB", "snr_trx_dB"];

impl ProbeRow {
    pub fn cells(&self) -> Vec<String> {
        vec![
            cell(self.wavelength_nm),
            cell(self.osnr_db),
            cell(self.snr_db),
            cell(self.snr_trx_db),
        ]
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Aggregates {
    pub shannon_tbps: f64,
    pub notch_shannon_tbps: f64,
    pub bands: Vec<BandAggregate>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BandAggregate {
    pub band: BandName,
    pub channels: usize,
    #[serde(with = "crate::num::real")]
    pub mean_net_loss_db: f64,
    #[serde(with = "crate::num::real")]
    pub mean_snr_db: f64,
    #[serde(with = "crate::num::real")]
    pub mean_notch_snr_db: f64,
    pub shannon_tbps: f64,
    pub notch_shannon_tbps: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ThroughputSection {
    pub constellations: Vec<ConstellationInfo>,
    pub channels: Vec<RateRow>,
    pub bands: Vec<BandRates>,
    pub gmi_rate_tbps: f64,
    pub decoded_rate_tbps: f64,
    pub shannon_rate_tbps: f64,
    pub decoded_over_gmi: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConstellationInfo {
    pub band: BandName,
    pub name: String,
    pub points: usize,
    pub bits: u32,
}

/// Rates of one channel: the GMI-based AIR and what the selected code
/// rate delivers after decoding.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RateRow {
    pub index: usize,
    pub band: BandName,
    pub wavelength_nm: f64,
    #[serde(with = "crate::num::real")]
    pub snr_db: f64,
    /// `notch`, `direct` or `override`.
    pub snr_source: String,
    pub gmi_bits: f64,
    pub gmi_rate_gbps: f64,
    #[serde(with = "crate::num::real_opt")]
    pub code_rate: Option<f64>,
    pub decoded_rate_gbps: f64,
    pub shannon_rate_gbps: f64,
}

pub const RATE_HEADER: [&str; 10] = [
    "index",
    "band",
    "wavelength_nm",
    "snr_dB",
    "snr_source",
    "gmi_bits",
    "gmi_rate_Gbps",
    "code_rate",
    "decoded_rate_Gbps",
    "shannon_rate_Gbps",
];

impl RateRow {
    pub fn cells(&self) -> Vec<String> {
        vec![
            self.index.to_string(),
            self.band.to_string(),
            cell(self.wavelength_nm),
            cell(self.snr_db),
            self.snr_source.clone(),
            cell(self.gmi_bits),
            cell(self.gmi_rate_gbps),
            cell_opt(self.code_rate),
            cell(self.decoded_rate_gbps),
            cell(self.shannon_rate_gbps),
        ]
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BandRates {
    pub band: BandName,
    pub channels: usize,
    pub gmi_rate_tbps: f64,
    pub decoded_rate_tbps: f64,
    pub shannon_rate_tbps: f64,
}

/// A pipeline event with the stage that raised it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EventRecord {
    /// `plan`, `link` or `notch-probe`.
    pub stage: String,
    pub message: String,
    pub detail: Event,
}

impl EventRecord {
    pub fn new(stage: &str, event: &Event) -> Self {
        EventRecord {
            stage: stage.to_string(),
            message: event.to_string(),
            detail: event.clone(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OptimizeReport {
    pub tool: String,
    pub version: String,
    pub seed: u64,
    pub scenario: ScenarioFile,
    pub axes: Vec<TrimEntry>,
    pub best: SweepRow,
    pub table: Vec<SweepRow>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub tilt_db: f64,
    pub trims: Vec<usize>,
    pub throughput_tbps: f64,
}

impl SweepRow {
    pub fn cells(&self) -> Vec<String> {
        let mut out = vec![cell(self.tilt_db)];
        out.extend(self.trims.iter().map(usize::to_string));
        out.push(cell(self.throughput_tbps));
        out
    }
}
