//! Lumped band amplifiers: gain setting, output clamping and ASE.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use crate::spectral::BandName;
use crate::units::{db_to_linear, linear_to_db, mw_to_dbm, OSNR_REFERENCE_GHZ, PLANCK};
use crate::{Error, Event, Result};

/// Lowest noise figure accepted unless the `AmplifierSpec` lowers `noise_figure_floor_db`.
pub const QUANTUM_LIMIT_NF_DB: f64 = 3.01;

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "kebab-case"))]
pub enum GainMode {
    /// Each channel gets the gain that brings it to its target.
    PerChannelTarget,
    /// Every channel gets the same gain; targets only set its value
    /// (mean target minus mean input, in dB).
    FlatGain,
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct AmplifierSpec {
    /// Label used in events, e.g. "inline" or "preamp".
    pub stage: String,
    pub band: BandName,
    pub noise_figure_db: f64,
    pub max_total_output_dbm: f64,
    pub max_gain_db: f64,
    pub gain_mode: GainMode,
    pub noise_figure_floor_db: f64,
}

impl AmplifierSpec {
    /// TDFA for S, EDFA for C and L, with the default noise figures.
    pub fn default_for(stage: &str, band: BandName) -> Self {
        let (nf, max_out) = match band {
            BandName::S => (7.0, 23.0),
            BandName::C | BandName::L => (5.0, 23.0),
        };
        AmplifierSpec {
            stage: stage.into(),
            band,
            noise_figure_db: nf,
            max_total_output_dbm: max_out,
            max_gain_db: 35.0,
            gain_mode: GainMode::PerChannelTarget,
            noise_figure_floor_db: QUANTUM_LIMIT_NF_DB,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.noise_figure_db >= self.noise_figure_floor_db) || !self.noise_figure_db.is_finite() {
            return Err(Error::Config(format!(
                "{} {} amplifier: noise figure {} dB below the {} dB floor",
                self.band, self.stage, self.noise_figure_db, self.noise_figure_floor_db
            )));
        }
        if !self.max_total_output_dbm.is_finite() {
            return Err(Error::Config(format!(
                "{} {} amplifier: max total output must be finite",
                self.band, self.stage
            )));
        }
        if !(self.max_gain_db >= 0.0) {
            return Err(Error::Config(format!(
                "{} {} amplifier: max gain must be >= 0 dB",
                self.band, self.stage
            )));
        }
        Ok(())
    }
}

/// ASE per channel, in mW within `reference_bandwidth_ghz`.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct AseRecord {
    pub ase_mw: Vec<f64>,
    pub reference_bandwidth_ghz: f64,
}

impl AseRecord {
    pub fn zeros(n: usize, reference_bandwidth_ghz: f64) -> Self {
        AseRecord {
            ase_mw: alloc::vec![0.0; n],
            reference_bandwidth_ghz,
        }
    }

    /// The same noise expressed in another bandwidth (flat PSD assumed).
    pub fn rescaled(&self, bandwidth_ghz: f64) -> AseRecord {
        let k = bandwidth_ghz / self.reference_bandwidth_ghz;
        AseRecord {
            ase_mw: self.ase_mw.iter().map(|a| a * k).collect(),
            reference_bandwidth_ghz: bandwidth_ghz,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Amplified {
    pub output_mw: Vec<f64>,
    pub gains_db: Vec<f64>,
    /// ASE generated by this stage only.
    pub ase: AseRecord,
    pub events: Vec<Event>,
}

/// ASE added by one amplifier in bandwidth `bandwidth_ghz`, mW:
/// 2·(NF/2)·h·f·(G−1)·B over both polarizations.
pub fn ase_power_mw(noise_figure_db: f64, gain_linear: f64, frequency_thz: f64, bandwidth_ghz: f64) -> f64 {
    let nf = db_to_linear(noise_figure_db);
    2.0 * (nf / 2.0) * PLANCK * frequency_thz * 1e12 * (gain_linear - 1.0).max(0.0) * bandwidth_ghz * 1e9 * 1e3
}

/// Sets per-channel gains for one band amplifier.
///
/// Gains are clamped to `[0, max_gain]` dB, then scaled down together when
/// the summed output would exceed `max_total_output_dbm`.
pub fn amplify(
    spec: &AmplifierSpec,
    input_mw: &[f64],
    frequencies_thz: &[f64],
    targets_dbm: &[f64],
    reference_bandwidth_ghz: f64,
) -> Result<Amplified> {
    spec.validate()?;
    if input_mw.len() != targets_dbm.len() || input_mw.len() != frequencies_thz.len() {
        return Err(Error::Validation(format!(
            "{} amplifier: {} inputs, {} frequencies, {} targets",
            spec.band,
            input_mw.len(),
            frequencies_thz.len(),
            targets_dbm.len()
        )));
    }
    if input_mw.iter().any(|p| !(*p > 0.0) || !p.is_finite()) {
        return Err(Error::Validation(format!("{} amplifier: input powers must be positive", spec.band)));
    }
    if targets_dbm.iter().any(|t| !t.is_finite()) {
        return Err(Error::Validation(format!("{} amplifier: targets must be finite", spec.band)));
    }
    let mut events = Vec::new();
    let n = input_mw.len();
    let mut gains_db: Vec<f64> = match spec.gain_mode {
        GainMode::PerChannelTarget => input_mw
            .iter()
            .zip(targets_dbm)
            .map(|(p, t)| t - mw_to_dbm(*p))
            .collect(),
        GainMode::FlatGain if n > 0 => {
            let mean_in: f64 = input_mw.iter().map(|p| mw_to_dbm(*p)).sum::<f64>() / n as f64;
            let mean_target: f64 = targets_dbm.iter().sum::<f64>() / n as f64;
            alloc::vec![mean_target - mean_in; n]
        }
        GainMode::FlatGain => Vec::new(),
    };

    let mut clamped = 0;
    for g in gains_db.iter_mut() {
        if *g > spec.max_gain_db {
            *g = spec.max_gain_db;
            clamped += 1;
        } else if *g < 0.0 {
            *g = 0.0;
            clamped += 1;
        }
    }
    if clamped > 0 {
        events.push(Event::GainClamped {
            stage: spec.stage.clone(),
            band: spec.band,
            channels: clamped,
            max_gain_db: spec.max_gain_db,
        });
    }

    let total: f64 = input_mw.iter().zip(&gains_db).map(|(p, g)| p * db_to_linear(*g)).sum();
    if n > 0 && mw_to_dbm(total) > spec.max_total_output_dbm {
        let requested = mw_to_dbm(total);
        let shift = spec.max_total_output_dbm - requested;
        gains_db.iter_mut().for_each(|g| *g += shift);
        events.push(Event::OutputClamped {
            stage: spec.stage.clone(),
            band: spec.band,
            requested_dbm: requested,
            limit_dbm: spec.max_total_output_dbm,
        });
    }

    let output_mw = input_mw.iter().zip(&gains_db).map(|(p, g)| p * db_to_linear(*g)).collect();
    let ase_mw = gains_db
        .iter()
        .zip(frequencies_thz)
        .map(|(g, f)| ase_power_mw(spec.noise_figure_db, db_to_linear(*g), *f, reference_bandwidth_ghz))
        .collect();
    Ok(Amplified {
        output_mw,
        gains_db,
        ase: AseRecord {
            ase_mw,
            reference_bandwidth_ghz,
        },
        events,
    })
}

/// OSNR in dB with the noise referred to 12.5 GHz; `+∞` when there is no ASE.
pub fn osnr(signal_mw: &[f64], ase: &AseRecord) -> Vec<f64> {
    let k = OSNR_REFERENCE_GHZ / ase.reference_bandwidth_ghz;
    signal_mw
        .iter()
        .zip(&ase.ase_mw)
        .map(|(s, a)| if *a > 0.0 { linear_to_db(s / (a * k)) } else { f64::INFINITY })
        .collect()
}

/// Linear interpolation of a gain profile (ascending frequencies), held
/// constant beyond the ends. Used for the ASE inside carved notches.
pub fn interpolate_gain_db(frequencies_thz: &[f64], gains_db: &[f64], f: f64) -> f64 {
    match frequencies_thz.len() {
        0 => 0.0,
        1 => gains_db[0],
        n => {
            if f <= frequencies_thz[0] {
                return gains_db[0];
            }
            if f >= frequencies_thz[n - 1] {
                return gains_db[n - 1];
            }
            let k = frequencies_thz.partition_point(|x| *x <= f);
            let (f0, f1) = (frequencies_thz[k - 1], frequencies_thz[k]);
            gains_db[k - 1] + (gains_db[k] - gains_db[k - 1]) * (f - f0) / (f1 - f0)
        }
    }
}
