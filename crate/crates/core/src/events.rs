//! Non-fatal conditions recorded while building plans or running the link.

use alloc::string::String;
use core::fmt;

use crate::spectral::BandName;

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(tag = "kind", rename_all = "snake_case"))]
pub enum Event {
    /// More channels requested than fit between the band's wavelength edges.
    BandOverfill {
        band: BandName,
        channels: usize,
        slots_available: usize,
    },
    /// Attenuation queried outside the table; the nearest node was used.
    AttenuationClamped {
        channels: usize,
        min_wavelength_nm: f64,
        max_wavelength_nm: f64,
    },
    /// Per-channel gain limited by the amplifier's maximum gain.
    GainClamped {
        stage: String,
        band: BandName,
        channels: usize,
        max_gain_db: f64,
    },
    /// Total output limited; all channels of the amplifier scaled together.
    OutputClamped {
        stage: String,
        band: BandName,
        requested_dbm: f64,
        limit_dbm: f64,
    },
    /// Channels far enough from the dispersion reference that the
    /// dispersion expansion is doubtful.
    DispersionRange {
        channels: usize,
        max_offset_thz: f64,
    },
}

impl fmt::Display for Event {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Event::BandOverfill {
                band,
                channels,
                slots_available,
            } => write!(
                f,
                "band {band}: {channels} channels requested, {slots_available} slots between the edges"
            ),
            Event::AttenuationClamped {
                channels,
                min_wavelength_nm,
                max_wavelength_nm,
            } => write!(
                f,
                "attenuation clamped to the table edge for {channels} channel(s) in {min_wavelength_nm:.2}-{max_wavelength_nm:.2} nm"
            ),
            Event::GainClamped {
                stage,
                band,
                channels,
                max_gain_db,
            } => write!(
                f,
                "{stage} {band}: gain of {channels} channel(s) clamped at {max_gain_db} dB"
            ),
            Event::OutputClamped {
                stage,
                band,
                requested_dbm,
                limit_dbm,
            } => write!(
                f,
                "{stage} {band}: requested {requested_dbm:.2} dBm output clamped to {limit_dbm:.2} dBm"
            ),
            Event::DispersionRange {
                channels,
                max_offset_thz,
            } => write!(
                f,
                "{channels} channel(s) up to {max_offset_thz:.2} THz from the dispersion reference"
            ),
        }
    }
}
