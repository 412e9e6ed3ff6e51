//! WDM channel grid, launch-power profiles and WSS notch plans.
//!
//! Frequencies are kept in THz, powers in dBm. Anything that sums powers
//! does so in linear mW.

use alloc::format;
use alloc::vec::Vec;
use core::fmt;

use crate::units::{dbm_to_mw, frequency_to_wavelength, mw_to_dbm, wavelength_to_frequency};
use crate::{Error, Event, Result};

/// Optical band label.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum BandName {
    S,
    C,
    L,
}

impl BandName {
    pub const ALL: [BandName; 3] = [BandName::S, BandName::C, BandName::L];

    pub fn as_str(self) -> &'static str {
        match self {
            BandName::S => "S",
            BandName::C => "C",
            BandName::L => "L",
        }
    }

    pub fn parse(s: &str) -> Option<BandName> {
        match s {
            "S" | "s" => Some(BandName::S),
            "C" | "c" => Some(BandName::C),
            "L" | "l" => Some(BandName::L),
            _ => None,
        }
    }
}

impl fmt::Display for BandName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// A band as declared: nominal wavelength edges plus the authoritative
/// channel count.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Band {
    pub name: BandName,
    pub start_wavelength_nm: f64,
    pub end_wavelength_nm: f64,
    pub channel_count: usize,
}

impl Band {
    pub fn new(name: BandName, start_nm: f64, end_nm: f64, channel_count: usize) -> Self {
        Band {
            name,
            start_wavelength_nm: start_nm,
            end_wavelength_nm: end_nm,
            channel_count,
        }
    }

    /// Frequency interval `(low, high)` in THz spanned by the nominal edges.
    pub fn frequency_range(&self) -> Result<(f64, f64)> {
        Ok((
            wavelength_to_frequency(self.end_wavelength_nm)?,
            wavelength_to_frequency(self.start_wavelength_nm)?,
        ))
    }

    fn validate(&self) -> Result<()> {
        if !(self.start_wavelength_nm < self.end_wavelength_nm) {
            return Err(Error::Validation(format!(
                "band {}: start wavelength {} nm must be below end wavelength {} nm",
                self.name, self.start_wavelength_nm, self.end_wavelength_nm
            )));
        }
        if self.channel_count == 0 {
            return Err(Error::Validation(format!(
                "band {}: channel count must be at least 1",
                self.name
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Channel {
    /// Global index, ascending with frequency.
    pub index: usize,
    pub center_frequency_thz: f64,
    pub band: BandName,
    pub symbol_rate_gbaud: f64,
    /// `-inf` for suppressed channels.
    pub launch_power_dbm: f64,
    pub suppressed: bool,
}

impl Channel {
    pub fn wavelength_nm(&self) -> f64 {
        crate::units::SPEED_OF_LIGHT / self.center_frequency_thz
    }

    pub fn launch_power_mw(&self) -> f64 {
        if self.suppressed {
            0.0
        } else {
            dbm_to_mw(self.launch_power_dbm)
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "kebab-case"))]
pub enum NotchPurpose {
    SignalPlacement,
    OsnrProbe,
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Notch {
    pub center_frequency_thz: f64,
    pub width_ghz: f64,
}

impl Notch {
    fn edges(&self) -> (f64, f64) {
        let half = 0.5 * self.width_ghz * 1e-3;
        (self.center_frequency_thz - half, self.center_frequency_thz + half)
    }
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct NotchPlan {
    pub notches: Vec<Notch>,
    pub purpose: NotchPurpose,
}

impl NotchPlan {
    pub fn empty(purpose: NotchPurpose) -> Self {
        NotchPlan {
            notches: Vec::new(),
            purpose,
        }
    }

    /// `per_band` OSNR probes per band, spread uniformly over the band's
    /// occupied channels (first and last channel included), each
    /// `width_slots` grid slots wide and centred on a channel.
    pub fn uniform_probes(plan: &ChannelPlan, per_band: usize, width_slots: usize) -> NotchPlan {
        let width_ghz = plan.spacing_ghz * width_slots as f64;
        let mut notches = Vec::new();
        for band in plan.band_names() {
            let members: Vec<&Channel> = plan.channels.iter().filter(|c| c.band == band).collect();
            let n = members.len();
            if n == 0 || per_band == 0 {
                continue;
            }
            for k in 0..per_band {
                let pos = if per_band == 1 {
                    n / 2
                } else {
                    libm::round(k as f64 * (n - 1) as f64 / (per_band - 1) as f64) as usize
                };
                notches.push(Notch {
                    center_frequency_thz: members[pos].center_frequency_thz,
                    width_ghz,
                });
            }
        }
        NotchPlan {
            notches,
            purpose: NotchPurpose::OsnrProbe,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct CarvedNotch {
    pub notch: Notch,
    pub purpose: NotchPurpose,
    pub band: BandName,
    /// Indices of the channels the notch suppressed.
    pub channels: Vec<usize>,
}

/// The WDM grid.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ChannelPlan {
    pub bands: Vec<Band>,
    pub spacing_ghz: f64,
    pub channels: Vec<Channel>,
    pub notches: Vec<CarvedNotch>,
    pub warnings: Vec<Event>,
}

/// Launch power profile: a total budget spread with a tilt that is linear in
/// dB versus frequency across the whole occupied spectrum.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct LaunchProfile {
    pub total_power_dbm: f64,
    /// Highest-frequency channel minus lowest-frequency channel, dB.
    pub tilt_db: f64,
    /// Optional per-band trims on top of the tilt line.
    pub band_offsets_db: Vec<(BandName, f64)>,
    pub safety_cap_dbm: Option<f64>,
    pub override_cap: bool,
}

impl LaunchProfile {
    pub fn new(total_power_dbm: f64, tilt_db: f64) -> Self {
        LaunchProfile {
            total_power_dbm,
            tilt_db,
            band_offsets_db: Vec::new(),
            safety_cap_dbm: None,
            override_cap: false,
        }
    }

    pub fn band_offset(&self, band: BandName) -> f64 {
        self.band_offsets_db
            .iter()
            .filter(|(b, _)| *b == band)
            .map(|(_, o)| *o)
            .sum()
    }

    /// Per-band offsets and total such that, together with `tilt_db`, the
    /// per-band launch sums equal `targets_dbm` exactly.
    pub fn calibrated(plan: &ChannelPlan, tilt_db: f64, targets_dbm: &[(BandName, f64)]) -> Result<Self> {
        let shape = tilt_shape(plan, tilt_db);
        let mut offsets = Vec::new();
        let mut total_mw = 0.0;
        for &(band, target) in targets_dbm {
            let sum: f64 = plan
                .channels
                .iter()
                .zip(&shape)
                .filter(|(c, _)| c.band == band && !c.suppressed)
                .map(|(_, s)| dbm_to_mw(*s))
                .sum();
            if sum == 0.0 {
                return Err(Error::Validation(format!("band {band} has no active channels")));
            }
            offsets.push((band, target - mw_to_dbm(sum)));
            total_mw += dbm_to_mw(target);
        }
        Ok(LaunchProfile {
            total_power_dbm: mw_to_dbm(total_mw),
            tilt_db,
            band_offsets_db: offsets,
            safety_cap_dbm: None,
            override_cap: false,
        })
    }
}

fn frequency_extent(plan: &ChannelPlan) -> (f64, f64) {
    let lo = plan.channels.first().map_or(0.0, |c| c.center_frequency_thz);
    let hi = plan.channels.last().map_or(0.0, |c| c.center_frequency_thz);
    (lo, hi)
}

fn tilt_shape(plan: &ChannelPlan, tilt_db: f64) -> Vec<f64> {
    let (lo, hi) = frequency_extent(plan);
    let span = hi - lo;
    plan.channels
        .iter()
        .map(|c| {
            if span > 0.0 {
                tilt_db * (c.center_frequency_thz - lo) / span
            } else {
                0.0
            }
        })
        .collect()
}

/// Builds the grid. Each band holds exactly `channel_count` channels at
/// `spacing_ghz`, the first one sitting on the band's long-wavelength edge.
pub fn build_plan(bands: &[Band], spacing_ghz: f64, symbol_rate_gbaud: f64) -> Result<ChannelPlan> {
    if bands.is_empty() {
        return Err(Error::Validation("channel plan needs at least one band".into()));
    }
    if !(spacing_ghz > 0.0) || !(symbol_rate_gbaud > 0.0) {
        return Err(Error::Validation("spacing and symbol rate must be positive".into()));
    }
    if symbol_rate_gbaud > spacing_ghz {
        return Err(Error::Validation(format!(
            "symbol rate {symbol_rate_gbaud} GBaud exceeds the {spacing_ghz} GHz grid spacing"
        )));
    }
    let spacing_thz = spacing_ghz * 1e-3;
    let mut sorted: Vec<Band> = bands.to_vec();
    for b in &sorted {
        b.validate()?;
    }
    sorted.sort_by(|a, b| b.end_wavelength_nm.total_cmp(&a.end_wavelength_nm));
    for (i, a) in sorted.iter().enumerate() {
        for b in &sorted[i + 1..] {
            let (alo, ahi) = a.frequency_range()?;
            let (blo, bhi) = b.frequency_range()?;
            if alo < bhi && blo < ahi || a.name == b.name {
                return Err(Error::Validation(format!("bands {} and {} overlap", a.name, b.name)));
            }
        }
    }

    let mut channels = Vec::new();
    let mut warnings = Vec::new();
    let mut previous_top: Option<(BandName, f64)> = None;
    for band in &sorted {
        let (lo, hi) = band.frequency_range()?;
        if let Some((prev, top)) = previous_top {
            if lo <= top {
                return Err(Error::Validation(format!(
                    "band {} starts at {lo:.4} THz, inside the channels of band {prev}",
                    band.name
                )));
            }
        }
        let slots = libm::floor((hi - lo) / spacing_thz + 1e-9) as usize + 1;
        if band.channel_count > slots + 1 {
            warnings.push(Event::BandOverfill {
                band: band.name,
                channels: band.channel_count,
                slots_available: slots,
            });
        }
        for k in 0..band.channel_count {
            channels.push(Channel {
                index: 0,
                center_frequency_thz: lo + k as f64 * spacing_thz,
                band: band.name,
                symbol_rate_gbaud,
                launch_power_dbm: 0.0,
                suppressed: false,
            });
        }
        previous_top = Some((band.name, lo + (band.channel_count - 1) as f64 * spacing_thz));
    }
    for (i, c) in channels.iter_mut().enumerate() {
        c.index = i;
    }
    Ok(ChannelPlan {
        bands: sorted,
        spacing_ghz,
        channels,
        notches: Vec::new(),
        warnings,
    })
}

/// Sets every active channel's launch power from `profile`.
pub fn apply_launch_profile(plan: &ChannelPlan, profile: &LaunchProfile) -> Result<ChannelPlan> {
    if plan.channels.is_empty() {
        return Err(Error::Validation("cannot apply a launch profile to an empty plan".into()));
    }
    if let Some(cap) = profile.safety_cap_dbm {
        if profile.total_power_dbm > cap + 1e-12 && !profile.override_cap {
            return Err(Error::PowerCap {
                requested_dbm: profile.total_power_dbm,
                cap_dbm: cap,
            });
        }
    }
    let shape = tilt_shape(plan, profile.tilt_db);
    let mut out = plan.clone();
    let mut sum = 0.0;
    for (c, s) in out.channels.iter_mut().zip(&shape) {
        if c.suppressed {
            continue;
        }
        c.launch_power_dbm = s + profile.band_offset(c.band);
        sum += dbm_to_mw(c.launch_power_dbm);
    }
    if sum == 0.0 {
        return Err(Error::Validation("plan has no active channels".into()));
    }
    let shift = profile.total_power_dbm - mw_to_dbm(sum);
    for c in out.channels.iter_mut().filter(|c| !c.suppressed) {
        c.launch_power_dbm += shift;
    }
    Ok(out)
}

/// Adds `delta_db` of tilt on top of the current powers, keeping the total.
pub fn adjust_tilt(plan: &ChannelPlan, delta_db: f64) -> ChannelPlan {
    let total = plan.total_launch_power_mw();
    let shape = tilt_shape(plan, delta_db);
    let mut out = plan.clone();
    let mut sum = 0.0;
    for (c, s) in out.channels.iter_mut().zip(&shape) {
        if !c.suppressed {
            c.launch_power_dbm += s;
            sum += dbm_to_mw(c.launch_power_dbm);
        }
    }
    if sum > 0.0 {
        let shift = mw_to_dbm(total) - mw_to_dbm(sum);
        for c in out.channels.iter_mut().filter(|c| !c.suppressed) {
            c.launch_power_dbm += shift;
        }
    }
    out
}

/// Suppresses every channel whose signal bandwidth lies inside a notch.
pub fn carve_notches(plan: &ChannelPlan, notch_plan: &NotchPlan) -> Result<ChannelPlan> {
    let mut out = plan.clone();
    let half_slot = 0.5 * plan.spacing_ghz * 1e-3;
    for notch in &notch_plan.notches {
        if !(notch.width_ghz > 0.0) {
            return Err(Error::Validation(format!(
                "notch at {} THz has non-positive width",
                notch.center_frequency_thz
            )));
        }
        let band = plan.band_names().into_iter().find(|&b| {
            let (lo, hi) = plan.band_frequency_span(b);
            notch.center_frequency_thz >= lo - half_slot && notch.center_frequency_thz <= hi + half_slot
        });
        let Some(band) = band else {
            return Err(Error::Validation(format!(
                "notch at {:.4} THz lies outside every occupied band",
                notch.center_frequency_thz
            )));
        };
        let (nlo, nhi) = notch.edges();
        let tol = 1e-9;
        let mut hit = Vec::new();
        for c in out.channels.iter_mut() {
            let half = 0.5 * c.symbol_rate_gbaud * 1e-3;
            if c.center_frequency_thz - half >= nlo - tol && c.center_frequency_thz + half <= nhi + tol {
                c.suppressed = true;
                c.launch_power_dbm = f64::NEG_INFINITY;
                hit.push(c.index);
            }
        }
        out.notches.push(CarvedNotch {
            notch: *notch,
            purpose: notch_plan.purpose,
            band,
            channels: hit,
        });
    }
    Ok(out)
}

impl ChannelPlan {
    pub fn len(&self) -> usize {
        self.channels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.channels.is_empty()
    }

    /// Band names present in the plan, in ascending frequency order.
    pub fn band_names(&self) -> Vec<BandName> {
        let mut names: Vec<BandName> = Vec::new();
        for c in &self.channels {
            if !names.contains(&c.band) {
                names.push(c.band);
            }
        }
        names
    }

    /// Lowest and highest channel frequency of a band, THz.
    pub fn band_frequency_span(&self, band: BandName) -> (f64, f64) {
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for c in self.channels.iter().filter(|c| c.band == band) {
            lo = lo.min(c.center_frequency_thz);
            hi = hi.max(c.center_frequency_thz);
        }
        (lo, hi)
    }

    pub fn active_channels(&self) -> impl Iterator<Item = &Channel> {
        self.channels.iter().filter(|c| !c.suppressed)
    }

    pub fn total_launch_power_mw(&self) -> f64 {
        self.channels.iter().map(Channel::launch_power_mw).sum()
    }

    pub fn total_launch_power_dbm(&self) -> f64 {
        mw_to_dbm(self.total_launch_power_mw())
    }

    /// Linear sum of launch powers per band, in dBm.
    pub fn band_powers_dbm(&self) -> Vec<(BandName, f64)> {
        self.band_names()
            .into_iter()
            .map(|b| {
                let mw: f64 = self.channels.iter().filter(|c| c.band == b).map(Channel::launch_power_mw).sum();
                (b, mw_to_dbm(mw))
            })
            .collect()
    }

    /// Occupied optical bandwidth (channel count times grid spacing), THz.
    pub fn occupied_bandwidth_thz(&self) -> f64 {
        self.channels.len() as f64 * self.spacing_ghz * 1e-3
    }

    /// Actual wavelength edges of each band's channels (short, long), nm.
    pub fn band_wavelength_edges(&self) -> Vec<(BandName, f64, f64)> {
        self.band_names()
            .into_iter()
            .map(|b| {
                let (lo, hi) = self.band_frequency_span(b);
                let short = frequency_to_wavelength(hi).unwrap_or(f64::NAN);
                let long = frequency_to_wavelength(lo).unwrap_or(f64::NAN);
                (b, short, long)
            })
            .collect()
    }

    /// Drops `low` channels from the low-frequency edge and `high` from the
    /// high-frequency edge of `band`, then re-indexes.
    pub fn trimmed(&self, band: BandName, low: usize, high: usize) -> Result<ChannelPlan> {
        let members: Vec<usize> = self
            .channels
            .iter()
            .enumerate()
            .filter(|(_, c)| c.band == band)
            .map(|(i, _)| i)
            .collect();
        if low + high >= members.len() {
            return Err(Error::Validation(format!(
                "trimming {} channels from band {band} leaves it empty",
                low + high
            )));
        }
        let drop: Vec<usize> = members[..low]
            .iter()
            .chain(&members[members.len() - high..])
            .copied()
            .collect();
        let mut out = self.clone();
        out.channels = self
            .channels
            .iter()
            .enumerate()
            .filter(|(i, _)| !drop.contains(i))
            .map(|(_, c)| c.clone())
            .collect();
        for (i, c) in out.channels.iter_mut().enumerate() {
            c.index = i;
        }
        for b in out.bands.iter_mut().filter(|b| b.name == band) {
            b.channel_count -= low + high;
        }
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ndff_bands() -> Vec<Band> {
        alloc::vec![
            Band::new(BandName::S, 1480.0, 1526.0, 187),
            Band::new(BandName::C, 1530.0, 1566.0, 140),
            Band::new(BandName::L, 1572.0, 1615.0, 155),
        ]
    }

    #[test]
    fn ndff_plan_has_482_channels() {
        let plan = build_plan(&ndff_bands(), 32.5, 32.0).unwrap();
        assert_eq!(plan.len(), 482);
        let counts: Vec<usize> = BandName::ALL
            .iter()
            .map(|b| plan.channels.iter().filter(|c| c.band == *b).count())
            .collect();
        assert_eq!(counts, [187, 140, 155]);
        assert!((plan.occupied_bandwidth_thz() - 15.665).abs() < 1e-12);
        assert!(plan.warnings.is_empty(), "{:?}", plan.warnings);
    }

    #[test]
    fn indices_follow_frequency() {
        let plan = build_plan(&ndff_bands(), 32.5, 32.0).unwrap();
        for w in plan.channels.windows(2) {
            assert!(w[0].center_frequency_thz < w[1].center_frequency_thz);
            assert_eq!(w[0].index + 1, w[1].index);
        }
        assert_eq!(plan.channels[0].band, BandName::L);
        assert_eq!(plan.channels[481].band, BandName::S);
    }

    #[test]
    fn single_channel_sits_on_anchor() {
        let plan = build_plan(&[Band::new(BandName::C, 1530.0, 1550.0, 1)], 32.5, 32.0).unwrap();
        assert_eq!(plan.len(), 1);
        let anchor = wavelength_to_frequency(1550.0).unwrap();
        assert_eq!(plan.channels[0].center_frequency_thz, anchor);
    }

    #[test]
    fn overlapping_bands_rejected() {
        let bands = [
            Band::new(BandName::C, 1530.0, 1566.0, 10),
            Band::new(BandName::L, 1560.0, 1600.0, 10),
        ];
        assert!(matches!(build_plan(&bands, 32.5, 32.0), Err(Error::Validation(_))));
    }

    #[test]
    fn symbol_rate_above_spacing_rejected() {
        let bands = [Band::new(BandName::C, 1530.0, 1566.0, 10)];
        assert!(build_plan(&bands, 32.5, 33.0).is_err());
    }

    #[test]
    fn overfilled_band_warns() {
        let plan = build_plan(&[Band::new(BandName::C, 1549.0, 1550.0, 20)], 32.5, 32.0).unwrap();
        assert!(matches!(plan.warnings[0], Event::BandOverfill { channels: 20, .. }));
    }

    #[test]
    fn uniform_split_of_total() {
        let plan = build_plan(&ndff_bands(), 32.5, 32.0).unwrap();
        let plan = apply_launch_profile(&plan, &LaunchProfile::new(20.9, 0.0)).unwrap();
        let expected = 20.9 - 10.0 * libm::log10(482.0);
        assert!((expected + 5.93).abs() < 0.005);
        for c in &plan.channels {
            assert!((c.launch_power_dbm - expected).abs() < 1e-9);
        }
    }

    #[test]
    fn tilt_is_end_to_end_difference() {
        let plan = build_plan(&ndff_bands(), 32.5, 32.0).unwrap();
        let plan = apply_launch_profile(&plan, &LaunchProfile::new(17.0, 5.0)).unwrap();
        let first = plan.channels.first().unwrap().launch_power_dbm;
        let last = plan.channels.last().unwrap().launch_power_dbm;
        assert!((last - first - 5.0).abs() < 1e-9);
        assert!((plan.total_launch_power_dbm() - 17.0).abs() < 1e-9);
    }

    #[test]
    fn safety_cap_needs_override() {
        let plan = build_plan(&ndff_bands(), 32.5, 32.0).unwrap();
        let mut profile = LaunchProfile::new(22.0, 0.0);
        profile.safety_cap_dbm = Some(20.9);
        assert!(matches!(apply_launch_profile(&plan, &profile), Err(Error::PowerCap { .. })));
        profile.override_cap = true;
        assert!(apply_launch_profile(&plan, &profile).is_ok());
    }

    #[test]
    fn calibrated_offsets_hit_band_targets() {
        let plan = build_plan(&ndff_bands(), 32.5, 32.0).unwrap();
        let targets = [(BandName::S, 13.9), (BandName::C, 11.3), (BandName::L, 10.8)];
        let profile = LaunchProfile::calibrated(&plan, 5.0, &targets).unwrap();
        let plan = apply_launch_profile(&plan, &profile).unwrap();
        for (band, dbm) in plan.band_powers_dbm() {
            let want = targets.iter().find(|t| t.0 == band).unwrap().1;
            assert!((dbm - want).abs() < 1e-9, "{band}: {dbm}");
        }
        assert!((plan.total_launch_power_dbm() - 17.0).abs() < 0.01);
    }

    #[test]
    fn three_slot_notch_suppresses_three_channels() {
        let plan = build_plan(&ndff_bands(), 32.5, 32.0).unwrap();
        let centre = plan.channels[241].center_frequency_thz;
        let np = NotchPlan {
            notches: alloc::vec![Notch { center_frequency_thz: centre, width_ghz: 97.5 }],
            purpose: NotchPurpose::SignalPlacement,
        };
        let carved = carve_notches(&plan, &np).unwrap();
        let hit: Vec<usize> = carved.channels.iter().filter(|c| c.suppressed).map(|c| c.index).collect();
        assert_eq!(hit, [240, 241, 242]);
        assert_eq!(carved.notches.len(), 1);
    }

    #[test]
    fn empty_notch_plan_is_identity() {
        let plan = build_plan(&ndff_bands(), 32.5, 32.0).unwrap();
        let carved = carve_notches(&plan, &NotchPlan::empty(NotchPurpose::OsnrProbe)).unwrap();
        assert_eq!(carved, plan);
    }

    #[test]
    fn probes_cover_each_band() {
        let plan = build_plan(&ndff_bands(), 32.5, 32.0).unwrap();
        let probes = NotchPlan::uniform_probes(&plan, 10, 1);
        assert_eq!(probes.notches.len(), 30);
        let carved = carve_notches(&plan, &probes).unwrap();
        assert_eq!(carved.notches.len(), 30);
        assert_eq!(carved.channels.iter().filter(|c| c.suppressed).count(), 30);
    }

    #[test]
    fn notch_outside_bands_rejected() {
        let plan = build_plan(&ndff_bands(), 32.5, 32.0).unwrap();
        let np = NotchPlan {
            notches: alloc::vec![Notch { center_frequency_thz: 170.0, width_ghz: 32.5 }],
            purpose: NotchPurpose::OsnrProbe,
        };
        assert!(carve_notches(&plan, &np).is_err());
    }

    #[test]
    fn trimming_drops_edge_channels() {
        let plan = build_plan(&ndff_bands(), 32.5, 32.0).unwrap();
        let t = plan.trimmed(BandName::S, 0, 4).unwrap();
        assert_eq!(t.len(), 478);
        assert_eq!(t.bands.iter().find(|b| b.name == BandName::S).unwrap().channel_count, 183);
        assert!(plan.trimmed(BandName::C, 100, 40).is_err());
    }
}
