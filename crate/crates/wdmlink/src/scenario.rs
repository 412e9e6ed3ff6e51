//! Scenario files: one TOML (or JSON) document drives every subcommand.
//!
//! Relative paths are taken from the scenario's directory and must exist
//! when the file is loaded. After loading, every optional value is filled
//! in, so [`Scenario::echo`] is a complete scenario that reproduces the run.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use wdmlink_core::amplifier::{AmplifierSpec, GainMode};
use wdmlink_core::fibre::{default_attenuation_table, FibreSpec, PointLoss, RamanProfile, RamanShape};
use wdmlink_core::gmi::{self, default_rate_grid, Constellation, FecModel, DEFAULT_IMPLEMENTATION_PENALTY};
use wdmlink_core::link::LinkConfig;
use wdmlink_core::nli::{NliParams, SpmModel};
use wdmlink_core::spectral::{apply_launch_profile, build_plan, Band, BandName, ChannelPlan, LaunchProfile};
use wdmlink_core::tilt::{Edge, Objective, TiltScenario, TrimAxis, DEFAULT_GRID_LIMIT};

use crate::error::{AtStage, Error, Result, Stage};
use crate::io::read_plan_csv;

/// One optional value per band, written as `{ S = .., C = .., L = .. }`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PerBand<T> {
    #[serde(rename = "S", default, skip_serializing_if = "Option::is_none")]
    pub s: Option<T>,
    #[serde(rename = "C", default, skip_serializing_if = "Option::is_none")]
    pub c: Option<T>,
    #[serde(rename = "L", default, skip_serializing_if = "Option::is_none")]
    pub l: Option<T>,
}

impl<T> Default for PerBand<T> {
    fn default() -> Self {
        PerBand { s: None, c: None, l: None }
    }
}

impl<T> PerBand<T> {
    pub fn get(&self, band: BandName) -> Option<&T> {
        match band {
            BandName::S => self.s.as_ref(),
            BandName::C => self.c.as_ref(),
            BandName::L => self.l.as_ref(),
        }
    }

    pub fn slot(&mut self, band: BandName) -> &mut Option<T> {
        match band {
            BandName::S => &mut self.s,
            BandName::C => &mut self.c,
            BandName::L => &mut self.l,
        }
    }

    pub fn is_empty(&self) -> bool {
        self.s.is_none() && self.c.is_none() && self.l.is_none()
    }

    /// Present entries in S, C, L order.
    pub fn entries(&self) -> Vec<(BandName, &T)> {
        BandName::ALL.into_iter().filter_map(|b| self.get(b).map(|v| (b, v))).collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioFile {
    #[serde(default = "default_seed")]
    pub seed: u64,
    pub plan: PlanSection,
    #[serde(default)]
    pub launch: LaunchSection,
    pub fibre: FibreSection,
    #[serde(default)]
    pub amplifiers: AmplifierSection,
    #[serde(default)]
    pub nli: NliSection,
    #[serde(default)]
    pub snr: SnrSection,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gmi: Option<GmiSection>,
    #[serde(default)]
    pub fec: FecSection,
    #[serde(default)]
    pub optimizer: OptimizerSection,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output: Option<OutputSection>,
}

fn default_seed() -> u64 {
    1
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PlanSection {
    #[serde(default = "default_spacing")]
    pub spacing_ghz: f64,
    #[serde(default = "default_symbol_rate")]
    pub symbol_rate_gbaud: f64,
    /// A plan CSV to use instead of building the grid from `bands`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub csv: Option<String>,
    #[serde(default)]
    pub bands: Vec<BandEntry>,
}

fn default_spacing() -> f64 {
    32.5
}

fn default_symbol_rate() -> f64 {
    32.0
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BandEntry {
    pub name: BandName,
    pub start_nm: f64,
    pub end_nm: f64,
    pub channels: usize,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct LaunchSection {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub total_dbm: Option<f64>,
    pub tilt_db: f64,
    /// Target launch power per band; offsets are solved so each band sums
    /// to its target at the configured tilt.
    #[serde(skip_serializing_if = "PerBand::is_empty")]
    pub band_dbm: PerBand<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub safety_cap_dbm: Option<f64>,
    pub override_cap: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FibreSection {
    pub length_km: f64,
    #[serde(default = "default_area")]
    pub effective_area_um2: f64,
    #[serde(default = "default_step")]
    pub step_km: f64,
    /// `[wavelength nm, dB/km]` pairs.
    #[serde(default = "default_attenuation")]
    pub attenuation: Vec<[f64; 2]>,
    #[serde(default)]
    pub raman: RamanSection,
    #[serde(default)]
    pub point_losses: Vec<PointLossEntry>,
}

fn default_area() -> f64 {
    80.0
}

fn default_step() -> f64 {
    0.1
}

fn default_attenuation() -> Vec<[f64; 2]> {
    default_attenuation_table().into_iter().map(|(w, a)| [w, a]).collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RamanSection {
    pub enabled: bool,
    pub slope: f64,
    pub peak_shift_thz: f64,
    pub falloff_thz: f64,
    pub reference_area_um2: f64,
    /// `[offset THz, gain 1/(W km)]` pairs; replaces the triangle when set.
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub table: Vec<[f64; 2]>,
}

impl Default for RamanSection {
    fn default() -> Self {
        let p = RamanProfile::default();
        RamanSection {
            enabled: true,
            slope: p.slope,
            peak_shift_thz: p.peak_shift_thz,
            falloff_thz: p.falloff_thz,
            reference_area_um2: p.reference_area_um2,
            table: Vec::new(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PointLossEntry {
    pub position_km: f64,
    pub loss_db: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct AmplifierSection {
    pub receiver_loss_db: f64,
    pub preamp_target_dbm: f64,
    #[serde(rename = "S", skip_serializing_if = "Option::is_none")]
    pub s: Option<AmplifierEntry>,
    #[serde(rename = "C", skip_serializing_if = "Option::is_none")]
    pub c: Option<AmplifierEntry>,
    #[serde(rename = "L", skip_serializing_if = "Option::is_none")]
    pub l: Option<AmplifierEntry>,
}

impl Default for AmplifierSection {
    fn default() -> Self {
        AmplifierSection {
            receiver_loss_db: 0.0,
            preamp_target_dbm: 0.0,
            s: None,
            c: None,
            l: None,
        }
    }
}

impl AmplifierSection {
    fn band_mut(&mut self, band: BandName) -> &mut Option<AmplifierEntry> {
        match band {
            BandName::S => &mut self.s,
            BandName::C => &mut self.c,
            BandName::L => &mut self.l,
        }
    }

    pub fn band(&self, band: BandName) -> Option<&AmplifierEntry> {
        match band {
            BandName::S => self.s.as_ref(),
            BandName::C => self.c.as_ref(),
            BandName::L => self.l.as_ref(),
        }
    }
}

/// In-line amplifier and pre-amplifier of one band. Missing values take
/// the band's defaults (TDFA for S, EDFA for C and L); the pre-amplifier
/// noise figure defaults to the in-line one.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct AmplifierEntry {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub noise_figure_db: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub preamp_noise_figure_db: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub max_output_dbm: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub max_gain_db: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub gain_mode: Option<GainMode>,
}

impl AmplifierEntry {
    fn fill(&mut self, band: BandName) {
        let d = AmplifierSpec::default_for("inline", band);
        let nf = *self.noise_figure_db.get_or_insert(d.noise_figure_db);
        self.preamp_noise_figure_db.get_or_insert(nf);
        self.max_output_dbm.get_or_insert(d.max_total_output_dbm);
        self.max_gain_db.get_or_insert(d.max_gain_db);
        self.gain_mode.get_or_insert(d.gain_mode);
    }

    fn spec(&self, stage: &str, band: BandName) -> AmplifierSpec {
        let mut spec = AmplifierSpec::default_for(stage, band);
        let mut e = self.clone();
        e.fill(band);
        spec.noise_figure_db = if stage == "preamp" {
            e.preamp_noise_figure_db.unwrap_or(spec.noise_figure_db)
        } else {
            e.noise_figure_db.unwrap_or(spec.noise_figure_db)
        };
        spec.max_total_output_dbm = e.max_output_dbm.unwrap_or(spec.max_total_output_dbm);
        spec.max_gain_db = e.max_gain_db.unwrap_or(spec.max_gain_db);
        spec.gain_mode = e.gain_mode.unwrap_or(spec.gain_mode);
        spec
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct NliSection {
    pub enabled: bool,
    pub gamma: f64,
    pub dispersion: f64,
    pub dispersion_slope: f64,
    pub reference_wavelength_nm: f64,
    pub spans: u32,
    pub spm_model: SpmModel,
}

impl Default for NliSection {
    fn default() -> Self {
        let p = NliParams::default();
        NliSection {
            enabled: true,
            gamma: p.gamma,
            dispersion: p.dispersion,
            dispersion_slope: p.dispersion_slope,
            reference_wavelength_nm: p.reference_wavelength_nm,
            spans: p.span_count,
            spm_model: p.spm_model,
        }
    }
}

/// Which per-channel SNR feeds the throughput stage.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SnrSource {
    /// Interpolated from the notch probes.
    #[default]
    Notch,
    /// The simulated per-channel budget.
    Direct,
}

impl SnrSource {
    pub fn as_str(self) -> &'static str {
        match self {
            SnrSource::Notch => "notch",
            SnrSource::Direct => "direct",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SnrSection {
    #[serde(skip_serializing_if = "PerBand::is_empty")]
    pub transceiver_db: PerBand<f64>,
    pub probes_per_band: usize,
    pub source: SnrSource,
    /// Flat SNR per band, replacing `source` for that band.
    #[serde(skip_serializing_if = "PerBand::is_empty")]
    pub override_db: PerBand<f64>,
}

impl Default for SnrSection {
    fn default() -> Self {
        SnrSection {
            transceiver_db: PerBand::default(),
            probes_per_band: 10,
            source: SnrSource::default(),
            override_db: PerBand::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct GmiSection {
    pub samples: usize,
    pub step_db: f64,
    /// Built-in name (`qpsk`, `qam16`, `64-qam`, ...) or constellation file.
    pub constellations: PerBand<String>,
}

impl Default for GmiSection {
    fn default() -> Self {
        GmiSection {
            samples: 200_000,
            step_db: 0.25,
            constellations: PerBand::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct FecSection {
    pub pilot_overhead: f64,
    pub outer_overhead: f64,
    pub implementation_penalty: f64,
    pub rates: Vec<f64>,
}

impl Default for FecSection {
    fn default() -> Self {
        let f = FecModel::default();
        FecSection {
            pilot_overhead: f.pilot_overhead,
            outer_overhead: f.outer_overhead,
            implementation_penalty: DEFAULT_IMPLEMENTATION_PENALTY,
            rates: default_rate_grid(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct OptimizerSection {
    pub tilts_db: Vec<f64>,
    pub objective: Objective,
    pub grid_limit: usize,
    pub trims: Vec<TrimEntry>,
}

impl Default for OptimizerSection {
    fn default() -> Self {
        let t = TiltScenario::default();
        OptimizerSection {
            tilts_db: t.tilts_db,
            objective: t.objective,
            grid_limit: DEFAULT_GRID_LIMIT,
            trims: t
                .trims
                .into_iter()
                .map(|a| TrimEntry {
                    band: a.band,
                    edge: a.edge,
                    options: a.options,
                })
                .collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TrimEntry {
    pub band: BandName,
    pub edge: Edge,
    pub options: Vec<usize>,
}

impl TrimEntry {
    /// Column name in the sweep CSV, e.g. `trim_S_high`.
    pub fn column(&self) -> String {
        let edge = match self.edge {
            Edge::LowFrequency => "low",
            Edge::HighFrequency => "high",
        };
        format!("trim_{}_{edge}", self.band)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
    #[default]
    Both,
}

impl Format {
    pub fn csv(self) -> bool {
        matches!(self, Format::Csv | Format::Both)
    }

    pub fn json(self) -> bool {
        matches!(self, Format::Json | Format::Both)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct OutputSection {
    pub dir: String,
    pub format: Format,
}

impl Default for OutputSection {
    fn default() -> Self {
        OutputSection {
            dir: "out".into(),
            format: Format::Both,
        }
    }
}

/// A loaded, validated scenario.
#[derive(Debug, Clone)]
pub struct Scenario {
    pub file: ScenarioFile,
    pub path: PathBuf,
    /// Grid before launch powers (or the CSV plan as read).
    base: ChannelPlan,
    plan: ChannelPlan,
    launch: LaunchProfile,
    constellations: Vec<(BandName, Constellation)>,
}

impl Scenario {
    /// Reads a `.toml` or `.json` scenario.
    pub fn load(path: &Path) -> Result<Scenario> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(Stage::Scenario, path, e))?;
        let file: ScenarioFile = if path.extension().is_some_and(|e| e == "json") {
            serde_json::from_str(&text).map_err(|e| Error::parse(path, e.to_string()))?
        } else {
            toml::from_str(&text).map_err(|e| Error::parse(path, e.to_string().trim_end().to_string()))?
        };
        let dir = path.parent().map(Path::to_path_buf).unwrap_or_default();
        Scenario::from_file(file, &dir, path)
    }

    /// Validates `file`, resolving relative paths against `dir`.
    pub fn from_file(mut file: ScenarioFile, dir: &Path, path: &Path) -> Result<Scenario> {
        if let Some(csv) = &file.plan.csv {
            file.plan.csv = Some(existing(dir, csv, "plan.csv")?);
        }
        let base = match &file.plan.csv {
            Some(csv) => read_plan_csv(Path::new(csv), &file.plan)?,
            None => {
                if file.plan.bands.is_empty() {
                    return Err(Error::invalid(Stage::Plan, "plan needs at least one [[plan.bands]] entry or a csv file"));
                }
                let bands: Vec<Band> = file
                    .plan
                    .bands
                    .iter()
                    .map(|b| Band::new(b.name, b.start_nm, b.end_nm, b.channels))
                    .collect();
                build_plan(&bands, file.plan.spacing_ghz, file.plan.symbol_rate_gbaud).at(Stage::Plan)?
            }
        };
        let present = base.band_names();

        let launch = launch_profile(&file.launch, &base, &present)?;
        let plan = if file.plan.csv.is_some() {
            check_cap(&launch, &base)?;
            base.clone()
        } else {
            apply_launch_profile(&base, &launch).at(Stage::Plan)?
        };

        for &band in &present {
            file.amplifiers.band_mut(band).get_or_insert_with(AmplifierEntry::default).fill(band);
        }
        let mut constellations = Vec::new();
        if let Some(g) = &mut file.gmi {
            for band in BandName::ALL {
                let Some(name) = g.constellations.slot(band).clone() else { continue };
                let (resolved, c) = load_constellation(dir, &name, band)?;
                *g.constellations.slot(band) = Some(resolved);
                constellations.push((band, c));
            }
        }

        let sc = Scenario {
            file,
            path: path.to_path_buf(),
            base,
            plan,
            launch,
            constellations,
        };
        sc.link_config().validate().at(Stage::Scenario)?;
        sc.fec().validate().at(Stage::Scenario)?;
        sc.tilt_scenario().validate().at(Stage::Scenario)?;
        if sc.file.snr.probes_per_band < 2 {
            return Err(Error::invalid(Stage::Scenario, "snr.probes_per_band must be at least 2"));
        }
        if let Some(g) = &sc.file.gmi {
            if g.samples == 0 || !(g.step_db > 0.0) {
                return Err(Error::invalid(Stage::Scenario, "gmi.samples and gmi.step_db must be positive"));
            }
        }
        Ok(sc)
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.file.seed = seed;
        self
    }

    pub fn seed(&self) -> u64 {
        self.file.seed
    }

    /// The scenario with every default filled in and paths absolute. The
    /// output section is left out: where results go is not part of them.
    pub fn echo(&self) -> ScenarioFile {
        ScenarioFile {
            output: None,
            ..self.file.clone()
        }
    }

    /// Grid before the launch profile (the plan CSV when one is given).
    pub fn base_plan(&self) -> &ChannelPlan {
        &self.base
    }

    /// Grid with launch powers set.
    pub fn plan(&self) -> &ChannelPlan {
        &self.plan
    }

    pub fn launch(&self) -> &LaunchProfile {
        &self.launch
    }

    pub fn constellations(&self) -> &[(BandName, Constellation)] {
        &self.constellations
    }

    /// Output directory and format, command-line values first.
    pub fn output(&self, out: Option<&Path>, format: Option<Format>) -> (PathBuf, Format) {
        let section = self.file.output.clone().unwrap_or_default();
        let dir = match out {
            Some(p) => p.to_path_buf(),
            None => {
                let base = self.path.parent().map(Path::to_path_buf).unwrap_or_default();
                base.join(&section.dir)
            }
        };
        (dir, format.unwrap_or(section.format))
    }

    pub fn fibre(&self) -> FibreSpec {
        let f = &self.file.fibre;
        let r = &f.raman;
        let tabulated = r.enabled && !r.table.is_empty();
        let raman = RamanProfile {
            slope: if r.enabled { r.slope } else { 0.0 },
            peak_shift_thz: r.peak_shift_thz,
            falloff_thz: r.falloff_thz,
            shape: if tabulated { RamanShape::Tabulated } else { RamanShape::Triangular },
            table: if tabulated { r.table.iter().map(|p| (p[0], p[1])).collect() } else { Vec::new() },
            reference_area_um2: r.reference_area_um2,
        };
        FibreSpec {
            length_km: f.length_km,
            attenuation_table: f.attenuation.iter().map(|p| (p[0], p[1])).collect(),
            effective_area_um2: f.effective_area_um2,
            raman,
            point_losses: f
                .point_losses
                .iter()
                .map(|p| PointLoss {
                    position_km: p.position_km,
                    loss_db: p.loss_db,
                })
                .collect(),
        }
    }

    pub fn link_config(&self) -> LinkConfig {
        let bands = self.base.band_names();
        let mut cfg = LinkConfig::new(self.fibre(), &bands);
        let a = &self.file.amplifiers;
        cfg.step_km = self.file.fibre.step_km;
        cfg.receiver_loss_db = a.receiver_loss_db;
        cfg.preamp_target_dbm = a.preamp_target_dbm;
        let entry = |b: BandName| a.band(b).cloned().unwrap_or_default();
        cfg.inline = bands.iter().map(|&b| entry(b).spec("inline", b)).collect();
        cfg.preamp = bands.iter().map(|&b| entry(b).spec("preamp", b)).collect();
        let n = &self.file.nli;
        cfg.nli = n.enabled.then(|| NliParams {
            gamma: n.gamma,
            dispersion: n.dispersion,
            dispersion_slope: n.dispersion_slope,
            reference_wavelength_nm: n.reference_wavelength_nm,
            span_count: n.spans,
            spm_model: n.spm_model,
        });
        cfg.snr_trx_db = self.file.snr.transceiver_db.entries().into_iter().map(|(b, v)| (b, *v)).collect();
        cfg
    }

    pub fn fec(&self) -> FecModel {
        let f = &self.file.fec;
        FecModel {
            rate_grid: f.rates.clone(),
            pilot_overhead: f.pilot_overhead,
            outer_overhead: f.outer_overhead,
            implementation_penalty: f.implementation_penalty,
        }
    }

    pub fn tilt_scenario(&self) -> TiltScenario {
        let o = &self.file.optimizer;
        TiltScenario {
            tilts_db: o.tilts_db.clone(),
            trims: o
                .trims
                .iter()
                .map(|t| TrimAxis {
                    band: t.band,
                    edge: t.edge,
                    options: t.options.clone(),
                })
                .collect(),
            objective: o.objective,
            grid_limit: o.grid_limit,
        }
    }
}

fn launch_profile(section: &LaunchSection, base: &ChannelPlan, present: &[BandName]) -> Result<LaunchProfile> {
    let mut profile = if !section.band_dbm.is_empty() {
        for (band, _) in section.band_dbm.entries() {
            if !present.contains(&band) {
                return Err(Error::invalid(Stage::Scenario, format!("launch.band_dbm names band {band}, which the plan lacks")));
            }
        }
        let targets: Vec<(BandName, f64)> = present
            .iter()
            .map(|&b| {
                section
                    .band_dbm
                    .get(b)
                    .map(|v| (b, *v))
                    .ok_or_else(|| Error::invalid(Stage::Scenario, format!("launch.band_dbm has no entry for band {b}")))
            })
            .collect::<Result<_>>()?;
        let p = LaunchProfile::calibrated(base, section.tilt_db, &targets).at(Stage::Plan)?;
        if let Some(total) = section.total_dbm {
            if (p.total_power_dbm - total).abs() > 0.05 {
                return Err(Error::invalid(
                    Stage::Scenario,
                    format!(
                        "launch.band_dbm sums to {:.3} dBm but launch.total_dbm is {total} dBm",
                        p.total_power_dbm
                    ),
                ));
            }
        }
        p
    } else if let Some(total) = section.total_dbm {
        LaunchProfile::new(total, section.tilt_db)
    } else if base.channels.iter().any(|c| !c.suppressed && c.launch_power_dbm.is_finite()) {
        // Plan CSV with its own powers.
        LaunchProfile::new(base.total_launch_power_dbm(), section.tilt_db)
    } else {
        return Err(Error::invalid(Stage::Scenario, "launch needs total_dbm or band_dbm"));
    };
    profile.safety_cap_dbm = section.safety_cap_dbm;
    profile.override_cap = section.override_cap;
    Ok(profile)
}

fn check_cap(launch: &LaunchProfile, plan: &ChannelPlan) -> Result<()> {
    if let Some(cap) = launch.safety_cap_dbm {
        let total = plan.total_launch_power_dbm();
        if total > cap + 1e-12 && !launch.override_cap {
            return Err(Error::new(
                Stage::Plan,
                wdmlink_core::Error::PowerCap {
                    requested_dbm: total,
                    cap_dbm: cap,
                },
            ));
        }
    }
    Ok(())
}

fn existing(dir: &Path, name: &str, key: &str) -> Result<String> {
    let p = dir.join(name);
    let abs = std::fs::canonicalize(&p)
        .map_err(|e| Error::invalid(Stage::Scenario, format!("{key}: {}: {e}", p.display())))?;
    Ok(abs.to_string_lossy().into_owned())
}

fn load_constellation(dir: &Path, name: &str, band: BandName) -> Result<(String, Constellation)> {
    if let Some(c) = gmi::builtin(name) {
        return Ok((name.to_string(), c));
    }
    let path = existing(dir, name, &format!("gmi.constellations.{band}"))?;
    let text = std::fs::read_to_string(&path).map_err(|e| Error::io(Stage::Scenario, &path, e))?;
    let stem = Path::new(&path)
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| name.to_string());
    let c = Constellation::parse(&stem, &text).map_err(|e| Error::parse(&path, e.to_string()))?;
    Ok((path, c))
}
