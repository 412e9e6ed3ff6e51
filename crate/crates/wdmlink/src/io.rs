//! CSV and JSON files. CSV uses comma separators, a header row, LF line
//! endings and shortest round-trip decimals, so files are byte-stable.

use std::path::{Path, PathBuf};

use serde::Serialize;
use wdmlink_core::spectral::{Band, BandName, Channel, ChannelPlan};
use wdmlink_core::units::SPEED_OF_LIGHT;

use crate::error::{Error, ErrorKind, Result, Stage};
use crate::num::cell;
use crate::scenario::PlanSection;

pub const PLAN_HEADER: [&str; 6] = [
    "index",
    "band",
    "center_frequency_THz",
    "wavelength_nm",
    "launch_power_dBm",
    "suppressed",
];

/// Writes a CSV table, creating parent directories as needed.
pub fn write_csv(stage: Stage, path: &Path, header: &[&str], rows: &[Vec<String>]) -> Result<PathBuf> {
    ensure_parent(stage, path)?;
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_path(path)
        .map_err(|e| csv_error(stage, path, e))?;
    w.write_record(header).map_err(|e| csv_error(stage, path, e))?;
    for r in rows {
        w.write_record(r).map_err(|e| csv_error(stage, path, e))?;
    }
    w.flush().map_err(|e| Error::io(stage, path, e))?;
    Ok(path.to_path_buf())
}

/// Pretty JSON with a trailing newline.
pub fn write_json<T: Serialize>(stage: Stage, path: &Path, value: &T) -> Result<PathBuf> {
    ensure_parent(stage, path)?;
    let mut text = serde_json::to_string_pretty(value).map_err(|e| Error::new(stage, ErrorKind::Format(e.to_string())))?;
    text.push('\n');
    std::fs::write(path, text).map_err(|e| Error::io(stage, path, e))?;
    Ok(path.to_path_buf())
}

pub fn write_text(stage: Stage, path: &Path, text: &str) -> Result<PathBuf> {
    ensure_parent(stage, path)?;
    std::fs::write(path, text).map_err(|e| Error::io(stage, path, e))?;
    Ok(path.to_path_buf())
}

fn ensure_parent(stage: Stage, path: &Path) -> Result<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir).map_err(|e| Error::io(stage, dir, e))?;
    }
    Ok(())
}

fn csv_error(stage: Stage, path: &Path, e: csv::Error) -> Error {
    Error::new(stage, ErrorKind::Format(format!("{}: {e}", path.display())))
}

pub fn plan_rows(plan: &ChannelPlan) -> Vec<Vec<String>> {
    plan.channels
        .iter()
        .map(|c| {
            vec![
                c.index.to_string(),
                c.band.to_string(),
                cell(c.center_frequency_thz),
                cell(c.wavelength_nm()),
                cell(c.launch_power_dbm),
                if c.suppressed { "1" } else { "0" }.to_string(),
            ]
        })
        .collect()
}

/// Reads a plan CSV. Band edges come from `section.bands` when given
/// (counts must match), otherwise from the channels themselves.
pub fn read_plan_csv(path: &Path, section: &PlanSection) -> Result<ChannelPlan> {
    let bad = |line: u64, msg: String| Error::parse(path, format!("line {line}: {msg}"));
    let mut r = csv::ReaderBuilder::new()
        .has_headers(true)
        .from_path(path)
        .map_err(|e| Error::parse(path, e.to_string()))?;
    let header: Vec<String> = r
        .headers()
        .map_err(|e| Error::parse(path, e.to_string()))?
        .iter()
        .map(str::to_string)
        .collect();
    if header != PLAN_HEADER {
        return Err(bad(1, format!("expected header {}", PLAN_HEADER.join(","))));
    }
    let mut channels: Vec<Channel> = Vec::new();
    for rec in r.records() {
        let rec = rec.map_err(|e| Error::parse(path, e.to_string()))?;
        let line = rec.position().map_or(0, |p| p.line());
        if rec.len() != PLAN_HEADER.len() {
            return Err(bad(line, format!("expected {} fields, found {}", PLAN_HEADER.len(), rec.len())));
        }
        let num = |k: usize| -> Result<f64> {
            rec[k]
                .trim()
                .parse::<f64>()
                .map_err(|_| bad(line, format!("{}: bad number \"{}\"", PLAN_HEADER[k], &rec[k])))
        };
        let index: usize = rec[0]
            .trim()
            .parse()
            .map_err(|_| bad(line, format!("bad index \"{}\"", &rec[0])))?;
        if index != channels.len() {
            return Err(bad(line, format!("index {index} out of sequence (expected {})", channels.len())));
        }
        let band = BandName::parse(rec[1].trim()).ok_or_else(|| bad(line, format!("unknown band \"{}\"", &rec[1])))?;
        let f = num(2)?;
        if !(f > 0.0) || !f.is_finite() {
            return Err(bad(line, format!("frequency {f} THz must be positive")));
        }
        if let Some(prev) = channels.last() {
            if !(f > prev.center_frequency_thz) {
                return Err(bad(line, "frequencies must ascend with the index".into()));
            }
        }
        let wl = num(3)?;
        if (wl - SPEED_OF_LIGHT / f).abs() > 1e-6 * wl.abs() {
            return Err(bad(line, format!("wavelength {wl} nm does not match {f} THz")));
        }
        let suppressed = match rec[5].trim() {
            "0" => false,
            "1" => true,
            other => return Err(bad(line, format!("suppressed must be 0 or 1, found \"{other}\""))),
        };
        let launch = num(4)?;
        if !suppressed && !launch.is_finite() {
            return Err(bad(line, format!("active channel has launch power {launch}")));
        }
        channels.push(Channel {
            index,
            center_frequency_thz: f,
            band,
            symbol_rate_gbaud: section.symbol_rate_gbaud,
            launch_power_dbm: if suppressed { f64::NEG_INFINITY } else { launch },
            suppressed,
        });
    }
    if channels.is_empty() {
        return Err(Error::parse(path, "plan has no channels"));
    }

    let mut plan = ChannelPlan {
        bands: Vec::new(),
        spacing_ghz: section.spacing_ghz,
        channels,
        notches: Vec::new(),
        warnings: Vec::new(),
    };
    let present = plan.band_names();
    if section.bands.is_empty() {
        for (name, short, long) in plan.band_wavelength_edges() {
            let count = plan.channels.iter().filter(|c| c.band == name).count();
            plan.bands.push(Band::new(name, short, long, count));
        }
    } else {
        for b in &section.bands {
            let count = plan.channels.iter().filter(|c| c.band == b.name).count();
            if count != b.channels {
                return Err(Error::invalid(
                    Stage::Plan,
                    format!("{}: band {} has {count} channels, the scenario declares {}", path.display(), b.name, b.channels),
                ));
            }
            plan.bands.push(Band::new(b.name, b.start_nm, b.end_nm, b.channels));
        }
        if let Some(extra) = present.iter().find(|p| !section.bands.iter().any(|b| b.name == **p)) {
            return Err(Error::invalid(Stage::Plan, format!("{}: band {extra} is not declared", path.display())));
        }
    }
    Ok(plan)
}
