//! Plot-ready data from a run report: SNR, power spectra and rates
//! against wavelength.

use std::path::{Path, PathBuf};

use wdmlink_core::spectral::BandName;
use wdmlink_core::units::{linear_to_db, slot_width_nm};

use crate::error::{Error, ErrorKind, Result, Stage};
use crate::io::{write_csv, write_text};
use crate::num::{cell, cell_opt};
use crate::report::RunReport;
use crate::svg::{chart, Series, Style, PALETTE};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Figure {
    /// Per-channel SNR from the notch sweep, probes and transceiver limit.
    Fig3,
    /// Power spectral density at fibre input, fibre output and receiver.
    Fig4,
    /// SNR with GMI-based and decoded rates.
    Fig5,
}

pub const FIGURE_IDS: [&str; 4] = ["fig3", "fig4", "fig5", "all"];

/// Parses a figure id; `all` selects every figure.
pub fn parse_figures(id: &str) -> Result<Vec<Figure>> {
    match id {
        "fig3" => Ok(vec![Figure::Fig3]),
        "fig4" => Ok(vec![Figure::Fig4]),
        "fig5" => Ok(vec![Figure::Fig5]),
        "all" => Ok(vec![Figure::Fig3, Figure::Fig4, Figure::Fig5]),
        other => Err(Error::invalid(
            Stage::PlotData,
            format!("unknown figure \"{other}\"; valid ids: {}", FIGURE_IDS.join(", ")),
        )),
    }
}

pub fn read_report(path: &Path) -> Result<RunReport> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(Stage::PlotData, path, e))?;
    serde_json::from_str(&text).map_err(|e| {
        Error::new(
            Stage::PlotData,
            ErrorKind::Parse {
                path: path.to_path_buf(),
                message: e.to_string(),
            },
        )
    })
}

pub fn cmd_plotdata(report: &RunReport, dir: &Path, figures: &[Figure], svg: bool) -> Result<Vec<PathBuf>> {
    let mut files = Vec::new();
    for f in figures {
        match f {
            Figure::Fig3 => fig3(report, dir, svg, &mut files)?,
            Figure::Fig4 => fig4(report, dir, svg, &mut files)?,
            Figure::Fig5 => fig5(report, dir, svg, &mut files)?,
        }
    }
    Ok(files)
}

fn fig3(report: &RunReport, dir: &Path, svg: bool, files: &mut Vec<PathBuf>) -> Result<()> {
    let rows: Vec<Vec<String>> = report
        .channels
        .iter()
        .map(|c| {
            vec![
                c.band.to_string(),
                cell(c.wavelength_nm),
                cell_opt(c.notch_snr_db),
                cell(c.snr_trx_db),
            ]
        })
        .collect();
    files.push(write_csv(
        Stage::PlotData,
        &dir.join("fig3.csv"),
        &["band", "wavelength_nm", "snr_dB", "snr_trx_dB"],
        &rows,
    )?);
    let probes: Vec<Vec<String>> = report
        .probes
        .iter()
        .map(|p| vec![p.band.to_string(), cell(p.wavelength_nm), cell(p.snr_db), cell(p.osnr_db)])
        .collect();
    files.push(write_csv(
        Stage::PlotData,
        &dir.join("fig3_probes.csv"),
        &["band", "wavelength_nm", "probe_snr_dB", "probe_osnr_dB"],
        &probes,
    )?);
    if svg {
        let mut series = Vec::new();
        for (i, band) in BandName::ALL.into_iter().enumerate() {
            let ch: Vec<_> = report.channels.iter().filter(|c| c.band == band).collect();
            if ch.is_empty() {
                continue;
            }
            let colour = PALETTE[i];
            series.push(Series {
                label: format!("{band} interpolated"),
                points: ch.iter().filter_map(|c| c.notch_snr_db.map(|s| (c.wavelength_nm, s))).collect(),
                style: Style::Line,
                colour,
            });
            series.push(Series {
                label: format!("{band} probes"),
                points: report.probes.iter().filter(|p| p.band == band).map(|p| (p.wavelength_nm, p.snr_db)).collect(),
                style: Style::Markers,
                colour,
            });
            let (first, last) = (ch[0], ch[ch.len() - 1]);
            series.push(Series {
                label: format!("{band} transceiver"),
                points: vec![(first.wavelength_nm, first.snr_trx_db), (last.wavelength_nm, last.snr_trx_db)],
                style: Style::Dashed,
                colour,
            });
        }
        let text = chart("Received SNR from notch sweep", "wavelength (nm)", "SNR (dB)", &series);
        files.push(write_text(Stage::PlotData, &dir.join("fig3.svg"), &text)?);
    }
    Ok(())
}

fn fig4(report: &RunReport, dir: &Path, svg: bool, files: &mut Vec<PathBuf>) -> Result<()> {
    let spacing = report.plan.spacing_ghz;
    let density = |dbm: f64, wl: f64| dbm - linear_to_db(slot_width_nm(wl, spacing));
    let points: Vec<[f64; 4]> = report
        .channels
        .iter()
        .map(|c| {
            let wl = c.wavelength_nm;
            [wl, density(c.launch_dbm, wl), density(c.fibre_out_dbm, wl), density(c.received_dbm, wl)]
        })
        .collect();
    let rows: Vec<Vec<String>> = points.iter().map(|p| p.iter().map(|v| cell(*v)).collect()).collect();
    files.push(write_csv(
        Stage::PlotData,
        &dir.join("fig4.csv"),
        &["wavelength_nm", "fibre_in_dBm_per_nm", "fibre_out_dBm_per_nm", "received_dBm_per_nm"],
        &rows,
    )?);
    if svg {
        let labels = ["fibre input", "fibre output", "receiver"];
        let series: Vec<Series> = (0..3)
            .map(|k| Series {
                label: labels[k].into(),
                points: points.iter().map(|p| (p[0], p[k + 1])).collect(),
                style: Style::Line,
                colour: PALETTE[k],
            })
            .collect();
        let text = chart("Signal power spectra", "wavelength (nm)", "power (dBm/nm)", &series);
        files.push(write_text(Stage::PlotData, &dir.join("fig4.svg"), &text)?);
    }
    Ok(())
}

fn fig5(report: &RunReport, dir: &Path, svg: bool, files: &mut Vec<PathBuf>) -> Result<()> {
    let rates = report.throughput.as_ref().map(|t| t.channels.as_slice()).unwrap_or_default();
    let rows: Vec<Vec<String>> = rates
        .iter()
        .map(|r| {
            vec![
                cell(r.wavelength_nm),
                cell(r.snr_db),
                cell(r.gmi_rate_gbps),
                cell(r.decoded_rate_gbps),
            ]
        })
        .collect();
    files.push(write_csv(
        Stage::PlotData,
        &dir.join("fig5.csv"),
        &["wavelength_nm", "snr_dB", "gmi_rate_Gbps", "decoded_rate_Gbps"],
        &rows,
    )?);
    if svg {
        let series = vec![
            Series {
                label: "GMI".into(),
                points: rates.iter().map(|r| (r.wavelength_nm, r.gmi_rate_gbps)).collect(),
                style: Style::Markers,
                colour: PALETTE[0],
            },
            Series {
                label: "decoded".into(),
                points: rates.iter().map(|r| (r.wavelength_nm, r.decoded_rate_gbps)).collect(),
                style: Style::Markers,
                colour: PALETTE[1],
            },
        ];
        let text = chart("Data rate per channel", "wavelength (nm)", "rate (Gb/s)", &series);
        files.push(write_text(Stage::PlotData, &dir.join("fig5.svg"), &text)?);
    }
    Ok(())
}
