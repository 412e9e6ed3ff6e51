//! The subcommands: each runs part of the pipeline and writes its files.

use std::path::{Path, PathBuf};

use rayon::prelude::*;
use wdmlink_core::gmi::{throughput as rate_report, GmiTable};
use wdmlink_core::link::{notch_estimate, simulate, LinkResult};
use wdmlink_core::snr::{shannon_rate, NotchProbeResult};
use wdmlink_core::spectral::{BandName, ChannelPlan};
use wdmlink_core::tilt::{select, wrap, Evaluation, Objective};

use crate::error::{AtStage, Error, Result, Stage};
use crate::io::{plan_rows, write_csv, write_json, PLAN_HEADER};
use crate::report::*;
use crate::scenario::{Format, Scenario};
use crate::tables::build_tables;

/// Where and how a command writes.
#[derive(Debug, Clone)]
pub struct OutputOptions {
    pub dir: PathBuf,
    pub format: Format,
}

pub fn plan_summary(plan: &ChannelPlan) -> PlanSummary {
    PlanSummary {
        spacing_ghz: plan.spacing_ghz,
        channels: plan.len(),
        active_channels: plan.active_channels().count(),
        occupied_bandwidth_thz: plan.occupied_bandwidth_thz(),
        total_launch_dbm: plan.total_launch_power_dbm(),
        bands: plan
            .band_powers_dbm()
            .into_iter()
            .map(|(band, launch_dbm)| BandLaunch {
                band,
                channels: plan.channels.iter().filter(|c| c.band == band).count(),
                launch_dbm,
            })
            .collect(),
    }
}

/// Link budget and notch sweep for the scenario's plan.
pub fn estimate(sc: &Scenario) -> Result<RunReport> {
    let plan = sc.plan();
    let link = sc.link_config();
    let direct = simulate(plan, &link).at(Stage::Link)?;
    let (probe, carved) = notch_estimate(plan, &link, sc.file.snr.probes_per_band).at(Stage::NotchProbe)?;
    Ok(build_report(sc, "estimate", &direct, &probe, &carved))
}

fn build_report(sc: &Scenario, command: &str, direct: &LinkResult, probe: &NotchProbeResult, carved: &LinkResult) -> RunReport {
    let plan = sc.plan();
    let channels: Vec<ChannelRow> = direct
        .channels
        .iter()
        .map(|c| ChannelRow {
            index: c.index,
            band: c.band,
            frequency_thz: c.frequency_thz,
            wavelength_nm: c.wavelength_nm,
            launch_dbm: c.launch_dbm,
            fibre_out_dbm: c.fibre_out_dbm,
            net_loss_db: c.net_loss_db,
            inline_gain_db: c.inline_gain_db,
            preamp_gain_db: c.preamp_gain_db,
            received_dbm: c.received_dbm,
            osnr_db: c.osnr_db,
            snr_trx_db: c.snr_trx_db,
            snr_ase_db: c.snr_ase_db,
            snr_nli_db: c.snr_nli_db,
            snr_total_db: c.snr_total_db,
            shannon_rate_gbps: c.shannon_gbps,
            notch_osnr_db: probe.channel_osnr_db[c.index],
            notch_snr_db: probe.channel_snr_db[c.index],
        })
        .collect();

    let notch_rate = |r: &ChannelRow| r.notch_snr_db.map_or(0.0, |s| shannon_rate(s, plan.channels[r.index].symbol_rate_gbaud));
    let mean = |v: Vec<f64>| if v.is_empty() { f64::NAN } else { v.iter().sum::<f64>() / v.len() as f64 };
    let bands = plan
        .band_names()
        .into_iter()
        .map(|band| {
            let rows: Vec<&ChannelRow> = channels.iter().filter(|r| r.band == band).collect();
            BandAggregate {
                band,
                channels: rows.len(),
                mean_net_loss_db: mean(rows.iter().map(|r| r.net_loss_db).collect()),
                mean_snr_db: mean(rows.iter().map(|r| r.snr_total_db).collect()),
                mean_notch_snr_db: mean(rows.iter().filter_map(|r| r.notch_snr_db).collect()),
                shannon_tbps: rows.iter().map(|r| r.shannon_rate_gbps).sum::<f64>() / 1000.0,
                notch_shannon_tbps: rows.iter().map(|r| notch_rate(r)).sum::<f64>() / 1000.0,
            }
        })
        .collect();
    let aggregates = Aggregates {
        shannon_tbps: direct.shannon_tbps(),
        notch_shannon_tbps: channels.iter().map(notch_rate).sum::<f64>() / 1000.0,
        bands,
    };

    let probes = probe
        .bands
        .iter()
        .flat_map(|b| {
            (0..b.wavelengths_nm.len()).map(move |k| ProbeRow {
                band: b.band,
                wavelength_nm: b.wavelengths_nm[k],
                osnr_db: b.osnr_db[k],
                snr_db: b.snr_db[k],
                snr_trx_db: b.snr_trx_db,
            })
        })
        .collect();

    // Both simulations start from the plan's own warnings; record those
    // once under "plan".
    let skip = plan.warnings.len();
    let mut events: Vec<EventRecord> = plan.warnings.iter().map(|e| EventRecord::new("plan", e)).collect();
    events.extend(direct.events[skip..].iter().map(|e| EventRecord::new("link", e)));
    events.extend(carved.events[skip..].iter().map(|e| EventRecord::new("notch-probe", e)));

    RunReport {
        tool: TOOL.into(),
        version: VERSION.into(),
        command: command.into(),
        seed: sc.seed(),
        scenario: sc.echo(),
        plan: plan_summary(plan),
        channels,
        probes,
        aggregates,
        throughput: None,
        events,
    }
}

/// Estimate plus GMI-based and decoded rates per channel.
pub fn throughput(sc: &Scenario) -> Result<RunReport> {
    let gmi = sc
        .file
        .gmi
        .as_ref()
        .ok_or_else(|| Error::invalid(Stage::Gmi, "throughput needs a [gmi] section with constellations"))?;
    let plan = sc.plan();
    for band in plan.band_names() {
        if !sc.constellations().iter().any(|(b, _)| *b == band) {
            return Err(Error::invalid(Stage::Gmi, format!("gmi.constellations has no entry for band {band}")));
        }
    }
    let mut report = estimate(sc)?;

    let snr_cfg = &sc.file.snr;
    let mut snr: Vec<Option<f64>> = vec![None; plan.len()];
    let mut source: Vec<&str> = vec![""; plan.len()];
    for row in &report.channels {
        let (value, from) = match snr_cfg.override_db.get(row.band) {
            Some(v) => (Some(*v), "override"),
            None => match snr_cfg.source {
                crate::scenario::SnrSource::Notch => (row.notch_snr_db, "notch"),
                crate::scenario::SnrSource::Direct => (Some(row.snr_total_db), "direct"),
            },
        };
        snr[row.index] = value;
        source[row.index] = from;
    }

    let per_channel: Vec<(BandName, f64)> = plan
        .channels
        .iter()
        .filter_map(|c| snr[c.index].map(|s| (c.band, s)))
        .collect();
    let tables = build_tables(sc.constellations(), &per_channel, gmi.step_db, gmi.samples, sc.seed())?;
    let refs: Vec<(BandName, &GmiTable)> = tables.iter().map(|(b, t)| (*b, t)).collect();
    let rates = rate_report(plan, &snr, &refs, &sc.fec()).at(Stage::Gmi)?;

    let channels = rates
        .channels
        .iter()
        .map(|c| RateRow {
            index: c.index,
            band: c.band,
            wavelength_nm: c.wavelength_nm,
            snr_db: c.snr_db,
            snr_source: source[c.index].to_string(),
            gmi_bits: c.gmi,
            gmi_rate_gbps: c.air_gbps,
            code_rate: c.code_rate,
            decoded_rate_gbps: c.net_gbps,
            shannon_rate_gbps: c.shannon_gbps,
        })
        .collect();
    let bands = rates
        .bands
        .iter()
        .map(|b| BandRates {
            band: b.band,
            channels: b.channels,
            gmi_rate_tbps: b.air_tbps,
            decoded_rate_tbps: b.net_tbps,
            shannon_rate_tbps: b.shannon_tbps,
        })
        .collect();
    report.command = "throughput".into();
    report.throughput = Some(ThroughputSection {
        constellations: sc
            .constellations()
            .iter()
            .map(|(band, c)| ConstellationInfo {
                band: *band,
                name: c.name.clone(),
                points: c.size(),
                bits: c.bits,
            })
            .collect(),
        channels,
        bands,
        gmi_rate_tbps: rates.total_air_tbps,
        decoded_rate_tbps: rates.total_net_tbps,
        shannon_rate_tbps: rates.total_shannon_tbps,
        decoded_over_gmi: if rates.total_air_tbps > 0.0 {
            rates.total_net_tbps / rates.total_air_tbps
        } else {
            0.0
        },
    });
    Ok(report)
}

/// Exhaustive tilt and trim search. Grid points are simulated in
/// parallel; the table keeps grid order.
pub fn optimize(sc: &Scenario) -> Result<OptimizeReport> {
    let ts = sc.tilt_scenario();
    let grid = ts.grid().at(Stage::Optimize)?;
    let link = sc.link_config();
    let runs: Vec<(ChannelPlan, LinkResult)> = grid
        .par_iter()
        .map(|p| {
            let plan = ts.plan_for(sc.base_plan(), sc.launch(), p)?;
            let result = simulate(&plan, &link)?;
            Ok((plan, result))
        })
        .collect::<Vec<_>>()
        .into_iter()
        .zip(&grid)
        .map(|(r, p)| r.map_err(|e| wrap(p.tilt_db, e)))
        .collect::<std::result::Result<_, _>>()
        .at(Stage::Optimize)?;

    let values: Vec<f64> = match ts.objective {
        Objective::ShannonEstimate => runs.iter().map(|(_, r)| r.shannon_tbps()).collect(),
        Objective::GmiEstimate => {
            let gmi = sc
                .file
                .gmi
                .as_ref()
                .ok_or_else(|| Error::invalid(Stage::Optimize, "the gmi-estimate objective needs a [gmi] section"))?;
            let snr: Vec<Vec<Option<f64>>> = runs.iter().map(|(plan, r)| r.snr_by_index(plan.len())).collect();
            let per_channel: Vec<(BandName, f64)> = runs
                .iter()
                .zip(&snr)
                .flat_map(|((plan, _), s)| plan.channels.iter().filter_map(|c| s[c.index].map(|v| (c.band, v))))
                .collect();
            let tables = build_tables(sc.constellations(), &per_channel, gmi.step_db, gmi.samples, sc.seed())?;
            let refs: Vec<(BandName, &GmiTable)> = tables.iter().map(|(b, t)| (*b, t)).collect();
            let fec = sc.fec();
            runs.iter()
                .zip(&snr)
                .zip(&grid)
                .map(|(((plan, _), s), p)| {
                    rate_report(plan, s, &refs, &fec)
                        .map(|r| r.total_air_tbps)
                        .map_err(|e| wrap(p.tilt_db, e))
                })
                .collect::<std::result::Result<_, _>>()
                .at(Stage::Optimize)?
        }
    };

    let table: Vec<Evaluation> = grid
        .into_iter()
        .zip(values)
        .map(|(point, throughput_tbps)| Evaluation { point, throughput_tbps })
        .collect();
    let result = select(table).at(Stage::Optimize)?;
    let row = |e: &Evaluation| SweepRow {
        tilt_db: e.point.tilt_db,
        trims: e.point.trims.clone(),
        throughput_tbps: e.throughput_tbps,
    };
    Ok(OptimizeReport {
        tool: TOOL.into(),
        version: VERSION.into(),
        seed: sc.seed(),
        scenario: sc.echo(),
        axes: sc.file.optimizer.trims.clone(),
        best: row(&result.best),
        table: result.table.iter().map(row).collect(),
    })
}

pub fn cmd_plan(sc: &Scenario, out: &OutputOptions) -> Result<Vec<PathBuf>> {
    let mut files = vec![write_csv(Stage::Output, &out.dir.join("plan.csv"), &PLAN_HEADER, &plan_rows(sc.plan()))?];
    if out.format.json() {
        files.push(write_json(Stage::Output, &out.dir.join("plan.json"), &plan_summary(sc.plan()))?);
    }
    Ok(files)
}

fn write_budget(report: &RunReport, dir: &Path, format: Format, json_name: &str) -> Result<Vec<PathBuf>> {
    let mut files = Vec::new();
    if format.csv() {
        let rows: Vec<Vec<String>> = report.channels.iter().map(ChannelRow::cells).collect();
        files.push(write_csv(Stage::Output, &dir.join("channels.csv"), &CHANNEL_HEADER, &rows)?);
        for band in BandName::ALL {
            let rows: Vec<Vec<String>> = report.probes.iter().filter(|p| p.band == band).map(ProbeRow::cells).collect();
            if !rows.is_empty() {
                files.push(write_csv(Stage::Output, &dir.join(format!("probes_{band}.csv")), &PROBE_HEADER, &rows)?);
            }
        }
    }
    if format.json() {
        files.push(write_json(Stage::Output, &dir.join(json_name), report)?);
    }
    Ok(files)
}

pub fn cmd_estimate(sc: &Scenario, out: &OutputOptions) -> Result<Vec<PathBuf>> {
    write_budget(&estimate(sc)?, &out.dir, out.format, "estimate.json")
}

pub fn cmd_throughput(sc: &Scenario, out: &OutputOptions) -> Result<Vec<PathBuf>> {
    let report = throughput(sc)?;
    let mut files = write_budget(&report, &out.dir, out.format, "throughput.json")?;
    if out.format.csv() {
        let t = report.throughput.as_ref().expect("throughput section");
        let rows: Vec<Vec<String>> = t.channels.iter().map(RateRow::cells).collect();
        files.push(write_csv(Stage::Output, &out.dir.join("throughput.csv"), &RATE_HEADER, &rows)?);
    }
    Ok(files)
}

pub fn cmd_optimize(sc: &Scenario, out: &OutputOptions) -> Result<Vec<PathBuf>> {
    let report = optimize(sc)?;
    let mut files = Vec::new();
    if out.format.csv() {
        let mut header = vec!["tilt_dB".to_string()];
        header.extend(report.axes.iter().map(|a| a.column()));
        header.push("throughput_Tbps".into());
        let header: Vec<&str> = header.iter().map(String::as_str).collect();
        let rows: Vec<Vec<String>> = report.table.iter().map(SweepRow::cells).collect();
        files.push(write_csv(Stage::Output, &out.dir.join("sweep.csv"), &header, &rows)?);
    }
    if out.format.json() {
        files.push(write_json(Stage::Output, &out.dir.join("optimize.json"), &report)?);
    }
    Ok(files)
}
