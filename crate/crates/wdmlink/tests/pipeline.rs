//! End-to-end runs of the pipeline on the bundled fixture and variants of it.

use std::path::{Path, PathBuf};

use wdmlink::plot::{parse_figures, read_report};
use wdmlink::scenario::{ScenarioFile, SnrSource};
use wdmlink::{cmd_estimate, cmd_plan, cmd_plotdata, cmd_throughput, estimate, optimize, throughput, Format, OutputOptions, Scenario, Stage};
use wdmlink_core::spectral::BandName;

fn fixture_path() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures/ndff.toml")
}

fn fixture_file() -> ScenarioFile {
    toml::from_str(&std::fs::read_to_string(fixture_path()).unwrap()).unwrap()
}

fn scenario(file: ScenarioFile) -> Scenario {
    let path = fixture_path();
    Scenario::from_file(file, path.parent().unwrap(), &path).unwrap()
}

/// The fixture with a light GMI sample count.
fn quick() -> ScenarioFile {
    let mut f = fixture_file();
    f.gmi.as_mut().unwrap().samples = 20_000;
    f
}

fn out(dir: &Path) -> OutputOptions {
    OutputOptions {
        dir: dir.to_path_buf(),
        format: Format::Both,
    }
}

fn write_scenario(dir: &Path, text: &str) -> PathBuf {
    let p = dir.join("scenario.toml");
    std::fs::write(&p, text).unwrap();
    p
}

fn read_csv(path: &Path) -> (Vec<String>, Vec<Vec<String>>) {
    let mut r = csv::Reader::from_path(path).unwrap();
    let header = r.headers().unwrap().iter().map(String::from).collect();
    let rows = r.records().map(|rec| rec.unwrap().iter().map(String::from).collect()).collect();
    (header, rows)
}

fn column(header: &[String], name: &str) -> usize {
    header.iter().position(|h| h == name).unwrap_or_else(|| panic!("no column {name}"))
}

const MINIMAL: &str = r#"
[plan]
[[plan.bands]]
name = "C"
start_nm = 1530.0
end_nm = 1566.0
channels = 20

[launch]
total_dbm = 10.0

[fibre]
length_km = 20.0
"#;

#[test]
fn unknown_key_is_reported_with_its_location() {
    let dir = tempfile::tempdir().unwrap();
    let p = write_scenario(dir.path(), &MINIMAL.replace("length_km", "lenght_km"));
    let e = Scenario::load(&p).unwrap_err();
    let msg = e.to_string();
    assert_eq!(e.stage, Stage::Scenario);
    assert_eq!(e.exit_code(), 1);
    assert!(msg.contains("lenght_km"), "{msg}");
    assert!(msg.contains("line"), "{msg}");
}

#[test]
fn minimal_scenario_fills_defaults() {
    let dir = tempfile::tempdir().unwrap();
    let sc = Scenario::load(&write_scenario(dir.path(), MINIMAL)).unwrap();
    assert_eq!(sc.plan().len(), 20);
    assert!((sc.plan().total_launch_power_dbm() - 10.0).abs() < 1e-9);
    let echo = sc.echo();
    assert!(echo.amplifiers.band(BandName::C).is_some());
    assert!(echo.output.is_none());
}

#[test]
fn missing_constellation_names_the_band() {
    let mut f = fixture_file();
    f.gmi.as_mut().unwrap().constellations.l = Some("data/nowhere.txt".into());
    let path = fixture_path();
    let e = Scenario::from_file(f, path.parent().unwrap(), &path).unwrap_err();
    let msg = e.to_string();
    assert!(msg.contains("gmi.constellations.L") && msg.contains("nowhere.txt"), "{msg}");
}

#[test]
fn empty_band_list_is_rejected() {
    let mut f = fixture_file();
    f.plan.bands.clear();
    let path = fixture_path();
    let e = Scenario::from_file(f, path.parent().unwrap(), &path).unwrap_err();
    assert_eq!(e.stage, Stage::Plan);
    assert_eq!(e.exit_code(), 1);
}

#[test]
fn builtin_constellations_need_no_file() {
    let mut f = quick();
    f.gmi.as_mut().unwrap().constellations.s = Some("64-QAM".into());
    let sc = scenario(f);
    let report = throughput(&sc).unwrap();
    let t = report.throughput.unwrap();
    assert_eq!(t.constellations[0].name, "64-QAM");
    // 19 dB is past where 64-QAM saturates for a 10-bit budget.
    let s = t.bands.iter().find(|b| b.band == BandName::S).unwrap();
    assert!(s.gmi_rate_tbps < 187.0 * 64.0 * 6.0 / 1000.0);
}

#[test]
fn plan_csv_round_trips_through_the_pipeline() {
    let dir = tempfile::tempdir().unwrap();
    let sc = scenario(fixture_file());
    cmd_plan(&sc, &out(dir.path())).unwrap();
    let csv = dir.path().join("plan.csv");

    let mut f = fixture_file();
    f.plan.csv = Some(csv.to_string_lossy().into_owned());
    let from_csv = scenario(f);
    assert_eq!(from_csv.plan().len(), sc.plan().len());
    for (a, b) in from_csv.plan().channels.iter().zip(&sc.plan().channels) {
        assert_eq!(a.band, b.band);
        assert_eq!(a.center_frequency_thz, b.center_frequency_thz);
        assert_eq!(a.launch_power_dbm, b.launch_power_dbm);
    }
    let a = estimate(&from_csv).unwrap();
    let b = estimate(&sc).unwrap();
    assert_eq!(serde_json::to_string(&a.channels).unwrap(), serde_json::to_string(&b.channels).unwrap());
}

#[test]
fn tampered_plan_csv_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let sc = scenario(fixture_file());
    cmd_plan(&sc, &out(dir.path())).unwrap();
    let csv = dir.path().join("plan.csv");
    let text = std::fs::read_to_string(&csv).unwrap();
    let mut lines: Vec<&str> = text.lines().collect();
    lines.swap(3, 4);
    std::fs::write(&csv, lines.join("\n")).unwrap();

    let mut f = fixture_file();
    f.plan.csv = Some(csv.to_string_lossy().into_owned());
    let path = fixture_path();
    assert!(Scenario::from_file(f, path.parent().unwrap(), &path).is_err());
}

#[test]
fn throughput_totals_match_the_csv_columns() {
    let dir = tempfile::tempdir().unwrap();
    let sc = scenario(quick());
    cmd_throughput(&sc, &out(dir.path())).unwrap();
    let report = read_report(&dir.path().join("throughput.json")).unwrap();
    let t = report.throughput.unwrap();
    let (header, rows) = read_csv(&dir.path().join("throughput.csv"));
    assert_eq!(rows.len(), 482);
    let sum = |name: &str| -> f64 {
        let k = column(&header, name);
        rows.iter().map(|r| r[k].parse::<f64>().unwrap()).sum::<f64>() / 1000.0
    };
    assert!((sum("gmi_rate_Gbps") - t.gmi_rate_tbps).abs() < 1e-9);
    assert!((sum("decoded_rate_Gbps") - t.decoded_rate_tbps).abs() < 1e-9);
    assert!((sum("shannon_rate_Gbps") - t.shannon_rate_tbps).abs() < 1e-9);
    let band_sum: f64 = t.bands.iter().map(|b| b.gmi_rate_tbps).sum();
    assert!((band_sum - t.gmi_rate_tbps).abs() < 1e-9);
    let src = column(&header, "snr_source");
    assert!(rows.iter().all(|r| r[src] == "override"));
}

#[test]
fn echo_reproduces_the_run() {
    let dir = tempfile::tempdir().unwrap();
    let sc = scenario(fixture_file());
    cmd_estimate(&sc, &out(dir.path())).unwrap();
    let first = read_report(&dir.path().join("estimate.json")).unwrap();

    let echo_path = dir.path().join("echo.json");
    std::fs::write(&echo_path, serde_json::to_string_pretty(&first.scenario).unwrap()).unwrap();
    let again = Scenario::load(&echo_path).unwrap();
    assert_eq!(again.echo(), first.scenario);
    let second = estimate(&again).unwrap();
    assert_eq!(serde_json::to_string(&second).unwrap(), serde_json::to_string(&first).unwrap());
}

#[test]
fn seed_moves_gmi_but_not_shannon() {
    let a = throughput(&scenario(quick())).unwrap().throughput.unwrap();
    let b = throughput(&scenario(quick()).with_seed(7)).unwrap().throughput.unwrap();
    let a2 = throughput(&scenario(quick())).unwrap().throughput.unwrap();
    assert_eq!(a.gmi_rate_tbps, a2.gmi_rate_tbps);
    assert_ne!(a.gmi_rate_tbps, b.gmi_rate_tbps);
    assert!((a.gmi_rate_tbps - b.gmi_rate_tbps).abs() / a.gmi_rate_tbps < 1e-3);
    assert_eq!(a.shannon_rate_tbps, b.shannon_rate_tbps);
}

#[test]
fn events_are_tagged_once_per_stage() {
    let mut f = fixture_file();
    // Too many channels for the C band edges, and an attenuation table
    // that only covers the C band.
    f.plan.bands[1].channels = 150;
    f.launch.band_dbm = Default::default();
    f.snr.override_db = Default::default();
    f.fibre.attenuation = vec![[1530.0, 0.2], [1570.0, 0.2]];
    let sc = scenario(f);
    let report = estimate(&sc).unwrap();
    let stages: Vec<&str> = report.events.iter().map(|e| e.stage.as_str()).collect();
    assert_eq!(stages.iter().filter(|s| **s == "plan").count(), sc.plan().warnings.len());
    assert!(!sc.plan().warnings.is_empty());
    assert!(stages.contains(&"link") && stages.contains(&"notch-probe"), "{stages:?}");
    let clamped = |stage: &str| {
        report
            .events
            .iter()
            .filter(|e| e.stage == stage && e.message.to_lowercase().contains("attenuation"))
            .count()
    };
    assert_eq!(clamped("link"), 1);
    assert_eq!(clamped("plan"), 0);
}

#[test]
fn fixture_runs_without_events() {
    let report = estimate(&scenario(fixture_file())).unwrap();
    assert!(report.events.is_empty(), "{:?}", report.events);
}

#[test]
fn s_band_is_the_weakest() {
    let report = estimate(&scenario(fixture_file())).unwrap();
    let snr = |b: BandName| report.aggregates.bands.iter().find(|a| a.band == b).unwrap().mean_snr_db;
    assert!(snr(BandName::S) < snr(BandName::C));
    assert!(snr(BandName::S) < snr(BandName::L));
    // The transceiver limit caps every channel.
    assert!(report.channels.iter().all(|c| c.snr_total_db < c.snr_trx_db));
}

#[test]
fn notch_estimate_tracks_the_direct_budget() {
    let report = estimate(&scenario(fixture_file())).unwrap();
    let gap = report.aggregates.notch_shannon_tbps - report.aggregates.shannon_tbps;
    assert!(gap.abs() < 2.0, "notch {} vs direct {}", report.aggregates.notch_shannon_tbps, report.aggregates.shannon_tbps);
    assert_eq!(report.probes.len(), 30);
}

#[test]
fn direct_source_uses_the_budget_snr() {
    let mut f = quick();
    f.snr.override_db = Default::default();
    f.snr.source = SnrSource::Direct;
    let report = throughput(&scenario(f)).unwrap();
    let t = report.throughput.as_ref().unwrap();
    for (rate, ch) in t.channels.iter().zip(&report.channels) {
        assert_eq!(rate.snr_db, ch.snr_total_db);
        assert_eq!(rate.snr_source, "direct");
    }
    assert!((t.shannon_rate_tbps - report.aggregates.shannon_tbps).abs() < 1e-9);
}

#[test]
fn dead_link_carries_nothing() {
    let mut f = quick();
    for b in BandName::ALL {
        *f.snr.override_db.slot(b) = Some(f64::NEG_INFINITY);
    }
    let t = throughput(&scenario(f)).unwrap().throughput.unwrap();
    assert_eq!(t.gmi_rate_tbps, 0.0);
    assert_eq!(t.decoded_rate_tbps, 0.0);
    assert_eq!(t.shannon_rate_tbps, 0.0);
    assert_eq!(t.decoded_over_gmi, 0.0);
}

#[test]
fn non_finite_values_survive_json() {
    let dir = tempfile::tempdir().unwrap();
    let mut f = quick();
    f.snr.override_db.s = Some(f64::NEG_INFINITY);
    cmd_throughput(&scenario(f), &out(dir.path())).unwrap();
    let text = std::fs::read_to_string(dir.path().join("throughput.json")).unwrap();
    assert!(text.contains("\"-inf\""));
    let report = read_report(&dir.path().join("throughput.json")).unwrap();
    let s = &report.throughput.unwrap().channels[report.channels.len() - 1];
    assert_eq!(s.band, BandName::S);
    assert_eq!(s.snr_db, f64::NEG_INFINITY);
}

#[test]
fn single_point_grid_returns_that_point() {
    let mut f = fixture_file();
    f.optimizer.tilts_db = vec![5.0];
    f.optimizer.trims.clear();
    let sc = scenario(f);
    let report = optimize(&sc).unwrap();
    assert_eq!(report.table.len(), 1);
    assert_eq!(report.best, report.table[0]);
    let direct = estimate(&sc).unwrap();
    assert_eq!(report.best.throughput_tbps, direct.aggregates.shannon_tbps);
}

#[test]
fn gmi_objective_picks_its_table_maximum() {
    let mut f = quick();
    f.optimizer.tilts_db = vec![3.0, 5.0];
    f.optimizer.trims.clear();
    f.optimizer.objective = wdmlink_core::tilt::Objective::GmiEstimate;
    let report = optimize(&scenario(f)).unwrap();
    let top = report.table.iter().map(|r| r.throughput_tbps).fold(f64::NEG_INFINITY, f64::max);
    assert_eq!(report.best.throughput_tbps, top);
    // GMI-based rates sit below the Shannon estimate.
    assert!(top < 200.0 && top > 150.0, "{top}");
}

#[test]
fn oversized_grid_is_refused() {
    let mut f = fixture_file();
    f.optimizer.grid_limit = 10;
    let e = optimize(&scenario(f)).unwrap_err();
    assert_eq!(e.stage, Stage::Optimize);
}

#[test]
fn plotdata_files_have_the_expected_columns() {
    let dir = tempfile::tempdir().unwrap();
    let sc = scenario(quick());
    cmd_throughput(&sc, &out(dir.path())).unwrap();
    let report = read_report(&dir.path().join("throughput.json")).unwrap();
    let files = cmd_plotdata(&report, dir.path(), &parse_figures("all").unwrap(), true).unwrap();
    for name in ["fig3.csv", "fig3_probes.csv", "fig4.csv", "fig5.csv", "fig3.svg", "fig4.svg", "fig5.svg"] {
        assert!(files.contains(&dir.path().join(name)), "{name}");
    }

    let (header, rows) = read_csv(&dir.path().join("fig4.csv"));
    assert_eq!(header, ["wavelength_nm", "fibre_in_dBm_per_nm", "fibre_out_dBm_per_nm", "received_dBm_per_nm"]);
    assert_eq!(rows.len(), 482);
    // In and out of the fibre differ by the net loss.
    let k = rows.len() / 2;
    let loss = rows[k][1].parse::<f64>().unwrap() - rows[k][2].parse::<f64>().unwrap();
    assert!((loss - report.channels[k].net_loss_db).abs() < 1e-9);

    let (header, rows) = read_csv(&dir.path().join("fig3.csv"));
    let trx = column(&header, "snr_trx_dB");
    let c_rows: Vec<_> = rows.iter().filter(|r| r[0] == "C").collect();
    assert!(c_rows.iter().all(|r| r[trx] == "23"));

    let (_, rows) = read_csv(&dir.path().join("fig5.csv"));
    assert_eq!(rows.len(), 482);
    let svg = std::fs::read_to_string(dir.path().join("fig5.svg")).unwrap();
    assert!(svg.starts_with("<svg") && svg.trim_end().ends_with("</svg>"));
}

#[test]
fn plotdata_from_an_estimate_leaves_rates_empty() {
    let dir = tempfile::tempdir().unwrap();
    let report = estimate(&scenario(fixture_file())).unwrap();
    cmd_plotdata(&report, dir.path(), &parse_figures("fig5").unwrap(), false).unwrap();
    let text = std::fs::read_to_string(dir.path().join("fig5.csv")).unwrap();
    assert_eq!(text, "wavelength_nm,snr_dB,gmi_rate_Gbps,decoded_rate_Gbps\n");
    assert!(!dir.path().join("fig5.svg").exists());
}

#[test]
fn unknown_figure_lists_the_valid_ids() {
    let e = parse_figures("fig9").unwrap_err();
    let msg = e.to_string();
    assert!(msg.contains("fig3, fig4, fig5, all"), "{msg}");
    assert_eq!(e.exit_code(), 1);
}

#[test]
fn csv_only_format_skips_json() {
    let dir = tempfile::tempdir().unwrap();
    let sc = scenario(fixture_file());
    let files = cmd_estimate(
        &sc,
        &OutputOptions {
            dir: dir.path().to_path_buf(),
            format: Format::Csv,
        },
    )
    .unwrap();
    assert!(files.iter().all(|f| f.extension().unwrap() == "csv"));
    assert!(files.contains(&dir.path().join("probes_S.csv")));
    let text = std::fs::read_to_string(dir.path().join("channels.csv")).unwrap();
    assert!(!text.contains('\r'));
}
