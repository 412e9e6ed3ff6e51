use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use wdmlink::plot::{parse_figures, read_report};
use wdmlink::{Error, Format, OutputOptions, Scenario};

/// Multi-band WDM link planning: plan, link budget, throughput and tilt search.
#[derive(Parser)]
#[command(name = "wdmlink", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Write the channel plan CSV.
    Plan(Common),
    /// Per-channel SNR/OSNR budget and notch-sweep estimate.
    Estimate(Common),
    /// GMI-based and decoded rates per channel.
    Throughput(Common),
    /// Search pre-tilt and band-edge trims.
    Optimize(Common),
    /// Plot-ready files from a run report.
    Plotdata(PlotArgs),
}

#[derive(Args)]
struct Common {
    #[arg(long)]
    scenario: PathBuf,
    /// Output directory (default: the scenario's output.dir).
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long, value_enum)]
    format: Option<Format>,
}

#[derive(Args)]
struct PlotArgs {
    /// Report JSON from `estimate` or `throughput`.
    #[arg(long)]
    report: Option<PathBuf>,
    /// Used to find the report when --report is absent.
    #[arg(long)]
    scenario: Option<PathBuf>,
    #[arg(long)]
    out: Option<PathBuf>,
    /// fig3, fig4, fig5 or all.
    #[arg(long, default_value = "all")]
    figure: String,
    /// Skip the SVG renderings.
    #[arg(long)]
    no_svg: bool,
}

fn load(c: &Common) -> Result<(Scenario, OutputOptions), Error> {
    let mut sc = Scenario::load(&c.scenario)?;
    if let Some(seed) = c.seed {
        sc = sc.with_seed(seed);
    }
    let (dir, format) = sc.output(c.out.as_deref(), c.format);
    Ok((sc, OutputOptions { dir, format }))
}

fn plotdata(a: &PlotArgs) -> Result<Vec<PathBuf>, Error> {
    let figures = parse_figures(&a.figure)?;
    let report_path = match (&a.report, &a.scenario) {
        (Some(r), _) => r.clone(),
        (None, Some(s)) => {
            let sc = Scenario::load(s)?;
            let (dir, _) = sc.output(a.out.as_deref(), None);
            let t = dir.join("throughput.json");
            if t.exists() {
                t
            } else {
                dir.join("estimate.json")
            }
        }
        (None, None) => {
            return Err(Error::invalid(wdmlink::Stage::PlotData, "plotdata needs --report or --scenario"));
        }
    };
    let report = read_report(&report_path)?;
    let dir = match &a.out {
        Some(d) => d.clone(),
        None => report_path.parent().map(Path::to_path_buf).unwrap_or_default(),
    };
    wdmlink::cmd_plotdata(&report, &dir, &figures, !a.no_svg)
}

fn run(cli: &Cli) -> Result<Vec<PathBuf>, Error> {
    match &cli.command {
        Command::Plan(c) => load(c).and_then(|(sc, o)| wdmlink::cmd_plan(&sc, &o)),
        Command::Estimate(c) => load(c).and_then(|(sc, o)| wdmlink::cmd_estimate(&sc, &o)),
        Command::Throughput(c) => load(c).and_then(|(sc, o)| wdmlink::cmd_throughput(&sc, &o)),
        Command::Optimize(c) => load(c).and_then(|(sc, o)| wdmlink::cmd_optimize(&sc, &o)),
        Command::Plotdata(a) => plotdata(a),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    match run(&cli) {
        Ok(files) => {
            for f in files {
                println!("{}", f.display());
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
