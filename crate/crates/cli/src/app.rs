//! Command-line front end.

use std::ffi::OsString;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use mecpath_core::controller::ControlMode;
use mecpath_core::path::DEFAULT_RECONSTRUCTION_STEP;
use mecpath_core::sim::{self, FollowingError, ScenarioConfig, SimSample, SweepResult};

use crate::batch;
use crate::error::{exit, CliError};
use crate::report;
use crate::scenario::{self, ModeName, ScenarioFile};
use crate::svg::{Plot, Series, BLUE, GREY, RED};

#[derive(Debug, Parser)]
#[command(name = "mecpath", version, about = "Path-following simulation with model error compensation")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Simulate one scenario and write timeseries.csv and summary.json.
    Run(RunArgs),
    /// Compare the conventional and proposed controllers over plant resistances.
    Sweep(SweepArgs),
    /// Reconstruct a target path as a polyline.
    Path(PathArgs),
}

#[derive(Debug, Args)]
pub struct Overrides {
    /// Scenario file (JSON). Defaults apply when omitted.
    pub scenario: Option<PathBuf>,
    /// Output directory.
    #[arg(long, default_value = "out")]
    pub out: PathBuf,
    /// Also write SVG plots.
    #[arg(long)]
    pub svg: bool,
    /// Target path: 1, 2 or a JSON file holding a path section.
    #[arg(long)]
    pub path: Option<String>,
    /// Integration step [s].
    #[arg(long)]
    pub dt: Option<f64>,
    /// Arc length where the error metric starts [m].
    #[arg(long)]
    pub skip: Option<f64>,
}

#[derive(Debug, Args)]
pub struct RunArgs {
    #[command(flatten)]
    pub common: Overrides,
    /// feedforward, mec, direct or direct-mec.
    #[arg(long)]
    pub mode: Option<ControlMode>,
    /// True plant resistance coefficient C.
    #[arg(long = "c")]
    pub resistance: Option<f64>,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    #[command(flatten)]
    pub common: Overrides,
    /// Comma-separated plant resistances.
    #[arg(long, value_delimiter = ',', default_value = "100,150,200,250,300,400")]
    pub c_values: Vec<f64>,
    /// Overrides the conventional controller of the comparison.
    #[arg(long)]
    pub mode: Option<ControlMode>,
    /// Worker threads; all cores by default.
    #[arg(long)]
    pub threads: Option<usize>,
}

#[derive(Debug, Args)]
pub struct PathArgs {
    /// 1, 2 or a JSON file holding a path section.
    #[arg(long, default_value = "1")]
    pub path: String,
    /// Sampling step [m].
    #[arg(long, default_value_t = DEFAULT_RECONSTRUCTION_STEP)]
    pub ds: f64,
    #[arg(long, default_value = "out")]
    pub out: PathBuf,
    #[arg(long)]
    pub svg: bool,
}

/// Parses `args` and runs the command, returning the process exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { exit::CONFIG } else { exit::OK };
        }
    };
    match execute(&cli.command) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("mecpath: {e}");
            e.exit_code()
        }
    }
}

pub fn execute(cmd: &Command) -> Result<i32, CliError> {
    match cmd {
        Command::Run(a) => cmd_run(a),
        Command::Sweep(a) => cmd_sweep(a),
        Command::Path(a) => cmd_path(a),
    }
}

fn load(o: &Overrides) -> Result<ScenarioFile, CliError> {
    let mut file = match &o.scenario {
        Some(p) => ScenarioFile::load(p)?,
        None => ScenarioFile::default(),
    };
    if let Some(p) = &o.path {
        file.path = scenario::parse_path_arg(p)?;
    }
    if let Some(dt) = o.dt {
        file.simulation.dt = dt;
    }
    if let Some(skip) = o.skip {
        file.simulation.skip = skip;
    }
    file.output.svg |= o.svg;
    Ok(file)
}

fn write(path: &Path, text: &str) -> Result<(), CliError> {
    std::fs::write(path, text).map_err(|e| CliError::io(path, e))
}

fn out_dir(dir: &Path) -> Result<(), CliError> {
    std::fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))
}

pub fn cmd_run(a: &RunArgs) -> Result<i32, CliError> {
    let mut file = load(&a.common)?;
    if let Some(m) = a.mode {
        file.controller.mode = ModeName(m);
    }
    if let Some(c) = a.resistance {
        file.vehicle.c = c;
    }
    let cfg = file.to_config()?;
    let echo = file.resolved(&cfg);

    let stride = if file.output.interval > 0.0 { ((file.output.interval / cfg.dt).round() as usize).max(1) } else { 1 };
    let mut kept: Vec<SimSample> = Vec::new();
    let mut last = None;
    let mut n = 0usize;
    let started = Instant::now();
    let summary = sim::run_with(&cfg, |s| {
        if n % stride == 0 {
            kept.push(*s);
        } else {
            last = Some(*s);
        }
        n += 1;
    })?;
    let elapsed = started.elapsed().as_secs_f64();
    if let Some(s) = last.filter(|s| kept.last().is_none_or(|k| k.t < s.t)) {
        kept.push(s);
    }

    out_dir(&a.common.out)?;
    write(&a.common.out.join("timeseries.csv"), &report::timeseries_csv(&kept))?;
    let record = report::SummaryRecord::new(&summary, elapsed, &echo);
    write(&a.common.out.join("summary.json"), &record.to_json())?;
    if file.output.svg {
        write_run_plots(&a.common.out, &cfg, &kept)?;
    }

    let err = match summary.max_error {
        Some(FollowingError::Value(v)) => format!("{v:.4} m"),
        Some(FollowingError::Diverged) => report::DIVERGED.into(),
        None => "n/a".into(),
    };
    println!("{} ({}): status {}, max error {}, s_r {:.2} m", cfg.controller.mode, cfg.plant.resistance, summary.status, err, summary.final_s_r);
    Ok(exit::for_status(summary.status))
}

fn trace_color(mode: ControlMode) -> &'static str {
    if mode.uses_compensation() {
        BLUE
    } else {
        RED
    }
}

fn write_run_plots(dir: &Path, cfg: &ScenarioConfig, samples: &[SimSample]) -> Result<(), CliError> {
    let target = cfg.path.reconstruct(DEFAULT_RECONSTRUCTION_STEP)?;
    let color = trace_color(cfg.controller.mode);
    let mode = cfg.controller.mode.as_str();
    let mut traj = Plot::new("Trajectory", "xi [m]", "eta [m]")
        .with(Series::new("target path", target.iter().map(|p| (p.xi, p.eta)).collect(), GREY).dashed())
        .with(Series::new(mode, samples.iter().map(|s| (s.pose.xi, s.pose.eta)).collect(), color));
    traj.equal_aspect = true;
    write(&dir.join("trajectory.svg"), &traj.render())?;

    let err = Plot::new("Following error", "s_r [m]", "|z| [m]")
        .with(Series::new(mode, samples.iter().map(|s| (s.plant_frenet.s_r, s.plant_frenet.z.abs())).collect(), color));
    write(&dir.join("error.svg"), &err.render())
}

pub fn cmd_sweep(a: &SweepArgs) -> Result<i32, CliError> {
    let mut file = load(&a.common)?;
    if let Some(m) = a.mode {
        file.controller.conventional = ModeName(m);
    }
    let cfg = file.to_config()?;
    let cmp = file.comparison();
    let threads = a.threads.unwrap_or_else(batch::default_threads);
    let result = batch::parallel_sweep(&cfg, &a.c_values, cmp, threads)?;

    out_dir(&a.common.out)?;
    write(&a.common.out.join("sweep.csv"), &report::sweep_csv(&result))?;
    let md = report::sweep_markdown(&result, cmp.conventional.as_str(), cmp.proposed.as_str());
    write(&a.common.out.join("sweep.md"), &md)?;
    if file.output.svg {
        write(&a.common.out.join("sweep.svg"), &sweep_plot(&result, cmp.conventional, cmp.proposed))?;
    }
    print!("{md}");
    Ok(exit::OK)
}

fn sweep_plot(result: &SweepResult, conventional: ControlMode, proposed: ControlMode) -> String {
    let pts = |pick: fn(&sim::SweepRow) -> FollowingError| {
        result.rows.iter().map(|r| (r.ratio, pick(r).value().unwrap_or(f64::NAN))).collect()
    };
    Plot::new("Maximum following error", "C / C_M", "max |z| [m]")
        .with(Series::new(conventional.as_str(), pts(|r| r.conventional), RED))
        .with(Series::new(proposed.as_str(), pts(|r| r.proposed), BLUE))
        .render()
}

pub fn cmd_path(a: &PathArgs) -> Result<i32, CliError> {
    let path = scenario::parse_path_arg(&a.path)?.resolve()?;
    let points = path.reconstruct(a.ds)?;
    out_dir(&a.out)?;
    write(&a.out.join("path.csv"), &report::path_csv(&path, &points))?;
    if a.svg {
        let mut plot = Plot::new("Target path", "xi [m]", "eta [m]")
            .with(Series::new("target path", points.iter().map(|p| (p.xi, p.eta)).collect(), GREY).dashed());
        plot.equal_aspect = true;
        write(&a.out.join("path.svg"), &plot.render())?;
    }
    println!("{} points, L = {} m", points.len(), path.length());
    Ok(exit::OK)
}

