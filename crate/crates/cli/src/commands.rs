//! Subcommand implementations. Each returns normally on success and leaves
//! exit-code mapping to the caller.

use std::fs;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use bucketwheel::isru;
use bucketwheel::sim::{self, MetricStats, MonteCarloReport, Scenario, SUMMARY_HEADER};
use bucketwheel::tuning;
use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::config::{load_tuning_spec, ConfigFile, GainsFragment, TuningSection, DEFAULT_CONFIG};
use crate::error::CliError;
use crate::plot;

#[derive(Debug, Parser)]
#[command(
    name = "bucketwheel",
    version,
    about = "Bucket-wheel excavator simulator"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Simulate one scenario and write trajectory.csv, summary.csv and figures.plot.
    Run(RunArgs),
    /// Repeat the scenario over consecutive disturbance seeds; writes sweep.csv.
    Sweep(SweepArgs),
    /// Search controller gains; writes tuned_gains.toml and tuning_trace.csv.
    Tune(TuneArgs),
    /// Heating energy, water yield and power budget check.
    Isru(IsruArgs),
    /// Print the reference configuration.
    DefaultConfig,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Toggle {
    On,
    Off,
}

#[derive(Debug, Args)]
pub struct RunArgs {
    /// Scenario file; the reference scenario when omitted.
    pub config: Option<PathBuf>,
    /// Disturbance seed (overrides the config).
    #[arg(long)]
    pub seed: Option<u64>,
    /// Output directory.
    #[arg(long, default_value = ".")]
    pub out: PathBuf,
    /// Force the regolith disturbance on or off (overrides the config).
    #[arg(long, value_enum)]
    pub disturbance: Option<Toggle>,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    pub config: Option<PathBuf>,
    /// Number of seeds.
    #[arg(long, default_value_t = 100)]
    pub runs: usize,
    /// First seed.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value = ".")]
    pub out: PathBuf,
    #[arg(long, value_enum)]
    pub disturbance: Option<Toggle>,
}

#[derive(Debug, Args)]
pub struct TuneArgs {
    pub config: Option<PathBuf>,
    /// Tuning spec file; falls back to the config's [tuning] section.
    #[arg(long)]
    pub spec: Option<PathBuf>,
    #[arg(long, default_value = ".")]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct IsruArgs {
    pub config: Option<PathBuf>,
    /// Excavation rate (kg/s).
    #[arg(long, allow_negative_numbers = true)]
    pub rate: Option<f64>,
    /// Mechanical excavation power (W).
    #[arg(long, allow_negative_numbers = true)]
    pub mech_power: Option<f64>,
    /// Total power budget (W).
    #[arg(long, allow_negative_numbers = true)]
    pub budget: Option<f64>,
    /// Also write the report as CSV here.
    #[arg(long)]
    pub csv: Option<PathBuf>,
}

pub fn execute(cli: Cli, stdout: &mut dyn Write) -> Result<(), CliError> {
    match cli.command {
        Command::Run(a) => run(&a, stdout),
        Command::Sweep(a) => sweep(&a, stdout),
        Command::Tune(a) => tune(&a, stdout),
        Command::Isru(a) => isru_report(&a, stdout),
        Command::DefaultConfig => write_out(stdout, DEFAULT_CONFIG.as_bytes()),
    }
}

fn load(path: &Option<PathBuf>) -> Result<ConfigFile, CliError> {
    match path {
        Some(p) => ConfigFile::load(p),
        None => Ok(ConfigFile::default()),
    }
}

fn scenario(cfg: &ConfigFile, disturbance: Option<Toggle>) -> Result<Scenario, CliError> {
    let mut sc = cfg.scenario();
    if let Some(t) = disturbance {
        sc.disturbance.enabled = t == Toggle::On;
    }
    sc.validate()?;
    Ok(sc)
}

fn write_out(out: &mut dyn Write, bytes: &[u8]) -> Result<(), CliError> {
    out.write_all(bytes)
        .map_err(|e| CliError::io(Path::new("<stdout>"), e))
}

fn create_dir(dir: &Path) -> Result<(), CliError> {
    fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))
}

fn write_file(
    path: &Path,
    body: impl FnOnce(&mut BufWriter<fs::File>) -> std::io::Result<()>,
) -> Result<(), CliError> {
    let file = fs::File::create(path).map_err(|e| CliError::io(path, e))?;
    let mut w = BufWriter::new(file);
    body(&mut w)
        .and_then(|_| w.flush())
        .map_err(|e| CliError::io(path, e))
}

fn run(a: &RunArgs, stdout: &mut dyn Write) -> Result<(), CliError> {
    let cfg = load(&a.config)?;
    let mut sc = scenario(&cfg, a.disturbance)?;
    if let Some(seed) = a.seed {
        sc.disturbance.seed = seed;
    }
    create_dir(&a.out)?;
    let (trajectory, outcome) = match sim::run(&sc) {
        Ok(out) => (out.trajectory, Ok(out.summary)),
        Err(f) => (f.partial, Err(f.error)),
    };
    // a failed run still leaves its partial trajectory for inspection
    write_file(&a.out.join("trajectory.csv"), |w| trajectory.write_csv(w))?;
    let summary = outcome?;
    write_file(&a.out.join("summary.csv"), |w| {
        writeln!(w, "{SUMMARY_HEADER}")?;
        writeln!(w, "{}", summary.csv_fields())
    })?;
    write_file(&a.out.join("figures.plot"), |w| {
        w.write_all(plot::figures_script().as_bytes())
    })?;
    let text = format!(
        "{SUMMARY_HEADER}\n{}\nwrote {} samples to {}\n",
        summary.csv_fields(),
        trajectory.len(),
        a.out.display()
    );
    write_out(stdout, text.as_bytes())
}

/// Quotes a CSV field when it needs it.
fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_owned()
    }
}

pub const SWEEP_HEADER: &str =
    "seed,max_abs_x,min_y,max_y,settle_time_omega,max_speed,liftoff,escape_margin,effort,error";

type Pick = fn(&MetricStats) -> f64;

fn write_sweep(w: &mut dyn Write, report: &MonteCarloReport) -> std::io::Result<()> {
    writeln!(w, "{SWEEP_HEADER}")?;
    for r in &report.runs {
        match &r.outcome {
            Ok(s) => writeln!(w, "{},{},", r.seed, s.csv_fields())?,
            Err(e) => writeln!(w, "{},,,,,,,,,{}", r.seed, csv_field(e))?,
        }
    }
    let failed = report.failures();
    let note = if failed == 0 {
        String::new()
    } else {
        format!("{failed} of {} runs failed", report.runs.len())
    };
    if let Some(st) = &report.stats {
        let pick: [(&str, Pick); 3] =
            [("min", |m| m.min), ("mean", |m| m.mean), ("max", |m| m.max)];
        for (label, f) in pick {
            // liftoff column: all lifted off / frequency / any lifted off
            let liftoff = match label {
                "min" => (st.liftoff_frequency == 1.0).to_string(),
                "max" => (st.liftoff_frequency > 0.0).to_string(),
                _ => sim::fmt_f64(st.liftoff_frequency),
            };
            let cols = [
                sim::fmt_f64(f(&st.max_abs_x)),
                sim::fmt_f64(f(&st.min_y)),
                sim::fmt_f64(f(&st.max_y)),
                sim::fmt_f64(f(&st.settle_time_omega)),
                sim::fmt_f64(f(&st.max_speed)),
                liftoff,
                sim::fmt_f64(f(&st.escape_margin)),
                sim::fmt_f64(f(&st.effort)),
            ];
            writeln!(w, "{label},{},{}", cols.join(","), csv_field(&note))?;
        }
    }
    Ok(())
}

fn sweep(a: &SweepArgs, stdout: &mut dyn Write) -> Result<(), CliError> {
    let cfg = load(&a.config)?;
    let sc = scenario(&cfg, a.disturbance)?;
    let report = sim::monte_carlo(&sc, a.runs, a.seed)?;
    create_dir(&a.out)?;
    let path = a.out.join("sweep.csv");
    write_file(&path, |w| write_sweep(w, &report))?;
    let lifted = report
        .runs
        .iter()
        .filter(|r| matches!(&r.outcome, Ok(s) if s.liftoff))
        .count();
    let text = format!(
        "{} runs, {} failed, {} lifted off; wrote {}\n",
        report.runs.len(),
        report.failures(),
        lifted,
        path.display()
    );
    write_out(stdout, text.as_bytes())?;
    if report.stats.is_none() {
        let log = report
            .runs
            .iter()
            .filter_map(|r| {
                r.outcome
                    .as_ref()
                    .err()
                    .map(|e| format!("seed {}: {e}", r.seed))
            })
            .collect();
        return Err(bucketwheel::Error::AllRolloutsFailed { log }.into());
    }
    Ok(())
}

fn tune(a: &TuneArgs, stdout: &mut dyn Write) -> Result<(), CliError> {
    let cfg = load(&a.config)?;
    let sc = scenario(&cfg, None)?;
    let section = match &a.spec {
        Some(path) => load_tuning_spec(path)?,
        None => cfg.tuning.clone().unwrap_or_else(TuningSection::default),
    };
    let spec = section.to_spec()?;
    let result = tuning::tune(&sc, &spec)?;
    create_dir(&a.out)?;
    write_file(&a.out.join("tuning_trace.csv"), |w| {
        result.write_trace_csv(w)
    })?;
    let fragment = GainsFragment {
        gains: cfg.gains.with_gains(&result.best),
    };
    let toml = fragment.to_toml();
    write_file(&a.out.join("tuned_gains.toml"), |w| {
        w.write_all(toml.as_bytes())
    })?;
    let text = format!(
        "best cost {} after {} rollouts ({} failed)\n{toml}",
        result.best_cost,
        result.trace.len(),
        result.failures.len()
    );
    write_out(stdout, text.as_bytes())
}

fn isru_report(a: &IsruArgs, stdout: &mut dyn Write) -> Result<(), CliError> {
    let cfg = load(&a.config)?;
    let soil = cfg.soil.to_soil();
    soil.validate()?;
    let report = isru::power_check(
        a.rate.unwrap_or(cfg.isru.excavation_rate_kg_s),
        &soil,
        a.mech_power.unwrap_or(cfg.isru.mech_power_w),
        a.budget.unwrap_or(cfg.isru.power_budget_w),
    )?;
    if let Some(path) = &a.csv {
        write_file(path, |w| report.write_csv(w))?;
    }
    write_out(stdout, report.to_string().as_bytes())
}
