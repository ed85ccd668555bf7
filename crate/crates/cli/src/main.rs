use std::io::{Read, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use wavedecay::scenario::{self, Scenario};
use wavedecay::Error;

#[derive(Parser)]
#[command(name = "wavedecay", version, about = "Decay checks for positive waves in 1-D conservation laws")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(clap::Args)]
struct Common {
    /// Scenario file (JSON).
    #[arg(long)]
    scenario: PathBuf,
    /// Directory for artifacts; defaults to the scenario's `out_dir`, if any.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    kappa: Option<f64>,
    #[arg(long)]
    delta: Option<f64>,
    /// Comma-separated output times.
    #[arg(long)]
    times: Option<String>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long, value_enum, default_value = "json")]
    format: Format,
}

#[derive(Subcommand)]
enum Command {
    /// Track the solution and compare rearranged positive waves with the comparison profile.
    Verify(Common),
    /// Minimal margin as a function of kappa.
    Sweep {
        #[command(flatten)]
        common: Common,
        /// `lo:hi:n` or a comma-separated list.
        #[arg(long)]
        kappa_range: String,
    },
    /// Front tracking only.
    Simulate(Common),
    /// Odd rearrangement of a positive measure read from a JSON file (`-` for stdin).
    Rearrange {
        #[arg(long)]
        measure: PathBuf,
        #[arg(long, value_enum, default_value = "json")]
        format: Format,
    },
}

fn load(c: &Common) -> Result<(Scenario, Option<PathBuf>), Error> {
    let times = c.times.as_deref().map(scenario::parse_list).transpose()?;
    let s = Scenario::load(&c.scenario)?.with_overrides(c.kappa, c.delta, times, c.seed)?;
    let out = c.out.clone().or_else(|| s.out_dir.clone());
    Ok((s, out))
}

fn emit(bytes: &[u8]) -> Result<(), Error> {
    let mut out = std::io::stdout().lock();
    out.write_all(bytes)?;
    out.flush()?;
    Ok(())
}

fn run(cli: Cli) -> Result<u8, Error> {
    match cli.command {
        Command::Verify(c) => {
            let (s, out) = load(&c)?;
            let report = scenario::run_verify(&s, out.as_deref())?;
            match c.format {
                Format::Json => emit(&scenario::to_json_pretty(&report)?)?,
                Format::Csv => emit(&scenario::margins_csv(&report)?)?,
            }
            for check in report.per_time.iter().filter(|c| !c.holds) {
                eprintln!(
                    "ordering fails: t = {}, family {}, margin {:e} at x = {} (tolerance {:e})",
                    check.t, check.family, check.margin, check.at, report.tolerance
                );
            }
            Ok(if report.all_hold() { 0 } else { 1 })
        }
        Command::Sweep { common, kappa_range } => {
            let kappas = scenario::parse_kappa_range(&kappa_range)?;
            let (s, out) = load(&common)?;
            let rows = scenario::run_sweep(&s, &kappas, out.as_deref())?;
            match common.format {
                Format::Json => {
                    let v: Vec<_> = rows.iter().map(|&(k, m)| [k, m]).collect();
                    emit(&scenario::to_json_pretty(&v)?)?
                }
                Format::Csv => {
                    let mut text = String::from("kappa,min_margin\n");
                    for (k, m) in rows {
                        text.push_str(&format!("{k:.16e},{m:.16e}\n"));
                    }
                    emit(text.as_bytes())?
                }
            }
            Ok(0)
        }
        Command::Simulate(c) => {
            let (s, out) = load(&c)?;
            let traj = scenario::simulate(&s, out.as_deref())?;
            match c.format {
                Format::Json => emit(&scenario::to_json_pretty(&traj.samples)?)?,
                Format::Csv => emit(&scenario::events_csv(&traj, s.c0)?)?,
            }
            log::info!("{} events", traj.events.len());
            Ok(0)
        }
        Command::Rearrange { measure, format } => {
            let mut text = String::new();
            if measure.as_os_str() == "-" {
                std::io::stdin().read_to_string(&mut text)?;
            } else {
                text = std::fs::read_to_string(&measure)
                    .map_err(|e| Error::Config(format!("cannot read {}: {e}", measure.display())))?;
            }
            let p = scenario::rearrange_json(&text)?;
            match format {
                Format::Json => emit(&scenario::to_json_pretty(&p)?)?,
                Format::Csv => emit(&scenario::profile_csv(&p)?)?,
            }
            Ok(0)
        }
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::new().filter_or("WAVEDECAY_LOG", "warn")).init();
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
