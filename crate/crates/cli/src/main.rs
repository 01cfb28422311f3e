use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use polariton_core::harness::{
    configure_threads, parse_config_with_overrides, preset, run_scenario, HarnessError, RunRecord, Scenario, PRESET_NAMES,
};

/// Non-reciprocal cavity polariton simulator.
#[derive(Parser)]
#[command(name = "polariton", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Weak-probe transmission and isolation versus probe detuning.
    Spectrum(RunArgs),
    /// Transmission over probe and cavity–atom detuning.
    Sweep2d(RunArgs),
    /// Ideal and simulated isolation versus forward cooperativity.
    Isolation(RunArgs),
    /// Steady-state output of both directions versus input flux.
    Saturation(RunArgs),
    /// Second-order correlation of both directions.
    G2(RunArgs),
    /// Fit a measured spectrum.
    Fit(RunArgs),
    /// Cooperativities and shifts from Zeeman populations.
    Cooperativity(RunArgs),
    /// Run whatever scenario the config names.
    Run(RunArgs),
    /// List the bundled presets, or print one.
    Presets { name: Option<String> },
}

#[derive(Args)]
struct RunArgs {
    /// Config file.
    #[arg(long, conflicts_with = "preset", required_unless_present = "preset")]
    config: Option<PathBuf>,
    /// Bundled preset instead of a config file.
    #[arg(long)]
    preset: Option<String>,
    /// Output directory; defaults to `output_dir` from the config, then `out/<scenario>`.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Override a config key, e.g. `--set c_plus=15.3`. Repeatable.
    #[arg(long = "set", value_name = "KEY=VALUE", value_parser = parse_override)]
    overrides: Vec<(String, String)>,
    /// Print the run record as JSON instead of a summary.
    #[arg(long)]
    json: bool,
}

fn parse_override(raw: &str) -> Result<(String, String), String> {
    raw.split_once('=')
        .map(|(k, v)| (k.trim().to_string(), v.trim().to_string()))
        .ok_or_else(|| format!("`{raw}` is not KEY=VALUE"))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            let message = e.to_string().replace("\n  ", "; ").replace('\n', " ");
            eprintln!("error[{}]: {message}", e.category());
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

fn dispatch(command: Command) -> Result<(), HarnessError> {
    let (scenario, args) = match command {
        Command::Presets { name: None } => {
            PRESET_NAMES.iter().for_each(|n| println!("{n}"));
            return Ok(());
        }
        Command::Presets { name: Some(name) } => {
            print!("{}", preset(&name)?);
            return Ok(());
        }
        Command::Spectrum(a) => (Some(Scenario::Spectrum), a),
        Command::Sweep2d(a) => (Some(Scenario::Sweep2d), a),
        Command::Isolation(a) => (Some(Scenario::IsolationVsC), a),
        Command::Saturation(a) => (Some(Scenario::Saturation), a),
        Command::G2(a) => (Some(Scenario::G2), a),
        Command::Fit(a) => (Some(Scenario::Fit), a),
        Command::Cooperativity(a) => (Some(Scenario::Cooperativity), a),
        Command::Run(a) => (None, a),
    };
    let threads = configure_threads()?;
    let record = run(scenario, &args)?;
    if args.json {
        println!("{}", serde_json::to_string_pretty(&record).expect("run record serializes"));
    } else {
        println!("scenario {} ({} threads, {:.3} s)", record.scenario, threads, record.wall_time.as_secs_f64());
        println!("input hash {}", record.input_hash);
        for f in &record.outputs {
            println!("  {} ({} bytes)", f.name, f.bytes);
        }
    }
    Ok(())
}

fn run(scenario: Option<Scenario>, args: &RunArgs) -> Result<RunRecord, HarnessError> {
    let (text, input_root) = match (&args.config, &args.preset) {
        (Some(path), _) => {
            let text = std::fs::read_to_string(path).map_err(|source| HarnessError::Io { path: path.clone(), source })?;
            (text, path.parent().map(Path::to_path_buf).unwrap_or_default())
        }
        (None, Some(name)) => (preset(name)?.to_string(), PathBuf::from(".")),
        (None, None) => unreachable!("clap requires --config or --preset"),
    };
    let mut overrides = args.overrides.clone();
    if let Some(s) = scenario {
        overrides.push(("scenario".into(), s.name().into()));
    }
    let config = parse_config_with_overrides(&text, &overrides)?;
    let out = args
        .out
        .clone()
        .or_else(|| config.output_dir.as_ref().map(PathBuf::from))
        .unwrap_or_else(|| Path::new("out").join(config.scenario.name()));
    let input_root = if input_root.as_os_str().is_empty() { PathBuf::from(".") } else { input_root };
    run_scenario(&config, &input_root, &out)
}
