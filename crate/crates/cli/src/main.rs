use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand};

use wsnsim_core::experiments::{
    replicate_seeds, run_multilevel_experiment, run_sweep, summarize_sweep, SweepParam,
};
use wsnsim_core::export::{
    export_to, header_line, write_multilevel_summary, write_series, write_sweep,
    write_sweep_summary,
};
use wsnsim_core::metrics::median;
use wsnsim_core::{run_simulation, MetricSeries, Protocol, ScenarioConfig};

#[derive(Parser)]
#[command(name = "wsnsim", version, about = "Cluster-head election simulator for heterogeneous-energy sensor networks")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one simulation and write its metric series.
    Simulate {
        #[arg(long)]
        protocol: Option<Protocol>,
        #[arg(long)]
        seed: Option<u64>,
        /// Round budget; omit to run until every node is dead.
        #[arg(long)]
        rounds: Option<u64>,
        #[command(flatten)]
        common: CommonArgs,
    },
    /// Stability period of LEACH, LEACH-E, SEP and BECC over a lambda grid.
    SweepLambda(SweepArgs),
    /// Stability period of LEACH, LEACH-E, SEP and BECC over an alpha grid.
    SweepAlpha(SweepArgs),
    /// LEACH, LEACH-E, SEP-M and BECC on shared multi-level worlds.
    Multilevel {
        #[arg(long)]
        replicates: Option<usize>,
        #[command(flatten)]
        common: CommonArgs,
    },
    /// Parse and validate a config, then print it fully resolved.
    ValidateConfig {
        #[arg(long)]
        config: Option<PathBuf>,
    },
}

#[derive(Args)]
struct CommonArgs {
    /// TOML scenario file; defaults apply to every missing key.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long, default_value = "out")]
    out_dir: PathBuf,
}

#[derive(Args)]
struct SweepArgs {
    #[arg(long)]
    replicates: Option<usize>,
    /// Comma-separated grid overriding the config's sweep section.
    #[arg(long, value_delimiter = ',')]
    grid: Option<Vec<f64>>,
    #[command(flatten)]
    common: CommonArgs,
}

fn load_config(path: Option<&Path>, fallback: ScenarioConfig) -> Result<ScenarioConfig> {
    match path {
        Some(p) => Ok(ScenarioConfig::from_file(p)?),
        None => Ok(fallback),
    }
}

fn prepare_out_dir(dir: &Path, config: &ScenarioConfig) -> Result<()> {
    fs::create_dir_all(dir).with_context(|| format!("cannot create {}", dir.display()))?;
    let echo = dir.join("resolved_config.toml");
    fs::write(&echo, config.to_toml()).with_context(|| format!("cannot write {}", echo.display()))
}

fn simulate(
    protocol: Option<Protocol>,
    seed: Option<u64>,
    rounds: Option<u64>,
    common: &CommonArgs,
) -> Result<()> {
    let mut cfg = load_config(common.config.as_deref(), ScenarioConfig::default())?;
    if let Some(p) = protocol {
        cfg.protocol = p;
    }
    if let Some(s) = seed {
        cfg.seed = s;
    }
    if rounds.is_some() {
        cfg.rounds = rounds;
    }
    cfg.validate()?;
    prepare_out_dir(&common.out_dir, &cfg)?;
    let trace = run_simulation(&cfg)?;
    let series = MetricSeries::from_trace(&trace)?;
    let header = header_line(&cfg, &[cfg.seed]);
    let path = common.out_dir.join("series.csv");
    export_to(&path, |w| write_series(w, &header, std::slice::from_ref(&series)))?;
    println!(
        "{} seed {}: {} rounds, stability period {}, {} sink messages -> {}",
        cfg.protocol,
        cfg.seed,
        series.rounds(),
        series.stability_period,
        series.final_sink_messages(),
        path.display()
    );
    Ok(())
}

fn sweep(param: SweepParam, args: &SweepArgs) -> Result<()> {
    let mut cfg = load_config(args.common.config.as_deref(), ScenarioConfig::two_level_default())?;
    if let Some(r) = args.replicates {
        cfg.replicates = r;
    }
    cfg.validate()?;
    let grid = match (&args.grid, param) {
        (Some(g), _) => g.clone(),
        (None, SweepParam::Lambda) => cfg.sweep.lambdas.clone(),
        (None, SweepParam::Alpha) => cfg.sweep.alphas.clone(),
    };
    prepare_out_dir(&args.common.out_dir, &cfg)?;
    let rows = run_sweep(&cfg, param, &grid, cfg.replicates)?;
    let header = header_line(&cfg, &replicate_seeds(cfg.seed, cfg.replicates));
    let name = param.column();
    let table = args.common.out_dir.join(format!("sweep_{name}.csv"));
    export_to(&table, |w| write_sweep(w, &header, param, &rows))?;
    let summary = summarize_sweep(&rows);
    let sum_path = args.common.out_dir.join(format!("sweep_{name}_summary.csv"));
    export_to(&sum_path, |w| write_sweep_summary(w, &header, param, &summary))?;
    for s in &summary {
        println!(
            "{:<8} {name}={:<5} mean stability {:>8.1}",
            s.protocol.name(),
            s.value,
            s.mean_stability
        );
    }
    println!("{} rows -> {}", rows.len(), table.display());
    Ok(())
}

fn multilevel(replicates: Option<usize>, common: &CommonArgs) -> Result<()> {
    let mut cfg = load_config(common.config.as_deref(), ScenarioConfig::default())?;
    if let Some(r) = replicates {
        cfg.replicates = r;
    }
    cfg.validate()?;
    prepare_out_dir(&common.out_dir, &cfg)?;
    let runs = run_multilevel_experiment(&cfg, cfg.replicates)?;
    let seeds = replicate_seeds(cfg.seed, cfg.replicates);
    let header = header_line(&cfg, &seeds);
    let summary = common.out_dir.join("multilevel_summary.csv");
    export_to(&summary, |w| write_multilevel_summary(w, &header, &runs))?;
    for run in &runs {
        let header = header_line(&cfg, &[run.seed]);
        let path = common.out_dir.join(format!("multilevel_series_seed{}.csv", run.seed));
        export_to(&path, |w| write_series(w, &header, &run.series))?;
    }
    for protocol in Protocol::MULTI_LEVEL {
        let stab: Vec<f64> = runs
            .iter()
            .filter_map(|r| r.get(protocol))
            .map(|s| s.stability_period as f64)
            .collect();
        let msgs: Vec<f64> = runs
            .iter()
            .filter_map(|r| r.get(protocol))
            .map(|s| s.final_sink_messages() as f64)
            .collect();
        println!(
            "{:<8} median stability {:>8.1}  median sink messages {:>10.1}",
            protocol.name(),
            median(&stab),
            median(&msgs)
        );
    }
    println!("{} runs -> {}", runs.len() * Protocol::MULTI_LEVEL.len(), summary.display());
    Ok(())
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Simulate {
            protocol,
            seed,
            rounds,
            common,
        } => simulate(protocol, seed, rounds, &common),
        Command::SweepLambda(args) => sweep(SweepParam::Lambda, &args),
        Command::SweepAlpha(args) => sweep(SweepParam::Alpha, &args),
        Command::Multilevel { replicates, common } => multilevel(replicates, &common),
        Command::ValidateConfig { config } => {
            let cfg = load_config(config.as_deref(), ScenarioConfig::default())?;
            cfg.validate()?;
            print!("{}", cfg.to_toml());
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {}", format!("{e:#}").replace('\n', " "));
            ExitCode::FAILURE
        }
    }
}
