use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use snsim::data::load_target;
use snsim::experiment::{
    assess_pair, generations_csv, run_experiment, series_csv, write_report, write_trace, ExperimentConfig,
    ExperimentContext, ReportWriter, Variant, VariantReport,
};
use snsim::metrics::local::{significance_profile, triad_census, triad_zscores, EnsembleConfig};
use snsim::optimizer::{run_genome, Genome};
use snsim::{Error, Result};

#[derive(Parser)]
#[command(name = "snsim", version, about = "Attributed social-network growth simulator")]
struct Cli {
    #[command(flatten)]
    common: Common,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Common {
    /// JSON experiment configuration.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Top-level seed; overrides the configuration.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Output directory.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Overwrite an existing report.
    #[arg(long, global = true)]
    force: bool,
    /// Target edge list, or `karate` for the bundled dataset.
    #[arg(long, global = true)]
    target: Option<String>,
    /// Attribute table for the target.
    #[arg(long, global = true)]
    target_attrs: Option<String>,
}

#[derive(Subcommand)]
enum Command {
    /// Grow one network trace under a fixed sDNA.
    Simulate {
        #[arg(long, default_value = "zero")]
        variant: Variant,
        /// Genome as JSON, e.g. '{"signs":[-1],"weights":[0.8]}'. Defaults to zero weights.
        #[arg(long)]
        genome: Option<String>,
    },
    /// Composite index of one network against the target.
    Assess {
        /// Edge list of the network to assess.
        #[arg(long)]
        sim: PathBuf,
        #[arg(long)]
        sim_attrs: Option<PathBuf>,
    },
    /// Triad census, Z-scores and significance profile of the target.
    Census,
    /// NSGA-II search for the sDNA of one variant.
    Optimize {
        #[arg(long, default_value = "real")]
        variant: Variant,
    },
    /// Full protocol over all configured variants.
    Experiment,
}

impl Common {
    fn experiment_config(&self) -> Result<ExperimentConfig> {
        let mut config = match &self.config {
            Some(path) => ExperimentConfig::from_path(path)?,
            None => ExperimentConfig::default(),
        };
        if let Some(seed) = self.seed {
            config.seed = seed;
        }
        if let Some(target) = &self.target {
            config.target.edges = target.clone();
            config.target.attributes = self.target_attrs.clone();
        } else if self.target_attrs.is_some() {
            config.target.attributes = self.target_attrs.clone();
        }
        if let Some(out) = &self.out {
            config.output_dir = Some(out.clone());
        }
        Ok(config)
    }

    fn ensemble(&self, config: &ExperimentConfig) -> EnsembleConfig {
        EnsembleConfig {
            samples: config.ensemble.samples,
            seed: snsim::experiment::SeedPlan::new(config.seed).ensemble,
        }
    }
}

fn print_json<T: Serialize>(value: &T) -> Result<()> {
    println!("{}", serde_json::to_string_pretty(value)?);
    Ok(())
}

fn path_str(path: &Path) -> Result<&str> {
    path.to_str()
        .ok_or_else(|| Error::Config(format!("path {} is not valid UTF-8", path.display())))
}

fn single_variant(mut config: ExperimentConfig, variant: Variant) -> ExperimentConfig {
    config.variants = vec![variant];
    config
}

fn simulate(common: &Common, variant: Variant, genome: Option<&str>) -> Result<()> {
    let config = single_variant(common.experiment_config()?, variant);
    let ctx = ExperimentContext::new(config)?;
    let sim_config = ctx.sim_config(variant)?;
    let width = sim_config.initial_attributes.first().map_or(0, |a| a.len());
    let genome = match genome {
        Some(text) => {
            let g: Genome = serde_json::from_str(text).map_err(|e| Error::Config(format!("genome: {e}")))?;
            g.validate()?;
            g
        }
        None => Genome::new(vec![1; width], vec![0.0; width])?,
    };
    if genome.len() != width {
        return Err(Error::Config(format!(
            "genome has {} entries, variant has {width} features",
            genome.len()
        )));
    }
    let run = run_genome(&genome, &ctx.assessor, &sim_config)?;
    let report = VariantReport {
        variant,
        feature_count: width,
        genome,
        objectives: run.objectives,
        best_iteration: run.trace.snapshots[run.best_snapshot].iteration,
        front: Vec::new(),
        generations: Vec::new(),
        series: run
            .trace
            .snapshots
            .iter()
            .zip(&run.reports)
            .map(|(s, r)| snsim::experiment::IterationRecord {
                iteration: s.iteration,
                edge_count: s.network.edge_count(),
                cost: s.cost,
                wall_seconds: s.wall_seconds,
                index: r.clone(),
            })
            .collect(),
    };
    match &ctx.config.output_dir {
        Some(dir) => {
            let mut writer = ReportWriter::create(dir, common.force)?;
            writer.write("series.csv", series_csv(&report).as_bytes())?;
            write_trace(&mut writer, "", &run.trace)?;
            let manifest = writer.finish()?;
            eprintln!("wrote {} files to {}", manifest.files.len(), dir.display());
        }
        None => print!("{}", series_csv(&report)),
    }
    Ok(())
}

fn assess(common: &Common, sim: &Path, sim_attrs: Option<&Path>) -> Result<()> {
    let config = common.experiment_config()?;
    let report = assess_pair(
        path_str(sim)?,
        sim_attrs.map(path_str).transpose()?,
        &config.target.edges,
        config.target.attributes.as_deref(),
        common.ensemble(&config),
    )?;
    print_json(&report)
}

#[derive(Serialize)]
struct CensusOutput {
    nodes: usize,
    edges: usize,
    census: [u64; 4],
    zscores: [Option<f64>; 4],
    significance: [Option<f64>; 4],
}

fn census(common: &Common) -> Result<()> {
    let config = common.experiment_config()?;
    let net = load_target(&config.target.edges, config.target.attributes.as_deref())?;
    let ensemble = common.ensemble(&config);
    let census = triad_census(&net)?;
    let z = triad_zscores(&net, &ensemble)?;
    print_json(&CensusOutput {
        nodes: net.node_count(),
        edges: net.edge_count(),
        census: census.counts,
        zscores: z,
        significance: significance_profile(z),
    })
}

fn optimize(common: &Common, variant: Variant) -> Result<()> {
    let config = single_variant(common.experiment_config()?, variant);
    let ctx = ExperimentContext::new(config)?;
    let outcome = ctx.run_variant(variant)?;
    match &ctx.config.output_dir {
        Some(dir) => {
            let mut writer = ReportWriter::create(dir, common.force)?;
            writer.write_json("front.json", &outcome.front)?;
            writer.write("generations.csv", generations_csv(&outcome.generations).as_bytes())?;
            write_trace(&mut writer, "", &outcome.run.trace)?;
            let manifest = writer.finish()?;
            eprintln!("wrote {} files to {}", manifest.files.len(), dir.display());
            Ok(())
        }
        None => print_json(&outcome.front),
    }
}

fn experiment(common: &Common) -> Result<()> {
    let config = common.experiment_config()?;
    let dir = config
        .output_dir
        .clone()
        .ok_or_else(|| Error::Config("experiment needs --out or output_dir".into()))?;
    if dir.join(snsim::experiment::MANIFEST_FILE).exists() && !common.force {
        return Err(Error::OutputExists(dir));
    }
    let outcome = run_experiment(&config)?;
    let manifest = write_report(&outcome, &dir, common.force)?;
    for v in &outcome.report.variants {
        let best = v.series.iter().find(|r| r.iteration == v.best_iteration);
        println!(
            "{:<9} best iteration {} combined {:.4}",
            v.variant.name(),
            v.best_iteration,
            best.map_or(f64::NAN, |r| r.index.combined_index)
        );
    }
    eprintln!("wrote {} files to {}", manifest.files.len(), dir.display());
    Ok(())
}

fn run(cli: Cli) -> Result<()> {
    let common = &cli.common;
    match cli.command {
        Command::Simulate { variant, genome } => simulate(common, variant, genome.as_deref()),
        Command::Assess { sim, sim_attrs } => assess(common, &sim, sim_attrs.as_deref()),
        Command::Census => census(common),
        Command::Optimize { variant } => optimize(common, variant),
        Command::Experiment => experiment(common),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
