//! Experiment orchestration: feature variants, sDNA optimisation,
//! per-iteration assessment and report files.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::assessment::{Assessor, IndexReport, Measure, Weights};
use crate::data::load_target;
use crate::error::{Error, Result};
use crate::graph::{load_network, AttributedNetwork, NodeAttributes};
use crate::metrics::local::{binary_labels, EnsembleConfig, TriadCensus};
use crate::optimizer::{
    evolve, run_genome, GenerationSummary, Genome, GenomeRun, NsgaParams, ObjectivePoint, SdnaProblem,
};
use crate::scoring::ScoringParams;
use crate::seeds::derive_seed;
use crate::simulator::{synthesize_binary_feature, GrowthTrace, SimulationConfig};

pub const DEFAULT_SEED: u64 = 42;

/// Seed-stream counters under the top-level seed.
const FEATURE_STREAM: u64 = 1;
const ENSEMBLE_STREAM: u64 = 2;
const OPTIMIZER_STREAM: u64 = 16;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Variant {
    /// No node features.
    Zero,
    /// The target's observed feature columns.
    Real,
    /// One synthesized uniform binary column.
    Simulated,
    /// Observed columns followed by the synthesized column.
    Hybrid,
}

impl Variant {
    pub const ALL: [Variant; 4] = [Variant::Zero, Variant::Real, Variant::Simulated, Variant::Hybrid];

    pub fn name(self) -> &'static str {
        match self {
            Variant::Zero => "zero",
            Variant::Real => "real",
            Variant::Simulated => "simulated",
            Variant::Hybrid => "hybrid",
        }
    }

    fn index(self) -> u64 {
        self as u64
    }

    fn needs_real_features(self) -> bool {
        matches!(self, Variant::Real | Variant::Hybrid)
    }
}

impl std::str::FromStr for Variant {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Variant::ALL
            .into_iter()
            .find(|v| v.name() == s)
            .ok_or_else(|| Error::Config(format!("unknown variant {s:?}")))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct TargetConfig {
    /// Edge-list path, or `karate` for the bundled dataset.
    pub edges: String,
    pub attributes: Option<String>,
}

impl Default for TargetConfig {
    fn default() -> Self {
        Self {
            edges: "karate".into(),
            attributes: None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SimSettings {
    pub iterations: usize,
    pub edge_rate: f64,
    pub scoring: ScoringParams,
    pub stop_on_saturation: bool,
}

impl Default for SimSettings {
    fn default() -> Self {
        Self {
            iterations: 8,
            edge_rate: 0.04,
            scoring: ScoringParams::default(),
            stop_on_saturation: false,
        }
    }
}

/// NSGA-II settings; the seed comes from the experiment seed.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct OptimizerSettings {
    pub population: usize,
    pub generations: usize,
    pub crossover_prob: f64,
    pub sbx_eta: f64,
    pub mutation_eta: f64,
    pub mutation_prob: Option<f64>,
}

impl Default for OptimizerSettings {
    fn default() -> Self {
        let p = NsgaParams::default();
        Self {
            population: p.population,
            generations: p.generations,
            crossover_prob: p.crossover_prob,
            sbx_eta: p.sbx_eta,
            mutation_eta: p.mutation_eta,
            mutation_prob: p.mutation_prob,
        }
    }
}

impl OptimizerSettings {
    pub fn params(&self, seed: u64) -> NsgaParams {
        NsgaParams {
            population: self.population,
            generations: self.generations,
            crossover_prob: self.crossover_prob,
            sbx_eta: self.sbx_eta,
            mutation_eta: self.mutation_eta,
            mutation_prob: self.mutation_prob,
            seed,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct EnsembleSettings {
    pub samples: usize,
}

impl Default for EnsembleSettings {
    fn default() -> Self {
        Self {
            samples: EnsembleConfig::default().samples,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ExperimentConfig {
    pub target: TargetConfig,
    pub variants: Vec<Variant>,
    pub sim: SimSettings,
    pub nsga: OptimizerSettings,
    pub ensemble: EnsembleSettings,
    pub weights: Weights,
    pub output_dir: Option<PathBuf>,
    pub seed: u64,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            target: TargetConfig::default(),
            variants: Variant::ALL.to_vec(),
            sim: SimSettings::default(),
            nsga: OptimizerSettings::default(),
            ensemble: EnsembleSettings::default(),
            weights: Weights::default(),
            output_dir: None,
            seed: DEFAULT_SEED,
        }
    }
}

impl ExperimentConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Config(format!("config: {e}")))
    }

    pub fn from_path(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_json(&text)
    }

    pub fn validate(&self) -> Result<()> {
        if self.variants.is_empty() {
            return Err(Error::Config("no variants selected".into()));
        }
        let mut seen = self.variants.clone();
        seen.sort();
        seen.dedup();
        if seen.len() != self.variants.len() {
            return Err(Error::Config("variants listed more than once".into()));
        }
        if self.ensemble.samples == 0 {
            return Err(Error::Config("ensemble.samples must be >= 1".into()));
        }
        if self.variants.iter().any(|v| v.needs_real_features())
            && self.target.edges != "karate"
            && self.target.attributes.is_none()
        {
            return Err(Error::Config(
                "real and hybrid variants need a target attribute table".into(),
            ));
        }
        self.sim.scoring.validate().map_err(|e| Error::Config(e.to_string()))?;
        self.weights.validate().map_err(|e| Error::Config(e.to_string()))?;
        self.nsga.params(0).validate().map_err(|e| Error::Config(e.to_string()))
    }
}

/// Every seed used by one experiment, derived from the top-level seed.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SeedPlan {
    pub master: u64,
    pub feature: u64,
    pub ensemble: u64,
    pub optimizer: BTreeMap<Variant, u64>,
}

impl SeedPlan {
    pub fn new(master: u64) -> Self {
        Self {
            master,
            feature: derive_seed(master, FEATURE_STREAM),
            ensemble: derive_seed(master, ENSEMBLE_STREAM),
            optimizer: Variant::ALL
                .into_iter()
                .map(|v| (v, derive_seed(master, OPTIMIZER_STREAM + v.index())))
                .collect(),
        }
    }
}

/// Target, assessor and per-variant feature tables for one experiment.
pub struct ExperimentContext {
    pub config: ExperimentConfig,
    pub seeds: SeedPlan,
    pub target: AttributedNetwork,
    pub assessor: Assessor,
    simulated_feature: Vec<f64>,
}

impl ExperimentContext {
    pub fn new(config: ExperimentConfig) -> Result<Self> {
        config.validate()?;
        let target = load_target(&config.target.edges, config.target.attributes.as_deref())?;
        Self::with_target(config, target)
    }

    pub fn with_target(config: ExperimentConfig, target: AttributedNetwork) -> Result<Self> {
        config.validate()?;
        if target.node_count() < 2 {
            return Err(Error::validation("target needs at least 2 nodes"));
        }
        if config.variants.iter().any(|v| v.needs_real_features()) && target.feature_count() == 0 {
            return Err(Error::Config(
                "real and hybrid variants need a target attribute table".into(),
            ));
        }
        let seeds = SeedPlan::new(config.seed);
        let simulated_feature = synthesize_binary_feature(target.node_count(), seeds.feature);
        // Triangles are typed by the target's first binary column when there
        // is one, otherwise by the synthesized column.
        let labels = binary_labels(&target).unwrap_or_else(|_| simulated_feature.iter().map(|&x| x as u8).collect());
        let ensemble = EnsembleConfig {
            samples: config.ensemble.samples,
            seed: seeds.ensemble,
        };
        let assessor = Assessor::new(&target, Some(labels), ensemble, config.weights)?;
        Ok(Self {
            config,
            seeds,
            target,
            assessor,
            simulated_feature,
        })
    }

    /// Feature rows for every node under `variant`.
    pub fn features(&self, variant: Variant) -> Vec<Vec<f64>> {
        let real = |i: usize| self.target.attributes()[i].features.clone();
        (0..self.target.node_count())
            .map(|i| match variant {
                Variant::Zero => Vec::new(),
                Variant::Real => real(i),
                Variant::Simulated => vec![self.simulated_feature[i]],
                Variant::Hybrid => {
                    let mut row = real(i);
                    row.push(self.simulated_feature[i]);
                    row
                }
            })
            .collect()
    }

    pub fn sim_config(&self, variant: Variant) -> Result<SimulationConfig> {
        let attributes = self
            .features(variant)
            .into_iter()
            .map(NodeAttributes::from_features)
            .collect::<Result<Vec<_>>>()?;
        let sim = &self.config.sim;
        Ok(SimulationConfig {
            iterations: sim.iterations,
            edge_rate: sim.edge_rate,
            scoring: sim.scoring.clone(),
            seed: self.seeds.feature,
            initial_attributes: attributes,
            stop_on_saturation: sim.stop_on_saturation,
        })
    }

    /// Optimises the sDNA of `variant` (skipped without features) and replays
    /// the chosen genome.
    pub fn run_variant(&self, variant: Variant) -> Result<VariantOutcome> {
        let sim_config = self.sim_config(variant)?;
        let feature_count = sim_config.initial_attributes.first().map_or(0, NodeAttributes::len);
        let (genome, front, generations) = if feature_count == 0 {
            (Genome::default(), Vec::new(), Vec::new())
        } else {
            let problem = SdnaProblem {
                assessor: &self.assessor,
                sim_config: &sim_config,
            };
            let params = self.config.nsga.params(self.seeds.optimizer[&variant]);
            let evolution = evolve(&problem, &params)?;
            // The front is already ordered by (similarity, cost, genome).
            let best = evolution.front[0].genome.clone();
            let front = evolution
                .front
                .iter()
                .map(|i| FrontEntry {
                    genome: i.genome.clone(),
                    objectives: i.objectives,
                })
                .collect();
            (best, front, evolution.history)
        };
        let run = run_genome(&genome, &self.assessor, &sim_config)?;
        Ok(VariantOutcome {
            variant,
            feature_count,
            genome,
            front,
            generations,
            run,
        })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FrontEntry {
    pub genome: Genome,
    pub objectives: ObjectivePoint,
}

pub struct VariantOutcome {
    pub variant: Variant,
    pub feature_count: usize,
    pub genome: Genome,
    pub front: Vec<FrontEntry>,
    pub generations: Vec<GenerationSummary>,
    pub run: GenomeRun,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct IterationRecord {
    pub iteration: usize,
    pub edge_count: usize,
    pub cost: u64,
    pub wall_seconds: f64,
    pub index: IndexReport,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VariantReport {
    pub variant: Variant,
    pub feature_count: usize,
    pub genome: Genome,
    pub objectives: ObjectivePoint,
    pub best_iteration: usize,
    pub front: Vec<FrontEntry>,
    pub generations: Vec<GenerationSummary>,
    pub series: Vec<IterationRecord>,
}

impl VariantReport {
    pub fn combined_series(&self) -> Vec<f64> {
        self.series.iter().map(|r| r.index.combined_index).collect()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TargetSummary {
    pub nodes: usize,
    pub edges: usize,
    /// Original input label of each dense node id.
    pub node_labels: Vec<String>,
    pub census: Option<TriadCensus>,
    pub significance: [Option<f64>; 4],
    pub density: Option<f64>,
    pub modularity: Option<f64>,
    pub assortativity: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Provenance {
    pub tool: String,
    pub version: String,
    pub config: ExperimentConfig,
    pub seeds: SeedPlan,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExperimentReport {
    pub provenance: Provenance,
    pub target: TargetSummary,
    pub variants: Vec<VariantReport>,
}

impl ExperimentReport {
    pub fn variant(&self, v: Variant) -> Option<&VariantReport> {
        self.variants.iter().find(|r| r.variant == v)
    }
}

/// Report plus the replayed traces needed to write snapshot files.
pub struct ExperimentOutcome {
    pub report: ExperimentReport,
    pub traces: BTreeMap<Variant, GrowthTrace>,
}

pub fn run_experiment(config: &ExperimentConfig) -> Result<ExperimentOutcome> {
    let ctx = ExperimentContext::new(config.clone())?;
    run_with_context(&ctx)
}

pub fn run_with_context(ctx: &ExperimentContext) -> Result<ExperimentOutcome> {
    let outcomes = ctx
        .config
        .variants
        .par_iter()
        .map(|&v| ctx.run_variant(v))
        .collect::<Result<Vec<_>>>()?;

    let target_metrics = ctx.assessor.target();
    let target = TargetSummary {
        nodes: ctx.target.node_count(),
        edges: ctx.target.edge_count(),
        node_labels: ctx.target.labels().to_vec(),
        census: target_metrics.census,
        significance: target_metrics.significance,
        density: target_metrics.density,
        modularity: target_metrics.modularity,
        assortativity: target_metrics.assortativity,
    };
    let mut traces = BTreeMap::new();
    let mut variants = Vec::with_capacity(outcomes.len());
    for outcome in outcomes {
        let run = outcome.run;
        let series = run
            .trace
            .snapshots
            .iter()
            .zip(&run.reports)
            .map(|(s, r)| IterationRecord {
                iteration: s.iteration,
                edge_count: s.network.edge_count(),
                cost: s.cost,
                wall_seconds: s.wall_seconds,
                index: r.clone(),
            })
            .collect();
        variants.push(VariantReport {
            variant: outcome.variant,
            feature_count: outcome.feature_count,
            genome: outcome.genome,
            objectives: run.objectives,
            best_iteration: run.trace.snapshots[run.best_snapshot].iteration,
            front: outcome.front,
            generations: outcome.generations,
            series,
        });
        traces.insert(outcome.variant, run.trace);
    }
    Ok(ExperimentOutcome {
        report: ExperimentReport {
            provenance: Provenance {
                tool: env!("CARGO_PKG_NAME").into(),
                version: env!("CARGO_PKG_VERSION").into(),
                config: ctx.config.clone(),
                seeds: ctx.seeds.clone(),
            },
            target,
            variants,
        },
        traces,
    })
}

/// Assesses one network file against a target file (or `karate`).
pub fn assess_pair(
    sim_edges: &str,
    sim_attributes: Option<&str>,
    target_edges: &str,
    target_attributes: Option<&str>,
    ensemble: EnsembleConfig,
) -> Result<IndexReport> {
    let target = load_target(target_edges, target_attributes)?;
    let sim_text = fs::read_to_string(sim_edges).map_err(|e| Error::io(sim_edges, e))?;
    let attr_text = sim_attributes
        .map(|p| fs::read_to_string(p).map_err(|e| Error::io(p, e)))
        .transpose()?;
    let sim = load_network(&sim_text, attr_text.as_deref(), Some(target.node_count()))?;
    assess_networks(&sim, &target, ensemble)
}

/// Index of `sim` against `target`; triangles typed by the target's first binary column.
pub fn assess_networks(
    sim: &AttributedNetwork,
    target: &AttributedNetwork,
    ensemble: EnsembleConfig,
) -> Result<IndexReport> {
    if sim.node_count() != target.node_count() {
        return Err(Error::validation(format!(
            "simulated network has {} nodes, target has {}",
            sim.node_count(),
            target.node_count()
        )));
    }
    let assessor = Assessor::new(target, None, ensemble, Weights::default())?;
    assessor.assess(sim)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ManifestEntry {
    pub path: String,
    pub bytes: u64,
    pub sha256: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub files: Vec<ManifestEntry>,
}

pub const MANIFEST_FILE: &str = "manifest.json";

/// Collects files under one output directory and finishes with a checksummed manifest.
pub struct ReportWriter {
    root: PathBuf,
    entries: Vec<ManifestEntry>,
}

impl ReportWriter {
    /// Refuses a directory that already holds a manifest unless `force` is set.
    pub fn create(root: &Path, force: bool) -> Result<Self> {
        if root.join(MANIFEST_FILE).exists() && !force {
            return Err(Error::OutputExists(root.to_path_buf()));
        }
        fs::create_dir_all(root).map_err(|e| Error::io(root, e))?;
        Ok(Self {
            root: root.to_path_buf(),
            entries: Vec::new(),
        })
    }

    pub fn write(&mut self, relative: &str, contents: &[u8]) -> Result<()> {
        let path = self.root.join(relative);
        if let Some(parent) = path.parent() {
            fs::create_dir_all(parent).map_err(|e| Error::io(parent, e))?;
        }
        fs::write(&path, contents).map_err(|e| Error::io(&path, e))?;
        self.entries.push(ManifestEntry {
            path: relative.to_string(),
            bytes: contents.len() as u64,
            sha256: hex::encode(Sha256::digest(contents)),
        });
        Ok(())
    }

    pub fn write_json<T: Serialize>(&mut self, relative: &str, value: &T) -> Result<()> {
        let mut text = serde_json::to_string_pretty(value)?;
        text.push('\n');
        self.write(relative, text.as_bytes())
    }

    pub fn finish(self) -> Result<Manifest> {
        let manifest = Manifest { files: self.entries };
        let path = self.root.join(MANIFEST_FILE);
        let mut text = serde_json::to_string_pretty(&manifest)?;
        text.push('\n');
        fs::write(&path, text).map_err(|e| Error::io(&path, e))?;
        Ok(manifest)
    }
}

/// Verifies every manifest checksum against the files on disk.
pub fn verify_manifest(root: &Path) -> Result<Manifest> {
    let path = root.join(MANIFEST_FILE);
    let text = fs::read_to_string(&path).map_err(|e| Error::io(&path, e))?;
    let manifest: Manifest = serde_json::from_str(&text)?;
    for entry in &manifest.files {
        let file = root.join(&entry.path);
        let bytes = fs::read(&file).map_err(|e| Error::io(&file, e))?;
        if hex::encode(Sha256::digest(&bytes)) != entry.sha256 || bytes.len() as u64 != entry.bytes {
            return Err(Error::validation(format!("checksum mismatch for {}", entry.path)));
        }
    }
    Ok(manifest)
}

const SERIES_HEADER: &str = "iteration,edge_count,global,local,combined,cost,wall_seconds";

/// Per-iteration index time series.
pub fn series_csv(report: &VariantReport) -> String {
    let mut out = String::from(SERIES_HEADER);
    for m in Measure::ALL {
        out.push(',');
        out.push_str(m.name());
    }
    out.push('\n');
    for r in &report.series {
        let _ = write!(
            out,
            "{},{},{},{},{},{},{:.6}",
            r.iteration,
            r.edge_count,
            r.index.global_index,
            r.index.local_index,
            r.index.combined_index,
            r.cost,
            r.wall_seconds
        );
        for d in &r.index.per_measure {
            let _ = write!(out, ",{}", d.value);
        }
        out.push('\n');
    }
    out
}

/// One row per snapshot: iteration, edge count, cumulative cost, wall time.
pub fn trace_csv(trace: &GrowthTrace) -> String {
    let mut out = String::from("iteration,edge_count,cost,wall_seconds\n");
    for s in &trace.snapshots {
        let _ = writeln!(
            out,
            "{},{},{},{:.6}",
            s.iteration,
            s.network.edge_count(),
            s.cost,
            s.wall_seconds
        );
    }
    out
}

pub fn generations_csv(history: &[GenerationSummary]) -> String {
    let mut out = String::from("generation,best_similarity,front_size\n");
    for g in history {
        let _ = writeln!(out, "{},{},{}", g.generation, g.best_similarity, g.front_size);
    }
    out
}

/// Writes snapshot edge lists and `trace.csv` for one trace under `prefix`.
pub fn write_trace(writer: &mut ReportWriter, prefix: &str, trace: &GrowthTrace) -> Result<()> {
    writer.write(&format!("{prefix}trace.csv"), trace_csv(trace).as_bytes())?;
    for s in &trace.snapshots {
        writer.write(
            &format!("{prefix}snapshots/iter_{:03}.edges", s.iteration),
            s.network.to_edge_list().as_bytes(),
        )?;
    }
    Ok(())
}

/// Writes the JSON report, per-variant series, traces, fronts and the manifest.
pub fn write_report(outcome: &ExperimentOutcome, output_dir: &Path, force: bool) -> Result<Manifest> {
    let mut writer = ReportWriter::create(output_dir, force)?;
    writer.write_json("report.json", &outcome.report)?;
    for v in &outcome.report.variants {
        let prefix = format!("{}/", v.variant.name());
        writer.write(&format!("{prefix}series.csv"), series_csv(v).as_bytes())?;
        if !v.front.is_empty() {
            writer.write_json(&format!("{prefix}front.json"), &v.front)?;
            writer.write(
                &format!("{prefix}generations.csv"),
                generations_csv(&v.generations).as_bytes(),
            )?;
        }
        if let Some(trace) = outcome.traces.get(&v.variant) {
            write_trace(&mut writer, &prefix, trace)?;
        }
    }
    writer.finish()
}
