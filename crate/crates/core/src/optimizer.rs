//! NSGA-II search over population-level sDNA.
//!
//! A [`Genome`] holds one preference sign and one preference weight per
//! feature, shared by every node. Both objectives are minimised: the best
//! composite index reached along the growth trace, and the deterministic
//! evaluation cost at that iteration.

use std::cmp::Ordering;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::assessment::{Assessor, IndexReport};
use crate::error::{Error, Result};
use crate::graph::NodeAttributes;
use crate::simulator::{run, GrowthTrace, SimulationConfig};

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Genome {
    pub signs: Vec<i8>,
    pub weights: Vec<f64>,
}

impl Genome {
    pub fn new(signs: Vec<i8>, weights: Vec<f64>) -> Result<Self> {
        let g = Self { signs, weights };
        g.validate()?;
        Ok(g)
    }

    pub fn random<R: Rng>(len: usize, rng: &mut R) -> Self {
        Self {
            signs: (0..len).map(|_| if rng.random_bool(0.5) { 1 } else { -1 }).collect(),
            weights: (0..len).map(|_| rng.random::<f64>()).collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.signs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.signs.is_empty()
    }

    pub fn validate(&self) -> Result<()> {
        if self.signs.len() != self.weights.len() {
            return Err(Error::validation("genome signs and weights differ in length"));
        }
        if self.signs.iter().any(|s| *s != 1 && *s != -1) {
            return Err(Error::validation("genome sign outside {-1, +1}"));
        }
        if self.weights.iter().any(|w| !(0.0..=1.0).contains(w)) {
            return Err(Error::validation("genome weight outside [0, 1]"));
        }
        Ok(())
    }

    /// Total order used to break ties between otherwise equal genomes.
    pub fn lexicographic_cmp(&self, other: &Self) -> Ordering {
        self.signs.cmp(&other.signs).then_with(|| {
            self.weights
                .iter()
                .zip(&other.weights)
                .map(|(a, b)| a.total_cmp(b))
                .find(|o| o.is_ne())
                .unwrap_or(Ordering::Equal)
        })
    }

    /// Copies `features` to every node with this genome as the shared sDNA.
    pub fn apply(&self, features: &[Vec<f64>]) -> Result<Vec<NodeAttributes>> {
        features
            .iter()
            .map(|f| {
                if f.len() != self.len() {
                    return Err(Error::validation(format!(
                        "genome has {} entries, node has {} features",
                        self.len(),
                        f.len()
                    )));
                }
                NodeAttributes::new(f.clone(), self.signs.clone(), self.weights.clone())
            })
            .collect()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ObjectivePoint {
    /// Composite distance to the target (lower is more similar).
    pub similarity: f64,
    /// Cumulative pair-score evaluations at the chosen iteration.
    pub cost: f64,
}

impl ObjectivePoint {
    pub fn new(similarity: f64, cost: f64) -> Self {
        Self { similarity, cost }
    }

    /// `≤` on both objectives and `<` on at least one.
    pub fn dominates(&self, other: &Self) -> bool {
        self.similarity <= other.similarity
            && self.cost <= other.cost
            && (self.similarity < other.similarity || self.cost < other.cost)
    }

    fn get(&self, objective: usize) -> f64 {
        if objective == 0 {
            self.similarity
        } else {
            self.cost
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct NsgaParams {
    pub population: usize,
    pub generations: usize,
    pub crossover_prob: f64,
    pub sbx_eta: f64,
    pub mutation_eta: f64,
    /// Per-gene mutation probability; `None` means `1 / (2F)`.
    pub mutation_prob: Option<f64>,
    pub seed: u64,
}

impl Default for NsgaParams {
    fn default() -> Self {
        Self {
            population: 20,
            generations: 10,
            crossover_prob: 0.9,
            sbx_eta: 15.0,
            mutation_eta: 20.0,
            mutation_prob: None,
            seed: 0,
        }
    }
}

impl NsgaParams {
    pub fn validate(&self) -> Result<()> {
        if self.population < 4 || !self.population.is_multiple_of(2) {
            return Err(Error::validation(format!(
                "population {} must be even and at least 4",
                self.population
            )));
        }
        if self.generations == 0 {
            return Err(Error::validation("generations must be >= 1"));
        }
        let probs = [Some(self.crossover_prob), self.mutation_prob];
        if probs.into_iter().flatten().any(|p| !(0.0..=1.0).contains(&p)) {
            return Err(Error::validation("probabilities must lie in [0, 1]"));
        }
        if !(self.sbx_eta >= 0.0 && self.mutation_eta >= 0.0) {
            return Err(Error::validation("distribution indexes must be non-negative"));
        }
        Ok(())
    }

    fn mutation_rate(&self, len: usize) -> f64 {
        self.mutation_prob
            .unwrap_or(if len == 0 { 0.0 } else { 1.0 / (2 * len) as f64 })
    }
}

/// A bi-objective minimisation problem over genomes of fixed length.
pub trait Problem: Sync {
    fn genome_len(&self) -> usize;
    fn evaluate(&self, genome: &Genome) -> Result<ObjectivePoint>;
}

/// Outcome of simulating one genome and assessing every snapshot.
#[derive(Clone, Debug)]
pub struct GenomeRun {
    pub objectives: ObjectivePoint,
    /// Index into `trace.snapshots` of the best snapshot.
    pub best_snapshot: usize,
    pub trace: GrowthTrace,
    pub reports: Vec<IndexReport>,
}

/// Runs the simulator with `genome` as the shared sDNA and assesses each snapshot.
pub fn run_genome(genome: &Genome, assessor: &Assessor, sim_config: &SimulationConfig) -> Result<GenomeRun> {
    genome.validate()?;
    let features: Vec<Vec<f64>> = sim_config
        .initial_attributes
        .iter()
        .map(|a| a.features.clone())
        .collect();
    let config = SimulationConfig {
        initial_attributes: genome.apply(&features)?,
        ..sim_config.clone()
    };
    let trace = run(&config)?;
    let reports = trace
        .snapshots
        .iter()
        .map(|s| assessor.assess(&s.network))
        .collect::<Result<Vec<_>>>()?;
    let mut best = 0;
    for (k, r) in reports.iter().enumerate() {
        if r.combined_index < reports[best].combined_index {
            best = k;
        }
    }
    let objectives = ObjectivePoint::new(reports[best].combined_index, trace.snapshots[best].cost as f64);
    Ok(GenomeRun {
        objectives,
        best_snapshot: best,
        trace,
        reports,
    })
}

/// `(min combined index over the trace, cost at that snapshot)`.
pub fn evaluate_genome(genome: &Genome, assessor: &Assessor, sim_config: &SimulationConfig) -> Result<ObjectivePoint> {
    Ok(run_genome(genome, assessor, sim_config)?.objectives)
}

/// Tuning the shared sDNA of a simulation against a target.
pub struct SdnaProblem<'a> {
    pub assessor: &'a Assessor,
    pub sim_config: &'a SimulationConfig,
}

impl Problem for SdnaProblem<'_> {
    fn genome_len(&self) -> usize {
        self.sim_config
            .initial_attributes
            .first()
            .map_or(0, NodeAttributes::len)
    }

    fn evaluate(&self, genome: &Genome) -> Result<ObjectivePoint> {
        evaluate_genome(genome, self.assessor, self.sim_config)
    }
}

/// Partitions points into Pareto fronts; indices within a front ascend.
pub fn non_dominated_sort(points: &[ObjectivePoint]) -> Vec<Vec<usize>> {
    let n = points.len();
    let mut dominated_by_count = vec![0usize; n];
    let mut dominates: Vec<Vec<usize>> = vec![Vec::new(); n];
    for p in 0..n {
        for q in (p + 1)..n {
            if points[p].dominates(&points[q]) {
                dominates[p].push(q);
                dominated_by_count[q] += 1;
            } else if points[q].dominates(&points[p]) {
                dominates[q].push(p);
                dominated_by_count[p] += 1;
            }
        }
    }
    let mut fronts = Vec::new();
    let mut current: Vec<usize> = (0..n).filter(|&i| dominated_by_count[i] == 0).collect();
    while !current.is_empty() {
        let mut next = Vec::new();
        for &p in &current {
            for &q in &dominates[p] {
                dominated_by_count[q] -= 1;
                if dominated_by_count[q] == 0 {
                    next.push(q);
                }
            }
        }
        next.sort_unstable();
        fronts.push(std::mem::replace(&mut current, next));
    }
    fronts
}

/// Crowding distance of each point within one front. Boundary points on
/// either objective get `f64::INFINITY`.
pub fn crowding_distance(front: &[ObjectivePoint]) -> Vec<f64> {
    let n = front.len();
    let mut dist = vec![0.0; n];
    if n <= 2 {
        return vec![f64::INFINITY; n];
    }
    for objective in 0..2 {
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&a, &b| {
            front[a]
                .get(objective)
                .total_cmp(&front[b].get(objective))
                .then(a.cmp(&b))
        });
        let lo = front[order[0]].get(objective);
        let hi = front[order[n - 1]].get(objective);
        dist[order[0]] = f64::INFINITY;
        dist[order[n - 1]] = f64::INFINITY;
        let range = hi - lo;
        if range <= 0.0 {
            continue;
        }
        for k in 1..n - 1 {
            let gap = front[order[k + 1]].get(objective) - front[order[k - 1]].get(objective);
            dist[order[k]] += gap / range;
        }
    }
    dist
}

/// Dominated area within `reference` (both objectives minimised).
pub fn hypervolume_2d(points: &[ObjectivePoint], reference: ObjectivePoint) -> f64 {
    let mut pts: Vec<(f64, f64)> = points
        .iter()
        .filter(|p| p.similarity < reference.similarity && p.cost < reference.cost)
        .map(|p| (p.similarity, p.cost))
        .collect();
    pts.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.total_cmp(&b.1)));
    let mut area = 0.0;
    let mut ceiling = reference.cost;
    for (x, y) in pts {
        if y < ceiling {
            area += (reference.similarity - x) * (ceiling - y);
            ceiling = y;
        }
    }
    area
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Individual {
    pub genome: Genome,
    pub objectives: ObjectivePoint,
    pub rank: usize,
    pub crowding: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GenerationSummary {
    pub generation: usize,
    pub best_similarity: f64,
    pub front_size: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Evolution {
    /// First front of the final population, ordered by `(similarity, cost, genome)`.
    pub front: Vec<Individual>,
    pub population: Vec<Individual>,
    pub history: Vec<GenerationSummary>,
    pub evaluations: usize,
}

pub fn evolve<P: Problem>(problem: &P, params: &NsgaParams) -> Result<Evolution> {
    evolve_from(problem, params, Vec::new())
}

/// NSGA-II seeded with `initial` genomes; the remainder of the first
/// population is drawn uniformly at random.
pub fn evolve_from<P: Problem>(problem: &P, params: &NsgaParams, initial: Vec<Genome>) -> Result<Evolution> {
    params.validate()?;
    let len = problem.genome_len();
    let size = params.population;
    let mut rng = ChaCha8Rng::seed_from_u64(params.seed);

    let mut genomes = initial;
    genomes.truncate(size);
    for g in &genomes {
        g.validate()?;
        if g.len() != len {
            return Err(Error::validation(format!(
                "initial genome has {} entries, expected {len}",
                g.len()
            )));
        }
    }
    while genomes.len() < size {
        genomes.push(Genome::random(len, &mut rng));
    }

    let mut evaluations = 0;
    let mut population = evaluate_all(problem, genomes, &mut evaluations)?;
    assign_rank_and_crowding(&mut population);
    let mut history = vec![summarize(0, &population)];

    for generation in 1..=params.generations {
        let offspring = make_offspring(&population, params, len, &mut rng);
        let offspring = evaluate_all(problem, offspring, &mut evaluations)?;
        population.extend(offspring);
        population = environmental_selection(population, size);
        history.push(summarize(generation, &population));
    }

    let mut front: Vec<Individual> = population.iter().filter(|i| i.rank == 0).cloned().collect();
    front.sort_by(|a, b| {
        a.objectives
            .similarity
            .total_cmp(&b.objectives.similarity)
            .then(a.objectives.cost.total_cmp(&b.objectives.cost))
            .then_with(|| a.genome.lexicographic_cmp(&b.genome))
    });
    Ok(Evolution {
        front,
        population,
        history,
        evaluations,
    })
}

fn evaluate_all<P: Problem>(problem: &P, genomes: Vec<Genome>, counter: &mut usize) -> Result<Vec<Individual>> {
    *counter += genomes.len();
    genomes
        .into_par_iter()
        .map(|genome| {
            let objectives = problem.evaluate(&genome)?;
            if !(objectives.similarity.is_finite() && objectives.cost.is_finite()) {
                return Err(Error::validation("objective values must be finite"));
            }
            Ok(Individual {
                genome,
                objectives,
                rank: 0,
                crowding: 0.0,
            })
        })
        .collect()
}

fn assign_rank_and_crowding(population: &mut [Individual]) {
    let points: Vec<ObjectivePoint> = population.iter().map(|i| i.objectives).collect();
    for (rank, front) in non_dominated_sort(&points).into_iter().enumerate() {
        let front_points: Vec<ObjectivePoint> = front.iter().map(|&i| points[i]).collect();
        for (&i, d) in front.iter().zip(crowding_distance(&front_points)) {
            population[i].rank = rank;
            population[i].crowding = d;
        }
    }
}

fn environmental_selection(mut combined: Vec<Individual>, size: usize) -> Vec<Individual> {
    assign_rank_and_crowding(&mut combined);
    let mut order: Vec<usize> = (0..combined.len()).collect();
    order.sort_by(|&a, &b| crowded_cmp(&combined[a], &combined[b]).then(a.cmp(&b)));
    order.truncate(size);
    order.sort_unstable();
    let mut slots: Vec<Option<Individual>> = combined.into_iter().map(Some).collect();
    let mut next: Vec<Individual> = order.into_iter().filter_map(|i| slots[i].take()).collect();
    assign_rank_and_crowding(&mut next);
    next
}

/// Lower rank first, then larger crowding distance.
fn crowded_cmp(a: &Individual, b: &Individual) -> Ordering {
    a.rank.cmp(&b.rank).then(b.crowding.total_cmp(&a.crowding))
}

fn summarize(generation: usize, population: &[Individual]) -> GenerationSummary {
    GenerationSummary {
        generation,
        best_similarity: population
            .iter()
            .map(|i| i.objectives.similarity)
            .fold(f64::INFINITY, f64::min),
        front_size: population.iter().filter(|i| i.rank == 0).count(),
    }
}

fn tournament<'p, R: Rng>(population: &'p [Individual], rng: &mut R) -> &'p Individual {
    let a = &population[rng.random_range(0..population.len())];
    let b = &population[rng.random_range(0..population.len())];
    if crowded_cmp(b, a).is_lt() {
        b
    } else {
        a
    }
}

fn make_offspring<R: Rng>(population: &[Individual], params: &NsgaParams, len: usize, rng: &mut R) -> Vec<Genome> {
    let rate = params.mutation_rate(len);
    let mut children = Vec::with_capacity(population.len());
    while children.len() < population.len() {
        let mut c1 = tournament(population, rng).genome.clone();
        let mut c2 = tournament(population, rng).genome.clone();
        if rng.random_bool(params.crossover_prob) {
            for k in 0..len {
                let (w1, w2) = sbx_pair(c1.weights[k], c2.weights[k], params.sbx_eta, rng);
                c1.weights[k] = w1;
                c2.weights[k] = w2;
                if rng.random_bool(0.5) {
                    std::mem::swap(&mut c1.signs[k], &mut c2.signs[k]);
                }
            }
        }
        for child in [&mut c1, &mut c2] {
            for k in 0..len {
                if rng.random_bool(rate) {
                    child.weights[k] = polynomial_mutation(child.weights[k], params.mutation_eta, rng);
                }
                if rng.random_bool(rate) {
                    child.signs[k] = -child.signs[k];
                }
            }
        }
        children.push(c1);
        children.push(c2);
    }
    children.truncate(population.len());
    children
}

/// Bounded simulated binary crossover on `[0, 1]`.
fn sbx_pair<R: Rng>(x1: f64, x2: f64, eta: f64, rng: &mut R) -> (f64, f64) {
    const LO: f64 = 0.0;
    const HI: f64 = 1.0;
    if !rng.random_bool(0.5) || (x1 - x2).abs() <= 1e-14 {
        return (x1, x2);
    }
    let (y1, y2) = if x1 < x2 { (x1, x2) } else { (x2, x1) };
    let u: f64 = rng.random();
    let spread = |beta: f64| {
        let alpha = 2.0 - beta.powf(-(eta + 1.0));
        if u <= 1.0 / alpha {
            (u * alpha).powf(1.0 / (eta + 1.0))
        } else {
            (1.0 / (2.0 - u * alpha)).powf(1.0 / (eta + 1.0))
        }
    };
    let betaq = spread(1.0 + 2.0 * (y1 - LO) / (y2 - y1));
    let c1 = 0.5 * ((y1 + y2) - betaq * (y2 - y1));
    let betaq = spread(1.0 + 2.0 * (HI - y2) / (y2 - y1));
    let c2 = 0.5 * ((y1 + y2) + betaq * (y2 - y1));
    let (c1, c2) = (c1.clamp(LO, HI), c2.clamp(LO, HI));
    if rng.random_bool(0.5) {
        (c2, c1)
    } else {
        (c1, c2)
    }
}

/// Bounded polynomial mutation on `[0, 1]`.
fn polynomial_mutation<R: Rng>(y: f64, eta: f64, rng: &mut R) -> f64 {
    let u: f64 = rng.random();
    let power = 1.0 / (eta + 1.0);
    let delta = if u < 0.5 {
        let xy = 1.0 - y;
        let val = 2.0 * u + (1.0 - 2.0 * u) * xy.powf(eta + 1.0);
        val.powf(power) - 1.0
    } else {
        let xy = y;
        let val = 2.0 * (1.0 - u) + 2.0 * (u - 0.5) * xy.powf(eta + 1.0);
        1.0 - val.powf(power)
    };
    (y + delta).clamp(0.0, 1.0)
}
