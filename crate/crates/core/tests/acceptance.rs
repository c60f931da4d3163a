//! Acceptance suite: one PASS/FAIL line per criterion; exits non-zero on any failure.

mod common;

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;
use std::process::ExitCode;
use std::time::Instant;

use common::*;
use snsim::assessment::{composite_index, Assessor, NetworkMetrics, Weights};
use snsim::data::karate_club;
use snsim::experiment::*;
use snsim::metrics::global::{
    degree_assortativity, degree_distribution, density, modularity, shortest_path_distribution,
};
use snsim::metrics::local::{
    census_with_labels, clustering_distribution, significance_profile, triad_census, triad_zscores, EnsembleConfig,
};
use snsim::metrics::{Distribution, Summary};
use snsim::optimizer::{evolve, non_dominated_sort, Genome, NsgaParams, ObjectivePoint, Problem};
use snsim::scoring::rank_unconnected_pairs;
use snsim::seeds::derive_seed;
use snsim::simulator::{run, SimulationConfig};

type Outcome = Result<String, String>;

fn check(ok: bool, detail: String) -> Outcome {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn near(x: f64, want: f64, tol: f64) -> bool {
    (x - want).abs() <= tol
}

fn summary(d: &Distribution) -> Summary {
    d.summary.expect("non-empty distribution")
}

fn criterion_1() -> Outcome {
    let start = Instant::now();
    let net = karate_club();
    let dens = density(&net).unwrap();
    let deg = summary(&degree_distribution(&net));
    let path = summary(&shortest_path_distribution(&net).unwrap());
    let clus = summary(&clustering_distribution(&net));
    let assort = degree_assortativity(&net).unwrap();
    let q = modularity(&net).unwrap();
    let secs = start.elapsed().as_secs_f64();
    let checks = [
        ("density", near(dens, 0.1390, 1e-4)),
        ("degree mean", near(deg.mean, 4.59, 0.01)),
        ("degree std", near(deg.std, 3.82, 0.01)),
        ("degree max", deg.max == 17.0),
        ("degree min", deg.min == 1.0),
        ("path mean", near(path.mean, 2.41, 0.01)),
        ("path std", near(path.std, 0.93, 0.01)),
        ("path max", path.max == 5.0),
        ("clustering mean", near(clus.mean, 0.57, 0.01)),
        ("clustering std", near(clus.std, 0.34, 0.01)),
        ("assortativity", near(assort, -0.4756, 1e-3)),
        ("modularity", near(q, 0.4156, 0.05)),
        ("runtime", secs < 5.0),
    ];
    let failed: Vec<_> = checks.iter().filter(|c| !c.1).map(|c| c.0).collect();
    check(
        failed.is_empty(),
        format!(
            "density {dens:.4}, degree {:.2}/{:.2}/{}/{}, path {:.2}/{:.2}/{}, clustering {:.2}/{:.2}, r {assort:.4}, Q {q:.4}, {secs:.3}s{}",
            deg.mean, deg.std, deg.max, deg.min, path.mean, path.std, path.max, clus.mean, clus.std,
            if failed.is_empty() { String::new() } else { format!("; failed: {failed:?}") }
        ),
    )
}

fn criterion_2() -> Outcome {
    let net = karate_club();
    let census = triad_census(&net).unwrap();
    let ensemble = EnsembleConfig {
        samples: 100,
        seed: SeedPlan::new(DEFAULT_SEED).ensemble,
    };
    let sp = significance_profile(triad_zscores(&net, &ensemble).unwrap());
    let want = [0.59, -0.06, -0.12, 0.80];
    let values: Vec<f64> = sp.iter().map(|v| v.unwrap_or(f64::NAN)).collect();
    let within = values.iter().zip(want).all(|(v, w)| near(*v, w, 0.15));
    let norm: f64 = values.iter().map(|v| v * v).sum();
    check(
        census.counts == [15, 3, 1, 26] && within && near(norm, 1.0, 1e-9),
        format!(
            "census {:?}, SP {:.3?}, sum of squares {norm:.12}",
            census.counts, values
        ),
    )
}

fn criterion_3() -> Outcome {
    let mut config = SimulationConfig::new(karate_club().attributes().to_vec());
    config.iterations = 27;
    let trace = run(&config).unwrap();
    let mut ok = true;
    let mut prev_mean = -1.0;
    let mut prev_density = -1.0;
    let mut counts = Vec::new();
    for s in &trace.snapshots {
        let e = s.network.edge_count();
        counts.push(e);
        ok &= e == (22 * s.iteration).min(561);
        let d = density(&s.network).unwrap();
        let mean = summary(&degree_distribution(&s.network)).mean;
        if prev_density < 1.0 {
            ok &= d > prev_density && mean > prev_mean;
        }
        prev_density = d;
        prev_mean = mean;
    }
    check(ok, format!("edge counts {counts:?}"))
}

fn criterion_4(report: &ExperimentReport) -> Outcome {
    let target = karate_club();
    let assessor = Assessor::new(&target, None, EnsembleConfig::default(), Weights::default()).unwrap();
    let own = assessor.assess(&target).unwrap().combined_index;

    let blank = NetworkMetrics {
        node_count: 34,
        edge_count: 0,
        density: None,
        modularity: None,
        assortativity: None,
        degree: Distribution::new(vec![]),
        path: Distribution::new(vec![]),
        clustering: Distribution::new(vec![]),
        census: None,
        significance: [None; 4],
    };
    let missing = composite_index(&blank, &blank, &Weights::default()).unwrap();
    let all_missing = missing.per_measure.iter().all(|d| d.missing) && missing.combined_index == 1.0;

    let mut bounded = true;
    let mut identity = 0.0f64;
    let mut rows = 0;
    for v in &report.variants {
        for r in &v.series {
            let i = &r.index;
            bounded &= [i.global_index, i.local_index, i.combined_index]
                .iter()
                .all(|x| (0.0..=1.0).contains(x));
            identity = identity.max((i.combined_index - (i.global_index + i.local_index) / 2.0).abs());
            rows += 1;
        }
    }
    check(
        own == 0.0 && all_missing && bounded && identity <= 1e-12,
        format!(
            "self {own}, all-missing {}, {rows} iterations bounded {bounded}, max identity gap {identity:e}",
            missing.combined_index
        ),
    )
}

fn criterion_5() -> Outcome {
    let mut failures = Vec::new();
    for case in 0..200u64 {
        let seed = derive_seed(0xACCE, case);
        let n = 2 + (seed % 7) as usize;
        let p = ((seed >> 8) % 1000) as f64 / 1000.0;
        let net = random_network(n, p, (seed >> 4) as usize % 3, seed);
        let params = random_params(seed ^ 1);
        let k = 1 + (seed >> 16) as usize % (n * n);
        let got = rank_unconnected_pairs(&net, &params, k).unwrap();
        if let Err(e) = ranking_matches(&net, &params, &got, k) {
            failures.push(format!("ranking case {case}: {e}"));
        }
    }
    for case in 0..100u64 {
        let seed = derive_seed(0xACCF, case);
        let n = 3 + (seed % 8) as usize;
        let p = ((seed >> 8) % 1000) as f64 / 1000.0;
        let net = random_network(n, p, 0, seed);
        let labels = random_labels(n, seed ^ 5);
        if census_with_labels(&net, &labels).unwrap().counts != oracle_census(&net, &labels) {
            failures.push(format!("census case {case}"));
        }
    }
    for case in 0..100u64 {
        let seed = derive_seed(0xAD00, case);
        let points = random_points(1 + (seed % 32) as usize, seed);
        if non_dominated_sort(&points) != oracle_fronts(&points) {
            failures.push(format!("sort case {case}"));
        }
    }
    check(
        failures.is_empty(),
        if failures.is_empty() {
            "200 rankings, 100 censuses, 100 sorts agree with brute force".into()
        } else {
            failures.join("; ")
        },
    )
}

fn criterion_6(report: &ExperimentReport) -> Outcome {
    let mut ok = true;
    let mut parts = Vec::new();
    for v in &report.variants {
        let (min_at, min) = v
            .series
            .iter()
            .map(|r| (r.iteration, r.index.combined_index))
            .min_by(|a, b| a.1.total_cmp(&b.1))
            .unwrap();
        let last = v
            .series
            .iter()
            .find(|r| r.iteration == 8)
            .map(|r| r.index.combined_index);
        let pass = (2..=6).contains(&min_at) && last.is_some_and(|l| l > min);
        ok &= pass;
        parts.push(format!(
            "{} min {min:.3}@{min_at} last {:.3}",
            v.variant.name(),
            last.unwrap_or(f64::NAN)
        ));
    }
    ok &= report.variants.len() == 4;
    check(ok, parts.join(", "))
}

/// Files keyed by relative path with wall-clock fields removed.
fn comparable_outputs(dir: &Path) -> BTreeMap<String, String> {
    let manifest = verify_manifest(dir).unwrap();
    manifest
        .files
        .iter()
        .map(|f| {
            let text = fs::read_to_string(dir.join(&f.path)).unwrap();
            let clean = if f.path.ends_with(".json") {
                let mut value: serde_json::Value = serde_json::from_str(&text).unwrap();
                strip_wall_time(&mut value);
                value.to_string()
            } else if f.path.ends_with(".csv") {
                drop_column(&text, "wall_seconds")
            } else {
                text
            };
            (f.path.clone(), clean)
        })
        .collect()
}

fn strip_wall_time(v: &mut serde_json::Value) {
    match v {
        serde_json::Value::Object(map) => {
            map.remove("wall_seconds");
            map.values_mut().for_each(strip_wall_time);
        }
        serde_json::Value::Array(items) => items.iter_mut().for_each(strip_wall_time),
        _ => {}
    }
}

fn drop_column(csv: &str, name: &str) -> String {
    let mut lines = csv.lines();
    let header: Vec<&str> = lines.next().unwrap_or("").split(',').collect();
    let skip = header.iter().position(|h| *h == name);
    std::iter::once(header.join(","))
        .chain(lines.map(|l| {
            l.split(',')
                .enumerate()
                .filter(|(k, _)| Some(*k) != skip)
                .map(|(_, x)| x)
                .collect::<Vec<_>>()
                .join(",")
        }))
        .collect::<Vec<_>>()
        .join("\n")
}

fn criterion_7(first: &ExperimentOutcome) -> Outcome {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    write_report(first, a.path(), false).unwrap();
    let second = run_experiment(&first.report.provenance.config).unwrap();
    write_report(&second, b.path(), false).unwrap();
    let (x, y) = (comparable_outputs(a.path()), comparable_outputs(b.path()));
    let differing: Vec<_> = x
        .iter()
        .filter(|(k, v)| y.get(*k) != Some(v))
        .map(|(k, _)| k.clone())
        .collect();
    check(
        x.len() == y.len() && differing.is_empty(),
        format!("{} files compared, differing {differing:?}", x.len()),
    )
}

/// Minimise `(w0, 1 - w0)`.
struct Line;

impl Problem for Line {
    fn genome_len(&self) -> usize {
        1
    }

    fn evaluate(&self, genome: &Genome) -> snsim::Result<ObjectivePoint> {
        let w = genome.weights[0];
        Ok(ObjectivePoint::new(w, 1.0 - w))
    }
}

fn criterion_8() -> Outcome {
    let params = NsgaParams {
        seed: DEFAULT_SEED,
        ..NsgaParams::default()
    };
    let evolution = evolve(&Line, &params).unwrap();
    let mut points: Vec<ObjectivePoint> = evolution.front.iter().map(|i| i.objectives).collect();
    points.sort_by(|a, b| a.similarity.total_cmp(&b.similarity));
    points.dedup_by(|a, b| a == b);
    let mutual = points.iter().all(|p| points.iter().all(|q| !q.dominates(p)));
    let span = points.last().unwrap().similarity - points[0].similarity;

    let start = Instant::now();
    let config = ExperimentConfig {
        variants: vec![Variant::Hybrid],
        ..ExperimentConfig::default()
    };
    let ctx = ExperimentContext::new(config).unwrap();
    let outcome = ctx.run_variant(Variant::Hybrid).unwrap();
    let secs = start.elapsed().as_secs_f64();
    check(
        points.len() >= 5 && mutual && span >= 0.5 && secs < 60.0 && !outcome.front.is_empty(),
        format!(
            "synthetic front {} distinct points spanning {span:.3}; Karate hybrid optimisation {secs:.2}s",
            points.len()
        ),
    )
}

fn main() -> ExitCode {
    let experiment = run_experiment(&ExperimentConfig::default()).expect("default experiment");
    let results = [
        criterion_1(),
        criterion_2(),
        criterion_3(),
        criterion_4(&experiment.report),
        criterion_5(),
        criterion_6(&experiment.report),
        criterion_7(&experiment),
        criterion_8(),
    ];
    let mut failed = 0;
    for (k, r) in results.iter().enumerate() {
        match r {
            Ok(detail) => println!("criterion {}: PASS  {detail}", k + 1),
            Err(detail) => {
                failed += 1;
                println!("criterion {}: FAIL  {detail}", k + 1);
            }
        }
    }
    println!(
        "acceptance: {} of {} criteria passed",
        results.len() - failed,
        results.len()
    );
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
