//! The `compute`, `compare` and `simulate` subcommands.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use decay_core::centrality::{
    centrality_table, dc_difference_coeffs, dc_difference_factored, decimal_strings, horner,
};
use decay_core::ordering::{
    check_farness_dominance, check_high_decay_conditions, check_low_decay_conditions,
    check_profile_dominance, lex_compare, lex_compare_closeness, maximizer_sets,
};
use decay_core::simulation::{run_experiment, AggregateStats, ExperimentConfig, TrialRecord};
use decay_core::{ComparisonVerdict, ConditionReport, DeltaGrid, Graph, MaximizerSets, NodeId};
use num_bigint::BigInt;
use serde::Serialize;

use crate::config::SimulateConfig;
use crate::error::{CliError, CliResult};
use crate::format::{flag, float, node_set};

pub fn version() -> &'static str {
    env!("DECAYCENT_VERSION")
}

/// Definitions every JSON artifact carries so its numbers can be read
/// without the source.
#[derive(Clone, Debug, Serialize)]
pub struct Conventions {
    pub closeness: &'static str,
    pub higher_order_closeness: &'static str,
    pub decay_ties: &'static str,
    pub rank: &'static str,
    pub set_rank: &'static str,
    pub percentile: &'static str,
    pub grid: &'static str,
    pub failed_trials: &'static str,
    pub threshold: &'static str,
}

pub const CONVENTIONS: Conventions = Conventions {
    closeness: "1 / farness",
    higher_order_closeness: "1 / F^k, or 0 where F^k = 0",
    decay_ties: "decided exactly at the binary value of delta; a float gap above 1e-9 relative is trusted",
    rank: "competition rank: 1 + number of nodes with strictly larger decay centrality",
    set_rank: "best member of the set (headline); mean over members reported as *_member_rank_mean",
    percentile: "nearest rank on the sorted per-trial sample: element ceil(P/100 * N)",
    grid: "k / (points + 1) for k = 1..points",
    failed_trials: "trials exceeding max_rejects are excluded from every denominator and listed under failures",
    threshold: "only for trials with disjoint I_deg and I_clos whose first grid point has I_dc within I_deg: first grid index from which I_dc stays within I_clos",
};

pub fn grid_from(deltas: Option<Vec<f64>>, points: Option<usize>) -> CliResult<DeltaGrid> {
    let grid = match (deltas, points) {
        (Some(_), Some(_)) => {
            return Err(CliError::Usage("give either --delta or --grid-points, not both".into()))
        }
        (Some(d), None) => DeltaGrid::new(d),
        (None, Some(k)) => DeltaGrid::uniform(k),
        (None, None) => Ok(DeltaGrid::default()),
    };
    grid.map_err(|e| CliError::Usage(e.to_string()))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum OutputFormat {
    Csv,
    Json,
}

/// Output target: a file, or stdout when no path is given.
pub fn open_output(path: Option<&Path>) -> CliResult<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(File::create(p).map_err(|e| CliError::io(p, e))?)),
        None => Box::new(BufWriter::new(std::io::stdout().lock())),
    })
}

#[derive(Serialize)]
struct ComputeNode {
    node: NodeId,
    degree: u32,
    farness: u64,
    closeness: f64,
    dc: Vec<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    profile: Option<Vec<u32>>,
    #[serde(skip_serializing_if = "Option::is_none", serialize_with = "opt_decimal_strings")]
    fvec: Option<Vec<BigInt>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    cvec: Option<Vec<f64>>,
}

fn opt_decimal_strings<S: serde::Serializer>(
    v: &Option<Vec<BigInt>>,
    s: S,
) -> Result<S::Ok, S::Error> {
    match v {
        Some(v) => decimal_strings(v, s),
        None => s.serialize_none(),
    }
}

#[derive(Serialize)]
struct ComputeReport<'a, C: Serialize> {
    version: &'static str,
    config: &'a C,
    conventions: Conventions,
    grid: &'a DeltaGrid,
    nodes: Vec<ComputeNode>,
    maximizers: MaximizerSets,
}

/// Centrality table of `g` as CSV (`node,degree,farness,closeness,dc@δ...`)
/// or as a JSON report with maximizer sets.
pub fn compute<C: Serialize>(
    g: &Graph,
    grid: &DeltaGrid,
    format: OutputFormat,
    full: bool,
    config: &C,
    out: &mut dyn Write,
) -> CliResult<()> {
    let table = centrality_table(g)?;
    match format {
        OutputFormat::Csv => {
            let mut w = csv::Writer::from_writer(out);
            let mut header = vec!["node".to_string(), "degree".into(), "farness".into(), "closeness".into()];
            header.extend(grid.iter().map(|d| format!("dc@{}", float(d))));
            w.write_record(&header)?;
            for node in &table.nodes {
                let mut row = vec![
                    node.node.to_string(),
                    node.degree.to_string(),
                    node.farness.to_string(),
                    float(node.closeness.value()),
                ];
                row.extend(grid.iter().map(|d| float(horner(&node.profile.counts, d))));
                w.write_record(&row)?;
            }
            w.flush().map_err(|e| CliError::io("<output>", e))?;
        }
        OutputFormat::Json => {
            let nodes = table
                .nodes
                .iter()
                .map(|node| ComputeNode {
                    node: node.node,
                    degree: node.degree,
                    farness: node.farness,
                    closeness: node.closeness.value(),
                    dc: grid.iter().map(|d| horner(&node.profile.counts, d)).collect(),
                    profile: full.then(|| node.profile.counts.clone()),
                    fvec: full.then(|| node.fvec.clone()),
                    cvec: full.then(|| node.cvec.clone()),
                })
                .collect();
            let report = ComputeReport {
                version: version(),
                config,
                conventions: CONVENTIONS,
                grid,
                nodes,
                maximizers: maximizer_sets(g, grid)?,
            };
            serde_json::to_writer_pretty(&mut *out, &report)?;
            writeln!(out).map_err(|e| CliError::io("<output>", e))?;
        }
    }
    Ok(())
}

#[derive(Serialize)]
struct Pair<T> {
    i: T,
    j: T,
}

#[derive(Serialize)]
struct Verdicts {
    lexicographic_profile: ComparisonVerdict,
    lexicographic_closeness: ComparisonVerdict,
    profile_dominance: ComparisonVerdict,
    farness_dominance: ComparisonVerdict,
}

#[derive(Serialize)]
struct CurvePoint {
    delta: f64,
    difference: f64,
}

#[derive(Serialize)]
struct CompareReport<'a, C: Serialize> {
    version: &'static str,
    config: &'a C,
    conventions: Conventions,
    nodes: Pair<NodeId>,
    profiles: Pair<Vec<u32>>,
    fvec: Pair<Vec<String>>,
    verdicts: Verdicts,
    /// Sufficient conditions for `DC_i > DC_j` on `(0, 1/2]`.
    low_decay_conditions: ConditionReport,
    /// Sufficient conditions for `DC_i > DC_j` on `[1/2, 1)`.
    high_decay_conditions: ConditionReport,
    avec: Vec<i64>,
    bvec: Vec<String>,
    dc_difference_curve: Vec<CurvePoint>,
}

/// Every comparator and checker applied to nodes `i` and `j`, as JSON.
pub fn compare<C: Serialize>(
    g: &Graph,
    i: NodeId,
    j: NodeId,
    grid: &DeltaGrid,
    config: &C,
    out: &mut dyn Write,
) -> CliResult<()> {
    let n = g.node_count();
    for v in [i, j] {
        if v >= n {
            return Err(CliError::Usage(format!("unknown node {v}: the graph has nodes 0..{n}")));
        }
    }
    if i == j {
        return Err(CliError::Usage(format!("compare needs two distinct nodes, got {i} twice")));
    }
    let table = centrality_table(g)?;
    let (x, y) = (table.node(i), table.node(j));
    let diff = dc_difference_coeffs(&x.profile, &y.profile)?;
    let strings = |v: &[BigInt]| v.iter().map(|b| b.to_string()).collect::<Vec<_>>();
    let curve = grid
        .iter()
        .map(|d| {
            Ok(CurvePoint {
                delta: d,
                difference: dc_difference_factored(&diff.a, d)?,
            })
        })
        .collect::<Result<_, decay_core::Error>>()?;
    let report = CompareReport {
        version: version(),
        config,
        conventions: CONVENTIONS,
        nodes: Pair { i, j },
        profiles: Pair {
            i: x.profile.counts.clone(),
            j: y.profile.counts.clone(),
        },
        fvec: Pair {
            i: strings(&x.fvec),
            j: strings(&y.fvec),
        },
        verdicts: Verdicts {
            lexicographic_profile: lex_compare(&x.profile.counts, &y.profile.counts)?,
            lexicographic_closeness: lex_compare_closeness(&x.fvec, &y.fvec)?,
            profile_dominance: check_profile_dominance(&x.profile, &y.profile)?,
            farness_dominance: check_farness_dominance(&x.fvec, &y.fvec)?,
        },
        low_decay_conditions: check_low_decay_conditions(&x.profile, &y.profile)?,
        high_decay_conditions: check_high_decay_conditions(&x.fvec, &y.fvec)?,
        avec: diff.a.clone(),
        bvec: strings(&diff.b),
        dc_difference_curve: curve,
    };
    serde_json::to_writer_pretty(&mut *out, &report)?;
    writeln!(out).map_err(|e| CliError::io("<output>", e))?;
    Ok(())
}

pub const RECORDS_HEADER: &[&str] = &[
    "trial_index",
    "n",
    "p",
    "rejects",
    "delta_index",
    "delta",
    "deg_clos_intersect",
    "dc_subset_deg",
    "dc_subset_clos",
    "dc_subset_union",
    "dc_disjoint_both",
    "best_rank_maxdeg",
    "best_rank_maxclos",
    "mean_rank_maxdeg",
    "mean_rank_maxclos",
    "rule_of_thumb_pick",
    "rule_of_thumb_rank",
    "threshold_index",
    "i_deg",
    "i_clos",
    "i_dc",
];

fn write_record_rows<W: Write>(
    w: &mut csv::Writer<W>,
    r: &TrialRecord,
    grid: &DeltaGrid,
) -> csv::Result<()> {
    let o = &r.outcome;
    let threshold = o.threshold_index.map(|t| t.to_string()).unwrap_or_default();
    let (i_deg, i_clos) = (node_set(&o.i_deg), node_set(&o.i_clos));
    for (k, (d, delta)) in o.per_delta.iter().zip(grid.iter()).enumerate() {
        w.write_record([
            r.trial_index.to_string().as_str(),
            &r.n.to_string(),
            &float(r.p),
            &r.rejects.to_string(),
            &k.to_string(),
            &float(delta),
            flag(o.deg_clos_intersect),
            flag(d.dc_subset_deg),
            flag(d.dc_subset_clos),
            flag(d.dc_subset_union),
            flag(d.dc_disjoint_both),
            &d.best_rank_maxdeg.to_string(),
            &d.best_rank_maxclos.to_string(),
            &float(d.mean_rank_maxdeg),
            &float(d.mean_rank_maxclos),
            &d.rule_of_thumb_pick.to_string(),
            &d.rule_of_thumb_rank.to_string(),
            &threshold,
            &i_deg,
            &i_clos,
            &node_set(&d.i_dc),
        ])?;
    }
    Ok(())
}

pub const AGGREGATE_HEADER: &[&str] = &[
    "delta",
    "trials",
    "freq_subset_deg",
    "freq_subset_clos",
    "freq_disjoint",
    "nonintersect_trials",
    "nonintersect_freq_subset_deg",
    "nonintersect_freq_subset_clos",
    "nonintersect_freq_disjoint",
    "maxdeg_rank_mean",
    "maxdeg_rank_p5",
    "maxdeg_rank_p95",
    "maxclos_rank_mean",
    "maxclos_rank_p5",
    "maxclos_rank_p95",
    "rule_of_thumb_rank_mean",
    "rule_of_thumb_rank_p5",
    "rule_of_thumb_rank_p95",
    "maxdeg_member_rank_mean",
    "maxclos_member_rank_mean",
    "thresholds",
];

pub fn write_aggregate<W: Write>(w: W, stats: &AggregateStats) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(w);
    w.write_record(AGGREGATE_HEADER)?;
    for d in &stats.per_delta {
        let all = d.all.frequencies().expect("aggregate has trials");
        let sub = d.excluding_intersect.frequencies();
        let opt = |f: Option<f64>| f.map(float).unwrap_or_default();
        w.write_record([
            float(d.delta),
            d.all.trials.to_string(),
            float(all.subset_deg),
            float(all.subset_clos),
            float(all.disjoint),
            d.excluding_intersect.trials.to_string(),
            opt(sub.map(|f| f.subset_deg)),
            opt(sub.map(|f| f.subset_clos)),
            opt(sub.map(|f| f.disjoint)),
            float(d.maxdeg_rank.mean),
            d.maxdeg_rank.p5.to_string(),
            d.maxdeg_rank.p95.to_string(),
            float(d.maxclos_rank.mean),
            d.maxclos_rank.p5.to_string(),
            d.maxclos_rank.p95.to_string(),
            float(d.rule_of_thumb_rank.mean),
            d.rule_of_thumb_rank.p5.to_string(),
            d.rule_of_thumb_rank.p95.to_string(),
            float(d.maxdeg_member_rank_mean),
            float(d.maxclos_member_rank_mean),
            d.thresholds.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

#[derive(Clone, Debug, Serialize)]
pub struct SimulationSummary {
    pub trials_requested: u64,
    pub trials_completed: u64,
    pub count_intersect: Option<u64>,
    pub intersect_frequency: Option<f64>,
    pub count_intersect_but_dc_escapes: Option<u64>,
    pub count_intersect_but_dc_leaves_union: Option<u64>,
    pub thresholds_detected: Option<u64>,
    pub non_monotone_transitions: Option<u64>,
    pub max_disjoint_frequency: Option<f64>,
    pub pooled_disjoint_rate: Option<f64>,
}

#[derive(Serialize)]
struct SummaryFile<'a> {
    version: &'static str,
    command: &'static str,
    config: &'a SimulateConfig,
    conventions: Conventions,
    grid: &'a DeltaGrid,
    results: &'a SimulationSummary,
    failures: &'a [decay_core::simulation::TrialFailure],
}

pub struct SimulateOutcome {
    pub summary: SimulationSummary,
    pub stats: Option<AggregateStats>,
    pub failures: Vec<decay_core::simulation::TrialFailure>,
    pub files: Vec<PathBuf>,
}

/// Runs the experiment, streaming `records.csv` and finishing with
/// `aggregate.csv` and `summary.json` in `config.out_dir`.
pub fn simulate(config: &SimulateConfig) -> CliResult<SimulateOutcome> {
    let dir = &config.out_dir;
    std::fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))?;
    let grid = DeltaGrid::uniform(config.grid_points).map_err(|e| CliError::Usage(e.to_string()))?;
    let experiment = ExperimentConfig {
        n: config.n,
        p: config.p,
        trials: config.trials,
        seed: config.seed,
        grid: grid.clone(),
        max_rejects: config.max_rejects,
        workers: config.workers,
    };

    let records_path = dir.join("records.csv");
    let file = File::create(&records_path).map_err(|e| CliError::io(&records_path, e))?;
    let mut records = csv::Writer::from_writer(BufWriter::new(file));
    records.write_record(RECORDS_HEADER)?;
    let result = run_experiment(&experiment, |r| -> CliResult<()> {
        write_record_rows(&mut records, r, &grid)?;
        Ok(())
    })?;
    records.flush().map_err(|e| CliError::io(&records_path, e))?;

    let aggregate_path = dir.join("aggregate.csv");
    let mut files = vec![records_path];
    if let Some(stats) = &result.stats {
        let file = File::create(&aggregate_path).map_err(|e| CliError::io(&aggregate_path, e))?;
        write_aggregate(BufWriter::new(file), stats)?;
        files.push(aggregate_path);
    }

    let s = result.stats.as_ref();
    let summary = SimulationSummary {
        trials_requested: config.trials,
        trials_completed: s.map_or(0, |s| s.trials),
        count_intersect: s.map(|s| s.count_intersect),
        intersect_frequency: s.map(|s| s.intersect_frequency()),
        count_intersect_but_dc_escapes: s.map(|s| s.count_intersect_but_dc_escapes),
        count_intersect_but_dc_leaves_union: s.map(|s| s.count_intersect_but_dc_leaves_union),
        thresholds_detected: s.map(|s| s.thresholds_detected),
        non_monotone_transitions: s.map(|s| s.non_monotone_transitions),
        max_disjoint_frequency: s.map(|s| s.max_disjoint_frequency()),
        pooled_disjoint_rate: s.map(|s| s.pooled_disjoint_rate()),
    };
    let summary_path = dir.join("summary.json");
    let file = File::create(&summary_path).map_err(|e| CliError::io(&summary_path, e))?;
    let mut w = BufWriter::new(file);
    serde_json::to_writer_pretty(
        &mut w,
        &SummaryFile {
            version: version(),
            command: "simulate",
            config,
            conventions: CONVENTIONS,
            grid: &grid,
            results: &summary,
            failures: &result.failures,
        },
    )?;
    writeln!(w).and_then(|_| w.flush()).map_err(|e| CliError::io(&summary_path, e))?;
    files.push(summary_path);

    Ok(SimulateOutcome {
        summary,
        stats: result.stats,
        failures: result.failures,
        files,
    })
}
