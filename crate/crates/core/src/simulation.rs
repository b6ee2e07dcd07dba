//! Monte-Carlo harness: how the decay-centrality maximizers of random
//! connected graphs relate to the degree and closeness maximizers across a
//! grid of decay parameters.
//!
//! Ranks are competition ranks, `1 + #{u : DC_u > DC_v}`, with ties decided
//! exactly. For a set of nodes the headline rank is that of its best member;
//! the mean over members is reported alongside.

use std::cmp::Ordering;

use rayon::prelude::*;
use serde::Serialize;

use crate::centrality::{compare_decay, horner, TIE_TOLERANCE};
use crate::error::{Error, Result};
use crate::generation::{GnpSampler, TrialSeed, DEFAULT_MAX_REJECTS};
use crate::graph::{all_profiles, DistanceProfile, Graph, NodeId};
use crate::grid::DeltaGrid;
use crate::ordering::{closeness_maximizers, decay_maximizers, degree_maximizers};

/// Relations between the maximizer sets at one grid point.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DeltaOutcome {
    pub i_dc: Vec<NodeId>,
    pub dc_subset_deg: bool,
    pub dc_subset_clos: bool,
    /// `I_dc ⊆ I_deg ∪ I_clos`.
    pub dc_subset_union: bool,
    /// `I_dc` shares no node with `I_deg ∪ I_clos`.
    pub dc_disjoint_both: bool,
    pub best_rank_maxdeg: u32,
    pub best_rank_maxclos: u32,
    pub mean_rank_maxdeg: f64,
    pub mean_rank_maxclos: f64,
    pub rule_of_thumb_pick: NodeId,
    pub rule_of_thumb_rank: u32,
}

impl DeltaOutcome {
    pub fn dc_subset_intersection(&self) -> bool {
        self.dc_subset_deg && self.dc_subset_clos
    }

    /// Neither subset relation holds.
    pub fn escapes_both(&self) -> bool {
        !self.dc_subset_deg && !self.dc_subset_clos
    }
}

/// Everything one graph contributes to the statistics.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TrialOutcome {
    pub n: usize,
    pub i_deg: Vec<NodeId>,
    pub i_clos: Vec<NodeId>,
    pub deg_clos_intersect: bool,
    pub per_delta: Vec<DeltaOutcome>,
    /// For graphs with disjoint `I_deg` and `I_clos` whose maximizers start
    /// inside `I_deg`: first grid index from which `I_dc ⊆ I_clos` holds to
    /// the end of the grid.
    pub threshold_index: Option<usize>,
    /// Whether the grid before the threshold reads `(⊆ I_deg)* (neither)*`.
    pub monotone_transition: Option<bool>,
}

impl TrialOutcome {
    /// `I_deg ∩ I_clos ≠ ∅` yet `I_dc ⊄ I_deg ∩ I_clos` at some grid point.
    pub fn intersect_but_dc_escapes(&self) -> bool {
        self.deg_clos_intersect && self.per_delta.iter().any(|d| !d.dc_subset_intersection())
    }

    /// `I_deg ∩ I_clos ≠ ∅` yet some decay maximizer lies outside
    /// `I_deg ∪ I_clos` at some grid point.
    pub fn intersect_but_dc_leaves_union(&self) -> bool {
        self.deg_clos_intersect && self.per_delta.iter().any(|d| !d.dc_subset_union)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TrialRecord {
    pub trial_index: u64,
    pub n: usize,
    pub p: f64,
    pub rejects: u64,
    pub outcome: TrialOutcome,
}

fn is_subset(small: &[NodeId], big: &[NodeId]) -> bool {
    small.iter().all(|x| big.binary_search(x).is_ok())
}

fn intersects(a: &[NodeId], b: &[NodeId]) -> bool {
    a.iter().any(|x| b.binary_search(x).is_ok())
}

/// Decay values of one graph at one grid point, with exact comparisons.
pub struct DecaySnapshot<'a> {
    profiles: &'a [DistanceProfile],
    dc: &'a [f64],
    delta: f64,
}

impl<'a> DecaySnapshot<'a> {
    pub fn new(profiles: &'a [DistanceProfile], dc: &'a [f64], delta: f64) -> Self {
        DecaySnapshot {
            profiles,
            dc,
            delta,
        }
    }

    fn cmp(&self, u: NodeId, v: NodeId) -> Ordering {
        compare_decay(
            &self.profiles[u].counts,
            self.dc[u],
            &self.profiles[v].counts,
            self.dc[v],
            self.delta,
        )
    }

    /// Member of `set` with the largest decay centrality, lowest id on ties.
    pub fn best_of(&self, set: &[NodeId]) -> NodeId {
        let mut best = set[0];
        for &v in &set[1..] {
            match self.cmp(v, best) {
                Ordering::Greater => best = v,
                Ordering::Equal if v < best => best = v,
                _ => {}
            }
        }
        best
    }

    /// Competition rank of `v`: one plus the number of strictly better nodes.
    pub fn rank(&self, v: NodeId) -> u32 {
        let band = TIE_TOLERANCE * self.dc[v].abs().max(1.0);
        let mut better = 0;
        for u in 0..self.dc.len() {
            if u == v || self.dc[u] < self.dc[v] - band {
                continue;
            }
            if self.dc[u] > self.dc[v] + band || self.cmp(u, v) == Ordering::Greater {
                better += 1;
            }
        }
        better + 1
    }
}

/// Best competition rank among the members of a nonempty set.
pub fn rank_of(set: &[NodeId], profiles: &[DistanceProfile], dc: &[f64], delta: f64) -> u32 {
    let snap = DecaySnapshot::new(profiles, dc, delta);
    snap.rank(snap.best_of(set))
}

/// The rule of thumb: take `I_deg` below one half, `I_clos` above, their
/// union at exactly one half, and pick the candidate with the largest decay
/// centrality (lowest id on exact ties).
pub fn rule_of_thumb_pick(
    i_deg: &[NodeId],
    i_clos: &[NodeId],
    profiles: &[DistanceProfile],
    dc: &[f64],
    delta: f64,
) -> NodeId {
    let candidates: Vec<NodeId> = if delta < 0.5 {
        i_deg.to_vec()
    } else if delta > 0.5 {
        i_clos.to_vec()
    } else {
        let mut both = [i_deg, i_clos].concat();
        both.sort_unstable();
        both.dedup();
        both
    };
    DecaySnapshot::new(profiles, dc, delta).best_of(&candidates)
}

/// Maximizer-set relations of one connected graph across the grid.
pub fn run_trial(g: &Graph, grid: &DeltaGrid) -> Result<TrialOutcome> {
    let n = g.node_count();
    if n < 2 {
        return Err(Error::TooFewNodes { n, min: 2 });
    }
    let profiles = all_profiles(g)?;
    let i_deg = degree_maximizers(&profiles);
    let i_clos = closeness_maximizers(&profiles);
    let deg_clos_intersect = intersects(&i_deg, &i_clos);

    let mut dc = vec![0.0; n];
    let per_delta: Vec<DeltaOutcome> = grid
        .iter()
        .map(|delta| {
            for (v, p) in dc.iter_mut().zip(&profiles) {
                *v = horner(&p.counts, delta);
            }
            let i_dc = decay_maximizers(&profiles, &dc, delta);
            let snap = DecaySnapshot::new(&profiles, &dc, delta);
            let mean_rank =
                |set: &[NodeId]| set.iter().map(|&v| snap.rank(v) as f64).sum::<f64>() / set.len() as f64;
            let pick = rule_of_thumb_pick(&i_deg, &i_clos, &profiles, &dc, delta);
            DeltaOutcome {
                dc_subset_deg: is_subset(&i_dc, &i_deg),
                dc_subset_clos: is_subset(&i_dc, &i_clos),
                dc_subset_union: i_dc
                    .iter()
                    .all(|x| i_deg.binary_search(x).is_ok() || i_clos.binary_search(x).is_ok()),
                dc_disjoint_both: !intersects(&i_dc, &i_deg) && !intersects(&i_dc, &i_clos),
                best_rank_maxdeg: snap.rank(snap.best_of(&i_deg)),
                best_rank_maxclos: snap.rank(snap.best_of(&i_clos)),
                mean_rank_maxdeg: mean_rank(&i_deg),
                mean_rank_maxclos: mean_rank(&i_clos),
                rule_of_thumb_pick: pick,
                rule_of_thumb_rank: snap.rank(pick),
                i_dc,
            }
        })
        .collect();

    let (threshold_index, monotone_transition) = if deg_clos_intersect {
        (None, None)
    } else {
        detect_threshold(&per_delta)
    };
    Ok(TrialOutcome {
        n,
        i_deg,
        i_clos,
        deg_clos_intersect,
        per_delta,
        threshold_index,
        monotone_transition,
    })
}

fn detect_threshold(per_delta: &[DeltaOutcome]) -> (Option<usize>, Option<bool>) {
    let Some(first) = per_delta.first() else {
        return (None, None);
    };
    let suffix = per_delta
        .iter()
        .rev()
        .take_while(|d| d.dc_subset_clos)
        .count();
    if !first.dc_subset_deg || suffix == 0 {
        return (None, None);
    }
    let t = per_delta.len() - suffix;
    let deg_run = per_delta[..t].iter().take_while(|d| d.dc_subset_deg).count();
    let monotone = per_delta[deg_run..t].iter().all(DeltaOutcome::escapes_both);
    (Some(t), Some(monotone))
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize)]
pub struct Frequencies {
    pub subset_deg: f64,
    pub subset_clos: f64,
    pub disjoint: f64,
}

/// Raw counts behind [`Frequencies`], kept so cells can be pooled.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
pub struct FlagCounts {
    pub trials: u64,
    pub subset_deg: u64,
    pub subset_clos: u64,
    pub disjoint: u64,
}

impl FlagCounts {
    fn add(&mut self, d: &DeltaOutcome) {
        self.trials += 1;
        self.subset_deg += d.dc_subset_deg as u64;
        self.subset_clos += d.dc_subset_clos as u64;
        self.disjoint += d.dc_disjoint_both as u64;
    }

    pub fn frequencies(&self) -> Option<Frequencies> {
        (self.trials > 0).then(|| {
            let t = self.trials as f64;
            Frequencies {
                subset_deg: self.subset_deg as f64 / t,
                subset_clos: self.subset_clos as f64 / t,
                disjoint: self.disjoint as f64 / t,
            }
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct RankStats {
    pub mean: f64,
    pub p5: u32,
    pub p95: u32,
}

impl RankStats {
    fn from_sample(sample: &mut [u32]) -> Self {
        sample.sort_unstable();
        let mean = sample.iter().map(|&r| r as f64).sum::<f64>() / sample.len() as f64;
        RankStats {
            mean,
            p5: nearest_rank(sample, 5.0),
            p95: nearest_rank(sample, 95.0),
        }
    }
}

/// Nearest-rank percentile of a sorted, nonempty sample.
pub fn nearest_rank(sorted: &[u32], percent: f64) -> u32 {
    let rank = (percent / 100.0 * sorted.len() as f64).ceil() as usize;
    sorted[rank.clamp(1, sorted.len()) - 1]
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DeltaStats {
    pub delta: f64,
    pub all: FlagCounts,
    /// Restricted to trials where `I_deg ∩ I_clos = ∅`.
    pub excluding_intersect: FlagCounts,
    pub maxdeg_rank: RankStats,
    pub maxclos_rank: RankStats,
    pub rule_of_thumb_rank: RankStats,
    pub maxdeg_member_rank_mean: f64,
    pub maxclos_member_rank_mean: f64,
    /// Trials whose detected threshold sits at this grid point.
    pub thresholds: u64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct AggregateStats {
    pub n: usize,
    pub p: f64,
    pub trials: u64,
    pub count_intersect: u64,
    pub count_intersect_but_dc_escapes: u64,
    pub count_intersect_but_dc_leaves_union: u64,
    pub thresholds_detected: u64,
    pub non_monotone_transitions: u64,
    pub per_delta: Vec<DeltaStats>,
}

impl AggregateStats {
    pub fn intersect_frequency(&self) -> f64 {
        self.count_intersect as f64 / self.trials as f64
    }

    /// Largest per-grid-point frequency of `I_dc` missing both sets.
    pub fn max_disjoint_frequency(&self) -> f64 {
        self.per_delta
            .iter()
            .filter_map(|d| d.all.frequencies())
            .map(|f| f.disjoint)
            .fold(0.0, f64::max)
    }

    /// Disjoint events over all (trial, grid point) pairs.
    pub fn pooled_disjoint_rate(&self) -> f64 {
        let events: u64 = self.per_delta.iter().map(|d| d.all.disjoint).sum();
        events as f64 / (self.trials as f64 * self.per_delta.len() as f64)
    }
}

/// Streaming fold over trial records in trial order.
pub struct Aggregator {
    n: Option<usize>,
    p: Option<f64>,
    grid_len: usize,
    trials: u64,
    count_intersect: u64,
    count_escapes: u64,
    count_leaves_union: u64,
    thresholds_detected: u64,
    non_monotone: u64,
    all: Vec<FlagCounts>,
    sub: Vec<FlagCounts>,
    deg_ranks: Vec<Vec<u32>>,
    clos_ranks: Vec<Vec<u32>>,
    rot_ranks: Vec<Vec<u32>>,
    deg_member_sum: Vec<f64>,
    clos_member_sum: Vec<f64>,
    thresholds: Vec<u64>,
}

impl Aggregator {
    pub fn new(grid_len: usize) -> Self {
        Aggregator {
            n: None,
            p: None,
            grid_len,
            trials: 0,
            count_intersect: 0,
            count_escapes: 0,
            count_leaves_union: 0,
            thresholds_detected: 0,
            non_monotone: 0,
            all: vec![FlagCounts::default(); grid_len],
            sub: vec![FlagCounts::default(); grid_len],
            deg_ranks: vec![Vec::new(); grid_len],
            clos_ranks: vec![Vec::new(); grid_len],
            rot_ranks: vec![Vec::new(); grid_len],
            deg_member_sum: vec![0.0; grid_len],
            clos_member_sum: vec![0.0; grid_len],
            thresholds: vec![0; grid_len],
        }
    }

    pub fn push(&mut self, record: &TrialRecord) -> Result<()> {
        if *self.n.get_or_insert(record.n) != record.n {
            return Err(Error::MixedRecords("n"));
        }
        let p = *self.p.get_or_insert(record.p);
        if p.to_bits() != record.p.to_bits() {
            return Err(Error::MixedRecords("p"));
        }
        let out = &record.outcome;
        if out.per_delta.len() != self.grid_len {
            return Err(Error::MixedRecords("grid"));
        }
        self.trials += 1;
        self.count_intersect += out.deg_clos_intersect as u64;
        self.count_escapes += out.intersect_but_dc_escapes() as u64;
        self.count_leaves_union += out.intersect_but_dc_leaves_union() as u64;
        if let Some(t) = out.threshold_index {
            self.thresholds_detected += 1;
            self.thresholds[t] += 1;
        }
        if out.monotone_transition == Some(false) {
            self.non_monotone += 1;
        }
        for (k, d) in out.per_delta.iter().enumerate() {
            self.all[k].add(d);
            if !out.deg_clos_intersect {
                self.sub[k].add(d);
            }
            self.deg_ranks[k].push(d.best_rank_maxdeg);
            self.clos_ranks[k].push(d.best_rank_maxclos);
            self.rot_ranks[k].push(d.rule_of_thumb_rank);
            self.deg_member_sum[k] += d.mean_rank_maxdeg;
            self.clos_member_sum[k] += d.mean_rank_maxclos;
        }
        Ok(())
    }

    pub fn trials(&self) -> u64 {
        self.trials
    }

    pub fn finish(mut self, grid: &DeltaGrid) -> Result<AggregateStats> {
        if self.trials == 0 {
            return Err(Error::EmptyRecords);
        }
        if grid.len() != self.grid_len {
            return Err(Error::MixedRecords("grid"));
        }
        let t = self.trials as f64;
        let per_delta = (0..self.grid_len)
            .map(|k| DeltaStats {
                delta: grid.values()[k],
                all: self.all[k],
                excluding_intersect: self.sub[k],
                maxdeg_rank: RankStats::from_sample(&mut self.deg_ranks[k]),
                maxclos_rank: RankStats::from_sample(&mut self.clos_ranks[k]),
                rule_of_thumb_rank: RankStats::from_sample(&mut self.rot_ranks[k]),
                maxdeg_member_rank_mean: self.deg_member_sum[k] / t,
                maxclos_member_rank_mean: self.clos_member_sum[k] / t,
                thresholds: self.thresholds[k],
            })
            .collect();
        Ok(AggregateStats {
            n: self.n.unwrap_or(0),
            p: self.p.unwrap_or(f64::NAN),
            trials: self.trials,
            count_intersect: self.count_intersect,
            count_intersect_but_dc_escapes: self.count_escapes,
            count_intersect_but_dc_leaves_union: self.count_leaves_union,
            thresholds_detected: self.thresholds_detected,
            non_monotone_transitions: self.non_monotone,
            per_delta,
        })
    }
}

pub fn aggregate(records: &[TrialRecord], grid: &DeltaGrid) -> Result<AggregateStats> {
    let mut agg = Aggregator::new(grid.len());
    for r in records {
        agg.push(r)?;
    }
    agg.finish(grid)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ExperimentConfig {
    pub n: usize,
    pub p: f64,
    pub trials: u64,
    pub seed: u64,
    pub grid: DeltaGrid,
    pub max_rejects: u64,
    pub workers: usize,
}

impl ExperimentConfig {
    pub fn new(n: usize, p: f64, trials: u64, seed: u64) -> Self {
        ExperimentConfig {
            n,
            p,
            trials,
            seed,
            grid: DeltaGrid::default(),
            max_rejects: DEFAULT_MAX_REJECTS,
            workers: 1,
        }
    }
}

/// A trial whose graph could not be generated within the rejection limit.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TrialFailure {
    pub trial_index: u64,
    pub rejects: u64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ExperimentResult {
    /// `None` when every trial failed.
    pub stats: Option<AggregateStats>,
    pub failures: Vec<TrialFailure>,
}

const CHUNK: u64 = 512;

/// Runs `config.trials` seeded trials and folds them in trial order.
///
/// Each completed record is handed to `sink` in trial order while the run
/// progresses. Output is identical for any worker count. Trials that hit
/// the rejection limit are reported and left out of every denominator.
pub fn run_experiment<E>(
    config: &ExperimentConfig,
    mut sink: impl FnMut(&TrialRecord) -> std::result::Result<(), E>,
) -> std::result::Result<ExperimentResult, E>
where
    E: From<Error>,
{
    let sampler = GnpSampler::new(config.n, config.p)?;
    if config.workers == 0 {
        return Err(Error::InvalidParameter("workers must be at least 1".into()).into());
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(config.workers)
        .build()
        .map_err(|e| Error::InvalidParameter(format!("thread pool: {e}")))?;

    let mut agg = Aggregator::new(config.grid.len());
    let mut failures = Vec::new();
    let mut start = 0;
    while start < config.trials {
        let end = (start + CHUNK).min(config.trials);
        let batch: Vec<Result<TrialRecord>> = pool.install(|| {
            (start..end)
                .into_par_iter()
                .map(|t| simulate_one(&sampler, config, t))
                .collect()
        });
        for (t, outcome) in (start..end).zip(batch) {
            match outcome {
                Ok(record) => {
                    sink(&record)?;
                    agg.push(&record)?;
                }
                Err(Error::RejectLimit { rejects, .. }) => failures.push(TrialFailure {
                    trial_index: t,
                    rejects,
                }),
                Err(e) => return Err(e.into()),
            }
        }
        start = end;
    }
    let stats = if agg.trials() > 0 {
        Some(agg.finish(&config.grid)?)
    } else {
        None
    };
    Ok(ExperimentResult { stats, failures })
}

fn simulate_one(sampler: &GnpSampler, config: &ExperimentConfig, t: u64) -> Result<TrialRecord> {
    let mut rng = TrialSeed::new(config.seed, t).rng();
    let sample = sampler.sample_connected(&mut rng, config.max_rejects)?;
    let outcome = run_trial(&sample.graph, &config.grid)?;
    Ok(TrialRecord {
        trial_index: t,
        n: config.n,
        p: config.p,
        rejects: sample.rejects,
        outcome,
    })
}
