use decay_core::generation::{sample_connected_gnp, sample_gnp, GnpSampler, TrialSeed};
use decay_core::simulation::{run_experiment, ExperimentConfig, TrialRecord};
use decay_core::{DeltaGrid, Error, Graph};
use statrs::distribution::{ChiSquared, ContinuousCDF};

/// Connected-graph edge-count law of G(6, 0.4) by enumerating all 2^15
/// graphs; returns `(P(connected), P(M = m | connected))`.
fn enumerate_connected(n: usize, p: f64) -> (f64, Vec<f64>) {
    let pairs: Vec<(usize, usize)> = (0..n)
        .flat_map(|u| (u + 1..n).map(move |v| (u, v)))
        .collect();
    let mut by_count = vec![0.0; pairs.len() + 1];
    for mask in 0u32..(1 << pairs.len()) {
        let edges: Vec<_> = pairs
            .iter()
            .enumerate()
            .filter(|(k, _)| mask >> k & 1 == 1)
            .map(|(_, &e)| e)
            .collect();
        if Graph::new(n, &edges).unwrap().is_connected() {
            let m = edges.len();
            by_count[m] += p.powi(m as i32) * (1.0 - p).powi((pairs.len() - m) as i32);
        }
    }
    let total: f64 = by_count.iter().sum();
    (total, by_count.iter().map(|w| w / total).collect())
}

#[test]
fn connected_edge_counts_follow_the_conditional_law() {
    let (n, p, draws) = (6, 0.4, 20_000u64);
    let (p_conn, expected) = enumerate_connected(n, p);
    let sampler = GnpSampler::new(n, p).unwrap();

    let mut observed = vec![0u64; expected.len()];
    let mut rejects = 0u64;
    for t in 0..draws {
        let s = sampler
            .sample_connected(&mut TrialSeed::new(2024, t).rng(), 1_000_000)
            .unwrap();
        assert!(s.graph.is_connected());
        observed[s.graph.edge_count()] += 1;
        rejects += s.rejects;
    }

    // Pool sparse bins so every expected count is at least 5.
    let mut stat = 0.0;
    let mut bins = 0;
    let (mut obs_acc, mut exp_acc) = (0.0, 0.0);
    for (o, e) in observed.iter().zip(&expected) {
        obs_acc += *o as f64;
        exp_acc += e * draws as f64;
        if exp_acc >= 5.0 {
            stat += (obs_acc - exp_acc).powi(2) / exp_acc;
            bins += 1;
            obs_acc = 0.0;
            exp_acc = 0.0;
        }
    }
    if exp_acc > 0.0 {
        stat += (obs_acc - exp_acc).powi(2) / exp_acc;
        bins += 1;
    }
    let p_value = 1.0 - ChiSquared::new((bins - 1) as f64).unwrap().cdf(stat);
    assert!(p_value > 0.001, "chi2 = {stat}, bins = {bins}, p = {p_value}");

    // Rejections before success are geometric with success P(connected).
    let mean = rejects as f64 / draws as f64;
    let expect = (1.0 - p_conn) / p_conn;
    let sd = ((1.0 - p_conn) / (p_conn * p_conn) / draws as f64).sqrt();
    assert!((mean - expect).abs() < 5.0 * sd, "mean {mean}, expected {expect}");
}

#[test]
fn unconditioned_edge_count_mean() {
    let draws = 2000;
    let total: usize = (0..draws)
        .map(|t| sample_gnp(50, 0.1, TrialSeed::new(7, t)).unwrap().edge_count())
        .sum();
    let mean = total as f64 / draws as f64;
    assert!((mean - 122.5).abs() < 1.225, "mean edge count {mean}");
}

#[test]
fn sparse_connected_sampling_reports_rejections() {
    let s = sample_connected_gnp(10, 0.05, TrialSeed::new(9, 3), 10_000_000).unwrap();
    assert!(s.graph.is_connected());
    assert!(s.rejects > 0);
    let err = sample_connected_gnp(10, 0.05, TrialSeed::new(9, 3), 0).unwrap_err();
    assert!(matches!(err, Error::RejectLimit { .. }));
}

fn collect_records(workers: usize) -> Vec<TrialRecord> {
    let mut config = ExperimentConfig::new(15, 0.2, 300, 99);
    config.grid = DeltaGrid::uniform(19).unwrap();
    config.workers = workers;
    let mut records = Vec::new();
    run_experiment(&config, |r| {
        records.push(r.clone());
        Ok::<(), Error>(())
    })
    .unwrap();
    records
}

#[test]
fn worker_count_does_not_change_results() {
    let one = collect_records(1);
    assert_eq!(one.len(), 300);
    assert!(one.iter().enumerate().all(|(i, r)| r.trial_index == i as u64));
    assert_eq!(one, collect_records(8));
    assert_eq!(one, collect_records(3));
}
