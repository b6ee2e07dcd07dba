//! Seeded Erdős–Rényi sampling, conditioned on connectivity by rejection.
//!
//! A G(n,p) draw is produced as an edge count `M ~ Binomial(N, p)` over the
//! `N = n(n-1)/2` node pairs followed by a uniformly random `M`-subset of
//! pairs, which is the same law as including each pair independently with
//! probability `p`.
//!
//! Connected sampling rejects draws until one is connected. Draws with fewer
//! than `n - 1` edges can never be connected, so a run of them is skipped
//! with a single geometric draw and the accepted edge count is drawn from
//! the binomial conditioned on `M >= n - 1`. The accepted graph and the
//! rejection count have exactly the distribution of naive rejection.

use rand::seq::index;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Binomial, Distribution, Geometric};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::graph::{Graph, NodeId};

pub const DEFAULT_MAX_REJECTS: u64 = 100_000;

/// Seed of one trial: a pure function of `(master_seed, trial_index)`.
///
/// Each trial index selects its own ChaCha stream, so trials can run in any
/// order or on any number of workers and still see the same randomness.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct TrialSeed {
    pub master_seed: u64,
    pub trial_index: u64,
}

impl TrialSeed {
    pub fn new(master_seed: u64, trial_index: u64) -> Self {
        TrialSeed {
            master_seed,
            trial_index,
        }
    }

    pub fn rng(&self) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.master_seed);
        rng.set_stream(self.trial_index);
        rng
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ConnectedSample {
    pub graph: Graph,
    /// Number of rejected (disconnected) G(n,p) draws before acceptance.
    pub rejects: u64,
}

/// Reusable G(n,p) sampler for fixed `(n, p)`.
#[derive(Clone, Debug)]
pub struct GnpSampler {
    n: usize,
    p: f64,
    pairs: u64,
    edge_count: Binomial,
    row_start: Vec<u64>,
    sparse: SparseTail,
}

/// Edge-count law conditioned on `M >= n - 1`.
#[derive(Clone, Debug)]
struct SparseTail {
    /// `None` when `P(M >= n - 1)` is 1 to double precision.
    skip: Option<Geometric>,
    first: u64,
    /// Cumulative conditional probabilities of `M = first, first + 1, ...`.
    cdf: Vec<f64>,
}

impl GnpSampler {
    pub fn new(n: usize, p: f64) -> Result<Self> {
        if n < 2 {
            return Err(Error::InvalidParameter(format!("n must be at least 2, got {n}")));
        }
        if !(p > 0.0 && p <= 1.0) {
            return Err(Error::InvalidParameter(format!("p must lie in (0, 1], got {p}")));
        }
        let pairs = (n as u64) * (n as u64 - 1) / 2;
        let edge_count = Binomial::new(pairs, p)
            .map_err(|e| Error::InvalidParameter(format!("binomial({pairs}, {p}): {e}")))?;
        let row_start = (0..n as u64).map(|u| u * n as u64 - u * (u + 1) / 2).collect();
        let sparse = SparseTail::new(pairs, p, n as u64 - 1)?;
        Ok(GnpSampler {
            n,
            p,
            pairs,
            edge_count,
            row_start,
            sparse,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn p(&self) -> f64 {
        self.p
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> Graph {
        let m = self.edge_count.sample(rng);
        self.with_edge_count(m, rng)
    }

    /// First connected draw; fails once more than `max_rejects` draws have
    /// been rejected.
    pub fn sample_connected<R: Rng + ?Sized>(
        &self,
        rng: &mut R,
        max_rejects: u64,
    ) -> Result<ConnectedSample> {
        let mut rejects = 0u64;
        loop {
            if let Some(skip) = &self.sparse.skip {
                rejects = rejects.saturating_add(skip.sample(rng));
                if rejects > max_rejects {
                    return Err(Error::RejectLimit {
                        rejects,
                        max_rejects,
                    });
                }
            }
            let m = self.sparse.sample_count(rng);
            let graph = self.with_edge_count(m, rng);
            if graph.is_connected() {
                return Ok(ConnectedSample { graph, rejects });
            }
            rejects += 1;
            if rejects > max_rejects {
                return Err(Error::RejectLimit {
                    rejects,
                    max_rejects,
                });
            }
        }
    }

    fn with_edge_count<R: Rng + ?Sized>(&self, m: u64, rng: &mut R) -> Graph {
        let mut edges: Vec<(NodeId, NodeId)> = if m == self.pairs {
            (0..self.pairs).map(|k| self.pair(k)).collect()
        } else {
            index::sample(rng, self.pairs as usize, m as usize)
                .into_iter()
                .map(|k| self.pair(k as u64))
                .collect()
        };
        edges.sort_unstable();
        Graph::from_canonical_pairs(self.n, &edges)
    }

    /// Pair index in row-major order over `u < v`.
    fn pair(&self, k: u64) -> (NodeId, NodeId) {
        let u = self.row_start.partition_point(|&s| s <= k) - 1;
        let v = k - self.row_start[u] + u as u64 + 1;
        (u, v as NodeId)
    }
}

impl SparseTail {
    fn new(pairs: u64, p: f64, first: u64) -> Result<Self> {
        if p == 1.0 {
            return Ok(SparseTail {
                skip: None,
                first: pairs,
                cdf: vec![1.0],
            });
        }
        // log pmf of Binomial(pairs, p) at `first`, then walk upwards.
        let (lp, lq) = (p.ln(), (-p).ln_1p());
        let mut log_pmf = (0..first)
            .map(|i| ((pairs - i) as f64).ln() - ((i + 1) as f64).ln())
            .sum::<f64>()
            + first as f64 * lp
            + (pairs - first) as f64 * lq;
        let mut logs = Vec::new();
        let mut peak = f64::NEG_INFINITY;
        let mut k = first;
        loop {
            logs.push(log_pmf);
            peak = peak.max(log_pmf);
            if k == pairs || log_pmf < peak - 50.0 {
                break;
            }
            log_pmf += ((pairs - k) as f64).ln() - ((k + 1) as f64).ln() + lp - lq;
            k += 1;
        }
        let weights: Vec<f64> = logs.iter().map(|&l| (l - peak).exp()).collect();
        let total: f64 = weights.iter().sum();
        // The lower mass is summed directly so a tiny value is not lost to
        // cancellation in `1 - tail`.
        let mut lower_logs = Vec::with_capacity(first as usize);
        let mut l = pairs as f64 * lq;
        for i in 0..first {
            lower_logs.push(l);
            l += ((pairs - i) as f64).ln() - ((i + 1) as f64).ln() + lp - lq;
        }
        let lower_peak = lower_logs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let lower_mass = if lower_logs.is_empty() {
            0.0
        } else {
            let s: f64 = lower_logs.iter().map(|&x| (x - lower_peak).exp()).sum();
            (lower_peak + s.ln()).exp().min(1.0)
        };
        let tail_mass = if lower_mass < 0.5 {
            1.0 - lower_mass
        } else {
            (peak + total.ln()).exp()
        };
        if !(tail_mass > 0.0) || !(total > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "connected graphs are too unlikely for p = {p}"
            )));
        }
        let mut acc = 0.0;
        let cdf = weights
            .iter()
            .map(|w| {
                acc += w / total;
                acc
            })
            .collect();
        let skip = if tail_mass < 1.0 {
            Some(Geometric::new(tail_mass).map_err(|e| Error::InvalidParameter(e.to_string()))?)
        } else {
            None
        };
        Ok(SparseTail { skip, first, cdf })
    }

    fn sample_count<R: Rng + ?Sized>(&self, rng: &mut R) -> u64 {
        let u: f64 = rng.random();
        let k = self.cdf.partition_point(|&c| c <= u).min(self.cdf.len() - 1);
        self.first + k as u64
    }
}

/// One unconditioned G(n,p) draw from the trial's stream.
pub fn sample_gnp(n: usize, p: f64, seed: TrialSeed) -> Result<Graph> {
    Ok(GnpSampler::new(n, p)?.sample(&mut seed.rng()))
}

/// First connected G(n,p) draw from the trial's stream.
pub fn sample_connected_gnp(
    n: usize,
    p: f64,
    seed: TrialSeed,
    max_rejects: u64,
) -> Result<ConnectedSample> {
    GnpSampler::new(n, p)?.sample_connected(&mut seed.rng(), max_rejects)
}
