//! Randomized self-check: runs the library's invariants against brute-force
//! oracles on small seeded graphs and reports the first counterexample of
//! each failing property.

use std::cmp::Ordering;

use decay_core::centrality::{compare_decay, higher_order_closeness, higher_order_farness, horner};
use decay_core::generation::{sample_connected_gnp, TrialSeed, DEFAULT_MAX_REJECTS};
use decay_core::graph::all_profiles;
use decay_core::ordering::{
    check_farness_dominance, check_high_decay_conditions, check_low_decay_conditions,
    check_profile_dominance, lex_compare, lex_compare_closeness, lex_greatest_by_closeness,
    lex_greatest_by_profile, ud_compare,
};
use decay_core::{DeltaGrid, DistanceProfile, Graph, NodeId, Relation};
use num_bigint::BigInt;
use serde::Serialize;

use crate::error::{CliError, CliResult};
use crate::io::write_edge_list;

/// Computes the farness vector `(F^1, ..., F^{n-1})` of a profile.
pub type FarnessFn = fn(&DistanceProfile) -> Vec<BigInt>;

/// Farness vector with the sign of the `C(k, k) D^k` term flipped, a
/// deliberately wrong variant used to confirm the suite catches errors.
pub fn flipped_binomial_sign_farness(profile: &DistanceProfile) -> Vec<BigInt> {
    let mut f = higher_order_farness(profile);
    for (idx, x) in f.iter_mut().enumerate() {
        let diag = BigInt::from(profile.counts[idx]);
        let term = if idx % 2 == 0 { diag } else { -diag };
        *x -= term * 2;
    }
    f
}

#[derive(Clone, Debug, Serialize)]
pub struct CheckOptions {
    pub n_max: usize,
    pub graphs: u64,
    pub seed: u64,
    /// Name of an injected faulty farness computation, if any.
    pub mutant: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Counterexample {
    /// Graph in edge-list format.
    pub graph: String,
    pub nodes: Vec<NodeId>,
    pub delta: Option<f64>,
    pub detail: String,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PropertyResult {
    pub name: &'static str,
    pub cases: u64,
    pub passed: bool,
    pub counterexample: Option<Counterexample>,
}

#[derive(Clone, Debug, Serialize)]
pub struct CheckReport {
    pub graphs: u64,
    pub properties: Vec<PropertyResult>,
}

impl CheckReport {
    pub fn failures(&self) -> usize {
        self.properties.iter().filter(|p| !p.passed).count()
    }

    pub fn property(&self, name: &str) -> Option<&PropertyResult> {
        self.properties.iter().find(|p| p.name == name)
    }
}

struct Tally {
    name: &'static str,
    cases: u64,
    counterexample: Option<Counterexample>,
}

impl Tally {
    fn new(name: &'static str) -> Self {
        Tally {
            name,
            cases: 0,
            counterexample: None,
        }
    }

    /// Records one case; `fail` builds the counterexample on the first failure.
    fn case(&mut self, ok: bool, fail: impl FnOnce() -> Counterexample) {
        self.cases += 1;
        if !ok && self.counterexample.is_none() {
            self.counterexample = Some(fail());
        }
    }

    fn finish(self) -> PropertyResult {
        PropertyResult {
            name: self.name,
            cases: self.cases,
            passed: self.counterexample.is_none(),
            counterexample: self.counterexample,
        }
    }
}

const SOUNDNESS_DENOM: i64 = 1000;

/// Sign of `Σ a_l (k/denom)^l`, exactly.
pub fn exact_sign_at(a: &[i64], k: i64, denom: i64) -> Ordering {
    let top = a.len() as u32;
    let checked = a.iter().enumerate().try_fold(0i128, |acc, (idx, &c)| {
        let l = idx as u32 + 1;
        let term = (c as i128)
            .checked_mul((k as i128).checked_pow(l)?)?
            .checked_mul((denom as i128).checked_pow(top - l)?)?;
        acc.checked_add(term)
    });
    match checked {
        Some(v) => v.cmp(&0),
        None => {
            let v: BigInt = a
                .iter()
                .enumerate()
                .map(|(idx, &c)| {
                    let l = idx as u32 + 1;
                    BigInt::from(c) * BigInt::from(k).pow(l) * BigInt::from(denom).pow(top - l)
                })
                .sum();
            v.sign().cmp(&num_bigint::Sign::NoSign)
        }
    }
}

fn floyd_warshall(g: &Graph) -> Vec<Vec<Option<u32>>> {
    let n = g.node_count();
    let mut d = vec![vec![None; n]; n];
    for (i, row) in d.iter_mut().enumerate() {
        row[i] = Some(0);
        for &j in g.neighbors(i) {
            row[j as usize] = Some(1);
        }
    }
    for k in 0..n {
        for i in 0..n {
            for j in 0..n {
                if let (Some(a), Some(b)) = (d[i][k], d[k][j]) {
                    if d[i][j].is_none_or(|c| a + b < c) {
                        d[i][j] = Some(a + b);
                    }
                }
            }
        }
    }
    d
}

fn relation_of_floats(a: &[f64], b: &[f64]) -> Relation {
    for (x, y) in a.iter().zip(b) {
        if x > y {
            return Relation::Greater;
        }
        if x < y {
            return Relation::Less;
        }
    }
    Relation::Equal
}

struct Suite {
    bfs: Tally,
    symmetry: Tally,
    profile_sum: Tally,
    horner: Tally,
    factored: Tally,
    order_reversal: Tally,
    profile_dom: Tally,
    farness_dom: Tally,
    low: Tally,
    high: Tally,
    lex_low: Tally,
    lex_high: Tally,
    partial_order: Tally,
}

pub fn run_check(opts: &CheckOptions, farness: FarnessFn) -> CliResult<CheckReport> {
    if opts.n_max < 2 {
        return Err(CliError::Usage(format!("n-max must be at least 2, got {}", opts.n_max)));
    }
    let mut s = Suite {
        bfs: Tally::new("bfs_matches_floyd_warshall"),
        symmetry: Tally::new("distances_are_symmetric"),
        profile_sum: Tally::new("profile_sums_to_n_minus_one"),
        horner: Tally::new("horner_matches_pairwise_sum"),
        factored: Tally::new("factored_differences_match_direct"),
        order_reversal: Tally::new("closeness_order_reverses_farness_order"),
        profile_dom: Tally::new("profile_dominance_is_sound"),
        farness_dom: Tally::new("farness_dominance_is_sound"),
        low: Tally::new("low_decay_conditions_are_sound"),
        high: Tally::new("high_decay_conditions_are_sound"),
        lex_low: Tally::new("lex_greatest_profile_wins_small_decay"),
        lex_high: Tally::new("lex_greatest_closeness_wins_large_decay"),
        partial_order: Tally::new("unsorted_dominance_is_a_strict_partial_order"),
    };
    let min_n = opts.n_max.min(5);
    let ps = [0.15, 0.3, 0.5, 0.75];
    let grid = DeltaGrid::default();
    for t in 0..opts.graphs {
        let n = min_n + (t as usize) % (opts.n_max - min_n + 1);
        let p = ps[(t as usize / (opts.n_max - min_n + 1)) % ps.len()];
        let sample = sample_connected_gnp(n, p, TrialSeed::new(opts.seed, t), DEFAULT_MAX_REJECTS)?;
        check_graph(&sample.graph, farness, &grid, &mut s)?;
    }
    let properties = [
        s.bfs,
        s.symmetry,
        s.profile_sum,
        s.horner,
        s.factored,
        s.order_reversal,
        s.profile_dom,
        s.farness_dom,
        s.low,
        s.high,
        s.lex_low,
        s.lex_high,
        s.partial_order,
    ]
    .into_iter()
    .map(Tally::finish)
    .collect();
    Ok(CheckReport {
        graphs: opts.graphs,
        properties,
    })
}

fn check_graph(g: &Graph, farness: FarnessFn, grid: &DeltaGrid, s: &mut Suite) -> CliResult<()> {
    let n = g.node_count();
    let dump = || write_edge_list(g);
    let cx = |nodes: Vec<NodeId>, delta: Option<f64>, detail: String| Counterexample {
        graph: dump(),
        nodes,
        delta,
        detail,
    };

    let fw = floyd_warshall(g);
    let bfs: Vec<_> = (0..n).map(|i| g.bfs_distances(i)).collect::<Result<_, _>>()?;
    for i in 0..n {
        s.bfs.case(bfs[i] == fw[i], || cx(vec![i], None, format!("bfs {:?} vs {:?}", bfs[i], fw[i])));
        for j in 0..n {
            s.symmetry.case(bfs[i][j] == bfs[j][i], || {
                cx(vec![i, j], None, format!("d(i,j) = {:?}, d(j,i) = {:?}", bfs[i][j], bfs[j][i]))
            });
        }
    }

    let profiles = all_profiles(g)?;
    let fvecs: Vec<Vec<BigInt>> = profiles.iter().map(farness).collect();
    let cvecs: Vec<Vec<f64>> = fvecs.iter().map(|f| higher_order_closeness(f)).collect();

    for p in &profiles {
        let total: u64 = p.counts.iter().map(|&c| c as u64).sum();
        s.profile_sum.case(total == n as u64 - 1, || {
            cx(vec![p.node], None, format!("profile {:?} sums to {total}", p.counts))
        });
        for delta in [0.05f64, 0.5, 0.95] {
            let naive: f64 = (0..n)
                .filter(|&j| j != p.node)
                .map(|j| delta.powi(fw[p.node][j].unwrap_or(0) as i32))
                .sum();
            let fast = horner(&p.counts, delta);
            s.horner.case((fast - naive).abs() <= 1e-12 * naive.max(1.0), || {
                cx(vec![p.node], Some(delta), format!("horner {fast} vs pairwise {naive}"))
            });
        }
    }

    for i in 0..n {
        for j in 0..n {
            if i == j {
                continue;
            }
            check_pair(i, j, &profiles, &fvecs, &cvecs, grid, s, &cx)?;
        }
    }

    let counts: Vec<&[u32]> = profiles.iter().map(|p| p.counts.as_slice()).collect();
    let attains_max = |v: NodeId, delta: f64| {
        let dc: Vec<f64> = counts.iter().map(|c| horner(c, delta)).collect();
        (0..n).find(|&u| compare_decay(counts[u], dc[u], counts[v], dc[v], delta) == Ordering::Greater)
    };
    for v in lex_greatest_by_profile(&profiles) {
        let beaten = attains_max(v, 1e-6);
        s.lex_low.case(beaten.is_none(), || {
            cx(vec![v, beaten.unwrap_or(v)], Some(1e-6), "second node has larger decay centrality".into())
        });
    }
    for v in lex_greatest_by_closeness(&fvecs) {
        let beaten = attains_max(v, 1.0 - 1e-6);
        s.lex_high.case(beaten.is_none(), || {
            cx(vec![v, beaten.unwrap_or(v)], Some(1.0 - 1e-6), "second node has larger decay centrality".into())
        });
    }

    let gt = |a: usize, b: usize| -> CliResult<bool> {
        Ok(ud_compare(counts[a], counts[b])?.relation == Relation::Greater)
    };
    for a in 0..n {
        s.partial_order.case(!gt(a, a)?, || cx(vec![a], None, "irreflexivity".into()));
        for b in 0..n {
            let (ab, ba) = (gt(a, b)?, gt(b, a)?);
            s.partial_order.case(!(ab && ba), || cx(vec![a, b], None, "antisymmetry".into()));
            if !ab {
                continue;
            }
            for c in 0..n {
                if gt(b, c)? {
                    let ac = gt(a, c)?;
                    s.partial_order.case(ac, || cx(vec![a, b, c], None, "transitivity".into()));
                }
            }
        }
    }
    Ok(())
}

#[allow(clippy::too_many_arguments)]
fn check_pair(
    i: NodeId,
    j: NodeId,
    profiles: &[DistanceProfile],
    fvecs: &[Vec<BigInt>],
    cvecs: &[Vec<f64>],
    grid: &DeltaGrid,
    s: &mut Suite,
    cx: &dyn Fn(Vec<NodeId>, Option<f64>, String) -> Counterexample,
) -> CliResult<()> {
    let (pi, pj) = (&profiles[i], &profiles[j]);
    let a: Vec<i64> = pi
        .counts
        .iter()
        .zip(&pj.counts)
        .map(|(&x, &y)| x as i64 - y as i64)
        .collect();
    let b: Vec<BigInt> = fvecs[i].iter().zip(&fvecs[j]).map(|(x, y)| x - y).collect();

    let sum_a: i64 = a.iter().sum();
    let sum_b: BigInt = b.iter().sum();
    let sums_zero = sum_a == 0 && sum_b == BigInt::ZERO;
    s.factored.case(sums_zero, || {
        cx(vec![i, j], None, format!("coefficient sums A = {sum_a}, B = {sum_b}"))
    });
    if sums_zero {
        for delta in grid.iter() {
            let direct = horner(&pi.counts, delta) - horner(&pj.counts, delta);
            let fa = decay_core::centrality::dc_difference_factored(&a, delta)?;
            let fb = decay_core::centrality::dc_difference_factored_eps(&b, delta)?;
            let ok = (fa - direct).abs() <= 1e-10 && (fb - direct).abs() <= 1e-10;
            s.factored.case(ok, || {
                cx(vec![i, j], Some(delta), format!("direct {direct}, A-form {fa}, B-form {fb}"))
            });
        }
    }

    let exact = lex_compare(&fvecs[i], &fvecs[j])?.relation.reverse();
    let by_closeness = lex_compare_closeness(&fvecs[i], &fvecs[j])?.relation;
    let floats = relation_of_floats(&cvecs[i], &cvecs[j]);
    s.order_reversal.case(exact == floats && exact == by_closeness, || {
        cx(
            vec![i, j],
            None,
            format!(
                "farness vectors {:?} vs {:?}: reversed farness order {exact:?}, closeness order {floats:?}",
                fvecs[i].iter().map(|x| x.to_string()).collect::<Vec<_>>(),
                fvecs[j].iter().map(|x| x.to_string()).collect::<Vec<_>>(),
            ),
        )
    });

    let claims: [(&mut Tally, bool, std::ops::RangeInclusive<i64>); 4] = [
        (
            &mut s.profile_dom,
            check_profile_dominance(pi, pj)?.relation == Relation::Greater,
            1..=SOUNDNESS_DENOM - 1,
        ),
        (
            &mut s.farness_dom,
            check_farness_dominance(&fvecs[i], &fvecs[j])?.relation == Relation::Greater,
            1..=SOUNDNESS_DENOM - 1,
        ),
        (
            &mut s.low,
            check_low_decay_conditions(pi, pj)?.fired(),
            1..=SOUNDNESS_DENOM / 2,
        ),
        (
            &mut s.high,
            check_high_decay_conditions(&fvecs[i], &fvecs[j])?.fired(),
            SOUNDNESS_DENOM / 2..=SOUNDNESS_DENOM - 1,
        ),
    ];
    for (tally, fired, range) in claims {
        if !fired {
            continue;
        }
        let violation = range
            .clone()
            .find(|&k| exact_sign_at(&a, k, SOUNDNESS_DENOM) != Ordering::Greater);
        tally.case(violation.is_none(), || {
            let k = violation.unwrap_or(0);
            cx(
                vec![i, j],
                Some(k as f64 / SOUNDNESS_DENOM as f64),
                format!("checker fired but DC_i <= DC_j at {k}/{SOUNDNESS_DENOM}"),
            )
        });
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_sign_matches_small_cases() {
        // δ - 2δ² vanishes at 1/2.
        assert_eq!(exact_sign_at(&[1, -2], 500, 1000), Ordering::Equal);
        assert_eq!(exact_sign_at(&[1, -2], 499, 1000), Ordering::Greater);
        assert_eq!(exact_sign_at(&[1, -2], 501, 1000), Ordering::Less);
        // Degree 15 overflows i128 and takes the big-integer path.
        let mut a = vec![0i64; 15];
        a[0] = 1;
        a[14] = -1;
        assert_eq!(exact_sign_at(&a, 999, 1000), Ordering::Greater);
    }

    #[test]
    fn mutant_differs_from_reference() {
        let p = DistanceProfile::new(0, vec![3, 0, 0]);
        assert_ne!(flipped_binomial_sign_farness(&p), higher_order_farness(&p));
    }
}
