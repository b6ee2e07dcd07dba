//! Vector orders on distance profiles and farness vectors, the sufficient
//! conditions they give for ordering decay centrality, and maximizer sets.
//!
//! Every comparator returns a [`ComparisonVerdict`] naming the rule that
//! produced it. Lexicographic comparators are total; unsorted dominance is
//! a partial order and may answer [`Relation::Incomparable`], which only
//! means the rule is silent about the pair.

use std::cmp::Ordering;
use std::ops::AddAssign;

use num_bigint::BigInt;
use num_traits::{Signed, Zero};
use serde::Serialize;

use crate::centrality::{compare_decay, horner, TIE_TOLERANCE};
use crate::error::{Error, Result};
use crate::graph::{all_profiles, DistanceProfile, Graph, NodeId};
use crate::grid::DeltaGrid;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Relation {
    Greater,
    Less,
    Equal,
    Incomparable,
}

impl Relation {
    pub fn reverse(self) -> Self {
        match self {
            Relation::Greater => Relation::Less,
            Relation::Less => Relation::Greater,
            other => other,
        }
    }

    fn from_ordering(o: Ordering) -> Self {
        match o {
            Ordering::Greater => Relation::Greater,
            Ordering::Less => Relation::Less,
            Ordering::Equal => Relation::Equal,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Rule {
    Lexicographic,
    /// Lexicographic order of the higher-order closeness vectors.
    LexicographicCloseness,
    UnsortedDominance,
    /// Unsorted dominance of distance profiles; orders decay centrality on all of (0, 1).
    ProfileDominance,
    /// Reversed unsorted dominance of farness vectors; orders decay centrality on all of (0, 1).
    FarnessDominance,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct ComparisonVerdict {
    pub relation: Relation,
    pub rule: Rule,
    /// First differing position for lexicographic rules; first strict
    /// (or, when incomparable, first conflicting) prefix for dominance.
    pub witness: Option<usize>,
}

impl ComparisonVerdict {
    fn new(relation: Relation, rule: Rule, witness: Option<usize>) -> Self {
        ComparisonVerdict {
            relation,
            rule,
            witness,
        }
    }
}

fn same_len<A, B>(a: &[A], b: &[B]) -> Result<()> {
    if a.len() != b.len() {
        return Err(Error::LengthMismatch {
            left: a.len(),
            right: b.len(),
        });
    }
    Ok(())
}

pub fn lex_compare<T: Ord>(a: &[T], b: &[T]) -> Result<ComparisonVerdict> {
    same_len(a, b)?;
    let verdict = match a.iter().zip(b).position(|(x, y)| x != y) {
        Some(k) => ComparisonVerdict::new(
            Relation::from_ordering(a[k].cmp(&b[k])),
            Rule::Lexicographic,
            Some(k),
        ),
        None => ComparisonVerdict::new(Relation::Equal, Rule::Lexicographic, None),
    };
    Ok(verdict)
}

/// Lexicographic order of `C = (1/F^1, ..., 1/F^{n-1})` (0 where `F^k = 0`),
/// decided on the integer farness vectors without division.
pub fn lex_compare_closeness(fi: &[BigInt], fj: &[BigInt]) -> Result<ComparisonVerdict> {
    same_len(fi, fj)?;
    // x -> 1/x (0 -> 0) is injective, so C and F first differ at the same place.
    let verdict = match fi.iter().zip(fj).position(|(x, y)| x != y) {
        Some(k) => ComparisonVerdict::new(
            Relation::from_ordering(cmp_reciprocal(&fi[k], &fj[k])),
            Rule::LexicographicCloseness,
            Some(k),
        ),
        None => ComparisonVerdict::new(Relation::Equal, Rule::LexicographicCloseness, None),
    };
    Ok(verdict)
}

/// Compares `1/x` with `1/y`, where the reciprocal of zero is zero.
fn cmp_reciprocal(x: &BigInt, y: &BigInt) -> Ordering {
    let (sx, sy) = (signum(x), signum(y));
    if sx != sy || sx == 0 {
        sx.cmp(&sy)
    } else {
        y.cmp(x)
    }
}

fn signum(x: &BigInt) -> i8 {
    if x.is_positive() {
        1
    } else if x.is_negative() {
        -1
    } else {
        0
    }
}

/// Unsorted dominance: `a` is greater when every prefix sum of `a` is at
/// least that of `b`, at least one strictly.
pub fn ud_compare<T>(a: &[T], b: &[T]) -> Result<ComparisonVerdict>
where
    T: Clone + Ord + Zero + for<'x> AddAssign<&'x T>,
{
    same_len(a, b)?;
    let (mut sa, mut sb) = (T::zero(), T::zero());
    let mut first_greater = None;
    let mut first_less = None;
    for (k, (x, y)) in a.iter().zip(b).enumerate() {
        sa += x;
        sb += y;
        match sa.cmp(&sb) {
            Ordering::Greater => {
                first_greater.get_or_insert(k);
            }
            Ordering::Less => {
                first_less.get_or_insert(k);
            }
            Ordering::Equal => {}
        }
    }
    let (relation, witness) = match (first_greater, first_less) {
        (None, None) => (Relation::Equal, None),
        (Some(k), None) => (Relation::Greater, Some(k)),
        (None, Some(k)) => (Relation::Less, Some(k)),
        (Some(g), Some(l)) => (Relation::Incomparable, Some(g.max(l))),
    };
    Ok(ComparisonVerdict::new(relation, Rule::UnsortedDominance, witness))
}

/// `Greater` when the profile of `i` dominates that of `j`, in which case
/// `DC_i > DC_j` for every decay parameter in (0, 1).
pub fn check_profile_dominance(
    pi: &DistanceProfile,
    pj: &DistanceProfile,
) -> Result<ComparisonVerdict> {
    let v = ud_compare(&pi.counts, &pj.counts)?;
    Ok(ComparisonVerdict {
        rule: Rule::ProfileDominance,
        ..v
    })
}

/// `Greater` when the farness vector of `j` dominates that of `i` (note
/// the reversal), in which case `DC_i > DC_j` on all of (0, 1).
pub fn check_farness_dominance(fi: &[BigInt], fj: &[BigInt]) -> Result<ComparisonVerdict> {
    let v = ud_compare(fj, fi)?;
    Ok(ComparisonVerdict {
        rule: Rule::FarnessDominance,
        ..v
    })
}

/// Which numbered sufficient conditions hold for a pair.
///
/// `applicable` is false when the sign precondition fails; `satisfied` is
/// then empty.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ConditionReport {
    pub applicable: bool,
    pub satisfied: Vec<u8>,
}

impl ConditionReport {
    fn not_applicable() -> Self {
        ConditionReport {
            applicable: false,
            satisfied: Vec::new(),
        }
    }

    pub fn fired(&self) -> bool {
        !self.satisfied.is_empty()
    }
}

/// Conditions guaranteeing `DC_i > DC_j` for every decay parameter in
/// `(0, 1/2]`, given that `i` has the larger degree.
///
/// With `A_l = D_i^l - D_j^l`:
/// 1. `2 A_1 >= (n-1) - D_j`
/// 2. `4 A_1 + 2 A_2 >= (n-1) - (D_j + D_j^2)`
/// 3. `A_1 >= |A_l|` for every `l >= 2`
/// 4. `A_1 >= |A_1 + ... + A_k|` for `k = 2..=n-2`
pub fn check_low_decay_conditions(
    pi: &DistanceProfile,
    pj: &DistanceProfile,
) -> Result<ConditionReport> {
    same_len(&pi.counts, &pj.counts)?;
    let a: Vec<i64> = pi
        .counts
        .iter()
        .zip(&pj.counts)
        .map(|(&x, &y)| x as i64 - y as i64)
        .collect();
    let Some(&a1) = a.first() else {
        return Ok(ConditionReport::not_applicable());
    };
    if a1 <= 0 {
        return Ok(ConditionReport::not_applicable());
    }
    let others = a.len() as i64;
    let dj = pj.counts[0] as i64;
    let dj2 = pj.counts.get(1).copied().unwrap_or(0) as i64;
    let a2 = a.get(1).copied().unwrap_or(0);

    let mut satisfied = Vec::new();
    if 2 * a1 >= others - dj {
        satisfied.push(1);
    }
    if 4 * a1 + 2 * a2 >= others - (dj + dj2) {
        satisfied.push(2);
    }
    if a1 >= a[1..].iter().map(|x| x.abs()).max().unwrap_or(0) {
        satisfied.push(3);
    }
    let max_partial = a
        .iter()
        .scan(0i64, |s, &x| {
            *s += x;
            Some(*s)
        })
        .take(a.len().saturating_sub(1))
        .skip(1)
        .map(i64::abs)
        .max()
        .unwrap_or(0);
    if a1 >= max_partial {
        satisfied.push(4);
    }
    Ok(ConditionReport {
        applicable: true,
        satisfied,
    })
}

/// Conditions guaranteeing `DC_i > DC_j` for every decay parameter in
/// `[1/2, 1)`, given that `i` has the smaller farness.
///
/// With `B_l = F_i^l - F_j^l`:
/// 1. `|B_1| >= |B_l|` for every `l >= 2`
/// 2. `|B_1| >= |B_1 + ... + B_k|` for `k = 2..=n-2`
pub fn check_high_decay_conditions(fi: &[BigInt], fj: &[BigInt]) -> Result<ConditionReport> {
    same_len(fi, fj)?;
    let b: Vec<BigInt> = fi.iter().zip(fj).map(|(x, y)| x - y).collect();
    let Some(b1) = b.first() else {
        return Ok(ConditionReport::not_applicable());
    };
    if !b1.is_negative() {
        return Ok(ConditionReport::not_applicable());
    }
    let lead = b1.abs();
    let mut satisfied = Vec::new();
    if b[1..].iter().all(|x| x.abs() <= lead) {
        satisfied.push(1);
    }
    let mut running = BigInt::zero();
    let mut partial_ok = true;
    for (k, x) in b.iter().enumerate().take(b.len().saturating_sub(1)) {
        running += x;
        if k >= 1 && running.abs() > lead {
            partial_ok = false;
            break;
        }
    }
    if partial_ok {
        satisfied.push(2);
    }
    Ok(ConditionReport {
        applicable: true,
        satisfied,
    })
}

/// Order of decay centrality for all sufficiently small decay parameters.
pub fn low_decay_order(pi: &DistanceProfile, pj: &DistanceProfile) -> Result<ComparisonVerdict> {
    lex_compare(&pi.counts, &pj.counts)
}

/// Order of decay centrality for all decay parameters close enough to 1.
pub fn high_decay_order(fi: &[BigInt], fj: &[BigInt]) -> Result<ComparisonVerdict> {
    lex_compare_closeness(fi, fj)
}

/// Nodes whose distance profile is lexicographically greatest.
pub fn lex_greatest_by_profile(profiles: &[DistanceProfile]) -> Vec<NodeId> {
    let Some(best) = profiles.iter().map(|p| &p.counts).max() else {
        return Vec::new();
    };
    profiles
        .iter()
        .filter(|p| &p.counts == best)
        .map(|p| p.node)
        .collect()
}

/// Nodes whose higher-order closeness vector is lexicographically greatest,
/// `fvecs[i]` being the farness vector of node `i`.
pub fn lex_greatest_by_closeness(fvecs: &[Vec<BigInt>]) -> Vec<NodeId> {
    let mut best: Option<usize> = None;
    for i in 0..fvecs.len() {
        best = match best {
            Some(b) if lex_compare_closeness(&fvecs[i], &fvecs[b]).map(|v| v.relation)
                != Ok(Relation::Greater) =>
            {
                Some(b)
            }
            _ => Some(i),
        };
    }
    match best {
        Some(b) => (0..fvecs.len()).filter(|&i| fvecs[i] == fvecs[b]).collect(),
        None => Vec::new(),
    }
}

/// Argmax sets of degree, closeness and decay centrality.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct MaximizerSets {
    pub i_deg: Vec<NodeId>,
    pub i_clos: Vec<NodeId>,
    /// One set per grid point, in grid order.
    pub i_dc: Vec<Vec<NodeId>>,
}

pub fn maximizer_sets(g: &Graph, grid: &DeltaGrid) -> Result<MaximizerSets> {
    let profiles = all_profiles(g)?;
    if profiles.is_empty() {
        return Err(Error::TooFewNodes { n: 0, min: 1 });
    }
    let mut dc = vec![0.0; profiles.len()];
    let i_dc = grid
        .iter()
        .map(|delta| {
            for (v, p) in dc.iter_mut().zip(&profiles) {
                *v = horner(&p.counts, delta);
            }
            decay_maximizers(&profiles, &dc, delta)
        })
        .collect();
    Ok(MaximizerSets {
        i_deg: degree_maximizers(&profiles),
        i_clos: closeness_maximizers(&profiles),
        i_dc,
    })
}

pub fn degree_maximizers(profiles: &[DistanceProfile]) -> Vec<NodeId> {
    argmax_by_key(profiles, |p| p.degree() as i64)
}

/// Exact argmin of farness.
pub fn closeness_maximizers(profiles: &[DistanceProfile]) -> Vec<NodeId> {
    argmax_by_key(profiles, |p| -(p.farness() as i64))
}

fn argmax_by_key(profiles: &[DistanceProfile], key: impl Fn(&DistanceProfile) -> i64) -> Vec<NodeId> {
    let Some(best) = profiles.iter().map(&key).max() else {
        return Vec::new();
    };
    profiles
        .iter()
        .filter(|p| key(p) == best)
        .map(|p| p.node)
        .collect()
}

/// Exact argmax of decay centrality at `delta`, given `dc[i]` computed for
/// `profiles[i]`.
///
/// Nodes within the floating-point tie band of the maximum are compared
/// exactly, so the set is the true argmax at the binary value of `delta`.
pub fn decay_maximizers(profiles: &[DistanceProfile], dc: &[f64], delta: f64) -> Vec<NodeId> {
    let top = dc.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let band = TIE_TOLERANCE * top.abs().max(1.0);
    let candidates: Vec<usize> = (0..dc.len()).filter(|&i| dc[i] >= top - band).collect();
    let cmp = |x: usize, y: usize| {
        compare_decay(&profiles[x].counts, dc[x], &profiles[y].counts, dc[y], delta)
    };
    let mut best = candidates[0];
    for &c in &candidates[1..] {
        if cmp(c, best) == Ordering::Greater {
            best = c;
        }
    }
    candidates
        .into_iter()
        .filter(|&c| c == best || cmp(c, best) == Ordering::Equal)
        .map(|c| profiles[c].node)
        .collect()
}
