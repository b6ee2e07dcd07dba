//! Degree, farness/closeness, decay centrality and the higher-order
//! farness vectors.
//!
//! Integer quantities (degrees, farness, the higher-order farness vector and
//! the difference coefficients) are exact. Only decay centrality itself is
//! evaluated in `f64`, and any comparison between two decay values that is
//! too close to call in floating point is settled exactly, see
//! [`compare_decay`].

use std::cmp::Ordering;

use num_bigint::BigInt;
use num_traits::{Signed, ToPrimitive, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::graph::{all_profiles, DistanceProfile, Graph, NodeId};
use crate::grid::DeltaGrid;

/// Floating-point gap below which two decay values are compared exactly.
pub const TIE_TOLERANCE: f64 = 1e-9;

/// Closeness `1 / farness`, kept as the exact farness.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct Closeness {
    pub farness: u64,
}

impl Closeness {
    pub fn value(self) -> f64 {
        1.0 / self.farness as f64
    }
}

impl Ord for Closeness {
    fn cmp(&self, other: &Self) -> Ordering {
        other.farness.cmp(&self.farness)
    }
}

impl PartialOrd for Closeness {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Big integers serialize as decimal strings so no reader loses precision.
pub fn decimal_strings<S: serde::Serializer>(v: &[BigInt], s: S) -> std::result::Result<S::Ok, S::Error> {
    s.collect_seq(v.iter().map(|x| x.to_string()))
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct NodeCentrality {
    pub node: NodeId,
    pub degree: u32,
    pub profile: DistanceProfile,
    pub farness: u64,
    pub closeness: Closeness,
    /// Higher-order farness `(F^1, ..., F^{n-1})`; `F^1` is the farness.
    #[serde(serialize_with = "decimal_strings")]
    pub fvec: Vec<BigInt>,
    /// `C^k = 1 / F^k`, or 0 where `F^k = 0`.
    pub cvec: Vec<f64>,
}

impl NodeCentrality {
    pub fn decay(&self, delta: f64) -> Result<f64> {
        decay_centrality(&self.profile, delta)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CentralityTable {
    pub nodes: Vec<NodeCentrality>,
}

impl CentralityTable {
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn node(&self, i: NodeId) -> &NodeCentrality {
        &self.nodes[i]
    }

    pub fn profiles(&self) -> Vec<DistanceProfile> {
        self.nodes.iter().map(|r| r.profile.clone()).collect()
    }
}

/// All centrality quantities for a connected graph with at least two nodes.
pub fn centrality_table(g: &Graph) -> Result<CentralityTable> {
    let n = g.node_count();
    if n < 2 {
        return Err(Error::TooFewNodes { n, min: 2 });
    }
    let nodes = all_profiles(g)?
        .into_iter()
        .map(|profile| {
            let farness = profile.farness();
            let fvec = higher_order_farness(&profile);
            let cvec = higher_order_closeness(&fvec);
            NodeCentrality {
                node: profile.node,
                degree: profile.degree(),
                farness,
                closeness: Closeness { farness },
                fvec,
                cvec,
                profile,
            }
        })
        .collect();
    Ok(CentralityTable { nodes })
}

/// `F^k = (-1)^(k-1) * sum_{l >= k} C(l, k) * D^l` for `k = 1..=n-1`.
///
/// Entries past the eccentricity are zero. Arbitrary precision, so any
/// graph size is exact.
pub fn higher_order_farness(profile: &DistanceProfile) -> Vec<BigInt> {
    let len = profile.len();
    let ecc = profile.eccentricity();
    let mut fvec = vec![BigInt::zero(); len];
    for k in 1..=ecc {
        // Walk l = k..=ecc with C(l, k) updated in place.
        let mut binom = BigInt::from(1u32);
        let mut sum = BigInt::zero();
        for l in k..=ecc {
            if l > k {
                binom = binom * l / (l - k);
            }
            let count = profile.counts[l - 1];
            if count != 0 {
                sum += &binom * count;
            }
        }
        fvec[k - 1] = if k % 2 == 1 { sum } else { -sum };
    }
    fvec
}

pub fn higher_order_closeness(fvec: &[BigInt]) -> Vec<f64> {
    fvec.iter()
        .map(|f| {
            if f.is_zero() {
                0.0
            } else {
                1.0 / f.to_f64().unwrap_or(f64::INFINITY)
            }
        })
        .collect()
}

pub(crate) fn check_delta(delta: f64) -> Result<()> {
    if delta > 0.0 && delta < 1.0 {
        Ok(())
    } else {
        Err(Error::InvalidDelta(delta))
    }
}

/// `sum_l delta^l * counts[l-1]` by Horner's scheme from the highest power.
///
/// No range check on `delta`.
pub fn horner(counts: &[u32], delta: f64) -> f64 {
    let top = counts.iter().rposition(|&c| c != 0).map_or(0, |i| i + 1);
    let inner = counts[..top]
        .iter()
        .rev()
        .fold(0.0, |acc, &c| acc * delta + c as f64);
    inner * delta
}

pub fn decay_centrality(profile: &DistanceProfile, delta: f64) -> Result<f64> {
    check_delta(delta)?;
    Ok(horner(&profile.counts, delta))
}

pub fn decay_curve(profile: &DistanceProfile, grid: &DeltaGrid) -> Vec<f64> {
    grid.iter().map(|d| horner(&profile.counts, d)).collect()
}

/// Coefficients of `DC_i - DC_j` in powers of `delta` (`a`) and of
/// `1 - delta` (`b`).
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DcDifference {
    /// `a[l-1] = D_i^l - D_j^l`.
    pub a: Vec<i64>,
    /// `b[l-1] = F_i^l - F_j^l`.
    #[serde(serialize_with = "decimal_strings")]
    pub b: Vec<BigInt>,
}

pub fn dc_difference_coeffs(pi: &DistanceProfile, pj: &DistanceProfile) -> Result<DcDifference> {
    if pi.len() != pj.len() {
        return Err(Error::LengthMismatch {
            left: pi.len(),
            right: pj.len(),
        });
    }
    let a = profile_difference(&pi.counts, &pj.counts);
    let fi = higher_order_farness(pi);
    let fj = higher_order_farness(pj);
    let b = fi.iter().zip(&fj).map(|(x, y)| x - y).collect();
    Ok(DcDifference { a, b })
}

pub(crate) fn profile_difference(ci: &[u32], cj: &[u32]) -> Vec<i64> {
    ci.iter().zip(cj).map(|(&x, &y)| x as i64 - y as i64).collect()
}

/// `DC_i - DC_j = delta (1 - delta) [S_1 + S_2 delta + ... + S_{n-2} delta^{n-3}]`
/// where `S_k` are the partial sums of `a`. Requires `sum(a) == 0`.
pub fn dc_difference_factored(a: &[i64], delta: f64) -> Result<f64> {
    check_delta(delta)?;
    let total: i64 = a.iter().sum();
    if total != 0 {
        return Err(Error::NonZeroCoefficientSum(total.to_string()));
    }
    let partial: Vec<f64> = prefix_sums(a.iter().copied())
        .take(a.len().saturating_sub(1))
        .map(|s| s as f64)
        .collect();
    Ok(delta * (1.0 - delta) * horner_f64(&partial, delta))
}

/// The same difference in `eps = 1 - delta`:
/// `-eps (1 - eps) [T_1 + T_2 eps + ... + T_{n-2} eps^{n-3}]` with `T_k`
/// the partial sums of `b`. Requires `sum(b) == 0`.
pub fn dc_difference_factored_eps(b: &[BigInt], delta: f64) -> Result<f64> {
    check_delta(delta)?;
    let mut running = BigInt::zero();
    let mut partial = Vec::with_capacity(b.len());
    for x in b {
        running += x;
        partial.push(running.to_f64().unwrap_or(f64::NAN));
    }
    if !running.is_zero() {
        return Err(Error::NonZeroCoefficientSum(running.to_string()));
    }
    partial.pop();
    let eps = 1.0 - delta;
    Ok(-eps * (1.0 - eps) * horner_f64(&partial, eps))
}

fn prefix_sums(it: impl Iterator<Item = i64>) -> impl Iterator<Item = i64> {
    it.scan(0i64, |acc, x| {
        *acc += x;
        Some(*acc)
    })
}

/// `c[0] + c[1] x + c[2] x^2 + ...`
fn horner_f64(coeffs: &[f64], x: f64) -> f64 {
    coeffs.iter().rev().fold(0.0, |acc, &c| acc * x + c)
}

/// Exact sign of `sum_l a[l-1] * delta^l` at the binary value of `delta`.
///
/// `delta` must be positive and finite. Uses arbitrary precision, so it is
/// meant for the rare comparisons floating point cannot decide.
pub fn difference_sign_exact(a: &[i64], delta: f64) -> Ordering {
    debug_assert!(delta > 0.0 && delta.is_finite());
    let Some(top) = a.iter().rposition(|&x| x != 0) else {
        return Ordering::Equal;
    };
    let (mantissa, shift) = dyadic(delta);
    // delta = m / 2^s with s >= 0 after normalisation; the sign of the
    // polynomial divided by delta is that of
    //   sum_l a_l m^(l-1) 2^(s (top - (l-1))).
    let m = BigInt::from(mantissa);
    let mut h = BigInt::from(a[top]);
    for (idx, &coef) in a[..top].iter().enumerate().rev() {
        h *= &m;
        if coef != 0 {
            h += BigInt::from(coef) << (shift as usize * (top - idx));
        }
    }
    if h.is_positive() {
        Ordering::Greater
    } else if h.is_negative() {
        Ordering::Less
    } else {
        Ordering::Equal
    }
}

/// `x = m * 2^(-s)` with `m` odd, for positive finite `x`. Values `>= 1`
/// are folded in by allowing `s` to be zero with a larger `m`.
fn dyadic(x: f64) -> (u128, u32) {
    let bits = x.to_bits();
    let exp_bits = ((bits >> 52) & 0x7ff) as i32;
    let frac = bits & ((1u64 << 52) - 1);
    let (mut m, mut e) = if exp_bits == 0 {
        (frac as u128, -1074)
    } else {
        ((frac | (1u64 << 52)) as u128, exp_bits - 1075)
    };
    let tz = m.trailing_zeros() as i32;
    m >>= tz;
    e += tz;
    if e >= 0 {
        (m << e, 0)
    } else {
        (m, (-e) as u32)
    }
}

/// Orders two nodes by decay centrality at `delta`.
///
/// `dc_i`/`dc_j` are the floating-point values for the profiles `ci`/`cj`.
/// A gap larger than [`TIE_TOLERANCE`] is trusted; otherwise identical
/// profiles tie and distinct ones are decided by [`difference_sign_exact`].
pub fn compare_decay(ci: &[u32], dc_i: f64, cj: &[u32], dc_j: f64, delta: f64) -> Ordering {
    let tol = TIE_TOLERANCE * dc_i.abs().max(dc_j.abs()).max(1.0);
    let diff = dc_i - dc_j;
    if diff > tol {
        Ordering::Greater
    } else if diff < -tol {
        Ordering::Less
    } else if ci == cj {
        Ordering::Equal
    } else {
        difference_sign_exact(&profile_difference(ci, cj), delta)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p3() -> Graph {
        Graph::new(3, &[(0, 1), (1, 2)]).unwrap()
    }

    fn star4() -> Graph {
        Graph::new(4, &[(0, 1), (0, 2), (0, 3)]).unwrap()
    }

    fn ints(v: &[i64]) -> Vec<BigInt> {
        v.iter().map(|&x| BigInt::from(x)).collect()
    }

    #[test]
    fn path_table() {
        let t = centrality_table(&p3()).unwrap();
        let degrees: Vec<_> = t.nodes.iter().map(|r| r.degree).collect();
        let farness: Vec<_> = t.nodes.iter().map(|r| r.farness).collect();
        let closeness: Vec<_> = t.nodes.iter().map(|r| r.closeness.value()).collect();
        assert_eq!(degrees, [1, 2, 1]);
        assert_eq!(farness, [3, 2, 3]);
        assert_eq!(closeness, [1.0 / 3.0, 0.5, 1.0 / 3.0]);
        assert_eq!(t.node(0).fvec, ints(&[3, -1]));
        assert_eq!(t.node(1).fvec, ints(&[2, 0]));
        assert_eq!(t.node(0).cvec, [1.0 / 3.0, -1.0]);
        assert_eq!(t.node(1).cvec, [0.5, 0.0]);
    }

    #[test]
    fn star_table() {
        let t = centrality_table(&star4()).unwrap();
        assert_eq!(t.node(0).farness, 3);
        assert_eq!(t.node(0).closeness.value(), 1.0 / 3.0);
        for leaf in 1..4 {
            assert_eq!(t.node(leaf).farness, 5);
        }
        assert!(t.node(0).closeness > t.node(1).closeness);
    }

    #[test]
    fn table_needs_connected_graph_with_two_nodes() {
        let g = Graph::new(4, &[(0, 1), (2, 3)]).unwrap();
        assert_eq!(centrality_table(&g), Err(Error::Disconnected));
        let single = Graph::new(1, &[]).unwrap();
        assert_eq!(
            centrality_table(&single),
            Err(Error::TooFewNodes { n: 1, min: 2 })
        );
    }

    #[test]
    fn fvec_by_hand() {
        // counts (1, 2, 3): F^1 = 1 + 4 + 9 = 14,
        // F^2 = -(C(2,2)*2 + C(3,2)*3) = -11, F^3 = C(3,3)*3 = 3.
        let p = DistanceProfile::new(0, vec![1, 2, 3]);
        assert_eq!(higher_order_farness(&p), ints(&[14, -11, 3]));
    }

    #[test]
    fn fvec_handles_long_paths() {
        // Endpoint of a path on 200 nodes: one node at every distance, so
        // |F^k| = sum_{l=k}^{199} C(l, k) = C(200, k + 1).
        let p = DistanceProfile::new(0, vec![1; 199]);
        let f = higher_order_farness(&p);
        let mut c = BigInt::from(1u32);
        for k in 0..=100u32 {
            if k > 0 {
                c = c * (201 - k) / k;
            }
        }
        // c == C(200, 100) == |F^99|
        assert_eq!(f[98], c);
        assert!(f[98].bits() > 128);
    }

    #[test]
    fn decay_examples() {
        let t = centrality_table(&p3()).unwrap();
        assert_eq!(t.node(1).decay(0.5).unwrap(), 1.0);
        assert_eq!(t.node(0).decay(0.5).unwrap(), 0.75);
        let s = centrality_table(&star4()).unwrap();
        assert!((s.node(0).decay(0.3).unwrap() - 0.9).abs() < 1e-15);
        assert!((s.node(1).decay(0.3).unwrap() - 0.48).abs() < 1e-15);
    }

    #[test]
    fn decay_rejects_delta_outside_open_interval() {
        let p = DistanceProfile::new(0, vec![2, 0]);
        for bad in [0.0, 1.0, -0.1, 1.5, f64::NAN] {
            assert!(matches!(
                decay_centrality(&p, bad),
                Err(Error::InvalidDelta(_))
            ));
        }
    }

    #[test]
    fn decay_limits_and_monotonicity() {
        let p = DistanceProfile::new(0, vec![1, 2, 3, 0]);
        let low = decay_centrality(&p, 1e-9).unwrap();
        let high = decay_centrality(&p, 1.0 - 1e-9).unwrap();
        assert!(low < 1e-8);
        assert!((high - 6.0).abs() < 1e-7);
        let grid = DeltaGrid::uniform(99).unwrap();
        let curve = decay_curve(&p, &grid);
        assert!(curve.windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn curve_matches_pointwise() {
        let p = DistanceProfile::new(1, vec![2, 0]);
        let grid = DeltaGrid::new(vec![0.25, 0.5, 0.75]).unwrap();
        assert_eq!(decay_curve(&p, &grid), [0.5, 1.0, 1.5]);
        let single = DeltaGrid::new(vec![0.3]).unwrap();
        assert_eq!(
            decay_curve(&p, &single),
            [decay_centrality(&p, 0.3).unwrap()]
        );
    }

    #[test]
    fn difference_coefficients() {
        let t = centrality_table(&p3()).unwrap();
        let d = dc_difference_coeffs(&t.node(1).profile, &t.node(0).profile).unwrap();
        assert_eq!(d.a, [1, -1]);
        assert_eq!(d.b, ints(&[-1, 1]));
        let same = dc_difference_coeffs(&t.node(0).profile, &t.node(2).profile).unwrap();
        assert_eq!(same.a, [0, 0]);
        assert!(same.b.iter().all(Zero::is_zero));

        let short = DistanceProfile::new(0, vec![1]);
        assert!(matches!(
            dc_difference_coeffs(&short, &t.node(0).profile),
            Err(Error::LengthMismatch { .. })
        ));
    }

    #[test]
    fn factored_forms() {
        assert_eq!(dc_difference_factored(&[1, -1], 0.5).unwrap(), 0.25);
        assert_eq!(dc_difference_factored(&[0, 0, 0], 0.3).unwrap(), 0.0);
        assert!((dc_difference_factored_eps(&ints(&[-1, 1]), 0.5).unwrap() - 0.25).abs() < 1e-15);
        assert!(matches!(
            dc_difference_factored(&[1, 0], 0.5),
            Err(Error::NonZeroCoefficientSum(_))
        ));
        assert!(matches!(
            dc_difference_factored_eps(&ints(&[1, 0]), 0.5),
            Err(Error::NonZeroCoefficientSum(_))
        ));
    }

    #[test]
    fn exact_sign() {
        // delta - 2 delta^2 vanishes at 1/2.
        assert_eq!(difference_sign_exact(&[1, -2], 0.5), Ordering::Equal);
        assert_eq!(difference_sign_exact(&[1, -2], 0.25), Ordering::Greater);
        assert_eq!(difference_sign_exact(&[1, -2], 0.75), Ordering::Less);
        assert_eq!(difference_sign_exact(&[0, 0], 0.75), Ordering::Equal);
        // delta^6 - 2 delta^7 at 1e-6: far below f64 resolution of the sums.
        let mut a = vec![0i64; 8];
        a[5] = 1;
        a[6] = -2;
        assert_eq!(difference_sign_exact(&a, 1e-6), Ordering::Greater);
        a[5] = -1;
        a[7] = 5;
        assert_eq!(difference_sign_exact(&a, 1e-6), Ordering::Less);
    }

    #[test]
    fn dyadic_decomposition() {
        assert_eq!(dyadic(0.5), (1, 1));
        assert_eq!(dyadic(0.75), (3, 2));
        assert_eq!(dyadic(3.0), (3, 0));
        let (m, s) = dyadic(0.01);
        assert_eq!(m as f64 / 2f64.powi(s as i32), 0.01);
    }

    #[test]
    fn compare_decay_resolves_near_ties() {
        let ci = [0u32, 0, 0, 0, 0, 1, 0];
        let cj = [0u32, 0, 0, 0, 0, 0, 1];
        let d = 1e-6;
        let (x, y) = (horner(&ci, d), horner(&cj, d));
        assert_eq!(compare_decay(&ci, x, &cj, y, d), Ordering::Greater);
        assert_eq!(compare_decay(&cj, y, &ci, x, d), Ordering::Less);
        assert_eq!(compare_decay(&ci, x, &ci, x, d), Ordering::Equal);
    }
}
