#![allow(dead_code)]

use decay_core::Graph;
use proptest::prelude::*;

/// Connected graphs on `min_n..=max_n` nodes: a random spanning tree plus
/// random extra edges.
pub fn connected_graph(min_n: usize, max_n: usize) -> impl Strategy<Value = Graph> {
    (min_n..=max_n).prop_flat_map(|n| {
        let parents: Vec<_> = (1..n).map(|v| 0..v).collect();
        let extra = proptest::collection::vec((0..n, 0..n), 0..=n * 2);
        (Just(n), parents, extra).prop_map(|(n, parents, extra)| {
            let mut edges: Vec<(usize, usize)> =
                parents.iter().enumerate().map(|(i, &p)| (i + 1, p)).collect();
            edges.extend(extra.into_iter().filter(|(u, v)| u != v));
            Graph::new(n, &edges).unwrap()
        })
    })
}

/// All-pairs distances by Floyd–Warshall; `None` means unreachable.
pub fn floyd_warshall(g: &Graph) -> Vec<Vec<Option<u32>>> {
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

/// `Σ_{j≠i} δ^{d(i,j)}` summed pair by pair.
pub fn naive_decay(dist: &[Vec<Option<u32>>], i: usize, delta: f64) -> f64 {
    dist[i]
        .iter()
        .enumerate()
        .filter(|&(j, _)| j != i)
        .map(|(_, d)| delta.powi(d.unwrap() as i32))
        .sum()
}

/// `(DC_i - DC_j)(k/1000) · 1000^{n-1}` in exact integers.
pub fn scaled_difference(a: &[i64], k: i128) -> i128 {
    scaled_difference_over(a, k, 1000)
}

/// `(DC_i - DC_j)(k/denom) · denom^{n-1}` in exact integers.
pub fn scaled_difference_over(a: &[i64], k: i128, denom: i128) -> i128 {
    let top = a.len() as u32;
    a.iter()
        .enumerate()
        .map(|(idx, &c)| {
            let l = idx as u32 + 1;
            c as i128 * k.pow(l) * denom.pow(top - l)
        })
        .sum()
}
