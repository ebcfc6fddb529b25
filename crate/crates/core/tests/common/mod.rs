//! Brute-force oracles shared by the integration and acceptance tests.
//!
//! Everything here is computed from first principles (plain integers and
//! f64 loops) without calling the library's own norm or lattice code.

#![allow(dead_code)]

use std::sync::Arc;

use charge_komlos::generators::rng;
use charge_komlos::scalar::{ratio, Exact};
use charge_komlos::{Charge, SetAlgebra};
use rand::Rng;
use rand_chacha::ChaCha8Rng;

pub fn seeded(seed: u64) -> ChaCha8Rng {
    rng(seed)
}

/// Every set partition of `0..n` as a label vector (restricted growth
/// strings built recursively).
pub fn set_partitions(n: usize) -> Vec<Vec<usize>> {
    fn go(i: usize, n: usize, cur: &mut Vec<usize>, top: usize, out: &mut Vec<Vec<usize>>) {
        if i == n {
            out.push(cur.clone());
            return;
        }
        for lab in 0..=top {
            cur.push(lab);
            go(i + 1, n, cur, top.max(lab + 1), out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    if n == 0 {
        out.push(Vec::new());
    } else {
        go(0, n, &mut Vec::new(), 0, &mut out);
    }
    out
}

/// `sup_π Σ_{E∈π} |Σ_{a∈E} v_a|` over integer atom values.
pub fn partition_sup_int(v: &[i64]) -> i64 {
    set_partitions(v.len())
        .iter()
        .map(|labels| {
            let blocks = labels.iter().copied().max().map_or(0, |m| m + 1);
            let mut sums = vec![0i64; blocks];
            for (x, &b) in v.iter().zip(labels) {
                sums[b] += x;
            }
            sums.iter().map(|s| s.abs()).sum::<i64>()
        })
        .max()
        .unwrap_or(0)
}

pub fn partition_sup_f64(v: &[f64]) -> f64 {
    set_partitions(v.len())
        .iter()
        .map(|labels| {
            let blocks = labels.iter().copied().max().map_or(0, |m| m + 1);
            let mut sums = vec![0.0f64; blocks];
            for (x, &b) in v.iter().zip(labels) {
                sums[b] += x;
            }
            sums.iter().map(|s| s.abs()).sum::<f64>()
        })
        .fold(0.0, f64::max)
}

/// A random algebra with `atoms` atoms on a ground set of up to twice as
/// many points, with points shuffled between atoms.
pub fn random_algebra(r: &mut ChaCha8Rng, atoms: usize) -> Arc<SetAlgebra> {
    let ground = atoms + r.random_range(0..=atoms);
    let mut labels: Vec<usize> = (0..atoms).collect();
    labels.extend((atoms..ground).map(|_| r.random_range(0..atoms)));
    for i in (1..labels.len()).rev() {
        let j = r.random_range(0..=i);
        labels.swap(i, j);
    }
    let mut blocks = vec![Vec::new(); atoms];
    for (p, &a) in labels.iter().enumerate() {
        blocks[a].push(p);
    }
    SetAlgebra::new(ground, blocks).expect("valid random algebra")
}

/// Integers in `lo..=hi`, with roughly a quarter forced to zero.
pub fn random_ints(r: &mut ChaCha8Rng, n: usize, lo: i64, hi: i64) -> Vec<i64> {
    (0..n)
        .map(|_| {
            if r.random_bool(0.25) {
                0
            } else {
                r.random_range(lo..=hi)
            }
        })
        .collect()
}

pub fn exact_charge(alg: &Arc<SetAlgebra>, nums: &[i64], den: i64) -> Charge<Exact> {
    Charge::new(alg, nums.iter().map(|&n| ratio(n, den)).collect()).expect("length matches")
}

pub fn l1_dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).sum()
}

pub fn combine(row: &[(usize, f64)], seq: &[Charge]) -> Vec<f64> {
    let d = seq[0].num_atoms();
    let mut g = vec![0.0; d];
    for &(i, w) in row {
        for (x, v) in g.iter_mut().zip(seq[i].atoms()) {
            *x += w * v;
        }
    }
    g
}

/// Row-stochastic, strictly positive, increasing within rows, and each
/// row lies strictly after the previous one (hence disjoint supports).
pub fn weights_ok(rows: &[Vec<(usize, f64)>], row_tol: f64) -> Result<(), String> {
    let mut last_max: Option<usize> = None;
    for (n, row) in rows.iter().enumerate() {
        if row.is_empty() {
            return Err(format!("row {n} is empty"));
        }
        if row.iter().any(|&(_, w)| !(w > 0.0)) {
            return Err(format!("row {n} has a non-positive weight"));
        }
        if row.windows(2).any(|p| p[0].0 >= p[1].0) {
            return Err(format!("row {n} indices are not increasing"));
        }
        let s: f64 = row.iter().map(|&(_, w)| w).sum();
        if (s - 1.0).abs() > row_tol {
            return Err(format!("row {n} sums to {s}"));
        }
        if let Some(m) = last_max {
            if row[0].0 <= m {
                return Err(format!("row {n} starts at {} but row {} reached {m}", row[0].0, n - 1));
            }
        }
        last_max = Some(row[row.len() - 1].0);
    }
    Ok(())
}
