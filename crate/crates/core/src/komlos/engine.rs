//! Extraction over flat non-negative vectors.
//!
//! A coordinate carries a reference mass `l_c` and a norm weight `w_c`; the
//! norm is `Σ_c w_c |v_c|`. Scalar charges use one coordinate per atom with
//! unit weight, vector charges one coordinate per (atom, sample) pair
//! weighted by the sample probability.

use super::hull::min_norm_weights;
use super::{pow2, ExtractionConfig};

pub(crate) struct FlatProblem<'a> {
    pub seq: &'a [Vec<f64>],
    pub reference: &'a [f64],
    pub weights: &'a [f64],
}

/// A convex block: candidate members and the chosen weights.
#[derive(Debug, Clone)]
pub(crate) struct Block {
    pub members: Vec<usize>,
    pub weights: Vec<(usize, f64)>,
    pub combo: Vec<f64>,
    pub residual: f64,
}

#[derive(Debug, Clone)]
pub(crate) struct FlatRun {
    pub horizon: usize,
    pub window: (usize, usize),
    /// Window limsup of the truncated norms, per level.
    pub limsup: Vec<f64>,
    pub selected: Vec<usize>,
    pub xi: Vec<f64>,
    pub levels: Vec<Vec<f64>>,
    pub blocks: Vec<Block>,
    pub sup_norm: f64,
    pub degenerate: bool,
    pub stall_gap: f64,
    pub restr_residual: f64,
}

impl FlatProblem<'_> {
    pub fn dim(&self) -> usize {
        self.reference.len()
    }

    pub fn norm(&self, v: &[f64]) -> f64 {
        v.iter().zip(self.weights).map(|(x, w)| w * x.abs()).sum()
    }

    pub fn dist(&self, a: &[f64], b: &[f64]) -> f64 {
        a.iter()
            .zip(b)
            .zip(self.weights)
            .map(|((x, y), w)| w * (x - y).abs())
            .sum()
    }

    /// `v ∧ 2^k l`.
    pub fn truncated(&self, v: &[f64], k: u32) -> Vec<f64> {
        let c = pow2(k as i32);
        v.iter()
            .zip(self.reference)
            .map(|(x, l)| x.min(c * l))
            .collect()
    }

    fn truncated_norm(&self, v: &[f64], k: u32) -> f64 {
        let c = pow2(k as i32);
        v.iter()
            .zip(self.reference)
            .zip(self.weights)
            .map(|((x, l), w)| w * x.min(c * l))
            .sum()
    }

    /// Coordinates where `l` is non-null and the norm sees the value.
    pub fn active(&self, zero: f64) -> Vec<usize> {
        (0..self.dim())
            .filter(|&c| self.reference[c] > zero && self.weights[c] > 0.0)
            .collect()
    }

    /// Window limsups, norm subsequence, Cesàro limit, ladder and blocks.
    pub fn run(&self, cfg: &ExtractionConfig) -> FlatRun {
        let h = cfg.horizon.min(self.seq.len());
        let seq = &self.seq[..h];
        let window = if h >= 2 { (h / 2, h) } else { (0, h) };
        let k_top = cfg.levels;
        let limsup: Vec<f64> = (0..=k_top)
            .map(|k| {
                seq[window.0..window.1]
                    .iter()
                    .map(|f| self.truncated_norm(f, k))
                    .fold(0.0, f64::max)
            })
            .collect();
        let top: Vec<f64> = seq.iter().map(|f| self.truncated_norm(f, k_top)).collect();
        let target = limsup[k_top as usize] - cfg.delta;
        let selected: Vec<usize> = if cfg.norm_subsequence {
            (0..h).filter(|&n| top[n] >= target).collect()
        } else {
            (0..h).collect()
        };

        let tail = &selected[selected.len() / 2..];
        let mut xi = vec![0.0; self.dim()];
        for &n in tail {
            for (x, v) in xi.iter_mut().zip(self.truncated(&seq[n], k_top)) {
                *x += v;
            }
        }
        for x in &mut xi {
            *x /= tail.len() as f64;
        }

        let levels: Vec<Vec<f64>> = (0..=k_top).map(|k| self.truncated(&xi, k)).collect();
        let stall_gap = self.dist(&levels[k_top as usize], &levels[k_top as usize - 1]);
        let restr_residual = self.restr_residual(&levels);

        let sup_norm = seq.iter().map(|f| self.norm(f)).fold(0.0, f64::max);
        let degenerate = sup_norm > cfg.tol.zero && top.iter().all(|&t| t <= cfg.tol.zero);

        let active = self.active(cfg.tol.zero);
        let blocks = self.build_blocks(&selected, &xi, &active, cfg);
        FlatRun {
            horizon: h,
            window,
            limsup,
            selected,
            xi,
            levels,
            blocks,
            sup_norm,
            degenerate,
            stall_gap,
            restr_residual,
        }
    }

    /// `max_{k ≤ n ≤ K} ‖ξ_n ∧ 2^k l − ξ_k‖`.
    pub fn restr_residual(&self, levels: &[Vec<f64>]) -> f64 {
        let mut worst = 0.0f64;
        for k in 0..levels.len() {
            for xi_n in &levels[k..] {
                let t = self.truncated(xi_n, k as u32);
                worst = worst.max(self.dist(&t, &levels[k]));
            }
        }
        worst
    }

    /// Per level, `max ‖G ∧ 2^k l − ξ_k‖` over the given combinations.
    pub fn weak_residuals<'b>(
        &self,
        levels: &[Vec<f64>],
        combos: impl Iterator<Item = &'b Vec<f64>> + Clone,
    ) -> Vec<f64> {
        levels
            .iter()
            .enumerate()
            .map(|(k, xi_k)| {
                combos
                    .clone()
                    .map(|g| self.dist(&self.truncated(g, k as u32), xi_k))
                    .fold(0.0, f64::max)
            })
            .collect()
    }

    fn residual_on(&self, g: &[f64], target: &[f64], active: &[usize]) -> f64 {
        active
            .iter()
            .map(|&c| self.weights[c] * (g[c] - target[c]).abs())
            .sum()
    }

    fn combine(&self, members: &[usize], weights: &[f64]) -> Vec<f64> {
        let mut g = vec![0.0; self.dim()];
        for (&i, &w) in members.iter().zip(weights) {
            if w > 0.0 {
                for (x, v) in g.iter_mut().zip(&self.seq[i]) {
                    *x += w * v;
                }
            }
        }
        g
    }

    /// The convex combination of `members` closest to `target` on `active`:
    /// the uniform average when it already hits, otherwise the Euclidean
    /// projection onto the hull (whichever has the smaller residual).
    pub fn best_combination(
        &self,
        members: &[usize],
        target: &[f64],
        active: &[usize],
        accept: f64,
    ) -> Block {
        let m = members.len();
        let uniform = vec![1.0 / m as f64; m];
        let g_u = self.combine(members, &uniform);
        let r_u = self.residual_on(&g_u, target, active);
        let (mut w, mut g, mut r) = (uniform, g_u, r_u);
        if r_u > accept && m > 1 {
            let points: Vec<Vec<f64>> = members
                .iter()
                .map(|&i| {
                    active
                        .iter()
                        .map(|&c| self.weights[c].sqrt() * (self.seq[i][c] - target[c]))
                        .collect()
                })
                .collect();
            let w_p = min_norm_weights(&points);
            let g_p = self.combine(members, &w_p);
            let r_p = self.residual_on(&g_p, target, active);
            if r_p < r_u {
                (w, g, r) = (w_p, g_p, r_p);
            }
        }
        let total: f64 = w.iter().filter(|&&x| x > 0.0).sum();
        let weights: Vec<(usize, f64)> = members
            .iter()
            .zip(&w)
            .filter(|(_, &x)| x > 0.0)
            .map(|(&i, &x)| (i, x / total))
            .collect();
        if total != 1.0 {
            let (idx, ws): (Vec<usize>, Vec<f64>) = weights.iter().copied().unzip();
            g = self.combine(&idx, &ws);
            r = self.residual_on(&g, target, active);
        }
        Block {
            members: members.to_vec(),
            weights,
            combo: g,
            residual: r,
        }
    }

    /// Greedy disjoint blocks over `members` (in order). A block grows by
    /// `block_size` until its hull reaches the target or it hits
    /// `max_block`; a short trailing remainder is merged into the previous
    /// block when that helps, and dropped otherwise.
    pub fn build_blocks(
        &self,
        members: &[usize],
        target: &[f64],
        active: &[usize],
        cfg: &ExtractionConfig,
    ) -> Vec<Block> {
        let accept = 0.1 * cfg.tol.conv;
        let len = members.len();
        let mut blocks: Vec<Block> = Vec::new();
        let mut pos = 0;
        while pos < len {
            let mut end = (pos + cfg.block_size).min(len);
            loop {
                let b = self.best_combination(&members[pos..end], target, active, accept);
                if b.residual <= accept || end - pos >= cfg.max_block {
                    blocks.push(b);
                    break;
                }
                if end == len {
                    match blocks.last_mut() {
                        Some(last) => {
                            let mut merged = last.members.clone();
                            merged.extend_from_slice(&members[pos..end]);
                            let mb = self.best_combination(&merged, target, active, accept);
                            if mb.residual <= last.residual {
                                *last = mb;
                            }
                        }
                        None => blocks.push(b),
                    }
                    break;
                }
                end = (end + cfg.block_size).min(len).min(pos + cfg.max_block);
            }
            pos = end;
        }
        blocks
    }
}
