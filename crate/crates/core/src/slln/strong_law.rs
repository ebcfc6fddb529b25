use serde::Serialize;

use super::{check_l0_bounded, default_grid, MeasurableFunction};
use crate::charge::{Charge, ProbabilityCharge, Tolerances};
use crate::error::{Error, Result};
use crate::komlos::{extract_signed, num, pow2, ExtractionConfig, Failure, WeightMatrix};
use crate::set_algebra::same_algebra;

#[derive(Debug, Clone, PartialEq)]
pub struct SllnConfig {
    pub horizon: usize,
    /// Block indices `n_1 < n_2 < ...`; `None` uses `n_r = 2^r` up to a
    /// quarter of the number of averaged terms.
    pub schedule: Option<Vec<usize>>,
    /// Replace `λ` by `μ(a) ∝ λ(a) / (1 + sup_n |f_n(a)|)`.
    pub reweight: bool,
    /// Block size of the extraction that produces `g_n` from `f_n`. With 1,
    /// every block is a single input and `g_n = f_n`.
    pub block_size: usize,
    pub hull_samples: usize,
    pub seed: u64,
    pub tol: Tolerances,
}

impl Default for SllnConfig {
    fn default() -> Self {
        Self {
            horizon: 512,
            schedule: None,
            reweight: true,
            block_size: 1,
            hull_samples: 64,
            seed: 0,
            tol: Tolerances::default(),
        }
    }
}

/// One recorded Cauchy gap: `sup_{p,q} ‖S_{k+p} − S_{k+q}‖` is attained at
/// `(p, q)` and compared with the bound for block `r`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TraceRow {
    pub k: usize,
    pub p: usize,
    pub q: usize,
    pub gap: f64,
    pub bound: f64,
    pub r: usize,
    pub n_r: usize,
}

/// `Σ_{n ≥ n_r} ∫ |g_{n+1} − g_n| dμ` against `2^{-r}`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AbsoluteSum {
    pub r: usize,
    pub n_r: usize,
    pub value: f64,
    pub limit: f64,
    pub holds: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CesaroTrace {
    /// `‖S_k‖_{L^1(μ)}` for `k = 1, ..., horizon`.
    pub partial_norms: Vec<f64>,
    pub rows: Vec<TraceRow>,
    pub schedule: Vec<usize>,
    /// Reported only; not part of the pass/fail verdict.
    pub absolute_sums: Vec<AbsoluteSum>,
    /// `sup_n ‖f_n‖_{L^1(μ)}`.
    pub sup_norm: f64,
    pub mu: Vec<f64>,
    /// `μ` comes from the reweighting heuristic rather than `λ` itself.
    pub reweighted: bool,
    pub failures: Vec<Failure>,
}

impl CesaroTrace {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }

    pub fn to_csv(&self) -> String {
        let mut s = String::from("k,p,q,gap,bound,r,n_r\n");
        for row in &self.rows {
            s.push_str(&format!(
                "{},{},{},{},{},{},{}\n",
                row.k,
                row.p,
                row.q,
                num(row.gap),
                num(row.bound),
                row.r,
                row.n_r
            ));
        }
        s
    }
}

fn reweight(l: &Charge, f_atoms: &[Vec<f64>]) -> Result<ProbabilityCharge> {
    let atoms: Vec<f64> = l
        .atoms()
        .iter()
        .enumerate()
        .map(|(a, &m)| {
            let sup = f_atoms.iter().map(|f| f[a].abs()).fold(0.0, f64::max);
            m / (1.0 + sup)
        })
        .collect();
    ProbabilityCharge::normalized(Charge::new(l.algebra(), atoms)?)
}

fn l1(mu: &[f64], a: &[f64], b: &[f64]) -> f64 {
    mu.iter()
        .zip(a.iter().zip(b))
        .map(|(m, (x, y))| m * (x - y).abs())
        .sum()
}

fn schedule_for(cfg: &SllnConfig, len: usize) -> Result<Vec<usize>> {
    let sched = match &cfg.schedule {
        Some(s) => s.clone(),
        None => (1..usize::BITS as usize)
            .map(|r| 1usize << r)
            .take_while(|&n| n <= len / 4)
            .collect(),
    };
    if sched.is_empty() {
        return Err(Error::Schedule {
            r: 1,
            reason: format!("no block index fits horizon {len}"),
        });
    }
    for (i, &n) in sched.iter().enumerate() {
        let r = i + 1;
        if n == 0 {
            return Err(Error::Schedule {
                r,
                reason: "block index must be positive".into(),
            });
        }
        if i > 0 && n <= sched[i - 1] {
            return Err(Error::Schedule {
                r,
                reason: format!("n_r = {n} does not exceed n_{} = {}", r - 1, sched[i - 1]),
            });
        }
        if n >= len {
            return Err(Error::Schedule {
                r,
                reason: format!("n_r = {n} is not below the number of averaged terms {len}"),
            });
        }
    }
    Ok(sched)
}

/// Checks the Cauchy bound for the Cesàro means `S_k = (g_1 + ... + g_k)/k`
/// in `L^1(μ)`, where `g_n` are combinations of `f_n` given by the signed
/// extraction of the charges `λ_{f_n}`.
///
/// For every `k` in the grid (powers of two and `n_r + 1`) and every block
/// `r` with `n_r < k`, the row records
/// `sup_{p,q ≤ H−k} ‖S_{k+p} − S_{k+q}‖` and the bound
/// `4 (n_r / k) sup_n ‖f_n‖ + 2^{-(r-1)}`.
pub fn run_slln(
    seq: &[MeasurableFunction],
    l: &ProbabilityCharge,
    cfg: &SllnConfig,
) -> Result<(CesaroTrace, ProbabilityCharge)> {
    if seq.is_empty() {
        return Err(Error::EmptySequence);
    }
    if cfg.horizon == 0 || cfg.block_size == 0 {
        return Err(Error::Config("horizon and block_size must be positive".into()));
    }
    let h = cfg.horizon.min(seq.len());
    let seq = &seq[..h];
    let f_atoms = seq
        .iter()
        .enumerate()
        .map(|(n, f)| {
            same_algebra(f.algebra(), l.algebra())?;
            f.atom_values().ok_or_else(|| {
                Error::Config(format!("function {n} is not constant on the atoms"))
            })
        })
        .collect::<Result<Vec<_>>>()?;

    let grid = default_grid();
    let l0 = check_l0_bounded(seq, l, &grid, cfg.hull_samples, cfg.seed, &cfg.tol)?;
    if !l0.bounded {
        return Err(Error::NotBounded(format!(
            "sampled hull has outer measure {} above c = {}",
            l0.sup_by_c.last().copied().unwrap_or(f64::NAN),
            grid.last().copied().unwrap_or(f64::NAN)
        )));
    }

    let mu = if cfg.reweight {
        reweight(l, &f_atoms)?
    } else {
        l.clone()
    };
    let mu_atoms = mu.atoms().to_vec();

    let charges = seq
        .iter()
        .map(|f| f.integral_charge(l))
        .collect::<Result<Vec<_>>>()?;
    let ext = extract_signed(
        &charges,
        l,
        &ExtractionConfig {
            horizon: h,
            block_size: cfg.block_size,
            max_block: cfg.block_size,
            norm_subsequence: false,
            tol: cfg.tol,
            ..ExtractionConfig::default()
        },
    )?;
    let g = combine_pointwise(&ext.weights, &f_atoms);
    let len = g.len();
    let schedule = schedule_for(cfg, len)?;

    let d = mu_atoms.len();
    let mut partial = Vec::with_capacity(len);
    let mut running = vec![0.0; d];
    for (k, gn) in g.iter().enumerate() {
        for (s, v) in running.iter_mut().zip(gn) {
            *s += v;
        }
        partial.push(running.iter().map(|s| s / (k + 1) as f64).collect::<Vec<_>>());
    }
    let zero = vec![0.0; d];
    let partial_norms: Vec<f64> = partial.iter().map(|s| l1(&mu_atoms, s, &zero)).collect();

    // best[i] = (gap, i', j') maximising ‖S_{i'} − S_{j'}‖ over i ≤ i' < j'.
    let mut best = vec![(0.0f64, 0usize, 0usize); len + 1];
    for i in (0..len).rev() {
        let mut row = (0.0, i, i);
        for j in i + 1..len {
            let v = l1(&mu_atoms, &partial[i], &partial[j]);
            if v > row.0 {
                row = (v, i, j);
            }
        }
        best[i] = if best[i + 1].0 > row.0 { best[i + 1] } else { row };
    }

    let sup_norm = f_atoms
        .iter()
        .map(|f| l1(&mu_atoms, f, &zero))
        .fold(0.0, f64::max);
    let mut ks: Vec<usize> = (0..usize::BITS)
        .map(|e| 1usize << e)
        .take_while(|&k| k <= len)
        .chain(schedule.iter().map(|n| n + 1).filter(|&k| k <= len))
        .collect();
    ks.sort_unstable();
    ks.dedup();

    let mut rows = Vec::new();
    let mut failures = Vec::new();
    for &k in &ks {
        let (gap, i, j) = best[k - 1];
        for (ri, &n_r) in schedule.iter().enumerate() {
            if n_r >= k {
                continue;
            }
            let r = ri + 1;
            let bound = 4.0 * (n_r as f64 / k as f64) * sup_norm + pow2(-(r as i32 - 1));
            if gap > bound + cfg.tol.conv {
                failures.push(Failure {
                    check: format!("cauchy_gap[k={k},r={r}]"),
                    value: gap,
                    limit: bound,
                });
            }
            rows.push(TraceRow {
                k,
                p: i + 1 - k,
                q: j + 1 - k,
                gap,
                bound,
                r,
                n_r,
            });
        }
    }

    let steps: Vec<f64> = g.windows(2).map(|w| l1(&mu_atoms, &w[1], &w[0])).collect();
    let absolute_sums = schedule
        .iter()
        .enumerate()
        .map(|(ri, &n_r)| {
            // 1-based n from n_r to len − 1 covers the steps g_{n+1} − g_n.
            let value: f64 = steps[n_r - 1..].iter().sum();
            let limit = pow2(-(ri as i32 + 1));
            AbsoluteSum {
                r: ri + 1,
                n_r,
                value,
                limit,
                holds: value <= limit + cfg.tol.conv,
            }
        })
        .collect();

    let trace = CesaroTrace {
        partial_norms,
        rows,
        schedule,
        absolute_sums,
        sup_norm,
        mu: mu_atoms,
        reweighted: cfg.reweight,
        failures,
    };
    Ok((trace, mu))
}

fn combine_pointwise(w: &WeightMatrix, f: &[Vec<f64>]) -> Vec<Vec<f64>> {
    let d = f.first().map_or(0, Vec::len);
    w.rows()
        .iter()
        .map(|row| {
            let mut g = vec![0.0; d];
            for &(i, a) in row {
                for (x, v) in g.iter_mut().zip(&f[i]) {
                    *x += a * v;
                }
            }
            g
        })
        .collect()
}
