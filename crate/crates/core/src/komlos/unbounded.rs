use serde::Serialize;

use super::engine::FlatProblem;
use super::{check_sequence, pow2, ExtractionConfig, Failure, TruncationLadder, WeightMatrix};
use crate::charge::{Charge, ProbabilityCharge};
use crate::error::Result;
use crate::set_algebra::EventSet;

/// A charge with values in `[0, ∞]`: finite atom values plus a set of atoms
/// carrying `+∞`.
#[derive(Debug, Clone, PartialEq)]
pub struct ExtendedCharge {
    finite: Charge,
    infinite: EventSet,
}

impl ExtendedCharge {
    /// Zeroes the finite part on the flagged atoms.
    pub fn new(finite: Charge, infinite: EventSet) -> Result<Self> {
        let finite = finite.restrict(&infinite.complement())?;
        Ok(Self { finite, infinite })
    }

    pub fn finite(&self) -> &Charge {
        &self.finite
    }

    pub fn infinite(&self) -> &EventSet {
        &self.infinite
    }

    /// `None` stands for `+∞`.
    pub fn value(&self, event: &EventSet) -> Result<Option<f64>> {
        if !event.is_disjoint_from(&self.infinite) {
            return Ok(None);
        }
        Ok(Some(self.finite.value(event)?))
    }
}

#[derive(Debug, Clone)]
pub struct UnboundedExtraction {
    pub xi: ExtendedCharge,
    pub weights: WeightMatrix,
    pub combinations: Vec<Charge>,
    /// `ξ_k = ξ ∧ 2^k l` with `ξ = ∞` on the flagged atoms.
    pub ladder: TruncationLadder,
    /// Top level actually resolved by the horizon.
    pub level_cap: u32,
    /// Per-atom averages `avg_n F_n(a) ∧ 2^k l(a)` over the window, per level.
    pub level_averages: Vec<Vec<f64>>,
    /// Per row `n` (1-based exponent), `|G_n ∧ 2^n l − ξ|(U)` on the event
    /// `U` where `ξ` is finite.
    pub residuals: Vec<f64>,
    pub failures: Vec<Failure>,
}

impl UnboundedExtraction {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

#[derive(Serialize)]
struct Summary<'a> {
    finite: &'a [f64],
    infinite: Vec<usize>,
    level_cap: u32,
    residuals: &'a [f64],
    weights: Vec<(usize, usize, f64)>,
    failures: &'a [Failure],
}

impl UnboundedExtraction {
    pub fn to_json(&self) -> serde_json::Value {
        serde_json::to_value(Summary {
            finite: self.xi.finite().atoms(),
            infinite: self.xi.infinite().atoms(),
            level_cap: self.level_cap,
            residuals: &self.residuals,
            weights: self.weights.triplets(),
            failures: &self.failures,
        })
        .expect("summary serializes")
    }
}

/// Extraction without a norm bound.
///
/// Levels are averaged over the window `[h/2, h)`; only levels with
/// `2^k ≤ h/2` are resolved. An atom with `l(a) > 0` is flagged `+∞` when
/// every level in the top quartile is saturated up to the factor
/// `1 − tau_inf`.
pub fn extract_unbounded(
    seq: &[Charge],
    l: &ProbabilityCharge,
    cfg: &ExtractionConfig,
    tau_inf: f64,
) -> Result<UnboundedExtraction> {
    cfg.validate()?;
    let alg = check_sequence(seq, l)?;
    if !(0.0..1.0).contains(&tau_inf) {
        return Err(crate::error::Error::Config(format!(
            "tau_inf must be in [0, 1), got {tau_inf}"
        )));
    }
    let h = cfg.horizon.min(seq.len());
    for f in &seq[..h] {
        f.require_nonnegative(cfg.tol.zero)?;
    }
    let flat: Vec<Vec<f64>> = seq[..h]
        .iter()
        .map(|f| f.atoms().iter().map(|v| v.max(0.0)).collect())
        .collect();
    let d = l.num_atoms();
    let unit = vec![1.0; d];
    let problem = FlatProblem {
        seq: &flat,
        reference: l.atoms(),
        weights: &unit,
    };

    let window = if h >= 2 { h / 2..h } else { 0..h };
    let half = (h / 2).max(1);
    let level_cap = cfg.levels.min(half.ilog2());
    let level_averages: Vec<Vec<f64>> = (0..=level_cap)
        .map(|k| {
            let mut avg = vec![0.0; d];
            for f in &flat[window.clone()] {
                for (s, v) in avg.iter_mut().zip(problem.truncated(f, k)) {
                    *s += v;
                }
            }
            avg.iter().map(|s| s / window.len() as f64).collect()
        })
        .collect();

    let quartile = (3 * level_cap).div_ceil(4)..=level_cap;
    let flags: Vec<bool> = (0..d)
        .map(|a| {
            let la = l.atoms()[a];
            la > cfg.tol.zero
                && quartile
                    .clone()
                    .all(|k| level_averages[k as usize][a] >= (1.0 - tau_inf) * pow2(k as i32) * la)
        })
        .collect();
    let infinite = EventSet::from_mask(&alg, flags.clone())?;
    let finite_atoms: Vec<f64> = level_averages[level_cap as usize]
        .iter()
        .zip(&flags)
        .map(|(v, &f)| if f { 0.0 } else { *v })
        .collect();
    let xi = ExtendedCharge::new(Charge::new(&alg, finite_atoms.clone())?, infinite)?;

    let ladder_levels: Vec<Vec<f64>> = (0..=level_cap)
        .map(|k| {
            let c = pow2(k as i32);
            (0..d)
                .map(|a| {
                    let cap = c * l.atoms()[a];
                    if flags[a] {
                        cap
                    } else {
                        finite_atoms[a].min(cap)
                    }
                })
                .collect()
        })
        .collect();

    let active: Vec<usize> = problem
        .active(cfg.tol.zero)
        .into_iter()
        .filter(|&a| !flags[a])
        .collect();
    let members: Vec<usize> = (0..h).collect();
    let blocks = problem.build_blocks(&members, &finite_atoms, &active, cfg);

    let residuals: Vec<f64> = blocks
        .iter()
        .enumerate()
        .map(|(n, b)| {
            let t = problem.truncated(&b.combo, n as u32 + 1);
            (0..d)
                .filter(|&a| !flags[a])
                .map(|a| (t[a] - finite_atoms[a]).abs())
                .sum()
        })
        .collect();

    let certified_from = blocks.len() / 2;
    let ladder = TruncationLadder {
        reference: l.charge().clone(),
        levels: ladder_levels
            .iter()
            .map(|v| Charge::new(&alg, v.clone()))
            .collect::<Result<Vec<_>>>()?,
        restr_residual: problem.restr_residual(&ladder_levels),
        weak_residuals: problem.weak_residuals(
            &ladder_levels,
            blocks[certified_from..].iter().map(|b| &b.combo),
        ),
    };
    let weights = WeightMatrix::new(h, blocks.iter().map(|b| b.weights.clone()).collect())?;
    let combinations = blocks
        .iter()
        .map(|b| Charge::new(&alg, b.combo.clone()))
        .collect::<Result<Vec<_>>>()?;

    let mut failures = Vec::new();
    if let Some(&last) = residuals.last() {
        if !(last <= cfg.tol.conv) {
            failures.push(Failure {
                check: "final_residual".into(),
                value: last,
                limit: cfg.tol.conv,
            });
        }
    }
    let wc = weights.check();
    if !wc.holds() {
        failures.push(Failure {
            check: "weights".into(),
            value: wc.max_row_sum_error,
            limit: 1e-12,
        });
    }
    if !(ladder.restr_residual <= cfg.tol.conv) {
        failures.push(Failure {
            check: "restriction_identity".into(),
            value: ladder.restr_residual,
            limit: cfg.tol.conv,
        });
    }

    Ok(UnboundedExtraction {
        xi,
        weights,
        combinations,
        ladder,
        level_cap,
        level_averages,
        residuals,
        failures,
    })
}
