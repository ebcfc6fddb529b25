use super::engine::{FlatProblem, FlatRun};
use super::{
    check_sequence, pow2, CertificateRow, Diagnostics, ExtractionConfig, ExtractionResult,
    Failure, LowerBound, TruncationLadder, WeightMatrix,
};
use crate::charge::{Charge, ProbabilityCharge};
use crate::error::Result;
use crate::set_algebra::{same_algebra, EventSet};

/// `f ∧ 2^k l`.
pub fn truncate(f: &Charge, l: &ProbabilityCharge, k: u32) -> Result<Charge> {
    same_algebra(f.algebra(), l.algebra())?;
    f.require_nonnegative(0.0)?;
    let c = pow2(k as i32);
    let atoms = f
        .atoms()
        .iter()
        .zip(l.atoms())
        .map(|(x, y)| x.min(c * y))
        .collect();
    Charge::new(f.algebra(), atoms)
}

/// Extraction for a sequence of non-negative charges.
///
/// Runs on the first `cfg.horizon` inputs. The result always carries its
/// certificates; check [`ExtractionResult::passed`].
pub fn extract_positive(
    seq: &[Charge],
    l: &ProbabilityCharge,
    cfg: &ExtractionConfig,
) -> Result<ExtractionResult> {
    cfg.validate()?;
    check_sequence(seq, l)?;
    let h = cfg.horizon.min(seq.len());
    for f in &seq[..h] {
        f.require_nonnegative(cfg.tol.zero)?;
    }
    let flat: Vec<Vec<f64>> = seq[..h]
        .iter()
        .map(|f| f.atoms().iter().map(|v| v.max(0.0)).collect())
        .collect();
    let weights = vec![1.0; l.num_atoms()];
    let problem = FlatProblem {
        seq: &flat,
        reference: l.atoms(),
        weights: &weights,
    };
    let run = problem.run(cfg);
    assemble(&problem, &run, l, cfg)
}

/// `{a : g(a) ≤ 2^e l(a)}`; ties go inside.
pub(crate) fn below_threshold(g: &Charge, l: &Charge, e: i32) -> EventSet {
    let c = pow2(e);
    let mask = g
        .atoms()
        .iter()
        .zip(l.atoms())
        .map(|(x, y)| *x <= c * y)
        .collect();
    EventSet::from_mask(g.algebra(), mask).expect("mask length matches")
}

/// Suffix sums `Σ_{j ≥ n} v_j`.
pub(crate) fn suffix_sums(v: &[f64]) -> Vec<f64> {
    let mut out = vec![0.0; v.len()];
    let mut acc = 0.0;
    for i in (0..v.len()).rev() {
        acc += v[i];
        out[i] = acc;
    }
    out
}

fn assemble(
    problem: &FlatProblem<'_>,
    run: &FlatRun,
    l: &ProbabilityCharge,
    cfg: &ExtractionConfig,
) -> Result<ExtractionResult> {
    let alg = l.algebra();
    let tol = cfg.tol;
    let weights = WeightMatrix::new(
        run.horizon,
        run.blocks.iter().map(|b| b.weights.clone()).collect(),
    )?;
    let combinations = run
        .blocks
        .iter()
        .map(|b| Charge::new(alg, b.combo.clone()))
        .collect::<Result<Vec<_>>>()?;
    let xi = Charge::new(alg, run.xi.clone())?;
    let l = l.charge();

    let mut sets = Vec::with_capacity(combinations.len());
    let mut rows = Vec::with_capacity(combinations.len());
    for (n, (g, block)) in combinations.iter().zip(&run.blocks).enumerate() {
        let e = n as i32 + 1;
        let a_n = below_threshold(g, l, e);
        let c = pow2(e);
        let restricted = g.restrict(&a_n)?;
        let lambda_anc = l.value(&a_n.complement())?;
        let cover = g.value(&a_n)? + c * lambda_anc;
        let meet = problem.norm(&problem.truncated(g.atoms(), e as u32));
        rows.push(CertificateRow {
            n: n + 1,
            norm_residual: (&restricted - &xi).variation_norm(),
            lambda_anc,
            partial_sum: 0.0,
            bound: (1.0 + run.sup_norm) / c,
            min_cover_gap: cover - meet,
            projection_residual: block.residual,
        });
        sets.push(a_n);
    }
    let partial = suffix_sums(&rows.iter().map(|r| r.lambda_anc).collect::<Vec<_>>());
    for (r, p) in rows.iter_mut().zip(partial) {
        r.partial_sum = p;
    }

    let certified_from = rows.len() / 2;
    let levels = run
        .levels
        .iter()
        .map(|v| Charge::new(alg, v.clone()))
        .collect::<Result<Vec<_>>>()?;
    let ladder = TruncationLadder {
        reference: l.clone(),
        levels,
        restr_residual: run.restr_residual,
        weak_residuals: problem.weak_residuals(
            &run.levels,
            run.blocks[certified_from..].iter().map(|b| &b.combo),
        ),
    };

    let k_top = cfg.levels as usize;
    let xi_norm = xi.variation_norm();
    let target = run.limsup[k_top] - cfg.delta;
    let lower_bound = LowerBound {
        window_start: run.window.0,
        window_end: run.window.1,
        limsup: run.limsup.clone(),
        target,
        xi_norm,
        slack: xi_norm - target,
    };

    let weight_check = weights.check();
    let diagnostics = Diagnostics {
        horizon_used: run.horizon,
        selected: run.selected.len(),
        certified_from,
        stall_gap: run.stall_gap,
        sup_norm: run.sup_norm,
        degenerate: run.degenerate,
        weight_check,
    };

    let mut failures = Vec::new();
    let mut fail = |check: &str, value: f64, limit: f64| {
        failures.push(Failure {
            check: check.into(),
            value,
            limit,
        })
    };
    if let Some(last) = rows.last() {
        if !(last.norm_residual <= tol.conv) {
            fail("final_residual", last.norm_residual, tol.conv);
        }
    }
    if !(run.stall_gap < tol.conv) {
        fail("stall", run.stall_gap, tol.conv);
    }
    if let Some(r) = rows.iter().find(|r| !(r.partial_sum <= r.bound + tol.conv)) {
        fail(&format!("summability[{}]", r.n), r.partial_sum, r.bound + tol.conv);
    }
    if !(run.restr_residual <= tol.conv) {
        fail("restriction_identity", run.restr_residual, tol.conv);
    }
    if let Some(r) = rows
        .iter()
        .find(|r| r.min_cover_gap.abs() > 1e-9 * (1.0 + run.sup_norm))
    {
        fail(&format!("min_cover[{}]", r.n), r.min_cover_gap, 0.0);
    }
    if !weight_check.holds() {
        fail("weights", weight_check.max_row_sum_error, 1e-12);
    }
    // Without the norm subsequence the Cesàro limit need not reach the
    // window limsup, so the bound is only enforced when selection is on.
    if cfg.norm_subsequence && lower_bound.slack < -tol.conv {
        fail("lower_bound", lower_bound.slack, -tol.conv);
    }

    Ok(ExtractionResult {
        xi,
        weights,
        combinations,
        restriction_sets: sets,
        certificates: rows,
        lower_bound,
        ladders: vec![ladder],
        diagnostics,
        failures,
        stages: None,
    })
}
