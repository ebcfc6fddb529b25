use super::positive::{extract_positive, suffix_sums};
use super::{
    check_sequence, pow2, CertificateRow, Diagnostics, ExtractionConfig, ExtractionResult,
    Failure, SignedStages,
};
use crate::charge::{Charge, ProbabilityCharge};
use crate::error::Result;

/// Extraction for signed sequences, composed from two positive stages.
///
/// Stage one runs on the positive parts `F_n^+` (weights `α`, sets `B_n`,
/// limit `χ`). Stage two runs on `F̄_n = Σ_i α_{n,i} F_i^-` (weights `β`,
/// sets `C_j`, limit `ζ`). The output has weights `γ = βα`, sets
/// `A_j = C_j ∩ ⋂_{β_{j,n} > 0} B_n` and limit `ξ = χ − ζ`.
///
/// Both stages average without the norm subsequence, so that a block of an
/// alternating sequence keeps both signs.
pub fn extract_signed(
    seq: &[Charge],
    l: &ProbabilityCharge,
    cfg: &ExtractionConfig,
) -> Result<ExtractionResult> {
    cfg.validate()?;
    check_sequence(seq, l)?;
    let h = cfg.horizon.min(seq.len());
    let seq = &seq[..h];
    let stage_cfg = ExtractionConfig {
        norm_subsequence: false,
        ..*cfg
    };

    let pos: Vec<Charge> = seq.iter().map(Charge::pos_part).collect();
    let neg: Vec<Charge> = seq.iter().map(Charge::neg_part).collect();
    let first = extract_positive(&pos, l, &stage_cfg)?;
    let alpha = &first.weights;
    let fbar = alpha.combine(&neg)?;
    let second = extract_positive(
        &fbar,
        l,
        &ExtractionConfig {
            horizon: fbar.len(),
            ..stage_cfg
        },
    )?;
    let beta = &second.weights;
    let gamma = beta.compose(alpha)?;
    let xi = &first.xi - &second.xi;
    let combinations = gamma.combine(seq)?;

    let mut sets = Vec::with_capacity(gamma.num_rows());
    for (j, row) in beta.rows().iter().enumerate() {
        let mut a = second.restriction_sets[j].clone();
        for &(n, _) in row {
            a = a.intersect(&first.restriction_sets[n])?;
        }
        sets.push(a);
    }

    let sup_pos = first.diagnostics.sup_norm;
    let sup_bar = second.diagnostics.sup_norm;
    let mut rows = Vec::with_capacity(sets.len());
    for (j, (g, a)) in combinations.iter().zip(&sets).enumerate() {
        let c = pow2(j as i32 + 1);
        rows.push(CertificateRow {
            n: j + 1,
            norm_residual: (&g.restrict(a)? - &xi).variation_norm(),
            lambda_anc: l.value(&a.complement())?,
            partial_sum: 0.0,
            bound: (2.0 + sup_pos + sup_bar) / c,
            min_cover_gap: second.certificates[j].min_cover_gap,
            projection_residual: second.certificates[j].projection_residual,
        });
    }
    let partial = suffix_sums(&rows.iter().map(|r| r.lambda_anc).collect::<Vec<_>>());
    for (r, p) in rows.iter_mut().zip(partial) {
        r.partial_sum = p;
    }

    let tol = cfg.tol;
    let mut failures = Vec::new();
    for (name, stage) in [("positive_stage", &first), ("negative_stage", &second)] {
        for f in &stage.failures {
            failures.push(Failure {
                check: format!("{name}.{}", f.check),
                ..f.clone()
            });
        }
    }
    if let Some(last) = rows.last() {
        if !(last.norm_residual <= tol.conv) {
            failures.push(Failure {
                check: "final_residual".into(),
                value: last.norm_residual,
                limit: tol.conv,
            });
        }
    }
    if let Some(r) = rows.iter().find(|r| !(r.partial_sum <= r.bound + tol.conv)) {
        failures.push(Failure {
            check: format!("summability[{}]", r.n),
            value: r.partial_sum,
            limit: r.bound + tol.conv,
        });
    }
    let weight_check = gamma.check();
    if !weight_check.holds() {
        failures.push(Failure {
            check: "weights".into(),
            value: weight_check.max_row_sum_error,
            limit: 1e-12,
        });
    }

    let diagnostics = Diagnostics {
        horizon_used: h,
        selected: h,
        certified_from: rows.len() / 2,
        stall_gap: first.diagnostics.stall_gap.max(second.diagnostics.stall_gap),
        sup_norm: seq.iter().map(Charge::variation_norm).fold(0.0, f64::max),
        degenerate: first.diagnostics.degenerate || second.diagnostics.degenerate,
        weight_check,
    };
    let mut ladders = first.ladders.clone();
    ladders.extend(second.ladders.iter().cloned());
    Ok(ExtractionResult {
        xi,
        weights: gamma,
        combinations,
        restriction_sets: sets,
        certificates: rows,
        lower_bound: first.lower_bound.clone(),
        ladders,
        diagnostics,
        failures,
        stages: Some(Box::new(SignedStages {
            positive: first,
            negative: second,
        })),
    })
}
