use serde::Serialize;

use super::positive::extract_positive;
use super::{check_sequence, pow2, ExtractionConfig, ExtractionResult, Failure};
use crate::charge::{check_independence, find_dependent_pair, Charge, ProbabilityCharge, Tolerances};
use crate::error::{Error, Result};
use crate::set_algebra::{same_algebra, EventSet, ProductStructure};

#[derive(Debug, Clone)]
pub struct IndependentExtraction {
    pub result: ExtractionResult,
    /// `g_n = Σ_i α_{n,i} f_i` as per-atom values, one per weight row.
    pub densities: Vec<Vec<f64>>,
    /// `l(g_n ≤ 2^n)` per row (1-based `n`).
    pub row_probabilities: Vec<f64>,
    /// `N`: rows `n > N` (1-based) are intersected into `A_ε`. The least
    /// `N` at which both the product exceeds `1 − ε` and `ξ(A_ε^c) < ε`.
    pub cutoff: usize,
    pub a_eps: EventSet,
    pub summary: IndependenceSummary,
    pub failures: Vec<Failure>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IndependenceSummary {
    pub epsilon: f64,
    pub cutoff: usize,
    /// The least `N` with `Π_{n > N} l(g_n ≤ 2^n) > 1 − ε`, ignoring `ξ`.
    pub product_cutoff: usize,
    /// `Π_{n > N} l(g_n ≤ 2^n)`.
    pub product: f64,
    /// `l(A_ε)`, equal to the product under independence.
    pub measure: f64,
    /// `ξ(A_ε^c)`.
    pub xi_outside: f64,
    /// `|G_n − ξ|(A_ε)` at the last row.
    pub residual: f64,
    pub blocks: Vec<Vec<usize>>,
}

impl IndependentExtraction {
    /// The independence certificates. The inner extraction's own failures
    /// are kept in `result`; its truncation certificates assume a norm
    /// bound that these sequences need not have.
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

/// Densities `f_n = F_n / l`, checked to be functions of coordinate `n`.
///
/// Only atoms with `l(a) = 0` are null here: product charges with small
/// biases have legitimately tiny atoms whose densities are still exact.
fn densities(
    seq: &[Charge],
    l: &ProbabilityCharge,
    ps: &ProductStructure,
    tol: &Tolerances,
) -> Result<Vec<Vec<f64>>> {
    let alg = l.algebra();
    seq.iter()
        .enumerate()
        .map(|(n, f)| {
            let mut by_value: Vec<Option<f64>> = vec![None; ps.factor_sizes()[n]];
            let mut dens = vec![0.0; f.num_atoms()];
            for (a, (&fa, &la)) in f.atoms().iter().zip(l.atoms()).enumerate() {
                if la == 0.0 {
                    if fa.abs() > tol.zero {
                        return Err(Error::NotRepresentable {
                            index: n,
                            coordinate: n,
                            reason: format!("mass {fa} on the null atom {a}"),
                        });
                    }
                    continue;
                }
                let v = fa / la;
                let points = alg.atom_points(a);
                let x = ps.coordinate(points[0], n);
                if points.iter().any(|&p| ps.coordinate(p, n) != x) {
                    return Err(Error::NotRepresentable {
                        index: n,
                        coordinate: n,
                        reason: format!("atom {a} straddles coordinate cylinders"),
                    });
                }
                match by_value[x] {
                    None => by_value[x] = Some(v),
                    Some(prev) if (prev - v).abs() <= tol.conv * (1.0 + prev.abs()) => {}
                    Some(prev) => {
                        return Err(Error::NotRepresentable {
                            index: n,
                            coordinate: n,
                            reason: format!(
                                "density takes values {prev} and {v} on the cylinder {{x_{n} = {x}}}"
                            ),
                        })
                    }
                }
                dens[a] = v;
            }
            Ok(dens)
        })
        .collect()
}

/// Extraction on a product space with an exact product-form exceptional set.
///
/// Input `i` must be `l_{f_i}` with `f_i` a function of coordinate `i`, so
/// the horizon may not exceed the number of coordinates. The blocks of
/// coordinates used by the weight rows must be `l`-independent; then
/// `l(⋂_{n>N} {g_n ≤ 2^n}) = Π_{n>N} l(g_n ≤ 2^n)`. `N` is the least
/// cutoff with product above `1 − ε`, raised further if needed until
/// `ξ(A_ε^c) < ε`.
pub fn extract_independent(
    seq: &[Charge],
    l: &ProbabilityCharge,
    ps: &ProductStructure,
    cfg: &ExtractionConfig,
    epsilon: f64,
) -> Result<IndependentExtraction> {
    cfg.validate()?;
    let alg = check_sequence(seq, l)?;
    same_algebra(&alg, ps.algebra())?;
    if !(epsilon > 0.0 && epsilon < 1.0) {
        return Err(Error::Config(format!("epsilon must be in (0, 1), got {epsilon}")));
    }
    let h = cfg.horizon.min(seq.len());
    let m = ps.num_coordinates();
    if h > m {
        return Err(Error::Config(format!(
            "horizon {h} exceeds the {m} coordinates of the product space"
        )));
    }
    let seq = &seq[..h];
    for f in seq {
        f.require_nonnegative(cfg.tol.zero)?;
    }
    let f = densities(seq, l, ps, &cfg.tol)?;

    let result = extract_positive(seq, l, cfg)?;
    let weights = &result.weights;

    let mut covered = vec![false; m];
    let mut blocks: Vec<Vec<usize>> = weights
        .rows()
        .iter()
        .map(|row| {
            let b: Vec<usize> = row.iter().map(|&(i, _)| i).collect();
            for &i in &b {
                covered[i] = true;
            }
            b
        })
        .collect();
    blocks.extend((0..m).filter(|&i| !covered[i]).map(|i| vec![i]));
    if !check_independence(l, ps, &blocks, &cfg.tol)? {
        let (i, j) = find_dependent_pair(l, ps, &blocks, &cfg.tol)?
            .expect("a dependent pair exists when the joint law does not factor");
        return Err(Error::NotIndependent {
            first: blocks[i].clone(),
            second: blocks[j].clone(),
        });
    }

    let d = l.num_atoms();
    let g: Vec<Vec<f64>> = weights
        .rows()
        .iter()
        .map(|row| {
            let mut v = vec![0.0; d];
            for &(i, w) in row {
                for (x, y) in v.iter_mut().zip(&f[i]) {
                    *x += w * y;
                }
            }
            v
        })
        .collect();
    let below: Vec<Vec<bool>> = g
        .iter()
        .enumerate()
        .map(|(n, gn)| {
            let c = pow2(n as i32 + 1);
            gn.iter().map(|&v| v <= c).collect()
        })
        .collect();
    let row_probabilities: Vec<f64> = below
        .iter()
        .map(|mask| {
            mask.iter()
                .zip(l.atoms())
                .filter(|(b, _)| **b)
                .map(|(_, p)| p)
                .sum()
        })
        .collect();

    // Products over rows n > N, i.e. 0-based indices N..rows.
    let rows = g.len();
    let mut tail_products = vec![1.0; rows + 1];
    for n in (0..rows).rev() {
        tail_products[n] = tail_products[n + 1] * row_probabilities[n];
    }
    let product_cutoff = (0..=rows)
        .find(|&nn| tail_products[nn] > 1.0 - epsilon)
        .expect("the empty product is 1");
    // A_N = ⋂_{n>N} {g_n ≤ 2^n} grows with N, so ξ(A_N^c) shrinks; N = rows
    // gives A_N = Ω.
    let mut tails = vec![vec![true; d]; rows + 1];
    for n in (0..rows).rev() {
        tails[n] = tails[n + 1].iter().zip(&below[n]).map(|(a, b)| *a && *b).collect();
    }
    let mut cutoff = rows;
    let mut xi_outside = 0.0;
    for nn in product_cutoff..=rows {
        let outside = result
            .xi
            .value(&EventSet::from_mask(&alg, tails[nn].clone())?.complement())?;
        if outside < epsilon {
            cutoff = nn;
            xi_outside = outside;
            break;
        }
    }
    let a_eps = EventSet::from_mask(&alg, tails[cutoff].clone())?;
    let measure = l.value(&a_eps)?;
    let residual = match result.combinations.last() {
        Some(last) => (&last.restrict(&a_eps)? - &result.xi.restrict(&a_eps)?).variation_norm(),
        None => 0.0,
    };

    let tol = cfg.tol;
    let mut failures = Vec::new();
    if !(xi_outside < epsilon) {
        failures.push(Failure {
            check: "xi_outside".into(),
            value: xi_outside,
            limit: epsilon,
        });
    }
    if !(residual <= tol.conv) {
        failures.push(Failure {
            check: "residual_on_a_eps".into(),
            value: residual,
            limit: tol.conv,
        });
    }
    if !((measure - tail_products[cutoff]).abs() <= tol.indep) {
        failures.push(Failure {
            check: "product_identity".into(),
            value: measure,
            limit: tail_products[cutoff],
        });
    }

    let summary = IndependenceSummary {
        epsilon,
        cutoff,
        product_cutoff,
        product: tail_products[cutoff],
        measure,
        xi_outside,
        residual,
        blocks,
    };
    Ok(IndependentExtraction {
        result,
        densities: g,
        row_probabilities,
        cutoff,
        a_eps,
        summary,
        failures,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::charge::{product_charge, Tolerances};
    use crate::set_algebra::{make_product, DEFAULT_GROUND_CAP};

    /// `l_{f_i}` with `f_i = c_i · 1{x_i = 1}`.
    fn indicator_charges(l: &ProbabilityCharge, ps: &ProductStructure, c: &[f64]) -> Vec<Charge> {
        c.iter()
            .enumerate()
            .map(|(i, &ci)| {
                let atoms = l
                    .atoms()
                    .iter()
                    .enumerate()
                    .map(|(p, &lp)| if ps.coordinate(p, i) == 1 { ci * lp } else { 0.0 })
                    .collect();
                Charge::new(l.algebra(), atoms).unwrap()
            })
            .collect()
    }

    #[test]
    fn bounded_indicators_need_no_exceptional_set() {
        let tol = Tolerances::default();
        let (_, ps) = make_product(&[2; 4], DEFAULT_GROUND_CAP).unwrap();
        let l = product_charge(&ps, &vec![vec![0.5, 0.5]; 4], &tol).unwrap();
        let seq = indicator_charges(&l, &ps, &[1.0; 4]);
        let cfg = ExtractionConfig {
            horizon: 4,
            block_size: 1,
            max_block: 1,
            norm_subsequence: false,
            ..Default::default()
        };
        let r = extract_independent(&seq, &l, &ps, &cfg, 0.05).unwrap();
        assert_eq!(r.cutoff, 0);
        assert_eq!(r.a_eps.atoms().len(), 16);
        assert!(r.row_probabilities.iter().all(|&p| p == 1.0));
    }

    #[test]
    fn correlated_reference_is_rejected() {
        let tol = Tolerances::default();
        let (a, ps) = make_product(&[2, 2], DEFAULT_GROUND_CAP).unwrap();
        let l = ProbabilityCharge::new(Charge::new(&a, vec![0.5, 0.0, 0.0, 0.5]).unwrap(), &tol)
            .unwrap();
        let seq = indicator_charges(&l, &ps, &[1.0, 1.0]);
        let cfg = ExtractionConfig {
            horizon: 2,
            block_size: 1,
            max_block: 1,
            norm_subsequence: false,
            ..Default::default()
        };
        let err = extract_independent(&seq, &l, &ps, &cfg, 0.05).unwrap_err();
        assert!(matches!(err, Error::NotIndependent { .. }), "{err}");
    }

    #[test]
    fn density_must_depend_on_its_coordinate() {
        let tol = Tolerances::default();
        let (_, ps) = make_product(&[2, 2], DEFAULT_GROUND_CAP).unwrap();
        let l = product_charge(&ps, &[vec![0.5, 0.5], vec![0.5, 0.5]], &tol).unwrap();
        // Input 0 depends on coordinate 1.
        let wrong = indicator_charges(&l, &ps, &[0.0, 1.0]).remove(1);
        let seq = vec![wrong.clone(), wrong];
        let err = extract_independent(&seq, &l, &ps, &ExtractionConfig::default(), 0.1).unwrap_err();
        assert!(matches!(err, Error::NotRepresentable { index: 0, .. }), "{err}");
    }
}
