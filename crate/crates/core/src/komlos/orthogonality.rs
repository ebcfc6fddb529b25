use serde::Serialize;

use crate::charge::Charge;
use crate::error::Result;
use crate::set_algebra::same_algebra;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OrthogonalityReport {
    /// For each `j`, `max ‖F_n ∧ F_j‖` over the last `window` indices
    /// `n ≠ j`.
    pub tail_max: Vec<f64>,
    pub below: Vec<bool>,
    pub verdict: bool,
}

/// Finite-window test of `‖F_n ∧ F_j‖ → 0` for every fixed `j`.
pub fn test_asymptotic_orthogonality(
    seq: &[Charge],
    window: usize,
    tau: f64,
) -> Result<OrthogonalityReport> {
    if let Some(first) = seq.first() {
        for f in seq {
            same_algebra(first.algebra(), f.algebra())?;
            f.require_nonnegative(0.0)?;
        }
    }
    let start = seq.len().saturating_sub(window);
    let tail_max: Vec<f64> = (0..seq.len())
        .map(|j| {
            (start..seq.len())
                .filter(|&n| n != j)
                .map(|n| {
                    seq[n]
                        .atoms()
                        .iter()
                        .zip(seq[j].atoms())
                        .map(|(a, b)| a.min(*b))
                        .sum::<f64>()
                })
                .fold(0.0, f64::max)
        })
        .collect();
    let below: Vec<bool> = tail_max.iter().map(|&m| m <= tau).collect();
    let verdict = below.iter().all(|&b| b);
    Ok(OrthogonalityReport {
        tail_max,
        below,
        verdict,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::set_algebra::SetAlgebra;

    #[test]
    fn examples() {
        let a = SetAlgebra::power_set(4).unwrap();
        let singular: Vec<Charge> = (0..4)
            .map(|i| {
                let mut v = vec![0.0; 4];
                v[i] = 1.0;
                Charge::new(&a, v).unwrap()
            })
            .collect();
        let r = test_asymptotic_orthogonality(&singular, 4, 0.0).unwrap();
        assert!(r.verdict);
        assert!(r.tail_max.iter().all(|&m| m == 0.0));

        let f = Charge::new(&a, vec![0.1, 0.2, 0.3, 0.4]).unwrap();
        let constant = vec![f.clone(); 10];
        let r = test_asymptotic_orthogonality(&constant, 5, 1e-3).unwrap();
        assert!(!r.verdict);
        assert!((r.tail_max[0] - 1.0).abs() < 1e-12);

        let shrinking: Vec<Charge> = (1..=1000).map(|n| f.scale(&(1.0 / n as f64))).collect();
        assert!(test_asymptotic_orthogonality(&shrinking, 100, 0.01).unwrap().verdict);
    }
}
