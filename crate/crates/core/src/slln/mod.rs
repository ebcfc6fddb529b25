//! Function-level results: λ-convergence, boundedness in `L^0`, the Cesàro
//! strong-law harness, and scenario generators (empirical distributions and
//! posterior disagreement).

mod scenarios;
mod strong_law;

use std::sync::Arc;

use rand::Rng;
use rand_distr::{Distribution, Gamma};
use serde::Serialize;

pub use scenarios::{
    bernoulli_mixture_scenario, empirical_distribution, posterior_scenario, BernoulliMixture,
};
pub use strong_law::{run_slln, AbsoluteSum, CesaroTrace, SllnConfig, TraceRow};

use crate::charge::{Charge, Tolerances};
use crate::error::{Error, Result};
use crate::set_algebra::{same_algebra, RawSubset, SetAlgebra};

/// A real function on the ground set, given pointwise.
#[derive(Debug, Clone, PartialEq)]
pub struct MeasurableFunction {
    algebra: Arc<SetAlgebra>,
    values: Vec<f64>,
}

impl MeasurableFunction {
    pub fn new(algebra: &Arc<SetAlgebra>, values: Vec<f64>) -> Result<Self> {
        if values.len() != algebra.ground_size() {
            return Err(Error::Length {
                expected: algebra.ground_size(),
                got: values.len(),
            });
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::Config("function has a non-finite value".into()));
        }
        Ok(Self {
            algebra: Arc::clone(algebra),
            values,
        })
    }

    pub fn constant(algebra: &Arc<SetAlgebra>, c: f64) -> Result<Self> {
        Self::new(algebra, vec![c; algebra.ground_size()])
    }

    /// The function equal to `value[a]` on every point of atom `a`.
    pub fn from_atom_values(algebra: &Arc<SetAlgebra>, atom_values: &[f64]) -> Result<Self> {
        if atom_values.len() != algebra.num_atoms() {
            return Err(Error::Length {
                expected: algebra.num_atoms(),
                got: atom_values.len(),
            });
        }
        let values = (0..algebra.ground_size())
            .map(|p| atom_values[algebra.atom_of(p)])
            .collect();
        Self::new(algebra, values)
    }

    pub fn algebra(&self) -> &Arc<SetAlgebra> {
        &self.algebra
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Constant on every atom.
    pub fn is_measurable(&self) -> bool {
        (0..self.algebra.num_atoms()).all(|a| {
            let pts = self.algebra.atom_points(a);
            pts.iter().all(|&p| self.values[p] == self.values[pts[0]])
        })
    }

    /// Per-atom values; `None` unless measurable.
    pub fn atom_values(&self) -> Option<Vec<f64>> {
        self.is_measurable().then(|| {
            (0..self.algebra.num_atoms())
                .map(|a| self.values[self.algebra.atom_points(a)[0]])
                .collect()
        })
    }

    /// `{p : |f(p)| > eta}`.
    pub fn exceeds(&self, eta: f64) -> RawSubset {
        RawSubset::from_mask(self.values.iter().map(|v| v.abs() > eta).collect())
    }

    /// `λ_f(A) = ∫_A f dλ` for a measurable `f`.
    pub fn integral_charge(&self, l: &Charge) -> Result<Charge> {
        same_algebra(&self.algebra, l.algebra())?;
        let v = self
            .atom_values()
            .ok_or_else(|| Error::Config("function is not measurable".into()))?;
        Charge::new(
            l.algebra(),
            v.iter().zip(l.atoms()).map(|(f, m)| f * m).collect(),
        )
    }

    /// `∫ |f| dμ` for a measurable `f`.
    pub fn l1_norm(&self, mu: &Charge) -> Result<f64> {
        Ok(self.integral_charge(mu)?.variation_norm())
    }

    pub fn abs(&self) -> Self {
        Self {
            algebra: Arc::clone(&self.algebra),
            values: self.values.iter().map(|v| v.abs()).collect(),
        }
    }
}

/// Default η and c grids: `2^{-10}, ..., 2^{10}`.
pub fn default_grid() -> Vec<f64> {
    (-10..=10).map(|e| 2f64.powi(e)).collect()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LambdaConvergence {
    pub grid: Vec<f64>,
    /// `λ*(|f_n| > η)` for each grid point (outer) and `n` (inner).
    pub outer: Vec<Vec<f64>>,
    pub verdict: bool,
}

/// `λ*(|f_n| > η) → 0` for each `η` in the grid, judged at the last index.
pub fn lambda_converges(
    seq: &[MeasurableFunction],
    l: &Charge,
    grid: &[f64],
    tol: &Tolerances,
) -> Result<LambdaConvergence> {
    for f in seq {
        same_algebra(f.algebra(), l.algebra())?;
    }
    let outer = grid
        .iter()
        .map(|&eta| {
            seq.iter()
                .map(|f| l.outer_measure(&f.exceeds(eta), tol.zero))
                .collect::<Result<Vec<f64>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    let verdict = outer
        .iter()
        .all(|row| row.last().is_none_or(|&v| v <= tol.conv));
    Ok(LambdaConvergence {
        grid: grid.to_vec(),
        outer,
        verdict,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct L0Report {
    pub grid: Vec<f64>,
    /// Largest `λ*(h > c)` seen over the sampled combinations `h`, per `c`.
    pub sup_by_c: Vec<f64>,
    pub bounded: bool,
    /// Number of hull points examined (vertices plus random combinations).
    pub samples: usize,
    /// Always true: the supremum over the hull is estimated, not computed.
    pub estimate: bool,
}

/// Estimates `sup_{h ∈ co(|f_1|, |f_2|, ...)} λ*(h > c)` for each `c`.
///
/// Every vertex `|f_n|` is examined, plus `hull_samples` random
/// combinations of up to four vertices with flat Dirichlet weights.
pub fn check_l0_bounded(
    seq: &[MeasurableFunction],
    l: &Charge,
    grid: &[f64],
    hull_samples: usize,
    seed: u64,
    tol: &Tolerances,
) -> Result<L0Report> {
    if seq.is_empty() {
        return Err(Error::EmptySequence);
    }
    for f in seq {
        same_algebra(f.algebra(), l.algebra())?;
    }
    let abs: Vec<MeasurableFunction> = seq.iter().map(MeasurableFunction::abs).collect();
    let mut sup = vec![0.0f64; grid.len()];
    let mut visit = |h: &[f64]| -> Result<()> {
        for (s, &c) in sup.iter_mut().zip(grid) {
            let set = RawSubset::from_mask(h.iter().map(|v| *v > c).collect());
            *s = s.max(l.outer_measure(&set, tol.zero)?);
        }
        Ok(())
    };
    for f in &abs {
        visit(f.values())?;
    }
    let mut rng = crate::generators::rng(seed);
    let gamma = Gamma::new(1.0, 1.0).expect("valid shape");
    let n_pts = l.algebra().ground_size();
    for _ in 0..hull_samples {
        let k = rng.random_range(2..=4.min(abs.len()).max(2));
        let mut h = vec![0.0; n_pts];
        let ws: Vec<f64> = (0..k).map(|_| gamma.sample(&mut rng)).collect();
        let total: f64 = ws.iter().sum();
        for w in ws {
            let f = &abs[rng.random_range(0..abs.len())];
            for (x, v) in h.iter_mut().zip(f.values()) {
                *x += w / total * v;
            }
        }
        visit(&h)?;
    }
    let bounded = sup.last().is_none_or(|&v| v <= tol.conv);
    Ok(L0Report {
        grid: grid.to_vec(),
        sup_by_c: sup,
        bounded,
        samples: abs.len() + hull_samples,
        estimate: true,
    })
}
