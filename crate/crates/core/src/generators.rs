//! Deterministic sequence generators used by the examples, the scenario
//! runner and the tests.

use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Gamma};

use crate::charge::{Charge, ProbabilityCharge};
use crate::error::{Error, Result};
use crate::set_algebra::{EventSet, ProductStructure, SetAlgebra};
use crate::slln::MeasurableFunction;

/// The RNG behind every seeded generator.
pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// `len` independent random probability charges with symmetric Dirichlet
/// weights of the given concentration.
pub fn iid_charges(
    algebra: &Arc<SetAlgebra>,
    len: usize,
    seed: u64,
    concentration: f64,
) -> Result<Vec<Charge>> {
    let gamma = Gamma::new(concentration, 1.0)
        .map_err(|e| Error::Config(format!("concentration {concentration}: {e}")))?;
    let mut rng = rng(seed);
    let d = algebra.num_atoms();
    (0..len)
        .map(|_| {
            let draws: Vec<f64> = (0..d).map(|_| gamma.sample(&mut rng)).collect();
            let total: f64 = draws.iter().sum();
            Charge::new(algebra, draws.iter().map(|x| x / total).collect())
        })
        .collect()
}

/// Atomwise mean of the iid generator's distribution (uniform).
pub fn iid_mean(algebra: &Arc<SetAlgebra>) -> Charge {
    Charge::uniform(algebra)
}

/// `F_n = d · l|{atom n}` for `n < d`, then zero: a pairwise singular family.
pub fn singular_family(l: &ProbabilityCharge, len: usize) -> Vec<Charge> {
    let d = l.num_atoms();
    (0..len)
        .map(|n| {
            let mut atoms = vec![0.0; d];
            if n < d {
                atoms[n] = d as f64 * l.atoms()[n];
            }
            Charge::new(l.algebra(), atoms).expect("length matches")
        })
        .collect()
}

pub fn constant(f: &Charge, len: usize) -> Vec<Charge> {
    vec![f.clone(); len]
}

/// `F_n = (−1)^n f`.
pub fn alternating(f: &Charge, len: usize) -> Vec<Charge> {
    let neg = -f;
    (0..len)
        .map(|n| if n % 2 == 0 { f.clone() } else { neg.clone() })
        .collect()
}

/// `F_n = p − scale · d · l|{atom n}` for `n < d`, then `p`: a fixed positive
/// part with pairwise singular negative perturbations.
pub fn signed_mixture(
    p: &Charge,
    l: &ProbabilityCharge,
    scale: f64,
    len: usize,
) -> Result<Vec<Charge>> {
    let neg = singular_family(l, len);
    neg.iter().map(|m| p.try_sub(&m.scale(&scale))).collect()
}

/// `F_n = (n + 1) · l|B + μ`.
pub fn unbounded_ramp(
    l: &ProbabilityCharge,
    b: &EventSet,
    mu: &Charge,
    len: usize,
) -> Result<Vec<Charge>> {
    let base = l.charge().restrict(b)?;
    (0..len)
        .map(|n| base.scale(&((n + 1) as f64)).try_add(mu))
        .collect()
}

/// `F_i = l_{f_i}` with `f_i = scales[i] · 1{x_i = 1}` on a product of
/// binary coordinates.
pub fn coin_indicators(
    l: &ProbabilityCharge,
    ps: &ProductStructure,
    scales: &[f64],
) -> Result<Vec<Charge>> {
    if scales.len() > ps.num_coordinates() {
        return Err(Error::Length {
            expected: ps.num_coordinates(),
            got: scales.len(),
        });
    }
    scales
        .iter()
        .enumerate()
        .map(|(i, &c)| {
            let atoms = l
                .atoms()
                .iter()
                .enumerate()
                .map(|(p, &lp)| {
                    if ps.coordinate(l.algebra().atom_points(p)[0], i) == 1 {
                        c * lp
                    } else {
                        0.0
                    }
                })
                .collect();
            Charge::new(l.algebra(), atoms)
        })
        .collect()
}

/// `len` iid draws from the ground points with the given probabilities.
pub fn multinomial_points(probs: &[f64], len: usize, seed: u64) -> Result<Vec<usize>> {
    let dist = rand::distr::weighted::WeightedIndex::new(probs)
        .map_err(|e| Error::Config(format!("point probabilities: {e}")))?;
    let mut rng = rng(seed);
    Ok((0..len).map(|_| dist.sample(&mut rng)).collect())
}

/// `len` functions with independent fair `±1` values on each atom.
pub fn pm_one_functions(
    algebra: &Arc<SetAlgebra>,
    len: usize,
    seed: u64,
) -> Result<Vec<MeasurableFunction>> {
    let mut rng = rng(seed);
    (0..len)
        .map(|_| {
            let v: Vec<f64> = (0..algebra.num_atoms())
                .map(|_| if rng.random_bool(0.5) { 1.0 } else { -1.0 })
                .collect();
            MeasurableFunction::from_atom_values(algebra, &v)
        })
        .collect()
}

/// Scales `2^{n+1}` for the 1-based index `n`, i.e. `2^{i+2}` for the
/// 0-based coordinate `i`.
pub fn doubling_scales(len: usize) -> Vec<f64> {
    (0..len).map(|i| 2f64.powi(i as i32 + 2)).collect()
}
