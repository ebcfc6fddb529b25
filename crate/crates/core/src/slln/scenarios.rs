use std::sync::Arc;

use rand::Rng;

use crate::charge::{Charge, ProbabilityCharge};
use crate::error::{Error, Result};
use crate::generators::rng;
use crate::set_algebra::{same_algebra, Partition, ProductStructure, SetAlgebra};

/// `F_N(B) = #{n ≤ N : point_n ∈ B} / N` for `N = 1, ..., points.len()`,
/// as probability charges on the algebra generated by the bins.
pub fn empirical_distribution(points: &[usize], bins: &Partition) -> Result<Vec<ProbabilityCharge>> {
    let ground = bins.algebra().ground_size();
    if let Some(&p) = points.iter().find(|&&p| p >= ground) {
        return Err(Error::UnmappedPoint { point: p });
    }
    let blocks: Vec<Vec<usize>> = bins.blocks().iter().map(|b| b.points()).collect();
    let coarse = SetAlgebra::new(ground, blocks)?;
    let mut counts = vec![0usize; coarse.num_atoms()];
    let mut out = Vec::with_capacity(points.len());
    for (n, &p) in points.iter().enumerate() {
        counts[coarse.atom_of(p)] += 1;
        let total = (n + 1) as f64;
        let atoms = counts.iter().map(|&c| c as f64 / total).collect();
        out.push(ProbabilityCharge::normalized(Charge::new(&coarse, atoms)?)?);
    }
    Ok(out)
}

fn condition(prior: &ProbabilityCharge, ps: &ProductStructure, obs: &[usize]) -> Option<Charge> {
    let alg = prior.algebra();
    let atoms: Vec<f64> = prior
        .atoms()
        .iter()
        .enumerate()
        .map(|(a, &m)| {
            let p = alg.atom_points(a)[0];
            let inside = obs.iter().enumerate().all(|(i, &x)| ps.coordinate(p, i) == x);
            if inside {
                m
            } else {
                0.0
            }
        })
        .collect();
    let mass: f64 = atoms.iter().sum();
    (mass > 0.0).then(|| {
        Charge::new(alg, atoms.iter().map(|m| m / mass).collect()).expect("length matches")
    })
}

/// Disagreements `|F¹_n − F²_n|` between the two priors conditioned on the
/// first `n` observed coordinates, `n = 1, ..., observations.len()`.
pub fn posterior_scenario(
    prior1: &ProbabilityCharge,
    prior2: &ProbabilityCharge,
    ps: &ProductStructure,
    observations: &[usize],
) -> Result<Vec<Charge>> {
    same_algebra(prior1.algebra(), ps.algebra())?;
    same_algebra(prior2.algebra(), ps.algebra())?;
    if observations.len() > ps.num_coordinates() {
        return Err(Error::Length {
            expected: ps.num_coordinates(),
            got: observations.len(),
        });
    }
    for (i, &x) in observations.iter().enumerate() {
        if x >= ps.factor_sizes()[i] {
            return Err(Error::Config(format!(
                "observation {x} at coordinate {i} exceeds the factor size {}",
                ps.factor_sizes()[i]
            )));
        }
    }
    (1..=observations.len())
        .map(|n| {
            let obs = &observations[..n];
            let f1 = condition(prior1, ps, obs)
                .ok_or(Error::NullConditioning { prior: 1, observed: n })?;
            let f2 = condition(prior2, ps, obs)
                .ok_or(Error::NullConditioning { prior: 2, observed: n })?;
            Ok((&f1 - &f2).abs())
        })
        .collect()
}

/// Two priors on a grid of coin biases updated on the same coin flips.
#[derive(Debug, Clone)]
pub struct BernoulliMixture {
    pub thetas: Vec<f64>,
    pub observations: Vec<bool>,
    pub posterior1: Vec<ProbabilityCharge>,
    pub posterior2: Vec<ProbabilityCharge>,
    /// `|F¹_n − F²_n|` on the grid algebra.
    pub disagreements: Vec<Charge>,
}

/// Flips a coin with bias `true_theta` `horizon` times and updates both
/// priors (charges on an algebra with one atom per grid value) by Bayes'
/// rule in log space.
pub fn bernoulli_mixture_scenario(
    thetas: &[f64],
    prior1: &ProbabilityCharge,
    prior2: &ProbabilityCharge,
    true_theta: f64,
    horizon: usize,
    seed: u64,
) -> Result<BernoulliMixture> {
    same_algebra(prior1.algebra(), prior2.algebra())?;
    if thetas.len() != prior1.num_atoms() {
        return Err(Error::Length {
            expected: prior1.num_atoms(),
            got: thetas.len(),
        });
    }
    if thetas
        .iter()
        .chain([&true_theta])
        .any(|t| !(0.0..=1.0).contains(t))
    {
        return Err(Error::Config("coin biases must lie in [0, 1]".into()));
    }
    let mut r = rng(seed);
    let observations: Vec<bool> = (0..horizon).map(|_| r.random_bool(true_theta)).collect();

    let alg = Arc::clone(prior1.algebra());
    let run = |prior: &ProbabilityCharge, which: usize| -> Result<Vec<ProbabilityCharge>> {
        let mut logp: Vec<f64> = prior.atoms().iter().map(|m| m.ln()).collect();
        let mut out = Vec::with_capacity(horizon);
        for (n, &x) in observations.iter().enumerate() {
            for (lp, &t) in logp.iter_mut().zip(thetas) {
                *lp += if x { t.ln() } else { (1.0 - t).ln() };
            }
            let top = logp.iter().copied().fold(f64::NEG_INFINITY, f64::max);
            if top == f64::NEG_INFINITY {
                return Err(Error::NullConditioning {
                    prior: which,
                    observed: n + 1,
                });
            }
            let w: Vec<f64> = logp.iter().map(|lp| (lp - top).exp()).collect();
            out.push(ProbabilityCharge::normalized(Charge::new(&alg, w)?)?);
        }
        Ok(out)
    };
    let posterior1 = run(prior1, 1)?;
    let posterior2 = run(prior2, 2)?;
    let disagreements = posterior1
        .iter()
        .zip(&posterior2)
        .map(|(a, b)| (a.charge() - b.charge()).abs())
        .collect();
    Ok(BernoulliMixture {
        thetas: thetas.to_vec(),
        observations,
        posterior1,
        posterior2,
        disagreements,
    })
}
