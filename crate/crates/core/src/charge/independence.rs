use serde::Serialize;

use super::{Charge, ProbabilityCharge, Tolerances};
use crate::error::{Error, Result};
use crate::set_algebra::{same_algebra, ProductStructure};

/// Product probability on a finite product space.
pub fn product_charge(
    ps: &ProductStructure,
    factors: &[Vec<f64>],
    tol: &Tolerances,
) -> Result<ProbabilityCharge> {
    if factors.len() != ps.num_coordinates() {
        return Err(Error::Length {
            expected: ps.num_coordinates(),
            got: factors.len(),
        });
    }
    for (n, f) in factors.iter().enumerate() {
        if f.len() != ps.factor_sizes()[n] {
            return Err(Error::Length {
                expected: ps.factor_sizes()[n],
                got: f.len(),
            });
        }
        if f.iter().any(|&p| !(p >= 0.0)) {
            return Err(Error::NotProbability(format!("factor {n} has a negative entry")));
        }
        let mass: f64 = f.iter().sum();
        if (mass - 1.0).abs() > tol.mass.max(1e-15 * f.len() as f64) {
            return Err(Error::NotProbability(format!("factor {n} sums to {mass}")));
        }
    }
    let algebra = ps.algebra();
    let atoms = (0..algebra.ground_size())
        .map(|p| {
            factors
                .iter()
                .enumerate()
                .map(|(n, f)| f[ps.coordinate(p, n)])
                .product()
        })
        .collect();
    // Already normalized up to rounding; skip the mass check on the product.
    Ok(ProbabilityCharge(Charge::new(algebra, atoms)?))
}

/// Marginal masses of the cylinders of `∨_{n ∈ coords} A_n`, indexed by
/// [`ProductStructure::join_key`].
fn marginal(l: &Charge, ps: &ProductStructure, coords: &[usize]) -> Vec<f64> {
    let mut m = vec![0.0; ps.join_size(coords)];
    for (p, &v) in l.atoms().iter().enumerate() {
        m[ps.join_key(p, coords)] += v;
    }
    m
}

fn factorizes(l: &Charge, ps: &ProductStructure, blocks: &[&[usize]], tol: f64) -> bool {
    let joint_coords: Vec<usize> = blocks.iter().flat_map(|b| b.iter().copied()).collect();
    let joint = marginal(l, ps, &joint_coords);
    let margins: Vec<Vec<f64>> = blocks.iter().map(|b| marginal(l, ps, b)).collect();
    // Every cylinder of the joint algebra is visited through some point.
    let mut seen = vec![false; joint.len()];
    for p in 0..ps.algebra().ground_size() {
        let key = ps.join_key(p, &joint_coords);
        if seen[key] {
            continue;
        }
        seen[key] = true;
        let product: f64 = blocks
            .iter()
            .zip(&margins)
            .map(|(b, m)| m[ps.join_key(p, b)])
            .product();
        if (joint[key] - product).abs() > tol {
            return false;
        }
    }
    true
}

fn validate_blocks(ps: &ProductStructure, blocks: &[Vec<usize>]) -> Result<()> {
    let m = ps.num_coordinates();
    let mut seen = vec![false; m];
    for b in blocks {
        for &n in b {
            if n >= m || seen[n] {
                return Err(Error::InvalidPartition(format!(
                    "coordinate {n} is out of range or repeated"
                )));
            }
            seen[n] = true;
        }
    }
    if let Some(n) = seen.iter().position(|&s| !s) {
        return Err(Error::InvalidPartition(format!(
            "coordinate {n} is not covered"
        )));
    }
    Ok(())
}

/// True iff `l(∩_i B_i) = Π_i l(B_i)` for all cylinders `B_i` of the join
/// algebras of the coordinate blocks.
///
/// Checking atoms of the joins is enough by additivity.
pub fn check_independence(
    l: &ProbabilityCharge,
    ps: &ProductStructure,
    blocks: &[Vec<usize>],
    tol: &Tolerances,
) -> Result<bool> {
    same_algebra(l.algebra(), ps.algebra())?;
    validate_blocks(ps, blocks)?;
    if blocks.len() <= 1 {
        return Ok(true);
    }
    let refs: Vec<&[usize]> = blocks.iter().map(Vec::as_slice).collect();
    Ok(factorizes(l, ps, &refs, tol.indep))
}

/// First pair of coordinate blocks whose joint law does not factor.
pub fn find_dependent_pair(
    l: &ProbabilityCharge,
    ps: &ProductStructure,
    blocks: &[Vec<usize>],
    tol: &Tolerances,
) -> Result<Option<(usize, usize)>> {
    same_algebra(l.algebra(), ps.algebra())?;
    validate_blocks(ps, blocks)?;
    for i in 0..blocks.len() {
        for j in i + 1..blocks.len() {
            if !factorizes(l, ps, &[&blocks[i], &blocks[j]], tol.indep) {
                return Ok(Some((i, j)));
            }
        }
    }
    Ok(None)
}

/// Outcome of a property (P) check on a finite increasing sequence.
#[derive(Debug, Clone, Serialize)]
pub struct PropertyPReport {
    pub holds: bool,
    /// `‖s - seq_n‖` for every index, with `s` the atomwise supremum.
    pub gaps: Vec<f64>,
    pub supremum: Vec<f64>,
    pub norm_bound: f64,
}

/// Checks that an increasing, norm-bounded sequence converges in norm to its
/// atomwise supremum: the gap at index `horizon` must be within `tol`.
pub fn check_property_p(seq: &[Charge], horizon: usize, tol: f64) -> Result<PropertyPReport> {
    let first = seq.first().ok_or(Error::EmptySequence)?;
    for (i, w) in seq.windows(2).enumerate() {
        same_algebra(w[0].algebra(), w[1].algebra())?;
        if let Some(atom) = w[0]
            .atoms()
            .iter()
            .zip(w[1].atoms())
            .position(|(a, b)| a > b)
        {
            return Err(Error::NotMonotone { index: i + 1, atom });
        }
    }
    let mut sup = first.atoms().to_vec();
    for f in &seq[1..] {
        for (s, v) in sup.iter_mut().zip(f.atoms()) {
            *s = s.max(*v);
        }
    }
    let sup_charge = Charge::new(first.algebra(), sup.clone())?;
    let gaps: Vec<f64> = seq
        .iter()
        .map(|f| (&sup_charge - f).variation_norm())
        .collect();
    let norm_bound = seq
        .iter()
        .map(Charge::variation_norm)
        .fold(0.0, f64::max);
    let at = horizon.min(seq.len() - 1);
    let tail_ok = gaps[at..].iter().all(|&g| g <= tol);
    Ok(PropertyPReport {
        holds: tail_ok && norm_bound.is_finite(),
        gaps,
        supremum: sup,
        norm_bound,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::set_algebra::{make_product, SetAlgebra, DEFAULT_GROUND_CAP};

    #[test]
    fn product_charge_examples() {
        let tol = Tolerances::default();
        let (_, ps) = make_product(&[2, 2], DEFAULT_GROUND_CAP).unwrap();
        let coins = product_charge(&ps, &[vec![0.5, 0.5], vec![0.5, 0.5]], &tol).unwrap();
        assert_eq!(coins.atoms(), &[0.25; 4]);
        let p = product_charge(&ps, &[vec![0.3, 0.7], vec![0.5, 0.5]], &tol).unwrap();
        let expect = [0.15, 0.15, 0.35, 0.35];
        for (a, b) in p.atoms().iter().zip(expect) {
            assert!((a - b).abs() < 1e-15);
        }
        let z = product_charge(&ps, &[vec![1.0, 0.0], vec![0.5, 0.5]], &tol).unwrap();
        let cyl = ps.coordinate_algebra(0).blocks()[1].clone();
        assert_eq!(z.value(&cyl).unwrap(), 0.0);
        assert!(product_charge(&ps, &[vec![0.3, 0.6], vec![0.5, 0.5]], &tol).is_err());
    }

    #[test]
    fn independence_examples() {
        let tol = Tolerances::default();
        let (a, ps) = make_product(&[2, 2], DEFAULT_GROUND_CAP).unwrap();
        let coins = product_charge(&ps, &[vec![0.5, 0.5], vec![0.5, 0.5]], &tol).unwrap();
        let blocks = vec![vec![0], vec![1]];
        assert!(check_independence(&coins, &ps, &blocks, &tol).unwrap());
        let corr =
            ProbabilityCharge::new(Charge::new(&a, vec![0.5, 0.0, 0.0, 0.5]).unwrap(), &tol).unwrap();
        assert!(!check_independence(&corr, &ps, &blocks, &tol).unwrap());
        assert_eq!(
            find_dependent_pair(&corr, &ps, &blocks, &tol).unwrap(),
            Some((0, 1))
        );
        assert!(check_independence(&corr, &ps, &[vec![0, 1]], &tol).unwrap());
        assert!(check_independence(&corr, &ps, &[vec![0]], &tol).is_err());
    }

    #[test]
    fn property_p_examples() {
        let a = SetAlgebra::power_set(3).unwrap();
        let f = Charge::new(&a, vec![0.2, 1.5, 0.3]).unwrap();
        let seq: Vec<Charge> = (1..=60)
            .map(|n| f.scale(&(1.0 - 0.5f64.powi(n))))
            .collect();
        let rep = check_property_p(&seq, 45, 1e-12).unwrap();
        assert!(rep.holds);
        assert_eq!(rep.supremum, seq[59].atoms());

        let constant = vec![f.clone(); 5];
        assert!(check_property_p(&constant, 0, 0.0).unwrap().holds);

        let bad = vec![f.clone(), Charge::zero(&a)];
        assert!(matches!(
            check_property_p(&bad, 0, 0.0),
            Err(Error::NotMonotone { index: 1, .. })
        ));
    }
}
