use super::Charge;
use crate::error::Result;
use crate::scalar::Scalar;
use crate::set_algebra::same_algebra;

/// Splits `l = l_ac + l_s` with `l_ac ≪ m` and `l_s ⊥ m`.
///
/// Atoms are routed by whether `m` is non-null there; a value exactly at
/// the zero tolerance counts as null.
pub fn lebesgue_decompose<S: Scalar>(
    l: &Charge<S>,
    m: &Charge<S>,
    tol: f64,
) -> Result<(Charge<S>, Charge<S>)> {
    same_algebra(l.algebra(), m.algebra())?;
    l.require_nonnegative(tol)?;
    m.require_nonnegative(tol)?;
    let mut ac = Vec::with_capacity(l.num_atoms());
    let mut sing = Vec::with_capacity(l.num_atoms());
    for (lv, mv) in l.atoms().iter().zip(m.atoms()) {
        if mv.is_negligible(tol) {
            ac.push(S::zero());
            sing.push(lv.clone());
        } else {
            ac.push(lv.clone());
            sing.push(S::zero());
        }
    }
    Ok((Charge::new(l.algebra(), ac)?, Charge::new(l.algebra(), sing)?))
}

/// The decomposition `l = Σ_j l_j^⊥` induced by a finite family `F_1..F_J`.
///
/// `parts[0]` carries the atoms null for every `F_j`; `parts[j]` for
/// `j >= 1` carries the atoms charged by `F_j` but by none of
/// `F_1..F_{j-1}`.
#[derive(Debug, Clone, PartialEq)]
pub struct OrthogonalLadder<S: Scalar = f64> {
    pub parts: Vec<Charge<S>>,
}

impl<S: Scalar> OrthogonalLadder<S> {
    pub fn sum(&self) -> Option<Charge<S>> {
        let mut it = self.parts.iter();
        let first = it.next()?.clone();
        Some(it.fold(first, |acc, p| &acc + p))
    }

    /// `Σ_j ‖l_j^⊥‖`.
    pub fn norm_sum(&self) -> S {
        self.parts
            .iter()
            .fold(S::zero(), |acc, p| acc + p.variation_norm())
    }

    pub fn pairwise_singular(&self, tol: f64) -> bool {
        self.parts.iter().enumerate().all(|(i, p)| {
            self.parts[i + 1..]
                .iter()
                .all(|q| p.is_singular(q, tol))
        })
    }
}

pub fn orthogonal_ladder<S: Scalar>(
    l: &Charge<S>,
    family: &[Charge<S>],
    tol: f64,
) -> Result<OrthogonalLadder<S>> {
    l.require_nonnegative(tol)?;
    for f in family {
        same_algebra(l.algebra(), f.algebra())?;
        f.require_nonnegative(tol)?;
    }
    let n = l.num_atoms();
    let mut parts = vec![vec![S::zero(); n]; family.len() + 1];
    for atom in 0..n {
        let owner = family
            .iter()
            .position(|f| !f.atoms()[atom].is_negligible(tol))
            .map_or(0, |j| j + 1);
        parts[owner][atom] = l.atoms()[atom].clone();
    }
    let parts = parts
        .into_iter()
        .map(|atoms| Charge::new(l.algebra(), atoms))
        .collect::<Result<Vec<_>>>()?;
    Ok(OrthogonalLadder { parts })
}
