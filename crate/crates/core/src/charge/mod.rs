//! Bounded additive set functions on a finite algebra.
//!
//! A [`Charge`] is determined by its atom values; the value on an event is
//! the sum over the event's atoms, so additivity holds by construction. The
//! space is a vector lattice with the atomwise order, and the variation norm
//! `|f|(Ω)` is the sum of absolute atom values.

mod decompose;
mod independence;

use std::fmt;
use std::ops::{Add, Neg, Sub};
use std::sync::Arc;

use serde::{Deserialize, Serialize};

pub use decompose::{lebesgue_decompose, orthogonal_ladder, OrthogonalLadder};
pub use independence::{
    check_independence, check_property_p, find_dependent_pair, product_charge, PropertyPReport,
};

use crate::error::{Error, Result};
use crate::scalar::Scalar;
use crate::set_algebra::{same_algebra, AlgebraDescriptor, EventSet, Partition, RawSubset, SetAlgebra};

/// Numerical tolerances shared by the library.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Tolerances {
    /// Values at or below this magnitude count as zero.
    pub zero: f64,
    /// Convergence tolerance for certificates.
    pub conv: f64,
    /// Total-mass tolerance for probability charges.
    pub mass: f64,
    /// Tolerance of the product identity in independence checks.
    pub indep: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            zero: 1e-12,
            conv: 1e-6,
            mass: 1e-12,
            indep: 1e-9,
        }
    }
}

/// A signed charge on a finite algebra, stored as per-atom values.
#[derive(Clone, PartialEq)]
pub struct Charge<S: Scalar = f64> {
    algebra: Arc<SetAlgebra>,
    atoms: Vec<S>,
}

impl<S: Scalar> fmt::Debug for Charge<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_tuple("Charge").field(&self.atoms).finish()
    }
}

impl<S: Scalar> Charge<S> {
    pub fn new(algebra: &Arc<SetAlgebra>, atoms: Vec<S>) -> Result<Self> {
        if atoms.len() != algebra.num_atoms() {
            return Err(Error::Length {
                expected: algebra.num_atoms(),
                got: atoms.len(),
            });
        }
        Ok(Self {
            algebra: Arc::clone(algebra),
            atoms,
        })
    }

    pub fn zero(algebra: &Arc<SetAlgebra>) -> Self {
        Self {
            algebra: Arc::clone(algebra),
            atoms: vec![S::zero(); algebra.num_atoms()],
        }
    }

    pub fn algebra(&self) -> &Arc<SetAlgebra> {
        &self.algebra
    }

    pub fn atoms(&self) -> &[S] {
        &self.atoms
    }

    pub fn into_atoms(self) -> Vec<S> {
        self.atoms
    }

    pub fn num_atoms(&self) -> usize {
        self.atoms.len()
    }

    fn check_event(&self, event: &EventSet) -> Result<()> {
        same_algebra(&self.algebra, event.algebra())
    }

    fn zip_with(&self, other: &Self, f: impl Fn(&S, &S) -> S) -> Result<Self> {
        same_algebra(&self.algebra, &other.algebra)?;
        Ok(Self {
            algebra: Arc::clone(&self.algebra),
            atoms: self
                .atoms
                .iter()
                .zip(&other.atoms)
                .map(|(a, b)| f(a, b))
                .collect(),
        })
    }

    fn map(&self, f: impl Fn(&S) -> S) -> Self {
        Self {
            algebra: Arc::clone(&self.algebra),
            atoms: self.atoms.iter().map(f).collect(),
        }
    }

    /// `f(A)` for an event `A`.
    pub fn value(&self, event: &EventSet) -> Result<S> {
        self.check_event(event)?;
        Ok(S::sum(
            self.atoms
                .iter()
                .zip(event.mask())
                .filter_map(|(v, &m)| m.then_some(v)),
        ))
    }

    /// `f(Ω)`.
    pub fn total(&self) -> S {
        S::sum(&self.atoms)
    }

    /// Total variation norm `|f|(Ω)`.
    pub fn variation_norm(&self) -> S {
        self.atoms
            .iter()
            .fold(S::zero(), |acc, v| acc + v.abs())
    }

    /// `Σ_{A ∈ π} |f(A)|`, the quantity whose supremum over partitions is the
    /// variation norm.
    pub fn partition_sum(&self, partition: &Partition) -> Result<S> {
        same_algebra(&self.algebra, partition.algebra())?;
        let mut acc = S::zero();
        for block in partition.blocks() {
            acc = acc + self.value(block)?.abs();
        }
        Ok(acc)
    }

    pub fn meet(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, S::min_of)
    }

    pub fn join(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, S::max_of)
    }

    pub fn abs(&self) -> Self {
        self.map(|v| v.abs())
    }

    pub fn pos_part(&self) -> Self {
        self.map(|v| S::max_of(v, &S::zero()))
    }

    pub fn neg_part(&self) -> Self {
        self.map(|v| S::max_of(&-v.clone(), &S::zero()))
    }

    pub fn scale(&self, c: &S) -> Self {
        self.map(|v| v.clone() * c.clone())
    }

    pub fn try_add(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, |a, b| a.clone() + b.clone())
    }

    pub fn try_sub(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, |a, b| a.clone() - b.clone())
    }

    /// `f_B(A) = f(A ∩ B)`: zeroes the atoms outside `B`.
    pub fn restrict(&self, event: &EventSet) -> Result<Self> {
        self.check_event(event)?;
        Ok(Self {
            algebra: Arc::clone(&self.algebra),
            atoms: self
                .atoms
                .iter()
                .zip(event.mask())
                .map(|(v, &m)| if m { v.clone() } else { S::zero() })
                .collect(),
        })
    }

    /// Atomwise `self <= other`.
    pub fn le(&self, other: &Self) -> bool {
        self.algebra == other.algebra && self.atoms.iter().zip(&other.atoms).all(|(a, b)| a <= b)
    }

    pub fn is_nonnegative(&self, tol: f64) -> bool {
        !self.atoms.iter().any(|v| v.is_negative_beyond(tol))
    }

    pub(crate) fn require_nonnegative(&self, tol: f64) -> Result<()> {
        match self.atoms.iter().position(|v| v.is_negative_beyond(tol)) {
            Some(atom) => Err(Error::Negative {
                atom,
                value: self.atoms[atom].to_f64(),
            }),
            None => Ok(()),
        }
    }

    /// Outer measure `l*(B) = min { l(A) : A ⊇ B }`, i.e. the mass of the
    /// atoms meeting `B`.
    pub fn outer_measure(&self, subset: &RawSubset, tol: f64) -> Result<S> {
        self.require_nonnegative(tol)?;
        let cover = subset.cover(&self.algebra)?;
        self.value(&cover)
    }

    /// `self ≪ l`: every atom null for `|l|` is null for `|self|`.
    pub fn is_abs_continuous(&self, l: &Self, tol: f64) -> bool {
        self.algebra == l.algebra
            && self
                .atoms
                .iter()
                .zip(&l.atoms)
                .all(|(f, l)| !l.is_negligible(tol) || f.is_negligible(tol))
    }

    /// `self ⊥ g`: `‖|self| ∧ |g|‖` is negligible.
    pub fn is_singular(&self, g: &Self, tol: f64) -> bool {
        if self.algebra != g.algebra {
            return false;
        }
        let meet = self
            .atoms
            .iter()
            .zip(&g.atoms)
            .fold(S::zero(), |acc, (a, b)| acc + S::min_of(&a.abs(), &b.abs()));
        meet.is_negligible(tol)
    }

    /// Support of the charge as an event (atoms with non-negligible value).
    pub fn support(&self, tol: f64) -> EventSet {
        let mask = self.atoms.iter().map(|v| !v.is_negligible(tol)).collect();
        EventSet::from_mask(&self.algebra, mask).expect("mask length matches")
    }
}

impl Charge<f64> {
    /// Uniform probability on the atoms.
    pub fn uniform(algebra: &Arc<SetAlgebra>) -> Self {
        let n = algebra.num_atoms();
        Self {
            algebra: Arc::clone(algebra),
            atoms: vec![1.0 / n as f64; n],
        }
    }

    pub fn to_doc(&self) -> ChargeDoc {
        ChargeDoc {
            algebra: Some(self.algebra.descriptor()),
            atoms: self.atoms.clone(),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(&self.to_doc()).expect("charge serializes")
    }

    /// Parses `{"algebra": {...}, "atoms": [...]}`; when the document has no
    /// algebra descriptor, `fallback` is used.
    pub fn from_json(json: &str, fallback: Option<&Arc<SetAlgebra>>) -> Result<Self> {
        let doc: ChargeDoc = serde_json::from_str(json)?;
        doc.into_charge(fallback)
    }

    /// Converts to exact rationals.
    pub fn to_exact(&self) -> Charge<crate::scalar::Exact> {
        Charge {
            algebra: Arc::clone(&self.algebra),
            atoms: self
                .atoms
                .iter()
                .map(|&v| <crate::scalar::Exact as Scalar>::from_f64(v))
                .collect(),
        }
    }
}

/// Serialized form of a charge.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChargeDoc {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub algebra: Option<AlgebraDescriptor>,
    pub atoms: Vec<f64>,
}

impl ChargeDoc {
    pub fn into_charge(self, fallback: Option<&Arc<SetAlgebra>>) -> Result<Charge> {
        let algebra = match (&self.algebra, fallback) {
            (Some(desc), _) => SetAlgebra::from_descriptor(desc)?,
            (None, Some(a)) => Arc::clone(a),
            (None, None) => SetAlgebra::power_set(self.atoms.len())?,
        };
        Charge::new(&algebra, self.atoms)
    }
}

impl<S: Scalar> Neg for &Charge<S> {
    type Output = Charge<S>;

    fn neg(self) -> Charge<S> {
        self.map(|v| -v.clone())
    }
}

impl<S: Scalar> Add for &Charge<S> {
    type Output = Charge<S>;

    /// Panics on mismatched algebras; use [`Charge::try_add`] otherwise.
    fn add(self, rhs: &Charge<S>) -> Charge<S> {
        self.try_add(rhs).expect("charges on the same algebra")
    }
}

impl<S: Scalar> Sub for &Charge<S> {
    type Output = Charge<S>;

    fn sub(self, rhs: &Charge<S>) -> Charge<S> {
        self.try_sub(rhs).expect("charges on the same algebra")
    }
}

/// A non-negative charge with total mass one.
#[derive(Debug, Clone, PartialEq)]
pub struct ProbabilityCharge(Charge<f64>);

impl ProbabilityCharge {
    pub fn new(charge: Charge<f64>, tol: &Tolerances) -> Result<Self> {
        if let Some(atom) = charge.atoms.iter().position(|v| !v.is_finite() || *v < 0.0) {
            return Err(Error::NotProbability(format!(
                "atom {atom} has value {}",
                charge.atoms[atom]
            )));
        }
        let mass = charge.total();
        if (mass - 1.0).abs() > tol.mass.max(1e-15 * charge.num_atoms() as f64) {
            return Err(Error::NotProbability(format!("total mass {mass}")));
        }
        Ok(Self(charge))
    }

    pub fn uniform(algebra: &Arc<SetAlgebra>) -> Self {
        Self(Charge::uniform(algebra))
    }

    /// Normalizes a non-negative charge with positive mass.
    pub fn normalized(charge: Charge<f64>) -> Result<Self> {
        charge.require_nonnegative(0.0)?;
        let mass = charge.total();
        if mass <= 0.0 || !mass.is_finite() {
            return Err(Error::NotProbability(format!("total mass {mass}")));
        }
        Ok(Self(charge.scale(&(1.0 / mass))))
    }

    pub fn charge(&self) -> &Charge<f64> {
        &self.0
    }

    pub fn into_charge(self) -> Charge<f64> {
        self.0
    }

    pub fn algebra(&self) -> &Arc<SetAlgebra> {
        self.0.algebra()
    }

    pub fn atoms(&self) -> &[f64] {
        self.0.atoms()
    }
}

impl std::ops::Deref for ProbabilityCharge {
    type Target = Charge<f64>;

    fn deref(&self) -> &Charge<f64> {
        &self.0
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{ratio, Exact};
    use crate::set_algebra::enumerate_partitions;

    fn alg(n: usize) -> Arc<SetAlgebra> {
        SetAlgebra::power_set(n).unwrap()
    }

    #[test]
    fn variation_norm_examples() {
        let a = alg(3);
        let f = Charge::new(&a, vec![0.3, -0.5, 0.2]).unwrap();
        assert!((f.variation_norm() - 1.0).abs() < 1e-15);
        assert_eq!(Charge::<f64>::zero(&a).variation_norm(), 0.0);
    }

    #[test]
    fn variation_norm_is_partition_sup_on_four_atoms() {
        let a = alg(4);
        let f = Charge::new(&a, vec![ratio(3, 7), ratio(-2, 5), ratio(1, 3), ratio(-5, 11)])
            .unwrap();
        let best = enumerate_partitions(&a, 10)
            .unwrap()
            .iter()
            .map(|p| f.partition_sum(p).unwrap())
            .fold(Exact::from_integer(0.into()), |m, v| if v > m { v } else { m });
        assert_eq!(best, f.variation_norm());
    }

    #[test]
    fn lattice_examples() {
        let a = alg(2);
        let f = Charge::new(&a, vec![1.0, 0.0]).unwrap();
        let g = Charge::new(&a, vec![0.0, 1.0]).unwrap();
        assert_eq!(f.meet(&g).unwrap().atoms(), &[0.0, 0.0]);
        assert_eq!(f.meet(&f).unwrap(), f);

        let f = Charge::new(&a, vec![ratio(2, 1), ratio(1, 1)]).unwrap();
        let g = Charge::new(&a, vec![ratio(1, 1), ratio(3, 1)]).unwrap();
        let meet = f.meet(&g).unwrap();
        assert_eq!(meet.atoms(), &[ratio(1, 1), ratio(1, 1)]);
        let via_identity = (&(&f + &g) - &(&f - &g).abs()).scale(&ratio(1, 2));
        assert_eq!(meet, via_identity);

        let h = Charge::new(&a, vec![ratio(-3, 2), ratio(5, 4)]).unwrap();
        assert_eq!(&h.pos_part() - &h.neg_part(), h);
        assert_eq!(&h.pos_part() + &h.neg_part(), h.abs());
        assert!(f.meet(&Charge::zero(&alg(3))).is_err());
    }

    #[test]
    fn restrict_examples() {
        let a = alg(3);
        let f = Charge::new(&a, vec![1.0, 2.0, 3.0]).unwrap();
        assert_eq!(f.restrict(&EventSet::full(&a)).unwrap(), f);
        assert_eq!(
            f.restrict(&EventSet::empty(&a)).unwrap(),
            Charge::zero(&a)
        );
        let b = EventSet::from_atoms(&a, [0, 2]).unwrap();
        assert_eq!(f.restrict(&b).unwrap().atoms(), &[1.0, 0.0, 3.0]);
        assert!(f.restrict(&EventSet::full(&alg(2))).is_err());
    }

    #[test]
    fn outer_measure_examples() {
        let a = SetAlgebra::new(3, vec![vec![0, 1], vec![2]]).unwrap();
        let l = Charge::new(&a, vec![0.6, 0.4]).unwrap();
        let b = RawSubset::from_points(3, [0]).unwrap();
        assert_eq!(l.outer_measure(&b, 0.0).unwrap(), 0.6);
        let empty = RawSubset::from_points(3, []).unwrap();
        assert_eq!(l.outer_measure(&empty, 0.0).unwrap(), 0.0);
        let b = RawSubset::from_points(3, [0, 2]).unwrap();
        // Brute force: min of l over all events containing {0, 2}.
        let brute = crate::set_algebra::enumerate_events(&a)
            .unwrap()
            .into_iter()
            .filter(|e| {
                let pts = e.points();
                pts.contains(&0) && pts.contains(&2)
            })
            .map(|e| l.value(&e).unwrap())
            .fold(f64::INFINITY, f64::min);
        assert_eq!(l.outer_measure(&b, 0.0).unwrap(), brute);
        assert!((brute - 1.0).abs() < 1e-15);
        let neg = Charge::new(&a, vec![0.6, -0.4]).unwrap();
        assert!(neg.outer_measure(&b, 0.0).is_err());
    }

    #[test]
    fn continuity_and_singularity_examples() {
        let a = alg(2);
        let f = Charge::new(&a, vec![1.0, 0.0]).unwrap();
        let l = Charge::new(&a, vec![2.0, 0.0]).unwrap();
        assert!(f.is_abs_continuous(&l, 1e-12));
        let g = Charge::new(&a, vec![0.0, 1.0]).unwrap();
        assert!(f.is_singular(&g, 1e-12));
        let f2 = Charge::new(&a, vec![1.0, 1.0]).unwrap();
        let l2 = Charge::new(&a, vec![1.0, 0.0]).unwrap();
        assert!(!f2.is_abs_continuous(&l2, 1e-12));
        // Tie at exactly the zero tolerance routes to null.
        let tiny = Charge::new(&a, vec![1.0, 1e-12]).unwrap();
        assert!(f2.is_abs_continuous(&Charge::new(&a, vec![1.0, 1.0]).unwrap(), 1e-12));
        assert!(!f2.is_abs_continuous(&tiny, 1e-12));
    }

    #[test]
    fn json_round_trip() {
        let a = SetAlgebra::new(3, vec![vec![0, 1], vec![2]]).unwrap();
        let f = Charge::new(&a, vec![0.25, -0.75]).unwrap();
        let back = Charge::from_json(&f.to_json(), None).unwrap();
        assert_eq!(back, f);
        let bare = Charge::from_json(r#"{"atoms":[0.5,0.5]}"#, Some(&a)).unwrap();
        assert_eq!(bare.algebra(), &a);
        assert!(Charge::from_json(r#"{"atoms":[1.0],"extra":1}"#, None).is_err());
    }

    #[test]
    fn probability_validation() {
        let a = alg(2);
        let tol = Tolerances::default();
        assert!(ProbabilityCharge::new(Charge::new(&a, vec![0.5, 0.5]).unwrap(), &tol).is_ok());
        assert!(ProbabilityCharge::new(Charge::new(&a, vec![0.5, 0.6]).unwrap(), &tol).is_err());
        assert!(ProbabilityCharge::new(Charge::new(&a, vec![1.5, -0.5]).unwrap(), &tol).is_err());
    }
}
