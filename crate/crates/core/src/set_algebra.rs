//! Finite set algebras generated by an atom partition of a ground set.
//!
//! Events are stored as atom masks, so every event is a union of atoms by
//! construction. Arbitrary point sets (which need not be events) are
//! [`RawSubset`]s; they only show up as arguments of the outer measure.

use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Default cap on the number of atoms for partition enumeration.
pub const DEFAULT_ENUMERATION_CAP: usize = 10;

/// Default cap on the ground size of product spaces.
pub const DEFAULT_GROUND_CAP: usize = 1 << 20;

/// JSON descriptor of an algebra: `{"ground": n, "blocks": [[...], ...]}`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AlgebraDescriptor {
    pub ground: usize,
    pub blocks: Vec<Vec<usize>>,
}

/// The algebra of atom unions over a finite ground set `{0, ..., ground_size - 1}`.
#[derive(Clone, PartialEq, Eq)]
pub struct SetAlgebra {
    ground_size: usize,
    atoms: Vec<Vec<usize>>,
    point_atom: Vec<usize>,
}

impl fmt::Debug for SetAlgebra {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("SetAlgebra")
            .field("ground_size", &self.ground_size)
            .field("atoms", &self.atoms.len())
            .finish()
    }
}

impl SetAlgebra {
    /// Builds the algebra generated by `blocks`, which must partition the
    /// ground set into non-empty pieces.
    pub fn new(ground_size: usize, blocks: Vec<Vec<usize>>) -> Result<Arc<Self>> {
        if ground_size == 0 {
            return Err(Error::InvalidAlgebra("ground set is empty".into()));
        }
        let mut point_atom = vec![usize::MAX; ground_size];
        for (atom, block) in blocks.iter().enumerate() {
            if block.is_empty() {
                return Err(Error::InvalidAlgebra(format!("block {atom} is empty")));
            }
            for &p in block {
                if p >= ground_size {
                    return Err(Error::InvalidAlgebra(format!(
                        "point {p} outside ground set of size {ground_size}"
                    )));
                }
                if point_atom[p] != usize::MAX {
                    return Err(Error::InvalidAlgebra(format!(
                        "point {p} belongs to blocks {} and {atom}",
                        point_atom[p]
                    )));
                }
                point_atom[p] = atom;
            }
        }
        if let Some(p) = point_atom.iter().position(|&a| a == usize::MAX) {
            return Err(Error::InvalidAlgebra(format!("point {p} is not covered")));
        }
        let atoms = blocks
            .into_iter()
            .map(|mut b| {
                b.sort_unstable();
                b
            })
            .collect();
        Ok(Arc::new(Self {
            ground_size,
            atoms,
            point_atom,
        }))
    }

    /// The power-set algebra (every point is an atom).
    pub fn power_set(ground_size: usize) -> Result<Arc<Self>> {
        Self::new(ground_size, (0..ground_size).map(|p| vec![p]).collect())
    }

    pub fn from_descriptor(desc: &AlgebraDescriptor) -> Result<Arc<Self>> {
        Self::new(desc.ground, desc.blocks.clone())
    }

    pub fn descriptor(&self) -> AlgebraDescriptor {
        AlgebraDescriptor {
            ground: self.ground_size,
            blocks: self.atoms.clone(),
        }
    }

    pub fn ground_size(&self) -> usize {
        self.ground_size
    }

    pub fn num_atoms(&self) -> usize {
        self.atoms.len()
    }

    pub fn atom_points(&self, atom: usize) -> &[usize] {
        &self.atoms[atom]
    }

    pub fn atom_of(&self, point: usize) -> usize {
        self.point_atom[point]
    }
}

/// Checks that two algebra handles describe the same algebra.
pub(crate) fn same_algebra(a: &Arc<SetAlgebra>, b: &Arc<SetAlgebra>) -> Result<()> {
    if Arc::ptr_eq(a, b) || **a == **b {
        Ok(())
    } else {
        Err(Error::AlgebraMismatch)
    }
}

/// An event of the algebra, stored as a mask over atoms.
#[derive(Clone, PartialEq, Eq)]
pub struct EventSet {
    algebra: Arc<SetAlgebra>,
    mask: Vec<bool>,
}

impl fmt::Debug for EventSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_tuple("EventSet").field(&self.atoms()).finish()
    }
}

impl EventSet {
    pub fn from_mask(algebra: &Arc<SetAlgebra>, mask: Vec<bool>) -> Result<Self> {
        if mask.len() != algebra.num_atoms() {
            return Err(Error::Length {
                expected: algebra.num_atoms(),
                got: mask.len(),
            });
        }
        Ok(Self {
            algebra: Arc::clone(algebra),
            mask,
        })
    }

    pub fn from_atoms<I: IntoIterator<Item = usize>>(
        algebra: &Arc<SetAlgebra>,
        atoms: I,
    ) -> Result<Self> {
        let n = algebra.num_atoms();
        let mut mask = vec![false; n];
        for a in atoms {
            if a >= n {
                return Err(Error::ForeignEvent { atom: a, atoms: n });
            }
            mask[a] = true;
        }
        Ok(Self {
            algebra: Arc::clone(algebra),
            mask,
        })
    }

    pub fn full(algebra: &Arc<SetAlgebra>) -> Self {
        Self {
            algebra: Arc::clone(algebra),
            mask: vec![true; algebra.num_atoms()],
        }
    }

    pub fn empty(algebra: &Arc<SetAlgebra>) -> Self {
        Self {
            algebra: Arc::clone(algebra),
            mask: vec![false; algebra.num_atoms()],
        }
    }

    /// Event with atom mask given by the bits of `bits` (atom `i` is bit `i`).
    pub fn from_bits(algebra: &Arc<SetAlgebra>, bits: u64) -> Self {
        let mask = (0..algebra.num_atoms())
            .map(|i| i < 64 && (bits >> i) & 1 == 1)
            .collect();
        Self {
            algebra: Arc::clone(algebra),
            mask,
        }
    }

    pub fn algebra(&self) -> &Arc<SetAlgebra> {
        &self.algebra
    }

    pub fn mask(&self) -> &[bool] {
        &self.mask
    }

    pub fn contains_atom(&self, atom: usize) -> bool {
        self.mask.get(atom).copied().unwrap_or(false)
    }

    pub fn atoms(&self) -> Vec<usize> {
        self.mask
            .iter()
            .enumerate()
            .filter_map(|(i, &m)| m.then_some(i))
            .collect()
    }

    pub fn is_empty(&self) -> bool {
        !self.mask.iter().any(|&m| m)
    }

    pub fn complement(&self) -> Self {
        Self {
            algebra: Arc::clone(&self.algebra),
            mask: self.mask.iter().map(|&m| !m).collect(),
        }
    }

    pub fn intersect(&self, other: &Self) -> Result<Self> {
        same_algebra(&self.algebra, &other.algebra)?;
        Ok(Self {
            algebra: Arc::clone(&self.algebra),
            mask: self
                .mask
                .iter()
                .zip(&other.mask)
                .map(|(&a, &b)| a && b)
                .collect(),
        })
    }

    pub fn union(&self, other: &Self) -> Result<Self> {
        same_algebra(&self.algebra, &other.algebra)?;
        Ok(Self {
            algebra: Arc::clone(&self.algebra),
            mask: self
                .mask
                .iter()
                .zip(&other.mask)
                .map(|(&a, &b)| a || b)
                .collect(),
        })
    }

    pub fn is_subset_of(&self, other: &Self) -> bool {
        self.mask.iter().zip(&other.mask).all(|(&a, &b)| !a || b)
    }

    pub fn is_disjoint_from(&self, other: &Self) -> bool {
        self.mask.iter().zip(&other.mask).all(|(&a, &b)| !(a && b))
    }

    /// The points of the ground set covered by this event.
    pub fn points(&self) -> Vec<usize> {
        let mut pts: Vec<usize> = self
            .atoms()
            .into_iter()
            .flat_map(|a| self.algebra.atom_points(a).iter().copied())
            .collect();
        pts.sort_unstable();
        pts
    }
}

/// An arbitrary subset of the ground set; need not be an event.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RawSubset {
    points: Vec<bool>,
}

impl RawSubset {
    pub fn from_points<I: IntoIterator<Item = usize>>(ground_size: usize, pts: I) -> Result<Self> {
        let mut points = vec![false; ground_size];
        for p in pts {
            if p >= ground_size {
                return Err(Error::InvalidAlgebra(format!(
                    "point {p} outside ground set of size {ground_size}"
                )));
            }
            points[p] = true;
        }
        Ok(Self { points })
    }

    pub fn from_mask(points: Vec<bool>) -> Self {
        Self { points }
    }

    pub fn ground_size(&self) -> usize {
        self.points.len()
    }

    pub fn contains(&self, point: usize) -> bool {
        self.points.get(point).copied().unwrap_or(false)
    }

    pub fn is_empty(&self) -> bool {
        !self.points.iter().any(|&p| p)
    }

    /// Smallest event containing this set.
    pub fn cover(&self, algebra: &Arc<SetAlgebra>) -> Result<EventSet> {
        if self.points.len() != algebra.ground_size() {
            return Err(Error::Length {
                expected: algebra.ground_size(),
                got: self.points.len(),
            });
        }
        let atoms = self
            .points
            .iter()
            .enumerate()
            .filter_map(|(p, &m)| m.then(|| algebra.atom_of(p)));
        EventSet::from_atoms(algebra, atoms)
    }
}

/// A partition of the ground set into non-empty events.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Partition {
    algebra: Arc<SetAlgebra>,
    blocks: Vec<EventSet>,
}

impl Partition {
    pub fn new(algebra: &Arc<SetAlgebra>, blocks: Vec<EventSet>) -> Result<Self> {
        let mut seen = vec![false; algebra.num_atoms()];
        for (i, b) in blocks.iter().enumerate() {
            same_algebra(algebra, b.algebra())?;
            if b.is_empty() {
                return Err(Error::InvalidPartition(format!("block {i} is empty")));
            }
            for a in b.atoms() {
                if seen[a] {
                    return Err(Error::InvalidPartition(format!("atom {a} appears twice")));
                }
                seen[a] = true;
            }
        }
        if let Some(a) = seen.iter().position(|&s| !s) {
            return Err(Error::InvalidPartition(format!("atom {a} is not covered")));
        }
        Ok(Self {
            algebra: Arc::clone(algebra),
            blocks,
        })
    }

    /// Builds a partition from a block label per atom.
    pub fn from_labels(algebra: &Arc<SetAlgebra>, labels: &[usize]) -> Result<Self> {
        if labels.len() != algebra.num_atoms() {
            return Err(Error::Length {
                expected: algebra.num_atoms(),
                got: labels.len(),
            });
        }
        let count = labels.iter().copied().max().map_or(0, |m| m + 1);
        let mut masks = vec![vec![false; labels.len()]; count];
        for (atom, &l) in labels.iter().enumerate() {
            masks[l][atom] = true;
        }
        let blocks = masks
            .into_iter()
            .filter(|m| m.iter().any(|&x| x))
            .map(|mask| EventSet {
                algebra: Arc::clone(algebra),
                mask,
            })
            .collect();
        Self::new(algebra, blocks)
    }

    /// The partition into atoms.
    pub fn finest(algebra: &Arc<SetAlgebra>) -> Self {
        let blocks = (0..algebra.num_atoms())
            .map(|a| EventSet::from_atoms(algebra, [a]).expect("atom in range"))
            .collect();
        Self {
            algebra: Arc::clone(algebra),
            blocks,
        }
    }

    /// The trivial partition `{Ω}`.
    pub fn coarsest(algebra: &Arc<SetAlgebra>) -> Self {
        Self {
            algebra: Arc::clone(algebra),
            blocks: vec![EventSet::full(algebra)],
        }
    }

    pub fn algebra(&self) -> &Arc<SetAlgebra> {
        &self.algebra
    }

    pub fn blocks(&self) -> &[EventSet] {
        &self.blocks
    }

    pub fn len(&self) -> usize {
        self.blocks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.blocks.is_empty()
    }

    /// Block label of every atom.
    pub fn labels(&self) -> Vec<usize> {
        let mut labels = vec![0; self.algebra.num_atoms()];
        for (i, b) in self.blocks.iter().enumerate() {
            for a in b.atoms() {
                labels[a] = i;
            }
        }
        labels
    }

    /// True when every block of `self` lies inside some block of `coarser`.
    pub fn refines(&self, coarser: &Partition) -> bool {
        self.blocks
            .iter()
            .all(|b| coarser.blocks.iter().any(|c| b.is_subset_of(c)))
    }

    /// Canonical form: blocks sorted by their smallest atom.
    pub fn canonical(&self) -> Vec<Vec<usize>> {
        let mut blocks: Vec<Vec<usize>> = self.blocks.iter().map(EventSet::atoms).collect();
        blocks.sort();
        blocks
    }
}

/// Enumerates every partition of Ω into events, each exactly once.
///
/// Uses restricted growth strings over the atoms, so the count is the Bell
/// number of the atom count. Refuses above `cap` atoms.
pub fn enumerate_partitions(algebra: &Arc<SetAlgebra>, cap: usize) -> Result<Vec<Partition>> {
    let n = algebra.num_atoms();
    if n > cap {
        return Err(Error::EnumerationCap { atoms: n, cap });
    }
    let mut out = Vec::new();
    let mut labels = vec![0usize; n];
    let mut maxes = vec![0usize; n];
    loop {
        out.push(Partition::from_labels(algebra, &labels)?);
        // Advance the restricted growth string: labels[i] <= 1 + max(labels[..i]).
        let mut i = n;
        loop {
            if i <= 1 {
                return Ok(out);
            }
            i -= 1;
            let prefix_max = maxes[i - 1];
            if labels[i] <= prefix_max {
                labels[i] += 1;
                maxes[i] = prefix_max.max(labels[i]);
                for j in i + 1..n {
                    labels[j] = 0;
                    maxes[j] = maxes[i];
                }
                break;
            }
        }
    }
}

/// Every event of the algebra, as atom masks over `0..2^#atoms`.
pub fn enumerate_events(algebra: &Arc<SetAlgebra>) -> Result<Vec<EventSet>> {
    let n = algebra.num_atoms();
    if n > 24 {
        return Err(Error::EnumerationCap { atoms: n, cap: 24 });
    }
    Ok((0u64..1 << n)
        .map(|bits| EventSet::from_bits(algebra, bits))
        .collect())
}

/// Coarsest common refinement of two partitions.
pub fn refine(p: &Partition, q: &Partition) -> Result<Partition> {
    same_algebra(&p.algebra, &q.algebra)?;
    let mut blocks = Vec::with_capacity(p.len() * q.len());
    for a in &p.blocks {
        for b in &q.blocks {
            let c = a.intersect(b)?;
            if !c.is_empty() {
                blocks.push(c);
            }
        }
    }
    Partition::new(&p.algebra, blocks)
}

/// Finite product `X_1 × ... × X_m` with the cylinder algebra of each coordinate.
///
/// Points are encoded in row-major order: coordinate 0 is the most
/// significant digit.
#[derive(Debug, Clone)]
pub struct ProductStructure {
    factor_sizes: Vec<usize>,
    strides: Vec<usize>,
    algebra: Arc<SetAlgebra>,
    coordinate_algebras: Vec<Partition>,
}

impl ProductStructure {
    pub fn factor_sizes(&self) -> &[usize] {
        &self.factor_sizes
    }

    pub fn num_coordinates(&self) -> usize {
        self.factor_sizes.len()
    }

    pub fn algebra(&self) -> &Arc<SetAlgebra> {
        &self.algebra
    }

    /// The cylinder partition generating the coordinate algebra `A_n`.
    pub fn coordinate_algebra(&self, n: usize) -> &Partition {
        &self.coordinate_algebras[n]
    }

    pub fn coordinate(&self, point: usize, n: usize) -> usize {
        (point / self.strides[n]) % self.factor_sizes[n]
    }

    /// Index of the cylinder of the join algebra `∨_{n ∈ coords} A_n`
    /// containing `point`.
    pub fn join_key(&self, point: usize, coords: &[usize]) -> usize {
        coords.iter().fold(0, |key, &n| {
            key * self.factor_sizes[n] + self.coordinate(point, n)
        })
    }

    pub fn join_size(&self, coords: &[usize]) -> usize {
        coords.iter().map(|&n| self.factor_sizes[n]).product()
    }

    /// Cylinder partition of the join algebra generated by `coords`.
    pub fn join_partition(&self, coords: &[usize]) -> Result<Partition> {
        let labels: Vec<usize> = (0..self.algebra.ground_size())
            .map(|p| self.join_key(p, coords))
            .collect();
        Partition::from_labels(&self.algebra, &labels)
    }
}

/// Builds the product space of the given factor sizes with singleton atoms.
pub fn make_product(
    factor_sizes: &[usize],
    ground_cap: usize,
) -> Result<(Arc<SetAlgebra>, ProductStructure)> {
    if factor_sizes.is_empty() {
        return Err(Error::InvalidAlgebra("no factors".into()));
    }
    if let Some(&s) = factor_sizes.iter().find(|&&s| s < 2) {
        return Err(Error::InvalidAlgebra(format!("factor size {s} < 2")));
    }
    let mut size: usize = 1;
    for &s in factor_sizes {
        size = size.saturating_mul(s);
        if size > ground_cap {
            return Err(Error::GroundCap {
                size,
                cap: ground_cap,
            });
        }
    }
    let algebra = SetAlgebra::power_set(size)?;
    let m = factor_sizes.len();
    let mut strides = vec![1; m];
    for n in (0..m.saturating_sub(1)).rev() {
        strides[n] = strides[n + 1] * factor_sizes[n + 1];
    }
    let mut ps = ProductStructure {
        factor_sizes: factor_sizes.to_vec(),
        strides,
        algebra: Arc::clone(&algebra),
        coordinate_algebras: Vec::with_capacity(m),
    };
    for n in 0..m {
        let part = ps.join_partition(&[n])?;
        ps.coordinate_algebras.push(part);
    }
    Ok((algebra, ps))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn bell(n: usize) -> usize {
        // Bell triangle.
        let mut row = vec![1usize];
        for _ in 0..n {
            let mut next = vec![*row.last().unwrap()];
            for &x in &row {
                let v = next.last().unwrap() + x;
                next.push(v);
            }
            row = next;
        }
        row[0]
    }

    #[test]
    fn make_algebra_examples() {
        let a = SetAlgebra::new(3, vec![vec![0, 1], vec![2]]).unwrap();
        assert_eq!(a.num_atoms(), 2);
        let p = SetAlgebra::new(4, vec![vec![0], vec![1], vec![2], vec![3]]).unwrap();
        assert_eq!(p.num_atoms(), 4);
        assert!(matches!(
            SetAlgebra::new(2, vec![vec![0], vec![0, 1]]),
            Err(Error::InvalidAlgebra(_))
        ));
        assert!(SetAlgebra::new(3, vec![vec![0, 1]]).is_err());
    }

    #[test]
    fn partition_counts_are_bell_numbers() {
        assert_eq!(bell(3), 5);
        assert_eq!(bell(4), 15);
        for n in 1..=6 {
            let a = SetAlgebra::power_set(n).unwrap();
            let parts = enumerate_partitions(&a, DEFAULT_ENUMERATION_CAP).unwrap();
            assert_eq!(parts.len(), bell(n), "n = {n}");
            let mut canon: Vec<_> = parts.iter().map(Partition::canonical).collect();
            canon.sort();
            canon.dedup();
            assert_eq!(canon.len(), parts.len());
            assert!(canon.contains(&vec![(0..n).collect::<Vec<_>>()]));
            assert!(canon.contains(&(0..n).map(|i| vec![i]).collect::<Vec<_>>()));
        }
    }

    #[test]
    fn enumeration_cap_is_enforced() {
        let a = SetAlgebra::power_set(11).unwrap();
        let err = enumerate_partitions(&a, DEFAULT_ENUMERATION_CAP).unwrap_err();
        assert!(err.to_string().contains("cap is 10"));
    }

    #[test]
    fn refine_examples() {
        let a = SetAlgebra::power_set(4).unwrap();
        let p = Partition::from_labels(&a, &[0, 0, 1, 1]).unwrap();
        assert_eq!(refine(&p, &p).unwrap().canonical(), p.canonical());
        let top = Partition::coarsest(&a);
        assert_eq!(refine(&top, &p).unwrap().canonical(), p.canonical());
        let q = Partition::from_labels(&a, &[0, 1, 0, 1]).unwrap();
        let r = refine(&p, &q).unwrap();
        assert_eq!(r.len(), 4);
        assert!(r.refines(&p) && r.refines(&q));
        let b = SetAlgebra::power_set(3).unwrap();
        assert!(refine(&p, &Partition::finest(&b)).is_err());
    }

    #[test]
    fn refine_bounds_block_count() {
        let a = SetAlgebra::power_set(4).unwrap();
        let parts = enumerate_partitions(&a, 10).unwrap();
        for p in &parts {
            for q in &parts {
                let r = refine(p, q).unwrap();
                assert!(r.len() <= p.len() * q.len());
                assert!(r.refines(p) && r.refines(q));
            }
        }
    }

    #[test]
    fn product_examples() {
        let (a, ps) = make_product(&[2, 2], DEFAULT_GROUND_CAP).unwrap();
        assert_eq!(a.ground_size(), 4);
        assert_eq!(ps.num_coordinates(), 2);
        assert_eq!(ps.coordinate_algebra(0).len(), 2);
        assert_eq!(ps.coordinate_algebra(1).len(), 2);
        let (a, _) = make_product(&[2, 3], DEFAULT_GROUND_CAP).unwrap();
        assert_eq!(a.ground_size(), 6);
        let (a, ps) = make_product(&[2, 2, 2], DEFAULT_GROUND_CAP).unwrap();
        assert_eq!(a.ground_size(), 8);
        assert_eq!(ps.num_coordinates(), 3);
        // Row-major encoding: point 6 = (1, 1, 0).
        assert_eq!(
            (0..3).map(|n| ps.coordinate(6, n)).collect::<Vec<_>>(),
            vec![1, 1, 0]
        );
        assert!(matches!(
            make_product(&[2; 21], DEFAULT_GROUND_CAP),
            Err(Error::GroundCap { .. })
        ));
        assert!(make_product(&[1, 2], DEFAULT_GROUND_CAP).is_err());
    }

    #[test]
    fn raw_subset_cover() {
        let a = SetAlgebra::new(3, vec![vec![0, 1], vec![2]]).unwrap();
        let b = RawSubset::from_points(3, [0]).unwrap();
        assert_eq!(b.cover(&a).unwrap().atoms(), vec![0]);
        assert_eq!(
            RawSubset::from_points(3, [0, 2]).unwrap().cover(&a).unwrap().atoms(),
            vec![0, 1]
        );
    }
}
