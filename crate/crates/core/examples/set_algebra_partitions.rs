//! Atoms, events, partitions and product spaces.

use charge_komlos::set_algebra::{enumerate_partitions, make_product, refine};
use charge_komlos::{EventSet, Partition, RawSubset, SetAlgebra};

fn main() -> charge_komlos::Result<()> {
    // Six points grouped into four atoms.
    let alg = SetAlgebra::new(6, vec![vec![0, 1], vec![2], vec![3, 4], vec![5]])?;
    println!("{} points, {} atoms", alg.ground_size(), alg.num_atoms());

    let a = EventSet::from_atoms(&alg, [0, 2])?;
    let b = EventSet::from_atoms(&alg, [2, 3])?;
    println!("A ∪ B points: {:?}", a.union(&b)?.points());
    println!("A ∩ B atoms:  {:?}", a.intersect(&b)?.atoms());
    println!("Aᶜ atoms:     {:?}", a.complement().atoms());

    // The smallest event containing an arbitrary point set.
    let raw = RawSubset::from_points(6, [1, 3])?;
    println!("cover of {{1, 3}}: atoms {:?}", raw.cover(&alg)?.atoms());

    let parts = enumerate_partitions(&alg, 10)?;
    println!("partitions of 4 atoms: {} (Bell number B4 = 15)", parts.len());

    let p = Partition::from_labels(&alg, &[0, 0, 1, 1])?;
    let q = Partition::from_labels(&alg, &[0, 1, 1, 0])?;
    let r = refine(&p, &q)?;
    println!("common refinement: {:?}", r.canonical());
    println!("refines p: {}", r.refines(&p));

    let (prod, ps) = make_product(&[2, 3], 1 << 10)?;
    println!(
        "product of sizes {:?}: {} points; point 4 has coordinates ({}, {})",
        ps.factor_sizes(),
        prod.ground_size(),
        ps.coordinate(4, 0),
        ps.coordinate(4, 1)
    );
    Ok(())
}
