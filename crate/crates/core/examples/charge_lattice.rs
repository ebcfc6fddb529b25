//! Norms, lattice operations and outer measure, in floating point and in
//! exact rational arithmetic.

use charge_komlos::scalar::ratio;
use charge_komlos::set_algebra::enumerate_partitions;
use charge_komlos::{Charge, EventSet, RawSubset, SetAlgebra};

fn main() -> charge_komlos::Result<()> {
    let alg = SetAlgebra::power_set(4)?;
    let f = Charge::new(&alg, vec![0.5, -0.25, 0.0, 0.75])?;
    let g = Charge::new(&alg, vec![0.25, 0.25, 0.5, 0.0])?;

    println!("f = {:?}", f.atoms());
    println!("‖f‖ = {}", f.variation_norm());
    let brute = enumerate_partitions(&alg, 10)?
        .iter()
        .map(|p| f.partition_sum(p))
        .collect::<charge_komlos::Result<Vec<f64>>>()?
        .into_iter()
        .fold(0.0, f64::max);
    println!("sup over partitions = {brute}");
    println!("f⁺ = {:?}, f⁻ = {:?}", f.pos_part().atoms(), f.neg_part().atoms());
    println!("f ∧ g = {:?}", f.meet(&g)?.atoms());
    println!("f ∨ g = {:?}", f.join(&g)?.atoms());

    // ‖p ∧ q‖ = min over events A of p(A) + q(Aᶜ), for positive p, q.
    let p = f.abs();
    let min_cover = (0..1u64 << 4)
        .map(|bits| {
            let a = EventSet::from_bits(&alg, bits);
            p.value(&a).unwrap() + g.value(&a.complement()).unwrap()
        })
        .fold(f64::INFINITY, f64::min);
    println!("‖|f| ∧ g‖ = {}, min cover = {min_cover}", p.meet(&g)?.variation_norm());

    let coarse = SetAlgebra::new(4, vec![vec![0, 1], vec![2, 3]])?;
    let l = Charge::new(&coarse, vec![0.3, 0.7])?;
    let raw = RawSubset::from_points(4, [2])?;
    println!("λ*({{2}}) on the coarse algebra = {}", l.outer_measure(&raw, 0.0)?);

    let fx = Charge::new(&alg, vec![ratio(1, 3), ratio(-1, 6), ratio(0, 1), ratio(1, 2)])?;
    println!("exact ‖f‖ = {}", fx.variation_norm());
    println!("f ≪ g: {}, f ⊥ g: {}", f.is_abs_continuous(&g, 0.0), f.is_singular(&g, 0.0));
    Ok(())
}
