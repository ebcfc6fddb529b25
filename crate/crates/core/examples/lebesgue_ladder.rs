//! Lebesgue decomposition and the orthogonal ladder induced by a family.

use charge_komlos::charge::{lebesgue_decompose, orthogonal_ladder};
use charge_komlos::scalar::ratio;
use charge_komlos::{Charge, SetAlgebra};

fn main() -> charge_komlos::Result<()> {
    let alg = SetAlgebra::power_set(5)?;
    let l = Charge::new(&alg, vec![ratio(1, 5); 5])?;
    let m = Charge::new(&alg, vec![ratio(1, 2), ratio(0, 1), ratio(1, 2), ratio(0, 1), ratio(0, 1)])?;

    let (ac, sing) = lebesgue_decompose(&l, &m, 0.0)?;
    println!("λ_ac = {:?}", ac.atoms().iter().map(ToString::to_string).collect::<Vec<_>>());
    println!("λ_s  = {:?}", sing.atoms().iter().map(ToString::to_string).collect::<Vec<_>>());
    println!("λ_ac ≪ m: {}, λ_s ⊥ m: {}", ac.is_abs_continuous(&m, 0.0), sing.is_singular(&m, 0.0));

    let fam = vec![
        m.clone(),
        Charge::new(&alg, vec![ratio(1, 4), ratio(1, 4), ratio(0, 1), ratio(1, 2), ratio(0, 1)])?,
    ];
    let ladder = orthogonal_ladder(&l, &fam, 0.0)?;
    for (j, part) in ladder.parts.iter().enumerate() {
        let atoms: Vec<String> = part.atoms().iter().map(ToString::to_string).collect();
        println!("λ_{j}^⊥ = {atoms:?}");
    }
    println!("pairwise singular: {}", ladder.pairwise_singular(0.0));
    println!("Σ‖λ_j^⊥‖ = {} = ‖λ‖ = {}", ladder.norm_sum(), l.variation_norm());
    Ok(())
}
