//! Sequences without a norm bound: atoms where mass escapes are flagged
//! as carrying an infinite limit.

use charge_komlos::generators::unbounded_ramp;
use charge_komlos::komlos::{extract_unbounded, ExtractionConfig};
use charge_komlos::{Charge, EventSet, ProbabilityCharge, SetAlgebra};

fn main() -> charge_komlos::Result<()> {
    let alg = SetAlgebra::power_set(6)?;
    let l = ProbabilityCharge::uniform(&alg);
    let b = EventSet::from_atoms(&alg, [0, 2])?;
    let mu = Charge::new(&alg, vec![0.0, 0.2, 0.0, 0.1, 0.05, 0.15])?;
    let seq = unbounded_ramp(&l, &b, &mu, 256)?;

    let cfg = ExtractionConfig {
        horizon: 256,
        ..ExtractionConfig::default()
    };
    let r = extract_unbounded(&seq, &l, &cfg, 1e-3)?;
    println!("resolved levels: 0..={}", r.level_cap);
    println!("infinite on atoms {:?}", r.xi.infinite().atoms());
    println!("finite part {:?}", r.xi.finite().atoms());
    let off_b = r.xi.finite().try_sub(&mu.restrict(&b.complement())?)?;
    println!("distance to μ off B: {:.3e}", off_b.variation_norm());
    println!("ξ(B) = {:?}", r.xi.value(&b)?);
    println!("passed: {}", r.passed());
    Ok(())
}
