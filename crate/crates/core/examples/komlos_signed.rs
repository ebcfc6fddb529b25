//! Signed sequences: two positive stages composed into one weight matrix.

use charge_komlos::generators::{alternating, signed_mixture};
use charge_komlos::komlos::{extract_signed, ExtractionConfig};
use charge_komlos::{Charge, ProbabilityCharge, SetAlgebra};

fn main() -> charge_komlos::Result<()> {
    let alg = SetAlgebra::power_set(8)?;
    let l = ProbabilityCharge::uniform(&alg);
    let cfg = ExtractionConfig {
        horizon: 256,
        ..ExtractionConfig::default()
    };

    let f = Charge::new(&alg, vec![0.1, -0.2, 0.05, 0.0, 0.3, -0.1, 0.0, 0.2])?;
    let r = extract_signed(&alternating(&f, 256), &l, &cfg)?;
    println!("alternating ±f: ‖ξ‖ = {:.3e}, passed {}", r.xi.variation_norm(), r.passed());

    let p = Charge::new(&alg, vec![0.125; 8])?;
    let seq = signed_mixture(&p, &l, 0.5, 256)?;
    let r = extract_signed(&seq, &l, &cfg)?;
    let stages = r.stages.as_ref().expect("signed runs keep their stages");
    println!("p minus singular bumps:");
    println!("  χ = {:?}", stages.positive.xi.atoms());
    println!("  ζ = {:?}", stages.negative.xi.atoms());
    println!("  ξ = χ − ζ = {:?}", r.xi.atoms());
    let check = r.weights.check();
    println!(
        "  γ = βα: {} rows, row sums within {:.1e}, forward {}, disjoint {}",
        r.weights.num_rows(),
        check.max_row_sum_error,
        check.forward,
        check.disjoint
    );
    println!("  passed: {}", r.passed());
    Ok(())
}
