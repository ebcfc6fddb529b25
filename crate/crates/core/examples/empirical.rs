//! Empirical distributions of multinomial draws, fed to the extraction.

use charge_komlos::generators::multinomial_points;
use charge_komlos::komlos::{extract_positive, ExtractionConfig};
use charge_komlos::slln::empirical_distribution;
use charge_komlos::{Charge, Partition, ProbabilityCharge, SetAlgebra};

fn main() -> charge_komlos::Result<()> {
    let alg = SetAlgebra::power_set(8)?;
    let bins = Partition::from_labels(&alg, &[0, 0, 1, 1, 1, 2, 2, 3])?;
    let probs = [0.1, 0.1, 0.05, 0.15, 0.1, 0.2, 0.1, 0.2];
    let truth = [0.2, 0.3, 0.3, 0.2];

    let points = multinomial_points(&probs, 512, 42)?;
    let f = empirical_distribution(&points, &bins)?;
    for n in [1, 16, 512] {
        println!("F_{n} = {:?}", f[n - 1].atoms());
    }

    let seq: Vec<Charge> = f.into_iter().map(ProbabilityCharge::into_charge).collect();
    let l = ProbabilityCharge::uniform(seq[0].algebra());
    let r = extract_positive(&seq, &l, &ExtractionConfig::default())?;
    println!("ξ = {:?}", r.xi.atoms());
    println!("true bin probabilities = {truth:?}");
    println!("passed: {}", r.passed());
    Ok(())
}
