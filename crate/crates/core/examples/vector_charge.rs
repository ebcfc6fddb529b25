//! Charges valued in a finite L¹ space: the ba₀ norm, boundedness in
//! probability, and a joint extraction across sample points.

use charge_komlos::generators::iid_charges;
use charge_komlos::komlos::ExtractionConfig;
use charge_komlos::vector_charge::{
    check_r_bounded, extract_vector, RBoundConfig, SampleSpace, VectorCharge,
};
use charge_komlos::{Charge, ProbabilityCharge, SetAlgebra, Tolerances};

fn main() -> charge_komlos::Result<()> {
    let alg = SetAlgebra::power_set(4)?;
    let l = ProbabilityCharge::uniform(&alg);
    let space = SampleSpace::new(vec![0.5, 0.3, 0.2], &Tolerances::default())?;

    let f = VectorCharge::new(
        &alg,
        &space,
        vec![
            vec![0.1, -0.4, 0.0],
            vec![0.2, 0.1, -0.3],
            vec![-0.1, 0.0, 0.5],
            vec![0.0, 0.2, 0.1],
        ],
    )?;
    println!("‖F‖_ba0 = {:.6}", f.ba0_norm());
    println!("partition brute force = {:.6}", f.ba0_norm_brute_force(10)?);

    // Sample point w carries its own iid sequence.
    let len = 256;
    let slices: Vec<Vec<Charge>> = (0..3)
        .map(|w| iid_charges(&alg, len, 100 + w, 1.0))
        .collect::<charge_komlos::Result<_>>()?;
    let seq: Vec<VectorCharge> = (0..len)
        .map(|n| {
            let s: Vec<Charge> = slices.iter().map(|v| v[n].clone()).collect();
            VectorCharge::from_slices(&s, &space)
        })
        .collect::<charge_komlos::Result<_>>()?;

    let bound = RBoundConfig::default();
    let rb = check_r_bounded(&seq, &l, &bound, &Tolerances::default())?;
    println!("ratio level {:.3} (bounded: {}, method {:?})", rb.level, rb.bounded, rb.method);

    let cfg = ExtractionConfig {
        horizon: len,
        ..ExtractionConfig::default()
    };
    let r = extract_vector(&seq, &l, &space, &cfg, &bound)?;
    for w in 0..3 {
        println!("ξ(·, w{w}) = {:?}", r.xi.slice(w).atoms());
    }
    let last = r.certificates.last().expect("at least one row");
    println!("P(B_n) at the last row: {:.6}, P(H) = {:.6}", last.prob_b, r.prob_h);
    println!("passed: {}", r.passed());
    Ok(())
}
