//! Cesàro means of independent ±1 functions and their Cauchy certificates.

use charge_komlos::generators::pm_one_functions;
use charge_komlos::slln::{check_l0_bounded, default_grid, lambda_converges, run_slln, SllnConfig};
use charge_komlos::{ProbabilityCharge, SetAlgebra, Tolerances};

fn main() -> charge_komlos::Result<()> {
    let alg = SetAlgebra::power_set(64)?;
    let l = ProbabilityCharge::uniform(&alg);
    let f = pm_one_functions(&alg, 512, 42)?;
    let tol = Tolerances::default();

    let l0 = check_l0_bounded(&f, &l, &default_grid(), 64, 42, &tol)?;
    println!("bounded in L0 (estimate over {} hull points): {}", l0.samples, l0.bounded);
    let lc = lambda_converges(&f, &l, &[0.5], &tol)?;
    println!("f_n itself λ-converges to 0: {}", lc.verdict);

    let (trace, mu) = run_slln(&f, &l, &SllnConfig { seed: 42, ..SllnConfig::default() })?;
    for k in [1, 8, 64, 256, 512] {
        println!("‖S_{k}‖ = {:.4}", trace.partial_norms[k - 1]);
    }
    println!("schedule n_r = {:?}", trace.schedule);
    let tightest = trace
        .rows
        .iter()
        .map(|r| r.bound - r.gap)
        .fold(f64::INFINITY, f64::min);
    println!("{} recorded gaps, smallest slack {tightest:.4}", trace.rows.len());
    println!("μ = λ here: {}", mu.atoms().iter().all(|&m| (m - 1.0 / 64.0).abs() < 1e-15));
    println!("passed: {}", trace.passed());
    Ok(())
}
