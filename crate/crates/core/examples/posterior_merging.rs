//! Two priors over a coin's bias, updated on the same flips: their
//! disagreement vanishes and the disagreements are asymptotically
//! orthogonal.

use charge_komlos::komlos::test_asymptotic_orthogonality;
use charge_komlos::scenario::theta_priors;
use charge_komlos::slln::{bernoulli_mixture_scenario, posterior_scenario};
use charge_komlos::set_algebra::make_product;
use charge_komlos::{ProbabilityCharge, SetAlgebra};

fn main() -> charge_komlos::Result<()> {
    let alg = SetAlgebra::power_set(21)?;
    let (thetas, p1, p2) = theta_priors(&alg, 21)?;
    let m = bernoulli_mixture_scenario(&thetas, &p1, &p2, 0.3, 200, 42)?;
    for n in [1, 10, 50, 200] {
        println!("‖F¹_{n} − F²_{n}‖ = {:.5}", m.disagreements[n - 1].variation_norm());
    }
    let orth = test_asymptotic_orthogonality(&m.disagreements, 50, 0.05)?;
    println!("asymptotically orthogonal: {}", orth.verdict);

    // The same update on an explicit product of three coordinates.
    let (prod, ps) = make_product(&[2, 2, 2], 64)?;
    let uniform = ProbabilityCharge::uniform(&prod);
    let d = posterior_scenario(&uniform, &uniform, &ps, &[1, 0, 1])?;
    println!("identical priors never disagree: {}", d.iter().all(|c| c.variation_norm() == 0.0));
    Ok(())
}
