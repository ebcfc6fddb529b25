//! Independent coordinates: the exceptional event is controlled by an
//! exact product of marginal probabilities.

use charge_komlos::charge::product_charge;
use charge_komlos::generators::{coin_indicators, doubling_scales};
use charge_komlos::komlos::{extract_independent, ExtractionConfig};
use charge_komlos::set_algebra::make_product;
use charge_komlos::Tolerances;

fn main() -> charge_komlos::Result<()> {
    let (_, ps) = make_product(&[2; 12], 1 << 20)?;

    // Fair coins, f_n = 2^{n+1} 1{x_n = 1}, default configuration.
    let fair = product_charge(&ps, &vec![vec![0.5, 0.5]; 12], &Tolerances::default())?;
    let seq = coin_indicators(&fair, &ps, &doubling_scales(12))?;
    let cfg = ExtractionConfig {
        horizon: 12,
        ..ExtractionConfig::default()
    };
    let r = extract_independent(&seq, &fair, &ps, &cfg, 0.05)?;
    let s = &r.summary;
    println!(
        "fair coins: {} row(s), N = {}, product {:.6}, l(A_ε) = {:.6}, |G − ξ|(A_ε) = {:.1e}, passed {}",
        r.row_probabilities.len(),
        s.cutoff,
        s.product,
        s.measure,
        s.residual,
        r.passed()
    );

    // The first six coins show heads with probability 0.002, the last six
    // never do. Each row is one coin and l(g_n ≤ 2^n) is the tails
    // probability, so N moves with ε. N_λ is the product cutoff alone; N
    // also keeps ξ(A_εᶜ) below ε.
    let factors: Vec<Vec<f64>> = (0..12)
        .map(|i| if i < 6 { vec![0.998, 0.002] } else { vec![1.0, 0.0] })
        .collect();
    let rare = product_charge(&ps, &factors, &Tolerances::default())?;
    let seq = coin_indicators(&rare, &ps, &doubling_scales(12))?;
    let cfg = ExtractionConfig {
        horizon: 12,
        block_size: 1,
        max_block: 1,
        norm_subsequence: false,
        ..ExtractionConfig::default()
    };
    for eps in [0.05, 0.01, 0.005, 0.001] {
        let r = extract_independent(&seq, &rare, &ps, &cfg, eps)?;
        let s = &r.summary;
        println!(
            "rare heads, ε = {eps}: N_λ = {:2}, N = {:2}, product {:.6} = l(A_ε) {:.6}, ξ(A_εᶜ) = {:.4}, passed {}",
            s.product_cutoff,
            s.cutoff,
            s.product,
            s.measure,
            s.xi_outside,
            r.passed()
        );
    }
    Ok(())
}
