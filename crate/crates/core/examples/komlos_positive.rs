//! Extraction on non-negative sequences, and the dichotomy between a
//! non-trivial limit and asymptotic orthogonality.

use charge_komlos::generators::{constant, iid_charges, iid_mean, singular_family};
use charge_komlos::komlos::{extract_positive, test_asymptotic_orthogonality, ExtractionConfig};
use charge_komlos::{Charge, ProbabilityCharge, SetAlgebra};

fn report(label: &str, seq: &[Charge], l: &ProbabilityCharge) -> charge_komlos::Result<Charge> {
    let cfg = ExtractionConfig::default();
    let r = extract_positive(seq, l, &cfg)?;
    let tail = r.certified_tail();
    let worst = tail.iter().map(|c| c.norm_residual).fold(0.0, f64::max);
    println!("{label}:");
    println!("  rows {}, certified from row {}", r.certificates.len(), r.diagnostics.certified_from + 1);
    println!("  ‖ξ‖ = {:.6}, worst tail residual {worst:.3e}", r.xi.variation_norm());
    println!("  Σ λ(A_jᶜ) from row 1: {:.3e}", r.certificates[0].partial_sum);
    println!("  weights hold: {}, passed: {}", r.diagnostics.weight_check.holds(), r.passed());
    let orth = test_asymptotic_orthogonality(&seq[..cfg.horizon.min(seq.len())], 128, 0.05)?;
    println!("  asymptotically orthogonal: {}", orth.verdict);
    Ok(r.xi)
}

fn main() -> charge_komlos::Result<()> {
    let alg = SetAlgebra::power_set(16)?;
    let l = ProbabilityCharge::uniform(&alg);

    let xi = report("iid Dirichlet draws", &iid_charges(&alg, 512, 42, 1.0)?, &l)?;
    let dist = xi.try_sub(&iid_mean(&alg))?.variation_norm();
    println!("  distance to the mean charge: {dist:.4}");

    report("pairwise singular family", &singular_family(&l, 512), &l)?;

    let f = Charge::new(&alg, (0..16).map(|i| (i % 4) as f64 / 24.0).collect())?;
    report("constant sequence", &constant(&f, 512), &l)?;
    Ok(())
}
