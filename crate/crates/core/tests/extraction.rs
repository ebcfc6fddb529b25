mod common;

use charge_komlos::charge::product_charge;
use charge_komlos::generators::{
    coin_indicators, constant, doubling_scales, iid_charges, iid_mean, signed_mixture,
    singular_family, unbounded_ramp,
};
use charge_komlos::komlos::{
    extract_independent, extract_positive, extract_signed, extract_unbounded,
    test_asymptotic_orthogonality, ExtractionConfig,
};
use charge_komlos::set_algebra::make_product;
use charge_komlos::vector_charge::{extract_vector, RBoundConfig, SampleSpace, VectorCharge};
use charge_komlos::{Charge, EventSet, ProbabilityCharge, SetAlgebra, Tolerances};
use common::*;
use proptest::prelude::*;
use rand::Rng;

#[test]
fn iid_limit_is_the_tail_cesaro_average_near_the_mean() {
    let alg = SetAlgebra::power_set(16).unwrap();
    let l = ProbabilityCharge::uniform(&alg);
    let seq = iid_charges(&alg, 512, 42, 1.0).unwrap();
    let r = extract_positive(&seq, &l, &ExtractionConfig::default()).unwrap();

    // Every draw has norm 1, so all are kept and ξ averages draws 256..512.
    let tail = &seq[256..];
    let n = tail.len() as f64;
    let mean: Vec<f64> = (0..16)
        .map(|a| tail.iter().map(|f| f.atoms()[a]).sum::<f64>() / n)
        .collect();
    assert!(l1_dist(r.xi.atoms(), &mean) <= 1e-12);

    let m = iid_mean(&alg);
    for a in 0..16 {
        let sd = (tail.iter().map(|f| (f.atoms()[a] - mean[a]).powi(2)).sum::<f64>() / (n - 1.0)).sqrt();
        let err = (r.xi.atoms()[a] - m.atoms()[a]).abs();
        assert!(err <= 3.0 * sd / n.sqrt(), "atom {a}: {err} vs {}", 3.0 * sd / n.sqrt());
    }
}

#[test]
fn extraction_is_deterministic() {
    let alg = SetAlgebra::power_set(8).unwrap();
    let l = ProbabilityCharge::uniform(&alg);
    let seq = iid_charges(&alg, 256, 3, 0.5).unwrap();
    let cfg = ExtractionConfig { horizon: 256, ..Default::default() };
    let a = extract_positive(&seq, &l, &cfg).unwrap();
    let b = extract_positive(&seq, &l, &cfg).unwrap();
    assert_eq!(a.certificates_csv(), b.certificates_csv());
    assert_eq!(a.xi, b.xi);
    assert_eq!(a.weights, b.weights);
}

#[test]
fn orthogonality_separates_the_dichotomy() {
    let alg = SetAlgebra::power_set(16).unwrap();
    let l = ProbabilityCharge::uniform(&alg);
    let sing = singular_family(&l, 512);
    assert!(test_asymptotic_orthogonality(&sing, 128, 0.05).unwrap().verdict);
    let f = Charge::uniform(&alg);
    let cons = constant(&f, 512);
    assert!(!test_asymptotic_orthogonality(&cons, 128, 0.05).unwrap().verdict);
    let r = extract_positive(&cons, &l, &ExtractionConfig::default()).unwrap();
    assert!(l1_dist(r.xi.atoms(), f.atoms()) <= 1e-12);
}

#[test]
fn signed_mixture_recovers_the_positive_part() {
    let alg = SetAlgebra::power_set(8).unwrap();
    let l = ProbabilityCharge::uniform(&alg);
    let p = Charge::new(&alg, vec![0.125; 8]).unwrap();
    let seq = signed_mixture(&p, &l, 0.5, 256).unwrap();
    let r = extract_signed(&seq, &l, &ExtractionConfig { horizon: 256, ..Default::default() }).unwrap();
    // The perturbations live on the first eight inputs only, so the tail
    // average of the negative parts vanishes.
    assert!(l1_dist(r.xi.atoms(), p.atoms()) <= 1e-6, "{:?}", r.xi.atoms());
    weights_ok(r.weights.rows(), 1e-12).unwrap();
    assert!(r.passed(), "{:?}", r.failures);
}

#[test]
fn unbounded_ramp_flags_b_and_keeps_mu_elsewhere() {
    let alg = SetAlgebra::power_set(5).unwrap();
    let l = ProbabilityCharge::uniform(&alg);
    let mu = Charge::new(&alg, vec![0.3, 0.0, 0.1, 0.2, 0.05]).unwrap();
    for atoms in [vec![1], vec![0, 3], vec![2, 3, 4]] {
        let b = EventSet::from_atoms(&alg, atoms.clone()).unwrap();
        let seq = unbounded_ramp(&l, &b, &mu, 256).unwrap();
        let cfg = ExtractionConfig { horizon: 256, ..Default::default() };
        let r = extract_unbounded(&seq, &l, &cfg, 1e-3).unwrap();
        assert_eq!(r.xi.infinite().atoms(), atoms);
        for a in 0..5 {
            if !b.contains_atom(a) {
                assert!((r.xi.finite().atoms()[a] - mu.atoms()[a]).abs() <= 1e-6);
            }
        }
        assert_eq!(r.xi.value(&b).unwrap(), None);
    }
}

fn single_coin_rows() -> ExtractionConfig {
    ExtractionConfig {
        horizon: 12,
        block_size: 1,
        max_block: 1,
        norm_subsequence: false,
        ..Default::default()
    }
}

#[test]
fn rare_heads_cutoff_grows_as_epsilon_shrinks() {
    let (_, ps) = make_product(&[2; 12], 1 << 20).unwrap();
    let factors: Vec<Vec<f64>> = (0..12)
        .map(|i| if i < 6 { vec![0.998, 0.002] } else { vec![1.0, 0.0] })
        .collect();
    let l = product_charge(&ps, &factors, &Tolerances::default()).unwrap();
    let seq = coin_indicators(&l, &ps, &doubling_scales(12)).unwrap();
    let mut last = 0;
    for eps in [0.05, 0.01, 0.005, 0.001, 1e-4] {
        let r = extract_independent(&seq, &l, &ps, &single_coin_rows(), eps).unwrap();
        // Row n is coin n alone with value 2^{n+1} > 2^n on heads, so each
        // factor is a tails probability and rows n > N contribute
        // 0.998^{max(0, 6 − N)}.
        let tail = |nn: usize| 0.998f64.powi(6usize.saturating_sub(nn) as i32);
        let oracle = (0..=12).find(|&nn| tail(nn) > 1.0 - eps).unwrap();
        assert_eq!(r.summary.product_cutoff, oracle, "eps {eps}");
        assert_eq!(r.cutoff, oracle, "eps {eps}");
        assert!(r.cutoff >= last);
        last = r.cutoff;
        assert!((r.summary.product - tail(oracle)).abs() <= 1e-12);
        assert!((l.value(&r.a_eps).unwrap() - tail(oracle)).abs() <= 1e-12);
        assert!(r.passed(), "{:?}", r.failures);
    }
    assert_eq!(last, 6);
}

#[test]
fn limit_mass_outside_a_eps_raises_the_cutoff() {
    let (_, ps) = make_product(&[2; 12], 1 << 20).unwrap();
    let l = product_charge(&ps, &vec![vec![0.998, 0.002]; 12], &Tolerances::default()).unwrap();
    let seq = coin_indicators(&l, &ps, &doubling_scales(12)).unwrap();
    let r = extract_independent(&seq, &l, &ps, &single_coin_rows(), 0.01).unwrap();
    let oracle = (0..=12).find(|&nn| 0.998f64.powi(12 - nn as i32) > 0.99).unwrap();
    assert_eq!(r.summary.product_cutoff, oracle);
    // ξ sits on the heads of the late coins, so only A_ε = Ω keeps it inside.
    assert_eq!(r.cutoff, 12);
    assert_eq!(r.summary.xi_outside, 0.0);
    assert!(r.a_eps.complement().is_empty());
}

#[test]
fn dependent_coordinates_are_rejected() {
    let (alg, ps) = make_product(&[2, 2], 64).unwrap();
    // Perfectly correlated coins.
    let atoms: Vec<f64> = (0..4)
        .map(|a| {
            let p = alg.atom_points(a)[0];
            if ps.coordinate(p, 0) == ps.coordinate(p, 1) { 0.5 } else { 0.0 }
        })
        .collect();
    let l = ProbabilityCharge::new(Charge::new(&alg, atoms).unwrap(), &Tolerances::default()).unwrap();
    let seq = coin_indicators(&l, &ps, &[1.0, 1.0]).unwrap();
    let cfg = ExtractionConfig { horizon: 2, ..single_coin_rows() };
    assert!(matches!(
        extract_independent(&seq, &l, &ps, &cfg, 0.1),
        Err(charge_komlos::Error::NotIndependent { .. })
    ));
}

#[test]
fn vector_slices_match_scalar_extractions() {
    let alg = SetAlgebra::power_set(3).unwrap();
    let l = ProbabilityCharge::uniform(&alg);
    let space = SampleSpace::uniform(2).unwrap();
    let a = iid_charges(&alg, 128, 11, 1.0).unwrap();
    let f = Charge::new(&alg, vec![0.2, 0.5, 0.3]).unwrap();
    let b = constant(&f, 128);
    let seq: Vec<VectorCharge> = (0..128)
        .map(|n| VectorCharge::from_slices(&[a[n].clone(), b[n].clone()], &space).unwrap())
        .collect();
    let cfg = ExtractionConfig { horizon: 128, ..Default::default() };
    let r = extract_vector(&seq, &l, &space, &cfg, &RBoundConfig::default()).unwrap();
    for (w, s) in [&a, &b].into_iter().enumerate() {
        let scalar = extract_positive(s, &l, &cfg).unwrap();
        assert!(l1_dist(r.xi.slice(w).atoms(), scalar.xi.atoms()) <= 1e-6);
    }
    assert!(r.passed(), "{:?}", r.failures);
    assert!((r.prob_h - 1.0).abs() <= 1e-12);
}

#[test]
fn ba0_norm_matches_the_partition_sweep() {
    let mut rg = seeded(5);
    for d in 1..=5 {
        let alg = random_algebra(&mut rg, d);
        let space = SampleSpace::new(vec![0.2, 0.3, 0.5], &Tolerances::default()).unwrap();
        let table: Vec<Vec<f64>> = (0..d).map(|_| (0..3).map(|_| rg.random_range(-1.0..1.0)).collect()).collect();
        let f = VectorCharge::new(&alg, &space, table).unwrap();
        assert!((f.ba0_norm() - f.ba0_norm_brute_force(6).unwrap()).abs() <= 1e-12);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn certificates_hold_on_random_bounded_sequences(seed in any::<u64>(), d in 1usize..=6, len in 8usize..=96) {
        let mut r = seeded(seed);
        let alg = SetAlgebra::power_set(d).unwrap();
        let raw: Vec<f64> = (0..d).map(|_| r.random_range(0.05..1.0)).collect();
        let total: f64 = raw.iter().sum();
        let l = ProbabilityCharge::new(
            Charge::new(&alg, raw.iter().map(|x| x / total).collect()).unwrap(),
            &Tolerances::default(),
        ).unwrap();
        let seq: Vec<Charge> = (0..len)
            .map(|_| Charge::new(&alg, (0..d).map(|_| r.random_range(0.0..2.0)).collect()).unwrap())
            .collect();
        let cfg = ExtractionConfig { horizon: len, ..Default::default() };
        let res = extract_positive(&seq, &l, &cfg).unwrap();
        prop_assert!(weights_ok(res.weights.rows(), 1e-12).is_ok());
        let sup = seq.iter().map(|f| f.variation_norm()).fold(0.0, f64::max);
        for (n, c) in res.certificates.iter().enumerate() {
            let bound = (1.0 + sup) / 2f64.powi(n as i32 + 1);
            prop_assert!(c.partial_sum <= bound + 1e-9);
        }
        for ladder in &res.ladders {
            prop_assert!(ladder.restr_residual <= 1e-9);
            prop_assert!(ladder.is_monotone(1e-12));
        }
    }
}
