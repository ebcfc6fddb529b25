mod common;

use charge_komlos::charge::check_property_p;
use charge_komlos::scalar::{ratio, Exact};
use charge_komlos::set_algebra::{enumerate_events, enumerate_partitions, refine};
use charge_komlos::{Charge, EventSet, Partition, RawSubset, SetAlgebra};
use common::*;
use proptest::prelude::*;
use rand::Rng;

fn zero() -> Exact {
    ratio(0, 1)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn norm_is_the_partition_sup(seed in any::<u64>(), d in 1usize..=6) {
        let mut r = seeded(seed);
        let alg = random_algebra(&mut r, d);
        let x: Vec<f64> = (0..d).map(|_| r.random_range(-2.0..2.0)).collect();
        let f = Charge::new(&alg, x.clone()).unwrap();
        prop_assert!((f.variation_norm() - partition_sup_f64(&x)).abs() <= 1e-12);
        let v = random_ints(&mut r, d, -20, 20);
        prop_assert_eq!(exact_charge(&alg, &v, 9).variation_norm(), ratio(partition_sup_int(&v), 9));
    }

    #[test]
    fn lattice_identities_hold_exactly(seed in any::<u64>(), d in 1usize..=8) {
        let mut r = seeded(seed);
        let alg = random_algebra(&mut r, d);
        let f = exact_charge(&alg, &random_ints(&mut r, d, -9, 9), 5);
        let g = exact_charge(&alg, &random_ints(&mut r, d, -9, 9), 5);
        let two = ratio(1, 2);
        let diff = (&f - &g).abs();
        prop_assert_eq!(f.meet(&g).unwrap(), (&(&f + &g) - &diff).scale(&two));
        prop_assert_eq!(f.join(&g).unwrap(), (&(&f + &g) + &diff).scale(&two));
        prop_assert_eq!(&f.pos_part() - &f.neg_part(), f.clone());
        prop_assert_eq!(&f.pos_part() + &f.neg_part(), f.abs());
        prop_assert_eq!(f.meet(&f).unwrap(), f.clone());
        prop_assert_eq!(&f.meet(&g).unwrap() + &f.join(&g).unwrap(), &f + &g);
    }

    #[test]
    fn lattice_norm_is_monotone(seed in any::<u64>(), d in 1usize..=8) {
        let mut r = seeded(seed);
        let alg = random_algebra(&mut r, d);
        let f = exact_charge(&alg, &random_ints(&mut r, d, -9, 9), 4);
        // |g| ≥ |f| atomwise with arbitrary signs.
        let g_atoms: Vec<Exact> = f
            .atoms()
            .iter()
            .map(|x| {
                let bump = ratio(r.random_range(0..5), 4);
                let m = num_traits::Signed::abs(x) + bump;
                if r.random_bool(0.5) { m } else { -m }
            })
            .collect();
        let g = Charge::new(&alg, g_atoms).unwrap();
        prop_assert!(f.variation_norm() <= g.variation_norm());
    }

    #[test]
    fn charges_are_additive_and_restriction_intersects(seed in any::<u64>(), d in 1usize..=6) {
        let mut r = seeded(seed);
        let alg = random_algebra(&mut r, d);
        let f = exact_charge(&alg, &random_ints(&mut r, d, -9, 9), 3);
        let events = enumerate_events(&alg).unwrap();
        let b = &events[r.random_range(0..events.len())];
        let fb = f.restrict(b).unwrap();
        for a in &events {
            prop_assert_eq!(fb.value(a).unwrap(), f.value(&a.intersect(b).unwrap()).unwrap());
            let c = &events[r.random_range(0..events.len())];
            let c_minus_a = c.intersect(&a.complement()).unwrap();
            prop_assert_eq!(
                f.value(&a.union(&c_minus_a).unwrap()).unwrap(),
                f.value(a).unwrap() + f.value(&c_minus_a).unwrap()
            );
        }
        prop_assert_eq!(f.restrict(&EventSet::full(&alg)).unwrap(), f.clone());
        prop_assert_eq!(f.restrict(&EventSet::empty(&alg)).unwrap(), Charge::zero(&alg));
    }

    #[test]
    fn partition_sums_grow_under_refinement(seed in any::<u64>(), d in 1usize..=6) {
        let mut r = seeded(seed);
        let alg = random_algebra(&mut r, d);
        let f = exact_charge(&alg, &random_ints(&mut r, d, -9, 9), 2);
        let parts = enumerate_partitions(&alg, 10).unwrap();
        let p = &parts[r.random_range(0..parts.len())];
        let q = &parts[r.random_range(0..parts.len())];
        let pq = refine(p, q).unwrap();
        prop_assert!(pq.refines(p) && pq.refines(q));
        prop_assert!(f.partition_sum(p).unwrap() <= f.partition_sum(&pq).unwrap());
        prop_assert_eq!(f.partition_sum(&Partition::finest(&alg)).unwrap(), f.variation_norm());
        prop_assert_eq!(f.partition_sum(&Partition::coarsest(&alg)).unwrap(), num_traits::Signed::abs(&f.total()));
    }

    #[test]
    fn outer_measure_is_the_cheapest_cover(seed in any::<u64>(), d in 1usize..=6) {
        let mut r = seeded(seed);
        let alg = random_algebra(&mut r, d);
        let l = exact_charge(&alg, &random_ints(&mut r, d, 0, 9), 6);
        let pts: Vec<usize> = (0..alg.ground_size()).filter(|_| r.random_bool(0.3)).collect();
        let b = RawSubset::from_points(alg.ground_size(), pts.iter().copied()).unwrap();
        let best = enumerate_events(&alg)
            .unwrap()
            .into_iter()
            .filter(|e| pts.iter().all(|&p| e.contains_atom(alg.atom_of(p))))
            .map(|e| l.value(&e).unwrap())
            .min()
            .unwrap();
        prop_assert_eq!(l.outer_measure(&b, 0.0).unwrap(), best);
    }

    #[test]
    fn continuity_and_singularity_match_atom_supports(seed in any::<u64>(), d in 1usize..=8) {
        let mut r = seeded(seed);
        let alg = random_algebra(&mut r, d);
        let fi = random_ints(&mut r, d, -4, 4);
        let li = random_ints(&mut r, d, -4, 4);
        let f = exact_charge(&alg, &fi, 1);
        let l = exact_charge(&alg, &li, 1);
        let ac = (0..d).all(|a| li[a] != 0 || fi[a] == 0);
        let sing = (0..d).all(|a| li[a] == 0 || fi[a] == 0);
        prop_assert_eq!(f.is_abs_continuous(&l, 0.0), ac);
        prop_assert_eq!(f.is_singular(&l, 0.0), sing);
        prop_assert_eq!(f.abs().meet(&l.abs()).unwrap().variation_norm() == zero(), sing);
    }

    #[test]
    fn increasing_bounded_sequences_have_property_p(seed in any::<u64>(), d in 1usize..=6) {
        let mut r = seeded(seed);
        let alg = SetAlgebra::power_set(d).unwrap();
        let target: Vec<f64> = (0..d).map(|_| r.random_range(0.0..1.0)).collect();
        // Atomwise monotone convergence at geometric speed.
        let seq: Vec<Charge> = (0..64)
            .map(|n| {
                let s = 1.0 - 0.5f64.powi(n);
                Charge::new(&alg, target.iter().map(|t| s * t).collect()).unwrap()
            })
            .collect();
        let rep = check_property_p(&seq, 64, 1e-9).unwrap();
        prop_assert!(rep.holds);
        for (s, t) in rep.supremum.iter().zip(&target) {
            prop_assert!((s - t).abs() <= 1e-12);
        }
    }
}

#[test]
fn partition_counts_are_bell_numbers() {
    for (d, bell) in [(1, 1), (2, 2), (3, 5), (4, 15), (5, 52), (6, 203)] {
        let alg = SetAlgebra::power_set(d).unwrap();
        let parts = enumerate_partitions(&alg, 10).unwrap();
        assert_eq!(parts.len(), bell);
        assert_eq!(set_partitions(d).len(), bell);
        let mut canon: Vec<_> = parts.iter().map(Partition::canonical).collect();
        canon.sort();
        canon.dedup();
        assert_eq!(canon.len(), bell);
    }
}

#[test]
fn coarse_partition_can_hide_cancellation() {
    let alg = SetAlgebra::power_set(2).unwrap();
    let f = Charge::new(&alg, vec![1.0, -1.0]).unwrap();
    assert_eq!(f.partition_sum(&Partition::coarsest(&alg)).unwrap(), 0.0);
    assert_eq!(f.partition_sum(&Partition::finest(&alg)).unwrap(), 2.0);
}
