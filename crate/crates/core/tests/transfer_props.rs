use std::collections::HashSet;

use kitai_core::numeric::{ratio, Rational};
use kitai_core::report::Status;
use kitai_core::shiftspace::WeightSeq;
use kitai_core::transfer::{
    build_transfer_realization, lemma_seq_bijection, prop1_domain, prop1_permutation, su2_schedule, BasisSeed,
};
use proptest::prelude::*;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const PREFIX: usize = 1000;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(500))]

    #[test]
    fn lemma_seq_random_instances(seed in any::<u64>(), small_pct in 20u32..90, slope_den in 1i64..5) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let c = Rational::from_integer(1.into());
        // B receives about half the small entries and may need to fill every position
        let len = 250 * PREFIX / small_pct as usize + PREFIX;
        // small entries lie in [0, c]; large ones in (c, 200]
        let a_vals: Vec<Rational> = (0..len)
            .map(|_| {
                if rng.gen_range(0..100) < small_pct {
                    ratio(rng.gen_range(0..=16), 16)
                } else {
                    ratio(rng.gen_range(17..=3200), 16)
                }
            })
            .collect();
        let domain: Vec<u64> = (0..len as u64).collect();
        let a = |n: u64| a_vals[n as usize].clone();
        let b = |n: u64| ratio(3 + n as i64 / slope_den, 1);
        let plan = lemma_seq_bijection(&domain, &a, &c, &b, PREFIX).unwrap();
        prop_assert_eq!(plan.prefix.len(), PREFIX);
        prop_assert!(plan.valid());
        // independent re-check of the three properties
        let seen: HashSet<u64> = plan.prefix.iter().copied().collect();
        prop_assert_eq!(seen.len(), PREFIX);
        for (n, &x) in plan.prefix.iter().enumerate() {
            prop_assert!(a(x) <= b(n as u64), "a_pi({}) = {} > b = {}", n, a(x), b(n as u64));
        }
        let rule = plan.seq_rule.unwrap();
        let ranged: HashSet<u64> = rule.b_set.iter().chain(&rule.c_set).copied().collect();
        prop_assert_eq!(ranged, seen);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(50))]

    #[test]
    fn prop1_random_gap_patterns(seed in any::<u64>(), pattern in prop::collection::vec(2u64..12, 1..8)) {
        let mut n_k = vec![0u64];
        while (*n_k.last().unwrap() as usize) < PREFIX {
            let g = pattern[(n_k.len() - 1) % pattern.len()];
            n_k.push(n_k.last().unwrap() + g);
        }
        let mut phi = prop1_domain(&n_k);
        phi.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
        let plan = prop1_permutation(&n_k, &phi, PREFIX).unwrap();
        prop_assert!(plan.valid());
        prop_assert_eq!(plan.prefix.len(), PREFIX);
        // blocks: pi({n_k+1 .. n_(k+1)-1}) = {m_k+2 .. m_(k+1)-1}
        for k in 0..n_k.len() - 1 {
            let (lo, hi) = (n_k[k], n_k[k + 1]);
            let m = lo + k as u64;
            for l in 1..hi - lo {
                if ((lo + l) as usize) < PREFIX {
                    prop_assert_eq!(plan.prefix[(lo + l) as usize], m + l + 1);
                }
            }
            if (lo as usize) < PREFIX {
                prop_assert_eq!(plan.prefix[lo as usize], phi[k]);
            }
        }
    }
}

fn l2_weights() -> impl Strategy<Value = WeightSeq> {
    prop_oneof![
        Just(WeightSeq::harmonic()),
        (1u32..4).prop_map(|a| WeightSeq::power(a).unwrap()),
        (2i64..6).prop_map(|d| WeightSeq::geometric(ratio(1, d)).unwrap()),
        (1i64..4).prop_map(|n| WeightSeq::geometric(ratio(n, n + 1)).unwrap()),
    ]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(30))]

    #[test]
    fn su2_margins_hold(w in l2_weights(), k in 1usize..6) {
        let s = su2_schedule(&w, k).unwrap();
        prop_assert!(s.margins_hold);
        prop_assert!(s.weighted_sum <= s.weighted_envelope);
        prop_assert!(s.block_sum.upper().to_rational() <= s.block_envelope);
        prop_assert!(s.n_k.windows(2).all(|p| p[1] >= p[0] + 2));
        prop_assert!(s.b_k.iter().all(|b| *b >= ratio(3, 1)));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(8))]

    #[test]
    fn realization_residuals(w in l2_weights(), seed in any::<u64>(), n in 16usize..33) {
        let mut k = 2;
        let schedule = loop {
            let s = su2_schedule(&w, k).unwrap();
            if *s.n_k.last().unwrap() as usize >= n {
                break s;
            }
            k += 1;
        };
        prop_assume!(schedule.blocks_below(n as u64) >= 3);
        let r = build_transfer_realization(&w, &schedule, n, BasisSeed::Seeded(seed), 256).unwrap();
        let s = &r.summary;
        prop_assert!(s.orthonormality_residual.upper().to_f64() <= 1e-20);
        prop_assert!(s.intertwining_residual.upper().to_f64() <= 1e-9);
        prop_assert!(s.s_norms.iter().all(|c| c.holds));
        prop_assert_eq!(s.status, Status::Pass);
    }
}
