mod common;

use num_bigint::BigInt;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use solenoid::building_blocks::{building_block_at, interval_system, projection_witness, stabilization_power};
use solenoid::presolenoid::{edge_cover_matrix, power, validate_axioms, AxiomOptions};

use common::{bundled, expanded_stats, passages, random_conjugation_rule, random_wedge_rule};

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    /// The recurrences `b ← H·b`, `a ← X·a + N·b` reproduce the letter and passage counts of
    /// the expanded words on random valid rules.
    #[test]
    fn recurrences_match_word_expansion(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let rule = if seed % 2 == 0 { random_wedge_rule(&mut rng) } else { random_conjugation_rule(&mut rng) };
        prop_assume!(validate_axioms(&rule, &AxiomOptions::default()).all_pass());
        let ps = passages(&rule);
        let iv = interval_system(&ps, 4, u128::MAX).unwrap();
        let stats = expanded_stats(&ps.rule, 4);
        for (i, level) in iv.levels.iter().enumerate() {
            let s = &stats[i][iv.start_edge];
            let mut a = vec![BigInt::from(0); ps.passage_count()];
            for (t, c) in &s.turns {
                a[ps.passage_index(*t).expect("every turn of an iterate is a passage")] += c;
            }
            prop_assert_eq!(&level.b, &s.letters);
            prop_assert_eq!(&level.a, &a);
        }
    }

    /// The stabilized rule is the base rule raised to the reported power.
    #[test]
    fn stabilization_is_a_power(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let rule = random_wedge_rule(&mut rng);
        prop_assume!(validate_axioms(&rule, &AxiomOptions::default()).all_pass());
        let ps = passages(&rule);
        prop_assert_eq!(&ps.rule, &power(&rule, ps.stabilization_power).unwrap());
        prop_assert_eq!(stabilization_power(&rule, 1024).unwrap(), ps.stabilization_power);
        prop_assert_eq!(&ps.h, &edge_cover_matrix(&ps.rule));
    }
}

#[test]
fn corpus_stabilization_powers() {
    for (name, m) in [("w2", 2), ("w4", 2), ("dyadic", 1)] {
        assert_eq!(passages(&bundled(name)).stabilization_power, m, "{name}");
    }
}

/// Once every passage occurs at least `2n+1` times, the block carries a projection loop
/// with trace bound `(2n+1)/min a`.
#[test]
fn deep_blocks_have_projection_witnesses() {
    for name in ["w2", "w4", "dyadic"] {
        let ps = passages(&bundled(name));
        let iv = interval_system(&ps, 8, u128::MAX).unwrap();
        let level = iv.levels.iter().position(|l| l.a.iter().all(|a| *a >= BigInt::from(2 * ps.edge_count() + 1))).unwrap() + 1;
        let block = building_block_at(&iv, &ps, level).unwrap();
        let w = projection_witness(&block).unwrap();
        assert!(!w.cycle.is_empty(), "{name}");
        let min = iv.levels[level - 1].a.iter().min().unwrap().clone();
        assert_eq!(w.trace_bound, num_rational::BigRational::new(BigInt::from(2 * ps.edge_count() + 1), min));
    }
}
