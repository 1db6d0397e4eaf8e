mod common;

use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use solenoid::ktheory::IntegerMatrix;
use solenoid::presolenoid::{
    edge_cover_matrix, orientation_check, parse_solenoid_file, power, validate_axioms, AxiomOptions, ParseError, WrappingRule,
};

use common::{bundled, random_conjugation_rule, random_wedge_rule};

fn rule_from_seed(seed: u64) -> WrappingRule {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    if seed.is_multiple_of(2) {
        random_wedge_rule(&mut rng)
    } else {
        random_conjugation_rule(&mut rng)
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn dsl_text_round_trips(seed in any::<u64>()) {
        let rule = rule_from_seed(seed);
        let text = rule.to_dsl();
        prop_assert_eq!(parse_solenoid_file(&text).unwrap(), rule);
    }

    #[test]
    fn powers_compose(seed in any::<u64>(), a in 1u32..=3, b in 1u32..=2) {
        let rule = rule_from_seed(seed);
        let direct = power(&rule, a * b).unwrap();
        let nested = power(&power(&rule, a).unwrap(), b).unwrap();
        prop_assert_eq!(direct.words(), nested.words());
    }

    /// Letter counts are multiplicative: the cover matrix of `h^k` is `H^k`.
    #[test]
    fn cover_matrix_of_a_power_is_the_matrix_power(seed in any::<u64>(), k in 1u64..=3) {
        let rule = rule_from_seed(seed);
        let h = edge_cover_matrix(&rule);
        prop_assert_eq!(edge_cover_matrix(&power(&rule, k as u32).unwrap()), h.pow(k));
    }

    /// Reversing edges is a change of coordinates: axioms and orientability are unchanged.
    #[test]
    fn flipping_edges_preserves_the_axioms(seed in any::<u64>(), mask in any::<u8>()) {
        let rule = rule_from_seed(seed);
        let flip: Vec<bool> = (0..rule.edge_count()).map(|i| mask >> i & 1 == 1).collect();
        let flipped = rule.with_flipped_edges(&flip);
        let opts = AxiomOptions::default();
        let (a, b) = (validate_axioms(&rule, &opts), validate_axioms(&flipped, &opts));
        prop_assert_eq!(a.failures(), b.failures());
        prop_assert_eq!(orientation_check(&rule).oriented(), orientation_check(&flipped).oriented());
    }
}

#[test]
fn bundled_rules_pass_or_fail_as_expected() {
    for name in ["w1", "w2", "w3", "w4", "dyadic"] {
        let r = validate_axioms(&bundled(name), &AxiomOptions::default());
        assert!(r.all_pass(), "{name}: {:?}", r.failures());
    }
    let r = validate_axioms(&bundled("disjoint"), &AxiomOptions::default());
    assert_eq!(r.failures(), vec!["mixing"]);
}

#[test]
fn squares_of_w1_and_w2_agree() {
    assert_eq!(power(&bundled("w1"), 2).unwrap(), power(&bundled("w2"), 2).unwrap());
    assert_ne!(bundled("w1"), bundled("w2"));
}

#[test]
fn w3_cover_matrix_counts_letters() {
    assert_eq!(edge_cover_matrix(&bundled("w3")), IntegerMatrix::from_rows(&[vec![65, 24], vec![7, 67]]));
}

#[test]
fn parse_errors_carry_positions() {
    let err = parse_solenoid_file("edges: a\nrule a = a c\n").unwrap_err();
    assert!(matches!(err, ParseError::UnknownEdge { line: 2, .. }), "{err}");
    let err = parse_solenoid_file("edges: a b\nrule a = a b\n").unwrap_err();
    assert!(matches!(err, ParseError::MissingRule { .. }), "{err}");
}
