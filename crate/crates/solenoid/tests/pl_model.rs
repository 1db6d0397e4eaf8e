mod common;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, Zero};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use solenoid::pl_model::{metric_d, pl_realization, PLPoint, PLRealization, SolenoidPoint};

use common::bundled;

fn realizations() -> Vec<(&'static str, PLRealization)> {
    ["w1", "w2", "w3", "w4", "dyadic"].into_iter().map(|n| (n, pl_realization(&bundled(n), 64).unwrap())).collect()
}

fn two() -> BigRational {
    BigRational::from_integer(BigInt::from(2))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    /// On one affine piece, `h` scales distances by the slope of the edge as long as both
    /// distances are realized along the edge (less than half of it).
    #[test]
    fn pieces_expand_distances_by_the_slope(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for (name, p) in realizations() {
            let edge = rng.gen_range(0..p.edge_count());
            let index = rng.gen_range(0..p.branches[edge].len());
            let piece = &p.branches[edge][index];
            let width = &piece.end - &piece.start;
            let frac = |rng: &mut ChaCha8Rng| BigRational::new(BigInt::from(rng.gen_range(0u32..=1024)), BigInt::from(1024));
            let x = PLPoint { edge, t: &piece.start + &width * frac(&mut rng) };
            let y = PLPoint { edge, t: &piece.start + &width * frac(&mut rng) };
            let gap = (&x.t - &y.t).abs();
            let image_gap = &gap * &p.slopes[edge];
            if gap * two() > p.lengths[edge] || image_gap.clone() * two() > p.lengths[piece.letter.edge] {
                continue;
            }
            let (hx, hy) = (p.eval_h(&x).unwrap(), p.eval_h(&y).unwrap());
            prop_assert_eq!(p.distance(&x, &y), (&x.t - &y.t).abs());
            prop_assert_eq!(p.distance(&hx, &hy), image_gap, "{}", name);
        }
    }

    /// Every inverse branch is a right inverse of `h`.
    #[test]
    fn inverse_branches_invert_h(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for (name, p) in realizations() {
            let x = p.random_point(&mut rng);
            for b in p.branches_over(&x) {
                let y = p.inverse_branch(&x, b).unwrap();
                prop_assert!(p.same_place(&p.eval_h(&y).unwrap(), &x), "{} {:?}", name, b);
            }
        }
    }

    /// `D` is a pseudometric on truncated points: zero on the diagonal, symmetric, and
    /// satisfies the triangle inequality exactly on the truncated sums.
    #[test]
    fn metric_axioms(seed in any::<u64>(), depth in 1usize..=8) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for (name, p) in realizations() {
            let x = SolenoidPoint::sample(&p, depth, &mut rng);
            let y = SolenoidPoint::sample(&p, depth, &mut rng);
            let z = SolenoidPoint::sample(&p, depth, &mut rng);
            prop_assert!(x.is_compatible(&p), "{}", name);
            let d = |a: &SolenoidPoint, b: &SolenoidPoint| metric_d(&p, a, b).unwrap().truncated;
            prop_assert!(d(&x, &x).is_zero());
            prop_assert_eq!(d(&x, &y), d(&y, &x));
            prop_assert!(d(&x, &z) <= d(&x, &y) + d(&y, &z), "{}", name);
            prop_assert!(d(&x, &y) <= p.diameter_bound.clone() * two());
        }
    }
}

#[test]
fn slopes_equal_lambda_when_it_is_an_integer() {
    for (name, p) in realizations() {
        if p.lambda.lo == p.lambda.hi {
            assert!(p.slopes.iter().all(|s| s == &p.lambda.lo), "{name}");
        }
        assert!(p.slopes.iter().all(|s| p.lambda.contains(s)), "{name}");
    }
}

#[test]
fn branches_tile_each_edge() {
    for (name, p) in realizations() {
        for (j, pieces) in p.branches.iter().enumerate() {
            assert!(pieces[0].start.is_zero(), "{name}");
            assert_eq!(pieces.last().unwrap().end, p.lengths[j], "{name}");
            assert!(pieces.windows(2).all(|w| w[0].end == w[1].start), "{name}");
            assert_eq!(pieces.len(), p.rule().word(j).len());
        }
    }
}
