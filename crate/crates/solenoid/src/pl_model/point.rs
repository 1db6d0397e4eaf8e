//! Truncated points of the inverse limit and the metric `D`.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use rand::Rng;
use serde::Serialize;

use super::{serialize_rat, Branch, PLError, PLPoint, PLRealization};

/// `(x₀, …, x_N)` with `h(x_{i+1}) = x_i`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SolenoidPoint {
    pub coords: Vec<PLPoint>,
}

impl SolenoidPoint {
    /// Truncation depth `N`.
    pub fn depth(&self) -> usize {
        self.coords.len() - 1
    }

    /// Starts at `x0` and pulls back through `choices[i]` to get `x_{i+1}`.
    pub fn lift(p: &PLRealization, x0: PLPoint, choices: &[Branch]) -> Result<Self, PLError> {
        p.check(&x0)?;
        let mut coords = vec![x0];
        for &b in choices {
            let next = p.inverse_branch(coords.last().unwrap(), b)?;
            coords.push(next);
        }
        Ok(SolenoidPoint { coords })
    }

    /// A random point of depth `depth`: random `x₀`, then a uniformly chosen branch over
    /// each coordinate.
    pub fn sample<R: Rng>(p: &PLRealization, depth: usize, rng: &mut R) -> Self {
        let mut coords = vec![p.random_point(rng)];
        for _ in 0..depth {
            let x = coords.last().unwrap();
            let over = p.branches_over(x);
            let b = over[rng.gen_range(0..over.len())];
            coords.push(p.inverse_branch(x, b).expect("a branch over the edge pulls back every point"));
        }
        SolenoidPoint { coords }
    }

    /// Whether `h(x_{i+1}) = x_i` holds exactly at every level.
    pub fn is_compatible(&self, p: &PLRealization) -> bool {
        self.coords.windows(2).all(|w| p.eval_h(&w[1]).map(|y| p.same_place(&y, &w[0])).unwrap_or(false))
    }
}

/// `D(x, y) = Σ 2^{-i} d(x_i, y_i)`: the exact truncated sum plus a bound for the tail.
#[derive(Clone, Debug, Serialize)]
pub struct MetricValue {
    #[serde(serialize_with = "serialize_rat")]
    pub truncated: BigRational,
    /// `Σ_{i>N} 2^{-i}·diam Γ = 2^{-N}·diam Γ`, with the diameter bound of the realization.
    #[serde(serialize_with = "serialize_rat")]
    pub tail_bound: BigRational,
    pub approx: f64,
}

impl MetricValue {
    pub fn lower(&self) -> &BigRational {
        &self.truncated
    }

    pub fn upper(&self) -> BigRational {
        &self.truncated + &self.tail_bound
    }
}

pub fn metric_d(p: &PLRealization, x: &SolenoidPoint, y: &SolenoidPoint) -> Result<MetricValue, PLError> {
    if x.depth() != y.depth() {
        return Err(PLError::DepthMismatch(x.depth(), y.depth()));
    }
    let mut truncated = BigRational::zero();
    let mut weight = BigRational::one();
    let half = BigRational::new(BigInt::one(), BigInt::from(2));
    for (a, b) in x.coords.iter().zip(&y.coords) {
        truncated += &weight * p.distance(a, b);
        weight *= &half;
    }
    let tail_bound = BigRational::new(BigInt::one(), BigInt::one() << x.depth()) * &p.diameter_bound;
    let approx = truncated.to_f64().unwrap_or(f64::NAN);
    Ok(MetricValue { truncated, tail_bound, approx })
}

#[cfg(test)]
mod tests {
    use super::super::pl_realization;
    use super::*;
    use crate::presolenoid::corpus;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn samples_are_compatible_and_at_distance_zero_from_themselves() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let p = pl_realization(&corpus::w4(), 64).unwrap();
        for _ in 0..50 {
            let x = SolenoidPoint::sample(&p, 8, &mut rng);
            assert!(x.is_compatible(&p));
            assert!(metric_d(&p, &x, &x).unwrap().truncated.is_zero());
        }
    }

    #[test]
    fn points_differing_only_at_the_last_level() {
        let p = pl_realization(&corpus::w2(), 64).unwrap();
        // Both letters of a ↦ b a and b ↦ b a lie over edge a, so two branches pull back
        // the same x₇ to different x₈.
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let x = SolenoidPoint::sample(&p, 8, &mut rng);
        let over = p.branches_over(&x.coords[7]);
        let mut y = x.clone();
        let other = over.iter().find(|&&b| p.inverse_branch(&x.coords[7], b).unwrap() != x.coords[8]).unwrap();
        y.coords[8] = p.inverse_branch(&x.coords[7], *other).unwrap();
        assert!(y.is_compatible(&p));
        let d = metric_d(&p, &x, &y).unwrap();
        assert!(!d.truncated.is_zero());
        let bound = BigRational::new(BigInt::one(), BigInt::from(256)) * &p.diameter_bound;
        assert!(d.truncated <= bound);
    }

    #[test]
    fn lift_follows_the_choices() {
        let p = pl_realization(&corpus::dyadic(), 64).unwrap();
        let x0 = PLPoint { edge: 0, t: BigRational::new(1.into(), 3.into()) };
        let b = Branch { edge: 0, index: 1 };
        let x = SolenoidPoint::lift(&p, x0, &[b, b]).unwrap();
        assert_eq!(x.coords[2].t, BigRational::new(5.into(), 6.into()));
        assert!(x.is_compatible(&p));
    }

    #[test]
    fn depth_mismatch() {
        let p = pl_realization(&corpus::dyadic(), 64).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let (x, y) = (SolenoidPoint::sample(&p, 3, &mut rng), SolenoidPoint::sample(&p, 4, &mut rng));
        assert_eq!(metric_d(&p, &x, &y).unwrap_err(), PLError::DepthMismatch(3, 4));
    }
}
