//! Characteristic polynomials, real-root isolation and Perron–Frobenius data,
//! all in exact integer / rational arithmetic.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::Serialize;

use crate::ktheory::matrix::IntegerMatrix;
use crate::ktheory::smith::kernel_basis;

/// Default enclosure width exponent: intervals are refined to width ≤ 2^-64.
pub const DEFAULT_PRECISION_BITS: u32 = 64;

/// A closed rational interval `[lo, hi]`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RealInterval {
    pub lo: BigRational,
    pub hi: BigRational,
}

impl RealInterval {
    pub fn point(x: BigRational) -> Self {
        RealInterval { lo: x.clone(), hi: x }
    }

    pub fn width(&self) -> BigRational {
        &self.hi - &self.lo
    }

    pub fn contains(&self, x: &BigRational) -> bool {
        &self.lo <= x && x <= &self.hi
    }

    pub fn intersect(&self, other: &RealInterval) -> RealInterval {
        RealInterval {
            lo: self.lo.clone().max(other.lo.clone()),
            hi: self.hi.clone().min(other.hi.clone()),
        }
    }

    pub fn midpoint_f64(&self) -> f64 {
        ((&self.lo + &self.hi) / BigRational::from_integer(2.into())).to_f64().unwrap_or(f64::NAN)
    }
}

/// Characteristic polynomial `det(xI − A)`, coefficients from constant term upward (monic).
pub fn char_poly(a: &IntegerMatrix) -> Vec<BigInt> {
    assert!(a.is_square());
    let n = a.rows();
    let mut c = vec![BigInt::zero(); n + 1];
    c[n] = BigInt::one();
    let mut m = IntegerMatrix::zeros(n, n);
    let id = IntegerMatrix::identity(n);
    for k in 1..=n {
        m = a.mul(&m).add(&id.scale(&c[n - k + 1]));
        let tr = a.mul(&m).trace();
        c[n - k] = -(tr / BigInt::from(k as u64));
    }
    c
}

fn to_rat(p: &[BigInt]) -> Vec<BigRational> {
    p.iter().map(|x| BigRational::from_integer(x.clone())).collect()
}

fn trim(p: &mut Vec<BigRational>) {
    while p.len() > 1 && p.last().is_some_and(|x| x.is_zero()) {
        p.pop();
    }
}

fn eval(p: &[BigRational], x: &BigRational) -> BigRational {
    p.iter().rev().fold(BigRational::zero(), |acc, c| acc * x + c)
}

pub fn eval_int(p: &[BigInt], x: &BigInt) -> BigInt {
    p.iter().rev().fold(BigInt::zero(), |acc, c| acc * x + c)
}

fn derivative(p: &[BigRational]) -> Vec<BigRational> {
    if p.len() <= 1 {
        return vec![BigRational::zero()];
    }
    p.iter().enumerate().skip(1).map(|(i, c)| c * BigRational::from_integer(BigInt::from(i))).collect()
}

fn poly_rem(a: &[BigRational], b: &[BigRational]) -> Vec<BigRational> {
    let mut b = b.to_vec();
    trim(&mut b);
    let mut r = a.to_vec();
    trim(&mut r);
    let db = b.len() - 1;
    let lead = b[db].clone();
    while r.len() > db && !is_zero_poly(&r) {
        let shift = r.len() - 1 - db;
        let q = r.last().unwrap() / &lead;
        for (i, c) in b.iter().enumerate() {
            r[i + shift] -= &q * c;
        }
        r.pop();
        trim(&mut r);
        if db == 0 {
            // Division by a constant leaves no remainder.
            return vec![BigRational::zero()];
        }
    }
    r
}

fn is_zero_poly(p: &[BigRational]) -> bool {
    p.iter().all(|c| c.is_zero())
}

fn poly_gcd(a: &[BigRational], b: &[BigRational]) -> Vec<BigRational> {
    let (mut x, mut y) = (a.to_vec(), b.to_vec());
    trim(&mut x);
    trim(&mut y);
    while !is_zero_poly(&y) {
        let r = poly_rem(&x, &y);
        x = y;
        y = r;
    }
    x
}

fn poly_div_exact(a: &[BigRational], b: &[BigRational]) -> Vec<BigRational> {
    let mut r = a.to_vec();
    trim(&mut r);
    let db = b.len() - 1;
    if r.len() - 1 < db {
        return vec![BigRational::zero()];
    }
    let mut q = vec![BigRational::zero(); r.len() - db];
    for k in (0..q.len()).rev() {
        let coef = &r[k + db] / &b[db];
        for (i, c) in b.iter().enumerate() {
            r[i + k] -= &coef * c;
        }
        q[k] = coef;
    }
    q
}

/// Sturm sequence of the square-free part of an integer polynomial.
pub struct Sturm {
    seq: Vec<Vec<BigRational>>,
}

impl Sturm {
    pub fn new(p: &[BigInt]) -> Self {
        let f = to_rat(p);
        let g = poly_gcd(&f, &derivative(&f));
        let sq = if g.len() > 1 { poly_div_exact(&f, &g) } else { f };
        let mut seq = vec![sq.clone(), derivative(&sq)];
        loop {
            let n = seq.len();
            if is_zero_poly(&seq[n - 1]) || seq[n - 1].len() == 1 {
                break;
            }
            let r = poly_rem(&seq[n - 2], &seq[n - 1]);
            if is_zero_poly(&r) {
                break;
            }
            seq.push(r.into_iter().map(|c| -c).collect());
        }
        Sturm { seq }
    }

    fn sign_changes(&self, x: &BigRational) -> usize {
        let signs: Vec<i8> = self
            .seq
            .iter()
            .map(|p| {
                let v = eval(p, x);
                if v.is_positive() {
                    1
                } else if v.is_negative() {
                    -1
                } else {
                    0
                }
            })
            .filter(|&s| s != 0)
            .collect();
        signs.windows(2).filter(|w| w[0] != w[1]).count()
    }

    /// Number of distinct real roots in `(a, b]`.
    pub fn count(&self, a: &BigRational, b: &BigRational) -> usize {
        self.sign_changes(a).saturating_sub(self.sign_changes(b))
    }
}

fn root_bound(p: &[BigInt]) -> BigRational {
    let lead = p.last().unwrap().abs();
    let m = p.iter().map(|c| c.abs()).max().unwrap();
    BigRational::new(m, lead) + BigRational::one()
}

fn two_pow_neg(bits: u32) -> BigRational {
    BigRational::new(BigInt::one(), BigInt::one() << bits)
}

/// A real algebraic number given by an isolating enclosure, exact when it is an integer.
#[derive(Clone, Debug, PartialEq)]
pub struct RealRoot {
    pub enclosure: RealInterval,
    pub exact: Option<BigInt>,
}

fn snap_integer(p: &[BigInt], iv: &RealInterval) -> Option<BigInt> {
    let lo = iv.lo.ceil().to_integer();
    let hi = iv.hi.floor().to_integer();
    let mut k = lo;
    while k <= hi {
        if eval_int(p, &k).is_zero() {
            return Some(k);
        }
        k += 1;
    }
    None
}

fn finish_root(p: &[BigInt], iv: RealInterval) -> RealRoot {
    match snap_integer(p, &iv) {
        Some(k) => RealRoot { enclosure: RealInterval::point(BigRational::from_integer(k.clone())), exact: Some(k) },
        None => RealRoot { enclosure: iv, exact: None },
    }
}

/// Largest real root of a nonzero integer polynomial, refined to width ≤ 2^-bits.
pub fn largest_real_root(p: &[BigInt], bits: u32) -> Option<RealRoot> {
    let st = Sturm::new(p);
    let b = root_bound(p);
    let (mut lo, mut hi) = (-b.clone(), b);
    if st.count(&lo, &hi) == 0 {
        return None;
    }
    let eps = two_pow_neg(bits);
    let two = BigRational::from_integer(2.into());
    while &hi - &lo > eps {
        let mid = (&lo + &hi) / &two;
        if st.count(&mid, &hi) >= 1 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Some(finish_root(p, RealInterval { lo, hi }))
}

/// Smallest real root, by reflecting `x ↦ −x`.
pub fn smallest_real_root(p: &[BigInt], bits: u32) -> Option<RealRoot> {
    let q: Vec<BigInt> = p.iter().enumerate().map(|(i, c)| if i % 2 == 1 { -c } else { c.clone() }).collect();
    largest_real_root(&q, bits).map(|r| RealRoot {
        enclosure: RealInterval { lo: -r.enclosure.hi, hi: -r.enclosure.lo },
        exact: r.exact.map(|k| -k),
    })
}

/// Perron–Frobenius data of a nonnegative primitive matrix.
#[derive(Clone, Debug)]
pub struct PerronData {
    /// Rigorous enclosure of the Perron root (a point when the root is an integer).
    pub lambda: RealRoot,
    /// Positive left eigenvector (ℓ·A = λℓ), max entry 1. Exact when `lambda.exact` is set.
    pub left: Vec<BigRational>,
    /// Positive right eigenvector (A·w = λw), max entry 1.
    pub right: Vec<BigRational>,
    /// Collatz–Wielandt ratios of `left`: `(ℓA)_j / ℓ_j`, each inside the λ enclosure.
    pub left_ratios: Vec<BigRational>,
    pub right_ratios: Vec<BigRational>,
    pub char_poly: Vec<BigInt>,
}

impl PerronData {
    pub fn is_exact(&self) -> bool {
        self.lambda.exact.is_some()
    }
}

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum PerronError {
    #[error("matrix is not square")]
    NotSquare,
    #[error("matrix has a negative entry")]
    Negative,
    #[error("no positive eigenvector found (matrix not irreducible?)")]
    NoPositiveVector,
}

fn normalize_max(v: Vec<BigRational>) -> Vec<BigRational> {
    let m = v.iter().cloned().fold(BigRational::zero(), |a, b| if b > a { b } else { a });
    if m.is_zero() {
        return v;
    }
    v.into_iter().map(|x| x / &m).collect()
}

fn exact_eigenvector(a: &IntegerMatrix, lambda: &BigInt) -> Option<Vec<BigRational>> {
    let n = a.rows();
    let shifted = a.sub(&IntegerMatrix::identity(n).scale(lambda));
    let ker = kernel_basis(&shifted);
    if ker.len() != 1 {
        return None;
    }
    let mut v = ker[0].clone();
    if v.iter().any(|x| x.is_negative()) {
        v.iter_mut().for_each(|x| *x = -x.clone());
    }
    if v.iter().any(|x| !x.is_positive()) {
        return None;
    }
    Some(normalize_max(v.into_iter().map(BigRational::from_integer).collect()))
}

fn round_dyadic(x: &BigRational, bits: u32) -> BigRational {
    let scale = BigInt::one() << bits;
    let num = (x * BigRational::from_integer(scale.clone()) + BigRational::new(1.into(), 2.into())).floor().to_integer();
    BigRational::new(num, scale)
}

/// Approximate positive eigenvector of a primitive matrix by power iteration, then
/// rigorous Collatz–Wielandt ratios for the rounded vector.
fn approx_eigenvector(a: &IntegerMatrix, bits: u32) -> Option<Vec<BigRational>> {
    let n = a.rows();
    let af: Vec<f64> = a.entries().iter().map(|x| x.to_f64().unwrap_or(f64::MAX)).collect();
    let mut x = vec![1.0f64; n];
    for _ in 0..5000 {
        let mut y = vec![0.0f64; n];
        for i in 0..n {
            for j in 0..n {
                y[i] += af[i * n + j] * x[j];
            }
        }
        // Averaging with the identity step keeps periodic matrices from oscillating.
        let m = y.iter().cloned().fold(0.0, f64::max);
        if m <= 0.0 || !m.is_finite() {
            return None;
        }
        let xm = x.iter().cloned().fold(0.0, f64::max);
        for i in 0..n {
            x[i] = 0.5 * (x[i] / xm + y[i] / m);
        }
    }
    let mut v: Vec<BigRational> = x.iter().map(|&f| BigRational::from_float(f).unwrap_or_else(BigRational::zero)).collect();
    // A few exact refinement steps with dyadic rounding.
    for _ in 0..60 {
        let av: Vec<BigRational> = (0..n)
            .map(|i| (0..n).map(|j| BigRational::from_integer(a.get(i, j).clone()) * &v[j]).sum())
            .collect();
        let next = normalize_max(av);
        let next: Vec<BigRational> = next.iter().map(|x| round_dyadic(x, bits + 16)).collect();
        if next.iter().any(|x| !x.is_positive()) {
            break;
        }
        if next == v {
            break;
        }
        v = next;
    }
    if v.iter().all(|x| x.is_positive()) {
        Some(normalize_max(v))
    } else {
        None
    }
}

fn ratios(a: &IntegerMatrix, v: &[BigRational]) -> Vec<BigRational> {
    let n = a.rows();
    (0..n)
        .map(|i| {
            let s: BigRational = (0..n).map(|j| BigRational::from_integer(a.get(i, j).clone()) * &v[j]).sum();
            s / &v[i]
        })
        .collect()
}

fn min_max(v: &[BigRational]) -> (BigRational, BigRational) {
    let lo = v.iter().min().unwrap().clone();
    let hi = v.iter().max().unwrap().clone();
    (lo, hi)
}

/// Perron root and positive eigenvectors of a nonnegative irreducible matrix.
pub fn perron(a: &IntegerMatrix, bits: u32) -> Result<PerronData, PerronError> {
    if !a.is_square() {
        return Err(PerronError::NotSquare);
    }
    if !a.is_nonnegative() {
        return Err(PerronError::Negative);
    }
    let cp = char_poly(a);
    let root = largest_real_root(&cp, bits).ok_or(PerronError::NoPositiveVector)?;
    let at = a.transpose();
    let (left, right) = match &root.exact {
        Some(k) => (
            exact_eigenvector(&at, k).ok_or(PerronError::NoPositiveVector)?,
            exact_eigenvector(a, k).ok_or(PerronError::NoPositiveVector)?,
        ),
        None => (
            approx_eigenvector(&at, bits).ok_or(PerronError::NoPositiveVector)?,
            approx_eigenvector(a, bits).ok_or(PerronError::NoPositiveVector)?,
        ),
    };
    let left_ratios = ratios(&at, &left);
    let right_ratios = ratios(a, &right);
    let mut lambda = root;
    if lambda.exact.is_none() {
        // Collatz–Wielandt bounds are rigorous for any positive vector.
        let (l1, h1) = min_max(&left_ratios);
        let (l2, h2) = min_max(&right_ratios);
        let cw = RealInterval { lo: l1.max(l2), hi: h1.min(h2) };
        let both = lambda.enclosure.intersect(&cw);
        if both.lo <= both.hi {
            lambda.enclosure = both;
        }
    }
    Ok(PerronData { lambda, left, right, left_ratios, right_ratios, char_poly: cp })
}

/// Spectral radius enclosure of an integer matrix whose dominant eigenvalue is real.
pub fn real_spectral_radius(a: &IntegerMatrix, bits: u32) -> Option<RealRoot> {
    let cp = char_poly(a);
    let top = largest_real_root(&cp, bits)?;
    let bottom = smallest_real_root(&cp, bits)?;
    if -bottom.enclosure.lo.clone() > top.enclosure.hi {
        Some(RealRoot {
            enclosure: RealInterval { lo: -bottom.enclosure.hi, hi: -bottom.enclosure.lo },
            exact: bottom.exact.map(|k| -k),
        })
    } else {
        Some(top)
    }
}

/// Rational power `x^k` for `k ≥ 0`.
pub fn rat_pow(x: &BigRational, k: u32) -> BigRational {
    let mut acc = BigRational::one();
    for _ in 0..k {
        acc *= x;
    }
    acc
}

/// Renders a rational as `p/q` (or `p`).
pub fn rat_string(x: &BigRational) -> String {
    if x.denom().is_one() {
        x.numer().to_string()
    } else {
        format!("{}/{}", x.numer(), x.denom())
    }
}

/// Serializable snapshot of a Perron root.
#[derive(Clone, Debug, Serialize, PartialEq)]
pub struct PerronSummary {
    pub exact: Option<String>,
    pub lower: String,
    pub upper: String,
    pub approx: f64,
}

impl From<&RealRoot> for PerronSummary {
    fn from(r: &RealRoot) -> Self {
        PerronSummary {
            exact: r.exact.as_ref().map(|k| k.to_string()),
            lower: rat_string(&r.enclosure.lo),
            upper: rat_string(&r.enclosure.hi),
            approx: r.enclosure.midpoint_f64(),
        }
    }
}

/// `gcd` of a list of integers (0 for the empty list).
pub fn gcd_all(v: &[BigInt]) -> BigInt {
    v.iter().fold(BigInt::zero(), |g, x| g.gcd(x))
}
