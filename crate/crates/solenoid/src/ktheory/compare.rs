//! Isomorphism tests for stationary groups `lim(ℤ², A)` as plain abelian groups.
//!
//! * Different characteristic polynomials: compare the dimensions of `G/pG` at primes
//!   dividing either determinant.
//! * Same polynomial, split over ℤ: each eigenline is intrinsic (the maximal `p`-divisible
//!   subgroup for a prime dividing only that eigenvalue), so an isomorphism is diagonal in the
//!   eigenbases; the remaining local conditions are finite congruence problems.
//! * Same polynomial, irreducible: search for a `GL₂(ℤ)` conjugacy through the reduction cycle
//!   of the determinant form on the intertwiner lattice.

use std::collections::BTreeSet;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::Serialize;

use super::groups::prime_factors;
use super::matrix::IntegerMatrix;
use super::smith::kernel_basis;
use super::KTheoryError;
use crate::presolenoid::primitivity_exponent;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Isomorphic,
    NotIsomorphic,
    Inconclusive,
}

#[derive(Clone, Debug, Serialize)]
pub struct Comparison {
    pub verdict: Verdict,
    pub reason: String,
    /// An explicit isomorphism `P` (rational entries) with `P·G_A = G_B`, when found.
    pub witness: Option<Vec<Vec<String>>>,
}

impl Comparison {
    fn new(verdict: Verdict, reason: impl Into<String>) -> Self {
        Comparison { verdict, reason: reason.into(), witness: None }
    }
}

/// Search-size cap for the congruence search.
const SEARCH_CAP: u64 = 2_000_000;

fn val(x: &BigInt, p: &BigInt) -> Option<u32> {
    if x.is_zero() {
        return None;
    }
    let mut x = x.clone();
    let mut k = 0;
    while x.is_multiple_of(p) {
        x /= p;
        k += 1;
    }
    Some(k)
}

fn val0(x: &BigInt, p: &BigInt) -> i64 {
    val(x, p).map_or(i64::MAX / 4, i64::from)
}

fn primes_of(x: &BigInt) -> BTreeSet<BigInt> {
    prime_factors(x).into_iter().map(|(p, _)| p).collect()
}

/// Rank over GF(p) of the eventual image of `m` (2×2).
fn eventual_rank_mod(m: &IntegerMatrix, p: &BigInt) -> usize {
    let sq = m.mul(m).map_mod(p);
    if sq.is_zero() {
        0
    } else if sq.det().mod_floor(p).is_zero() {
        1
    } else {
        2
    }
}

fn mod_inv(x: &BigInt, m: &BigInt) -> BigInt {
    let e = x.mod_floor(m).extended_gcd(m);
    debug_assert!(e.gcd.is_one());
    e.x.mod_floor(m)
}

/// Primitive integer vector spanning `ker(m − μ)`.
fn eigenvector(m: &IntegerMatrix, mu: &BigInt) -> Vec<BigInt> {
    let shifted = m.sub(&IntegerMatrix::identity(2).scale(mu));
    let k = kernel_basis(&shifted);
    k.into_iter().next().expect("integer eigenvalue has an integer eigenvector")
}

/// Condition on a unit `ρ'` modulo a power of `p`.
#[derive(Clone, Debug, PartialEq, Eq)]
enum Congruence {
    Any,
    Never,
    /// `ρ' ≡ r (mod m)`.
    Eq(BigInt, BigInt),
}

impl Congruence {
    fn merge(self, other: Congruence) -> Congruence {
        match (self, other) {
            (Congruence::Never, _) | (_, Congruence::Never) => Congruence::Never,
            (Congruence::Any, c) | (c, Congruence::Any) => c,
            (Congruence::Eq(r1, m1), Congruence::Eq(r2, m2)) => {
                let (small, big) = if m1 <= m2 { ((r1, m1), (r2, m2)) } else { ((r2, m2), (r1, m1)) };
                if big.0.mod_floor(&small.1) == small.0.mod_floor(&small.1) {
                    Congruence::Eq(big.0, big.1)
                } else {
                    Congruence::Never
                }
            }
        }
    }

    fn holds(&self, r: &BigInt) -> bool {
        match self {
            Congruence::Any => true,
            Congruence::Never => false,
            Congruence::Eq(r0, m) => r.mod_floor(m) == *r0,
        }
    }
}

/// `v_p(p^{shift}·ρ'·x + y) ≥ e` for every unit `ρ'`, as a congruence on `ρ'`.
fn entry_condition(x: &BigInt, y: &BigInt, e: i64, p: &BigInt) -> Congruence {
    let vy = val0(y, p);
    if x.is_zero() {
        return if vy >= e { Congruence::Any } else { Congruence::Never };
    }
    let vx = val0(x, p);
    if vx >= e {
        return if vy >= e { Congruence::Any } else { Congruence::Never };
    }
    if vy != vx {
        return Congruence::Never;
    }
    let scale = p.pow(vx as u32);
    let modulus = p.pow((e - vx) as u32);
    let xu = x / &scale;
    let yu = y / &scale;
    let r = (-yu * mod_inv(&xu, &modulus)).mod_floor(&modulus);
    Congruence::Eq(r, modulus)
}

struct LocalData {
    p: BigInt,
    /// Allowed `(δ, b, condition on ρ')`.
    options: Vec<(i64, i64, Congruence)>,
}

fn local_options(p: &BigInt, da: &BigInt, db: &BigInt, x: &IntegerMatrix, y: &IntegerMatrix) -> LocalData {
    let va = val0(da, p);
    let vb = val0(db, p);
    let w = va - vb;
    let mut options = Vec::new();
    for delta in -(va + vb)..=(va + vb) {
        if (w + delta).rem_euclid(2) != 0 {
            continue;
        }
        let a = (w + delta) / 2;
        let b = (w - delta) / 2;
        if a < -vb || a > va || b < -vb || b > va {
            continue;
        }
        let shift = (-delta).max(0);
        let e = va - b + shift;
        let mut cond = Congruence::Any;
        for i in 0..2 {
            for j in 0..2 {
                let xs = x.get(i, j) * p.pow((delta + shift) as u32);
                let ys = y.get(i, j) * p.pow(shift as u32);
                cond = cond.merge(entry_condition(&xs, &ys, e, p));
            }
        }
        if cond != Congruence::Never {
            options.push((delta, b, cond));
        }
    }
    LocalData { p: p.clone(), options }
}

fn multiplicative_order(q: &BigInt, m: &BigInt) -> u64 {
    if m.is_one() {
        return 1;
    }
    let q = q.mod_floor(m);
    let mut x = q.clone();
    let mut k = 1u64;
    while !x.is_one() {
        x = (&x * &q).mod_floor(m);
        k += 1;
        if k > SEARCH_CAP {
            break;
        }
    }
    k
}

fn rat_pow_int(p: &BigInt, e: i64) -> BigRational {
    if e >= 0 {
        BigRational::from_integer(p.pow(e as u32))
    } else {
        BigRational::new(BigInt::one(), p.pow((-e) as u32))
    }
}

/// Split case with both eigenlines intrinsic.
fn compare_split(a: &IntegerMatrix, b: &IntegerMatrix, mu1: &BigInt, mu2: &BigInt) -> Comparison {
    let p1 = primes_of(mu1);
    let p2 = primes_of(mu2);
    let only1: BTreeSet<BigInt> = p1.difference(&p2).cloned().collect();
    let only2: BTreeSet<BigInt> = p2.difference(&p1).cloned().collect();
    if only1.is_empty() || only2.is_empty() {
        return Comparison::new(
            Verdict::Inconclusive,
            "an eigenline is not singled out by divisibility; no decision procedure implemented",
        );
    }
    let (ua, wa) = (eigenvector(a, mu1), eigenvector(a, mu2));
    let (ub, wb) = (eigenvector(b, mu1), eigenvector(b, mu2));
    let ea = IntegerMatrix::from_columns(2, &[ua, wa]);
    let eb = IntegerMatrix::from_columns(2, &[ub.clone(), wb.clone()]);
    let (da, db) = (ea.det(), eb.det());
    // adj(E_A) rows.
    let adj = IntegerMatrix::from_fn(2, 2, |i, j| {
        let v = ea.get(1 - j, 1 - i).clone();
        if i == j {
            v
        } else {
            -v
        }
    });
    let x = IntegerMatrix::from_fn(2, 2, |i, j| &ub[i] * adj.get(0, j));
    let y = IntegerMatrix::from_fn(2, 2, |i, j| &wb[i] * adj.get(1, j));
    let free: Vec<BigInt> = p1.union(&p2).cloned().collect();
    let dd = &da * &db;
    let s_primes: Vec<BigInt> = primes_of(&dd).into_iter().filter(|p| !free.contains(p)).collect();
    let locals: Vec<LocalData> = s_primes.iter().map(|p| local_options(p, &da, &db, &x, &y)).collect();
    if let Some(l) = locals.iter().find(|l| l.options.is_empty()) {
        return Comparison::new(Verdict::NotIsomorphic, format!("no diagonal map is invertible over ℤ localized at {}", l.p));
    }
    let modulus: BigInt = locals
        .iter()
        .map(|l| {
            l.options
                .iter()
                .map(|(_, _, c)| match c {
                    Congruence::Eq(_, m) => m.clone(),
                    _ => l.p.clone(),
                })
                .max()
                .unwrap()
        })
        .product();
    let orders: Vec<u64> = free.iter().map(|q| multiplicative_order(q, &modulus)).collect();
    let option_count: u64 = locals.iter().map(|l| l.options.len() as u64).product();
    let size = orders.iter().try_fold(2 * option_count, |acc, &o| acc.checked_mul(o));
    match size {
        Some(s) if s <= SEARCH_CAP => {}
        _ => return Comparison::new(Verdict::Inconclusive, "congruence search exceeds the size cap"),
    }
    // Enumerate sign, δ choices and free exponents.
    let mut choice = vec![0usize; locals.len()];
    loop {
        for sign in [1i64, -1] {
            let mut exps = vec![0u64; free.len()];
            loop {
                if candidate_fits(sign, &choice, &exps, &locals, &free) {
                    let p = build_witness(sign, &choice, &exps, &locals, &free, &only1, &only2, &da, &db, &ea, &eb);
                    return finish_witness(a, b, p);
                }
                if !advance(&mut exps, &orders) {
                    break;
                }
            }
        }
        let limits: Vec<u64> = locals.iter().map(|l| l.options.len() as u64).collect();
        let mut c64: Vec<u64> = choice.iter().map(|&c| c as u64).collect();
        if !advance(&mut c64, &limits) {
            break;
        }
        choice = c64.into_iter().map(|c| c as usize).collect();
    }
    Comparison::new(
        Verdict::NotIsomorphic,
        format!(
            "an isomorphism must be diagonal in the eigenbases; the local conditions at {:?} admit no common solution",
            s_primes.iter().map(|p| p.to_string()).collect::<Vec<_>>()
        ),
    )
}

fn advance(v: &mut [u64], limits: &[u64]) -> bool {
    for (x, &l) in v.iter_mut().zip(limits) {
        *x += 1;
        if *x < l {
            return true;
        }
        *x = 0;
    }
    false
}

/// Checks the local conditions for `ρ = sign · ∏ q^{z_q} · ∏ p^{δ_p}`.
fn candidate_fits(sign: i64, choice: &[usize], exps: &[u64], locals: &[LocalData], free: &[BigInt]) -> bool {
    for (k, l) in locals.iter().enumerate() {
        let (_, _, cond) = &l.options[choice[k]];
        let Congruence::Eq(_, m) = cond else {
            continue;
        };
        let mut r = BigInt::from(sign).mod_floor(m);
        for (q, &z) in free.iter().zip(exps) {
            r = (r * q.modpow(&BigInt::from(z), m)).mod_floor(m);
        }
        for (k2, l2) in locals.iter().enumerate() {
            if k2 == k {
                continue;
            }
            let d = l2.options[choice[k2]].0;
            let base = if d >= 0 { l2.p.clone() } else { mod_inv(&l2.p, m) };
            r = (r * base.modpow(&BigInt::from(d.unsigned_abs()), m)).mod_floor(m);
        }
        if !cond.holds(&r) {
            return false;
        }
    }
    true
}

#[allow(clippy::too_many_arguments)]
fn build_witness(
    sign: i64,
    choice: &[usize],
    exps: &[u64],
    locals: &[LocalData],
    free: &[BigInt],
    only1: &BTreeSet<BigInt>,
    only2: &BTreeSet<BigInt>,
    da: &BigInt,
    db: &BigInt,
    ea: &IntegerMatrix,
    eb: &IntegerMatrix,
) -> [[BigRational; 2]; 2] {
    // β: prescribed valuations at primes dividing only μ₁, chosen valuations at S.
    let mut beta = BigRational::one();
    let mut alpha = BigRational::from_integer(BigInt::from(sign));
    for (k, l) in locals.iter().enumerate() {
        let (delta, b, _) = l.options[choice[k]];
        beta *= rat_pow_int(&l.p, b);
        alpha *= rat_pow_int(&l.p, b + delta);
    }
    for (q, &z) in free.iter().zip(exps) {
        let z = z as i64;
        if only1.contains(q) {
            let g = val0(da, q) - val0(db, q);
            beta *= rat_pow_int(q, g);
            alpha *= rat_pow_int(q, g + z);
        } else if only2.contains(q) {
            let f = val0(da, q) - val0(db, q);
            alpha *= rat_pow_int(q, f);
            beta *= rat_pow_int(q, f - z);
        } else {
            alpha *= rat_pow_int(q, z);
        }
    }
    let r = |m: &IntegerMatrix, i: usize, j: usize| BigRational::from_integer(m.get(i, j).clone());
    let det_a = BigRational::from_integer(ea.det());
    let inv_a = [
        [r(ea, 1, 1) / &det_a, -r(ea, 0, 1) / &det_a],
        [-r(ea, 1, 0) / &det_a, r(ea, 0, 0) / &det_a],
    ];
    let diag = [alpha, beta];
    let mut p: [[BigRational; 2]; 2] = Default::default();
    for (i, row) in p.iter_mut().enumerate() {
        for (j, cell) in row.iter_mut().enumerate() {
            *cell = (0..2).map(|k| r(eb, i, k) * &diag[k] * &inv_a[k][j]).sum();
        }
    }
    p
}

/// Verifies `P·A = B·P` and records the witness.
fn finish_witness(a: &IntegerMatrix, b: &IntegerMatrix, p: [[BigRational; 2]; 2]) -> Comparison {
    let r = |m: &IntegerMatrix, i: usize, j: usize| BigRational::from_integer(m.get(i, j).clone());
    for i in 0..2 {
        for j in 0..2 {
            let pa: BigRational = (0..2).map(|k| &p[i][k] * r(a, k, j)).sum();
            let bp: BigRational = (0..2).map(|k| r(b, i, k) * &p[k][j]).sum();
            assert_eq!(pa, bp, "eigenbasis witness must intertwine");
        }
    }
    let witness = p.iter().map(|row| row.iter().map(crate::perron::rat_string).collect()).collect();
    Comparison {
        verdict: Verdict::Isomorphic,
        reason: "explicit isomorphism diagonal in the eigenbases, invertible at every prime".into(),
        witness: Some(witness),
    }
}

type Form = (BigInt, BigInt, BigInt);
type Mat2 = [[BigInt; 2]; 2];

fn mat_mul(x: &Mat2, y: &Mat2) -> Mat2 {
    let mut out: Mat2 = Default::default();
    for i in 0..2 {
        for j in 0..2 {
            out[i][j] = &x[i][0] * &y[0][j] + &x[i][1] * &y[1][j];
        }
    }
    out
}

/// Brings `b` into the standard window modulo `2a`, tracking the substitution.
fn normalize_form(f: Form, disc: &BigInt, s: &BigInt, t: &mut Mat2) -> Form {
    let (a, b, _) = f;
    let two_a = BigInt::from(2) * a.abs();
    let new_b = if &a.abs() > s {
        let mut r = b.mod_floor(&two_a);
        if r > a.abs() {
            r -= &two_a;
        }
        r
    } else {
        let lo: BigInt = s - &two_a + 1;
        &lo + (&b - &lo).mod_floor(&two_a)
    };
    let k = (&new_b - &b) / (BigInt::from(2) * &a);
    *t = mat_mul(t, &[[BigInt::one(), k], [BigInt::zero(), BigInt::one()]]);
    let c = (&new_b * &new_b - disc) / (BigInt::from(4) * &a);
    (a, new_b, c)
}

fn rho(f: Form, disc: &BigInt, s: &BigInt, t: &mut Mat2) -> Form {
    let (a, b, c) = f;
    *t = mat_mul(t, &[[BigInt::zero(), -BigInt::one()], [BigInt::one(), BigInt::zero()]]);
    normalize_form((c, -b, a), disc, s, t)
}

fn is_reduced(f: &Form, disc: &BigInt, s: &BigInt) -> bool {
    let (a, b, _) = f;
    if !b.is_positive() || b > s {
        return false;
    }
    let r = disc + BigInt::from(4) * a * a - b * b;
    r.is_negative() || &r * &r < BigInt::from(16) * a * a * disc
}

/// A vector `(x, y)` with `f(x, y) = ±1`, for an indefinite form of non-square discriminant.
fn represent_unit(f: Form) -> Option<(BigInt, BigInt)> {
    let (a, b, c) = f.clone();
    let content = a.gcd(&b).gcd(&c);
    if !content.is_one() {
        return None;
    }
    let disc = &b * &b - BigInt::from(4) * &a * &c;
    let s = disc.sqrt();
    if !disc.is_positive() || &s * &s == disc {
        return None;
    }
    let mut t: Mat2 = [[BigInt::one(), BigInt::zero()], [BigInt::zero(), BigInt::one()]];
    let mut g = normalize_form(f, &disc, &s, &mut t);
    let mut steps = 0;
    while !is_reduced(&g, &disc, &s) {
        g = rho(g, &disc, &s, &mut t);
        steps += 1;
        if steps > 100_000 {
            return None;
        }
    }
    let start = g.clone();
    loop {
        if g.0.abs().is_one() {
            return Some((t[0][0].clone(), t[1][0].clone()));
        }
        g = rho(g, &disc, &s, &mut t);
        steps += 1;
        if g == start || steps > 200_000 {
            return None;
        }
    }
}

/// Irreducible case: `GL₂(ℤ)`-conjugacy, which implies isomorphism.
fn compare_irreducible(a: &IntegerMatrix, b: &IntegerMatrix) -> Comparison {
    // Unknown P = (p0 p1; p2 p3) with P·A − B·P = 0.
    let idx = |i: usize, j: usize| 2 * i + j;
    let mut k = IntegerMatrix::zeros(4, 4);
    for i in 0..2 {
        for j in 0..2 {
            let row = idx(i, j);
            for m in 0..2 {
                *k.entry_mut(row, idx(i, m)) += a.get(m, j);
                *k.entry_mut(row, idx(m, j)) -= b.get(i, m);
            }
        }
    }
    let basis = kernel_basis(&k);
    if basis.len() != 2 {
        return Comparison::new(Verdict::Inconclusive, "intertwiner lattice does not have rank 2");
    }
    let det = |v: &[BigInt]| &v[0] * &v[3] - &v[1] * &v[2];
    let (p1, p2) = (&basis[0], &basis[1]);
    let sum: Vec<BigInt> = p1.iter().zip(p2).map(|(x, y)| x + y).collect();
    let fa = det(p1);
    let fc = det(p2);
    let fb = det(&sum) - &fa - &fc;
    match represent_unit((fa, fb, fc)) {
        Some((x, y)) => {
            let p: Vec<BigInt> = p1.iter().zip(p2).map(|(u, v)| &x * u + &y * v).collect();
            debug_assert!(det(&p).abs().is_one());
            let witness = vec![vec![p[0].to_string(), p[1].to_string()], vec![p[2].to_string(), p[3].to_string()]];
            Comparison {
                verdict: Verdict::Isomorphic,
                reason: "the matrices are conjugate in GL₂(ℤ)".into(),
                witness: Some(witness),
            }
        }
        None => Comparison::new(
            Verdict::Inconclusive,
            "not conjugate in GL₂(ℤ); group isomorphism over ℤ[1/det] is not decided",
        ),
    }
}

/// Compares `lim(ℤ², A)` and `lim(ℤ², B)` as abelian groups.
pub fn stationary_compare_2x2(a: &IntegerMatrix, b: &IntegerMatrix) -> Result<Comparison, KTheoryError> {
    for (name, m) in [("A", a), ("B", b)] {
        if m.rows() != 2 || m.cols() != 2 {
            return Err(KTheoryError::Precondition(format!("{name} is not 2×2")));
        }
        if !m.is_nonnegative() || primitivity_exponent(m).0.is_none() {
            return Err(KTheoryError::Precondition(format!("{name} is not primitive")));
        }
        if m.det().is_zero() {
            return Err(KTheoryError::Precondition(format!("{name} is singular")));
        }
    }
    if a == b {
        return Ok(Comparison::new(Verdict::Isomorphic, "identical matrices"));
    }
    let (ta, tb, dta, dtb) = (a.trace(), b.trace(), a.det(), b.det());
    if ta != tb || dta != dtb {
        let primes: BTreeSet<BigInt> = primes_of(&dta).union(&primes_of(&dtb)).cloned().collect();
        for p in &primes {
            let (ra, rb) = (eventual_rank_mod(a, p), eventual_rank_mod(b, p));
            if ra != rb {
                return Ok(Comparison::new(
                    Verdict::NotIsomorphic,
                    format!("G/{p}G has dimension {ra} for A and {rb} for B"),
                ));
            }
        }
        return Ok(Comparison::new(
            Verdict::Inconclusive,
            "different characteristic polynomials with matching mod-p invariants",
        ));
    }
    if dta.abs().is_one() {
        return Ok(Comparison::new(Verdict::Isomorphic, "both matrices are invertible over ℤ, so both groups are ℤ²"));
    }
    let disc = &ta * &ta - BigInt::from(4) * &dta;
    let s = disc.sqrt();
    if disc.is_positive() && &s * &s == disc {
        let mu1 = (&ta + &s) / 2;
        let mu2 = (&ta - &s) / 2;
        return Ok(compare_split(a, b, &mu1, &mu2));
    }
    if disc.is_zero() {
        return Ok(Comparison::new(Verdict::Inconclusive, "repeated eigenvalue"));
    }
    Ok(compare_irreducible(a, b))
}

/// Small helper for reports: `trace` and `det` as machine integers when they fit.
pub fn char_poly_2x2(m: &IntegerMatrix) -> (Option<i64>, Option<i64>) {
    (m.trace().to_i64(), m.det().to_i64())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m(rows: &[Vec<i64>]) -> IntegerMatrix {
        IntegerMatrix::from_rows(rows)
    }

    #[test]
    fn transpose_pair_is_not_isomorphic() {
        let a = m(&[vec![65, 7], vec![24, 67]]);
        let c = stationary_compare_2x2(&a, &a.transpose()).unwrap();
        assert_eq!(c.verdict, Verdict::NotIsomorphic, "{}", c.reason);
        assert_eq!(stationary_compare_2x2(&a, &a).unwrap().verdict, Verdict::Isomorphic);
    }

    #[test]
    fn symmetric_matrix_matches_its_transpose() {
        let a = m(&[vec![2, 1], vec![1, 1]]);
        assert_eq!(stationary_compare_2x2(&a, &a.transpose()).unwrap().verdict, Verdict::Isomorphic);
    }

    #[test]
    fn conjugates_are_recognized() {
        // Q·A·Q⁻¹ with Q = (1 1; 0 1) stays nonnegative for this A.
        let a = m(&[vec![65, 7], vec![24, 67]]);
        let q = m(&[vec![1, 0], vec![1, 1]]);
        let qi = m(&[vec![1, 0], vec![-1, 1]]);
        let b = q.mul(&a).mul(&qi);
        assert!(b.is_nonnegative());
        let c = stationary_compare_2x2(&a, &b).unwrap();
        assert_eq!(c.verdict, Verdict::Isomorphic, "{}", c.reason);
        // Irreducible polynomial x² − 3x + 1.
        let a = m(&[vec![2, 1], vec![1, 1]]);
        let b = q.mul(&a).mul(&qi);
        assert!(b.is_nonnegative());
        let c = stationary_compare_2x2(&a, &b).unwrap();
        assert_eq!(c.verdict, Verdict::Isomorphic, "{}", c.reason);
    }

    #[test]
    fn different_divisibility_is_detected() {
        // det 1 gives ℤ²; the second is only half 2-divisible (rank 1 mod 2).
        let c = stationary_compare_2x2(&m(&[vec![1, 1], vec![1, 2]]), &m(&[vec![2, 2], vec![1, 3]])).unwrap();
        assert_eq!(c.verdict, Verdict::NotIsomorphic);
        assert!(stationary_compare_2x2(&m(&[vec![2, 2], vec![2, 2]]), &m(&[vec![3, 1], vec![1, 3]])).is_err());
    }

    fn eval(f: &Form, x: &BigInt, y: &BigInt) -> BigInt {
        &f.0 * x * x + &f.1 * x * y + &f.2 * y * y
    }

    #[test]
    fn unit_representation_on_reduced_cycle() {
        for f in [(1, -3, 1), (3, 0, -2), (-7, 5, 3), (5, 11, 3)] {
            let f: Form = (f.0.into(), f.1.into(), f.2.into());
            let (x, y) = represent_unit(f.clone()).expect("represents a unit");
            assert!(eval(&f, &x, &y).abs().is_one());
        }
        // 3x² − 5y² ≡ 3x² (mod 5) is never ±1 mod 5.
        assert!(represent_unit((3.into(), 0.into(), (-5).into())).is_none());
        // Non-primitive forms cannot take unit values.
        assert!(represent_unit((2.into(), 4.into(), (-6).into())).is_none());
    }
}
