//! Smith and Hermite normal forms, kernels, cokernels and integer solving.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use super::matrix::IntegerMatrix;

/// `s * a * t == d` with `s`, `t` unimodular and `d` diagonal with a divisibility chain.
#[derive(Clone, Debug)]
pub struct SmithForm {
    pub s: IntegerMatrix,
    pub t: IntegerMatrix,
    pub d: IntegerMatrix,
    /// Nonzero diagonal entries `d₁ | d₂ | …`, all positive.
    pub invariant_factors: Vec<BigInt>,
}

impl SmithForm {
    pub fn rank(&self) -> usize {
        self.invariant_factors.len()
    }
}

fn min_abs_nonzero(a: &IntegerMatrix, from: usize) -> Option<(usize, usize)> {
    let mut best: Option<(usize, usize)> = None;
    for i in from..a.rows() {
        for j in from..a.cols() {
            let v = a.get(i, j);
            if v.is_zero() {
                continue;
            }
            match best {
                Some((bi, bj)) if a.get(bi, bj).abs() <= v.abs() => {}
                _ => best = Some((i, j)),
            }
        }
    }
    best
}

/// The unimodular 2×2 step `[[x, y], [−b/g, a/g]]` taking `(a, b)` to `(g, 0)`, with
/// `g = gcd(a, b)`. Returns `None` when `a | b`, where a single subtraction does instead.
fn gcd_step(a: &BigInt, b: &BigInt) -> Option<[BigInt; 4]> {
    if b.is_multiple_of(a) {
        return None;
    }
    let e = a.extended_gcd(b);
    Some([e.x, e.y, -(b / &e.gcd), a / &e.gcd])
}

/// Exact Smith normal form with unimodular transforms. Deterministic for fixed input.
///
/// Rows and columns are cleared with extended-gcd steps rather than repeated division, which
/// keeps entry growth additive in the bit sizes instead of compounding.
pub fn smith_normal_form(a: &IntegerMatrix) -> SmithForm {
    let (r, c) = (a.rows(), a.cols());
    let mut d = a.clone();
    let mut s = IntegerMatrix::identity(r);
    let mut t = IntegerMatrix::identity(c);
    let mut k = 0;
    while k < r.min(c) {
        let Some((pi, pj)) = min_abs_nonzero(&d, k) else { break };
        d.swap_rows(k, pi);
        s.swap_rows(k, pi);
        d.swap_cols(k, pj);
        t.swap_cols(k, pj);
        loop {
            for i in k + 1..r {
                if d.get(i, k).is_zero() {
                    continue;
                }
                match gcd_step(d.get(k, k), d.get(i, k)) {
                    None => {
                        let q = -(d.get(i, k) / d.get(k, k));
                        d.add_row_multiple(i, k, &q);
                        s.add_row_multiple(i, k, &q);
                    }
                    Some([x, y, u, v]) => {
                        d.combine_rows(k, i, [&x, &y, &u, &v]);
                        s.combine_rows(k, i, [&x, &y, &u, &v]);
                    }
                }
            }
            for j in k + 1..c {
                if d.get(k, j).is_zero() {
                    continue;
                }
                match gcd_step(d.get(k, k), d.get(k, j)) {
                    None => {
                        let q = -(d.get(k, j) / d.get(k, k));
                        d.add_col_multiple(j, k, &q);
                        t.add_col_multiple(j, k, &q);
                    }
                    Some([x, y, u, v]) => {
                        d.combine_cols(k, j, [&x, &y, &u, &v]);
                        t.combine_cols(k, j, [&x, &y, &u, &v]);
                    }
                }
            }
            // Column operations can refill column k; repeat until both are clear.
            if (k + 1..r).any(|i| !d.get(i, k).is_zero()) {
                continue;
            }
            // Enforce divisibility of the remaining block.
            let pivot = d.get(k, k).clone();
            let bad = (k + 1..r)
                .flat_map(|i| (k + 1..c).map(move |j| (i, j)))
                .find(|&(i, j)| !d.get(i, j).is_multiple_of(&pivot));
            match bad {
                Some((i, _)) => {
                    let one = BigInt::one();
                    d.add_row_multiple(k, i, &one);
                    s.add_row_multiple(k, i, &one);
                }
                None => break,
            }
        }
        if d.get(k, k).is_negative() {
            d.negate_row(k);
            s.negate_row(k);
        }
        k += 1;
    }
    let invariant_factors = (0..r.min(c))
        .map(|i| d.get(i, i).clone())
        .take_while(|x| !x.is_zero())
        .collect();
    SmithForm { s, t, d, invariant_factors }
}

/// Finitely generated abelian group `ℤ^free ⊕ ⊕ ℤ/tᵢ`, with every `tᵢ ≥ 2`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Cokernel {
    pub free_rank: usize,
    pub torsion: Vec<BigInt>,
}

impl Cokernel {
    /// Order of the group, or `None` when infinite.
    pub fn order(&self) -> Option<BigInt> {
        if self.free_rank > 0 {
            None
        } else {
            Some(self.torsion.iter().product())
        }
    }
}

/// `ℤ^rows / a·ℤ^cols`.
pub fn cokernel(a: &IntegerMatrix) -> Cokernel {
    let snf = smith_normal_form(a);
    Cokernel {
        free_rank: a.rows() - snf.rank(),
        torsion: snf.invariant_factors.into_iter().filter(|x| !x.is_one()).collect(),
    }
}

/// A ℤ-basis of `ker a ⊆ ℤ^cols`, in Hermite normal form (rows of the result are basis vectors).
pub fn kernel_basis(a: &IntegerMatrix) -> Vec<Vec<BigInt>> {
    let snf = smith_normal_form(a);
    let basis: Vec<Vec<BigInt>> = (snf.rank()..a.cols()).map(|j| snf.t.column(j)).collect();
    hermite_rows(&basis)
}

/// Row-style Hermite normal form of the lattice spanned by `vectors`.
/// Pivots are positive, entries above a pivot are reduced into `[0, pivot)`, zero rows dropped.
pub fn hermite_rows(vectors: &[Vec<BigInt>]) -> Vec<Vec<BigInt>> {
    let Some(width) = vectors.first().map(|v| v.len()) else { return Vec::new() };
    let mut rows: Vec<Vec<BigInt>> = vectors.to_vec();
    let mut out: Vec<Vec<BigInt>> = Vec::new();
    let mut pivots: Vec<usize> = Vec::new();
    for col in 0..width {
        // Fold every remaining row into the first one with a nonzero entry in `col`.
        if let Some(p) = (0..rows.len()).find(|&i| !rows[i][col].is_zero()) {
            for i in 0..rows.len() {
                if i == p || rows[i][col].is_zero() {
                    continue;
                }
                let (a, b) = (rows[p][col].clone(), rows[i][col].clone());
                let [x, y, u, v] = gcd_step(&a, &b).unwrap_or_else(|| [BigInt::one(), BigInt::zero(), -(&b / &a), BigInt::one()]);
                let (rp, ri) = (rows[p].clone(), rows[i].clone());
                rows[p] = rp.iter().zip(&ri).map(|(s, t)| &x * s + &y * t).collect();
                rows[i] = rp.iter().zip(&ri).map(|(s, t)| &u * s + &v * t).collect();
            }
        }
        if let Some(p) = (0..rows.len()).find(|&i| !rows[i][col].is_zero()) {
            let mut row = rows.remove(p);
            if row[col].is_negative() {
                row.iter_mut().for_each(|x| *x = -x.clone());
            }
            out.push(row);
            pivots.push(col);
        }
    }
    // Reduce above pivots.
    for k in 0..out.len() {
        let col = pivots[k];
        let piv = out[k][col].clone();
        for i in 0..k {
            let q = out[i][col].div_floor(&piv);
            if q.is_zero() {
                continue;
            }
            let pr = out[k].clone();
            for (x, y) in out[i].iter_mut().zip(pr.iter()) {
                *x -= &q * y;
            }
        }
    }
    out
}

/// Integer solution `y` of `a·y = v`, if one exists.
pub fn solve_integer(a: &IntegerMatrix, v: &[BigInt]) -> Option<Vec<BigInt>> {
    let snf = smith_normal_form(a);
    let sv = snf.s.mul_vec(v);
    let mut z = vec![BigInt::zero(); a.cols()];
    for (i, x) in sv.iter().enumerate() {
        if i < snf.rank() {
            let d = &snf.invariant_factors[i];
            if !x.is_multiple_of(d) {
                return None;
            }
            z[i] = x / d;
        } else if !x.is_zero() {
            return None;
        }
    }
    Some(snf.t.mul_vec(&z))
}
