//! Symbolic abelian groups: finitely generated parts plus stationary inductive limits.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde::ser::SerializeStruct;
use serde::{Serialize, Serializer};

use super::matrix::IntegerMatrix;
use super::smith::{cokernel, kernel_basis, solve_integer};
use crate::perron::{real_spectral_radius, PerronSummary, DEFAULT_PRECISION_BITS};

/// `lim(L, M)` for a lattice `L ⊆ ℤ^ambient` (rows of `basis`) and an endomorphism `M` of `L`
/// written in that basis (column `c` holds the coordinates of the image of basis vector `c`).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StationaryGroup {
    pub basis: Vec<Vec<BigInt>>,
    pub matrix: IntegerMatrix,
}

impl StationaryGroup {
    /// `lim(ℤ^n, M)` on the standard lattice.
    pub fn standard(matrix: IntegerMatrix) -> Self {
        let n = matrix.rows();
        let basis = (0..n).map(|i| (0..n).map(|j| BigInt::from(i32::from(i == j))).collect()).collect();
        StationaryGroup { basis, matrix }
    }

    pub fn rank(&self) -> usize {
        self.matrix.rows()
    }

    /// Rank of the eventual image of `M`, which is the rank of the limit.
    pub fn eventual_rank(&self) -> usize {
        if self.rank() == 0 {
            return 0;
        }
        self.matrix.pow(self.rank() as u64).rank()
    }

    /// Restricts to the saturated eventual range of `M`, giving an isomorphic limit with a
    /// nonsingular matrix (or the zero group).
    pub fn reduced(&self) -> StationaryGroup {
        let n = self.rank();
        if n == 0 {
            return self.clone();
        }
        let power = self.matrix.pow(n as u64);
        if power.rank() == n {
            return self.clone();
        }
        // V ∩ ℤ^n where V is the column space of M^n: annihilated by the left kernel.
        let left = kernel_basis(&power.transpose());
        let coords: Vec<Vec<BigInt>> = if left.is_empty() {
            (0..n).map(|i| (0..n).map(|j| BigInt::from(i32::from(i == j))).collect()).collect()
        } else {
            let rows: Vec<Vec<BigInt>> = left;
            let ann = IntegerMatrix::from_fn(rows.len(), n, |i, j| rows[i][j].clone());
            kernel_basis(&ann)
        };
        let k = coords.len();
        if k == 0 {
            return StationaryGroup { basis: Vec::new(), matrix: IntegerMatrix::zeros(0, 0) };
        }
        let b = IntegerMatrix::from_columns(n, &coords);
        let mut cols = Vec::with_capacity(k);
        for v in &coords {
            let image = self.matrix.mul_vec(v);
            cols.push(solve_integer(&b, &image).expect("the eventual range is invariant"));
        }
        let matrix = IntegerMatrix::from_columns(k, &cols);
        // Express the new basis in the ambient coordinates of the original lattice.
        let ambient = self.basis.first().map_or(0, |v| v.len());
        let basis = coords
            .iter()
            .map(|c| {
                let mut v = vec![BigInt::zero(); ambient];
                for (coef, bv) in c.iter().zip(&self.basis) {
                    for (x, y) in v.iter_mut().zip(bv) {
                        *x += coef * y;
                    }
                }
                v
            })
            .collect();
        StationaryGroup { basis, matrix }
    }

    /// Perron value (spectral radius) of `M`.
    pub fn perron(&self) -> Option<PerronSummary> {
        if self.rank() == 0 {
            return None;
        }
        real_spectral_radius(&self.matrix, DEFAULT_PRECISION_BITS).map(|r| (&r).into())
    }

    /// Short human-readable name: `0`, `ℤ^k`, `ℤ[1/m]` or `lim(ℤ^k, M)`.
    pub fn describe(&self) -> String {
        let r = self.reduced();
        match r.rank() {
            0 => "0".to_string(),
            k if r.matrix.det().abs().is_one() => {
                if k == 1 {
                    "ℤ".to_string()
                } else {
                    format!("ℤ^{k}")
                }
            }
            1 => format!("ℤ[1/{}]", radical(&r.matrix.get(0, 0).abs())),
            k => format!("lim(ℤ^{k}, {})", r.matrix),
        }
    }

    /// `lim(L, M) ⊗ lim(L', M')`: the Kronecker system on the tensor lattice.
    pub fn tensor(&self, other: &StationaryGroup) -> StationaryGroup {
        let mut basis = Vec::with_capacity(self.basis.len() * other.basis.len());
        for u in &self.basis {
            for v in &other.basis {
                basis.push(u.iter().flat_map(|x| v.iter().map(move |y| x * y)).collect());
            }
        }
        StationaryGroup { basis, matrix: self.matrix.kron(&other.matrix) }
    }

    /// `lim(L, M) ⊗ ℤ/n ≅ lim((ℤ/n)^k, M)`, the stable image of `M` on `(ℤ/n)^k`,
    /// returned as cyclic orders (each ≥ 2).
    pub fn tensor_cyclic(&self, n: &BigInt) -> Vec<BigInt> {
        let k = self.rank();
        if k == 0 || n <= &BigInt::one() {
            return Vec::new();
        }
        // Composition length of (ℤ/n)^k bounds how long the images keep shrinking.
        let length: u64 = prime_factors(n).iter().map(|(_, e)| u64::from(*e)).sum::<u64>() * k as u64;
        let mut p = IntegerMatrix::identity(k);
        let reduced_m = self.matrix.map_mod(n);
        for _ in 0..length.max(1) {
            p = reduced_m.mul(&p).map_mod(n);
        }
        let mut gens: Vec<Vec<BigInt>> = (0..k).map(|j| p.column(j)).collect();
        for i in 0..k {
            gens.push((0..k).map(|j| if i == j { n.clone() } else { BigInt::zero() }).collect());
        }
        let basis = super::smith::hermite_rows(&gens);
        let b = IntegerMatrix::from_columns(k, &basis);
        let mut cols = Vec::with_capacity(k);
        for i in 0..k {
            let target: Vec<BigInt> = (0..k).map(|j| if i == j { n.clone() } else { BigInt::zero() }).collect();
            cols.push(solve_integer(&b, &target).expect("nℤ^k lies in the image lattice"));
        }
        cokernel(&IntegerMatrix::from_columns(k, &cols)).torsion
    }
}

impl Serialize for StationaryGroup {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let mut st = s.serialize_struct("StationaryGroup", 5)?;
        st.serialize_field("basis", &IntegerMatrix::from_fn(self.basis.len(), self.basis.first().map_or(0, |v| v.len()), |i, j| self.basis[i][j].clone()))?;
        st.serialize_field("matrix", &self.matrix)?;
        st.serialize_field("eventual_rank", &self.eventual_rank())?;
        st.serialize_field("perron", &self.perron())?;
        st.serialize_field("description", &self.describe())?;
        st.end()
    }
}

/// `ℤ^free ⊕ ⊕ ℤ/tᵢ ⊕ ⊕ stationary limits`, plus summands that could not be computed.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct AbelianGroup {
    pub free_rank: usize,
    /// Orders of cyclic torsion summands, each ≥ 2, sorted.
    pub torsion: Vec<BigInt>,
    pub stationary: Vec<StationaryGroup>,
    /// Descriptions of summands left unresolved.
    pub unresolved: Vec<String>,
}

impl AbelianGroup {
    pub fn zero() -> Self {
        AbelianGroup::default()
    }

    pub fn free(rank: usize) -> Self {
        AbelianGroup { free_rank: rank, ..Default::default() }
    }

    pub fn cyclic(n: impl Into<BigInt>) -> Self {
        let mut g = AbelianGroup::zero();
        g.push_torsion(n.into());
        g
    }

    pub fn stationary(s: StationaryGroup) -> Self {
        AbelianGroup { stationary: vec![s], ..Default::default() }
    }

    pub fn from_cokernel(c: super::smith::Cokernel) -> Self {
        let mut g = AbelianGroup::free(c.free_rank);
        for t in c.torsion {
            g.push_torsion(t);
        }
        g
    }

    fn push_torsion(&mut self, n: BigInt) {
        let n = n.abs();
        if n > BigInt::one() {
            self.torsion.push(n);
            self.torsion.sort();
        }
    }

    pub fn direct_sum(mut self, other: AbelianGroup) -> AbelianGroup {
        self.free_rank += other.free_rank;
        for t in other.torsion {
            self.push_torsion(t);
        }
        self.stationary.extend(other.stationary);
        self.unresolved.extend(other.unresolved);
        self
    }

    pub fn is_zero(&self) -> bool {
        self.free_rank == 0
            && self.torsion.is_empty()
            && self.unresolved.is_empty()
            && self.stationary.iter().all(|s| s.eventual_rank() == 0)
    }

    pub fn is_torsion_free(&self) -> bool {
        self.torsion.is_empty()
    }

    /// True for exactly `ℤ`.
    pub fn is_integers(&self) -> bool {
        self.free_rank == 1 && self.torsion.is_empty() && self.stationary.is_empty() && self.unresolved.is_empty()
    }

    /// True for exactly `ℤ/n`.
    pub fn is_cyclic_of_order(&self, n: u64) -> bool {
        self.free_rank == 0 && self.stationary.is_empty() && self.unresolved.is_empty() && self.torsion == vec![BigInt::from(n)]
    }

    pub fn describe(&self) -> String {
        let mut parts = Vec::new();
        match self.free_rank {
            0 => {}
            1 => parts.push("ℤ".to_string()),
            k => parts.push(format!("ℤ^{k}")),
        }
        for s in &self.stationary {
            let d = s.describe();
            if d != "0" {
                parts.push(d);
            }
        }
        for t in &self.torsion {
            parts.push(format!("ℤ/{t}"));
        }
        for u in &self.unresolved {
            parts.push(format!("?({u})"));
        }
        if parts.is_empty() {
            "0".to_string()
        } else {
            parts.join(" ⊕ ")
        }
    }
}

impl Serialize for AbelianGroup {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let torsion: Vec<String> = self.torsion.iter().map(|t| t.to_string()).collect();
        let mut st = s.serialize_struct("AbelianGroup", 6)?;
        st.serialize_field("description", &self.describe())?;
        st.serialize_field("free_rank", &self.free_rank)?;
        st.serialize_field("torsion", &torsion)?;
        st.serialize_field("stationary", &self.stationary)?;
        st.serialize_field("unresolved", &!self.unresolved.is_empty())?;
        st.serialize_field("unresolved_notes", &self.unresolved)?;
        st.end()
    }
}

/// Prime factorization by trial division (inputs here are small).
pub fn prime_factors(n: &BigInt) -> Vec<(BigInt, u32)> {
    let mut n = n.abs();
    let mut out = Vec::new();
    let mut p = BigInt::from(2);
    while &p * &p <= n {
        let mut e = 0;
        while n.is_multiple_of(&p) {
            n /= &p;
            e += 1;
        }
        if e > 0 {
            out.push((p.clone(), e));
        }
        p += 1;
    }
    if n > BigInt::one() {
        out.push((n, 1));
    }
    out
}

/// Product of the distinct primes dividing `n`.
pub fn radical(n: &BigInt) -> BigInt {
    prime_factors(n).into_iter().map(|(p, _)| p).product()
}
