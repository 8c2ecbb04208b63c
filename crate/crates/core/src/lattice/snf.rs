//! Dense integer matrices and Smith normal form with transform tracking.
//!
//! `smith` returns `d = p * a * q` with `p`, `q` unimodular and their inverses
//! maintained alongside, which is what the quotient-lattice and saturation
//! constructions need.  Matrices are row-major `BigInt`; sizes stay small.

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use super::LatticeVector;

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct IMat {
    rows: usize,
    cols: usize,
    data: Vec<BigInt>,
}

impl IMat {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        IMat { rows, cols, data: vec![BigInt::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = IMat::zeros(n, n);
        for i in 0..n {
            m.set(i, i, BigInt::one());
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<BigInt>>) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        assert!(rows.iter().all(|row| row.len() == c), "ragged rows");
        IMat { rows: r, cols: c, data: rows.into_iter().flatten().collect() }
    }

    /// Columns are the given vectors; the matrix is `dim x n`.
    pub fn from_columns(cols: &[LatticeVector], dim: usize) -> Self {
        let mut m = IMat::zeros(dim, cols.len());
        for (j, v) in cols.iter().enumerate() {
            assert_eq!(v.dim(), dim, "column dimension mismatch");
            for i in 0..dim {
                m.set(i, j, v.coord(i).clone());
            }
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn at(&self, i: usize, j: usize) -> &BigInt {
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: BigInt) {
        self.data[i * self.cols + j] = v;
    }

    pub fn row(&self, i: usize) -> LatticeVector {
        LatticeVector::new(self.data[i * self.cols..(i + 1) * self.cols].to_vec())
    }

    pub fn col(&self, j: usize) -> LatticeVector {
        LatticeVector::new((0..self.rows).map(|i| self.at(i, j).clone()).collect())
    }

    pub fn mul(&self, other: &IMat) -> IMat {
        assert_eq!(self.cols, other.rows, "matrix product shape");
        let mut out = IMat::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.at(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let add = a * other.at(k, j);
                    let cur = out.at(i, j) + add;
                    out.set(i, j, cur);
                }
            }
        }
        out
    }

    /// Matrix-vector product, the vector viewed as a column.
    pub fn apply(&self, v: &LatticeVector) -> LatticeVector {
        assert_eq!(self.cols, v.dim(), "matrix-vector shape");
        let mut out = Vec::with_capacity(self.rows);
        for i in 0..self.rows {
            let mut acc = BigInt::zero();
            for j in 0..self.cols {
                acc += self.at(i, j) * v.coord(j);
            }
            out.push(acc);
        }
        LatticeVector::new(out)
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for j in 0..self.cols {
            self.data.swap(a * self.cols + j, b * self.cols + j);
        }
    }

    fn swap_cols(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for i in 0..self.rows {
            self.data.swap(i * self.cols + a, i * self.cols + b);
        }
    }

    fn negate_row(&mut self, r: usize) {
        for j in 0..self.cols {
            let v = -self.at(r, j).clone();
            self.set(r, j, v);
        }
    }

    fn negate_col(&mut self, c: usize) {
        for i in 0..self.rows {
            let v = -self.at(i, c).clone();
            self.set(i, c, v);
        }
    }

    /// row[target] += k * row[src]
    fn add_row(&mut self, target: usize, src: usize, k: &BigInt) {
        if k.is_zero() {
            return;
        }
        for j in 0..self.cols {
            let v = self.at(target, j) + k * self.at(src, j);
            self.set(target, j, v);
        }
    }

    /// col[target] += k * col[src]
    fn add_col(&mut self, target: usize, src: usize, k: &BigInt) {
        if k.is_zero() {
            return;
        }
        for i in 0..self.rows {
            let v = self.at(i, target) + k * self.at(i, src);
            self.set(i, target, v);
        }
    }
}

/// Smith decomposition `d = p * a * q`; `factors` are the nonzero diagonal
/// invariant factors (each divides the next).
pub struct Smith {
    pub d: IMat,
    pub p: IMat,
    pub p_inv: IMat,
    pub q: IMat,
    pub q_inv: IMat,
    pub rank: usize,
    pub factors: Vec<BigInt>,
}

pub fn smith(a: &IMat) -> Smith {
    let mut d = a.clone();
    let rows = d.rows();
    let cols = d.cols();
    let mut p = IMat::identity(rows);
    let mut p_inv = IMat::identity(rows);
    let mut q = IMat::identity(cols);
    let mut q_inv = IMat::identity(cols);

    // Mirrored elementary operations keeping d = p * a * q and the inverses.
    macro_rules! row_swap {
        ($i:expr, $j:expr) => {{
            d.swap_rows($i, $j);
            p.swap_rows($i, $j);
            p_inv.swap_cols($i, $j);
        }};
    }
    macro_rules! col_swap {
        ($i:expr, $j:expr) => {{
            d.swap_cols($i, $j);
            q.swap_cols($i, $j);
            q_inv.swap_rows($i, $j);
        }};
    }
    macro_rules! row_add {
        ($t:expr, $s:expr, $k:expr) => {{
            let k: BigInt = $k;
            d.add_row($t, $s, &k);
            p.add_row($t, $s, &k);
            p_inv.add_col($s, $t, &(-k));
        }};
    }
    macro_rules! col_add {
        ($t:expr, $s:expr, $k:expr) => {{
            let k: BigInt = $k;
            d.add_col($t, $s, &k);
            q.add_col($t, $s, &k);
            q_inv.add_row($s, $t, &(-k));
        }};
    }

    let n = rows.min(cols);
    let mut k = 0;
    while k < n {
        // Locate a pivot of minimal absolute value in the trailing block.
        let mut pivot: Option<(usize, usize)> = None;
        for i in k..rows {
            for j in k..cols {
                if !d.at(i, j).is_zero()
                    && pivot.map_or(true, |(pi, pj)| d.at(i, j).abs() < d.at(pi, pj).abs())
                {
                    pivot = Some((i, j));
                }
            }
        }
        let Some((pi, pj)) = pivot else { break };
        row_swap!(k, pi);
        col_swap!(k, pj);

        loop {
            let mut dirty = false;
            for i in k + 1..rows {
                if !d.at(i, k).is_zero() {
                    let qk = floor_div(d.at(i, k), d.at(k, k));
                    row_add!(i, k, -qk);
                    if !d.at(i, k).is_zero() {
                        row_swap!(k, i);
                        dirty = true;
                    }
                }
            }
            for j in k + 1..cols {
                if !d.at(k, j).is_zero() {
                    let qk = floor_div(d.at(k, j), d.at(k, k));
                    col_add!(j, k, -qk);
                    if !d.at(k, j).is_zero() {
                        col_swap!(k, j);
                        dirty = true;
                    }
                }
            }
            if dirty {
                continue;
            }
            // Divisibility pass: the pivot must divide the trailing block.
            let mut fixed = true;
            'scan: for i in k + 1..rows {
                for j in k + 1..cols {
                    if !(d.at(i, j) % d.at(k, k)).is_zero() {
                        row_add!(k, i, BigInt::one());
                        fixed = false;
                        break 'scan;
                    }
                }
            }
            if fixed {
                break;
            }
        }
        if d.at(k, k).is_negative() {
            d.negate_row(k);
            p.negate_row(k);
            p_inv.negate_col(k);
        }
        k += 1;
    }

    let mut factors = Vec::new();
    for i in 0..n {
        if d.at(i, i).is_zero() {
            break;
        }
        factors.push(d.at(i, i).clone());
    }
    let rank = factors.len();
    Smith { d, p, p_inv, q, q_inv, rank, factors }
}

fn floor_div(a: &BigInt, b: &BigInt) -> BigInt {
    // Rounded-toward-zero division is fine for the reduction loop.
    a / b
}

/// Basis of the integer kernel `{x : a x = 0}`; always a saturated sublattice.
pub fn kernel_basis(a: &IMat) -> Vec<LatticeVector> {
    let s = smith(a);
    (s.rank..a.cols()).map(|j| s.q.col(j)).collect()
}

/// Integer solution of `a x = b` if one exists.
pub fn solve(a: &IMat, b: &LatticeVector) -> Option<LatticeVector> {
    let s = smith(a);
    let y = s.p.apply(b);
    let mut z = vec![BigInt::zero(); a.cols()];
    for i in 0..a.rows() {
        if i < s.rank {
            let (quot, rem) = num_integer::Integer::div_rem(y.coord(i), &s.factors[i]);
            if !rem.is_zero() {
                return None;
            }
            z[i] = quot;
        } else if !y.coord(i).is_zero() {
            return None;
        }
    }
    Some(s.q.apply(&LatticeVector::new(z)))
}

/// Rank over the rationals via fraction-free (Bareiss) elimination.
pub fn rank(a: &IMat) -> usize {
    let mut m = a.clone();
    let rows = m.rows();
    let cols = m.cols();
    let mut rank = 0;
    let mut prev = BigInt::one();
    for col in 0..cols {
        let Some(pr) = (rank..rows).find(|&i| !m.at(i, col).is_zero()) else { continue };
        m.swap_rows(rank, pr);
        for i in rank + 1..rows {
            for j in col + 1..cols {
                let v = (m.at(rank, col) * m.at(i, j) - m.at(i, col) * m.at(rank, j)) / &prev;
                m.set(i, j, v);
            }
            m.set(i, col, BigInt::zero());
        }
        prev = m.at(rank, col).clone();
        rank += 1;
        if rank == rows {
            break;
        }
    }
    rank
}
