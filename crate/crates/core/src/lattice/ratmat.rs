//! Small exact rational matrices: solving and rank for the few places where
//! integer arithmetic is not enough (parallelepiped coordinates, induced maps
//! on homology).

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use super::LatticeVector;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RatMat {
    rows: usize,
    cols: usize,
    data: Vec<BigRational>,
}

impl RatMat {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        RatMat { rows, cols, data: vec![BigRational::zero(); rows * cols] }
    }

    pub fn from_rows(rows: Vec<Vec<BigRational>>) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, |row| row.len());
        assert!(rows.iter().all(|row| row.len() == c));
        RatMat { rows: r, cols: c, data: rows.into_iter().flatten().collect() }
    }

    pub fn from_int_rows(rows: Vec<Vec<BigInt>>) -> Self {
        RatMat::from_rows(
            rows.into_iter()
                .map(|row| row.into_iter().map(BigRational::from_integer).collect())
                .collect(),
        )
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn at(&self, i: usize, j: usize) -> &BigRational {
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: BigRational) {
        self.data[i * self.cols + j] = v;
    }

    pub fn mul(&self, other: &RatMat) -> RatMat {
        assert_eq!(self.cols, other.rows);
        let mut out = RatMat::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for j in 0..other.cols {
                let mut acc = BigRational::zero();
                for k in 0..self.cols {
                    acc += self.at(i, k) * other.at(k, j);
                }
                out.set(i, j, acc);
            }
        }
        out
    }

    pub fn rank(&self) -> usize {
        let mut m = self.clone();
        let mut rank = 0;
        let mut row = 0;
        for col in 0..m.cols {
            let pivot = (row..m.rows).find(|&i| !m.at(i, col).is_zero());
            let Some(p) = pivot else { continue };
            for j in 0..m.cols {
                let a = m.at(row, j).clone();
                let b = m.at(p, j).clone();
                m.set(row, j, b);
                m.set(p, j, a);
            }
            let inv = m.at(row, col).clone();
            for i in row + 1..m.rows {
                let factor = m.at(i, col) / &inv;
                if factor.is_zero() {
                    continue;
                }
                for j in col..m.cols {
                    let v = m.at(i, j) - &factor * m.at(row, j);
                    m.set(i, j, v);
                }
            }
            rank += 1;
            row += 1;
            if row == m.rows {
                break;
            }
        }
        rank
    }
}

/// Unique rational solution of `sum_i t_i cols[i] = rhs` when `cols` are
/// linearly independent; `None` when inconsistent.
pub fn solve_columns(cols: &[LatticeVector], rhs: &LatticeVector) -> Option<Vec<BigRational>> {
    let dim = rhs.dim();
    let n = cols.len();
    // Augmented [cols | rhs], eliminated by rows.
    let mut m = RatMat::zeros(dim, n + 1);
    for (j, c) in cols.iter().enumerate() {
        for i in 0..dim {
            m.set(i, j, BigRational::from_integer(c.coords()[i].clone()));
        }
    }
    for i in 0..dim {
        m.set(i, n, BigRational::from_integer(rhs.coords()[i].clone()));
    }

    let mut pivots: Vec<usize> = Vec::new();
    let mut row = 0;
    for col in 0..n {
        let Some(p) = (row..dim).find(|&i| !m.at(i, col).is_zero()) else {
            continue;
        };
        for j in 0..=n {
            let a = m.at(row, j).clone();
            let b = m.at(p, j).clone();
            m.set(row, j, b);
            m.set(p, j, a);
        }
        let inv = m.at(row, col).clone();
        for i in 0..dim {
            if i == row || m.at(i, col).is_zero() {
                continue;
            }
            let factor = m.at(i, col) / &inv;
            for j in col..=n {
                let v = m.at(i, j) - &factor * m.at(row, j);
                m.set(i, j, v);
            }
        }
        pivots.push(col);
        row += 1;
    }
    if pivots.len() < n {
        // Dependent columns: reject rather than pick an arbitrary solution.
        return None;
    }
    for i in row..dim {
        if !m.at(i, n).is_zero() {
            return None;
        }
    }
    let mut t = vec![BigRational::zero(); n];
    for (r, &col) in pivots.iter().enumerate() {
        t[col] = m.at(r, n) / m.at(r, col);
    }
    Some(t)
}

/// Whether every entry lies in `[0, 1)`.
pub fn in_half_open_box(t: &[BigRational]) -> bool {
    t.iter().all(|x| !x.is_negative() && *x < BigRational::one())
}
