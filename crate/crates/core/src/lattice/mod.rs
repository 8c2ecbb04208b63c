//! Exact lattice geometry: integer vectors, rational polyhedral cones, and
//! the enumeration primitives the rest of the crate is built on.

pub mod dd;
pub mod dio;
pub mod ratmat;
pub mod snf;

use std::collections::BTreeSet;
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use thiserror::Error;

use dd::{dual_description, DualDescription};
use ratmat::{in_half_open_box, solve_columns};
use snf::{kernel_basis, rank as int_rank, smith, IMat};

#[derive(Clone, Debug, Error, PartialEq, Eq)]
pub enum LatticeError {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimMismatch { expected: usize, got: usize },
    #[error("cone is not pointed")]
    NotPointed,
    #[error("enumeration exceeded its budget after {nodes} nodes")]
    SearchCapped { nodes: usize },
}

/// A point of `Z^d`.  Ordering is lexicographic, which doubles as the
/// canonical ordering for generator lists throughout the crate.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct LatticeVector(Vec<BigInt>);

impl LatticeVector {
    pub fn new(coords: Vec<BigInt>) -> Self {
        LatticeVector(coords)
    }

    pub fn zero(dim: usize) -> Self {
        LatticeVector(vec![BigInt::zero(); dim])
    }

    pub fn unit(dim: usize, i: usize) -> Self {
        let mut c = vec![BigInt::zero(); dim];
        c[i] = BigInt::one();
        LatticeVector(c)
    }

    pub fn from_i64(coords: &[i64]) -> Self {
        LatticeVector(coords.iter().map(|&c| BigInt::from(c)).collect())
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn coords(&self) -> &[BigInt] {
        &self.0
    }

    pub fn coord(&self, i: usize) -> &BigInt {
        &self.0[i]
    }

    pub fn into_coords(self) -> Vec<BigInt> {
        self.0
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|c| c.is_zero())
    }

    pub fn add(&self, other: &LatticeVector) -> LatticeVector {
        debug_assert_eq!(self.dim(), other.dim());
        LatticeVector(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    pub fn sub(&self, other: &LatticeVector) -> LatticeVector {
        debug_assert_eq!(self.dim(), other.dim());
        LatticeVector(self.0.iter().zip(&other.0).map(|(a, b)| a - b).collect())
    }

    pub fn neg(&self) -> LatticeVector {
        LatticeVector(self.0.iter().map(|a| -a).collect())
    }

    pub fn scale(&self, k: &BigInt) -> LatticeVector {
        LatticeVector(self.0.iter().map(|a| a * k).collect())
    }

    pub fn dot(&self, other: &LatticeVector) -> BigInt {
        debug_assert_eq!(self.dim(), other.dim());
        self.0.iter().zip(&other.0).map(|(a, b)| a * b).sum()
    }

    /// Divides out the gcd of the coordinates; zero stays zero.
    pub fn primitive(&self) -> LatticeVector {
        let mut g = BigInt::zero();
        for c in &self.0 {
            g = g.gcd(c);
        }
        if g.is_zero() || g.is_one() {
            return self.clone();
        }
        LatticeVector(self.0.iter().map(|c| c / &g).collect())
    }
}

impl fmt::Display for LatticeVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, c) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{c}")?;
        }
        write!(f, ")")
    }
}

impl fmt::Debug for LatticeVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// Whether `v` lies in the rational cone spanned by `gens`.
pub fn in_cone(v: &LatticeVector, gens: &[LatticeVector], dim: usize) -> bool {
    cone_contains(&dual_description(gens, dim), v)
}

fn cone_contains(dual: &DualDescription, v: &LatticeVector) -> bool {
    dual.rays.iter().all(|u| !u.dot(v).is_negative())
        && dual.lineality.iter().all(|u| u.dot(v).is_zero())
}

/// Rational polyhedral cone, stored with extreme primitive rays and its dual
/// description.
#[derive(Clone, Debug)]
pub struct Cone {
    dim: usize,
    rays: Vec<LatticeVector>,
    dual: DualDescription,
}

impl PartialEq for Cone {
    fn eq(&self, other: &Self) -> bool {
        self.dim == other.dim && self.rays == other.rays
    }
}

impl Eq for Cone {}

impl Cone {
    pub fn new(dim: usize, rays: Vec<LatticeVector>) -> Result<Cone, LatticeError> {
        for r in &rays {
            if r.dim() != dim {
                return Err(LatticeError::DimMismatch { expected: dim, got: r.dim() });
            }
        }
        let mut rs: Vec<LatticeVector> = rays
            .iter()
            .filter(|r| !r.is_zero())
            .map(|r| r.primitive())
            .collect();
        rs.sort();
        rs.dedup();
        // Keep extreme rays only, so ray lists are canonical for pointed cones.
        let mut i = 0;
        while i < rs.len() {
            let mut others = rs.clone();
            others.remove(i);
            if in_cone(&rs[i], &others, dim) {
                rs.remove(i);
            } else {
                i += 1;
            }
        }
        let dual = dual_description(&rs, dim);
        Ok(Cone { dim, rays: rs, dual })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn rays(&self) -> &[LatticeVector] {
        &self.rays
    }

    pub fn dual(&self) -> &DualDescription {
        &self.dual
    }

    pub fn contains(&self, v: &LatticeVector) -> bool {
        cone_contains(&self.dual, v)
    }

    pub fn is_pointed(&self) -> bool {
        if self.dim == 0 {
            return true;
        }
        let rows: Vec<Vec<BigInt>> = self
            .dual
            .rays
            .iter()
            .chain(self.dual.lineality.iter())
            .map(|u| u.coords().to_vec())
            .collect();
        if rows.is_empty() {
            return false;
        }
        int_rank(&IMat::from_rows(rows)) == self.dim
    }

    /// Saturated basis of `{x : x, -x both in the cone}`.
    pub fn lineality_lattice(&self) -> Vec<LatticeVector> {
        let rows: Vec<Vec<BigInt>> = self
            .dual
            .rays
            .iter()
            .chain(self.dual.lineality.iter())
            .map(|u| u.coords().to_vec())
            .collect();
        if rows.is_empty() {
            return (0..self.dim).map(|i| LatticeVector::unit(self.dim, i)).collect();
        }
        kernel_basis(&IMat::from_rows(rows))
    }

    /// Sum of the dual extreme rays: zero on the lineality, strictly positive
    /// everywhere else on the cone.
    pub fn grading(&self) -> LatticeVector {
        let mut g = LatticeVector::zero(self.dim);
        for u in &self.dual.rays {
            g = g.add(u);
        }
        g
    }

    pub fn is_unimodular(&self) -> bool {
        if self.rays.is_empty() {
            return true;
        }
        let s = smith(&IMat::from_columns(&self.rays, self.dim));
        s.rank == self.rays.len() && s.factors.iter().all(|f| f.is_one())
    }

    /// All faces (including the cone itself and its minimal face), for
    /// pointed cones.  Faces are iterated intersections with facet
    /// hyperplanes, so each is again a cone on a subset of the rays.
    pub fn faces(&self) -> Vec<Cone> {
        debug_assert!(self.is_pointed());
        let mut seen: BTreeSet<Vec<LatticeVector>> = BTreeSet::new();
        let mut queue = vec![self.rays.clone()];
        seen.insert(self.rays.clone());
        while let Some(cur) = queue.pop() {
            for u in &self.dual.rays {
                let child: Vec<LatticeVector> =
                    cur.iter().filter(|r| u.dot(r).is_zero()).cloned().collect();
                if seen.insert(child.clone()) {
                    queue.push(child);
                }
            }
        }
        seen.into_iter()
            .map(|rs| Cone::new(self.dim, rs).expect("face rays live in the same lattice"))
            .collect()
    }

    /// Minimal generating set of `cone /\ Z^dim` (pointed cones only).
    ///
    /// Candidates are the rays plus the lattice points of the half-open
    /// parallelepipeds of all linearly independent ray subsets; irreducible
    /// candidates form the basis.
    pub fn hilbert_basis(&self) -> Result<Vec<LatticeVector>, LatticeError> {
        if !self.is_pointed() {
            return Err(LatticeError::NotPointed);
        }
        let k = self.rays.len();
        if k == 0 {
            return Ok(Vec::new());
        }
        if k > 16 {
            return Err(LatticeError::SearchCapped { nodes: 1usize << k });
        }
        let mut cands: BTreeSet<LatticeVector> = self.rays.iter().cloned().collect();
        for mask in 1u32..(1u32 << k) {
            let subset: Vec<LatticeVector> = (0..k)
                .filter(|i| mask >> i & 1 == 1)
                .map(|i| self.rays[i].clone())
                .collect();
            if subset.len() < 2 {
                continue;
            }
            if int_rank(&IMat::from_columns(&subset, self.dim)) < subset.len() {
                continue;
            }
            for p in parallelepiped_points(&subset, self.dim)? {
                if !p.is_zero() {
                    cands.insert(p);
                }
            }
        }
        let all: Vec<LatticeVector> = cands.into_iter().collect();
        Ok(all
            .iter()
            .filter(|c| !all.iter().any(|a| a != *c && self.contains(&c.sub(a))))
            .cloned()
            .collect())
    }
}

/// Integer points of `{sum t_i subset[i] : 0 <= t_i < 1}` for linearly
/// independent `subset`.
fn parallelepiped_points(
    subset: &[LatticeVector],
    dim: usize,
) -> Result<Vec<LatticeVector>, LatticeError> {
    if dim == 0 {
        return Ok(Vec::new());
    }
    let mut lo = vec![0i128; dim];
    let mut hi = vec![0i128; dim];
    for j in 0..dim {
        for r in subset {
            let c = r.coords()[j]
                .to_i128()
                .ok_or(LatticeError::SearchCapped { nodes: usize::MAX })?;
            if c < 0 {
                lo[j] += c;
            } else {
                hi[j] += c;
            }
        }
    }
    let mut volume: i128 = 1;
    for j in 0..dim {
        volume = volume.saturating_mul(hi[j] - lo[j] + 1);
    }
    if volume > 4_000_000 {
        return Err(LatticeError::SearchCapped { nodes: volume.min(usize::MAX as i128) as usize });
    }
    let mut out = Vec::new();
    let mut cur = lo.clone();
    loop {
        let p = LatticeVector(cur.iter().map(|&c| BigInt::from(c)).collect());
        if let Some(t) = solve_columns(subset, &p) {
            if in_half_open_box(&t) {
                out.push(p);
            }
        }
        let mut j = 0;
        loop {
            if j == dim {
                return Ok(out);
            }
            cur[j] += 1;
            if cur[j] <= hi[j] {
                break;
            }
            cur[j] = lo[j];
            j += 1;
        }
    }
}

/// Whether `x` is a finite sum of `gens`, decided by depth-first search
/// bounded by a functional that is strictly positive on every generator.
pub fn is_nonneg_combination(
    x: &LatticeVector,
    gens: &[LatticeVector],
    grading: &LatticeVector,
) -> bool {
    let gens: Vec<&LatticeVector> = gens.iter().filter(|g| !g.is_zero()).collect();
    debug_assert!(gens.iter().all(|g| grading.dot(g).is_positive()));
    let mut dead: BTreeSet<LatticeVector> = BTreeSet::new();
    go(x, &gens, grading, &mut dead)
}

fn go(
    x: &LatticeVector,
    gens: &[&LatticeVector],
    grading: &LatticeVector,
    dead: &mut BTreeSet<LatticeVector>,
) -> bool {
    if x.is_zero() {
        return true;
    }
    let deg = grading.dot(x);
    if !deg.is_positive() {
        return false;
    }
    if dead.contains(x) {
        return false;
    }
    for g in gens {
        if grading.dot(g) > deg {
            continue;
        }
        if go(&x.sub(g), gens, grading, dead) {
            return true;
        }
    }
    dead.insert(x.clone());
    false
}

/// Quotient of `Z^dim` by a saturated sublattice, with a splitting.
#[derive(Clone, Debug)]
pub struct LatticeQuotient {
    dim: usize,
    qdim: usize,
    proj: IMat,
    lift_mat: IMat,
}

impl LatticeQuotient {
    pub fn new(dim: usize, units: &[LatticeVector]) -> Self {
        if units.is_empty() {
            return LatticeQuotient {
                dim,
                qdim: dim,
                proj: IMat::identity(dim),
                lift_mat: IMat::identity(dim),
            };
        }
        let s = smith(&IMat::from_columns(units, dim));
        debug_assert!(
            s.factors.iter().all(|f| f.is_one()),
            "quotient requires a saturated sublattice"
        );
        let r = s.rank;
        let qdim = dim - r;
        let mut proj = IMat::zeros(qdim, dim);
        for i in 0..qdim {
            for j in 0..dim {
                proj.set(i, j, s.p.at(r + i, j).clone());
            }
        }
        let mut lift_mat = IMat::zeros(dim, qdim);
        for i in 0..dim {
            for j in 0..qdim {
                lift_mat.set(i, j, s.p_inv.at(i, r + j).clone());
            }
        }
        LatticeQuotient { dim, qdim, proj, lift_mat }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Dimension of the quotient lattice.
    pub fn qdim(&self) -> usize {
        self.qdim
    }

    pub fn project(&self, v: &LatticeVector) -> LatticeVector {
        debug_assert_eq!(v.dim(), self.dim);
        self.proj.apply(v)
    }

    /// A section of `project`: `project(lift(w)) == w`.
    pub fn lift(&self, w: &LatticeVector) -> LatticeVector {
        debug_assert_eq!(w.dim(), self.qdim);
        self.lift_mat.apply(w)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn v(coords: &[i64]) -> LatticeVector {
        LatticeVector::from_i64(coords)
    }

    #[test]
    fn primitive_divides_out_common_factor() {
        assert_eq!(v(&[4, -6]).primitive(), v(&[2, -3]));
        assert_eq!(v(&[0, 0]).primitive(), v(&[0, 0]));
    }

    #[test]
    fn cone_reduces_to_extreme_rays() {
        let c = Cone::new(2, vec![v(&[1, 0]), v(&[1, 1]), v(&[0, 1]), v(&[2, 2])]).unwrap();
        assert_eq!(c.rays(), &[v(&[0, 1]), v(&[1, 0])]);
        assert!(c.contains(&v(&[5, 3])));
        assert!(!c.contains(&v(&[-1, 0])));
    }

    #[test]
    fn hilbert_basis_of_skew_cone() {
        let c = Cone::new(2, vec![v(&[1, 0]), v(&[1, 2])]).unwrap();
        assert_eq!(
            c.hilbert_basis().unwrap(),
            vec![v(&[1, 0]), v(&[1, 1]), v(&[1, 2])]
        );
        assert!(!c.is_unimodular());
    }

    #[test]
    fn hilbert_basis_needs_pointedness() {
        let c = Cone::new(1, vec![v(&[1]), v(&[-1])]).unwrap();
        assert!(!c.is_pointed());
        assert_eq!(c.hilbert_basis().unwrap_err(), LatticeError::NotPointed);
    }

    #[test]
    fn hilbert_basis_of_low_dimensional_cone() {
        let c = Cone::new(2, vec![v(&[1, 1])]).unwrap();
        assert!(c.is_pointed());
        assert_eq!(c.hilbert_basis().unwrap(), vec![v(&[1, 1])]);
    }

    #[test]
    fn quadrant_is_unimodular_with_four_faces() {
        let c = Cone::new(2, vec![v(&[1, 0]), v(&[0, 1])]).unwrap();
        assert!(c.is_unimodular());
        let faces = c.faces();
        assert_eq!(faces.len(), 4);
        assert!(faces.iter().any(|f| f.rays().is_empty()));
        assert!(faces.iter().any(|f| f.rays() == [v(&[0, 1]), v(&[1, 0])]));
    }

    #[test]
    fn lineality_lattice_of_halfplane() {
        let c = Cone::new(2, vec![v(&[1, 0]), v(&[0, 1]), v(&[0, -1])]).unwrap();
        assert!(!c.is_pointed());
        assert_eq!(c.lineality_lattice(), vec![v(&[0, 1])]);
    }

    #[test]
    fn membership_by_bounded_search() {
        let gens = [v(&[2]), v(&[3])];
        let grading = v(&[1]);
        assert!(is_nonneg_combination(&v(&[7]), &gens, &grading));
        assert!(!is_nonneg_combination(&v(&[1]), &gens, &grading));
        assert!(is_nonneg_combination(&v(&[0]), &gens, &grading));
    }

    #[test]
    fn quotient_by_unit_direction() {
        let q = LatticeQuotient::new(2, &[v(&[0, 1])]);
        assert_eq!(q.qdim(), 1);
        assert_eq!(q.project(&v(&[3, 5])), v(&[3]));
        assert!(q.project(&v(&[0, 7])).is_zero());
        let w = v(&[4]);
        assert_eq!(q.project(&q.lift(&w)), w);
    }

    #[test]
    fn quotient_by_skew_direction() {
        let q = LatticeQuotient::new(2, &[v(&[1, 1])]);
        assert_eq!(q.qdim(), 1);
        assert!(q.project(&v(&[1, 1])).is_zero());
        assert_eq!(q.project(&v(&[2, 2])), v(&[0]));
        let a = q.project(&v(&[1, 0]));
        let b = q.project(&v(&[0, 1]));
        assert_eq!(a.add(&b), v(&[0]));
        assert!(!a.is_zero());
    }
}
