//! Pointed monoids presented as a quotient `C/I`: a finitely generated
//! submonoid `C` of `Z^d` (written additively, possibly with invertible
//! directions) collapsed along a monoid ideal `I`.  Every element is either
//! the class of a lattice point of `C` or the absorbing basepoint.
//!
//! At construction the unit lattice is normalized to the saturated lineality
//! of the generated cone and quotiented away; all membership questions are
//! answered in the quotient, where the cone is pointed and a strictly
//! positive grading bounds every search.

mod predicates;
mod seminormal;

pub use predicates::{Cancellativity, Reducedness, Smoothness};

use std::collections::BTreeSet;
use std::fmt;

use num_bigint::BigInt;
use num_traits::{Signed, ToPrimitive, Zero};
use thiserror::Error;

use crate::lattice::{is_nonneg_combination, Cone, LatticeError, LatticeQuotient, LatticeVector};

#[derive(Clone, Debug, Error, PartialEq, Eq)]
pub enum MonoidError {
    #[error(transparent)]
    Lattice(#[from] LatticeError),
    #[error("vector {v} lies outside the monoid")]
    OutsideMonoid { v: LatticeVector },
    #[error("collapse generator {v} lies outside the monoid")]
    CollapseOutsideMonoid { v: LatticeVector },
    #[error("collapse generator {v} is invertible, so the quotient has 0 = 1")]
    CollapseIsUnit { v: LatticeVector },
    #[error("{op} needs a cancellative presentation (empty collapse)")]
    RequiresCancellative { op: &'static str },
    #[error("{op} needs a reduced monoid; {nilpotent} is a nonzero nilpotent")]
    RequiresReduced { op: &'static str, nilpotent: LatticeVector },
    #[error("{op} needs trivial units")]
    RequiresSharp { op: &'static str },
    #[error("{op} was inconclusive: search capped after {nodes} nodes")]
    Inconclusive { op: &'static str, nodes: usize },
}

/// Element of a pointed monoid: the absorbing basepoint or the class of a
/// lattice point of the cover.  The identity is `Point` of the zero vector;
/// `Zero` is the basepoint, not the identity.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum MonoidElement {
    Zero,
    Point(LatticeVector),
}

impl MonoidElement {
    pub fn is_zero(&self) -> bool {
        matches!(self, MonoidElement::Zero)
    }

    pub fn as_point(&self) -> Option<&LatticeVector> {
        match self {
            MonoidElement::Zero => None,
            MonoidElement::Point(v) => Some(v),
        }
    }
}

impl fmt::Display for MonoidElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MonoidElement::Zero => write!(f, "0"),
            MonoidElement::Point(v) => write!(f, "{v}"),
        }
    }
}

impl fmt::Debug for MonoidElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

#[derive(Clone, Debug)]
pub struct PointedMonoid {
    dim: usize,
    gens: Vec<LatticeVector>,
    units: Vec<LatticeVector>,
    collapse: Vec<LatticeVector>,
    quotient: LatticeQuotient,
    qgens: Vec<LatticeVector>,
    qcone: Cone,
    grading: LatticeVector,
    qcollapse: Vec<LatticeVector>,
}

impl PartialEq for PointedMonoid {
    fn eq(&self, other: &Self) -> bool {
        self.dim == other.dim
            && self.gens == other.gens
            && self.units == other.units
            && self.collapse == other.collapse
    }
}

impl Eq for PointedMonoid {}

/// Face of the cone of the sharp quotient, tagged with the generators lying
/// on it and whether the collapse ideal meets it.
#[derive(Clone, Debug)]
pub struct MonoidFace {
    pub cone: Cone,
    pub gens: Vec<usize>,
    pub contains_collapse: bool,
}

impl PointedMonoid {
    pub fn new(
        dim: usize,
        gens: Vec<LatticeVector>,
        units: Vec<LatticeVector>,
        collapse: Vec<LatticeVector>,
    ) -> Result<Self, MonoidError> {
        for v in gens.iter().chain(units.iter()).chain(collapse.iter()) {
            if v.dim() != dim {
                return Err(LatticeError::DimMismatch { expected: dim, got: v.dim() }.into());
            }
        }
        let mut gens: Vec<LatticeVector> = gens.into_iter().filter(|g| !g.is_zero()).collect();
        gens.sort();
        gens.dedup();

        // The unit lattice is whatever the generators force (two-sided
        // directions of the cone) plus the declared units, saturated.
        let mut spanning = gens.clone();
        for u in &units {
            spanning.push(u.clone());
            spanning.push(u.neg());
        }
        let span_cone = Cone::new(dim, spanning)?;
        let mut unit_basis: Vec<LatticeVector> = span_cone
            .lineality_lattice()
            .into_iter()
            .map(|u| sign_canonical(u))
            .collect();
        unit_basis.sort();

        let quotient = LatticeQuotient::new(dim, &unit_basis);
        let mut qgens: Vec<LatticeVector> = gens
            .iter()
            .map(|g| quotient.project(g))
            .filter(|w| !w.is_zero())
            .collect();
        qgens.sort();
        qgens.dedup();
        let qcone = Cone::new(quotient.qdim(), qgens.clone())?;
        debug_assert!(qcone.is_pointed());
        let grading = qcone.grading();

        let mut partial = PointedMonoid {
            dim,
            gens,
            units: unit_basis,
            collapse: Vec::new(),
            quotient,
            qgens,
            qcone,
            grading,
            qcollapse: Vec::new(),
        };

        let mut ks: Vec<LatticeVector> = collapse;
        ks.sort();
        ks.dedup();
        for k in &ks {
            if !partial.contains_vector(k) {
                return Err(MonoidError::CollapseOutsideMonoid { v: k.clone() });
            }
            if partial.quotient.project(k).is_zero() {
                return Err(MonoidError::CollapseIsUnit { v: k.clone() });
            }
        }
        // Drop collapse generators already in the ideal of the others.
        let mut i = 0;
        while i < ks.len() {
            let redundant = ks
                .iter()
                .enumerate()
                .any(|(j, other)| j != i && partial.contains_vector(&ks[i].sub(other)));
            if redundant {
                ks.remove(i);
            } else {
                i += 1;
            }
        }
        partial.qcollapse = ks.iter().map(|k| partial.quotient.project(k)).collect();
        partial.collapse = ks;
        Ok(partial)
    }

    /// The free monoid `N^dim`.
    pub fn free(dim: usize) -> Self {
        let gens = (0..dim).map(|i| LatticeVector::unit(dim, i)).collect();
        PointedMonoid::new(dim, gens, Vec::new(), Vec::new())
            .expect("unit vectors form a valid presentation")
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn gens(&self) -> &[LatticeVector] {
        &self.gens
    }

    pub fn units(&self) -> &[LatticeVector] {
        &self.units
    }

    pub fn collapse(&self) -> &[LatticeVector] {
        &self.collapse
    }

    pub fn is_sharp(&self) -> bool {
        self.units.is_empty()
    }

    pub(crate) fn quotient(&self) -> &LatticeQuotient {
        &self.quotient
    }

    pub(crate) fn qgens(&self) -> &[LatticeVector] {
        &self.qgens
    }

    pub(crate) fn qcollapse(&self) -> &[LatticeVector] {
        &self.qcollapse
    }

    /// Membership in the quotient coordinates.
    pub(crate) fn member_q(&self, w: &LatticeVector) -> bool {
        is_nonneg_combination(w, &self.qgens, &self.grading)
    }

    /// Collapse-ideal membership in the quotient coordinates.
    pub(crate) fn dead_q(&self, w: &LatticeVector) -> bool {
        self.qcollapse.iter().any(|k| self.member_q(&w.sub(k)))
    }

    /// Whether `v` lies in the cover monoid `C`.
    pub fn contains_vector(&self, v: &LatticeVector) -> bool {
        v.dim() == self.dim && self.member_q(&self.quotient.project(v))
    }

    /// Whether `v` lies in the collapse ideal (hence is zero in the
    /// quotient).
    pub fn vector_in_collapse(&self, v: &LatticeVector) -> bool {
        self.dead_q(&self.quotient.project(v))
    }

    pub fn element(&self, v: &LatticeVector) -> Result<MonoidElement, MonoidError> {
        if !self.contains_vector(v) {
            return Err(MonoidError::OutsideMonoid { v: v.clone() });
        }
        if self.vector_in_collapse(v) {
            Ok(MonoidElement::Zero)
        } else {
            Ok(MonoidElement::Point(v.clone()))
        }
    }

    pub fn identity(&self) -> MonoidElement {
        MonoidElement::Point(LatticeVector::zero(self.dim))
    }

    pub fn zero(&self) -> MonoidElement {
        MonoidElement::Zero
    }

    pub fn add(&self, a: &MonoidElement, b: &MonoidElement) -> MonoidElement {
        match (a, b) {
            (MonoidElement::Zero, _) | (_, MonoidElement::Zero) => MonoidElement::Zero,
            (MonoidElement::Point(x), MonoidElement::Point(y)) => {
                let s = x.add(y);
                if self.vector_in_collapse(&s) {
                    MonoidElement::Zero
                } else {
                    MonoidElement::Point(s)
                }
            }
        }
    }

    /// The image of `e` under the dilation `x -> c.x` (multiplicatively: the
    /// `c`-th power map), which is a pointed monoid endomorphism.
    pub fn dilate(&self, e: &MonoidElement, c: u32) -> MonoidElement {
        debug_assert!(c >= 1);
        match e {
            MonoidElement::Zero => MonoidElement::Zero,
            MonoidElement::Point(v) => {
                let s = v.scale(&BigInt::from(c));
                if self.vector_in_collapse(&s) {
                    MonoidElement::Zero
                } else {
                    MonoidElement::Point(s)
                }
            }
        }
    }

    /// Degree of `v` under the canonical grading (zero exactly on units).
    pub fn degree(&self, v: &LatticeVector) -> BigInt {
        self.grading.dot(&self.quotient.project(v))
    }

    /// Minimal generators modulo units, as lex-least original generators.
    pub fn atoms(&self) -> Vec<LatticeVector> {
        self.atoms_projected()
            .iter()
            .map(|a| {
                self.gens
                    .iter()
                    .find(|g| &self.quotient.project(g) == a)
                    .expect("projected atoms come from generators")
                    .clone()
            })
            .collect()
    }

    /// Minimal generators of the sharp quotient, in quotient coordinates.
    pub(crate) fn atoms_projected(&self) -> Vec<LatticeVector> {
        self.qgens
            .iter()
            .filter(|g| {
                let others: Vec<LatticeVector> =
                    self.qgens.iter().filter(|h| h != g).cloned().collect();
                !is_nonneg_combination(g, &others, &self.grading)
            })
            .cloned()
            .collect()
    }

    /// Nonzero classes by grading degree, in quotient coordinates.  Index `d`
    /// holds the alive elements of degree `d`; index 0 is the identity.
    pub fn census(&self, max_degree: usize) -> Vec<Vec<LatticeVector>> {
        let mut levels: Vec<BTreeSet<LatticeVector>> =
            vec![BTreeSet::new(); max_degree + 1];
        levels[0].insert(LatticeVector::zero(self.quotient.qdim()));
        let degs: Vec<Option<usize>> = self
            .qgens
            .iter()
            .map(|g| self.grading.dot(g).to_usize())
            .collect();
        for d in 0..=max_degree {
            let at: Vec<LatticeVector> = levels[d].iter().cloned().collect();
            for (g, gd) in self.qgens.iter().zip(&degs) {
                let Some(gd) = gd else { continue };
                debug_assert!(*gd > 0);
                if d + gd > max_degree {
                    continue;
                }
                for e in &at {
                    let s = e.add(g);
                    if !self.dead_q(&s) {
                        levels[d + gd].insert(s);
                    }
                }
            }
        }
        levels.into_iter().map(|s| s.into_iter().collect()).collect()
    }

    /// Number of nonzero classes in each degree up to `max_degree`.
    pub fn hilbert(&self, max_degree: usize) -> Vec<usize> {
        self.census(max_degree).iter().map(|l| l.len()).collect()
    }

    /// Adjoins `-v` to the generators: the universal monoid in which `v` is
    /// invertible.  Fails with `CollapseIsUnit` when `v` meets the radical of
    /// the collapse ideal, since the localization then has 0 = 1.
    pub fn localize(&self, v: &LatticeVector) -> Result<PointedMonoid, MonoidError> {
        if !self.contains_vector(v) {
            return Err(MonoidError::OutsideMonoid { v: v.clone() });
        }
        let mut gens = self.gens.clone();
        gens.push(v.neg());
        PointedMonoid::new(self.dim, gens, self.units.clone(), self.collapse.clone())
    }

    /// The sharp quotient: same monoid with the unit lattice divided out.
    pub fn units_quotient(&self) -> PointedMonoid {
        PointedMonoid::new(
            self.quotient.qdim(),
            self.qgens.clone(),
            Vec::new(),
            self.qcollapse.clone(),
        )
        .expect("projected data is a valid sharp presentation")
    }

    /// Whether the two presentations carve out the same submonoid of `Z^d`
    /// with the same collapse ideal.
    pub fn same_submonoid(&self, other: &PointedMonoid) -> bool {
        if self.dim != other.dim {
            return false;
        }
        let cones_agree = self.gens.iter().all(|g| other.contains_vector(g))
            && other.gens.iter().all(|g| self.contains_vector(g))
            && self.units.iter().all(|u| other.quotient.project(u).is_zero())
            && other.units.iter().all(|u| self.quotient.project(u).is_zero());
        if !cones_agree {
            return false;
        }
        self.collapse.iter().all(|k| other.vector_in_collapse(k))
            && other.collapse.iter().all(|k| self.vector_in_collapse(k))
    }

    /// Faces of the sharp quotient's cone, each with the generators lying on
    /// it.  Distinct faces carry distinct generator sets.
    pub fn faces(&self) -> Vec<MonoidFace> {
        self.qcone
            .faces()
            .into_iter()
            .map(|cone| {
                let gens: Vec<usize> = (0..self.gens.len())
                    .filter(|&i| cone.contains(&self.quotient.project(&self.gens[i])))
                    .collect();
                let contains_collapse =
                    self.qcollapse.iter().any(|k| cone.contains(k));
                MonoidFace { cone, gens, contains_collapse }
            })
            .collect()
    }
}

fn sign_canonical(v: LatticeVector) -> LatticeVector {
    match v.coords().iter().find(|c| !c.is_zero()) {
        Some(c) if c.is_negative() => v.neg(),
        _ => v,
    }
}

/// Ideal of a pointed monoid, kept as a minimal list of alive generators.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MonoidIdeal {
    gens: Vec<LatticeVector>,
}

impl MonoidIdeal {
    /// Generators outside the monoid are an error; generators that are zero
    /// in the quotient contribute nothing and are dropped.
    pub fn new(a: &PointedMonoid, gens: Vec<LatticeVector>) -> Result<Self, MonoidError> {
        let mut gs: Vec<LatticeVector> = Vec::new();
        for g in gens {
            if !a.contains_vector(&g) {
                return Err(MonoidError::OutsideMonoid { v: g });
            }
            if !a.vector_in_collapse(&g) {
                gs.push(g);
            }
        }
        gs.sort();
        gs.dedup();
        let mut i = 0;
        while i < gs.len() {
            let redundant = gs
                .iter()
                .enumerate()
                .any(|(j, other)| j != i && a.contains_vector(&gs[i].sub(other)));
            if redundant {
                gs.remove(i);
            } else {
                i += 1;
            }
        }
        Ok(MonoidIdeal { gens: gs })
    }

    pub fn gens(&self) -> &[LatticeVector] {
        &self.gens
    }

    pub fn is_empty(&self) -> bool {
        self.gens.is_empty()
    }

    pub fn contains_vector(&self, a: &PointedMonoid, v: &LatticeVector) -> bool {
        a.vector_in_collapse(v) || self.gens.iter().any(|g| a.contains_vector(&v.sub(g)))
    }

    pub fn contains(&self, a: &PointedMonoid, e: &MonoidElement) -> bool {
        match e {
            MonoidElement::Zero => true,
            MonoidElement::Point(v) => self.contains_vector(a, v),
        }
    }

    /// The `n`-th power, generated by sums of `n` generators.
    pub fn power(&self, a: &PointedMonoid, n: u32) -> Result<MonoidIdeal, MonoidError> {
        assert!(n >= 1);
        let mut sums: Vec<LatticeVector> = vec![LatticeVector::zero(a.dim())];
        for _ in 0..n {
            let mut next: Vec<LatticeVector> = Vec::new();
            for s in &sums {
                for g in &self.gens {
                    next.push(s.add(g));
                }
            }
            next.sort();
            next.dedup();
            sums = next;
        }
        MonoidIdeal::new(a, sums)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn v(coords: &[i64]) -> LatticeVector {
        LatticeVector::from_i64(coords)
    }

    fn cusp() -> PointedMonoid {
        PointedMonoid::new(1, vec![v(&[2]), v(&[3])], vec![], vec![]).unwrap()
    }

    fn plane_mod_xy() -> PointedMonoid {
        PointedMonoid::new(
            2,
            vec![v(&[1, 0]), v(&[0, 1])],
            vec![],
            vec![v(&[1, 1])],
        )
        .unwrap()
    }

    #[test]
    fn cusp_membership_and_atoms() {
        let a = cusp();
        assert!(a.contains_vector(&v(&[5])));
        assert!(!a.contains_vector(&v(&[1])));
        assert_eq!(a.atoms(), vec![v(&[2]), v(&[3])]);
        assert_eq!(
            a.element(&v(&[1])).unwrap_err(),
            MonoidError::OutsideMonoid { v: v(&[1]) }
        );
        assert_eq!(a.hilbert(6), vec![1, 0, 1, 1, 1, 1, 1]);
    }

    #[test]
    fn collapse_absorbs_products() {
        let a = plane_mod_xy();
        assert_eq!(a.element(&v(&[1, 1])).unwrap(), MonoidElement::Zero);
        assert_eq!(a.element(&v(&[2, 1])).unwrap(), MonoidElement::Zero);
        let x = a.element(&v(&[1, 0])).unwrap();
        let y = a.element(&v(&[0, 1])).unwrap();
        assert!(!x.is_zero());
        assert_eq!(a.add(&x, &y), MonoidElement::Zero);
        assert_eq!(a.add(&x, &x), MonoidElement::Point(v(&[2, 0])));
        assert_eq!(a.hilbert(3), vec![1, 2, 2, 2]);
    }

    #[test]
    fn units_are_discovered_and_saturated() {
        let a = PointedMonoid::new(
            2,
            vec![v(&[2, 0]), v(&[-2, 0]), v(&[0, 1])],
            vec![],
            vec![],
        )
        .unwrap();
        assert_eq!(a.units(), &[v(&[1, 0])]);
        assert!(a.contains_vector(&v(&[-7, 2])));
        assert!(!a.contains_vector(&v(&[0, -1])));
        let sharp = a.units_quotient();
        assert!(sharp.is_sharp());
        assert_eq!(sharp.dim(), 1);
    }

    #[test]
    fn localization_inverts_an_element() {
        let a = cusp();
        let local = a.localize(&v(&[2])).unwrap();
        // 3 - 2 = 1 becomes available, so the localization is all of Z.
        assert!(local.contains_vector(&v(&[-5])));
        assert_eq!(local.units(), &[v(&[1])]);
    }

    #[test]
    fn localization_kills_the_complementary_axis() {
        let a = plane_mod_xy();
        let local = a.localize(&v(&[1, 0])).unwrap();
        assert_eq!(local.element(&v(&[0, 1])).unwrap(), MonoidElement::Zero);
        assert_eq!(
            local.element(&v(&[5, 0])).unwrap(),
            MonoidElement::Point(v(&[5, 0]))
        );
        assert!(local.contains_vector(&v(&[-3, 0])));
    }

    #[test]
    fn localization_at_nilpotent_collapses() {
        let a = PointedMonoid::new(1, vec![v(&[1])], vec![], vec![v(&[2])]).unwrap();
        assert_eq!(
            a.localize(&v(&[1])).unwrap_err(),
            MonoidError::CollapseIsUnit { v: v(&[2]) }
        );
    }

    #[test]
    fn redundant_presentations_define_the_same_submonoid() {
        let a = cusp();
        let b = PointedMonoid::new(1, vec![v(&[2]), v(&[3]), v(&[5])], vec![], vec![]).unwrap();
        let c = PointedMonoid::new(1, vec![v(&[2])], vec![], vec![]).unwrap();
        assert!(a.same_submonoid(&b));
        assert!(!a.same_submonoid(&c));
    }

    #[test]
    fn faces_report_generators_and_collapse() {
        let a = plane_mod_xy();
        let faces = a.faces();
        assert_eq!(faces.len(), 4);
        let gen_sets: Vec<Vec<usize>> = faces.iter().map(|f| f.gens.clone()).collect();
        // gens() is sorted: index 0 is (0,1), index 1 is (1,0).
        assert!(gen_sets.contains(&vec![]));
        assert!(gen_sets.contains(&vec![0]));
        assert!(gen_sets.contains(&vec![1]));
        assert!(gen_sets.contains(&vec![0, 1]));
        for f in &faces {
            assert_eq!(f.contains_collapse, f.gens.len() == 2);
        }
    }

    #[test]
    fn ideal_powers_minimalize() {
        let a = PointedMonoid::free(2);
        let m = MonoidIdeal::new(&a, vec![v(&[1, 0]), v(&[0, 1])]).unwrap();
        let m2 = m.power(&a, 2).unwrap();
        assert_eq!(m2.gens(), &[v(&[0, 2]), v(&[1, 1]), v(&[2, 0])]);
        assert!(m2.contains_vector(&a, &v(&[3, 1])));
        assert!(!m2.contains_vector(&a, &v(&[1, 0])));
    }

    #[test]
    fn ideal_drops_dead_generators() {
        let a = plane_mod_xy();
        let i = MonoidIdeal::new(&a, vec![v(&[1, 1]), v(&[1, 0])]).unwrap();
        assert_eq!(i.gens(), &[v(&[1, 0])]);
    }

    #[test]
    fn dilation_is_the_power_map() {
        let a = PointedMonoid::new(1, vec![v(&[1])], vec![], vec![v(&[4])]).unwrap();
        let x = a.element(&v(&[1])).unwrap();
        assert_eq!(a.dilate(&x, 2), MonoidElement::Point(v(&[2])));
        assert_eq!(a.dilate(&x, 4), MonoidElement::Zero);
        let two = a.element(&v(&[2])).unwrap();
        assert_eq!(a.dilate(&two, 2), MonoidElement::Zero);
    }

    #[test]
    fn collapse_generators_are_minimalized() {
        let a = PointedMonoid::new(
            2,
            vec![v(&[1, 0]), v(&[0, 1])],
            vec![],
            vec![v(&[1, 1]), v(&[2, 1]), v(&[1, 2])],
        )
        .unwrap();
        assert_eq!(a.collapse(), &[v(&[1, 1])]);
    }
}
