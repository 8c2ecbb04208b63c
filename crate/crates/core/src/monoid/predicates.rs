//! Certified verdicts on a pointed monoid: cancellativity, reducedness,
//! smoothness.  Each check is a finite search that either proves the
//! property, produces a concrete counterexample, or reports that its budget
//! ran out — never a guess.

use num_bigint::BigInt;

use crate::lattice::dio::{minimal_nonneg_solutions, DioLimits};
use crate::lattice::snf::{kernel_basis, rank as int_rank, IMat};
use crate::lattice::{LatticeError, LatticeVector};

use super::seminormal::relint_cover;
use super::PointedMonoid;

/// Whether `a.s = b.s` with `s` nonzero forces `a = b`.  Fails exactly when
/// the collapse ideal is not prime, i.e. when two nonzero elements multiply
/// to zero; the witness is such a pair.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Cancellativity {
    Cancellative,
    NotCancellative { x: LatticeVector, y: LatticeVector },
    Unknown { nodes: usize },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Reducedness {
    Reduced,
    NotReduced { nilpotent: LatticeVector },
    Unknown { nodes: usize },
}

/// Smooth means isomorphic to a free monoid times a unit group, with the
/// basepoint adjoined.  `AtomRelation` carries an integer relation
/// `sum coeffs[i] * atoms[i] = 0` among the projected atoms.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Smoothness {
    Smooth,
    NotCancellative { x: LatticeVector, y: LatticeVector },
    AtomRelation { atoms: Vec<LatticeVector>, coeffs: Vec<BigInt> },
    Unknown { nodes: usize },
}

impl PointedMonoid {
    /// The collapse ideal is prime iff no multiset of nonzero atoms sums into
    /// it.  That reduction is complete because a nonzero element decomposes
    /// into atoms that are all nonzero, and aliveness is inherited by
    /// sub-sums.
    pub fn is_cancellative(&self) -> Cancellativity {
        if self.collapse().is_empty() {
            return Cancellativity::Cancellative;
        }
        let atoms = self.atoms();
        let pairs: Vec<(LatticeVector, LatticeVector)> = atoms
            .iter()
            .map(|a| (self.quotient().project(a), a.clone()))
            .filter(|(p, _)| !self.dead_q(p))
            .collect();
        let mut cols: Vec<LatticeVector> = pairs.iter().map(|(p, _)| p.clone()).collect();
        let n_atoms = cols.len();
        for g in self.qgens() {
            cols.push(g.neg());
        }
        let limits = DioLimits::default();
        for qk in self.qcollapse() {
            let sols = match minimal_nonneg_solutions(&cols, qk, &limits) {
                Ok(sols) => sols,
                Err(LatticeError::SearchCapped { nodes }) => {
                    return Cancellativity::Unknown { nodes }
                }
                Err(_) => unreachable!("solver only fails by capping"),
            };
            let Some(sol) = sols.first() else { continue };
            // Walk the multiset; the first prefix that dies exhibits the
            // zero-divisor pair.
            let mut prefix_q = LatticeVector::zero(self.quotient().qdim());
            let mut prefix = LatticeVector::zero(self.dim());
            for (i, &mult) in sol.iter().take(n_atoms).enumerate() {
                for _ in 0..mult {
                    let next_q = prefix_q.add(&pairs[i].0);
                    if self.dead_q(&next_q) {
                        return Cancellativity::NotCancellative {
                            x: prefix,
                            y: pairs[i].1.clone(),
                        };
                    }
                    prefix_q = next_q;
                    prefix = prefix.add(&pairs[i].1);
                }
            }
            unreachable!("a multiset summing into the ideal must die along the way");
        }
        Cancellativity::Cancellative
    }

    /// A nonzero class is nilpotent iff the smallest face containing it also
    /// contains a collapse generator.  It therefore suffices to test, per
    /// such face, the finitely many module generators of the face's relative
    /// interior.
    pub fn is_reduced(&self) -> Reducedness {
        if self.collapse().is_empty() {
            return Reducedness::Reduced;
        }
        for face in self.faces() {
            if !face.contains_collapse {
                continue;
            }
            let mut fgens: Vec<LatticeVector> = face
                .gens
                .iter()
                .map(|&i| self.quotient().project(&self.gens()[i]))
                .filter(|w| !w.is_zero())
                .collect();
            fgens.sort();
            fgens.dedup();
            let ws = face.cone.dual().rays.clone();
            debug_assert!(!ws.is_empty());
            let cover = match relint_cover(&fgens, &ws, self.quotient().qdim()) {
                Ok(c) => c,
                Err(LatticeError::SearchCapped { nodes }) => {
                    return Reducedness::Unknown { nodes }
                }
                Err(_) => unreachable!("solver only fails by capping"),
            };
            for e in cover {
                if !self.dead_q(&e) {
                    return Reducedness::NotReduced {
                        nilpotent: self.quotient().lift(&e),
                    };
                }
            }
        }
        Reducedness::Reduced
    }

    /// Smoothness needs a prime collapse ideal (possibly empty) and linearly
    /// independent atoms among the nonzero classes.
    pub fn is_smooth(&self) -> Smoothness {
        match self.is_cancellative() {
            Cancellativity::Unknown { nodes } => return Smoothness::Unknown { nodes },
            Cancellativity::NotCancellative { x, y } => {
                return Smoothness::NotCancellative { x, y }
            }
            Cancellativity::Cancellative => {}
        }
        let alive: Vec<(LatticeVector, LatticeVector)> = self
            .atoms()
            .iter()
            .map(|a| (self.quotient().project(a), a.clone()))
            .filter(|(p, _)| !self.dead_q(p))
            .collect();
        if alive.is_empty() {
            return Smoothness::Smooth;
        }
        let proj: Vec<LatticeVector> = alive.iter().map(|(p, _)| p.clone()).collect();
        let m = IMat::from_columns(&proj, self.quotient().qdim());
        if int_rank(&m) == proj.len() {
            return Smoothness::Smooth;
        }
        let relation = kernel_basis(&m)
            .into_iter()
            .next()
            .expect("dependent columns have a kernel vector");
        Smoothness::AtomRelation {
            atoms: alive.into_iter().map(|(_, a)| a).collect(),
            coeffs: relation.into_coords(),
        }
    }
}

#[cfg(test)]
mod tests {
    use num_traits::Zero;

    use super::*;
    use crate::monoid::MonoidElement;

    fn v(coords: &[i64]) -> LatticeVector {
        LatticeVector::from_i64(coords)
    }

    #[test]
    fn free_monoid_passes_everything() {
        let a = PointedMonoid::free(2);
        assert_eq!(a.is_cancellative(), Cancellativity::Cancellative);
        assert_eq!(a.is_reduced(), Reducedness::Reduced);
        assert_eq!(a.is_smooth(), Smoothness::Smooth);
    }

    #[test]
    fn cusp_is_singular_via_atom_relation() {
        let a = PointedMonoid::new(1, vec![v(&[2]), v(&[3])], vec![], vec![]).unwrap();
        assert_eq!(a.is_cancellative(), Cancellativity::Cancellative);
        assert_eq!(a.is_reduced(), Reducedness::Reduced);
        let Smoothness::AtomRelation { atoms, coeffs } = a.is_smooth() else {
            panic!("cusp atoms satisfy 3*(2) = 2*(3)");
        };
        assert_eq!(atoms, vec![v(&[2]), v(&[3])]);
        assert!(coeffs.iter().any(|c| !c.is_zero()));
        let mut acc = v(&[0]);
        for (atom, c) in atoms.iter().zip(&coeffs) {
            acc = acc.add(&atom.scale(c));
        }
        assert!(acc.is_zero());
    }

    #[test]
    fn crossing_axes_are_not_cancellative() {
        let a = PointedMonoid::new(
            2,
            vec![v(&[1, 0]), v(&[0, 1])],
            vec![],
            vec![v(&[1, 1])],
        )
        .unwrap();
        let Cancellativity::NotCancellative { x, y } = a.is_cancellative() else {
            panic!("the two axes multiply to zero");
        };
        // The witness really is a zero-divisor pair.
        let ex = a.element(&x).unwrap();
        let ey = a.element(&y).unwrap();
        assert!(!ex.is_zero() && !ey.is_zero());
        assert_eq!(a.add(&ex, &ey), MonoidElement::Zero);
        assert!(matches!(a.is_smooth(), Smoothness::NotCancellative { .. }));
        assert_eq!(a.is_reduced(), Reducedness::Reduced);
    }

    #[test]
    fn truncated_line_stays_smooth() {
        // N / (t^1): only the identity survives; a reduced point.
        let a = PointedMonoid::new(1, vec![v(&[1])], vec![], vec![v(&[1])]).unwrap();
        assert_eq!(a.is_cancellative(), Cancellativity::Cancellative);
        assert_eq!(a.is_reduced(), Reducedness::Reduced);
        assert_eq!(a.is_smooth(), Smoothness::Smooth);
    }

    #[test]
    fn quotient_by_one_axis_is_smooth() {
        let a = PointedMonoid::new(
            2,
            vec![v(&[1, 0]), v(&[0, 1])],
            vec![],
            vec![v(&[1, 0])],
        )
        .unwrap();
        assert_eq!(a.is_cancellative(), Cancellativity::Cancellative);
        assert_eq!(a.is_smooth(), Smoothness::Smooth);
    }

    #[test]
    fn diagonal_square_has_a_nilpotent() {
        let a = PointedMonoid::new(
            2,
            vec![v(&[1, 0]), v(&[0, 1])],
            vec![],
            vec![v(&[2, 2])],
        )
        .unwrap();
        assert_eq!(
            a.is_reduced(),
            Reducedness::NotReduced { nilpotent: v(&[1, 1]) }
        );
    }

    #[test]
    fn deep_collapse_on_a_numerical_semigroup() {
        // In <2,3>/(7) the class of 2 is nilpotent: 5*2 = 7 + 3.
        let a = PointedMonoid::new(1, vec![v(&[2]), v(&[3])], vec![], vec![v(&[7])]).unwrap();
        assert!(matches!(a.is_reduced(), Reducedness::NotReduced { .. }));
        // 4 and 3 are both nonzero but sum to 7.
        let Cancellativity::NotCancellative { x, y } = a.is_cancellative() else {
            panic!("7 = 4 + 3 factors through nonzero classes");
        };
        assert!(a.vector_in_collapse(&x.add(&y)));
    }
}
