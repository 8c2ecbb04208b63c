//! Double description: V-descriptions of cones cut out by inequalities.
//!
//! `dual_description(gens, d)` computes lineality and extreme rays of
//! `{u in R^d : u . g >= 0 for all g}`.  This single primitive supplies dual
//! cones for fan charts, facet normals for face enumeration, unit-direction
//! discovery (primal lineality), and strictly positive grading functionals.
//!
//! Constraints are processed incrementally; adjacency of rays is decided by
//! the usual combinatorial tight-set test, which is exact because the ray set
//! is kept irredundant at every step.

use num_bigint::BigInt;
use num_traits::{Signed, Zero};

use super::snf::{kernel_basis, IMat};
use super::LatticeVector;

#[derive(Clone, Debug)]
pub struct DualDescription {
    pub dim: usize,
    /// Saturated lattice basis of the lineality space `{u : u . g = 0 for all g}`.
    pub lineality: Vec<LatticeVector>,
    /// Primitive extreme rays of the pointed part, sorted lex.
    pub rays: Vec<LatticeVector>,
}

struct Ray {
    v: LatticeVector,
    tight: Vec<bool>,
}

pub fn dual_description(constraints: &[LatticeVector], dim: usize) -> DualDescription {
    let active: Vec<&LatticeVector> =
        constraints.iter().filter(|c| !c.is_zero()).collect();

    let mut lineality: Vec<LatticeVector> = (0..dim)
        .map(|i| LatticeVector::unit(dim, i))
        .collect();
    let mut rays: Vec<Ray> = Vec::new();

    for (ci, a) in active.iter().enumerate() {
        let lin_eval: Vec<BigInt> = lineality.iter().map(|l| l.dot(a)).collect();
        if let Some(idx) = lin_eval.iter().position(|e| !e.is_zero()) {
            // Split the lineality: one direction becomes a ray, the rest is
            // projected into the hyperplane of the new constraint.
            let mut l0 = lineality.remove(idx);
            if l0.dot(a).is_negative() {
                l0 = l0.neg();
            }
            let la = l0.dot(a);
            lineality = lineality
                .into_iter()
                .map(|l| {
                    let e = l.dot(a);
                    l.scale(&la).sub(&l0.scale(&e)).primitive()
                })
                .collect();
            for r in rays.iter_mut() {
                let e = r.v.dot(a);
                r.v = r.v.scale(&la).sub(&l0.scale(&e)).primitive();
                r.tight.push(true);
            }
            let mut tight = vec![true; ci];
            tight.push(false);
            rays.push(Ray { v: l0.primitive(), tight });
            dedupe(&mut rays);
            continue;
        }

        let evals: Vec<BigInt> = rays.iter().map(|r| r.v.dot(a)).collect();
        if evals.iter().all(|e| !e.is_negative()) {
            for (r, e) in rays.iter_mut().zip(&evals) {
                r.tight.push(e.is_zero());
            }
            continue;
        }

        let mut next: Vec<Ray> = Vec::new();
        for (r, e) in rays.iter().zip(&evals) {
            if !e.is_negative() {
                let mut tight = r.tight.clone();
                tight.push(e.is_zero());
                next.push(Ray { v: r.v.clone(), tight });
            }
        }
        for (pi, pe) in evals.iter().enumerate() {
            if !pe.is_positive() {
                continue;
            }
            for (ni, ne) in evals.iter().enumerate() {
                if !ne.is_negative() {
                    continue;
                }
                if !adjacent(&rays, pi, ni) {
                    continue;
                }
                let combo = rays[ni].v.scale(pe).sub(&rays[pi].v.scale(ne)).primitive();
                if combo.is_zero() {
                    continue;
                }
                let mut tight: Vec<bool> = rays[pi]
                    .tight
                    .iter()
                    .zip(&rays[ni].tight)
                    .map(|(x, y)| *x && *y)
                    .collect();
                tight.push(true);
                next.push(Ray { v: combo, tight });
            }
        }
        rays = next;
        dedupe(&mut rays);
    }

    // Canonical saturated lineality basis straight from the constraint matrix.
    let lineality = if active.is_empty() {
        lineality
    } else {
        let m = IMat::from_rows(
            active.iter().map(|c| c.coords().to_vec()).collect(),
        );
        kernel_basis(&m)
    };

    let mut out: Vec<LatticeVector> = rays.into_iter().map(|r| r.v).collect();
    out.sort();
    out.dedup();
    DualDescription { dim, lineality, rays: out }
}

fn adjacent(rays: &[Ray], a: usize, b: usize) -> bool {
    let meet: Vec<bool> = rays[a]
        .tight
        .iter()
        .zip(&rays[b].tight)
        .map(|(x, y)| *x && *y)
        .collect();
    for (i, r) in rays.iter().enumerate() {
        if i == a || i == b {
            continue;
        }
        if meet.iter().zip(&r.tight).all(|(m, t)| !*m || *t) {
            return false;
        }
    }
    true
}

fn dedupe(rays: &mut Vec<Ray>) {
    let mut seen: Vec<LatticeVector> = Vec::new();
    rays.retain(|r| {
        if seen.contains(&r.v) {
            false
        } else {
            seen.push(r.v.clone());
            true
        }
    });
}

/// Geometry of the cone spanned by `gens` inside `Z^dim`.
pub struct ConeGeometry {
    pub dual: DualDescription,
    /// Saturated basis of the lattice of two-sided directions of the cone.
    pub lineality_lattice: Vec<LatticeVector>,
    /// Sum of dual rays: strictly positive on every generator outside the
    /// lineality, zero on the lineality.
    pub grading: LatticeVector,
}

pub fn analyze_cone(gens: &[LatticeVector], dim: usize) -> ConeGeometry {
    let dual = dual_description(gens, dim);
    let mut constraints: Vec<Vec<BigInt>> = Vec::new();
    for r in dual.rays.iter().chain(dual.lineality.iter()) {
        constraints.push(r.coords().to_vec());
    }
    let lineality_lattice = if constraints.is_empty() {
        (0..dim).map(|i| LatticeVector::unit(dim, i)).collect()
    } else {
        kernel_basis(&IMat::from_rows(constraints))
    };
    let mut grading = LatticeVector::zero(dim);
    for r in &dual.rays {
        grading = grading.add(r);
    }
    ConeGeometry { dual, lineality_lattice, grading }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn v(coords: &[i64]) -> LatticeVector {
        LatticeVector::from_i64(coords)
    }

    #[test]
    fn dual_of_simplicial_plane_cone() {
        let d = dual_description(&[v(&[1, 0]), v(&[1, 2])], 2);
        assert!(d.lineality.is_empty());
        assert_eq!(d.rays, vec![v(&[0, 1]), v(&[2, -1])]);
    }

    #[test]
    fn dual_of_halfline_keeps_lineality() {
        let d = dual_description(&[v(&[1, 0])], 2);
        assert_eq!(d.rays, vec![v(&[1, 0])]);
        assert_eq!(d.lineality.len(), 1);
        assert!(d.lineality[0].dot(&v(&[1, 0])).is_zero());
    }

    #[test]
    fn dual_of_full_space_is_origin() {
        // Constraints spanning all of Z^2 both ways leave only u = 0.
        let d = dual_description(&[v(&[1, 0]), v(&[-1, 0]), v(&[0, 1]), v(&[0, -1])], 2);
        assert!(d.rays.is_empty());
        assert!(d.lineality.is_empty());
    }

    #[test]
    fn dual_of_octant_in_three_dims() {
        let d = dual_description(&[v(&[1, 0, 0]), v(&[0, 1, 0]), v(&[0, 0, 1])], 3);
        assert_eq!(d.rays.len(), 3);
        assert!(d.lineality.is_empty());
        for r in &d.rays {
            assert!(r.coords().iter().all(|c| !c.is_negative()));
        }
    }

    #[test]
    fn dual_of_nonsimplicial_cone() {
        // Four rays of a square-based cone in Z^3; the dual also has 4 rays.
        let gens = [v(&[1, 1, 1]), v(&[-1, 1, 1]), v(&[1, -1, 1]), v(&[-1, -1, 1])];
        let d = dual_description(&gens, 3);
        assert!(d.lineality.is_empty());
        assert_eq!(d.rays.len(), 4);
        for r in &d.rays {
            for g in &gens {
                assert!(!r.dot(g).is_negative());
            }
            assert!(gens.iter().filter(|g| r.dot(g).is_zero()).count() >= 2);
        }
    }

    #[test]
    fn grading_is_positive_off_lineality() {
        let geo = analyze_cone(&[v(&[2, 0]), v(&[3, 0]), v(&[0, 1]), v(&[0, -1])], 2);
        assert_eq!(geo.lineality_lattice, vec![v(&[0, 1])]);
        assert!(geo.grading.dot(&v(&[2, 0])).is_positive());
        assert!(geo.grading.dot(&v(&[0, 1])).is_zero());
    }

    #[test]
    fn cusp_monoid_cone_has_trivial_units() {
        let geo = analyze_cone(&[v(&[2]), v(&[3])], 1);
        assert!(geo.lineality_lattice.is_empty());
        assert!(geo.grading.dot(&v(&[1])).is_positive());
    }
}
