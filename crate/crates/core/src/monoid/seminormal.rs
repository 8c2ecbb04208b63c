//! Saturation and seminormalization.
//!
//! Both closures live inside the group generated by the monoid: saturation
//! takes every group point of the cone, seminormalization only the group
//! points interior to a face that the monoid already spans.  The latter is
//! computed face by face as the union of `relint(F) /\ group(M /\ F)`, each
//! piece described by finitely many module generators.

use num_bigint::BigInt;
use num_traits::One;

use crate::lattice::dio::{minimal_nonneg_solutions, DioLimits};
use crate::lattice::snf::{smith, solve, IMat};
use crate::lattice::{is_nonneg_combination, Cone, LatticeError, LatticeVector};

use super::{MonoidError, PointedMonoid, Reducedness};

const MAX_MULTIPLE: u32 = 512;
const MAX_BOX: usize = 1 << 20;

impl PointedMonoid {
    /// All lattice points of the cone inside the group generated by the
    /// monoid — the normalization.  Requires an empty collapse.
    pub fn saturation(&self) -> Result<PointedMonoid, MonoidError> {
        if !self.collapse().is_empty() {
            return Err(MonoidError::RequiresCancellative { op: "saturation" });
        }
        if self.qgens().is_empty() {
            return Ok(self.clone());
        }
        let (basis, zgens) = group_coordinates(self.qgens(), self.quotient().qdim());
        let zcone = Cone::new(basis.cols(), zgens)?;
        let hb = zcone
            .hilbert_basis()
            .map_err(|e| cap(e, "saturation"))?;
        let mut gens: Vec<LatticeVector> = hb
            .iter()
            .map(|h| self.quotient().lift(&basis.apply(h)))
            .collect();
        gens.extend(self.units().iter().cloned());
        PointedMonoid::new(self.dim(), gens, self.units().to_vec(), Vec::new())
    }

    /// Adjoins, face by face, the group points interior to that face.  The
    /// result is the smallest extension closed under "x in the group with
    /// 2x and 3x in the monoid".  Quotients must be reduced; the collapse is
    /// transported to the cover's closure as the radical it generates there,
    /// so reduced quotients stay reduced and the operation stays idempotent.
    pub fn seminormalize(&self) -> Result<PointedMonoid, MonoidError> {
        if !self.collapse().is_empty() {
            match self.is_reduced() {
                Reducedness::NotReduced { nilpotent } => {
                    return Err(MonoidError::RequiresReduced {
                        op: "seminormalize",
                        nilpotent,
                    })
                }
                Reducedness::Unknown { nodes } => {
                    return Err(MonoidError::Inconclusive { op: "seminormalize", nodes })
                }
                Reducedness::Reduced => {}
            }
            let cover = PointedMonoid::new(
                self.dim(),
                self.gens().to_vec(),
                self.units().to_vec(),
                Vec::new(),
            )?;
            let sn = cover.seminormalize()?;
            let collapse = radical_transport(&sn, self.collapse())?;
            return PointedMonoid::new(
                self.dim(),
                sn.gens().to_vec(),
                self.units().to_vec(),
                collapse,
            );
        }

        let qdim = self.quotient().qdim();
        let mut qape: Vec<LatticeVector> = self.qgens().to_vec();
        for face in self.faces() {
            let mut fgens: Vec<LatticeVector> = face
                .gens
                .iter()
                .map(|&i| self.quotient().project(&self.gens()[i]))
                .filter(|w| !w.is_zero())
                .collect();
            fgens.sort();
            fgens.dedup();
            if fgens.is_empty() {
                continue;
            }
            qape.extend(interior_module_gens(&fgens, qdim)?);
        }
        qape.sort();
        qape.dedup();
        let mut gens: Vec<LatticeVector> =
            qape.iter().map(|w| self.quotient().lift(w)).collect();
        gens.extend(self.units().iter().cloned());
        let enlarged = PointedMonoid::new(self.dim(), gens, self.units().to_vec(), Vec::new())?;
        // Re-present on atoms for a tidy generator list.
        PointedMonoid::new(
            self.dim(),
            enlarged.atoms(),
            self.units().to_vec(),
            Vec::new(),
        )
    }
}

/// Generators of the radical, inside the seminormal cover `sn`, of the
/// ideal the original collapse generates there.
///
/// In a seminormal monoid a point lies in the radical of a monomial ideal
/// exactly when the smallest face containing the point also contains one of
/// the ideal's generators: the forward direction is primeness of faces, the
/// reverse holds because `n*x - k` lands in `relint(F) /\ group(M /\ F)` for
/// large `n`, which seminormality keeps inside the monoid.  Every element
/// divides off the coefficient-one sum of any expression's support, and that
/// sum spans the same face, so the subset sums of generators whose span
/// picks up a collapse generator generate the radical.
fn radical_transport(
    sn: &PointedMonoid,
    collapse: &[LatticeVector],
) -> Result<Vec<LatticeVector>, MonoidError> {
    let qcollapse: Vec<LatticeVector> =
        collapse.iter().map(|k| sn.quotient().project(k)).collect();
    let n = sn.gens().len();
    if n >= usize::BITS as usize || (1usize << n) > MAX_BOX {
        return Err(MonoidError::Inconclusive { op: "seminormalize", nodes: MAX_BOX });
    }
    let faces = sn.faces();
    let masks: Vec<usize> = faces
        .iter()
        .map(|f| f.gens.iter().fold(0usize, |m, &i| m | (1 << i)))
        .collect();
    let qualifies: Vec<bool> = faces
        .iter()
        .map(|f| qcollapse.iter().any(|k| f.cone.contains(k)))
        .collect();
    let mut out: Vec<LatticeVector> = Vec::new();
    for s in 1usize..(1 << n) {
        // Smallest face containing the subset: faces are closed under
        // intersection and are determined by the generators they carry.
        let spanned = masks
            .iter()
            .filter(|&&m| m & s == s)
            .fold(usize::MAX, |acc, &m| acc & m);
        let f = masks
            .iter()
            .position(|&m| m == spanned)
            .expect("face lattices are closed under intersection");
        if qualifies[f] {
            let mut sum = LatticeVector::zero(sn.dim());
            for (i, g) in sn.gens().iter().enumerate() {
                if s & (1 << i) != 0 {
                    sum = sum.add(g);
                }
            }
            out.push(sum);
        }
    }
    out.sort();
    out.dedup();
    Ok(out)
}

/// Module generators, over `M = <fgens>`, of the group points in the
/// relative interior of the face spanned by `fgens`.
///
/// Strategy: pass to coordinates for the group `G` generated by `fgens`;
/// there the saturation `S = cone /\ G` has a Hilbert basis, the interior
/// points of `S` are covered by the minimal solutions of the facet system
/// `w_j . x >= 1`, and `S` itself is covered over `M` by the points of the
/// finite box below the least multiple of each basis element landing in `M`.
/// Sums of the two finite sets cover the interior over `M`.
fn interior_module_gens(
    fgens: &[LatticeVector],
    qdim: usize,
) -> Result<Vec<LatticeVector>, MonoidError> {
    let (basis, zgens) = group_coordinates(fgens, qdim);
    let zdim = basis.cols();
    let zcone = Cone::new(zdim, zgens.clone())?;
    debug_assert!(zcone.is_pointed());
    let zgrading = zcone.grading();
    let hb = zcone.hilbert_basis().map_err(|e| cap(e, "seminormalize"))?;
    if hb.is_empty() {
        return Ok(Vec::new());
    }

    let mut multiples: Vec<u32> = Vec::with_capacity(hb.len());
    for h in &hb {
        let n = (1..=MAX_MULTIPLE)
            .find(|&n| is_nonneg_combination(&h.scale(&BigInt::from(n)), &zgens, &zgrading))
            .ok_or(MonoidError::Inconclusive {
                op: "seminormalize",
                nodes: MAX_MULTIPLE as usize,
            })?;
        multiples.push(n);
    }
    let box_size = multiples.iter().try_fold(1usize, |acc, &n| {
        acc.checked_mul(n as usize).filter(|&s| s <= MAX_BOX)
    });
    if box_size.is_none() {
        return Err(MonoidError::Inconclusive { op: "seminormalize", nodes: MAX_BOX });
    }

    let ws = zcone.dual().rays.clone();
    debug_assert!(!ws.is_empty());
    let interior = relint_cover(&hb, &ws, zdim).map_err(|e| cap(e, "seminormalize"))?;

    // Box of saturation points not yet shifted into M.
    let mut box_points: Vec<LatticeVector> = vec![LatticeVector::zero(zdim)];
    for (h, &n) in hb.iter().zip(&multiples) {
        let mut next = Vec::with_capacity(box_points.len() * n as usize);
        for p in &box_points {
            for c in 0..n {
                next.push(p.add(&h.scale(&BigInt::from(c))));
            }
        }
        box_points = next;
    }

    let mut out: Vec<LatticeVector> = Vec::new();
    for e in &interior {
        for d in &box_points {
            let x = e.add(d);
            // Minimal as a module generator iff no single generator can be
            // split off while staying interior.
            let reducible = zgens.iter().any(|g| {
                let y = x.sub(g);
                ws.iter().all(|w| w.dot(&y) >= BigInt::one())
            });
            if !reducible {
                out.push(basis.apply(&x));
            }
        }
    }
    out.sort();
    out.dedup();
    Ok(out)
}

/// Values of the minimal nonnegative solutions of `w_j . (sum a_i vs[i]) >= 1
/// for all j`, with the inequalities made exact by slack variables.  Every
/// solution of the system dominates one of these modulo `<vs>`.
pub(super) fn relint_cover(
    vs: &[LatticeVector],
    ws: &[LatticeVector],
    dim: usize,
) -> Result<Vec<LatticeVector>, LatticeError> {
    let m = ws.len();
    let mut cols: Vec<LatticeVector> = vs
        .iter()
        .map(|v| LatticeVector::new(ws.iter().map(|w| w.dot(v)).collect()))
        .collect();
    for j in 0..m {
        cols.push(LatticeVector::unit(m, j).neg());
    }
    let rhs = LatticeVector::new(vec![BigInt::one(); m]);
    let sols = minimal_nonneg_solutions(&cols, &rhs, &DioLimits::default())?;
    let mut out: Vec<LatticeVector> = sols
        .iter()
        .map(|s| {
            let mut acc = LatticeVector::zero(dim);
            for (i, v) in vs.iter().enumerate() {
                acc = acc.add(&v.scale(&BigInt::from(s[i])));
            }
            acc
        })
        .collect();
    out.sort();
    out.dedup();
    Ok(out)
}

/// Basis (as matrix columns) of the subgroup of `Z^dim` generated by `vecs`,
/// together with the coordinates of each input vector in that basis.
fn group_coordinates(vecs: &[LatticeVector], dim: usize) -> (IMat, Vec<LatticeVector>) {
    let s = smith(&IMat::from_columns(vecs, dim));
    let r = s.rank;
    let mut basis = IMat::zeros(dim, r);
    for i in 0..r {
        for j in 0..dim {
            basis.set(j, i, s.p_inv.at(j, i) * &s.factors[i]);
        }
    }
    let coords = vecs
        .iter()
        .map(|v| solve(&basis, v).expect("generators lie in their own group"))
        .collect();
    (basis, coords)
}

fn cap(e: LatticeError, op: &'static str) -> MonoidError {
    match e {
        LatticeError::SearchCapped { nodes } => MonoidError::Inconclusive { op, nodes },
        other => other.into(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn v(coords: &[i64]) -> LatticeVector {
        LatticeVector::from_i64(coords)
    }

    fn monoid(gens: &[&[i64]]) -> PointedMonoid {
        PointedMonoid::new(
            gens[0].len(),
            gens.iter().map(|g| v(g)).collect(),
            vec![],
            vec![],
        )
        .unwrap()
    }

    #[test]
    fn saturation_of_numerical_semigroups_is_n() {
        for gens in [vec![v(&[2]), v(&[3])], vec![v(&[3]), v(&[4]), v(&[5])]] {
            let a = PointedMonoid::new(1, gens, vec![], vec![]).unwrap();
            let sat = a.saturation().unwrap();
            assert_eq!(sat.gens(), &[v(&[1])]);
        }
    }

    #[test]
    fn saturation_respects_the_generated_group() {
        // 2Z x 2Z is already saturated inside its own group.
        let a = monoid(&[&[2, 0], &[0, 2]]);
        let sat = a.saturation().unwrap();
        assert!(sat.same_submonoid(&a));
    }

    #[test]
    fn saturation_fills_in_the_skew_cone() {
        let a = monoid(&[&[1, 0], &[1, 2], &[1, 1]]);
        let sat = a.saturation().unwrap();
        assert_eq!(sat.atoms(), vec![v(&[1, 0]), v(&[1, 1]), v(&[1, 2])]);
        let partial = monoid(&[&[1, 0], &[1, 2]]);
        // Without (1,1) the group is index two, and saturation keeps it out.
        let sat2 = partial.saturation().unwrap();
        assert!(sat2.same_submonoid(&partial));
    }

    #[test]
    fn seminormalization_of_the_cusp_is_the_full_line() {
        let cusp = monoid(&[&[2], &[3]]);
        let sn = cusp.seminormalize().unwrap();
        assert_eq!(sn.gens(), &[v(&[1])]);
    }

    #[test]
    fn seminormalization_fixes_the_free_quadrant() {
        let a = PointedMonoid::free(2);
        let sn = a.seminormalize().unwrap();
        assert!(sn.same_submonoid(&a));
    }

    #[test]
    fn seminormalization_fills_cusp_edges() {
        // The x-axis face is a cusp and fills in; the filled edge then
        // generates everything the interior formula produces.
        let a = monoid(&[&[2, 0], &[3, 0], &[0, 1], &[1, 1]]);
        let sn = a.seminormalize().unwrap();
        assert!(sn.contains_vector(&v(&[1, 0])));
        assert!(sn.same_submonoid(&monoid(&[&[1, 0], &[0, 1]])));
    }

    #[test]
    fn seminormal_but_not_saturated_is_fixed() {
        // Interior group points (a,b) with a,b >= 1 all lie in the monoid
        // ((1,b) via (1,1) or (1,0) plus copies of (0,2)), and each edge is
        // saturated in its own group.  Saturation in the full group Z^2
        // would add (0,1); seminormalization must not.
        let a = monoid(&[&[1, 0], &[1, 1], &[0, 2]]);
        let sn = a.seminormalize().unwrap();
        assert!(sn.same_submonoid(&a));
        assert!(!sn.contains_vector(&v(&[0, 1])));
        let sat = a.saturation().unwrap();
        assert!(sat.contains_vector(&v(&[0, 1])));
    }

    #[test]
    fn skew_group_interior_is_already_covered() {
        // Group is the even-sum sublattice; every interior even-sum point is
        // a(1,1) + b(1,-1) with a,b >= 1, so nothing is added.
        let a = monoid(&[&[1, 1], &[1, -1]]);
        let sn = a.seminormalize().unwrap();
        assert!(sn.same_submonoid(&a));
    }

    #[test]
    fn seminormalize_rejects_nonreduced_quotients() {
        // Killing t^2 leaves t^3 alive with (t^3)^2 = t^2 + t^4 dead.
        let a = PointedMonoid::new(1, vec![v(&[2]), v(&[3])], vec![], vec![v(&[2])]).unwrap();
        let err = a.seminormalize().unwrap_err();
        assert!(matches!(err, MonoidError::RequiresReduced { .. }));
    }

    #[test]
    fn transported_collapse_is_radical() {
        // Everything nonzero is collapsed: a point.  The cover fills in t,
        // whose double dies, so t itself must land in the collapse or the
        // result would pick up a nilpotent the input never had.
        let a =
            PointedMonoid::new(1, vec![v(&[2]), v(&[3])], vec![], vec![v(&[2]), v(&[3])])
                .unwrap();
        let sn = a.seminormalize().unwrap();
        assert_eq!(sn.gens(), &[v(&[1])]);
        assert_eq!(sn.collapse(), &[v(&[1])]);
        assert!(matches!(sn.is_reduced(), Reducedness::Reduced));
        assert_eq!(sn.seminormalize().unwrap(), sn);
    }

    #[test]
    fn seminormalize_transports_a_reduced_collapse() {
        let a = PointedMonoid::new(
            2,
            vec![v(&[2, 0]), v(&[3, 0]), v(&[0, 1])],
            vec![],
            vec![v(&[0, 1])],
        )
        .unwrap();
        let sn = a.seminormalize().unwrap();
        assert_eq!(sn.collapse(), &[v(&[0, 1])]);
        assert!(sn.contains_vector(&v(&[1, 0])));
        assert!(sn.element(&v(&[0, 1])).unwrap().is_zero());
        assert_eq!(sn.hilbert(3), vec![1, 1, 1, 1]);
    }

    #[test]
    fn seminormalize_keeps_units() {
        let a = PointedMonoid::new(
            2,
            vec![v(&[0, 1]), v(&[0, -1]), v(&[2, 0]), v(&[3, 0])],
            vec![],
            vec![],
        )
        .unwrap();
        let sn = a.seminormalize().unwrap();
        assert_eq!(sn.units(), &[v(&[0, 1])]);
        assert!(sn.contains_vector(&v(&[1, 5])));
        assert!(sn.contains_vector(&v(&[1, -5])));
    }
}
