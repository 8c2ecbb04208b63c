//! Object-level dilation: the image of a structure under the `c`-th power
//! endomorphism `x -> c.x`.
//!
//! On elements this is [`PointedMonoid::dilate`]; here whole objects are
//! rebuilt from scaled presentations, so composites can be compared
//! structurally: dilating by `d` and then by `c` yields the same canonical
//! object as dilating by `c * d` once.

use num_bigint::BigInt;

use crate::aset::{ASet, ASetError};
use crate::lattice::LatticeVector;
use crate::monoid::{MonoidError, MonoidIdeal, PointedMonoid};

fn scale_all(vs: &[LatticeVector], c: u32) -> Vec<LatticeVector> {
    let k = BigInt::from(c);
    vs.iter().map(|v| v.scale(&k)).collect()
}

/// The submonoid generated by the `c`-th multiples, with the collapse
/// carried along.  The unit lattice is saturated by construction, so it is
/// fixed by every dilation.
pub fn dilate_monoid(a: &PointedMonoid, c: u32) -> Result<PointedMonoid, MonoidError> {
    assert!(c >= 1, "dilation exponent must be positive");
    PointedMonoid::new(
        a.dim(),
        scale_all(a.gens(), c),
        a.units().to_vec(),
        scale_all(a.collapse(), c),
    )
}

/// The ideal generated by the scaled generators inside the dilated monoid.
/// Returns the pair because the ideal only means something relative to its
/// monoid.
pub fn dilate_ideal(
    a: &PointedMonoid,
    ideal: &MonoidIdeal,
    c: u32,
) -> Result<(PointedMonoid, MonoidIdeal), MonoidError> {
    let ac = dilate_monoid(a, c)?;
    let ic = MonoidIdeal::new(&ac, scale_all(ideal.gens(), c))?;
    Ok((ac, ic))
}

/// Scales the acting and ambient monoids, the orbit generators, and the
/// kill ideal together.  Scaling preserves every membership relation among
/// the scaled vectors, so validity of the input set carries over.
pub fn dilate_aset(x: &ASet, c: u32) -> Result<ASet, ASetError> {
    let acting = dilate_monoid(x.acting(), c)?;
    let ambient = dilate_monoid(x.ambient(), c)?;
    let kill = MonoidIdeal::new(&ambient, scale_all(x.kill().gens(), c))?;
    ASet::new(acting, ambient, scale_all(x.gens(), c), kill)
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

    #[test]
    fn dilations_compose_multiplicatively() {
        let a = cusp();
        let two_then_three = dilate_monoid(&dilate_monoid(&a, 3).unwrap(), 2).unwrap();
        let six = dilate_monoid(&a, 6).unwrap();
        assert_eq!(two_then_three.gens(), six.gens());
        assert_eq!(two_then_three.collapse(), six.collapse());

        let ideal = MonoidIdeal::new(&a, vec![v(&[2])]).unwrap();
        let (_, i23) = dilate_ideal(&dilate_monoid(&a, 3).unwrap(),
            &dilate_ideal(&a, &ideal, 3).unwrap().1, 2).unwrap();
        let (_, i6) = dilate_ideal(&a, &ideal, 6).unwrap();
        assert_eq!(i23.gens(), i6.gens());
    }

    #[test]
    fn the_unit_lattice_is_fixed() {
        let a = PointedMonoid::new(2, vec![v(&[1, 0])], vec![v(&[0, 1])], vec![]).unwrap();
        let b = dilate_monoid(&a, 5).unwrap();
        assert_eq!(a.units(), b.units());
        assert_eq!(b.gens(), &[v(&[5, 0])]);
    }

    #[test]
    fn dilated_sets_stay_valid_and_compose() {
        let a = cusp();
        let kill = MonoidIdeal::new(&a, vec![v(&[7])]).unwrap();
        let x = ASet::new(a.clone(), a.clone(), vec![v(&[0])], kill).unwrap();
        let xd = dilate_aset(&dilate_aset(&x, 2).unwrap(), 3).unwrap();
        let x6 = dilate_aset(&x, 6).unwrap();
        assert_eq!(xd.gens(), x6.gens());
        assert_eq!(xd.kill().gens(), x6.kill().gens());
        assert_eq!(xd.acting().gens(), x6.acting().gens());
    }
}
