//! Seeded random instances for differential testing.
//!
//! Everything here is deterministic in the seed, small enough that the
//! exact searches never cap, and valid by construction: acting monoids are
//! sharp with nonnegative generators, ambient monoids contain them, and
//! kill ideals absorb the acting collapse.  Three families are interleaved
//! so both verdicts of every analysis stay well represented: plain orbit
//! unions, orbits truncated by a kill ideal, and conormal pieces
//! `I^n / I^(n+1)`.

use num_traits::ToPrimitive;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::aset::ASet;
use crate::lattice::LatticeVector;
use crate::monoid::{MonoidIdeal, PointedMonoid};

const RANK_MAX: usize = 3;
const COORD_MAX: i64 = 3;
const SET_GENS_MAX: usize = 5;
const COLLAPSE_DEGREE_MAX: i64 = 6;

fn degree(v: &LatticeVector) -> i64 {
    v.coords().iter().map(|c| c.to_i64().unwrap_or(i64::MAX / 4)).sum()
}

fn random_vector(rng: &mut ChaCha8Rng, dim: usize) -> LatticeVector {
    loop {
        let coords: Vec<i64> = (0..dim).map(|_| rng.gen_range(0..=COORD_MAX)).collect();
        let total: i64 = coords.iter().sum();
        if (1..=4).contains(&total) {
            return LatticeVector::from_i64(&coords);
        }
    }
}

/// A sum of generators of degree at most `cap`; falls back to a single
/// generator, which the sampler keeps below the cap.
fn bounded_sum(rng: &mut ChaCha8Rng, gens: &[LatticeVector], cap: i64) -> LatticeVector {
    for _ in 0..8 {
        let s = random_sum(rng, gens, 2);
        if degree(&s) <= cap {
            return s;
        }
    }
    gens[rng.gen_range(0..gens.len())].clone()
}

/// A random combination of `gens` with 1 to `terms` summands.
fn random_sum(rng: &mut ChaCha8Rng, gens: &[LatticeVector], terms: usize) -> LatticeVector {
    let dim = gens[0].dim();
    let mut acc = LatticeVector::zero(dim);
    for _ in 0..rng.gen_range(1..=terms) {
        acc = acc.add(&gens[rng.gen_range(0..gens.len())]);
    }
    acc
}

fn random_sharp_monoid(rng: &mut ChaCha8Rng, dim: usize, with_collapse: bool) -> PointedMonoid {
    let gens: Vec<LatticeVector> =
        (0..rng.gen_range(1..=3)).map(|_| random_vector(rng, dim)).collect();
    let mut collapse = Vec::new();
    if with_collapse && rng.gen_bool(0.5) {
        for _ in 0..rng.gen_range(1..=2) {
            let k = random_sum(rng, &gens, 3);
            if degree(&k) <= COLLAPSE_DEGREE_MAX {
                collapse.push(k);
            }
        }
    }
    PointedMonoid::new(dim, gens, Vec::new(), collapse)
        .expect("nonnegative generators and generated collapse are always accepted")
}

/// Sharp monoids of rank at most three with bounded coordinates, roughly
/// half of them carrying a small collapse ideal.
pub fn monoid_corpus(seed: u64, count: usize) -> Vec<PointedMonoid> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| {
            let dim = rng.gen_range(1..=RANK_MAX);
            random_sharp_monoid(&mut rng, dim, true)
        })
        .collect()
}

fn orbit_union(rng: &mut ChaCha8Rng, dim: usize) -> ASet {
    let a = random_sharp_monoid(rng, dim, true);
    let gens: Vec<LatticeVector> =
        (0..rng.gen_range(1..=SET_GENS_MAX)).map(|_| random_sum(rng, a.gens(), 2)).collect();
    let kill = MonoidIdeal::new(&a, Vec::new()).unwrap();
    ASet::new(a.clone(), a, gens, kill).expect("orbit unions are valid by construction")
}

fn truncated_orbits(rng: &mut ChaCha8Rng, dim: usize) -> ASet {
    let acting = random_sharp_monoid(rng, dim, true);
    let mut ambient_gens = acting.gens().to_vec();
    for _ in 0..rng.gen_range(0..=2) {
        ambient_gens.push(random_vector(rng, dim));
    }
    // The ambient collapse must absorb the acting collapse so the action
    // stays well defined on every surviving generator.
    let ambient = PointedMonoid::new(dim, ambient_gens, Vec::new(), acting.collapse().to_vec())
        .expect("the ambient presentation extends the acting one");
    let gens: Vec<LatticeVector> = (0..rng.gen_range(1..=SET_GENS_MAX))
        .map(|_| random_sum(rng, ambient.gens(), 2))
        .collect();
    let mut kill_gens = Vec::new();
    if rng.gen_bool(0.7) {
        for _ in 0..rng.gen_range(1..=2) {
            let base = &gens[rng.gen_range(0..gens.len())];
            kill_gens.push(base.add(&random_sum(rng, acting.gens(), 2)));
        }
    }
    let kill = MonoidIdeal::new(&ambient, kill_gens).unwrap();
    ASet::new(acting, ambient, gens, kill).expect("truncated orbits are valid by construction")
}

fn conormal_piece(rng: &mut ChaCha8Rng, dim: usize) -> ASet {
    let a = random_sharp_monoid(rng, dim, false);
    let ideal_gens: Vec<LatticeVector> = (0..rng.gen_range(1..=2))
        .map(|_| bounded_sum(rng, a.gens(), COLLAPSE_DEGREE_MAX))
        .collect();
    let ideal = MonoidIdeal::new(&a, ideal_gens).unwrap();
    let n = rng.gen_range(0..=2);
    ASet::graded_piece(&a, &ideal, n).expect("conormal pieces of valid data are valid")
}

/// Monomial sets over sharp acting monoids: rank and generator counts stay
/// within the documented bounds, and every instance passes the constructor
/// checks, so consumers can analyze them unconditionally.
pub fn aset_corpus(seed: u64, count: usize) -> Vec<ASet> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|i| {
            let dim = rng.gen_range(1..=RANK_MAX);
            match i % 3 {
                0 => orbit_union(&mut rng, dim),
                1 => truncated_orbits(&mut rng, dim),
                _ => conormal_piece(&mut rng, dim),
            }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn corpora_are_deterministic_in_the_seed() {
        let a = aset_corpus(7, 40);
        let b = aset_corpus(7, 40);
        for (x, y) in a.iter().zip(&b) {
            assert_eq!(x.gens(), y.gens());
            assert_eq!(x.acting(), y.acting());
            assert_eq!(x.ambient(), y.ambient());
            assert_eq!(x.kill().gens(), y.kill().gens());
        }
        let c = aset_corpus(8, 40);
        assert!(a.iter().zip(&c).any(|(x, y)| x.gens() != y.gens()
            || x.acting() != y.acting()
            || x.kill().gens() != y.kill().gens()));
    }

    #[test]
    fn corpus_instances_stay_inside_the_documented_bounds() {
        for x in aset_corpus(1, 120) {
            assert!(x.ambient().dim() <= RANK_MAX);
            assert!(x.gens().len() <= SET_GENS_MAX);
            for k in x.acting().collapse() {
                assert!(degree(k) <= COLLAPSE_DEGREE_MAX);
            }
            assert!(x.acting().units().is_empty());
        }
        for a in monoid_corpus(2, 60) {
            assert!(a.dim() <= RANK_MAX && a.gens().len() <= 3);
        }
    }
}
