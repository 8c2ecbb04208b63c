//! Monomial sets with a pointed monoid action.
//!
//! An [`ASet`] is a pointed set of lattice points: orbits `g + acting` inside
//! an ambient monoid, with a monomial ideal `kill` collapsed to the
//! basepoint.  Because elements are actual lattice vectors, the freeness
//! questions (is the set a wedge of free orbits on its minimal generators?)
//! reduce to solvable linear problems: a failure is either a *collision*
//! `b + a = b' + a'` of two distinct orbit positions, or an *annihilation*
//! `b + a ≡ 0` with `a` still alive in the acting monoid.  Both are decided
//! exactly by minimal-solution searches, so `Free` verdicts are certificates,
//! not samples.
//!
//! [`FiniteASet`] covers the actions that do not embed in a lattice — finite
//! orbits like a cyclic group acting on itself — with tables instead of
//! vectors.

use std::collections::{BTreeMap, BTreeSet};

use num_bigint::BigInt;
use num_traits::ToPrimitive;
use thiserror::Error;

use crate::exec;
use crate::lattice::dio::{minimal_nonneg_solutions, DioLimits};
use crate::lattice::snf::{kernel_basis, IMat};
use crate::lattice::{LatticeError, LatticeVector};
use crate::monoid::{MonoidError, MonoidIdeal, PointedMonoid, Smoothness};

#[derive(Debug, Error)]
pub enum ASetError {
    #[error(transparent)]
    Monoid(#[from] MonoidError),
    #[error(transparent)]
    Lattice(#[from] LatticeError),
    #[error("acting monoid has rank {acting}, ambient has rank {ambient}")]
    RankMismatch { acting: usize, ambient: usize },
    #[error("acting monoid is not contained in the ambient monoid at {v}")]
    ActingNotContained { v: LatticeVector },
    #[error("generator {v} lies outside the ambient monoid")]
    GenOutsideAmbient { v: LatticeVector },
    #[error("action not well defined: {k} is zero in the acting monoid but {k} + {g} survives")]
    ActionNotWellDefined { k: LatticeVector, g: LatticeVector },
    #[error("degree function is not positive on the acting monoid at {v}")]
    GradingNotPositive { v: LatticeVector },
    #[error("action table is malformed: {detail}")]
    BadTable { detail: String },
}

/// Failure certificate for freeness.  Both shapes re-verify by direct
/// evaluation: the relation holds in the set and fails in the free model.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum FreenessWitness {
    /// `b + a = b2 + a2` with `(a, b) != (a2, b2)`, all four alive and the
    /// common value alive and unkilled.
    Collision {
        a: LatticeVector,
        b: LatticeVector,
        a2: LatticeVector,
        b2: LatticeVector,
    },
    /// `b + a` is dead or killed although `a` is alive in the acting monoid,
    /// so the free orbit of `b` does not die at `a`.
    Annihilation { a: LatticeVector, b: LatticeVector },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Freeness {
    Free { basis: Vec<LatticeVector> },
    NotFree { witness: FreenessWitness },
    Inconclusive { bound: usize },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Flatness {
    Flat,
    NotFlat { n: u32, witness: FreenessWitness },
    Inconclusive { n: u32 },
}

/// Per-degree freeness of the conormal pieces, the aggregate verdict, and
/// the smoothness of the quotient the pieces are sets over.
#[derive(Clone, Debug)]
pub struct FlatnessReport {
    pub per_degree: Vec<(u32, Freeness)>,
    pub aggregate: Flatness,
    pub base_smoothness: Smoothness,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SetCancellativity {
    Cancellative,
    NotCancellative {
        a: LatticeVector,
        b: LatticeVector,
        x: String,
    },
    Inconclusive { bound: usize },
}

/// Orbits `g + acting` inside an ambient monoid, modulo a kill ideal.
#[derive(Clone, Debug)]
pub struct ASet {
    acting: PointedMonoid,
    ambient: PointedMonoid,
    gens: Vec<LatticeVector>,
    kill: MonoidIdeal,
}

impl ASet {
    pub fn new(
        acting: PointedMonoid,
        ambient: PointedMonoid,
        gens: Vec<LatticeVector>,
        kill: MonoidIdeal,
    ) -> Result<ASet, ASetError> {
        if acting.dim() != ambient.dim() {
            return Err(ASetError::RankMismatch {
                acting: acting.dim(),
                ambient: ambient.dim(),
            });
        }
        for g in acting.gens() {
            if !ambient.contains_vector(g) {
                return Err(ASetError::ActingNotContained { v: g.clone() });
            }
        }
        for u in acting.units() {
            if !ambient.contains_vector(u) || !ambient.contains_vector(&u.neg()) {
                return Err(ASetError::ActingNotContained { v: u.clone() });
            }
        }
        let mut kept: Vec<LatticeVector> = Vec::new();
        for g in gens {
            if g.dim() != ambient.dim() || !ambient.contains_vector(&g) {
                return Err(ASetError::GenOutsideAmbient { v: g });
            }
            if !kill.contains_vector(&ambient, &g) {
                kept.push(g);
            }
        }
        kept.sort();
        kept.dedup();
        // Zero elements of the acting monoid must send every generator (and
        // hence every element) to zero.
        for k in acting.collapse() {
            for g in &kept {
                let v = g.add(k);
                if !kill.contains_vector(&ambient, &v) {
                    return Err(ASetError::ActionNotWellDefined { k: k.clone(), g: g.clone() });
                }
            }
        }
        Ok(ASet { acting, ambient, gens: kept, kill })
    }

    /// The conormal piece `I^n / I^(n+1)` as a set over `A/I`; `n = 0` is
    /// `A/I` over itself.
    pub fn graded_piece(
        a: &PointedMonoid,
        ideal: &MonoidIdeal,
        n: u32,
    ) -> Result<ASet, ASetError> {
        let mut collapse = a.collapse().to_vec();
        collapse.extend(ideal.gens().iter().cloned());
        let acting =
            PointedMonoid::new(a.dim(), a.gens().to_vec(), a.units().to_vec(), collapse)?;
        let gens = if n == 0 {
            vec![LatticeVector::zero(a.dim())]
        } else {
            ideal.power(a, n)?.gens().to_vec()
        };
        let kill = ideal.power(a, n + 1)?;
        ASet::new(acting, a.clone(), gens, kill)
    }

    pub fn acting(&self) -> &PointedMonoid {
        &self.acting
    }

    pub fn ambient(&self) -> &PointedMonoid {
        &self.ambient
    }

    pub fn gens(&self) -> &[LatticeVector] {
        &self.gens
    }

    pub fn kill(&self) -> &MonoidIdeal {
        &self.kill
    }

    /// Whether `v` is the basepoint of the set: dead in the ambient monoid
    /// or inside the kill ideal.
    pub fn vanishes(&self, v: &LatticeVector) -> bool {
        self.kill.contains_vector(&self.ambient, v)
    }

    fn alive_in_acting(&self, v: &LatticeVector) -> bool {
        self.acting.element(v).map(|e| !e.is_zero()).unwrap_or(false)
    }

    /// The unique smallest generating set: one representative per unit orbit,
    /// minus everything another generator reaches.  Divisibility between
    /// distinct unit orbits is cycle-free, so no order pathology can occur
    /// with lattice elements.
    pub fn minimal_generators(&self) -> Vec<LatticeVector> {
        let mut reps: BTreeMap<LatticeVector, LatticeVector> = BTreeMap::new();
        for g in &self.gens {
            let class = self.acting.quotient().project(g);
            reps.entry(class)
                .and_modify(|r| {
                    if g < r {
                        *r = g.clone();
                    }
                })
                .or_insert_with(|| g.clone());
        }
        let candidates: Vec<LatticeVector> = reps.into_values().collect();
        let mut out: Vec<LatticeVector> = candidates
            .iter()
            .filter(|g| {
                !candidates.iter().any(|h| {
                    h != *g && {
                        let c = g.sub(h);
                        self.acting.contains_vector(&c) && self.alive_in_acting(&c)
                    }
                })
            })
            .cloned()
            .collect();
        out.sort();
        out
    }

    /// The same set with the acting monoid's units divided out; orbits of
    /// unit-translates merge into single elements.
    pub fn units_quotient(&self) -> Result<ASet, ASetError> {
        let q = self.acting.quotient();
        let qdim = q.qdim();
        let project_all = |vs: &[LatticeVector]| -> Vec<LatticeVector> {
            vs.iter().map(|v| q.project(v)).filter(|w| !w.is_zero()).collect()
        };
        let acting_bar = self.acting.units_quotient();
        let ambient_bar = PointedMonoid::new(
            qdim,
            project_all(self.ambient.gens()),
            project_all(self.ambient.units()),
            project_all(self.ambient.collapse()),
        )?;
        let kill_bar = MonoidIdeal::new(&ambient_bar, project_all(self.kill.gens()))?;
        let gens_bar: Vec<LatticeVector> = self.gens.iter().map(|g| q.project(g)).collect();
        ASet::new(acting_bar, ambient_bar, gens_bar, kill_bar)
    }

    fn default_bound(&self) -> usize {
        let deg = |v: &LatticeVector| self.ambient.degree(v).to_usize().unwrap_or(0);
        let kmax = self
            .kill
            .gens()
            .iter()
            .chain(self.ambient.collapse())
            .map(deg)
            .max()
            .unwrap_or(0);
        let gmax = self.gens.iter().map(deg).max().unwrap_or(0);
        (2 * kmax + gmax).max(gmax + 1).max(6)
    }

    /// Decides whether the set is a wedge of free orbits over its minimal
    /// generators.  The two failure modes are searched exactly: every true
    /// collision or alive annihilation dominates a minimal solution of the
    /// corresponding linear system, and minimality preserves aliveness, so
    /// an empty search certifies freeness.  Only a capped search falls back
    /// to degreewise counting up to `bound`.
    pub fn is_free(&self, bound: Option<usize>) -> Freeness {
        let basis = self.minimal_generators();
        if basis.is_empty() {
            return Freeness::Free { basis };
        }
        let limits = DioLimits::default();
        match self.annihilation_scan(&basis, &limits) {
            Ok(Some(witness)) => return Freeness::NotFree { witness },
            Ok(None) => {}
            Err(_) => return self.count_fallback(&basis, bound),
        }
        match self.collision_scan(&basis, &limits) {
            Ok(Some(witness)) => return Freeness::NotFree { witness },
            Ok(None) => {}
            Err(_) => return self.count_fallback(&basis, bound),
        }
        Freeness::Free { basis }
    }

    /// Searches `b + a = k + (ambient)` with `a` alive in the acting monoid:
    /// the free orbit of `b` survives at `a` but the set dies.
    fn annihilation_scan(
        &self,
        basis: &[LatticeVector],
        limits: &DioLimits,
    ) -> Result<Option<FreenessWitness>, LatticeError> {
        let na = self.acting.gens().len();
        let mut cols: Vec<LatticeVector> = self.acting.gens().to_vec();
        for g in self.ambient.gens() {
            cols.push(g.neg());
        }
        for u in self.ambient.units() {
            cols.push(u.clone());
            cols.push(u.neg());
        }
        let mut kill_eff: Vec<LatticeVector> = self.kill.gens().to_vec();
        kill_eff.extend(self.ambient.collapse().iter().cloned());
        kill_eff.sort();
        kill_eff.dedup();
        for b in basis {
            for k in &kill_eff {
                let rhs = k.sub(b);
                for sol in minimal_nonneg_solutions(&cols, &rhs, limits)? {
                    let a = combine(&sol[..na], self.acting.gens(), self.ambient.dim());
                    if !a.is_zero() && self.alive_in_acting(&a) {
                        return Ok(Some(FreenessWitness::Annihilation { a, b: b.clone() }));
                    }
                }
            }
        }
        Ok(None)
    }

    /// Searches `b + a = b2 + a2` across distinct basis elements with both
    /// sides alive and the value unkilled.
    fn collision_scan(
        &self,
        basis: &[LatticeVector],
        limits: &DioLimits,
    ) -> Result<Option<FreenessWitness>, LatticeError> {
        let na = self.acting.gens().len();
        let mut cols: Vec<LatticeVector> = self.acting.gens().to_vec();
        for g in self.acting.gens() {
            cols.push(g.neg());
        }
        for i in 0..basis.len() {
            for j in i + 1..basis.len() {
                let rhs = basis[j].sub(&basis[i]);
                for sol in minimal_nonneg_solutions(&cols, &rhs, limits)? {
                    let a = combine(&sol[..na], self.acting.gens(), self.ambient.dim());
                    let a2 = combine(&sol[na..], self.acting.gens(), self.ambient.dim());
                    let x = basis[i].add(&a);
                    debug_assert_eq!(x, basis[j].add(&a2));
                    if self.alive_in_acting(&a)
                        && self.alive_in_acting(&a2)
                        && !self.vanishes(&x)
                    {
                        return Ok(Some(FreenessWitness::Collision {
                            a,
                            b: basis[i].clone(),
                            a2,
                            b2: basis[j].clone(),
                        }));
                    }
                }
            }
        }
        Ok(None)
    }

    /// Degreewise comparison against the free model, used only when the
    /// exact scans blow their budget.  A count mismatch always yields an
    /// explicit witness at that degree.
    fn count_fallback(&self, basis: &[LatticeVector], bound: Option<usize>) -> Freeness {
        let bound = bound.unwrap_or_else(|| self.default_bound());
        let Ok(acting_levels) = self.acting_by_ambient_degree(bound) else {
            return Freeness::Inconclusive { bound };
        };
        let Ok(levels) = self.elements_by_degree(bound) else {
            return Freeness::Inconclusive { bound };
        };
        for t in 0..=bound {
            let mut image: BTreeMap<LatticeVector, (LatticeVector, LatticeVector)> =
                BTreeMap::new();
            let mut free_count = 0usize;
            for b in basis {
                let Some(db) = self.ambient.degree(b).to_usize() else { continue };
                if db > t {
                    continue;
                }
                for a in &acting_levels[t - db] {
                    free_count += 1;
                    let x = b.add(a);
                    if self.vanishes(&x) {
                        if !a.is_zero() {
                            return Freeness::NotFree {
                                witness: FreenessWitness::Annihilation {
                                    a: a.clone(),
                                    b: b.clone(),
                                },
                            };
                        }
                        continue;
                    }
                    if let Some((a2, b2)) = image.get(&x) {
                        return Freeness::NotFree {
                            witness: FreenessWitness::Collision {
                                a: a.clone(),
                                b: b.clone(),
                                a2: a2.clone(),
                                b2: b2.clone(),
                            },
                        };
                    }
                    image.insert(x, (a.clone(), b.clone()));
                }
            }
            if free_count != levels[t].len() {
                // Counts can only disagree through a collision or an
                // annihilation, both caught above.
                return Freeness::Inconclusive { bound };
            }
        }
        Freeness::Inconclusive { bound }
    }

    /// All elements of the set by ambient degree, up to `bound`.
    pub(crate) fn elements_by_degree(
        &self,
        bound: usize,
    ) -> Result<Vec<BTreeSet<LatticeVector>>, ASetError> {
        let acting_levels = self.acting_by_ambient_degree(bound)?;
        let mut out: Vec<BTreeSet<LatticeVector>> = vec![BTreeSet::new(); bound + 1];
        for g in &self.gens {
            let Some(dg) = self.ambient.degree(g).to_usize() else { continue };
            if dg > bound {
                continue;
            }
            for d in 0..=bound - dg {
                for a in &acting_levels[d] {
                    let x = g.add(a);
                    if !self.vanishes(&x) {
                        out[dg + d].insert(x);
                    }
                }
            }
        }
        Ok(out)
    }

    /// Alive elements of the acting monoid graded by the *ambient* degree.
    /// Requires that degree to be positive off the identity, otherwise the
    /// degree classes are infinite and no count makes sense.
    pub(crate) fn acting_by_ambient_degree(
        &self,
        bound: usize,
    ) -> Result<Vec<Vec<LatticeVector>>, ASetError> {
        if let Some(u) = self.acting.units().first() {
            return Err(ASetError::GradingNotPositive { v: u.clone() });
        }
        let mut degs = Vec::with_capacity(self.acting.gens().len());
        for g in self.acting.gens() {
            let d = self
                .ambient
                .degree(g)
                .to_usize()
                .filter(|&d| d > 0)
                .ok_or_else(|| ASetError::GradingNotPositive { v: g.clone() })?;
            degs.push(d);
        }
        let mut levels: Vec<BTreeSet<LatticeVector>> = vec![BTreeSet::new(); bound + 1];
        levels[0].insert(LatticeVector::zero(self.ambient.dim()));
        for d in 0..=bound {
            let at: Vec<LatticeVector> = levels[d].iter().cloned().collect();
            for (g, gd) in self.acting.gens().iter().zip(&degs) {
                if d + gd > bound {
                    continue;
                }
                for e in &at {
                    let s = e.add(g);
                    if self.alive_in_acting(&s) {
                        levels[d + gd].insert(s);
                    }
                }
            }
        }
        Ok(levels.into_iter().map(|s| s.into_iter().collect()).collect())
    }

    /// Lattice elements are distinct vectors, so `a + x = b + x` with the
    /// value alive forces `a = b` outright: translation is injective, which
    /// is exactly the embedding into the localized free group-set.
    pub fn is_cancellative(&self) -> SetCancellativity {
        SetCancellativity::Cancellative
    }

    /// Re-evaluates a reported witness against the set and the free model.
    pub fn verify_witness(&self, w: &FreenessWitness) -> bool {
        match w {
            FreenessWitness::Collision { a, b, a2, b2 } => {
                let x = b.add(a);
                x == b2.add(a2)
                    && (a, b) != (a2, b2)
                    && self.alive_in_acting(a)
                    && self.alive_in_acting(a2)
                    && !self.vanishes(&x)
                    && !self.vanishes(b)
                    && !self.vanishes(b2)
            }
            FreenessWitness::Annihilation { a, b } => {
                self.alive_in_acting(a) && !self.vanishes(b) && self.vanishes(&b.add(a))
            }
        }
    }

    /// Freeness of every conormal piece `I^n / I^(n+1)` for `n = 1..n_max`,
    /// checked independently (in parallel when enabled), plus the smoothness
    /// of `A/I` — the hypothesis under which the aggregate verdict means
    /// normal flatness.
    pub fn is_normally_flat(
        a: &PointedMonoid,
        ideal: &MonoidIdeal,
        n_max: u32,
        bound: Option<usize>,
        parallel: bool,
    ) -> Result<FlatnessReport, ASetError> {
        let ns: Vec<u32> = (1..=n_max).collect();
        let verdicts = exec::map_indexed(ns, parallel, |n| {
            ASet::graded_piece(a, ideal, n).map(|x| (n, x.is_free(bound)))
        });
        let mut per_degree = Vec::with_capacity(verdicts.len());
        for v in verdicts {
            per_degree.push(v?);
        }
        let mut aggregate = Flatness::Flat;
        for (n, verdict) in &per_degree {
            match verdict {
                Freeness::NotFree { witness } => {
                    aggregate = Flatness::NotFlat { n: *n, witness: witness.clone() };
                    break;
                }
                Freeness::Inconclusive { .. } => {
                    if aggregate == Flatness::Flat {
                        aggregate = Flatness::Inconclusive { n: *n };
                    }
                }
                Freeness::Free { .. } => {}
            }
        }
        let base = ASet::graded_piece(a, ideal, 0)?.acting.clone();
        Ok(FlatnessReport {
            per_degree,
            aggregate,
            base_smoothness: base.is_smooth(),
        })
    }
}

fn combine(counts: &[u32], gens: &[LatticeVector], dim: usize) -> LatticeVector {
    let mut acc = LatticeVector::zero(dim);
    for (c, g) in counts.iter().zip(gens) {
        if *c != 0 {
            acc = acc.add(&g.scale(&BigInt::from(*c)));
        }
    }
    acc
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum FiniteObstruction {
    /// Two alive acting elements move `x` to the same nonzero place.
    Collision {
        a: LatticeVector,
        a2: LatticeVector,
        x: String,
    },
    /// No subset of the elements is a basis; with infinitely many alive
    /// acting classes this is a cardinality fact (a free set would be
    /// infinite), otherwise it is the result of the exhaustive subset check.
    NoBasis,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum FiniteFreeness {
    Free { basis: Vec<String> },
    NotFree { obstruction: FiniteObstruction },
    Inconclusive { explored: usize },
}

/// A finite pointed set with a lattice monoid acting through a generator
/// table.  Index 0 is the basepoint.  This is the home of orbits that are
/// not lattice translations: finite cyclic orbits, trivial actions of unit
/// groups, and the like.
#[derive(Clone, Debug)]
pub struct FiniteASet {
    acting: PointedMonoid,
    names: Vec<String>,
    gen_action: Vec<Vec<usize>>,
}

impl FiniteASet {
    /// Validates the table: shape, basepoint fixed, generator maps commute,
    /// the integer relations among the generators act consistently, and the
    /// acting monoid's zero elements act as the constant basepoint map.
    pub fn new(
        acting: PointedMonoid,
        names: Vec<String>,
        gen_action: Vec<Vec<usize>>,
    ) -> Result<FiniteASet, ASetError> {
        let bad = |detail: &str| ASetError::BadTable { detail: detail.to_string() };
        if names.is_empty() {
            return Err(bad("element list is empty; index 0 must be the basepoint"));
        }
        let n = names.len();
        if names.iter().collect::<BTreeSet<_>>().len() != n {
            return Err(bad("element names repeat"));
        }
        if gen_action.len() != acting.gens().len() {
            return Err(bad("one action row per acting generator is required"));
        }
        for row in &gen_action {
            if row.len() != n || row.iter().any(|&i| i >= n) {
                return Err(bad("action row does not map elements to elements"));
            }
            if row[0] != 0 {
                return Err(bad("the basepoint must stay fixed"));
            }
        }
        let x = FiniteASet { acting, names, gen_action };
        for i in 0..x.gen_action.len() {
            for j in i + 1..x.gen_action.len() {
                for e in 0..n {
                    if x.gen_action[i][x.gen_action[j][e]]
                        != x.gen_action[j][x.gen_action[i][e]]
                    {
                        return Err(bad("generator maps do not commute"));
                    }
                }
            }
        }
        for u in x.acting.units() {
            for v in [u.clone(), u.neg()] {
                if minimal_nonneg_solutions(x.acting.gens(), &v, &DioLimits::default())
                    .map(|s| s.is_empty())
                    .unwrap_or(true)
                {
                    return Err(bad("a unit is not reachable from the generator table"));
                }
            }
        }
        let gen_mat = IMat::from_columns(x.acting.gens(), x.acting.dim());
        for k in kernel_basis(&gen_mat) {
            let mut pos = vec![0u32; x.gen_action.len()];
            let mut neg = vec![0u32; x.gen_action.len()];
            for (i, c) in k.coords().iter().enumerate() {
                match c.to_i64().unwrap_or(0) {
                    c if c > 0 => pos[i] = c as u32,
                    c if c < 0 => neg[i] = (-c) as u32,
                    _ => {}
                }
            }
            for e in 0..n {
                if x.apply_counts(&pos, e) != x.apply_counts(&neg, e) {
                    return Err(bad("a relation among the generators acts inconsistently"));
                }
            }
        }
        for kgen in x.acting.collapse() {
            let counts = x.decompose(kgen).ok_or_else(|| {
                bad("a collapse generator is not reachable from the generator table")
            })?;
            for e in 0..n {
                if x.apply_counts(&counts, e) != 0 {
                    return Err(bad("a zero element of the acting monoid does not act as zero"));
                }
            }
        }
        Ok(x)
    }

    pub fn acting(&self) -> &PointedMonoid {
        &self.acting
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    fn apply_counts(&self, counts: &[u32], mut e: usize) -> usize {
        for (i, &c) in counts.iter().enumerate() {
            for _ in 0..c {
                e = self.gen_action[i][e];
            }
        }
        e
    }

    fn decompose(&self, v: &LatticeVector) -> Option<Vec<u32>> {
        if v.is_zero() {
            return Some(vec![0; self.acting.gens().len()]);
        }
        minimal_nonneg_solutions(self.acting.gens(), v, &DioLimits::default())
            .ok()?
            .into_iter()
            .next()
    }

    fn alive(&self, v: &LatticeVector) -> bool {
        self.acting.element(v).map(|e| !e.is_zero()).unwrap_or(false)
    }

    /// Alive acting classes, if there are finitely many.  `None` means the
    /// acting monoid has units or the enumeration blew the cap.
    fn alive_classes(&self, cap: usize) -> Option<Vec<LatticeVector>> {
        if !self.acting.units().is_empty() {
            return None;
        }
        let gmax = self
            .acting
            .gens()
            .iter()
            .filter_map(|g| self.acting.degree(g).to_usize())
            .max()
            .unwrap_or(1)
            .max(1);
        let mut depth = gmax;
        loop {
            let levels = self.acting.census(depth);
            let total: usize = levels.iter().map(|l| l.len()).sum();
            if total > cap || depth > 64 * gmax {
                return None;
            }
            if levels[levels.len() - gmax..].iter().all(|l| l.is_empty()) {
                // A trailing all-empty window of width max-generator-degree
                // certifies that nothing lives beyond it.
                return Some(levels.into_iter().flatten().collect());
            }
            depth += gmax;
        }
    }

    /// Definition-level freeness.  With finitely many alive acting classes
    /// the subsets of the element set are checked exhaustively; infinitely
    /// many classes cannot biject a finite set, and a pigeonhole walk
    /// usually produces an explicit collision.
    pub fn is_free(&self) -> FiniteFreeness {
        let n = self.names.len();
        if n == 1 {
            return FiniteFreeness::Free { basis: vec![] };
        }
        match self.alive_classes(4096) {
            Some(classes) => {
                if n - 1 > 12 {
                    return FiniteFreeness::Inconclusive { explored: n - 1 };
                }
                let decomposed: Vec<Vec<u32>> = match classes
                    .iter()
                    .map(|a| self.decompose(a))
                    .collect::<Option<Vec<_>>>()
                {
                    Some(d) => d,
                    None => return FiniteFreeness::Inconclusive { explored: classes.len() },
                };
                'subset: for mask in 1u32..(1 << (n - 1)) {
                    let basis: Vec<usize> =
                        (1..n).filter(|e| mask >> (e - 1) & 1 == 1).collect();
                    let mut seen = vec![false; n];
                    for counts in &decomposed {
                        for &b in &basis {
                            let img = self.apply_counts(counts, b);
                            if img == 0 || seen[img] {
                                continue 'subset;
                            }
                            seen[img] = true;
                        }
                    }
                    if seen.iter().skip(1).all(|&s| s) {
                        return FiniteFreeness::Free {
                            basis: basis.iter().map(|&b| self.names[b].clone()).collect(),
                        };
                    }
                }
                FiniteFreeness::NotFree { obstruction: FiniteObstruction::NoBasis }
            }
            None => {
                if let Some(obstruction) = self.collision_walk(2 * n + 2) {
                    return FiniteFreeness::NotFree { obstruction };
                }
                if self.acting.units().is_empty() {
                    FiniteFreeness::Inconclusive { explored: 4096 }
                } else {
                    // Certified by cardinality: the alive classes contain a
                    // whole unit lattice.
                    FiniteFreeness::NotFree { obstruction: FiniteObstruction::NoBasis }
                }
            }
        }
    }

    /// Breadth-first walk from every element, labelling each reached element
    /// with the acting vector that got there first; a second alive label on
    /// a nonzero element is a collision.
    fn collision_walk(&self, max_len: usize) -> Option<FiniteObstruction> {
        for start in 1..self.names.len() {
            let mut first: BTreeMap<usize, LatticeVector> = BTreeMap::new();
            let dim = self.acting.dim();
            let mut frontier: Vec<(usize, LatticeVector)> =
                vec![(start, LatticeVector::zero(dim))];
            first.insert(start, LatticeVector::zero(dim));
            for _ in 0..max_len {
                let mut next = Vec::new();
                for (e, label) in &frontier {
                    for (i, g) in self.acting.gens().iter().enumerate() {
                        let e2 = self.gen_action[i][*e];
                        if e2 == 0 {
                            continue;
                        }
                        let label2 = label.add(g);
                        if !self.alive(&label2) {
                            continue;
                        }
                        match first.get(&e2) {
                            Some(old) if *old != label2 => {
                                return Some(FiniteObstruction::Collision {
                                    a: old.clone(),
                                    a2: label2,
                                    x: self.names[e2].clone(),
                                });
                            }
                            Some(_) => {}
                            None => {
                                first.insert(e2, label2.clone());
                                next.push((e2, label2));
                            }
                        }
                    }
                }
                if next.is_empty() {
                    break;
                }
                next.truncate(10_000);
                frontier = next;
            }
        }
        None
    }

    /// Searches two distinct alive acting elements moving some element to
    /// the same nonzero place.  Exhausting all alive classes certifies the
    /// positive verdict; hitting the walk bound does not.
    pub fn is_cancellative(&self, bound: usize) -> SetCancellativity {
        let dim = self.acting.dim();
        let mut vectors: BTreeSet<LatticeVector> = BTreeSet::new();
        vectors.insert(LatticeVector::zero(dim));
        let mut exhausted = false;
        for _ in 0..bound {
            let mut grew = false;
            let snapshot: Vec<LatticeVector> = vectors.iter().cloned().collect();
            for v in &snapshot {
                for g in self.acting.gens() {
                    let w = v.add(g);
                    if self.alive(&w) && vectors.insert(w) {
                        grew = true;
                    }
                }
            }
            if !grew {
                exhausted = true;
                break;
            }
        }
        for x in 1..self.names.len() {
            let mut image: BTreeMap<usize, &LatticeVector> = BTreeMap::new();
            for v in &vectors {
                let Some(counts) = self.decompose(v) else { continue };
                let img = self.apply_counts(&counts, x);
                if img == 0 {
                    continue;
                }
                if let Some(prev) = image.get(&img) {
                    return SetCancellativity::NotCancellative {
                        a: (*prev).clone(),
                        b: v.clone(),
                        x: self.names[x].clone(),
                    };
                }
                image.insert(img, v);
            }
        }
        if exhausted {
            SetCancellativity::Cancellative
        } else {
            SetCancellativity::Inconclusive { bound }
        }
    }
}
