//! Monoid schemes: fans, glued charts, blow-ups, and certified resolution.
//!
//! A [`MonoidScheme`] is a list of pointed-monoid charts with gluing data
//! identifying localizations pairwise; [`fan_to_scheme`] produces the toric
//! cover of a [`Fan`], one chart per maximal cone.  [`blowup`] builds Rees
//! charts from an [`EquivariantCenter`], and [`resolve`] runs the fan-backed
//! pipeline: pick a witness of non-unimodularity, certify the center smooth
//! and the blow-up normally flat along it, star-subdivide, repeat.  Every
//! verdict in the returned [`ResolutionTrace`] is recomputed, never assumed;
//! a failed certificate flags the trace instead of being silently dropped.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

use crate::aset::{ASet, ASetError, Flatness};
use crate::exec;
use crate::lattice::ratmat::solve_columns;
use crate::lattice::snf::{rank as int_rank, smith, solve as int_solve, IMat};
use crate::lattice::{Cone, LatticeError, LatticeQuotient, LatticeVector};
use crate::monoid::{MonoidError, MonoidIdeal, PointedMonoid, Smoothness};

#[derive(Debug, Error)]
pub enum SchemeError {
    #[error(transparent)]
    Monoid(#[from] MonoidError),
    #[error(transparent)]
    Lattice(#[from] LatticeError),
    #[error(transparent)]
    Set(#[from] ASetError),
    #[error("invalid fan: {detail}")]
    InvalidFan { detail: String },
    #[error("gluing between charts {i} and {j} is broken: {detail}")]
    BadGluing { i: usize, j: usize, detail: String },
    #[error("center ideals disagree across charts {i} and {j} at {v}")]
    IncompatibleCenter { i: usize, j: usize, v: LatticeVector },
    #[error("center is singular in chart {chart}")]
    SingularCenter { chart: usize },
    #[error("center ideal is zero in chart {chart}")]
    EmptyCenter { chart: usize },
    #[error("expected {want} per-chart ideals, got {got}")]
    ChartCount { got: usize, want: usize },
    #[error("resolution needs a fan-backed scheme")]
    NotFanBacked,
    #[error("resolution budget of {max_steps} steps exhausted")]
    BudgetExceeded { max_steps: usize },
}

/// A fan, stored as its maximal cones in canonical order.  Construction
/// checks that the cones are pointed and meet along common faces, so a value
/// of this type is a genuine fan, not a wish.
#[derive(Clone, Debug, PartialEq)]
pub struct Fan {
    dim: usize,
    cones: Vec<Cone>,
}

impl Fan {
    pub fn new(dim: usize, cones: Vec<Cone>) -> Result<Fan, SchemeError> {
        for c in &cones {
            if c.dim() != dim {
                return Err(SchemeError::InvalidFan {
                    detail: format!("cone lattice rank {} differs from fan rank {dim}", c.dim()),
                });
            }
            if !c.is_pointed() {
                return Err(SchemeError::InvalidFan {
                    detail: "a cone contains a line".to_string(),
                });
            }
        }
        let mut cs: Vec<Cone> = cones;
        cs.sort_by(|a, b| a.rays().cmp(b.rays()));
        cs.dedup();
        // Keep maximal cones only; listed faces are implied.
        let full = cs.clone();
        cs.retain(|c| {
            !full.iter().any(|d| {
                d.rays() != c.rays() && c.rays().iter().all(|r| d.contains(r))
            })
        });
        for i in 0..cs.len() {
            for j in i + 1..cs.len() {
                let t = intersect(&cs[i], &cs[j])?;
                if !is_face_of(&t, &cs[i]) || !is_face_of(&t, &cs[j]) {
                    return Err(SchemeError::InvalidFan {
                        detail: format!(
                            "cones {i} and {j} overlap without meeting along a face"
                        ),
                    });
                }
            }
        }
        Ok(Fan { dim, cones: cs })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn cones(&self) -> &[Cone] {
        &self.cones
    }

    pub fn is_smooth(&self) -> bool {
        self.cones.iter().all(|c| c.is_unimodular())
    }
}

/// Intersection of two cones, via stacking their inequality descriptions.
fn intersect(a: &Cone, b: &Cone) -> Result<Cone, LatticeError> {
    let mut halves: Vec<LatticeVector> = Vec::new();
    halves.extend(a.dual().rays.iter().cloned());
    halves.extend(b.dual().rays.iter().cloned());
    for l in a.dual().lineality.iter().chain(&b.dual().lineality) {
        halves.push(l.clone());
        halves.push(l.neg());
    }
    let d = Cone::new(a.dim(), halves)?;
    let mut rays = d.dual().rays.clone();
    for l in &d.dual().lineality {
        rays.push(l.clone());
        rays.push(l.neg());
    }
    Cone::new(a.dim(), rays)
}

fn is_face_of(f: &Cone, c: &Cone) -> bool {
    c.faces().iter().any(|x| x == f)
}

/// Identification of two chart localizations.  `map` gives the lattice
/// isomorphism from chart `i` coordinates to chart `j` coordinates as a list
/// of image columns; `None` means the charts share a lattice and the map is
/// the identity.
#[derive(Clone, Debug)]
pub struct Gluing {
    pub i: usize,
    pub j: usize,
    pub a_i: LatticeVector,
    pub a_j: LatticeVector,
    pub map: Option<Vec<LatticeVector>>,
}

#[derive(Clone, Debug)]
pub struct MonoidScheme {
    charts: Vec<PointedMonoid>,
    gluings: Vec<Gluing>,
    fan: Option<Fan>,
}

impl MonoidScheme {
    /// Validates that each gluing really is an isomorphism of localizations,
    /// that no pair of charts is glued twice (so composites are unique and
    /// the scheme is separated), that the maps satisfy the cocycle rule on
    /// triangles, and that a fan tag matches the charts it claims to back.
    pub fn new(
        charts: Vec<PointedMonoid>,
        gluings: Vec<Gluing>,
        fan: Option<Fan>,
    ) -> Result<MonoidScheme, SchemeError> {
        let mut pairs: BTreeSet<(usize, usize)> = BTreeSet::new();
        let mut mats: BTreeMap<(usize, usize), IMat> = BTreeMap::new();
        for g in &gluings {
            let bad = |detail: &str| SchemeError::BadGluing {
                i: g.i,
                j: g.j,
                detail: detail.to_string(),
            };
            if g.i == g.j || g.i >= charts.len() || g.j >= charts.len() {
                return Err(bad("chart indices out of range"));
            }
            if !pairs.insert((g.i.min(g.j), g.i.max(g.j))) {
                return Err(bad("two gluings on the same pair of charts"));
            }
            let ci = &charts[g.i];
            let cj = &charts[g.j];
            if !ci.contains_vector(&g.a_i) || !cj.contains_vector(&g.a_j) {
                return Err(bad("inverted element lies outside its chart"));
            }
            let li = ci.localize(&g.a_i)?;
            let lj = cj.localize(&g.a_j)?;
            let mat = match &g.map {
                None => {
                    if ci.dim() != cj.dim() {
                        return Err(bad("identity gluing between different lattices"));
                    }
                    IMat::identity(ci.dim())
                }
                Some(cols) => {
                    if cols.len() != ci.dim() || cols.iter().any(|c| c.dim() != cj.dim()) {
                        return Err(bad("gluing map has the wrong shape"));
                    }
                    let m = IMat::from_columns(cols, cj.dim());
                    let s = smith(&m);
                    if ci.dim() != cj.dim()
                        || s.rank != ci.dim()
                        || !s.factors.iter().all(|f| f.is_one())
                    {
                        return Err(bad("gluing map is not a lattice isomorphism"));
                    }
                    m
                }
            };
            let pushed = PointedMonoid::new(
                cj.dim(),
                li.gens().iter().map(|v| mat.apply(v)).collect(),
                li.units().iter().map(|v| mat.apply(v)).collect(),
                li.collapse().iter().map(|v| mat.apply(v)).collect(),
            )?;
            if !pushed.same_submonoid(&lj) {
                return Err(bad("localizations are not isomorphic"));
            }
            mats.insert((g.i, g.j), mat);
        }
        // Cocycle on triangles: composing two gluing maps must give the
        // third wherever all three overlaps are recorded.
        let keys: Vec<(usize, usize)> = mats.keys().cloned().collect();
        let oriented = |p: usize, q: usize| -> Option<IMat> {
            if let Some(m) = mats.get(&(p, q)) {
                return Some(m.clone());
            }
            mats.get(&(q, p)).map(invert_unimodular)
        };
        for a in 0..charts.len() {
            for b in a + 1..charts.len() {
                for c in b + 1..charts.len() {
                    let (Some(ab), Some(bc), Some(ac)) =
                        (oriented(a, b), oriented(b, c), oriented(a, c))
                    else {
                        continue;
                    };
                    if bc.mul(&ab).cols_vec() != ac.cols_vec() {
                        return Err(SchemeError::BadGluing {
                            i: a,
                            j: c,
                            detail: format!(
                                "gluing maps fail the cocycle rule through chart {b}"
                            ),
                        });
                    }
                }
            }
        }
        let _ = keys;
        if let Some(f) = &fan {
            if f.cones().len() != charts.len() {
                return Err(SchemeError::InvalidFan {
                    detail: "fan tag does not match the chart count".to_string(),
                });
            }
            for (i, cone) in f.cones().iter().enumerate() {
                if !chart_of_cone(cone)?.same_submonoid(&charts[i]) {
                    return Err(SchemeError::InvalidFan {
                        detail: format!("chart {i} does not match its tagged cone"),
                    });
                }
            }
        }
        Ok(MonoidScheme { charts, gluings, fan })
    }

    pub fn charts(&self) -> &[PointedMonoid] {
        &self.charts
    }

    pub fn gluings(&self) -> &[Gluing] {
        &self.gluings
    }

    pub fn fan(&self) -> Option<&Fan> {
        self.fan.as_ref()
    }

    pub fn smooth_everywhere(&self, parallel: bool) -> bool {
        exec::map_indexed(self.charts.clone(), parallel, |c| {
            matches!(c.is_smooth(), Smoothness::Smooth)
        })
        .into_iter()
        .all(|s| s)
    }
}

fn invert_unimodular(m: &IMat) -> IMat {
    let n = m.cols();
    let cols: Vec<LatticeVector> = (0..n)
        .map(|k| {
            int_solve(m, &LatticeVector::unit(n, k))
                .expect("validated gluing maps are unimodular")
        })
        .collect();
    IMat::from_columns(&cols, n)
}

trait ColsVec {
    fn cols_vec(&self) -> Vec<LatticeVector>;
}

impl ColsVec for IMat {
    fn cols_vec(&self) -> Vec<LatticeVector> {
        (0..self.cols()).map(|j| self.col(j)).collect()
    }
}

/// Lattice points of the dual cone, as a pointed monoid: units along the
/// orthogonal complement of the cone, sharp part generated by the Hilbert
/// basis of the dual modulo those units.
fn chart_of_cone(sigma: &Cone) -> Result<PointedMonoid, SchemeError> {
    let dim = sigma.dim();
    let units = sigma.dual().lineality.clone();
    let q = LatticeQuotient::new(dim, &units);
    let proj: Vec<LatticeVector> = sigma
        .dual()
        .rays
        .iter()
        .map(|r| q.project(r))
        .filter(|w| !w.is_zero())
        .collect();
    let hb = Cone::new(q.qdim(), proj)?.hilbert_basis()?;
    let gens: Vec<LatticeVector> = hb.iter().map(|w| q.lift(w)).collect();
    Ok(PointedMonoid::new(dim, gens, units, vec![])?)
}

/// Sum of the chart generators vanishing on the face picked out by `tsum`
/// (the sum of the face's rays); inverting it cuts the chart down to the
/// face's own chart.
fn face_element(chart: &PointedMonoid, tsum: &LatticeVector) -> LatticeVector {
    chart
        .gens()
        .iter()
        .filter(|h| h.dot(tsum).is_zero())
        .fold(LatticeVector::zero(chart.dim()), |acc, h| acc.add(h))
}

pub fn fan_to_scheme(fan: &Fan) -> Result<MonoidScheme, SchemeError> {
    let charts: Vec<PointedMonoid> = fan
        .cones()
        .iter()
        .map(chart_of_cone)
        .collect::<Result<_, _>>()?;
    let mut gluings = Vec::new();
    for i in 0..charts.len() {
        for j in i + 1..charts.len() {
            let tau = intersect(&fan.cones()[i], &fan.cones()[j])?;
            let tsum = tau
                .rays()
                .iter()
                .fold(LatticeVector::zero(fan.dim()), |a, r| a.add(r));
            gluings.push(Gluing {
                i,
                j,
                a_i: face_element(&charts[i], &tsum),
                a_j: face_element(&charts[j], &tsum),
                map: None,
            });
        }
    }
    MonoidScheme::new(charts, gluings, Some(fan.clone()))
}

/// A prime ideal of a pointed monoid: the generators lying off a
/// collapse-free face of the sharp cone.  Inclusion of primes is reverse
/// inclusion of faces.
#[derive(Clone, Debug, PartialEq)]
pub struct Prime {
    pub gens: Vec<LatticeVector>,
    pub face: Cone,
}

impl Prime {
    /// Ideal inclusion `self ⊆ other`, i.e. face reverse-inclusion.
    pub fn contained_in(&self, other: &Prime) -> bool {
        other.face.rays().iter().all(|r| self.face.contains(r))
    }
}

/// All prime ideals, one per face of the sharp cone whose monoid points stay
/// alive.  A face touching the collapse ideal is skipped: its complement
/// would contain a product of two alive elements.
pub fn mspec(a: &PointedMonoid) -> Vec<Prime> {
    let mut out: Vec<Prime> = a
        .faces()
        .into_iter()
        .filter(|f| !f.contains_collapse)
        .map(|f| {
            let on_face: BTreeSet<usize> = f.gens.iter().cloned().collect();
            let gens: Vec<LatticeVector> = a
                .gens()
                .iter()
                .enumerate()
                .filter(|(i, _)| !on_face.contains(i))
                .map(|(_, g)| g.clone())
                .collect();
            Prime { gens, face: f.cone }
        })
        .collect();
    out.sort_by(|p, q| (p.gens.len(), &p.gens).cmp(&(q.gens.len(), &q.gens)));
    out
}

/// Per-chart ideals cutting out a closed subscheme, checked to agree on
/// every recorded overlap.
#[derive(Clone, Debug)]
pub struct EquivariantCenter {
    ideals: Vec<MonoidIdeal>,
}

impl EquivariantCenter {
    pub fn new(
        x: &MonoidScheme,
        ideals: Vec<MonoidIdeal>,
    ) -> Result<EquivariantCenter, SchemeError> {
        if ideals.len() != x.charts().len() {
            return Err(SchemeError::ChartCount {
                got: ideals.len(),
                want: x.charts().len(),
            });
        }
        for g in x.gluings() {
            let li = x.charts()[g.i].localize(&g.a_i)?;
            let lj = x.charts()[g.j].localize(&g.a_j)?;
            let fwd = g
                .map
                .as_ref()
                .map(|cols| IMat::from_columns(cols, x.charts()[g.j].dim()));
            let bwd = fwd.as_ref().map(invert_unimodular);
            for v in ideals[g.i].gens() {
                let w = fwd.as_ref().map(|m| m.apply(v)).unwrap_or_else(|| v.clone());
                if !ideals[g.j].contains_vector(&lj, &w) {
                    return Err(SchemeError::IncompatibleCenter {
                        i: g.i,
                        j: g.j,
                        v: v.clone(),
                    });
                }
            }
            for v in ideals[g.j].gens() {
                let w = bwd.as_ref().map(|m| m.apply(v)).unwrap_or_else(|| v.clone());
                if !ideals[g.i].contains_vector(&li, &w) {
                    return Err(SchemeError::IncompatibleCenter {
                        i: g.j,
                        j: g.i,
                        v: v.clone(),
                    });
                }
            }
        }
        Ok(EquivariantCenter { ideals })
    }

    pub fn ideals(&self) -> &[MonoidIdeal] {
        &self.ideals
    }
}

fn is_unit_ideal(a: &PointedMonoid, i: &MonoidIdeal) -> bool {
    i.gens().iter().any(|g| a.contains_vector(&g.neg()))
}

/// The chart of the center itself: everything in the ideal collapsed.
fn center_quotient(
    a: &PointedMonoid,
    i: &MonoidIdeal,
) -> Result<PointedMonoid, MonoidError> {
    let mut collapse = a.collapse().to_vec();
    collapse.extend(i.gens().iter().cloned());
    PointedMonoid::new(a.dim(), a.gens().to_vec(), a.units().to_vec(), collapse)
}

/// Rees-chart blow-up: chart `k` of an affected chart `A` adjoins the
/// differences `g_j - g_k` of the center's generators.  The chart does not
/// depend on the choice of generating set, only on the ideal.  Charts where
/// the center is the unit ideal pass through untouched.
pub fn blowup(
    x: &MonoidScheme,
    z: &EquivariantCenter,
    allow_singular: bool,
) -> Result<MonoidScheme, SchemeError> {
    if z.ideals.len() != x.charts().len() {
        return Err(SchemeError::ChartCount {
            got: z.ideals.len(),
            want: x.charts().len(),
        });
    }
    let mut new_charts: Vec<PointedMonoid> = Vec::new();
    let mut index: Vec<Vec<usize>> = Vec::new();
    let mut unchanged: Vec<bool> = Vec::new();
    for (ci, a) in x.charts().iter().enumerate() {
        let ideal = &z.ideals[ci];
        if ideal.is_empty() {
            return Err(SchemeError::EmptyCenter { chart: ci });
        }
        if is_unit_ideal(a, ideal) {
            index.push(vec![new_charts.len()]);
            unchanged.push(true);
            new_charts.push(a.clone());
            continue;
        }
        if !allow_singular {
            let quo = center_quotient(a, ideal)?;
            if !matches!(quo.is_smooth(), Smoothness::Smooth) {
                return Err(SchemeError::SingularCenter { chart: ci });
            }
        }
        let gs = ideal.gens();
        let mut ids = Vec::with_capacity(gs.len());
        for k in 0..gs.len() {
            let mut gens = a.gens().to_vec();
            for (j, gj) in gs.iter().enumerate() {
                if j != k {
                    gens.push(gj.sub(&gs[k]));
                }
            }
            ids.push(new_charts.len());
            new_charts.push(PointedMonoid::new(
                a.dim(),
                gens,
                a.units().to_vec(),
                a.collapse().to_vec(),
            )?);
        }
        index.push(ids);
        unchanged.push(false);
    }
    let mut gluings = Vec::new();
    for (ci, ids) in index.iter().enumerate() {
        if unchanged[ci] {
            continue;
        }
        let gs = z.ideals[ci].gens();
        for k in 0..ids.len() {
            for l in k + 1..ids.len() {
                gluings.push(Gluing {
                    i: ids[k],
                    j: ids[l],
                    a_i: gs[l].sub(&gs[k]),
                    a_j: gs[k].sub(&gs[l]),
                    map: None,
                });
            }
        }
    }
    for g in x.gluings() {
        match (unchanged[g.i], unchanged[g.j]) {
            (true, true) => gluings.push(Gluing {
                i: index[g.i][0],
                j: index[g.j][0],
                a_i: g.a_i.clone(),
                a_j: g.a_j.clone(),
                map: g.map.clone(),
            }),
            (false, false) if g.map.is_none() => {
                // Rees charts over a shared generator agree on the overlap;
                // other pairs stay unglued, which costs nothing but
                // bookkeeping coverage.
                let gi = z.ideals[g.i].gens();
                let gj = z.ideals[g.j].gens();
                for (k, gk) in gi.iter().enumerate() {
                    if let Some(l) = gj.iter().position(|h| h == gk) {
                        gluings.push(Gluing {
                            i: index[g.i][k],
                            j: index[g.j][l],
                            a_i: g.a_i.clone(),
                            a_j: g.a_j.clone(),
                            map: None,
                        });
                    }
                }
            }
            _ => {}
        }
    }
    MonoidScheme::new(new_charts, gluings, None)
}

/// Star subdivision at (the primitive part of) `w`: every cone containing
/// `w` is replaced by the joins of `w` with its facets off `w`.
pub fn star_subdivide(fan: &Fan, w: &LatticeVector) -> Result<Fan, SchemeError> {
    let w = w.primitive();
    let mut out: Vec<Cone> = Vec::new();
    for sigma in fan.cones() {
        if !sigma.contains(&w) {
            out.push(sigma.clone());
            continue;
        }
        let rank = int_rank(&IMat::from_columns(sigma.rays(), fan.dim()));
        for f in sigma.faces() {
            if f.contains(&w) {
                continue;
            }
            if int_rank(&IMat::from_columns(f.rays(), fan.dim())) + 1 != rank {
                continue;
            }
            let mut rays = f.rays().to_vec();
            rays.push(w.clone());
            out.push(Cone::new(fan.dim(), rays)?);
        }
    }
    Fan::new(fan.dim(), out)
}

#[derive(Clone, Debug)]
pub struct ResolveOptions {
    pub max_steps: usize,
    pub n_max: u32,
    pub bound: Option<usize>,
    pub parallel: bool,
}

impl Default for ResolveOptions {
    fn default() -> Self {
        ResolveOptions { max_steps: 64, n_max: 3, bound: None, parallel: true }
    }
}

#[derive(Clone, Debug)]
pub struct ResolutionStep {
    /// Rays of the cone that was subdivided.
    pub cone: Vec<LatticeVector>,
    /// The primitive subdivision point.
    pub center: LatticeVector,
    /// All charts meeting the center have a smooth center quotient.
    pub center_smooth: bool,
    /// All charts meeting the center are normally flat along it, up to the
    /// configured degree bound.
    pub normally_flat: bool,
}

#[derive(Clone, Debug)]
pub struct CertificationFailure {
    pub step: usize,
    pub reason: String,
}

#[derive(Clone, Debug)]
pub struct ResolutionTrace {
    /// Fans before and after each step; `fans.len() == steps.len() + 1`
    /// unless certification stopped the run.
    pub fans: Vec<Fan>,
    pub steps: Vec<ResolutionStep>,
    pub failure: Option<CertificationFailure>,
}

impl ResolutionTrace {
    pub fn final_fan(&self) -> &Fan {
        self.fans.last().expect("a trace records at least the input fan")
    }

    pub fn is_resolved(&self) -> bool {
        self.failure.is_none() && self.final_fan().is_smooth()
    }

    /// The subdivision history as a DOT digraph: one node per cone per
    /// stage, edges from each cone to what it became.
    pub fn dot(&self) -> String {
        let mut out = String::from("digraph resolution {\n  node [shape=box];\n");
        for (si, fan) in self.fans.iter().enumerate() {
            for (ci, cone) in fan.cones().iter().enumerate() {
                let label: Vec<String> =
                    cone.rays().iter().map(|r| format!("{r}")).collect();
                let _ = writeln!(out, "  s{si}c{ci} [label=\"{}\"];", label.join(" "));
            }
        }
        for si in 1..self.fans.len() {
            let prev = &self.fans[si - 1];
            let split = self.steps[si - 1].cone.as_slice();
            let fallback = prev
                .cones()
                .iter()
                .position(|c| c.rays() == split)
                .unwrap_or(0);
            for (ci, cone) in self.fans[si].cones().iter().enumerate() {
                let parent = prev
                    .cones()
                    .iter()
                    .position(|c| c == cone)
                    .unwrap_or(fallback);
                let _ = writeln!(out, "  s{}c{parent} -> s{si}c{ci};", si - 1);
            }
        }
        out.push_str("}\n");
        out
    }
}

/// Where to subdivide a non-unimodular cone: the Hilbert-basis point of
/// largest multiplicity (sum of its rational coordinates over the rays),
/// lex-least on ties; if the basis adds nothing beyond the rays the cone is
/// non-simplicial and the primitive ray sum splits it.
fn subdivision_point(sigma: &Cone) -> Result<LatticeVector, SchemeError> {
    let hb = sigma.hilbert_basis()?;
    let rays: BTreeSet<&LatticeVector> = sigma.rays().iter().collect();
    let cands: Vec<LatticeVector> =
        hb.into_iter().filter(|h| !rays.contains(h)).collect();
    let barycenter = || {
        sigma
            .rays()
            .iter()
            .fold(LatticeVector::zero(sigma.dim()), |a, r| a.add(r))
            .primitive()
    };
    let mut best: Option<(BigRational, LatticeVector)> = None;
    for h in cands {
        let Some(coeffs) = solve_columns(sigma.rays(), &h) else { continue };
        let mult = coeffs
            .into_iter()
            .fold(BigRational::zero(), |a, c| a + c);
        let better = match &best {
            None => true,
            Some((m, v)) => mult > *m || (mult == *m && h < *v),
        };
        if better {
            best = Some((mult, h));
        }
    }
    Ok(best.map(|(_, h)| h).unwrap_or_else(barycenter))
}

/// Builds the orbit-closure center for subdividing at `rho` and certifies
/// it chart by chart: the center quotient must be smooth and each chart
/// normally flat along its ideal.
fn certify_center(
    fan: &Fan,
    scheme: &MonoidScheme,
    sigma: &Cone,
    rho: &LatticeVector,
    opts: &ResolveOptions,
) -> Result<(bool, bool), SchemeError> {
    let mut faces: Vec<Cone> = sigma
        .faces()
        .into_iter()
        .filter(|f| f.contains(rho))
        .collect();
    faces.sort_by_key(|f| f.rays().len());
    let gamma = faces.into_iter().next().expect("rho lies in sigma");
    let gsum = gamma
        .rays()
        .iter()
        .fold(LatticeVector::zero(fan.dim()), |a, r| a.add(r));
    let mut ideals = Vec::with_capacity(scheme.charts().len());
    for (ci, chart) in scheme.charts().iter().enumerate() {
        let meets = gamma.rays().iter().all(|r| fan.cones()[ci].contains(r));
        let gens = if meets {
            chart
                .gens()
                .iter()
                .filter(|h| h.dot(&gsum).is_positive())
                .cloned()
                .collect()
        } else {
            vec![LatticeVector::zero(chart.dim())]
        };
        ideals.push(MonoidIdeal::new(chart, gens)?);
    }
    let center = EquivariantCenter::new(scheme, ideals)?;
    let work: Vec<(PointedMonoid, MonoidIdeal)> = scheme
        .charts()
        .iter()
        .cloned()
        .zip(center.ideals().iter().cloned())
        .filter(|(c, i)| !is_unit_ideal(c, i))
        .collect();
    let verdicts = exec::map_indexed(work, opts.parallel, |(chart, ideal)| {
        let smooth = center_quotient(&chart, &ideal)
            .map(|q| matches!(q.is_smooth(), Smoothness::Smooth))
            .unwrap_or(false);
        let flat = ASet::is_normally_flat(&chart, &ideal, opts.n_max, opts.bound, false)
            .map(|r| matches!(r.aggregate, Flatness::Flat))
            .unwrap_or(false);
        (smooth, flat)
    });
    let smooth = verdicts.iter().all(|v| v.0);
    let flat = verdicts.iter().all(|v| v.1);
    Ok((smooth, flat))
}

/// Resolution by certified star subdivisions: repeatedly subdivide the
/// lex-least non-unimodular cone at its worst Hilbert-basis point,
/// certifying each center before cutting.  Smooth input returns an empty
/// trace; a failed certificate flags and stops the trace.
pub fn resolve(
    x: &MonoidScheme,
    opts: &ResolveOptions,
) -> Result<ResolutionTrace, SchemeError> {
    let Some(fan) = x.fan() else {
        return Err(SchemeError::NotFanBacked);
    };
    let mut fans = vec![fan.clone()];
    let mut steps: Vec<ResolutionStep> = Vec::new();
    loop {
        let cur = fans.last().expect("trace never empty").clone();
        let mut bad: Vec<&Cone> =
            cur.cones().iter().filter(|c| !c.is_unimodular()).collect();
        if bad.is_empty() {
            return Ok(ResolutionTrace { fans, steps, failure: None });
        }
        if steps.len() >= opts.max_steps {
            return Err(SchemeError::BudgetExceeded { max_steps: opts.max_steps });
        }
        bad.sort_by(|a, b| a.rays().cmp(b.rays()));
        let sigma = bad[0].clone();
        let rho = subdivision_point(&sigma)?;
        let scheme = fan_to_scheme(&cur)?;
        let (smooth, flat) = certify_center(&cur, &scheme, &sigma, &rho, opts)?;
        steps.push(ResolutionStep {
            cone: sigma.rays().to_vec(),
            center: rho.clone(),
            center_smooth: smooth,
            normally_flat: flat,
        });
        if !smooth || !flat {
            let reason = if !smooth {
                "center quotient is not smooth".to_string()
            } else {
                "blow-up is not normally flat along the center".to_string()
            };
            let step = steps.len() - 1;
            return Ok(ResolutionTrace {
                fans,
                steps,
                failure: Some(CertificationFailure { step, reason }),
            });
        }
        fans.push(star_subdivide(&cur, &rho)?);
    }
}

/// The `c`-fold dilation acts chart-wise by scaling; the underlying scheme
/// is unchanged, but the gluing loci must be stable, which is re-verified
/// here rather than assumed.
pub fn dilate_scheme(x: &MonoidScheme, c: u32) -> Result<MonoidScheme, SchemeError> {
    assert!(c >= 2, "dilation exponent must be at least 2");
    let k = BigInt::from(c);
    for g in x.gluings() {
        for (chart, a) in [(&x.charts()[g.i], &g.a_i), (&x.charts()[g.j], &g.a_j)] {
            let plain = chart.localize(a)?;
            let scaled = chart.localize(&a.scale(&k))?;
            if !plain.same_submonoid(&scaled) {
                return Err(SchemeError::BadGluing {
                    i: g.i,
                    j: g.j,
                    detail: "dilation does not preserve the gluing locus".to_string(),
                });
            }
        }
    }
    Ok(x.clone())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::monoid::MonoidElement;

    fn v(coords: &[i64]) -> LatticeVector {
        LatticeVector::from_i64(coords)
    }

    fn cone(dim: usize, rays: &[&[i64]]) -> Cone {
        Cone::new(dim, rays.iter().map(|r| v(r)).collect()).unwrap()
    }

    fn quadrant_fan() -> Fan {
        Fan::new(2, vec![cone(2, &[&[1, 0], &[0, 1]])]).unwrap()
    }

    fn quadrant_scheme() -> MonoidScheme {
        fan_to_scheme(&quadrant_fan()).unwrap()
    }

    fn ideal(a: &PointedMonoid, gens: &[&[i64]]) -> MonoidIdeal {
        MonoidIdeal::new(a, gens.iter().map(|g| v(g)).collect()).unwrap()
    }

    #[test]
    fn a_fan_rejects_overlapping_cones() {
        let err = Fan::new(
            2,
            vec![cone(2, &[&[1, 0], &[0, 1]]), cone(2, &[&[1, 1], &[1, -1]])],
        )
        .unwrap_err();
        assert!(matches!(err, SchemeError::InvalidFan { .. }));
    }

    #[test]
    fn the_plane_fan_gives_one_free_chart() {
        let x = quadrant_scheme();
        assert_eq!(x.charts().len(), 1);
        assert!(x.gluings().is_empty());
        assert!(x.charts()[0].same_submonoid(&PointedMonoid::free(2)));
        assert!(x.smooth_everywhere(false));
    }

    #[test]
    fn the_projective_line_glues_two_lines_along_the_torus() {
        let fan = Fan::new(1, vec![cone(1, &[&[1]]), cone(1, &[&[-1]])]).unwrap();
        let x = fan_to_scheme(&fan).unwrap();
        assert_eq!(x.charts().len(), 2);
        assert_eq!(x.gluings().len(), 1);
        let line = PointedMonoid::new(1, vec![v(&[1])], vec![], vec![]).unwrap();
        let opp = PointedMonoid::new(1, vec![v(&[-1])], vec![], vec![]).unwrap();
        assert!(x.charts()[0].same_submonoid(&opp) || x.charts()[0].same_submonoid(&line));
        assert!(x.smooth_everywhere(false));
        // The overlap is the torus: both localizations are the full group.
        let g = &x.gluings()[0];
        let torus = x.charts()[g.i].localize(&g.a_i).unwrap();
        assert_eq!(torus.units().len(), 1);
    }

    #[test]
    fn low_dimensional_cones_give_unit_heavy_charts() {
        // The origin fan: one chart, the full group made pointed.
        let x = fan_to_scheme(&Fan::new(2, vec![cone(2, &[])]).unwrap()).unwrap();
        let torus = PointedMonoid::new(2, vec![], vec![v(&[1, 0]), v(&[0, 1])], vec![])
            .unwrap();
        assert!(x.charts()[0].same_submonoid(&torus));

        // A single skew ray: the half plane it supports.
        let y = fan_to_scheme(&Fan::new(2, vec![cone(2, &[&[1, 1]])]).unwrap()).unwrap();
        let c = &y.charts()[0];
        assert_eq!(c.units().len(), 1);
        assert!(c.contains_vector(&v(&[1, 0])));
        assert!(c.contains_vector(&v(&[0, 1])));
        assert!(!c.contains_vector(&v(&[-1, 0])));
    }

    #[test]
    fn gluing_data_must_match_localizations() {
        // Both loci lie in the plane, but inverting x and inverting y open
        // different half planes.
        let plane = PointedMonoid::free(2);
        let err = MonoidScheme::new(
            vec![plane.clone(), plane],
            vec![Gluing { i: 0, j: 1, a_i: v(&[1, 0]), a_j: v(&[0, 1]), map: None }],
            None,
        )
        .unwrap_err();
        assert!(matches!(err, SchemeError::BadGluing { .. }));
    }

    #[test]
    fn duplicate_gluings_violate_separatedness() {
        let fan = Fan::new(1, vec![cone(1, &[&[1]]), cone(1, &[&[-1]])]).unwrap();
        let x = fan_to_scheme(&fan).unwrap();
        let mut gluings = x.gluings().to_vec();
        gluings.push(gluings[0].clone());
        let err = MonoidScheme::new(x.charts().to_vec(), gluings, None).unwrap_err();
        assert!(matches!(err, SchemeError::BadGluing { .. }));
    }

    #[test]
    fn mspec_of_the_line_and_the_quadrant() {
        let line = PointedMonoid::new(1, vec![v(&[1])], vec![], vec![]).unwrap();
        let primes = mspec(&line);
        assert_eq!(primes.len(), 2);
        assert!(primes[0].gens.is_empty());
        assert_eq!(primes[1].gens, vec![v(&[1])]);
        assert!(primes[0].contained_in(&primes[1]));
        assert!(!primes[1].contained_in(&primes[0]));

        let plane = PointedMonoid::free(2);
        let primes = mspec(&plane);
        assert_eq!(primes.len(), 4);
        let gen_sets: Vec<Vec<LatticeVector>> =
            primes.iter().map(|p| p.gens.clone()).collect();
        assert_eq!(
            gen_sets,
            vec![
                vec![],
                vec![v(&[0, 1])],
                vec![v(&[1, 0])],
                vec![v(&[0, 1]), v(&[1, 0])],
            ]
        );

        let point = PointedMonoid::new(0, vec![], vec![], vec![]).unwrap();
        assert_eq!(mspec(&point).len(), 1);
    }

    #[test]
    fn mspec_skips_faces_that_meet_the_collapse() {
        let a = PointedMonoid::new(
            2,
            vec![v(&[1, 0]), v(&[0, 1])],
            vec![],
            vec![v(&[1, 1])],
        )
        .unwrap();
        // The interior face holds xy = 0, so the zero ideal is not prime.
        let primes = mspec(&a);
        let gen_sets: Vec<Vec<LatticeVector>> =
            primes.iter().map(|p| p.gens.clone()).collect();
        assert_eq!(
            gen_sets,
            vec![
                vec![v(&[0, 1])],
                vec![v(&[1, 0])],
                vec![v(&[0, 1]), v(&[1, 0])],
            ]
        );
    }

    #[test]
    fn localization_injects_primes() {
        let plane = PointedMonoid::free(2);
        let loc = plane.localize(&v(&[1, 0])).unwrap();
        let loc_primes = mspec(&loc);
        assert_eq!(loc_primes.len(), 2);
        // Primes of the localization are primes of the plane avoiding x.
        let avoid_x: Vec<Vec<LatticeVector>> = mspec(&plane)
            .into_iter()
            .filter(|p| !p.gens.contains(&v(&[1, 0])))
            .map(|p| p.gens)
            .collect();
        let got: Vec<Vec<LatticeVector>> =
            loc_primes.into_iter().map(|p| p.gens).collect();
        assert_eq!(got, avoid_x);
    }

    #[test]
    fn blowing_up_the_plane_origin_matches_the_star_subdivision() {
        let x = quadrant_scheme();
        let z = EquivariantCenter::new(
            &x,
            vec![ideal(&x.charts()[0], &[&[1, 0], &[0, 1]])],
        )
        .unwrap();
        let b = blowup(&x, &z, false).unwrap();
        assert_eq!(b.charts().len(), 2);
        assert_eq!(b.gluings().len(), 1);
        assert!(b.smooth_everywhere(false));

        let sub = fan_to_scheme(&star_subdivide(&quadrant_fan(), &v(&[1, 1])).unwrap())
            .unwrap();
        assert_eq!(sub.charts().len(), 2);
        for chart in b.charts() {
            assert!(
                sub.charts().iter().any(|c| c.same_submonoid(chart)),
                "blow-up chart missing from the subdivision"
            );
        }
    }

    #[test]
    fn blowup_along_the_unit_ideal_is_the_identity() {
        let x = quadrant_scheme();
        let unit = MonoidIdeal::new(&x.charts()[0], vec![v(&[0, 0])]).unwrap();
        let z = EquivariantCenter::new(&x, vec![unit]).unwrap();
        let b = blowup(&x, &z, false).unwrap();
        assert_eq!(b.charts().len(), 1);
        assert!(b.gluings().is_empty());
        assert!(b.charts()[0].same_submonoid(&x.charts()[0]));
    }

    #[test]
    fn blowup_gates_on_center_smoothness() {
        let x = quadrant_scheme();
        // V(x^2, y) is a doubled point: not smooth.
        let z = EquivariantCenter::new(
            &x,
            vec![ideal(&x.charts()[0], &[&[2, 0], &[0, 1]])],
        )
        .unwrap();
        let err = blowup(&x, &z, false).unwrap_err();
        assert!(matches!(err, SchemeError::SingularCenter { chart: 0 }));
        let b = blowup(&x, &z, true).unwrap();
        assert_eq!(b.charts().len(), 2);
    }

    #[test]
    fn blowup_does_not_depend_on_generator_order() {
        let x = quadrant_scheme();
        let z1 = EquivariantCenter::new(
            &x,
            vec![ideal(&x.charts()[0], &[&[1, 0], &[0, 1]])],
        )
        .unwrap();
        let z2 = EquivariantCenter::new(
            &x,
            vec![ideal(&x.charts()[0], &[&[0, 1], &[1, 0]])],
        )
        .unwrap();
        let b1 = blowup(&x, &z1, false).unwrap();
        let b2 = blowup(&x, &z2, false).unwrap();
        assert_eq!(b1.charts().len(), b2.charts().len());
        for (c1, c2) in b1.charts().iter().zip(b2.charts()) {
            assert!(c1.same_submonoid(c2));
        }
    }

    #[test]
    fn rees_charts_cover_the_subdivision_with_a_torus_overlap() {
        // Blowing up the singular point of the quadric cone chart: three
        // generators give three Rees charts; two match the star
        // subdivision and the third is their common localization.
        let fan = Fan::new(2, vec![cone(2, &[&[1, 0], &[1, 2]])]).unwrap();
        let x = fan_to_scheme(&fan).unwrap();
        let gens: Vec<&[i64]> = vec![&[0, 1], &[1, 0], &[2, -1]];
        let z = EquivariantCenter::new(&x, vec![ideal(&x.charts()[0], &gens)]).unwrap();
        let b = blowup(&x, &z, false).unwrap();
        assert_eq!(b.charts().len(), 3);
        assert!(b.smooth_everywhere(false));

        let sub = fan_to_scheme(&star_subdivide(&fan, &v(&[1, 1])).unwrap()).unwrap();
        assert_eq!(sub.charts().len(), 2);
        for chart in sub.charts() {
            assert!(b.charts().iter().any(|c| c.same_submonoid(chart)));
        }
        let extra = b
            .charts()
            .iter()
            .find(|c| !sub.charts().iter().any(|s| s.same_submonoid(c)))
            .expect("one torus-bearing chart beyond the subdivision");
        assert_eq!(extra.units().len(), 1);
        let covered = sub.charts().iter().any(|s| {
            s.gens()
                .iter()
                .any(|a| s.localize(a).map(|l| l.same_submonoid(extra)).unwrap_or(false))
        });
        assert!(covered, "the extra chart must be a localization of a subdivision chart");
    }

    #[test]
    fn incompatible_center_ideals_are_rejected() {
        let fan = Fan::new(
            2,
            vec![cone(2, &[&[1, 0], &[0, 1]]), cone(2, &[&[1, 0], &[0, -1]])],
        )
        .unwrap();
        let x = fan_to_scheme(&fan).unwrap();
        // V(e1) is cut by (x) in both charts; pairing it with V(-e2)'s
        // ideal breaks on the overlap.
        let good = EquivariantCenter::new(
            &x,
            vec![ideal(&x.charts()[0], &[&[1, 0]]), ideal(&x.charts()[1], &[&[1, 0]])],
        );
        assert!(good.is_ok());
        let lower = x
            .charts()
            .iter()
            .position(|c| c.contains_vector(&v(&[0, -1])))
            .unwrap();
        let mismatched: Vec<MonoidIdeal> = x
            .charts()
            .iter()
            .enumerate()
            .map(|(i, c)| {
                if i == lower {
                    ideal(c, &[&[0, -1]])
                } else {
                    ideal(c, &[&[1, 0]])
                }
            })
            .collect();
        let bad = EquivariantCenter::new(&x, mismatched);
        assert!(matches!(bad, Err(SchemeError::IncompatibleCenter { .. })));
    }

    #[test]
    fn resolving_the_quadric_cone_takes_one_step() {
        let fan = Fan::new(2, vec![cone(2, &[&[1, 0], &[1, 2]])]).unwrap();
        let x = fan_to_scheme(&fan).unwrap();
        let trace = resolve(&x, &ResolveOptions::default()).unwrap();
        assert_eq!(trace.steps.len(), 1);
        assert_eq!(trace.steps[0].center, v(&[1, 1]));
        assert!(trace.steps[0].center_smooth);
        assert!(trace.steps[0].normally_flat);
        assert!(trace.is_resolved());
        assert_eq!(trace.final_fan().cones().len(), 2);
    }

    #[test]
    fn the_staircase_resolves_in_n_minus_one_steps() {
        for n in 2..=6i64 {
            let fan = Fan::new(2, vec![cone(2, &[&[1, 0], &[1, n]])]).unwrap();
            let x = fan_to_scheme(&fan).unwrap();
            let trace = resolve(&x, &ResolveOptions::default()).unwrap();
            assert_eq!(trace.steps.len(), (n - 1) as usize, "staircase length for n = {n}");
            assert!(trace.is_resolved());
            assert!(trace.steps.iter().all(|s| s.center_smooth && s.normally_flat));
        }
    }

    #[test]
    fn smooth_input_resolves_in_zero_steps() {
        let trace = resolve(&quadrant_scheme(), &ResolveOptions::default()).unwrap();
        assert!(trace.steps.is_empty());
        assert!(trace.is_resolved());
    }

    #[test]
    fn tight_budgets_are_an_error() {
        let fan = Fan::new(2, vec![cone(2, &[&[1, 0], &[1, 4]])]).unwrap();
        let x = fan_to_scheme(&fan).unwrap();
        let opts = ResolveOptions { max_steps: 1, ..ResolveOptions::default() };
        assert!(matches!(
            resolve(&x, &opts),
            Err(SchemeError::BudgetExceeded { max_steps: 1 })
        ));
    }

    #[test]
    fn traces_render_as_dot() {
        let fan = Fan::new(2, vec![cone(2, &[&[1, 0], &[1, 2]])]).unwrap();
        let x = fan_to_scheme(&fan).unwrap();
        let trace = resolve(&x, &ResolveOptions::default()).unwrap();
        let dot = trace.dot();
        assert!(dot.starts_with("digraph resolution {"));
        assert!(dot.contains("->"));
        assert!(dot.contains("(1, 1)"));
        assert!(dot.trim_end().ends_with('}'));
    }

    #[test]
    fn dilation_squares_coordinates_and_respects_gluing() {
        let fan = Fan::new(1, vec![cone(1, &[&[1]]), cone(1, &[&[-1]])]).unwrap();
        let x = fan_to_scheme(&fan).unwrap();
        let y = dilate_scheme(&x, 2).unwrap();
        for (a, b) in x.charts().iter().zip(y.charts()) {
            assert!(a.same_submonoid(b));
        }
        // The self-maps compose multiplicatively on elements.
        let chart = &x.charts()[0];
        let e = chart.element(chart.gens().first().unwrap()).unwrap();
        let twice_thrice = chart.dilate(&chart.dilate(&e, 2), 3);
        assert_eq!(twice_thrice, chart.dilate(&e, 6));
        assert!(matches!(twice_thrice, MonoidElement::Point(ref w) if *w == chart.gens()[0].scale(&BigInt::from(6))));
    }

    #[test]
    fn dilation_descends_to_rees_charts() {
        let x = quadrant_scheme();
        let a = &x.charts()[0];
        let z = EquivariantCenter::new(&x, vec![ideal(a, &[&[1, 0], &[0, 1]])]).unwrap();
        let dilated = EquivariantCenter::new(&x, vec![ideal(a, &[&[2, 0], &[0, 2]])]).unwrap();
        let b = blowup(&x, &z, false).unwrap();
        let bd = blowup(&x, &dilated, true).unwrap();
        // Doubling maps each Rees chart of the center into the matching
        // Rees chart of the doubled center, and not identically.
        let two = BigInt::from(2);
        for (c, cd) in b.charts().iter().zip(bd.charts()) {
            assert!(c.gens().iter().all(|g| cd.contains_vector(&g.scale(&two))));
            assert!(c.gens().iter().any(|g| !cd.contains_vector(g)));
        }
    }
}
