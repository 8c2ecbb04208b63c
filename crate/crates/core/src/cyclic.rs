//! Truncated cyclic nerves, their windowed dilations, and homology.
//!
//! The component of an element `a` is the pointed cyclic set whose
//! n-simplices are the (n+1)-tuples of nonzero monoid elements multiplying
//! to `a`: faces merge adjacent entries (the last wraps around), degeneracies
//! insert the identity, and the cyclic operator rotates entries to the left.
//! Sharp monoids give finite levels; localizations are handled by
//! [`dilated_cyclic_nerve`], which enumerates unit exponents inside a
//! recorded window instead of pretending the level is finite.  Homology of
//! the normalized complex is computed over exact integers — Smith normal
//! form for ranks and torsion, no floating point.

use std::collections::{BTreeMap, BTreeSet};

use num_bigint::BigInt;
use num_traits::{Signed, ToPrimitive, Zero};
use thiserror::Error;

use crate::dilation::dilate_monoid;
use crate::exec;
use crate::lattice::snf::{kernel_basis, rank as int_rank, smith, solve as int_solve, IMat};
use crate::lattice::{LatticeError, LatticeVector};
use crate::monoid::{MonoidElement, MonoidError, PointedMonoid, Reducedness};

#[derive(Debug, Error)]
pub enum CyclicError {
    #[error(transparent)]
    Monoid(#[from] MonoidError),
    #[error(transparent)]
    Lattice(#[from] LatticeError),
    #[error("level sets are infinite: {detail}")]
    InfiniteLevel { detail: String },
    #[error("degree {degree} needs a truncation above {top}")]
    TruncationTooShallow { degree: usize, top: usize },
    #[error("coefficients mod {p} need a prime modulus")]
    InvalidCoefficient { p: u32 },
    #[error("the monoid is not reduced")]
    NotReduced,
    #[error("a certification search was capped after {nodes} nodes")]
    SearchCapped { nodes: usize },
    #[error("dilation factors must be at least 2, got {c}")]
    DilationFactorTooSmall { c: u32 },
    #[error("a dilation sequence needs at least one factor")]
    EmptyDilationSequence,
}

/// An infinite sequence of dilation exponents, stored as a repeating block.
#[derive(Clone, Debug)]
pub struct DilationSequence {
    c: Vec<u32>,
}

impl DilationSequence {
    pub fn new(c: Vec<u32>) -> Result<DilationSequence, CyclicError> {
        if c.is_empty() {
            return Err(CyclicError::EmptyDilationSequence);
        }
        if let Some(&bad) = c.iter().find(|&&x| x < 2) {
            return Err(CyclicError::DilationFactorTooSmall { c: bad });
        }
        Ok(DilationSequence { c })
    }

    /// The i-th factor; the block repeats forever.
    pub fn factor(&self, i: usize) -> u32 {
        self.c[i % self.c.len()]
    }

    pub fn block(&self) -> &[u32] {
        &self.c
    }
}

/// Levels 0..=top of one graded component, with the monoid its entries live
/// in.  `window = Some(w)` marks a localized enumeration cut off at unit
/// exponent `w` per coordinate — such a truncation is not certified
/// complete, and operator closure is only guaranteed inside the box.
#[derive(Clone, Debug)]
pub struct CyclicSetTruncation {
    monoid: PointedMonoid,
    grading: MonoidElement,
    top: usize,
    levels: Vec<Vec<Vec<LatticeVector>>>,
    window: Option<u32>,
}

impl CyclicSetTruncation {
    pub fn monoid(&self) -> &PointedMonoid {
        &self.monoid
    }

    pub fn grading(&self) -> &MonoidElement {
        &self.grading
    }

    pub fn top(&self) -> usize {
        self.top
    }

    pub fn levels(&self) -> &[Vec<Vec<LatticeVector>>] {
        &self.levels
    }

    pub fn level(&self, n: usize) -> &[Vec<LatticeVector>] {
        &self.levels[n]
    }

    pub fn window(&self) -> Option<u32> {
        self.window
    }

    /// `d_i`: merge entries i and i+1, the last face wrapping around.
    /// `None` is the basepoint, reached when the merged entry dies.
    pub fn face(&self, s: &[LatticeVector], i: usize) -> Option<Vec<LatticeVector>> {
        let n = s.len() - 1;
        assert!(n >= 1 && i <= n, "face d_{i} is undefined on a {n}-simplex");
        let merged = if i < n { s[i].add(&s[i + 1]) } else { s[n].add(&s[0]) };
        match self.monoid.element(&merged) {
            Ok(MonoidElement::Point(_)) => {}
            _ => return None,
        }
        let mut out = Vec::with_capacity(n);
        if i < n {
            out.extend_from_slice(&s[..i]);
            out.push(merged);
            out.extend_from_slice(&s[i + 2..]);
        } else {
            out.push(merged);
            out.extend_from_slice(&s[1..n]);
        }
        Some(out)
    }

    /// `s_i`: insert the identity after entry i.
    pub fn degeneracy(&self, s: &[LatticeVector], i: usize) -> Vec<LatticeVector> {
        let n = s.len() - 1;
        assert!(i <= n, "degeneracy s_{i} is undefined on a {n}-simplex");
        let mut out = Vec::with_capacity(n + 2);
        out.extend_from_slice(&s[..=i]);
        out.push(LatticeVector::zero(self.monoid.dim()));
        out.extend_from_slice(&s[i + 1..]);
        out
    }

    /// The cyclic operator: rotate entries one step to the left.
    pub fn rotate(&self, s: &[LatticeVector]) -> Vec<LatticeVector> {
        let mut out = Vec::with_capacity(s.len());
        out.extend_from_slice(&s[1..]);
        out.push(s[0].clone());
        out
    }

    pub fn index_of(&self, n: usize, s: &[LatticeVector]) -> Option<usize> {
        if n > self.top {
            return None;
        }
        self.levels[n].binary_search_by(|t| t.as_slice().cmp(s)).ok()
    }

    /// A simplex is degenerate exactly when some entry past the first is the
    /// identity — that entry is where a degeneracy inserted it.
    pub fn is_degenerate(s: &[LatticeVector]) -> bool {
        s[1..].iter().any(|e| e.is_zero())
    }

    /// Exhaustively checks the simplicial and cyclic identities on every
    /// stored simplex, the grading constraint, and (for certified
    /// truncations) closure of the level sets under the operators.
    pub fn verify(&self) -> Result<(), String> {
        let certified = self.window.is_none();
        for n in 0..=self.top {
            for s in &self.levels[n] {
                let total = s.iter().fold(LatticeVector::zero(self.monoid.dim()), |a, e| a.add(e));
                let el = self.monoid.element(&total).map_err(|e| e.to_string())?;
                if el != self.grading {
                    return Err(format!("simplex {s:?} multiplies to the wrong component"));
                }
                let mut r = s.clone();
                for _ in 0..=n {
                    r = self.rotate(&r);
                }
                if r != *s {
                    return Err(format!("t^{} is not the identity at level {n}", n + 1));
                }
                if n >= 2 {
                    for j in 1..=n {
                        for i in 0..j {
                            let lhs = self.face(s, j).and_then(|x| self.face(&x, i));
                            let rhs = self.face(s, i).and_then(|x| self.face(&x, j - 1));
                            if lhs != rhs {
                                return Err(format!("d_{i} d_{j} mismatch at level {n}"));
                            }
                        }
                    }
                }
                for j in 0..=n {
                    let sj = self.degeneracy(s, j);
                    for i in 0..=n + 1 {
                        let got = self.face(&sj, i);
                        let want = if i < j {
                            self.face(s, i).map(|x| self.degeneracy(&x, j - 1))
                        } else if i == j || i == j + 1 {
                            Some(s.clone())
                        } else {
                            self.face(s, i - 1).map(|x| self.degeneracy(&x, j))
                        };
                        if got != want {
                            return Err(format!("d_{i} s_{j} mismatch at level {n}"));
                        }
                    }
                    for i in 0..=j {
                        if self.degeneracy(&self.degeneracy(s, j), i)
                            != self.degeneracy(&self.degeneracy(s, i), j + 1)
                        {
                            return Err(format!("s_{i} s_{j} mismatch at level {n}"));
                        }
                    }
                }
                let t = self.rotate(s);
                for i in 0..n {
                    if self.face(&t, i) != self.face(s, i + 1).map(|x| self.rotate(&x)) {
                        return Err(format!("d_{i} t mismatch at level {n}"));
                    }
                }
                if n >= 1 && self.face(&t, n) != self.face(s, 0) {
                    return Err(format!("d_{n} t mismatch at level {n}"));
                }
                for i in 0..n {
                    if self.degeneracy(&t, i) != self.rotate(&self.degeneracy(s, i + 1)) {
                        return Err(format!("s_{i} t mismatch at level {n}"));
                    }
                }
                let s0 = self.degeneracy(s, 0);
                if self.degeneracy(&t, n) != self.rotate(&self.rotate(&s0)) {
                    return Err(format!("s_{n} t mismatch at level {n}"));
                }
                if certified {
                    if self.index_of(n, &t).is_none() {
                        return Err(format!("rotation leaves level {n}"));
                    }
                    if n >= 1 {
                        for i in 0..=n {
                            match self.face(s, i) {
                                None => {
                                    return Err(format!(
                                        "a face died inside the alive component at level {n}"
                                    ))
                                }
                                Some(f) => {
                                    if self.index_of(n - 1, &f).is_none() {
                                        return Err(format!("d_{i} leaves level {n}"));
                                    }
                                }
                            }
                        }
                    }
                    if n < self.top {
                        for i in 0..=n {
                            if self.index_of(n + 1, &self.degeneracy(s, i)).is_none() {
                                return Err(format!("s_{i} leaves level {n}"));
                            }
                        }
                    }
                }
            }
        }
        Ok(())
    }
}

fn alive(a: &PointedMonoid, v: &LatticeVector) -> bool {
    matches!(a.element(v), Ok(MonoidElement::Point(_)))
}

/// Alive elements w with v - w still in the monoid — the possible entries of
/// a tuple multiplying to v.  Walks atom sums; positivity bounds the search.
fn divisor_set(a: &PointedMonoid, atoms: &[LatticeVector], v: &LatticeVector) -> Vec<LatticeVector> {
    let zero = LatticeVector::zero(a.dim());
    let mut seen: BTreeSet<LatticeVector> = BTreeSet::new();
    let mut queue = vec![zero.clone()];
    seen.insert(zero);
    while let Some(w) = queue.pop() {
        for at in atoms {
            let next = w.add(at);
            if seen.contains(&next) || !alive(a, &next) || !a.contains_vector(&v.sub(&next)) {
                continue;
            }
            seen.insert(next.clone());
            queue.push(next);
        }
    }
    seen.into_iter().collect()
}

fn tuples_for(
    a: &PointedMonoid,
    atoms: &[LatticeVector],
    divisors: &mut BTreeMap<LatticeVector, Vec<LatticeVector>>,
    memo: &mut BTreeMap<(LatticeVector, usize), Vec<Vec<LatticeVector>>>,
    v: &LatticeVector,
    m: usize,
) -> Vec<Vec<LatticeVector>> {
    if m == 1 {
        return vec![vec![v.clone()]];
    }
    if let Some(hit) = memo.get(&(v.clone(), m)) {
        return hit.clone();
    }
    let divs = divisors
        .entry(v.clone())
        .or_insert_with(|| divisor_set(a, atoms, v))
        .clone();
    let mut out = Vec::new();
    for w in divs {
        let rest = tuples_for(a, atoms, divisors, memo, &v.sub(&w), m - 1);
        for r in rest {
            let mut t = Vec::with_capacity(m);
            t.push(w.clone());
            t.extend(r);
            out.push(t);
        }
    }
    out.sort();
    memo.insert((v.clone(), m), out.clone());
    out
}

fn empty_levels(top: usize) -> Vec<Vec<Vec<LatticeVector>>> {
    (0..=top).map(|_| Vec::new()).collect()
}

/// The component of `el`: all tuples of nonzero elements multiplying to it,
/// up to level `top`.  Needs finite divisor sets, hence a sharp monoid; the
/// zero component is only finite (empty) when nothing collapses.
pub fn cyclic_nerve(
    a: &PointedMonoid,
    el: &MonoidElement,
    top: usize,
) -> Result<CyclicSetTruncation, CyclicError> {
    if !a.units().is_empty() {
        return Err(CyclicError::InfiniteLevel {
            detail: "units give every element infinitely many divisors".to_string(),
        });
    }
    let v = match el {
        MonoidElement::Zero => {
            if a.collapse().is_empty() {
                return Ok(CyclicSetTruncation {
                    monoid: a.clone(),
                    grading: MonoidElement::Zero,
                    top,
                    levels: empty_levels(top),
                    window: None,
                });
            }
            return Err(CyclicError::InfiniteLevel {
                detail: "the zero component has unbounded levels once products can die"
                    .to_string(),
            });
        }
        MonoidElement::Point(v) => v.clone(),
    };
    if !alive(a, &v) {
        return Err(CyclicError::InfiniteLevel {
            detail: "the zero component has unbounded levels once products can die".to_string(),
        });
    }
    let atoms = a.atoms();
    let mut divisors = BTreeMap::new();
    let mut memo = BTreeMap::new();
    let levels = (0..=top)
        .map(|n| tuples_for(a, &atoms, &mut divisors, &mut memo, &v, n + 1))
        .collect();
    Ok(CyclicSetTruncation {
        monoid: a.clone(),
        grading: MonoidElement::Point(v),
        top,
        levels,
        window: None,
    })
}

fn exponent_tuples(target: &[BigInt], m: usize, beta: i64) -> Vec<Vec<Vec<i64>>> {
    if m == 1 {
        let entry: Option<Vec<i64>> = target
            .iter()
            .map(|t| t.to_i64().filter(|x| x.abs() <= beta))
            .collect();
        return entry.map(|e| vec![vec![e]]).unwrap_or_default();
    }
    // The box is a product, so each coordinate ranges independently over
    // what the remaining entries can still absorb.
    let slack = BigInt::from(beta) * BigInt::from((m - 1) as i64);
    let ranges: Vec<(i64, i64)> = target
        .iter()
        .map(|t| {
            let lo = (t - &slack).max(BigInt::from(-beta));
            let hi = (t + &slack).min(BigInt::from(beta));
            (lo.to_i64().unwrap_or(-beta), hi.to_i64().unwrap_or(beta))
        })
        .collect();
    let mut firsts: Vec<Vec<i64>> = vec![Vec::new()];
    for &(lo, hi) in &ranges {
        let mut next = Vec::new();
        for f in &firsts {
            for e in lo..=hi {
                let mut g = f.clone();
                g.push(e);
                next.push(g);
            }
        }
        firsts = next;
    }
    let mut out = Vec::new();
    for f in firsts {
        let rest_target: Vec<BigInt> = target
            .iter()
            .zip(&f)
            .map(|(t, e)| t - BigInt::from(*e))
            .collect();
        for rest in exponent_tuples(&rest_target, m - 1, beta) {
            let mut t = Vec::with_capacity(m);
            t.push(f.clone());
            t.extend(rest);
            out.push(t);
        }
    }
    out
}

/// The component of `el` over the localization at `el`, enumerated inside a
/// unit-exponent window (default width 2·top).  Entries multiplying to an
/// invertible element are forced to be units themselves, so the window in
/// the unit directions is the only cut-off; when the localization has no
/// units the enumeration is complete and the window flag is dropped.
pub fn dilated_cyclic_nerve(
    a: &PointedMonoid,
    el: &MonoidElement,
    top: usize,
    window: Option<u32>,
) -> Result<CyclicSetTruncation, CyclicError> {
    let w = window.unwrap_or(2 * top as u32);
    let v = match el {
        MonoidElement::Zero => {
            // Inverting zero collapses the localization; only the basepoint
            // is left.
            return Ok(CyclicSetTruncation {
                monoid: a.clone(),
                grading: MonoidElement::Zero,
                top,
                levels: empty_levels(top),
                window: Some(w),
            });
        }
        MonoidElement::Point(v) => v.clone(),
    };
    let loc = a.localize(&v)?;
    let ubasis = loc.units().to_vec();
    if ubasis.is_empty() {
        // No units were created: el is the identity and the component is a
        // single point per level, certified complete.
        let levels = (0..=top)
            .map(|n| vec![vec![LatticeVector::zero(a.dim()); n + 1]])
            .collect();
        return Ok(CyclicSetTruncation {
            monoid: loc.clone(),
            grading: loc.element(&v)?,
            top,
            levels,
            window: None,
        });
    }
    let umat = IMat::from_columns(&ubasis, a.dim());
    let coords = int_solve(&umat, &v)
        .expect("the inverted element lies in the saturated unit lattice");
    let target: Vec<BigInt> = coords.coords().to_vec();
    let levels = (0..=top)
        .map(|n| {
            let mut lv: Vec<Vec<LatticeVector>> = exponent_tuples(&target, n + 1, w as i64)
                .into_iter()
                .map(|t| {
                    t.into_iter()
                        .map(|e| umat.apply(&LatticeVector::from_i64(&e)))
                        .collect()
                })
                .collect();
            lv.sort();
            lv
        })
        .collect();
    Ok(CyclicSetTruncation {
        monoid: loc.clone(),
        grading: loc.element(&v)?,
        top,
        levels,
        window: Some(w),
    })
}

/// The dilated nerve of the seminormalization, with the natural inclusion
/// of the plain nerve computed alongside: each simplex maps to itself, the
/// entries reread in the bigger monoid.
#[derive(Clone, Debug)]
pub struct OmegaTilde {
    pub target: CyclicSetTruncation,
    pub source: CyclicSetTruncation,
    /// Per level, the index of each source simplex inside the target level;
    /// `None` only when the window was too narrow to contain it.
    pub map: Vec<Vec<Option<usize>>>,
}

pub fn omega_tilde(
    a: &PointedMonoid,
    el: &MonoidElement,
    top: usize,
    window: Option<u32>,
) -> Result<OmegaTilde, CyclicError> {
    match a.is_reduced() {
        Reducedness::Reduced => {}
        Reducedness::NotReduced { .. } => return Err(CyclicError::NotReduced),
        Reducedness::Unknown { nodes } => return Err(CyclicError::SearchCapped { nodes }),
    }
    let sn = a.seminormalize()?;
    let source = cyclic_nerve(a, el, top)?;
    let target = dilated_cyclic_nerve(&sn, el, top, window)?;
    let map = source
        .levels()
        .iter()
        .enumerate()
        .map(|(n, lv)| lv.iter().map(|s| target.index_of(n, s)).collect())
        .collect();
    Ok(OmegaTilde { target, source, map })
}

/// The image truncation under scaling by `c`: the nerve of the dilated
/// monoid at the dilated grading element, with simplices carried over in
/// place.  Scaling is a bijection on each level (entries of a product
/// decomposition scale along with the product), so the result needs no
/// re-enumeration and the operator tables transfer verbatim.  Only
/// certified-complete truncations can be scaled this way; a window is a
/// box in unit coordinates and does not commute with scaling.
pub fn dilate_truncation(
    t: &CyclicSetTruncation,
    c: u32,
) -> Result<CyclicSetTruncation, CyclicError> {
    assert!(c >= 1, "dilation exponent must be positive");
    if t.window().is_some() {
        return Err(CyclicError::InfiniteLevel {
            detail: "windowed truncations do not dilate exactly; rebuild with a scaled window"
                .to_string(),
        });
    }
    let monoid = dilate_monoid(t.monoid(), c)?;
    let k = BigInt::from(c);
    let grading = match t.grading() {
        MonoidElement::Zero => MonoidElement::Zero,
        MonoidElement::Point(v) => monoid.element(&v.scale(&k))?,
    };
    let levels = t
        .levels()
        .iter()
        .map(|lvl| {
            lvl.iter()
                .map(|s| s.iter().map(|e| e.scale(&k)).collect())
                .collect()
        })
        .collect();
    Ok(CyclicSetTruncation { monoid, grading, top: t.top(), levels, window: None })
}

/// Entrywise scaling by c, located simplex by simplex in the target
/// truncation.  `None` marks images the target window missed.
pub fn entrywise_dilation(
    src: &CyclicSetTruncation,
    dst: &CyclicSetTruncation,
    c: u32,
) -> Vec<Vec<Option<usize>>> {
    let k = BigInt::from(c);
    let top = src.top().min(dst.top());
    (0..=top)
        .map(|n| {
            src.level(n)
                .iter()
                .map(|s| {
                    let scaled: Vec<LatticeVector> = s.iter().map(|e| e.scale(&k)).collect();
                    dst.index_of(n, &scaled)
                })
                .collect()
        })
        .collect()
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Coefficients {
    Rationals,
    ModP(u32),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HomologyDegree {
    pub degree: usize,
    pub rank: usize,
    /// Orders of the finite cyclic summands; empty over a field.
    pub torsion: Vec<BigInt>,
}

struct ChainData {
    /// Per level, the indices of nondegenerate simplices.
    nondeg: Vec<Vec<usize>>,
    /// `mats[n]` is the boundary leaving level n+1, rows indexed by
    /// `nondeg[n]`, columns by `nondeg[n+1]`.
    mats: Vec<IMat>,
}

fn chain_data(t: &CyclicSetTruncation, max_degree: usize) -> ChainData {
    let depth = max_degree + 1;
    let nondeg: Vec<Vec<usize>> = (0..=depth)
        .map(|n| {
            t.level(n)
                .iter()
                .enumerate()
                .filter(|(_, s)| !CyclicSetTruncation::is_degenerate(s))
                .map(|(i, _)| i)
                .collect()
        })
        .collect();
    let mut mats = Vec::with_capacity(depth);
    for n in 1..=depth {
        let rows = nondeg[n - 1].len();
        let row_of: BTreeMap<usize, usize> =
            nondeg[n - 1].iter().enumerate().map(|(r, &i)| (i, r)).collect();
        let mut cols: Vec<LatticeVector> = Vec::with_capacity(nondeg[n].len());
        for &ci in &nondeg[n] {
            let s = &t.level(n)[ci];
            let mut col = vec![BigInt::zero(); rows];
            for i in 0..=n {
                let Some(f) = t.face(s, i) else { continue };
                if CyclicSetTruncation::is_degenerate(&f) {
                    continue;
                }
                // Windowed truncations may push a face outside the box;
                // those land on the basepoint of the recorded complex.
                let Some(fi) = t.index_of(n - 1, &f) else { continue };
                let r = row_of[&fi];
                if i % 2 == 0 {
                    col[r] += 1;
                } else {
                    col[r] -= 1;
                }
            }
            cols.push(LatticeVector::new(col));
        }
        mats.push(IMat::from_columns(&cols, rows));
    }
    ChainData { nondeg, mats }
}

struct SmithSummary {
    rank: usize,
    factors: Vec<BigInt>,
}

fn smith_summary(m: &IMat) -> SmithSummary {
    if m.rows() == 0 || m.cols() == 0 {
        return SmithSummary { rank: 0, factors: Vec::new() };
    }
    let s = smith(m);
    SmithSummary { rank: s.rank, factors: s.factors }
}

fn rank_mod_p(s: &SmithSummary, p: u32) -> usize {
    let p = BigInt::from(p);
    s.factors.iter().filter(|f| !(*f % &p).is_zero()).count()
}

fn is_prime(p: u32) -> bool {
    if p < 2 {
        return false;
    }
    let mut d = 2u32;
    while d.saturating_mul(d) <= p {
        if p % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

/// Homology of the normalized complex on nonbase nondegenerate simplices,
/// reported for degrees 0..=max_degree.  Degree q needs levels up to q+1,
/// so the truncation must reach at least max_degree+1; those degrees are
/// then stable under any deeper truncation.
pub fn nerve_homology(
    t: &CyclicSetTruncation,
    coeff: &Coefficients,
    max_degree: usize,
) -> Result<Vec<HomologyDegree>, CyclicError> {
    if let Coefficients::ModP(p) = coeff {
        if !is_prime(*p) {
            return Err(CyclicError::InvalidCoefficient { p: *p });
        }
    }
    if max_degree + 1 > t.top() {
        return Err(CyclicError::TruncationTooShallow { degree: max_degree, top: t.top() });
    }
    let data = chain_data(t, max_degree);
    let summaries: Vec<SmithSummary> = data.mats.iter().map(smith_summary).collect();
    let mut out = Vec::with_capacity(max_degree + 1);
    for q in 0..=max_degree {
        let dim = data.nondeg[q].len();
        let incoming = &summaries[q];
        let outgoing = if q == 0 { None } else { Some(&summaries[q - 1]) };
        let (rank, torsion) = match coeff {
            Coefficients::Rationals => {
                let r = dim - outgoing.map_or(0, |s| s.rank) - incoming.rank;
                let tor: Vec<BigInt> = incoming
                    .factors
                    .iter()
                    .filter(|f| f.abs() > BigInt::from(1))
                    .map(|f| f.abs())
                    .collect();
                (r, tor)
            }
            Coefficients::ModP(p) => {
                let r = dim - outgoing.map_or(0, |s| rank_mod_p(s, *p)) - rank_mod_p(incoming, *p);
                (r, Vec::new())
            }
        };
        out.push(HomologyDegree { degree: q, rank, torsion });
    }
    Ok(out)
}

#[derive(Clone, Debug)]
pub struct ProbeOptions {
    pub top: usize,
    pub window: Option<u32>,
    pub steps: usize,
    pub parallel: bool,
}

impl Default for ProbeOptions {
    fn default() -> Self {
        ProbeOptions { top: 2, window: None, steps: 2, parallel: true }
    }
}

/// Per-degree rank bookkeeping for the two dilation towers.  `*_ranks[k]`
/// are the homology ranks at stage k; `*_image[k]` is the rank of the image
/// of stage 0 inside stage k, whose plateau approximates the colimit.
#[derive(Clone, Debug)]
pub struct ProbeReport {
    pub degrees: Vec<usize>,
    pub nerve_ranks: Vec<Vec<usize>>,
    pub omega_ranks: Vec<Vec<usize>>,
    pub nerve_image: Vec<Vec<usize>>,
    pub omega_image: Vec<Vec<usize>>,
    pub stabilized: bool,
    pub agree: bool,
    pub caveats: Vec<String>,
}

struct Tower<'a> {
    stages: &'a [CyclicSetTruncation],
    ranks: Vec<Vec<usize>>,
}

fn compose_maps(
    first: Vec<Vec<Option<usize>>>,
    second: &[Vec<Option<usize>>],
) -> Vec<Vec<Option<usize>>> {
    first
        .into_iter()
        .enumerate()
        .map(|(n, lv)| {
            lv.into_iter()
                .map(|o| o.and_then(|i| second[n].get(i).copied().flatten()))
                .collect()
        })
        .collect()
}

/// Rank of the image of stage-0 homology inside the last stage, degree by
/// degree: cycles of the source are pushed through the entrywise dilations
/// and reduced modulo the target boundaries.  Returns the ranks and whether
/// any chain coefficient was lost to a window.
fn image_ranks(
    tower: &Tower,
    maps: &[Vec<Vec<Option<usize>>>],
    degrees: &[usize],
    max_degree: usize,
) -> (Vec<Vec<usize>>, bool) {
    let src = &tower.stages[0];
    let src_data = chain_data(src, max_degree);
    let mut lost = false;
    let mut out: Vec<Vec<usize>> = vec![tower
        .ranks
        .first()
        .cloned()
        .unwrap_or_default()];
    // Composite map from stage 0 into stage k, extended one stage at a time.
    let mut comp: Option<Vec<Vec<Option<usize>>>> = None;
    for (k, step) in maps.iter().enumerate() {
        comp = Some(match comp {
            None => step.clone(),
            Some(c) => compose_maps(c, step),
        });
        let comp_ref = comp.as_ref().unwrap();
        let dst = &tower.stages[k + 1];
        let dst_data = chain_data(dst, max_degree);
        let mut ranks = Vec::with_capacity(degrees.len());
        for &q in degrees {
            let kernel: Vec<LatticeVector> = if q == 0 {
                (0..src_data.nondeg[0].len())
                    .map(|i| LatticeVector::unit(src_data.nondeg[0].len(), i))
                    .collect()
            } else {
                kernel_basis(&src_data.mats[q - 1])
            };
            let dst_pos: BTreeMap<usize, usize> = dst_data.nondeg[q]
                .iter()
                .enumerate()
                .map(|(p, &i)| (i, p))
                .collect();
            let rows = dst_data.nondeg[q].len();
            let mut pushed: Vec<LatticeVector> = Vec::new();
            for cyc in &kernel {
                let mut img = vec![BigInt::zero(); rows];
                for (j, &full) in src_data.nondeg[q].iter().enumerate() {
                    let coef = &cyc.coords()[j];
                    if coef.is_zero() {
                        continue;
                    }
                    match comp_ref[q][full] {
                        Some(tf) => match dst_pos.get(&tf) {
                            Some(&p) => img[p] += coef,
                            None => lost = true,
                        },
                        None => lost = true,
                    }
                }
                pushed.push(LatticeVector::new(img));
            }
            let boundary = &dst_data.mats[q];
            let mut stacked = pushed.clone();
            for j in 0..boundary.cols() {
                stacked.push(boundary.col(j));
            }
            let total = int_rank(&IMat::from_columns(&stacked, rows));
            let bound = int_rank(boundary);
            ranks.push(total - bound);
        }
        out.push(ranks);
    }
    (out, lost)
}

/// Runs both dilation towers — plain nerves of the monoid, dilated nerves of
/// its seminormalization — along the sequence, and compares stabilized
/// image ranks per degree.  Windowing and truncation make every number a
/// certified lower bound rather than the true colimit; the caveats say so.
pub fn dilation_colimit_probe(
    a: &PointedMonoid,
    el: &MonoidElement,
    seq: &DilationSequence,
    degrees: &[usize],
    opts: &ProbeOptions,
) -> Result<ProbeReport, CyclicError> {
    match a.is_reduced() {
        Reducedness::Reduced => {}
        Reducedness::NotReduced { .. } => return Err(CyclicError::NotReduced),
        Reducedness::Unknown { nodes } => return Err(CyclicError::SearchCapped { nodes }),
    }
    let Some(&max_degree) = degrees.iter().max() else {
        return Ok(ProbeReport {
            degrees: Vec::new(),
            nerve_ranks: Vec::new(),
            omega_ranks: Vec::new(),
            nerve_image: Vec::new(),
            omega_image: Vec::new(),
            stabilized: true,
            agree: true,
            caveats: vec!["no degrees requested".to_string()],
        });
    };
    let sn = a.seminormalize()?;
    let base_window = opts.window.unwrap_or(2 * opts.top as u32);
    let mut specs = Vec::with_capacity(opts.steps + 1);
    let mut v = match el {
        MonoidElement::Zero => {
            return Err(CyclicError::InfiniteLevel {
                detail: "the zero component has unbounded levels once products can die"
                    .to_string(),
            })
        }
        MonoidElement::Point(v) => v.clone(),
    };
    let mut window = base_window;
    specs.push((v.clone(), window));
    for k in 0..opts.steps {
        let c = seq.factor(k);
        v = v.scale(&BigInt::from(c));
        window = window.saturating_mul(c);
        specs.push((v.clone(), window));
    }
    let built: Vec<Result<(CyclicSetTruncation, CyclicSetTruncation, Vec<usize>, Vec<usize>), CyclicError>> =
        exec::map_indexed(specs, opts.parallel, |(v, w)| {
            let nerve = cyclic_nerve(a, &a.element(&v)?, opts.top)?;
            let omega = dilated_cyclic_nerve(&sn, &sn.element(&v)?, opts.top, Some(w))?;
            let nr = nerve_homology(&nerve, &Coefficients::Rationals, max_degree)?;
            let or = nerve_homology(&omega, &Coefficients::Rationals, max_degree)?;
            let pick = |h: &[HomologyDegree]| degrees.iter().map(|&q| h[q].rank).collect();
            Ok((nerve, omega, pick(&nr), pick(&or)))
        });
    let mut nerves = Vec::new();
    let mut omegas = Vec::new();
    let mut nerve_ranks = Vec::new();
    let mut omega_ranks = Vec::new();
    for b in built {
        let (n, o, nr, or) = b?;
        nerves.push(n);
        omegas.push(o);
        nerve_ranks.push(nr);
        omega_ranks.push(or);
    }
    let nerve_maps: Vec<_> = (0..opts.steps)
        .map(|k| entrywise_dilation(&nerves[k], &nerves[k + 1], seq.factor(k)))
        .collect();
    let omega_maps: Vec<_> = (0..opts.steps)
        .map(|k| entrywise_dilation(&omegas[k], &omegas[k + 1], seq.factor(k)))
        .collect();
    let nerve_tower = Tower { stages: &nerves, ranks: nerve_ranks.clone() };
    let omega_tower = Tower { stages: &omegas, ranks: omega_ranks.clone() };
    let (nerve_image, lost_n) = image_ranks(&nerve_tower, &nerve_maps, degrees, max_degree);
    let (omega_image, lost_o) = image_ranks(&omega_tower, &omega_maps, degrees, max_degree);
    let stabilized = opts.steps >= 1
        && nerve_image[opts.steps - 1] == nerve_image[opts.steps]
        && omega_image[opts.steps - 1] == omega_image[opts.steps];
    let agree = nerve_image.last() == omega_image.last();
    let mut caveats = vec![
        format!("levels truncated at {}", opts.top),
        format!("dilated enumeration windowed at base width {base_window}"),
        "image ranks are lower bounds for the colimit".to_string(),
    ];
    if lost_n || lost_o {
        caveats.push("some chain images left the window and were dropped".to_string());
    }
    Ok(ProbeReport {
        degrees: degrees.to_vec(),
        nerve_ranks,
        omega_ranks,
        nerve_image,
        omega_image,
        stabilized,
        agree,
        caveats,
    })
}
