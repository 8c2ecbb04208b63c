//! Presentations and counting shadows of monoid data.
//!
//! [`algebra_presentation`] turns a pointed monoid into a generators-and-
//! relations description of its monomial algebra: one variable per minimal
//! generator, binomials spanning the relation lattice among them, and one
//! monomial per collapsed generator.  [`cas_script`] renders the result in a
//! small declarative dialect so an external computer-algebra system can
//! replay it.  [`hilbert_function`] and [`nf_crosscheck`] count instead of
//! presenting; the cross-check recomputes a freeness verdict degreewise
//! through an independent census, so a mismatch flags a bug, not new
//! mathematics.

use std::fmt::Write as _;

use num_bigint::BigInt;
use num_traits::{Signed, ToPrimitive, Zero};
use thiserror::Error;

use crate::aset::{ASet, ASetError, Freeness};
use crate::lattice::dio::{minimal_nonneg_solutions, DioLimits};
use crate::lattice::snf::{kernel_basis, IMat};
use crate::lattice::{LatticeError, LatticeVector};
use crate::monoid::{MonoidIdeal, PointedMonoid};

#[derive(Debug, Error)]
pub enum RealizeError {
    #[error("no positive grading: units are nontrivial, so degree classes are infinite")]
    NoPositiveGrading,
    #[error("search capped while {op}")]
    SearchCapped { op: &'static str },
    #[error("a relation exponent does not fit in 32 bits")]
    ExponentOverflow,
}

/// One algebra variable: `name` maps to the monomial at `vector`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PresVar {
    pub name: String,
    pub vector: LatticeVector,
    pub invertible: bool,
    pub degree: BigInt,
}

/// `lhs = rhs` as exponent lists `(variable index, power)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Binomial {
    pub lhs: Vec<(usize, u32)>,
    pub rhs: Vec<(usize, u32)>,
}

/// A product of variables set to zero; `vector` is the collapsed lattice
/// point it factors.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Monomial {
    pub factors: Vec<(usize, u32)>,
    pub vector: LatticeVector,
}

/// Generators and relations for the monomial algebra of a pointed monoid:
/// the quotient of a (Laurent-) polynomial ring by the listed binomials and
/// monomials.  The binomials generate the full lattice of relations among
/// the variables' exponent vectors.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AlgebraPresentation {
    pub vars: Vec<PresVar>,
    pub binomials: Vec<Binomial>,
    pub monomials: Vec<Monomial>,
}

pub fn algebra_presentation(a: &PointedMonoid) -> Result<AlgebraPresentation, RealizeError> {
    let atoms = a.atoms();
    let mut vars: Vec<PresVar> = atoms
        .iter()
        .enumerate()
        .map(|(i, v)| PresVar {
            name: format!("u{i}"),
            vector: v.clone(),
            invertible: false,
            degree: a.degree(v),
        })
        .collect();
    for (i, u) in a.units().iter().enumerate() {
        vars.push(PresVar {
            name: format!("s{i}"),
            vector: u.clone(),
            invertible: true,
            degree: BigInt::from(0),
        });
    }

    // Every integer relation among the variables' vectors becomes a
    // binomial; negative unit exponents just land on the other side.
    let columns: Vec<LatticeVector> = vars.iter().map(|v| v.vector.clone()).collect();
    let mut binomials = Vec::new();
    for k in kernel_basis(&IMat::from_columns(&columns, a.dim())) {
        let k = match k.coords().iter().find(|c| !c.is_zero()) {
            Some(c) if c.is_negative() => k.neg(),
            Some(_) => k,
            None => continue,
        };
        let mut lhs = Vec::new();
        let mut rhs = Vec::new();
        for (i, c) in k.coords().iter().enumerate() {
            let e = c.abs().to_u32().ok_or(RealizeError::ExponentOverflow)?;
            if c.is_positive() {
                lhs.push((i, e));
            } else if c.is_negative() {
                rhs.push((i, e));
            }
        }
        binomials.push(Binomial { lhs, rhs });
    }

    // Collapsed generators factor over the atoms up to units, and the unit
    // part of the factorization is invisible to a monomial being zero.
    let qatoms: Vec<LatticeVector> =
        atoms.iter().map(|v| a.quotient().project(v)).collect();
    let mut monomials = Vec::new();
    for k in a.collapse() {
        let qk = a.quotient().project(k);
        let sols = minimal_nonneg_solutions(&qatoms, &qk, &DioLimits::default())
            .map_err(|e| match e {
                LatticeError::SearchCapped { .. } => {
                    RealizeError::SearchCapped { op: "factoring a collapsed generator" }
                }
                _ => RealizeError::ExponentOverflow,
            })?;
        let counts = sols
            .into_iter()
            .next()
            .expect("collapse generators lie in the monoid, so they factor");
        let factors: Vec<(usize, u32)> = counts
            .iter()
            .enumerate()
            .filter(|(_, c)| **c > 0)
            .map(|(i, c)| (i, *c))
            .collect();
        monomials.push(Monomial { factors, vector: k.clone() });
    }

    Ok(AlgebraPresentation { vars, binomials, monomials })
}

fn monomial_string(factors: &[(usize, u32)], vars: &[PresVar]) -> String {
    if factors.is_empty() {
        return "1".to_string();
    }
    factors
        .iter()
        .map(|(i, e)| {
            if *e == 1 {
                vars[*i].name.clone()
            } else {
                format!("{}^{}", vars[*i].name, e)
            }
        })
        .collect::<Vec<_>>()
        .join("*")
}

/// Renders a presentation as a short script: a ring, an ideal `I` of
/// binomial relations (with `x*xinv - 1` pairs making units invertible), an
/// ideal `Z` of vanishing monomials, and the quotient.
pub fn cas_script(p: &AlgebraPresentation) -> String {
    let mut names: Vec<String> = p.vars.iter().map(|v| v.name.clone()).collect();
    names.extend(p.vars.iter().filter(|v| v.invertible).map(|v| format!("{}inv", v.name)));
    let mut out = String::new();
    let _ = writeln!(out, "ring R = k[{}];", names.join(", "));
    if p.vars.iter().any(|v| !v.invertible) {
        let degs: Vec<String> = p
            .vars
            .iter()
            .filter(|v| !v.invertible)
            .map(|v| format!("deg {} = {}", v.name, v.degree))
            .collect();
        let _ = writeln!(out, "// {}", degs.join(", "));
    }
    let mut rels: Vec<String> = p
        .vars
        .iter()
        .filter(|v| v.invertible)
        .map(|v| format!("{0}*{0}inv - 1", v.name))
        .collect();
    rels.extend(
        p.binomials
            .iter()
            .map(|b| {
                format!(
                    "{} - {}",
                    monomial_string(&b.lhs, &p.vars),
                    monomial_string(&b.rhs, &p.vars)
                )
            }),
    );
    if rels.is_empty() {
        let _ = writeln!(out, "ideal I = 0;");
    } else {
        let _ = writeln!(out, "ideal I = {};", rels.join(", "));
    }
    let mons: Vec<String> =
        p.monomials.iter().map(|m| monomial_string(&m.factors, &p.vars)).collect();
    if mons.is_empty() {
        let _ = writeln!(out, "ideal Z = 0;");
    } else {
        let _ = writeln!(out, "ideal Z = {};", mons.join(", "));
    }
    let _ = writeln!(out, "quotient Q = R / (I + Z);");
    out
}

/// Number of nonzero elements in each degree, `0..=max_degree`.
pub fn hilbert_function(
    a: &PointedMonoid,
    max_degree: usize,
) -> Result<Vec<usize>, RealizeError> {
    if !a.units().is_empty() {
        return Err(RealizeError::NoPositiveGrading);
    }
    Ok(a.hilbert(max_degree))
}

/// Number of nonzero set elements in each ambient degree, `0..=max_degree`.
pub fn hilbert_function_aset(x: &ASet, max_degree: usize) -> Result<Vec<usize>, RealizeError> {
    match x.elements_by_degree(max_degree) {
        Ok(levels) => Ok(levels.iter().map(|l| l.len()).collect()),
        Err(_) => Err(RealizeError::NoPositiveGrading),
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Crosscheck {
    Consistent,
    Inconsistent { degree: usize },
    NotApplicable,
}

/// Replays a freeness verdict by counting: if `I^n / I^(n+1)` is free on a
/// basis `B` over `A/I`, its census must equal the sum of degree-shifted
/// copies of the census of `A/I`.  The two sides come from independent
/// enumerations, so `Inconsistent` means a defect in one of them.
pub fn nf_crosscheck(
    a: &PointedMonoid,
    ideal: &MonoidIdeal,
    n: u32,
    max_degree: usize,
) -> Result<Crosscheck, ASetError> {
    let piece = ASet::graded_piece(a, ideal, n)?;
    let Freeness::Free { basis } = piece.is_free(None) else {
        return Ok(Crosscheck::NotApplicable);
    };
    let counts: Vec<usize> =
        piece.elements_by_degree(max_degree)?.iter().map(|l| l.len()).collect();
    let acting_levels = piece.acting_by_ambient_degree(max_degree)?;
    let mut model = vec![0usize; max_degree + 1];
    for b in &basis {
        let Some(db) = piece.ambient().degree(b).to_usize() else { continue };
        for (d, level) in acting_levels.iter().enumerate() {
            if db + d <= max_degree {
                model[db + d] += level.len();
            }
        }
    }
    for (d, (got, want)) in counts.iter().zip(&model).enumerate() {
        if got != want {
            return Ok(Crosscheck::Inconsistent { degree: d });
        }
    }
    Ok(Crosscheck::Consistent)
}
