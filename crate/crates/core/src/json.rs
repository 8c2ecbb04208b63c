//! Wire formats.
//!
//! Every object this crate analyzes can be written to and read back from a
//! small JSON dialect with 64-bit integer coordinates:
//!
//! - monoid: `{"dim": d, "gens": [[..]], "units": [[..]], "collapse": [[..]]}`
//!   (`units` and `collapse` default to empty);
//! - element: a coordinate array, or the literal string `"zero"`;
//! - set: `{"acting": m, "ambient": m, "gens": [[..]], "kill": [[..]]}`;
//! - fan: `{"dim": d, "cones": [[ray, ..], ..]}`;
//! - scheme: `{"charts": [m, ..], "gluings": [g, ..], "fan": f?}` where a
//!   gluing is `{"i": i, "j": j, "a_i": [..], "a_j": [..], "map": [[..]]?}`.
//!
//! Reading always routes through the ordinary constructors, so a parsed
//! object satisfies the same invariants as a built one, and writing uses
//! the canonical fields, so read∘write is the identity.

use num_bigint::BigInt;
use num_traits::ToPrimitive;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::aset::{ASet, ASetError};
use crate::lattice::{Cone, LatticeError, LatticeVector};
use crate::monoid::{MonoidElement, MonoidError, MonoidIdeal, PointedMonoid};
use crate::scheme::{Fan, Gluing, MonoidScheme, SchemeError};

#[derive(Debug, Error)]
pub enum JsonError {
    #[error(transparent)]
    Monoid(#[from] MonoidError),
    #[error(transparent)]
    Lattice(#[from] LatticeError),
    #[error(transparent)]
    Set(#[from] ASetError),
    #[error(transparent)]
    Scheme(#[from] SchemeError),
    #[error("coordinate {value} does not fit in the 64-bit wire format")]
    Overflow { value: BigInt },
    #[error("unknown element literal {literal:?}; expected \"zero\" or a coordinate array")]
    BadElementLiteral { literal: String },
    #[error("malformed json: {0}")]
    Syntax(#[from] serde_json::Error),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MonoidJson {
    pub dim: usize,
    pub gens: Vec<Vec<i64>>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub units: Vec<Vec<i64>>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub collapse: Vec<Vec<i64>>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ElementJson {
    Literal(String),
    Point(Vec<i64>),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ASetJson {
    pub acting: MonoidJson,
    pub ambient: MonoidJson,
    pub gens: Vec<Vec<i64>>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub kill: Vec<Vec<i64>>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FanJson {
    pub dim: usize,
    pub cones: Vec<Vec<Vec<i64>>>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GluingJson {
    pub i: usize,
    pub j: usize,
    pub a_i: Vec<i64>,
    pub a_j: Vec<i64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub map: Option<Vec<Vec<i64>>>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SchemeJson {
    pub charts: Vec<MonoidJson>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub gluings: Vec<GluingJson>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub fan: Option<FanJson>,
}

pub fn vector_to_json(v: &LatticeVector) -> Result<Vec<i64>, JsonError> {
    v.coords()
        .iter()
        .map(|c| c.to_i64().ok_or_else(|| JsonError::Overflow { value: c.clone() }))
        .collect()
}

pub fn vector_from_json(coords: &[i64]) -> LatticeVector {
    LatticeVector::from_i64(coords)
}

fn vectors_to_json(vs: &[LatticeVector]) -> Result<Vec<Vec<i64>>, JsonError> {
    vs.iter().map(vector_to_json).collect()
}

fn vectors_from_json(vs: &[Vec<i64>]) -> Vec<LatticeVector> {
    vs.iter().map(|v| vector_from_json(v)).collect()
}

pub fn monoid_to_json(a: &PointedMonoid) -> Result<MonoidJson, JsonError> {
    Ok(MonoidJson {
        dim: a.dim(),
        gens: vectors_to_json(a.gens())?,
        units: vectors_to_json(a.units())?,
        collapse: vectors_to_json(a.collapse())?,
    })
}

pub fn monoid_from_json(j: &MonoidJson) -> Result<PointedMonoid, JsonError> {
    Ok(PointedMonoid::new(
        j.dim,
        vectors_from_json(&j.gens),
        vectors_from_json(&j.units),
        vectors_from_json(&j.collapse),
    )?)
}

pub fn element_to_json(e: &MonoidElement) -> Result<ElementJson, JsonError> {
    Ok(match e {
        MonoidElement::Zero => ElementJson::Literal("zero".to_string()),
        MonoidElement::Point(v) => ElementJson::Point(vector_to_json(v)?),
    })
}

pub fn element_from_json(j: &ElementJson) -> Result<MonoidElement, JsonError> {
    match j {
        ElementJson::Literal(s) if s == "zero" => Ok(MonoidElement::Zero),
        ElementJson::Literal(s) => Err(JsonError::BadElementLiteral { literal: s.clone() }),
        ElementJson::Point(v) => Ok(MonoidElement::Point(vector_from_json(v))),
    }
}

pub fn aset_to_json(x: &ASet) -> Result<ASetJson, JsonError> {
    Ok(ASetJson {
        acting: monoid_to_json(x.acting())?,
        ambient: monoid_to_json(x.ambient())?,
        gens: vectors_to_json(x.gens())?,
        kill: vectors_to_json(x.kill().gens())?,
    })
}

pub fn aset_from_json(j: &ASetJson) -> Result<ASet, JsonError> {
    let acting = monoid_from_json(&j.acting)?;
    let ambient = monoid_from_json(&j.ambient)?;
    let kill = MonoidIdeal::new(&ambient, vectors_from_json(&j.kill))?;
    Ok(ASet::new(acting, ambient, vectors_from_json(&j.gens), kill)?)
}

pub fn fan_to_json(f: &Fan) -> Result<FanJson, JsonError> {
    Ok(FanJson {
        dim: f.dim(),
        cones: f
            .cones()
            .iter()
            .map(|c| vectors_to_json(c.rays()))
            .collect::<Result<_, _>>()?,
    })
}

pub fn fan_from_json(j: &FanJson) -> Result<Fan, JsonError> {
    let cones = j
        .cones
        .iter()
        .map(|rays| Cone::new(j.dim, vectors_from_json(rays)))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(Fan::new(j.dim, cones)?)
}

pub fn scheme_to_json(x: &MonoidScheme) -> Result<SchemeJson, JsonError> {
    Ok(SchemeJson {
        charts: x.charts().iter().map(monoid_to_json).collect::<Result<_, _>>()?,
        gluings: x
            .gluings()
            .iter()
            .map(|g| {
                Ok(GluingJson {
                    i: g.i,
                    j: g.j,
                    a_i: vector_to_json(&g.a_i)?,
                    a_j: vector_to_json(&g.a_j)?,
                    map: g.map.as_ref().map(|m| vectors_to_json(m)).transpose()?,
                })
            })
            .collect::<Result<_, JsonError>>()?,
        fan: x.fan().map(fan_to_json).transpose()?,
    })
}

pub fn scheme_from_json(j: &SchemeJson) -> Result<MonoidScheme, JsonError> {
    let charts = j.charts.iter().map(monoid_from_json).collect::<Result<Vec<_>, _>>()?;
    let gluings = j
        .gluings
        .iter()
        .map(|g| Gluing {
            i: g.i,
            j: g.j,
            a_i: vector_from_json(&g.a_i),
            a_j: vector_from_json(&g.a_j),
            map: g.map.as_ref().map(|m| vectors_from_json(m)),
        })
        .collect();
    let fan = j.fan.as_ref().map(fan_from_json).transpose()?;
    Ok(MonoidScheme::new(charts, gluings, fan)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scheme::fan_to_scheme;

    fn v(coords: &[i64]) -> LatticeVector {
        LatticeVector::from_i64(coords)
    }

    fn reparse<T: Serialize + for<'a> Deserialize<'a>>(x: &T) -> T {
        serde_json::from_str(&serde_json::to_string(x).unwrap()).unwrap()
    }

    #[test]
    fn monoids_round_trip_through_text() {
        let samples = [
            PointedMonoid::new(1, vec![v(&[2]), v(&[3])], vec![], vec![]).unwrap(),
            PointedMonoid::new(2, vec![v(&[1, 0]), v(&[1, 2])], vec![v(&[0, 1])], vec![])
                .unwrap(),
            PointedMonoid::new(1, vec![v(&[1])], vec![], vec![v(&[4])]).unwrap(),
        ];
        for a in samples {
            let j = reparse(&monoid_to_json(&a).unwrap());
            assert_eq!(monoid_from_json(&j).unwrap(), a);
        }
    }

    #[test]
    fn missing_optional_fields_parse_as_empty() {
        let j: MonoidJson = serde_json::from_str(r#"{"dim":1,"gens":[[1]]}"#).unwrap();
        assert!(j.units.is_empty() && j.collapse.is_empty());
        let a = monoid_from_json(&j).unwrap();
        assert_eq!(a.gens(), &[v(&[1])]);
    }

    #[test]
    fn elements_accept_the_zero_literal() {
        let zero: ElementJson = serde_json::from_str("\"zero\"").unwrap();
        assert_eq!(element_from_json(&zero).unwrap(), MonoidElement::Zero);
        let pt: ElementJson = serde_json::from_str("[1,-2]").unwrap();
        assert_eq!(element_from_json(&pt).unwrap(), MonoidElement::Point(v(&[1, -2])));
        let bad: ElementJson = serde_json::from_str("\"one\"").unwrap();
        assert!(matches!(
            element_from_json(&bad),
            Err(JsonError::BadElementLiteral { .. })
        ));
        assert_eq!(serde_json::to_string(&element_to_json(&MonoidElement::Zero).unwrap()).unwrap(), "\"zero\"");
    }

    #[test]
    fn sets_round_trip_with_their_kill_ideal() {
        let line = PointedMonoid::new(1, vec![v(&[1])], vec![], vec![]).unwrap();
        let kill = MonoidIdeal::new(&line, vec![v(&[5])]).unwrap();
        let x = ASet::new(line.clone(), line, vec![v(&[0]), v(&[2])], kill).unwrap();
        let j = reparse(&aset_to_json(&x).unwrap());
        let y = aset_from_json(&j).unwrap();
        assert_eq!(y.gens(), x.gens());
        assert_eq!(y.kill().gens(), x.kill().gens());
        assert_eq!(y.acting(), x.acting());
        assert_eq!(y.ambient(), x.ambient());
    }

    #[test]
    fn fans_and_schemes_round_trip() {
        let fan = Fan::new(
            2,
            vec![
                Cone::new(2, vec![v(&[1, 0]), v(&[0, 1])]).unwrap(),
                Cone::new(2, vec![v(&[0, 1]), v(&[-1, 0])]).unwrap(),
            ],
        )
        .unwrap();
        let jf = reparse(&fan_to_json(&fan).unwrap());
        let fan2 = fan_from_json(&jf).unwrap();
        assert_eq!(fan2.cones().len(), fan.cones().len());

        let x = fan_to_scheme(&fan).unwrap();
        let js = reparse(&scheme_to_json(&x).unwrap());
        let y = scheme_from_json(&js).unwrap();
        assert_eq!(y.charts(), x.charts());
        assert_eq!(y.gluings().len(), x.gluings().len());
        assert_eq!(scheme_to_json(&y).unwrap(), scheme_to_json(&x).unwrap());
    }

    #[test]
    fn oversized_coordinates_are_rejected_not_truncated() {
        let big = BigInt::from(i64::MAX) + BigInt::from(1);
        let w = LatticeVector::new(vec![big.clone()]);
        assert!(matches!(
            vector_to_json(&w),
            Err(JsonError::Overflow { value }) if value == big
        ));
    }
}
