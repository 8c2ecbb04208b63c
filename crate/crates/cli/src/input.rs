//! Input plumbing: every positional object argument accepts a file path,
//! `-` for stdin, or inline JSON (anything starting with a JSON opener).
//! Report envelopes produced by this binary are peeled transparently, so
//! subcommands compose through pipes without extraction steps.

use std::fs;
use std::io::Read;

use serde_json::Value;

use mspec_core::json::{
    aset_from_json, fan_from_json, monoid_from_json, scheme_from_json, ASetJson, ElementJson,
    FanJson, MonoidJson, SchemeJson,
};
use mspec_core::lattice::LatticeVector;
use mspec_core::monoid::MonoidElement;
use mspec_core::scheme::{Fan, MonoidScheme};
use mspec_core::{ASet, PointedMonoid};

use crate::Failure;

pub fn bad_input(msg: impl std::fmt::Display) -> Failure {
    Failure { code: 2, msg: msg.to_string() }
}

fn looks_inline(spec: &str) -> bool {
    matches!(spec.trim_start().chars().next(), Some('{' | '[' | '"'))
}

fn read_text(spec: &str) -> Result<String, Failure> {
    if spec == "-" {
        let mut buf = String::new();
        std::io::stdin()
            .read_to_string(&mut buf)
            .map_err(|e| bad_input(format!("reading stdin: {e}")))?;
        Ok(buf)
    } else if looks_inline(spec) {
        Ok(spec.to_string())
    } else {
        fs::read_to_string(spec).map_err(|e| bad_input(format!("reading {spec}: {e}")))
    }
}

/// A parsed input with envelopes unwrapped down to the payload object.
pub fn read_value(spec: &str) -> Result<Value, Failure> {
    let text = read_text(spec)?;
    let mut v: Value =
        serde_json::from_str(&text).map_err(|e| bad_input(format!("malformed json: {e}")))?;
    while let Value::Object(m) = &v {
        if m.contains_key("invocation") && m.contains_key("report") {
            v = m["report"].clone();
        } else {
            break;
        }
    }
    Ok(v)
}

/// The object kinds the front end can tell apart by their fields.
pub enum Payload {
    Monoid(PointedMonoid),
    Set(ASet),
    Fan(Fan),
    Scheme(MonoidScheme),
}

pub fn classify(v: &Value) -> Result<Payload, Failure> {
    let Value::Object(m) = v else {
        return Err(bad_input("expected a JSON object"));
    };
    if m.contains_key("charts") {
        let j: SchemeJson = serde_json::from_value(v.clone()).map_err(bad_input)?;
        Ok(Payload::Scheme(scheme_from_json(&j).map_err(bad_input)?))
    } else if m.contains_key("acting") {
        let j: ASetJson = serde_json::from_value(v.clone()).map_err(bad_input)?;
        Ok(Payload::Set(aset_from_json(&j).map_err(bad_input)?))
    } else if m.contains_key("cones") {
        let j: FanJson = serde_json::from_value(v.clone()).map_err(bad_input)?;
        Ok(Payload::Fan(fan_from_json(&j).map_err(bad_input)?))
    } else if m.contains_key("gens") && m.contains_key("dim") {
        let j: MonoidJson = serde_json::from_value(v.clone()).map_err(bad_input)?;
        Ok(Payload::Monoid(monoid_from_json(&j).map_err(bad_input)?))
    } else {
        Err(bad_input(
            "unrecognized object: expected monoid, set, fan, or scheme fields",
        ))
    }
}

pub fn read_monoid(spec: &str) -> Result<PointedMonoid, Failure> {
    match classify(&read_value(spec)?)? {
        Payload::Monoid(a) => Ok(a),
        _ => Err(bad_input("this subcommand takes a monoid")),
    }
}

pub fn read_fan(spec: &str) -> Result<Fan, Failure> {
    match classify(&read_value(spec)?)? {
        Payload::Fan(f) => Ok(f),
        _ => Err(bad_input("this subcommand takes a fan")),
    }
}

pub fn read_scheme(spec: &str) -> Result<MonoidScheme, Failure> {
    match classify(&read_value(spec)?)? {
        Payload::Scheme(x) => Ok(x),
        _ => Err(bad_input("this subcommand takes a scheme")),
    }
}

/// `"zero"`, a coordinate array, or a path/stdin holding either.
pub fn read_element(spec: &str) -> Result<MonoidElement, Failure> {
    if spec == "zero" {
        return Ok(MonoidElement::Zero);
    }
    let text = read_text(spec)?;
    let j: ElementJson = serde_json::from_str(text.trim())
        .map_err(|e| bad_input(format!("malformed element: {e}")))?;
    mspec_core::json::element_from_json(&j).map_err(bad_input)
}

/// A JSON array of coordinate arrays (inline or from a file).
pub fn read_vectors(spec: &str) -> Result<Vec<LatticeVector>, Failure> {
    let text = read_text(spec)?;
    let rows: Vec<Vec<i64>> = serde_json::from_str(text.trim())
        .map_err(|e| bad_input(format!("malformed vector list: {e}")))?;
    Ok(rows.iter().map(|r| LatticeVector::from_i64(r)).collect())
}

/// A JSON array with one generator list per chart.
pub fn read_center(spec: &str) -> Result<Vec<Vec<LatticeVector>>, Failure> {
    let text = read_text(spec)?;
    let rows: Vec<Vec<Vec<i64>>> = serde_json::from_str(text.trim())
        .map_err(|e| bad_input(format!("malformed center: {e}")))?;
    Ok(rows
        .iter()
        .map(|chart| chart.iter().map(|r| LatticeVector::from_i64(r)).collect())
        .collect())
}
