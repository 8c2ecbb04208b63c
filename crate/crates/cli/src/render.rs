//! Report rendering: core verdicts to JSON values.  Witnesses are carried
//! verbatim so a verdict can be re-verified from its report alone.

use num_traits::ToPrimitive;
use serde_json::{json, Value};

use mspec_core::cyclic::HomologyDegree;
use mspec_core::lattice::LatticeVector;
use mspec_core::monoid::{Cancellativity, Reducedness, Smoothness};
use mspec_core::realize::Crosscheck;
use mspec_core::scheme::{Fan, ResolutionTrace};
use mspec_core::{Flatness, FlatnessReport, Freeness, FreenessWitness, PointedMonoid};

pub fn vector_value(v: &LatticeVector) -> Value {
    Value::Array(
        v.coords()
            .iter()
            .map(|c| match c.to_i64() {
                Some(n) => json!(n),
                None => json!(c.to_string()),
            })
            .collect(),
    )
}

pub fn vectors_value(vs: &[LatticeVector]) -> Value {
    Value::Array(vs.iter().map(vector_value).collect())
}

pub fn monoid_value(a: &PointedMonoid) -> Value {
    let mut m = serde_json::Map::new();
    m.insert("dim".into(), json!(a.dim()));
    m.insert("gens".into(), vectors_value(a.gens()));
    if !a.units().is_empty() {
        m.insert("units".into(), vectors_value(a.units()));
    }
    if !a.collapse().is_empty() {
        m.insert("collapse".into(), vectors_value(a.collapse()));
    }
    Value::Object(m)
}

pub fn witness_value(w: &FreenessWitness) -> Value {
    match w {
        FreenessWitness::Collision { a, b, a2, b2 } => json!({
            "kind": "collision",
            "a": vector_value(a), "b": vector_value(b),
            "a2": vector_value(a2), "b2": vector_value(b2),
        }),
        FreenessWitness::Annihilation { a, b } => json!({
            "kind": "annihilation",
            "a": vector_value(a), "b": vector_value(b),
        }),
    }
}

pub fn freeness_value(f: &Freeness) -> Value {
    match f {
        Freeness::Free { basis } => json!({
            "verdict": "free",
            "basis": vectors_value(basis),
        }),
        Freeness::NotFree { witness } => json!({
            "verdict": "not_free",
            "witness": witness_value(witness),
        }),
        Freeness::Inconclusive { bound } => json!({
            "verdict": "inconclusive",
            "bound": bound,
        }),
    }
}

pub fn flatness_value(r: &FlatnessReport) -> Value {
    let aggregate = match &r.aggregate {
        Flatness::Flat => json!({"verdict": "flat"}),
        Flatness::NotFlat { n, witness } => json!({
            "verdict": "not_flat",
            "n": n,
            "witness": witness_value(witness),
        }),
        Flatness::Inconclusive { n } => json!({"verdict": "inconclusive", "n": n}),
    };
    json!({
        "aggregate": aggregate,
        "per_degree": r.per_degree.iter().map(|(n, f)| json!({
            "n": n,
            "freeness": freeness_value(f),
        })).collect::<Vec<_>>(),
        "base_smoothness": smoothness_value(&r.base_smoothness),
    })
}

pub fn smoothness_value(s: &Smoothness) -> Value {
    match s {
        Smoothness::Smooth => json!({"verdict": "smooth"}),
        Smoothness::NotCancellative { x, y } => json!({
            "verdict": "not_smooth",
            "reason": "not_cancellative",
            "x": vector_value(x), "y": vector_value(y),
        }),
        Smoothness::AtomRelation { atoms, coeffs } => json!({
            "verdict": "not_smooth",
            "reason": "atom_relation",
            "atoms": vectors_value(atoms),
            "coeffs": coeffs.iter().map(|c| match c.to_i64() {
                Some(n) => json!(n),
                None => json!(c.to_string()),
            }).collect::<Vec<_>>(),
        }),
        Smoothness::Unknown { nodes } => json!({"verdict": "unknown", "nodes": nodes}),
    }
}

pub fn cancellativity_value(c: &Cancellativity) -> Value {
    match c {
        Cancellativity::Cancellative => json!({"verdict": "cancellative"}),
        Cancellativity::NotCancellative { x, y } => json!({
            "verdict": "not_cancellative",
            "x": vector_value(x), "y": vector_value(y),
        }),
        Cancellativity::Unknown { nodes } => json!({"verdict": "unknown", "nodes": nodes}),
    }
}

pub fn reducedness_value(r: &Reducedness) -> Value {
    match r {
        Reducedness::Reduced => json!({"verdict": "reduced"}),
        Reducedness::NotReduced { nilpotent } => json!({
            "verdict": "not_reduced",
            "nilpotent": vector_value(nilpotent),
        }),
        Reducedness::Unknown { nodes } => json!({"verdict": "unknown", "nodes": nodes}),
    }
}

pub fn crosscheck_value(c: &Crosscheck) -> Value {
    match c {
        Crosscheck::Consistent => json!("consistent"),
        Crosscheck::Inconsistent { degree } => json!({"inconsistent_at_degree": degree}),
        Crosscheck::NotApplicable => json!("not_applicable"),
    }
}

pub fn fan_value(f: &Fan) -> Value {
    json!({
        "dim": f.dim(),
        "cones": f.cones().iter().map(|c| vectors_value(c.rays())).collect::<Vec<_>>(),
    })
}

pub fn trace_value(t: &ResolutionTrace) -> Value {
    let mut m = serde_json::Map::new();
    m.insert(
        "steps".into(),
        Value::Array(
            t.steps
                .iter()
                .map(|s| {
                    json!({
                        "cone": vectors_value(&s.cone),
                        "center": vector_value(&s.center),
                        "center_smooth": s.center_smooth,
                        "normally_flat": s.normally_flat,
                    })
                })
                .collect(),
        ),
    );
    m.insert("fans".into(), Value::Array(t.fans.iter().map(fan_value).collect()));
    m.insert("resolved".into(), json!(t.is_resolved()));
    if let Some(f) = &t.failure {
        m.insert(
            "failure".into(),
            json!({"step": f.step, "reason": f.reason}),
        );
    }
    Value::Object(m)
}

pub fn homology_value(rows: &[HomologyDegree]) -> Value {
    Value::Array(
        rows.iter()
            .map(|h| {
                json!({
                    "degree": h.degree,
                    "rank": h.rank,
                    "torsion": h.torsion.iter().map(|t| match t.to_i64() {
                        Some(n) => json!(n),
                        None => json!(t.to_string()),
                    }).collect::<Vec<_>>(),
                })
            })
            .collect(),
    )
}

pub fn homology_csv(rows: &[HomologyDegree]) -> String {
    let mut out = String::from("degree,rank,torsion\n");
    for h in rows {
        let torsion =
            h.torsion.iter().map(|t| t.to_string()).collect::<Vec<_>>().join(";");
        out.push_str(&format!("{},{},{}\n", h.degree, h.rank, torsion));
    }
    out
}
