//! `mspec` — batch analyses of pointed monoids, monomial sets, fans, and
//! monoid schemes, with JSON in and JSON out.
//!
//! Contract: the invocation is echoed in every output header; the bounds in
//! force are embedded in every report; identical invocations produce
//! byte-identical output when `--no-timestamp` is passed.  Exit codes:
//! 0 for any completed analysis (a negative verdict is still a result),
//! 2 for malformed input or flags, 3 for a certification failure (the
//! partial trace is still printed), 4 for an exhausted budget.

mod input;
mod render;

use std::process::ExitCode;
use std::time::{SystemTime, UNIX_EPOCH};

use clap::{Parser, Subcommand};
use serde::Serialize;
use serde_json::{json, Value};

use mspec_core::corpus::aset_corpus;
use mspec_core::cyclic::{
    cyclic_nerve, dilated_cyclic_nerve, dilation_colimit_probe, nerve_homology, Coefficients,
    CyclicError, DilationSequence, ProbeOptions,
};
use mspec_core::dilation::{dilate_aset, dilate_monoid};
use mspec_core::json::{aset_to_json, monoid_to_json, scheme_to_json};
use mspec_core::monoid::{MonoidIdeal, Reducedness};
use mspec_core::realize::{algebra_presentation, cas_script, nf_crosscheck, RealizeError};
use mspec_core::scheme::{
    blowup, dilate_scheme, fan_to_scheme, resolve, EquivariantCenter, ResolveOptions,
    SchemeError,
};
use mspec_core::{ASet, Freeness};

use input::{bad_input, classify, read_center, read_element, read_fan, read_monoid,
    read_scheme, read_value, read_vectors, Payload};
use render::*;

pub struct Failure {
    pub code: u8,
    pub msg: String,
}

fn budget(msg: impl std::fmt::Display) -> Failure {
    Failure { code: 4, msg: msg.to_string() }
}

#[derive(Parser)]
#[command(name = "mspec", version, about = "Monoid scheme analyses with JSON output")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
    /// Omit the timestamp so identical invocations are byte-identical.
    #[arg(long, global = true)]
    no_timestamp: bool,
}

#[derive(Subcommand)]
enum Cmd {
    /// Predicates, atoms, units, and the seminormalization delta of a monoid.
    Analyze {
        /// Monoid: file path, `-` for stdin, or inline JSON.
        input: String,
    },
    /// Normal flatness of a monoid along a monomial ideal.
    Nf {
        /// Monoid: file path, `-` for stdin, or inline JSON.
        input: String,
        /// Ideal generators as a JSON array of coordinate arrays.
        ideal: String,
        /// Highest conormal degree to certify.
        #[arg(long, default_value_t = 3)]
        n_max: u32,
        /// Degree cap for the counting fallback (exact scans ignore it).
        #[arg(long)]
        bound: Option<usize>,
    },
    /// Resolve a fan by certified star subdivisions.
    Resolve {
        /// Fan: file path, `-` for stdin, or inline JSON.
        input: String,
        /// Subdivision budget.
        #[arg(long, default_value_t = 64)]
        max_steps: usize,
        /// Normal-flatness certification depth per step.
        #[arg(long, default_value_t = 3)]
        n_max: u32,
        /// Emit the trace as a DOT digraph instead of JSON.
        #[arg(long)]
        dot: bool,
    },
    /// Blow up a scheme along an equivariant center.
    Blowup {
        /// Scheme: file path, `-` for stdin, or inline JSON.
        input: String,
        /// One generator list per chart (JSON array of arrays of arrays).
        center: String,
        /// Skip the center smoothness gate.
        #[arg(long)]
        allow_singular: bool,
    },
    /// Level counts and homology of one component of the cyclic nerve.
    Nerve {
        /// Monoid: file path, `-` for stdin, or inline JSON.
        input: String,
        /// Grading element: coordinate array or the literal `zero`.
        element: String,
        /// Truncation level (simplices are computed for levels 0..=top).
        #[arg(long, default_value_t = 4)]
        top_level: usize,
        /// `q` for rational coefficients, or a prime p.
        #[arg(long, default_value = "q")]
        coeff: String,
        /// Enumerate the localization-style nerve with a unit window.
        #[arg(long)]
        dilated: bool,
        /// Exponent window for unit directions of the dilated nerve.
        #[arg(long)]
        window: Option<u32>,
        /// `json` or `csv` (Betti rows).
        #[arg(long, default_value = "json")]
        format: String,
    },
    /// Dilation towers; with a grading element, the colimit probe.
    Dilate {
        /// Monoid, set, or scheme: file path, `-` for stdin, or inline JSON.
        input: String,
        /// Grading element (probe mode, monoid input only).
        element: Option<String>,
        /// Dilation sequence, comma separated, factors >= 2.
        #[arg(long, value_delimiter = ',', required = true)]
        seq: Vec<u32>,
        /// Tower stages to compute.
        #[arg(long, default_value_t = 2)]
        steps: usize,
        /// Truncation level for probe mode.
        #[arg(long, default_value_t = 2)]
        top_level: usize,
        /// Exponent window for unit directions in probe mode.
        #[arg(long)]
        window: Option<u32>,
    },
    /// Re-emit an object in a chosen format.
    Export {
        /// Object: file path, `-` for stdin, or inline JSON.
        input: String,
        /// `json`, `presentation`, or `cas`.
        #[arg(long, default_value = "json")]
        format: String,
    },
    /// Seeded corpus of random monomial sets for differential testing.
    Corpus {
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 200)]
        count: usize,
    },
}

#[derive(Serialize)]
struct Envelope {
    invocation: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    timestamp: Option<u64>,
    bounds: Value,
    report: Value,
}

fn invocation_args() -> Vec<String> {
    let mut args: Vec<String> = std::env::args().collect();
    if let Some(first) = args.first_mut() {
        *first = "mspec".to_string();
    }
    args
}

fn emit(no_timestamp: bool, bounds: Value, report: Value) {
    let envelope = Envelope {
        invocation: invocation_args(),
        timestamp: if no_timestamp {
            None
        } else {
            Some(
                SystemTime::now()
                    .duration_since(UNIX_EPOCH)
                    .map(|d| d.as_secs())
                    .unwrap_or(0),
            )
        },
        bounds,
        report,
    };
    println!("{}", serde_json::to_string_pretty(&envelope).expect("reports serialize"));
}

/// Text formats carry the same header as comment lines.
fn emit_text(no_timestamp: bool, comment: &str, body: &str) {
    println!("{} invocation: {}", comment, invocation_args().join(" "));
    if !no_timestamp {
        let now = SystemTime::now()
            .duration_since(UNIX_EPOCH)
            .map(|d| d.as_secs())
            .unwrap_or(0);
        println!("{} timestamp: {}", comment, now);
    }
    print!("{body}");
    if !body.ends_with('\n') {
        println!();
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(code) => ExitCode::from(code),
        Err(f) => {
            eprintln!("error: {}", f.msg);
            ExitCode::from(f.code)
        }
    }
}

fn run(cli: &Cli) -> Result<u8, Failure> {
    let no_ts = cli.no_timestamp;
    match &cli.cmd {
        Cmd::Analyze { input } => cmd_analyze(no_ts, input),
        Cmd::Nf { input, ideal, n_max, bound } => cmd_nf(no_ts, input, ideal, *n_max, *bound),
        Cmd::Resolve { input, max_steps, n_max, dot } => {
            cmd_resolve(no_ts, input, *max_steps, *n_max, *dot)
        }
        Cmd::Blowup { input, center, allow_singular } => {
            cmd_blowup(no_ts, input, center, *allow_singular)
        }
        Cmd::Nerve { input, element, top_level, coeff, dilated, window, format } => {
            cmd_nerve(no_ts, input, element, *top_level, coeff, *dilated, *window, format)
        }
        Cmd::Dilate { input, element, seq, steps, top_level, window } => {
            cmd_dilate(no_ts, input, element.as_deref(), seq, *steps, *top_level, *window)
        }
        Cmd::Export { input, format } => cmd_export(no_ts, input, format),
        Cmd::Corpus { seed, count } => cmd_corpus(no_ts, *seed, *count),
    }
}

fn cmd_analyze(no_ts: bool, input: &str) -> Result<u8, Failure> {
    let a = read_monoid(input)?;
    let reduced = a.is_reduced();
    let seminormalization = if matches!(reduced, Reducedness::Reduced) {
        match a.seminormalize() {
            Ok(sn) => {
                let delta: Vec<_> =
                    sn.gens().iter().filter(|g| !a.contains_vector(g)).cloned().collect();
                json!({
                    "defined": true,
                    "gens": vectors_value(sn.gens()),
                    "delta": vectors_value(&delta),
                })
            }
            Err(e) => json!({"defined": false, "reason": e.to_string()}),
        }
    } else {
        json!({"defined": false, "reason": "the monoid is not reduced"})
    };
    let report = json!({
        "dim": a.dim(),
        "gens": vectors_value(a.gens()),
        "units": vectors_value(a.units()),
        "collapse": vectors_value(a.collapse()),
        "atoms": vectors_value(&a.atoms()),
        "cancellative": cancellativity_value(&a.is_cancellative()),
        "reduced": reducedness_value(&reduced),
        "smooth": smoothness_value(&a.is_smooth()),
        "seminormalization": seminormalization,
    });
    emit(no_ts, json!({}), report);
    Ok(0)
}

fn cmd_nf(
    no_ts: bool,
    input: &str,
    ideal: &str,
    n_max: u32,
    bound: Option<usize>,
) -> Result<u8, Failure> {
    let a = read_monoid(input)?;
    let gens = read_vectors(ideal)?;
    let ideal = MonoidIdeal::new(&a, gens).map_err(bad_input)?;
    let report = ASet::is_normally_flat(&a, &ideal, n_max, bound, cfg!(feature = "parallel"))
        .map_err(bad_input)?;
    // Free verdicts are replayed against an independent census.
    let crosscheck_depth = 8usize;
    let mut checks = Vec::new();
    for (n, verdict) in &report.per_degree {
        if matches!(verdict, Freeness::Free { .. }) {
            let c = nf_crosscheck(&a, &ideal, *n, crosscheck_depth).map_err(bad_input)?;
            checks.push(json!({"n": n, "crosscheck": crosscheck_value(&c)}));
        }
    }
    emit(
        no_ts,
        json!({"n_max": n_max, "bound": bound, "crosscheck_depth": crosscheck_depth}),
        json!({
            "ideal": vectors_value(ideal.gens()),
            "flatness": flatness_value(&report),
            "crosschecks": checks,
        }),
    );
    Ok(0)
}

fn cmd_resolve(
    no_ts: bool,
    input: &str,
    max_steps: usize,
    n_max: u32,
    dot: bool,
) -> Result<u8, Failure> {
    let fan = read_fan(input)?;
    let x = fan_to_scheme(&fan).map_err(bad_input)?;
    let opts = ResolveOptions {
        max_steps,
        n_max,
        bound: None,
        parallel: cfg!(feature = "parallel"),
    };
    let trace = match resolve(&x, &opts) {
        Ok(t) => t,
        Err(SchemeError::BudgetExceeded { max_steps }) => {
            return Err(budget(format!("resolution budget of {max_steps} steps exhausted")))
        }
        Err(e) => return Err(bad_input(e)),
    };
    let code = if trace.failure.is_some() { 3 } else { 0 };
    if dot {
        emit_text(no_ts, "//", &trace.dot());
    } else {
        emit(
            no_ts,
            json!({"max_steps": max_steps, "n_max": n_max}),
            trace_value(&trace),
        );
    }
    Ok(code)
}

fn cmd_blowup(
    no_ts: bool,
    input: &str,
    center: &str,
    allow_singular: bool,
) -> Result<u8, Failure> {
    let x = read_scheme(input)?;
    let gens = read_center(center)?;
    if gens.len() != x.charts().len() {
        return Err(bad_input(format!(
            "center lists {} charts, scheme has {}",
            gens.len(),
            x.charts().len()
        )));
    }
    let ideals = x
        .charts()
        .iter()
        .zip(gens)
        .map(|(chart, g)| MonoidIdeal::new(chart, g))
        .collect::<Result<Vec<_>, _>>()
        .map_err(bad_input)?;
    let z = EquivariantCenter::new(&x, ideals).map_err(bad_input)?;
    let y = blowup(&x, &z, allow_singular).map_err(bad_input)?;
    let mut report = serde_json::to_value(scheme_to_json(&y).map_err(bad_input)?)
        .map_err(bad_input)?;
    if let Value::Object(m) = &mut report {
        m.insert(
            "summary".into(),
            json!({
                "charts_before": x.charts().len(),
                "charts_after": y.charts().len(),
            }),
        );
    }
    emit(no_ts, json!({}), report);
    Ok(0)
}

fn parse_coefficients(spec: &str) -> Result<Coefficients, Failure> {
    if spec == "q" || spec == "Q" {
        return Ok(Coefficients::Rationals);
    }
    let p: u32 = spec
        .parse()
        .map_err(|_| bad_input(format!("coefficients must be `q` or a prime, got {spec:?}")))?;
    Ok(Coefficients::ModP(p))
}

fn cyclic_failure(e: CyclicError) -> Failure {
    match e {
        CyclicError::SearchCapped { .. } => budget(e),
        _ => bad_input(e),
    }
}

#[allow(clippy::too_many_arguments)]
fn cmd_nerve(
    no_ts: bool,
    input: &str,
    element: &str,
    top_level: usize,
    coeff: &str,
    dilated: bool,
    window: Option<u32>,
    format: &str,
) -> Result<u8, Failure> {
    let a = read_monoid(input)?;
    let el = read_element(element)?;
    let coefficients = parse_coefficients(coeff)?;
    let t = if dilated {
        dilated_cyclic_nerve(&a, &el, top_level, window).map_err(cyclic_failure)?
    } else {
        cyclic_nerve(&a, &el, top_level).map_err(cyclic_failure)?
    };
    t.verify().map_err(|detail| Failure {
        code: 3,
        msg: format!("operator identities failed on the constructed nerve: {detail}"),
    })?;
    let max_degree = top_level.saturating_sub(1);
    let homology = nerve_homology(&t, &coefficients, max_degree).map_err(cyclic_failure)?;
    let bounds = json!({
        "top_level": top_level,
        "window": t.window(),
        "max_degree": max_degree,
    });
    match format {
        "json" => {
            let counts: Vec<usize> = t.levels().iter().map(|l| l.len()).collect();
            emit(
                no_ts,
                bounds,
                json!({
                    "level_counts": counts,
                    "coefficients": coeff,
                    "homology": homology_value(&homology),
                }),
            );
        }
        "csv" => emit_text(no_ts, "#", &homology_csv(&homology)),
        other => return Err(bad_input(format!("unknown format {other:?}"))),
    }
    Ok(0)
}

fn cmd_dilate(
    no_ts: bool,
    input: &str,
    element: Option<&str>,
    seq: &[u32],
    steps: usize,
    top_level: usize,
    window: Option<u32>,
) -> Result<u8, Failure> {
    let sequence = DilationSequence::new(seq.to_vec()).map_err(bad_input)?;
    let payload = classify(&read_value(input)?)?;
    let bounds = json!({
        "seq": seq,
        "steps": steps,
        "top_level": top_level,
        "window": window,
    });
    match payload {
        Payload::Monoid(a) => {
            if let Some(espec) = element {
                let el = read_element(espec)?;
                let degrees: Vec<usize> = (0..top_level).collect();
                let opts = ProbeOptions {
                    top: top_level,
                    window,
                    steps,
                    parallel: cfg!(feature = "parallel"),
                };
                let probe = dilation_colimit_probe(&a, &el, &sequence, &degrees, &opts)
                    .map_err(cyclic_failure)?;
                emit(
                    no_ts,
                    bounds,
                    json!({
                        "degrees": probe.degrees,
                        "nerve_ranks": probe.nerve_ranks,
                        "omega_ranks": probe.omega_ranks,
                        "nerve_image": probe.nerve_image,
                        "omega_image": probe.omega_image,
                        "stabilized": probe.stabilized,
                        "agree": probe.agree,
                        "caveats": probe.caveats,
                    }),
                );
            } else {
                let mut tower = Vec::new();
                let mut cur = a;
                for i in 0..steps {
                    cur = dilate_monoid(&cur, sequence.factor(i)).map_err(bad_input)?;
                    tower.push(monoid_value(&cur));
                }
                emit(no_ts, bounds, json!({"tower": tower}));
            }
        }
        Payload::Set(x) => {
            let mut tower = Vec::new();
            let mut cur = x;
            for i in 0..steps {
                cur = dilate_aset(&cur, sequence.factor(i)).map_err(bad_input)?;
                tower.push(json!({
                    "gens": vectors_value(cur.gens()),
                    "freeness": freeness_value(&cur.is_free(None)),
                }));
            }
            emit(no_ts, bounds, json!({"tower": tower}));
        }
        Payload::Scheme(x) => {
            let mut stages = Vec::new();
            let mut cur = x;
            for i in 0..steps {
                cur = dilate_scheme(&cur, sequence.factor(i)).map_err(bad_input)?;
                stages.push(json!({
                    "charts": cur.charts().len(),
                    "gluing_loci_stable": true,
                }));
            }
            emit(no_ts, bounds, json!({"tower": stages}));
        }
        Payload::Fan(_) => {
            return Err(bad_input(
                "fans carry only cone data, which dilation fixes; dilate the scheme instead",
            ))
        }
    }
    Ok(0)
}

fn realize_failure(e: RealizeError) -> Failure {
    match e {
        RealizeError::SearchCapped { .. } => budget(e),
        _ => bad_input(e),
    }
}

fn cmd_export(no_ts: bool, input: &str, format: &str) -> Result<u8, Failure> {
    let payload = classify(&read_value(input)?)?;
    match (format, payload) {
        ("json", Payload::Monoid(a)) => {
            let j = serde_json::to_value(monoid_to_json(&a).map_err(bad_input)?)
                .map_err(bad_input)?;
            emit(no_ts, json!({}), j);
        }
        ("json", Payload::Set(x)) => {
            let j = serde_json::to_value(aset_to_json(&x).map_err(bad_input)?)
                .map_err(bad_input)?;
            emit(no_ts, json!({}), j);
        }
        ("json", Payload::Fan(f)) => emit(no_ts, json!({}), fan_value(&f)),
        ("json", Payload::Scheme(x)) => {
            let j = serde_json::to_value(scheme_to_json(&x).map_err(bad_input)?)
                .map_err(bad_input)?;
            emit(no_ts, json!({}), j);
        }
        ("presentation", Payload::Monoid(a)) => {
            let p = algebra_presentation(&a).map_err(realize_failure)?;
            let vars: Vec<_> = p
                .vars
                .iter()
                .map(|v| {
                    json!({
                        "name": v.name,
                        "vector": vector_value(&v.vector),
                        "invertible": v.invertible,
                        "degree": v.degree.to_string(),
                    })
                })
                .collect();
            let side = |s: &[(usize, u32)]| {
                s.iter().map(|(i, e)| json!([i, e])).collect::<Vec<_>>()
            };
            emit(
                no_ts,
                json!({}),
                json!({
                    "vars": vars,
                    "binomials": p.binomials.iter().map(|b| json!({
                        "lhs": side(&b.lhs), "rhs": side(&b.rhs),
                    })).collect::<Vec<_>>(),
                    "monomials": p.monomials.iter().map(|m| json!({
                        "factors": side(&m.factors),
                        "vector": vector_value(&m.vector),
                    })).collect::<Vec<_>>(),
                }),
            );
        }
        ("cas", Payload::Monoid(a)) => {
            let p = algebra_presentation(&a).map_err(realize_failure)?;
            emit_text(no_ts, "--", &cas_script(&p));
        }
        ("presentation" | "cas", _) => {
            return Err(bad_input("presentation and cas formats take a monoid"))
        }
        (other, _) => return Err(bad_input(format!("unknown format {other:?}"))),
    }
    Ok(0)
}

fn cmd_corpus(no_ts: bool, seed: u64, count: usize) -> Result<u8, Failure> {
    let items = aset_corpus(seed, count)
        .iter()
        .map(|x| serde_json::to_value(aset_to_json(x).map_err(bad_input)?).map_err(bad_input))
        .collect::<Result<Vec<_>, _>>()?;
    emit(
        no_ts,
        json!({"seed": seed, "count": count}),
        json!({"items": items}),
    );
    Ok(0)
}
