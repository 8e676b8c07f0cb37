//! JSON documents exchanged by the command line tool.
//!
//! Every document is an object `{"kind": ..., "payload": ..., "metadata": {...}}`.
//! Rationals are strings `"p/q"` in lowest terms (`"p"` for integers); on input a
//! JSON integer is accepted as well. Maps are emitted in key order, so emission is
//! byte-stable.

use std::collections::{BTreeMap, BTreeSet};

use serde_json::{json, Map, Value};

use crate::complexes::{AbstractComplex, GeometricRealization, Restriction};
use crate::error::Error;
use crate::sampling::{CechResult, IndexedCover, MetricSample};
use crate::weights::{
    format_rational, parse_rational, DerivedVector, ProbVector, Rational, SubsetKey, VertexLabel,
    WeightVector,
};

use super::suites::{Failure, Report, SuiteReport};

/// Input that could not be turned into a document.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum DocumentError {
    /// Syntactically malformed: bad JSON, wrong shape, unparsable number.
    Malformed(String),
    /// Well formed but violating a domain precondition.
    Domain(Error),
}

impl From<Error> for DocumentError {
    fn from(e: Error) -> Self {
        DocumentError::Domain(e)
    }
}

type Parsed<T> = std::result::Result<T, DocumentError>;

fn malformed<T>(msg: impl Into<String>) -> Parsed<T> {
    Err(DocumentError::Malformed(msg.into()))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Payload {
    ProbVector(ProbVector),
    WeightVector(WeightVector),
    WeightList(Vec<WeightVector>),
    DerivedVector(DerivedVector),
    Complex(AbstractComplex),
    Sample(MetricSample),
    Cover(IndexedCover),
    PointList(Vec<ProbVector>),
    Realization(GeometricRealization),
    Coordinates(Vec<Rational>),
    Restriction(Restriction),
    Pipeline(CechResult),
    Report(Report),
    Error { precondition: String, message: String },
}

impl Payload {
    pub fn kind(&self) -> &'static str {
        match self {
            Payload::ProbVector(_) => "prob_vector",
            Payload::WeightVector(_) => "weight_vector",
            Payload::WeightList(_) => "weight_list",
            Payload::DerivedVector(_) => "derived_vector",
            Payload::Complex(_) => "complex",
            Payload::Sample(_) => "sample",
            Payload::Cover(_) => "cover",
            Payload::PointList(_) => "point_list",
            Payload::Realization(_) => "realization",
            Payload::Coordinates(_) => "coordinates",
            Payload::Restriction(_) => "restriction",
            Payload::Pipeline(_) => "pipeline",
            Payload::Report(_) => "report",
            Payload::Error { .. } => "error",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Document {
    pub payload: Payload,
    pub metadata: BTreeMap<String, String>,
}

pub const TOOL: &str = concat!("pou ", env!("CARGO_PKG_VERSION"));

impl Document {
    /// Wraps a payload with the default metadata.
    pub fn new(payload: Payload) -> Self {
        let metadata = BTreeMap::from([("tool".to_string(), TOOL.to_string())]);
        Document { payload, metadata }
    }

    pub fn with(mut self, key: &str, value: impl Into<String>) -> Self {
        self.metadata.insert(key.to_string(), value.into());
        self
    }

    pub fn kind(&self) -> &'static str {
        self.payload.kind()
    }

    pub fn to_json(&self) -> Value {
        json!({
            "kind": self.kind(),
            "payload": payload_to_json(&self.payload),
            "metadata": self.metadata,
        })
    }

    /// Pretty-printed JSON with a trailing newline.
    pub fn emit(&self) -> String {
        let mut text = serde_json::to_string_pretty(&self.to_json()).expect("values serialize");
        text.push('\n');
        text
    }

    pub fn parse(text: &str) -> Parsed<Document> {
        let value: Value = match serde_json::from_str(text) {
            Ok(v) => v,
            Err(e) => return malformed(format!("invalid JSON: {e}")),
        };
        Document::from_json(&value)
    }

    /// Accepts an enveloped document, or a bare payload whose kind is
    /// recognisable from its shape.
    pub fn from_json(value: &Value) -> Parsed<Document> {
        if let Some(kind) = bare_kind(value) {
            let payload = payload_from_json(kind, value)?;
            return Ok(Document { payload, metadata: BTreeMap::new() });
        }
        let obj = as_object(value, "document")?;
        let kind = match obj.get("kind") {
            Some(Value::String(k)) => k.as_str(),
            _ => return malformed("document needs a string \"kind\""),
        };
        let payload = obj
            .get("payload")
            .ok_or_else(|| DocumentError::Malformed("document needs a \"payload\"".into()))?;
        let mut metadata = BTreeMap::new();
        if let Some(meta) = obj.get("metadata") {
            for (k, v) in as_object(meta, "metadata")? {
                match v {
                    Value::String(s) => {
                        metadata.insert(k.clone(), s.clone());
                    }
                    _ => return malformed(format!("metadata entry {k:?} must be a string")),
                }
            }
        }
        let payload = payload_from_json(kind, payload)?;
        Ok(Document { payload, metadata })
    }
}

fn bare_kind(value: &Value) -> Option<&'static str> {
    match value {
        Value::Array(items) if items.iter().all(|e| e.get("key").is_some()) => {
            Some("derived_vector")
        }
        Value::Object(obj) if obj.contains_key("kind") => None,
        Value::Object(obj) if obj.contains_key("facets") => Some("complex"),
        Value::Object(obj) if obj.contains_key("points") => Some("sample"),
        Value::Object(obj) if obj.contains_key("coordinates") => Some("realization"),
        Value::Object(obj) if obj.is_empty() => None,
        Value::Object(obj) if obj.values().all(|v| v.is_string() || v.is_i64() || v.is_u64()) => {
            Some("prob_vector")
        }
        Value::Object(obj) if obj.values().all(Value::is_array) => Some("cover"),
        _ => None,
    }
}

fn rational_json(r: &Rational) -> Value {
    Value::String(format_rational(r))
}

fn weights_json(w: &WeightVector) -> Value {
    Value::Object(
        w.iter()
            .map(|(l, v)| (l.to_string(), rational_json(v)))
            .collect(),
    )
}

fn key_json(k: &SubsetKey) -> Value {
    Value::Array(k.labels().iter().map(|l| json!(l.as_str())).collect())
}

fn derived_json(d: &DerivedVector) -> Value {
    Value::Array(
        d.iter()
            .map(|(k, w)| json!({"key": key_json(k), "weight": rational_json(w)}))
            .collect(),
    )
}

fn complex_json(k: &AbstractComplex) -> Value {
    json!({
        "vertices": k.vertices().iter().map(VertexLabel::as_str).collect::<Vec<_>>(),
        "facets": k.facets().iter().map(key_json).collect::<Vec<_>>(),
    })
}

fn cover_json(c: &IndexedCover) -> Value {
    Value::Object(
        c.sets()
            .iter()
            .map(|(label, members)| {
                let members: Vec<_> = members.iter().map(|m| json!(m.as_str())).collect();
                (label.to_string(), Value::Array(members))
            })
            .collect(),
    )
}

fn points_json(points: &[ProbVector]) -> Value {
    Value::Array(points.iter().map(|p| weights_json(p)).collect())
}

fn payload_to_json(payload: &Payload) -> Value {
    match payload {
        Payload::ProbVector(p) => weights_json(p),
        Payload::WeightVector(w) => weights_json(w),
        Payload::WeightList(ws) => Value::Array(ws.iter().map(weights_json).collect()),
        Payload::DerivedVector(d) => derived_json(d),
        Payload::Complex(k) => complex_json(k),
        Payload::Sample(s) => json!({
            "points": s.ids().iter().map(VertexLabel::as_str).collect::<Vec<_>>(),
            "distances": s.distances().iter()
                .map(|row| row.iter().map(rational_json).collect::<Vec<_>>())
                .collect::<Vec<_>>(),
        }),
        Payload::Cover(c) => cover_json(c),
        Payload::PointList(ps) => points_json(ps),
        Payload::Realization(g) => json!({
            "complex": complex_json(g.complex()),
            "coordinates": g.coordinates().iter()
                .map(|(l, c)| (l.to_string(), Value::Array(c.iter().map(rational_json).collect())))
                .collect::<Map<_, _>>(),
        }),
        Payload::Coordinates(c) => Value::Array(c.iter().map(rational_json).collect()),
        Payload::Restriction(r) => json!({
            "kept": r.kept,
            "points": points_json(&r.points),
        }),
        Payload::Pipeline(p) => json!({
            "cover": cover_json(&p.cover),
            "partition": points_json(&p.partition),
            "nerve": complex_json(&p.nerve),
        }),
        Payload::Report(r) => json!({
            "passed": r.passed(),
            "failed": r.failed(),
            "suites": r.suites.iter().map(|s| json!({
                "suite": s.suite,
                "seed": s.seed,
                "cases": s.cases,
                "passed": s.passed,
                "failed": s.failed,
                "failures": s.failures.iter()
                    .map(|f| json!({"case": f.case, "detail": f.detail}))
                    .collect::<Vec<_>>(),
            })).collect::<Vec<_>>(),
        }),
        Payload::Error {
            precondition,
            message,
        } => json!({"precondition": precondition, "message": message}),
    }
}

fn as_object<'a>(v: &'a Value, what: &str) -> Parsed<&'a Map<String, Value>> {
    match v {
        Value::Object(m) => Ok(m),
        _ => malformed(format!("{what} must be a JSON object")),
    }
}

fn as_array<'a>(v: &'a Value, what: &str) -> Parsed<&'a Vec<Value>> {
    match v {
        Value::Array(a) => Ok(a),
        _ => malformed(format!("{what} must be a JSON array")),
    }
}

fn field<'a>(obj: &'a Map<String, Value>, name: &str) -> Parsed<&'a Value> {
    obj.get(name)
        .ok_or_else(|| DocumentError::Malformed(format!("missing field {name:?}")))
}

fn as_str<'a>(v: &'a Value, what: &str) -> Parsed<&'a str> {
    match v {
        Value::String(s) => Ok(s),
        _ => malformed(format!("{what} must be a string")),
    }
}

fn as_usize(v: &Value, what: &str) -> Parsed<usize> {
    v.as_u64()
        .and_then(|n| usize::try_from(n).ok())
        .ok_or_else(|| DocumentError::Malformed(format!("{what} must be a nonnegative integer")))
}

/// A rational from `"p/q"`, `"p"`, or a JSON integer. Floats are rejected.
pub fn rational_from_json(v: &Value) -> Parsed<Rational> {
    match v {
        Value::String(s) => parse_rational(s)
            .ok_or_else(|| DocumentError::Malformed(format!("invalid rational {s:?}"))),
        Value::Number(n) if n.is_i64() || n.is_u64() => {
            Ok(parse_rational(&n.to_string()).expect("integers parse"))
        }
        other => malformed(format!("expected a rational string or integer, got {other}")),
    }
}

fn label_from_json(v: &Value) -> Parsed<VertexLabel> {
    Ok(VertexLabel::new(as_str(v, "label")?)?)
}

fn labels_from_json(v: &Value, what: &str) -> Parsed<Vec<VertexLabel>> {
    as_array(v, what)?.iter().map(label_from_json).collect()
}

fn key_from_json(v: &Value) -> Parsed<SubsetKey> {
    Ok(SubsetKey::new(labels_from_json(v, "subset key")?)?)
}

fn weights_from_json(v: &Value) -> Parsed<WeightVector> {
    let entries = as_object(v, "weight vector")?
        .iter()
        .map(|(k, w)| Ok((VertexLabel::new(k.as_str())?, rational_from_json(w)?)))
        .collect::<Parsed<Vec<_>>>()?;
    Ok(WeightVector::from_entries(entries)?)
}

fn prob_from_json(v: &Value) -> Parsed<ProbVector> {
    Ok(ProbVector::new(weights_from_json(v)?)?)
}

fn points_from_json(v: &Value) -> Parsed<Vec<ProbVector>> {
    as_array(v, "point list")?.iter().map(prob_from_json).collect()
}

fn rationals_from_json(v: &Value, what: &str) -> Parsed<Vec<Rational>> {
    as_array(v, what)?.iter().map(rational_from_json).collect()
}

fn complex_from_json(v: &Value) -> Parsed<AbstractComplex> {
    let obj = as_object(v, "complex")?;
    let facets = as_array(field(obj, "facets")?, "facets")?
        .iter()
        .map(key_from_json)
        .collect::<Parsed<Vec<_>>>()?;
    Ok(match obj.get("vertices") {
        Some(vertices) => AbstractComplex::new(labels_from_json(vertices, "vertices")?, facets)?,
        None => AbstractComplex::from_facets(facets),
    })
}

fn cover_from_json(v: &Value) -> Parsed<IndexedCover> {
    let sets = as_object(v, "cover")?
        .iter()
        .map(|(k, members)| {
            let members: BTreeSet<_> = labels_from_json(members, "cover set")?.into_iter().collect();
            Ok((VertexLabel::new(k.as_str())?, members))
        })
        .collect::<Parsed<BTreeMap<_, _>>>()?;
    Ok(IndexedCover::new(sets))
}

fn sample_from_json(v: &Value) -> Parsed<MetricSample> {
    let obj = as_object(v, "sample")?;
    let ids = labels_from_json(field(obj, "points")?, "points")?;
    match (obj.get("distances"), obj.get("coordinates")) {
        (Some(d), None) => {
            let rows = as_array(d, "distances")?
                .iter()
                .map(|row| rationals_from_json(row, "distance row"))
                .collect::<Parsed<Vec<_>>>()?;
            Ok(MetricSample::new(ids, rows)?)
        }
        (None, Some(c)) => {
            let rows = as_array(c, "coordinates")?
                .iter()
                .map(|row| rationals_from_json(row, "coordinate row"))
                .collect::<Parsed<Vec<_>>>()?;
            Ok(MetricSample::from_l1_coordinates(ids, &rows)?)
        }
        _ => malformed("sample needs exactly one of \"distances\" or \"coordinates\""),
    }
}

fn realization_from_json(v: &Value) -> Parsed<GeometricRealization> {
    let obj = as_object(v, "realization")?;
    let coordinates = as_object(field(obj, "coordinates")?, "coordinates")?
        .iter()
        .map(|(k, c)| Ok((VertexLabel::new(k.as_str())?, rationals_from_json(c, "coordinates")?)))
        .collect::<Parsed<BTreeMap<_, _>>>()?;
    let complex = match obj.get("complex") {
        Some(c) => complex_from_json(c)?,
        // without a complex, the coordinates span one simplex
        None => AbstractComplex::from_facets(SubsetKey::new(coordinates.keys().cloned()).ok()),
    };
    Ok(GeometricRealization::new(complex, coordinates)?)
}

fn report_from_json(v: &Value) -> Parsed<Report> {
    let obj = as_object(v, "report")?;
    let suites = as_array(field(obj, "suites")?, "suites")?
        .iter()
        .map(|s| {
            let s = as_object(s, "suite report")?;
            let failures = as_array(field(s, "failures")?, "failures")?
                .iter()
                .map(|f| {
                    let f = as_object(f, "failure")?;
                    Ok(Failure {
                        case: as_usize(field(f, "case")?, "case")?,
                        detail: as_str(field(f, "detail")?, "detail")?.to_string(),
                    })
                })
                .collect::<Parsed<Vec<_>>>()?;
            Ok(SuiteReport {
                suite: as_str(field(s, "suite")?, "suite")?.to_string(),
                seed: field(s, "seed")?
                    .as_u64()
                    .ok_or_else(|| DocumentError::Malformed("seed must be an integer".into()))?,
                cases: as_usize(field(s, "cases")?, "cases")?,
                passed: as_usize(field(s, "passed")?, "passed")?,
                failed: as_usize(field(s, "failed")?, "failed")?,
                failures,
            })
        })
        .collect::<Parsed<Vec<_>>>()?;
    Ok(Report { suites })
}

fn payload_from_json(kind: &str, v: &Value) -> Parsed<Payload> {
    Ok(match kind {
        "prob_vector" => Payload::ProbVector(prob_from_json(v)?),
        "weight_vector" => Payload::WeightVector(weights_from_json(v)?),
        "weight_list" => Payload::WeightList(
            as_array(v, "weight list")?
                .iter()
                .map(weights_from_json)
                .collect::<Parsed<_>>()?,
        ),
        "derived_vector" => {
            let entries = as_array(v, "derived vector")?
                .iter()
                .map(|e| {
                    let e = as_object(e, "derived entry")?;
                    Ok((
                        key_from_json(field(e, "key")?)?,
                        rational_from_json(field(e, "weight")?)?,
                    ))
                })
                .collect::<Parsed<Vec<_>>>()?;
            Payload::DerivedVector(DerivedVector::from_entries(entries)?)
        }
        "complex" => Payload::Complex(complex_from_json(v)?),
        "sample" => Payload::Sample(sample_from_json(v)?),
        "cover" => Payload::Cover(cover_from_json(v)?),
        "point_list" => Payload::PointList(points_from_json(v)?),
        "realization" => Payload::Realization(realization_from_json(v)?),
        "coordinates" => Payload::Coordinates(rationals_from_json(v, "coordinates")?),
        "restriction" => {
            let obj = as_object(v, "restriction")?;
            let kept = as_array(field(obj, "kept")?, "kept")?
                .iter()
                .map(|i| as_usize(i, "kept index"))
                .collect::<Parsed<Vec<_>>>()?;
            let points = points_from_json(field(obj, "points")?)?;
            if kept.len() != points.len() {
                return malformed("restriction needs one kept index per point");
            }
            Payload::Restriction(Restriction { kept, points })
        }
        "pipeline" => {
            let obj = as_object(v, "pipeline")?;
            Payload::Pipeline(CechResult {
                cover: cover_from_json(field(obj, "cover")?)?,
                partition: points_from_json(field(obj, "partition")?)?,
                nerve: complex_from_json(field(obj, "nerve")?)?,
            })
        }
        "report" => Payload::Report(report_from_json(v)?),
        "error" => {
            let obj = as_object(v, "error")?;
            Payload::Error {
                precondition: as_str(field(obj, "precondition")?, "precondition")?.to_string(),
                message: as_str(field(obj, "message")?, "message")?.to_string(),
            }
        }
        other => return malformed(format!("unknown document kind {other:?}")),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::random::{label_pool, random_chain, random_prob_vector, seeded};
    use proptest::prelude::*;

    fn doc(text: &str) -> Parsed<Document> {
        Document::parse(text)
    }

    #[test]
    fn prob_vector_accepts_integer_shorthand() {
        let d = doc(r#"{"kind":"prob_vector","payload":{"a":1,"b":0}}"#).unwrap();
        assert_eq!(d.payload, Payload::ProbVector("{a:1}".parse().unwrap()));
    }

    #[test]
    fn floats_and_bad_rationals_are_malformed() {
        for bad in [
            r#"{"kind":"prob_vector","payload":{"a":1.0}}"#,
            r#"{"kind":"prob_vector","payload":{"a":"1/0"}}"#,
            r#"{"kind":"prob_vector","payload":[]}"#,
            r#"{"kind":"mystery","payload":{}}"#,
            r#"{"payload":{}}"#,
            "not json",
        ] {
            assert!(matches!(doc(bad), Err(DocumentError::Malformed(_))), "{bad}");
        }
    }

    #[test]
    fn domain_violations_are_not_malformed() {
        let err = doc(r#"{"kind":"prob_vector","payload":{"a":"1/2"}}"#).unwrap_err();
        assert_eq!(err, DocumentError::Domain(Error::NotNormalized { sum: "1/2".into() }));
        let err = doc(r#"{"kind":"prob_vector","payload":{"a|b":"1"}}"#).unwrap_err();
        assert_eq!(err, DocumentError::Domain(Error::InvalidLabel("a|b".into())));
    }

    #[test]
    fn derived_vector_layout() {
        let x: ProbVector = "{a:1/2,b:1/3,c:1/6}".parse().unwrap();
        let text = Document::new(Payload::DerivedVector(crate::derive(&x))).emit();
        let value: Value = serde_json::from_str(&text).unwrap();
        assert_eq!(
            value["payload"],
            json!([
                {"key": ["a"], "weight": "1/6"},
                {"key": ["a", "b"], "weight": "1/3"},
                {"key": ["a", "b", "c"], "weight": "1/2"},
            ])
        );
        assert_eq!(value["metadata"]["tool"], json!(TOOL));
    }

    #[test]
    fn sample_from_coordinates() {
        let d = doc(
            r#"{"kind":"sample","payload":{"points":["p","q"],"coordinates":[["0","0"],["1","1/2"]]}}"#,
        )
        .unwrap();
        let Payload::Sample(s) = &d.payload else { panic!() };
        assert_eq!(s.distance(0, 1), &parse_rational("3/2").unwrap());
        assert_eq!(Document::parse(&d.emit()).unwrap(), d);
    }

    proptest! {
        #[test]
        fn documents_round_trip(seed in any::<u64>()) {
            let pool = label_pool(8);
            let mut rng = seeded(seed);
            let points: Vec<_> = (0..4).map(|_| random_prob_vector(&mut rng, &pool, 6)).collect();
            let docs = [
                Document::new(Payload::ProbVector(points[0].clone())),
                Document::new(Payload::DerivedVector(random_chain(&mut rng, &pool, 4))),
                Document::new(Payload::PointList(points.clone())).with("note", "x"),
                Document::new(Payload::Complex(crate::nerve_of_sample(&points).unwrap())),
            ];
            for d in docs {
                let text = d.emit();
                let back = Document::parse(&text).unwrap();
                prop_assert_eq!(&back, &d);
                prop_assert_eq!(back.emit(), text);
            }
        }
    }
}
