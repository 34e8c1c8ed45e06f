//! JSON encoding of representations and report post-processing.

use std::collections::BTreeMap;

use serde::Deserialize;
use serde_json::{json, Value};

use crate::arith::{Field, FieldElement, Matrix};
use crate::error::{Error, Result};
use crate::reptheory::Representation;

/// Version tag written into every report.
pub const SCHEMA_VERSION: u64 = 1;
/// Significant digits kept for floats in reports.
pub const FLOAT_DIGITS: usize = 12;

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawRepresentation {
    field: Field,
    n: usize,
    generators: BTreeMap<String, Vec<Vec<RawEntry>>>,
}

#[derive(Deserialize)]
#[serde(untagged)]
enum RawEntry {
    Text(String),
    Number(serde_json::Number),
}

#[derive(Deserialize)]
struct WrappedFamily {
    family: Vec<RawRepresentation>,
}

fn json_error(e: serde_json::Error) -> Error {
    Error::Parse(format!("line {} column {}: {e}", e.line(), e.column()))
}

fn build(raw: RawRepresentation) -> Result<Representation> {
    let field = raw.field;
    field.validate()?;
    let mut gens = BTreeMap::new();
    for (name, rows) in raw.generators {
        let mut parsed = Vec::with_capacity(rows.len());
        for (i, row) in rows.iter().enumerate() {
            let mut out = Vec::with_capacity(row.len());
            for (j, e) in row.iter().enumerate() {
                let text = match e {
                    RawEntry::Text(s) => s.clone(),
                    RawEntry::Number(x) => x.to_string(),
                };
                let x = FieldElement::parse(field, &text).map_err(|err| {
                    Error::Parse(format!("generator {name:?} entry ({i},{j}): {err}"))
                })?;
                out.push(x);
            }
            parsed.push(out);
        }
        let m = Matrix::from_rows(field, parsed)
            .map_err(|err| Error::Parse(format!("generator {name:?}: {err}")))?;
        gens.insert(name, m);
    }
    Representation::new(field, raw.n, gens)
}

pub fn parse_representation(text: &str) -> Result<Representation> {
    build(serde_json::from_str(text).map_err(json_error)?)
}

/// A list of representations, an object `{"family": [...]}`, or a single one.
pub fn parse_family(text: &str) -> Result<Vec<Representation>> {
    let value: Value = serde_json::from_str(text).map_err(json_error)?;
    let raws = match &value {
        Value::Array(_) => {
            serde_json::from_str::<Vec<RawRepresentation>>(text).map_err(json_error)?
        }
        Value::Object(o) if o.contains_key("family") => {
            serde_json::from_str::<WrappedFamily>(text)
                .map_err(json_error)?
                .family
        }
        _ => return Ok(vec![parse_representation(text)?]),
    };
    raws.into_iter().map(build).collect()
}

pub fn field_json(field: Field) -> Value {
    serde_json::to_value(field).expect("field serializes")
}

pub fn matrix_json(m: &Matrix) -> Value {
    json!(m.encode())
}

pub fn representation_json(rho: &Representation) -> Value {
    let gens: serde_json::Map<String, Value> = rho
        .generators()
        .map(|(name, m)| (name.to_string(), matrix_json(m)))
        .collect();
    json!({ "field": field_json(rho.field()), "n": rho.dim(), "generators": gens })
}

fn round_float(x: f64) -> f64 {
    if x == 0.0 || !x.is_finite() {
        return x;
    }
    format!("{:.*e}", FLOAT_DIGITS - 1, x)
        .parse()
        .expect("formatted float parses")
}

/// Rounds every float in a JSON tree to [`FLOAT_DIGITS`] significant digits.
pub fn round_floats(v: Value) -> Value {
    match v {
        Value::Number(n) if n.is_f64() => {
            let x = round_float(n.as_f64().unwrap());
            serde_json::Number::from_f64(x).map_or(Value::Null, Value::Number)
        }
        Value::Array(a) => Value::Array(a.into_iter().map(round_floats).collect()),
        Value::Object(o) => {
            Value::Object(o.into_iter().map(|(k, v)| (k, round_floats(v))).collect())
        }
        other => other,
    }
}

/// Final report text: schema tag added, floats rounded, pretty-printed.
pub fn render_report(mut report: Value) -> String {
    if let Value::Object(o) = &mut report {
        o.insert("schema".into(), json!(SCHEMA_VERSION));
    }
    serde_json::to_string_pretty(&round_floats(report)).expect("JSON values serialize")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip() {
        let text =
            r#"{"field":{"type":"padic","p":5},"n":2,"generators":{"a":[["1","1/5"],["0","1"]]}}"#;
        let rho = parse_representation(text).unwrap();
        let again = parse_representation(&representation_json(&rho).to_string()).unwrap();
        assert_eq!(rho, again);
        let real = r#"{"field":{"type":"real"},"n":1,"generators":{"a":[[2.5]]}}"#;
        assert_eq!(
            parse_representation(real).unwrap().get("a").unwrap()[(0, 0)],
            FieldElement::Real(2.5)
        );
    }

    #[test]
    fn diagnostics() {
        let err = parse_representation("{\n  \"field\": ").unwrap_err();
        assert!(
            matches!(&err, Error::Parse(m) if m.starts_with("line 2")),
            "{err:?}"
        );
        let bad = r#"{"field":{"type":"padic","p":5},"n":1,"generators":{"a":[["x"]]}}"#;
        assert!(matches!(parse_representation(bad), Err(Error::Parse(_))));
    }

    #[test]
    fn families() {
        let one = r#"{"field":{"type":"padic","p":5},"n":1,"generators":{"a":[["2"]]}}"#;
        assert_eq!(parse_family(&format!("[{one},{one}]")).unwrap().len(), 2);
        assert_eq!(
            parse_family(&format!("{{\"family\":[{one}]}}"))
                .unwrap()
                .len(),
            1
        );
        assert_eq!(parse_family(one).unwrap().len(), 1);
    }

    #[test]
    fn rounding() {
        assert_eq!(round_float(0.1 + 0.2), 0.3);
        assert_eq!(round_float(1.0 / 3.0), 0.333333333333);
    }
}
