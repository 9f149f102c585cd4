use serde_json::Value;

use crate::rdf::Term;

use super::table::{Bindings, Row, SolutionTable};
use super::ExecError;

fn malformed(path: &str, msg: impl Into<String>) -> ExecError {
    ExecError::MalformedResults {
        path: path.to_string(),
        message: msg.into(),
    }
}

/// Parses a `application/sparql-results+json` document.
pub fn parse_results_json(bytes: &[u8]) -> Result<SolutionTable, ExecError> {
    let doc: Value = serde_json::from_slice(bytes).map_err(|e| malformed("$", e.to_string()))?;
    let obj = doc
        .as_object()
        .ok_or_else(|| malformed("$", "expected an object"))?;
    if let Some(b) = obj.get("boolean") {
        let b = b
            .as_bool()
            .ok_or_else(|| malformed("$.boolean", "expected a boolean"))?;
        return Ok(SolutionTable::Boolean(b));
    }
    let head = obj
        .get("head")
        .ok_or_else(|| malformed("$.head", "missing"))?;
    let vars = match head.get("vars") {
        None => Vec::new(),
        Some(v) => v
            .as_array()
            .ok_or_else(|| malformed("$.head.vars", "expected an array"))?
            .iter()
            .enumerate()
            .map(|(i, v)| {
                v.as_str()
                    .map(str::to_string)
                    .ok_or_else(|| malformed(&format!("$.head.vars[{i}]"), "expected a string"))
            })
            .collect::<Result<Vec<_>, _>>()?,
    };
    let results = obj
        .get("results")
        .ok_or_else(|| malformed("$.results", "missing"))?;
    let bindings = results
        .get("bindings")
        .and_then(Value::as_array)
        .ok_or_else(|| malformed("$.results.bindings", "expected an array"))?;
    let mut rows: Vec<Row> = Vec::with_capacity(bindings.len());
    for (i, b) in bindings.iter().enumerate() {
        let path = format!("$.results.bindings[{i}]");
        let map = b
            .as_object()
            .ok_or_else(|| malformed(&path, "expected an object"))?;
        let mut row: Row = vec![None; vars.len()];
        for (name, value) in map {
            let col = vars.iter().position(|v| v == name).ok_or_else(|| {
                malformed(&format!("{path}.{name}"), "variable not declared in head")
            })?;
            row[col] = Some(parse_term(value, &format!("{path}.{name}"))?);
        }
        rows.push(row);
    }
    Ok(SolutionTable::Bindings(Bindings {
        header: vars,
        rows,
        ordered: false,
        distinct: false,
    }))
}

fn parse_term(v: &Value, path: &str) -> Result<Term, ExecError> {
    let obj = v
        .as_object()
        .ok_or_else(|| malformed(path, "expected an RDF term object"))?;
    let kind = obj
        .get("type")
        .and_then(Value::as_str)
        .ok_or_else(|| malformed(&format!("{path}.type"), "missing"))?;
    let value = obj
        .get("value")
        .and_then(Value::as_str)
        .ok_or_else(|| malformed(&format!("{path}.value"), "missing"))?;
    let lang = obj.get("xml:lang").and_then(Value::as_str);
    let datatype = obj.get("datatype").and_then(Value::as_str);
    match kind {
        "uri" => Ok(Term::iri(value)),
        "bnode" => Ok(Term::blank(value)),
        "literal" | "typed-literal" => Ok(match (lang, datatype) {
            (Some(l), _) => Term::lang(value, l),
            (None, Some(dt)) => Term::typed(value, dt),
            (None, None) => Term::literal(value),
        }),
        other => Err(malformed(
            &format!("{path}.type"),
            format!("unknown term type {other:?}"),
        )),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_bindings_with_unbound_cells() {
        let doc = br#"{"head":{"vars":["s","n"]},"results":{"bindings":[
            {"s":{"type":"uri","value":"http://x/a"},"n":{"type":"literal","value":"3","datatype":"http://www.w3.org/2001/XMLSchema#integer"}},
            {"s":{"type":"bnode","value":"b0"}},
            {"n":{"type":"literal","value":"hi","xml:lang":"EN"}}]}}"#;
        let t = parse_results_json(doc).unwrap();
        let b = t.as_bindings().unwrap();
        assert_eq!(b.header, vec!["s", "n"]);
        assert_eq!(b.rows[0][1], Some(Term::integer(3)));
        assert_eq!(b.rows[1][1], None);
        assert_eq!(b.rows[2][1], Some(Term::lang("hi", "en")));
    }

    #[test]
    fn parses_boolean() {
        assert_eq!(
            parse_results_json(br#"{"head":{},"boolean":true}"#).unwrap(),
            SolutionTable::Boolean(true)
        );
    }

    #[test]
    fn reports_path_of_bad_field() {
        let doc =
            br#"{"head":{"vars":["s"]},"results":{"bindings":[{"t":{"type":"uri","value":"x"}}]}}"#;
        match parse_results_json(doc) {
            Err(ExecError::MalformedResults { path, .. }) => {
                assert_eq!(path, "$.results.bindings[0].t")
            }
            other => panic!("{other:?}"),
        }
        match parse_results_json(b"not json") {
            Err(ExecError::MalformedResults { path, .. }) => assert_eq!(path, "$"),
            other => panic!("{other:?}"),
        }
    }
}
