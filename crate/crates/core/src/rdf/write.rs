use super::term::escape_string;
use super::vocab;
use super::{Graph, PrefixMap, Term};

/// Serializes a graph as Turtle, grouping triples by subject and using the
/// given prefixes wherever the local part is a plain name.
pub fn to_turtle(graph: &Graph, prefixes: &PrefixMap) -> String {
    let mut out = String::new();
    for (prefix, iri) in prefixes {
        out.push_str(&format!("@prefix {prefix}: <{iri}> .\n"));
    }
    if !prefixes.is_empty() && !graph.is_empty() {
        out.push('\n');
    }

    let triples = graph.triples();
    let mut i = 0;
    while i < triples.len() {
        let subject = &triples[i].subject;
        out.push_str(&term(subject, prefixes));
        let mut first_pred = true;
        while i < triples.len() && &triples[i].subject == subject {
            let predicate = &triples[i].predicate;
            out.push_str(if first_pred { " " } else { " ;\n    " });
            first_pred = false;
            out.push_str(&term(predicate, prefixes));
            let mut first_obj = true;
            while i < triples.len()
                && &triples[i].subject == subject
                && &triples[i].predicate == predicate
            {
                out.push_str(if first_obj { " " } else { ", " });
                first_obj = false;
                out.push_str(&term(&triples[i].object, prefixes));
                i += 1;
            }
        }
        out.push_str(" .\n");
    }
    out
}

fn is_plain_local(local: &str) -> bool {
    local
        .chars()
        .all(|c| c.is_ascii_alphanumeric() || c == '_' || c == '-')
        && !local.starts_with('-')
}

fn term(t: &Term, prefixes: &PrefixMap) -> String {
    match t {
        Term::Iri(iri) if iri == vocab::RDF_TYPE => "a".to_string(),
        Term::Iri(iri) => {
            // longest namespace wins
            let best = prefixes
                .iter()
                .filter(|(_, ns)| iri.starts_with(ns.as_str()) && is_plain_local(&iri[ns.len()..]))
                .max_by_key(|(_, ns)| ns.len());
            match best {
                Some((prefix, ns)) => format!("{prefix}:{}", &iri[ns.len()..]),
                None => format!("<{iri}>"),
            }
        }
        Term::Blank(label) => format!("_:{label}"),
        Term::Literal(lit) => {
            let mut s = String::from("\"");
            escape_string(lit.lexical(), &mut s);
            s.push('"');
            if let Some(lang) = lit.language() {
                s.push('@');
                s.push_str(lang);
            } else if let Some(dt) = lit.explicit_datatype() {
                s.push_str("^^");
                s.push_str(&term(&Term::iri(dt), prefixes));
            }
            s
        }
    }
}

#[cfg(test)]
mod tests {
    use super::super::parse_turtle;
    use super::*;

    #[test]
    fn round_trip() {
        let doc = r#"
            @prefix ex: <http://ex.org/> .
            @prefix xsd: <http://www.w3.org/2001/XMLSchema#> .
            ex:a a ex:C ; ex:n 42, "x\"y"@en ; ex:d "2020-01-01"^^xsd:date .
            _:b ex:p ex:a , <http://other.org/x%20y> .
            ex:c ex:p [ ex:q "z" ] .
        "#;
        let g = parse_turtle(doc, None).unwrap();
        let text = to_turtle(&g, g.prefixes());
        let again = parse_turtle(&text, None).unwrap();
        assert_eq!(g, again, "{text}");
    }
}
