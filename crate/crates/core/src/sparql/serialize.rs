use std::fmt::Write;

use super::ast::*;

/// Canonical text for a query: prologue prefixes in sorted order, every IRI
/// written in full, expressions fully parenthesized.
pub fn serialize_query(query: &Query) -> String {
    let mut out = String::new();
    for (prefix, iri) in &query.prefixes {
        let _ = writeln!(out, "PREFIX {prefix}: <{iri}>");
    }
    match query.form {
        QueryForm::Ask => out.push_str("ASK"),
        QueryForm::Select => {
            out.push_str("SELECT");
            if query.distinct {
                out.push_str(" DISTINCT");
            }
            match &query.projection {
                Projection::All => out.push_str(" *"),
                Projection::Items(items) => {
                    for item in items {
                        match item {
                            ProjectionItem::Variable(v) => {
                                let _ = write!(out, " ?{v}");
                            }
                            ProjectionItem::Count {
                                argument,
                                distinct,
                                alias,
                            } => {
                                let arg = match argument {
                                    CountArgument::Star => "*".to_string(),
                                    CountArgument::Variable(v) => format!("?{v}"),
                                };
                                let d = if *distinct { "DISTINCT " } else { "" };
                                let _ = write!(out, " (COUNT({d}{arg}) AS ?{alias})");
                            }
                        }
                    }
                }
            }
        }
    }
    out.push_str(" WHERE ");
    group(&query.pattern, &mut out);
    if let Some(vars) = &query.group_by {
        out.push_str(" GROUP BY");
        for v in vars {
            let _ = write!(out, " ?{v}");
        }
    }
    if let Some(conds) = &query.order_by {
        out.push_str(" ORDER BY");
        for c in conds {
            let dir = if c.ascending { "ASC" } else { "DESC" };
            let _ = write!(out, " {dir}({})", expression(&c.expression));
        }
    }
    if let Some(n) = query.limit {
        let _ = write!(out, " LIMIT {n}");
    }
    if let Some(n) = query.offset {
        let _ = write!(out, " OFFSET {n}");
    }
    out
}

fn group(g: &GroupPattern, out: &mut String) {
    out.push('{');
    for el in &g.elements {
        out.push(' ');
        match el {
            PatternElement::Triple(tp) => {
                let _ = write!(
                    out,
                    "{} {} {} .",
                    pattern_term(&tp.subject),
                    pattern_term(&tp.predicate),
                    pattern_term(&tp.object)
                );
            }
            PatternElement::Filter(e) => {
                let _ = write!(out, "FILTER({})", expression(e));
            }
            PatternElement::Optional(inner) => {
                out.push_str("OPTIONAL ");
                group(inner, out);
            }
        }
    }
    out.push_str(" }");
}

fn pattern_term(t: &PatternTerm) -> String {
    match t {
        PatternTerm::Term(term) => term.to_string(),
        PatternTerm::Variable(v) => format!("?{v}"),
        PatternTerm::Blank(label) => format!("_:{label}"),
    }
}

pub(crate) fn expression(e: &Expression) -> String {
    match e {
        Expression::Variable(v) => format!("?{v}"),
        Expression::Constant(t) => t.to_string(),
        Expression::Compare(op, a, b) => {
            format!("({} {} {})", expression(a), op.symbol(), expression(b))
        }
        Expression::And(a, b) => format!("({} && {})", expression(a), expression(b)),
        Expression::Or(a, b) => format!("({} || {})", expression(a), expression(b)),
        Expression::Not(a) => format!("!({})", expression(a)),
        Expression::Call(f, args) => {
            let args: Vec<String> = args.iter().map(expression).collect();
            format!("{}({})", f.name(), args.join(", "))
        }
    }
}
