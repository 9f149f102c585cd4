//! FILTER and ORDER BY expression evaluation. Errors are `Err(())`; a
//! FILTER whose expression errors drops the row.

use std::cell::RefCell;
use std::cmp::Ordering;
use std::collections::HashMap;

use regex::Regex;

use crate::rdf::{vocab, Literal, Term};
use crate::sparql::{CompareOp, Expression, Function};

use super::table::term_order;

pub(crate) type Value = Result<Term, ()>;

/// Resolves variable names to their bound values.
pub(crate) trait Scope {
    fn lookup(&self, var: &str) -> Option<&Term>;
}

#[derive(Default)]
pub(crate) struct ExprEvaluator {
    regex_cache: RefCell<HashMap<(String, String), Option<Regex>>>,
}

fn string_arg(t: &Term) -> Result<&Literal, ()> {
    match t {
        Term::Literal(lit) if lit.explicit_datatype().is_none() => Ok(lit),
        _ => Err(()),
    }
}

pub(crate) fn effective_boolean(t: &Term) -> Result<bool, ()> {
    let Term::Literal(lit) = t else {
        return Err(());
    };
    if let Some(dt) = lit.explicit_datatype() {
        if dt == vocab::XSD_BOOLEAN {
            return lit.boolean().ok_or(());
        }
        if let Some(n) = lit.numeric() {
            let v = n.as_f64();
            return Ok(v != 0.0 && !v.is_nan());
        }
        return Err(());
    }
    if lit.language().is_some() {
        return Err(());
    }
    Ok(!lit.lexical().is_empty())
}

fn compare(op: CompareOp, a: &Term, b: &Term) -> Result<bool, ()> {
    let numeric = |t: &Term| t.as_literal().and_then(Literal::numeric);
    let ordering = match (numeric(a), numeric(b)) {
        (Some(x), Some(y)) => {
            if x.as_f64().is_nan() || y.as_f64().is_nan() {
                return Ok(op == CompareOp::Ne);
            }
            x.total_cmp(y)
        }
        _ => match op {
            CompareOp::Eq => return Ok(a == b),
            CompareOp::Ne => return Ok(a != b),
            _ => match (a, b) {
                (Term::Literal(_), Term::Literal(_)) => term_order(Some(a), Some(b)),
                _ => return Err(()),
            },
        },
    };
    Ok(match op {
        CompareOp::Eq => ordering == Ordering::Equal,
        CompareOp::Ne => ordering != Ordering::Equal,
        CompareOp::Lt => ordering == Ordering::Less,
        CompareOp::Le => ordering != Ordering::Greater,
        CompareOp::Gt => ordering == Ordering::Greater,
        CompareOp::Ge => ordering != Ordering::Less,
    })
}

impl ExprEvaluator {
    pub(crate) fn eval(&self, e: &Expression, scope: &dyn Scope) -> Value {
        match e {
            Expression::Variable(v) => scope.lookup(v).cloned().ok_or(()),
            Expression::Constant(t) => Ok(t.clone()),
            Expression::Compare(op, a, b) => {
                let a = self.eval(a, scope)?;
                let b = self.eval(b, scope)?;
                compare(*op, &a, &b).map(Term::boolean)
            }
            Expression::And(a, b) => {
                let a = self.eval(a, scope).and_then(|t| effective_boolean(&t));
                let b = self.eval(b, scope).and_then(|t| effective_boolean(&t));
                match (a, b) {
                    (Ok(false), _) | (_, Ok(false)) => Ok(Term::boolean(false)),
                    (Ok(true), Ok(true)) => Ok(Term::boolean(true)),
                    _ => Err(()),
                }
            }
            Expression::Or(a, b) => {
                let a = self.eval(a, scope).and_then(|t| effective_boolean(&t));
                let b = self.eval(b, scope).and_then(|t| effective_boolean(&t));
                match (a, b) {
                    (Ok(true), _) | (_, Ok(true)) => Ok(Term::boolean(true)),
                    (Ok(false), Ok(false)) => Ok(Term::boolean(false)),
                    _ => Err(()),
                }
            }
            Expression::Not(a) => {
                let v = effective_boolean(&self.eval(a, scope)?)?;
                Ok(Term::boolean(!v))
            }
            Expression::Call(f, args) => self.call(*f, args, scope),
        }
    }

    pub(crate) fn filter(&self, e: &Expression, scope: &dyn Scope) -> bool {
        self.eval(e, scope)
            .and_then(|t| effective_boolean(&t))
            .unwrap_or(false)
    }

    fn call(&self, f: Function, args: &[Expression], scope: &dyn Scope) -> Value {
        if f == Function::Bound {
            return match &args[0] {
                Expression::Variable(v) => Ok(Term::boolean(scope.lookup(v).is_some())),
                _ => Err(()),
            };
        }
        let values: Vec<Term> = args
            .iter()
            .map(|a| self.eval(a, scope))
            .collect::<Result<_, _>>()?;
        match f {
            Function::Bound => unreachable!(),
            Function::Str => match &values[0] {
                Term::Iri(iri) => Ok(Term::literal(iri.clone())),
                Term::Literal(lit) => Ok(Term::literal(lit.lexical())),
                Term::Blank(_) => Err(()),
            },
            Function::Lang => match &values[0] {
                Term::Literal(lit) => Ok(Term::literal(lit.language().unwrap_or(""))),
                _ => Err(()),
            },
            Function::Datatype => match &values[0] {
                Term::Literal(lit) => Ok(Term::iri(lit.datatype())),
                _ => Err(()),
            },
            Function::Contains => {
                let (a, b) = (string_arg(&values[0])?, string_arg(&values[1])?);
                Ok(Term::boolean(a.lexical().contains(b.lexical())))
            }
            Function::StrStarts => {
                let (a, b) = (string_arg(&values[0])?, string_arg(&values[1])?);
                Ok(Term::boolean(a.lexical().starts_with(b.lexical())))
            }
            Function::Regex => {
                let text = string_arg(&values[0])?;
                let pattern = string_arg(&values[1])?;
                let flags = match values.get(2) {
                    Some(t) => string_arg(t)?.lexical().to_string(),
                    None => String::new(),
                };
                let re = self.regex(pattern.lexical(), &flags).ok_or(())?;
                Ok(Term::boolean(re.is_match(text.lexical())))
            }
        }
    }

    fn regex(&self, pattern: &str, flags: &str) -> Option<Regex> {
        let key = (pattern.to_string(), flags.to_string());
        let mut cache = self.regex_cache.borrow_mut();
        cache
            .entry(key)
            .or_insert_with(|| {
                if !flags.chars().all(|c| "imsx".contains(c)) {
                    return None;
                }
                let full = if flags.is_empty() {
                    pattern.to_string()
                } else {
                    format!("(?{flags}){pattern}")
                };
                Regex::new(&full).ok()
            })
            .clone()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sparql::parse_query;
    use crate::sparql::PatternElement;

    struct Vars(Vec<(&'static str, Term)>);

    impl Scope for Vars {
        fn lookup(&self, var: &str) -> Option<&Term> {
            self.0.iter().find(|(k, _)| *k == var).map(|(_, t)| t)
        }
    }

    fn filter_expr(f: &str) -> Expression {
        let q = parse_query(&format!("SELECT * WHERE {{ ?x ?p ?y FILTER({f}) }}"), None).unwrap();
        match &q.pattern.elements[1] {
            PatternElement::Filter(e) => e.clone(),
            _ => unreachable!(),
        }
    }

    fn check(f: &str, scope: &Vars) -> bool {
        ExprEvaluator::default().filter(&filter_expr(f), scope)
    }

    #[test]
    fn numeric_comparison_across_types() {
        let s = Vars(vec![("x", Term::typed("10", vocab::XSD_INTEGER))]);
        assert!(check("?x = 10.0", &s));
        assert!(check("?x > 9", &s));
        assert!(check(
            "?x = \"10\"^^<http://www.w3.org/2001/XMLSchema#integer>",
            &s
        ));
        assert!(!check("?x = \"10\"", &s));
    }

    #[test]
    fn error_semantics() {
        let s = Vars(vec![("x", Term::literal("a"))]);
        // ?u unbound: error || true = true, error && false = false
        assert!(check("?u = 1 || true", &s));
        assert!(!check("?u = 1 && true", &s));
        assert!(!check("!(?u = 1)", &s));
        assert!(check("!BOUND(?u)", &s));
    }

    #[test]
    fn string_functions() {
        let s = Vars(vec![
            ("x", Term::lang("Bob Tanner", "en")),
            ("i", Term::iri("http://ex.org/bob")),
        ]);
        assert!(check("CONTAINS(STR(?x), \"Tan\")", &s));
        assert!(check("STRSTARTS(STR(?i), \"http://ex.org/\")", &s));
        assert!(check("REGEX(STR(?x), \"^bob\", \"i\")", &s));
        assert!(!check("REGEX(STR(?x), \"^bob\")", &s));
        assert!(check("LANG(?x) = \"en\"", &s));
        assert!(check(
            "DATATYPE(STR(?x)) = <http://www.w3.org/2001/XMLSchema#string>",
            &s
        ));
        assert!(!check("REGEX(STR(?x), \"(\")", &s));
        assert!(!check("?i < ?i", &s));
    }
}
