use std::collections::BTreeSet;

use crate::rdf::{PrefixMap, Term};

/// Variable name without its `?`/`$` sigil.
pub type Variable = String;

#[derive(Debug, Clone, PartialEq)]
pub struct Query {
    /// Prefixes declared in the query prologue.
    pub prefixes: PrefixMap,
    pub form: QueryForm,
    pub distinct: bool,
    pub projection: Projection,
    pub pattern: GroupPattern,
    pub group_by: Option<Vec<Variable>>,
    pub order_by: Option<Vec<OrderCondition>>,
    pub limit: Option<u64>,
    pub offset: Option<u64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum QueryForm {
    Select,
    Ask,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Projection {
    /// `SELECT *`
    All,
    /// Explicit items; empty for ASK.
    Items(Vec<ProjectionItem>),
}

#[derive(Debug, Clone, PartialEq)]
pub enum ProjectionItem {
    Variable(Variable),
    Count {
        argument: CountArgument,
        distinct: bool,
        alias: Variable,
    },
}

#[derive(Debug, Clone, PartialEq)]
pub enum CountArgument {
    Star,
    Variable(Variable),
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct GroupPattern {
    pub elements: Vec<PatternElement>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum PatternElement {
    Triple(TriplePattern),
    Filter(Expression),
    Optional(GroupPattern),
}

#[derive(Debug, Clone, PartialEq)]
pub struct TriplePattern {
    pub subject: PatternTerm,
    pub predicate: PatternTerm,
    pub object: PatternTerm,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum PatternTerm {
    Term(Term),
    Variable(Variable),
    /// A blank node in a pattern; behaves as a variable that is never projected.
    Blank(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CompareOp {
    Eq,
    Ne,
    Lt,
    Le,
    Gt,
    Ge,
}

impl CompareOp {
    pub fn symbol(self) -> &'static str {
        match self {
            CompareOp::Eq => "=",
            CompareOp::Ne => "!=",
            CompareOp::Lt => "<",
            CompareOp::Le => "<=",
            CompareOp::Gt => ">",
            CompareOp::Ge => ">=",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Function {
    Bound,
    Str,
    Lang,
    Datatype,
    Regex,
    Contains,
    StrStarts,
}

impl Function {
    pub fn name(self) -> &'static str {
        match self {
            Function::Bound => "BOUND",
            Function::Str => "STR",
            Function::Lang => "LANG",
            Function::Datatype => "DATATYPE",
            Function::Regex => "REGEX",
            Function::Contains => "CONTAINS",
            Function::StrStarts => "STRSTARTS",
        }
    }

    pub fn from_name(name: &str) -> Option<Function> {
        let f = match name.to_ascii_uppercase().as_str() {
            "BOUND" => Function::Bound,
            "STR" => Function::Str,
            "LANG" => Function::Lang,
            "DATATYPE" => Function::Datatype,
            "REGEX" => Function::Regex,
            "CONTAINS" => Function::Contains,
            "STRSTARTS" => Function::StrStarts,
            _ => return None,
        };
        Some(f)
    }

    /// Accepted argument counts (inclusive range).
    pub fn arity(self) -> (usize, usize) {
        match self {
            Function::Bound | Function::Str | Function::Lang | Function::Datatype => (1, 1),
            Function::Regex => (2, 3),
            Function::Contains | Function::StrStarts => (2, 2),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Expression {
    Variable(Variable),
    Constant(Term),
    Compare(CompareOp, Box<Expression>, Box<Expression>),
    And(Box<Expression>, Box<Expression>),
    Or(Box<Expression>, Box<Expression>),
    Not(Box<Expression>),
    Call(Function, Vec<Expression>),
}

#[derive(Debug, Clone, PartialEq)]
pub struct OrderCondition {
    pub expression: Expression,
    pub ascending: bool,
}

impl GroupPattern {
    /// Variables bound by triple patterns anywhere in the group, in order of
    /// first appearance. Blank nodes are excluded.
    pub fn bound_variables(&self) -> Vec<Variable> {
        let mut seen = BTreeSet::new();
        let mut out = Vec::new();
        self.collect_bound(&mut seen, &mut out);
        out
    }

    fn collect_bound(&self, seen: &mut BTreeSet<Variable>, out: &mut Vec<Variable>) {
        for el in &self.elements {
            match el {
                PatternElement::Triple(tp) => {
                    for t in [&tp.subject, &tp.predicate, &tp.object] {
                        if let PatternTerm::Variable(v) = t {
                            if seen.insert(v.clone()) {
                                out.push(v.clone());
                            }
                        }
                    }
                }
                PatternElement::Optional(g) => g.collect_bound(seen, out),
                PatternElement::Filter(_) => {}
            }
        }
    }

    fn rename(&mut self, f: &impl Fn(&str) -> String) {
        for el in &mut self.elements {
            match el {
                PatternElement::Triple(tp) => {
                    for t in [&mut tp.subject, &mut tp.predicate, &mut tp.object] {
                        if let PatternTerm::Variable(v) = t {
                            *v = f(v);
                        }
                    }
                }
                PatternElement::Filter(e) => e.rename(f),
                PatternElement::Optional(g) => g.rename(f),
            }
        }
    }
}

impl Expression {
    fn rename(&mut self, f: &impl Fn(&str) -> String) {
        match self {
            Expression::Variable(v) => *v = f(v),
            Expression::Constant(_) => {}
            Expression::Compare(_, a, b) | Expression::And(a, b) | Expression::Or(a, b) => {
                a.rename(f);
                b.rename(f);
            }
            Expression::Not(a) => a.rename(f),
            Expression::Call(_, args) => args.iter_mut().for_each(|a| a.rename(f)),
        }
    }
}

impl Query {
    /// Result header: projected variable names in order.
    pub fn header(&self) -> Vec<Variable> {
        match (&self.form, &self.projection) {
            (QueryForm::Ask, _) => Vec::new(),
            (QueryForm::Select, Projection::All) => self.pattern.bound_variables(),
            (QueryForm::Select, Projection::Items(items)) => items
                .iter()
                .map(|i| match i {
                    ProjectionItem::Variable(v) => v.clone(),
                    ProjectionItem::Count { alias, .. } => alias.clone(),
                })
                .collect(),
        }
    }

    pub fn has_aggregate(&self) -> bool {
        matches!(&self.projection, Projection::Items(items)
            if items.iter().any(|i| matches!(i, ProjectionItem::Count { .. })))
    }

    /// `true` when the projection is exactly one COUNT aggregate.
    pub fn projects_only_count(&self) -> bool {
        matches!(&self.projection, Projection::Items(items)
            if items.len() == 1 && matches!(items[0], ProjectionItem::Count { .. }))
    }

    /// Applies `f` to every variable name in the query.
    pub fn rename_variables(&mut self, f: impl Fn(&str) -> String) {
        self.pattern.rename(&f);
        if let Projection::Items(items) = &mut self.projection {
            for item in items {
                match item {
                    ProjectionItem::Variable(v) => *v = f(v),
                    ProjectionItem::Count {
                        argument, alias, ..
                    } => {
                        if let CountArgument::Variable(v) = argument {
                            *v = f(v);
                        }
                        *alias = f(alias);
                    }
                }
            }
        }
        if let Some(vars) = &mut self.group_by {
            vars.iter_mut().for_each(|v| *v = f(v));
        }
        if let Some(conds) = &mut self.order_by {
            conds.iter_mut().for_each(|c| c.expression.rename(&f));
        }
    }
}
