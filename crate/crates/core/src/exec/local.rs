use std::collections::{HashMap, HashSet};

use crate::rdf::{Graph, Term};
use crate::sparql::{
    CountArgument, Expression, GroupPattern, PatternElement, PatternTerm, Projection,
    ProjectionItem, Query, QueryForm, TriplePattern, Variable,
};

use super::expr::{ExprEvaluator, Scope};
use super::table::{row_order, term_order, Bindings, Row, SolutionTable};
use super::ExecError;

/// Evaluates a parsed query against an in-memory graph.
pub fn evaluate_local(query: &Query, graph: &Graph) -> Result<SolutionTable, ExecError> {
    Evaluator::new(query, graph).run()
}

/// Variable (and pattern blank node) name to slot index.
#[derive(Debug, Default)]
struct Slots {
    index: HashMap<String, usize>,
}

impl Slots {
    fn add(&mut self, name: String) -> usize {
        let next = self.index.len();
        *self.index.entry(name).or_insert(next)
    }

    fn get(&self, name: &str) -> Option<usize> {
        self.index.get(name).copied()
    }

    fn len(&self) -> usize {
        self.index.len()
    }
}

fn blank_slot_name(label: &str) -> String {
    format!("_:{label}")
}

type Solution = Vec<Option<Term>>;

struct Bound<'a> {
    slots: &'a Slots,
    row: &'a Solution,
}

impl Scope for Bound<'_> {
    fn lookup(&self, var: &str) -> Option<&Term> {
        self.slots
            .get(var)
            .and_then(|i| self.row.get(i))
            .and_then(Option::as_ref)
    }
}

enum Slot {
    Fixed(Term),
    Var(usize),
}

struct CompiledPattern {
    parts: [Slot; 3],
}

struct Evaluator<'a> {
    query: &'a Query,
    graph: &'a Graph,
    slots: Slots,
    exprs: ExprEvaluator,
}

impl<'a> Evaluator<'a> {
    fn new(query: &'a Query, graph: &'a Graph) -> Self {
        let mut slots = Slots::default();
        collect_slots(&query.pattern, &mut slots);
        if let Projection::Items(items) = &query.projection {
            for item in items {
                match item {
                    ProjectionItem::Variable(v) => {
                        slots.add(v.clone());
                    }
                    ProjectionItem::Count { alias, .. } => {
                        slots.add(alias.clone());
                    }
                }
            }
        }
        if let Some(vars) = &query.group_by {
            for v in vars {
                slots.add(v.clone());
            }
        }
        Evaluator {
            query,
            graph,
            slots,
            exprs: ExprEvaluator::default(),
        }
    }

    fn run(&self) -> Result<SolutionTable, ExecError> {
        let start = vec![None; self.slots.len()];
        let mut solutions = self.eval_group(&self.query.pattern, vec![start])?;

        if self.query.form == QueryForm::Ask {
            let offset = self.query.offset.unwrap_or(0) as usize;
            let available = solutions.len().saturating_sub(offset);
            let available = self
                .query
                .limit
                .map_or(available, |l| available.min(l as usize));
            return Ok(SolutionTable::Boolean(available > 0));
        }

        if self.query.has_aggregate() || self.query.group_by.is_some() {
            solutions = self.aggregate(solutions);
        }

        let header = self.query.header();
        let columns: Vec<Option<usize>> = header.iter().map(|v| self.slots.get(v)).collect();
        let ordered = self.query.order_by.is_some();
        if let Some(conds) = &self.query.order_by {
            // ties keep a canonical order rather than join order
            let project = |s: &Solution| -> Row {
                columns
                    .iter()
                    .map(|c| c.and_then(|i| s[i].clone()))
                    .collect()
            };
            solutions.sort_by(|a, b| row_order(&project(a), &project(b)));
            let mut keyed: Vec<(Vec<Option<Term>>, Solution)> = solutions
                .into_iter()
                .map(|s| {
                    let scope = Bound {
                        slots: &self.slots,
                        row: &s,
                    };
                    let keys = conds
                        .iter()
                        .map(|c| self.exprs.eval(&c.expression, &scope).ok())
                        .collect();
                    (keys, s)
                })
                .collect();
            keyed.sort_by(|(ka, _), (kb, _)| {
                for (i, c) in conds.iter().enumerate() {
                    let o = term_order(ka[i].as_ref(), kb[i].as_ref());
                    let o = if c.ascending { o } else { o.reverse() };
                    if o.is_ne() {
                        return o;
                    }
                }
                std::cmp::Ordering::Equal
            });
            solutions = keyed.into_iter().map(|(_, s)| s).collect();
        }

        let mut rows: Vec<Row> = solutions
            .iter()
            .map(|s| {
                columns
                    .iter()
                    .map(|c| c.and_then(|i| s[i].clone()))
                    .collect()
            })
            .collect();
        if !ordered {
            // join order must not be observable
            rows.sort_by(|a, b| row_order(a, b));
        }
        if self.query.distinct {
            let mut seen = HashSet::new();
            rows.retain(|r| seen.insert(r.clone()));
        }
        let offset = self.query.offset.unwrap_or(0) as usize;
        let mut rows: Vec<Row> = rows.into_iter().skip(offset).collect();
        if let Some(limit) = self.query.limit {
            rows.truncate(limit as usize);
        }
        Ok(SolutionTable::Bindings(Bindings {
            header,
            rows,
            ordered,
            distinct: self.query.distinct,
        }))
    }

    fn compile(&self, tp: &TriplePattern) -> CompiledPattern {
        let slot = |t: &PatternTerm| match t {
            PatternTerm::Term(term) => Slot::Fixed(term.clone()),
            PatternTerm::Variable(v) => Slot::Var(self.slots.get(v).expect("slot allocated")),
            PatternTerm::Blank(l) => {
                Slot::Var(self.slots.get(&blank_slot_name(l)).expect("slot allocated"))
            }
        };
        CompiledPattern {
            parts: [slot(&tp.subject), slot(&tp.predicate), slot(&tp.object)],
        }
    }

    fn eval_group(
        &self,
        group: &GroupPattern,
        input: Vec<Solution>,
    ) -> Result<Vec<Solution>, ExecError> {
        let mut current = input;
        let mut bgp: Vec<CompiledPattern> = Vec::new();
        let mut filters: Vec<&Expression> = Vec::new();
        for el in &group.elements {
            match el {
                PatternElement::Triple(tp) => bgp.push(self.compile(tp)),
                PatternElement::Filter(e) => filters.push(e),
                PatternElement::Optional(inner) => {
                    current = self.join_bgp(&std::mem::take(&mut bgp), current);
                    current = self.left_join(inner, current)?;
                }
            }
        }
        current = self.join_bgp(&bgp, current);
        if !filters.is_empty() {
            current.retain(|s| {
                let scope = Bound {
                    slots: &self.slots,
                    row: s,
                };
                filters.iter().all(|f| self.exprs.filter(f, &scope))
            });
        }
        Ok(current)
    }

    fn left_join(
        &self,
        optional: &GroupPattern,
        input: Vec<Solution>,
    ) -> Result<Vec<Solution>, ExecError> {
        let mut out = Vec::new();
        for s in input {
            let extended = self.eval_group(optional, vec![s.clone()])?;
            if extended.is_empty() {
                out.push(s);
            } else {
                out.extend(extended);
            }
        }
        Ok(out)
    }

    fn join_bgp(&self, patterns: &[CompiledPattern], input: Vec<Solution>) -> Vec<Solution> {
        if patterns.is_empty() {
            return input;
        }
        let mut out = Vec::new();
        let mut remaining: Vec<usize> = (0..patterns.len()).collect();
        for mut s in input {
            self.solve(patterns, &mut remaining, &mut s, &mut out);
        }
        out
    }

    fn resolve<'s>(&self, slot: &'s Slot, s: &'s Solution) -> Option<&'s Term> {
        match slot {
            Slot::Fixed(t) => Some(t),
            Slot::Var(i) => s[*i].as_ref(),
        }
    }

    /// Backtracking join. At each level the pattern with the most bound
    /// components runs next, ties going to the earliest written.
    fn solve(
        &self,
        patterns: &[CompiledPattern],
        remaining: &mut Vec<usize>,
        s: &mut Solution,
        out: &mut Vec<Solution>,
    ) {
        if remaining.is_empty() {
            out.push(s.clone());
            return;
        }
        let (pick, _) = remaining
            .iter()
            .enumerate()
            .max_by_key(|(pos, &idx)| {
                let bound = patterns[idx]
                    .parts
                    .iter()
                    .filter(|p| self.resolve(p, s).is_some())
                    .count();
                (bound, std::cmp::Reverse(*pos))
            })
            .expect("non-empty");
        let idx = remaining.remove(pick);
        let pattern = &patterns[idx];
        let [ps, pp, po] = &pattern.parts;
        let (bs, bp, bo) = (
            self.resolve(ps, s).cloned(),
            self.resolve(pp, s).cloned(),
            self.resolve(po, s).cloned(),
        );
        for triple in self
            .graph
            .match_pattern(bs.as_ref(), bp.as_ref(), bo.as_ref())
        {
            let mut newly = Vec::with_capacity(3);
            let mut consistent = true;
            for (slot, value) in
                pattern
                    .parts
                    .iter()
                    .zip([&triple.subject, &triple.predicate, &triple.object])
            {
                if let Slot::Var(i) = slot {
                    match &s[*i] {
                        Some(existing) => {
                            if existing != value {
                                consistent = false;
                                break;
                            }
                        }
                        None => {
                            s[*i] = Some(value.clone());
                            newly.push(*i);
                        }
                    }
                }
            }
            if consistent {
                self.solve(patterns, remaining, s, out);
            }
            for i in newly {
                s[i] = None;
            }
        }
        remaining.insert(pick, idx);
    }

    fn aggregate(&self, solutions: Vec<Solution>) -> Vec<Solution> {
        let group_vars: Vec<usize> = self
            .query
            .group_by
            .iter()
            .flatten()
            .map(|v| self.slots.get(v).expect("slot allocated"))
            .collect();
        let mut order: Vec<Vec<Option<Term>>> = Vec::new();
        let mut groups: HashMap<Vec<Option<Term>>, Vec<Solution>> = HashMap::new();
        for s in solutions {
            let key: Vec<Option<Term>> = group_vars.iter().map(|&i| s[i].clone()).collect();
            groups
                .entry(key.clone())
                .or_insert_with(|| {
                    order.push(key);
                    Vec::new()
                })
                .push(s);
        }
        if self.query.group_by.is_none() && order.is_empty() {
            order.push(Vec::new());
            groups.insert(Vec::new(), Vec::new());
        }

        let items: &[ProjectionItem] = match &self.query.projection {
            Projection::Items(items) => items,
            Projection::All => &[],
        };
        let in_scope: Vec<usize> = pattern_slots(&self.query.pattern, &self.slots);
        order
            .into_iter()
            .map(|key| {
                let members = &groups[&key];
                let mut out = vec![None; self.slots.len()];
                for (&slot, value) in group_vars.iter().zip(&key) {
                    out[slot] = value.clone();
                }
                for item in items {
                    if let ProjectionItem::Count {
                        argument,
                        distinct,
                        alias,
                    } = item
                    {
                        let n = count(members, argument, *distinct, &self.slots, &in_scope);
                        out[self.slots.get(alias).expect("slot allocated")] =
                            Some(Term::integer(n as i64));
                    }
                }
                out
            })
            .collect()
    }
}

fn count(
    members: &[Solution],
    argument: &CountArgument,
    distinct: bool,
    slots: &Slots,
    in_scope: &[usize],
) -> usize {
    match argument {
        CountArgument::Star if !distinct => members.len(),
        CountArgument::Star => {
            let rows: HashSet<Vec<&Option<Term>>> = members
                .iter()
                .map(|s| in_scope.iter().map(|&i| &s[i]).collect())
                .collect();
            rows.len()
        }
        CountArgument::Variable(v) => {
            let Some(i) = slots.get(v) else { return 0 };
            let values = members.iter().filter_map(|s| s[i].as_ref());
            if distinct {
                values.collect::<HashSet<_>>().len()
            } else {
                values.count()
            }
        }
    }
}

fn collect_slots(group: &GroupPattern, slots: &mut Slots) {
    for el in &group.elements {
        match el {
            PatternElement::Triple(tp) => {
                for t in [&tp.subject, &tp.predicate, &tp.object] {
                    match t {
                        PatternTerm::Variable(v) => {
                            slots.add(v.clone());
                        }
                        PatternTerm::Blank(l) => {
                            slots.add(blank_slot_name(l));
                        }
                        PatternTerm::Term(_) => {}
                    }
                }
            }
            PatternElement::Filter(e) => collect_expr_slots(e, slots),
            PatternElement::Optional(g) => collect_slots(g, slots),
        }
    }
}

fn collect_expr_slots(e: &Expression, slots: &mut Slots) {
    match e {
        Expression::Variable(v) => {
            slots.add(v.clone());
        }
        Expression::Constant(_) => {}
        Expression::Compare(_, a, b) | Expression::And(a, b) | Expression::Or(a, b) => {
            collect_expr_slots(a, slots);
            collect_expr_slots(b, slots);
        }
        Expression::Not(a) => collect_expr_slots(a, slots),
        Expression::Call(_, args) => args.iter().for_each(|a| collect_expr_slots(a, slots)),
    }
}

/// Slots bound by triple patterns (variables and pattern blank nodes).
fn pattern_slots(group: &GroupPattern, slots: &Slots) -> Vec<usize> {
    let mut names: Vec<Variable> = group.bound_variables();
    let mut blanks = Vec::new();
    collect_blanks(group, &mut blanks);
    names.extend(blanks);
    let mut out: Vec<usize> = names.iter().filter_map(|n| slots.get(n)).collect();
    out.sort_unstable();
    out.dedup();
    out
}

fn collect_blanks(group: &GroupPattern, out: &mut Vec<String>) {
    for el in &group.elements {
        match el {
            PatternElement::Triple(tp) => {
                for t in [&tp.subject, &tp.predicate, &tp.object] {
                    if let PatternTerm::Blank(l) = t {
                        out.push(blank_slot_name(l));
                    }
                }
            }
            PatternElement::Optional(g) => collect_blanks(g, out),
            PatternElement::Filter(_) => {}
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rdf::parse_turtle;
    use crate::sparql::parse_query;

    const DATA: &str = r#"
        @prefix : <http://ex.org/> .
        @prefix foaf: <http://xmlns.com/foaf/0.1/> .
        :alice a foaf:Person ; foaf:name "Alice" ; foaf:age 30 ; foaf:knows :bob .
        :bob a foaf:Person ; foaf:name "Bob" ; foaf:age 25 .
        :carol a foaf:Person ; foaf:age 41 .
    "#;

    fn run(q: &str) -> SolutionTable {
        let g = parse_turtle(DATA, None).unwrap();
        let query = parse_query(q, Some(g.prefixes())).unwrap();
        evaluate_local(&query, &g).unwrap()
    }

    fn values(t: &SolutionTable) -> Vec<Vec<Option<String>>> {
        t.as_bindings()
            .unwrap()
            .rows
            .iter()
            .map(|r| {
                r.iter()
                    .map(|c| c.as_ref().map(|t| t.value_str().to_string()))
                    .collect()
            })
            .collect()
    }

    #[test]
    fn basic_join_and_filter() {
        let t = run(
            "SELECT ?n WHERE { ?p a foaf:Person ; foaf:name ?n ; foaf:age ?a FILTER(?a > 26) }",
        );
        assert_eq!(values(&t), vec![vec![Some("Alice".into())]]);
    }

    #[test]
    fn optional_keeps_unmatched_rows() {
        let t =
            run("SELECT ?p ?n WHERE { ?p a foaf:Person OPTIONAL { ?p foaf:name ?n } } ORDER BY ?p");
        let v = values(&t);
        assert_eq!(v.len(), 3);
        assert_eq!(v[2], vec![Some("http://ex.org/carol".into()), None]);
    }

    #[test]
    fn count_over_empty_is_zero() {
        let t = run("SELECT (COUNT(?p) AS ?c) WHERE { ?p foaf:name \"Nobody\" }");
        assert_eq!(values(&t), vec![vec![Some("0".into())]]);
    }

    #[test]
    fn group_by_counts() {
        let t =
            run("SELECT ?p (COUNT(?o) AS ?c) WHERE { ?p ?x ?o } GROUP BY ?p ORDER BY DESC(?c) ?p");
        let v = values(&t);
        assert_eq!(
            v[0],
            vec![Some("http://ex.org/alice".into()), Some("4".into())]
        );
        assert_eq!(v.len(), 3);
    }

    #[test]
    fn order_limit_offset_distinct() {
        let t = run("SELECT DISTINCT ?t WHERE { ?p a ?t }");
        assert_eq!(t.row_count(), 1);
        let t = run("SELECT ?a WHERE { ?p foaf:age ?a } ORDER BY DESC(?a) LIMIT 2 OFFSET 1");
        assert_eq!(
            values(&t),
            vec![vec![Some("30".into())], vec![Some("25".into())]]
        );
    }

    #[test]
    fn ask_and_blank_pattern() {
        assert_eq!(
            run("ASK { :alice foaf:knows [] }"),
            SolutionTable::Boolean(true)
        );
        assert_eq!(
            run("ASK { :bob foaf:knows _:x }"),
            SolutionTable::Boolean(false)
        );
    }

    #[test]
    fn repeated_variable_in_pattern() {
        let t = run("SELECT ?s WHERE { ?s foaf:knows ?s }");
        assert_eq!(t.row_count(), 0);
    }
}
