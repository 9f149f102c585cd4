//! Random instance generators and a brute-force query oracle for the
//! acceptance suite.

use std::collections::BTreeSet;

use textsparql_core::dataset::SplitMix64;
use textsparql_core::exec::row_order;
use textsparql_core::rdf::GraphBuilder;
use textsparql_core::{Graph, Term, Triple};

pub const EX: &str = "http://example.org/";

pub struct Rng(SplitMix64);

impl Rng {
    pub fn new(seed: u64) -> Self {
        Rng(SplitMix64::new(seed))
    }

    pub fn below(&mut self, n: usize) -> usize {
        self.0.below(n as u64) as usize
    }

    pub fn chance(&mut self, percent: usize) -> bool {
        self.below(100) < percent
    }

    pub fn pick<'a, T>(&mut self, items: &'a [T]) -> &'a T {
        &items[self.below(items.len())]
    }

    pub fn byte(&mut self) -> u8 {
        self.0.next_u64() as u8
    }
}

pub fn iri(local: &str) -> Term {
    Term::iri(format!("{EX}{local}"))
}

fn subjects() -> Vec<Term> {
    ["a", "b", "c", "d", "e"].iter().map(|s| iri(s)).collect()
}

fn predicates() -> Vec<Term> {
    ["p", "q", "r"].iter().map(|s| iri(s)).collect()
}

fn objects() -> Vec<Term> {
    let mut v = subjects();
    v.extend([
        Term::literal("x"),
        Term::literal("y"),
        Term::integer(1),
        Term::integer(2),
    ]);
    v
}

/// A graph of at most 30 triples over a small vocabulary, so random
/// patterns have a fair chance to match.
pub fn random_graph(rng: &mut Rng) -> Graph {
    let (s, p, o) = (subjects(), predicates(), objects());
    let mut b = GraphBuilder::new();
    let n = rng.below(31);
    for _ in 0..n {
        let t = Triple::new(
            rng.pick(&s).clone(),
            rng.pick(&p).clone(),
            rng.pick(&o).clone(),
        )
        .expect("valid triple");
        b.insert(t);
    }
    b.build()
}

/// A position in a generated triple pattern.
#[derive(Debug, Clone, PartialEq)]
pub enum Slot {
    Var(usize),
    Const(Term),
}

#[derive(Debug, Clone)]
pub enum Filter {
    /// `?v = term`
    Eq(usize, Term),
    /// `?v != <iri>`
    NeIri(usize, Term),
}

#[derive(Debug, Clone)]
pub enum Form {
    Select { vars: Vec<usize>, distinct: bool },
    SelectAll,
    Ask,
    CountAll,
}

/// Variable 0..=2 are named `?v0..?v2`; variable 3 is the blank node `_:b`.
#[derive(Debug, Clone)]
pub struct QuerySpec {
    pub patterns: Vec<[Slot; 3]>,
    pub filter: Option<Filter>,
    pub form: Form,
}

const BLANK: usize = 3;

fn slot_text(s: &Slot) -> String {
    match s {
        Slot::Var(BLANK) => "_:b".to_string(),
        Slot::Var(i) => format!("?v{i}"),
        Slot::Const(t) => t.to_string(),
    }
}

impl QuerySpec {
    pub fn vars(&self) -> BTreeSet<usize> {
        self.patterns
            .iter()
            .flatten()
            .filter_map(|s| if let Slot::Var(i) = s { Some(*i) } else { None })
            .collect()
    }

    pub fn named_vars(&self) -> Vec<usize> {
        self.vars().into_iter().filter(|&v| v != BLANK).collect()
    }

    pub fn text(&self) -> String {
        let mut body: Vec<String> = self
            .patterns
            .iter()
            .map(|p| {
                format!(
                    "{} {} {} .",
                    slot_text(&p[0]),
                    slot_text(&p[1]),
                    slot_text(&p[2])
                )
            })
            .collect();
        match &self.filter {
            Some(Filter::Eq(v, t)) => body.push(format!("FILTER(?v{v} = {t})")),
            Some(Filter::NeIri(v, t)) => body.push(format!("FILTER(?v{v} != {t})")),
            None => {}
        }
        let body = body.join(" ");
        match &self.form {
            Form::Select { vars, distinct } => {
                let vars: Vec<String> = vars.iter().map(|v| format!("?v{v}")).collect();
                let d = if *distinct { "DISTINCT " } else { "" };
                format!("SELECT {d}{} WHERE {{ {body} }}", vars.join(" "))
            }
            Form::SelectAll => format!("SELECT * WHERE {{ {body} }}"),
            Form::Ask => format!("ASK {{ {body} }}"),
            Form::CountAll => format!("SELECT (COUNT(*) AS ?n) WHERE {{ {body} }}"),
        }
    }
}

/// One to three patterns over at most three variables, one of which may
/// be a blank node. Projection only uses variables the patterns bind.
pub fn random_query(rng: &mut Rng) -> QuerySpec {
    let (s, p, o) = (subjects(), predicates(), objects());
    let n = 1 + rng.below(3);
    let var = |rng: &mut Rng| Slot::Var(if rng.chance(15) { BLANK } else { rng.below(3) });
    let patterns: Vec<[Slot; 3]> = (0..n)
        .map(|_| {
            let subj = if rng.chance(60) {
                var(rng)
            } else {
                Slot::Const(rng.pick(&s).clone())
            };
            let pred = if rng.chance(25) {
                Slot::Var(rng.below(3))
            } else {
                Slot::Const(rng.pick(&p).clone())
            };
            let obj = if rng.chance(60) {
                var(rng)
            } else {
                Slot::Const(rng.pick(&o).clone())
            };
            [subj, pred, obj]
        })
        .collect();
    let mut spec = QuerySpec {
        patterns,
        filter: None,
        form: Form::Ask,
    };
    if spec.vars().len() > 3 {
        for slot in spec.patterns.iter_mut().flatten() {
            if *slot == Slot::Var(BLANK) {
                *slot = Slot::Var(2);
            }
        }
    }
    let named = spec.named_vars();
    if !named.is_empty() && rng.chance(30) {
        let v = *rng.pick(&named);
        spec.filter = Some(if rng.chance(50) {
            Filter::Eq(v, rng.pick(&o).clone())
        } else {
            Filter::NeIri(v, rng.pick(&s).clone())
        });
    }
    spec.form = match rng.below(10) {
        0 => Form::Ask,
        1 => Form::CountAll,
        2 if !named.is_empty() => Form::SelectAll,
        _ if !named.is_empty() => {
            let mut vars: Vec<usize> = named.iter().copied().filter(|_| rng.chance(60)).collect();
            if vars.is_empty() {
                vars.push(named[0]);
            }
            if rng.chance(30) {
                vars.reverse();
            }
            Form::Select {
                vars,
                distinct: rng.chance(30),
            }
        }
        _ => Form::Ask,
    };
    spec
}

/// Oracle answer: `Ok(bool)` for ASK, otherwise header names and rows.
#[derive(Debug, PartialEq)]
pub enum Answer {
    Boolean(bool),
    Rows(Vec<String>, Vec<Vec<Option<Term>>>),
}

/// Evaluates `spec` by enumerating every assignment of graph terms to the
/// query's variables and keeping those under which each instantiated
/// pattern is a triple of the graph.
pub fn brute_force(spec: &QuerySpec, graph: &Graph) -> Answer {
    let vars: Vec<usize> = spec.vars().into_iter().collect();
    let mut domain: BTreeSet<Term> = BTreeSet::new();
    for t in graph.triples() {
        domain.extend([t.subject.clone(), t.predicate.clone(), t.object.clone()]);
    }
    let domain: Vec<Term> = domain.into_iter().collect();
    let mut solutions: Vec<Vec<Term>> = Vec::new();
    let total = domain.len().pow(vars.len() as u32);
    for mut code in 0..total {
        let mut assignment = vec![None; 4];
        for &v in &vars {
            assignment[v] = Some(domain[code % domain.len()].clone());
            code /= domain.len();
        }
        let value = |s: &Slot| match s {
            Slot::Var(i) => assignment[*i].clone().expect("assigned"),
            Slot::Const(t) => t.clone(),
        };
        let all_match = spec.patterns.iter().all(|p| {
            match Triple::new(value(&p[0]), value(&p[1]), value(&p[2])) {
                Some(t) => graph.contains(&t),
                None => false,
            }
        });
        let keep = all_match
            && match &spec.filter {
                None => true,
                Some(Filter::Eq(v, t)) => assignment[*v].as_ref() == Some(t),
                Some(Filter::NeIri(v, t)) => assignment[*v].as_ref() != Some(t),
            };
        if keep {
            solutions.push(
                assignment
                    .into_iter()
                    .map(|t| t.unwrap_or_else(|| Term::literal("")))
                    .collect(),
            );
        }
    }
    let project = |vs: &[usize]| -> Vec<Vec<Option<Term>>> {
        solutions
            .iter()
            .map(|s| vs.iter().map(|&v| Some(s[v].clone())).collect())
            .collect()
    };
    match &spec.form {
        Form::Ask => Answer::Boolean(!solutions.is_empty()),
        Form::CountAll => Answer::Rows(
            vec!["n".into()],
            vec![vec![Some(Term::integer(solutions.len() as i64))]],
        ),
        Form::SelectAll => {
            let named = spec.named_vars();
            Answer::Rows(
                named.iter().map(|v| format!("v{v}")).collect(),
                project(&named),
            )
        }
        Form::Select { vars, distinct } => {
            let mut rows = project(vars);
            if *distinct {
                rows.sort_by(|a, b| row_order(a, b));
                rows.dedup();
            }
            Answer::Rows(vars.iter().map(|v| format!("v{v}")).collect(), rows)
        }
    }
}

/// Rows sorted canonically, for multiset comparison.
pub fn sorted(mut rows: Vec<Vec<Option<Term>>>) -> Vec<Vec<Option<Term>>> {
    rows.sort_by(|a, b| row_order(a, b));
    rows
}
