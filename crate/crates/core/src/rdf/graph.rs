use std::collections::{HashMap, HashSet};
use std::fs;
use std::path::{Path, PathBuf};

use super::turtle::{TurtleError, TurtleParser};
use super::{PrefixMap, Term, Triple};

/// An immutable, indexed set of triples.
///
/// Triples are kept sorted by their canonical (N-Triples) serialization, and
/// every lookup returns matches in that order.
#[derive(Debug, Clone, Default)]
pub struct Graph {
    triples: Vec<Triple>,
    by_subject: HashMap<Term, Vec<u32>>,
    by_predicate: HashMap<Term, Vec<u32>>,
    by_object: HashMap<Term, Vec<u32>>,
    prefixes: PrefixMap,
}

/// Accumulates triples with set semantics, then freezes into a [`Graph`].
#[derive(Debug, Default)]
pub struct GraphBuilder {
    triples: HashSet<Triple>,
    prefixes: PrefixMap,
}

impl GraphBuilder {
    pub fn new() -> Self {
        Self::default()
    }

    /// Returns `false` when the triple was already present.
    pub fn insert(&mut self, triple: Triple) -> bool {
        self.triples.insert(triple)
    }

    pub fn add_prefix(&mut self, prefix: impl Into<String>, iri: impl Into<String>) {
        self.prefixes.insert(prefix.into(), iri.into());
    }

    pub fn len(&self) -> usize {
        self.triples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.triples.is_empty()
    }

    pub fn extend_from(&mut self, graph: &Graph) {
        self.triples.extend(graph.triples.iter().cloned());
        for (k, v) in &graph.prefixes {
            self.prefixes.entry(k.clone()).or_insert_with(|| v.clone());
        }
    }

    pub fn build(self) -> Graph {
        let mut keyed: Vec<_> = self
            .triples
            .into_iter()
            .map(|t| (t.canonical_key(), t))
            .collect();
        keyed.sort_by(|a, b| a.0.cmp(&b.0));
        let triples: Vec<Triple> = keyed.into_iter().map(|(_, t)| t).collect();

        let mut by_subject: HashMap<Term, Vec<u32>> = HashMap::new();
        let mut by_predicate: HashMap<Term, Vec<u32>> = HashMap::new();
        let mut by_object: HashMap<Term, Vec<u32>> = HashMap::new();
        for (i, t) in triples.iter().enumerate() {
            let i = i as u32;
            by_subject.entry(t.subject.clone()).or_default().push(i);
            by_predicate.entry(t.predicate.clone()).or_default().push(i);
            by_object.entry(t.object.clone()).or_default().push(i);
        }
        Graph {
            triples,
            by_subject,
            by_predicate,
            by_object,
            prefixes: self.prefixes,
        }
    }
}

impl FromIterator<Triple> for Graph {
    fn from_iter<I: IntoIterator<Item = Triple>>(iter: I) -> Self {
        let mut builder = GraphBuilder::new();
        for t in iter {
            builder.insert(t);
        }
        builder.build()
    }
}

/// Graphs are equal when they hold the same triple set; prefixes are ignored.
impl PartialEq for Graph {
    fn eq(&self, other: &Self) -> bool {
        self.triples == other.triples
    }
}

impl Eq for Graph {}

impl Graph {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn len(&self) -> usize {
        self.triples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.triples.is_empty()
    }

    /// All triples in canonical order.
    pub fn triples(&self) -> &[Triple] {
        &self.triples
    }

    pub fn prefixes(&self) -> &PrefixMap {
        &self.prefixes
    }

    pub fn contains(&self, triple: &Triple) -> bool {
        self.match_pattern(
            Some(&triple.subject),
            Some(&triple.predicate),
            Some(&triple.object),
        )
        .next()
        .is_some()
    }

    /// Triples matching every bound component, in canonical order.
    pub fn match_pattern<'a>(
        &'a self,
        s: Option<&Term>,
        p: Option<&Term>,
        o: Option<&Term>,
    ) -> impl Iterator<Item = &'a Triple> + 'a {
        let mut postings: Vec<&[u32]> = Vec::with_capacity(3);
        let mut missing = false;
        for (term, index) in [
            (s, &self.by_subject),
            (p, &self.by_predicate),
            (o, &self.by_object),
        ] {
            if let Some(term) = term {
                match index.get(term) {
                    Some(list) => postings.push(list),
                    None => missing = true,
                }
            }
        }
        let (s, p, o) = (s.cloned(), p.cloned(), o.cloned());
        let candidates: Box<dyn Iterator<Item = u32> + 'a> = if missing {
            Box::new(std::iter::empty())
        } else if let Some(shortest) = postings.iter().copied().min_by_key(|l| l.len()) {
            Box::new(shortest.iter().copied())
        } else {
            Box::new(0..self.triples.len() as u32)
        };
        candidates
            .map(move |i| &self.triples[i as usize])
            .filter(move |t| {
                s.as_ref().is_none_or(|s| &t.subject == s)
                    && p.as_ref().is_none_or(|p| &t.predicate == p)
                    && o.as_ref().is_none_or(|o| &t.object == o)
            })
    }

    /// Number of triples matching the pattern, used by the join planner.
    pub fn estimate(&self, s: Option<&Term>, p: Option<&Term>, o: Option<&Term>) -> usize {
        let mut best = self.triples.len();
        for (term, index) in [
            (s, &self.by_subject),
            (p, &self.by_predicate),
            (o, &self.by_object),
        ] {
            if let Some(term) = term {
                best = best.min(index.get(term).map_or(0, Vec::len));
            }
        }
        best
    }
}

#[derive(Debug, thiserror::Error)]
pub enum GraphLoadError {
    #[error("reading {path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("{path}:{source}")]
    Turtle { path: PathBuf, source: TurtleError },
    #[error("{0}: no Turtle files found")]
    Empty(PathBuf),
}

/// Loads Turtle files and directories of `.ttl` files into one graph.
///
/// With more than one source document, blank node labels are prefixed with
/// the document's position so labels from different files never collide.
pub fn load_graph(paths: &[PathBuf]) -> Result<Graph, GraphLoadError> {
    let mut files = Vec::new();
    for path in paths {
        if path.is_dir() {
            let mut found: Vec<PathBuf> = fs::read_dir(path)
                .map_err(|source| GraphLoadError::Io {
                    path: path.clone(),
                    source,
                })?
                .filter_map(|e| e.ok().map(|e| e.path()))
                .filter(|p| p.extension().is_some_and(|ext| ext == "ttl"))
                .collect();
            if found.is_empty() {
                return Err(GraphLoadError::Empty(path.clone()));
            }
            found.sort();
            files.extend(found);
        } else {
            files.push(path.clone());
        }
    }

    let rename = files.len() > 1;
    let mut builder = GraphBuilder::new();
    for (i, file) in files.iter().enumerate() {
        let text = fs::read_to_string(file).map_err(|source| GraphLoadError::Io {
            path: file.clone(),
            source,
        })?;
        let mut parser = TurtleParser::new().base(file_base_iri(file));
        if rename {
            parser = parser.blank_prefix(format!("f{i}_"));
        }
        let graph = parser
            .parse(&text)
            .map_err(|source| GraphLoadError::Turtle {
                path: file.clone(),
                source,
            })?;
        builder.extend_from(&graph);
    }
    Ok(builder.build())
}

fn file_base_iri(path: &Path) -> String {
    let abs = fs::canonicalize(path).unwrap_or_else(|_| path.to_path_buf());
    format!("file://{}", abs.display())
}
