use std::collections::HashMap;
use std::fmt;

use crate::exec::{Row, SolutionTable};

/// Why two result tables differ.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Mismatch {
    Kind {
        gold: &'static str,
        generated: &'static str,
    },
    Boolean {
        gold: bool,
        generated: bool,
    },
    Arity {
        gold: usize,
        generated: usize,
    },
    RowCount {
        gold: usize,
        generated: usize,
    },
    Rows,
    Order,
}

impl fmt::Display for Mismatch {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Mismatch::Kind { gold, generated } => write!(f, "result kind {gold} vs {generated}"),
            Mismatch::Boolean { gold, generated } => write!(f, "boolean {gold} vs {generated}"),
            Mismatch::Arity { gold, generated } => write!(f, "column count {gold} vs {generated}"),
            Mismatch::RowCount { gold, generated } => write!(f, "row count {gold} vs {generated}"),
            Mismatch::Rows => f.write_str("row values differ"),
            Mismatch::Order => f.write_str("same rows in a different order"),
        }
    }
}

fn kind(t: &SolutionTable) -> &'static str {
    match t {
        SolutionTable::Boolean(_) => "boolean",
        SolutionTable::Bindings(_) => "bindings",
    }
}

fn counts(rows: &[Row]) -> HashMap<&Row, usize> {
    let mut m = HashMap::new();
    for r in rows {
        *m.entry(r).or_insert(0) += 1;
    }
    m
}

/// Compares a generated table against the gold table.
///
/// Rows are compared by value in each table's own column order; variable
/// names are ignored. Tables are multisets of rows, sets when the gold query
/// had DISTINCT, and sequences when it had ORDER BY.
pub fn compare_solutions(gold: &SolutionTable, generated: &SolutionTable) -> Result<(), Mismatch> {
    let (g, x) = match (gold, generated) {
        (SolutionTable::Boolean(a), SolutionTable::Boolean(b)) => {
            return if a == b {
                Ok(())
            } else {
                Err(Mismatch::Boolean {
                    gold: *a,
                    generated: *b,
                })
            };
        }
        (SolutionTable::Bindings(g), SolutionTable::Bindings(x)) => (g, x),
        _ => {
            return Err(Mismatch::Kind {
                gold: kind(gold),
                generated: kind(generated),
            })
        }
    };
    if g.header.len() != x.header.len() {
        return Err(Mismatch::Arity {
            gold: g.header.len(),
            generated: x.header.len(),
        });
    }
    if g.ordered {
        if g.rows.len() != x.rows.len() {
            return Err(Mismatch::RowCount {
                gold: g.rows.len(),
                generated: x.rows.len(),
            });
        }
        if g.rows == x.rows {
            return Ok(());
        }
        return Err(if counts(&g.rows) == counts(&x.rows) {
            Mismatch::Order
        } else {
            Mismatch::Rows
        });
    }
    let (gc, xc) = (counts(&g.rows), counts(&x.rows));
    if g.distinct {
        if gc.len() != xc.len() {
            return Err(Mismatch::RowCount {
                gold: gc.len(),
                generated: xc.len(),
            });
        }
        return if gc.keys().all(|r| xc.contains_key(r)) {
            Ok(())
        } else {
            Err(Mismatch::Rows)
        };
    }
    if g.rows.len() != x.rows.len() {
        return Err(Mismatch::RowCount {
            gold: g.rows.len(),
            generated: x.rows.len(),
        });
    }
    if gc == xc {
        Ok(())
    } else {
        Err(Mismatch::Rows)
    }
}
