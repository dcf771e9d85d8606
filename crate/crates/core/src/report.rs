//! Analysis reports and their text and JSON renderings.
//!
//! The text form is line-oriented:
//!
//! ```text
//! 24 context properties
//! P0 do(1)
//! 4 abstract solvers
//! solver 1 cnvx?: 24 pairs
//! P0 -> P9
//! feasible from P0: 5 members
//! P0 do(1)
//! query minimizer: 2 solutions
//! P3 do(1) & stCnvx(f)
//! 0 diagnostics
//! ```
//!
//! Solution lines list the witnesses after `|`. [`parse_text`] reads the text
//! form back into a [`Report`].

use std::fmt::Write;

use serde::{Deserialize, Serialize};

use crate::abstraction::PropertyId;
use crate::analysis::Analysis;
use crate::dsl::{Diagnostic, DiagnosticKind, DslError};
use crate::fixpoint::QuerySolution;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PropertyRow {
    pub id: usize,
    pub text: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SolverRow {
    pub index: u32,
    pub pattern: String,
    pub pairs: Vec<(usize, usize)>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FeasibleRow {
    pub initial: usize,
    pub members: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SolutionRow {
    pub c0: usize,
    pub witnesses: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct QueryRow {
    pub name: String,
    pub solutions: Vec<SolutionRow>,
}

#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct Report {
    pub properties: Vec<PropertyRow>,
    pub solvers: Vec<SolverRow>,
    pub feasible: Option<FeasibleRow>,
    pub queries: Vec<QueryRow>,
    pub diagnostics: Vec<Diagnostic>,
}

impl Report {
    pub fn with_properties(analysis: &Analysis) -> Self {
        let properties = analysis
            .space
            .iter()
            .map(|p| PropertyRow { id: p.id.0, text: analysis.render(p.id) })
            .collect();
        Report { properties, ..Default::default() }
    }

    pub fn add_solvers(&mut self, analysis: &Analysis) {
        for (inst, solver) in analysis.instances.iter().zip(&analysis.solvers) {
            self.solvers.push(SolverRow {
                index: inst.index.0,
                pattern: inst.pattern.clone(),
                pairs: solver.pairs().map(|(a, b)| (a.0, b.0)).collect(),
            });
        }
    }

    pub fn set_feasible(&mut self, initial: PropertyId, members: impl IntoIterator<Item = PropertyId>) {
        self.feasible = Some(FeasibleRow { initial: initial.0, members: members.into_iter().map(|m| m.0).collect() });
    }

    pub fn add_query(&mut self, name: &str, solutions: &[QuerySolution]) {
        self.queries.push(QueryRow {
            name: name.to_string(),
            solutions: solutions
                .iter()
                .map(|s| SolutionRow { c0: s.c0.0, witnesses: s.witnesses.iter().map(|w| w.0).collect() })
                .collect(),
        });
    }

    fn text_of(&self, id: usize) -> &str {
        self.properties.iter().find(|p| p.id == id).map_or("?", |p| p.text.as_str())
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes") + "\n"
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        if !self.properties.is_empty() {
            writeln!(out, "{} context properties", self.properties.len()).unwrap();
            for p in &self.properties {
                writeln!(out, "P{} {}", p.id, p.text).unwrap();
            }
        }
        if !self.solvers.is_empty() {
            writeln!(out, "{} abstract solvers", self.solvers.len()).unwrap();
            for s in &self.solvers {
                writeln!(out, "solver {} {}: {} pairs", s.index, s.pattern, s.pairs.len()).unwrap();
                for (a, b) in &s.pairs {
                    writeln!(out, "P{a} -> P{b}").unwrap();
                }
            }
        }
        if let Some(f) = &self.feasible {
            writeln!(out, "feasible from P{}: {} members", f.initial, f.members.len()).unwrap();
            for m in &f.members {
                writeln!(out, "P{m} {}", self.text_of(*m)).unwrap();
            }
        }
        for q in &self.queries {
            writeln!(out, "query {}: {} solutions", q.name, q.solutions.len()).unwrap();
            for s in &q.solutions {
                write!(out, "P{} {}", s.c0, self.text_of(s.c0)).unwrap();
                for w in &s.witnesses {
                    write!(out, " | P{w} {}", self.text_of(*w)).unwrap();
                }
                out.push('\n');
            }
        }
        writeln!(out, "{} diagnostics", self.diagnostics.len()).unwrap();
        for d in &self.diagnostics {
            writeln!(out, "{}:{}: {}: {}", d.line, d.column, d.kind.as_str(), d.message).unwrap();
        }
        out
    }
}

pub fn syntax_diagnostic(err: &DslError) -> Diagnostic {
    let span = err.span();
    let message = match err {
        DslError::Syntax { message, .. } => message.clone(),
        other => {
            let full = other.to_string();
            let prefix = format!("{span}: ");
            full.strip_prefix(&prefix).map(str::to_string).unwrap_or(full)
        }
    };
    Diagnostic { kind: DiagnosticKind::Syntax, message, line: span.line, column: span.column }
}

fn parse_id(word: &str) -> Option<usize> {
    word.strip_prefix('P')?.parse().ok()
}

fn split_count<'a>(line: &'a str, suffix: &str) -> Option<(&'a str, usize)> {
    let (head, count) = line.strip_suffix(suffix)?.rsplit_once(": ")?;
    Some((head, count.parse().ok()?))
}

/// Reads [`Report::to_text`] output back. Returns `None` on malformed input.
pub fn parse_text(text: &str) -> Option<Report> {
    let mut report = Report::default();
    let mut lines = text.lines();
    let mut take = |n: usize| -> Option<Vec<&str>> {
        let mut out = Vec::with_capacity(n);
        for _ in 0..n {
            out.push(lines.next()?);
        }
        Some(out)
    };
    while let Some(line) = take(1).map(|l| l[0]) {
        if let Some(n) = line.strip_suffix(" context properties") {
            for row in take(n.parse().ok()?)? {
                let (id, rest) = row.split_once(' ')?;
                report.properties.push(PropertyRow { id: parse_id(id)?, text: rest.to_string() });
            }
        } else if let Some(n) = line.strip_suffix(" abstract solvers") {
            for _ in 0..n.parse().ok()? {
                let header = take(1)?[0];
                let (head, count) = split_count(header, " pairs")?;
                let mut words = head.strip_prefix("solver ")?.splitn(2, ' ');
                let index = words.next()?.parse().ok()?;
                let pattern = words.next()?.to_string();
                let mut pairs = Vec::new();
                for row in take(count)? {
                    let (a, b) = row.split_once(" -> ")?;
                    pairs.push((parse_id(a)?, parse_id(b)?));
                }
                report.solvers.push(SolverRow { index, pattern, pairs });
            }
        } else if let Some(rest) = line.strip_prefix("feasible from ") {
            let (initial, count) = split_count(rest, " members")?;
            let mut members = Vec::new();
            for row in take(count)? {
                members.push(parse_id(row.split(' ').next()?)?);
            }
            report.feasible = Some(FeasibleRow { initial: parse_id(initial)?, members });
        } else if let Some(rest) = line.strip_prefix("query ") {
            let (name, count) = split_count(rest, " solutions")?;
            let mut solutions = Vec::new();
            for row in take(count)? {
                let mut parts = row.split(" | ").map(|p| parse_id(p.split(' ').next()?));
                let c0 = parts.next()??;
                let witnesses = parts.collect::<Option<Vec<_>>>()?;
                solutions.push(SolutionRow { c0, witnesses });
            }
            report.queries.push(QueryRow { name: name.to_string(), solutions });
        } else {
            let n = line.strip_suffix(" diagnostics")?;
            for row in take(n.parse().ok()?)? {
                let mut parts = row.splitn(3, ": ");
                let (line, column) = parts.next()?.split_once(':')?;
                let kind = DiagnosticKind::parse(parts.next()?)?;
                report.diagnostics.push(Diagnostic {
                    kind,
                    message: parts.next()?.to_string(),
                    line: line.parse().ok()?,
                    column: column.parse().ok()?,
                });
            }
        }
    }
    Some(report)
}
