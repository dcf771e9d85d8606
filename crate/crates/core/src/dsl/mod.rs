//! Input language: patterns, axioms, solver instances, initial context and
//! queries.
//!
//! ```text
//! pattern dscnt(ro F, X; S) {
//!   do(self) & stCnvx(F) -> do(S) & min(F, X);
//!   do(self) -> do(S);
//! }
//! axiom stCnvx(F) => cnvx(F);
//! solver 2 = dscnt(f, x; 4);
//! initial do(1);
//! query minimizer { given do(1); forbid do(4) unless min(f, x); }
//! ```

mod parser;
pub(crate) mod validate;

use std::collections::BTreeMap;
use std::fmt;

use thiserror::Error;

use crate::logic::{Atom, Conjunction, ImplicationAxiom, LogicError, Theory};
use crate::patterns::Pattern;

pub use parser::{parse_prop_expr, parse_spec};
pub use validate::{validate_spec, Diagnostic, DiagnosticKind};

/// Source position, 1-based. Positions never take part in equality so that
/// re-parsed models compare equal to the originals.
#[derive(Debug, Clone, Copy, Default)]
pub struct Span {
    pub line: usize,
    pub column: usize,
}

impl PartialEq for Span {
    fn eq(&self, _: &Self) -> bool {
        true
    }
}

impl Eq for Span {}

impl fmt::Display for Span {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.line, self.column)
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum DslError {
    #[error("{span}: syntax error: {message}")]
    Syntax { span: Span, message: String },
    #[error("{span}: pattern `{name}` is defined twice")]
    DuplicatePattern { span: Span, name: String },
    #[error("{span}: query `{name}` is defined twice")]
    DuplicateQuery { span: Span, name: String },
    #[error("{span}: predicate `{predicate}` used with {found} argument(s), earlier with {expected}")]
    ArityConflict {
        span: Span,
        predicate: String,
        expected: usize,
        found: usize,
    },
    #[error("{span}: {source}")]
    Logic {
        span: Span,
        #[source]
        source: LogicError,
    },
}

impl DslError {
    pub fn span(&self) -> Span {
        match self {
            DslError::Syntax { span, .. }
            | DslError::DuplicatePattern { span, .. }
            | DslError::DuplicateQuery { span, .. }
            | DslError::ArityConflict { span, .. }
            | DslError::Logic { span, .. } => *span,
        }
    }
}

/// A ground conjunction as written; `true` is the empty list.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PropExpr {
    pub atoms: Vec<Atom>,
    pub span: Span,
}

impl PropExpr {
    pub fn resolve(&self, theory: &Theory) -> Result<Conjunction, LogicError> {
        theory.close_atoms(self.atoms.iter().cloned())
    }
}

impl fmt::Display for PropExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.atoms.is_empty() {
            return f.write_str("true");
        }
        let parts: Vec<String> = self.atoms.iter().map(Atom::to_string).collect();
        f.write_str(&parts.join(" & "))
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum QueryClause {
    Given(PropExpr),
    Forbid { matches: PropExpr, unless: Option<PropExpr> },
    Exists(PropExpr),
}

impl QueryClause {
    pub fn exprs(&self) -> Vec<&PropExpr> {
        match self {
            QueryClause::Given(e) | QueryClause::Exists(e) => vec![e],
            QueryClause::Forbid { matches, unless } => std::iter::once(matches).chain(unless).collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QueryDecl {
    pub name: String,
    pub clauses: Vec<QueryClause>,
    pub span: Span,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PatternDecl {
    pub pattern: Pattern,
    pub span: Span,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AxiomDecl {
    pub axiom: ImplicationAxiom,
    pub span: Span,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InstanceDecl {
    pub index: u32,
    pub pattern: String,
    pub data_args: Vec<String>,
    pub ctrl_args: Vec<u32>,
    pub span: Span,
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct SpecModel {
    /// Arity of every predicate used anywhere in the text.
    pub predicates: BTreeMap<String, usize>,
    pub patterns: Vec<PatternDecl>,
    pub axioms: Vec<AxiomDecl>,
    pub instances: Vec<InstanceDecl>,
    pub initial: Option<PropExpr>,
    pub queries: Vec<QueryDecl>,
}

impl SpecModel {
    pub fn pattern(&self, name: &str) -> Option<&Pattern> {
        self.patterns.iter().map(|p| &p.pattern).find(|p| p.name == name)
    }

    pub fn query(&self, name: &str) -> Option<&QueryDecl> {
        self.queries.iter().find(|q| q.name == name)
    }

    /// Predicates introduced by patterns or axioms, as opposed to ones that
    /// only appear in queries or the initial context.
    pub fn declared_predicates(&self) -> BTreeMap<&str, usize> {
        let mut out = BTreeMap::new();
        for decl in &self.patterns {
            for rule in &decl.pattern.rules {
                for atom in rule.pre.atoms.iter().chain(&rule.post.atoms) {
                    out.insert(atom.predicate.as_str(), atom.params.len());
                }
            }
        }
        for decl in &self.axioms {
            for schema in [decl.axiom.premise(), decl.axiom.conclusion()] {
                out.insert(schema.predicate.as_str(), schema.vars.len());
            }
        }
        out
    }

    /// Arities and axioms as a [`Theory`].
    pub fn theory(&self) -> Result<Theory, DslError> {
        let mut theory = Theory::new();
        for (predicate, &arity) in &self.predicates {
            theory
                .declare(predicate, arity)
                .map_err(|source| DslError::Logic { span: Span::default(), source })?;
        }
        for decl in &self.axioms {
            theory
                .add_axiom(decl.axiom.clone())
                .map_err(|source| DslError::Logic { span: decl.span, source })?;
        }
        Ok(theory)
    }
}

impl fmt::Display for SpecModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for decl in &self.patterns {
            let p = &decl.pattern;
            let data: Vec<String> = p
                .data_params
                .iter()
                .map(|d| if d.read_only { format!("ro {}", d.name) } else { d.name.clone() })
                .collect();
            writeln!(f, "pattern {}({}; {}) {{", p.name, data.join(", "), p.ctrl_params.join(", "))?;
            for rule in &p.rules {
                writeln!(f, "  {} -> {};", rule.pre, rule.post)?;
            }
            writeln!(f, "}}")?;
        }
        for decl in &self.axioms {
            writeln!(f, "axiom {};", decl.axiom)?;
        }
        for inst in &self.instances {
            let ctrl: Vec<String> = inst.ctrl_args.iter().map(u32::to_string).collect();
            writeln!(
                f,
                "solver {} = {}({}; {});",
                inst.index,
                inst.pattern,
                inst.data_args.join(", "),
                ctrl.join(", ")
            )?;
        }
        if let Some(initial) = &self.initial {
            writeln!(f, "initial {initial};")?;
        }
        for query in &self.queries {
            writeln!(f, "query {} {{", query.name)?;
            for clause in &query.clauses {
                match clause {
                    QueryClause::Given(e) => writeln!(f, "  given {e};")?,
                    QueryClause::Exists(e) => writeln!(f, "  exists {e};")?,
                    QueryClause::Forbid { matches, unless: None } => writeln!(f, "  forbid {matches};")?,
                    QueryClause::Forbid { matches, unless: Some(u) } => {
                        writeln!(f, "  forbid {matches} unless {u};")?
                    }
                }
            }
            writeln!(f, "}}")?;
        }
        Ok(())
    }
}
