//! A fragment of the LogiCalc set-constraint language: integers, tuples,
//! finite sets, comprehensions and union. Used as an export format for the
//! generated constraint system and as an independent engine for re-solving it.

mod eval;
mod export;
mod parse;

use std::collections::BTreeSet;
use std::fmt;

use thiserror::Error;

pub use eval::{eval_logicalc, Bindings};
pub use export::{data_names, export_logicalc, property_code};
pub use parse::{parse_logicalc, parse_value};

/// Line and column, 1-based.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct Location {
    pub line: usize,
    pub column: usize,
}

impl fmt::Display for Location {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.line, self.column)
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum LcError {
    #[error("{location}: syntax error: {message}")]
    Syntax { location: Location, message: String },
    #[error("{location}: unsupported LogiCalc feature: {feature}")]
    Unsupported { location: Location, feature: String },
    #[error("{location}: unbound name `{name}`")]
    Unbound { location: Location, name: String },
    #[error("{location}: equation for `{name}` is not monotone: {reason}")]
    NonMonotone { location: Location, name: String, reason: String },
    #[error("{location}: type error: {message}")]
    Type { location: Location, message: String },
    #[error("{location}: constraint does not hold")]
    ConstraintViolated { location: Location },
    #[error("recursive equations did not stabilize")]
    Divergent,
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum LcValue {
    Int(i64),
    Tuple(Vec<LcValue>),
    Set(BTreeSet<LcValue>),
}

impl LcValue {
    pub fn pair(a: LcValue, b: LcValue) -> LcValue {
        LcValue::Tuple(vec![a, b])
    }

    pub fn as_set(&self) -> Option<&BTreeSet<LcValue>> {
        match self {
            LcValue::Set(s) => Some(s),
            _ => None,
        }
    }
}

impl fmt::Display for LcValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LcValue::Int(n) => write!(f, "{n}"),
            LcValue::Tuple(items) => {
                f.write_str("(")?;
                for (i, item) in items.iter().enumerate() {
                    if i > 0 {
                        f.write_str(", ")?;
                    }
                    write!(f, "{item}")?;
                }
                f.write_str(")")
            }
            LcValue::Set(items) => {
                if items.is_empty() {
                    return f.write_str("{}");
                }
                f.write_str("{ ")?;
                for (i, item) in items.iter().enumerate() {
                    if i > 0 {
                        f.write_str(", ")?;
                    }
                    write!(f, "{item}")?;
                }
                f.write_str(" }")
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ArithOp {
    Add,
    Sub,
    Mul,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Expr {
    Int(i64),
    Name(String, Location),
    Tuple(Vec<Expr>),
    Set(Vec<Expr>),
    Comprehension { head: Box<Expr>, qualifiers: Vec<Qualifier> },
    Union(Box<Expr>, Box<Expr>),
    Arith(ArithOp, Box<Expr>, Box<Expr>),
}

/// Left-hand side of a generator: binds fresh names, compares bound ones.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Pat {
    Var(String),
    Int(i64),
    Tuple(Vec<Pat>),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Qualifier {
    Generator { pattern: Pat, source: Expr },
    /// `lhs <= rhs` over integers.
    Guard { lhs: Expr, rhs: Expr },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Relation {
    Eq,
    Subset,
    In,
    Le,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Statement {
    pub lhs: Expr,
    pub relation: Relation,
    pub rhs: Expr,
    pub location: Location,
}

impl Statement {
    /// `name = rhs`, the only form that can bind a name.
    pub fn definition(&self) -> Option<(&str, &Expr)> {
        match (&self.lhs, self.relation) {
            (Expr::Name(name, _), Relation::Eq) => Some((name, &self.rhs)),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct LcModel {
    pub statements: Vec<Statement>,
}

impl Expr {
    /// Free names, excluding those bound by comprehension generators.
    pub fn free_names(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.collect_free(&mut Vec::new(), &mut out);
        out
    }

    fn collect_free(&self, bound: &mut Vec<String>, out: &mut BTreeSet<String>) {
        match self {
            Expr::Int(_) => {}
            Expr::Name(n, _) => {
                if !bound.contains(n) {
                    out.insert(n.clone());
                }
            }
            Expr::Tuple(items) | Expr::Set(items) => {
                items.iter().for_each(|e| e.collect_free(bound, out));
            }
            Expr::Union(a, b) | Expr::Arith(_, a, b) => {
                a.collect_free(bound, out);
                b.collect_free(bound, out);
            }
            Expr::Comprehension { head, qualifiers } => {
                let depth = bound.len();
                for q in qualifiers {
                    match q {
                        Qualifier::Generator { pattern, source } => {
                            source.collect_free(bound, out);
                            pattern.vars(bound);
                        }
                        Qualifier::Guard { lhs, rhs } => {
                            lhs.collect_free(bound, out);
                            rhs.collect_free(bound, out);
                        }
                    }
                }
                head.collect_free(bound, out);
                bound.truncate(depth);
            }
        }
    }
}

impl Pat {
    fn vars(&self, out: &mut Vec<String>) {
        match self {
            Pat::Var(v) => out.push(v.clone()),
            Pat::Int(_) => {}
            Pat::Tuple(items) => items.iter().for_each(|p| p.vars(out)),
        }
    }
}
