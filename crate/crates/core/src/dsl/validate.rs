use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use super::{PropExpr, Span, SpecModel};
use crate::logic::{SolverIndex, Theory};
use crate::patterns::{collect_data_atoms, instantiate, Instance, PatternError};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DiagnosticKind {
    Syntax,
    MissingCatchAll,
    PatternStructure,
    UnknownPattern,
    Instantiation,
    InstanceIndexing,
    UnknownTarget,
    InvalidInitial,
    UnknownPredicate,
    OutOfUniverse,
    Theory,
}

impl DiagnosticKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            DiagnosticKind::Syntax => "syntax",
            DiagnosticKind::MissingCatchAll => "missing-catch-all",
            DiagnosticKind::PatternStructure => "pattern-structure",
            DiagnosticKind::UnknownPattern => "unknown-pattern",
            DiagnosticKind::Instantiation => "instantiation",
            DiagnosticKind::InstanceIndexing => "instance-indexing",
            DiagnosticKind::UnknownTarget => "unknown-target",
            DiagnosticKind::InvalidInitial => "invalid-initial",
            DiagnosticKind::UnknownPredicate => "unknown-predicate",
            DiagnosticKind::OutOfUniverse => "out-of-universe",
            DiagnosticKind::Theory => "theory",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        use DiagnosticKind::*;
        [
            Syntax,
            MissingCatchAll,
            PatternStructure,
            UnknownPattern,
            Instantiation,
            InstanceIndexing,
            UnknownTarget,
            InvalidInitial,
            UnknownPredicate,
            OutOfUniverse,
            Theory,
        ]
        .into_iter()
        .find(|k| k.as_str() == s)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Diagnostic {
    pub kind: DiagnosticKind,
    pub message: String,
    pub line: usize,
    pub column: usize,
}

impl Diagnostic {
    pub(crate) fn new(kind: DiagnosticKind, span: Span, message: impl Into<String>) -> Self {
        Diagnostic { kind, message: message.into(), line: span.line, column: span.column }
    }
}

/// Instantiates every solver declaration that refers to a known pattern.
pub(crate) fn instantiate_all(
    model: &SpecModel,
    theory: &Theory,
) -> (Vec<Instance>, Vec<Diagnostic>) {
    let mut instances = Vec::new();
    let mut diagnostics = Vec::new();
    for decl in &model.instances {
        let Some(pattern) = model.pattern(&decl.pattern) else {
            diagnostics.push(Diagnostic::new(
                DiagnosticKind::UnknownPattern,
                decl.span,
                format!("solver {} uses undefined pattern `{}`", decl.index, decl.pattern),
            ));
            continue;
        };
        let ctrl: Vec<SolverIndex> = decl.ctrl_args.iter().copied().map(SolverIndex).collect();
        match instantiate(pattern, SolverIndex(decl.index), &decl.data_args, &ctrl, theory) {
            Ok(instance) => instances.push(instance),
            // Structural pattern problems are reported once per pattern.
            Err(PatternError::MissingCatchAll { .. })
            | Err(PatternError::NoRules { .. })
            | Err(PatternError::UnboundVariable { .. })
            | Err(PatternError::ControlParamInAtom { .. })
            | Err(PatternError::DuplicateParam { .. })
            | Err(PatternError::PreconditionNotSelf { .. }) => {}
            Err(err) => diagnostics.push(Diagnostic::new(
                DiagnosticKind::Instantiation,
                decl.span,
                format!("solver {}: {err}", decl.index),
            )),
        }
    }
    (instances, diagnostics)
}

/// Checks a parsed model; an empty result means it is ready for analysis.
pub fn validate_spec(model: &SpecModel) -> Vec<Diagnostic> {
    let mut out = Vec::new();

    for decl in &model.patterns {
        for err in decl.pattern.validate() {
            let kind = match err {
                PatternError::MissingCatchAll { .. } => DiagnosticKind::MissingCatchAll,
                _ => DiagnosticKind::PatternStructure,
            };
            out.push(Diagnostic::new(kind, decl.span, err.to_string()));
        }
    }

    let theory = match model.theory() {
        Ok(t) => t,
        Err(err) => {
            out.push(Diagnostic::new(DiagnosticKind::Theory, err.span(), err.to_string()));
            return out;
        }
    };

    let n = model.instances.len() as u32;
    let mut seen = BTreeSet::new();
    for decl in &model.instances {
        if decl.index == 0 || decl.index > n {
            out.push(Diagnostic::new(
                DiagnosticKind::InstanceIndexing,
                decl.span,
                format!("solver index {} is outside 1..{n}", decl.index),
            ));
        } else if !seen.insert(decl.index) {
            out.push(Diagnostic::new(
                DiagnosticKind::InstanceIndexing,
                decl.span,
                format!("solver {} is declared twice", decl.index),
            ));
        }
        for &target in &decl.ctrl_args {
            if target == 0 || target > n {
                out.push(Diagnostic::new(
                    DiagnosticKind::UnknownTarget,
                    decl.span,
                    format!("solver {} passes control to unknown solver {target}", decl.index),
                ));
            }
        }
    }

    let (instances, inst_diags) = instantiate_all(model, &theory);
    out.extend(inst_diags);
    let universe = collect_data_atoms(&instances);
    let declared = model.declared_predicates();

    let check_atoms = |expr: &PropExpr, what: &str, out: &mut Vec<Diagnostic>| {
        for atom in &expr.atoms {
            if atom.is_control() {
                let in_range = matches!(atom.args[0], crate::logic::Value::Index(k) if k.0 >= 1 && k.0 <= n);
                if !in_range {
                    out.push(Diagnostic::new(
                        DiagnosticKind::OutOfUniverse,
                        expr.span,
                        format!("{what} mentions {atom}, but solvers are numbered 1..{n}"),
                    ));
                }
            } else if !declared.contains_key(atom.predicate.as_str()) {
                out.push(Diagnostic::new(
                    DiagnosticKind::UnknownPredicate,
                    expr.span,
                    format!("{what} uses predicate `{}`, which no pattern or axiom declares", atom.predicate),
                ));
            } else if !universe.contains(atom) {
                out.push(Diagnostic::new(
                    DiagnosticKind::OutOfUniverse,
                    expr.span,
                    format!("{what} mentions {atom}, which no solver instance produces or tests"),
                ));
            }
        }
    };

    if let Some(initial) = &model.initial {
        let before = out.len();
        check_atoms(initial, "initial context", &mut out);
        if out.len() == before {
            match initial.resolve(&theory) {
                Ok(c) if !c.is_false() && c.control().is_some() => {}
                Ok(_) => out.push(Diagnostic::new(
                    DiagnosticKind::InvalidInitial,
                    initial.span,
                    "initial context must contain exactly one do(k) atom",
                )),
                Err(err) => {
                    out.push(Diagnostic::new(DiagnosticKind::InvalidInitial, initial.span, err.to_string()))
                }
            }
        }
    }

    for query in &model.queries {
        for clause in &query.clauses {
            for expr in clause.exprs() {
                check_atoms(expr, &format!("query `{}`", query.name), &mut out);
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dsl::parse_spec;

    const SMALL: &str = "
        pattern test(ro F; A, B) { do(self) & good(F) -> do(A); do(self) -> do(B); }
        pattern done(;) { do(self) -> do(self); }
        solver 1 = test(f; 2, 2);
        solver 2 = done(;);
        initial do(1);
    ";

    #[test]
    fn small_spec_is_clean() {
        assert_eq!(validate_spec(&parse_spec(SMALL).unwrap()), vec![]);
    }

    #[test]
    fn missing_catch_all() {
        let text = SMALL.replace("do(self) -> do(B);", "");
        let diags = validate_spec(&parse_spec(&text).unwrap());
        assert_eq!(diags.len(), 1);
        assert_eq!(diags[0].kind, DiagnosticKind::MissingCatchAll);
        assert_eq!(diags[0].line, 2);
    }

    #[test]
    fn unknown_predicate_in_query() {
        let text = format!("{SMALL} query q {{ given do(1) & bad(f); }}");
        let diags = validate_spec(&parse_spec(&text).unwrap());
        assert_eq!(diags.len(), 1);
        assert_eq!(diags[0].kind, DiagnosticKind::UnknownPredicate);
    }

    #[test]
    fn atom_outside_universe() {
        let text = format!("{SMALL} query q {{ exists do(2) & good(g); }}");
        let diags = validate_spec(&parse_spec(&text).unwrap());
        assert_eq!(diags.iter().map(|d| d.kind).collect::<Vec<_>>(), vec![DiagnosticKind::OutOfUniverse]);
    }

    #[test]
    fn indexing_gaps_and_targets() {
        let text = SMALL.replace("solver 2 = done(;);", "solver 3 = done(;);");
        let kinds: Vec<_> = validate_spec(&parse_spec(&text).unwrap()).into_iter().map(|d| d.kind).collect();
        assert!(kinds.contains(&DiagnosticKind::InstanceIndexing));
    }

    #[test]
    fn initial_needs_control() {
        let text = SMALL.replace("initial do(1);", "initial good(f);");
        let kinds: Vec<_> = validate_spec(&parse_spec(&text).unwrap()).into_iter().map(|d| d.kind).collect();
        assert_eq!(kinds, vec![DiagnosticKind::InvalidInitial]);
    }

    #[test]
    fn unknown_pattern() {
        let text = SMALL.replace("done(;);", "finish(;);");
        let kinds: Vec<_> = validate_spec(&parse_spec(&text).unwrap()).into_iter().map(|d| d.kind).collect();
        assert_eq!(kinds, vec![DiagnosticKind::UnknownPattern]);
    }
}
