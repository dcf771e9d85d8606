//! Solver patterns and their instantiation at a pipeline position.

use std::collections::{BTreeSet, HashMap};
use std::fmt;

use thiserror::Error;

use crate::logic::{Atom, Conjunction, LogicError, SolverIndex, Theory, Value};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DataParam {
    pub name: String,
    pub read_only: bool,
}

/// Where control goes after a rule fires.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ControlTarget {
    /// The solver's own index, bound at instantiation.
    SelfIndex,
    Param(String),
}

impl fmt::Display for ControlTarget {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ControlTarget::SelfIndex => f.write_str("self"),
            ControlTarget::Param(name) => f.write_str(name),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AtomTemplate {
    pub predicate: String,
    pub params: Vec<String>,
}

impl fmt::Display for AtomTemplate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}({})", self.predicate, self.params.join(", "))
    }
}

/// `do(target) & atom & ...` over formal parameters.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConditionTemplate {
    pub control: ControlTarget,
    pub atoms: Vec<AtomTemplate>,
}

impl fmt::Display for ConditionTemplate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "do({})", self.control)?;
        for atom in &self.atoms {
            write!(f, " & {atom}")?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Rule {
    pub pre: ConditionTemplate,
    pub post: ConditionTemplate,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Pattern {
    pub name: String,
    pub data_params: Vec<DataParam>,
    pub ctrl_params: Vec<String>,
    pub rules: Vec<Rule>,
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PatternError {
    #[error("pattern `{pattern}` expects {expected} {kind} argument(s), got {found}")]
    ArityMismatch {
        pattern: String,
        kind: &'static str,
        expected: usize,
        found: usize,
    },
    #[error("pattern `{pattern}` uses undeclared parameter `{name}`")]
    UnboundVariable { pattern: String, name: String },
    #[error("pattern `{pattern}` uses control parameter `{name}` as data")]
    ControlParamInAtom { pattern: String, name: String },
    #[error("pattern `{pattern}` declares parameter `{name}` twice")]
    DuplicateParam { pattern: String, name: String },
    #[error("pattern `{pattern}`: preconditions must start with do(self)")]
    PreconditionNotSelf { pattern: String },
    #[error("pattern `{pattern}` has no catch-all rule (a precondition without data atoms)")]
    MissingCatchAll { pattern: String },
    #[error("pattern `{pattern}` has no rules")]
    NoRules { pattern: String },
    #[error("pattern `{pattern}`: ground precondition of rule {rule} is false")]
    FalsePrecondition { pattern: String, rule: usize },
    #[error("solver index 0 is not valid; solvers are numbered from 1")]
    InvalidIndex,
    #[error("pattern `{pattern}`: {source}")]
    Logic {
        pattern: String,
        #[source]
        source: LogicError,
    },
}

impl Pattern {
    /// A rule whose precondition has no data atoms fires on every context of
    /// the solver, which is what makes synthesized images total.
    pub fn has_catch_all(&self) -> bool {
        self.rules.iter().any(|r| r.pre.atoms.is_empty())
    }

    pub fn is_read_only(&self, param: &str) -> Option<bool> {
        self.data_params.iter().find(|p| p.name == param).map(|p| p.read_only)
    }

    /// Structural checks that do not depend on instantiation.
    pub fn validate(&self) -> Vec<PatternError> {
        let mut errors = Vec::new();
        let pattern = || self.name.clone();
        let mut seen = BTreeSet::new();
        for name in self.data_params.iter().map(|p| &p.name).chain(&self.ctrl_params) {
            if !seen.insert(name) {
                errors.push(PatternError::DuplicateParam { pattern: pattern(), name: name.clone() });
            }
        }
        if self.rules.is_empty() {
            errors.push(PatternError::NoRules { pattern: pattern() });
        } else if !self.has_catch_all() {
            errors.push(PatternError::MissingCatchAll { pattern: pattern() });
        }
        for rule in &self.rules {
            if rule.pre.control != ControlTarget::SelfIndex {
                errors.push(PatternError::PreconditionNotSelf { pattern: pattern() });
            }
            if let ControlTarget::Param(name) = &rule.post.control {
                if !self.ctrl_params.contains(name) {
                    errors.push(PatternError::UnboundVariable { pattern: pattern(), name: name.clone() });
                }
            }
            for atom in rule.pre.atoms.iter().chain(&rule.post.atoms) {
                for name in &atom.params {
                    if self.ctrl_params.contains(name) {
                        errors.push(PatternError::ControlParamInAtom {
                            pattern: pattern(),
                            name: name.clone(),
                        });
                    } else if self.is_read_only(name).is_none() {
                        errors.push(PatternError::UnboundVariable {
                            pattern: pattern(),
                            name: name.clone(),
                        });
                    }
                }
            }
        }
        errors
    }
}

/// A rule with every parameter replaced by its argument, in canonical form.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GroundRule {
    pub pre: Conjunction,
    pub post: Conjunction,
}

/// A pattern bound to a solver index and concrete arguments.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Instance {
    pub index: SolverIndex,
    pub pattern: String,
    pub data_args: Vec<String>,
    pub ctrl_args: Vec<SolverIndex>,
    pub rules: Vec<GroundRule>,
    /// Values bound to parameters that are not read-only.
    pub writable: BTreeSet<String>,
}

pub fn instantiate(
    pattern: &Pattern,
    index: SolverIndex,
    data_args: &[String],
    ctrl_args: &[SolverIndex],
    theory: &Theory,
) -> Result<Instance, PatternError> {
    if let Some(error) = pattern.validate().into_iter().next() {
        return Err(error);
    }
    if data_args.len() != pattern.data_params.len() {
        return Err(PatternError::ArityMismatch {
            pattern: pattern.name.clone(),
            kind: "data",
            expected: pattern.data_params.len(),
            found: data_args.len(),
        });
    }
    if ctrl_args.len() != pattern.ctrl_params.len() {
        return Err(PatternError::ArityMismatch {
            pattern: pattern.name.clone(),
            kind: "control",
            expected: pattern.ctrl_params.len(),
            found: ctrl_args.len(),
        });
    }
    if index.0 == 0 || ctrl_args.iter().any(|k| k.0 == 0) {
        return Err(PatternError::InvalidIndex);
    }

    let data: HashMap<&str, &str> = pattern
        .data_params
        .iter()
        .map(|p| p.name.as_str())
        .zip(data_args.iter().map(String::as_str))
        .collect();
    let ctrl: HashMap<&str, SolverIndex> =
        pattern.ctrl_params.iter().map(String::as_str).zip(ctrl_args.iter().copied()).collect();

    let ground = |cond: &ConditionTemplate| -> Result<Conjunction, PatternError> {
        let target = match &cond.control {
            ControlTarget::SelfIndex => index,
            ControlTarget::Param(name) => ctrl[name.as_str()],
        };
        let atoms = cond.atoms.iter().map(|a| {
            Atom::new(
                a.predicate.clone(),
                a.params.iter().map(|p| Value::Name(data[p.as_str()].to_string())).collect(),
            )
        });
        theory
            .close_atoms(std::iter::once(Atom::control(target)).chain(atoms))
            .map_err(|source| PatternError::Logic { pattern: pattern.name.clone(), source })
    };

    let mut rules = Vec::with_capacity(pattern.rules.len());
    for (i, rule) in pattern.rules.iter().enumerate() {
        let pre = ground(&rule.pre)?;
        if pre.is_false() {
            return Err(PatternError::FalsePrecondition { pattern: pattern.name.clone(), rule: i + 1 });
        }
        let post = ground(&rule.post)?;
        rules.push(GroundRule { pre, post });
    }

    let writable = pattern
        .data_params
        .iter()
        .zip(data_args)
        .filter(|(p, _)| !p.read_only)
        .map(|(_, v)| v.clone())
        .collect();

    Ok(Instance {
        index,
        pattern: pattern.name.clone(),
        data_args: data_args.to_vec(),
        ctrl_args: ctrl_args.to_vec(),
        rules,
        writable,
    })
}

/// Every data atom occurring in a ground pre- or postcondition.
pub fn collect_data_atoms(instances: &[Instance]) -> BTreeSet<Atom> {
    instances
        .iter()
        .flat_map(|inst| inst.rules.iter())
        .flat_map(|r| r.pre.atoms().iter().chain(r.post.atoms()))
        .cloned()
        .collect()
}

/// Split of a conjunction's data atoms into the part a solver leaves alone and
/// the part it may overwrite.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AtomPartition {
    pub read_only: Conjunction,
    /// Not necessarily implication-closed: an axiom may derive a read-only
    /// atom from a writable one.
    pub writable: BTreeSet<Atom>,
}

impl Instance {
    pub fn is_writable(&self, atom: &Atom) -> bool {
        self.writable.iter().any(|v| atom.mentions(v))
    }

    /// Partitions the data atoms of `c` by whether they mention a value bound
    /// to a writable parameter of this instance.
    pub fn classify_atoms(&self, c: &Conjunction) -> AtomPartition {
        let (writable, read_only): (BTreeSet<Atom>, BTreeSet<Atom>) =
            c.atoms().iter().cloned().partition(|a| self.is_writable(a));
        // Axiom conclusions only use premise values, so a read-only premise
        // has a read-only conclusion and this half stays closed.
        AtomPartition { read_only: Conjunction::from_closed(None, read_only), writable }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::logic::{AtomSchema, ImplicationAxiom};

    fn cond(control: ControlTarget, atoms: &[(&str, &[&str])]) -> ConditionTemplate {
        ConditionTemplate {
            control,
            atoms: atoms
                .iter()
                .map(|(p, args)| AtomTemplate {
                    predicate: p.to_string(),
                    params: args.iter().map(|s| s.to_string()).collect(),
                })
                .collect(),
        }
    }

    fn param(name: &str) -> ControlTarget {
        ControlTarget::Param(name.into())
    }

    fn data_params(params: &[(&str, bool)]) -> Vec<DataParam> {
        params.iter().map(|(n, ro)| DataParam { name: n.to_string(), read_only: *ro }).collect()
    }

    fn cnvx_test() -> Pattern {
        Pattern {
            name: "cnvx?".into(),
            data_params: data_params(&[("F", true)]),
            ctrl_params: vec!["S1".into(), "S2".into()],
            rules: vec![
                Rule {
                    pre: cond(ControlTarget::SelfIndex, &[("cnvx", &["F"])]),
                    post: cond(param("S1"), &[]),
                },
                Rule { pre: cond(ControlTarget::SelfIndex, &[]), post: cond(param("S2"), &[]) },
            ],
        }
    }

    fn descent() -> Pattern {
        Pattern {
            name: "dscnt".into(),
            data_params: data_params(&[("F", true), ("X", false)]),
            ctrl_params: vec!["S".into()],
            rules: vec![
                Rule {
                    pre: cond(ControlTarget::SelfIndex, &[("stCnvx", &["F"])]),
                    post: cond(param("S"), &[("min", &["F", "X"])]),
                },
                Rule { pre: cond(ControlTarget::SelfIndex, &[]), post: cond(param("S"), &[]) },
            ],
        }
    }

    fn done() -> Pattern {
        Pattern {
            name: "done".into(),
            data_params: vec![],
            ctrl_params: vec![],
            rules: vec![Rule {
                pre: cond(ControlTarget::SelfIndex, &[]),
                post: cond(ControlTarget::SelfIndex, &[]),
            }],
        }
    }

    fn hull_consistency() -> Pattern {
        Pattern {
            name: "hc".into(),
            data_params: data_params(&[("I", true), ("B", false)]),
            ctrl_params: vec!["S".into()],
            rules: vec![
                Rule { pre: cond(ControlTarget::SelfIndex, &[]), post: cond(param("S"), &[]) },
                Rule {
                    pre: cond(ControlTarget::SelfIndex, &[("tree", &["I"])]),
                    post: cond(param("S"), &[("ok", &["I"])]),
                },
            ],
        }
    }

    fn theory() -> Theory {
        let mut t = Theory::new();
        t.add_axiom(
            ImplicationAxiom::new(
                AtomSchema { predicate: "stCnvx".into(), vars: vec!["F".into()] },
                AtomSchema { predicate: "cnvx".into(), vars: vec!["F".into()] },
            )
            .unwrap(),
        )
        .unwrap();
        t
    }

    fn ground(t: &Theory, control: u32, atoms: &[Atom]) -> Conjunction {
        t.close_atoms(std::iter::once(Atom::control(SolverIndex(control))).chain(atoms.iter().cloned()))
            .unwrap()
    }

    fn strs(v: &[&str]) -> Vec<String> {
        v.iter().map(|s| s.to_string()).collect()
    }

    #[test]
    fn instantiate_convexity_test() {
        let t = theory();
        let inst = instantiate(&cnvx_test(), SolverIndex(1), &strs(&["f"]), &[SolverIndex(2), SolverIndex(3)], &t)
            .unwrap();
        assert_eq!(inst.rules.len(), 2);
        assert_eq!(inst.rules[0].pre, ground(&t, 1, &[Atom::data("cnvx", &["f"])]));
        assert_eq!(inst.rules[0].post, ground(&t, 2, &[]));
        assert_eq!(inst.rules[1].pre, ground(&t, 1, &[]));
        assert_eq!(inst.rules[1].post, ground(&t, 3, &[]));
        assert!(inst.writable.is_empty());
    }

    #[test]
    fn instantiate_done_binds_self() {
        let inst = instantiate(&done(), SolverIndex(4), &[], &[], &Theory::new()).unwrap();
        assert_eq!(inst.rules, vec![GroundRule {
            pre: Conjunction::control_only(SolverIndex(4)),
            post: Conjunction::control_only(SolverIndex(4)),
        }]);
    }

    #[test]
    fn instantiate_hull_consistency() {
        let t = Theory::new();
        let inst =
            instantiate(&hull_consistency(), SolverIndex(2), &strs(&["i", "b"]), &[SolverIndex(3)], &t).unwrap();
        assert_eq!(inst.rules[0].pre, ground(&t, 2, &[]));
        assert_eq!(inst.rules[0].post, ground(&t, 3, &[]));
        assert_eq!(inst.rules[1].pre, ground(&t, 2, &[Atom::data("tree", &["i"])]));
        assert_eq!(inst.rules[1].post, ground(&t, 3, &[Atom::data("ok", &["i"])]));
        assert_eq!(inst.writable, BTreeSet::from(["b".to_string()]));
    }

    #[test]
    fn instantiate_rejects_wrong_argument_counts() {
        let t = theory();
        let err = instantiate(&cnvx_test(), SolverIndex(1), &[], &[SolverIndex(2), SolverIndex(3)], &t).unwrap_err();
        assert!(matches!(err, PatternError::ArityMismatch { kind: "data", expected: 1, found: 0, .. }));
        let err = instantiate(&cnvx_test(), SolverIndex(1), &strs(&["f"]), &[SolverIndex(2)], &t).unwrap_err();
        assert!(matches!(err, PatternError::ArityMismatch { kind: "control", .. }));
    }

    #[test]
    fn instantiate_rejects_unbound_variable() {
        let mut p = done();
        p.rules[0].post.atoms.push(AtomTemplate { predicate: "ok".into(), params: vec!["Z".into()] });
        let err = instantiate(&p, SolverIndex(1), &[], &[], &Theory::new()).unwrap_err();
        assert!(matches!(err, PatternError::UnboundVariable { ref name, .. } if name == "Z"));
    }

    #[test]
    fn missing_catch_all_is_rejected() {
        let mut p = cnvx_test();
        p.rules.pop();
        assert!(p.validate().contains(&PatternError::MissingCatchAll { pattern: "cnvx?".into() }));
    }

    #[test]
    fn classify_descent() {
        let t = theory();
        let inst = instantiate(&descent(), SolverIndex(2), &strs(&["f", "x"]), &[SolverIndex(4)], &t).unwrap();
        let c = ground(&t, 2, &[Atom::data("min", &["f", "x"]), Atom::data("cnvx", &["f"])]);
        let part = inst.classify_atoms(&c);
        assert_eq!(part.read_only.atoms(), &BTreeSet::from([Atom::data("cnvx", &["f"])]));
        assert_eq!(part.writable, BTreeSet::from([Atom::data("min", &["f", "x"])]));
    }

    #[test]
    fn classify_unbound_value_is_read_only() {
        let t = theory();
        let inst =
            instantiate(&cnvx_test(), SolverIndex(1), &strs(&["f"]), &[SolverIndex(2), SolverIndex(3)], &t).unwrap();
        let c = ground(&t, 1, &[Atom::data("min", &["f", "x"])]);
        let part = inst.classify_atoms(&c);
        assert_eq!(part.read_only.atoms(), &BTreeSet::from([Atom::data("min", &["f", "x"])]));
        assert!(part.writable.is_empty());

        let bare = inst.classify_atoms(&ground(&t, 1, &[]));
        assert!(bare.read_only.is_true() && bare.writable.is_empty());
    }

    #[test]
    fn collect_atoms_over_instances() {
        let t = theory();
        let instances = vec![
            instantiate(&cnvx_test(), SolverIndex(1), &strs(&["f"]), &[SolverIndex(2), SolverIndex(3)], &t).unwrap(),
            instantiate(&descent(), SolverIndex(2), &strs(&["f", "x"]), &[SolverIndex(4)], &t).unwrap(),
            instantiate(&done(), SolverIndex(4), &[], &[], &t).unwrap(),
        ];
        let atoms = collect_data_atoms(&instances);
        let expected = BTreeSet::from([
            Atom::data("cnvx", &["f"]),
            Atom::data("stCnvx", &["f"]),
            Atom::data("min", &["f", "x"]),
        ]);
        assert_eq!(atoms, expected);
        assert!(collect_data_atoms(&instances[2..]).is_empty());
    }
}
