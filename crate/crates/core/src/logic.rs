//! Ground atoms, implication axioms and canonical conjunctions.
//!
//! A [`Conjunction`] is always stored in closed form: every axiom instance that
//! applies to its atoms has already been applied. Two conjunctions are
//! logically equivalent exactly when they are equal as values, which lets the
//! rest of the analyzer use them as hash-map keys.

use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// The reserved control predicate.
pub const CONTROL_PREDICATE: &str = "do";

/// Index of an individual solver inside a composite solver, counted from 1.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct SolverIndex(pub u32);

impl fmt::Display for SolverIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Value {
    Name(String),
    Index(SolverIndex),
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Value::Name(name) => f.write_str(name),
            Value::Index(index) => write!(f, "{index}"),
        }
    }
}

/// A ground predicate application.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Atom {
    pub predicate: String,
    pub args: Vec<Value>,
}

impl Atom {
    pub fn new(predicate: impl Into<String>, args: Vec<Value>) -> Self {
        Atom { predicate: predicate.into(), args }
    }

    /// Convenience constructor for data atoms such as `min(f,x)`.
    pub fn data(predicate: &str, args: &[&str]) -> Self {
        Atom::new(predicate, args.iter().map(|a| Value::Name(a.to_string())).collect())
    }

    pub fn control(index: SolverIndex) -> Self {
        Atom::new(CONTROL_PREDICATE, vec![Value::Index(index)])
    }

    pub fn is_control(&self) -> bool {
        self.predicate == CONTROL_PREDICATE
    }

    /// Whether `value` occurs among the arguments.
    pub fn mentions(&self, value: &str) -> bool {
        self.args.iter().any(|a| matches!(a, Value::Name(n) if n == value))
    }
}

impl fmt::Display for Atom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}(", self.predicate)?;
        for (i, arg) in self.args.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{arg}")?;
        }
        f.write_str(")")
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum LogicError {
    #[error("predicate `{predicate}` has arity {expected} but is used with {found} argument(s)")]
    ArityMismatch {
        predicate: String,
        expected: usize,
        found: usize,
    },
    #[error("the `do` predicate takes exactly one solver index")]
    MalformedControl,
    #[error("variable `{0}` of the axiom conclusion does not occur in its premise")]
    UnboundAxiomVariable(String),
    #[error("axioms may not mention the `do` predicate")]
    ControlInAxiom,
}

/// An atom with variables in place of values; only used inside axioms.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct AtomSchema {
    pub predicate: String,
    pub vars: Vec<String>,
}

impl fmt::Display for AtomSchema {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}({})", self.predicate, self.vars.join(", "))
    }
}

/// `premise => conclusion`, universally quantified over the premise variables.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ImplicationAxiom {
    premise: AtomSchema,
    conclusion: AtomSchema,
}

impl ImplicationAxiom {
    pub fn new(premise: AtomSchema, conclusion: AtomSchema) -> Result<Self, LogicError> {
        if premise.predicate == CONTROL_PREDICATE || conclusion.predicate == CONTROL_PREDICATE {
            return Err(LogicError::ControlInAxiom);
        }
        if let Some(var) = conclusion.vars.iter().find(|v| !premise.vars.contains(v)) {
            return Err(LogicError::UnboundAxiomVariable(var.clone()));
        }
        Ok(ImplicationAxiom { premise, conclusion })
    }

    pub fn premise(&self) -> &AtomSchema {
        &self.premise
    }

    pub fn conclusion(&self) -> &AtomSchema {
        &self.conclusion
    }

    /// Instantiates the conclusion if `atom` matches the premise.
    pub fn apply(&self, atom: &Atom) -> Option<Atom> {
        if atom.predicate != self.premise.predicate || atom.args.len() != self.premise.vars.len() {
            return None;
        }
        let mut binding: HashMap<&str, &Value> = HashMap::new();
        for (var, value) in self.premise.vars.iter().zip(&atom.args) {
            match binding.get(var.as_str()) {
                Some(bound) if *bound != value => return None,
                Some(_) => {}
                None => {
                    binding.insert(var, value);
                }
            }
        }
        let args = self
            .conclusion
            .vars
            .iter()
            .map(|v| (*binding[v.as_str()]).clone())
            .collect();
        Some(Atom::new(self.conclusion.predicate.clone(), args))
    }
}

impl fmt::Display for ImplicationAxiom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} => {}", self.premise, self.conclusion)
    }
}

/// A conjunction of ground atoms in canonical (implication-closed) form.
///
/// The control atom `do(k)` is kept apart from the data atoms. Conjoining two
/// different control atoms yields the false conjunction, which absorbs
/// everything.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Conjunction {
    control: Option<SolverIndex>,
    atoms: BTreeSet<Atom>,
    is_false: bool,
}

impl Conjunction {
    pub fn truth() -> Self {
        Conjunction { control: None, atoms: BTreeSet::new(), is_false: false }
    }

    pub fn falsity() -> Self {
        Conjunction { control: None, atoms: BTreeSet::new(), is_false: true }
    }

    /// `do(index)` on its own.
    pub fn control_only(index: SolverIndex) -> Self {
        Conjunction { control: Some(index), atoms: BTreeSet::new(), is_false: false }
    }

    /// Caller guarantees `atoms` is closed and free of control atoms.
    pub(crate) fn from_closed(control: Option<SolverIndex>, atoms: BTreeSet<Atom>) -> Self {
        Conjunction { control, atoms, is_false: false }
    }

    pub fn is_false(&self) -> bool {
        self.is_false
    }

    pub fn is_true(&self) -> bool {
        !self.is_false && self.control.is_none() && self.atoms.is_empty()
    }

    pub fn control(&self) -> Option<SolverIndex> {
        self.control
    }

    /// Closed set of data (non-`do`) atoms.
    pub fn atoms(&self) -> &BTreeSet<Atom> {
        &self.atoms
    }

    /// The conjunction with its control atom removed.
    pub fn data_part(&self) -> Conjunction {
        if self.is_false {
            return Conjunction::falsity();
        }
        Conjunction::from_closed(None, self.atoms.clone())
    }

    /// Replaces the control atom (or adds one).
    pub fn with_control(&self, index: SolverIndex) -> Conjunction {
        if self.is_false {
            return Conjunction::falsity();
        }
        Conjunction::from_closed(Some(index), self.atoms.clone())
    }

    /// Conjunction of two canonical conjunctions.
    ///
    /// Axioms have a single premise, so the union of two closed atom sets is
    /// already closed and no theory is needed here.
    pub fn conjoin(&self, other: &Conjunction) -> Conjunction {
        if self.is_false || other.is_false {
            return Conjunction::falsity();
        }
        let control = match (self.control, other.control) {
            (Some(a), Some(b)) if a != b => return Conjunction::falsity(),
            (a, b) => a.or(b),
        };
        let atoms = self.atoms.union(&other.atoms).cloned().collect();
        Conjunction::from_closed(control, atoms)
    }

    /// `self` implies `weak`: conjoining `weak` onto `self` changes nothing.
    pub fn implies(&self, weak: &Conjunction) -> bool {
        if self.is_false {
            return true;
        }
        if weak.is_false {
            return false;
        }
        if weak.control.is_some() && weak.control != self.control {
            return false;
        }
        weak.atoms.is_subset(&self.atoms)
    }

    pub fn equivalent(&self, other: &Conjunction) -> bool {
        self == other
    }

    /// Ground atoms including the control atom.
    pub fn all_atoms(&self) -> impl Iterator<Item = Atom> + '_ {
        self.control.map(Atom::control).into_iter().chain(self.atoms.iter().cloned())
    }

    fn sort_key(&self) -> (bool, Option<SolverIndex>, usize, &BTreeSet<Atom>) {
        (self.is_false, self.control, self.atoms.len(), &self.atoms)
    }
}

/// Control index first, then smaller atom sets, then lexicographic atoms.
impl Ord for Conjunction {
    fn cmp(&self, other: &Self) -> Ordering {
        self.sort_key().cmp(&other.sort_key())
    }
}

impl PartialOrd for Conjunction {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Declared predicate arities plus the implication axioms between atoms.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Theory {
    arities: BTreeMap<String, usize>,
    axioms: Vec<ImplicationAxiom>,
}

impl Theory {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn declare(&mut self, predicate: &str, arity: usize) -> Result<(), LogicError> {
        if predicate == CONTROL_PREDICATE {
            return if arity == 1 { Ok(()) } else { Err(LogicError::MalformedControl) };
        }
        match self.arities.get(predicate) {
            Some(&expected) if expected != arity => Err(LogicError::ArityMismatch {
                predicate: predicate.to_string(),
                expected,
                found: arity,
            }),
            Some(_) => Ok(()),
            None => {
                self.arities.insert(predicate.to_string(), arity);
                Ok(())
            }
        }
    }

    pub fn add_axiom(&mut self, axiom: ImplicationAxiom) -> Result<(), LogicError> {
        self.declare(&axiom.premise.predicate, axiom.premise.vars.len())?;
        self.declare(&axiom.conclusion.predicate, axiom.conclusion.vars.len())?;
        if !self.axioms.contains(&axiom) {
            self.axioms.push(axiom);
        }
        Ok(())
    }

    pub fn axioms(&self) -> &[ImplicationAxiom] {
        &self.axioms
    }

    pub fn arity(&self, predicate: &str) -> Option<usize> {
        if predicate == CONTROL_PREDICATE {
            return Some(1);
        }
        self.arities.get(predicate).copied()
    }

    pub fn predicates(&self) -> impl Iterator<Item = (&str, usize)> {
        self.arities.iter().map(|(p, a)| (p.as_str(), *a))
    }

    fn check_atom(&self, atom: &Atom) -> Result<(), LogicError> {
        if atom.is_control() {
            return match atom.args.as_slice() {
                [Value::Index(_)] => Ok(()),
                _ => Err(LogicError::MalformedControl),
            };
        }
        match self.arities.get(&atom.predicate) {
            Some(&expected) if expected != atom.args.len() => Err(LogicError::ArityMismatch {
                predicate: atom.predicate.clone(),
                expected,
                found: atom.args.len(),
            }),
            _ => Ok(()),
        }
    }

    /// Implication closure of a set of ground atoms.
    pub fn close_atoms<I>(&self, atoms: I) -> Result<Conjunction, LogicError>
    where
        I: IntoIterator<Item = Atom>,
    {
        let mut control = None;
        let mut data = BTreeSet::new();
        let mut contradictory = false;
        for atom in atoms {
            self.check_atom(&atom)?;
            if atom.is_control() {
                let Value::Index(index) = atom.args[0] else { unreachable!() };
                match control {
                    Some(existing) if existing != index => contradictory = true,
                    _ => control = Some(index),
                }
            } else {
                data.insert(atom);
            }
        }
        if contradictory {
            return Ok(Conjunction::falsity());
        }
        Ok(Conjunction::from_closed(control, self.close_data(data)))
    }

    /// Closure of data atoms only; arities are not checked.
    pub fn close_data(&self, mut atoms: BTreeSet<Atom>) -> BTreeSet<Atom> {
        let mut pending: Vec<Atom> = atoms.iter().cloned().collect();
        while let Some(atom) = pending.pop() {
            for axiom in &self.axioms {
                if let Some(derived) = axiom.apply(&atom) {
                    if atoms.insert(derived.clone()) {
                        pending.push(derived);
                    }
                }
            }
        }
        atoms
    }

    /// The atoms of `conj` not strictly implied by another of its atoms.
    pub fn maximal_atoms<'a>(&self, conj: &'a Conjunction) -> Vec<&'a Atom> {
        let closures: Vec<BTreeSet<Atom>> = conj
            .atoms
            .iter()
            .map(|a| self.close_data(BTreeSet::from([a.clone()])))
            .collect();
        conj.atoms
            .iter()
            .enumerate()
            .filter(|(i, a)| {
                !conj.atoms.iter().enumerate().any(|(j, b)| {
                    j != *i && closures[j].contains(a) && !closures[*i].contains(b)
                })
            })
            .map(|(_, a)| a)
            .collect()
    }

    /// Renders a conjunction with its implication-maximal atoms, e.g.
    /// `do(1) & min(f,x) & stCnvx(f)`.
    pub fn render(&self, conj: &Conjunction) -> String {
        if conj.is_false {
            return "false".to_string();
        }
        let mut parts: Vec<String> = Vec::new();
        if let Some(index) = conj.control {
            parts.push(format!("do({index})"));
        }
        parts.extend(self.maximal_atoms(conj).into_iter().map(Atom::to_string));
        if parts.is_empty() {
            "true".to_string()
        } else {
            parts.join(" & ")
        }
    }

    /// All distinct closed subsets of `universe`, smallest first.
    ///
    /// Every closed set is reached by adding one atom at a time to a smaller
    /// closed set and re-closing, so a breadth-first walk visits each one
    /// without enumerating the full power set. Returns `Err(limit)` as soon as
    /// more than `limit` sets exist.
    pub fn closed_subsets(
        &self,
        universe: &BTreeSet<Atom>,
        limit: usize,
    ) -> Result<Vec<BTreeSet<Atom>>, usize> {
        let start = self.close_data(BTreeSet::new());
        let mut seen: BTreeSet<BTreeSet<Atom>> = BTreeSet::from([start.clone()]);
        let mut frontier = vec![start];
        while !frontier.is_empty() {
            let mut next = Vec::new();
            for set in &frontier {
                for atom in universe.iter().filter(|a| !set.contains(*a)) {
                    let mut grown = set.clone();
                    grown.insert(atom.clone());
                    let grown = self.close_data(grown);
                    if !seen.contains(&grown) {
                        seen.insert(grown.clone());
                        if seen.len() > limit {
                            return Err(limit);
                        }
                        next.push(grown);
                    }
                }
            }
            frontier = next;
        }
        let mut all: Vec<_> = seen.into_iter().collect();
        all.sort_by(|a, b| (a.len(), a).cmp(&(b.len(), b)));
        Ok(all)
    }
}
