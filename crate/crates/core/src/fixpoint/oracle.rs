//! Concrete transition system over a finite atom universe, used to check that
//! synthesized abstract solvers cover every concrete step.
//!
//! A concrete context is a solver index plus a closed set of data atoms. When
//! solver `s` is called, the most specific applicable rules fire; read-only
//! atoms survive, postcondition atoms are established, and any writable atom
//! may or may not survive. Solvers that are not called leave the context as is.

use std::collections::BTreeSet;
use std::fmt;

use crate::abstraction::{AbstractSolver, PropertySpace};
use crate::logic::{Atom, SolverIndex, Theory};
use crate::patterns::{collect_data_atoms, Instance};

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ConcreteContext {
    pub do_index: SolverIndex,
    pub atoms: BTreeSet<Atom>,
}

impl fmt::Display for ConcreteContext {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "do({})", self.do_index)?;
        for atom in &self.atoms {
            write!(f, " & {atom}")?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CoverageViolation {
    pub solver: SolverIndex,
    pub from: ConcreteContext,
    pub to: ConcreteContext,
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct CoverageReport {
    pub contexts: usize,
    pub transitions: usize,
    pub violations: Vec<CoverageViolation>,
}

impl CoverageReport {
    pub fn is_sound(&self) -> bool {
        self.violations.is_empty()
    }
}

/// All subsets of a small set.
fn subsets(atoms: &[Atom]) -> impl Iterator<Item = Vec<&Atom>> + '_ {
    (0u64..1 << atoms.len()).map(move |mask| {
        atoms.iter().enumerate().filter(|(i, _)| mask & (1 << i) != 0).map(|(_, a)| a).collect()
    })
}

/// Successors of `context` under one tick of `instance`.
pub fn concrete_successors(
    instance: &Instance,
    theory: &Theory,
    context: &ConcreteContext,
) -> BTreeSet<ConcreteContext> {
    if context.do_index != instance.index {
        return BTreeSet::from([context.clone()]);
    }
    let applies = |pre: &crate::logic::Conjunction| {
        pre.control() == Some(context.do_index) && pre.atoms().is_subset(&context.atoms)
    };
    let applicable: Vec<_> = instance.rules.iter().filter(|r| applies(&r.pre)).collect();
    let firing = applicable.iter().filter(|r| {
        !applicable.iter().any(|o| o.pre != r.pre && o.pre.implies(&r.pre))
    });

    let (kept, droppable): (Vec<Atom>, Vec<Atom>) =
        context.atoms.iter().cloned().partition(|a| !instance.is_writable(a));
    let mut out = BTreeSet::new();
    for rule in firing {
        let Some(target) = rule.post.control() else { continue };
        for survivors in subsets(&droppable) {
            let atoms: BTreeSet<Atom> = kept
                .iter()
                .chain(survivors)
                .chain(rule.post.atoms())
                .cloned()
                .collect();
            out.insert(ConcreteContext { do_index: target, atoms: theory.close_data(atoms) });
        }
    }
    out
}

/// Checks every concrete transition of every solver against the abstract
/// relations. `solvers` must be aligned with `instances` by solver index.
pub fn concrete_oracle_check(
    instances: &[Instance],
    theory: &Theory,
    space: &PropertySpace,
    solvers: &[AbstractSolver],
) -> CoverageReport {
    let universe = collect_data_atoms(instances);
    let data_sets = theory.closed_subsets(&universe, usize::MAX).unwrap_or_default();
    let contexts: Vec<ConcreteContext> = instances
        .iter()
        .map(|i| i.index)
        .collect::<BTreeSet<_>>()
        .into_iter()
        .flat_map(|k| data_sets.iter().map(move |atoms| ConcreteContext { do_index: k, atoms: atoms.clone() }))
        .collect();

    let satisfies = |ctx: &ConcreteContext, id| {
        let property = space.get(id);
        property.do_index == ctx.do_index && property.data.atoms().is_subset(&ctx.atoms)
    };

    let mut report = CoverageReport { contexts: contexts.len(), ..Default::default() };
    for instance in instances {
        let Some(solver) = solvers.iter().find(|s| s.solver == instance.index) else { continue };
        for from in &contexts {
            let sources: Vec<_> = space.iter().map(|p| p.id).filter(|&id| satisfies(from, id)).collect();
            for to in concrete_successors(instance, theory, from) {
                report.transitions += 1;
                let covered = sources
                    .iter()
                    .any(|&src| solver.image_of(src).iter().any(|&dst| satisfies(&to, dst)));
                if !covered {
                    report.violations.push(CoverageViolation {
                        solver: instance.index,
                        from: from.clone(),
                        to,
                    });
                }
            }
        }
    }
    report
}
