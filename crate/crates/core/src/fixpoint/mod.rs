//! Least solutions of the feasible-set constraints, constraint checks and
//! reverse queries over initial contexts.

pub mod oracle;

use std::collections::BTreeSet;

use rayon::prelude::*;

use crate::abstraction::{AbstractSolver, PropertyId, PropertySpace};
use crate::logic::Conjunction;

/// A set of context properties approximating the feasible contexts.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct FeasibleSet {
    members: BTreeSet<PropertyId>,
}

impl FeasibleSet {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn members(&self) -> &BTreeSet<PropertyId> {
        &self.members
    }

    pub fn contains(&self, id: PropertyId) -> bool {
        self.members.contains(&id)
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn insert(&mut self, id: PropertyId) -> bool {
        self.members.insert(id)
    }

    pub fn remove(&mut self, id: PropertyId) -> bool {
        self.members.remove(&id)
    }

    pub fn iter(&self) -> impl Iterator<Item = PropertyId> + '_ {
        self.members.iter().copied()
    }

    pub fn union(&self, other: &FeasibleSet) -> FeasibleSet {
        FeasibleSet { members: self.members.union(&other.members).copied().collect() }
    }
}

impl FromIterator<PropertyId> for FeasibleSet {
    fn from_iter<I: IntoIterator<Item = PropertyId>>(iter: I) -> Self {
        FeasibleSet { members: iter.into_iter().collect() }
    }
}

/// Image of a set of properties under a relation.
pub fn img(solver: &AbstractSolver, set: &FeasibleSet) -> FeasibleSet {
    set.iter().flat_map(|id| solver.image_of(id).iter().copied()).collect()
}

/// `{c0} ∪ img(F1, p) ∪ … ∪ img(Fn, p)`.
pub fn step(solvers: &[AbstractSolver], c0: PropertyId, p: &FeasibleSet) -> FeasibleSet {
    let mut next = FeasibleSet::from_iter([c0]);
    for solver in solvers {
        next = next.union(&img(solver, p));
    }
    next
}

/// Least `P` with `P = {c0} ∪ ⋃ img(Fs, P)`, by worklist saturation from `c0`.
pub fn least_feasible_set(solvers: &[AbstractSolver], c0: PropertyId) -> FeasibleSet {
    let mut reached = FeasibleSet::from_iter([c0]);
    let mut pending = vec![c0];
    while let Some(id) = pending.pop() {
        for solver in solvers {
            for &next in solver.image_of(id) {
                if reached.insert(next) {
                    pending.push(next);
                }
            }
        }
    }
    reached
}

/// Kleene iterates `{c0}, step({c0}), …` up to and including the first
/// repeated set.
pub fn kleene_iterates(solvers: &[AbstractSolver], c0: PropertyId) -> Vec<FeasibleSet> {
    let mut iterates = vec![FeasibleSet::from_iter([c0])];
    loop {
        let next = step(solvers, c0, iterates.last().unwrap());
        let stable = &next == iterates.last().unwrap();
        iterates.push(next);
        if stable {
            return iterates;
        }
    }
}

/// Whether the relation is total over its property space.
pub fn check_fun(solver: &AbstractSolver) -> bool {
    (0..solver.property_count()).all(|i| !solver.image_of(PropertyId(i)).is_empty())
}

/// Whether `p` solves the feasible-set equation for `c0`.
pub fn check_fixpoint(solvers: &[AbstractSolver], c0: PropertyId, p: &FeasibleSet) -> bool {
    &step(solvers, c0, p) == p
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Forbid {
    pub matches: Conjunction,
    pub unless: Option<Conjunction>,
}

impl Forbid {
    /// A member violates the clause if it implies `matches` but not `unless`.
    pub fn violated_by(&self, member: &Conjunction) -> bool {
        member.implies(&self.matches) && !self.unless.as_ref().is_some_and(|u| member.implies(u))
    }
}

/// Constraints on an unknown initial property and on witnesses among the
/// properties it can reach.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Query {
    pub name: String,
    pub givens: Vec<Conjunction>,
    pub forbids: Vec<Forbid>,
    pub exists: Vec<Conjunction>,
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct QuerySolution {
    pub c0: PropertyId,
    /// One member of the feasible set per `exists` clause.
    pub witnesses: Vec<PropertyId>,
}

fn solve_for_candidate(
    solvers: &[AbstractSolver],
    space: &PropertySpace,
    query: &Query,
    c0: PropertyId,
) -> Vec<QuerySolution> {
    let start = space.get(c0).conjunction();
    if !query.givens.iter().all(|g| start.implies(g)) {
        return Vec::new();
    }
    let feasible = least_feasible_set(solvers, c0);
    let violates = feasible.iter().any(|m| {
        let member = space.get(m).conjunction();
        query.forbids.iter().any(|f| f.violated_by(member))
    });
    if violates {
        return Vec::new();
    }
    let mut combos: Vec<Vec<PropertyId>> = vec![Vec::new()];
    for clause in &query.exists {
        let candidates: Vec<PropertyId> =
            feasible.iter().filter(|&m| space.get(m).conjunction().implies(clause)).collect();
        combos = combos
            .into_iter()
            .flat_map(|prefix| {
                candidates.iter().map(move |&w| {
                    let mut next = prefix.clone();
                    next.push(w);
                    next
                })
            })
            .collect();
    }
    combos.into_iter().map(|witnesses| QuerySolution { c0, witnesses }).collect()
}

/// All initial properties (with witnesses) satisfying the query, ordered by
/// initial property and then witnesses.
pub fn solve_reverse_query(
    solvers: &[AbstractSolver],
    space: &PropertySpace,
    query: &Query,
) -> Vec<QuerySolution> {
    space
        .iter()
        .flat_map(|p| solve_for_candidate(solvers, space, query, p.id))
        .collect()
}

/// Same as [`solve_reverse_query`] with candidates evaluated on `jobs`
/// threads. Output order is unchanged.
pub fn solve_reverse_query_parallel(
    solvers: &[AbstractSolver],
    space: &PropertySpace,
    query: &Query,
    jobs: usize,
) -> Vec<QuerySolution> {
    let run = || -> Vec<QuerySolution> {
        let ids: Vec<PropertyId> = space.iter().map(|p| p.id).collect();
        ids.par_iter()
            .map(|&id| solve_for_candidate(solvers, space, query, id))
            .collect::<Vec<_>>()
            .into_iter()
            .flatten()
            .collect()
    };
    match rayon::ThreadPoolBuilder::new().num_threads(jobs.max(1)).build() {
        Ok(pool) => pool.install(run),
        Err(_) => solve_reverse_query(solvers, space, query),
    }
}
