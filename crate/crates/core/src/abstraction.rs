//! Context-property space and synthesis of abstract solvers from patterns.

use std::collections::{BTreeSet, HashMap};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::logic::{Conjunction, SolverIndex, Theory};
use crate::patterns::{collect_data_atoms, Instance};

pub const DEFAULT_MAX_PROPERTIES: usize = 100_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct PropertyId(pub usize);

/// A cluster of contexts described by `do(k) & C`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ContextProperty {
    pub id: PropertyId,
    pub do_index: SolverIndex,
    /// The non-`do` part `C`.
    pub data: Conjunction,
    conjunction: Conjunction,
}

impl ContextProperty {
    /// The full conjunction `do(k) & C`.
    pub fn conjunction(&self) -> &Conjunction {
        &self.conjunction
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum AbstractionError {
    #[error("property space would exceed {limit} context properties")]
    TooManyProperties { limit: usize },
    #[error("solver indices must be exactly 1..n without gaps or duplicates")]
    NonContiguousIndices,
    #[error("solver {solver} passes control to unknown solver {target}")]
    UnknownTarget { solver: SolverIndex, target: SolverIndex },
    #[error("solver {solver} has no image for property {property:?}; its pattern is not total")]
    NotTotal { solver: SolverIndex, property: PropertyId },
    #[error("solver {solver} produced a conjunction outside the property space")]
    OutsideSpace { solver: SolverIndex },
}

#[derive(Debug, Clone)]
pub struct PropertySpace {
    properties: Vec<ContextProperty>,
    lookup: HashMap<Conjunction, PropertyId>,
    data_parts: Vec<Conjunction>,
    solver_count: u32,
}

impl PropertySpace {
    pub fn len(&self) -> usize {
        self.properties.len()
    }

    pub fn is_empty(&self) -> bool {
        self.properties.is_empty()
    }

    pub fn get(&self, id: PropertyId) -> &ContextProperty {
        &self.properties[id.0]
    }

    pub fn iter(&self) -> impl Iterator<Item = &ContextProperty> {
        self.properties.iter()
    }

    pub fn lookup(&self, conj: &Conjunction) -> Option<PropertyId> {
        self.lookup.get(conj).copied()
    }

    pub fn solver_count(&self) -> u32 {
        self.solver_count
    }

    /// Distinct data parts in canonical order; every solver index is paired
    /// with each of them.
    pub fn data_parts(&self) -> &[Conjunction] {
        &self.data_parts
    }

    /// Position of a property's data part within [`Self::data_parts`].
    pub fn data_code(&self, id: PropertyId) -> usize {
        id.0 % self.data_parts.len()
    }

    pub fn property_at(&self, index: SolverIndex, data_code: usize) -> Option<PropertyId> {
        if index.0 == 0 || index.0 > self.solver_count || data_code >= self.data_parts.len() {
            return None;
        }
        Some(PropertyId((index.0 as usize - 1) * self.data_parts.len() + data_code))
    }
}

/// Builds one property `do(k) & C` for every solver index `k` and every
/// closure-distinct set `C` of data atoms mentioned by the instances.
pub fn generate_properties(
    instances: &[Instance],
    theory: &Theory,
    max_properties: usize,
) -> Result<PropertySpace, AbstractionError> {
    let n = instances.len() as u32;
    let mut indices: Vec<u32> = instances.iter().map(|i| i.index.0).collect();
    indices.sort_unstable();
    if indices != (1..=n).collect::<Vec<_>>() {
        return Err(AbstractionError::NonContiguousIndices);
    }
    for inst in instances {
        if let Some(&target) = inst.ctrl_args.iter().find(|k| k.0 > n) {
            return Err(AbstractionError::UnknownTarget { solver: inst.index, target });
        }
    }

    let universe = collect_data_atoms(instances);
    let per_solver = if n == 0 { max_properties } else { max_properties / n as usize };
    let subsets = theory
        .closed_subsets(&universe, per_solver)
        .map_err(|_| AbstractionError::TooManyProperties { limit: max_properties })?;
    let data_parts: Vec<Conjunction> =
        subsets.into_iter().map(|atoms| Conjunction::from_closed(None, atoms)).collect();

    let mut properties = Vec::with_capacity(n as usize * data_parts.len());
    let mut lookup = HashMap::new();
    for k in 1..=n {
        let index = SolverIndex(k);
        for data in &data_parts {
            let id = PropertyId(properties.len());
            let conjunction = data.with_control(index);
            lookup.insert(conjunction.clone(), id);
            properties.push(ContextProperty { id, do_index: index, data: data.clone(), conjunction });
        }
    }
    Ok(PropertySpace { properties, lookup, data_parts, solver_count: n })
}

/// A total relation on property ids approximating one solver.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AbstractSolver {
    pub solver: SolverIndex,
    image: Vec<BTreeSet<PropertyId>>,
}

impl AbstractSolver {
    /// Relation over `property_count` properties from explicit pairs. Pairs
    /// that mention ids outside the range are ignored.
    pub fn from_pairs(
        solver: SolverIndex,
        property_count: usize,
        pairs: impl IntoIterator<Item = (PropertyId, PropertyId)>,
    ) -> Self {
        let mut image = vec![BTreeSet::new(); property_count];
        for (from, to) in pairs {
            if from.0 < property_count && to.0 < property_count {
                image[from.0].insert(to);
            }
        }
        AbstractSolver { solver, image }
    }

    pub fn property_count(&self) -> usize {
        self.image.len()
    }

    pub fn image_of(&self, id: PropertyId) -> &BTreeSet<PropertyId> {
        &self.image[id.0]
    }

    pub fn pairs(&self) -> impl Iterator<Item = (PropertyId, PropertyId)> + '_ {
        self.image
            .iter()
            .enumerate()
            .flat_map(|(from, tos)| tos.iter().map(move |to| (PropertyId(from), *to)))
    }

    pub fn remove_pair(&mut self, from: PropertyId, to: PropertyId) -> bool {
        self.image[from.0].remove(&to)
    }
}

/// Image of a single property under the abstract version of `instance`.
///
/// Properties of other solvers map to themselves. For the solver's own
/// properties, each rule precondition refines the property; the most specific
/// rules applicable to the refinement fire, and each yields the refinement's
/// read-only atoms conjoined with the rule's postcondition. Branches that
/// strictly imply another branch are dropped.
pub fn image_of_property(
    instance: &Instance,
    property: &ContextProperty,
    space: &PropertySpace,
) -> Result<BTreeSet<PropertyId>, AbstractionError> {
    if property.do_index != instance.index {
        return Ok(BTreeSet::from([property.id]));
    }
    let mut branches: BTreeSet<Conjunction> = BTreeSet::new();
    for rule in &instance.rules {
        let refined = property.conjunction().conjoin(&rule.pre);
        if refined.is_false() {
            continue;
        }
        let applicable: Vec<_> = instance.rules.iter().filter(|q| refined.implies(&q.pre)).collect();
        let firing = applicable.iter().filter(|q| {
            !applicable.iter().any(|other| other.pre != q.pre && other.pre.implies(&q.pre))
        });
        let read_only = instance.classify_atoms(&refined).read_only;
        for q in firing {
            let branch = read_only.conjoin(&q.post);
            if !branch.is_false() {
                branches.insert(branch);
            }
        }
    }

    let weakest = branches
        .iter()
        .filter(|b| !branches.iter().any(|other| other != *b && b.implies(other)));
    let mut image = BTreeSet::new();
    for branch in weakest {
        let id = space
            .lookup(branch)
            .ok_or(AbstractionError::OutsideSpace { solver: instance.index })?;
        image.insert(id);
    }
    if image.is_empty() {
        return Err(AbstractionError::NotTotal { solver: instance.index, property: property.id });
    }
    Ok(image)
}

pub fn synthesize_abstract_solver(
    instance: &Instance,
    space: &PropertySpace,
) -> Result<AbstractSolver, AbstractionError> {
    let image = space
        .iter()
        .map(|p| image_of_property(instance, p, space))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(AbstractSolver { solver: instance.index, image })
}

/// Synthesizes every solver, ordered by solver index.
pub fn synthesize_all(
    instances: &[Instance],
    space: &PropertySpace,
) -> Result<Vec<AbstractSolver>, AbstractionError> {
    let mut ordered: Vec<&Instance> = instances.iter().collect();
    ordered.sort_by_key(|i| i.index);
    ordered.into_iter().map(|i| synthesize_abstract_solver(i, space)).collect()
}
