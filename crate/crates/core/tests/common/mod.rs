#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet};

use coopan::abstraction::{AbstractSolver, PropertyId};
use coopan::fixpoint::oracle::concrete_oracle_check;
use coopan::fixpoint::{check_fixpoint, check_fun, least_feasible_set};
use coopan::logicalc::{parse_logicalc, Expr, LcValue};
use coopan::Analysis;

pub const NAIVE_QP: &str = include_str!("../../specs/naive_qp.csa");
pub const SIMPLEX_HC: &str = include_str!("../../specs/simplex_hc.csa");
pub const REFERENCE_LC: &str = include_str!("../fixtures/reference_hc.lc");

pub fn naive_qp() -> Analysis {
    Analysis::from_source(NAIVE_QP, 100_000).expect("naive_qp.csa analyses")
}

pub fn simplex_hc() -> Analysis {
    Analysis::from_source(SIMPLEX_HC, 100_000).expect("simplex_hc.csa analyses")
}

pub fn id(analysis: &Analysis, text: &str) -> PropertyId {
    analysis.parse_property(text).unwrap_or_else(|e| panic!("{text}: {e}"))
}

pub fn ids(analysis: &Analysis, texts: &[&str]) -> Vec<PropertyId> {
    let mut out: Vec<_> = texts.iter().map(|t| id(analysis, t)).collect();
    out.sort();
    out
}

/// Whether removing `(from, to)` from solver `which` is noticed: the relation
/// stops being total, some concrete step loses its cover, or some original
/// feasible set stops being the least fixpoint of the mutated system.
pub fn mutation_detected(analysis: &Analysis, which: usize, from: PropertyId, to: PropertyId) -> bool {
    let mut mutated: Vec<AbstractSolver> = analysis.solvers.clone();
    assert!(mutated[which].remove_pair(from, to));
    if !check_fun(&mutated[which]) {
        return true;
    }
    let report = concrete_oracle_check(&analysis.instances, &analysis.theory, &analysis.space, &mutated);
    if !report.is_sound() {
        return true;
    }
    analysis.space.iter().any(|p| {
        let original = least_feasible_set(&analysis.solvers, p.id);
        !check_fixpoint(&mutated, p.id, &original) || least_feasible_set(&mutated, p.id) != original
    })
}

/// The reference listing numbers its data parts in its own order; this table gives the atoms
/// behind each name.
pub const REFERENCE_NAMES: [(&str, &str); 8] = [
    ("treeI", "tree(i)"),
    ("okL", "ok(l)"),
    ("okI", "ok(i)"),
    ("treeIokL", "tree(i) & ok(l)"),
    ("okIokL", "ok(i) & ok(l)"),
    ("true", ""),
    ("treeIokI", "tree(i) & ok(i)"),
    ("treeIokLokI", "tree(i) & ok(l) & ok(i)"),
];

pub fn set_of(value: &LcValue) -> &BTreeSet<LcValue> {
    value.as_set().expect("a set")
}

pub fn pair(value: &LcValue) -> (&LcValue, &LcValue) {
    match value {
        LcValue::Tuple(items) if items.len() == 2 => (&items[0], &items[1]),
        other => panic!("not a pair: {other}"),
    }
}

pub fn int(value: &LcValue) -> i64 {
    match value {
        LcValue::Int(n) => *n,
        other => panic!("not an integer: {other}"),
    }
}

/// The reference listing's `(k, code)` coding mapped to property ids of the simplex/HC space.
pub fn reference_coding(a: &Analysis) -> BTreeMap<(i64, i64), PropertyId> {
    let model = parse_logicalc(REFERENCE_LC).unwrap();
    let constants: BTreeMap<&str, i64> = model
        .statements
        .iter()
        .filter_map(|s| match (s.definition(), &s.rhs) {
            (Some((name, _)), Expr::Int(n)) => Some((name, *n)),
            _ => None,
        })
        .collect();
    let mut out = BTreeMap::new();
    for (name, atoms) in REFERENCE_NAMES {
        for k in 1..=4 {
            let text = if atoms.is_empty() { format!("do({k})") } else { format!("do({k}) & {atoms}") };
            out.insert((k, constants[name]), id(a, &text));
        }
    }
    out
}

pub fn decode(coding: &BTreeMap<(i64, i64), PropertyId>, value: &LcValue) -> PropertyId {
    let (k, code) = pair(value);
    coding[&(int(k), int(code))]
}

/// The reference listing's relations as property-id pairs, keyed by solver position.
pub fn reference_relations(a: &Analysis) -> Vec<BTreeSet<(PropertyId, PropertyId)>> {
    let coding = reference_coding(a);
    let (&(k, code), _) = coding.iter().next().unwrap();
    let bindings = coopan::logicalc::eval_logicalc(
        &parse_logicalc(REFERENCE_LC).unwrap(),
        Some(LcValue::pair(LcValue::Int(k), LcValue::Int(code))),
    )
    .unwrap();
    (1..=4)
        .map(|i| {
            set_of(&bindings[&format!("F{i}star")])
                .iter()
                .map(|p| {
                    let (from, to) = pair(p);
                    (decode(&coding, from), decode(&coding, to))
                })
                .collect()
        })
        .collect()
}
