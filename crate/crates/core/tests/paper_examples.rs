mod common;

use std::collections::BTreeSet;

use coopan::abstraction::PropertyId;
use coopan::fixpoint::{check_fixpoint, check_fun, kleene_iterates};
use common::{id, ids, naive_qp, simplex_hc};

fn image(analysis: &coopan::Analysis, solver: usize, from: &str) -> Vec<PropertyId> {
    analysis.solvers[solver].image_of(id(analysis, from)).iter().copied().collect()
}

#[test]
fn property_counts() {
    assert_eq!(naive_qp().space.len(), 24);
    assert_eq!(simplex_hc().space.len(), 32);
}

#[test]
fn convexity_test_images() {
    let a = naive_qp();
    let listed = [
        ("do(1) & cnvx(f)", vec!["do(2) & cnvx(f)"]),
        ("do(1) & stCnvx(f)", vec!["do(2) & stCnvx(f)"]),
        ("do(1) & min(f, x) & cnvx(f)", vec!["do(2) & min(f, x) & cnvx(f)"]),
        ("do(1) & min(f, x) & stCnvx(f)", vec!["do(2) & min(f, x) & stCnvx(f)"]),
        ("do(1) & min(f, x)", vec!["do(2) & min(f, x) & cnvx(f)", "do(3) & min(f, x)"]),
        ("do(1)", vec!["do(2) & cnvx(f)", "do(3)"]),
    ];
    let mut seen = BTreeSet::new();
    for (from, to) in &listed {
        assert_eq!(image(&a, 0, from), ids(&a, to), "img(F1*, {from})");
        seen.insert(id(&a, from));
    }
    for p in a.space.iter().filter(|p| !seen.contains(&p.id)) {
        assert_eq!(a.solvers[0].image_of(p.id).iter().copied().collect::<Vec<_>>(), vec![p.id]);
    }
}

#[test]
fn descent_and_search_images() {
    let a = naive_qp();
    assert_eq!(image(&a, 1, "do(2) & stCnvx(f)"), ids(&a, &["do(4) & min(f, x) & stCnvx(f)"]));
    assert_eq!(image(&a, 1, "do(2) & cnvx(f)"), ids(&a, &["do(4) & cnvx(f)"]));
    assert_eq!(image(&a, 1, "do(2) & min(f, x) & cnvx(f)"), ids(&a, &["do(4) & cnvx(f)"]));
    assert_eq!(image(&a, 2, "do(3)"), ids(&a, &["do(4) & min(f, x)"]));
    assert_eq!(image(&a, 3, "do(4) & min(f, x)"), ids(&a, &["do(4) & min(f, x)"]));
}

#[test]
fn naive_qp_forward_analysis() {
    let a = naive_qp();
    let p: Vec<_> = a.feasible_from(id(&a, "do(1)")).iter().collect();
    assert_eq!(
        p,
        ids(&a, &["do(1)", "do(2) & cnvx(f)", "do(3)", "do(4) & cnvx(f)", "do(4) & min(f, x)"])
    );
    let unsure = p.iter().filter(|&&m| {
        let c = a.space.get(m).conjunction();
        c.control() == Some(coopan::logic::SolverIndex(4))
            && !c.atoms().contains(&coopan::logic::Atom::data("min", &["f", "x"]))
    });
    assert_eq!(unsure.count(), 1);
}

#[test]
fn naive_qp_reverse_query() {
    let a = naive_qp();
    let solutions = a.solve_query("minimizer", 1).unwrap();
    let c0: Vec<_> = solutions.iter().map(|s| s.c0).collect();
    assert_eq!(c0, ids(&a, &["do(1) & stCnvx(f)", "do(1) & min(f, x) & stCnvx(f)"]));
    assert!(solutions.iter().all(|s| s.witnesses.is_empty()));
}

#[test]
fn simplex_hc_forward_analysis() {
    let a = simplex_hc();
    let p: Vec<_> = a.feasible_from(id(&a, "do(1)")).iter().collect();
    assert_eq!(
        p,
        ids(&a, &["do(1)", "do(1) & ok(l)", "do(2) & ok(l)", "do(3) & ok(l)", "do(4) & ok(l)"])
    );
}

#[test]
fn simplex_hc_reverse_query() {
    let a = simplex_hc();
    let solutions = a.solve_query("sharp", 1).unwrap();
    assert_eq!(solutions.len(), 6);
    let plain = id(&a, "do(4) & ok(l) & ok(i)");
    let tree = id(&a, "do(4) & ok(l) & tree(i) & ok(i)");
    let with_plain: Vec<_> = solutions.iter().filter(|s| s.witnesses == [plain]).map(|s| s.c0).collect();
    assert_eq!(with_plain, ids(&a, &["do(1) & ok(i)", "do(1) & ok(i) & ok(l)"]));
    let with_tree: BTreeSet<_> = solutions.iter().filter(|s| s.witnesses == [tree]).map(|s| s.c0).collect();
    let tree_start = a.resolve(&coopan::dsl::parse_prop_expr("do(1) & tree(i)").unwrap()).unwrap();
    let implying: BTreeSet<_> =
        a.space.iter().filter(|p| p.conjunction().implies(&tree_start)).map(|p| p.id).collect();
    assert_eq!(with_tree.len(), 4);
    assert_eq!(with_tree, implying);
}

#[test]
fn parallel_query_matches_sequential() {
    for a in [naive_qp(), simplex_hc()] {
        for q in &a.model.queries {
            assert_eq!(a.solve_query(&q.name, 1).unwrap(), a.solve_query(&q.name, 4).unwrap());
        }
    }
}

#[test]
fn synthesized_relations_are_total_and_fixpoints_hold() {
    for a in [naive_qp(), simplex_hc()] {
        assert!(a.solvers.iter().all(check_fun));
        for p in a.space.iter() {
            let feasible = a.feasible_from(p.id);
            assert!(check_fixpoint(&a.solvers, p.id, &feasible));
            let iterates = kleene_iterates(&a.solvers, p.id);
            assert_eq!(iterates.last(), Some(&feasible));
        }
    }
}

#[test]
fn done_only_start_reaches_itself() {
    let a = naive_qp();
    let start = id(&a, "do(4)");
    assert_eq!(a.feasible_from(start).iter().collect::<Vec<_>>(), vec![start]);
}
