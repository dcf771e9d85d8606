//! One PASS/FAIL line per acceptance criterion; exits non-zero on any failure.

mod common;

use std::collections::BTreeSet;
use std::process::Command;

use coopan::abstraction::PropertyId;
use coopan::fixpoint::{check_fixpoint, check_fun};
use coopan::logic::{Atom, SolverIndex};
use coopan::logicalc::{eval_logicalc, export_logicalc, parse_logicalc, property_code, LcValue};
use coopan::Analysis;
use common::{id, ids, mutation_detected, naive_qp, simplex_hc};

type Outcome = Result<(), String>;
type Criterion = (&'static str, fn() -> Outcome);

fn ensure(cond: bool, message: impl FnOnce() -> String) -> Outcome {
    if cond {
        Ok(())
    } else {
        Err(message())
    }
}

fn property_counts() -> Outcome {
    let (a, b) = (naive_qp().space.len(), simplex_hc().space.len());
    ensure(a == 24 && b == 32, || format!("got {a} and {b}"))
}

fn convexity_images() -> Outcome {
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
        let got: Vec<_> = a.solvers[0].image_of(id(&a, from)).iter().copied().collect();
        ensure(got == ids(&a, to), || format!("img(F1*, {from})"))?;
        seen.insert(id(&a, from));
    }
    for p in a.space.iter().filter(|p| !seen.contains(&p.id)) {
        let got: Vec<_> = a.solvers[0].image_of(p.id).iter().copied().collect();
        ensure(got == [p.id], || format!("img(F1*, {}) is not the identity", a.render(p.id)))?;
    }
    Ok(())
}

fn reference_relations() -> Outcome {
    let a = simplex_hc();
    let reference = common::reference_relations(&a);
    let expected_counts = [8, 8, 16, 8];
    for ((solver, listed), count) in a.solvers.iter().zip(&reference).zip(expected_counts) {
        let k = solver.solver;
        let on_index = |pairs: &BTreeSet<(PropertyId, PropertyId)>| -> BTreeSet<_> {
            pairs.iter().copied().filter(|(from, _)| a.space.get(*from).do_index == k).collect()
        };
        let ours: BTreeSet<_> = solver.pairs().collect();
        ensure(on_index(&ours) == on_index(listed), || format!("F{k}star differs from the reference listing"))?;
        ensure(on_index(&ours).len() == count, || format!("F{k}star has {} pairs", on_index(&ours).len()))?;
        ensure(ours.difference(&on_index(&ours)).all(|(x, y)| x == y), || {
            format!("F{k}star moves another solver's property")
        })?;
        ensure(listed.difference(&on_index(listed)).all(|(x, y)| x == y), || {
            format!("reference F{k}star off-index pairs are not identities")
        })?;
    }
    Ok(())
}

fn simplex_forward() -> Outcome {
    let a = simplex_hc();
    let got: Vec<_> = a.feasible_from(id(&a, "do(1)")).iter().collect();
    let want = ids(&a, &["do(1)", "do(1) & ok(l)", "do(2) & ok(l)", "do(3) & ok(l)", "do(4) & ok(l)"]);
    ensure(got == want, || format!("got {:?}", got.iter().map(|&p| a.render(p)).collect::<Vec<_>>()))
}

fn naive_forward() -> Outcome {
    let a = naive_qp();
    let got: Vec<_> = a.feasible_from(id(&a, "do(1)")).iter().collect();
    ensure(got.len() == 5, || format!("{} members", got.len()))?;
    let verbatim = ids(&a, &["do(1)", "do(2) & cnvx(f)", "do(3)", "do(4) & min(f, x)"]);
    ensure(verbatim.iter().all(|p| got.contains(p)), || "a listed member is missing".into())?;
    let fifth: Vec<_> = got.iter().filter(|p| !verbatim.contains(p)).collect();
    let min = Atom::data("min", &["f", "x"]);
    let c = a.space.get(*fifth[0]).conjunction();
    ensure(c.control() == Some(SolverIndex(4)) && !c.atoms().contains(&min), || {
        format!("fifth member is {}", a.render(*fifth[0]))
    })
}

fn naive_query() -> Outcome {
    let a = naive_qp();
    let got: Vec<_> = a.solve_query("minimizer", 1).map_err(|e| e.to_string())?.iter().map(|s| s.c0).collect();
    let want = ids(&a, &["do(1) & stCnvx(f)", "do(1) & min(f, x) & stCnvx(f)"]);
    ensure(got == want, || format!("got {:?}", got.iter().map(|&p| a.render(p)).collect::<Vec<_>>()))
}

fn simplex_query() -> Outcome {
    let a = simplex_hc();
    let solutions = a.solve_query("sharp", 1).map_err(|e| e.to_string())?;
    ensure(solutions.len() == 6, || format!("{} solutions", solutions.len()))?;
    let plain = id(&a, "do(4) & ok(l) & ok(i)");
    let tree = id(&a, "do(4) & ok(l) & tree(i) & ok(i)");
    let with_plain: Vec<_> = solutions.iter().filter(|s| s.witnesses == [plain]).map(|s| s.c0).collect();
    ensure(with_plain == ids(&a, &["do(1) & ok(i)", "do(1) & ok(i) & ok(l)"]), || "plain witnesses".into())?;
    let start = a.resolve(&coopan::dsl::parse_prop_expr("do(1) & tree(i)").unwrap()).unwrap();
    let implying: BTreeSet<_> = a.space.iter().filter(|p| p.conjunction().implies(&start)).map(|p| p.id).collect();
    let with_tree: BTreeSet<_> = solutions.iter().filter(|s| s.witnesses == [tree]).map(|s| s.c0).collect();
    ensure(with_tree.len() == 4 && with_tree == implying, || "tree witnesses".into())
}

fn soundness(a: &Analysis, name: &str) -> Outcome {
    ensure(a.solvers.iter().all(check_fun), || format!("{name}: a relation is not total"))?;
    for p in a.space.iter() {
        ensure(check_fixpoint(&a.solvers, p.id, &a.feasible_from(p.id)), || {
            format!("{name}: not a fixpoint from {}", a.render(p.id))
        })?;
    }
    let report = a.oracle_check();
    ensure(report.is_sound(), || format!("{name}: {} coverage violations", report.violations.len()))?;
    for (which, solver) in a.solvers.iter().enumerate() {
        for (from, to) in solver.pairs() {
            ensure(mutation_detected(a, which, from, to), || {
                format!("{name}: deleting {} -> {} goes unnoticed", a.render(from), a.render(to))
            })?;
        }
    }
    Ok(())
}

fn property_checks() -> Outcome {
    soundness(&naive_qp(), "naive_qp")?;
    soundness(&simplex_hc(), "simplex_hc")
}

fn logicalc_round_trip() -> Outcome {
    for (name, a) in [("naive_qp", naive_qp()), ("simplex_hc", simplex_hc())] {
        let model = parse_logicalc(&export_logicalc(&a.space, &a.solvers, &a.theory)).map_err(|e| e.to_string())?;
        for p in a.space.iter() {
            let bindings = eval_logicalc(&model, Some(property_code(&a.space, p.id))).map_err(|e| e.to_string())?;
            let want: BTreeSet<_> = a.feasible_from(p.id).iter().map(|m| property_code(&a.space, m)).collect();
            ensure(bindings["p"].as_set() == Some(&want), || format!("{name}: p differs from {}", a.render(p.id)))?;
        }
    }
    let text = "x = { 2, 3, 5 };\nx subset { 2, 3, 5, 7 };\ny = { i * j | i in x; j in x; i + 1 <= j };\ny = { 6, 10, 15 }";
    let bindings = eval_logicalc(&parse_logicalc(text).unwrap(), None).map_err(|e| e.to_string())?;
    let want = LcValue::Set([6, 10, 15].into_iter().map(LcValue::Int).collect());
    ensure(bindings["y"] == want, || format!("y = {}", bindings["y"]))
}

fn determinism() -> Outcome {
    let dir = std::path::Path::new(env!("CARGO_MANIFEST_DIR"));
    let naive = dir.join("specs/naive_qp.csa").display().to_string();
    let simplex = dir.join("specs/simplex_hc.csa").display().to_string();
    let reference = dir.join("tests/fixtures/reference_hc.lc").display().to_string();
    let commands: Vec<Vec<&str>> = vec![
        vec!["check", &naive],
        vec!["properties", &naive],
        vec!["solvers", &simplex],
        vec!["reach", &naive],
        vec!["reach", &simplex, "--initial", "do(1) & tree(i)"],
        vec!["query", &naive, "minimizer"],
        vec!["query", &simplex, "sharp", "--jobs", "4"],
        vec!["export-logicalc", &simplex],
        vec!["eval-logicalc", &reference, "--c0", "(1, 5)"],
    ];
    for args in &commands {
        for format in ["text", "json"] {
            let args = [args.as_slice(), &["--format", format]].concat();
            let run = || Command::new(env!("CARGO_BIN_EXE_coopan")).args(&args).output().map_err(|e| e.to_string());
            let (first, second) = (run()?, run()?);
            ensure(first.status.success(), || format!("{args:?} failed"))?;
            ensure(first.stdout == second.stdout, || format!("{args:?} differs between runs"))?;
        }
    }
    Ok(())
}

fn main() {
    let criteria: [Criterion; 10] = [
        ("property counts (24, 32)", property_counts),
        ("convexity test abstract solver images", convexity_images),
        ("simplex/HC abstract solvers match the reference listing", reference_relations),
        ("simplex/HC feasible set from do(1)", simplex_forward),
        ("quadratic program feasible set from do(1)", naive_forward),
        ("quadratic program reverse query", naive_query),
        ("simplex/HC reverse query", simplex_query),
        ("totality, fixpoints, oracle coverage, mutations", property_checks),
        ("LogiCalc round trip and prime factors", logicalc_round_trip),
        ("deterministic CLI output", determinism),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        match std::panic::catch_unwind(check) {
            Ok(Ok(())) => println!("PASS {:>2} {name}", i + 1),
            Ok(Err(reason)) => {
                failed += 1;
                println!("FAIL {:>2} {name}: {reason}", i + 1);
            }
            Err(_) => {
                failed += 1;
                println!("FAIL {:>2} {name}: panicked", i + 1);
            }
        }
    }
    if failed > 0 {
        std::process::exit(1);
    }
}
