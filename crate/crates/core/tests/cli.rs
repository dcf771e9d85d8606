use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use coopan::report::{parse_text, Report};

fn spec(name: &str) -> String {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("specs").join(name).display().to_string()
}

fn golden(name: &str) -> String {
    std::fs::read_to_string(Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/golden").join(name)).unwrap()
}

fn coopan(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_coopan")).args(args).output().expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn write_temp(dir: &tempfile::TempDir, name: &str, text: &str) -> PathBuf {
    let path = dir.path().join(name);
    std::fs::write(&path, text).unwrap();
    path
}

#[test]
fn properties_lists_table() {
    let out = coopan(&["properties", &spec("naive_qp.csa")]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    assert!(text.starts_with("24 context properties\nP0 do(1)\n"));
    assert_eq!(text.lines().filter(|l| l.starts_with('P')).count(), 24);
}

#[test]
fn query_prints_all_solutions() {
    let out = coopan(&["query", &spec("simplex_hc.csa"), "sharp"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(stdout(&out), golden("simplex_hc_sharp.txt"));
    assert!(stdout(&out).contains("query sharp: 6 solutions\n"));
}

#[test]
fn reach_json_golden() {
    let out = coopan(&["reach", &spec("naive_qp.csa"), "--format", "json"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(stdout(&out), golden("naive_qp_reach.json"));
}

#[test]
fn reach_from_done_stays_put() {
    let out = coopan(&["reach", &spec("naive_qp.csa"), "--initial", "do(4)", "--format", "json"]);
    let report: Report = serde_json::from_str(&stdout(&out)).unwrap();
    let feasible = report.feasible.unwrap();
    assert_eq!(feasible.members, vec![feasible.initial]);
    assert_eq!(report.properties[feasible.initial].text, "do(4)");
}

#[test]
fn text_and_json_carry_the_same_report() {
    let dir = tempfile::tempdir().unwrap();
    let bad = write_temp(&dir, "bad.csa", "pattern a(;) {\n  do(self) & p(F) -> do(self);\n}\n");
    let broken = write_temp(&dir, "broken.csa", "pattern a(; {\n");
    let naive = spec("naive_qp.csa");
    let simplex = spec("simplex_hc.csa");
    let bad = bad.display().to_string();
    let broken = broken.display().to_string();
    let commands: Vec<Vec<&str>> = vec![
        vec!["check", &naive],
        vec!["check", &bad],
        vec!["check", &broken],
        vec!["properties", &simplex],
        vec!["solvers", &naive],
        vec!["solvers", &simplex],
        vec!["reach", &simplex],
        vec!["reach", &naive, "--initial", "do(2) & stCnvx(f)"],
        vec!["query", &naive, "minimizer"],
        vec!["query", &simplex, "sharp"],
        vec!["properties", &bad],
    ];
    for args in commands {
        let text = coopan(&args);
        let json = coopan(&[args.as_slice(), &["--format", "json"]].concat());
        assert_eq!(text.status.code(), json.status.code(), "{args:?}");
        let from_text = parse_text(&stdout(&text)).unwrap_or_else(|| panic!("unparseable text for {args:?}"));
        let from_json: Report = serde_json::from_str(&stdout(&json)).unwrap();
        assert_eq!(from_text, from_json, "{args:?}");
    }
}

#[test]
fn exit_statuses() {
    let dir = tempfile::tempdir().unwrap();
    let no_initial = write_temp(
        &dir,
        "no_initial.csa",
        "pattern done(;) {\n  do(self) -> do(self);\n}\nsolver 1 = done(;);\n",
    );
    let syntax = write_temp(&dir, "syntax.csa", "pattern a(; {\n");
    let missing = dir.path().join("missing.csa");
    let naive = spec("naive_qp.csa");
    let cases: Vec<(Vec<&str>, i32)> = vec![
        (vec!["check", &naive], 0),
        (vec!["check", missing.to_str().unwrap()], 1),
        (vec!["check", syntax.to_str().unwrap()], 1),
        (vec!["reach", syntax.to_str().unwrap()], 1),
        (vec!["reach", &naive, "--initial", "do(9)"], 1),
        (vec!["reach", &naive, "--initial", "do(1) & ok(l)"], 1),
        (vec!["reach", no_initial.to_str().unwrap()], 2),
        (vec!["reach", no_initial.to_str().unwrap(), "--initial", "do(1)"], 0),
        (vec!["query", &naive, "nope"], 2),
        (vec!["frobnicate"], 2),
        (vec!["properties"], 2),
        (vec!["properties", &naive, "--format", "xml"], 2),
        (vec!["eval-logicalc", missing.to_str().unwrap()], 1),
    ];
    for (args, code) in cases {
        let out = coopan(&args);
        assert_eq!(out.status.code(), Some(code), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    }
}

#[test]
fn syntax_errors_are_located() {
    let dir = tempfile::tempdir().unwrap();
    let path = write_temp(&dir, "s.csa", "axiom p(X) => q(X);\nsolver 1 = ;\n");
    let out = coopan(&["check", path.to_str().unwrap(), "--format", "json"]);
    let report: Report = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(report.diagnostics.len(), 1);
    assert_eq!(report.diagnostics[0].kind.as_str(), "syntax");
    assert_eq!(report.diagnostics[0].line, 2);
}

#[test]
fn export_then_eval() {
    let dir = tempfile::tempdir().unwrap();
    let file = dir.path().join("hc.lc");
    let out = coopan(&["export-logicalc", &spec("simplex_hc.csa"), "-o", file.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let out = coopan(&["eval-logicalc", file.to_str().unwrap(), "--c0", "(1, 0)"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(stdout(&out).contains("p = { (1, 0), (1, 2), (2, 2), (3, 2), (4, 2) }\n"));
}

#[test]
fn every_command_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let naive = spec("naive_qp.csa");
    let simplex = spec("simplex_hc.csa");
    let reference = Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures/reference_hc.lc").display().to_string();
    for format in ["text", "json"] {
        let commands: Vec<Vec<&str>> = vec![
            vec!["check", &naive],
            vec!["properties", &naive],
            vec!["solvers", &simplex],
            vec!["reach", &simplex],
            vec!["query", &naive, "minimizer"],
            vec!["query", &simplex, "sharp", "--jobs", "4"],
            vec!["export-logicalc", &simplex],
            vec!["eval-logicalc", &reference, "--c0", "(1, 5)"],
        ];
        for args in commands {
            let args = [args.as_slice(), &["--format", format]].concat();
            let (first, second) = (coopan(&args), coopan(&args));
            assert_eq!(first.stdout, second.stdout, "{args:?}");
            assert_eq!(first.status.code(), Some(0), "{args:?}");
        }
    }
    let (a, b) = (dir.path().join("a.lc"), dir.path().join("b.lc"));
    coopan(&["export-logicalc", &naive, "-o", a.to_str().unwrap()]);
    coopan(&["export-logicalc", &naive, "-o", b.to_str().unwrap()]);
    assert_eq!(std::fs::read(a).unwrap(), std::fs::read(b).unwrap());
}
