use std::collections::BTreeSet;
use std::fmt::Write;

use super::LcValue;
use crate::abstraction::{AbstractSolver, PropertyId, PropertySpace};
use crate::logic::{Atom, Theory, Value};

fn capitalized(name: &str) -> String {
    let clean: String = name.chars().filter(|c| c.is_ascii_alphanumeric()).collect();
    let mut chars = clean.chars();
    match chars.next() {
        Some(first) => first.to_ascii_uppercase().to_string() + chars.as_str(),
        None => String::new(),
    }
}

fn atom_name(atom: &Atom) -> String {
    let mut name: String = atom.predicate.chars().filter(|c| c.is_ascii_alphanumeric()).collect();
    for arg in &atom.args {
        match arg {
            Value::Name(n) => name.push_str(&capitalized(n)),
            Value::Index(k) => name.push_str(&k.to_string()),
        }
    }
    name
}

fn is_reserved(name: &str, solver_count: u32) -> bool {
    if matches!(name, "in" | "subset" | "p" | "c0" | "Cdata") {
        return true;
    }
    (1..=solver_count).any(|k| {
        [format!("F{k}star"), format!("img{k}"), format!("i{k}"), format!("z{k}"), format!("c{k}"), format!("c{k}{k}")]
            .contains(&name.to_string())
    })
}

/// LogiCalc names for each data part, in coding order: `true` for the empty
/// conjunction, otherwise the implication-maximal atoms run together
/// (`tree(i) & ok(l)` becomes `okLtreeI`). Clashing names fall back to `d<code>`.
pub fn data_names(space: &PropertySpace, theory: &Theory) -> Vec<String> {
    let mut used = BTreeSet::new();
    space
        .data_parts()
        .iter()
        .enumerate()
        .map(|(code, data)| {
            let atoms = theory.maximal_atoms(data);
            let mut name = if atoms.is_empty() {
                "true".to_string()
            } else {
                atoms.into_iter().map(atom_name).collect()
            };
            let valid = name.chars().next().is_some_and(|c| c.is_ascii_alphabetic());
            if !valid || is_reserved(&name, space.solver_count()) || used.contains(&name) {
                name = format!("d{code}");
            }
            used.insert(name.clone());
            name
        })
        .collect()
}

/// `(k, code)` for a property.
pub fn property_code(space: &PropertySpace, id: PropertyId) -> LcValue {
    let property = space.get(id);
    LcValue::pair(
        LcValue::Int(i64::from(property.do_index.0)),
        LcValue::Int(space.data_code(id) as i64),
    )
}

fn write_list(out: &mut String, items: &[String], per_line: usize, indent: &str) {
    for (i, chunk) in items.chunks(per_line).enumerate() {
        if i > 0 {
            out.push_str(",\n");
            out.push_str(indent);
        }
        out.push_str(&chunk.join(", "));
    }
}

/// Writes the constraint system (codings, relations, image sets and the
/// feasible-set equation). `c0` is left free.
pub fn export_logicalc(space: &PropertySpace, solvers: &[AbstractSolver], theory: &Theory) -> String {
    let names = data_names(space, theory);
    let n = space.solver_count();
    let mut out = String::new();

    let codings: Vec<String> = names.iter().enumerate().map(|(code, name)| format!("{name} = {code};")).collect();
    for chunk in codings.chunks(4) {
        writeln!(out, "{}", chunk.join(" ")).unwrap();
    }
    out.push_str("Cdata = { ");
    write_list(&mut out, &names, 4, "          ");
    out.push_str(" };\n");

    for solver in solvers {
        let k = solver.solver.0;
        let own: Vec<(PropertyId, PropertyId)> =
            solver.pairs().filter(|(from, _)| space.get(*from).do_index == solver.solver).collect();
        let own_identity = own.iter().all(|(a, b)| a == b)
            && own.len() == space.data_parts().len();
        let mut identity_indices: Vec<u32> = (1..=n).filter(|&i| i != k).collect();
        let mut explicit = Vec::new();
        if own_identity {
            identity_indices.push(k);
            identity_indices.sort_unstable();
        } else {
            let render = |id: PropertyId| {
                let p = space.get(id);
                format!("({}, {})", p.do_index, names[space.data_code(id)])
            };
            explicit = own.iter().map(|&(a, b)| format!("({}, {})", render(a), render(b))).collect();
        }

        write!(out, "F{k}star = ").unwrap();
        if !explicit.is_empty() {
            out.push_str("{\n        ");
            out.push_str(&explicit.join(",\n        "));
            out.push_str(" }");
        }
        if !identity_indices.is_empty() {
            if !explicit.is_empty() {
                out.push_str(" \\/\n");
            }
            let indices: Vec<String> = identity_indices.iter().map(u32::to_string).collect();
            write!(
                out,
                "{{ ((i{k}, z{k}), (i{k}, z{k})) | i{k} in {{ {} }}, z{k} in Cdata }}",
                indices.join(", ")
            )
            .unwrap();
        }
        if explicit.is_empty() && identity_indices.is_empty() {
            out.push_str("{}");
        }
        out.push_str(";\n");
    }
    for solver in solvers {
        let k = solver.solver.0;
        writeln!(out, "img{k} = {{ c{k}{k} | (c{k}, c{k}{k}) in F{k}star; c{k} in p }};").unwrap();
    }
    out.push_str("p = { c0 }");
    for solver in solvers {
        write!(out, " \\/ img{}", solver.solver.0).unwrap();
    }
    out.push_str(";\n");
    out
}
