use std::collections::{BTreeMap, BTreeSet};

use super::{ArithOp, Expr, LcError, LcModel, LcValue, Location, Pat, Qualifier, Relation, Statement};

pub type Bindings = BTreeMap<String, LcValue>;

const MAX_ROUNDS: usize = 100_000;

struct Scope<'a> {
    globals: &'a Bindings,
    locals: Vec<(String, LcValue)>,
}

impl Scope<'_> {
    fn lookup(&self, name: &str) -> Option<&LcValue> {
        self.locals
            .iter()
            .rev()
            .find(|(n, _)| n == name)
            .map(|(_, v)| v)
            .or_else(|| self.globals.get(name))
    }

    fn local(&self, name: &str) -> Option<&LcValue> {
        self.locals.iter().rev().find(|(n, _)| n == name).map(|(_, v)| v)
    }
}

fn location_of(expr: &Expr) -> Location {
    match expr {
        Expr::Name(_, loc) => *loc,
        Expr::Tuple(items) | Expr::Set(items) => items.first().map(location_of).unwrap_or_default(),
        Expr::Union(a, _) | Expr::Arith(_, a, _) => location_of(a),
        Expr::Comprehension { head, .. } => location_of(head),
        Expr::Int(_) => Location::default(),
    }
}

fn int(value: LcValue, expr: &Expr) -> Result<i64, LcError> {
    match value {
        LcValue::Int(n) => Ok(n),
        other => Err(LcError::Type {
            location: location_of(expr),
            message: format!("expected an integer, found {other}"),
        }),
    }
}

fn set(value: LcValue, expr: &Expr) -> Result<BTreeSet<LcValue>, LcError> {
    match value {
        LcValue::Set(s) => Ok(s),
        other => Err(LcError::Type {
            location: location_of(expr),
            message: format!("expected a set, found {other}"),
        }),
    }
}

fn eval(expr: &Expr, scope: &mut Scope<'_>) -> Result<LcValue, LcError> {
    match expr {
        Expr::Int(n) => Ok(LcValue::Int(*n)),
        Expr::Name(name, location) => scope
            .lookup(name)
            .cloned()
            .ok_or_else(|| LcError::Unbound { location: *location, name: name.clone() }),
        Expr::Tuple(items) => Ok(LcValue::Tuple(
            items.iter().map(|e| eval(e, scope)).collect::<Result<_, _>>()?,
        )),
        Expr::Set(items) => Ok(LcValue::Set(
            items.iter().map(|e| eval(e, scope)).collect::<Result<_, _>>()?,
        )),
        Expr::Union(a, b) => {
            let mut left = set(eval(a, scope)?, a)?;
            left.extend(set(eval(b, scope)?, b)?);
            Ok(LcValue::Set(left))
        }
        Expr::Arith(op, a, b) => {
            let x = int(eval(a, scope)?, a)?;
            let y = int(eval(b, scope)?, b)?;
            let result = match op {
                ArithOp::Add => x.checked_add(y),
                ArithOp::Sub => x.checked_sub(y),
                ArithOp::Mul => x.checked_mul(y),
            };
            result.map(LcValue::Int).ok_or_else(|| LcError::Type {
                location: location_of(expr),
                message: "integer overflow".into(),
            })
        }
        Expr::Comprehension { head, qualifiers } => {
            let mut out = BTreeSet::new();
            comprehend(head, qualifiers, scope, &mut out)?;
            Ok(LcValue::Set(out))
        }
    }
}

/// Matches `value` against `pat`, pushing new locals. Names already bound by an
/// enclosing generator must match their current value.
fn bind(pat: &Pat, value: &LcValue, scope: &mut Scope<'_>) -> bool {
    match (pat, value) {
        (Pat::Var(name), v) => match scope.local(name) {
            Some(existing) => existing == v,
            None => {
                scope.locals.push((name.clone(), v.clone()));
                true
            }
        },
        (Pat::Int(n), LcValue::Int(m)) => n == m,
        (Pat::Tuple(pats), LcValue::Tuple(items)) if pats.len() == items.len() => {
            pats.iter().zip(items).all(|(p, v)| bind(p, v, scope))
        }
        _ => false,
    }
}

fn comprehend(
    head: &Expr,
    qualifiers: &[Qualifier],
    scope: &mut Scope<'_>,
    out: &mut BTreeSet<LcValue>,
) -> Result<(), LcError> {
    let Some((first, rest)) = qualifiers.split_first() else {
        out.insert(eval(head, scope)?);
        return Ok(());
    };
    match first {
        Qualifier::Guard { lhs, rhs } => {
            let x = int(eval(lhs, scope)?, lhs)?;
            let y = int(eval(rhs, scope)?, rhs)?;
            if x <= y {
                comprehend(head, rest, scope, out)?;
            }
        }
        Qualifier::Generator { pattern, source } => {
            let elements = set(eval(source, scope)?, source)?;
            for element in &elements {
                let depth = scope.locals.len();
                if bind(pattern, element, scope) {
                    comprehend(head, rest, scope, out)?;
                }
                scope.locals.truncate(depth);
            }
        }
    }
    Ok(())
}

/// Whether each occurrence of a name from `recursive` is in a position where
/// growing that set can only grow the result: a union operand or generator
/// source.
fn monotone_in(expr: &Expr, recursive: &BTreeSet<String>) -> bool {
    match expr {
        Expr::Int(_) | Expr::Name(..) => true,
        Expr::Union(a, b) => monotone_in(a, recursive) && monotone_in(b, recursive),
        Expr::Comprehension { head, qualifiers } => {
            let mentions = |e: &Expr| e.free_names().iter().any(|n| recursive.contains(n));
            !mentions(head)
                && qualifiers.iter().all(|q| match q {
                    Qualifier::Generator { source, .. } => monotone_in(source, recursive),
                    Qualifier::Guard { lhs, rhs } => !mentions(lhs) && !mentions(rhs),
                })
        }
        Expr::Tuple(_) | Expr::Set(_) | Expr::Arith(..) => {
            expr.free_names().iter().all(|n| !recursive.contains(n))
        }
    }
}

fn check(statement: &Statement, globals: &Bindings) -> Result<(), LcError> {
    let mut scope = Scope { globals, locals: Vec::new() };
    let unsolved = |e: &LcError| matches!(e, LcError::Unbound { .. });
    let lhs = eval(&statement.lhs, &mut scope);
    let rhs = eval(&statement.rhs, &mut scope);
    let (lhs, rhs) = match (lhs, rhs) {
        (Ok(l), Ok(r)) => (l, r),
        (Err(e), _) | (_, Err(e)) if unsolved(&e) => {
            return Err(LcError::Unsupported {
                location: statement.location,
                feature: "constraints over unknown sets need a search-based solver".into(),
            })
        }
        (Err(e), _) | (_, Err(e)) => return Err(e),
    };
    let holds = match statement.relation {
        Relation::Eq => lhs == rhs,
        Relation::Subset => set(lhs, &statement.lhs)?.is_subset(&set(rhs, &statement.rhs)?),
        Relation::In => set(rhs, &statement.rhs)?.contains(&lhs),
        Relation::Le => int(lhs, &statement.lhs)? <= int(rhs, &statement.rhs)?,
    };
    if holds {
        Ok(())
    } else {
        Err(LcError::ConstraintViolated { location: statement.location })
    }
}

/// Evaluates a model, with `c0` bound beforehand when given.
///
/// Definitions whose right-hand side only uses bound names are evaluated in
/// order. The remaining definitions form one recursive system, solved by
/// iterating from empty sets to the least fixpoint. Other statements are
/// checked against the final bindings.
pub fn eval_logicalc(model: &LcModel, c0: Option<LcValue>) -> Result<Bindings, LcError> {
    let mut globals = Bindings::new();
    if let Some(value) = c0 {
        globals.insert("c0".to_string(), value);
    }
    let mut deferred: Vec<(&str, &Expr, Location)> = Vec::new();
    let mut checks: Vec<&Statement> = Vec::new();
    for statement in &model.statements {
        match statement.definition() {
            Some((name, rhs)) if !globals.contains_key(name) && !deferred.iter().any(|d| d.0 == name) => {
                let ready = rhs.free_names().iter().all(|n| globals.contains_key(n));
                if ready {
                    let mut scope = Scope { globals: &globals, locals: Vec::new() };
                    let value = eval(rhs, &mut scope)?;
                    globals.insert(name.to_string(), value);
                } else {
                    deferred.push((name, rhs, statement.location));
                }
            }
            _ => checks.push(statement),
        }
    }

    if !deferred.is_empty() {
        let recursive: BTreeSet<String> = deferred.iter().map(|d| d.0.to_string()).collect();
        // Names used at or before their own definition.
        let mut forward = BTreeSet::new();
        for (i, (_, rhs, location)) in deferred.iter().enumerate() {
            for name in rhs.free_names() {
                if let Some(j) = deferred.iter().position(|d| d.0 == name) {
                    if j >= i {
                        forward.insert(name);
                    }
                } else if !globals.contains_key(&name) {
                    return Err(LcError::Unbound { location: *location, name });
                }
            }
        }
        if forward.len() > 1 {
            let (name, _, location) = deferred[0];
            return Err(LcError::NonMonotone {
                location,
                name: name.to_string(),
                reason: format!(
                    "only one recursive equation is supported, found {}",
                    forward.into_iter().collect::<Vec<_>>().join(", ")
                ),
            });
        }
        for (name, rhs, location) in &deferred {
            if !monotone_in(rhs, &recursive) {
                return Err(LcError::NonMonotone {
                    location: *location,
                    name: name.to_string(),
                    reason: "recursive names may only appear as union operands or generator sources"
                        .into(),
                });
            }
            globals.insert(name.to_string(), LcValue::Set(BTreeSet::new()));
        }
        let mut rounds = 0;
        loop {
            let mut changed = false;
            for (name, rhs, _) in &deferred {
                let mut scope = Scope { globals: &globals, locals: Vec::new() };
                let value = eval(rhs, &mut scope)?;
                if value.as_set().is_none() {
                    return Err(LcError::Type {
                        location: location_of(rhs),
                        message: format!("recursive definition of `{name}` must be a set"),
                    });
                }
                if globals.get(*name) != Some(&value) {
                    globals.insert(name.to_string(), value);
                    changed = true;
                }
            }
            if !changed {
                break;
            }
            rounds += 1;
            if rounds > MAX_ROUNDS {
                return Err(LcError::Divergent);
            }
        }
    }

    for statement in checks {
        check(statement, &globals)?;
    }
    Ok(globals)
}
