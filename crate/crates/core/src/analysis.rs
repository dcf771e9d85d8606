//! End-to-end pipeline from specification text to property space, abstract
//! solvers and query answers.

use thiserror::Error;

use crate::abstraction::{
    generate_properties, synthesize_all, AbstractSolver, AbstractionError, PropertyId, PropertySpace,
};
use crate::dsl::{self, validate_spec, Diagnostic, DslError, PropExpr, QueryClause, SpecModel};
use crate::fixpoint::oracle::{concrete_oracle_check, CoverageReport};
use crate::fixpoint::{
    least_feasible_set, solve_reverse_query, solve_reverse_query_parallel, FeasibleSet, Forbid, Query,
    QuerySolution,
};
use crate::logic::{Conjunction, LogicError, Theory};
use crate::patterns::Instance;

#[derive(Debug, Error)]
pub enum AnalysisError {
    #[error(transparent)]
    Parse(#[from] DslError),
    #[error("specification has {} problem(s)", .0.len())]
    Invalid(Vec<Diagnostic>),
    #[error(transparent)]
    Abstraction(#[from] AbstractionError),
    #[error(transparent)]
    Logic(#[from] LogicError),
    #[error("no query named `{0}`")]
    UnknownQuery(String),
    #[error("`{0}` is not a context property of this specification")]
    NotAProperty(String),
    #[error("no initial context given")]
    NoInitial,
}

#[derive(Debug, Clone)]
pub struct Analysis {
    pub model: SpecModel,
    pub theory: Theory,
    /// Ordered by solver index.
    pub instances: Vec<Instance>,
    pub space: PropertySpace,
    /// Aligned with `instances`.
    pub solvers: Vec<AbstractSolver>,
}

impl Analysis {
    pub fn from_source(text: &str, max_properties: usize) -> Result<Self, AnalysisError> {
        Self::from_model(dsl::parse_spec(text)?, max_properties)
    }

    pub fn from_model(model: SpecModel, max_properties: usize) -> Result<Self, AnalysisError> {
        let diagnostics = validate_spec(&model);
        if !diagnostics.is_empty() {
            return Err(AnalysisError::Invalid(diagnostics));
        }
        let theory = model.theory()?;
        let (mut instances, _) = dsl::validate::instantiate_all(&model, &theory);
        instances.sort_by_key(|i| i.index);
        let space = generate_properties(&instances, &theory, max_properties)?;
        let solvers = synthesize_all(&instances, &space)?;
        Ok(Analysis { model, theory, instances, space, solvers })
    }

    pub fn render(&self, id: PropertyId) -> String {
        self.theory.render(self.space.get(id).conjunction())
    }

    pub fn resolve(&self, expr: &PropExpr) -> Result<Conjunction, AnalysisError> {
        Ok(expr.resolve(&self.theory)?)
    }

    /// The property denoted by `expr`, which must be exactly a member of the
    /// space.
    pub fn property_of(&self, expr: &PropExpr) -> Result<PropertyId, AnalysisError> {
        let conj = self.resolve(expr)?;
        self.space.lookup(&conj).ok_or_else(|| AnalysisError::NotAProperty(expr.to_string()))
    }

    pub fn parse_property(&self, text: &str) -> Result<PropertyId, AnalysisError> {
        self.property_of(&dsl::parse_prop_expr(text)?)
    }

    pub fn initial(&self) -> Result<PropertyId, AnalysisError> {
        let expr = self.model.initial.as_ref().ok_or(AnalysisError::NoInitial)?;
        self.property_of(expr)
    }

    pub fn feasible_from(&self, c0: PropertyId) -> FeasibleSet {
        least_feasible_set(&self.solvers, c0)
    }

    pub fn query(&self, name: &str) -> Result<Query, AnalysisError> {
        let decl = self.model.query(name).ok_or_else(|| AnalysisError::UnknownQuery(name.to_string()))?;
        let mut query = Query { name: decl.name.clone(), ..Default::default() };
        for clause in &decl.clauses {
            match clause {
                QueryClause::Given(e) => query.givens.push(self.resolve(e)?),
                QueryClause::Exists(e) => query.exists.push(self.resolve(e)?),
                QueryClause::Forbid { matches, unless } => query.forbids.push(Forbid {
                    matches: self.resolve(matches)?,
                    unless: unless.as_ref().map(|u| self.resolve(u)).transpose()?,
                }),
            }
        }
        Ok(query)
    }

    pub fn solve_query(&self, name: &str, jobs: usize) -> Result<Vec<QuerySolution>, AnalysisError> {
        let query = self.query(name)?;
        Ok(if jobs > 1 {
            solve_reverse_query_parallel(&self.solvers, &self.space, &query, jobs)
        } else {
            solve_reverse_query(&self.solvers, &self.space, &query)
        })
    }

    pub fn oracle_check(&self) -> CoverageReport {
        concrete_oracle_check(&self.instances, &self.theory, &self.space, &self.solvers)
    }
}
