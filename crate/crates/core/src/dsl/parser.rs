use std::collections::BTreeMap;

use super::{
    AxiomDecl, DslError, InstanceDecl, PatternDecl, PropExpr, QueryClause, QueryDecl, Span, SpecModel,
};
use crate::logic::{Atom, AtomSchema, ImplicationAxiom, SolverIndex, Value, CONTROL_PREDICATE};
use crate::patterns::{AtomTemplate, ConditionTemplate, ControlTarget, DataParam, Pattern, Rule};

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    Ident(String),
    Int(u64),
    LParen,
    RParen,
    LBrace,
    RBrace,
    Comma,
    Semi,
    Amp,
    Arrow,
    FatArrow,
    Eq,
    Eof,
}

impl Tok {
    fn describe(&self) -> String {
        match self {
            Tok::Ident(s) => format!("`{s}`"),
            Tok::Int(n) => format!("`{n}`"),
            Tok::LParen => "`(`".into(),
            Tok::RParen => "`)`".into(),
            Tok::LBrace => "`{`".into(),
            Tok::RBrace => "`}`".into(),
            Tok::Comma => "`,`".into(),
            Tok::Semi => "`;`".into(),
            Tok::Amp => "`&`".into(),
            Tok::Arrow => "`->`".into(),
            Tok::FatArrow => "`=>`".into(),
            Tok::Eq => "`=`".into(),
            Tok::Eof => "end of input".into(),
        }
    }
}

fn lex(text: &str) -> Result<Vec<(Tok, Span)>, DslError> {
    let mut out = Vec::new();
    let chars: Vec<char> = text.chars().collect();
    let (mut i, mut line, mut col) = (0, 1, 1);
    while i < chars.len() {
        let c = chars[i];
        let span = Span { line, column: col };
        let advance = |n: usize, i: &mut usize, col: &mut usize| {
            *i += n;
            *col += n;
        };
        match c {
            '\n' => {
                i += 1;
                line += 1;
                col = 1;
            }
            c if c.is_whitespace() => advance(1, &mut i, &mut col),
            '#' => {
                while i < chars.len() && chars[i] != '\n' {
                    i += 1;
                }
            }
            '(' | ')' | '{' | '}' | ',' | ';' | '&' => {
                let tok = match c {
                    '(' => Tok::LParen,
                    ')' => Tok::RParen,
                    '{' => Tok::LBrace,
                    '}' => Tok::RBrace,
                    ',' => Tok::Comma,
                    ';' => Tok::Semi,
                    _ => Tok::Amp,
                };
                out.push((tok, span));
                advance(1, &mut i, &mut col);
            }
            '-' if chars.get(i + 1) == Some(&'>') => {
                out.push((Tok::Arrow, span));
                advance(2, &mut i, &mut col);
            }
            '=' if chars.get(i + 1) == Some(&'>') => {
                out.push((Tok::FatArrow, span));
                advance(2, &mut i, &mut col);
            }
            '=' => {
                out.push((Tok::Eq, span));
                advance(1, &mut i, &mut col);
            }
            c if c.is_ascii_digit() => {
                let start = i;
                while i < chars.len() && chars[i].is_ascii_digit() {
                    i += 1;
                }
                let digits: String = chars[start..i].iter().collect();
                col += i - start;
                let value = digits.parse().map_err(|_| DslError::Syntax {
                    span,
                    message: format!("integer `{digits}` is too large"),
                })?;
                out.push((Tok::Int(value), span));
            }
            c if c.is_alphabetic() || c == '_' => {
                let start = i;
                while i < chars.len()
                    && (chars[i].is_alphanumeric() || matches!(chars[i], '_' | '?' | '\''))
                {
                    i += 1;
                }
                col += i - start;
                out.push((Tok::Ident(chars[start..i].iter().collect()), span));
            }
            other => {
                return Err(DslError::Syntax { span, message: format!("unexpected character `{other}`") })
            }
        }
    }
    out.push((Tok::Eof, Span { line, column: col }));
    Ok(out)
}

struct Parser {
    toks: Vec<(Tok, Span)>,
    pos: usize,
    arities: BTreeMap<String, usize>,
}

type PResult<T> = Result<T, DslError>;

impl Parser {
    fn peek(&self) -> &Tok {
        &self.toks[self.pos].0
    }

    fn peek_at(&self, offset: usize) -> &Tok {
        let i = (self.pos + offset).min(self.toks.len() - 1);
        &self.toks[i].0
    }

    fn span(&self) -> Span {
        self.toks[self.pos].1
    }

    fn bump(&mut self) -> Tok {
        let tok = self.toks[self.pos].0.clone();
        if self.pos < self.toks.len() - 1 {
            self.pos += 1;
        }
        tok
    }

    fn error<T>(&self, message: impl Into<String>) -> PResult<T> {
        Err(DslError::Syntax { span: self.span(), message: message.into() })
    }

    fn expect(&mut self, tok: Tok) -> PResult<()> {
        if *self.peek() == tok {
            self.bump();
            Ok(())
        } else {
            self.error(format!("expected {}, found {}", tok.describe(), self.peek().describe()))
        }
    }

    fn eat(&mut self, tok: &Tok) -> bool {
        if self.peek() == tok {
            self.bump();
            true
        } else {
            false
        }
    }

    fn is_keyword(&self, word: &str) -> bool {
        matches!(self.peek(), Tok::Ident(s) if s == word)
    }

    fn keyword(&mut self, word: &str) -> PResult<()> {
        if self.is_keyword(word) {
            self.bump();
            Ok(())
        } else {
            self.error(format!("expected `{word}`, found {}", self.peek().describe()))
        }
    }

    fn name(&mut self) -> PResult<String> {
        match self.peek().clone() {
            Tok::Ident(s) => {
                self.bump();
                Ok(s)
            }
            other => self.error(format!("expected a name, found {}", other.describe())),
        }
    }

    fn int(&mut self) -> PResult<u32> {
        match self.peek().clone() {
            Tok::Int(n) => match u32::try_from(n) {
                Ok(v) => {
                    self.bump();
                    Ok(v)
                }
                Err(_) => self.error(format!("integer `{n}` is too large")),
            },
            other => self.error(format!("expected an integer, found {}", other.describe())),
        }
    }

    fn record_arity(&mut self, predicate: &str, arity: usize, span: Span) -> PResult<()> {
        if predicate == CONTROL_PREDICATE {
            return Err(DslError::Syntax {
                span,
                message: "`do` is reserved for control atoms".into(),
            });
        }
        match self.arities.get(predicate) {
            Some(&expected) if expected != arity => Err(DslError::ArityConflict {
                span,
                predicate: predicate.to_string(),
                expected,
                found: arity,
            }),
            Some(_) => Ok(()),
            None => {
                self.arities.insert(predicate.to_string(), arity);
                Ok(())
            }
        }
    }

    /// `NAME ( NAME { , NAME } )`, returning predicate and argument names.
    fn atom_parts(&mut self) -> PResult<(String, Vec<String>, Span)> {
        let span = self.span();
        let predicate = self.name()?;
        self.expect(Tok::LParen)?;
        let mut args = vec![self.name()?];
        while self.eat(&Tok::Comma) {
            args.push(self.name()?);
        }
        self.expect(Tok::RParen)?;
        self.record_arity(&predicate, args.len(), span)?;
        Ok((predicate, args, span))
    }

    fn comma_names(&mut self, stop: &[Tok]) -> PResult<Vec<String>> {
        let mut out = Vec::new();
        if stop.contains(self.peek()) {
            return Ok(out);
        }
        out.push(self.name()?);
        while self.eat(&Tok::Comma) {
            out.push(self.name()?);
        }
        Ok(out)
    }

    fn spec(&mut self) -> PResult<SpecModel> {
        let mut model = SpecModel::default();
        loop {
            let span = self.span();
            match self.peek().clone() {
                Tok::Eof => break,
                Tok::Ident(word) => match word.as_str() {
                    "pattern" => {
                        let decl = self.pattern()?;
                        if model.pattern(&decl.pattern.name).is_some() {
                            return Err(DslError::DuplicatePattern { span, name: decl.pattern.name });
                        }
                        model.patterns.push(decl);
                    }
                    "axiom" => model.axioms.push(self.axiom()?),
                    "solver" => model.instances.push(self.instance()?),
                    "initial" => {
                        self.bump();
                        if model.initial.is_some() {
                            return Err(DslError::Syntax {
                                span,
                                message: "initial context declared twice".into(),
                            });
                        }
                        let expr = self.prop_expr()?;
                        self.expect(Tok::Semi)?;
                        model.initial = Some(expr);
                    }
                    "query" => {
                        let decl = self.query()?;
                        if model.query(&decl.name).is_some() {
                            return Err(DslError::DuplicateQuery { span, name: decl.name });
                        }
                        model.queries.push(decl);
                    }
                    _ => return self.error(format!("unexpected `{word}` at top level")),
                },
                other => return self.error(format!("unexpected {} at top level", other.describe())),
            }
        }
        model.predicates = std::mem::take(&mut self.arities);
        Ok(model)
    }

    fn pattern(&mut self) -> PResult<PatternDecl> {
        let span = self.span();
        self.keyword("pattern")?;
        let name = self.name()?;
        self.expect(Tok::LParen)?;
        let mut data_params = Vec::new();
        if !matches!(self.peek(), Tok::Semi | Tok::RParen) {
            loop {
                let read_only = self.is_keyword("ro") && matches!(self.peek_at(1), Tok::Ident(_));
                if read_only {
                    self.bump();
                }
                data_params.push(DataParam { name: self.name()?, read_only });
                if !self.eat(&Tok::Comma) {
                    break;
                }
            }
        }
        let ctrl_params =
            if self.eat(&Tok::Semi) { self.comma_names(&[Tok::RParen])? } else { Vec::new() };
        self.expect(Tok::RParen)?;
        self.expect(Tok::LBrace)?;
        let mut rules = Vec::new();
        while *self.peek() != Tok::RBrace {
            rules.push(self.rule()?);
        }
        self.expect(Tok::RBrace)?;
        if rules.is_empty() {
            return Err(DslError::Syntax { span, message: format!("pattern `{name}` has no rules") });
        }
        Ok(PatternDecl { pattern: Pattern { name, data_params, ctrl_params, rules }, span })
    }

    fn condition(&mut self, allow_param: bool) -> PResult<ConditionTemplate> {
        self.keyword(CONTROL_PREDICATE)?;
        self.expect(Tok::LParen)?;
        let control = match self.name()? {
            s if s == "self" => ControlTarget::SelfIndex,
            s if allow_param => ControlTarget::Param(s),
            _ => return self.error("preconditions must use do(self)"),
        };
        self.expect(Tok::RParen)?;
        let mut atoms = Vec::new();
        while self.eat(&Tok::Amp) {
            let (predicate, params, _) = self.atom_parts()?;
            atoms.push(AtomTemplate { predicate, params });
        }
        Ok(ConditionTemplate { control, atoms })
    }

    fn rule(&mut self) -> PResult<Rule> {
        let pre = self.condition(false)?;
        self.expect(Tok::Arrow)?;
        let post = self.condition(true)?;
        self.expect(Tok::Semi)?;
        Ok(Rule { pre, post })
    }

    fn axiom(&mut self) -> PResult<AxiomDecl> {
        let span = self.span();
        self.keyword("axiom")?;
        let (p, pv, _) = self.atom_parts()?;
        self.expect(Tok::FatArrow)?;
        let (c, cv, _) = self.atom_parts()?;
        self.expect(Tok::Semi)?;
        let axiom = ImplicationAxiom::new(
            AtomSchema { predicate: p, vars: pv },
            AtomSchema { predicate: c, vars: cv },
        )
        .map_err(|source| DslError::Logic { span, source })?;
        Ok(AxiomDecl { axiom, span })
    }

    fn instance(&mut self) -> PResult<InstanceDecl> {
        let span = self.span();
        self.keyword("solver")?;
        let index = self.int()?;
        self.expect(Tok::Eq)?;
        let pattern = self.name()?;
        self.expect(Tok::LParen)?;
        let data_args = self.comma_names(&[Tok::Semi, Tok::RParen])?;
        let mut ctrl_args = Vec::new();
        if self.eat(&Tok::Semi) && *self.peek() != Tok::RParen {
            ctrl_args.push(self.int()?);
            while self.eat(&Tok::Comma) {
                ctrl_args.push(self.int()?);
            }
        }
        self.expect(Tok::RParen)?;
        self.expect(Tok::Semi)?;
        Ok(InstanceDecl { index, pattern, data_args, ctrl_args, span })
    }

    fn control_atom(&mut self) -> PResult<Atom> {
        self.keyword(CONTROL_PREDICATE)?;
        self.expect(Tok::LParen)?;
        let index = self.int()?;
        self.expect(Tok::RParen)?;
        Ok(Atom::control(SolverIndex(index)))
    }

    fn prop_item(&mut self) -> PResult<Atom> {
        if self.is_keyword(CONTROL_PREDICATE) && *self.peek_at(1) == Tok::LParen {
            self.control_atom()
        } else {
            let (predicate, args, _) = self.atom_parts()?;
            Ok(Atom::new(predicate, args.into_iter().map(Value::Name).collect()))
        }
    }

    fn prop_expr(&mut self) -> PResult<PropExpr> {
        let span = self.span();
        let mut atoms = Vec::new();
        if self.is_keyword("true") && *self.peek_at(1) != Tok::LParen {
            self.bump();
        } else {
            atoms.push(self.prop_item()?);
        }
        while self.eat(&Tok::Amp) {
            atoms.push(self.prop_item()?);
        }
        Ok(PropExpr { atoms, span })
    }

    fn query(&mut self) -> PResult<QueryDecl> {
        let span = self.span();
        self.keyword("query")?;
        let name = self.name()?;
        self.expect(Tok::LBrace)?;
        let mut clauses = Vec::new();
        while *self.peek() != Tok::RBrace {
            let word = self.name()?;
            let clause = match word.as_str() {
                "given" => QueryClause::Given(self.prop_expr()?),
                "exists" => QueryClause::Exists(self.prop_expr()?),
                "forbid" => {
                    let matches = self.prop_expr()?;
                    let unless = if self.is_keyword("unless") {
                        self.bump();
                        Some(self.prop_expr()?)
                    } else {
                        None
                    };
                    QueryClause::Forbid { matches, unless }
                }
                other => {
                    self.pos -= 1;
                    return self.error(format!(
                        "expected `given`, `forbid` or `exists`, found `{other}`"
                    ));
                }
            };
            self.expect(Tok::Semi)?;
            clauses.push(clause);
        }
        self.expect(Tok::RBrace)?;
        Ok(QueryDecl { name, clauses, span })
    }
}

/// Parses a whole specification.
pub fn parse_spec(text: &str) -> Result<SpecModel, DslError> {
    let mut parser = Parser { toks: lex(text)?, pos: 0, arities: BTreeMap::new() };
    parser.spec()
}

/// Parses a standalone conjunction such as `do(1) & ok(l)`.
pub fn parse_prop_expr(text: &str) -> Result<PropExpr, DslError> {
    let mut parser = Parser { toks: lex(text)?, pos: 0, arities: BTreeMap::new() };
    let expr = parser.prop_expr()?;
    parser.expect(Tok::Eof)?;
    Ok(expr)
}
