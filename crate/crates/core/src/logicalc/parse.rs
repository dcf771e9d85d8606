use super::{ArithOp, Expr, LcError, LcModel, LcValue, Location, Pat, Qualifier, Relation, Statement};

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    Int(i64),
    Ident(String),
    LParen,
    RParen,
    LBrace,
    RBrace,
    Comma,
    Semi,
    Bar,
    Union,
    Eq,
    Le,
    Plus,
    Minus,
    Star,
    In,
    Subset,
    Eof,
}

fn lex(text: &str) -> Result<Vec<(Tok, Location)>, LcError> {
    let chars: Vec<char> = text.chars().collect();
    let mut out = Vec::new();
    let (mut i, mut line, mut column) = (0usize, 1usize, 1usize);
    while i < chars.len() {
        let c = chars[i];
        let location = Location { line, column };
        let single = match c {
            '(' => Some(Tok::LParen),
            ')' => Some(Tok::RParen),
            '{' => Some(Tok::LBrace),
            '}' => Some(Tok::RBrace),
            ',' => Some(Tok::Comma),
            ';' => Some(Tok::Semi),
            '|' => Some(Tok::Bar),
            '+' => Some(Tok::Plus),
            '-' => Some(Tok::Minus),
            '*' => Some(Tok::Star),
            '=' => Some(Tok::Eq),
            _ => None,
        };
        if let Some(tok) = single {
            out.push((tok, location));
            i += 1;
            column += 1;
            continue;
        }
        match c {
            '\n' => {
                i += 1;
                line += 1;
                column = 1;
            }
            c if c.is_whitespace() => {
                i += 1;
                column += 1;
            }
            '\\' if chars.get(i + 1) == Some(&'/') => {
                out.push((Tok::Union, location));
                i += 2;
                column += 2;
            }
            '<' if chars.get(i + 1) == Some(&'=') => {
                out.push((Tok::Le, location));
                i += 2;
                column += 2;
            }
            c if c.is_ascii_digit() => {
                let start = i;
                while i < chars.len() && chars[i].is_ascii_digit() {
                    i += 1;
                }
                let digits: String = chars[start..i].iter().collect();
                column += i - start;
                let value = digits.parse().map_err(|_| LcError::Syntax {
                    location,
                    message: format!("integer `{digits}` is too large"),
                })?;
                out.push((Tok::Int(value), location));
            }
            c if c.is_ascii_alphabetic() || c == '_' => {
                let start = i;
                while i < chars.len() && (chars[i].is_ascii_alphanumeric() || chars[i] == '_') {
                    i += 1;
                }
                column += i - start;
                let word: String = chars[start..i].iter().collect();
                let tok = match word.as_str() {
                    "in" => Tok::In,
                    "subset" => Tok::Subset,
                    _ => Tok::Ident(word),
                };
                out.push((tok, location));
            }
            '/' | '<' | '>' | '!' | '^' | '%' | '&' => {
                return Err(LcError::Unsupported {
                    location,
                    feature: format!("operator starting with `{c}`"),
                })
            }
            other => {
                return Err(LcError::Syntax { location, message: format!("unexpected character `{other}`") })
            }
        }
    }
    out.push((Tok::Eof, Location { line, column }));
    Ok(out)
}

struct Parser {
    toks: Vec<(Tok, Location)>,
    pos: usize,
}

type PResult<T> = Result<T, LcError>;

impl Parser {
    fn peek(&self) -> &Tok {
        &self.toks[self.pos].0
    }

    fn location(&self) -> Location {
        self.toks[self.pos].1
    }

    fn bump(&mut self) -> Tok {
        let tok = self.toks[self.pos].0.clone();
        if self.pos < self.toks.len() - 1 {
            self.pos += 1;
        }
        tok
    }

    fn eat(&mut self, tok: &Tok) -> bool {
        if self.peek() == tok {
            self.bump();
            true
        } else {
            false
        }
    }

    fn error<T>(&self, message: impl Into<String>) -> PResult<T> {
        Err(LcError::Syntax { location: self.location(), message: message.into() })
    }

    fn expect(&mut self, tok: Tok) -> PResult<()> {
        if self.eat(&tok) {
            Ok(())
        } else {
            self.error(format!("expected {tok:?}, found {:?}", self.peek()))
        }
    }

    fn model(&mut self) -> PResult<LcModel> {
        let mut statements = Vec::new();
        while *self.peek() != Tok::Eof {
            let location = self.location();
            let lhs = self.expr()?;
            let relation = match self.bump() {
                Tok::Eq => Relation::Eq,
                Tok::Subset => Relation::Subset,
                Tok::In => Relation::In,
                Tok::Le => Relation::Le,
                other => {
                    self.pos -= 1;
                    return self.error(format!("expected a relation, found {other:?}"));
                }
            };
            let rhs = self.expr()?;
            // The final statement may omit its terminator.
            if !self.eat(&Tok::Semi) && *self.peek() != Tok::Eof {
                return self.error(format!("expected `;`, found {:?}", self.peek()));
            }
            statements.push(Statement { lhs, relation, rhs, location });
        }
        Ok(LcModel { statements })
    }

    fn expr(&mut self) -> PResult<Expr> {
        let mut lhs = self.additive()?;
        while self.eat(&Tok::Union) {
            let rhs = self.additive()?;
            lhs = Expr::Union(Box::new(lhs), Box::new(rhs));
        }
        Ok(lhs)
    }

    fn additive(&mut self) -> PResult<Expr> {
        let mut lhs = self.term()?;
        loop {
            let op = match self.peek() {
                Tok::Plus => ArithOp::Add,
                Tok::Minus => ArithOp::Sub,
                _ => return Ok(lhs),
            };
            self.bump();
            let rhs = self.term()?;
            lhs = Expr::Arith(op, Box::new(lhs), Box::new(rhs));
        }
    }

    fn term(&mut self) -> PResult<Expr> {
        let mut lhs = self.primary()?;
        while self.eat(&Tok::Star) {
            let rhs = self.primary()?;
            lhs = Expr::Arith(ArithOp::Mul, Box::new(lhs), Box::new(rhs));
        }
        Ok(lhs)
    }

    fn starts_expr(&self) -> bool {
        matches!(self.peek(), Tok::Int(_) | Tok::Ident(_) | Tok::LParen | Tok::LBrace | Tok::Minus)
    }

    fn primary(&mut self) -> PResult<Expr> {
        let location = self.location();
        match self.bump() {
            Tok::Int(n) => Ok(Expr::Int(n)),
            Tok::Minus => match self.bump() {
                Tok::Int(n) => Ok(Expr::Int(-n)),
                _ => {
                    self.pos -= 1;
                    self.error("expected an integer after `-`")
                }
            },
            Tok::Ident(name) => Ok(Expr::Name(name, location)),
            Tok::LParen => {
                let first = self.expr()?;
                if self.eat(&Tok::RParen) {
                    return Ok(first);
                }
                let mut items = vec![first];
                while self.eat(&Tok::Comma) {
                    items.push(self.expr()?);
                }
                self.expect(Tok::RParen)?;
                Ok(Expr::Tuple(items))
            }
            Tok::LBrace => {
                if self.eat(&Tok::RBrace) {
                    return Ok(Expr::Set(Vec::new()));
                }
                let first = self.expr()?;
                if self.eat(&Tok::Bar) {
                    let qualifiers = self.qualifiers()?;
                    self.expect(Tok::RBrace)?;
                    return Ok(Expr::Comprehension { head: Box::new(first), qualifiers });
                }
                let mut items = vec![first];
                loop {
                    if self.eat(&Tok::RBrace) {
                        return Ok(Expr::Set(items));
                    }
                    // A missing comma between elements is tolerated.
                    if !self.eat(&Tok::Comma) && !self.starts_expr() {
                        return self.error(format!("expected `,` or `}}`, found {:?}", self.peek()));
                    }
                    items.push(self.expr()?);
                }
            }
            other => {
                self.pos -= 1;
                self.error(format!("unexpected {other:?}"))
            }
        }
    }

    fn qualifiers(&mut self) -> PResult<Vec<Qualifier>> {
        let mut out = vec![self.qualifier()?];
        while self.eat(&Tok::Semi) || self.eat(&Tok::Comma) {
            out.push(self.qualifier()?);
        }
        Ok(out)
    }

    fn qualifier(&mut self) -> PResult<Qualifier> {
        let location = self.location();
        let lhs = self.expr()?;
        if self.eat(&Tok::In) {
            let pattern = to_pattern(&lhs).ok_or_else(|| LcError::Syntax {
                location,
                message: "generator patterns may only contain names, integers and tuples".into(),
            })?;
            let source = self.expr()?;
            return Ok(Qualifier::Generator { pattern, source });
        }
        if self.eat(&Tok::Le) {
            let rhs = self.expr()?;
            return Ok(Qualifier::Guard { lhs, rhs });
        }
        self.error(format!("expected `in` or `<=`, found {:?}", self.peek()))
    }
}

fn to_pattern(expr: &Expr) -> Option<Pat> {
    match expr {
        Expr::Name(n, _) => Some(Pat::Var(n.clone())),
        Expr::Int(i) => Some(Pat::Int(*i)),
        Expr::Tuple(items) => items.iter().map(to_pattern).collect::<Option<Vec<_>>>().map(Pat::Tuple),
        _ => None,
    }
}

pub fn parse_logicalc(text: &str) -> Result<LcModel, LcError> {
    Parser { toks: lex(text)?, pos: 0 }.model()
}

/// Parses a constant built from integers, tuples and set literals, e.g.
/// `(1, 5)`.
pub fn parse_value(text: &str) -> Result<LcValue, LcError> {
    let mut parser = Parser { toks: lex(text)?, pos: 0 };
    let expr = parser.expr()?;
    parser.expect(Tok::Eof)?;
    constant(&expr).ok_or(LcError::Syntax {
        location: Location { line: 1, column: 1 },
        message: "expected a constant value".into(),
    })
}

fn constant(expr: &Expr) -> Option<LcValue> {
    match expr {
        Expr::Int(n) => Some(LcValue::Int(*n)),
        Expr::Tuple(items) => items.iter().map(constant).collect::<Option<_>>().map(LcValue::Tuple),
        Expr::Set(items) => items.iter().map(constant).collect::<Option<_>>().map(LcValue::Set),
        _ => None,
    }
}
