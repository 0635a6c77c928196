use std::fmt;

use thiserror::Error;

use super::{BinOp, Expr, Func, UnaryOp};

/// Nesting depth at which parsing gives up instead of recursing further.
const MAX_DEPTH: usize = 200;

/// Names an expression may refer to.
#[derive(Debug, Clone, Default)]
pub struct ParseContext {
    coordinates: Vec<String>,
    parameters: Vec<String>,
}

impl ParseContext {
    pub fn new<S: AsRef<str>>(coordinates: impl IntoIterator<Item = S>) -> Self {
        Self { coordinates: coordinates.into_iter().map(|s| s.as_ref().to_string()).collect(), parameters: Vec::new() }
    }

    /// Coordinates spelled `x1..xn`.
    pub fn with_dim(n: usize) -> Self {
        Self::new((1..=n).map(|i| format!("x{i}")))
    }

    pub fn with_parameters<S: AsRef<str>>(mut self, names: impl IntoIterator<Item = S>) -> Self {
        self.parameters.extend(names.into_iter().map(|s| s.as_ref().to_string()));
        self
    }

    pub fn coordinates(&self) -> &[String] {
        &self.coordinates
    }

    pub fn parameters(&self) -> &[String] {
        &self.parameters
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ParseErrorKind {
    Empty,
    UnexpectedChar(char),
    UnexpectedToken { found: String, expected: &'static str },
    UnexpectedEnd { expected: &'static str },
    InvalidNumber(String),
    UnknownFunction(String),
    UnknownIdentifier(String),
    Arity { func: &'static str, expected: usize, found: usize },
    TooDeep,
}

impl fmt::Display for ParseErrorKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ParseErrorKind::Empty => write!(f, "empty expression"),
            ParseErrorKind::UnexpectedChar(c) => write!(f, "unexpected character {c:?}"),
            ParseErrorKind::UnexpectedToken { found, expected } => {
                write!(f, "unexpected {found}, expected {expected}")
            }
            ParseErrorKind::UnexpectedEnd { expected } => write!(f, "unexpected end of input, expected {expected}"),
            ParseErrorKind::InvalidNumber(s) => write!(f, "invalid number {s:?}"),
            ParseErrorKind::UnknownFunction(s) => write!(f, "unknown function {s:?}"),
            ParseErrorKind::UnknownIdentifier(s) => write!(f, "unknown identifier {s:?}"),
            ParseErrorKind::Arity { func, expected, found } => {
                write!(f, "{func} takes {expected} argument(s), got {found}")
            }
            ParseErrorKind::TooDeep => write!(f, "expression nested too deeply"),
        }
    }
}

/// Parse failure at a byte offset into the source text.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{kind} at byte {offset}")]
pub struct ParseError {
    pub kind: ParseErrorKind,
    pub offset: usize,
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Num(f64),
    Ident(String),
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    LParen,
    RParen,
    Comma,
    End,
}

impl Tok {
    fn describe(&self) -> String {
        match self {
            Tok::Num(v) => format!("number {v}"),
            Tok::Ident(s) => format!("identifier {s:?}"),
            Tok::Plus => "'+'".into(),
            Tok::Minus => "'-'".into(),
            Tok::Star => "'*'".into(),
            Tok::Slash => "'/'".into(),
            Tok::Caret => "'^'".into(),
            Tok::LParen => "'('".into(),
            Tok::RParen => "')'".into(),
            Tok::Comma => "','".into(),
            Tok::End => "end of input".into(),
        }
    }
}

fn lex(src: &str) -> Result<Vec<(Tok, usize)>, ParseError> {
    let bytes = src.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let b = bytes[i];
        let start = i;
        let single = match b {
            b' ' | b'\t' | b'\n' | b'\r' => {
                i += 1;
                continue;
            }
            b'+' => Some(Tok::Plus),
            b'-' => Some(Tok::Minus),
            b'*' => Some(Tok::Star),
            b'/' => Some(Tok::Slash),
            b'^' => Some(Tok::Caret),
            b'(' => Some(Tok::LParen),
            b')' => Some(Tok::RParen),
            b',' => Some(Tok::Comma),
            _ => None,
        };
        if let Some(t) = single {
            out.push((t, start));
            i += 1;
            continue;
        }
        if b.is_ascii_digit() || b == b'.' {
            while i < bytes.len() && bytes[i].is_ascii_digit() {
                i += 1;
            }
            if i < bytes.len() && bytes[i] == b'.' {
                i += 1;
                while i < bytes.len() && bytes[i].is_ascii_digit() {
                    i += 1;
                }
            }
            if i < bytes.len() && (bytes[i] == b'e' || bytes[i] == b'E') {
                let mut j = i + 1;
                if j < bytes.len() && (bytes[j] == b'+' || bytes[j] == b'-') {
                    j += 1;
                }
                if j < bytes.len() && bytes[j].is_ascii_digit() {
                    while j < bytes.len() && bytes[j].is_ascii_digit() {
                        j += 1;
                    }
                    i = j;
                }
            }
            let text = &src[start..i];
            let v: f64 = text
                .parse()
                .map_err(|_| ParseError { kind: ParseErrorKind::InvalidNumber(text.to_string()), offset: start })?;
            out.push((Tok::Num(v), start));
            continue;
        }
        if b.is_ascii_alphabetic() || b == b'_' {
            while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_') {
                i += 1;
            }
            out.push((Tok::Ident(src[start..i].to_string()), start));
            continue;
        }
        let c = src[start..].chars().next().unwrap_or('\u{fffd}');
        return Err(ParseError { kind: ParseErrorKind::UnexpectedChar(c), offset: start });
    }
    out.push((Tok::End, src.len()));
    Ok(out)
}

struct Parser<'a> {
    toks: Vec<(Tok, usize)>,
    pos: usize,
    depth: usize,
    ctx: &'a ParseContext,
}

impl Parser<'_> {
    fn peek(&self) -> &Tok {
        &self.toks[self.pos].0
    }

    fn offset(&self) -> usize {
        self.toks[self.pos].1
    }

    fn bump(&mut self) -> (Tok, usize) {
        let t = self.toks[self.pos].clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn unexpected(&self, expected: &'static str) -> ParseError {
        let kind = match self.peek() {
            Tok::End => ParseErrorKind::UnexpectedEnd { expected },
            t => ParseErrorKind::UnexpectedToken { found: t.describe(), expected },
        };
        ParseError { kind, offset: self.offset() }
    }

    fn descend(&mut self) -> Result<(), ParseError> {
        self.depth += 1;
        if self.depth > MAX_DEPTH {
            return Err(ParseError { kind: ParseErrorKind::TooDeep, offset: self.offset() });
        }
        Ok(())
    }

    fn expr(&mut self) -> Result<Expr, ParseError> {
        self.descend()?;
        let mut lhs = self.term()?;
        loop {
            let op = match self.peek() {
                Tok::Plus => BinOp::Add,
                Tok::Minus => BinOp::Sub,
                _ => break,
            };
            self.bump();
            let rhs = self.term()?;
            lhs = Expr::binary(op, lhs, rhs);
        }
        self.depth -= 1;
        Ok(lhs)
    }

    fn term(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.factor()?;
        loop {
            let op = match self.peek() {
                Tok::Star => BinOp::Mul,
                Tok::Slash => BinOp::Div,
                _ => break,
            };
            self.bump();
            let rhs = self.factor()?;
            lhs = Expr::binary(op, lhs, rhs);
        }
        Ok(lhs)
    }

    fn factor(&mut self) -> Result<Expr, ParseError> {
        self.descend()?;
        let out = if *self.peek() == Tok::Minus {
            self.bump();
            Expr::Unary { op: UnaryOp::Neg, operand: Box::new(self.power()?) }
        } else {
            self.power()?
        };
        self.depth -= 1;
        Ok(out)
    }

    fn power(&mut self) -> Result<Expr, ParseError> {
        let base = self.atom()?;
        if *self.peek() == Tok::Caret {
            self.bump();
            let exp = self.factor()?;
            return Ok(Expr::binary(BinOp::Pow, base, exp));
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<Expr, ParseError> {
        match self.peek().clone() {
            Tok::Num(v) => {
                self.bump();
                Ok(Expr::Constant(v))
            }
            Tok::LParen => {
                self.bump();
                let inner = self.expr()?;
                if *self.peek() != Tok::RParen {
                    return Err(self.unexpected("')'"));
                }
                self.bump();
                Ok(inner)
            }
            Tok::Ident(name) => {
                let (_, at) = self.bump();
                if *self.peek() == Tok::LParen {
                    let func = Func::from_name(&name)
                        .ok_or(ParseError { kind: ParseErrorKind::UnknownFunction(name.clone()), offset: at })?;
                    self.bump();
                    let mut args = vec![self.expr()?];
                    while *self.peek() == Tok::Comma {
                        self.bump();
                        args.push(self.expr()?);
                    }
                    if *self.peek() != Tok::RParen {
                        return Err(self.unexpected("')' or ','"));
                    }
                    self.bump();
                    if args.len() != func.arity() {
                        return Err(ParseError {
                            kind: ParseErrorKind::Arity {
                                func: func.name(),
                                expected: func.arity(),
                                found: args.len(),
                            },
                            offset: at,
                        });
                    }
                    return Ok(Expr::Call { func, args });
                }
                if let Some(index) = self.ctx.coordinates.iter().position(|c| *c == name) {
                    Ok(Expr::Variable { name, index })
                } else if self.ctx.parameters.contains(&name) {
                    Ok(Expr::Parameter(name))
                } else {
                    Err(ParseError { kind: ParseErrorKind::UnknownIdentifier(name), offset: at })
                }
            }
            _ => Err(self.unexpected("a number, identifier or '('")),
        }
    }
}

/// Parse `src` against the coordinates and parameters declared in `ctx`.
pub fn parse_expression(src: &str, ctx: &ParseContext) -> Result<Expr, ParseError> {
    if src.trim().is_empty() {
        return Err(ParseError { kind: ParseErrorKind::Empty, offset: 0 });
    }
    let toks = lex(src)?;
    let mut p = Parser { toks, pos: 0, depth: 0, ctx };
    let e = p.expr()?;
    if *p.peek() != Tok::End {
        return Err(p.unexpected("an operator or end of input"));
    }
    Ok(e)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ctx() -> ParseContext {
        ParseContext::with_dim(5).with_parameters(["c1"])
    }

    fn p(s: &str) -> Result<Expr, ParseError> {
        parse_expression(s, &ctx())
    }

    #[test]
    fn call() {
        assert_eq!(p("exp(x1)").unwrap(), Expr::call(Func::Exp, Expr::var("x1", 0)));
    }

    #[test]
    fn precedence() {
        let e = p("1 + x1^2 * c1").unwrap();
        let expected = Expr::binary(
            BinOp::Add,
            Expr::Constant(1.0),
            Expr::binary(
                BinOp::Mul,
                Expr::binary(BinOp::Pow, Expr::var("x1", 0), Expr::Constant(2.0)),
                Expr::Parameter("c1".into()),
            ),
        );
        assert_eq!(e, expected);
    }

    #[test]
    fn associativity() {
        let e = p("x1 - x2 - x3").unwrap();
        assert!(matches!(e, Expr::Binary { op: BinOp::Sub, ref lhs, .. } if matches!(**lhs, Expr::Binary { .. })));
        let e = p("x1 ^ x2 ^ x3").unwrap();
        assert!(matches!(e, Expr::Binary { op: BinOp::Pow, ref rhs, .. } if matches!(**rhs, Expr::Binary { .. })));
        // unary minus binds looser than ^
        let e = p("-x1^2").unwrap();
        assert!(matches!(e, Expr::Unary { .. }));
    }

    #[test]
    fn numbers() {
        assert_eq!(p("1.5e-3").unwrap(), Expr::Constant(1.5e-3));
        assert_eq!(p(".25").unwrap(), Expr::Constant(0.25));
        assert_eq!(p("  2E+2 ").unwrap(), Expr::Constant(200.0));
    }

    #[test]
    fn positioned_errors() {
        let e = p("2x1").unwrap_err();
        assert_eq!(e.offset, 1);
        assert!(matches!(e.kind, ParseErrorKind::UnexpectedToken { .. }));

        let e = p("1 + tan(x1)").unwrap_err();
        assert_eq!(e, ParseError { kind: ParseErrorKind::UnknownFunction("tan".into()), offset: 4 });

        let e = p("x1 * y").unwrap_err();
        assert_eq!(e, ParseError { kind: ParseErrorKind::UnknownIdentifier("y".into()), offset: 5 });

        assert_eq!(p("").unwrap_err().kind, ParseErrorKind::Empty);
        assert_eq!(p("(x1").unwrap_err().offset, 3);
        assert!(matches!(p("exp(x1, x2)").unwrap_err().kind, ParseErrorKind::Arity { .. }));
        assert!(matches!(p("x1 # 2").unwrap_err().kind, ParseErrorKind::UnexpectedChar('#')));
        assert_eq!(p("é").unwrap_err().offset, 0);
        assert!(matches!(p("--x1").unwrap_err().kind, ParseErrorKind::UnexpectedToken { .. }));
    }

    #[test]
    fn deep_nesting_is_an_error() {
        let s = "(".repeat(5000) + "x1" + &")".repeat(5000);
        assert_eq!(p(&s).unwrap_err().kind, ParseErrorKind::TooDeep);
        let s = "-x1^".repeat(5000) + "x1";
        assert_eq!(p(&s).unwrap_err().kind, ParseErrorKind::TooDeep);
    }
}
