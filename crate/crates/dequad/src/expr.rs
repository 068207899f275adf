//! A small arithmetic-expression front-end: tokenizer, recursive-descent
//! parser, and evaluator, so integrands can be given as text.
//!
//! Grammar (whitespace-insensitive):
//!
//! ```text
//! expr    := term (('+' | '-') term)*
//! term    := unary (('*' | '/') unary)*
//! unary   := '-' unary | power
//! power   := primary ('^' unary)?          (right-associative)
//! primary := number | 'x' | 'pi' | 'e' | name '(' expr ')' | '(' expr ')'
//! ```
//!
//! '^' is right-associative and binds tighter than unary minus, so
//! `-x^2` is −(x²) and `2^3^2` is 2^(3^2) = 512. `log` is the natural
//! logarithm. There is no implicit multiplication: `2x` is a parse error.

use std::fmt;

use thiserror::Error;

use crate::engine::Integrand;

/// Unary functions the grammar admits.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Func {
    Sin,
    Cos,
    Tan,
    Exp,
    Log,
    Sqrt,
    Sinh,
    Cosh,
    Tanh,
    Abs,
}

impl Func {
    fn from_name(name: &str) -> Option<Self> {
        match name {
            "sin" => Some(Self::Sin),
            "cos" => Some(Self::Cos),
            "tan" => Some(Self::Tan),
            "exp" => Some(Self::Exp),
            "log" => Some(Self::Log),
            "sqrt" => Some(Self::Sqrt),
            "sinh" => Some(Self::Sinh),
            "cosh" => Some(Self::Cosh),
            "tanh" => Some(Self::Tanh),
            "abs" => Some(Self::Abs),
            _ => None,
        }
    }

    fn name(self) -> &'static str {
        match self {
            Self::Sin => "sin",
            Self::Cos => "cos",
            Self::Tan => "tan",
            Self::Exp => "exp",
            Self::Log => "log",
            Self::Sqrt => "sqrt",
            Self::Sinh => "sinh",
            Self::Cosh => "cosh",
            Self::Tanh => "tanh",
            Self::Abs => "abs",
        }
    }

    fn apply(self, v: f64) -> f64 {
        match self {
            Self::Sin => v.sin(),
            Self::Cos => v.cos(),
            Self::Tan => v.tan(),
            Self::Exp => v.exp(),
            Self::Log => v.ln(),
            Self::Sqrt => v.sqrt(),
            Self::Sinh => v.sinh(),
            Self::Cosh => v.cosh(),
            Self::Tanh => v.tanh(),
            Self::Abs => v.abs(),
        }
    }
}

/// Binary operators.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BinOp {
    Add,
    Sub,
    Mul,
    Div,
    Pow,
}

/// Named constants.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Constant {
    Pi,
    E,
}

/// Parsed expression tree. Evaluation is a pure function of x.
#[derive(Debug, Clone, PartialEq)]
pub enum Ast {
    Number(f64),
    Variable,
    Constant(Constant),
    Neg(Box<Ast>),
    Binary(BinOp, Box<Ast>, Box<Ast>),
    Call(Func, Box<Ast>),
}

/// What the parser found wrong, plus where.
#[derive(Debug, Clone, PartialEq, Error)]
#[error("parse error at byte {offset}: {kind}")]
pub struct ParseError {
    pub offset: usize,
    pub kind: ParseErrorKind,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ParseErrorKind {
    #[error("unexpected character '{0}'")]
    UnexpectedChar(char),
    #[error("malformed number literal")]
    InvalidNumber,
    #[error("unexpected end of input, expected {0}")]
    UnexpectedEnd(&'static str),
    #[error("expected {expected}")]
    Expected { expected: &'static str },
    #[error("unknown function '{0}'")]
    UnknownFunction(String),
    #[error("unknown identifier '{0}' (the variable is 'x')")]
    UnknownIdentifier(String),
    #[error("expression nested too deeply")]
    TooDeep,
    #[error("trailing input after expression")]
    TrailingInput,
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
}

fn tokenize(src: &str) -> Result<Vec<(usize, Tok)>, ParseError> {
    let bytes = src.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let b = bytes[i];
        match b {
            b' ' | b'\t' | b'\n' | b'\r' => i += 1,
            b'+' => {
                out.push((i, Tok::Plus));
                i += 1;
            }
            b'-' => {
                out.push((i, Tok::Minus));
                i += 1;
            }
            b'*' => {
                out.push((i, Tok::Star));
                i += 1;
            }
            b'/' => {
                out.push((i, Tok::Slash));
                i += 1;
            }
            b'^' => {
                out.push((i, Tok::Caret));
                i += 1;
            }
            b'(' => {
                out.push((i, Tok::LParen));
                i += 1;
            }
            b')' => {
                out.push((i, Tok::RParen));
                i += 1;
            }
            b'0'..=b'9' | b'.' => {
                let start = i;
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
                        i = j;
                        while i < bytes.len() && bytes[i].is_ascii_digit() {
                            i += 1;
                        }
                    }
                }
                let text = &src[start..i];
                let v: f64 = text.parse().map_err(|_| ParseError {
                    offset: start,
                    kind: ParseErrorKind::InvalidNumber,
                })?;
                out.push((start, Tok::Num(v)));
            }
            b'a'..=b'z' | b'A'..=b'Z' | b'_' => {
                let start = i;
                while i < bytes.len()
                    && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_')
                {
                    i += 1;
                }
                out.push((start, Tok::Ident(src[start..i].to_string())));
            }
            _ => {
                // report the full character, not just its first byte
                let ch = src[i..].chars().next().unwrap_or('\u{fffd}');
                return Err(ParseError {
                    offset: i,
                    kind: ParseErrorKind::UnexpectedChar(ch),
                });
            }
        }
    }
    Ok(out)
}

const MAX_DEPTH: usize = 200;

struct Parser<'a> {
    toks: &'a [(usize, Tok)],
    pos: usize,
    end: usize,
}

impl<'a> Parser<'a> {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|(_, t)| t)
    }

    fn offset(&self) -> usize {
        self.toks.get(self.pos).map_or(self.end, |(o, _)| *o)
    }

    fn bump(&mut self) -> Option<Tok> {
        let t = self.toks.get(self.pos).map(|(_, t)| t.clone());
        if t.is_some() {
            self.pos += 1;
        }
        t
    }

    fn err(&self, kind: ParseErrorKind) -> ParseError {
        ParseError {
            offset: self.offset(),
            kind,
        }
    }

    fn expr(&mut self, depth: usize) -> Result<Ast, ParseError> {
        if depth > MAX_DEPTH {
            return Err(self.err(ParseErrorKind::TooDeep));
        }
        let mut lhs = self.term(depth + 1)?;
        loop {
            let op = match self.peek() {
                Some(Tok::Plus) => BinOp::Add,
                Some(Tok::Minus) => BinOp::Sub,
                _ => break,
            };
            self.bump();
            let rhs = self.term(depth + 1)?;
            lhs = Ast::Binary(op, Box::new(lhs), Box::new(rhs));
        }
        Ok(lhs)
    }

    fn term(&mut self, depth: usize) -> Result<Ast, ParseError> {
        if depth > MAX_DEPTH {
            return Err(self.err(ParseErrorKind::TooDeep));
        }
        let mut lhs = self.unary(depth + 1)?;
        loop {
            let op = match self.peek() {
                Some(Tok::Star) => BinOp::Mul,
                Some(Tok::Slash) => BinOp::Div,
                _ => break,
            };
            self.bump();
            let rhs = self.unary(depth + 1)?;
            lhs = Ast::Binary(op, Box::new(lhs), Box::new(rhs));
        }
        Ok(lhs)
    }

    fn unary(&mut self, depth: usize) -> Result<Ast, ParseError> {
        if depth > MAX_DEPTH {
            return Err(self.err(ParseErrorKind::TooDeep));
        }
        if matches!(self.peek(), Some(Tok::Minus)) {
            self.bump();
            let inner = self.unary(depth + 1)?;
            return Ok(Ast::Neg(Box::new(inner)));
        }
        self.power(depth + 1)
    }

    fn power(&mut self, depth: usize) -> Result<Ast, ParseError> {
        if depth > MAX_DEPTH {
            return Err(self.err(ParseErrorKind::TooDeep));
        }
        let base = self.primary(depth + 1)?;
        if matches!(self.peek(), Some(Tok::Caret)) {
            self.bump();
            // the exponent may itself carry a sign: 2^-3
            let exp = self.unary(depth + 1)?;
            return Ok(Ast::Binary(BinOp::Pow, Box::new(base), Box::new(exp)));
        }
        Ok(base)
    }

    fn primary(&mut self, depth: usize) -> Result<Ast, ParseError> {
        if depth > MAX_DEPTH {
            return Err(self.err(ParseErrorKind::TooDeep));
        }
        match self.bump() {
            None => Err(ParseError {
                offset: self.end,
                kind: ParseErrorKind::UnexpectedEnd("an expression"),
            }),
            Some(Tok::Num(v)) => Ok(Ast::Number(v)),
            Some(Tok::LParen) => {
                let inner = self.expr(depth + 1)?;
                match self.bump() {
                    Some(Tok::RParen) => Ok(inner),
                    Some(_) => {
                        self.pos -= 1;
                        Err(self.err(ParseErrorKind::Expected { expected: "')'" }))
                    }
                    None => Err(ParseError {
                        offset: self.end,
                        kind: ParseErrorKind::UnexpectedEnd("')'"),
                    }),
                }
            }
            Some(Tok::Ident(name)) => {
                if name == "x" {
                    return Ok(Ast::Variable);
                }
                if name == "pi" {
                    return Ok(Ast::Constant(Constant::Pi));
                }
                if name == "e" {
                    return Ok(Ast::Constant(Constant::E));
                }
                if matches!(self.peek(), Some(Tok::LParen)) {
                    let func = Func::from_name(&name).ok_or_else(|| ParseError {
                        offset: self.toks[self.pos - 1].0,
                        kind: ParseErrorKind::UnknownFunction(name.clone()),
                    })?;
                    self.bump(); // '('
                    let arg = self.expr(depth + 1)?;
                    match self.bump() {
                        Some(Tok::RParen) => Ok(Ast::Call(func, Box::new(arg))),
                        Some(_) => {
                            self.pos -= 1;
                            Err(self.err(ParseErrorKind::Expected { expected: "')'" }))
                        }
                        None => Err(ParseError {
                            offset: self.end,
                            kind: ParseErrorKind::UnexpectedEnd("')'"),
                        }),
                    }
                } else if Func::from_name(&name).is_some() {
                    Err(self.err(ParseErrorKind::Expected {
                        expected: "'(' after function name",
                    }))
                } else {
                    Err(ParseError {
                        offset: self.toks[self.pos - 1].0,
                        kind: ParseErrorKind::UnknownIdentifier(name),
                    })
                }
            }
            Some(_) => {
                self.pos -= 1;
                Err(self.err(ParseErrorKind::Expected { expected: "an expression" }))
            }
        }
    }
}

/// Parse an expression in the variable x.
pub fn parse(src: &str) -> Result<Ast, ParseError> {
    let toks = tokenize(src)?;
    let mut p = Parser {
        toks: &toks,
        pos: 0,
        end: src.len(),
    };
    let ast = p.expr(0)?;
    if p.pos != toks.len() {
        return Err(p.err(ParseErrorKind::TrailingInput));
    }
    Ok(ast)
}

/// Evaluate at the given x. Total: NaN and ±∞ propagate as values
/// (0^0 = 1; a negative base with a non-integer exponent yields NaN).
pub fn eval(ast: &Ast, x: f64) -> f64 {
    match ast {
        Ast::Number(v) => *v,
        Ast::Variable => x,
        Ast::Constant(Constant::Pi) => std::f64::consts::PI,
        Ast::Constant(Constant::E) => std::f64::consts::E,
        Ast::Neg(inner) => -eval(inner, x),
        Ast::Binary(op, l, r) => {
            let a = eval(l, x);
            let b = eval(r, x);
            match op {
                BinOp::Add => a + b,
                BinOp::Sub => a - b,
                BinOp::Mul => a * b,
                BinOp::Div => a / b,
                BinOp::Pow => a.powf(b),
            }
        }
        Ast::Call(f, arg) => f.apply(eval(arg, x)),
    }
}

/// Expressions evaluate as integrands of x; the stable endpoint distances
/// are not consumable from text, so singular expressions will surface as
/// `NonFiniteIntegrand` where the abscissa has rounded onto an endpoint.
impl Integrand for Ast {
    fn eval(&self, x: f64, _dist_a: f64, _dist_b: f64) -> f64 {
        eval(self, x)
    }
}

fn precedence(ast: &Ast) -> u8 {
    match ast {
        Ast::Binary(BinOp::Add | BinOp::Sub, ..) => 1,
        Ast::Binary(BinOp::Mul | BinOp::Div, ..) => 2,
        Ast::Neg(_) => 3,
        Ast::Binary(BinOp::Pow, ..) => 4,
        _ => 5,
    }
}

impl fmt::Display for Ast {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fn paren(f: &mut fmt::Formatter<'_>, ast: &Ast, need: bool) -> fmt::Result {
            if need {
                write!(f, "(")?;
                write!(f, "{ast}")?;
                write!(f, ")")
            } else {
                write!(f, "{ast}")
            }
        }
        match self {
            Ast::Number(v) => {
                if *v < 0.0 || v.is_nan() {
                    // keep literals nonnegative so printing re-parses
                    write!(f, "({v})")
                } else {
                    write!(f, "{v}")
                }
            }
            Ast::Variable => write!(f, "x"),
            Ast::Constant(Constant::Pi) => write!(f, "pi"),
            Ast::Constant(Constant::E) => write!(f, "e"),
            Ast::Neg(inner) => {
                write!(f, "-")?;
                paren(f, inner, precedence(inner) < 3)
            }
            Ast::Binary(op, l, r) => {
                let (sym, prec) = match op {
                    BinOp::Add => ("+", 1),
                    BinOp::Sub => ("-", 1),
                    BinOp::Mul => ("*", 2),
                    BinOp::Div => ("/", 2),
                    BinOp::Pow => ("^", 4),
                };
                let (lneed, rneed) = match op {
                    // left-assoc: parenthesize equal precedence on the right
                    // so the printed tree reparses with identical grouping
                    // (f64 arithmetic is not associative)
                    BinOp::Add | BinOp::Sub | BinOp::Mul | BinOp::Div => {
                        (precedence(l) < prec, precedence(r) <= prec)
                    }
                    // right-assoc, binds tighter than unary minus
                    BinOp::Pow => (precedence(l) <= prec, precedence(r) < prec),
                };
                paren(f, l, lneed)?;
                write!(f, " {sym} ")?;
                paren(f, r, rneed)
            }
            Ast::Call(func, arg) => write!(f, "{}({arg})", func.name()),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_bare_variable() {
        assert_eq!(parse("x").unwrap(), Ast::Variable);
    }

    #[test]
    fn parses_reference_oscillatory_integrand() {
        let ast = parse("exp(20*(x-1))*sin(256*x)").unwrap();
        match &ast {
            Ast::Binary(BinOp::Mul, l, r) => {
                assert!(matches!(**l, Ast::Call(Func::Exp, _)));
                assert!(matches!(**r, Ast::Call(Func::Sin, _)));
            }
            other => panic!("unexpected shape: {other:?}"),
        }
        // e^{-10} sin(128), tools/gen_oracles.py
        let expected = 3.273_506_141_288_149_8e-5;
        let got = eval(&ast, 0.5);
        assert!(((got - expected) / expected).abs() < 1e-14, "got {got:e}");
    }

    #[test]
    fn unbalanced_paren_reports_offset() {
        let err = parse("sin(").unwrap_err();
        assert_eq!(err.offset, 4);
    }

    #[test]
    fn precedence_fixtures() {
        assert_eq!(eval(&parse("2+3*4").unwrap(), 0.0), 14.0);
        assert_eq!(eval(&parse("2^3^2").unwrap(), 0.0), 512.0);
        assert_eq!(eval(&parse("-x^2").unwrap(), 2.0), -4.0);
        assert_eq!(eval(&parse("2*-3").unwrap(), 7.0), -6.0);
        assert_eq!(eval(&parse("2^-3").unwrap(), 0.0), 0.125);
        assert_eq!(eval(&parse("x^2").unwrap(), 3.0), 9.0);
    }

    #[test]
    fn power_of_zero_and_negative_bases() {
        assert_eq!(eval(&parse("0^0").unwrap(), 0.0), 1.0);
        assert!(eval(&parse("(-2)^0.5").unwrap(), 0.0).is_nan());
        assert_eq!(eval(&parse("(-2)^2").unwrap(), 0.0), 4.0);
    }

    #[test]
    fn constants_and_functions() {
        assert_eq!(eval(&parse("pi").unwrap(), 0.0), std::f64::consts::PI);
        assert_eq!(eval(&parse("e").unwrap(), 0.0), std::f64::consts::E);
        assert_eq!(eval(&parse("log(e)").unwrap(), 0.0), 1.0);
        assert_eq!(eval(&parse("sqrt(4)").unwrap(), 0.0), 2.0);
        assert_eq!(eval(&parse("abs(-3)").unwrap(), 0.0), 3.0);
    }

    #[test]
    fn unknown_function_is_its_own_error() {
        match parse("foo(3)") {
            Err(ParseError {
                kind: ParseErrorKind::UnknownFunction(name),
                offset: 0,
            }) => assert_eq!(name, "foo"),
            other => panic!("unexpected: {other:?}"),
        }
    }

    #[test]
    fn unknown_identifier_is_rejected() {
        assert!(matches!(
            parse("2*y").unwrap_err().kind,
            ParseErrorKind::UnknownIdentifier(_)
        ));
    }

    #[test]
    fn implicit_multiplication_is_rejected() {
        assert!(parse("2x").is_err());
    }

    #[test]
    fn numbers_with_exponent_parts() {
        assert_eq!(eval(&parse("1e-3").unwrap(), 0.0), 1e-3);
        assert_eq!(eval(&parse("2.5E+2").unwrap(), 0.0), 250.0);
        assert_eq!(eval(&parse(".5").unwrap(), 0.0), 0.5);
        assert_eq!(eval(&parse("3.").unwrap(), 0.0), 3.0);
    }

    #[test]
    fn deep_nesting_errors_instead_of_overflowing() {
        let mut src = String::new();
        for _ in 0..100_000 {
            src.push('(');
        }
        src.push('x');
        match parse(&src) {
            Err(ParseError {
                kind: ParseErrorKind::TooDeep,
                ..
            }) => {}
            other => panic!("unexpected: {other:?}"),
        }
        let minus: String = "-".repeat(100_000) + "x";
        assert!(parse(&minus).is_err());
    }

    #[test]
    fn trailing_input_is_an_error() {
        assert!(matches!(
            parse("1 2").unwrap_err().kind,
            ParseErrorKind::TrailingInput
        ));
        assert!(parse("1)").is_err());
    }

    #[test]
    fn display_round_trips_fixture_expressions() {
        for src in [
            "exp(20*(x-1))*sin(256*x)",
            "-x^2",
            "2^3^2",
            "1/(x+2)-sin(x)*3",
            "2*-3",
            "x-(1-x)",
            "x- -x",
        ] {
            let ast = parse(src).unwrap();
            let printed = ast.to_string();
            let reparsed =
                parse(&printed).unwrap_or_else(|e| panic!("{src} -> {printed}: {e}"));
            for i in -5..=5 {
                let x = i as f64 * 0.7;
                let a = eval(&ast, x);
                let b = eval(&reparsed, x);
                assert!(
                    a == b || (a.is_nan() && b.is_nan()),
                    "{src} -> {printed} at x={x}: {a} vs {b}"
                );
            }
        }
    }
}
