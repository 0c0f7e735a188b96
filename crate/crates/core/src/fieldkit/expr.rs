//! Expression DSL for velocity and pressure fields.
//!
//! Grammar (whitespace insignificant):
//!
//! ```text
//! field    := expr sep expr sep expr        sep := "," | ";"
//! expr     := term (("+" | "-") term)*
//! term     := factor (("*" | "/") factor)*
//! factor   := "-" factor | base ("^" exponent)?
//! exponent := "-" exponent | base           (must be free of x, y, z)
//! base     := number | "x" | "y" | "z" | "pi" | func "(" expr ")" | "(" expr ")"
//! func     := sin | cos | tan | sinh | cosh | tanh | exp | log | sqrt
//! ```
//!
//! Unary minus binds looser than `^`, so `-x^2` is `-(x^2)`.

use std::fmt;

use super::jet::Scalar;
use crate::error::{Error, ParseError};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Func {
    Sin,
    Cos,
    Tan,
    Sinh,
    Cosh,
    Tanh,
    Exp,
    Log,
    Sqrt,
}

impl Func {
    pub const ALL: [Func; 9] = [
        Func::Sin,
        Func::Cos,
        Func::Tan,
        Func::Sinh,
        Func::Cosh,
        Func::Tanh,
        Func::Exp,
        Func::Log,
        Func::Sqrt,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Func::Sin => "sin",
            Func::Cos => "cos",
            Func::Tan => "tan",
            Func::Sinh => "sinh",
            Func::Cosh => "cosh",
            Func::Tanh => "tanh",
            Func::Exp => "exp",
            Func::Log => "log",
            Func::Sqrt => "sqrt",
        }
    }

    fn from_name(name: &str) -> Option<Func> {
        Func::ALL.into_iter().find(|f| f.name() == name)
    }

    fn apply<S: Scalar>(self, a: S) -> S {
        match self {
            Func::Sin => a.sin(),
            Func::Cos => a.cos(),
            Func::Tan => a.tan(),
            Func::Sinh => a.sinh(),
            Func::Cosh => a.cosh(),
            Func::Tanh => a.tanh(),
            Func::Exp => a.exp(),
            Func::Log => a.ln(),
            Func::Sqrt => a.sqrt(),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BinOp {
    Add,
    Sub,
    Mul,
    Div,
}

impl BinOp {
    fn symbol(self) -> char {
        match self {
            BinOp::Add => '+',
            BinOp::Sub => '-',
            BinOp::Mul => '*',
            BinOp::Div => '/',
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum Expr {
    Const(f64),
    /// Coordinate index: 0 = x, 1 = y, 2 = z.
    Var(usize),
    Neg(Box<Expr>),
    Binary(BinOp, Box<Expr>, Box<Expr>),
    /// Base raised to a constant real exponent.
    Pow(Box<Expr>, f64),
    Call(Func, Box<Expr>),
}

impl Expr {
    pub fn is_constant(&self) -> bool {
        match self {
            Expr::Const(_) => true,
            Expr::Var(_) => false,
            Expr::Neg(a) | Expr::Pow(a, _) | Expr::Call(_, a) => a.is_constant(),
            Expr::Binary(_, a, b) => a.is_constant() && b.is_constant(),
        }
    }

    /// Evaluates with any [`Scalar`]; fails at the innermost subexpression
    /// whose result is not finite.
    pub fn eval<S: Scalar>(&self, vars: &[S; 3]) -> Result<S, Error> {
        let out = match self {
            Expr::Const(c) => S::constant(*c),
            Expr::Var(i) => vars[*i],
            Expr::Neg(a) => -a.eval(vars)?,
            Expr::Binary(op, a, b) => {
                let (a, b) = (a.eval(vars)?, b.eval(vars)?);
                match op {
                    BinOp::Add => a + b,
                    BinOp::Sub => a - b,
                    BinOp::Mul => a * b,
                    BinOp::Div => a / b,
                }
            }
            Expr::Pow(a, p) => a.eval(vars)?.powf(*p),
            Expr::Call(f, a) => f.apply(a.eval(vars)?),
        };
        if out.is_finite() {
            Ok(out)
        } else {
            Err(Error::Domain {
                expr: self.to_string(),
            })
        }
    }
}

/// Fully parenthesized form that re-parses to an identical tree.
impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expr::Const(c) if *c < 0.0 => write!(f, "(-{:?})", -c),
            Expr::Const(c) => write!(f, "{c:?}"),
            Expr::Var(i) => f.write_str(["x", "y", "z"][*i]),
            Expr::Neg(a) => write!(f, "(-{a})"),
            Expr::Binary(op, a, b) => write!(f, "({a} {} {b})", op.symbol()),
            Expr::Pow(a, p) if *p < 0.0 => write!(f, "({a})^(-{:?})", -p),
            Expr::Pow(a, p) => write!(f, "({a})^({p:?})"),
            Expr::Call(func, a) => write!(f, "{}({a})", func.name()),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Num(f64),
    Ident(String),
    Sym(char),
    End,
}

#[derive(Clone, Debug)]
struct Token {
    tok: Tok,
    pos: usize,
}

fn lex(src: &str) -> Result<Vec<Token>, ParseError> {
    let bytes = src.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    let mut end_of_last = 0;
    while i < bytes.len() {
        let c = bytes[i];
        if c.is_ascii_whitespace() {
            i += 1;
            continue;
        }
        let start = i;
        if c.is_ascii_digit() || c == b'.' {
            while i < bytes.len() && (bytes[i].is_ascii_digit() || bytes[i] == b'.') {
                i += 1;
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
            let value: f64 = text.parse().map_err(|_| ParseError::Syntax {
                pos: start,
                message: format!("malformed number '{text}'"),
            })?;
            if !value.is_finite() {
                return Err(ParseError::Syntax {
                    pos: start,
                    message: format!("number '{text}' overflows"),
                });
            }
            out.push(Token {
                tok: Tok::Num(value),
                pos: start,
            });
        } else if c.is_ascii_alphabetic() || c == b'_' {
            while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_') {
                i += 1;
            }
            out.push(Token {
                tok: Tok::Ident(src[start..i].to_string()),
                pos: start,
            });
        } else if b"+-*/^(),;".contains(&c) {
            i += 1;
            out.push(Token {
                tok: Tok::Sym(c as char),
                pos: start,
            });
        } else {
            let ch = src[start..].chars().next().unwrap_or('?');
            return Err(ParseError::Syntax {
                pos: start,
                message: format!("unexpected character '{ch}'"),
            });
        }
        end_of_last = i;
    }
    out.push(Token {
        tok: Tok::End,
        pos: end_of_last,
    });
    Ok(out)
}

struct Parser {
    toks: Vec<Token>,
    at: usize,
}

impl Parser {
    fn peek(&self) -> &Token {
        &self.toks[self.at]
    }

    fn bump(&mut self) -> Token {
        let t = self.toks[self.at].clone();
        if self.at + 1 < self.toks.len() {
            self.at += 1;
        }
        t
    }

    fn is_sym(&self, c: char) -> bool {
        self.peek().tok == Tok::Sym(c)
    }

    fn unexpected(&self, want: &str) -> ParseError {
        let t = self.peek();
        let found = match &t.tok {
            Tok::Num(v) => format!("number {v}"),
            Tok::Ident(s) => format!("'{s}'"),
            Tok::Sym(c) => format!("'{c}'"),
            Tok::End => "end of input".to_string(),
        };
        ParseError::Syntax {
            pos: t.pos,
            message: format!("expected {want}, found {found}"),
        }
    }

    fn expect(&mut self, c: char) -> Result<(), ParseError> {
        if self.is_sym(c) {
            self.bump();
            Ok(())
        } else {
            Err(self.unexpected(&format!("'{c}'")))
        }
    }

    fn expr(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.term()?;
        loop {
            let op = if self.is_sym('+') {
                BinOp::Add
            } else if self.is_sym('-') {
                BinOp::Sub
            } else {
                return Ok(lhs);
            };
            self.bump();
            let rhs = self.term()?;
            lhs = Expr::Binary(op, Box::new(lhs), Box::new(rhs));
        }
    }

    fn term(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.factor()?;
        loop {
            let op = if self.is_sym('*') {
                BinOp::Mul
            } else if self.is_sym('/') {
                BinOp::Div
            } else {
                return Ok(lhs);
            };
            self.bump();
            let rhs = self.factor()?;
            lhs = Expr::Binary(op, Box::new(lhs), Box::new(rhs));
        }
    }

    fn factor(&mut self) -> Result<Expr, ParseError> {
        if self.is_sym('-') {
            self.bump();
            return Ok(Expr::Neg(Box::new(self.factor()?)));
        }
        let base = self.base()?;
        if !self.is_sym('^') {
            return Ok(base);
        }
        let caret = self.bump().pos;
        let exponent = self.exponent()?;
        if !exponent.is_constant() {
            return Err(ParseError::NonConstantExponent { pos: caret });
        }
        let p = exponent.eval::<f64>(&[0.0; 3]).map_err(|_| ParseError::Syntax {
            pos: caret,
            message: "exponent does not evaluate to a finite number".into(),
        })?;
        Ok(Expr::Pow(Box::new(base), p))
    }

    fn exponent(&mut self) -> Result<Expr, ParseError> {
        if self.is_sym('-') {
            self.bump();
            return Ok(Expr::Neg(Box::new(self.exponent()?)));
        }
        self.base()
    }

    fn base(&mut self) -> Result<Expr, ParseError> {
        let t = self.peek().clone();
        match t.tok {
            Tok::Num(v) => {
                self.bump();
                Ok(Expr::Const(v))
            }
            Tok::Sym('(') => {
                self.bump();
                let e = self.expr()?;
                self.expect(')')?;
                Ok(e)
            }
            Tok::Ident(name) => {
                self.bump();
                match name.as_str() {
                    "x" => Ok(Expr::Var(0)),
                    "y" => Ok(Expr::Var(1)),
                    "z" => Ok(Expr::Var(2)),
                    "pi" => Ok(Expr::Const(std::f64::consts::PI)),
                    other => match Func::from_name(other) {
                        Some(func) => {
                            self.expect('(')?;
                            let arg = self.expr()?;
                            self.expect(')')?;
                            Ok(Expr::Call(func, Box::new(arg)))
                        }
                        None => Err(ParseError::UnknownIdentifier {
                            pos: t.pos,
                            name: name.clone(),
                        }),
                    },
                }
            }
            _ => Err(self.unexpected("a number, variable, function or '('")),
        }
    }

    fn finish(&self) -> Result<(), ParseError> {
        match self.peek().tok {
            Tok::End => Ok(()),
            _ => Err(self.unexpected("end of input")),
        }
    }
}

/// Parses a single scalar expression (used for pressure and profiles).
pub fn parse_expr(src: &str) -> Result<Expr, ParseError> {
    let mut p = Parser {
        toks: lex(src)?,
        at: 0,
    };
    let e = p.expr()?;
    p.finish()?;
    Ok(e)
}

/// Parses three separated component expressions. A triple wrapped in one
/// pair of parentheses, `(ux, uy, uz)`, is accepted as well.
pub fn parse_components(src: &str) -> Result<[Expr; 3], ParseError> {
    match parse_triple(src) {
        Ok(c) => Ok(c),
        Err(err) => {
            let trimmed = src.trim();
            if trimmed.starts_with('(') && trimmed.ends_with(')') && trimmed.len() >= 2 {
                let open = src.find('(').unwrap_or(0);
                let close = src.rfind(')').unwrap_or(src.len());
                let mut inner = String::with_capacity(src.len());
                inner.push_str(&" ".repeat(open + 1));
                inner.push_str(&src[open + 1..close]);
                parse_triple(&inner)
            } else {
                Err(err)
            }
        }
    }
}

fn parse_triple(src: &str) -> Result<[Expr; 3], ParseError> {
    let mut p = Parser {
        toks: lex(src)?,
        at: 0,
    };
    let a = p.expr()?;
    separator(&mut p)?;
    let b = p.expr()?;
    separator(&mut p)?;
    let c = p.expr()?;
    p.finish()?;
    Ok([a, b, c])
}

fn separator(p: &mut Parser) -> Result<(), ParseError> {
    if p.is_sym(',') || p.is_sym(';') {
        p.bump();
        Ok(())
    } else {
        Err(p.unexpected("',' or ';' between components"))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn eval3(e: &Expr, p: [f64; 3]) -> f64 {
        e.eval::<f64>(&p).unwrap()
    }

    #[test]
    fn precedence_and_associativity() {
        let e = parse_expr("1 - 2 - 3 * 4 / 2").unwrap();
        assert_eq!(eval3(&e, [0.0; 3]), -7.0);
        let e = parse_expr("-x^2").unwrap();
        assert_eq!(eval3(&e, [3.0, 0.0, 0.0]), -9.0);
        let e = parse_expr("2^-1 + x^(1/2)").unwrap();
        assert_eq!(eval3(&e, [4.0, 0.0, 0.0]), 2.5);
    }

    #[test]
    fn numbers_with_exponents() {
        let e = parse_expr("1.5e-3 + .5 + 2E2").unwrap();
        assert_eq!(eval3(&e, [0.0; 3]), 0.0015 + 0.5 + 200.0);
    }

    #[test]
    fn incomplete_sum_reports_end_offset() {
        let err = parse_expr("x + ").unwrap_err();
        assert_eq!(err.pos(), 3);
        assert!(matches!(err, ParseError::Syntax { .. }));
    }

    #[test]
    fn unknown_identifier_is_positioned() {
        let err = parse_components("x, w, 0").unwrap_err();
        assert_eq!(
            err,
            ParseError::UnknownIdentifier {
                pos: 3,
                name: "w".into()
            }
        );
    }

    #[test]
    fn variable_exponent_rejected() {
        let err = parse_expr("x^y").unwrap_err();
        assert_eq!(err, ParseError::NonConstantExponent { pos: 1 });
        assert!(parse_expr("x^(2*pi)").is_ok());
    }

    #[test]
    fn chained_power_is_a_syntax_error() {
        assert!(matches!(
            parse_expr("x^2^3"),
            Err(ParseError::Syntax { pos: 3, .. })
        ));
    }

    #[test]
    fn function_requires_parenthesis() {
        assert!(matches!(
            parse_expr("sin x"),
            Err(ParseError::Syntax { pos: 4, .. })
        ));
    }

    #[test]
    fn semicolon_separators_accepted() {
        let c = parse_components("-x; y ; 0").unwrap();
        assert_eq!(eval3(&c[0], [1.0, 2.0, 3.0]), -1.0);
        assert_eq!(eval3(&c[1], [1.0, 2.0, 3.0]), 2.0);
    }

    #[test]
    fn parenthesized_triple_accepted() {
        let c = parse_components(" (-y, x, 1)").unwrap();
        assert_eq!(eval3(&c[2], [0.0; 3]), 1.0);
        assert_eq!(eval3(&c[0], [0.0, 2.0, 0.0]), -2.0);
        // errors still point into the original text
        let err = parse_components("(x, y, w)").unwrap_err();
        assert_eq!(err.pos(), 7);
    }

    #[test]
    fn missing_component_is_error() {
        assert!(parse_components("x, y").is_err());
        assert!(parse_components("x, y, z, 1").is_err());
    }

    #[test]
    fn domain_error_names_innermost_subexpression() {
        let e = parse_expr("1 + log(x - 2)").unwrap();
        match e.eval::<f64>(&[1.0, 0.0, 0.0]) {
            Err(Error::Domain { expr }) => assert_eq!(expr, "log((x - 2.0))"),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn printing_round_trips() {
        let e = parse_expr("-(x*y)^3 / (1.25e-7 + sqrt(z^2 + 1)) - 2^-0.5").unwrap();
        let again = parse_expr(&e.to_string()).unwrap();
        assert_eq!(e, again);
    }
}
