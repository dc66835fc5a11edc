//! Word expressions over named generators.
//!
//! ```text
//! expr   := term { "*" term }
//! term   := factor [ "^" ( integer | factor ) ]
//! factor := "1" | name | name "(" expr { "," expr } ")" | "(" expr ")"
//! ```
//!
//! `g^n` is a power (`n` may be negative), `g^h` with a non-integer
//! exponent is the conjugate `h⁻¹gh`. Built-in functions: `comm(g,h)`,
//! `conj(g,h)`, `inv(g)`.

use std::collections::HashMap;
use std::fmt;

use thiserror::Error;

use super::Element;

pub const GRAMMAR: &str = "\
expr   := term { \"*\" term }
term   := factor [ \"^\" ( integer | factor ) ]
factor := \"1\" | name | name \"(\" expr { \",\" expr } \")\" | \"(\" expr \")\"
functions: comm(g,h) = g^-1*h^-1*g*h, conj(g,h) = h^-1*g*h, inv(g)";

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ExprError {
    #[error("parse error at position {pos}: {msg}")]
    Parse { pos: usize, msg: String },
    #[error("unknown generator `{0}`")]
    UnknownGenerator(String),
    #[error("unknown function `{0}`")]
    UnknownFunction(String),
    #[error("function `{name}` expects {expected} argument(s), got {got}")]
    Arity { name: String, expected: usize, got: usize },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Expr {
    One,
    Name(String),
    Product(Vec<Expr>),
    Power(Box<Expr>, i64),
    Conjugate(Box<Expr>, Box<Expr>),
    Call(String, Vec<Expr>),
}

impl Expr {
    pub fn parse(text: &str) -> Result<Expr, ExprError> {
        let mut parser = Parser { src: text.as_bytes(), pos: 0 };
        let e = parser.expr()?;
        parser.skip_ws();
        if parser.pos != parser.src.len() {
            return Err(parser.error("unexpected trailing input"));
        }
        Ok(e)
    }

    /// Evaluates with `resolve` mapping generator (or bound) names to
    /// elements; `p` is needed for the literal `1`.
    pub fn eval(&self, p: usize, resolve: &dyn Fn(&str) -> Option<Element>) -> Result<Element, ExprError> {
        Ok(match self {
            Expr::One => Element::identity(p).map_err(|e| ExprError::Parse { pos: 0, msg: e.to_string() })?,
            Expr::Name(n) => resolve(n).ok_or_else(|| ExprError::UnknownGenerator(n.clone()))?,
            Expr::Product(fs) => {
                let mut acc: Option<Element> = None;
                for f in fs {
                    let v = f.eval(p, resolve)?;
                    acc = Some(match acc {
                        None => v,
                        Some(a) => a.try_mul(&v).map_err(|e| ExprError::Parse { pos: 0, msg: e.to_string() })?,
                    });
                }
                acc.expect("products are non-empty")
            }
            Expr::Power(b, n) => b.eval(p, resolve)?.pow(*n),
            Expr::Conjugate(b, h) => {
                let b = b.eval(p, resolve)?;
                let h = h.eval(p, resolve)?;
                b.try_conjugate(&h).map_err(|e| ExprError::Parse { pos: 0, msg: e.to_string() })?
            }
            Expr::Call(name, args) => {
                let vals = args.iter().map(|a| a.eval(p, resolve)).collect::<Result<Vec<_>, _>>()?;
                let arity = |expected: usize| {
                    if vals.len() == expected {
                        Ok(())
                    } else {
                        Err(ExprError::Arity { name: name.clone(), expected, got: vals.len() })
                    }
                };
                let mismatch = |e: super::ElementError| ExprError::Parse { pos: 0, msg: e.to_string() };
                match name.as_str() {
                    "comm" => {
                        arity(2)?;
                        vals[0].try_commutator(&vals[1]).map_err(mismatch)?
                    }
                    "conj" => {
                        arity(2)?;
                        vals[0].try_conjugate(&vals[1]).map_err(mismatch)?
                    }
                    "inv" => {
                        arity(1)?;
                        vals[0].inv()
                    }
                    _ => return Err(ExprError::UnknownFunction(name.clone())),
                }
            }
        })
    }

    /// Number of generator occurrences after expanding powers; an upper
    /// bound on the word length of the element.
    pub fn word_length(&self) -> u64 {
        match self {
            Expr::One => 0,
            Expr::Name(_) => 1,
            Expr::Product(fs) => fs.iter().map(Expr::word_length).sum(),
            Expr::Power(b, n) => b.word_length().saturating_mul(n.unsigned_abs()),
            Expr::Conjugate(b, h) => b.word_length() + 2 * h.word_length(),
            Expr::Call(name, args) => {
                let l: Vec<u64> = args.iter().map(Expr::word_length).collect();
                match name.as_str() {
                    "comm" => 2 * l.iter().sum::<u64>(),
                    "conj" => l.first().copied().unwrap_or(0) + 2 * l.get(1).copied().unwrap_or(0),
                    _ => l.iter().sum(),
                }
            }
        }
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fn atom(e: &Expr, f: &mut fmt::Formatter<'_>) -> fmt::Result {
            match e {
                Expr::One | Expr::Name(_) | Expr::Call(..) => write!(f, "{e}"),
                _ => write!(f, "({e})"),
            }
        }
        match self {
            Expr::One => f.write_str("1"),
            Expr::Name(n) => f.write_str(n),
            Expr::Product(fs) => {
                for (i, e) in fs.iter().enumerate() {
                    if i > 0 {
                        f.write_str("*")?;
                    }
                    match e {
                        Expr::Product(_) => atom(e, f)?,
                        _ => write!(f, "{e}")?,
                    }
                }
                Ok(())
            }
            Expr::Power(b, n) => {
                atom(b, f)?;
                write!(f, "^{n}")
            }
            Expr::Conjugate(b, h) => {
                atom(b, f)?;
                f.write_str("^")?;
                atom(h, f)
            }
            Expr::Call(name, args) => {
                write!(f, "{name}(")?;
                for (i, a) in args.iter().enumerate() {
                    if i > 0 {
                        f.write_str(",")?;
                    }
                    write!(f, "{a}")?;
                }
                f.write_str(")")
            }
        }
    }
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
}

impl Parser<'_> {
    fn error(&self, msg: &str) -> ExprError {
        ExprError::Parse { pos: self.pos, msg: msg.to_string() }
    }

    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.src.get(self.pos).copied()
    }

    fn eat(&mut self, c: u8) -> bool {
        if self.peek() == Some(c) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expr(&mut self) -> Result<Expr, ExprError> {
        let mut terms = vec![self.term()?];
        while self.eat(b'*') {
            terms.push(self.term()?);
        }
        Ok(if terms.len() == 1 { terms.pop().unwrap() } else { Expr::Product(terms) })
    }

    fn term(&mut self) -> Result<Expr, ExprError> {
        let base = self.factor()?;
        if !self.eat(b'^') {
            return Ok(base);
        }
        match self.peek() {
            Some(c) if c == b'-' || c.is_ascii_digit() => {
                let start = self.pos;
                self.pos += 1;
                while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
                    self.pos += 1;
                }
                let text = std::str::from_utf8(&self.src[start..self.pos]).unwrap();
                let n = text.parse::<i64>().map_err(|_| ExprError::Parse { pos: start, msg: format!("bad exponent `{text}`") })?;
                Ok(Expr::Power(Box::new(base), n))
            }
            Some(_) => Ok(Expr::Conjugate(Box::new(base), Box::new(self.factor()?))),
            None => Err(self.error("expected exponent")),
        }
    }

    fn factor(&mut self) -> Result<Expr, ExprError> {
        match self.peek() {
            Some(b'(') => {
                self.pos += 1;
                let e = self.expr()?;
                if !self.eat(b')') {
                    return Err(self.error("expected `)`"));
                }
                Ok(e)
            }
            Some(b'1') => {
                self.pos += 1;
                Ok(Expr::One)
            }
            Some(c) if c.is_ascii_alphabetic() => {
                let start = self.pos;
                while self.pos < self.src.len() && (self.src[self.pos].is_ascii_alphanumeric() || self.src[self.pos] == b'_') {
                    self.pos += 1;
                }
                let name = std::str::from_utf8(&self.src[start..self.pos]).unwrap().to_string();
                if self.src.get(self.pos) == Some(&b'(') {
                    self.pos += 1;
                    let mut args = vec![self.expr()?];
                    while self.eat(b',') {
                        args.push(self.expr()?);
                    }
                    if !self.eat(b')') {
                        return Err(self.error("expected `)` after arguments"));
                    }
                    Ok(Expr::Call(name, args))
                } else {
                    Ok(Expr::Name(name))
                }
            }
            Some(_) => Err(self.error("expected generator, `1` or `(`")),
            None => Err(self.error("unexpected end of input")),
        }
    }
}

/// Generators plus `name=expr` bindings evaluated left to right.
#[derive(Clone, Debug)]
pub struct Scope {
    p: usize,
    names: HashMap<String, Element>,
}

impl Scope {
    pub fn new(p: usize, generators: impl IntoIterator<Item = (String, Element)>) -> Self {
        Scope { p, names: generators.into_iter().collect() }
    }

    pub fn get(&self, name: &str) -> Option<&Element> {
        self.names.get(name)
    }

    pub fn eval(&self, text: &str) -> Result<Element, ExprError> {
        Expr::parse(text)?.eval(self.p, &|n| self.names.get(n).cloned())
    }

    /// Binds `name` to the value of `text` (which may use earlier bindings).
    pub fn define(&mut self, name: &str, text: &str) -> Result<Element, ExprError> {
        let v = self.eval(text)?;
        self.names.insert(name.to_string(), v.clone());
        Ok(v)
    }

    /// Parses `name=expr` and binds it.
    pub fn define_binding(&mut self, binding: &str) -> Result<Element, ExprError> {
        let (name, text) = binding
            .split_once('=')
            .ok_or_else(|| ExprError::Parse { pos: 0, msg: format!("expected name=expr, got `{binding}`") })?;
        let name = name.trim();
        if name.is_empty() || !name.chars().next().unwrap().is_ascii_alphabetic() {
            return Err(ExprError::Parse { pos: 0, msg: format!("invalid binding name `{name}`") });
        }
        self.define(name, text)
    }
}
