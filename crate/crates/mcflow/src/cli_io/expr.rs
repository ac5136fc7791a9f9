//! Tiny arithmetic expression grammar for custom initial data:
//! numbers, the variables `r`, `x`, `y`, the builtin `dist` (distance to the
//! domain boundary, positive inside), operators + − * / ^ and parentheses.
//! Deliberately no functions and no scripting; parsed once at build time.

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub enum Expr {
    Num(f64),
    Var(Var),
    Neg(Box<Expr>),
    Add(Box<Expr>, Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
    Div(Box<Expr>, Box<Expr>),
    Pow(Box<Expr>, Box<Expr>),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Var {
    R,
    X,
    Y,
    Dist,
}

/// Values bound to the variables at one evaluation point.
#[derive(Debug, Clone, Copy)]
pub struct Bindings {
    pub r: f64,
    pub x: f64,
    pub y: f64,
    pub dist: f64,
}

impl Expr {
    pub fn eval(&self, b: &Bindings) -> f64 {
        match self {
            Expr::Num(v) => *v,
            Expr::Var(Var::R) => b.r,
            Expr::Var(Var::X) => b.x,
            Expr::Var(Var::Y) => b.y,
            Expr::Var(Var::Dist) => b.dist,
            Expr::Neg(e) => -e.eval(b),
            Expr::Add(l, r) => l.eval(b) + r.eval(b),
            Expr::Sub(l, r) => l.eval(b) - r.eval(b),
            Expr::Mul(l, r) => l.eval(b) * r.eval(b),
            Expr::Div(l, r) => l.eval(b) / r.eval(b),
            Expr::Pow(l, r) => l.eval(b).powf(r.eval(b)),
        }
    }

    /// Variables referenced by the expression.
    pub fn vars(&self) -> Vec<Var> {
        let mut out = Vec::new();
        fn walk(e: &Expr, out: &mut Vec<Var>) {
            match e {
                Expr::Num(_) => {}
                Expr::Var(v) => {
                    if !out.contains(v) {
                        out.push(*v);
                    }
                }
                Expr::Neg(a) => walk(a, out),
                Expr::Add(a, b)
                | Expr::Sub(a, b)
                | Expr::Mul(a, b)
                | Expr::Div(a, b)
                | Expr::Pow(a, b) => {
                    walk(a, out);
                    walk(b, out);
                }
            }
        }
        walk(self, &mut out);
        out
    }
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

fn tokenize(s: &str) -> Result<Vec<Tok>> {
    let mut out = Vec::new();
    let bytes: Vec<char> = s.chars().collect();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i];
        match c {
            ' ' | '\t' | '\n' | '\r' => i += 1,
            '+' => {
                out.push(Tok::Plus);
                i += 1;
            }
            '-' | '−' => {
                out.push(Tok::Minus);
                i += 1;
            }
            '*' => {
                out.push(Tok::Star);
                i += 1;
            }
            '/' => {
                out.push(Tok::Slash);
                i += 1;
            }
            '^' => {
                out.push(Tok::Caret);
                i += 1;
            }
            '(' => {
                out.push(Tok::LParen);
                i += 1;
            }
            ')' => {
                out.push(Tok::RParen);
                i += 1;
            }
            c if c.is_ascii_digit() || c == '.' => {
                let start = i;
                while i < bytes.len()
                    && (bytes[i].is_ascii_digit()
                        || bytes[i] == '.'
                        || bytes[i] == 'e'
                        || bytes[i] == 'E'
                        || ((bytes[i] == '+' || bytes[i] == '-')
                            && i > start
                            && (bytes[i - 1] == 'e' || bytes[i - 1] == 'E')))
                {
                    i += 1;
                }
                let text: String = bytes[start..i].iter().collect();
                let v: f64 = text
                    .parse()
                    .map_err(|_| Error::Parse(format!("bad number {text:?}")))?;
                out.push(Tok::Num(v));
            }
            c if c.is_ascii_alphabetic() => {
                let start = i;
                while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == '_') {
                    i += 1;
                }
                out.push(Tok::Ident(bytes[start..i].iter().collect()));
            }
            other => {
                return Err(Error::Parse(format!(
                    "unexpected character {other:?} in expression"
                )))
            }
        }
    }
    Ok(out)
}

struct Parser {
    toks: Vec<Tok>,
    pos: usize,
}

impl Parser {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos)
    }

    fn next(&mut self) -> Option<Tok> {
        let t = self.toks.get(self.pos).cloned();
        if t.is_some() {
            self.pos += 1;
        }
        t
    }

    // expr := term (('+'|'-') term)*
    fn expr(&mut self) -> Result<Expr> {
        let mut lhs = self.term()?;
        loop {
            match self.peek() {
                Some(Tok::Plus) => {
                    self.next();
                    lhs = Expr::Add(Box::new(lhs), Box::new(self.term()?));
                }
                Some(Tok::Minus) => {
                    self.next();
                    lhs = Expr::Sub(Box::new(lhs), Box::new(self.term()?));
                }
                _ => return Ok(lhs),
            }
        }
    }

    // term := unary (('*'|'/') unary)*
    fn term(&mut self) -> Result<Expr> {
        let mut lhs = self.unary()?;
        loop {
            match self.peek() {
                Some(Tok::Star) => {
                    self.next();
                    lhs = Expr::Mul(Box::new(lhs), Box::new(self.unary()?));
                }
                Some(Tok::Slash) => {
                    self.next();
                    lhs = Expr::Div(Box::new(lhs), Box::new(self.unary()?));
                }
                _ => return Ok(lhs),
            }
        }
    }

    // unary := '-' unary | power
    fn unary(&mut self) -> Result<Expr> {
        if matches!(self.peek(), Some(Tok::Minus)) {
            self.next();
            return Ok(Expr::Neg(Box::new(self.unary()?)));
        }
        self.power()
    }

    // power := atom ('^' unary)?   (right-associative, binds tighter than
    // unary minus on the left: -r^2 = -(r^2))
    fn power(&mut self) -> Result<Expr> {
        let base = self.atom()?;
        if matches!(self.peek(), Some(Tok::Caret)) {
            self.next();
            let exp = self.unary()?;
            return Ok(Expr::Pow(Box::new(base), Box::new(exp)));
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<Expr> {
        match self.next() {
            Some(Tok::Num(v)) => Ok(Expr::Num(v)),
            Some(Tok::Ident(name)) => match name.as_str() {
                "r" => Ok(Expr::Var(Var::R)),
                "x" => Ok(Expr::Var(Var::X)),
                "y" => Ok(Expr::Var(Var::Y)),
                "dist" => Ok(Expr::Var(Var::Dist)),
                other => Err(Error::Parse(format!("unknown identifier {other:?}"))),
            },
            Some(Tok::LParen) => {
                let inner = self.expr()?;
                match self.next() {
                    Some(Tok::RParen) => Ok(inner),
                    _ => Err(Error::Parse("missing closing parenthesis".into())),
                }
            }
            other => Err(Error::Parse(format!(
                "expected a value, found {other:?}"
            ))),
        }
    }
}

/// Parse one expression; the whole input must be consumed.
pub fn parse(src: &str) -> Result<Expr> {
    let toks = tokenize(src)?;
    if toks.is_empty() {
        return Err(Error::Parse("empty expression".into()));
    }
    let mut p = Parser { toks, pos: 0 };
    let e = p.expr()?;
    if p.pos != p.toks.len() {
        return Err(Error::Parse(format!(
            "trailing tokens after position {}",
            p.pos
        )));
    }
    Ok(e)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ev(src: &str, r: f64, dist: f64) -> f64 {
        parse(src).unwrap().eval(&Bindings {
            r,
            x: 0.0,
            y: 0.0,
            dist,
        })
    }

    #[test]
    fn precedence_and_associativity() {
        assert_eq!(ev("2+3*4^2", 0.0, 0.0), 50.0);
        assert_eq!(ev("2^3^2", 0.0, 0.0), 512.0, "power is right-associative");
        assert_eq!(ev("-r^2", 3.0, 0.0), -9.0);
        assert_eq!(ev("(2+3)*4", 0.0, 0.0), 20.0);
        assert_eq!(ev("10-4-3", 0.0, 0.0), 3.0, "subtraction is left-associative");
        assert_eq!(ev("12/3/2", 0.0, 0.0), 2.0);
    }

    #[test]
    fn default_datum_shape() {
        // 1/dist + r^2 at r = 0.5 in the unit ball: dist = 0.5
        let v = ev("1/dist + r^2", 0.5, 0.5);
        assert!((v - 2.25).abs() < 1e-15);
    }

    #[test]
    fn cartesian_variables() {
        let e = parse("x^2 + y^2 - 0.5*x*y").unwrap();
        let v = e.eval(&Bindings {
            r: 0.0,
            x: 2.0,
            y: 3.0,
            dist: 0.0,
        });
        assert!((v - (4.0 + 9.0 - 3.0)).abs() < 1e-15);
        assert_eq!(e.vars(), vec![Var::X, Var::Y]);
    }

    #[test]
    fn rejects_malformed_input() {
        assert!(parse("").is_err());
        assert!(parse("1 +").is_err());
        assert!(parse("(1+2").is_err());
        assert!(parse("foo + 1").is_err());
        assert!(parse("1 2").is_err());
        assert!(parse("sin(r)").is_err());
    }

    #[test]
    fn scientific_numbers() {
        assert_eq!(ev("1e-3 + 2.5E2", 0.0, 0.0), 250.001);
    }
}
