//! Tiny arithmetic grammar in one variable:
//! `+ - * / ^`, unary minus, parentheses, `cos`, `sin`, `exp`, numeric
//! literals and the variable `x`.
//!
//! Expressions evaluate over any [`Number`], so the same tree yields
//! values, complex values and exact Taylor jets.

use crate::error::{Result, SemiquantError};
use crate::number::Number;
use crate::taylor::Taylor;
use std::fmt;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Func {
    Cos,
    Sin,
    Exp,
}

#[derive(Clone, Debug, PartialEq)]
pub enum Expr {
    Const(f64),
    Var,
    Neg(Box<Expr>),
    Add(Box<Expr>, Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
    Div(Box<Expr>, Box<Expr>),
    Pow(Box<Expr>, Box<Expr>),
    Call(Func, Box<Expr>),
}

impl Expr {
    pub fn parse(src: &str) -> Result<Expr> {
        let mut p = Parser {
            src: src.as_bytes(),
            pos: 0,
        };
        let e = p.expr()?;
        p.skip_ws();
        if p.pos != p.src.len() {
            return Err(p.error("unexpected trailing input"));
        }
        Ok(e)
    }

    pub fn constant(v: f64) -> Expr {
        Expr::Const(v)
    }

    pub fn var() -> Expr {
        Expr::Var
    }

    pub fn is_zero(&self) -> bool {
        matches!(self, Expr::Const(c) if *c == 0.0)
    }

    pub fn eval<T: Number>(&self, x: T) -> T {
        match self {
            Expr::Const(c) => T::from_f64(*c),
            Expr::Var => x,
            Expr::Neg(a) => -a.eval(x),
            Expr::Add(a, b) => a.eval(x) + b.eval(x),
            Expr::Sub(a, b) => a.eval(x) - b.eval(x),
            Expr::Mul(a, b) => a.eval(x) * b.eval(x),
            Expr::Div(a, b) => a.eval(x) / b.eval(x),
            Expr::Pow(a, b) => {
                let base = a.eval(x);
                match **b {
                    Expr::Const(p) if p == p.trunc() && p.abs() <= 64.0 => base.powi(p as i32),
                    Expr::Const(p) => base.powf(p),
                    _ => (b.eval(x) * base.ln()).exp(),
                }
            }
            Expr::Call(f, a) => {
                let v = a.eval(x);
                match f {
                    Func::Cos => v.cos(),
                    Func::Sin => v.sin(),
                    Func::Exp => v.exp(),
                }
            }
        }
    }

    /// Value and derivatives `[f, f', f'', f''', f'''']` at `x`.
    pub fn derivatives<T: Number>(&self, x: T) -> [T; 5] {
        let jet: Taylor<T, 5> = self.eval(Taylor::variable(x));
        [
            jet.derivative(0),
            jet.derivative(1),
            jet.derivative(2),
            jet.derivative(3),
            jet.derivative(4),
        ]
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expr::Const(c) if *c < 0.0 => write!(f, "({c:?})"),
            Expr::Const(c) => write!(f, "{c:?}"),
            Expr::Var => write!(f, "x"),
            Expr::Neg(a) => write!(f, "(-{a})"),
            Expr::Add(a, b) => write!(f, "({a} + {b})"),
            Expr::Sub(a, b) => write!(f, "({a} - {b})"),
            Expr::Mul(a, b) => write!(f, "({a} * {b})"),
            Expr::Div(a, b) => write!(f, "({a} / {b})"),
            Expr::Pow(a, b) => write!(f, "({a} ^ {b})"),
            Expr::Call(func, a) => {
                let name = match func {
                    Func::Cos => "cos",
                    Func::Sin => "sin",
                    Func::Exp => "exp",
                };
                write!(f, "{name}({a})")
            }
        }
    }
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
}

impl Parser<'_> {
    fn error(&self, msg: &str) -> SemiquantError {
        SemiquantError::Parse {
            pos: self.pos,
            msg: msg.to_string(),
        }
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

    fn expr(&mut self) -> Result<Expr> {
        let mut lhs = self.term()?;
        loop {
            match self.peek() {
                Some(b'+') => {
                    self.pos += 1;
                    lhs = Expr::Add(Box::new(lhs), Box::new(self.term()?));
                }
                Some(b'-') => {
                    self.pos += 1;
                    lhs = Expr::Sub(Box::new(lhs), Box::new(self.term()?));
                }
                _ => return Ok(lhs),
            }
        }
    }

    fn term(&mut self) -> Result<Expr> {
        let mut lhs = self.unary()?;
        loop {
            match self.peek() {
                Some(b'*') => {
                    self.pos += 1;
                    lhs = Expr::Mul(Box::new(lhs), Box::new(self.unary()?));
                }
                Some(b'/') => {
                    self.pos += 1;
                    lhs = Expr::Div(Box::new(lhs), Box::new(self.unary()?));
                }
                _ => return Ok(lhs),
            }
        }
    }

    fn unary(&mut self) -> Result<Expr> {
        match self.peek() {
            Some(b'-') => {
                self.pos += 1;
                Ok(Expr::Neg(Box::new(self.unary()?)))
            }
            Some(b'+') => {
                self.pos += 1;
                self.unary()
            }
            _ => self.power(),
        }
    }

    // `^` binds tighter than unary minus on its left and is right-associative
    fn power(&mut self) -> Result<Expr> {
        let base = self.atom()?;
        if self.peek() == Some(b'^') {
            self.pos += 1;
            let exp = self.unary()?;
            return Ok(Expr::Pow(Box::new(base), Box::new(exp)));
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<Expr> {
        match self.peek() {
            Some(b'(') => {
                self.pos += 1;
                let e = self.expr()?;
                if self.peek() != Some(b')') {
                    return Err(self.error("expected `)`"));
                }
                self.pos += 1;
                Ok(e)
            }
            Some(c) if c.is_ascii_digit() || c == b'.' => self.number(),
            Some(c) if c.is_ascii_alphabetic() => {
                let start = self.pos;
                while self.pos < self.src.len() && self.src[self.pos].is_ascii_alphanumeric() {
                    self.pos += 1;
                }
                let name = std::str::from_utf8(&self.src[start..self.pos]).unwrap_or("");
                let func = match name {
                    "x" => return Ok(Expr::Var),
                    "cos" => Func::Cos,
                    "sin" => Func::Sin,
                    "exp" => Func::Exp,
                    _ => {
                        self.pos = start;
                        return Err(self.error(&format!("unknown identifier `{name}`")));
                    }
                };
                if self.peek() != Some(b'(') {
                    return Err(self.error("expected `(` after function name"));
                }
                self.pos += 1;
                let arg = self.expr()?;
                if self.peek() != Some(b')') {
                    return Err(self.error("expected `)`"));
                }
                self.pos += 1;
                Ok(Expr::Call(func, Box::new(arg)))
            }
            Some(_) => Err(self.error("unexpected character")),
            None => Err(self.error("unexpected end of input")),
        }
    }

    fn number(&mut self) -> Result<Expr> {
        let start = self.pos;
        let s = self.src;
        while self.pos < s.len() && (s[self.pos].is_ascii_digit() || s[self.pos] == b'.') {
            self.pos += 1;
        }
        if self.pos < s.len() && (s[self.pos] == b'e' || s[self.pos] == b'E') {
            let save = self.pos;
            self.pos += 1;
            if self.pos < s.len() && (s[self.pos] == b'+' || s[self.pos] == b'-') {
                self.pos += 1;
            }
            if self.pos < s.len() && s[self.pos].is_ascii_digit() {
                while self.pos < s.len() && s[self.pos].is_ascii_digit() {
                    self.pos += 1;
                }
            } else {
                self.pos = save;
            }
        }
        let text = std::str::from_utf8(&s[start..self.pos]).unwrap_or("");
        text.parse::<f64>().map(Expr::Const).map_err(|_| {
            self.pos = start;
            self.error(&format!("invalid number `{text}`"))
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex64;
    use proptest::prelude::*;

    #[test]
    fn precedence_and_associativity() {
        let e = Expr::parse("1 + 2*x^2 - x/4").unwrap();
        assert!((e.eval(2.0) - 8.5).abs() < 1e-15);
        let e = Expr::parse("2^3^2").unwrap();
        assert!((e.eval(0.0) - 512.0).abs() < 1e-12);
        let e = Expr::parse("-x^2").unwrap();
        assert_eq!(e.eval(3.0), -9.0);
        let e = Expr::parse("x^-1").unwrap();
        assert_eq!(e.eval(4.0), 0.25);
    }

    #[test]
    fn functions_and_scientific_literals() {
        let e = Expr::parse("cos(x) + sin(0) + exp(0) + 1.5e-1").unwrap();
        assert!((e.eval(0.0) - 2.15).abs() < 1e-15);
    }

    #[test]
    fn rejects_bad_input() {
        assert!(Expr::parse("y + 1").is_err());
        assert!(Expr::parse("(x + 1").is_err());
        assert!(Expr::parse("x +").is_err());
        assert!(Expr::parse("cos x").is_err());
        assert!(Expr::parse("1 2").is_err());
    }

    #[test]
    fn derivatives_of_quartic() {
        let e = Expr::parse("x^2 + 0.2*x^4").unwrap();
        let d = e.derivatives(1.5);
        assert!((d[1] - (3.0 + 0.8 * 3.375)).abs() < 1e-12);
        assert!((d[2] - (2.0 + 2.4 * 2.25)).abs() < 1e-12);
        assert!((d[4] - 4.8).abs() < 1e-12);
    }

    #[test]
    fn complex_evaluation_matches_real_on_axis() {
        let e = Expr::parse("cos(x) + x^3").unwrap();
        let z = e.eval(Complex64::new(0.7, 0.0));
        assert!((z.re - e.eval(0.7)).abs() < 1e-15 && z.im.abs() < 1e-15);
    }

    proptest! {
        #[test]
        fn display_round_trips(a in -5.0f64..5.0, b in -3.0f64..3.0, x in -2.0f64..2.0) {
            let src = format!("{a}*x^3 - exp({b}*x)/(1 + x^2) + cos(x)");
            let e = Expr::parse(&src).unwrap();
            let again = Expr::parse(&e.to_string()).unwrap();
            prop_assert!((e.eval(x) - again.eval(x)).abs() <= 1e-12 * (1.0 + e.eval(x).abs()));
        }

        #[test]
        fn jet_derivative_matches_difference_quotient(x in -1.5f64..1.5) {
            let e = Expr::parse("sin(x)*exp(x/2) + x^4").unwrap();
            let d = e.derivatives(x);
            let h = 1e-5;
            let fd = (e.eval(x + h) - e.eval(x - h)) / (2.0 * h);
            prop_assert!((d[1] - fd).abs() < 1e-8);
        }
    }
}
