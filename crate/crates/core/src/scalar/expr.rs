//! Exact-value expressions.
//!
//! Grammar (whitespace is insignificant):
//!
//! ```text
//! expr   := term { ("+" | "-") term }
//! term   := factor { ("*" | "/") factor }
//! factor := integer | "-" factor | "(" expr ")" | "sqrt" "(" expr ")"
//!         | "pi" | "zeta" "(" integer ")" | "L" "(" integer "," integer ")"
//!         | "beta" "(" integer ")"
//! ```
//!
//! `print_expr` emits the minimal parenthesisation that parses back to the
//! same tree, so `parse_expr(&print_expr(e)) == e` for every tree.

use super::special;
use super::Scalar;
use crate::error::{Error, Result};
use rug::{Float, Integer};
use std::fmt;

/// Guard bits added for evaluation; the result is rounded back afterwards.
const GUARD_BITS: u32 = 32;

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum ExactExpr {
    Int(Integer),
    Neg(Box<ExactExpr>),
    Add(Box<ExactExpr>, Box<ExactExpr>),
    Sub(Box<ExactExpr>, Box<ExactExpr>),
    Mul(Box<ExactExpr>, Box<ExactExpr>),
    Div(Box<ExactExpr>, Box<ExactExpr>),
    Sqrt(Box<ExactExpr>),
    Pi,
    Zeta(u32),
    L(u32, u32),
    Beta(u32),
}

impl ExactExpr {
    pub fn int(v: i64) -> Self {
        if v < 0 {
            ExactExpr::Neg(Box::new(ExactExpr::Int(Integer::from(-v))))
        } else {
            ExactExpr::Int(Integer::from(v))
        }
    }

    pub fn ratio(num: i64, den: i64) -> Self {
        ExactExpr::Div(Box::new(Self::int(num)), Box::new(Self::int(den)))
    }

    pub fn eval(&self, prec: u32) -> Result<Scalar> {
        eval_expr(self, prec)
    }

    fn level(&self) -> u8 {
        match self {
            ExactExpr::Add(..) | ExactExpr::Sub(..) => 1,
            ExactExpr::Mul(..) | ExactExpr::Div(..) => 2,
            _ => 3,
        }
    }
}

impl fmt::Display for ExactExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&print_expr(self))
    }
}

impl std::str::FromStr for ExactExpr {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        parse_expr(s)
    }
}

pub fn parse_expr(text: &str) -> Result<ExactExpr> {
    let mut p = Parser { src: text.as_bytes(), pos: 0 };
    let e = p.expr()?;
    p.skip_ws();
    if p.pos != p.src.len() {
        return Err(p.error("unexpected trailing input"));
    }
    Ok(e)
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
}

impl Parser<'_> {
    fn error(&self, message: &str) -> Error {
        Error::Syntax { offset: self.pos, message: message.into() }
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

    fn expect(&mut self, c: u8) -> Result<()> {
        if self.peek() == Some(c) {
            self.pos += 1;
            Ok(())
        } else {
            Err(self.error(&format!("expected '{}'", c as char)))
        }
    }

    fn expr(&mut self) -> Result<ExactExpr> {
        let mut lhs = self.term()?;
        loop {
            match self.peek() {
                Some(b'+') => {
                    self.pos += 1;
                    lhs = ExactExpr::Add(Box::new(lhs), Box::new(self.term()?));
                }
                Some(b'-') => {
                    self.pos += 1;
                    lhs = ExactExpr::Sub(Box::new(lhs), Box::new(self.term()?));
                }
                _ => return Ok(lhs),
            }
        }
    }

    fn term(&mut self) -> Result<ExactExpr> {
        let mut lhs = self.factor()?;
        loop {
            match self.peek() {
                Some(b'*') => {
                    self.pos += 1;
                    lhs = ExactExpr::Mul(Box::new(lhs), Box::new(self.factor()?));
                }
                Some(b'/') => {
                    self.pos += 1;
                    lhs = ExactExpr::Div(Box::new(lhs), Box::new(self.factor()?));
                }
                _ => return Ok(lhs),
            }
        }
    }

    fn factor(&mut self) -> Result<ExactExpr> {
        match self.peek() {
            Some(b'-') => {
                self.pos += 1;
                Ok(ExactExpr::Neg(Box::new(self.factor()?)))
            }
            Some(b'(') => {
                self.pos += 1;
                let e = self.expr()?;
                self.expect(b')')?;
                Ok(e)
            }
            Some(c) if c.is_ascii_digit() => Ok(ExactExpr::Int(self.integer()?)),
            Some(c) if c.is_ascii_alphabetic() => self.call(),
            Some(_) => Err(self.error("unexpected character")),
            None => Err(self.error("unexpected end of input")),
        }
    }

    fn integer(&mut self) -> Result<Integer> {
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(self.error("expected integer"));
        }
        let digits = std::str::from_utf8(&self.src[start..self.pos]).expect("ascii digits");
        Integer::from_str_radix(digits, 10).map_err(|_| self.error("invalid integer"))
    }

    fn small_integer(&mut self) -> Result<u32> {
        let start = self.pos;
        let v = self.integer()?;
        v.to_u32().ok_or(Error::Syntax { offset: start, message: "argument too large".into() })
    }

    fn call(&mut self) -> Result<ExactExpr> {
        let start = self.pos;
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_alphabetic() {
            self.pos += 1;
        }
        let name = std::str::from_utf8(&self.src[start..self.pos]).expect("ascii letters");
        match name {
            "pi" => Ok(ExactExpr::Pi),
            "sqrt" => {
                self.expect(b'(')?;
                let e = self.expr()?;
                self.expect(b')')?;
                Ok(ExactExpr::Sqrt(Box::new(e)))
            }
            "zeta" => {
                self.expect(b'(')?;
                let k = self.small_integer()?;
                self.expect(b')')?;
                if k < 2 {
                    return Err(Error::domain(format!("zeta({k}) requires k >= 2")));
                }
                Ok(ExactExpr::Zeta(k))
            }
            "L" => {
                self.expect(b'(')?;
                let s = self.small_integer()?;
                self.expect(b',')?;
                let d = self.small_integer()?;
                self.expect(b')')?;
                if s < 2 {
                    return Err(Error::domain(format!("L({s},{d}) requires s >= 2")));
                }
                if !special::is_odd_prime(u64::from(d)) {
                    return Err(Error::domain(format!("L({s},{d}) requires an odd prime modulus")));
                }
                Ok(ExactExpr::L(s, d))
            }
            "beta" => {
                self.expect(b'(')?;
                let s = self.small_integer()?;
                self.expect(b')')?;
                if s < 2 {
                    return Err(Error::domain(format!("beta({s}) requires s >= 2")));
                }
                Ok(ExactExpr::Beta(s))
            }
            _ => Err(Error::Syntax { offset: start, message: format!("unknown identifier '{name}'") }),
        }
    }
}

pub fn print_expr(e: &ExactExpr) -> String {
    let mut out = String::new();
    write_expr(e, 1, &mut out);
    out
}

fn write_expr(e: &ExactExpr, min_level: u8, out: &mut String) {
    let wrap = e.level() < min_level;
    if wrap {
        out.push('(');
    }
    match e {
        ExactExpr::Int(v) => out.push_str(&v.to_string()),
        ExactExpr::Neg(x) => {
            out.push('-');
            write_expr(x, 3, out);
        }
        ExactExpr::Add(a, b) | ExactExpr::Sub(a, b) => {
            write_expr(a, 1, out);
            out.push(if matches!(e, ExactExpr::Add(..)) { '+' } else { '-' });
            write_expr(b, 2, out);
        }
        ExactExpr::Mul(a, b) | ExactExpr::Div(a, b) => {
            write_expr(a, 2, out);
            out.push(if matches!(e, ExactExpr::Mul(..)) { '*' } else { '/' });
            write_expr(b, 3, out);
        }
        ExactExpr::Sqrt(x) => {
            out.push_str("sqrt(");
            write_expr(x, 1, out);
            out.push(')');
        }
        ExactExpr::Pi => out.push_str("pi"),
        ExactExpr::Zeta(k) => out.push_str(&format!("zeta({k})")),
        ExactExpr::L(s, d) => out.push_str(&format!("L({s},{d})")),
        ExactExpr::Beta(s) => out.push_str(&format!("beta({s})")),
    }
    if wrap {
        out.push(')');
    }
}

pub fn eval_expr(e: &ExactExpr, prec: u32) -> Result<Scalar> {
    if prec < crate::MIN_PRECISION {
        return Err(Error::Precision(prec));
    }
    let wide = eval_at(e, prec + GUARD_BITS)?;
    Ok(Scalar::from_float(Float::with_val(prec, wide)))
}

fn eval_at(e: &ExactExpr, wp: u32) -> Result<Float> {
    Ok(match e {
        ExactExpr::Int(v) => Float::with_val(wp, v),
        ExactExpr::Neg(x) => -eval_at(x, wp)?,
        ExactExpr::Add(a, b) => Float::with_val(wp, eval_at(a, wp)? + eval_at(b, wp)?),
        ExactExpr::Sub(a, b) => Float::with_val(wp, eval_at(a, wp)? - eval_at(b, wp)?),
        ExactExpr::Mul(a, b) => Float::with_val(wp, eval_at(a, wp)? * eval_at(b, wp)?),
        ExactExpr::Div(a, b) => {
            let den = eval_at(b, wp)?;
            if den.is_zero() {
                return Err(Error::Evaluation(format!("division by zero in '{}'", print_expr(e))));
            }
            Float::with_val(wp, eval_at(a, wp)? / den)
        }
        ExactExpr::Sqrt(x) => {
            let v = eval_at(x, wp)?;
            if v.is_sign_negative() && !v.is_zero() {
                return Err(Error::Evaluation(format!("square root of negative subexpression '{}'", print_expr(x))));
            }
            v.sqrt()
        }
        ExactExpr::Pi => Scalar::pi(wp).into_float(),
        ExactExpr::Zeta(k) => special::zeta(*k, wp)?.into_float(),
        ExactExpr::L(s, d) => special::dirichlet_l(*s, u64::from(*d), wp)?.into_float(),
        ExactExpr::Beta(s) => special::dirichlet_beta(*s, wp)?.into_float(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn approx(text: &str, expected: f64, rel: f64) {
        let v = parse_expr(text).unwrap().eval(128).unwrap().to_f64();
        assert!(((v - expected) / expected).abs() < rel, "{text}: {v} vs {expected}");
    }

    #[test]
    fn evaluates_table_constants() {
        approx("pi*pi*pi/777600", 3.98743e-5, 1e-5);
        approx("1/(38400*sqrt(2))", 1.84142e-5, 1e-5);
        approx("81/(4*sqrt(2)*pi*pi*pi)", 0.461806, 1e-5);
        assert_eq!(parse_expr("sqrt(4)").unwrap().eval(64).unwrap(), 2);
        assert_eq!(parse_expr("7").unwrap().eval(64).unwrap(), 7);
    }

    #[test]
    fn precedence() {
        assert_eq!(parse_expr("2+3*4").unwrap().eval(64).unwrap(), 14);
        assert_eq!(parse_expr("2-3-4").unwrap().eval(64).unwrap(), -5);
        assert_eq!(parse_expr("24/4/2").unwrap().eval(64).unwrap(), 3);
        assert_eq!(parse_expr("-2*3").unwrap().eval(64).unwrap(), -6);
        assert_eq!(parse_expr(" ( 1 + 2 ) * - 3 ").unwrap().eval(64).unwrap(), -9);
    }

    #[test]
    fn syntax_errors_carry_offsets() {
        match parse_expr("1+*2") {
            Err(Error::Syntax { offset, .. }) => assert_eq!(offset, 2),
            other => panic!("{other:?}"),
        }
        match parse_expr("sqrt(2") {
            Err(Error::Syntax { offset, .. }) => assert_eq!(offset, 6),
            other => panic!("{other:?}"),
        }
        assert!(matches!(parse_expr("foo(1)"), Err(Error::Syntax { offset: 0, .. })));
        assert!(matches!(parse_expr("1 2"), Err(Error::Syntax { offset: 2, .. })));
        assert!(matches!(parse_expr(""), Err(Error::Syntax { .. })));
    }

    #[test]
    fn domain_errors() {
        assert!(matches!(parse_expr("zeta(1)"), Err(Error::Domain(_))));
        assert!(matches!(parse_expr("L(4,9)"), Err(Error::Domain(_))));
        assert!(matches!(parse_expr("L(4,2)"), Err(Error::Domain(_))));
        assert!(matches!(parse_expr("beta(1)"), Err(Error::Domain(_))));
    }

    #[test]
    fn negative_sqrt_fails_at_evaluation() {
        let e = parse_expr("sqrt(1-2)").unwrap();
        assert!(matches!(e.eval(64), Err(Error::Evaluation(_))));
        assert!(matches!(parse_expr("1/(2-2)").unwrap().eval(64), Err(Error::Evaluation(_))));
    }

    #[test]
    fn printing_is_minimal() {
        for (src, printed) in [
            ("(pi*pi)*pi/777600", "pi*pi*pi/777600"),
            ("1/(38400*sqrt(2))", "1/(38400*sqrt(2))"),
            (" 527 * zeta( 5 )/ 22295347200", "527*zeta(5)/22295347200"),
        ] {
            assert_eq!(print_expr(&parse_expr(src).unwrap()), printed);
        }
        assert_eq!(print_expr(&parse_expr("1-(2-3)").unwrap()), "1-(2-3)");
        assert_eq!(print_expr(&parse_expr("-(1+2)").unwrap()), "-(1+2)");
        assert_eq!(print_expr(&parse_expr("2*-3").unwrap()), "2*-3");
        assert_eq!(print_expr(&parse_expr("-(2*3)").unwrap()), "-(2*3)");
    }

    #[test]
    fn large_literals() {
        let e = parse_expr("1/222953472000").unwrap();
        let v = e.eval(128).unwrap().to_f64();
        assert!((v * 222953472000.0 - 1.0).abs() < 1e-15);
    }
}
