//! Recursive-descent parser for the expression grammar:
//!
//! ```text
//! expr   := term (('+'|'-') term)*
//! term   := factor (('*'|'/') factor)*
//! factor := base ('^' integer)?
//! base   := rational | identifier | '(' expr ')' | '-' factor
//! ```

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;

use super::{ExprError, RationalExpr, VarSet};

pub fn parse_expr(vars: &VarSet, text: &str) -> Result<RationalExpr, ExprError> {
    let mut p = Parser {
        chars: text.char_indices().collect(),
        pos: 0,
        len: text.len(),
        vars,
    };
    let e = p.expr()?;
    p.skip_ws();
    if let Some(&(off, c)) = p.chars.get(p.pos) {
        return Err(syntax(off, format!("unexpected `{c}`")));
    }
    Ok(e)
}

pub(super) fn decimal(text: &str) -> Option<BigRational> {
    let (int, frac) = match text.split_once('.') {
        Some((a, b)) => (a, b),
        None => (text, ""),
    };
    if int.is_empty() && frac.is_empty() {
        return None;
    }
    if !int.chars().all(|c| c.is_ascii_digit()) || !frac.chars().all(|c| c.is_ascii_digit()) {
        return None;
    }
    let digits = format!("{int}{frac}");
    let n: BigInt = if digits.is_empty() { BigInt::zero() } else { digits.parse().ok()? };
    let d = num_traits::pow(BigInt::from(10), frac.len());
    Some(BigRational::new(n, d))
}

fn syntax(pos: usize, message: impl Into<String>) -> ExprError {
    ExprError::Syntax {
        pos,
        message: message.into(),
    }
}

struct Parser<'a> {
    chars: Vec<(usize, char)>,
    pos: usize,
    len: usize,
    vars: &'a VarSet,
}

impl Parser<'_> {
    fn skip_ws(&mut self) {
        while self.chars.get(self.pos).is_some_and(|(_, c)| c.is_whitespace()) {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<char> {
        self.skip_ws();
        self.chars.get(self.pos).map(|&(_, c)| c)
    }

    fn offset(&self) -> usize {
        self.chars.get(self.pos).map(|&(o, _)| o).unwrap_or(self.len)
    }

    fn expr(&mut self) -> Result<RationalExpr, ExprError> {
        let mut acc = self.term()?;
        while let Some(c) = self.peek() {
            match c {
                '+' => {
                    self.pos += 1;
                    acc = &acc + &self.term()?;
                }
                '-' => {
                    self.pos += 1;
                    acc = &acc - &self.term()?;
                }
                _ => break,
            }
        }
        Ok(acc)
    }

    fn term(&mut self) -> Result<RationalExpr, ExprError> {
        let mut acc = self.factor()?;
        while let Some(c) = self.peek() {
            match c {
                '*' => {
                    self.pos += 1;
                    acc = &acc * &self.factor()?;
                }
                '/' => {
                    self.pos += 1;
                    let at = self.offset();
                    let rhs = self.factor()?;
                    acc = acc
                        .checked_div(&rhs)
                        .map_err(|_| syntax(at, "division by zero"))?;
                }
                _ => break,
            }
        }
        Ok(acc)
    }

    fn factor(&mut self) -> Result<RationalExpr, ExprError> {
        let base = self.base()?;
        if self.peek() == Some('^') {
            self.pos += 1;
            let at = self.offset();
            let e = self.integer()?;
            return base
                .pow(e)
                .map_err(|_| syntax(at, "negative power of zero"));
        }
        Ok(base)
    }

    fn integer(&mut self) -> Result<i32, ExprError> {
        let start = self.offset();
        let mut neg = false;
        if self.peek() == Some('-') {
            neg = true;
            self.pos += 1;
        }
        let mut digits = String::new();
        while let Some(&(_, c)) = self.chars.get(self.pos) {
            if c.is_ascii_digit() {
                digits.push(c);
                self.pos += 1;
            } else {
                break;
            }
        }
        if digits.is_empty() {
            return Err(syntax(start, "expected integer exponent"));
        }
        let v: i32 = digits
            .parse()
            .map_err(|_| syntax(start, "exponent out of range"))?;
        Ok(if neg { -v } else { v })
    }

    fn base(&mut self) -> Result<RationalExpr, ExprError> {
        let next = self.peek();
        let at = self.offset();
        match next {
            None => Err(syntax(at, "unexpected end of input")),
            Some('(') => {
                self.pos += 1;
                let e = self.expr()?;
                if self.peek() != Some(')') {
                    return Err(syntax(self.offset(), "expected `)`"));
                }
                self.pos += 1;
                Ok(e)
            }
            Some('-') => {
                self.pos += 1;
                Ok(-self.factor()?)
            }
            Some(c) if c.is_ascii_digit() || c == '.' => {
                let mut lit = String::new();
                while let Some(&(_, c)) = self.chars.get(self.pos) {
                    if c.is_ascii_digit() || c == '.' {
                        lit.push(c);
                        self.pos += 1;
                    } else {
                        break;
                    }
                }
                let q = decimal(&lit).ok_or_else(|| syntax(at, format!("bad number `{lit}`")))?;
                Ok(RationalExpr::constant(self.vars, q))
            }
            Some(c) if c.is_alphabetic() || c == '_' => {
                let mut name = String::new();
                while let Some(&(_, c)) = self.chars.get(self.pos) {
                    if c.is_alphanumeric() || c == '_' {
                        name.push(c);
                        self.pos += 1;
                    } else {
                        break;
                    }
                }
                self.vars.var(&name)
            }
            Some(c) => Err(syntax(at, format!("unexpected `{c}`"))),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_coordinates_and_quotients() {
        let v = VarSet::new(["x", "y", "z"]);
        assert_eq!(parse_expr(&v, "z").unwrap(), RationalExpr::var(&v, 2));
        let w = VarSet::new(["x1", "x2", "x3"]);
        let e = parse_expr(&w, "x3/x1").unwrap();
        assert_eq!(e.to_string(), "x3/x1");
    }

    #[test]
    fn expands_powers() {
        let v = VarSet::new(["x1", "x2"]);
        let e = parse_expr(&v, "x1*(x2+3)^2").unwrap();
        let expanded = parse_expr(&v, "x1*x2^2 + 6*x1*x2 + 9*x1").unwrap();
        assert_eq!(e, expanded);
        assert_eq!(e.to_string(), "x1*x2^2 + 6*x1*x2 + 9*x1");
    }

    #[test]
    fn unary_minus_binds_below_power() {
        let v = VarSet::new(["x"]);
        assert_eq!(parse_expr(&v, "-x^2").unwrap(), parse_expr(&v, "-(x^2)").unwrap());
        assert_eq!(parse_expr(&v, "2^-1").unwrap().to_string(), "1/2");
        assert_eq!(parse_expr(&v, "0.25*x").unwrap().to_string(), "1/4*x");
    }

    #[test]
    fn reports_positions() {
        let v = VarSet::new(["x", "y"]);
        match parse_expr(&v, "x + * y") {
            Err(ExprError::Syntax { pos, .. }) => assert_eq!(pos, 4),
            other => panic!("{other:?}"),
        }
        match parse_expr(&v, "(x + y") {
            Err(ExprError::Syntax { pos, .. }) => assert_eq!(pos, 6),
            other => panic!("{other:?}"),
        }
        assert_eq!(
            parse_expr(&v, "x + w"),
            Err(ExprError::UnknownVariable("w".into()))
        );
        assert!(parse_expr(&v, "x y").is_err());
    }

    #[test]
    fn unicode_identifiers() {
        let v = VarSet::new(["λ", "y1"]);
        let e = parse_expr(&v, "λ*y1").unwrap();
        assert_eq!(e.to_string(), "λ*y1");
    }
}
