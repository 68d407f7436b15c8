//! Exact multivariate rational functions over `Q`.
//!
//! Every [`RationalExpr`] lives over a [`VarSet`], an ordered list of
//! variable names shared by reference. Values are kept in canonical form:
//! numerator and denominator are coprime and the denominator's leading
//! coefficient (graded-lex order on the declared variable order) is one.
//! Two canonical values are equal iff they are structurally equal.

mod parse;
pub mod poly;

use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};
use std::sync::Arc;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

pub use parse::parse_expr;
pub use poly::{Monomial, Poly};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ExprError {
    #[error("zero denominator")]
    ZeroDenominator,
    #[error("unknown variable `{0}`")]
    UnknownVariable(String),
    #[error("syntax error at offset {pos}: {message}")]
    Syntax { pos: usize, message: String },
    #[error("denominator `{denominator}` vanishes at the evaluation point")]
    Pole { denominator: String },
    #[error("point does not assign variable `{0}`")]
    MissingValue(String),
}

/// Ordered, shared list of variable names.
#[derive(Clone, Debug)]
pub struct VarSet(Arc<Vec<String>>);

impl VarSet {
    pub fn new<S: Into<String>>(names: impl IntoIterator<Item = S>) -> Self {
        VarSet(Arc::new(names.into_iter().map(Into::into).collect()))
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn names(&self) -> &[String] {
        &self.0
    }

    pub fn name(&self, idx: usize) -> &str {
        &self.0[idx]
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.0.iter().position(|n| n == name)
    }

    pub fn var(&self, name: &str) -> Result<RationalExpr, ExprError> {
        let idx = self
            .index_of(name)
            .ok_or_else(|| ExprError::UnknownVariable(name.to_string()))?;
        Ok(RationalExpr::var(self, idx))
    }

    pub fn zero(&self) -> RationalExpr {
        RationalExpr::zero(self)
    }

    pub fn one(&self) -> RationalExpr {
        RationalExpr::one(self)
    }

    pub fn int(&self, n: i64) -> RationalExpr {
        RationalExpr::from_int(self, n)
    }

    pub fn parse(&self, text: &str) -> Result<RationalExpr, ExprError> {
        parse_expr(self, text)
    }
}

impl PartialEq for VarSet {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.0, &other.0) || self.0 == other.0
    }
}

impl Eq for VarSet {}

/// Canonical quotient of two polynomials.
#[derive(Clone)]
pub struct RationalExpr {
    vars: VarSet,
    num: Poly,
    den: Poly,
}

impl PartialEq for RationalExpr {
    fn eq(&self, other: &Self) -> bool {
        self.num == other.num && self.den == other.den && self.vars == other.vars
    }
}

impl Eq for RationalExpr {}

impl std::hash::Hash for RationalExpr {
    fn hash<H: std::hash::Hasher>(&self, state: &mut H) {
        self.num.hash(state);
        self.den.hash(state);
    }
}

impl RationalExpr {
    /// Builds `num / den` and normalizes it.
    pub fn new(vars: &VarSet, num: Poly, den: Poly) -> Result<Self, ExprError> {
        if den.is_zero() {
            return Err(ExprError::ZeroDenominator);
        }
        Ok(Self::normalized(vars.clone(), num, den))
    }

    fn normalized(vars: VarSet, num: Poly, den: Poly) -> Self {
        debug_assert_eq!(num.nvars(), vars.len());
        if num.is_zero() {
            let n = vars.len();
            return RationalExpr {
                vars,
                num: Poly::zero(n),
                den: Poly::one(n),
            };
        }
        let (num, den) = if den.is_constant() {
            (num, den)
        } else {
            let g = num.gcd(&den);
            if g.is_one() {
                (num, den)
            } else {
                (
                    num.div_exact(&g).expect("gcd divides numerator"),
                    den.div_exact(&g).expect("gcd divides denominator"),
                )
            }
        };
        let lc = den.leading_coeff();
        if lc.is_one() {
            RationalExpr { vars, num, den }
        } else {
            let inv = lc.recip();
            RationalExpr {
                vars,
                num: num.scale(&inv),
                den: den.scale(&inv),
            }
        }
    }

    /// Re-runs canonicalization. Values are always canonical, so this is the
    /// identity on anything built through the public API.
    pub fn normalize(&self) -> Self {
        Self::normalized(self.vars.clone(), self.num.clone(), self.den.clone())
    }

    pub fn from_poly(vars: &VarSet, num: Poly) -> Self {
        let n = vars.len();
        Self::normalized(vars.clone(), num, Poly::one(n))
    }

    pub fn zero(vars: &VarSet) -> Self {
        let n = vars.len();
        RationalExpr {
            vars: vars.clone(),
            num: Poly::zero(n),
            den: Poly::one(n),
        }
    }

    pub fn one(vars: &VarSet) -> Self {
        Self::constant(vars, BigRational::one())
    }

    pub fn constant(vars: &VarSet, c: BigRational) -> Self {
        let n = vars.len();
        RationalExpr {
            vars: vars.clone(),
            num: Poly::constant(n, c),
            den: Poly::one(n),
        }
    }

    pub fn from_int(vars: &VarSet, c: i64) -> Self {
        Self::constant(vars, BigRational::from_integer(BigInt::from(c)))
    }

    pub fn var(vars: &VarSet, idx: usize) -> Self {
        let n = vars.len();
        RationalExpr {
            vars: vars.clone(),
            num: Poly::var(n, idx),
            den: Poly::one(n),
        }
    }

    pub fn vars(&self) -> &VarSet {
        &self.vars
    }

    pub fn numerator(&self) -> &Poly {
        &self.num
    }

    pub fn denominator(&self) -> &Poly {
        &self.den
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.num.is_one() && self.den.is_one()
    }

    pub fn is_constant(&self) -> bool {
        self.num.is_constant() && self.den.is_constant()
    }

    pub fn is_polynomial(&self) -> bool {
        self.den.is_one()
    }

    pub fn constant_value(&self) -> Option<BigRational> {
        if self.den.is_one() {
            self.num.constant_value()
        } else {
            None
        }
    }

    pub fn depends_on(&self, var: usize) -> bool {
        self.num.depends_on(var) || self.den.depends_on(var)
    }

    /// Rough size measure used for pivot selection.
    pub fn weight(&self) -> usize {
        if self.is_constant() {
            return 0;
        }
        self.num.num_terms()
            + self.den.num_terms()
            + (self.num.total_degree() + self.den.total_degree()) as usize
    }

    fn check_same(&self, other: &Self) {
        assert!(
            self.vars == other.vars,
            "rational expressions over different variable sets"
        );
    }

    pub fn recip(&self) -> Result<Self, ExprError> {
        if self.is_zero() {
            return Err(ExprError::ZeroDenominator);
        }
        Ok(Self::normalized(self.vars.clone(), self.den.clone(), self.num.clone()))
    }

    pub fn checked_div(&self, other: &Self) -> Result<Self, ExprError> {
        Ok(self * &other.recip()?)
    }

    pub fn pow(&self, e: i32) -> Result<Self, ExprError> {
        if e >= 0 {
            let e = e as u32;
            Ok(RationalExpr {
                vars: self.vars.clone(),
                num: self.num.pow(e),
                den: self.den.pow(e),
            }
            .renormalize_sign())
        } else {
            self.recip()?.pow(-e)
        }
    }

    // Powers of a canonical pair stay coprime; only the scale may drift.
    fn renormalize_sign(self) -> Self {
        let lc = self.den.leading_coeff();
        if lc.is_one() {
            self
        } else {
            let inv = lc.recip();
            RationalExpr {
                vars: self.vars,
                num: self.num.scale(&inv),
                den: self.den.scale(&inv),
            }
        }
    }

    pub fn scale(&self, c: &BigRational) -> Self {
        if c.is_zero() {
            return Self::zero(&self.vars);
        }
        RationalExpr {
            vars: self.vars.clone(),
            num: self.num.scale(c),
            den: self.den.clone(),
        }
    }

    /// Exact partial derivative with respect to the variable at `var`.
    pub fn diff(&self, var: usize) -> Self {
        let dn = self.num.derivative(var);
        if self.den.is_constant() {
            return Self::normalized(self.vars.clone(), dn, self.den.clone());
        }
        let dd = self.den.derivative(var);
        if dd.is_zero() {
            return Self::normalized(self.vars.clone(), dn, self.den.clone());
        }
        let num = dn.mul(&self.den).sub(&self.num.mul(&dd));
        Self::normalized(self.vars.clone(), num, self.den.mul(&self.den))
    }

    /// Partial derivative by variable name.
    pub fn differentiate(&self, name: &str) -> Result<Self, ExprError> {
        let idx = self
            .vars
            .index_of(name)
            .ok_or_else(|| ExprError::UnknownVariable(name.to_string()))?;
        Ok(self.diff(idx))
    }

    /// Exact value at a point given as one rational per variable.
    pub fn eval(&self, point: &[BigRational]) -> Result<BigRational, ExprError> {
        assert_eq!(point.len(), self.vars.len());
        let d = self.den.eval(point);
        if d.is_zero() {
            return Err(ExprError::Pole {
                denominator: PolyDisplay::new(&self.den, &self.vars).to_string(),
            });
        }
        Ok(self.num.eval(point) / d)
    }

    /// Exact value at a point given by name.
    pub fn evaluate<'a>(
        &self,
        point: impl IntoIterator<Item = (&'a str, BigRational)>,
    ) -> Result<BigRational, ExprError> {
        let mut values: Vec<Option<BigRational>> = vec![None; self.vars.len()];
        for (name, v) in point {
            let idx = self
                .vars
                .index_of(name)
                .ok_or_else(|| ExprError::UnknownVariable(name.to_string()))?;
            values[idx] = Some(v);
        }
        let mut full = Vec::with_capacity(values.len());
        for (i, v) in values.into_iter().enumerate() {
            match v {
                Some(v) => full.push(v),
                None if !self.depends_on(i) => full.push(BigRational::zero()),
                None => return Err(ExprError::MissingValue(self.vars.name(i).to_string())),
            }
        }
        self.eval(&full)
    }

    /// Sets the listed variables to zero.
    pub fn zero_vars(&self, vars: &[usize]) -> Result<Self, ExprError> {
        if vars.iter().all(|&v| !self.depends_on(v)) {
            return Ok(self.clone());
        }
        let den = self.den.zero_vars(vars);
        if den.is_zero() {
            return Err(ExprError::Pole {
                denominator: PolyDisplay::new(&self.den, &self.vars).to_string(),
            });
        }
        Ok(Self::normalized(self.vars.clone(), self.num.zero_vars(vars), den))
    }

    /// Replaces every variable `i` by `images[i]`; the result lives over the
    /// variable set of the images.
    pub fn substitute(&self, target: &VarSet, images: &[RationalExpr]) -> Result<Self, ExprError> {
        assert_eq!(images.len(), self.vars.len());
        let num = substitute_poly(&self.num, target, images);
        let den = substitute_poly(&self.den, target, images);
        num.checked_div(&den)
    }

    /// Moves the expression onto another variable set that contains all of
    /// the variables it depends on (matched by name).
    pub fn rebase(&self, target: &VarSet) -> Result<Self, ExprError> {
        let images = self
            .vars
            .names()
            .iter()
            .enumerate()
            .map(|(i, n)| match target.index_of(n) {
                Some(j) => Ok(RationalExpr::var(target, j)),
                None if !self.depends_on(i) => Ok(RationalExpr::zero(target)),
                None => Err(ExprError::UnknownVariable(n.clone())),
            })
            .collect::<Result<Vec<_>, _>>()?;
        self.substitute(target, &images)
    }
}

fn substitute_poly(p: &Poly, target: &VarSet, images: &[RationalExpr]) -> RationalExpr {
    let mut acc = RationalExpr::zero(target);
    let mut cache: std::collections::HashMap<(usize, u32), RationalExpr> = Default::default();
    for (m, c) in p.terms() {
        let mut t = RationalExpr::constant(target, c.clone());
        for (v, &e) in m.exponents().iter().enumerate() {
            if e == 0 {
                continue;
            }
            let pw = cache
                .entry((v, e))
                .or_insert_with(|| images[v].pow(e as i32).expect("non-negative power"))
                .clone();
            t = &t * &pw;
        }
        acc = &acc + &t;
    }
    acc
}

impl<'a> Add<&'a RationalExpr> for &'a RationalExpr {
    type Output = RationalExpr;
    fn add(self, rhs: &'a RationalExpr) -> RationalExpr {
        self.check_same(rhs);
        if rhs.is_zero() {
            return self.clone();
        }
        if self.is_zero() {
            return rhs.clone();
        }
        if self.den == rhs.den {
            return RationalExpr::normalized(self.vars.clone(), self.num.add(&rhs.num), self.den.clone());
        }
        let g = self.den.gcd(&rhs.den);
        let a = rhs.den.div_exact(&g).expect("gcd divides");
        let b = self.den.div_exact(&g).expect("gcd divides");
        let num = self.num.mul(&a).add(&rhs.num.mul(&b));
        RationalExpr::normalized(self.vars.clone(), num, self.den.mul(&a))
    }
}

impl<'a> Sub<&'a RationalExpr> for &'a RationalExpr {
    type Output = RationalExpr;
    fn sub(self, rhs: &'a RationalExpr) -> RationalExpr {
        self + &(-rhs)
    }
}

impl<'a> Mul<&'a RationalExpr> for &'a RationalExpr {
    type Output = RationalExpr;
    fn mul(self, rhs: &'a RationalExpr) -> RationalExpr {
        self.check_same(rhs);
        if self.is_zero() || rhs.is_zero() {
            return RationalExpr::zero(&self.vars);
        }
        if self.den.is_one() && rhs.den.is_one() {
            return RationalExpr {
                vars: self.vars.clone(),
                num: self.num.mul(&rhs.num),
                den: self.den.clone(),
            };
        }
        let g1 = self.num.gcd(&rhs.den);
        let g2 = rhs.num.gcd(&self.den);
        let n1 = self.num.div_exact(&g1).expect("gcd divides");
        let d2 = rhs.den.div_exact(&g1).expect("gcd divides");
        let n2 = rhs.num.div_exact(&g2).expect("gcd divides");
        let d1 = self.den.div_exact(&g2).expect("gcd divides");
        RationalExpr {
            vars: self.vars.clone(),
            num: n1.mul(&n2),
            den: d1.mul(&d2),
        }
        .renormalize_sign()
    }
}

impl<'a> Div<&'a RationalExpr> for &'a RationalExpr {
    type Output = RationalExpr;
    /// Panics on division by zero; use [`RationalExpr::checked_div`] otherwise.
    fn div(self, rhs: &'a RationalExpr) -> RationalExpr {
        self.checked_div(rhs).expect("division by zero rational expression")
    }
}

impl Neg for &RationalExpr {
    type Output = RationalExpr;
    fn neg(self) -> RationalExpr {
        RationalExpr {
            vars: self.vars.clone(),
            num: self.num.neg(),
            den: self.den.clone(),
        }
    }
}

macro_rules! forward_owned {
    ($tr:ident, $m:ident) => {
        impl $tr<RationalExpr> for RationalExpr {
            type Output = RationalExpr;
            fn $m(self, rhs: RationalExpr) -> RationalExpr {
                (&self).$m(&rhs)
            }
        }
        impl<'a> $tr<&'a RationalExpr> for RationalExpr {
            type Output = RationalExpr;
            fn $m(self, rhs: &'a RationalExpr) -> RationalExpr {
                (&self).$m(rhs)
            }
        }
        impl<'a> $tr<RationalExpr> for &'a RationalExpr {
            type Output = RationalExpr;
            fn $m(self, rhs: RationalExpr) -> RationalExpr {
                self.$m(&rhs)
            }
        }
    };
}

forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);
forward_owned!(Div, div);

impl Neg for RationalExpr {
    type Output = RationalExpr;
    fn neg(self) -> RationalExpr {
        -&self
    }
}

/// Prints a polynomial in the expression grammar.
pub struct PolyDisplay<'a> {
    poly: &'a Poly,
    vars: &'a VarSet,
}

impl<'a> PolyDisplay<'a> {
    pub fn new(poly: &'a Poly, vars: &'a VarSet) -> Self {
        PolyDisplay { poly, vars }
    }
}

fn fmt_rational(q: &BigRational, f: &mut fmt::Formatter<'_>) -> fmt::Result {
    if q.denom().is_one() {
        write!(f, "{}", q.numer())
    } else {
        write!(f, "{}/{}", q.numer(), q.denom())
    }
}

impl fmt::Display for PolyDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.poly.is_zero() {
            return write!(f, "0");
        }
        for (k, (m, c)) in self.poly.terms().rev().enumerate() {
            let neg = c.is_negative();
            let abs = c.abs();
            match (k, neg) {
                (0, true) => write!(f, "-")?,
                (0, false) => {}
                (_, true) => write!(f, " - ")?,
                (_, false) => write!(f, " + ")?,
            }
            if m.is_one() {
                fmt_rational(&abs, f)?;
                continue;
            }
            if !abs.is_one() {
                fmt_rational(&abs, f)?;
                write!(f, "*")?;
            }
            let mut first = true;
            for (v, &e) in m.exponents().iter().enumerate() {
                if e == 0 {
                    continue;
                }
                if !first {
                    write!(f, "*")?;
                }
                first = false;
                write!(f, "{}", self.vars.name(v))?;
                if e > 1 {
                    write!(f, "^{e}")?;
                }
            }
        }
        Ok(())
    }
}

impl fmt::Debug for RationalExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "`{self}`")
    }
}

impl fmt::Display for RationalExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let num = PolyDisplay::new(&self.num, &self.vars);
        if self.den.is_one() {
            return write!(f, "{num}");
        }
        if self.num.num_terms() > 1 {
            write!(f, "({num})")?;
        } else {
            write!(f, "{num}")?;
        }
        let den = PolyDisplay::new(&self.den, &self.vars);
        let bare = self.den.num_terms() == 1
            && self.den.leading_coeff().is_one()
            && self
                .den
                .leading()
                .is_some_and(|(m, _)| m.exponents().iter().filter(|&&e| e > 0).count() == 1);
        if bare {
            write!(f, "/{den}")
        } else {
            write!(f, "/({den})")
        }
    }
}

/// Parses a rational written as `p`, `p/q` or a decimal literal.
pub fn parse_rational(text: &str) -> Option<BigRational> {
    let text = text.trim();
    if let Some((a, b)) = text.split_once('/') {
        let n: BigInt = a.trim().parse().ok()?;
        let d: BigInt = b.trim().parse().ok()?;
        if d.is_zero() {
            return None;
        }
        return Some(BigRational::new(n, d));
    }
    parse::decimal(text)
}
