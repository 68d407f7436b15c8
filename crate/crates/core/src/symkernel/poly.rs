//! Sparse multivariate polynomials over the rationals.

use std::cmp::Ordering;
use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

/// Exponent vector, ordered graded-lexicographically.
///
/// The first variable is the most significant one in the lexicographic
/// tie-break, so `x0 > x1 > ... ` among monomials of equal degree.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct Monomial(Box<[u32]>);

impl Monomial {
    pub fn one(nvars: usize) -> Self {
        Monomial(vec![0; nvars].into_boxed_slice())
    }

    pub fn var(nvars: usize, idx: usize, exp: u32) -> Self {
        let mut e = vec![0; nvars];
        e[idx] = exp;
        Monomial(e.into_boxed_slice())
    }

    pub fn from_exponents(exps: Vec<u32>) -> Self {
        Monomial(exps.into_boxed_slice())
    }

    pub fn exponents(&self) -> &[u32] {
        &self.0
    }

    pub fn degree(&self) -> u32 {
        self.0.iter().sum()
    }

    pub fn is_one(&self) -> bool {
        self.0.iter().all(|&e| e == 0)
    }

    fn mul(&self, other: &Monomial) -> Monomial {
        Monomial(self.0.iter().zip(other.0.iter()).map(|(a, b)| a + b).collect())
    }

    fn divides(&self, other: &Monomial) -> bool {
        self.0.iter().zip(other.0.iter()).all(|(a, b)| a <= b)
    }

    fn div(&self, other: &Monomial) -> Monomial {
        Monomial(self.0.iter().zip(other.0.iter()).map(|(a, b)| a - b).collect())
    }

    fn gcd(&self, other: &Monomial) -> Monomial {
        Monomial(self.0.iter().zip(other.0.iter()).map(|(a, b)| *a.min(b)).collect())
    }
}

impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> Ordering {
        self.degree()
            .cmp(&other.degree())
            .then_with(|| self.0.cmp(&other.0))
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// A polynomial in a fixed number of variables with `BigRational`
/// coefficients. Zero coefficients are never stored.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct Poly {
    nvars: usize,
    terms: BTreeMap<Monomial, BigRational>,
}

impl Poly {
    pub fn zero(nvars: usize) -> Self {
        Poly {
            nvars,
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(nvars: usize, c: BigRational) -> Self {
        let mut p = Poly::zero(nvars);
        if !c.is_zero() {
            p.terms.insert(Monomial::one(nvars), c);
        }
        p
    }

    pub fn one(nvars: usize) -> Self {
        Poly::constant(nvars, BigRational::one())
    }

    pub fn var(nvars: usize, idx: usize) -> Self {
        Poly::monomial(nvars, Monomial::var(nvars, idx, 1), BigRational::one())
    }

    pub fn monomial(nvars: usize, m: Monomial, c: BigRational) -> Self {
        let mut p = Poly::zero(nvars);
        if !c.is_zero() {
            p.terms.insert(m, c);
        }
        p
    }

    pub fn from_terms(nvars: usize, terms: impl IntoIterator<Item = (Monomial, BigRational)>) -> Self {
        let mut p = Poly::zero(nvars);
        for (m, c) in terms {
            p.add_term(m, c);
        }
        p
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.constant_value().is_some_and(|c| c.is_one())
    }

    pub fn is_constant(&self) -> bool {
        self.terms.is_empty() || (self.terms.len() == 1 && self.terms.keys().next().unwrap().is_one())
    }

    /// The constant value if the polynomial has no variables.
    pub fn constant_value(&self) -> Option<BigRational> {
        if self.terms.is_empty() {
            Some(BigRational::zero())
        } else if self.is_constant() {
            self.terms.values().next().cloned()
        } else {
            None
        }
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn terms(&self) -> impl DoubleEndedIterator<Item = (&Monomial, &BigRational)> {
        self.terms.iter()
    }

    /// Leading term under graded-lex order.
    pub fn leading(&self) -> Option<(&Monomial, &BigRational)> {
        self.terms.iter().next_back()
    }

    pub fn leading_coeff(&self) -> BigRational {
        self.leading().map(|(_, c)| c.clone()).unwrap_or_else(BigRational::zero)
    }

    pub fn total_degree(&self) -> u32 {
        self.terms.keys().map(Monomial::degree).max().unwrap_or(0)
    }

    pub fn degree_in(&self, var: usize) -> u32 {
        self.terms.keys().map(|m| m.0[var]).max().unwrap_or(0)
    }

    pub fn depends_on(&self, var: usize) -> bool {
        self.terms.keys().any(|m| m.0[var] > 0)
    }

    fn add_term(&mut self, m: Monomial, c: BigRational) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(m) {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                *o.get_mut() += c;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    pub fn add(&self, other: &Poly) -> Poly {
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), c.clone());
        }
        out
    }

    pub fn sub(&self, other: &Poly) -> Poly {
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), -c.clone());
        }
        out
    }

    pub fn neg(&self) -> Poly {
        Poly {
            nvars: self.nvars,
            terms: self.terms.iter().map(|(m, c)| (m.clone(), -c.clone())).collect(),
        }
    }

    pub fn scale(&self, s: &BigRational) -> Poly {
        if s.is_zero() {
            return Poly::zero(self.nvars);
        }
        Poly {
            nvars: self.nvars,
            terms: self.terms.iter().map(|(m, c)| (m.clone(), c * s)).collect(),
        }
    }

    pub fn mul(&self, other: &Poly) -> Poly {
        let mut out = Poly::zero(self.nvars);
        for (m1, c1) in &self.terms {
            for (m2, c2) in &other.terms {
                out.add_term(m1.mul(m2), c1 * c2);
            }
        }
        out
    }

    fn mul_term(&self, m: &Monomial, c: &BigRational) -> Poly {
        Poly {
            nvars: self.nvars,
            terms: self.terms.iter().map(|(k, v)| (k.mul(m), v * c)).collect(),
        }
    }

    pub fn pow(&self, mut e: u32) -> Poly {
        let mut base = self.clone();
        let mut acc = Poly::one(self.nvars);
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base);
            }
            e >>= 1;
            if e > 0 {
                base = base.mul(&base);
            }
        }
        acc
    }

    pub fn derivative(&self, var: usize) -> Poly {
        let mut out = Poly::zero(self.nvars);
        for (m, c) in &self.terms {
            let e = m.0[var];
            if e == 0 {
                continue;
            }
            let mut exps = m.0.clone();
            exps[var] -= 1;
            out.add_term(Monomial(exps), c * BigRational::from_integer(BigInt::from(e)));
        }
        out
    }

    /// Exact evaluation at a full point.
    pub fn eval(&self, point: &[BigRational]) -> BigRational {
        let mut acc = BigRational::zero();
        for (m, c) in &self.terms {
            let mut t = c.clone();
            for (v, &e) in m.0.iter().enumerate() {
                if e > 0 {
                    t *= num_traits::pow(point[v].clone(), e as usize);
                }
            }
            acc += t;
        }
        acc
    }

    /// Sets the listed variables to zero.
    pub fn zero_vars(&self, vars: &[usize]) -> Poly {
        Poly {
            nvars: self.nvars,
            terms: self
                .terms
                .iter()
                .filter(|(m, _)| vars.iter().all(|&v| m.0[v] == 0))
                .map(|(m, c)| (m.clone(), c.clone()))
                .collect(),
        }
    }

    /// Coefficients with respect to `var`: `self = sum_k out[k] * var^k`.
    pub fn coeffs_in(&self, var: usize) -> Vec<Poly> {
        let deg = self.degree_in(var) as usize;
        let mut out = vec![Poly::zero(self.nvars); deg + 1];
        for (m, c) in &self.terms {
            let k = m.0[var] as usize;
            let mut exps = m.0.clone();
            exps[var] = 0;
            out[k].add_term(Monomial(exps), c.clone());
        }
        out
    }

    fn from_coeffs(nvars: usize, var: usize, coeffs: &[Poly]) -> Poly {
        let mut out = Poly::zero(nvars);
        for (k, p) in coeffs.iter().enumerate() {
            for (m, c) in &p.terms {
                let mut exps = m.0.clone();
                exps[var] += k as u32;
                out.add_term(Monomial(exps), c.clone());
            }
        }
        out
    }

    /// Exact division; `None` if `d` does not divide `self`.
    pub fn div_exact(&self, d: &Poly) -> Option<Poly> {
        assert!(!d.is_zero(), "division by the zero polynomial");
        if let Some(c) = d.constant_value() {
            return Some(self.scale(&c.recip()));
        }
        let (lm, lc) = d.leading().map(|(m, c)| (m.clone(), c.clone())).unwrap();
        let mut rem = self.clone();
        let mut quot = Poly::zero(self.nvars);
        while let Some((rm, rc)) = rem.leading().map(|(m, c)| (m.clone(), c.clone())) {
            if !lm.divides(&rm) {
                return None;
            }
            let qm = rm.div(&lm);
            let qc = rc / &lc;
            rem = rem.sub(&d.mul_term(&qm, &qc));
            quot.add_term(qm, qc);
        }
        Some(quot)
    }

    /// Scales so the leading coefficient is one; zero stays zero.
    pub fn monic(&self) -> Poly {
        if self.is_zero() {
            return self.clone();
        }
        self.scale(&self.leading_coeff().recip())
    }

    fn single_monomial(&self) -> Option<&Monomial> {
        if self.terms.len() == 1 {
            self.terms.keys().next()
        } else {
            None
        }
    }

    fn monomial_gcd_with(&self, m: &Monomial) -> Monomial {
        self.terms.keys().fold(m.clone(), |acc, k| acc.gcd(k))
    }

    /// Monic greatest common divisor over `Q[x...]`.
    pub fn gcd(&self, other: &Poly) -> Poly {
        if self.is_zero() {
            return other.monic();
        }
        if other.is_zero() {
            return self.monic();
        }
        if self.is_constant() || other.is_constant() {
            return Poly::one(self.nvars);
        }
        if let Some(m) = self.single_monomial() {
            return Poly::monomial(self.nvars, other.monomial_gcd_with(m), BigRational::one());
        }
        if let Some(m) = other.single_monomial() {
            return Poly::monomial(self.nvars, self.monomial_gcd_with(m), BigRational::one());
        }
        let vars: Vec<usize> = (0..self.nvars).filter(|&v| self.depends_on(v) || other.depends_on(v)).collect();
        if let Some(g) = heu_gcd(&self.integer_primitive(), &other.integer_primitive(), &vars) {
            return g.monic();
        }
        let var = vars[0];
        if !self.depends_on(var) {
            return self.gcd(&other.content_in(var));
        }
        if !other.depends_on(var) {
            return other.gcd(&self.content_in(var));
        }
        let ca = self.content_in(var);
        let cb = other.content_in(var);
        let pa = self.div_exact(&ca).expect("content divides");
        let pb = other.div_exact(&cb).expect("content divides");
        let c = ca.gcd(&cb);
        let g = prs_gcd(pa, pb, var);
        c.mul(&g).monic()
    }

    /// Monic gcd of the coefficients with respect to `var`.
    pub fn content_in(&self, var: usize) -> Poly {
        let mut acc = Poly::zero(self.nvars);
        for c in self.coeffs_in(var) {
            if c.is_zero() {
                continue;
            }
            acc = acc.gcd(&c);
            if acc.is_one() {
                break;
            }
        }
        acc
    }

    fn primitive_in(&self, var: usize) -> Poly {
        let c = self.content_in(var);
        self.div_exact(&c).expect("content divides").monic()
    }
}

impl Poly {
    /// Positive multiple with coprime integer coefficients.
    fn integer_primitive(&self) -> Poly {
        let den = self.terms.values().fold(BigInt::one(), |acc, c| acc.lcm(c.denom()));
        let scaled: Vec<BigInt> = self.terms.values().map(|c| (c * BigRational::from_integer(den.clone())).to_integer()).collect();
        let mut g = scaled.iter().fold(BigInt::zero(), |acc, c| acc.gcd(c));
        if self.leading_coeff().is_negative() {
            g = -g;
        }
        Poly {
            nvars: self.nvars,
            terms: self.terms.keys().cloned().zip(scaled.into_iter().map(|c| BigRational::from_integer(c / &g))).collect(),
        }
    }

    fn max_norm(&self) -> BigInt {
        self.terms.values().map(|c| c.numer().abs()).max().unwrap_or_default()
    }

    fn eval_var_int(&self, var: usize, x: &BigInt) -> Poly {
        let mut out = Poly::zero(self.nvars);
        for (m, c) in &self.terms {
            let mut exps = m.0.clone();
            let e = exps[var];
            exps[var] = 0;
            out.add_term(Monomial(exps), c * BigRational::from_integer(num_traits::pow(x.clone(), e as usize)));
        }
        out
    }
}

/// Heuristic gcd of integer polynomials: evaluate the last variable at a
/// large integer, recurse, and read the gcd back off the balanced base-`xi`
/// digits. A candidate is returned only if it divides both inputs, which
/// makes it the gcd up to a constant. `None` when no trial succeeds.
fn heu_gcd(a: &Poly, b: &Poly, vars: &[usize]) -> Option<Poly> {
    let nv = a.nvars;
    let content = |p: &Poly| p.terms.values().fold(BigInt::zero(), |acc, c| acc.gcd(c.numer()));
    let common = content(a).gcd(&content(b));
    let Some((&v, rest)) = vars.split_last() else {
        return Some(Poly::constant(nv, BigRational::from_integer(common)));
    };
    let inv = BigRational::new(BigInt::one(), common.clone());
    let (a, b) = (a.scale(&inv), b.scale(&inv));
    let mut xi = BigInt::from(2) * a.max_norm().min(b.max_norm()) + BigInt::from(29);
    for _ in 0..6 {
        let (ea, eb) = (a.eval_var_int(v, &xi), b.eval_var_int(v, &xi));
        if !ea.is_zero() && !eb.is_zero() {
            let h = heu_gcd(&ea, &eb, rest)?;
            let g = interpolate(h, v, &xi);
            if !g.is_zero() {
                let g = g.integer_primitive();
                if a.div_exact(&g).is_some() && b.div_exact(&g).is_some() {
                    return Some(g.scale(&BigRational::from_integer(common)));
                }
            }
        }
        xi = xi * BigInt::from(73794) / BigInt::from(27011);
    }
    None
}

/// Reconstructs `sum_i g_i v^i` from `h = sum_i g_i xi^i` with balanced digits.
fn interpolate(mut h: Poly, v: usize, xi: &BigInt) -> Poly {
    let nv = h.nvars;
    let half = xi / BigInt::from(2);
    let mut out = Poly::zero(nv);
    let mut i = 0u32;
    while !h.is_zero() {
        let mut digit = Poly::zero(nv);
        for (m, c) in &h.terms {
            let mut r = c.numer().mod_floor(xi);
            if r > half {
                r -= xi;
            }
            if !r.is_zero() {
                digit.add_term(m.clone(), BigRational::from_integer(r));
            }
        }
        h = h.sub(&digit).scale(&BigRational::new(BigInt::one(), xi.clone()));
        for (m, c) in digit.terms {
            let mut exps = m.0;
            exps[v] += i;
            out.add_term(Monomial(exps), c);
        }
        i += 1;
    }
    out
}

/// Pseudo-remainder of `a` by `b` viewed as univariate in `var`.
fn prem(a: &Poly, b: &Poly, var: usize) -> Poly {
    let nv = a.nvars;
    let bc = b.coeffs_in(var);
    let db = bc.len() - 1;
    let lcb = bc[db].clone();
    let mut r = a.coeffs_in(var);
    while r.len() > db && !r.is_empty() {
        let dr = r.len() - 1;
        let lcr = r[dr].clone();
        if lcr.is_zero() {
            r.pop();
            continue;
        }
        let shift = dr - db;
        let mut next: Vec<Poly> = r.iter().map(|c| c.mul(&lcb)).collect();
        for (k, bk) in bc.iter().enumerate() {
            next[k + shift] = next[k + shift].sub(&bk.mul(&lcr));
        }
        next.pop();
        while next.last().is_some_and(Poly::is_zero) {
            next.pop();
        }
        r = next;
    }
    Poly::from_coeffs(nv, var, &r)
}

/// Primitive polynomial remainder sequence gcd for inputs primitive in `var`.
fn prs_gcd(mut a: Poly, mut b: Poly, var: usize) -> Poly {
    if a.degree_in(var) < b.degree_in(var) {
        std::mem::swap(&mut a, &mut b);
    }
    loop {
        let r = prem(&a, &b, var);
        if r.is_zero() {
            return b.primitive_in(var);
        }
        if r.degree_in(var) == 0 {
            return Poly::one(a.nvars);
        }
        a = b;
        b = r.primitive_in(var);
    }
}
