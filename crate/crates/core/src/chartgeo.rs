//! Poisson geometry in a single coordinate chart.
//!
//! Sign conventions: a bivector is stored as the antisymmetric matrix
//! `pi[i][j]` with `pi[i][j]` the coefficient of `d_i ^ d_j` for `i < j`, and
//! `{f, g} = sum_ij pi[i][j] d_i f d_j g`. The sharp map is
//! `(sharp a)^j = sum_i pi[i][j] a_i`, so `sharp df = {f, .}`. A symplectic
//! form `omega` corresponds to the bivector `-omega^{-1}`, which makes
//! `dx ^ dy` and `d/dx ^ d/dy` the same structure.

use std::collections::BTreeMap;
use std::sync::Arc;

use thiserror::Error;

use crate::sublinalg::matrix::{self, dot, DegeneracyReport, Row};
use crate::symkernel::{ExprError, RationalExpr, VarSet};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GeoError {
    #[error("invalid chart: {0}")]
    InvalidChart(String),
    #[error("objects live on different charts")]
    ChartMismatch,
    #[error("expression is not over the chart's variables")]
    VariableMismatch,
    #[error("expected {expected} components, found {found}")]
    Dimension { expected: usize, found: usize },
    #[error("matrix is not antisymmetric at ({0}, {1})")]
    NotAntisymmetric(usize, usize),
    #[error("symplectic form is degenerate")]
    Degenerate,
    #[error(transparent)]
    Expr(#[from] ExprError),
}

/// Ordered coordinates, as indices into a shared variable set. Variables
/// that are not coordinates act as constant parameters.
#[derive(Clone, Debug)]
pub struct Chart {
    vars: VarSet,
    coords: Arc<Vec<usize>>,
}

impl PartialEq for Chart {
    fn eq(&self, other: &Self) -> bool {
        self.vars == other.vars && self.coords == other.coords
    }
}

impl Eq for Chart {}

impl Chart {
    /// A chart whose variable set is `coords` followed by `params`.
    pub fn new<S: AsRef<str>>(coords: &[S], params: &[S]) -> Result<Chart, GeoError> {
        let names: Vec<String> = coords
            .iter()
            .chain(params)
            .map(|s| s.as_ref().to_string())
            .collect();
        for (i, n) in names.iter().enumerate() {
            if n.is_empty() {
                return Err(GeoError::InvalidChart("empty coordinate name".into()));
            }
            if names[..i].contains(n) {
                return Err(GeoError::InvalidChart(format!("duplicate name `{n}`")));
            }
        }
        let vars = VarSet::new(names);
        Ok(Chart {
            vars,
            coords: Arc::new((0..coords.len()).collect()),
        })
    }

    /// A chart on an existing variable set using the named coordinates.
    pub fn on_vars<S: AsRef<str>>(vars: &VarSet, coords: &[S]) -> Result<Chart, GeoError> {
        let mut idx = Vec::with_capacity(coords.len());
        for c in coords {
            let i = vars
                .index_of(c.as_ref())
                .ok_or_else(|| GeoError::InvalidChart(format!("unknown coordinate `{}`", c.as_ref())))?;
            if idx.contains(&i) {
                return Err(GeoError::InvalidChart(format!("duplicate coordinate `{}`", c.as_ref())));
            }
            idx.push(i);
        }
        Ok(Chart {
            vars: vars.clone(),
            coords: Arc::new(idx),
        })
    }

    /// Sub-chart keeping the coordinates at the given positions.
    pub fn subchart(&self, positions: &[usize]) -> Chart {
        Chart {
            vars: self.vars.clone(),
            coords: Arc::new(positions.iter().map(|&p| self.coords[p]).collect()),
        }
    }

    pub fn dim(&self) -> usize {
        self.coords.len()
    }

    pub fn vars(&self) -> &VarSet {
        &self.vars
    }

    pub fn var_index(&self, pos: usize) -> usize {
        self.coords[pos]
    }

    pub fn name(&self, pos: usize) -> &str {
        self.vars.name(self.coords[pos])
    }

    pub fn names(&self) -> Vec<String> {
        (0..self.dim()).map(|i| self.name(i).to_string()).collect()
    }

    pub fn position(&self, name: &str) -> Option<usize> {
        self.coords.iter().position(|&v| self.vars.name(v) == name)
    }

    /// Names of the non-coordinate variables.
    pub fn params(&self) -> Vec<String> {
        (0..self.vars.len())
            .filter(|v| !self.coords.contains(v))
            .map(|v| self.vars.name(v).to_string())
            .collect()
    }

    pub fn coord(&self, pos: usize) -> RationalExpr {
        RationalExpr::var(&self.vars, self.coords[pos])
    }

    pub fn zero(&self) -> RationalExpr {
        RationalExpr::zero(&self.vars)
    }

    pub fn one(&self) -> RationalExpr {
        RationalExpr::one(&self.vars)
    }

    pub fn parse(&self, text: &str) -> Result<RationalExpr, ExprError> {
        self.vars.parse(text)
    }

    /// Partial derivative along the coordinate at `pos`.
    pub fn partial(&self, f: &RationalExpr, pos: usize) -> RationalExpr {
        f.diff(self.coords[pos])
    }

    pub fn gradient(&self, f: &RationalExpr) -> Row {
        (0..self.dim()).map(|i| self.partial(f, i)).collect()
    }

    /// Unit row `e_pos`.
    pub fn unit(&self, pos: usize) -> Row {
        (0..self.dim())
            .map(|i| if i == pos { self.one() } else { self.zero() })
            .collect()
    }

    fn check(&self, f: &RationalExpr) -> Result<(), GeoError> {
        if f.vars() == &self.vars {
            Ok(())
        } else {
            Err(GeoError::VariableMismatch)
        }
    }

    fn check_len(&self, n: usize) -> Result<(), GeoError> {
        if n == self.dim() {
            Ok(())
        } else {
            Err(GeoError::Dimension {
                expected: self.dim(),
                found: n,
            })
        }
    }

    /// Sets the coordinates at `positions` to zero in `f`.
    pub fn restrict(&self, f: &RationalExpr, positions: &[usize]) -> Result<RationalExpr, ExprError> {
        let vars: Vec<usize> = positions.iter().map(|&p| self.coords[p]).collect();
        f.zero_vars(&vars)
    }

    pub fn restrict_row(&self, row: &[RationalExpr], positions: &[usize]) -> Result<Row, ExprError> {
        row.iter().map(|e| self.restrict(e, positions)).collect()
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct VectorField {
    chart: Chart,
    comps: Row,
}

#[derive(Clone, Debug, PartialEq)]
pub struct OneForm {
    chart: Chart,
    comps: Row,
}

macro_rules! component_type {
    ($t:ident) => {
        impl $t {
            pub fn new(chart: &Chart, comps: Row) -> Result<Self, GeoError> {
                chart.check_len(comps.len())?;
                for c in &comps {
                    chart.check(c)?;
                }
                Ok($t {
                    chart: chart.clone(),
                    comps,
                })
            }

            pub fn zero(chart: &Chart) -> Self {
                $t {
                    chart: chart.clone(),
                    comps: vec![chart.zero(); chart.dim()],
                }
            }

            pub fn chart(&self) -> &Chart {
                &self.chart
            }

            pub fn comps(&self) -> &[RationalExpr] {
                &self.comps
            }

            pub fn into_comps(self) -> Row {
                self.comps
            }

            pub fn is_zero(&self) -> bool {
                self.comps.iter().all(RationalExpr::is_zero)
            }

            pub fn scale(&self, f: &RationalExpr) -> Self {
                $t {
                    chart: self.chart.clone(),
                    comps: self.comps.iter().map(|c| c * f).collect(),
                }
            }

            pub fn add(&self, other: &Self) -> Result<Self, GeoError> {
                if self.chart != other.chart {
                    return Err(GeoError::ChartMismatch);
                }
                Ok($t {
                    chart: self.chart.clone(),
                    comps: self.comps.iter().zip(&other.comps).map(|(a, b)| a + b).collect(),
                })
            }

            pub fn restrict(&self, positions: &[usize]) -> Result<Self, ExprError> {
                Ok($t {
                    chart: self.chart.clone(),
                    comps: self.chart.restrict_row(&self.comps, positions)?,
                })
            }
        }
    };
}

component_type!(VectorField);
component_type!(OneForm);

impl VectorField {
    /// Coordinate vector field `d/d(coord at pos)`.
    pub fn coordinate(chart: &Chart, pos: usize) -> Self {
        VectorField {
            chart: chart.clone(),
            comps: chart.unit(pos),
        }
    }

    /// `X f`.
    pub fn apply(&self, f: &RationalExpr) -> RationalExpr {
        let grad = self.chart.gradient(f);
        dot(self.chart.vars(), &self.comps, &grad)
    }
}

/// `df`.
pub fn differential(chart: &Chart, f: &RationalExpr) -> Result<OneForm, GeoError> {
    chart.check(f)?;
    Ok(OneForm {
        chart: chart.clone(),
        comps: chart.gradient(f),
    })
}

/// `<X, a>`.
pub fn pairing(x: &VectorField, a: &OneForm) -> Result<RationalExpr, GeoError> {
    if x.chart != a.chart {
        return Err(GeoError::ChartMismatch);
    }
    Ok(dot(x.chart.vars(), &x.comps, &a.comps))
}

fn check_antisymmetric(chart: &Chart, m: &[Row]) -> Result<(), GeoError> {
    chart.check_len(m.len())?;
    for (i, row) in m.iter().enumerate() {
        chart.check_len(row.len())?;
        for e in row {
            chart.check(e)?;
        }
        if !row[i].is_zero() {
            return Err(GeoError::NotAntisymmetric(i, i));
        }
    }
    for i in 0..m.len() {
        for j in i + 1..m.len() {
            if m[i][j] != -&m[j][i] {
                return Err(GeoError::NotAntisymmetric(i, j));
            }
        }
    }
    Ok(())
}

/// Antisymmetric contravariant 2-tensor.
#[derive(Clone, Debug, PartialEq)]
pub struct BivectorField {
    chart: Chart,
    matrix: Vec<Row>,
}

impl BivectorField {
    pub fn new(chart: &Chart, matrix: Vec<Row>) -> Result<Self, GeoError> {
        check_antisymmetric(chart, &matrix)?;
        Ok(BivectorField {
            chart: chart.clone(),
            matrix,
        })
    }

    /// Builds from the upper-triangular coefficients `(i, j, c)` meaning `c d_i ^ d_j`.
    pub fn from_terms(chart: &Chart, terms: &[(usize, usize, RationalExpr)]) -> Result<Self, GeoError> {
        let n = chart.dim();
        let mut m = vec![vec![chart.zero(); n]; n];
        for (i, j, c) in terms {
            chart.check(c)?;
            m[*i][*j] = &m[*i][*j] + c;
            m[*j][*i] = &m[*j][*i] - c;
        }
        Ok(BivectorField {
            chart: chart.clone(),
            matrix: m,
        })
    }

    pub fn zero(chart: &Chart) -> Self {
        let n = chart.dim();
        BivectorField {
            chart: chart.clone(),
            matrix: vec![vec![chart.zero(); n]; n],
        }
    }

    /// `a ^ b` for two vector fields.
    pub fn wedge(a: &VectorField, b: &VectorField) -> Result<Self, GeoError> {
        if a.chart != b.chart {
            return Err(GeoError::ChartMismatch);
        }
        let n = a.chart.dim();
        let matrix = (0..n)
            .map(|i| {
                (0..n)
                    .map(|j| &(&a.comps[i] * &b.comps[j]) - &(&a.comps[j] * &b.comps[i]))
                    .collect()
            })
            .collect();
        Ok(BivectorField {
            chart: a.chart.clone(),
            matrix,
        })
    }

    /// The bivector `-omega^{-1}` of a symplectic form.
    pub fn from_symplectic(omega: &TwoForm) -> Result<(Self, DegeneracyReport), GeoError> {
        let (inv, deg) = matrix::inverse(omega.chart.vars(), &omega.matrix).map_err(|_| GeoError::Degenerate)?;
        let m = inv.iter().map(|r| r.iter().map(|e| -e).collect()).collect();
        Ok((
            BivectorField {
                chart: omega.chart.clone(),
                matrix: m,
            },
            deg,
        ))
    }

    /// The symplectic form `-pi^{-1}`, if `pi` is invertible.
    pub fn to_symplectic(&self) -> Result<(TwoForm, DegeneracyReport), GeoError> {
        let (inv, deg) = matrix::inverse(self.chart.vars(), &self.matrix).map_err(|_| GeoError::Degenerate)?;
        let m = inv.iter().map(|r| r.iter().map(|e| -e).collect()).collect();
        Ok((
            TwoForm {
                chart: self.chart.clone(),
                matrix: m,
            },
            deg,
        ))
    }

    pub fn chart(&self) -> &Chart {
        &self.chart
    }

    pub fn matrix(&self) -> &[Row] {
        &self.matrix
    }

    pub fn entry(&self, i: usize, j: usize) -> &RationalExpr {
        &self.matrix[i][j]
    }

    pub fn is_zero(&self) -> bool {
        self.matrix.iter().flatten().all(RationalExpr::is_zero)
    }

    /// `pi(a, b) = sum_ij a_i pi[i][j] b_j`.
    pub fn contract(&self, a: &[RationalExpr], b: &[RationalExpr]) -> RationalExpr {
        let vars = self.chart.vars();
        let mut acc = RationalExpr::zero(vars);
        for (i, ai) in a.iter().enumerate() {
            if ai.is_zero() {
                continue;
            }
            let s = dot(vars, &self.matrix[i], b);
            if !s.is_zero() {
                acc = &acc + &(ai * &s);
            }
        }
        acc
    }

    pub fn sharp_row(&self, a: &[RationalExpr]) -> Row {
        let n = self.chart.dim();
        let vars = self.chart.vars();
        (0..n)
            .map(|j| {
                a.iter().enumerate().fold(RationalExpr::zero(vars), |acc, (i, ai)| {
                    if ai.is_zero() || self.matrix[i][j].is_zero() {
                        acc
                    } else {
                        &acc + &(ai * &self.matrix[i][j])
                    }
                })
            })
            .collect()
    }

    /// Sets the coordinates at `positions` to zero in every entry.
    pub fn restrict(&self, positions: &[usize]) -> Result<Self, ExprError> {
        Ok(BivectorField {
            chart: self.chart.clone(),
            matrix: self
                .matrix
                .iter()
                .map(|r| self.chart.restrict_row(r, positions))
                .collect::<Result<_, _>>()?,
        })
    }

    /// Non-zero upper-triangular entries, as `(i, j, coefficient)`.
    pub fn terms(&self) -> Vec<(usize, usize, RationalExpr)> {
        let n = self.chart.dim();
        let mut out = Vec::new();
        for i in 0..n {
            for j in i + 1..n {
                if !self.matrix[i][j].is_zero() {
                    out.push((i, j, self.matrix[i][j].clone()));
                }
            }
        }
        out
    }
}

impl std::fmt::Display for BivectorField {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let terms = self.terms();
        if terms.is_empty() {
            return write!(f, "0");
        }
        for (k, (i, j, c)) in terms.iter().enumerate() {
            if k > 0 {
                write!(f, " + ")?;
            }
            write!(f, "({c}) d/d{}^d/d{}", self.chart.name(*i), self.chart.name(*j))?;
        }
        Ok(())
    }
}

/// Antisymmetric covariant 2-tensor.
#[derive(Clone, Debug, PartialEq)]
pub struct TwoForm {
    chart: Chart,
    matrix: Vec<Row>,
}

impl TwoForm {
    pub fn new(chart: &Chart, matrix: Vec<Row>) -> Result<Self, GeoError> {
        check_antisymmetric(chart, &matrix)?;
        Ok(TwoForm {
            chart: chart.clone(),
            matrix,
        })
    }

    pub fn from_terms(chart: &Chart, terms: &[(usize, usize, RationalExpr)]) -> Result<Self, GeoError> {
        let b = BivectorField::from_terms(chart, terms)?;
        Ok(TwoForm {
            chart: b.chart,
            matrix: b.matrix,
        })
    }

    pub fn chart(&self) -> &Chart {
        &self.chart
    }

    pub fn matrix(&self) -> &[Row] {
        &self.matrix
    }

    pub fn eval(&self, a: &[RationalExpr], b: &[RationalExpr]) -> RationalExpr {
        BivectorField {
            chart: self.chart.clone(),
            matrix: self.matrix.clone(),
        }
        .contract(a, b)
    }

    /// `(i_X omega)_j = sum_i X^i omega[i][j]`.
    pub fn interior(&self, x: &VectorField) -> Result<OneForm, GeoError> {
        if x.chart != self.chart {
            return Err(GeoError::ChartMismatch);
        }
        let vars = self.chart.vars();
        let comps = (0..self.chart.dim())
            .map(|j| {
                let col: Row = self.matrix.iter().map(|r| r[j].clone()).collect();
                dot(vars, &x.comps, &col)
            })
            .collect();
        Ok(OneForm {
            chart: self.chart.clone(),
            comps,
        })
    }

    fn as_bivector(&self) -> BivectorField {
        BivectorField {
            chart: self.chart.clone(),
            matrix: self.matrix.clone(),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.as_bivector().is_zero()
    }

    pub fn terms(&self) -> Vec<(usize, usize, RationalExpr)> {
        self.as_bivector().terms()
    }

    pub fn restrict(&self, positions: &[usize]) -> Result<Self, ExprError> {
        let b = self.as_bivector().restrict(positions)?;
        Ok(TwoForm {
            chart: b.chart,
            matrix: b.matrix,
        })
    }

    /// Components `(d omega)_{ijk}` for `i < j < k`.
    pub fn exterior_derivative(&self) -> BTreeMap<(usize, usize, usize), RationalExpr> {
        let n = self.chart.dim();
        let mut out = BTreeMap::new();
        for i in 0..n {
            for j in i + 1..n {
                for k in j + 1..n {
                    let v = &(&self.chart.partial(&self.matrix[j][k], i)
                        - &self.chart.partial(&self.matrix[i][k], j))
                        + &self.chart.partial(&self.matrix[i][j], k);
                    out.insert((i, j, k), v);
                }
            }
        }
        out
    }
}

impl std::fmt::Display for TwoForm {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let terms = self.terms();
        if terms.is_empty() {
            return write!(f, "0");
        }
        for (k, (i, j, c)) in terms.iter().enumerate() {
            if k > 0 {
                write!(f, " + ")?;
            }
            write!(f, "({c}) d{}^d{}", self.chart.name(*i), self.chart.name(*j))?;
        }
        Ok(())
    }
}

/// `{f, g}`.
pub fn poisson_bracket(pi: &BivectorField, f: &RationalExpr, g: &RationalExpr) -> Result<RationalExpr, GeoError> {
    pi.chart.check(f)?;
    pi.chart.check(g)?;
    let df = pi.chart.gradient(f);
    let dg = pi.chart.gradient(g);
    Ok(pi.contract(&df, &dg))
}

/// `sharp(a)`, with `<sharp df, dg> = {f, g}`.
pub fn sharp(pi: &BivectorField, a: &OneForm) -> Result<VectorField, GeoError> {
    if pi.chart != a.chart {
        return Err(GeoError::ChartMismatch);
    }
    Ok(VectorField {
        chart: pi.chart.clone(),
        comps: pi.sharp_row(&a.comps),
    })
}

/// `X_f = sharp(df)`.
pub fn hamiltonian_vf(pi: &BivectorField, f: &RationalExpr) -> Result<VectorField, GeoError> {
    sharp(pi, &differential(&pi.chart, f)?)
}

/// `[X, Y]^j = sum_i (X^i d_i Y^j - Y^i d_i X^j)`.
pub fn lie_bracket(x: &VectorField, y: &VectorField) -> Result<VectorField, GeoError> {
    if x.chart != y.chart {
        return Err(GeoError::ChartMismatch);
    }
    let comps = (0..x.chart.dim())
        .map(|j| &x.apply(&y.comps[j]) - &y.apply(&x.comps[j]))
        .collect();
    Ok(VectorField {
        chart: x.chart.clone(),
        comps,
    })
}

/// `(L_X pi)^{ij} = sum_l (X^l d_l pi^{ij} - pi^{lj} d_l X^i - pi^{il} d_l X^j)`.
pub fn lie_derivative_bivector(x: &VectorField, pi: &BivectorField) -> Result<BivectorField, GeoError> {
    if x.chart != pi.chart {
        return Err(GeoError::ChartMismatch);
    }
    let chart = &pi.chart;
    let vars = chart.vars();
    let n = chart.dim();
    let jac: Vec<Row> = x.comps.iter().map(|c| chart.gradient(c)).collect();
    let mut m = vec![vec![chart.zero(); n]; n];
    for i in 0..n {
        for j in i + 1..n {
            let transport = x.apply(&pi.matrix[i][j]);
            let col_j: Row = (0..n).map(|l| pi.matrix[l][j].clone()).collect();
            let row_i = &pi.matrix[i];
            let v = &(&transport - &dot(vars, &col_j, &jac[i])) - &dot(vars, row_i, &jac[j]);
            m[j][i] = -&v;
            m[i][j] = v;
        }
    }
    Ok(BivectorField {
        chart: chart.clone(),
        matrix: m,
    })
}

/// `Jac(x_i, x_j, x_k) = {{x_i,x_j},x_k} + cyclic` for every `i < j < k`.
pub fn jacobiator(pi: &BivectorField) -> BTreeMap<(usize, usize, usize), RationalExpr> {
    let chart = &pi.chart;
    let n = chart.dim();
    let grads: Vec<Vec<Row>> = pi
        .matrix
        .iter()
        .map(|r| r.iter().map(|e| chart.gradient(e)).collect())
        .collect();
    let bracket_with = |grad: &Row, k: usize| -> RationalExpr {
        let col: Row = (0..n).map(|l| pi.matrix[l][k].clone()).collect();
        dot(chart.vars(), grad, &col)
    };
    let mut out = BTreeMap::new();
    for i in 0..n {
        for j in i + 1..n {
            for k in j + 1..n {
                let v = &(&bracket_with(&grads[i][j], k) + &bracket_with(&grads[j][k], i))
                    + &bracket_with(&grads[k][i], j);
                out.insert((i, j, k), v);
            }
        }
    }
    out
}

/// Rewrites `pi` in new coordinates. `new_in_old[a]` is the a-th new
/// coordinate as a function on the old chart; `old_in_new[v]` gives every
/// old variable (coordinates and parameters) over the new chart's variables.
pub fn transform_bivector(
    pi: &BivectorField,
    new_chart: &Chart,
    new_in_old: &[RationalExpr],
    old_in_new: &[RationalExpr],
) -> Result<BivectorField, GeoError> {
    new_chart.check_len(new_in_old.len())?;
    let n = new_chart.dim();
    let grads: Vec<Row> = new_in_old.iter().map(|f| pi.chart.gradient(f)).collect();
    let mut m = vec![vec![new_chart.zero(); n]; n];
    for a in 0..n {
        for b in a + 1..n {
            let old = pi.contract(&grads[a], &grads[b]);
            let v = old.substitute(new_chart.vars(), old_in_new)?;
            m[b][a] = -&v;
            m[a][b] = v;
        }
    }
    Ok(BivectorField {
        chart: new_chart.clone(),
        matrix: m,
    })
}
