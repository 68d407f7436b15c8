//! Gaussian elimination over the field of rational functions.
//!
//! All ranks are generic: a pivot is any entry that is not identically zero.
//! Non-constant pivots are collected in a [`DegeneracyReport`]; the answers
//! are valid wherever none of them vanishes.

use serde::Serialize;

use crate::symkernel::{RationalExpr, VarSet};

pub type Row = Vec<RationalExpr>;

/// Pivots whose vanishing would change a computed rank or membership.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct DegeneracyReport {
    pivots: Vec<RationalExpr>,
}

impl DegeneracyReport {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn record(&mut self, pivot: &RationalExpr) {
        if pivot.is_constant() {
            return;
        }
        // Only the zero locus matters, so drop the numerator's leading coefficient.
        let lc = pivot.numerator().leading_coeff();
        let p = pivot.scale(&lc.recip());
        if !self.pivots.contains(&p) {
            self.pivots.push(p);
        }
    }

    pub fn merge(&mut self, other: &DegeneracyReport) {
        for p in &other.pivots {
            self.record(p);
        }
    }

    pub fn is_empty(&self) -> bool {
        self.pivots.is_empty()
    }

    pub fn pivots(&self) -> &[RationalExpr] {
        &self.pivots
    }

    pub fn to_strings(&self) -> Vec<String> {
        self.pivots.iter().map(ToString::to_string).collect()
    }
}

impl Serialize for DegeneracyReport {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        self.to_strings().serialize(s)
    }
}

/// Outcome of inserting a row into a [`RowBasis`].
#[derive(Clone, Debug, PartialEq)]
pub enum Insert {
    Independent,
    Dependent,
    /// Reduces to zero on the pivotable columns but not on the rest.
    Inconsistent(Row),
}

/// Incrementally maintained reduced row echelon form.
///
/// Pivots are only taken among the first `pivot_limit` columns, which lets
/// the same structure solve augmented systems.
#[derive(Clone, Debug)]
pub struct RowBasis {
    vars: VarSet,
    ncols: usize,
    pivot_limit: usize,
    rows: Vec<Row>,
    pivots: Vec<usize>,
    degeneracy: DegeneracyReport,
}

impl RowBasis {
    pub fn new(vars: &VarSet, ncols: usize) -> Self {
        Self::with_pivot_limit(vars, ncols, ncols)
    }

    pub fn with_pivot_limit(vars: &VarSet, ncols: usize, pivot_limit: usize) -> Self {
        RowBasis {
            vars: vars.clone(),
            ncols,
            pivot_limit,
            rows: Vec::new(),
            pivots: Vec::new(),
            degeneracy: DegeneracyReport::new(),
        }
    }

    pub fn from_rows(vars: &VarSet, ncols: usize, rows: &[Row]) -> Self {
        let mut b = Self::new(vars, ncols);
        for r in rows {
            b.insert(r);
        }
        b
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    pub fn ncols(&self) -> usize {
        self.ncols
    }

    pub fn rows(&self) -> &[Row] {
        &self.rows
    }

    pub fn pivots(&self) -> &[usize] {
        &self.pivots
    }

    pub fn degeneracy(&self) -> &DegeneracyReport {
        &self.degeneracy
    }

    /// `v` minus its projection onto the current row space along pivot columns.
    pub fn residual(&self, v: &[RationalExpr]) -> Row {
        assert_eq!(v.len(), self.ncols, "row length mismatch");
        let mut w = v.to_vec();
        for (row, &p) in self.rows.iter().zip(&self.pivots) {
            if w[p].is_zero() {
                continue;
            }
            let f = w[p].clone();
            for (c, e) in row.iter().enumerate() {
                if !e.is_zero() {
                    w[c] = &w[c] - &(&f * e);
                }
            }
        }
        w
    }

    pub fn contains(&self, v: &[RationalExpr]) -> bool {
        self.residual(v).iter().all(RationalExpr::is_zero)
    }

    pub fn insert(&mut self, v: &[RationalExpr]) -> Insert {
        let w = self.residual(v);
        let pivot = (0..self.pivot_limit)
            .filter(|&c| !w[c].is_zero())
            .min_by_key(|&c| (w[c].weight(), c));
        let Some(p) = pivot else {
            return if w.iter().all(RationalExpr::is_zero) {
                Insert::Dependent
            } else {
                Insert::Inconsistent(w)
            };
        };
        self.degeneracy.record(&w[p]);
        let inv = w[p].recip().expect("pivot is nonzero");
        let w: Row = w.iter().map(|e| e * &inv).collect();
        for row in &mut self.rows {
            if row[p].is_zero() {
                continue;
            }
            let f = row[p].clone();
            for (c, e) in w.iter().enumerate() {
                if !e.is_zero() {
                    row[c] = &row[c] - &(&f * e);
                }
            }
        }
        self.rows.push(w);
        self.pivots.push(p);
        Insert::Independent
    }

    /// Basis of `{x : r . x = 0 for every row r}`.
    pub fn kernel(&self) -> Vec<Row> {
        let zero = RationalExpr::zero(&self.vars);
        (0..self.ncols)
            .filter(|c| !self.pivots.contains(c))
            .map(|free| {
                let mut v = vec![zero.clone(); self.ncols];
                v[free] = RationalExpr::one(&self.vars);
                for (row, &p) in self.rows.iter().zip(&self.pivots) {
                    v[p] = -&row[free];
                }
                v
            })
            .collect()
    }
}

pub fn rank(vars: &VarSet, ncols: usize, rows: &[Row]) -> usize {
    RowBasis::from_rows(vars, ncols, rows).rank()
}

/// Right null space of `rows`, together with the pivots used.
pub fn kernel(vars: &VarSet, ncols: usize, rows: &[Row]) -> (Vec<Row>, DegeneracyReport) {
    let b = RowBasis::from_rows(vars, ncols, rows);
    (b.kernel(), b.degeneracy().clone())
}

/// Indices of a maximal independent subset of `rows`, chosen greedily in order.
pub fn independent_rows(vars: &VarSet, ncols: usize, rows: &[Row]) -> (Vec<usize>, DegeneracyReport) {
    let mut b = RowBasis::new(vars, ncols);
    let idx = rows
        .iter()
        .enumerate()
        .filter(|(_, r)| b.insert(r) == Insert::Independent)
        .map(|(i, _)| i)
        .collect();
    (idx, b.degeneracy().clone())
}

#[derive(Clone, Debug, PartialEq)]
pub struct Singular;

/// Exact inverse of a square matrix.
pub fn inverse(vars: &VarSet, m: &[Row]) -> Result<(Vec<Row>, DegeneracyReport), Singular> {
    let n = m.len();
    let zero = RationalExpr::zero(vars);
    let mut b = RowBasis::with_pivot_limit(vars, 2 * n, n);
    for (i, row) in m.iter().enumerate() {
        assert_eq!(row.len(), n, "inverse of a non-square matrix");
        let mut aug = row.clone();
        aug.extend((0..n).map(|j| if i == j { RationalExpr::one(vars) } else { zero.clone() }));
        if b.insert(&aug) != Insert::Independent {
            return Err(Singular);
        }
    }
    let mut inv = vec![Vec::new(); n];
    for (row, &p) in b.rows().iter().zip(b.pivots()) {
        inv[p] = row[n..].to_vec();
    }
    Ok((inv, b.degeneracy().clone()))
}

/// Solves `a x = rhs` (one column of `rhs` per right-hand side). Free
/// unknowns are set to zero. On inconsistency returns the residual row.
pub fn solve(vars: &VarSet, a: &[Row], rhs: &[Row]) -> Result<(Vec<Row>, DegeneracyReport), Row> {
    let k = a.first().map(Vec::len).unwrap_or(0);
    let r = rhs.first().map(Vec::len).unwrap_or(0);
    let mut b = RowBasis::with_pivot_limit(vars, k + r, k);
    for (row, rr) in a.iter().zip(rhs) {
        let mut aug = row.clone();
        aug.extend(rr.iter().cloned());
        if let Insert::Inconsistent(res) = b.insert(&aug) {
            return Err(res);
        }
    }
    let zero = RationalExpr::zero(vars);
    let mut x = vec![vec![zero; r]; k];
    for (row, &p) in b.rows().iter().zip(b.pivots()) {
        x[p] = row[k..].to_vec();
    }
    Ok((x, b.degeneracy().clone()))
}

pub fn mat_mul(vars: &VarSet, a: &[Row], b: &[Row]) -> Vec<Row> {
    let inner = b.len();
    let cols = b.first().map(Vec::len).unwrap_or(0);
    a.iter()
        .map(|ar| {
            (0..cols)
                .map(|j| {
                    (0..inner).fold(RationalExpr::zero(vars), |acc, k| {
                        if ar[k].is_zero() || b[k][j].is_zero() {
                            acc
                        } else {
                            &acc + &(&ar[k] * &b[k][j])
                        }
                    })
                })
                .collect()
        })
        .collect()
}

pub fn dot(vars: &VarSet, a: &[RationalExpr], b: &[RationalExpr]) -> RationalExpr {
    a.iter().zip(b).fold(RationalExpr::zero(vars), |acc, (x, y)| {
        if x.is_zero() || y.is_zero() {
            acc
        } else {
            &acc + &(x * y)
        }
    })
}
