//! Subbundles given by frames, and the linear algebra needed to compare them.

pub mod matrix;

use serde::Serialize;
use thiserror::Error;

use crate::chartgeo::{BivectorField, Chart};
use crate::symkernel::RationalExpr;
pub use matrix::{DegeneracyReport, Insert, Row, RowBasis};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum FrameKind {
    Vector,
    Covector,
}

impl FrameKind {
    pub fn dual(self) -> FrameKind {
        match self {
            FrameKind::Vector => FrameKind::Covector,
            FrameKind::Covector => FrameKind::Vector,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Base {
    AlongN,
    OnM,
}

#[derive(Clone, Debug, PartialEq, Error)]
pub enum SubError {
    #[error("frame rows must have {expected} entries, found {found}")]
    Dimension { expected: usize, found: usize },
    #[error("frame entries are not over the chart's variables")]
    VariableMismatch,
    #[error("subbundles differ in chart, kind or base")]
    Mismatch,
    #[error("frame is rank deficient: {rank} independent rows out of {rows}")]
    RankDeficient {
        rank: usize,
        rows: usize,
        degeneracy: DegeneracyReport,
    },
}

/// A subbundle spanned by the rows of a frame.
#[derive(Clone, Debug)]
pub struct FramedSubbundle {
    chart: Chart,
    kind: FrameKind,
    base: Base,
    rows: Vec<Row>,
    degeneracy: DegeneracyReport,
}

impl FramedSubbundle {
    /// Wraps a frame; rows must be generically independent.
    pub fn new(chart: &Chart, kind: FrameKind, base: Base, rows: Vec<Row>) -> Result<Self, SubError> {
        for r in &rows {
            if r.len() != chart.dim() {
                return Err(SubError::Dimension {
                    expected: chart.dim(),
                    found: r.len(),
                });
            }
            if r.iter().any(|e| e.vars() != chart.vars()) {
                return Err(SubError::VariableMismatch);
            }
        }
        let b = RowBasis::from_rows(chart.vars(), chart.dim(), &rows);
        if b.rank() != rows.len() {
            return Err(SubError::RankDeficient {
                rank: b.rank(),
                rows: rows.len(),
                degeneracy: b.degeneracy().clone(),
            });
        }
        Ok(FramedSubbundle {
            chart: chart.clone(),
            kind,
            base,
            rows,
            degeneracy: b.degeneracy().clone(),
        })
    }

    /// Independent subset of `rows` spanning the same space.
    pub fn spanned_by(chart: &Chart, kind: FrameKind, base: Base, rows: &[Row]) -> Result<Self, SubError> {
        let (idx, deg) = matrix::independent_rows(chart.vars(), chart.dim(), rows);
        let mut s = Self::new(chart, kind, base, idx.iter().map(|&i| rows[i].clone()).collect())?;
        s.degeneracy.merge(&deg);
        Ok(s)
    }

    pub fn zero(chart: &Chart, kind: FrameKind, base: Base) -> Self {
        FramedSubbundle {
            chart: chart.clone(),
            kind,
            base,
            rows: Vec::new(),
            degeneracy: DegeneracyReport::new(),
        }
    }

    /// The whole fiber, framed by unit rows.
    pub fn full(chart: &Chart, kind: FrameKind, base: Base) -> Self {
        Self::coordinate(chart, kind, base, &(0..chart.dim()).collect::<Vec<_>>())
    }

    /// Span of the unit rows at `positions`.
    pub fn coordinate(chart: &Chart, kind: FrameKind, base: Base, positions: &[usize]) -> Self {
        FramedSubbundle {
            chart: chart.clone(),
            kind,
            base,
            rows: positions.iter().map(|&p| chart.unit(p)).collect(),
            degeneracy: DegeneracyReport::new(),
        }
    }

    pub fn chart(&self) -> &Chart {
        &self.chart
    }

    pub fn kind(&self) -> FrameKind {
        self.kind
    }

    pub fn base(&self) -> Base {
        self.base
    }

    pub fn rows(&self) -> &[Row] {
        &self.rows
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    pub fn is_zero(&self) -> bool {
        self.rows.is_empty()
    }

    /// Pivots whose vanishing would invalidate the stated rank.
    pub fn degeneracy(&self) -> &DegeneracyReport {
        &self.degeneracy
    }

    pub fn with_base(mut self, base: Base) -> Self {
        self.base = base;
        self
    }

    fn basis(&self) -> RowBasis {
        RowBasis::from_rows(self.chart.vars(), self.chart.dim(), &self.rows)
    }

    fn compatible(&self, other: &Self) -> Result<(), SubError> {
        if self.chart == other.chart && self.kind == other.kind && self.base == other.base {
            Ok(())
        } else {
            Err(SubError::Mismatch)
        }
    }
}

/// Rows pairing to zero with every row of `s`, in the dual kind.
pub fn annihilator(s: &FramedSubbundle) -> Result<FramedSubbundle, SubError> {
    let b = s.basis();
    if b.rank() != s.rank() {
        return Err(SubError::RankDeficient {
            rank: b.rank(),
            rows: s.rank(),
            degeneracy: b.degeneracy().clone(),
        });
    }
    let mut degeneracy = s.degeneracy.clone();
    degeneracy.merge(b.degeneracy());
    Ok(FramedSubbundle {
        chart: s.chart.clone(),
        kind: s.kind.dual(),
        base: s.base,
        rows: b.kernel(),
        degeneracy,
    })
}

pub fn sum(parts: &[&FramedSubbundle]) -> Result<FramedSubbundle, SubError> {
    let first = parts.first().ok_or(SubError::Mismatch)?;
    let mut b = RowBasis::new(first.chart.vars(), first.chart.dim());
    let mut rows = Vec::new();
    let mut degeneracy = DegeneracyReport::new();
    for p in parts {
        first.compatible(p)?;
        degeneracy.merge(&p.degeneracy);
        for r in &p.rows {
            if b.insert(r) == Insert::Independent {
                rows.push(r.clone());
            }
        }
    }
    degeneracy.merge(b.degeneracy());
    Ok(FramedSubbundle {
        chart: first.chart.clone(),
        kind: first.kind,
        base: first.base,
        rows,
        degeneracy,
    })
}

/// `s1 ∩ s2`, computed as the annihilator of the sum of annihilators.
pub fn intersect(s1: &FramedSubbundle, s2: &FramedSubbundle) -> Result<FramedSubbundle, SubError> {
    s1.compatible(s2)?;
    let a1 = annihilator(s1)?;
    let a2 = annihilator(s2)?;
    annihilator(&sum(&[&a1, &a2])?)
}

pub fn contains(s: &FramedSubbundle, v: &[RationalExpr]) -> bool {
    s.basis().contains(v)
}

pub fn contains_all(s: &FramedSubbundle, t: &FramedSubbundle) -> bool {
    let b = s.basis();
    t.rows.iter().all(|r| b.contains(r))
}

pub fn span_eq(s: &FramedSubbundle, t: &FramedSubbundle) -> bool {
    s.rank() == t.rank() && contains_all(s, t)
}

/// First pair of annihilator rows on which `w` does not vanish, with the value.
/// `None` means `w` lies in `b ∧ T_NM`.
pub fn wedge_obstruction(
    w: &BivectorField,
    b: &FramedSubbundle,
) -> Result<Option<(Row, Row, RationalExpr)>, SubError> {
    let ann = annihilator(b)?;
    let rows = ann.rows();
    for (i, b1) in rows.iter().enumerate() {
        for b2 in &rows[i + 1..] {
            let v = w.contract(b1, b2);
            if !v.is_zero() {
                return Ok(Some((b1.clone(), b2.clone(), v)));
            }
        }
    }
    Ok(None)
}

/// Whether `w` lies in `b ∧ T_NM`: every pair of annihilator rows kills `w`.
pub fn bivector_in_wedge(w: &BivectorField, b: &FramedSubbundle) -> Result<bool, SubError> {
    Ok(wedge_obstruction(w, b)?.is_none())
}

/// Human-readable row, e.g. `d/dy2 + alpha*d/dx1` or `dx1 - alpha*dy2`.
pub fn format_row(chart: &Chart, row: &[RationalExpr], kind: FrameKind) -> String {
    let mut out = String::new();
    for (i, c) in row.iter().enumerate() {
        if c.is_zero() {
            continue;
        }
        let basis = match kind {
            FrameKind::Vector => format!("d/d{}", chart.name(i)),
            FrameKind::Covector => format!("d{}", chart.name(i)),
        };
        let negative = c.numerator().leading_coeff() < num_traits::Zero::zero();
        let (sign, mag) = if negative { ("-", -c) } else { ("+", c.clone()) };
        let term = if mag.is_one() {
            basis
        } else if mag.is_constant() || mag.numerator().num_terms() == 1 && mag.denominator().is_one() {
            format!("{mag}*{basis}")
        } else {
            format!("({mag})*{basis}")
        };
        if out.is_empty() {
            if sign == "-" {
                out.push('-');
            }
        } else {
            out.push_str(if sign == "-" { " - " } else { " + " });
        }
        out.push_str(&term);
    }
    if out.is_empty() {
        out.push('0');
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rows(chart: &Chart, rs: &[&[&str]]) -> Vec<Row> {
        rs.iter()
            .map(|r| r.iter().map(|s| chart.parse(s).unwrap()).collect())
            .collect()
    }

    fn vec_bundle(chart: &Chart, rs: &[&[&str]]) -> FramedSubbundle {
        FramedSubbundle::new(chart, FrameKind::Vector, Base::AlongN, rows(chart, rs)).unwrap()
    }

    #[test]
    fn annihilator_of_dz() {
        let c = Chart::new(&["x", "y", "z"], &[]).unwrap();
        let b = vec_bundle(&c, &[&["0", "0", "1"]]);
        let a = annihilator(&b).unwrap();
        assert_eq!(a.kind(), FrameKind::Covector);
        let expected = FramedSubbundle::new(&c, FrameKind::Covector, Base::AlongN, rows(&c, &[&["1", "0", "0"], &["0", "1", "0"]])).unwrap();
        assert!(span_eq(&a, &expected));
    }

    #[test]
    fn annihilator_of_exbsb_b() {
        let c = Chart::new(&["x1", "y1", "x2", "y2"], &["alpha"]).unwrap();
        let b = vec_bundle(&c, &[&["alpha", "0", "0", "1"]]);
        let a = annihilator(&b).unwrap();
        let expected = FramedSubbundle::new(
            &c,
            FrameKind::Covector,
            Base::AlongN,
            rows(&c, &[&["0", "1", "0", "0"], &["0", "0", "1", "0"], &["1", "0", "0", "-alpha"]]),
        )
        .unwrap();
        assert!(span_eq(&a, &expected));
        assert!(span_eq(&annihilator(&a).unwrap(), &b));
    }

    #[test]
    fn intersections_and_sums() {
        let c = Chart::new(&["x1", "y1", "x2", "x3", "y3", "y2"], &["alpha"]).unwrap();
        let tn = FramedSubbundle::coordinate(&c, FrameKind::Vector, Base::AlongN, &[0, 1, 2, 3, 4]);
        let b = vec_bundle(&c, &[&["0", "1", "0", "0", "0", "0"], &["alpha", "0", "0", "0", "0", "1"]]);
        let f = intersect(&tn, &b).unwrap();
        assert!(span_eq(&f, &FramedSubbundle::coordinate(&c, FrameKind::Vector, Base::AlongN, &[1])));

        let c = Chart::new(&["y1", "y2", "x1", "x2"], &["lambda"]).unwrap();
        let tn = FramedSubbundle::coordinate(&c, FrameKind::Vector, Base::AlongN, &[0, 1]);
        let b = vec_bundle(&c, &[&["0", "0", "1", "0"], &["-lambda", "0", "0", "1"]]);
        assert_eq!(intersect(&tn, &b).unwrap().rank(), 0);

        let c = Chart::new(&["x1", "y1", "x2", "y2"], &["alpha"]).unwrap();
        let tn = FramedSubbundle::coordinate(&c, FrameKind::Vector, Base::AlongN, &[0, 1, 2]);
        let b = vec_bundle(&c, &[&["alpha", "0", "0", "1"]]);
        assert_eq!(sum(&[&tn, &b]).unwrap().rank(), 4);
    }

    #[test]
    fn membership() {
        let c = Chart::new(&["x", "y"], &[]).unwrap();
        let s = vec_bundle(&c, &[&["1", "0"]]);
        assert!(!contains(&s, &c.unit(1)));
        assert!(contains(&s, &rows(&c, &[&["x^2", "0"]])[0]));
    }

    #[test]
    fn rank_deficiency_is_reported() {
        let c = Chart::new(&["x", "y"], &[]).unwrap();
        let r = rows(&c, &[&["x", "y"], &["x^2", "x*y"]]);
        match FramedSubbundle::new(&c, FrameKind::Vector, Base::OnM, r) {
            Err(SubError::RankDeficient { rank: 1, rows: 2, .. }) => {}
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn row_formatting() {
        let c = Chart::new(&["x1", "y2"], &["alpha"]).unwrap();
        let r = rows(&c, &[&["1", "-alpha"]]);
        assert_eq!(format_row(&c, &r[0], FrameKind::Covector), "dx1 - alpha*dy2");
        let r = rows(&c, &[&["-1", "alpha + 1"]]);
        assert_eq!(format_row(&c, &r[0], FrameKind::Vector), "-d/dx1 + (alpha + 1)*d/dy2");
        assert_eq!(format_row(&c, &[c.zero(), c.zero()], FrameKind::Vector), "0");
    }

    #[test]
    fn wedge_membership() {
        let c = Chart::new(&["x", "y", "z"], &[]).unwrap();
        let b = vec_bundle(&c, &[&["0", "0", "1"]]);
        let w = BivectorField::from_terms(&c, &[(0, 1, c.one())]).unwrap();
        assert!(!bivector_in_wedge(&w, &b).unwrap());
        let w = BivectorField::from_terms(&c, &[(0, 2, c.coord(1))]).unwrap();
        assert!(bivector_in_wedge(&w, &b).unwrap());
        assert!(bivector_in_wedge(&BivectorField::zero(&c), &b).unwrap());
    }
}
