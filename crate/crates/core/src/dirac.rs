//! Dirac-structure view of the reduction: the graph of `Pi`, its stretching
//! in the direction of `B`, the pullback to `N`, and the symplectic case.
//!
//! A frame row of a `DiracFrame` has `2n` entries, the vector part followed by
//! the covector part. The pairing is `<(X, a), (Y, b)> = a(Y) + b(X)`.

use serde::Serialize;
use thiserror::Error;

use crate::chartgeo::{BivectorField, Chart, GeoError, TwoForm};
use crate::reduce::{Complement, Condition, ConditionReport, ReduceError, ReductionProblem, Verdict};
use crate::sublinalg::matrix::{self, dot};
use crate::sublinalg::{format_row, span_eq, SubError, Base, DegeneracyReport, FrameKind, FramedSubbundle, Row, RowBasis};
use crate::symkernel::{ExprError, RationalExpr};

#[derive(Clone, Debug, PartialEq, Error)]
pub enum DiracError {
    #[error("frame rows must have {expected} entries, found {found}")]
    Dimension { expected: usize, found: usize },
    #[error("{what} has rank {rank}, expected {expected}")]
    RankCollapse {
        what: &'static str,
        rank: usize,
        expected: usize,
        degeneracy: DegeneracyReport,
    },
    #[error("the problem has no symplectic form")]
    NotSymplectic,
    #[error(transparent)]
    Reduce(#[from] ReduceError),
    #[error(transparent)]
    Geo(#[from] GeoError),
    #[error(transparent)]
    Expr(#[from] ExprError),
    #[error(transparent)]
    Sub(#[from] SubError),
}

/// A subbundle of `TM + T*M` given by a frame.
#[derive(Clone, Debug)]
pub struct DiracFrame {
    chart: Chart,
    rows: Vec<Row>,
    degeneracy: DegeneracyReport,
}

fn combine(chart: &Chart, rows: &[Row], coeffs: &[RationalExpr]) -> Row {
    let len = rows.first().map(Vec::len).unwrap_or(0);
    let mut out = vec![chart.zero(); len];
    for (r, a) in rows.iter().zip(coeffs) {
        if a.is_zero() {
            continue;
        }
        for (o, e) in out.iter_mut().zip(r) {
            if !e.is_zero() {
                *o = &*o + &(a * e);
            }
        }
    }
    out
}

impl DiracFrame {
    /// Keeps a maximal independent subset of `rows`.
    pub fn new(chart: &Chart, rows: Vec<Row>) -> Result<Self, DiracError> {
        let n2 = 2 * chart.dim();
        if let Some(r) = rows.iter().find(|r| r.len() != n2) {
            return Err(DiracError::Dimension {
                expected: n2,
                found: r.len(),
            });
        }
        let (idx, degeneracy) = matrix::independent_rows(chart.vars(), n2, &rows);
        Ok(DiracFrame {
            chart: chart.clone(),
            rows: idx.into_iter().map(|i| rows[i].clone()).collect(),
            degeneracy,
        })
    }

    pub fn chart(&self) -> &Chart {
        &self.chart
    }

    pub fn rows(&self) -> &[Row] {
        &self.rows
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    pub fn degeneracy(&self) -> &DegeneracyReport {
        &self.degeneracy
    }

    pub fn vector_part(row: &[RationalExpr]) -> &[RationalExpr] {
        &row[..row.len() / 2]
    }

    pub fn covector_part(row: &[RationalExpr]) -> &[RationalExpr] {
        &row[row.len() / 2..]
    }

    pub fn pairing(&self, a: &[RationalExpr], b: &[RationalExpr]) -> RationalExpr {
        let v = self.chart.vars();
        &dot(v, Self::covector_part(a), Self::vector_part(b)) + &dot(v, Self::covector_part(b), Self::vector_part(a))
    }

    /// First pair of frame rows with nonzero pairing.
    pub fn isotropy_failure(&self) -> Option<(usize, usize, RationalExpr)> {
        for i in 0..self.rows.len() {
            for j in i..self.rows.len() {
                let p = self.pairing(&self.rows[i], &self.rows[j]);
                if !p.is_zero() {
                    return Some((i, j, p));
                }
            }
        }
        None
    }

    pub fn is_isotropic(&self) -> bool {
        self.isotropy_failure().is_none()
    }

    pub fn is_lagrangian(&self) -> bool {
        self.rank() == self.chart.dim() && self.is_isotropic()
    }

    fn basis(&self) -> RowBasis {
        RowBasis::from_rows(self.chart.vars(), 2 * self.chart.dim(), &self.rows)
    }

    pub fn contains(&self, row: &[RationalExpr]) -> bool {
        self.basis().contains(row)
    }

    pub fn contains_all(&self, other: &DiracFrame) -> bool {
        let b = self.basis();
        other.rows.iter().all(|r| b.contains(r))
    }

    pub fn span_eq(&self, other: &DiracFrame) -> bool {
        self.rank() == other.rank() && self.contains_all(other)
    }

    /// Sets the coordinates at `positions` to zero in every entry.
    pub fn restrict(&self, positions: &[usize]) -> Result<Self, DiracError> {
        let rows = self
            .rows
            .iter()
            .map(|r| self.chart.restrict_row(r, positions))
            .collect::<Result<Vec<_>, _>>()?;
        DiracFrame::new(&self.chart, rows)
    }

    /// Combinations of frame rows satisfying `eqs[e] . coeffs = 0` for each `e`.
    fn solutions(&self, eqs: &[Row]) -> Vec<Row> {
        let (ker, _) = matrix::kernel(self.chart.vars(), self.rows.len(), eqs);
        ker.iter().map(|a| combine(&self.chart, &self.rows, a)).collect()
    }

    pub fn format(&self, row: &[RationalExpr]) -> String {
        format!(
            "({}, {})",
            format_row(&self.chart, Self::vector_part(row), FrameKind::Vector),
            format_row(&self.chart, Self::covector_part(row), FrameKind::Covector)
        )
    }
}

/// `{(sharp dx_i, dx_i)}`.
pub fn graph_of_bivector(pi: &BivectorField) -> DiracFrame {
    let chart = pi.chart();
    let rows = (0..chart.dim())
        .map(|i| {
            let mut r = pi.sharp_row(&chart.unit(i));
            r.extend(chart.unit(i));
            r
        })
        .collect();
    DiracFrame::new(chart, rows).expect("graph rows have length 2n")
}

/// `{(v, i_v omega)}`.
pub fn graph_of_form(omega: &TwoForm) -> DiracFrame {
    let chart = omega.chart();
    let rows = (0..chart.dim())
        .map(|i| {
            let mut r = chart.unit(i);
            r.extend(omega.matrix()[i].iter().cloned());
            r
        })
        .collect();
    DiracFrame::new(chart, rows).expect("graph rows have length 2n")
}

/// `[L ∩ (T_NM + B°)] + (B + 0)` for `L` given along `N`.
pub fn stretch(l: &DiracFrame, b: &FramedSubbundle) -> Result<DiracFrame, DiracError> {
    let chart = l.chart();
    let v = chart.vars();
    let eqs: Vec<Row> = b
        .rows()
        .iter()
        .map(|br| l.rows().iter().map(|r| dot(v, DiracFrame::covector_part(r), br)).collect())
        .collect();
    let mut rows = l.solutions(&eqs);
    for br in b.rows() {
        let mut r = br.clone();
        r.extend(std::iter::repeat(chart.zero()).take(chart.dim()));
        rows.push(r);
    }
    let out = DiracFrame::new(chart, rows)?;
    if out.rank() != chart.dim() {
        return Err(DiracError::RankCollapse {
            what: "stretched structure",
            rank: out.rank(),
            expected: chart.dim(),
            degeneracy: out.degeneracy.clone(),
        });
    }
    Ok(out)
}

/// `{(v, i*a) : v ∈ TN, (v, a) ∈ L}` on the chart of `N`, where `N` is the
/// slice of the coordinates at `n_positions` (all others vanish on `N`).
pub fn pullback(l: &DiracFrame, n_positions: &[usize]) -> Result<DiracFrame, DiracError> {
    let chart = l.chart();
    let n = chart.dim();
    let eqs: Vec<Row> = (0..n)
        .filter(|c| !n_positions.contains(c))
        .map(|c| l.rows().iter().map(|r| r[c].clone()).collect())
        .collect();
    let n_chart = chart.subchart(n_positions);
    let rows = l
        .solutions(&eqs)
        .into_iter()
        .map(|r| {
            n_positions
                .iter()
                .map(|&p| r[p].clone())
                .chain(n_positions.iter().map(|&p| r[n + p].clone()))
                .collect()
        })
        .collect();
    let out = DiracFrame::new(&n_chart, rows)?;
    if out.rank() != n_chart.dim() {
        return Err(DiracError::RankCollapse {
            what: "pullback",
            rank: out.rank(),
            expected: n_chart.dim(),
            degeneracy: out.degeneracy.clone(),
        });
    }
    Ok(out)
}

#[derive(Clone, Debug)]
pub struct KernelAndForm {
    /// `{v : (v, 0) ∈ L}`.
    pub kernel: Vec<Row>,
    /// The 2-form whose graph is `L`, when the vector parts span.
    pub form: Option<TwoForm>,
    pub degeneracy: DegeneracyReport,
}

pub fn kernel_and_form(l: &DiracFrame) -> Result<KernelAndForm, DiracError> {
    let chart = l.chart();
    let n = chart.dim();
    let v = chart.vars();
    let eqs: Vec<Row> = (0..n).map(|j| l.rows().iter().map(|r| r[n + j].clone()).collect()).collect();
    let kernel_rows: Vec<Row> = l
        .solutions(&eqs)
        .into_iter()
        .map(|r| DiracFrame::vector_part(&r).to_vec())
        .collect();
    let (kidx, mut degeneracy) = matrix::independent_rows(v, n, &kernel_rows);
    let kernel = kidx.into_iter().map(|i| kernel_rows[i].clone()).collect();

    let vectors: Vec<Row> = l.rows().iter().map(|r| DiracFrame::vector_part(r).to_vec()).collect();
    let (idx, d) = matrix::independent_rows(v, n, &vectors);
    degeneracy.merge(&d);
    let form = if idx.len() == n {
        let vm: Vec<Row> = idx.iter().map(|&i| vectors[i].clone()).collect();
        let xi: Vec<Row> = idx.iter().map(|&i| DiracFrame::covector_part(&l.rows()[i]).to_vec()).collect();
        let (inv, d) = matrix::inverse(v, &vm).expect("independent vector parts");
        degeneracy.merge(&d);
        Some(TwoForm::new(chart, matrix::mat_mul(v, &inv, &xi))?)
    } else {
        None
    };
    Ok(KernelAndForm { kernel, form, degeneracy })
}

/// `pullback(stretch(graph(Pi)|_N, B))` for a reduction problem.
pub fn pulled_back_structure(p: &ReductionProblem) -> Result<DiracFrame, DiracError> {
    let graph = graph_of_bivector(p.pi()).restrict(&p.constraint_positions())?;
    let stretched = stretch(&graph, p.b())?;
    pullback(&stretched, &p.n_positions())
}

/// The pullback to `N` of the graph of the reduced bivector:
/// `(sum_b pibar[a][b] d/dq_b, dq_a)` and `(d/ds, 0)` for `s` in `F`.
pub fn lifted_reduced_structure(p: &ReductionProblem, reduced: &BivectorField) -> Result<DiracFrame, DiracError> {
    let n_chart = p.n_chart();
    let m = n_chart.dim();
    let q = p.quotient();
    let mut rows = Vec::new();
    for (a, &qa) in q.iter().enumerate() {
        let mut r = vec![n_chart.zero(); 2 * m];
        for (b, &qb) in q.iter().enumerate() {
            r[qb] = reduced.entry(a, b).clone();
        }
        r[m + qa] = n_chart.one();
        rows.push(r);
    }
    for &s in p.f_coords() {
        let mut r = n_chart.unit(s);
        r.extend(std::iter::repeat(n_chart.zero()).take(m));
        rows.push(r);
    }
    DiracFrame::new(&n_chart, rows)
}

/// The pullback of the stretched graph equals the lift of the reduced structure.
pub fn check_pushpull(p: &ReductionProblem) -> Result<ConditionReport, DiracError> {
    let reduced = p.reduced_bivector(Complement::Default)?;
    let graph = graph_of_bivector(p.pi()).restrict(&p.constraint_positions())?;
    let stretched = stretch(&graph, p.b())?;
    let pulled = pullback(&stretched, &p.n_positions())?;
    let lifted = lifted_reduced_structure(p, &reduced.bivector)?;
    let mut report = ConditionReport::new("Dirac pullback of the stretched structure");

    let mut deg = stretched.degeneracy().clone();
    deg.merge(pulled.degeneracy());
    let fail = [("stretched", &stretched), ("pullback", &pulled)]
        .into_iter()
        .find_map(|(what, l)| {
            l.isotropy_failure()
                .map(|(i, j, v)| format!("{what}: <{}, {}> = {v}", l.format(&l.rows()[i]), l.format(&l.rows()[j])))
        });
    report.push(condition("lagrangian", fail, deg.clone()));

    let fail = pulled
        .rows()
        .iter()
        .find(|r| !lifted.contains(r))
        .map(|r| format!("{} is not in the lift", pulled.format(r)));
    report.push(condition("pullback_in_lift", fail, deg.clone()));
    let fail = lifted
        .rows()
        .iter()
        .find(|r| !pulled.contains(r))
        .map(|r| format!("{} is not in the pullback", lifted.format(r)));
    report.push(condition("lift_in_pullback", fail, deg));

    let kf = kernel_and_form(&pulled)?;
    let n_chart = p.n_chart();
    let kernel = FramedSubbundle::new(&n_chart, FrameKind::Vector, Base::OnM, kf.kernel.clone())?;
    let f = FramedSubbundle::coordinate(&n_chart, FrameKind::Vector, Base::OnM, p.f_coords());
    let fail = if span_eq(&kernel, &f) {
        None
    } else {
        let k: Vec<String> = kf.kernel.iter().map(|r| format_row(&n_chart, r, FrameKind::Vector)).collect();
        Some(format!("kernel is span{{{}}}", k.join(", ")))
    };
    report.push(condition("kernel_is_F", fail, kf.degeneracy));
    Ok(report)
}

fn condition(name: &str, failure: Option<String>, degeneracy: DegeneracyReport) -> Condition {
    Condition {
        name: name.to_string(),
        verdict: if failure.is_some() { Verdict::Fails } else { Verdict::Holds },
        witness: failure,
        note: None,
        degeneracy,
    }
}

/// `omega^B` on `N` and its push-down to the quotient.
#[derive(Clone, Debug, Serialize)]
pub struct OmegaB {
    /// `omega(X1 + b1, X2 + b2)` on coordinate directions of `N`.
    #[serde(serialize_with = "display")]
    pub on_n: TwoForm,
    /// Restriction to the quotient coordinates.
    #[serde(serialize_with = "display")]
    pub pushed: TwoForm,
    /// `TN + B = B^omega + B`.
    pub nondegenerate: bool,
    /// Why `b_i` with `X_i + b_i ∈ B^omega` does not exist, if it does not.
    pub obstruction: Option<String>,
    /// Nonzero components of `d omega^B` on the quotient.
    pub d_omega: Vec<String>,
    pub degeneracy: DegeneracyReport,
}

fn display<T: std::fmt::Display, S: serde::Serializer>(v: &T, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_str(&v.to_string())
}

pub fn omega_b(p: &ReductionProblem) -> Result<OmegaB, DiracError> {
    let omega = p.omega().ok_or(DiracError::NotSymplectic)?.restrict(&p.constraint_positions())?;
    let chart = p.chart();
    let v = chart.vars();
    let n = chart.dim();
    let b = p.b().rows();
    let omega_row = |x: &[RationalExpr]| -> Row { (0..n).map(|i| omega.eval(&chart.unit(i), x)).collect() };

    // B^omega = {v : omega(v, b_k) = 0}
    let eqs: Vec<Row> = b.iter().map(|bk| omega_row(bk)).collect();
    let (perp, mut degeneracy) = matrix::kernel(v, n, &eqs);
    let perp = FramedSubbundle::spanned_by(chart, FrameKind::Vector, Base::AlongN, &perp)?;
    let tn_b = crate::sublinalg::sum(&[p.tn(), p.b()]).expect("same chart");
    let perp_b = crate::sublinalg::sum(&[&perp, p.b()]).expect("same chart");
    let nondegenerate = span_eq(&tn_b, &perp_b);

    // X_i + sum_l beta_l b_l ∈ B^omega: sum_l beta_l omega(b_l, b_k) = -omega(e_i, b_k)
    let n_pos = p.n_positions();
    let gram: Vec<Row> = b.iter().map(|bk| b.iter().map(|bl| omega.eval(bl, bk)).collect()).collect();
    let rhs: Vec<Row> = b
        .iter()
        .map(|bk| n_pos.iter().map(|&i| -&omega.eval(&chart.unit(i), bk)).collect())
        .collect();
    let mut obstruction = None;
    let lifts: Vec<Row> = match matrix::solve(v, &gram, &rhs) {
        Ok((beta, d)) => {
            degeneracy.merge(&d);
            n_pos
                .iter()
                .enumerate()
                .map(|(col, &i)| {
                    let coeffs: Row = beta.iter().map(|r| r[col].clone()).collect();
                    let shift = combine(chart, b, &coeffs);
                    chart.unit(i).iter().zip(&shift).map(|(a, s)| a + s).collect()
                })
                .collect()
        }
        Err(residual) => {
            let which: Vec<String> = n_pos
                .iter()
                .enumerate()
                .filter(|(col, _)| !residual[b.len() + col].is_zero())
                .map(|(_, &i)| format!("d/d{}", chart.name(i)))
                .collect();
            obstruction = Some(format!(
                "no b in B with X + b in B^omega for X = {}; B ∩ B^omega is nontrivial",
                which.join(", ")
            ));
            n_pos.iter().map(|&i| chart.unit(i)).collect()
        }
    };
    let n_chart = p.n_chart();
    let m: Vec<Row> = lifts.iter().map(|x| lifts.iter().map(|y| omega.eval(x, y)).collect()).collect();
    let on_n = TwoForm::new(&n_chart, m.clone())?;
    let q = p.quotient();
    let qm: Vec<Row> = q.iter().map(|&a| q.iter().map(|&c| m[a][c].clone()).collect()).collect();
    let pushed = TwoForm::new(&p.quotient_chart(), qm)?;
    let qc = p.quotient_chart();
    let d_omega = pushed
        .exterior_derivative()
        .into_iter()
        .filter(|(_, e)| !e.is_zero())
        .map(|((i, j, k), e)| format!("(d omega^B)({}, {}, {}) = {e}", qc.name(i), qc.name(j), qc.name(k)))
        .collect();
    Ok(OmegaB {
        on_n,
        pushed,
        nondegenerate: nondegenerate && obstruction.is_none(),
        obstruction,
        d_omega,
        degeneracy,
    })
}

/// The nondegeneracy of `omega^B` against invertibility of the reduced
/// bivector, and when nondegenerate, that the push-down inverts it.
pub fn check_omega_b(p: &ReductionProblem) -> Result<(ConditionReport, OmegaB), DiracError> {
    let ob = omega_b(p)?;
    let reduced = p.reduced_bivector(Complement::Default)?;
    let k = reduced.bivector.chart().dim();
    let invertible = matrix::rank(p.chart().vars(), k, reduced.bivector.matrix()) == k;
    let mut report = ConditionReport::new("symplectic case");
    let fail = (ob.nondegenerate != invertible).then(|| {
        format!(
            "omega^B is {}degenerate but the reduced bivector is {}invertible",
            if ob.nondegenerate { "non" } else { "" },
            if invertible { "" } else { "not " }
        )
    });
    let mut c = condition("nondegenerate_iff_invertible", fail, ob.degeneracy.clone());
    c.note = Some(match &ob.obstruction {
        Some(o) if !ob.nondegenerate => format!("degenerate: {o}"),
        _ => format!("nondegenerate: {}", ob.nondegenerate),
    });
    report.push(c);
    if ob.nondegenerate {
        let (pi_bar, d) = BivectorField::from_symplectic(&ob.pushed)?;
        let fail = (pi_bar != reduced.bivector).then(|| format!("inverse of omega^B is {pi_bar}"));
        report.push(condition("inverts_reduced", fail, d));
    }
    Ok((report, ob))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::fixture;

    fn problem(name: &str) -> ReductionProblem {
        ReductionProblem::from_scene(&fixture(name).unwrap().scene()).unwrap()
    }

    #[test]
    fn graph_examples() {
        let c = Chart::new(&["x", "y", "z"], &[]).unwrap();
        let pi = BivectorField::from_terms(&c, &[(0, 1, c.parse("z").unwrap())]).unwrap();
        let g = graph_of_bivector(&pi);
        assert!(g.is_lagrangian());
        let row = |s: &[&str]| -> Row { s.iter().map(|t| c.parse(t).unwrap()).collect() };
        assert!(g.contains(&row(&["0", "z", "0", "1", "0", "0"])));
        assert!(g.contains(&row(&["-z", "0", "0", "0", "1", "0"])));
        assert!(g.contains(&row(&["0", "0", "0", "0", "0", "1"])));
    }

    #[test]
    fn zxy_stretch_and_pullback() {
        let p = problem("zxy");
        let graph = graph_of_bivector(p.pi()).restrict(&p.constraint_positions()).unwrap();
        let s = stretch(&graph, p.b()).unwrap();
        let c = p.chart();
        let row = |s: &[&str]| -> Row { s.iter().map(|t| c.parse(t).unwrap()).collect() };
        let expected = DiracFrame::new(
            c,
            vec![
                row(&["0", "0", "1", "0", "0", "0"]),
                row(&["0", "0", "0", "1", "0", "0"]),
                row(&["0", "0", "0", "0", "1", "0"]),
            ],
        )
        .unwrap();
        assert!(s.span_eq(&expected));
        let pb = pullback(&s, &p.n_positions()).unwrap();
        let kf = kernel_and_form(&pb).unwrap();
        assert!(kf.kernel.is_empty());
        assert!(kf.form.is_none());
    }

    #[test]
    fn zero_b_stretch_is_identity() {
        let p = problem("zxy-b0");
        let graph = graph_of_bivector(p.pi()).restrict(&p.constraint_positions()).unwrap();
        assert!(stretch(&graph, p.b()).unwrap().span_eq(&graph));
    }

    #[test]
    fn form_extraction() {
        let c = Chart::new(&["x", "y"], &[]).unwrap();
        let w = TwoForm::from_terms(&c, &[(0, 1, c.one())]).unwrap();
        let kf = kernel_and_form(&graph_of_form(&w)).unwrap();
        assert!(kf.kernel.is_empty());
        assert_eq!(kf.form.unwrap(), w);
    }

    #[test]
    fn exr6_pullback_kernel_is_f() {
        let p = problem("exr6");
        let kf = kernel_and_form(&pulled_back_structure(&p).unwrap()).unwrap();
        assert_eq!(kf.kernel.len(), 1);
        let k = &kf.kernel[0];
        assert!(k.iter().enumerate().all(|(i, e)| (i == 1) != e.is_zero()));
    }

    #[test]
    fn pushpull_on_examples() {
        for name in ["poissonex", "exr6", "zxy", "exbsb"] {
            let r = check_pushpull(&problem(name)).unwrap();
            assert!(r.holds(), "{name}: {r:?}");
        }
    }

    #[test]
    fn poissonex_omega_b() {
        let p = problem("poissonex");
        let (r, ob) = check_omega_b(&p).unwrap();
        assert!(r.holds(), "{r:?}");
        assert!(ob.nondegenerate);
        assert_eq!(ob.pushed.to_string(), "(1/lambda) dy1^dy2");

        let s = fixture("poissonex").unwrap().scene().with_param("lambda", "0").unwrap();
        let p0 = ReductionProblem::from_scene(&s).unwrap();
        let (r, ob) = check_omega_b(&p0).unwrap();
        assert!(r.holds());
        assert!(!ob.nondegenerate);
        assert!(ob.obstruction.is_some());
    }

    #[test]
    fn symplectic_submanifold_with_orthogonal_b() {
        // N = {x2 = y2 = 0} in symplectic R^4, B = TN^omega
        let c = Chart::new(&["x1", "y1", "x2", "y2"], &[]).unwrap();
        let text = r#"{
            "coordinates": ["x1", "y1", "x2", "y2"],
            "symplectic": [["0","1","0","0"],["-1","0","0","0"],["0","0","0","1"],["0","0","-1","0"]],
            "constraints": 2,
            "B": [["0","0","1","0"],["0","0","0","1"]]
        }"#;
        let p = ReductionProblem::from_scene(&crate::scene::parse_scene(text).unwrap()).unwrap();
        let ob = omega_b(&p).unwrap();
        assert!(ob.nondegenerate);
        let sub = c.subchart(&[0, 1]);
        assert_eq!(ob.on_n, TwoForm::from_terms(&sub, &[(0, 1, sub.one())]).unwrap());
    }
}
