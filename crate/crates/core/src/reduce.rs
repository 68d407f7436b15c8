//! Reduction of a Poisson bracket to the quotient of a submanifold by a
//! distribution, and the sufficient conditions for the result to be Poisson.
//!
//! Input contract (adapted chart): `N` is the zero set of the trailing
//! `constraints` coordinates, and `F = B ∩ TN` is spanned by coordinate
//! directions of `N`. The quotient is then the slice of `N` obtained by
//! dropping the `F` coordinates.

use serde::Serialize;
use thiserror::Error;

use crate::chartgeo::{
    jacobiator, lie_bracket, lie_derivative_bivector, poisson_bracket, BivectorField, Chart, GeoError, TwoForm,
    VectorField,
};
use crate::scene::{Scene, SceneError};
use crate::sublinalg::matrix::{self, dot};
use crate::sublinalg::{
    annihilator, contains, contains_all, format_row, intersect, span_eq, sum, wedge_obstruction, Base,
    DegeneracyReport, FrameKind, FramedSubbundle, Insert, Row, RowBasis, SubError,
};
use crate::symkernel::{ExprError, RationalExpr};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ReduceError {
    #[error(transparent)]
    Scene(#[from] SceneError),
    #[error(transparent)]
    Geo(#[from] GeoError),
    #[error(transparent)]
    Sub(#[from] SubError),
    #[error(transparent)]
    Expr(#[from] ExprError),
    #[error("B is rank deficient: {0}")]
    RankDeficientB(SubError),
    #[error("F = B ∩ TN is not involutive: [{0}, {1}] = {2} is not in F")]
    FNotInvolutive(String, String, String),
    #[error("F = B ∩ TN = span{{{0}}} is not spanned by coordinate directions; change to an adapted chart")]
    FNotAligned(String),
    #[error("quotient coordinates must be the coordinates of N not spanning F ({expected}), got {found}")]
    BadQuotient { expected: String, found: String },
    #[error("function {0} is not constant along F; it does not live on the quotient")]
    NotFInvariant(String),
    #[error("TN + B + complement does not span the ambient tangent space")]
    Spanning(DegeneracyReport),
    #[error("reduced bracket {{{0}, {1}}} = {2} depends on the F coordinate {3}")]
    NotDescending(String, String, String, String),
    #[error("missing {0}")]
    Missing(&'static str),
    #[error("generators do not restrict onto a coordinate system of the quotient: rank {rank} < {dim}")]
    Surjectivity { rank: usize, dim: usize },
    #[error("problems are not comparable: {0}")]
    Mismatch(String),
}

/// How the complement of `TN + B` is completed to a basis.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Complement {
    /// Coordinate directions in declared order.
    Default,
    /// Coordinate directions in reverse order.
    Reversed,
    /// Reverse order, each direction shifted by the sum of the tangent
    /// coordinate directions, so it never coincides with `Default`.
    Sheared,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Holds,
    Fails,
    NotCertified,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Condition {
    pub name: String,
    pub verdict: Verdict,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
    pub degeneracy: DegeneracyReport,
}

impl Condition {
    fn new(name: &str, failure: Option<String>, degeneracy: DegeneracyReport) -> Self {
        Condition {
            name: name.to_string(),
            verdict: if failure.is_some() { Verdict::Fails } else { Verdict::Holds },
            witness: failure,
            note: None,
            degeneracy,
        }
    }

    fn note(mut self, note: impl Into<String>) -> Self {
        self.note = Some(note.into());
        self
    }

    pub fn holds(&self) -> bool {
        self.verdict == Verdict::Holds
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ConditionReport {
    pub title: String,
    pub conditions: Vec<Condition>,
}

impl ConditionReport {
    pub fn new(title: &str) -> Self {
        ConditionReport {
            title: title.to_string(),
            conditions: Vec::new(),
        }
    }

    pub fn push(&mut self, c: Condition) {
        self.conditions.push(c);
    }

    pub fn holds(&self) -> bool {
        self.conditions.iter().all(Condition::holds)
    }

    pub fn get(&self, name: &str) -> Option<&Condition> {
        self.conditions.iter().find(|c| c.name == name)
    }

    pub fn verdict(&self, name: &str) -> Option<Verdict> {
        self.get(name).map(|c| c.verdict)
    }
}

/// The reduced bracket on the quotient.
#[derive(Clone, Debug, PartialEq)]
pub struct Reduced {
    pub bivector: BivectorField,
    pub degeneracy: DegeneracyReport,
}

/// Inverse of a basis of `T_NM` adapted to `TN ⊕ B' ⊕ C`.
struct ExtensionBasis {
    inverse: Vec<Row>,
    degeneracy: DegeneracyReport,
}

#[derive(Clone, Debug)]
pub struct ReductionProblem {
    name: String,
    chart: Chart,
    pi: BivectorField,
    pi_n: BivectorField,
    omega: Option<TwoForm>,
    constraints: usize,
    b: FramedSubbundle,
    tn: FramedSubbundle,
    f: FramedSubbundle,
    f_coords: Vec<usize>,
    quotient: Vec<usize>,
    theta_d: Option<Vec<VectorField>>,
    d: Option<FramedSubbundle>,
    generators: Option<Vec<(String, RationalExpr)>>,
    degeneracy: DegeneracyReport,
}

fn parse_rows(chart: &Chart, rows: &[Vec<String>]) -> Result<Vec<Row>, ExprError> {
    rows.iter()
        .map(|r| r.iter().map(|s| chart.parse(s)).collect())
        .collect()
}

fn parse_matrix(chart: &Chart, rows: &[Vec<String>]) -> Result<Vec<Row>, ExprError> {
    parse_rows(chart, rows)
}

impl ReductionProblem {
    pub fn from_scene(scene: &Scene) -> Result<Self, ReduceError> {
        let chart = Chart::new(&scene.coordinates, &scene.parameters)?;
        let n = chart.dim();
        let c = scene.constraints;
        let constraint_pos: Vec<usize> = (n - c..n).collect();
        let n_pos: Vec<usize> = (0..n - c).collect();

        let (pi, omega) = match (&scene.poisson, &scene.symplectic) {
            (Some(m), _) => (BivectorField::new(&chart, parse_matrix(&chart, m)?)?, None),
            (None, Some(m)) => {
                let omega = TwoForm::new(&chart, parse_matrix(&chart, m)?)?;
                let (pi, _) = BivectorField::from_symplectic(&omega)?;
                (pi, Some(omega))
            }
            (None, None) => return Err(ReduceError::Missing("Poisson or symplectic structure")),
        };
        let pi_n = pi.restrict(&constraint_pos)?;

        let b_rows = parse_rows(&chart, &scene.b)?
            .into_iter()
            .map(|r| chart.restrict_row(&r, &constraint_pos))
            .collect::<Result<Vec<_>, _>>()?;
        let b = FramedSubbundle::new(&chart, FrameKind::Vector, Base::AlongN, b_rows).map_err(ReduceError::RankDeficientB)?;
        let tn = FramedSubbundle::coordinate(&chart, FrameKind::Vector, Base::AlongN, &n_pos);
        let f_generic = intersect(&tn, &b)?;
        let mut degeneracy = b.degeneracy().clone();
        degeneracy.merge(f_generic.degeneracy());

        // Involutivity of F, as vector fields on N.
        for (i, x) in f_generic.rows().iter().enumerate() {
            for y in &f_generic.rows()[i + 1..] {
                let xv = VectorField::new(&chart, x.clone())?;
                let yv = VectorField::new(&chart, y.clone())?;
                let br = lie_bracket(&xv, &yv)?;
                if !contains(&f_generic, br.comps()) {
                    return Err(ReduceError::FNotInvolutive(
                        format_row(&chart, x, FrameKind::Vector),
                        format_row(&chart, y, FrameKind::Vector),
                        format_row(&chart, br.comps(), FrameKind::Vector),
                    ));
                }
            }
        }
        let f_coords: Vec<usize> = n_pos
            .iter()
            .copied()
            .filter(|&p| f_generic.rows().iter().any(|r| !r[p].is_zero()))
            .collect();
        if f_coords.len() != f_generic.rank() {
            let frame: Vec<String> = f_generic.rows().iter().map(|r| format_row(&chart, r, FrameKind::Vector)).collect();
            return Err(ReduceError::FNotAligned(frame.join(", ")));
        }
        let f = FramedSubbundle::coordinate(&chart, FrameKind::Vector, Base::AlongN, &f_coords);

        let default_quotient: Vec<usize> = n_pos.iter().copied().filter(|p| !f_coords.contains(p)).collect();
        let quotient = match &scene.quotient {
            None => default_quotient,
            Some(names) => {
                let pos: Vec<usize> = names.iter().filter_map(|q| chart.position(q)).collect();
                let mut sorted = pos.clone();
                sorted.sort_unstable();
                if sorted != default_quotient || pos.len() != names.len() {
                    let expected: Vec<&str> = default_quotient.iter().map(|&p| chart.name(p)).collect();
                    return Err(ReduceError::BadQuotient {
                        expected: expected.join(", "),
                        found: names.join(", "),
                    });
                }
                pos
            }
        };

        let theta_d = match &scene.theta_d {
            None => None,
            Some(rows) => {
                let rows = parse_rows(&chart, rows)?;
                let frame = FramedSubbundle::new(&chart, FrameKind::Vector, Base::OnM, rows)?;
                Some(
                    frame
                        .rows()
                        .iter()
                        .map(|r| VectorField::new(&chart, r.clone()))
                        .collect::<Result<Vec<_>, _>>()?,
                )
            }
        };
        let d = match &scene.d {
            None => None,
            Some(rows) => Some(FramedSubbundle::new(&chart, FrameKind::Vector, Base::AlongN, parse_rows(&chart, rows)?)?),
        };
        let generators = match &scene.generators {
            None => None,
            Some(gens) => Some(
                gens.iter()
                    .map(|g| Ok((g.name.clone(), chart.parse(&g.expr)?)))
                    .collect::<Result<Vec<_>, ExprError>>()?,
            ),
        };
        Ok(ReductionProblem {
            name: scene.name.clone().unwrap_or_else(|| "scene".to_string()),
            chart,
            pi,
            pi_n,
            omega,
            constraints: c,
            b,
            tn,
            f,
            f_coords,
            quotient,
            theta_d,
            d,
            generators,
            degeneracy,
        })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn chart(&self) -> &Chart {
        &self.chart
    }

    pub fn pi(&self) -> &BivectorField {
        &self.pi
    }

    /// `Pi` with the constraint coordinates set to zero.
    pub fn pi_on_n(&self) -> &BivectorField {
        &self.pi_n
    }

    pub fn omega(&self) -> Option<&TwoForm> {
        self.omega.as_ref()
    }

    pub fn constraints(&self) -> usize {
        self.constraints
    }

    pub fn n_positions(&self) -> Vec<usize> {
        (0..self.chart.dim() - self.constraints).collect()
    }

    pub fn constraint_positions(&self) -> Vec<usize> {
        (self.chart.dim() - self.constraints..self.chart.dim()).collect()
    }

    pub fn b(&self) -> &FramedSubbundle {
        &self.b
    }

    pub fn tn(&self) -> &FramedSubbundle {
        &self.tn
    }

    pub fn f(&self) -> &FramedSubbundle {
        &self.f
    }

    pub fn f_coords(&self) -> &[usize] {
        &self.f_coords
    }

    pub fn quotient(&self) -> &[usize] {
        &self.quotient
    }

    pub fn quotient_names(&self) -> Vec<String> {
        self.quotient.iter().map(|&p| self.chart.name(p).to_string()).collect()
    }

    pub fn quotient_chart(&self) -> Chart {
        self.chart.subchart(&self.quotient)
    }

    /// Chart of `N`: the non-constraint coordinates.
    pub fn n_chart(&self) -> Chart {
        self.chart.subchart(&self.n_positions())
    }

    pub fn theta_d(&self) -> Option<&[VectorField]> {
        self.theta_d.as_deref()
    }

    pub fn d(&self) -> Option<&FramedSubbundle> {
        self.d.as_ref()
    }

    pub fn generators(&self) -> Option<&[(String, RationalExpr)]> {
        self.generators.as_deref()
    }

    pub fn degeneracy(&self) -> &DegeneracyReport {
        &self.degeneracy
    }

    fn restrict(&self, e: &RationalExpr) -> Result<RationalExpr, ExprError> {
        self.chart.restrict(e, &self.constraint_positions())
    }

    fn restrict_row(&self, r: &[RationalExpr]) -> Result<Row, ExprError> {
        self.chart.restrict_row(r, &self.constraint_positions())
    }

    fn row_str(&self, r: &[RationalExpr], kind: FrameKind) -> String {
        format_row(&self.chart, r, kind)
    }

    fn extension_basis(&self, complement: Complement) -> Result<ExtensionBasis, ReduceError> {
        let n = self.chart.dim();
        let vars = self.chart.vars();
        let mut basis = RowBasis::new(vars, n);
        let mut rows: Vec<Row> = Vec::with_capacity(n);
        for r in self.tn.rows() {
            basis.insert(r);
            rows.push(r.clone());
        }
        for r in self.b.rows() {
            if basis.insert(r) == Insert::Independent {
                rows.push(r.clone());
            }
        }
        let order: Vec<usize> = match complement {
            Complement::Default => (0..n).collect(),
            Complement::Reversed | Complement::Sheared => (0..n).rev().collect(),
        };
        for k in order {
            let mut cand = self.chart.unit(k);
            if complement == Complement::Sheared {
                for t in self.n_positions() {
                    cand[t] = &cand[t] + &self.chart.one();
                }
            }
            if basis.insert(&cand) == Insert::Independent {
                rows.push(cand);
            }
        }
        if rows.len() != n {
            return Err(ReduceError::Spanning(basis.degeneracy().clone()));
        }
        let (inv, mut degeneracy) = matrix::inverse(vars, &rows).map_err(|_| ReduceError::Spanning(basis.degeneracy().clone()))?;
        degeneracy.merge(basis.degeneracy());
        Ok(ExtensionBasis { inverse: inv, degeneracy })
    }

    fn check_on_quotient(&self, f: &RationalExpr) -> Result<(), ReduceError> {
        let bad = self
            .f_coords
            .iter()
            .chain(&self.constraint_positions())
            .any(|&p| f.depends_on(self.chart.var_index(p)));
        if bad {
            Err(ReduceError::NotFInvariant(f.to_string()))
        } else {
            Ok(())
        }
    }

    fn mu(&self, basis: &ExtensionBasis, f: &RationalExpr) -> Row {
        let vars = self.chart.vars();
        let t: Row = self
            .n_positions()
            .iter()
            .map(|&p| self.chart.partial(f, p))
            .collect();
        basis
            .inverse
            .iter()
            .map(|row| dot(vars, &row[..t.len()], &t))
            .collect()
    }

    /// The covector `mu_f` along `N` with `mu_f = df` on `TN`, `mu_f = 0` on
    /// `B` and on the chosen complement: the differential of every
    /// `B`-invariant extension of `f` built from that complement.
    pub fn extension_differential(&self, f: &RationalExpr, complement: Complement) -> Result<(Row, DegeneracyReport), ReduceError> {
        self.check_on_quotient(f)?;
        let basis = self.extension_basis(complement)?;
        Ok((self.mu(&basis, f), basis.degeneracy))
    }

    /// `f + sum_k mu_f(d/dc_k) c_k`: a function on `M` whose differential
    /// along `N` is `mu_f`, hence `B`-invariant.
    pub fn default_extension(&self, f: &RationalExpr) -> Result<RationalExpr, ReduceError> {
        let (mu, _) = self.extension_differential(f, Complement::Default)?;
        let mut g = f.clone();
        for k in self.constraint_positions() {
            g = &g + &(&mu[k] * &self.chart.coord(k));
        }
        Ok(g)
    }

    /// Entries `Pi|_N(mu_a, mu_b)` for quotient coordinates, before checking descent.
    fn raw_reduced(&self, complement: Complement) -> Result<(Vec<Row>, DegeneracyReport), ReduceError> {
        let basis = self.extension_basis(complement)?;
        let mus: Vec<Row> = self
            .quotient
            .iter()
            .map(|&q| self.mu(&basis, &self.chart.coord(q)))
            .collect();
        let k = mus.len();
        let mut m = vec![vec![self.chart.zero(); k]; k];
        for a in 0..k {
            for b in a + 1..k {
                let v = self.pi_n.contract(&mus[a], &mus[b]);
                m[b][a] = -&v;
                m[a][b] = v;
            }
        }
        Ok((m, basis.degeneracy))
    }

    fn descent_failure(&self, m: &[Row]) -> Option<(usize, usize, usize)> {
        for (a, row) in m.iter().enumerate() {
            for (b, e) in row.iter().enumerate().skip(a + 1) {
                if let Some(&s) = self.f_coords.iter().find(|&&s| e.depends_on(self.chart.var_index(s))) {
                    return Some((a, b, s));
                }
            }
        }
        None
    }

    /// The reduced bivector on the quotient coordinates.
    pub fn reduced_bivector(&self, complement: Complement) -> Result<Reduced, ReduceError> {
        let (m, degeneracy) = self.raw_reduced(complement)?;
        if let Some((a, b, s)) = self.descent_failure(&m) {
            return Err(ReduceError::NotDescending(
                self.chart.name(self.quotient[a]).to_string(),
                self.chart.name(self.quotient[b]).to_string(),
                m[a][b].to_string(),
                self.chart.name(s).to_string(),
            ));
        }
        let bivector = BivectorField::new(&self.quotient_chart(), m)?;
        Ok(Reduced { bivector, degeneracy })
    }

    fn b_ann(&self) -> Result<FramedSubbundle, ReduceError> {
        Ok(annihilator(&self.b)?)
    }

    /// First `beta` in a frame of `B°` with `sharp(beta)` outside `target`.
    fn sharp_b_ann_outside(&self, target: &FramedSubbundle) -> Result<(Option<String>, DegeneracyReport), ReduceError> {
        let ann = self.b_ann()?;
        let mut deg = ann.degeneracy().clone();
        deg.merge(target.degeneracy());
        for beta in ann.rows() {
            let s = self.pi_n.sharp_row(beta);
            if !contains(target, &s) {
                return Ok((
                    Some(format!(
                        "sharp({}) = {}",
                        self.row_str(beta, FrameKind::Covector),
                        self.row_str(&s, FrameKind::Vector)
                    )),
                    deg,
                ));
            }
        }
        Ok((None, deg))
    }

    /// Whether the reduced bracket is independent of the chosen extensions
    /// and descends to the quotient.
    pub fn check_well_defined(&self) -> Result<ConditionReport, ReduceError> {
        let mut report = ConditionReport::new("well-defined reduced bracket");
        let tn_b = sum(&[&self.tn, &self.b])?;
        let (fail, deg) = self.sharp_b_ann_outside(&tn_b)?;
        report.push(Condition::new("extension_independence", fail, deg));

        let (m, deg) = self.raw_reduced(Complement::Default)?;
        let fail = self.descent_failure(&m).map(|(a, b, s)| {
            format!(
                "{{{}, {}}} = {} depends on {}",
                self.chart.name(self.quotient[a]),
                self.chart.name(self.quotient[b]),
                m[a][b],
                self.chart.name(s)
            )
        });
        report.push(Condition::new("descends_to_quotient", fail, deg.clone()));

        let mut fail = None;
        let mut deg_all = deg;
        for alt in [Complement::Reversed, Complement::Sheared] {
            let (m2, d2) = self.raw_reduced(alt)?;
            deg_all.merge(&d2);
            if fail.is_some() {
                continue;
            }
            'outer: for a in 0..m.len() {
                for b in a + 1..m.len() {
                    if m[a][b] != m2[a][b] {
                        fail = Some(format!(
                            "{{{}, {}}} is {} with the default complement, {} with the {:?} one",
                            self.chart.name(self.quotient[a]),
                            self.chart.name(self.quotient[b]),
                            m[a][b],
                            m2[a][b],
                            alt
                        ));
                        break 'outer;
                    }
                }
            }
        }
        report.push(Condition::new("complement_independence", fail, deg_all));
        Ok(report)
    }

    /// Nonzero jacobiator components of the reduced bivector, by coordinate names.
    pub fn jacobi_obstructions(&self) -> Result<Vec<([String; 3], RationalExpr)>, ReduceError> {
        let r = self.reduced_bivector(Complement::Default)?;
        let qc = r.bivector.chart().clone();
        Ok(jacobiator(&r.bivector)
            .into_iter()
            .filter(|(_, v)| !v.is_zero())
            .map(|((i, j, k), v)| ([qc.name(i).to_string(), qc.name(j).to_string(), qc.name(k).to_string()], v))
            .collect())
    }

    pub fn check_jacobi_reduced(&self) -> Result<ConditionReport, ReduceError> {
        let mut report = ConditionReport::new("Jacobi identity of the reduced bracket");
        let r = self.reduced_bivector(Complement::Default)?;
        let obstructions = self.jacobi_obstructions()?;
        let fail = if obstructions.is_empty() {
            None
        } else {
            Some(
                obstructions
                    .iter()
                    .map(|([a, b, c], v)| format!("Jac({a}, {b}, {c}) = {v}"))
                    .collect::<Vec<_>>()
                    .join("; "),
            )
        };
        report.push(Condition::new("jacobi", fail, r.degeneracy));
        Ok(report)
    }

    fn sharp_b_ann_in_tn(&self) -> Result<Condition, ReduceError> {
        let (fail, deg) = self.sharp_b_ann_outside(&self.tn)?;
        Ok(Condition::new("sharp_B_ann_in_TN", fail, deg))
    }

    /// First pair `(g_i, g_j)` and `d` in `targets` with `d{g_i,g_j}(d) != 0` along `N`.
    fn bracket_failure(&self, gens: &[(String, RationalExpr)], targets: &FramedSubbundle) -> Result<Option<String>, ReduceError> {
        let vars = self.chart.vars();
        for (i, (ni, gi)) in gens.iter().enumerate() {
            for (nj, gj) in &gens[i + 1..] {
                let h = poisson_bracket(&self.pi, gi, gj)?;
                let dh = self.restrict_row(&self.chart.gradient(&h))?;
                for t in targets.rows() {
                    let v = dot(vars, &dh, t);
                    if !v.is_zero() {
                        return Ok(Some(format!(
                            "{{{ni}, {nj}}} = {h}; d{{{ni}, {nj}}}({}) = {v}",
                            self.row_str(t, FrameKind::Vector)
                        )));
                    }
                }
            }
        }
        Ok(None)
    }

    fn invariance_failure(&self, gens: &[(String, RationalExpr)]) -> Result<Option<String>, ReduceError> {
        let vars = self.chart.vars();
        for (name, g) in gens {
            let dg = self.restrict_row(&self.chart.gradient(g))?;
            for b in self.b.rows() {
                let v = dot(vars, &dg, b);
                if !v.is_zero() {
                    return Ok(Some(format!("d{name}({}) = {v}", self.row_str(b, FrameKind::Vector))));
                }
            }
        }
        Ok(None)
    }

    /// Generators for canonicity tests: the scene's, or the default
    /// extensions of the quotient coordinates.
    pub fn canonicity_generators(&self) -> Result<Vec<(String, RationalExpr)>, ReduceError> {
        match &self.generators {
            Some(g) => Ok(g.clone()),
            None => self
                .quotient
                .iter()
                .map(|&q| Ok((self.chart.name(q).to_string(), self.default_extension(&self.chart.coord(q))?)))
                .collect(),
        }
    }

    /// Marsden-Ratiu: the necessary condition for a nonzero canonical `B`,
    /// canonicity on generators, and the Poisson-submanifold test for `B = 0`.
    pub fn check_marsden_ratiu(&self) -> Result<ConditionReport, ReduceError> {
        let mut report = ConditionReport::new("Marsden-Ratiu");
        if self.b.is_zero() {
            let mut fail = None;
            for k in self.constraint_positions() {
                let s = self.pi_n.sharp_row(&self.chart.unit(k));
                if !contains(&self.tn, &s) {
                    fail = Some(format!("sharp(d{}) = {}", self.chart.name(k), self.row_str(&s, FrameKind::Vector)));
                    break;
                }
            }
            report.push(
                Condition::new("poisson_submanifold", fail, DegeneracyReport::new())
                    .note("B = 0: reducible iff N is a Poisson submanifold"),
            );
            return Ok(report);
        }
        report.push(self.sharp_b_ann_in_tn()?);
        let gens = self.canonicity_generators()?;
        let mut fail = self.invariance_failure(&gens)?;
        if fail.is_none() {
            fail = self.bracket_failure(&gens, &self.b)?;
        }
        let holds = fail.is_none();
        let mut c = Condition::new("canonical", fail, self.b.degeneracy().clone());
        c = if holds {
            c.note("certified on the subalgebra generated by the generators")
        } else {
            c.note("refuted: B-invariant functions whose bracket is not B-invariant")
        };
        report.push(c);
        Ok(report)
    }

    fn lieder_failure(&self, x: &VectorField, label: &str) -> Result<(Option<String>, DegeneracyReport), ReduceError> {
        let l = lie_derivative_bivector(x, &self.pi)?;
        let w = l.restrict(&self.constraint_positions())?;
        let deg = annihilator(&self.b)?.degeneracy().clone();
        Ok((
            wedge_obstruction(&w, &self.b)?.map(|(b1, b2, v)| {
                format!(
                    "(L_X Pi)({}, {}) = {v} for X = {label}",
                    self.row_str(&b1, FrameKind::Covector),
                    self.row_str(&b2, FrameKind::Covector)
                )
            }),
            deg,
        ))
    }

    /// The proposition with `D = F`: `sharp B° ⊂ TN` and, on coordinate
    /// extensions of a frame of `F`, `(L_X Pi)|_N ⊂ B ∧ T_NM`.
    pub fn check_prop_onn(&self) -> Result<ConditionReport, ReduceError> {
        let mut report = ConditionReport::new("reducibility with D = F");
        report.push(self.sharp_b_ann_in_tn()?);
        let mut fail = None;
        let mut deg = DegeneracyReport::new();
        for &s in &self.f_coords {
            let x = VectorField::coordinate(&self.chart, s);
            let (f, d) = self.lieder_failure(&x, &format!("d/d{}", self.chart.name(s)))?;
            deg.merge(&d);
            if f.is_some() {
                fail = f;
                break;
            }
        }
        let c = Condition::new("lieder_on_F", fail, deg);
        report.push(if self.f.is_zero() { c.note("F = 0") } else { c });
        Ok(report)
    }

    /// `D` along `N` from `theta_D`.
    fn theta_d_on_n(&self, theta: &[VectorField]) -> Result<FramedSubbundle, ReduceError> {
        let rows: Vec<Row> = theta
            .iter()
            .map(|x| self.restrict_row(x.comps()))
            .collect::<Result<_, _>>()?;
        Ok(FramedSubbundle::spanned_by(&self.chart, FrameKind::Vector, Base::AlongN, &rows)?)
    }

    /// Sufficient compatibility test: sections of `theta_D` restricting into
    /// `F` preserve vector fields restricting into `B`.
    fn compatibility_by_brackets(&self, theta: &[VectorField], d: &FramedSubbundle) -> Result<Option<String>, ReduceError> {
        let vars = self.chart.vars();
        let theta_n: Vec<Row> = theta
            .iter()
            .map(|x| self.restrict_row(x.comps()))
            .collect::<Result<_, _>>()?;
        // Columns of theta_n^T: solve sum_i a_i theta_i|_N = e_s.
        let n = self.chart.dim();
        let a_mat: Vec<Row> = (0..n).map(|j| theta_n.iter().map(|r| r[j].clone()).collect()).collect();
        for &s in &self.f_coords {
            let rhs: Vec<Row> = (0..n).map(|j| vec![self.chart.unit(s)[j].clone()]).collect();
            let coeffs = match matrix::solve(vars, &a_mat, &rhs) {
                Ok((x, _)) => x,
                Err(_) => return Ok(Some(format!("d/d{} is not in D", self.chart.name(s)))),
            };
            let mut comps = vec![self.chart.zero(); n];
            for (i, x) in theta.iter().enumerate() {
                let a = &coeffs[i][0];
                for j in 0..n {
                    comps[j] = &comps[j] + &(a * &x.comps()[j]);
                }
            }
            let xs = VectorField::new(&self.chart, comps)?;
            for b in self.b.rows() {
                let bv = VectorField::new(&self.chart, b.clone())?;
                let br = self.restrict_row(lie_bracket(&xs, &bv)?.comps())?;
                if !contains(&self.b, &br) {
                    return Ok(Some(format!(
                        "[X, {}] = {} is not in B",
                        self.row_str(b, FrameKind::Vector),
                        self.row_str(&br, FrameKind::Vector)
                    )));
                }
            }
        }
        let _ = d;
        Ok(None)
    }

    /// Reducibility through an integrable distribution `theta_D` on `M`.
    pub fn check_prop_thetad(&self) -> Result<ConditionReport, ReduceError> {
        let theta = self.theta_d.as_deref().ok_or(ReduceError::Missing("theta_D"))?;
        let mut report = ConditionReport::new("reducibility through theta_D");

        let frame = RowBasis::from_rows(
            self.chart.vars(),
            self.chart.dim(),
            &theta.iter().map(|x| x.comps().to_vec()).collect::<Vec<_>>(),
        );
        let mut fail = None;
        'outer: for (i, x) in theta.iter().enumerate() {
            for y in &theta[i + 1..] {
                let br = lie_bracket(x, y)?;
                if !frame.contains(br.comps()) {
                    fail = Some(format!(
                        "[{}, {}] = {}",
                        self.row_str(x.comps(), FrameKind::Vector),
                        self.row_str(y.comps(), FrameKind::Vector),
                        self.row_str(br.comps(), FrameKind::Vector)
                    ));
                    break 'outer;
                }
            }
        }
        report.push(Condition::new("theta_D_involutive", fail, frame.degeneracy().clone()));

        let d = self.theta_d_on_n(theta)?;
        let fail = self
            .f
            .rows()
            .iter()
            .find(|r| !contains(&d, r))
            .map(|r| format!("{} is not in D", self.row_str(r, FrameKind::Vector)));
        report.push(Condition::new("F_in_D", fail, d.degeneracy().clone()));
        let fail = d
            .rows()
            .iter()
            .find(|r| !contains(&self.b, r))
            .map(|r| format!("{} is not in B", self.row_str(r, FrameKind::Vector)));
        report.push(Condition::new("D_in_B", fail, d.degeneracy().clone()));

        let compat = if span_eq(&d, &self.b) {
            Condition::new("compatible", None, DegeneracyReport::new()).note("D = B")
        } else if self.f.is_zero() {
            Condition::new("compatible", None, DegeneracyReport::new()).note("F = 0")
        } else {
            match self.compatibility_by_brackets(theta, &d)? {
                None => Condition::new("compatible", None, DegeneracyReport::new())
                    .note("sections of theta_D along F preserve sections of B"),
                Some(w) => Condition {
                    name: "compatible".into(),
                    verdict: Verdict::NotCertified,
                    witness: Some(w),
                    note: Some("no sufficient condition applies; this is not a refutation".into()),
                    degeneracy: DegeneracyReport::new(),
                },
            }
        };
        report.push(compat);

        let d_tn = sum(&[&d, &self.tn])?;
        let (fail, deg) = self.sharp_b_ann_outside(&d_tn)?;
        report.push(Condition::new("sharp_B_ann_in_D_plus_TN", fail, deg));

        let mut fail = None;
        let mut deg = DegeneracyReport::new();
        for x in theta {
            let (f, dd) = self.lieder_failure(x, &self.row_str(x.comps(), FrameKind::Vector))?;
            deg.merge(&dd);
            if f.is_some() {
                fail = f;
                break;
            }
        }
        report.push(Condition::new("lieder", fail, deg));
        Ok(report)
    }

    /// The general theorem on a finite generator family.
    pub fn check_thm_gen(&self) -> Result<ConditionReport, ReduceError> {
        let gens = self.generators.as_deref().ok_or(ReduceError::Missing("generators"))?;
        let d = self.d.clone().unwrap_or_else(|| self.f.clone());

        // Surjectivity onto functions on the quotient.
        let q = self.quotient.len();
        let mut rows = Vec::new();
        for (_, g) in gens {
            let gn = self.restrict(g)?;
            if self.f_coords.iter().any(|&s| gn.depends_on(self.chart.var_index(s))) {
                continue;
            }
            rows.push(self.quotient.iter().map(|&p| self.chart.partial(&gn, p)).collect::<Row>());
        }
        let rank = matrix::rank(self.chart.vars(), q, &rows);
        if rank < q {
            return Err(ReduceError::Surjectivity { rank, dim: q });
        }

        let mut report = ConditionReport::new("generator theorem");
        let fail = if !contains_all(&d, &self.f) {
            Some("F is not contained in D".to_string())
        } else if !contains_all(&self.b, &d) {
            Some("D is not contained in B".to_string())
        } else {
            None
        };
        report.push(Condition::new("F_in_D_in_B", fail, d.degeneracy().clone()));
        let d_tn = sum(&[&d, &self.tn])?;
        let (fail, deg) = self.sharp_b_ann_outside(&d_tn)?;
        report.push(Condition::new("sharp_B_ann_in_D_plus_TN", fail, deg));
        report.push(Condition::new("generators_B_invariant", self.invariance_failure(gens)?, DegeneracyReport::new()));
        report.push(Condition::new("brackets_D_invariant", self.bracket_failure(gens, &d)?, DegeneracyReport::new()));
        Ok(report)
    }
}

/// Compares the reduced structures of two problems sharing `N`, `Pi` and `F`.
pub fn check_uniqueness_pair(p1: &ReductionProblem, p2: &ReductionProblem) -> Result<ConditionReport, ReduceError> {
    if p1.chart.names() != p2.chart.names() || p1.constraints != p2.constraints {
        return Err(ReduceError::Mismatch("different charts or submanifolds".into()));
    }
    let same_pi = p1
        .pi
        .matrix()
        .iter()
        .flatten()
        .zip(p2.pi.matrix().iter().flatten())
        .all(|(a, b)| a.to_string() == b.to_string());
    if !same_pi {
        return Err(ReduceError::Mismatch("different Poisson structures".into()));
    }
    if p1.f_coords != p2.f_coords || p1.quotient != p2.quotient {
        return Err(ReduceError::Mismatch("different F or quotient coordinates".into()));
    }
    let mut report = ConditionReport::new("uniqueness of the induced structure");
    let n1 = p1.sharp_b_ann_in_tn()?;
    let n2 = p2.sharp_b_ann_in_tn()?;
    let preconditions = n1.holds() && n2.holds() && !p1.b.is_zero() && !p2.b.is_zero();
    report.push(Condition { name: "first_sharp_B_ann_in_TN".into(), ..n1 });
    report.push(Condition { name: "second_sharp_B_ann_in_TN".into(), ..n2 });

    let r1 = p1.reduced_bivector(Complement::Default)?;
    let r2 = p2.reduced_bivector(Complement::Default)?;
    let k = p1.quotient.len();
    let mut fail = None;
    'outer: for a in 0..k {
        for b in a + 1..k {
            let (x, y) = (r1.bivector.entry(a, b).to_string(), r2.bivector.entry(a, b).to_string());
            if x != y {
                let qc = r1.bivector.chart();
                fail = Some(format!("{{{}, {}}} is {x} for the first, {y} for the second", qc.name(a), qc.name(b)));
                break 'outer;
            }
        }
    }
    let differs = fail.is_some();
    let mut c = Condition::new("same_reduced_bivector", fail, DegeneracyReport::new());
    if differs && !preconditions {
        c = c.note("contrast: reduced structure depends on B");
    }
    report.push(c);
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scene::parse_scene;

    fn problem(text: &str) -> ReductionProblem {
        ReductionProblem::from_scene(&parse_scene(text).unwrap()).unwrap()
    }

    const ZXY: &str = r#"{
        "coordinates": ["x", "y", "z"],
        "poisson": [["0", "z", "0"], ["-z", "0", "0"], ["0", "0", "0"]],
        "constraints": 1,
        "B": [["0", "0", "1"]]
    }"#;

    const POISSONEX: &str = r#"{
        "coordinates": ["y1", "y2", "x1", "x2"],
        "parameters": ["lambda"],
        "symplectic": [["0","0","-1","0"],["0","0","0","-1"],["1","0","0","0"],["0","1","0","0"]],
        "constraints": 2,
        "B": [["0","0","1","0"], ["-lambda","0","0","1"]]
    }"#;

    #[test]
    fn zxy_reduces_to_zero() {
        let p = problem(ZXY);
        assert!(p.f().is_zero());
        assert_eq!(p.quotient_names(), vec!["x", "y"]);
        let r = p.reduced_bivector(Complement::Default).unwrap();
        assert!(r.bivector.is_zero());
        let mr = p.check_marsden_ratiu().unwrap();
        assert_eq!(mr.verdict("canonical"), Some(Verdict::Fails));
        assert!(mr.get("canonical").unwrap().witness.as_ref().unwrap().contains("{x, y} = z"));
        assert!(p.check_prop_onn().unwrap().holds());
    }

    #[test]
    fn poissonex_extension_and_bracket() {
        let p = problem(POISSONEX);
        let c = p.chart().clone();
        let (mu, _) = p.extension_differential(&c.coord(0), Complement::Default).unwrap();
        assert_eq!(mu, vec![c.one(), c.zero(), c.zero(), c.parse("lambda").unwrap()]);
        let r = p.reduced_bivector(Complement::Default).unwrap();
        assert_eq!(r.bivector.entry(0, 1), &c.parse("lambda").unwrap());
        assert!(p.check_well_defined().unwrap().holds());
        assert_eq!(p.check_marsden_ratiu().unwrap().verdict("sharp_B_ann_in_TN"), Some(Verdict::Fails));
    }

    #[test]
    fn f_invariance_is_required() {
        let p = problem(ZXY);
        let z = p.chart().coord(2);
        assert!(matches!(
            p.extension_differential(&z, Complement::Default),
            Err(ReduceError::NotFInvariant(_))
        ));
    }

    #[test]
    fn proportional_b_rows_are_rejected() {
        let text = ZXY.replace(r#""B": [["0", "0", "1"]]"#, r#""B": [["0", "0", "1"], ["0", "0", "2"]]"#);
        let err = ReductionProblem::from_scene(&parse_scene(&text).unwrap()).unwrap_err();
        assert!(matches!(err, ReduceError::RankDeficientB(_)), "{err}");
    }

    #[test]
    fn b_zero_poisson_submanifold() {
        let text = ZXY.replace(r#""B": [["0", "0", "1"]]"#, r#""B": []"#);
        let p = problem(&text);
        let mr = p.check_marsden_ratiu().unwrap();
        assert_eq!(mr.verdict("poisson_submanifold"), Some(Verdict::Holds));
    }

    #[test]
    fn misaligned_f_needs_chart_change() {
        let text = r#"{
            "coordinates": ["x", "y", "z"],
            "poisson": [["0", "1", "0"], ["-1", "0", "0"], ["0", "0", "0"]],
            "constraints": 1,
            "B": [["1", "1", "0"]]
        }"#;
        let err = ReductionProblem::from_scene(&parse_scene(text).unwrap()).unwrap_err();
        assert!(matches!(err, ReduceError::FNotAligned(_)), "{err}");
    }
}
