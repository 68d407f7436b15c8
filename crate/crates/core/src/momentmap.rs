//! Hamiltonian actions and duals of Lie algebras: moment-map verification,
//! the transversality condition at a point of `J^{-1}(0)`, the subbundle
//! `B = [g_M + (TN + g_M)^omega]|_N`, and Lie-Poisson reduction.

use std::collections::BTreeMap;

use num_rational::BigRational;
use num_traits::{One, Zero};
use thiserror::Error;

use crate::chartgeo::{jacobiator, lie_derivative_bivector, BivectorField, Chart, GeoError, TwoForm, VectorField};
use crate::reduce::{Complement, Condition, ConditionReport, ReduceError, ReductionProblem, Verdict};
use crate::scene::{parse_scene, LieAlgebraSection, Scene, SceneError};
use crate::sublinalg::matrix::{self, Insert};
use crate::sublinalg::{
    format_row, intersect, span_eq, sum, Base, DegeneracyReport, FrameKind, FramedSubbundle, Row, RowBasis, SubError,
};
use crate::symkernel::{ExprError, RationalExpr, VarSet};

#[derive(Clone, Debug, PartialEq, Error)]
pub enum MomentError {
    #[error("scene has no {0} section")]
    Missing(&'static str),
    #[error("the action needs a symplectic form")]
    NotSymplectic,
    #[error("{0}")]
    Invalid(String),
    #[error("base point is not on N: {0} = {1}")]
    OffN(String, String),
    #[error("J does not vanish at the base point: <J, {0}> = {1}")]
    JNonzero(String, String),
    #[error("g_M does not have constant rank: {0}")]
    RankJump(String),
    #[error("{0} is not a subalgebra: {1}")]
    NotSubalgebra(String, String),
    #[error("[h, V ∩ h] is not contained in V: {0}")]
    NotInV(String),
    #[error(transparent)]
    Scene(#[from] SceneError),
    #[error(transparent)]
    Reduce(#[from] ReduceError),
    #[error(transparent)]
    Geo(#[from] GeoError),
    #[error(transparent)]
    Expr(#[from] ExprError),
    #[error(transparent)]
    Sub(#[from] SubError),
}

fn holds(name: &str, failure: Option<String>) -> Condition {
    Condition {
        name: name.to_string(),
        verdict: if failure.is_some() { Verdict::Fails } else { Verdict::Holds },
        witness: failure,
        note: None,
        degeneracy: DegeneracyReport::new(),
    }
}

fn q(n: i64) -> BigRational {
    BigRational::from_integer(n.into())
}

/// Structure constants: `[e_i, e_j] = sum_k c[i][j][k] e_k`.
#[derive(Clone, Debug, PartialEq)]
pub struct LieAlgebra {
    basis: Vec<String>,
    c: Vec<Vec<Vec<BigRational>>>,
}

impl LieAlgebra {
    /// Unlisted brackets are zero; `[b, a]` defaults to `-[a, b]`.
    pub fn new(basis: &[String], brackets: &[[String; 3]]) -> Result<Self, MomentError> {
        let d = basis.len();
        let mut c = vec![vec![vec![BigRational::zero(); d]; d]; d];
        let mut given = vec![vec![false; d]; d];
        let alg = LieAlgebra {
            basis: basis.to_vec(),
            c: c.clone(),
        };
        for [a, b, v] in brackets {
            let i = alg.index(a)?;
            let j = alg.index(b)?;
            let v = alg.element(v)?;
            c[i][j] = v.clone();
            given[i][j] = true;
            if !given[j][i] {
                c[j][i] = v.iter().map(|x| -x).collect();
            }
        }
        Ok(LieAlgebra { basis: basis.to_vec(), c })
    }

    pub fn from_section(section: &LieAlgebraSection) -> Result<Self, MomentError> {
        Self::new(&section.basis, &section.brackets)
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn basis(&self) -> &[String] {
        &self.basis
    }

    pub fn constants(&self) -> &[Vec<Vec<BigRational>>] {
        &self.c
    }

    fn index(&self, name: &str) -> Result<usize, MomentError> {
        self.basis
            .iter()
            .position(|b| b == name)
            .ok_or_else(|| MomentError::Invalid(format!("`{name}` is not a basis element")))
    }

    fn vars(&self) -> VarSet {
        VarSet::new(self.basis.clone())
    }

    /// Coefficients of a linear expression in the basis.
    pub fn element(&self, text: &str) -> Result<Vec<BigRational>, MomentError> {
        let vars = self.vars();
        let e = vars.parse(text)?;
        let zero = vec![BigRational::zero(); vars.len()];
        let coeffs: Option<Vec<BigRational>> = (0..vars.len()).map(|i| e.diff(i).constant_value()).collect();
        match coeffs {
            Some(cs) if e.eval(&zero)? == BigRational::zero() => Ok(cs),
            _ => Err(MomentError::Invalid(format!("`{text}` is not linear in the basis"))),
        }
    }

    pub fn bracket(&self, a: &[BigRational], b: &[BigRational]) -> Vec<BigRational> {
        let d = self.dim();
        let mut out = vec![BigRational::zero(); d];
        for i in (0..d).filter(|&i| !a[i].is_zero()) {
            for j in (0..d).filter(|&j| !b[j].is_zero()) {
                let ab = &a[i] * &b[j];
                for (o, c) in out.iter_mut().zip(&self.c[i][j]) {
                    *o += &ab * c;
                }
            }
        }
        out
    }

    pub fn format(&self, v: &[BigRational]) -> String {
        let vars = self.vars();
        let mut e = vars.zero();
        for (i, x) in v.iter().enumerate() {
            e = &e + &RationalExpr::var(&vars, i).scale(x);
        }
        e.to_string()
    }

    fn unit(&self, i: usize) -> Vec<BigRational> {
        (0..self.dim()).map(|k| if k == i { q(1) } else { q(0) }).collect()
    }

    pub fn antisymmetry_failure(&self) -> Option<String> {
        let d = self.dim();
        for i in 0..d {
            for j in i..d {
                let sum: Vec<BigRational> = self.c[i][j].iter().zip(&self.c[j][i]).map(|(a, b)| a + b).collect();
                if sum.iter().any(|x| !x.is_zero()) {
                    return Some(format!(
                        "[{0}, {1}] + [{1}, {0}] = {2}",
                        self.basis[i],
                        self.basis[j],
                        self.format(&sum)
                    ));
                }
            }
        }
        None
    }

    pub fn jacobi_failure(&self) -> Option<String> {
        let d = self.dim();
        for i in 0..d {
            for j in i + 1..d {
                for k in j + 1..d {
                    let (a, b, c) = (self.unit(i), self.unit(j), self.unit(k));
                    let t1 = self.bracket(&a, &self.bracket(&b, &c));
                    let t2 = self.bracket(&b, &self.bracket(&c, &a));
                    let t3 = self.bracket(&c, &self.bracket(&a, &b));
                    let s: Vec<BigRational> = (0..d).map(|x| &(&t1[x] + &t2[x]) + &t3[x]).collect();
                    if s.iter().any(|x| !x.is_zero()) {
                        return Some(format!(
                            "Jacobi fails on ({}, {}, {}): {}",
                            self.basis[i],
                            self.basis[j],
                            self.basis[k],
                            self.format(&s)
                        ));
                    }
                }
            }
        }
        None
    }
}

/// A Hamiltonian action on a symplectic chart.
#[derive(Clone, Debug)]
pub struct ActionFixture {
    pub chart: Chart,
    pub omega: TwoForm,
    pub algebra: LieAlgebra,
    pub generators: Vec<VectorField>,
    /// `<J, e_i>` for each basis element.
    pub moment: Vec<RationalExpr>,
    pub constraints: usize,
    pub base_point: BTreeMap<String, BigRational>,
}

impl ActionFixture {
    pub fn from_scene(scene: &Scene) -> Result<Self, MomentError> {
        let section = scene.action.as_ref().ok_or(MomentError::Missing("action"))?;
        let sym = scene.symplectic.as_ref().ok_or(MomentError::NotSymplectic)?;
        let chart = Chart::new(&scene.coordinates, &scene.parameters)?;
        let parse_rows = |rows: &[Vec<String>]| -> Result<Vec<Row>, ExprError> {
            rows.iter().map(|r| r.iter().map(|s| chart.parse(s)).collect()).collect()
        };
        let omega = TwoForm::new(&chart, parse_rows(sym)?)?;
        let generators = parse_rows(&section.generators)?
            .into_iter()
            .map(|r| VectorField::new(&chart, r))
            .collect::<Result<Vec<_>, _>>()?;
        let moment = section.moment.iter().map(|s| chart.parse(s)).collect::<Result<Vec<_>, _>>()?;
        let base_point = scene
            .base_point
            .iter()
            .flatten()
            .map(|(k, v)| {
                let x = chart
                    .vars()
                    .parse(v)?
                    .constant_value()
                    .ok_or_else(|| MomentError::Invalid(format!("base point value `{v}` is not a number")))?;
                Ok((k.clone(), x))
            })
            .collect::<Result<_, MomentError>>()?;
        Ok(ActionFixture {
            chart,
            omega,
            algebra: LieAlgebra::new(&section.basis, &section.brackets)?,
            generators,
            moment,
            constraints: scene.constraints,
            base_point,
        })
    }

    fn constraint_positions(&self) -> Vec<usize> {
        (self.chart.dim() - self.constraints..self.chart.dim()).collect()
    }

    fn point(&self) -> Result<Vec<BigRational>, MomentError> {
        let vars = self.chart.vars();
        (0..vars.len())
            .map(|i| {
                let name = vars.name(i);
                match self.base_point.get(name) {
                    Some(v) => Ok(v.clone()),
                    None if self.chart.position(name).is_some() => Ok(BigRational::zero()),
                    None => Err(MomentError::Invalid(format!("parameter `{name}` needs a value at the base point"))),
                }
            })
            .collect()
    }
}

/// `i_{xi_M} omega = d<J, xi>` for each basis element, the structure
/// constants, and invariance of the Poisson structure under each generator.
pub fn verify_moment_map(a: &ActionFixture) -> Result<ConditionReport, MomentError> {
    let mut report = ConditionReport::new("moment map");
    report.push(holds("structure_antisymmetric", a.algebra.antisymmetry_failure()));
    report.push(holds("structure_jacobi", a.algebra.jacobi_failure()));
    let (pi, deg) = BivectorField::from_symplectic(&a.omega)?;
    for (i, (x, j)) in a.generators.iter().zip(&a.moment).enumerate() {
        let lhs = a.omega.interior(x)?;
        let rhs = a.chart.gradient(j);
        let fail = lhs.comps().iter().zip(&rhs).zip(0..).find(|((l, r), _)| l != r).map(|((l, r), k)| {
            format!(
                "(i_X omega)(d/d{0}) = {l} but d<J, {1}>(d/d{0}) = {r}",
                a.chart.name(k),
                a.algebra.basis()[i]
            )
        });
        report.push(holds(&format!("hamiltonian_{}", a.algebra.basis()[i]), fail));
        let l = lie_derivative_bivector(x, &pi)?;
        let fail = (!l.is_zero()).then(|| format!("L_X Pi = {l} for X = {}", a.algebra.basis()[i]));
        let mut c = holds(&format!("preserves_pi_{}", a.algebra.basis()[i]), fail);
        c.degeneracy = deg.clone();
        report.push(c);
    }
    Ok(report)
}

/// `T_mN ⊕ ker(d_mJ) = T_mM` at the base point `m`.
pub fn check_transversality(a: &ActionFixture) -> Result<ConditionReport, MomentError> {
    let point = a.point()?;
    let n = a.chart.dim();
    for p in a.constraint_positions() {
        let v = &point[a.chart.var_index(p)];
        if !v.is_zero() {
            return Err(MomentError::OffN(a.chart.name(p).to_string(), v.to_string()));
        }
    }
    for (i, j) in a.moment.iter().enumerate() {
        let v = j.eval(&point)?;
        if !v.is_zero() {
            return Err(MomentError::JNonzero(a.algebra.basis()[i].clone(), v.to_string()));
        }
    }
    let vars = a.chart.vars();
    let dj: Vec<Row> = a
        .moment
        .iter()
        .map(|j| {
            a.chart
                .gradient(j)
                .iter()
                .map(|e| Ok(RationalExpr::constant(vars, e.eval(&point)?)))
                .collect::<Result<Row, ExprError>>()
        })
        .collect::<Result<_, _>>()?;
    let (ker, _) = matrix::kernel(vars, n, &dj);
    let tn: Vec<Row> = (0..n - a.constraints).map(|i| a.chart.unit(i)).collect();
    let mut basis = RowBasis::new(vars, n);
    let mut fail = None;
    for r in tn.iter().chain(&ker) {
        if basis.insert(r) != Insert::Independent {
            fail = Some(format!(
                "{} lies in T_mN + ker(d_mJ) already; dim T_mN = {}, dim ker(d_mJ) = {}",
                format_row(&a.chart, r, FrameKind::Vector),
                tn.len(),
                ker.len()
            ));
            break;
        }
    }
    if fail.is_none() && basis.rank() != n {
        fail = Some(format!("T_mN + ker(d_mJ) has dimension {} < {n}", basis.rank()));
    }
    let mut report = ConditionReport::new("transversality at the base point");
    report.push(holds("direct_sum", fail));
    Ok(report)
}

/// `B = g_M|_N + (TN + g_M)^omega|_N`, together with a report that it has
/// constant rank near the base point and meets `TN` trivially.
pub fn build_action_b(a: &ActionFixture) -> Result<(FramedSubbundle, ConditionReport), MomentError> {
    let chart = &a.chart;
    let vars = chart.vars();
    let n = chart.dim();
    let cpos = a.constraint_positions();
    let gm_rows: Vec<Row> = a
        .generators
        .iter()
        .map(|x| chart.restrict_row(x.comps(), &cpos))
        .collect::<Result<_, _>>()?;
    let gm = FramedSubbundle::spanned_by(chart, FrameKind::Vector, Base::AlongN, &gm_rows)?;
    if gm.is_zero() {
        return Err(MomentError::RankJump("g_M vanishes identically along N".into()));
    }
    let point = a.point()?;
    let at_point: Vec<Row> = gm
        .rows()
        .iter()
        .map(|r| r.iter().map(|e| Ok(RationalExpr::constant(vars, e.eval(&point)?))).collect())
        .collect::<Result<_, ExprError>>()?;
    let r0 = matrix::rank(vars, n, &at_point);
    if r0 != gm.rank() {
        return Err(MomentError::RankJump(format!(
            "rank {} along N but {r0} at the base point",
            gm.rank()
        )));
    }
    let omega = a.omega.restrict(&cpos)?;
    let tn = FramedSubbundle::coordinate(chart, FrameKind::Vector, Base::AlongN, &(0..n - a.constraints).collect::<Vec<_>>());
    let tn_gm = sum(&[&tn, &gm])?;
    let eqs: Vec<Row> = tn_gm
        .rows()
        .iter()
        .map(|w| (0..n).map(|i| omega.eval(&chart.unit(i), w)).collect())
        .collect();
    let (perp, _) = matrix::kernel(vars, n, &eqs);
    let perp = FramedSubbundle::spanned_by(chart, FrameKind::Vector, Base::AlongN, &perp)?;
    let b = sum(&[&gm, &perp])?;
    let f = intersect(&tn, &b)?;
    let mut report = ConditionReport::new("B from the action");
    let fail = (!f.is_zero()).then(|| {
        let rows: Vec<String> = f.rows().iter().map(|r| format_row(chart, r, FrameKind::Vector)).collect();
        format!("B ∩ TN = span{{{}}}", rows.join(", "))
    });
    let mut c = holds("F_zero", fail);
    c.degeneracy = b.degeneracy().clone();
    report.push(c);
    Ok((b, report))
}

/// Compares the scene's `B` with the one built from the action.
pub fn check_action_b(scene: &Scene) -> Result<ConditionReport, MomentError> {
    let a = ActionFixture::from_scene(scene)?;
    let (built, mut report) = build_action_b(&a)?;
    let p = ReductionProblem::from_scene(scene)?;
    let fail = (!span_eq(&built, p.b())).then(|| {
        let rows: Vec<String> = built.rows().iter().map(|r| format_row(&a.chart, r, FrameKind::Vector)).collect();
        format!("B from the action is span{{{}}}", rows.join(", "))
    });
    report.push(holds("scene_B_matches", fail));
    Ok(report)
}

/// Writes `target` as `c_0 + sum_k c_k basis[k]` with rational `c`, if possible.
pub fn affine_coefficients(target: &RationalExpr, basis: &[RationalExpr]) -> Option<Vec<BigRational>> {
    let vars = target.vars().clone();
    let unknowns = basis.len() + 1;
    let mut a = Vec::new();
    let mut rhs = Vec::new();
    let mut seed = 0i64;
    while a.len() < 3 * unknowns + 2 && seed < 50 * (unknowns as i64 + 2) {
        seed += 1;
        let point: Vec<BigRational> = (0..vars.len())
            .map(|i| q((seed * 7 + (i as i64 + 1) * (seed % 5 + 3)) % 23 + 2) / q((i as i64 + seed) % 4 + 1))
            .collect();
        let Ok(t) = target.eval(&point) else { continue };
        let Ok(vals) = basis.iter().map(|f| f.eval(&point)).collect::<Result<Vec<_>, _>>() else { continue };
        let mut row = vec![RationalExpr::one(&vars)];
        row.extend(vals.into_iter().map(|v| RationalExpr::constant(&vars, v)));
        a.push(row);
        rhs.push(vec![RationalExpr::constant(&vars, t)]);
    }
    let (x, _) = matrix::solve(&vars, &a, &rhs).ok()?;
    let coeffs: Vec<BigRational> = x.iter().map(|r| r[0].constant_value().expect("constant system")).collect();
    let mut recombined = RationalExpr::constant(&vars, coeffs[0].clone());
    for (f, c) in basis.iter().zip(&coeffs[1..]) {
        recombined = &recombined + &f.scale(c);
    }
    (recombined == *target).then_some(coeffs)
}

/// Brackets of `coords` under `pi`, each written as an affine function of
/// the coords; the resulting linear structure is checked for Jacobi.
pub fn check_linearizing(pi: &BivectorField, coords: &[(String, RationalExpr)]) -> Result<ConditionReport, MomentError> {
    let names: Vec<&str> = coords.iter().map(|(n, _)| n.as_str()).collect();
    let target = Chart::new(&names, &[])?;
    let funcs: Vec<RationalExpr> = coords.iter().map(|(_, f)| f.clone()).collect();
    let k = coords.len();
    let mut m = vec![vec![target.zero(); k]; k];
    let mut fail = None;
    'outer: for a in 0..k {
        for b in a + 1..k {
            let br = crate::chartgeo::poisson_bracket(pi, &funcs[a], &funcs[b])?;
            match affine_coefficients(&br, &funcs) {
                Some(cs) => {
                    let mut e = RationalExpr::constant(target.vars(), cs[0].clone());
                    for (i, c) in cs[1..].iter().enumerate() {
                        e = &e + &target.coord(i).scale(c);
                    }
                    m[b][a] = -&e;
                    m[a][b] = e;
                }
                None => {
                    fail = Some(format!("{{{}, {}}} = {br} is not affine in the new coordinates", names[a], names[b]));
                    break 'outer;
                }
            }
        }
    }
    let mut report = ConditionReport::new("linearizing coordinates");
    let linear_fail = fail.clone();
    report.push(holds("brackets_linear", linear_fail));
    if fail.is_none() {
        let lin = BivectorField::new(&target, m)?;
        let obstruction = jacobiator(&lin).into_iter().find(|(_, v)| !v.is_zero());
        let fail = obstruction.map(|((i, j, l), v)| {
            format!("Jac({}, {}, {}) = {v}", target.name(i), target.name(j), target.name(l))
        });
        let mut c = holds("linear_jacobi", fail);
        c.note = Some(lin.to_string());
        report.push(c);
    }
    Ok(report)
}

/// The adapted set-up for `g*`, `N = V°`, `B = h°`.
#[derive(Clone, Debug)]
pub struct LiePoissonSetup {
    pub algebra: LieAlgebra,
    /// Adapted basis of `g`: complement `W` of `h + V`, complement `H'` of
    /// `h ∩ V` in `h`, complement `V'` of `h ∩ V` in `V`, then `K = h ∩ V`.
    pub adapted: Vec<Vec<BigRational>>,
    pub counts: [usize; 4],
    pub scene: Scene,
}

fn to_row(vars: &VarSet, v: &[BigRational]) -> Row {
    v.iter().map(|x| RationalExpr::constant(vars, x.clone())).collect()
}

fn from_row(r: &[RationalExpr]) -> Vec<BigRational> {
    r.iter().map(|e| e.constant_value().expect("constant row")).collect()
}

pub fn lie_poisson_setup(section: &LieAlgebraSection) -> Result<LiePoissonSetup, MomentError> {
    let alg = LieAlgebra::from_section(section)?;
    let d = alg.dim();
    let vars = alg.vars();
    let h: Vec<Vec<BigRational>> = section.subalgebra.iter().map(|s| alg.element(s)).collect::<Result<_, _>>()?;
    let v: Vec<Vec<BigRational>> = section.subspace.iter().map(|s| alg.element(s)).collect::<Result<_, _>>()?;
    let hb = RowBasis::from_rows(&vars, d, &h.iter().map(|x| to_row(&vars, x)).collect::<Vec<_>>());
    let vb = RowBasis::from_rows(&vars, d, &v.iter().map(|x| to_row(&vars, x)).collect::<Vec<_>>());
    for a in &h {
        for b in &h {
            let br = alg.bracket(a, b);
            if !hb.contains(&to_row(&vars, &br)) {
                return Err(MomentError::NotSubalgebra(
                    "h".into(),
                    format!("[{}, {}] = {}", alg.format(a), alg.format(b), alg.format(&br)),
                ));
            }
        }
    }
    // K = h ∩ V as the common kernel of both annihilators
    let (ann_h, _) = matrix::kernel(&vars, d, hb.rows());
    let (ann_v, _) = matrix::kernel(&vars, d, vb.rows());
    let both: Vec<Row> = ann_h.into_iter().chain(ann_v).collect();
    let (k, _) = matrix::kernel(&vars, d, &both);
    for a in &h {
        for kk in &k {
            let br = alg.bracket(a, &from_row(kk));
            if !vb.contains(&to_row(&vars, &br)) {
                return Err(MomentError::NotInV(format!(
                    "[{}, {}] = {}",
                    alg.format(a),
                    alg.format(&from_row(kk)),
                    alg.format(&br)
                )));
            }
        }
    }
    let complete = |start: &[Row], candidates: &[Row]| -> Vec<Row> {
        let mut b = RowBasis::from_rows(&vars, d, start);
        candidates.iter().filter(|c| b.insert(c) == Insert::Independent).cloned().collect()
    };
    let h_rows: Vec<Row> = h.iter().map(|x| to_row(&vars, x)).collect();
    let v_rows: Vec<Row> = v.iter().map(|x| to_row(&vars, x)).collect();
    let h_prime = complete(&k, &h_rows);
    let v_prime = complete(&k, &v_rows);
    let spanned: Vec<Row> = k.iter().chain(&h_prime).chain(&v_prime).cloned().collect();
    let units: Vec<Row> = (0..d).map(|i| to_row(&vars, &alg.unit(i))).collect();
    let w = complete(&spanned, &units);
    let counts = [w.len(), h_prime.len(), v_prime.len(), k.len()];
    let adapted_rows: Vec<Row> = w.into_iter().chain(h_prime).chain(v_prime).chain(k).collect();
    let adapted: Vec<Vec<BigRational>> = adapted_rows.iter().map(|r| from_row(r)).collect();

    // coordinates u_a = <x, p_a>; x = P^{-1} u
    let mut names: Vec<String> = adapted
        .iter()
        .enumerate()
        .map(|(a, p)| {
            let nz: Vec<usize> = (0..d).filter(|&i| !p[i].is_zero()).collect();
            if nz.len() == 1 && p[nz[0]].is_one() {
                alg.basis()[nz[0]].to_lowercase()
            } else {
                format!("u{}", a + 1)
            }
        })
        .collect();
    let distinct = names.iter().collect::<std::collections::BTreeSet<_>>().len() == names.len();
    if !distinct || names.iter().any(|s| s.parse::<f64>().is_ok()) {
        names = (1..=d).map(|i| format!("u{i}")).collect();
    }
    let (pinv, _) = matrix::inverse(&vars, &adapted_rows).expect("adapted basis is a basis");
    let pinv: Vec<Vec<BigRational>> = pinv.iter().map(|r| from_row(r)).collect();
    let uvars = VarSet::new(names.clone());
    let mut poisson = vec![vec!["0".to_string(); d]; d];
    for a in 0..d {
        for b in 0..d {
            let br = alg.bracket(&adapted[a], &adapted[b]);
            let mut e = uvars.zero();
            for c in 0..d {
                let coeff: BigRational = (0..d).map(|k| &br[k] * &pinv[k][c]).sum();
                e = &e + &RationalExpr::var(&uvars, c).scale(&coeff);
            }
            poisson[a][b] = e.to_string();
        }
    }
    let [nw, nh, nv, _] = counts;
    let unit_row = |i: usize| -> Vec<String> { (0..d).map(|j| if i == j { "1".into() } else { "0".into() }).collect() };
    let b_rows: Vec<Vec<String>> = (0..nw).chain(nw + nh..nw + nh + nv).map(unit_row).collect();
    let scene = Scene {
        name: None,
        description: None,
        coordinates: names,
        parameters: Vec::new(),
        poisson: Some(poisson),
        symplectic: None,
        constraints: d - nw - nh,
        b: b_rows.clone(),
        theta_d: Some(b_rows),
        d: None,
        quotient: None,
        generators: None,
        base_point: None,
        action: None,
        lie_algebra: Some(section.clone()),
    }
    .validated()?;
    Ok(LiePoissonSetup {
        algebra: alg,
        adapted,
        counts,
        scene,
    })
}

/// The Lie-Poisson structure of `h / (h ∩ V)` on the quotient chart of `p`,
/// computed from structure constants alone.
pub fn lie_poisson_oracle(setup: &LiePoissonSetup, quotient_chart: &Chart) -> Result<BivectorField, MomentError> {
    let [nw, nh, _, nk] = setup.counts;
    let alg = &setup.algebra;
    let vars = alg.vars();
    let d = alg.dim();
    let hp: Vec<&Vec<BigRational>> = setup.adapted[nw..nw + nh].iter().collect();
    let kk: Vec<&Vec<BigRational>> = setup.adapted[d - nk..].iter().collect();
    // basis of h as columns: H' then K
    let cols: Vec<&Vec<BigRational>> = hp.iter().chain(kk.iter()).copied().collect();
    let a: Vec<Row> = (0..d)
        .map(|i| cols.iter().map(|c| RationalExpr::constant(&vars, c[i].clone())).collect())
        .collect();
    let mut m = vec![vec![quotient_chart.zero(); nh]; nh];
    for x in 0..nh {
        for y in 0..nh {
            let br = alg.bracket(hp[x], hp[y]);
            let rhs: Vec<Row> = br.iter().map(|b| vec![RationalExpr::constant(&vars, b.clone())]).collect();
            let (coef, _) = matrix::solve(&vars, &a, &rhs).map_err(|_| MomentError::NotSubalgebra("h".into(), alg.format(&br)))?;
            let mut e = quotient_chart.zero();
            for (c, row) in coef.iter().take(nh).enumerate() {
                let cv = row[0].constant_value().expect("constant");
                e = &e + &quotient_chart.coord(c).scale(&cv);
            }
            m[x][y] = e;
        }
    }
    Ok(BivectorField::new(quotient_chart, m)?)
}

#[derive(Clone, Debug)]
pub struct LiePoissonReduction {
    pub setup: LiePoissonSetup,
    pub reduced: BivectorField,
    pub oracle: BivectorField,
}

pub fn lie_poisson_reduce(section: &LieAlgebraSection) -> Result<LiePoissonReduction, MomentError> {
    let setup = lie_poisson_setup(section)?;
    let p = ReductionProblem::from_scene(&setup.scene)?;
    let reduced = p.reduced_bivector(Complement::Default)?.bivector;
    let oracle = lie_poisson_oracle(&setup, &p.quotient_chart())?;
    Ok(LiePoissonReduction { setup, reduced, oracle })
}

/// For a scene carrying a `lie_algebra` section: the scene is the adapted
/// set-up of that algebra, and its reduction matches the oracle.
pub fn check_lie_poisson(scene: &Scene) -> Result<ConditionReport, MomentError> {
    let section = scene.lie_algebra.as_ref().ok_or(MomentError::Missing("lie_algebra"))?;
    let lp = lie_poisson_reduce(section)?;
    let mut report = ConditionReport::new("Lie-Poisson reduction");
    let built = &lp.setup.scene;
    let fail = if built.coordinates != scene.coordinates || built.constraints != scene.constraints {
        Some(format!(
            "expected coordinates [{}] with {} constraints",
            built.coordinates.join(", "),
            built.constraints
        ))
    } else if built.poisson != scene.poisson {
        Some("Poisson matrix differs from the Lie-Poisson structure".to_string())
    } else {
        let p1 = ReductionProblem::from_scene(built)?;
        let p2 = ReductionProblem::from_scene(scene)?;
        (!span_eq(p1.b(), p2.b())).then(|| "B differs from the annihilator of h".to_string())
    };
    report.push(holds("scene_matches_algebra", fail));
    let fail = (lp.reduced != lp.oracle).then(|| format!("reduced {} but h/(h ∩ V) gives {}", lp.reduced, lp.oracle));
    let mut c = holds("matches_oracle", fail);
    c.note = Some(format!("reduced: {}", lp.reduced));
    report.push(c);
    Ok(report)
}

/// The U(2) example's linearizing coordinates on the slice.
pub fn u2_linearizing_coordinates(chart: &Chart) -> Result<Vec<(String, RationalExpr)>, ExprError> {
    [
        ("xi1", "x1*x2/2"),
        ("xi2", "x1*x3/2"),
        ("xi3", "(x1^2 - x2^2 - x3^2 - x4^2)/4"),
        ("eta", "(x1^2 + x2^2 + x3^2 + x4^2)/4"),
    ]
    .into_iter()
    .map(|(n, e)| Ok((n.to_string(), chart.parse(e)?)))
    .collect()
}

/// Parses a Lie-algebra-only description into a full adapted scene.
pub fn scene_from_algebra(text: &str) -> Result<Scene, MomentError> {
    let section: LieAlgebraSection = serde_json::from_str(text).map_err(|e| MomentError::Invalid(e.to_string()))?;
    let setup = lie_poisson_setup(&section)?;
    Ok(parse_scene(&setup.scene.render())?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::fixture;

    fn action(name: &str) -> ActionFixture {
        ActionFixture::from_scene(&fixture(name).unwrap().scene()).unwrap()
    }

    #[test]
    fn u2_moment_map() {
        let a = action("u2-gl2c");
        let r = verify_moment_map(&a).unwrap();
        assert!(r.holds(), "{r:?}");
        assert!(check_transversality(&a).unwrap().holds());
        let (b, rep) = build_action_b(&a).unwrap();
        assert!(rep.holds());
        assert_eq!(b.rank(), 4);
    }

    #[test]
    fn rotation_moment_map() {
        let a = action("r2-rotation");
        assert!(verify_moment_map(&a).unwrap().holds());
        assert!(check_transversality(&a).unwrap().holds());
        let t = action("r2-rotation-tangent");
        assert!(!check_transversality(&t).unwrap().holds());
    }

    #[test]
    fn corrupted_moment_fails() {
        let mut a = action("r2-rotation");
        a.moment[0] = -&a.moment[0];
        let r = verify_moment_map(&a).unwrap();
        assert_eq!(r.verdict("hamiltonian_r"), Some(Verdict::Fails));
        assert!(r.get("hamiltonian_r").unwrap().witness.is_some());
    }

    #[test]
    fn zero_action_is_rejected() {
        let mut a = action("r2-rotation");
        a.generators[0] = VectorField::zero(&a.chart);
        assert!(matches!(build_action_b(&a), Err(MomentError::RankJump(_))));
    }

    #[test]
    fn base_point_must_be_on_j_zero() {
        let mut a = action("r2-rotation");
        a.base_point.insert("x".into(), q(2));
        assert!(matches!(check_transversality(&a), Err(MomentError::JNonzero(..))));
    }

    #[test]
    fn structure_constants_are_checked() {
        let b = |s: &[&str]| s.iter().map(|x| x.to_string()).collect::<Vec<_>>();
        let tri = |a: &str, b: &str, c: &str| [a.to_string(), b.to_string(), c.to_string()];
        let bad = LieAlgebra::new(&b(&["X", "Y"]), &[tri("X", "Y", "X"), tri("Y", "X", "X")]).unwrap();
        assert!(bad.antisymmetry_failure().is_some());
        let non_jacobi =
            LieAlgebra::new(&b(&["X", "Y", "Z"]), &[tri("X", "Y", "X"), tri("Y", "Z", "Y"), tri("X", "Z", "Z")]).unwrap();
        assert!(non_jacobi.jacobi_failure().is_some());
    }

    #[test]
    fn heisenberg_and_sl2_match_oracle() {
        for name in ["heisenberg-dual", "sl2-dual"] {
            let s = fixture(name).unwrap().scene();
            let r = check_lie_poisson(&s).unwrap();
            assert!(r.holds(), "{name}: {r:?}");
        }
        let lp = lie_poisson_reduce(fixture("sl2-dual").unwrap().scene().lie_algebra.as_ref().unwrap()).unwrap();
        assert_eq!(lp.reduced.to_string(), "(2*e) d/dh^d/de");
        let lp = lie_poisson_reduce(fixture("heisenberg-dual").unwrap().scene().lie_algebra.as_ref().unwrap()).unwrap();
        assert!(lp.reduced.is_zero());
        assert_eq!(lp.reduced.chart().dim(), 1);
    }

    #[test]
    fn identity_reduction_gives_full_structure() {
        let section = LieAlgebraSection {
            basis: vec!["H".into(), "E".into(), "F".into()],
            brackets: vec![
                ["H".into(), "E".into(), "2*E".into()],
                ["H".into(), "F".into(), "-2*F".into()],
                ["E".into(), "F".into(), "H".into()],
            ],
            subalgebra: vec!["H".into(), "E".into(), "F".into()],
            subspace: vec![],
        };
        let lp = lie_poisson_reduce(&section).unwrap();
        assert_eq!(lp.reduced, lp.oracle);
        assert_eq!(lp.reduced.to_string(), "(2*e) d/dh^d/de + (-2*f) d/dh^d/df + (h) d/de^d/df");
    }

    #[test]
    fn non_adapted_subspaces_use_generic_names() {
        let section = LieAlgebraSection {
            basis: vec!["H".into(), "E".into(), "F".into()],
            brackets: vec![
                ["H".into(), "E".into(), "2*E".into()],
                ["H".into(), "F".into(), "-2*F".into()],
                ["E".into(), "F".into(), "H".into()],
            ],
            subalgebra: vec!["H".into(), "E + F".into()],
            subspace: vec![],
        };
        assert!(matches!(lie_poisson_reduce(&section), Err(MomentError::NotSubalgebra(..))));
        let section = LieAlgebraSection { subalgebra: vec!["H + E".into()], ..section };
        let lp = lie_poisson_reduce(&section).unwrap();
        assert_eq!(lp.reduced, lp.oracle);
        let coords = &lp.setup.scene.coordinates;
        assert!(coords.iter().any(|c| c.starts_with('u')), "{coords:?}");
        assert!(coords.iter().all(|c| c.starts_with('u') || ["h", "e", "f"].contains(&c.as_str())));
    }

    #[test]
    fn ideal_condition_is_enforced() {
        let mut section = fixture("sl2-dual").unwrap().scene().lie_algebra.unwrap();
        section.subalgebra = vec!["H".into(), "E".into()];
        section.subspace = vec!["E".into(), "F".into()];
        // K = span{E}; [H, E] = 2E ∈ V
        assert!(lie_poisson_reduce(&section).is_ok());
        section.subalgebra = vec!["E".into()];
        section.subspace = vec!["E".into()];
        assert!(lie_poisson_reduce(&section).is_ok());
        section.subalgebra = vec!["H".into(), "E".into()];
        section.subspace = vec!["H".into()];
        // K = span{H}; [E, H] = -2E ∉ V
        assert!(matches!(lie_poisson_reduce(&section), Err(MomentError::NotInV(_))));
    }

    #[test]
    fn u2_linearizing() {
        let s = fixture("u2-gl2c").unwrap().scene();
        let p = ReductionProblem::from_scene(&s).unwrap();
        let r = p.reduced_bivector(Complement::Default).unwrap();
        let coords = u2_linearizing_coordinates(r.bivector.chart()).unwrap();
        let rep = check_linearizing(&r.bivector, &coords).unwrap();
        assert!(rep.holds(), "{rep:?}");
    }
}
