//! Strategies and property bodies shared by the property suites and the
//! acceptance target.
#![allow(dead_code)]

use num_rational::BigRational;
use proptest::prelude::*;
use proptest::test_runner::{Config, RngAlgorithm, TestCaseError, TestRng, TestRunner};

use poired::chartgeo::{
    differential, jacobiator, lie_derivative_bivector, poisson_bracket, sharp, BivectorField, Chart, VectorField,
};
use poired::fixtures::FIXTURES;
use poired::reduce::{Complement, ReductionProblem};
use poired::sublinalg::{annihilator, bivector_in_wedge, contains, intersect, span_eq, sum, Base, FrameKind, FramedSubbundle, Row, RowBasis};
use poired::RationalExpr;

pub const XYZ: &[&str] = &["x", "y", "z"];

pub fn chart(names: &[&str]) -> Chart {
    Chart::new(names, &[]).unwrap()
}

pub fn cases(n: u32) -> Config {
    Config {
        cases: n,
        failure_persistence: None,
        ..Config::default()
    }
}

/// A polynomial with small integer coefficients as source text.
pub fn poly(nvars: usize, max_exp: u32, max_terms: usize) -> impl Strategy<Value = String> {
    prop::collection::vec((-3i32..=3, prop::collection::vec(0..=max_exp, nvars)), 1..=max_terms).prop_map(move |terms| {
        terms
            .into_iter()
            .map(|(c, exps)| {
                let mut t = format!("({c})");
                for (i, e) in exps.into_iter().enumerate() {
                    if e > 0 {
                        t.push_str(&format!("*v{i}^{e}"));
                    }
                }
                t
            })
            .collect::<Vec<_>>()
            .join(" + ")
    })
}

/// Substitutes chart names for the placeholders `v0, v1, ...`.
pub fn over(chart: &Chart, text: &str) -> RationalExpr {
    let mut s = text.to_string();
    for i in (0..chart.dim()).rev() {
        s = s.replace(&format!("v{i}"), chart.name(i));
    }
    chart.parse(&s).unwrap()
}

/// A polynomial, or a polynomial over a denominator that never vanishes on the reals.
pub fn rational(nvars: usize) -> impl Strategy<Value = String> {
    (poly(nvars, 2, 3), prop::option::of(poly(nvars, 1, 2)))
        .prop_map(|(p, q)| match q {
            None => p,
            Some(q) => format!("({p})/(1 + ({q})^2)"),
        })
}

pub fn bivector(chart: &Chart, upper: &[String]) -> BivectorField {
    let n = chart.dim();
    let mut terms = Vec::new();
    let mut k = 0;
    for i in 0..n {
        for j in i + 1..n {
            terms.push((i, j, over(chart, &upper[k])));
            k += 1;
        }
    }
    BivectorField::from_terms(chart, &terms).unwrap()
}

pub fn vector(chart: &Chart, comps: &[String]) -> VectorField {
    VectorField::new(chart, comps.iter().map(|c| over(chart, c)).collect()).unwrap()
}

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), TestCaseError> {
    if ok {
        Ok(())
    } else {
        Err(TestCaseError::fail(msg()))
    }
}

/// Random bivector on three coordinates with two functions.
pub fn geo_case() -> impl Strategy<Value = (Vec<String>, String, String, String)> {
    (prop::collection::vec(poly(3, 2, 2), 3), rational(3), poly(3, 2, 3), poly(3, 2, 2))
}

pub fn antisymmetry((pi, f, g, _): &(Vec<String>, String, String, String)) -> Result<(), TestCaseError> {
    let c = chart(XYZ);
    let pi = bivector(&c, pi);
    let (f, g) = (over(&c, f), over(&c, g));
    let s = &poisson_bracket(&pi, &f, &g).unwrap() + &poisson_bracket(&pi, &g, &f).unwrap();
    ensure(s.is_zero(), || format!("{{f,g}} + {{g,f}} = {s}"))
}

pub fn leibniz((pi, f, g, h): &(Vec<String>, String, String, String)) -> Result<(), TestCaseError> {
    let c = chart(XYZ);
    let pi = bivector(&c, pi);
    let (f, g, h) = (over(&c, f), over(&c, g), over(&c, h));
    let lhs = poisson_bracket(&pi, &f, &(&g * &h)).unwrap();
    let rhs = &(&g * &poisson_bracket(&pi, &f, &h).unwrap()) + &(&h * &poisson_bracket(&pi, &f, &g).unwrap());
    ensure(lhs == rhs, || format!("{{f,gh}} = {lhs} but g{{f,h}} + h{{f,g}} = {rhs}"))
}

pub fn sharp_consistency((pi, f, g, _): &(Vec<String>, String, String, String)) -> Result<(), TestCaseError> {
    let c = chart(XYZ);
    let pi = bivector(&c, pi);
    let (f, g) = (over(&c, f), over(&c, g));
    let x = sharp(&pi, &differential(&c, &f).unwrap()).unwrap();
    let lhs = x.apply(&g);
    let rhs = poisson_bracket(&pi, &f, &g).unwrap();
    ensure(lhs == rhs, || format!("<sharp df, dg> = {lhs} but {{f,g}} = {rhs}"))
}

pub fn xfg_case() -> impl Strategy<Value = (Vec<String>, Vec<String>, String, String)> {
    (prop::collection::vec(poly(3, 2, 2), 3), prop::collection::vec(poly(3, 2, 2), 3), poly(3, 2, 3), poly(3, 2, 2))
}

/// `X{f,g} - {Xf,g} - {f,Xg} = (L_X Pi)(df, dg)`.
pub fn xfg((pi, x, f, g): &(Vec<String>, Vec<String>, String, String)) -> Result<(), TestCaseError> {
    let c = chart(XYZ);
    let pi = bivector(&c, pi);
    let x = vector(&c, x);
    let (f, g) = (over(&c, f), over(&c, g));
    let br = |a: &RationalExpr, b: &RationalExpr| poisson_bracket(&pi, a, b).unwrap();
    let lhs = &(&x.apply(&br(&f, &g)) - &br(&x.apply(&f), &g)) - &br(&f, &x.apply(&g));
    let l = lie_derivative_bivector(&x, &pi).unwrap();
    let rhs = l.contract(&c.gradient(&f), &c.gradient(&g));
    ensure(lhs == rhs, || format!("X{{f,g}} - {{Xf,g}} - {{f,Xg}} = {lhs} but (L_X Pi)(df,dg) = {rhs}"))
}

pub fn jacobiator_vanishes(pi: &BivectorField) -> Result<(), TestCaseError> {
    let j = jacobiator(pi);
    let bad = j.iter().find(|(_, v)| !v.is_zero());
    ensure(bad.is_none(), || format!("jacobiator {bad:?}"))
}

/// Frames of `rows` rows on a 4-dimensional chart whose entries are affine in two coordinates.
pub fn frame_case(max_rows: usize) -> impl Strategy<Value = Vec<Vec<String>>> {
    prop::collection::vec(prop::collection::vec(poly(2, 1, 2), 4), 1..=max_rows)
}

pub const FRAME_CHART: &[&str] = &["p", "q", "r", "s"];

pub fn frame(c: &Chart, rows: &[Vec<String>]) -> FramedSubbundle {
    let rows: Vec<Row> = rows.iter().map(|r| r.iter().map(|e| over(c, e)).collect()).collect();
    FramedSubbundle::spanned_by(c, FrameKind::Vector, Base::OnM, &rows).unwrap()
}

pub fn rank_complement(rows: &Vec<Vec<String>>) -> Result<(), TestCaseError> {
    let c = chart(FRAME_CHART);
    let s = frame(&c, rows);
    let a = annihilator(&s).unwrap();
    ensure(s.rank() + a.rank() == c.dim(), || format!("rank {} + rank {} != {}", s.rank(), a.rank(), c.dim()))?;
    for r in s.rows() {
        for b in a.rows() {
            let p = r.iter().zip(b).fold(c.zero(), |acc, (x, y)| &acc + &(x * y));
            ensure(p.is_zero(), || format!("annihilator row pairs to {p}"))?;
        }
    }
    Ok(())
}

pub fn biduality(rows: &Vec<Vec<String>>) -> Result<(), TestCaseError> {
    let c = chart(FRAME_CHART);
    let s = frame(&c, rows);
    let aa = annihilator(&annihilator(&s).unwrap()).unwrap();
    ensure(span_eq(&s, &aa), || "ann(ann(S)) != S".to_string())
}

pub fn intersection_contained((r1, r2): &(Vec<Vec<String>>, Vec<Vec<String>>)) -> Result<(), TestCaseError> {
    let c = chart(FRAME_CHART);
    let (s1, s2) = (frame(&c, r1), frame(&c, r2));
    let i = intersect(&s1, &s2).unwrap();
    for r in i.rows() {
        ensure(contains(&s1, r) && contains(&s2, r), || "intersection row outside a factor".to_string())?;
    }
    let total = sum(&[&s1, &s2]).unwrap();
    ensure(i.rank() + total.rank() == s1.rank() + s2.rank(), || {
        format!("dim S1 ∩ S2 = {}, dim S1 + S2 = {}, ranks {} and {}", i.rank(), total.rank(), s1.rank(), s2.rank())
    })
}

/// Whether `w` lies in `B ∧ T`, by solving `w = sum b_k ∧ v_k` as a linear
/// system in the flattened components.
pub fn wedge_oracle(w: &BivectorField, b: &FramedSubbundle) -> bool {
    let c = w.chart();
    let n = c.dim();
    let pairs: Vec<(usize, usize)> = (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))).collect();
    let mut basis = RowBasis::new(c.vars(), pairs.len());
    for bk in b.rows() {
        for e in 0..n {
            let v = c.unit(e);
            let row: Row = pairs.iter().map(|&(i, j)| &(&bk[i] * &v[j]) - &(&bk[j] * &v[i])).collect();
            basis.insert(&row);
        }
    }
    let target: Row = pairs.iter().map(|&(i, j)| w.entry(i, j).clone()).collect();
    basis.contains(&target)
}

pub fn wedge_case() -> impl Strategy<Value = (Vec<Vec<String>>, Vec<String>, Vec<String>, bool)> {
    (frame_case(2), prop::collection::vec(poly(2, 1, 2), 6), prop::collection::vec(poly(2, 1, 2), 4), any::<bool>())
}

/// Random `w`, or `b_1 ∧ v` plus a random element of the wedge, checked against the oracle.
pub fn wedge_agrees((rows, w, v, inside): &(Vec<Vec<String>>, Vec<String>, Vec<String>, bool)) -> Result<(), TestCaseError> {
    let c = chart(FRAME_CHART);
    let b = frame(&c, rows);
    let inside = *inside && !b.is_zero();
    let w = if inside {
        let b1 = VectorField::new(&c, b.rows()[0].clone()).unwrap();
        BivectorField::wedge(&b1, &vector(&c, v)).unwrap()
    } else {
        bivector(&c, w)
    };
    let fast = bivector_in_wedge(&w, &b).unwrap();
    ensure(fast == wedge_oracle(&w, &b), || format!("bivector_in_wedge = {fast} for {w}"))?;
    ensure(!inside || fast, || "b ∧ v not recognised".into())
}

/// Reduced bivector strings under each complement order, for every fixture
/// whose reduction is well defined.
pub fn complement_independence() -> Result<usize, String> {
    let mut checked = 0;
    for f in FIXTURES {
        let Ok(p) = ReductionProblem::from_scene(&f.scene()) else { continue };
        let Ok(r0) = p.reduced_bivector(Complement::Default) else { continue };
        for comp in [Complement::Reversed, Complement::Sheared] {
            let r = p.reduced_bivector(comp).map_err(|e| format!("{}: {e}", f.name))?;
            let a: Vec<String> = r0.bivector.matrix().iter().flatten().map(|e| e.to_string()).collect();
            let b: Vec<String> = r.bivector.matrix().iter().flatten().map(|e| e.to_string()).collect();
            if a != b {
                return Err(format!("{}: {comp:?} complement gives {}", f.name, r.bivector));
            }
        }
        checked += 1;
    }
    Ok(checked)
}

/// Runs `body` on `n` cases from a fixed seed; the error names the first failure.
pub fn run_cases<S: Strategy>(n: u32, strategy: S, body: impl Fn(&S::Value) -> Result<(), TestCaseError>) -> Result<(), String>
where
    S::Value: std::fmt::Debug,
{
    let mut runner = TestRunner::new_with_rng(cases(n), TestRng::deterministic_rng(RngAlgorithm::ChaCha));
    runner.run(&strategy, |v| body(&v)).map_err(|e| e.to_string())
}

pub fn q(n: i64, d: i64) -> BigRational {
    BigRational::new(n.into(), d.into())
}

/// The exr6 set-up with `alpha` substituted.
pub fn exr6(alpha: &str) -> String {
    poired::fixtures::fixture("exr6").unwrap().source.replace("x1*x2", &format!("({alpha})"))
}

/// The coisotropic set-up with `alpha` in the Poisson matrix substituted.
pub fn coiso(alpha: &str, d_alpha_dy1: &str) -> String {
    poired::fixtures::fixture("coiso")
        .unwrap()
        .source
        .replace("y1^2 + x2", &format!("({alpha})"))
        .replace("-2*x1*y1", &format!("-x1*({d_alpha_dy1})"))
        .replace("2*x1*y1", &format!("x1*({d_alpha_dy1})"))
}

/// Substitutes names for the placeholders of [`poly`].
pub fn alpha_in(names: &[&str], text: &str) -> String {
    let mut s = text.to_string();
    for (i, n) in names.iter().enumerate().rev() {
        s = s.replace(&format!("v{i}"), n);
    }
    s
}
