//! Acceptance criteria, one line each. Run with `cargo test --test acceptance`.

mod common;

use std::process::ExitCode;
use std::time::Instant;

use common::*;
use poired::analysis::analyze;
use poired::dirac::{check_omega_b, check_pushpull, kernel_and_form, pulled_back_structure};
use poired::fixtures::{fixture, FIXTURES};
use poired::momentmap::{check_linearizing, lie_poisson_reduce, u2_linearizing_coordinates, verify_moment_map, ActionFixture};
use poired::reduce::{Complement, ReductionProblem, Verdict};
use poired::scene::{parse_scene, Scene};
use poired::sublinalg::{span_eq, Base, FrameKind, FramedSubbundle, Row};
use poired::BivectorField;

type Outcome = Result<String, String>;

fn check(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn scene(name: &str) -> Scene {
    fixture(name).unwrap().scene()
}

fn problem(s: &Scene) -> Result<ReductionProblem, String> {
    ReductionProblem::from_scene(s).map_err(|e| e.to_string())
}

fn reduced(p: &ReductionProblem) -> Result<BivectorField, String> {
    p.reduced_bivector(Complement::Default).map(|r| r.bivector).map_err(|e| e.to_string())
}

/// `{a, b}` of the reduced bivector as canonical text.
fn entry(r: &BivectorField, a: &str, b: &str) -> String {
    let c = r.chart();
    r.entry(c.position(a).unwrap(), c.position(b).unwrap()).to_string()
}

fn expect_entry(r: &BivectorField, a: &str, b: &str, want: &str) -> Result<(), String> {
    let want = r.chart().parse(want).unwrap().to_string();
    let got = entry(r, a, b);
    check(got == want, || format!("{{{a}, {b}}} = {got}, expected {want}"))
}

fn c1_zxy() -> Outcome {
    let a = analyze(&scene("zxy"), Complement::Default);
    check(a.verdict("prop_onn") == Some(true), || "onn does not hold".into())?;
    let Some(poired::analysis::Outcome::Report(mr)) = a.get("marsden_ratiu").map(|c| &c.outcome) else {
        return Err("no canonicity report".into());
    };
    let canonical = mr.get("canonical").ok_or("no canonical condition")?;
    let witness = canonical.witness.clone().unwrap_or_default();
    check(canonical.verdict == Verdict::Fails && witness.starts_with("{x, y} = z"), || format!("canonicity: {canonical:?}"))?;
    let r = reduced(&problem(&scene("zxy"))?)?;
    check(r.is_zero(), || format!("reduced bivector {r}"))?;
    Ok(format!("onn holds; canonicity refuted by {witness}; reduced bivector 0"))
}

fn c2_coiso() -> Outcome {
    let alphas = [("y1^2 + x2", "2*y1"), ("x2", "0"), ("y1*x2 - 3", "x2"), ("y1^3/2 + x2^2", "3*y1^2/2")];
    for (alpha, d) in alphas {
        let p = problem(&parse_scene(&coiso(alpha, d)).unwrap())?;
        let onn = p.check_prop_onn().map_err(|e| e.to_string())?;
        check(onn.holds(), || format!("alpha = {alpha}: onn {onn:?}"))?;
        let r = reduced(&p)?;
        check(r.chart().names() == ["y1", "x2", "y2"], || format!("quotient {:?}", r.chart().names()))?;
        expect_entry(&r, "y1", "y2", alpha)?;
        expect_entry(&r, "x2", "y2", "1")?;
        expect_entry(&r, "y1", "x2", "0")?;
    }
    Ok(format!("onn holds and {{y1,y2}} = alpha, {{x2,y2}} = 1, {{y1,x2}} = 0 for {} choices of alpha(y1, x2)", alphas.len()))
}

fn c3_poissonex() -> Outcome {
    let s = scene("poissonex");
    let p = problem(&s)?;
    let r = reduced(&p)?;
    check(r.chart().names() == ["y1", "y2"], || format!("quotient {:?}", r.chart().names()))?;
    expect_entry(&r, "y1", "y2", "lambda")?;
    let mr = p.check_marsden_ratiu().map_err(|e| e.to_string())?;
    check(mr.verdict("sharp_B_ann_in_TN") == Some(Verdict::Fails), || format!("{mr:?}"))?;
    let at = |v: &str| -> Result<String, String> { Ok(reduced(&problem(&s.with_param("lambda", v).unwrap())?)?.to_string()) };
    let (one, two) = (at("1")?, at("2")?);
    check(one != two, || format!("lambda = 1 and 2 both give {one}"))?;
    Ok(format!("reduced {r}; sharp(B°) ⊄ TN; lambda = 1 gives {one}, lambda = 2 gives {two}"))
}

fn exbsb(alpha: &str) -> String {
    fixture("exbsb").unwrap().source.replace(r#"["x2", "0", "0", "1"]"#, &format!(r#"["{alpha}", "0", "0", "1"]"#))
}

fn c4_exbsb() -> Outcome {
    let cases = [("x2", true), ("x1", false), ("x2^2 + y1", true), ("x1*x2", false), ("3", true)];
    for (alpha, independent) in cases {
        let p = problem(&parse_scene(&exbsb(alpha)).unwrap())?;
        let r = reduced(&p)?;
        expect_entry(&r, "x1", "y1", "1")?;
        expect_entry(&r, "x1", "x2", alpha)?;
        expect_entry(&r, "y1", "x2", "0")?;
        let obs = p.jacobi_obstructions().map_err(|e| e.to_string())?;
        check(obs.is_empty() == independent, || format!("alpha = {alpha}: obstructions {obs:?}"))?;
        let thd = p.check_prop_thetad().map_err(|e| e.to_string())?;
        let lieder = thd.verdict("lieder") == Some(Verdict::Holds);
        check(lieder == independent, || format!("alpha = {alpha}: lieder {lieder}"))?;
    }
    Ok(format!("bivector d/dx1^(d/dy1 + alpha d/dx2); jacobi and lieder track d(alpha)/dx1 = 0 on {} choices", cases.len()))
}

fn c5_exr6() -> Outcome {
    let wd = problem(&scene("exr6-y1"))?.check_well_defined().map_err(|e| e.to_string())?;
    check(wd.verdict("descends_to_quotient") == Some(Verdict::Fails), || format!("alpha = y1: {wd:?}"))?;
    let obs = problem(&scene("exr6-x3"))?.jacobi_obstructions().map_err(|e| e.to_string())?;
    let jac = obs.iter().find(|(t, _)| t == &["x1".to_string(), "x2".into(), "y3".into()]);
    check(jac.is_some_and(|(_, v)| v.is_one()), || format!("alpha = x3: {obs:?}"))?;
    let p = problem(&scene("exr6"))?;
    let r = reduced(&p)?;
    expect_entry(&r, "x1", "x2", "x1*x2")?;
    expect_entry(&r, "x3", "y3", "1")?;
    expect_entry(&r, "x1", "x3", "0")?;
    expect_entry(&r, "x1", "y3", "0")?;
    expect_entry(&r, "x2", "x3", "0")?;
    expect_entry(&r, "x2", "y3", "0")?;
    let thd = p.check_prop_thetad().map_err(|e| e.to_string())?;
    check(thd.holds(), || format!("thetaD {thd:?}"))?;
    Ok(format!("alpha = y1 fails desc; alpha = x3 gives Jac(x1, x2, y3) = 1; alpha = x1*x2 gives {r} with thetaD holding"))
}

fn c6_zx_plane() -> Outcome {
    let p = problem(&scene("zx-plane"))?;
    let r = reduced(&p)?;
    expect_entry(&r, "u", "v", "u")?;
    let jac = p.check_jacobi_reduced().map_err(|e| e.to_string())?;
    let thd = p.check_prop_thetad().map_err(|e| e.to_string())?;
    check(jac.holds(), || "jacobi fails".into())?;
    check(thd.verdict("lieder") == Some(Verdict::Fails), || format!("{thd:?}"))?;
    Ok("{u, v} = u; jacobi holds while thetaD fails lieder".into())
}

fn c7_u2() -> Outcome {
    let s = scene("u2-gl2c");
    let a = ActionFixture::from_scene(&s).map_err(|e| e.to_string())?;
    let mm = verify_moment_map(&a).map_err(|e| e.to_string())?;
    let hamiltonian = mm.conditions.iter().filter(|c| c.name.starts_with("hamiltonian_") && c.holds()).count();
    check(mm.holds() && hamiltonian == 4, || format!("{mm:?}"))?;
    let r = reduced(&problem(&s)?)?;
    let table = [
        ("x1", "x2", "x3/x1"),
        ("x1", "x3", "-x2/x1"),
        ("x1", "x4", "0"),
        ("x2", "x3", "1 - x4^2/x1^2"),
        ("x2", "x4", "x3*x4/x1^2"),
        ("x3", "x4", "-x2*x4/x1^2"),
    ];
    for (i, j, v) in table {
        expect_entry(&r, i, j, v)?;
    }
    let coords = u2_linearizing_coordinates(r.chart()).map_err(|e| e.to_string())?;
    let lin = check_linearizing(&r, &coords).map_err(|e| e.to_string())?;
    check(lin.holds(), || format!("{lin:?}"))?;
    Ok("moment map verified for 4 generators; six brackets match; linear with vanishing jacobiator in (xi1, xi2, xi3, eta)".into())
}

fn c8_dirac() -> Outcome {
    let mut n = 0;
    for f in FIXTURES {
        let Ok(p) = ReductionProblem::from_scene(&f.scene()) else { continue };
        if p.reduced_bivector(Complement::Default).is_err() {
            continue;
        }
        let pp = check_pushpull(&p).map_err(|e| e.to_string())?;
        check(pp.holds(), || format!("{}: {pp:?}", f.name))?;
        let k = kernel_and_form(&pulled_back_structure(&p).map_err(|e| e.to_string())?).map_err(|e| e.to_string())?;
        let nc = p.n_chart();
        let kernel = FramedSubbundle::spanned_by(&nc, FrameKind::Vector, Base::OnM, &k.kernel).unwrap();
        let f_rows: Vec<Row> = p.f().rows().iter().map(|r| p.n_positions().iter().map(|&i| r[i].clone()).collect()).collect();
        let fb = FramedSubbundle::spanned_by(&nc, FrameKind::Vector, Base::OnM, &f_rows).unwrap();
        check(span_eq(&kernel, &fb), || format!("{}: kernel differs from F", f.name))?;
        n += 1;
    }
    Ok(format!("pushpull holds and the kernel is F on all {n} reducible fixtures"))
}

fn c9_omega_b() -> Outcome {
    let s = scene("poissonex");
    let mut values = vec!["lambda".to_string()];
    for num in -4..=4 {
        for den in [1, 2, 3] {
            values.push(format!("{num}/{den}"));
        }
    }
    for v in &values {
        let sc = if v == "lambda" { s.clone() } else { s.with_param("lambda", v).unwrap() };
        let p = problem(&sc)?;
        let (report, ob) = check_omega_b(&p).map_err(|e| e.to_string())?;
        let nonzero = !v.starts_with("0/");
        check(report.holds() && ob.nondegenerate == nonzero, || format!("lambda = {v}: flag {}, {report:?}", ob.nondegenerate))?;
    }
    Ok(format!("flag is true iff lambda != 0 and matches invertibility on {} values", values.len()))
}

fn c10_lie_poisson() -> Outcome {
    let mut out = Vec::new();
    for name in ["heisenberg-dual", "sl2-dual"] {
        let s = scene(name);
        let lp = lie_poisson_reduce(s.lie_algebra.as_ref().unwrap()).map_err(|e| e.to_string())?;
        check(lp.reduced == lp.oracle, || format!("{name}: {} vs {}", lp.reduced, lp.oracle))?;
        out.push(format!("{name}: {}", lp.reduced));
    }
    Ok(out.join("; "))
}

fn c11_properties() -> Outcome {
    run_cases(100, geo_case(), antisymmetry)?;
    run_cases(100, geo_case(), leibniz)?;
    run_cases(100, geo_case(), sharp_consistency)?;
    run_cases(100, xfg_case(), xfg)?;
    run_cases(100, frame_case(4), rank_complement)?;
    run_cases(100, frame_case(4), biduality)?;
    let n = complement_independence()?;
    Ok(format!("4 chartgeo identities and 2 sublinalg identities on 100 cases each; complement orders agree on {n} fixtures"))
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Outcome); 11] = [
        ("zxy: onn holds, canonicity refuted, reduced 0", c1_zxy),
        ("coisotropic: reduced bracket table", c2_coiso),
        ("poissonex: lambda bivector, B-dependence", c3_poissonex),
        ("exbsb: bivector, jacobi and lieder", c4_exbsb),
        ("exr6: desc, jacobiator, thetaD", c5_exr6),
        ("z-x plane: conditions not necessary", c6_zx_plane),
        ("U(2): moment map, brackets, linearization", c7_u2),
        ("Dirac pushpull and kernel", c8_dirac),
        ("omega^B nondegeneracy flag", c9_omega_b),
        ("Lie-Poisson oracle", c10_lie_poisson),
        ("property suites", c11_properties),
    ];
    let start = Instant::now();
    let mut failed = 0;
    for (i, (title, f)) in criteria.iter().enumerate() {
        let t = Instant::now();
        let r = std::panic::catch_unwind(f).unwrap_or_else(|_| Err("panicked".into()));
        let ms = t.elapsed().as_millis();
        match r {
            Ok(detail) => println!("PASS {:>2} {title} ({ms} ms): {detail}", i + 1),
            Err(why) => {
                failed += 1;
                println!("FAIL {:>2} {title} ({ms} ms): {why}", i + 1);
            }
        }
    }
    println!("{} of {} criteria passed in {:.1} s", criteria.len() - failed, criteria.len(), start.elapsed().as_secs_f64());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
