//! Command dispatch and report rendering for the `poired` binary.

use std::fmt::Write as _;
use std::path::Path;

use anyhow::{anyhow, bail, Context, Result};
use rayon::prelude::*;
use serde::Serialize;

use poired::analysis::{analyze, Analysis, CheckOutcome, Outcome};
use poired::dirac::{check_omega_b, check_pushpull, kernel_and_form, pulled_back_structure, OmegaB};
use poired::fixtures::{fixture, FIXTURES};
use poired::reduce::{Complement, Condition, ConditionReport, ReductionProblem, Verdict};
use poired::scene::{parse_scene, Scene};
use poired::sublinalg::{format_row, FrameKind};
use poired::DegeneracyReport;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Command {
    Check,
    Reduce,
    Jacobi,
    Dirac,
    Report,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum Format {
    #[default]
    Text,
    Structured,
}

#[derive(Clone, Debug)]
pub struct Options {
    pub format: Format,
    pub complement: Complement,
    /// `(name, expression)` substitutions applied in order.
    pub params: Vec<(String, String)>,
}

impl Default for Options {
    fn default() -> Self {
        Options {
            format: Format::Text,
            complement: Complement::Default,
            params: Vec::new(),
        }
    }
}

/// What a run prints and the exit code it ends with: 0 when every
/// requested certification holds, 2 otherwise.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RunOutput {
    pub stdout: String,
    pub code: i32,
}

/// Splits `NAME=EXPR`.
pub fn parse_param(s: &str) -> Result<(String, String)> {
    let (name, value) = s.split_once('=').ok_or_else(|| anyhow!("expected NAME=EXPR, got `{s}`"))?;
    let name = name.trim();
    if name.is_empty() || value.trim().is_empty() {
        bail!("expected NAME=EXPR, got `{s}`");
    }
    Ok((name.to_string(), value.trim().to_string()))
}

/// Reads a scene file, or looks up a built-in fixture when no such file exists.
pub fn load_scene(target: &str, params: &[(String, String)]) -> Result<Scene> {
    let path = Path::new(target);
    let mut scene = if path.is_file() {
        let text = std::fs::read_to_string(path).with_context(|| format!("reading {target}"))?;
        parse_scene(&text).with_context(|| format!("parsing {target}"))?
    } else {
        fixture(target)
            .ok_or_else(|| anyhow!("`{target}` is neither a scene file nor a built-in fixture"))?
            .scene()
    };
    for (name, value) in params {
        scene = scene.with_param(name, value)?;
    }
    if scene.name.is_none() {
        scene.name = path.file_stem().map(|s| s.to_string_lossy().into_owned());
    }
    Ok(scene)
}

pub fn run(command: Command, target: Option<&str>, opts: &Options) -> Result<RunOutput> {
    if command == Command::Report {
        if target.is_some() {
            bail!("`report` runs over the built-in fixtures and takes no scene");
        }
        if !opts.params.is_empty() {
            bail!("`report` does not accept --param");
        }
        return Ok(report(opts));
    }
    let target = target.ok_or_else(|| anyhow!("a scene file or fixture name is required"))?;
    let scene = load_scene(target, &opts.params)?;
    Ok(match command {
        Command::Check => check(&scene, opts),
        Command::Reduce => reduce(&scene, opts),
        Command::Jacobi => jacobi(&scene, opts),
        Command::Dirac => dirac(&scene, opts),
        Command::Report => unreachable!(),
    })
}

fn json<T: Serialize>(v: &T) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("reports serialize");
    s.push('\n');
    s
}

fn code(ok: bool) -> i32 {
    if ok {
        0
    } else {
        2
    }
}

fn verdict_word(v: Verdict) -> &'static str {
    match v {
        Verdict::Holds => "holds",
        Verdict::Fails => "fails",
        Verdict::NotCertified => "not certified",
    }
}

fn render_degeneracy(out: &mut String, indent: &str, d: &DegeneracyReport) {
    if !d.is_empty() {
        let _ = writeln!(out, "{indent}valid off: {}", d.to_strings().iter().map(|p| format!("{p} = 0")).collect::<Vec<_>>().join(", "));
    }
}

fn render_condition(out: &mut String, c: &Condition) {
    let _ = write!(out, "    {:<32} {}", c.name, verdict_word(c.verdict));
    if let Some(w) = &c.witness {
        let _ = write!(out, ": {w}");
    }
    out.push('\n');
    if let Some(n) = &c.note {
        let _ = writeln!(out, "      note: {n}");
    }
    render_degeneracy(out, "      ", &c.degeneracy);
}

fn render_report(out: &mut String, r: &ConditionReport) {
    for c in &r.conditions {
        render_condition(out, c);
    }
}

fn render_outcome(out: &mut String, c: &CheckOutcome) {
    let status = match &c.outcome {
        Outcome::Report(r) if r.holds() => "holds",
        Outcome::Report(_) => "fails",
        Outcome::Error(_) => "precondition failed",
    };
    let role = if c.deciding { "" } else { "  (sufficient condition, informational)" };
    let _ = writeln!(out, "  {:<16} {status}{role}", c.check);
    match &c.outcome {
        Outcome::Report(r) => render_report(out, r),
        Outcome::Error(e) => {
            let _ = writeln!(out, "    {e}");
        }
    }
}

fn render_matrix(out: &mut String, names: &[String], m: &[Vec<String>]) {
    let _ = writeln!(out, "reduced bivector over ({}):", names.join(", "));
    for row in m {
        let _ = writeln!(out, "  [{}]", row.join(", "));
    }
}

fn render_analysis(out: &mut String, a: &Analysis) {
    let _ = writeln!(out, "== {} (complement: {})", a.name, complement_name(a.complement));
    if let (Some(q), Some(m)) = (&a.quotient, &a.reduced) {
        render_matrix(out, q, m);
    }
    if let Some(ob) = &a.omega_b {
        render_omega_b(out, ob);
    }
    for c in &a.checks {
        render_outcome(out, c);
    }
    let _ = writeln!(out, "result: {}", if a.passed() { "pass" } else { "FAIL" });
}

fn render_omega_b(out: &mut String, ob: &OmegaB) {
    let _ = writeln!(out, "omega^B on N: {}", ob.on_n);
    let _ = writeln!(out, "omega^B on the quotient: {}", ob.pushed);
    let _ = writeln!(out, "omega^B nondegenerate: {}", ob.nondegenerate);
    if let Some(o) = &ob.obstruction {
        let _ = writeln!(out, "  {o}");
    }
    if ob.d_omega.is_empty() {
        let _ = writeln!(out, "d omega^B = 0");
    }
    for d in &ob.d_omega {
        let _ = writeln!(out, "  {d}");
    }
}

fn complement_name(c: Complement) -> &'static str {
    match c {
        Complement::Default => "default",
        Complement::Reversed => "reversed",
        Complement::Sheared => "sheared",
    }
}

fn check(scene: &Scene, opts: &Options) -> RunOutput {
    let a = analyze(scene, opts.complement);
    let stdout = match opts.format {
        Format::Structured => json(&a),
        Format::Text => {
            let mut s = String::new();
            render_analysis(&mut s, &a);
            s
        }
    };
    RunOutput { stdout, code: code(a.passed()) }
}

/// A single-purpose command's result: data on success, or the failed
/// precondition.
#[derive(Serialize)]
struct Single<T: Serialize> {
    name: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    result: Option<T>,
    #[serde(skip_serializing_if = "Option::is_none")]
    error: Option<String>,
}

fn emit<T: Serialize>(scene: &Scene, opts: &Options, r: Result<(T, bool, String), String>) -> RunOutput {
    let name = scene.name.clone().unwrap_or_default();
    let (ok, text, single) = match r {
        Ok((v, ok, text)) => (ok, text, Single { name: name.clone(), result: Some(v), error: None }),
        Err(e) => (false, format!("precondition failed: {e}\n"), Single { name: name.clone(), result: None, error: Some(e) }),
    };
    let stdout = match opts.format {
        Format::Structured => json(&single),
        Format::Text => format!("== {name}\n{text}"),
    };
    RunOutput { stdout, code: code(ok) }
}

#[derive(Serialize)]
struct ReduceResult {
    complement: Complement,
    quotient: Vec<String>,
    matrix: Vec<Vec<String>>,
    degeneracy: DegeneracyReport,
}

fn reduce(scene: &Scene, opts: &Options) -> RunOutput {
    let r = (|| -> Result<_, String> {
        let p = ReductionProblem::from_scene(scene).map_err(|e| e.to_string())?;
        let r = p.reduced_bivector(opts.complement).map_err(|e| e.to_string())?;
        let res = ReduceResult {
            complement: opts.complement,
            quotient: p.quotient_names(),
            matrix: r.bivector.matrix().iter().map(|row| row.iter().map(|e| e.to_string()).collect()).collect(),
            degeneracy: r.degeneracy.clone(),
        };
        let mut text = String::new();
        render_matrix(&mut text, &res.quotient, &res.matrix);
        let _ = writeln!(text, "bivector: {}", r.bivector);
        render_degeneracy(&mut text, "", &res.degeneracy);
        Ok((res, true, text))
    })();
    emit(scene, opts, r)
}

#[derive(Serialize)]
struct Obstruction {
    arguments: [String; 3],
    value: String,
}

#[derive(Serialize)]
struct JacobiResult {
    quotient: Vec<String>,
    obstructions: Vec<Obstruction>,
}

fn jacobi(scene: &Scene, opts: &Options) -> RunOutput {
    let r = (|| -> Result<_, String> {
        let p = ReductionProblem::from_scene(scene).map_err(|e| e.to_string())?;
        let obs = p.jacobi_obstructions().map_err(|e| e.to_string())?;
        let res = JacobiResult {
            quotient: p.quotient_names(),
            obstructions: obs
                .into_iter()
                .map(|(arguments, v)| Obstruction { arguments, value: v.to_string() })
                .collect(),
        };
        let mut text = String::new();
        if res.obstructions.is_empty() {
            let _ = writeln!(text, "jacobiator of the reduced bracket vanishes identically");
        }
        for o in &res.obstructions {
            let [a, b, c] = &o.arguments;
            let _ = writeln!(text, "Jac({a}, {b}, {c}) = {}", o.value);
        }
        let ok = res.obstructions.is_empty();
        Ok((res, ok, text))
    })();
    emit(scene, opts, r)
}

#[derive(Serialize)]
struct DiracResult {
    pushpull: ConditionReport,
    pullback_kernel: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pullback_form: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    omega_b_report: Option<ConditionReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    omega_b: Option<OmegaB>,
}

fn dirac(scene: &Scene, opts: &Options) -> RunOutput {
    let r = (|| -> Result<_, String> {
        let p = ReductionProblem::from_scene(scene).map_err(|e| e.to_string())?;
        let pushpull = check_pushpull(&p).map_err(|e| e.to_string())?;
        let pulled = pulled_back_structure(&p).map_err(|e| e.to_string())?;
        let kf = kernel_and_form(&pulled).map_err(|e| e.to_string())?;
        let n_chart = p.n_chart();
        let (omega_b_report, omega_b) = match p.omega() {
            Some(_) => {
                let (r, ob) = check_omega_b(&p).map_err(|e| e.to_string())?;
                (Some(r), Some(ob))
            }
            None => (None, None),
        };
        let res = DiracResult {
            pushpull,
            pullback_kernel: kf.kernel.iter().map(|r| format_row(&n_chart, r, FrameKind::Vector)).collect(),
            pullback_form: kf.form.as_ref().map(ToString::to_string),
            omega_b_report,
            omega_b,
        };
        let mut text = String::new();
        let _ = writeln!(text, "pullback of the stretched graph:");
        if res.pullback_kernel.is_empty() {
            let _ = writeln!(text, "  kernel: 0");
        } else {
            let _ = writeln!(text, "  kernel: span{{{}}}", res.pullback_kernel.join(", "));
        }
        if let Some(f) = &res.pullback_form {
            let _ = writeln!(text, "  form: {f}");
        }
        let _ = writeln!(text, "  pushpull {}", if res.pushpull.holds() { "holds" } else { "fails" });
        render_report(&mut text, &res.pushpull);
        if let (Some(r), Some(ob)) = (&res.omega_b_report, &res.omega_b) {
            render_omega_b(&mut text, ob);
            let _ = writeln!(text, "  omega_b {}", if r.holds() { "holds" } else { "fails" });
            render_report(&mut text, r);
        }
        let ok = res.pushpull.holds() && res.omega_b_report.as_ref().map_or(true, ConditionReport::holds);
        Ok((res, ok, text))
    })();
    emit(scene, opts, r)
}

#[derive(Serialize)]
struct FixtureRun {
    fixture: &'static str,
    /// Checks whose verdict differs from the fixture's expectation.
    mismatches: Vec<String>,
    analysis: Analysis,
}

/// Runs [`analyze`] over every built-in fixture concurrently and compares
/// against each fixture's expected verdicts; output order is fixed.
fn report(opts: &Options) -> RunOutput {
    let runs: Vec<FixtureRun> = FIXTURES
        .par_iter()
        .map(|f| {
            let analysis = analyze(&f.scene(), opts.complement);
            let mismatches = f
                .expect
                .iter()
                .filter(|(check, expected)| analysis.verdict(check) != Some(*expected))
                .map(|(check, expected)| {
                    let got = match analysis.verdict(check) {
                        Some(true) => "holds",
                        Some(false) => "fails",
                        None => "not run",
                    };
                    format!("{check}: expected {}, got {got}", if *expected { "holds" } else { "fails" })
                })
                .collect();
            FixtureRun {
                fixture: f.name,
                mismatches,
                analysis,
            }
        })
        .collect();
    let ok = runs.iter().all(|r| r.mismatches.is_empty());
    let stdout = match opts.format {
        Format::Structured => json(&runs),
        Format::Text => {
            let mut s = String::new();
            for r in &runs {
                render_analysis(&mut s, &r.analysis);
                let _ = writeln!(
                    s,
                    "expectations: {}",
                    if r.mismatches.is_empty() { "met".to_string() } else { r.mismatches.join("; ") }
                );
                s.push('\n');
            }
            let _ = writeln!(
                s,
                "{} fixtures, {} meeting expectations",
                runs.len(),
                runs.iter().filter(|r| r.mismatches.is_empty()).count()
            );
            s
        }
    };
    RunOutput { stdout, code: code(ok) }
}
