//! Runs every applicable checker on a scene and collects the reports.

use serde::Serialize;

use crate::dirac::{check_omega_b, check_pushpull, OmegaB};
use crate::momentmap::{check_action_b, check_lie_poisson, check_transversality, verify_moment_map, ActionFixture, MomentError};
use crate::reduce::{Complement, ConditionReport, ReduceError, ReductionProblem};
use crate::scene::Scene;

/// Checks whose failure makes a run fail; the others are sufficient
/// conditions reported for information.
pub const DECIDING: &[&str] = &[
    "setup",
    "well_defined",
    "jacobi",
    "pushpull",
    "omega_b",
    "moment_map",
    "transversality",
    "action_b",
    "lie_poisson",
];

/// Every check key in report order.
pub const CHECKS: &[&str] = &[
    "setup",
    "well_defined",
    "jacobi",
    "marsden_ratiu",
    "prop_onn",
    "prop_thetad",
    "thm_gen",
    "pushpull",
    "omega_b",
    "moment_map",
    "transversality",
    "action_b",
    "lie_poisson",
];

#[derive(Clone, Debug, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Outcome {
    Report(ConditionReport),
    /// A precondition of the checker failed.
    Error(String),
}

#[derive(Clone, Debug, Serialize)]
pub struct CheckOutcome {
    pub check: &'static str,
    pub deciding: bool,
    pub outcome: Outcome,
}

impl CheckOutcome {
    pub fn holds(&self) -> bool {
        matches!(&self.outcome, Outcome::Report(r) if r.holds())
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct Analysis {
    pub name: String,
    pub complement: Complement,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub quotient: Option<Vec<String>>,
    /// Reduced bivector matrix on the quotient, entries in canonical syntax.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub reduced: Option<Vec<Vec<String>>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub omega_b: Option<OmegaB>,
    pub checks: Vec<CheckOutcome>,
}

impl Analysis {
    pub fn get(&self, check: &str) -> Option<&CheckOutcome> {
        self.checks.iter().find(|c| c.check == check)
    }

    /// `Some(true)` if the check ran and holds, `Some(false)` if it failed
    /// or its preconditions did, `None` if it does not apply.
    pub fn verdict(&self, check: &str) -> Option<bool> {
        self.get(check).map(CheckOutcome::holds)
    }

    pub fn passed(&self) -> bool {
        self.checks.iter().filter(|c| c.deciding).all(CheckOutcome::holds)
    }
}

fn outcome<E: std::fmt::Display>(r: Result<ConditionReport, E>) -> Outcome {
    match r {
        Ok(r) => Outcome::Report(r),
        Err(e) => Outcome::Error(e.to_string()),
    }
}

/// Runs the checks in [`CHECKS`] that apply to `scene`.
pub fn analyze(scene: &Scene, complement: Complement) -> Analysis {
    let mut a = Analysis {
        name: scene.name.clone().unwrap_or_default(),
        complement,
        quotient: None,
        reduced: None,
        omega_b: None,
        checks: Vec::new(),
    };
    let push = |a: &mut Analysis, check: &'static str, o: Outcome| {
        a.checks.push(CheckOutcome {
            check,
            deciding: DECIDING.contains(&check),
            outcome: o,
        })
    };
    match ReductionProblem::from_scene(scene) {
        Err(e) => push(&mut a, "setup", Outcome::Error(e.to_string())),
        Ok(p) => {
            a.quotient = Some(p.quotient_names());
            let reduced = p.reduced_bivector(complement);
            if let Ok(r) = &reduced {
                a.reduced = Some(r.bivector.matrix().iter().map(|row| row.iter().map(|e| e.to_string()).collect()).collect());
            }
            push(&mut a, "well_defined", outcome(p.check_well_defined()));
            if reduced.is_ok() {
                push(&mut a, "jacobi", outcome(p.check_jacobi_reduced()));
            }
            push(&mut a, "marsden_ratiu", outcome(p.check_marsden_ratiu()));
            push(&mut a, "prop_onn", outcome(p.check_prop_onn()));
            for (key, r) in [("prop_thetad", p.check_prop_thetad()), ("thm_gen", p.check_thm_gen())] {
                if !matches!(r, Err(ReduceError::Missing(_))) {
                    push(&mut a, key, outcome(r));
                }
            }
            if reduced.is_ok() {
                push(&mut a, "pushpull", outcome(check_pushpull(&p)));
                if p.omega().is_some() {
                    match check_omega_b(&p) {
                        Ok((r, ob)) => {
                            a.omega_b = Some(ob);
                            push(&mut a, "omega_b", Outcome::Report(r));
                        }
                        Err(e) => push(&mut a, "omega_b", Outcome::Error(e.to_string())),
                    }
                }
            }
        }
    }
    if scene.action.is_some() {
        match ActionFixture::from_scene(scene) {
            Ok(f) => {
                push(&mut a, "moment_map", outcome(verify_moment_map(&f)));
                push(&mut a, "transversality", outcome(check_transversality(&f)));
                push(&mut a, "action_b", outcome(check_action_b(scene)));
            }
            Err(e) => push(&mut a, "moment_map", Outcome::Error(e.to_string())),
        }
    }
    if scene.lie_algebra.is_some() {
        push(&mut a, "lie_poisson", outcome::<MomentError>(check_lie_poisson(scene)));
    }
    a
}
