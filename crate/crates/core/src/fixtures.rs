//! Built-in scenes: the worked examples, their failing variants and the
//! moment-map and Lie-Poisson cases. Each carries the verdicts it is
//! expected to produce under [`crate::analysis::analyze`].

use crate::scene::{parse_scene, Scene};

pub struct Fixture {
    pub name: &'static str,
    pub source: &'static str,
    /// `(check, expected to hold)` pairs; checks not listed are not compared.
    pub expect: &'static [(&'static str, bool)],
}

impl Fixture {
    pub fn scene(&self) -> Scene {
        parse_scene(self.source).unwrap_or_else(|e| panic!("fixture {} is invalid: {e}", self.name))
    }
}

macro_rules! fixture {
    ($name:literal, [$($check:literal => $ok:expr),* $(,)?]) => {
        Fixture {
            name: $name,
            source: include_str!(concat!("../fixtures/", $name, ".json")),
            expect: &[$(($check, $ok)),*],
        }
    };
}

pub static FIXTURES: &[Fixture] = &[
    fixture!("zxy", [
        "well_defined" => true, "jacobi" => true, "marsden_ratiu" => false, "prop_onn" => true, "pushpull" => true,
    ]),
    fixture!("zxy-b0", ["well_defined" => true, "jacobi" => true, "marsden_ratiu" => true, "pushpull" => true]),
    fixture!("coiso", [
        "well_defined" => true, "jacobi" => true, "marsden_ratiu" => true, "prop_onn" => true, "prop_thetad" => true,
        "thm_gen" => true, "pushpull" => true,
    ]),
    fixture!("coiso-wide", ["well_defined" => true, "jacobi" => true, "prop_onn" => true, "pushpull" => true]),
    fixture!("coiso-x1", ["well_defined" => false, "prop_onn" => false, "prop_thetad" => false]),
    fixture!("poissonex", [
        "well_defined" => true, "jacobi" => true, "marsden_ratiu" => false, "prop_thetad" => true, "thm_gen" => true,
        "pushpull" => true, "omega_b" => true,
    ]),
    fixture!("exbsb", ["well_defined" => true, "jacobi" => true, "prop_thetad" => true, "pushpull" => true]),
    fixture!("exbsb-x1", ["well_defined" => true, "jacobi" => false, "prop_thetad" => false, "pushpull" => true]),
    fixture!("exr6", [
        "well_defined" => true, "jacobi" => true, "prop_thetad" => true, "thm_gen" => true, "pushpull" => true,
    ]),
    fixture!("exr6-y1", ["well_defined" => false, "prop_thetad" => false]),
    fixture!("exr6-x3", ["well_defined" => true, "jacobi" => false, "prop_thetad" => false, "pushpull" => true]),
    fixture!("zx-plane", ["well_defined" => true, "jacobi" => true, "prop_thetad" => false, "pushpull" => true]),
    fixture!("u2-gl2c", [
        "well_defined" => true, "jacobi" => true, "prop_thetad" => true, "pushpull" => true, "omega_b" => true,
        "moment_map" => true, "transversality" => true, "action_b" => true,
    ]),
    fixture!("r2-rotation", [
        "well_defined" => true, "jacobi" => true, "prop_thetad" => true, "pushpull" => true, "omega_b" => true,
        "moment_map" => true, "transversality" => true, "action_b" => true,
    ]),
    fixture!("r2-rotation-tangent", ["moment_map" => true, "transversality" => false]),
    fixture!("heisenberg-dual", [
        "well_defined" => true, "jacobi" => true, "prop_thetad" => true, "pushpull" => true, "lie_poisson" => true,
    ]),
    fixture!("sl2-dual", [
        "well_defined" => true, "jacobi" => true, "prop_thetad" => true, "pushpull" => true, "lie_poisson" => true,
    ]),
];

pub fn fixture(name: &str) -> Option<&'static Fixture> {
    FIXTURES.iter().find(|f| f.name == name)
}

pub fn names() -> impl Iterator<Item = &'static str> {
    FIXTURES.iter().map(|f| f.name)
}
