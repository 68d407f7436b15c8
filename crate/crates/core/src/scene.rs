//! Scene files: a JSON description of a reduction problem.
//!
//! Every expression is a string in the expression grammar over the declared
//! coordinates and parameters. Parsing canonicalizes all expressions, so
//! `parse_scene(&scene.render())` returns the same scene.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::symkernel::{parse_rational, ExprError, RationalExpr, VarSet};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SceneError {
    #[error("scene is not valid JSON: {0}")]
    Json(String),
    #[error("{context}: {message}")]
    Invalid { context: String, message: String },
}

fn invalid(context: impl Into<String>, message: impl Into<String>) -> SceneError {
    SceneError::Invalid {
        context: context.into(),
        message: message.into(),
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NamedExpr {
    pub name: String,
    pub expr: String,
}

/// A Hamiltonian action: Lie algebra data, infinitesimal generators on M
/// (one row per basis element) and the moment map components.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ActionSection {
    pub basis: Vec<String>,
    /// Triples `[a, b, c]` meaning `[a, b] = c`, with `c` linear in the basis.
    #[serde(default)]
    pub brackets: Vec<[String; 3]>,
    pub generators: Vec<Vec<String>>,
    pub moment: Vec<String>,
}

/// Data for reducing the dual of a Lie algebra: `N` is the annihilator of
/// `subspace`, `B` the annihilator of `subalgebra`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LieAlgebraSection {
    pub basis: Vec<String>,
    #[serde(default)]
    pub brackets: Vec<[String; 3]>,
    pub subalgebra: Vec<String>,
    pub subspace: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scene {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub description: Option<String>,
    pub coordinates: Vec<String>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub parameters: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub poisson: Option<Vec<Vec<String>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub symplectic: Option<Vec<Vec<String>>>,
    pub constraints: usize,
    #[serde(rename = "B")]
    pub b: Vec<Vec<String>>,
    #[serde(rename = "theta_D", default, skip_serializing_if = "Option::is_none")]
    pub theta_d: Option<Vec<Vec<String>>>,
    #[serde(rename = "D", default, skip_serializing_if = "Option::is_none")]
    pub d: Option<Vec<Vec<String>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub quotient: Option<Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub generators: Option<Vec<NamedExpr>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub base_point: Option<BTreeMap<String, String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub action: Option<ActionSection>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lie_algebra: Option<LieAlgebraSection>,
}

pub fn parse_scene(text: &str) -> Result<Scene, SceneError> {
    let raw: Scene = serde_json::from_str(text).map_err(|e| SceneError::Json(e.to_string()))?;
    raw.validated()
}

impl Scene {
    pub fn render(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("scene serializes");
        s.push('\n');
        s
    }

    /// Coordinates followed by parameters.
    pub fn vars(&self) -> VarSet {
        VarSet::new(self.coordinates.iter().chain(&self.parameters).cloned())
    }

    pub fn dim(&self) -> usize {
        self.coordinates.len()
    }

    pub fn n_coordinates(&self) -> &[String] {
        &self.coordinates[..self.dim() - self.constraints]
    }

    pub fn constraint_coordinates(&self) -> &[String] {
        &self.coordinates[self.dim() - self.constraints..]
    }

    /// Checks the scene and rewrites every expression canonically.
    pub fn validated(mut self) -> Result<Scene, SceneError> {
        let n = self.coordinates.len();
        let mut seen = Vec::new();
        for name in self.coordinates.iter().chain(&self.parameters) {
            if !is_identifier(name) {
                return Err(invalid("coordinates", format!("`{name}` is not an identifier")));
            }
            if seen.contains(&name) {
                return Err(invalid("coordinates", format!("`{name}` declared twice")));
            }
            seen.push(name);
        }
        if n == 0 {
            return Err(invalid("coordinates", "no coordinates declared"));
        }
        if self.constraints > n {
            return Err(invalid("constraints", format!("{} constraints exceed dimension {n}", self.constraints)));
        }
        let vars = self.vars();
        let constraint_vars: Vec<usize> = (n - self.constraints..n).collect();
        let canon_free = |ctx: &str, s: &str| canonical(&vars, ctx, s);
        let canon_on_n = |ctx: &str, s: &str| {
            let e = parse_in(&vars, ctx, s)?;
            if let Some(&v) = constraint_vars.iter().find(|&&v| e.depends_on(v)) {
                return Err(invalid(ctx, format!("depends on constraint coordinate `{}`", vars.name(v))));
            }
            Ok(e.to_string())
        };

        match (&mut self.poisson, &mut self.symplectic) {
            (Some(m), None) => canonical_matrix(&vars, "poisson", m, n)?,
            (None, Some(m)) => canonical_matrix(&vars, "symplectic", m, n)?,
            (Some(_), Some(_)) => return Err(invalid("structure", "give exactly one of `poisson` or `symplectic`, not both")),
            (None, None) => return Err(invalid("structure", "one of `poisson` or `symplectic` is required")),
        }
        map_rows(&mut self.b, "B", n, &canon_on_n)?;
        if let Some(rows) = &mut self.d {
            map_rows(rows, "D", n, &canon_on_n)?;
        }
        if let Some(rows) = &mut self.theta_d {
            map_rows(rows, "theta_D", n, &canon_free)?;
        }
        if let Some(q) = &self.quotient {
            let n_coords = &self.coordinates[..n - self.constraints];
            for name in q {
                if !n_coords.contains(name) {
                    return Err(invalid("quotient", format!("`{name}` is not a coordinate of N")));
                }
            }
        }
        if let Some(gens) = &mut self.generators {
            for g in gens.iter_mut() {
                g.expr = canon_free(&format!("generators.{}", g.name), &g.expr)?;
            }
        }
        if let Some(bp) = &mut self.base_point {
            for (k, v) in bp.iter_mut() {
                if vars.index_of(k).is_none() {
                    return Err(invalid("base_point", format!("unknown coordinate `{k}`")));
                }
                let q = signed_rational(v)
                    .ok_or_else(|| invalid(format!("base_point.{k}"), format!("`{v}` is not a rational number")))?;
                *v = q.to_string();
            }
        }
        if let Some(a) = &mut self.action {
            let basis = VarSet::new(a.basis.clone());
            canonical_brackets(&basis, "action.brackets", &mut a.brackets)?;
            if a.generators.len() != a.basis.len() || a.moment.len() != a.basis.len() {
                return Err(invalid("action", "need one generator row and one moment component per basis element"));
            }
            map_rows(&mut a.generators, "action.generators", n, &canon_free)?;
            for (i, m) in a.moment.iter_mut().enumerate() {
                *m = canon_free(&format!("action.moment[{i}]"), m)?;
            }
        }
        if let Some(l) = &mut self.lie_algebra {
            let basis = VarSet::new(l.basis.clone());
            canonical_brackets(&basis, "lie_algebra.brackets", &mut l.brackets)?;
            for (key, list) in [("lie_algebra.subalgebra", &mut l.subalgebra), ("lie_algebra.subspace", &mut l.subspace)] {
                for s in list.iter_mut() {
                    *s = canonical_linear(&basis, key, s)?;
                }
            }
        }
        Ok(self)
    }

    /// Replaces the parameter `name` by `value` (an expression over the
    /// coordinates and remaining parameters) everywhere.
    pub fn with_param(&self, name: &str, value: &str) -> Result<Scene, SceneError> {
        let old = self.vars();
        let pos = self
            .parameters
            .iter()
            .position(|p| p == name)
            .ok_or_else(|| invalid("--param", format!("`{name}` is not a declared parameter")))?;
        let mut out = self.clone();
        out.parameters.remove(pos);
        let new = out.vars();
        let value = parse_in(&new, &format!("--param {name}"), value)?;
        let images: Vec<RationalExpr> = (0..old.len())
            .map(|i| {
                if old.name(i) == name {
                    value.clone()
                } else {
                    RationalExpr::var(&new, new.index_of(old.name(i)).expect("kept variable"))
                }
            })
            .collect();
        let subst = |ctx: &str, s: &str| -> Result<String, SceneError> {
            let e = parse_in(&old, ctx, s)?;
            e.substitute(&new, &images)
                .map(|e| e.to_string())
                .map_err(|err| invalid(ctx, err.to_string()))
        };
        let map_matrix = |m: &mut Vec<Vec<String>>, ctx: &str| -> Result<(), SceneError> {
            for row in m.iter_mut() {
                for e in row.iter_mut() {
                    *e = subst(ctx, e)?;
                }
            }
            Ok(())
        };
        if let Some(m) = &mut out.poisson {
            map_matrix(m, "poisson")?;
        }
        if let Some(m) = &mut out.symplectic {
            map_matrix(m, "symplectic")?;
        }
        map_matrix(&mut out.b, "B")?;
        if let Some(m) = &mut out.d {
            map_matrix(m, "D")?;
        }
        if let Some(m) = &mut out.theta_d {
            map_matrix(m, "theta_D")?;
        }
        if let Some(gens) = &mut out.generators {
            for g in gens.iter_mut() {
                g.expr = subst("generators", &g.expr)?;
            }
        }
        if let Some(a) = &mut out.action {
            map_matrix(&mut a.generators, "action.generators")?;
            for m in a.moment.iter_mut() {
                *m = subst("action.moment", m)?;
            }
        }
        if let Some(bp) = &mut out.base_point {
            bp.remove(name);
        }
        out.validated()
    }
}

fn signed_rational(s: &str) -> Option<num_rational::BigRational> {
    match s.trim().strip_prefix('-') {
        Some(rest) => parse_rational(rest).map(|q| -q),
        None => parse_rational(s),
    }
}

fn is_identifier(s: &str) -> bool {
    let mut chars = s.chars();
    matches!(chars.next(), Some(c) if c.is_alphabetic() || c == '_')
        && chars.all(|c| c.is_alphanumeric() || c == '_')
}

fn parse_in(vars: &VarSet, ctx: &str, s: &str) -> Result<RationalExpr, SceneError> {
    vars.parse(s).map_err(|e| match e {
        ExprError::Syntax { pos, message } => invalid(ctx, format!("`{s}`: {message} at offset {pos}")),
        other => invalid(ctx, format!("`{s}`: {other}")),
    })
}

fn canonical(vars: &VarSet, ctx: &str, s: &str) -> Result<String, SceneError> {
    Ok(parse_in(vars, ctx, s)?.to_string())
}

fn map_rows(
    rows: &mut [Vec<String>],
    key: &str,
    n: usize,
    f: &dyn Fn(&str, &str) -> Result<String, SceneError>,
) -> Result<(), SceneError> {
    for (i, row) in rows.iter_mut().enumerate() {
        let ctx = format!("{key}[{i}]");
        if row.len() != n {
            return Err(invalid(&ctx, format!("row has {} entries, expected {n}", row.len())));
        }
        for e in row.iter_mut() {
            *e = f(&ctx, e)?;
        }
    }
    Ok(())
}

fn canonical_matrix(vars: &VarSet, key: &str, m: &mut [Vec<String>], n: usize) -> Result<(), SceneError> {
    if m.len() != n {
        return Err(invalid(key, format!("matrix has {} rows, expected {n}", m.len())));
    }
    let mut parsed = Vec::with_capacity(n);
    for (i, row) in m.iter().enumerate() {
        let ctx = format!("{key}[{i}]");
        if row.len() != n {
            return Err(invalid(&ctx, format!("row has {} entries, expected {n}", row.len())));
        }
        parsed.push(row.iter().map(|s| parse_in(vars, &ctx, s)).collect::<Result<Vec<_>, _>>()?);
    }
    for i in 0..n {
        for j in 0..n {
            if parsed[i][j] != -&parsed[j][i] {
                return Err(invalid(key, format!("not antisymmetric at [{i}][{j}]")));
            }
        }
    }
    for (row, prow) in m.iter_mut().zip(parsed) {
        for (s, e) in row.iter_mut().zip(prow) {
            *s = e.to_string();
        }
    }
    Ok(())
}

/// A homogeneous linear combination of basis names.
fn canonical_linear(basis: &VarSet, ctx: &str, s: &str) -> Result<String, SceneError> {
    let e = parse_in(basis, ctx, s)?;
    let linear = e.is_polynomial() && e.numerator().terms().all(|(m, _)| m.degree() == 1);
    if !linear && !e.is_zero() {
        return Err(invalid(ctx, format!("`{s}` is not a linear combination of basis elements")));
    }
    Ok(e.to_string())
}

fn canonical_brackets(basis: &VarSet, ctx: &str, brackets: &mut [[String; 3]]) -> Result<(), SceneError> {
    for b in brackets.iter_mut() {
        for name in &b[..2] {
            if basis.index_of(name).is_none() {
                return Err(invalid(ctx, format!("`{name}` is not a basis element")));
            }
        }
        b[2] = canonical_linear(basis, ctx, &b[2])?;
    }
    Ok(())
}
