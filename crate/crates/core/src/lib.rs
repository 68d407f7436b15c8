pub mod analysis;
pub mod chartgeo;
pub mod dirac;
pub mod fixtures;
pub mod momentmap;
pub mod reduce;
pub mod scene;
pub mod sublinalg;
pub mod symkernel;

pub use chartgeo::{BivectorField, Chart, GeoError, OneForm, TwoForm, VectorField};
pub use sublinalg::{DegeneracyReport, FramedSubbundle};
pub use symkernel::{parse_expr, ExprError, RationalExpr, VarSet};
