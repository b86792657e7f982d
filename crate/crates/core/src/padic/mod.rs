//! Fixed-precision arithmetic over unramified p-adic fields and their
//! Eisenstein extensions.

pub mod context;
mod conway;
pub mod element;
pub mod matrix;
pub mod poly;
pub(crate) mod residue;

use std::sync::Arc;

pub use context::{conway_polynomial, make_field, FieldContext};
pub use element::{format_rational, parse_rational, FieldElement, FieldElementJson, Valuation};
pub use matrix::{Matrix, SmithForm};
pub use poly::{newton_polygon, slope_factorization, NewtonPolygonData, Polynomial};

use crate::error::Result;

/// Embed `x` into `target`, a larger unramified degree and/or ramification.
pub fn extend_field(x: &FieldElement, target: &Arc<FieldContext>) -> Result<FieldElement> {
    x.extend_to(target)
}
