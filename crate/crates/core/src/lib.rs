pub mod building;
pub mod corpus;
pub mod error;
pub mod isocrystal;
pub mod minset;
pub mod padic;
pub mod sampling;

pub use error::{Error, Result};
pub use padic::{FieldContext, FieldElement, Matrix, NewtonPolygonData, Polynomial, Valuation};
pub use isocrystal::{IsoclineDecomposition, Isocrystal, NewtonPoint};
pub use building::{CrystalLattice, Norm, RelPosition};
pub use minset::{MinPointParams, MinSet, ScanReport, VerificationReport};
