//! Bryant-type linear Weingarten surfaces in hyperbolic space, built without
//! integration from a holomorphic hyperbolic Gauss map, together with a
//! numerical laboratory that checks the geometric identities behind the
//! construction.

pub mod bianchi_calo;
pub mod cli;
pub mod curvature;
pub mod error;
pub mod holomorphic;
pub mod meshio;
pub mod minkowski;

pub use error::{Error, Result};
