//! Orthogonal-polynomial recurrence coefficients computed two ways: by
//! iterating discrete Painlevé-type maps and from moments.

pub mod confinement;
pub mod dpainleve;
pub mod error;
pub mod field;
pub mod lab;
pub mod mpnum;
pub mod oracle;
pub mod weights;

pub use error::{Error, Result};
