//! Singularity confinement checked exactly on truncated Laurent series in ε
//! whose coefficients are rational functions of the free predecessor `r`.

mod engine;
mod laurent;
mod poly;
mod ratfunc;

pub use engine::{
    laurent_step, numeric_shadow, run_confinement, run_confinement_with, ConfinementConfig, ConfinementReport, Scenario,
    ShadowEntry, ShadowReport,
};
pub use laurent::{SymbolicLaurent, DEFAULT_TERMS};
pub use poly::Poly;
pub use ratfunc::RationalFunctionR;
