//! Generalized inverses of the sample covariance matrix in high dimensions.
//!
//! The crate covers three layers:
//!
//! * deterministic equivalents of weighted trace moments for the
//!   Moore-Penrose, ridge, Moore-Penrose-ridge and ordinary inverses
//!   ([`detlim`], built on [`bellpoly`]),
//! * data-driven estimators of the quantities appearing in those limits
//!   ([`plugin_est`]), and
//! * linear shrinkage of the precision matrix and of global minimum variance
//!   portfolio weights ([`shrink_prec`], [`shrink_gmv`]).
//!
//! [`randmat`] generates data and evaluates generalized inverses, and
//! [`simlab`] runs seeded Monte Carlo studies that write CSV tables.

pub mod bellpoly;
pub mod detlim;
pub mod error;
pub mod plugin_est;
pub mod randmat;
pub mod search;
pub mod shrink_gmv;
pub mod shrink_prec;
pub mod simlab;

pub use error::{Error, Result};
