//! Numerical laboratory for the one-dimensional semilinear wave equation
//! `u_tt - u_xx = A|u_t|^p|u|^q + B|u|^r` with small compactly supported data.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod apriori;
pub mod blowup;
pub mod data;
pub mod duhamel;
pub mod error;
pub mod exponents;
pub mod lattice;
pub mod norms;
pub mod picard;
pub mod profile;
pub mod solver;
pub mod sweep;
pub mod verify;

pub use error::{Error, Result};
