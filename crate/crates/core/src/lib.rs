//! Exact algebra for cubic forms with vanishing Hessian: apolar operators,
//! Artinian Gorenstein data, Perazzo families, the tangent map of
//! `det Hess`, and Chern/Segre computations on Grassmannian-bundle towers
//! giving the degrees of the minimal and maximal families.

#![allow(clippy::needless_range_loop)]
pub mod aglib;
pub mod chow;
pub mod cli;
pub mod degrees;
pub mod error;
pub mod families;
pub mod linalg;
pub mod poly;
pub mod tangent;

pub use error::{Error, Result};
