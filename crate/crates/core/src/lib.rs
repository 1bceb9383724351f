//! Orlicz and Orlicz-Sobolev calculus on radial functions, and a
//! mountain-pass solver for `−div(a(|∇u|)∇u) + V(x)a(|u|)u = f(u)` in `ℝ^N`.

pub mod cli;
pub mod error;
pub mod lab;
pub mod nfunction;
pub mod numeric;
pub mod radial;
pub mod solver;

pub use error::{Error, Result};
