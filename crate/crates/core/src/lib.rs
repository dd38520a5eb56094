//! Exact, desk-scale Heyting-valued model theory over finite frames.
//!
//! The crate builds finite frames (complete Heyting algebras), Heyting-valued
//! sets and structures, and presheaves/sheaves on those frames; evaluates
//! forcing values of first-order formulas along two independent paths; forms
//! filter quotients; and checks Łoś-style transfer, genericity, and
//! maximum-principle properties on small instances, with classical Tarski
//! semantics as an independent oracle.

pub mod fixtures;
pub mod logic;
pub mod frame;
pub mod hmodel;
pub mod hset;
pub mod json;
pub mod sheaf;
pub mod los;
pub mod rng;
pub mod scan;
pub mod util;

pub use frame::{Elem, Filter, Frame, FrameError, FrameHom, QuotientFrame, RegularAlgebra};
