//! Exact calculus for bipartite non-signalling boxes with binary inputs and
//! outputs: boxes, relabelings, wirings, polytope membership, and the
//! closure experiments built on them.

pub mod dynamics;
pub mod error;
pub mod geometry;
pub mod lab;
pub mod lp;
pub mod nsbox;
pub mod rational;
pub mod relabel;
pub mod wiring;

pub use error::{Error, Result};
pub use nsbox::{NsBox, Table};
pub use rational::Rational;
