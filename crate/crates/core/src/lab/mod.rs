//! Closure experiments: AND-wiring escape from the noisy-PR polytope, hull
//! growth, the exhaustive two-box search, edge distillation and the Uffink
//! escape region.

pub mod edge;
pub mod escape;
pub mod hull;
pub mod search;
pub mod uffink;
