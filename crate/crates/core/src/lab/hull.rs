//! Iterated growth of the noisy-PR polytope by AND-wired isotropic boxes.
//!
//! Stage 1 is `R_b` at `S = 4 eps`. Stage `n` adds the relabeling orbit of the
//! `n`-copy AND box whenever that box lies outside the stage `n - 1` hull,
//! then drops vertices that became interior.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::geometry::{in_hull, r_b_polytope, reduce_symmetric, Membership, VPolytope};
use crate::nsbox::{isotropic, NsBox};
use crate::rational::{format_rational, int, rat, serde_str, Rational};
use crate::relabel::orbit;
use crate::wiring::and_closed_form;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct HullStage {
    pub n: usize,
    pub generated: NsBox,
    /// Membership of `generated` in the previous stage, with certificate.
    pub membership: Membership,
    pub orbit_size: usize,
    pub vertex_count: usize,
}

impl HullStage {
    pub fn grew(&self) -> bool {
        !self.membership.is_inside()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct HullIterationReport {
    #[serde(with = "serde_str")]
    pub eps: Rational,
    pub initial_vertex_count: usize,
    pub stages: Vec<HullStage>,
    #[serde(skip)]
    pub polytopes: Vec<VPolytope>,
}

impl HullIterationReport {
    /// Vertex counts, stage 1 first.
    pub fn vertex_counts(&self) -> Vec<usize> {
        std::iter::once(self.initial_vertex_count)
            .chain(self.stages.iter().map(|s| s.vertex_count))
            .collect()
    }
}

pub fn iterate_hull(eps: &Rational, n_max: usize) -> Result<HullIterationReport> {
    if eps <= &rat(1, 2) || eps >= &int(1) {
        return Err(Error::Parameter(format!(
            "hull iteration needs 1/2 < eps < 1, got {}",
            format_rational(eps)
        )));
    }
    if n_max < 2 {
        return Err(Error::Parameter(format!("hull iteration needs n_max >= 2, got {n_max}")));
    }
    let mut poly = r_b_polytope(&(int(4) * eps))?;
    let base = isotropic(eps)?;
    let initial_vertex_count = poly.len();
    let mut polytopes = vec![poly.clone()];
    let mut stages = Vec::new();
    for n in 2..=n_max {
        let generated = and_closed_form(&base, n)?;
        let membership = in_hull(&generated, &poly);
        let images = orbit(&generated);
        let orbit_size = images.len();
        if !membership.is_inside() {
            for (k, b) in images.into_iter().enumerate() {
                poly.push(format!("AND{n}.{k}"), b);
            }
            poly = reduce_symmetric(&poly);
        }
        stages.push(HullStage {
            n,
            generated,
            membership,
            orbit_size,
            vertex_count: poly.len(),
        });
        polytopes.push(poly.clone());
    }
    Ok(HullIterationReport {
        eps: eps.clone(),
        initial_vertex_count,
        stages,
        polytopes,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn below_threshold_nothing_grows() {
        let r = iterate_hull(&rat(3, 5), 6).unwrap();
        assert!(r.stages.iter().all(|s| !s.grew()));
        assert!(r.vertex_counts().iter().all(|&c| c == 24));
    }

    #[test]
    fn first_stage_at_four_fifths() {
        let r = iterate_hull(&rat(4, 5), 2).unwrap();
        let s = &r.stages[0];
        assert!(s.grew());
        assert_eq!(s.orbit_size, 64);
        assert_eq!(s.vertex_count, 24 + 64);
    }

    #[test]
    fn parameter_errors() {
        assert!(iterate_hull(&rat(1, 2), 3).is_err());
        assert!(iterate_hull(&rat(4, 5), 1).is_err());
    }
}
