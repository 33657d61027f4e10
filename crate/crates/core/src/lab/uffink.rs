//! Distilling boxes of the `(eps, gamma)` section out of Uffink's set.

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::geometry::uffink_lhs;
use crate::nsbox::{correlators, extremal_nl, local_deterministic, maximally_mixed, pr_box, section_box, NsBox};
use crate::rational::{format_rational, int, rat, Rational};
use crate::wiring::{apply_to_copies, distillation_wiring};

/// Four-term decomposition of the image of `section_box(eps, gamma)` under
/// two-copy distillation: weights on PR, `P_NL^{011}`, `P_L^{0101}` and the
/// maximally mixed box.
pub fn bf_decomposition(eps: &Rational, gamma: &Rational) -> [(Rational, NsBox); 4] {
    let rest = int(1) - eps - gamma;
    [
        (eps / int(4) * (int(3) * eps + int(7) * gamma + int(1)), pr_box()),
        (eps / int(4) * &rest, extremal_nl(0, 1, 1)),
        (gamma * gamma, local_deterministic(0, 1, 0, 1)),
        (&rest * (int(1) + eps / int(2) + gamma), maximally_mixed()),
    ]
}

/// Correlators `(E00, E01, E10, E11)` of the distilled box, in closed form.
pub fn bf_correlators(eps: &Rational, gamma: &Rational) -> [Rational; 4] {
    let s2 = (eps + gamma) * (eps + gamma);
    let eg = eps * gamma;
    let g2 = gamma * gamma;
    let e01 = (&s2 + &eg + &g2 + eps) / int(2);
    let e11 = -(&s2 + &eg - int(3) * &g2 + eps) / int(2);
    [s2.clone(), e01, s2, e11]
}

/// `4 E00^4 + [E00^2 + (E00 - E11 - E11^2 - E00 E11)/2]^2`: the Uffink
/// form of the distilled box written in the initial correlators.
pub fn quartic_lhs(e00: &Rational, e11: &Rational) -> Rational {
    let sq = |r: &Rational| r * r;
    let inner = sq(e00) + (e00 - e11 - sq(e11) - e00 * e11) / int(2);
    int(4) * sq(&sq(e00)) + sq(&inner)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RegionPoint {
    pub i: usize,
    pub j: usize,
    pub inside: bool,
    /// First iteration whose image violates the Uffink inequality.
    pub first_escape: Option<usize>,
    /// Closed-form prediction for one iteration.
    pub quartic_escape: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RegionMap {
    pub grid: usize,
    pub iterations: usize,
    pub points: Vec<RegionPoint>,
}

impl RegionMap {
    pub fn eps(&self, p: &RegionPoint) -> Rational {
        rat(p.i as i64, self.grid as i64)
    }

    pub fn gamma(&self, p: &RegionPoint) -> Rational {
        rat(p.j as i64, self.grid as i64)
    }

    /// Points escaping within `k` iterations.
    pub fn escaped_within(&self, k: usize) -> usize {
        self.points
            .iter()
            .filter(|p| p.first_escape.is_some_and(|f| f <= k))
            .count()
    }

    /// Initially-inside nodes where the engine and the quartic disagree on
    /// one-iteration escape.
    pub fn quartic_mismatches(&self) -> Vec<&RegionPoint> {
        self.points
            .iter()
            .filter(|p| p.inside && (p.first_escape == Some(1)) != p.quartic_escape)
            .collect()
    }

    /// `eps,gamma,inside,first_escape` with exact coordinates; `0` marks no
    /// escape within the iteration budget.
    pub fn to_csv(&self) -> String {
        let mut s = String::from("eps,gamma,inside,first_escape\n");
        for p in &self.points {
            s.push_str(&format!(
                "{},{},{},{}\n",
                format_rational(&self.eps(p)),
                format_rational(&self.gamma(p)),
                p.inside as u8,
                p.first_escape.unwrap_or(0)
            ));
        }
        s
    }
}

fn scan_point(grid: usize, iterations: usize, i: usize, j: usize) -> RegionPoint {
    let eps = rat(i as i64, grid as i64);
    let gamma = rat(j as i64, grid as i64);
    let b0 = section_box(&eps, &gamma).expect("grid node lies in the section simplex");
    let four = int(4);
    let inside = uffink_lhs(&b0) <= four;
    let c = correlators(&b0);
    let quartic_escape = quartic_lhs(c.e(0, 0), c.e(1, 1)) > four;
    let mut first_escape = None;
    if inside {
        let w = distillation_wiring();
        let mut b = b0;
        for k in 1..=iterations {
            b = apply_to_copies(&w, &b);
            if uffink_lhs(&b) > four {
                first_escape = Some(k);
                break;
            }
        }
    }
    RegionPoint {
        i,
        j,
        inside,
        first_escape,
        quartic_escape,
    }
}

/// Labels every node `(i/grid, j/grid)` with `i + j <= grid` by the first
/// distillation step that leaves Uffink's set. Exact at every node; nodes
/// are processed in parallel and collected in row-major order.
pub fn uffink_escape_scan(grid: usize, iterations: usize) -> Result<RegionMap> {
    if grid == 0 {
        return Err(Error::Parameter("grid resolution must be positive".into()));
    }
    let nodes: Vec<(usize, usize)> = (0..=grid)
        .flat_map(|i| (0..=grid - i).map(move |j| (i, j)))
        .collect();
    let points = nodes
        .into_par_iter()
        .map(|(i, j)| scan_point(grid, iterations, i, j))
        .collect();
    Ok(RegionMap {
        grid,
        iterations,
        points,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::nsbox::mix;
    use num_traits::One;

    #[test]
    fn decomposition_is_a_mixture() {
        for (e, g) in [(rat(1, 3), rat(1, 5)), (rat(7, 10), rat(0, 1)), (rat(1, 4), rat(3, 4))] {
            let d = bf_decomposition(&e, &g);
            let total: Rational = d.iter().map(|(w, _)| w.clone()).sum();
            assert!(total.is_one());
            let terms: Vec<_> = d.iter().map(|(w, b)| (w.clone(), b)).collect();
            let b = mix(&terms).unwrap();
            let c = correlators(&b);
            let f = bf_correlators(&e, &g);
            for (k, (x, y)) in [(0, 0), (0, 1), (1, 0), (1, 1)].into_iter().enumerate() {
                assert_eq!(c.e(x, y), &f[k]);
            }
        }
    }

    #[test]
    fn local_points_never_escape() {
        let m = uffink_escape_scan(10, 3).unwrap();
        assert_eq!(m.points.len(), 66);
        assert!(m
            .points
            .iter()
            .filter(|p| p.i == 0)
            .all(|p| p.first_escape.is_none()));
        assert!(m.quartic_mismatches().is_empty());
        assert!(m.to_csv().starts_with("eps,gamma,inside,first_escape\n0/1,0/1,1,0\n"));
        assert!(uffink_escape_scan(0, 1).is_err());
    }
}
