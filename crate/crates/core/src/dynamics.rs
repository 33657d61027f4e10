//! Wirings as discrete maps on 2D sections of the box polytope, in floating
//! point: iteration, fixed points of scalar updates, and vector fields.
//!
//! A section is an affine frame `(B0, B1, B2)`; the point `(u, v)` is the
//! box `(1 - u - v) B0 + u B1 + v B2`. Images generally leave the section, so
//! every step reports the distance (in correlator coordinates) between the
//! image and its projection.

use num_traits::Zero;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::geometry::{affine_dimension, facet_q, tilted_ch, LinearFunctional};
use crate::nsbox::{idx, local_deterministic, maximally_mixed, pr_box, NsBox};
use crate::rational::{int, Rational};
use crate::wiring::{and_wiring, distillation_wiring, wire_tables, Wiring};

pub type FloatTable = [f64; 16];

/// `(E00, E01, E10, E11, mA0, mA1, mB0, mB1)` of a float table.
pub fn correlators_f64(p: &FloatTable) -> [f64; 8] {
    let mut c = [0.0; 8];
    for a in 0..2 {
        for b in 0..2 {
            let sab = if a == b { 1.0 } else { -1.0 };
            let sa = if a == 0 { 1.0 } else { -1.0 };
            let sb = if b == 0 { 1.0 } else { -1.0 };
            for x in 0..2 {
                for y in 0..2 {
                    let v = p[idx(a, b, x, y)];
                    c[2 * x + y] += sab * v;
                    if y == 0 {
                        c[4 + x] += sa * v;
                    }
                    if x == 0 {
                        c[6 + y] += sb * v;
                    }
                }
            }
        }
    }
    c
}

#[derive(Clone, Debug, PartialEq)]
pub struct Section2D {
    pub frame: [NsBox; 3],
    tables: [FloatTable; 3],
}

impl Section2D {
    /// Fails unless the frame is affinely independent.
    pub fn new(b0: NsBox, b1: NsBox, b2: NsBox) -> Result<Self> {
        if affine_dimension(&[&b0, &b1, &b2]) != 2 {
            return Err(Error::Parameter("section frame is affinely dependent".into()));
        }
        let tables = [b0.to_f64(), b1.to_f64(), b2.to_f64()];
        Ok(Section2D {
            frame: [b0, b1, b2],
            tables,
        })
    }

    pub fn point(&self, u: f64, v: f64) -> FloatTable {
        let w = [1.0 - u - v, u, v];
        std::array::from_fn(|i| (0..3).map(|k| w[k] * self.tables[k][i]).sum())
    }

    /// Exact box at rational coordinates.
    pub fn point_exact(&self, u: &Rational, v: &Rational) -> Result<NsBox> {
        let w0 = int(1) - u - v;
        crate::nsbox::mix(&[(w0, &self.frame[0]), (u.clone(), &self.frame[1]), (v.clone(), &self.frame[2])])
    }

    pub fn in_simplex(u: f64, v: f64) -> bool {
        const TOL: f64 = 1e-12;
        u >= -TOL && v >= -TOL && u + v <= 1.0 + TOL
    }
}

/// How an image box is mapped back to section coordinates.
#[derive(Clone, Debug, PartialEq)]
pub enum ProjectionRule {
    /// Orthogonal projection in correlator coordinates.
    LeastSquares,
    /// The section point on which both functionals agree with the image.
    Coordinates(Box<[LinearFunctional; 2]>),
}

#[derive(Clone, Debug, PartialEq)]
pub struct MapStep {
    pub protocol: Wiring,
    pub copies: usize,
    pub projection: ProjectionRule,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct StepImage {
    pub u: f64,
    pub v: f64,
    pub residual: f64,
}

fn solve2(m: [[f64; 2]; 2], r: [f64; 2]) -> Result<[f64; 2]> {
    let det = m[0][0] * m[1][1] - m[0][1] * m[1][0];
    if det.abs() < 1e-300 {
        return Err(Error::Parameter("projection is singular on this section".into()));
    }
    Ok([
        (r[0] * m[1][1] - m[0][1] * r[1]) / det,
        (m[0][0] * r[1] - r[0] * m[1][0]) / det,
    ])
}

impl MapStep {
    pub fn new(protocol: Wiring, projection: ProjectionRule) -> Self {
        MapStep {
            copies: protocol.n(),
            protocol,
            projection,
        }
    }

    /// The image box of `copies` copies of `p`.
    pub fn image(&self, p: &FloatTable) -> Result<FloatTable> {
        if self.copies != self.protocol.n() {
            return Err(Error::Arity(format!(
                "map uses {} copies of a {}-box wiring",
                self.copies,
                self.protocol.n()
            )));
        }
        let tables = vec![p; self.copies];
        wire_tables(&self.protocol, &tables)
    }

    pub fn project(&self, s: &Section2D, img: &FloatTable) -> Result<StepImage> {
        let c = correlators_f64(img);
        let f = s.tables.map(|t| correlators_f64(&t));
        let d1: [f64; 8] = std::array::from_fn(|i| f[1][i] - f[0][i]);
        let d2: [f64; 8] = std::array::from_fn(|i| f[2][i] - f[0][i]);
        let r: [f64; 8] = std::array::from_fn(|i| c[i] - f[0][i]);
        let [u, v] = match &self.projection {
            ProjectionRule::LeastSquares => {
                let dot = |a: &[f64; 8], b: &[f64; 8]| a.iter().zip(b).map(|(x, y)| x * y).sum::<f64>();
                solve2(
                    [[dot(&d1, &d1), dot(&d1, &d2)], [dot(&d2, &d1), dot(&d2, &d2)]],
                    [dot(&d1, &r), dot(&d2, &r)],
                )?
            }
            ProjectionRule::Coordinates(ls) => {
                let at = |l: &LinearFunctional, t: &FloatTable| l.evaluate_f64(t);
                let row = |l: &LinearFunctional| {
                    let base = at(l, &s.tables[0]);
                    (
                        [at(l, &s.tables[1]) - base, at(l, &s.tables[2]) - base],
                        at(l, img) - base,
                    )
                };
                let (m0, r0) = row(&ls[0]);
                let (m1, r1) = row(&ls[1]);
                solve2([m0, m1], [r0, r1])?
            }
        };
        let residual = (0..8)
            .map(|i| (r[i] - u * d1[i] - v * d2[i]).powi(2))
            .sum::<f64>()
            .sqrt();
        Ok(StepImage { u, v, residual })
    }

    pub fn apply(&self, s: &Section2D, u: f64, v: f64) -> Result<StepImage> {
        let img = self.image(&s.point(u, v))?;
        self.project(s, &img)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Trajectory {
    /// Starting point first; every point lies in the section simplex.
    pub points: Vec<[f64; 2]>,
    /// Residual of each step, aligned with `points[1..]`.
    pub residuals: Vec<f64>,
    /// The projected image that left the simplex, if the run stopped early.
    pub exit: Option<[f64; 2]>,
}

impl Trajectory {
    pub fn exited(&self) -> bool {
        self.exit.is_some()
    }
}

pub fn iterate_map(step: &MapStep, s: &Section2D, p0: [f64; 2], k: usize) -> Result<Trajectory> {
    if !Section2D::in_simplex(p0[0], p0[1]) {
        return Err(Error::Parameter(format!("start point {p0:?} is outside the section simplex")));
    }
    let mut t = Trajectory {
        points: vec![p0],
        residuals: Vec::new(),
        exit: None,
    };
    let mut p = p0;
    for _ in 0..k {
        let im = step.apply(s, p[0], p[1])?;
        if !Section2D::in_simplex(im.u, im.v) {
            t.exit = Some([im.u, im.v]);
            break;
        }
        p = [im.u, im.v];
        t.points.push(p);
        t.residuals.push(im.residual);
    }
    Ok(t)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Stability {
    Attracting,
    Repelling,
    Marginal,
}

impl Stability {
    pub fn classify(d: f64) -> Self {
        const TOL: f64 = 1e-6;
        if d.abs() < 1.0 - TOL {
            Stability::Attracting
        } else if d.abs() > 1.0 + TOL {
            Stability::Repelling
        } else {
            Stability::Marginal
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct FixedPoint {
    pub point: f64,
    pub derivative: f64,
    pub stability: Stability,
}

/// An interval on which the map is the identity up to tolerance.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct FixedInterval {
    pub lo: f64,
    pub hi: f64,
    pub derivative: f64,
    pub stability: Stability,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FixedPointScan {
    pub points: Vec<FixedPoint>,
    pub intervals: Vec<FixedInterval>,
}

pub const FD_STEP: f64 = 1e-5;

/// Derivative by central differences; second-order one-sided differences
/// within `FD_STEP` of the ends of `[0, 1]`.
pub fn derivative(f: &impl Fn(f64) -> f64, x: f64) -> f64 {
    let h = FD_STEP;
    if x - h < 0.0 {
        (-3.0 * f(x) + 4.0 * f(x + h) - f(x + 2.0 * h)) / (2.0 * h)
    } else if x + h > 1.0 {
        (3.0 * f(x) - 4.0 * f(x - h) + f(x - 2.0 * h)) / (2.0 * h)
    } else {
        (f(x + h) - f(x - h)) / (2.0 * h)
    }
}

/// Isolates solutions of `f(e) = e` on `[0, 1]` by sampling `samples`
/// subintervals and bisecting sign changes of `f(e) - e`.
pub fn fixed_points_1d(f: impl Fn(f64) -> f64, samples: usize) -> FixedPointScan {
    const ZERO: f64 = 1e-13;
    let n = samples.max(2);
    let g = |x: f64| f(x) - x;
    let xs: Vec<f64> = (0..=n).map(|i| i as f64 / n as f64).collect();
    let gs: Vec<f64> = xs.iter().map(|&x| g(x)).collect();
    let classify = |x: f64| {
        let d = derivative(&f, x);
        (d, Stability::classify(d))
    };
    let mut scan = FixedPointScan {
        points: Vec::new(),
        intervals: Vec::new(),
    };
    let mut i = 0;
    while i <= n {
        if gs[i].abs() <= ZERO {
            // extend a run of sampled zeros
            let mut j = i;
            while j < n && gs[j + 1].abs() <= ZERO {
                j += 1;
            }
            if j > i {
                let mid = (xs[i] + xs[j]) / 2.0;
                let (derivative, stability) = classify(mid);
                scan.intervals.push(FixedInterval {
                    lo: xs[i],
                    hi: xs[j],
                    derivative,
                    stability,
                });
            } else {
                let (derivative, stability) = classify(xs[i]);
                scan.points.push(FixedPoint {
                    point: xs[i],
                    derivative,
                    stability,
                });
            }
            i = j + 1;
            continue;
        }
        if i < n && gs[i + 1].abs() > ZERO && gs[i].signum() != gs[i + 1].signum() {
            let (mut lo, mut hi) = (xs[i], xs[i + 1]);
            for _ in 0..200 {
                let mid = (lo + hi) / 2.0;
                if g(mid).signum() == gs[i].signum() {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            let x = (lo + hi) / 2.0;
            let (derivative, stability) = classify(x);
            scan.points.push(FixedPoint {
                point: x,
                derivative,
                stability,
            });
        }
        i += 1;
    }
    scan
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct FieldRow {
    pub u: f64,
    pub v: f64,
    pub du: f64,
    pub dv: f64,
    pub residual: f64,
}

/// Displacements at the nodes `(i/grid, j/grid)`, `i + j <= grid`, in
/// row-major order.
pub fn vector_field(step: &MapStep, s: &Section2D, grid: usize, workers: usize) -> Result<Vec<FieldRow>> {
    if grid == 0 || workers == 0 {
        return Err(Error::Parameter("grid and workers must be positive".into()));
    }
    let nodes: Vec<(f64, f64)> = (0..=grid)
        .flat_map(|i| (0..=grid - i).map(move |j| (i as f64 / grid as f64, j as f64 / grid as f64)))
        .collect();
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .map_err(|e| Error::Parameter(format!("thread pool: {e}")))?;
    pool.install(|| {
        nodes
            .par_iter()
            .map(|&(u, v)| {
                let im = step.apply(s, u, v)?;
                Ok(FieldRow {
                    u,
                    v,
                    du: im.u - u,
                    dv: im.v - v,
                    residual: im.residual,
                })
            })
            .collect()
    })
}

/// Header plus `u,v,du,dv,residual` rows with 17 significant digits.
pub fn field_csv(rows: &[FieldRow]) -> String {
    let mut s = String::from("u,v,du,dv,residual\n");
    for r in rows {
        s.push_str(&format!(
            "{:.16e},{:.16e},{:.16e},{:.16e},{:.16e}\n",
            r.u, r.v, r.du, r.dv, r.residual
        ));
    }
    s
}

// ---------------------------------------------------------------------------
// Presets. The frames are choices made here, not reconstructions of any
// published figure.

/// `(u, v) = (eps, gamma)`: `eps PR + gamma P_L^{0101} + (1 - eps - gamma) 1`.
pub fn correlated_section() -> Section2D {
    Section2D::new(maximally_mixed(), pr_box(), local_deterministic(0, 1, 0, 1)).expect("independent frame")
}

pub fn distillation_step() -> MapStep {
    MapStep::new(distillation_wiring(), ProjectionRule::LeastSquares)
}

/// `(u, v)`: `u PR + v P_L^{0000} + (1 - u - v) 1`; the isotropic line is `v = 0`.
pub fn isotropic_section() -> Section2D {
    Section2D::new(maximally_mixed(), pr_box(), local_deterministic(0, 0, 0, 0)).expect("independent frame")
}

/// Two-copy AND map read through `I(q)` at `eps_ref` and Alice's first
/// marginal, so that the sign of `I(q)` survives projection: the chord from
/// `(eps_ref, 0)` to `(0, 1)` is exactly the zero set of `I(q)` on the
/// section.
pub fn and_chord_step(eps_ref: &Rational) -> Result<MapStep> {
    let q = facet_q(eps_ref)?;
    let mut w: [Rational; 8] = std::array::from_fn(|_| Rational::zero());
    w[4] = int(1);
    let marginal = LinearFunctional::from_correlator_form(int(0), &w);
    Ok(MapStep::new(
        and_wiring(2)?,
        ProjectionRule::Coordinates(Box::new([tilted_ch(&q), marginal])),
    ))
}

/// `u / eps + v - 1`; positive above the chord of `eps`.
pub fn chord_excess(eps: f64, u: f64, v: f64) -> f64 {
    u / eps + v - 1.0
}

pub fn update_distillation(e: f64) -> f64 {
    2.0 * e - e * e
}
