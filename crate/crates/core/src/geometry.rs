//! Polytopes of boxes in vertex form, affine functionals, exact membership.
//!
//! Membership is decided by an exact LP over the correlator coordinates; the
//! answer always carries a certificate that is re-checked before returning:
//! convex weights reproducing the box, or an integer functional that is
//! non-negative on every vertex and negative on the box.

use std::collections::{HashMap, HashSet};

use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lp::{self, LpOutcome};
use crate::nsbox::{self, correlators, idx, unidx, NsBox, Table};
use crate::rational::{format_rational, int, normalize_integer, rat, Rational};
use crate::relabel::{group, Relabeling};

// ---------------------------------------------------------------------------
// Functionals

/// `f(P) = constant + sum_i coeffs[i] * P[i]`, read as the inequality `f >= 0`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct LinearFunctional {
    #[serde(with = "crate::rational::serde_str")]
    pub constant: Rational,
    #[serde(with = "table_serde")]
    pub coeffs: Table,
}

mod table_serde {
    use super::*;
    use serde::{de::Error as _, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(t: &Table, s: S) -> std::result::Result<S::Ok, S::Error> {
        crate::rational::serde_str::vec::serialize(t, s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<Table, D::Error> {
        let v = crate::rational::serde_str::vec::deserialize(d)?;
        <Table>::try_from(v).map_err(|v| D::Error::custom(format!("expected 16 coefficients, got {}", v.len())))
    }
}

impl LinearFunctional {
    pub fn new(constant: Rational, coeffs: Table) -> Self {
        LinearFunctional { constant, coeffs }
    }

    pub fn evaluate(&self, b: &NsBox) -> Rational {
        self.evaluate_table(b.table())
    }

    pub fn evaluate_table(&self, p: &Table) -> Rational {
        let mut s = self.constant.clone();
        for (c, v) in self.coeffs.iter().zip(p) {
            if !c.is_zero() && !v.is_zero() {
                s += c * v;
            }
        }
        s
    }

    pub fn evaluate_f64(&self, p: &[f64; 16]) -> f64 {
        crate::rational::to_f64(&self.constant)
            + self
                .coeffs
                .iter()
                .zip(p)
                .map(|(c, v)| crate::rational::to_f64(c) * v)
                .sum::<f64>()
    }

    /// Builds the functional
    /// `constant + sum_xy w_E[xy] E_xy + sum_x w_A[x] mA_x + sum_y w_B[y] mB_y`
    /// with weights in [`nsbox::Correlators::coords`] order.
    pub fn from_correlator_form(constant: Rational, w: &[Rational; 8]) -> Self {
        let mut coeffs: Table = std::array::from_fn(|_| Rational::zero());
        for (i, slot) in coeffs.iter_mut().enumerate() {
            let (a, b, x, y) = unidx(i);
            let sg = |bit: usize| if bit == 0 { int(1) } else { int(-1) };
            *slot += sg(a ^ b) * &w[2 * x + y];
            if y == 0 {
                *slot += sg(a) * &w[4 + x];
            }
            if x == 0 {
                *slot += sg(b) * &w[6 + y];
            }
        }
        LinearFunctional { constant, coeffs }
    }

    /// The unique representation on the affine hull of the non-signalling
    /// polytope: `(constant, weights)` in correlator coordinates.
    pub fn correlator_form(&self) -> (Rational, [Rational; 8]) {
        let four = int(4);
        let mut constant = self.constant.clone();
        let mut w: [Rational; 8] = std::array::from_fn(|_| Rational::zero());
        for (i, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let q = c / &four;
            let (a, b, x, y) = unidx(i);
            constant += &q;
            let sg = |bit: usize| if bit == 0 { q.clone() } else { -q.clone() };
            w[2 * x + y] += sg(a ^ b);
            w[4 + x] += sg(a);
            w[6 + y] += sg(b);
        }
        (constant, w)
    }

    /// Positive rescaling to integer coefficients with gcd 1.
    pub fn normalized(&self) -> Self {
        let mut all: Vec<Rational> = self.coeffs.to_vec();
        all.push(self.constant.clone());
        let n = normalize_integer(&all);
        LinearFunctional {
            constant: n[16].clone(),
            coeffs: std::array::from_fn(|i| n[i].clone()),
        }
    }

    /// Canonical identity on non-signalling boxes (positive scaling ignored).
    pub fn key(&self) -> Vec<Rational> {
        let (c, w) = self.correlator_form();
        let mut v = vec![c];
        v.extend(w);
        normalize_integer(&v)
    }

    pub fn equivalent(&self, other: &LinearFunctional) -> bool {
        self.key() == other.key()
    }

    /// `g.f`, defined by `(g.f)(g.P) = f(P)`.
    pub fn transform(&self, g: &Relabeling) -> Self {
        LinearFunctional {
            constant: self.constant.clone(),
            coeffs: g.permute(&self.coeffs),
        }
    }

    pub fn scaled(&self, s: &Rational) -> Self {
        LinearFunctional {
            constant: &self.constant * s,
            coeffs: std::array::from_fn(|i| &self.coeffs[i] * s),
        }
    }
}

/// `CH = 1 - P(11|00) - P(00|10) - P(00|01) + P(00|11) >= 0`.
pub fn ch() -> LinearFunctional {
    tilted_ch(&Rational::zero())
}

/// `I(q) = CH + q P(11|11) >= 0`.
pub fn tilted_ch(q: &Rational) -> LinearFunctional {
    let mut coeffs: Table = std::array::from_fn(|_| Rational::zero());
    coeffs[idx(1, 1, 0, 0)] = int(-1);
    coeffs[idx(0, 0, 1, 0)] = int(-1);
    coeffs[idx(0, 0, 0, 1)] = int(-1);
    coeffs[idx(0, 0, 1, 1)] = int(1);
    coeffs[idx(1, 1, 1, 1)] = q.clone();
    LinearFunctional::new(Rational::one(), coeffs)
}

/// `P(ab|xy) >= 0`.
pub fn positivity(a: usize, b: usize, x: usize, y: usize) -> LinearFunctional {
    let mut coeffs: Table = std::array::from_fn(|_| Rational::zero());
    coeffs[idx(a, b, x, y)] = Rational::one();
    LinearFunctional::new(Rational::zero(), coeffs)
}

pub fn positivity_facets() -> Vec<LinearFunctional> {
    (0..16)
        .map(|i| {
            let (a, b, x, y) = unidx(i);
            positivity(a, b, x, y)
        })
        .collect()
}

/// `bound - CHSH_sym >= 0`.
pub fn chsh_bound(sym: usize, bound: &Rational) -> LinearFunctional {
    let s = nsbox::chsh_signs(sym);
    let mut w: [Rational; 8] = std::array::from_fn(|_| Rational::zero());
    for k in 0..4 {
        w[k] = int(-s[k]);
    }
    LinearFunctional::from_correlator_form(bound.clone(), &w)
}

/// Tilt making `I(q)` tight on the noisy PR vertex of weight `eps`:
/// `q = 2(2 eps - 1) / (1 - eps)`.
pub fn facet_q(eps: &Rational) -> Result<Rational> {
    if eps.is_one() {
        return Err(Error::DivisionByZero("facet tilt at eps = 1".into()));
    }
    if eps < &rat(1, 2) || eps > &Rational::one() {
        return Err(Error::Parameter(format!(
            "facet tilt needs 1/2 <= eps < 1, got {}",
            format_rational(eps)
        )));
    }
    Ok(int(2) * (int(2) * eps - int(1)) / (Rational::one() - eps))
}

/// Distinct images of `f` under the relabeling group, normalized, in group order.
pub fn facet_orbit(f: &LinearFunctional) -> Vec<LinearFunctional> {
    let mut seen = HashSet::new();
    let mut out = Vec::new();
    for g in group() {
        let h = f.transform(g);
        if seen.insert(h.key()) {
            out.push(h.normalized());
        }
    }
    out
}

// ---------------------------------------------------------------------------
// Polytopes

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LabeledBox {
    pub label: String,
    #[serde(rename = "box")]
    pub value: NsBox,
}

/// Vertex list; serialized as a JSON list of `{"label", "box"}` objects.
#[derive(Clone, Debug, PartialEq, Default)]
pub struct VPolytope {
    pub vertices: Vec<NsBox>,
    pub labels: Vec<String>,
}

impl Serialize for VPolytope {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let list: Vec<LabeledBox> = self
            .vertices
            .iter()
            .zip(&self.labels)
            .map(|(v, l)| LabeledBox {
                label: l.clone(),
                value: v.clone(),
            })
            .collect();
        list.serialize(s)
    }
}

impl<'de> Deserialize<'de> for VPolytope {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let list = Vec::<LabeledBox>::deserialize(d)?;
        Ok(VPolytope::from_labeled(list.into_iter().map(|lb| (lb.label, lb.value))))
    }
}

impl VPolytope {
    pub fn from_labeled(items: impl IntoIterator<Item = (String, NsBox)>) -> Self {
        let (labels, vertices) = items.into_iter().unzip();
        VPolytope { vertices, labels }
    }

    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    pub fn push(&mut self, label: impl Into<String>, b: NsBox) {
        self.labels.push(label.into());
        self.vertices.push(b);
    }

    fn subset(&self, mut keep: impl FnMut(usize) -> bool) -> VPolytope {
        VPolytope::from_labeled(
            (0..self.len())
                .filter(|&i| keep(i))
                .map(|i| (self.labels[i].clone(), self.vertices[i].clone())),
        )
    }

    /// Whether every relabeling maps the vertex set onto itself.
    pub fn is_group_invariant(&self) -> bool {
        let set: HashSet<&NsBox> = self.vertices.iter().collect();
        group()
            .iter()
            .all(|g| self.vertices.iter().all(|v| set.contains(&g.apply(v))))
    }
}

pub fn ns_polytope() -> VPolytope {
    VPolytope::from_labeled(nsbox::ns_vertices())
}

pub fn local_polytope() -> VPolytope {
    VPolytope::from_labeled(nsbox::local_vertices())
}

fn check_cutoff(s: &Rational) -> Result<()> {
    if s <= &int(2) || s >= &int(4) {
        return Err(Error::Parameter(format!(
            "CHSH cut-off must satisfy 2 < S < 4, got {}",
            format_rational(s)
        )));
    }
    Ok(())
}

/// CHSH-limited polytope: local vertices plus the 64 edge boxes at
/// `eps = S/2 - 1`.
pub fn r_a_polytope(s: &Rational) -> Result<VPolytope> {
    check_cutoff(s)?;
    let eps = s / int(2) - int(1);
    let mut items = nsbox::local_vertices();
    items.extend(nsbox::edge_boxes(&eps)?);
    Ok(VPolytope::from_labeled(items))
}

/// Noisy-PR polytope: local vertices plus the 8 extremal boxes with white
/// noise, `eps = S/4`.
pub fn r_b_polytope(s: &Rational) -> Result<VPolytope> {
    check_cutoff(s)?;
    r_b_polytope_eps(&(s / int(4)))
}

/// [`r_b_polytope`] parameterized by the noise weight; accepts `0 < eps <= 1`.
pub fn r_b_polytope_eps(eps: &Rational) -> Result<VPolytope> {
    if !eps.is_positive() || eps > &Rational::one() {
        return Err(Error::Parameter(format!(
            "noise weight must satisfy 0 < eps <= 1, got {}",
            format_rational(eps)
        )));
    }
    let mut items = nsbox::local_vertices();
    for m in 0..8u8 {
        let (mu, nu, sigma) = (m >> 2 & 1, m >> 1 & 1, m & 1);
        items.push((
            format!("N{mu}{nu}{sigma}"),
            nsbox::isotropic_nl(mu, nu, sigma, eps)?,
        ));
    }
    Ok(VPolytope::from_labeled(items))
}

// ---------------------------------------------------------------------------
// Membership

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Membership {
    Inside {
        #[serde(with = "crate::rational::serde_str::vec")]
        weights: Vec<Rational>,
    },
    Outside {
        separator: LinearFunctional,
    },
}

impl Membership {
    pub fn is_inside(&self) -> bool {
        matches!(self, Membership::Inside { .. })
    }

    /// Re-checks the certificate against `b` and `poly`, exactly.
    pub fn verify(&self, b: &NsBox, poly: &VPolytope) -> bool {
        match self {
            Membership::Inside { weights } => {
                if weights.len() != poly.len()
                    || weights.iter().any(|w| w.is_negative())
                    || !weights.iter().sum::<Rational>().is_one()
                {
                    return false;
                }
                let mut acc: Table = std::array::from_fn(|_| Rational::zero());
                for (w, v) in weights.iter().zip(&poly.vertices) {
                    if w.is_zero() {
                        continue;
                    }
                    for (slot, e) in acc.iter_mut().zip(v.table()) {
                        *slot += w * e;
                    }
                }
                &acc == b.table()
            }
            Membership::Outside { separator } => {
                separator.evaluate(b).is_negative()
                    && poly
                        .vertices
                        .iter()
                        .all(|v| !separator.evaluate(v).is_negative())
            }
        }
    }
}

fn lp_coordinates(b: &NsBox) -> Vec<Rational> {
    let mut c = correlators(b).coords().to_vec();
    c.push(Rational::one());
    c
}

/// Decides `b ∈ conv(poly)` and returns a verified certificate.
pub fn in_hull(b: &NsBox, poly: &VPolytope) -> Membership {
    let cols: Vec<Vec<Rational>> = poly.vertices.iter().map(lp_coordinates).collect();
    let target = lp_coordinates(b);
    let rows: Vec<Vec<Rational>> = (0..9)
        .map(|r| cols.iter().map(|c| c[r].clone()).collect())
        .collect();
    let cost = vec![Rational::zero(); poly.len()];
    let cert = match lp::solve(&rows, &target, &cost) {
        LpOutcome::Optimal { x, .. } => Membership::Inside { weights: x },
        LpOutcome::Infeasible { farkas } => {
            // h(z) = -(y . coords(z) + y_8) is >= 0 on the vertices and < 0 at b.
            let w: [Rational; 8] = std::array::from_fn(|k| -farkas[k].clone());
            let h = LinearFunctional::from_correlator_form(-farkas[8].clone(), &w);
            Membership::Outside {
                separator: h.normalized(),
            }
        }
        LpOutcome::Unbounded => unreachable!("feasibility problem has a zero objective"),
    };
    assert!(cert.verify(b, poly), "membership certificate failed to verify");
    cert
}

/// Removes every point that is a convex combination of the others.
pub fn reduce(poly: &VPolytope) -> VPolytope {
    let mut seen = HashSet::new();
    let mut keep: Vec<bool> = poly.vertices.iter().map(|v| seen.insert(v.clone())).collect();
    for i in 0..poly.len() {
        if !keep[i] {
            continue;
        }
        let others = poly.subset(|j| j != i && keep[j]);
        if !others.is_empty() && in_hull(&poly.vertices[i], &others).is_inside() {
            keep[i] = false;
        }
    }
    poly.subset(|i| keep[i])
}

/// [`reduce`] for relabeling-invariant vertex sets: extremality is constant
/// on orbits, so one LP per orbit decides it. Falls back to [`reduce`] when
/// the set is not invariant.
pub fn reduce_symmetric(poly: &VPolytope) -> VPolytope {
    let mut seen = HashSet::new();
    let dedup = poly.subset(|i| seen.insert(poly.vertices[i].clone()));
    if !dedup.is_group_invariant() {
        return reduce(&dedup);
    }
    let index: HashMap<&NsBox, usize> = dedup.vertices.iter().enumerate().map(|(i, v)| (v, i)).collect();
    let mut orbit_of = vec![usize::MAX; dedup.len()];
    let mut reps = Vec::new();
    for i in 0..dedup.len() {
        if orbit_of[i] != usize::MAX {
            continue;
        }
        reps.push(i);
        for g in group() {
            orbit_of[index[&g.apply(&dedup.vertices[i])]] = i;
        }
    }
    let redundant: HashSet<usize> = reps
        .into_iter()
        .filter(|&r| {
            let others = dedup.subset(|j| j != r);
            !others.is_empty() && in_hull(&dedup.vertices[r], &others).is_inside()
        })
        .collect();
    dedup.subset(|i| !redundant.contains(&orbit_of[i]))
}

/// Affine dimension of a point set in correlator coordinates.
pub fn affine_dimension(points: &[&NsBox]) -> usize {
    let Some(first) = points.first() else {
        return 0;
    };
    let base = correlators(first).coords();
    let rows: Vec<Vec<Rational>> = points[1..]
        .iter()
        .map(|p| {
            correlators(p)
                .coords()
                .iter()
                .zip(&base)
                .map(|(a, b)| a - b)
                .collect()
        })
        .collect();
    rank(rows)
}

pub fn rank(mut rows: Vec<Vec<Rational>>) -> usize {
    let cols = rows.first().map_or(0, Vec::len);
    let mut r = 0;
    for c in 0..cols {
        let Some(p) = (r..rows.len()).find(|&i| !rows[i][c].is_zero()) else {
            continue;
        };
        rows.swap(r, p);
        for i in r + 1..rows.len() {
            if rows[i][c].is_zero() {
                continue;
            }
            let f = &rows[i][c] / &rows[r][c];
            for j in c..cols {
                let d = &f * &rows[r][j];
                rows[i][j] -= d;
            }
        }
        r += 1;
    }
    r
}

/// Indices of vertices where `f` vanishes.
pub fn tight_vertices(f: &LinearFunctional, poly: &VPolytope) -> Vec<usize> {
    (0..poly.len())
        .filter(|&i| f.evaluate(&poly.vertices[i]).is_zero())
        .collect()
}

/// Valid on every vertex and tight on a 7-dimensional vertex subset.
pub fn is_facet(f: &LinearFunctional, poly: &VPolytope) -> bool {
    if poly.vertices.iter().any(|v| f.evaluate(v).is_negative()) {
        return false;
    }
    let tight: Vec<&NsBox> = tight_vertices(f, poly).into_iter().map(|i| &poly.vertices[i]).collect();
    affine_dimension(&tight) == 7
}

// ---------------------------------------------------------------------------
// Uffink's quadratic set

/// `(E00 + E10)^2 + (E01 - E11)^2`.
pub fn uffink_lhs(b: &NsBox) -> Rational {
    let c = correlators(b);
    let s = c.e(0, 0) + c.e(1, 0);
    let d = c.e(0, 1) - c.e(1, 1);
    &s * &s + &d * &d
}

pub fn in_uffink(b: &NsBox) -> bool {
    uffink_lhs(b) <= int(4)
}

/// Table form: also requires the table to be a valid box.
pub fn in_uffink_table(p: &Table) -> bool {
    NsBox::new(p.clone()).map(|b| in_uffink(&b)).unwrap_or(false)
}

pub fn uffink_lhs_f64(e: [f64; 4]) -> f64 {
    (e[0] + e[2]).powi(2) + (e[1] - e[3]).powi(2)
}
