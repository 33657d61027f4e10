//! Exhaustive search over deterministic two-box wirings for facet violations.
//!
//! A two-box party strategy is a usage order plus, for each value `v` of the
//! party input, a *slice*: the input `c1` for the first box used, the input
//! `c2(r)` for the second box given the first output `r`, and the final
//! output `g(r0, r1)` (outputs in box order). Slice bits:
//! `c1 | c2 << 1 | g << 3`, so 128 slices per order and input value.
//!
//! Strategies are identified by the map they induce from (input, outputs) to
//! (box inputs, final output). Only strategies with an adaptive slice depend
//! on the order, so order `[1, 0]` contributes the pairs of slices that are
//! not both non-adaptive: `128^2 + 128^2 - 64^2 = 28672` classes.
//!
//! For a facet `f` the scaled value of the wired box splits as
//! `f0 + sum_{x,y} T_xy(A_x, B_y)` where `A_x`, `B_y` are the slices for the
//! actual inputs. For fixed Alice slices the minimum over Bob therefore
//! decouples into one 128-way minimum per Bob input, so every Alice class is
//! checked against all of Bob's strategies at once.
//!
//! Reductions: facets are scanned one per relabeling orbit (vertex set
//! invariant), and vertex pairs are unordered, because both the wiring space
//! and the vertex set are closed under these symmetries.

use std::collections::HashMap;
use std::ops::Add;
use std::time::{Duration, Instant};

use num_bigint::BigInt;
use num_traits::{Signed, ToPrimitive};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{LinearFunctional, VPolytope};
use crate::nsbox::{idx, NsBox};
use crate::rational::{common_denominator, serde_str, Rational};
use crate::wiring::{apply_wiring, PartyStrategy, TruthTable, Wiring};

pub const SLICES: usize = 128;
pub const RAW_STRATEGIES: usize = 2 * 4 * 16 * 256;
pub const CANONICAL_STRATEGIES: usize = SLICES * SLICES * 2 - 64 * 64;

#[inline]
fn non_adaptive(s: usize) -> bool {
    let c2 = s >> 1 & 3;
    c2 == 0 || c2 == 3
}

/// Box inputs `(in0, in1)` and the final output for outputs `(r0, r1)`.
#[inline]
fn slice_eval(order: usize, s: usize, r0: usize, r1: usize) -> (usize, usize, usize) {
    let c1 = s & 1;
    let c2 = s >> 1 & 3;
    let g = s >> 3;
    let (in0, in1) = if order == 0 {
        (c1, c2 >> r0 & 1)
    } else {
        (c2 >> r1 & 1, c1)
    };
    (in0, in1, g >> (r0 | r1 << 1) & 1)
}

/// The party strategy with usage order `order` (0: `[0, 1]`, 1: `[1, 0]`)
/// and slices `s[v]` for party input `v`.
pub fn strategy_from_slices(order: usize, s: [usize; 2]) -> PartyStrategy {
    PartyStrategy {
        order: if order == 0 { vec![0, 1] } else { vec![1, 0] },
        input_fns: vec![
            TruthTable::from_fn(1, |i| s[i & 1] & 1 == 1),
            TruthTable::from_fn(2, |i| s[i & 1] >> (1 + (i >> 1)) & 1 == 1),
        ],
        output_fn: TruthTable::from_fn(3, |i| s[i & 1] >> (3 + (i >> 1)) & 1 == 1),
    }
}

/// Canonical strategy classes as `(order, slice for v = 0, slice for v = 1)`.
pub fn canonical_strategies() -> Vec<(usize, usize, usize)> {
    let mut out = Vec::with_capacity(CANONICAL_STRATEGIES);
    for order in 0..2 {
        for s0 in 0..SLICES {
            for s1 in 0..SLICES {
                if order == 1 && non_adaptive(s0) && non_adaptive(s1) {
                    continue;
                }
                out.push((order, s0, s1));
            }
        }
    }
    out
}

#[derive(Clone, Debug)]
pub struct SearchConfig {
    pub workers: usize,
    /// Stop after this many (vertex pair, facet) units.
    pub max_units: Option<usize>,
    /// Violations kept with full certificates; all are counted.
    pub max_violations: usize,
    /// Named wirings evaluated explicitly on every ordered vertex pair and
    /// every facet.
    pub probes: Vec<(String, Wiring)>,
}

impl Default for SearchConfig {
    fn default() -> Self {
        SearchConfig {
            workers: 1,
            max_units: None,
            max_violations: 16,
            probes: Vec::new(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SearchStatus {
    Complete,
    BudgetExhausted,
}

/// A wiring applied to two vertices that drives a facet negative.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Violation {
    pub labels: [String; 2],
    pub inputs: [NsBox; 2],
    pub wiring: Wiring,
    pub output: NsBox,
    pub facet_index: usize,
    pub facet: LinearFunctional,
    #[serde(with = "serde_str")]
    pub amount: Rational,
}

impl Violation {
    /// Recomputes the output from the stored wiring and inputs.
    pub fn verify(&self) -> bool {
        match apply_wiring(&self.wiring, &self.inputs) {
            Ok(out) => out == self.output && self.facet.evaluate(&out) == self.amount && self.amount.is_negative(),
            Err(_) => false,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ProbeResult {
    pub name: String,
    pub evaluations: usize,
    pub violation_count: usize,
    pub first: Option<Violation>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SearchReport {
    pub vertex_count: usize,
    pub facet_count: usize,
    /// Facets actually scanned; the rest are relabelings of these.
    pub facet_representatives: Vec<usize>,
    pub symmetry_reduced: bool,
    pub raw_strategies_per_party: usize,
    pub canonical_strategies_per_party: usize,
    pub canonical_wirings: u64,
    pub vertex_pairs: usize,
    pub units_total: usize,
    pub units_scanned: usize,
    /// Alice classes checked, each against all of Bob's strategies.
    pub alice_evaluations: u64,
    /// (unit, Alice class) combinations with some violating Bob strategy.
    pub violating_alice_classes: u64,
    pub violations: Vec<Violation>,
    pub probes: Vec<ProbeResult>,
    pub status: SearchStatus,
}

impl SearchReport {
    pub fn closed(&self) -> bool {
        self.status == SearchStatus::Complete && self.violating_alice_classes == 0
    }
}

#[derive(Clone, Debug)]
pub struct SearchRun {
    pub report: SearchReport,
    pub elapsed: Duration,
}

trait Int: Copy + Ord + Add<Output = Self> + Send + Sync + std::fmt::Debug {
    fn from_i128(v: i128) -> Self;
    fn to_i128(self) -> i128;
    fn zero() -> Self;
}

impl Int for i64 {
    fn from_i128(v: i128) -> Self {
        v as i64
    }
    fn to_i128(self) -> i128 {
        self as i128
    }
    fn zero() -> Self {
        0
    }
}

impl Int for i128 {
    fn from_i128(v: i128) -> Self {
        v
    }
    fn to_i128(self) -> i128 {
        self
    }
    fn zero() -> Self {
        0
    }
}

/// Scaled integer data for one (vertex pair, facet) unit.
struct UnitData {
    p: [i128; 16],
    q: [i128; 16],
    c: [i128; 16],
    c0: i128,
    /// `|value| <= bound` for every wiring.
    bound: i128,
}

fn scaled(values: &[Rational]) -> Result<(Vec<i128>, BigInt)> {
    let d = common_denominator(values.iter());
    let v = values
        .iter()
        .map(|r| {
            (r * Rational::from_integer(d.clone()))
                .to_integer()
                .to_i128()
                .ok_or_else(|| Error::Overflow("box or facet entries exceed 128 bits".into()))
        })
        .collect::<Result<_>>()?;
    Ok((v, d))
}

fn unit_data(p: &NsBox, q: &NsBox, f: &LinearFunctional) -> Result<UnitData> {
    let (pv, dp) = scaled(p.table())?;
    let (qv, dq) = scaled(q.table())?;
    let nf = f.normalized();
    let mut all = nf.coeffs.to_vec();
    all.push(nf.constant.clone());
    let (cv, _) = scaled(&all)?;
    let too_big = || Error::Overflow("scaled facet values exceed 128 bits".into());
    let dpq = (dp * dq).to_i128().ok_or_else(too_big)?;
    let cmax = cv.iter().map(|c| c.abs()).max().unwrap_or(0);
    let bound = cmax
        .checked_mul(dpq)
        .and_then(|v| v.checked_mul(5))
        .ok_or_else(too_big)?;
    let c0 = cv[16].checked_mul(dpq).ok_or_else(too_big)?;
    Ok(UnitData {
        p: pv.try_into().unwrap(),
        q: qv.try_into().unwrap(),
        c: cv[..16].try_into().unwrap(),
        c0,
        bound,
    })
}

/// `T[oa][ob][x][y][sa][sb]`, flattened.
fn slice_tables<T: Int>(u: &UnitData) -> Vec<T> {
    let mut t = vec![T::zero(); 16 * SLICES * SLICES];
    for oa in 0..2 {
        for ob in 0..2 {
            for sa in 0..SLICES {
                for sb in 0..SLICES {
                    let mut acc = [[0i128; 2]; 2];
                    for ra in 0..4 {
                        let (ia0, ia1, a) = slice_eval(oa, sa, ra & 1, ra >> 1);
                        for tb in 0..4 {
                            let (ib0, ib1, b) = slice_eval(ob, sb, tb & 1, tb >> 1);
                            let w = u.p[idx(ra & 1, tb & 1, ia0, ib0)] * u.q[idx(ra >> 1, tb >> 1, ia1, ib1)];
                            if w == 0 {
                                continue;
                            }
                            for x in 0..2 {
                                for y in 0..2 {
                                    acc[x][y] += w * u.c[idx(a, b, x, y)];
                                }
                            }
                        }
                    }
                    for x in 0..2 {
                        for y in 0..2 {
                            t[table_row(oa, ob, x, y, sa) + sb] = T::from_i128(acc[x][y]);
                        }
                    }
                }
            }
        }
    }
    t
}

#[inline]
fn table_row(oa: usize, ob: usize, x: usize, y: usize, sa: usize) -> usize {
    ((((oa * 2 + ob) * 2 + x) * 2 + y) * SLICES + sa) * SLICES
}

#[inline]
fn min_sum<T: Int>(r0: &[T], r1: &[T]) -> T {
    r0.iter()
        .zip(r1)
        .map(|(&a, &b)| a + b)
        .min()
        .expect("slices are non-empty")
}

#[inline]
fn argmin_sum<T: Int>(r0: &[T], r1: &[T]) -> usize {
    (0..SLICES).min_by_key(|&s| r0[s] + r1[s]).expect("slices are non-empty")
}

struct RawViolation {
    order_a: usize,
    a: [usize; 2],
    order_b: usize,
    b: [usize; 2],
    value: i128,
}

struct UnitResult {
    violating: u64,
    raw: Vec<RawViolation>,
}

fn scan_unit<T: Int>(u: &UnitData, keep: usize) -> UnitResult {
    let t = slice_tables::<T>(u);
    let c0 = T::from_i128(u.c0);
    let row = |oa, ob, x, y, s| {
        let start = table_row(oa, ob, x, y, s);
        &t[start..start + SLICES]
    };
    let mut violating = 0u64;
    let mut raw = Vec::new();
    for oa in 0..2 {
        for a0 in 0..SLICES {
            for a1 in 0..SLICES {
                if oa == 1 && non_adaptive(a0) && non_adaptive(a1) {
                    continue;
                }
                let per_order = |ob| {
                    c0 + min_sum(row(oa, ob, 0, 0, a0), row(oa, ob, 1, 0, a1))
                        + min_sum(row(oa, ob, 0, 1, a0), row(oa, ob, 1, 1, a1))
                };
                let (v0, v1) = (per_order(0), per_order(1));
                let best = v0.min(v1);
                if best.to_i128() >= 0 {
                    continue;
                }
                violating += 1;
                if raw.len() < keep {
                    let ob = if v0 <= v1 { 0 } else { 1 };
                    let b0 = argmin_sum(row(oa, ob, 0, 0, a0), row(oa, ob, 1, 0, a1));
                    let b1 = argmin_sum(row(oa, ob, 0, 1, a0), row(oa, ob, 1, 1, a1));
                    raw.push(RawViolation {
                        order_a: oa,
                        a: [a0, a1],
                        order_b: ob,
                        b: [b0, b1],
                        value: best.to_i128(),
                    });
                }
            }
        }
    }
    UnitResult { violating, raw }
}

/// Groups facets into relabeling orbits (by canonical key) and returns one
/// index per orbit.
fn orbit_representatives(facets: &[LinearFunctional]) -> Vec<usize> {
    let keys: HashMap<Vec<Rational>, usize> = facets
        .iter()
        .enumerate()
        .rev()
        .map(|(i, f)| (f.key(), i))
        .collect();
    let mut class = vec![usize::MAX; facets.len()];
    let mut reps = Vec::new();
    for i in 0..facets.len() {
        if class[i] != usize::MAX {
            continue;
        }
        reps.push(i);
        for g in crate::relabel::group() {
            if let Some(&j) = keys.get(&facets[i].transform(g).key()) {
                class[j] = i;
            }
        }
        class[i] = i;
    }
    reps
}

fn probe(
    name: &str,
    w: &Wiring,
    poly: &VPolytope,
    facets: &[LinearFunctional],
) -> Result<ProbeResult> {
    if w.n() != 2 {
        return Err(Error::Arity(format!("probe {name} is not a two-box wiring")));
    }
    let mut result = ProbeResult {
        name: name.to_string(),
        evaluations: 0,
        violation_count: 0,
        first: None,
    };
    for i in 0..poly.len() {
        for j in 0..poly.len() {
            let inputs = [poly.vertices[i].clone(), poly.vertices[j].clone()];
            let out = apply_wiring(w, &inputs)?;
            for (k, f) in facets.iter().enumerate() {
                result.evaluations += 1;
                let v = f.evaluate(&out);
                if !v.is_negative() {
                    continue;
                }
                result.violation_count += 1;
                if result.first.is_none() {
                    result.first = Some(Violation {
                        labels: [poly.labels[i].clone(), poly.labels[j].clone()],
                        inputs: inputs.clone(),
                        wiring: w.clone(),
                        output: out.clone(),
                        facet_index: k,
                        facet: f.clone(),
                        amount: v,
                    });
                }
            }
        }
    }
    Ok(result)
}

/// Checks every deterministic two-box wiring on every pair of vertices of
/// `poly` against every functional in `facets`.
pub fn two_box_closure_search(
    poly: &VPolytope,
    facets: &[LinearFunctional],
    config: &SearchConfig,
) -> Result<SearchRun> {
    let start = Instant::now();
    for (k, f) in facets.iter().enumerate() {
        if poly.vertices.iter().any(|v| f.evaluate(v).is_negative()) {
            return Err(Error::Parameter(format!("facet {k} is not valid on the vertex set")));
        }
    }
    if config.workers == 0 {
        return Err(Error::Parameter("workers must be at least 1".into()));
    }
    let symmetry_reduced = poly.is_group_invariant();
    let reps = if symmetry_reduced {
        orbit_representatives(facets)
    } else {
        (0..facets.len()).collect()
    };
    let nv = poly.len();
    let mut units = Vec::new();
    for i in 0..nv {
        for j in i..nv {
            for &f in &reps {
                units.push((i, j, f));
            }
        }
    }
    let units_total = units.len();
    let scanned = config.max_units.map_or(units_total, |m| m.min(units_total));
    let data = units[..scanned]
        .iter()
        .map(|&(i, j, f)| unit_data(&poly.vertices[i], &poly.vertices[j], &facets[f]))
        .collect::<Result<Vec<_>>>()?;
    let keep = config.max_violations;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(config.workers)
        .build()
        .map_err(|e| Error::Parameter(format!("thread pool: {e}")))?;
    let results: Vec<UnitResult> = pool.install(|| {
        data.par_iter()
            .map(|u| {
                if u.bound < 1 << 62 {
                    scan_unit::<i64>(u, keep)
                } else {
                    scan_unit::<i128>(u, keep)
                }
            })
            .collect()
    });

    let mut violating = 0u64;
    let mut violations = Vec::new();
    for (&(i, j, f), res) in units.iter().zip(&results) {
        violating += res.violating;
        for r in &res.raw {
            if violations.len() >= keep {
                break;
            }
            let wiring = Wiring::new(
                strategy_from_slices(r.order_a, r.a),
                strategy_from_slices(r.order_b, r.b),
            )?;
            let inputs = [poly.vertices[i].clone(), poly.vertices[j].clone()];
            let output = apply_wiring(&wiring, &inputs)?;
            let amount = facets[f].evaluate(&output);
            // cross-check the integer scan against the exact evaluation
            let nf = facets[f].normalized();
            let scale = Rational::from_integer(
                common_denominator(inputs[0].table()) * common_denominator(inputs[1].table()),
            );
            assert_eq!(
                nf.evaluate(&output) * scale,
                Rational::from_integer(BigInt::from(r.value)),
                "integer scan disagrees with exact evaluation"
            );
            let v = Violation {
                labels: [poly.labels[i].clone(), poly.labels[j].clone()],
                inputs,
                wiring,
                output,
                facet_index: f,
                facet: facets[f].clone(),
                amount,
            };
            assert!(v.verify(), "stored violation failed to re-verify");
            violations.push(v);
        }
    }
    let probes = config
        .probes
        .iter()
        .map(|(name, w)| probe(name, w, poly, facets))
        .collect::<Result<Vec<_>>>()?;
    let report = SearchReport {
        vertex_count: nv,
        facet_count: facets.len(),
        facet_representatives: reps,
        symmetry_reduced,
        raw_strategies_per_party: RAW_STRATEGIES,
        canonical_strategies_per_party: CANONICAL_STRATEGIES,
        canonical_wirings: (CANONICAL_STRATEGIES as u64).pow(2),
        vertex_pairs: nv * (nv + 1) / 2,
        units_total,
        units_scanned: scanned,
        alice_evaluations: scanned as u64 * CANONICAL_STRATEGIES as u64,
        violating_alice_classes: violating,
        violations,
        probes,
        status: if scanned == units_total {
            SearchStatus::Complete
        } else {
            SearchStatus::BudgetExhausted
        },
    };
    Ok(SearchRun {
        report,
        elapsed: start.elapsed(),
    })
}
