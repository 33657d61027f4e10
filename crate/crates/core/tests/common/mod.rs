#![allow(dead_code)]

use nsclosure::nsbox::{mix, ns_vertices, NsBox};
use nsclosure::rational::{rat, Rational};
use nsclosure::wiring::{PartyStrategy, TruthTable, Wiring};
use rand::seq::SliceRandom;
use rand::Rng;

/// Random rational mixture of the 24 non-signalling vertices.
pub fn random_box(rng: &mut impl Rng) -> NsBox {
    let verts = ns_vertices();
    let weights: Vec<i64> = (0..verts.len()).map(|_| rng.gen_range(0..6)).collect();
    let total: i64 = weights.iter().sum::<i64>().max(1);
    let mut terms: Vec<(Rational, &NsBox)> = weights
        .iter()
        .zip(&verts)
        .filter(|(w, _)| **w > 0)
        .map(|(&w, (_, b))| (rat(w, total), b))
        .collect();
    if terms.is_empty() {
        terms.push((rat(1, 1), &verts[0].1));
    }
    mix(&terms).unwrap()
}

pub fn random_table(rng: &mut impl Rng, arity: u32) -> TruthTable {
    TruthTable::from_mask(arity, rng.gen::<u64>())
}

pub fn random_strategy(rng: &mut impl Rng, n: usize) -> PartyStrategy {
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(rng);
    PartyStrategy {
        order,
        input_fns: (0..n).map(|j| random_table(rng, j as u32 + 1)).collect(),
        output_fn: random_table(rng, n as u32 + 1),
    }
}

pub fn random_wiring(rng: &mut impl Rng, n: usize) -> Wiring {
    Wiring::new(random_strategy(rng, n), random_strategy(rng, n)).unwrap()
}
